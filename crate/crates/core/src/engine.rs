//! Feasibility decisions with certificates attached.
//!
//! [`check`] decides `Ax = b, x ∈ ℕⁿ` through the lifted system and returns
//! either an integral solution with its witness polynomials or an
//! infeasibility certificate. Three solvers can produce the decision:
//!
//! * `Theta`: exact simplex on `Θy = 𝐛`; the Farkas ray `π` is mapped to
//!   the moment side with one Kronecker solve against `Δ`.
//! * `Moment`: exact simplex on `ΔΘy = Δ𝐛` (or `Δ′Θy = Δ′𝐛`), whose Farkas
//!   ray already is the certificate.
//! * `Network`: breadth-first search on the lattice graph without building
//!   `Θ`; the reachable set gives `π`.
//!
//! `Auto` uses the simplex on `Θ` for small lattices and the network search
//! otherwise. Certificates need the dense `ξ` over the whole lattice, so they
//! are only produced up to [`CheckOptions::certificate_limit`] points.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::certificates::{
    extract_infeasibility, moment_ray_from_network_ray, verify_witness, witness_from_solution, CertificateKind,
    InfeasibilityCertificate, Polynomial, WitnessPolynomials,
};
use crate::error::{Error, Result};
use crate::lattice::LatticeBox;
use crate::lp::network::{lattice_shortest_flow, UnitFlow};
use crate::lp::{LpInstance, LpOutcome, PivotRule, Simplex};
use crate::matrices::{
    aggregate_integer, build_delta, build_theta, delta_theta_dense, dual_theta_dense, rhs_vectors, AggregationE,
    ColumnLayout,
};
use crate::problem::IpProblem;
use crate::rational::{from_big, Rational};
use crate::reduction::{semigroup_to_zsystem, zsystem_to_nsystem, AbelianGroupSpec, NSystem, ReducedProblem, ZSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    #[default]
    Auto,
    Theta,
    Moment,
    Network,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Auto => "auto",
            Route::Theta => "theta",
            Route::Moment => "moment",
            Route::Network => "network",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub route: Route,
    pub kind: CertificateKind,
    /// Largest lattice for which an infeasibility certificate is built.
    pub certificate_limit: usize,
    /// Largest lattice `Auto` sends to the simplex.
    pub simplex_limit: usize,
    /// Largest lattice the network search accepts.
    pub lattice_limit: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            route: Route::Auto,
            kind: CertificateKind::Polynomial,
            certificate_limit: 4096,
            simplex_limit: 64,
            lattice_limit: 50_000_000,
        }
    }
}

impl CheckOptions {
    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn with_kind(mut self, kind: CertificateKind) -> Self {
        self.kind = kind;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub feasible: bool,
    /// Solver that decided; never `Auto`.
    pub route: Route,
    pub lattice_points: usize,
    pub x: Option<Vec<u64>>,
    pub witness: Option<WitnessPolynomials>,
    pub certificate: Option<InfeasibilityCertificate>,
    pub note: Option<String>,
}

pub fn check(problem: &IpProblem, opts: &CheckOptions) -> Result<Decision> {
    check_weighted(problem, opts, None)
}

/// [`check`] preferring solutions of least weight `Σ_k w_k x_k`, where
/// `weights[k] ∈ {0, 1}`. Without weights every generator costs one.
pub fn check_weighted(problem: &IpProblem, opts: &CheckOptions, weights: Option<&[u8]>) -> Result<Decision> {
    let weights: Vec<u8> = match weights {
        Some(w) if w.len() == problem.n() => w.to_vec(),
        Some(w) => {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} generators",
                w.len(),
                problem.n()
            )))
        }
        None => vec![1; problem.n()],
    };
    let lattice = LatticeBox::new(problem.beta())?;
    let s = lattice.len();
    let route = match opts.route {
        Route::Auto if s <= opts.simplex_limit => Route::Theta,
        Route::Auto => Route::Network,
        r => r,
    };
    match route {
        Route::Network => check_network(problem, opts, s, &weights),
        Route::Theta => check_theta(problem, opts, s, &weights),
        Route::Moment => check_moment(problem, opts, s, &weights),
        Route::Auto => unreachable!("resolved above"),
    }
}

fn feasible(problem: &IpProblem, route: Route, s: usize, x: Vec<u64>, witness: WitnessPolynomials) -> Decision {
    assert!(problem.is_solution(&x), "aggregated flow does not solve Ax = b");
    assert!(
        verify_witness(&witness, problem.b(), problem.columns(), problem.beta()),
        "witness polynomials fail the identity"
    );
    Decision {
        feasible: true,
        route,
        lattice_points: s,
        x: Some(x),
        witness: Some(witness),
        certificate: None,
        note: None,
    }
}

fn infeasible(route: Route, s: usize, certificate: Option<InfeasibilityCertificate>, note: Option<String>) -> Decision {
    Decision {
        feasible: false,
        route,
        lattice_points: s,
        x: None,
        witness: None,
        certificate,
        note,
    }
}

fn omitted(s: usize, limit: usize) -> Option<String> {
    Some(format!(
        "certificate omitted: the lattice has {s} points, above the limit of {limit}"
    ))
}

fn certificate_from_potential(
    problem: &IpProblem,
    pi: &[Rational],
    kind: CertificateKind,
) -> Result<InfeasibilityCertificate> {
    let layout = ColumnLayout::new(problem.columns(), problem.beta())?;
    let delta = build_delta(problem.beta())?;
    let xi = moment_ray_from_network_ray(&delta, pi, kind);
    extract_infeasibility(&layout, problem.b(), &xi, kind)
}

fn check_network(problem: &IpProblem, opts: &CheckOptions, s: usize, weights: &[u8]) -> Result<Decision> {
    if s > opts.lattice_limit {
        return Err(Error::BoxTooLarge {
            volume: s.to_string(),
            budget: opts.lattice_limit as u128,
        });
    }
    let flow = lattice_shortest_flow(problem.columns(), problem.beta(), problem.b(), weights)?;
    match flow {
        UnitFlow::Path(arcs) => {
            let mut polys = vec![Polynomial::zero(); problem.n()];
            let mut x = vec![0u64; problem.n()];
            for key in arcs {
                x[key.generator] += 1;
                polys[key.generator].add_term(key.offset, Rational::from_integer(1.into()));
            }
            Ok(feasible(problem, Route::Network, s, x, WitnessPolynomials::new(polys)))
        }
        cut @ UnitFlow::Cut(_) => {
            if s > opts.certificate_limit {
                return Ok(infeasible(Route::Network, s, None, omitted(s, opts.certificate_limit)));
            }
            let pi = cut.cut_potential().expect("cut");
            let cert = certificate_from_potential(problem, &pi, opts.kind)?;
            Ok(infeasible(Route::Network, s, Some(cert), None))
        }
    }
}

fn check_theta(problem: &IpProblem, opts: &CheckOptions, s: usize, weights: &[u8]) -> Result<Decision> {
    let theta = build_theta(problem.columns(), problem.beta())?;
    let rhs = rhs_vectors(problem.b(), problem.beta())?;
    let lp = LpInstance::new(
        theta.to_rational_rows(),
        rhs.lifted.iter().map(from_big).collect(),
        theta.cols(),
    )?;
    match solve_weighted(lp, theta.layout(), weights)? {
        LpOutcome::Feasible { point } | LpOutcome::Optimal { point, .. } => {
            let y = integral(&point)?;
            let layout = theta.layout();
            let x = aggregate_to_u64(&AggregationE::new(layout), &y)?;
            let witness = WitnessPolynomials::from_lifted(layout, &point);
            Ok(feasible(problem, Route::Theta, s, x, witness))
        }
        LpOutcome::InfeasibleWithRay { ray } => {
            if s > opts.certificate_limit {
                return Ok(infeasible(Route::Theta, s, None, omitted(s, opts.certificate_limit)));
            }
            let cert = certificate_from_potential(problem, &ray, opts.kind)?;
            Ok(infeasible(Route::Theta, s, Some(cert), None))
        }
        other => unreachable!("the flow polytope is bounded, got {other:?}"),
    }
}

fn check_moment(problem: &IpProblem, opts: &CheckOptions, s: usize, weights: &[u8]) -> Result<Decision> {
    let layout = ColumnLayout::new(problem.columns(), problem.beta())?;
    let rhs = rhs_vectors(problem.b(), problem.beta())?;
    let (matrix, d) = match opts.kind {
        CertificateKind::Polynomial => (delta_theta_dense(&layout), &rhs.moments),
        CertificateKind::Exponential => (dual_theta_dense(&layout), &rhs.dual),
    };
    let lp = LpInstance::from_integer_rows(&matrix, d, layout.len())?;
    match solve_weighted(lp, &layout, weights)? {
        LpOutcome::Feasible { point } | LpOutcome::Optimal { point, .. } => {
            let y = integral(&point)?;
            let x = aggregate_to_u64(&AggregationE::new(&layout), &y)?;
            let witness = WitnessPolynomials::from_lifted(&layout, &point);
            Ok(feasible(problem, Route::Moment, s, x, witness))
        }
        LpOutcome::InfeasibleWithRay { ray } => {
            let cert = extract_infeasibility(&layout, problem.b(), &ray, opts.kind)?;
            Ok(infeasible(Route::Moment, s, Some(cert), None))
        }
        other => unreachable!("the flow polytope is bounded, got {other:?}"),
    }
}

// Minimises the arc weights over the flow polytope; its vertices are paths.
fn solve_weighted(lp: LpInstance, layout: &ColumnLayout, weights: &[u8]) -> Result<LpOutcome> {
    let objective = layout
        .keys()
        .iter()
        .map(|key| Rational::from_integer(weights[key.generator].into()))
        .collect();
    Simplex::new(PivotRule::Dantzig).minimize(&lp.with_objective(objective)?)
}

fn integral(point: &[Rational]) -> Result<Vec<BigInt>> {
    if point.iter().all(|v| v.is_integer()) {
        Ok(point.iter().map(|v| v.to_integer()).collect())
    } else {
        Err(Error::NonIntegralVertex)
    }
}

fn aggregate_to_u64(e: &AggregationE, y: &[BigInt]) -> Result<Vec<u64>> {
    aggregate_integer(e, y)
        .iter()
        .map(|v| v.to_u64().ok_or_else(|| Error::ValueTooLarge(v.to_string())))
        .collect()
}

/// Telescoping witness for a known solution, checked like the engine's.
pub fn witness_for(problem: &IpProblem, x: &[u64]) -> Result<WitnessPolynomials> {
    witness_from_solution(problem, x)
}

/// Outcome of deciding an integer system through its `ℕ`-reduction.
#[derive(Debug, Clone)]
pub struct ZDecision {
    pub feasible: bool,
    pub nsystem: Option<NSystem>,
    pub reduced: Option<ReducedProblem>,
    pub decision: Option<Decision>,
    /// Full solution of the shifted system `A*`.
    pub lifted_solution: Option<Vec<BigInt>>,
    /// Solution of the original system.
    pub solution: Option<Vec<BigInt>>,
    pub note: Option<String>,
}

/// Decides `𝒜x = b, x ∈ ℕ^ℓ, Σx ≤ box_bound` with the `ℕ` engine.
pub fn check_zsystem(sys: &ZSystem, box_bound: &BigInt, opts: &CheckOptions) -> Result<ZDecision> {
    let nsystem = match zsystem_to_nsystem(sys, box_bound) {
        Ok(n) => n,
        Err(Error::NegativeRhs { row, value }) => {
            return Ok(ZDecision {
                feasible: false,
                nsystem: None,
                reduced: None,
                decision: None,
                lifted_solution: None,
                solution: None,
                note: Some(format!(
                    "row {row} stays negative ({value}) after the shift, so no solution lies in the box"
                )),
            })
        }
        Err(e) => return Err(e),
    };
    let reduced = nsystem.to_problem()?;
    // slack columns are free, so the search prefers small original solutions
    let weights: Vec<u8> = reduced
        .kept_columns
        .iter()
        .map(|&k| u8::from(k < nsystem.original_columns))
        .collect();
    let decision = check_weighted(&reduced.problem, opts, Some(&weights))?;
    let (lifted_solution, solution) = match &decision.x {
        Some(x) => {
            let full = reduced.expand(x);
            assert!(nsystem.is_solution(&full), "expanded solution misses A*");
            let original = nsystem.recover(&full);
            assert!(
                sys.is_solution(&original),
                "recovered solution misses the original system"
            );
            (Some(full), Some(original))
        }
        None => (None, None),
    };
    Ok(ZDecision {
        feasible: decision.feasible,
        nsystem: Some(nsystem),
        reduced: Some(reduced),
        note: decision.note.clone(),
        decision: Some(decision),
        lifted_solution,
        solution,
    })
}

/// Semigroup membership through [`check_zsystem`]; a member's solution
/// splits as `(x, u, w)` with `u, w` the multiples of the moduli.
pub fn check_semigroup(spec: &AbelianGroupSpec, box_bound: &BigInt, opts: &CheckOptions) -> Result<ZDecision> {
    let sys = semigroup_to_zsystem(spec)?;
    check_zsystem(&sys, box_bound, opts)
}

/// `true` when every entry is zero.
pub fn is_origin(b: &[u64]) -> bool {
    b.iter().all(Zero::is_zero)
}
