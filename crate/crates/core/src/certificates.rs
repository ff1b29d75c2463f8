//! Certificates for both sides of the alternative.
//!
//! A feasible instance is certified by witness polynomials `Q_k` with
//! nonnegative coefficients, `Q_k` supported on `u ≤ β − A_k`, and
//!
//! ```text
//! z^b − 1 = Σ_k Q_k(z) (z^{A_k} − 1).
//! ```
//!
//! The coefficients of `Q_k` are exactly the lifted vector `y[k,u]`, so
//! `Θy = 𝐛` and the polynomial identity are the same statement.
//!
//! An infeasible instance is certified by `ξ` indexed by lattice points:
//!
//! * polynomial kind: `(ΔΘ)ᵀξ ≥ 0` and `p_ξ(b) = Σ_{z≠0} ξ_z b^z < 0`;
//! * exponential kind: `(Δ′Θ)ᵀξ = ΘᵀΔξ ≥ 0` and `f_ξ(b) = Σ_z ξ_z (z^b − 1) < 0`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{add_points, monomial_pow, Point};
use crate::matrices::{build_delta, row_a_z, row_dual_z, ColumnLayout, DeltaMatrix};
use crate::problem::IpProblem;
use crate::rational::{from_big, primitive_integer_vector, Rational};

/// Sparse multivariate polynomial with rational coefficients keyed by
/// exponent vectors. Zero coefficients are never stored, so equality of
/// polynomials is equality of the maps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: BTreeMap<Point, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exponent: Point, coefficient: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(exponent, coefficient);
        p
    }

    pub fn add_term(&mut self, exponent: Point, coefficient: Rational) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coefficient;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(coefficient);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Point, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponent: &[u64]) -> Rational {
        self.terms.get(exponent).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self · z^shift`.
    pub fn shifted(&self, shift: &[u64]) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (add_points(e, shift), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    /// Value at an integer point (negative coordinates allowed).
    pub fn eval(&self, point: &[BigInt]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            let mono = point
                .iter()
                .zip(e)
                .fold(BigInt::one(), |m, (p, &k)| m * p.pow(k as u32));
            acc + c * Rational::from_integer(mono)
        })
    }

    /// Sum of all coefficients, i.e. the value at `(1, …, 1)`.
    pub fn coefficient_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let exps: Vec<String> = e.iter().map(ToString::to_string).collect();
                format!("{}*z^({})", crate::rational::format_rational(c), exps.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Q_1, …, Q_n`, one polynomial per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPolynomials {
    polys: Vec<Polynomial>,
}

impl WitnessPolynomials {
    pub fn new(polys: Vec<Polynomial>) -> Self {
        Self { polys }
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn polynomials_mut(&mut self) -> &mut [Polynomial] {
        &mut self.polys
    }

    /// Reads `Q_k(z) = Σ_u y[k,u] z^u` off a lifted vector.
    pub fn from_lifted(layout: &ColumnLayout, y: &[Rational]) -> Self {
        let mut polys = vec![Polynomial::zero(); layout.generators().len()];
        for (key, v) in layout.keys().iter().zip(y) {
            polys[key.generator].add_term(key.offset.clone(), v.clone());
        }
        Self { polys }
    }

    /// Inverse of [`WitnessPolynomials::from_lifted`]; `None` if a term lies
    /// outside its degree bound.
    pub fn to_lifted(&self, layout: &ColumnLayout) -> Option<Vec<Rational>> {
        let mut y = vec![Rational::zero(); layout.len()];
        for (k, q) in self.polys.iter().enumerate() {
            for (e, c) in q.terms() {
                y[layout.index_of(k, e)?] = c.clone();
            }
        }
        Some(y)
    }

    /// `x_k = Q_k(1, …, 1)`, the derivative-at-one recovery of `x`.
    pub fn recover_solution(&self) -> Vec<Rational> {
        self.polys.iter().map(Polynomial::coefficient_sum).collect()
    }

    /// `Σ_k Q_k(z)(z^{A_k} − 1)`.
    pub fn combination(&self, generators: &[Point]) -> Polynomial {
        self.polys
            .iter()
            .zip(generators)
            .fold(Polynomial::zero(), |acc, (q, a)| acc.add(&q.shifted(a)).sub(q))
    }
}

/// Telescoping witness of an integral solution:
/// `Q_k = z^{x_1A_1 + … + x_{k−1}A_{k−1}} Σ_{q<x_k} z^{qA_k}`.
pub fn witness_from_solution(problem: &IpProblem, x: &[u64]) -> Result<WitnessPolynomials> {
    if !problem.is_solution(x) {
        return Err(Error::NotASolution);
    }
    let mut prefix = vec![0u64; problem.m()];
    let mut polys = Vec::with_capacity(problem.n());
    for (a, &xk) in problem.columns().iter().zip(x) {
        let mut q = Polynomial::zero();
        let mut offset = prefix.clone();
        for _ in 0..xk {
            q.add_term(offset.clone(), Rational::one());
            offset = add_points(&offset, a);
        }
        prefix = offset;
        polys.push(q);
    }
    Ok(WitnessPolynomials { polys })
}

/// Formal check of `z^b − 1 = Σ_k Q_k(z)(z^{A_k} − 1)` with nonnegative
/// coefficients and `deg Q_k ≤ β − A_k`.
pub fn verify_witness(w: &WitnessPolynomials, b: &[u64], generators: &[Point], beta: &[u64]) -> bool {
    if w.polys.len() != generators.len() || b.len() != beta.len() {
        return false;
    }
    for (q, a) in w.polys.iter().zip(generators) {
        for (e, c) in q.terms() {
            if c.is_negative() || e.len() != beta.len() {
                return false;
            }
            if add_points(e, a).iter().zip(beta).any(|(v, bound)| v > bound) {
                return false;
            }
        }
    }
    let mut target = Polynomial::monomial(b.to_vec(), Rational::one());
    target.add_term(vec![0; b.len()], -Rational::one());
    w.combination(generators) == target
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    /// `p_ξ(u) = Σ_{z≠0} ξ_z u^z`, cone `(ΔΘ)ᵀξ ≥ 0`.
    #[default]
    Polynomial,
    /// `f_ξ(u) = Σ_z ξ_z (z^u − 1)`, cone `(Δ′Θ)ᵀξ ≥ 0`.
    Exponential,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateKind::Polynomial => write!(f, "polynomial"),
            CertificateKind::Exponential => write!(f, "exponential"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub kind: CertificateKind,
    pub beta: Point,
    pub b: Point,
    /// Integer `ξ`, one entry per lattice point `z ≤ β` in lattice order.
    pub xi: Vec<BigInt>,
    /// `p_ξ(b)` or `f_ξ(b)`; always negative.
    pub value_at_b: BigInt,
    /// Cone residuals `(ΔΘ)ᵀξ` or `(Δ′Θ)ᵀξ`, one per column `(k,u)`.
    pub residuals: Vec<BigInt>,
}

impl InfeasibilityCertificate {
    /// Nonzero `(z, ξ_z)` pairs in lattice order.
    pub fn support(&self) -> Vec<(Point, BigInt)> {
        let lattice = crate::lattice::LatticeBox::new(&self.beta).expect("beta was valid at construction");
        self.xi
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (lattice.point_of(i), v.clone()))
            .collect()
    }
}

/// Cone residuals of an integer `ξ` for the given kind, as `Θᵀ(Δᵀξ)` (or
/// `Θᵀ(Δξ)`) through the Kronecker factors of `Δ`.
pub fn cone_residuals(layout: &ColumnLayout, xi: &[BigInt], kind: CertificateKind) -> Vec<BigInt> {
    let delta = build_delta(layout.lattice().beta()).expect("the layout's box is valid");
    let xr: Vec<Rational> = xi.iter().map(from_big).collect();
    let v = match kind {
        CertificateKind::Polynomial => delta.transpose_mul(&xr),
        CertificateKind::Exponential => delta.mul_vec(&xr),
    };
    (0..layout.len())
        .map(|col| {
            let (tail, head) = layout.endpoints(col);
            (&v[head] - &v[tail]).to_integer()
        })
        .collect()
}

/// Same as [`cone_residuals`], summing generated rows of `ΔΘ` or `Δ′Θ`.
pub fn cone_residuals_by_rows(layout: &ColumnLayout, xi: &[BigInt], kind: CertificateKind) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); layout.len()];
    for (i, w) in xi.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let z = layout.lattice().point_of(i);
        let row = match kind {
            CertificateKind::Polynomial => row_a_z(layout, &z),
            CertificateKind::Exponential => row_dual_z(layout, &z),
        };
        for (a, r) in acc.iter_mut().zip(row) {
            *a += w * r;
        }
    }
    acc
}

fn value_with_support(
    kind: CertificateKind,
    beta: &[u64],
    support: impl Iterator<Item = (usize, BigInt)>,
    point: &[u64],
) -> BigInt {
    let lattice = crate::lattice::LatticeBox::new(beta).expect("valid beta");
    let mut value = BigInt::zero();
    for (i, w) in support {
        if w.is_zero() {
            continue;
        }
        let z = lattice.point_of(i);
        match kind {
            CertificateKind::Polynomial => {
                if z.iter().any(|&v| v != 0) {
                    value += w * monomial_pow(point, &z);
                }
            }
            CertificateKind::Exponential => {
                value += w * (monomial_pow(&z, point) - BigInt::one());
            }
        }
    }
    value
}

/// Turns a Farkas ray of the moment system (`ΔΘ` for the polynomial kind,
/// `Δ′Θ` for the exponential kind) into a certificate, recomputing the cone
/// residuals and the value at `b` from scratch.
pub fn extract_infeasibility(
    layout: &ColumnLayout,
    b: &[u64],
    ray: &[Rational],
    kind: CertificateKind,
) -> Result<InfeasibilityCertificate> {
    let lattice = layout.lattice();
    if ray.len() != lattice.len() {
        return Err(Error::RayRejected(format!(
            "ray has {} entries, the lattice has {}",
            ray.len(),
            lattice.len()
        )));
    }
    if !lattice.contains(b) {
        return Err(Error::RhsExceedsBox);
    }
    let xi = primitive_integer_vector(ray);
    let residuals = cone_residuals(layout, &xi, kind);
    if let Some(col) = residuals.iter().position(Signed::is_negative) {
        return Err(Error::RayRejected(format!(
            "cone residual at column {col} is {}",
            residuals[col]
        )));
    }
    let value_at_b = value_with_support(kind, lattice.beta(), xi.iter().cloned().enumerate(), b);
    if !value_at_b.is_negative() {
        return Err(Error::RayRejected(format!("value at b is {value_at_b}, not negative")));
    }
    Ok(InfeasibilityCertificate {
        kind,
        beta: lattice.beta().to_vec(),
        b: b.to_vec(),
        xi,
        value_at_b,
        residuals,
    })
}

/// Maps a Farkas ray `π` of `Θy = 𝐛` to a ray of the moment system:
/// `ξ = Δ^{-ᵀ}π` for the polynomial kind and `ξ = Δ^{-1}π` for the
/// exponential kind. Then `(ΔΘ)ᵀξ = Θᵀπ` (resp. `(Δ′Θ)ᵀξ = Θᵀπ`) and the
/// value at `b` equals `𝐛ᵀπ`.
pub fn moment_ray_from_network_ray(delta: &DeltaMatrix, pi: &[Rational], kind: CertificateKind) -> Vec<Rational> {
    match kind {
        CertificateKind::Polynomial => delta.solve_transpose(pi),
        CertificateKind::Exponential => delta.solve(pi),
    }
}

/// `p_ξ(point)` or `f_ξ(point)` depending on the certificate kind.
pub fn evaluate_certificate(cert: &InfeasibilityCertificate, point: &[u64]) -> BigInt {
    value_with_support(cert.kind, &cert.beta, cert.xi.iter().cloned().enumerate(), point)
}
