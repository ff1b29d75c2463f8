//! Reductions to `Ax = b` with `A ∈ ℕ^{m×n}`, `b ∈ ℕ^m`.
//!
//! 1. Semigroup membership in `ℤ/p_1 × … × ℤ/p_q × ℤ^{m−q}` becomes an
//!    integer system `𝒜x = b` over `x ∈ ℕ^ℓ` by adding the columns
//!    `−B | B`, `B = diag(p_j)`, for the finite coordinates.
//! 2. An integer system with negative entries becomes a nonnegative one:
//!    shift every column by `α_k = max(0, −min_j 𝒜_{j;k})`, add a slack
//!    `u = ρ − αᵀx`, and raise the right-hand side by `ρ`.
//!
//! The second step needs a bound `M` on the coordinate sum of some
//! solution. [`box_bound`] gives the worst-case bound `2^{6ℓ³φ}` from the
//! facet complexity `φ`; in practice callers pass a small explicit box.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lp::{solve_min, LpInstance, LpOutcome};
use crate::problem::IpProblem;
use crate::rational::{from_big, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulus {
    Finite(u64),
    Infinite,
}

impl Modulus {
    pub fn reduce(self, v: i64) -> i64 {
        match self {
            Modulus::Finite(p) => v.rem_euclid(p as i64),
            Modulus::Infinite => v,
        }
    }
}

/// `x ⊕ y = (x + y) mod P`, entry by entry; infinite moduli add plainly.
pub fn group_sum(x: &[i64], y: &[i64], moduli: &[Modulus]) -> Vec<i64> {
    x.iter().zip(y).zip(moduli).map(|((a, b), m)| m.reduce(a + b)).collect()
}

/// Generators and target in a finitely generated abelian group given by
/// its extended modulus vector `P`. Elements are stored reduced mod `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupSpec {
    moduli: Vec<Modulus>,
    generators: Vec<Vec<i64>>,
    target: Vec<i64>,
}

impl AbelianGroupSpec {
    /// `None` in `moduli` stands for `∞`.
    pub fn new(moduli: &[Option<i64>], generators: Vec<Vec<i64>>, target: Vec<i64>) -> Result<Self> {
        let moduli = moduli
            .iter()
            .enumerate()
            .map(|(index, p)| match *p {
                None => Ok(Modulus::Infinite),
                Some(value) if value > 0 => Ok(Modulus::Finite(value as u64)),
                Some(value) => Err(Error::InvalidModulus { index, value }),
            })
            .collect::<Result<Vec<_>>>()?;
        let m = moduli.len();
        if target.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "target has {} entries, P has {m}",
                target.len()
            )));
        }
        if let Some(k) = generators.iter().position(|g| g.len() != m) {
            return Err(Error::DimensionMismatch(format!(
                "generator {k} has {} entries, P has {m}",
                generators[k].len()
            )));
        }
        let reduce = |v: &[i64]| -> Vec<i64> { v.iter().zip(&moduli).map(|(x, p)| p.reduce(*x)).collect() };
        let generators = generators.iter().map(|g| reduce(g)).collect();
        let target = reduce(&target);
        Ok(Self {
            moduli,
            generators,
            target,
        })
    }

    pub fn moduli(&self) -> &[Modulus] {
        &self.moduli
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn target(&self) -> &[i64] {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    /// Number of finite moduli `q`.
    pub fn finite_count(&self) -> usize {
        self.moduli.iter().filter(|m| matches!(m, Modulus::Finite(_))).count()
    }

    pub fn identity(&self) -> Vec<i64> {
        vec![0; self.dim()]
    }
}

/// `𝒜x = b` over `x ∈ ℕ^ℓ` with integer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSystem {
    matrix: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
    cols: usize,
}

impl ZSystem {
    pub fn new(matrix: Vec<Vec<BigInt>>, rhs: Vec<BigInt>, cols: usize) -> Result<Self> {
        if matrix.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} right-hand side entries",
                matrix.len(),
                rhs.len()
            )));
        }
        if let Some(i) = matrix.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {cols}",
                matrix[i].len()
            )));
        }
        Ok(Self { matrix, rhs, cols })
    }

    pub fn from_i64(matrix: &[Vec<i64>], rhs: &[i64]) -> Result<Self> {
        let cols = matrix.first().map_or(0, Vec::len);
        Self::new(
            matrix
                .iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
            rhs.iter().map(|&v| BigInt::from(v)).collect(),
            cols,
        )
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.rhs
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_solution(&self, x: &[BigInt]) -> bool {
        x.len() == self.cols
            && x.iter().all(|v| !v.is_negative())
            && self
                .matrix
                .iter()
                .zip(&self.rhs)
                .all(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<BigInt>() == *b)
    }

    /// All entries of `𝒜` and `b` are nonnegative.
    pub fn is_natural(&self) -> bool {
        self.matrix.iter().flatten().chain(&self.rhs).all(|v| !v.is_negative())
    }

    fn lp_relaxation(&self) -> LpInstance {
        LpInstance::new(
            self.matrix.iter().map(|r| r.iter().map(from_big).collect()).collect(),
            self.rhs.iter().map(from_big).collect(),
            self.cols,
        )
        .expect("shape checked at construction")
    }
}

/// `b = Ax + (−B̃ | B̃)(u, w)` with `B̃` carrying `p_j` in the row of every
/// finite coordinate `j`; unknowns are `(x, u, w) ∈ ℕ^{n+2q}`.
pub fn semigroup_to_zsystem(spec: &AbelianGroupSpec) -> Result<ZSystem> {
    let m = spec.dim();
    let n = spec.generators().len();
    let finite: Vec<(usize, u64)> = spec
        .moduli()
        .iter()
        .enumerate()
        .filter_map(|(j, p)| match p {
            Modulus::Finite(v) => Some((j, *v)),
            Modulus::Infinite => None,
        })
        .collect();
    let q = finite.len();
    let mut matrix = vec![vec![BigInt::zero(); n + 2 * q]; m];
    for (k, g) in spec.generators().iter().enumerate() {
        for (j, &v) in g.iter().enumerate() {
            matrix[j][k] = BigInt::from(v);
        }
    }
    for (i, &(j, p)) in finite.iter().enumerate() {
        matrix[j][n + i] = -BigInt::from(p);
        matrix[j][n + q + i] = BigInt::from(p);
    }
    let rhs = spec.target().iter().map(|&v| BigInt::from(v)).collect();
    ZSystem::new(matrix, rhs, n + 2 * q)
}

/// `A*(x, u) = b*` with `A* = [[Â, e], [αᵀ, 1]]`, `b* = (b̂, ρ)`, plus the
/// data needed to map solutions back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NSystem {
    pub a_star: Vec<Vec<BigInt>>,
    pub b_star: Vec<BigInt>,
    pub alpha: Vec<BigInt>,
    pub rho: BigInt,
    pub box_bound: BigInt,
    /// Variables of the original system; they come first in `A*`.
    pub original_columns: usize,
    /// Whether the row `Σx + t = M` was appended before shifting.
    pub compactified: bool,
}

impl NSystem {
    pub fn cols(&self) -> usize {
        self.a_star.first().map_or(0, Vec::len)
    }

    /// The original unknowns of an `A*` solution.
    pub fn recover(&self, solution: &[BigInt]) -> Vec<BigInt> {
        solution[..self.original_columns].to_vec()
    }

    /// The `A*` solution of an original solution `x` (with `Σx ≤ M` when
    /// compactified); `None` if the slack would be negative.
    pub fn lift(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut full = x.to_vec();
        if self.compactified {
            let t = &self.box_bound - x.iter().sum::<BigInt>();
            if t.is_negative() {
                return None;
            }
            full.push(t);
        }
        let shift: BigInt = self.alpha.iter().zip(&full).map(|(a, v)| a * v).sum();
        let u = &self.rho - shift;
        if u.is_negative() {
            return None;
        }
        full.push(u);
        Some(full)
    }

    pub fn is_solution(&self, sol: &[BigInt]) -> bool {
        sol.len() == self.cols()
            && sol.iter().all(|v| !v.is_negative())
            && self
                .a_star
                .iter()
                .zip(&self.b_star)
                .all(|(row, b)| row.iter().zip(sol).map(|(a, v)| a * v).sum::<BigInt>() == *b)
    }

    /// The `ℕ`-problem with zero columns of `A*` dropped.
    pub fn to_problem(&self) -> Result<ReducedProblem> {
        let to_u64 = |v: &BigInt| {
            v.to_u64()
                .ok_or_else(|| Error::ValueTooLarge(format!("{v} does not fit in 64 bits")))
        };
        let n = self.cols();
        let kept_columns: Vec<usize> = (0..n)
            .filter(|&k| self.a_star.iter().any(|r| !r[k].is_zero()))
            .collect();
        let rows = self
            .a_star
            .iter()
            .map(|r| kept_columns.iter().map(|&k| to_u64(&r[k])).collect())
            .collect::<Result<Vec<Vec<u64>>>>()?;
        let b = self.b_star.iter().map(to_u64).collect::<Result<Vec<u64>>>()?;
        let problem = IpProblem::new(rows, b, None)?;
        Ok(ReducedProblem {
            problem,
            kept_columns,
            full_columns: n,
        })
    }
}

/// An [`NSystem`] as an [`IpProblem`], remembering which `A*` columns were kept.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub problem: IpProblem,
    pub kept_columns: Vec<usize>,
    pub full_columns: usize,
}

impl ReducedProblem {
    /// Full-length `A*` solution with zeros for the dropped columns.
    pub fn expand(&self, x: &[u64]) -> Vec<BigInt> {
        let mut full = vec![BigInt::zero(); self.full_columns];
        for (&k, &v) in self.kept_columns.iter().zip(x) {
            full[k] = BigInt::from(v);
        }
        full
    }
}

/// Shifts `𝒜x = b` (solutions with `Σx ≤ box_bound`) to an `ℕ`-system.
///
/// When the real relaxation allows a coordinate sum above `box_bound`
/// (including the unbounded case) the box row `Σx + t = box_bound` is
/// appended first, so the solutions of the result correspond one-to-one
/// with the solutions inside the box. `ρ = max(|α|₁, 1) · box_bound`.
pub fn zsystem_to_nsystem(sys: &ZSystem, box_bound: &BigInt) -> Result<NSystem> {
    if box_bound.is_negative() {
        return Err(Error::Parse(format!("box bound {box_bound} is negative")));
    }
    let compactified = needs_box_row(sys, box_bound);
    let mut matrix = sys.matrix.clone();
    let mut rhs = sys.rhs.clone();
    if compactified {
        for row in &mut matrix {
            row.push(BigInt::zero());
        }
        matrix.push(vec![BigInt::one(); sys.cols + 1]);
        rhs.push(box_bound.clone());
    }
    let cols = sys.cols + usize::from(compactified);
    let alpha: Vec<BigInt> = (0..cols)
        .map(|k| {
            let min = matrix.iter().map(|r| &r[k]).min().cloned().unwrap_or_else(BigInt::zero);
            if min.is_negative() {
                -min
            } else {
                BigInt::zero()
            }
        })
        .collect();
    let rho: BigInt = alpha.iter().sum::<BigInt>().max(BigInt::one()) * box_bound;
    let mut a_star = Vec::with_capacity(matrix.len() + 1);
    let mut b_star = Vec::with_capacity(matrix.len() + 1);
    for (row_idx, (row, b)) in matrix.iter().zip(&rhs).enumerate() {
        let b_hat = b + &rho;
        if b_hat.is_negative() {
            return Err(Error::NegativeRhs {
                row: row_idx,
                value: b_hat.to_string(),
            });
        }
        let mut shifted: Vec<BigInt> = row.iter().zip(&alpha).map(|(a, s)| a + s).collect();
        shifted.push(BigInt::one());
        a_star.push(shifted);
        b_star.push(b_hat);
    }
    let mut last = alpha.clone();
    last.push(BigInt::one());
    a_star.push(last);
    b_star.push(rho.clone());
    Ok(NSystem {
        a_star,
        b_star,
        alpha,
        rho,
        box_bound: box_bound.clone(),
        original_columns: sys.cols,
        compactified,
    })
}

fn needs_box_row(sys: &ZSystem, box_bound: &BigInt) -> bool {
    let lp = sys
        .lp_relaxation()
        .with_objective(vec![int(-1); sys.cols])
        .expect("objective length matches");
    match solve_min(&lp).expect("objective present") {
        LpOutcome::InfeasibleWithRay { .. } => false,
        LpOutcome::Unbounded { .. } => true,
        LpOutcome::Optimal { value, .. } => -value > from_big(box_bound),
        LpOutcome::Feasible { .. } => unreachable!("minimize reports optimal or unbounded"),
    }
}

/// Encoding size of an integer: `1 + ⌈log₂(|v|+1)⌉ + ⌈log₂(1+1)⌉`.
pub fn integer_size(v: &BigInt) -> u64 {
    2 + v.bits()
}

/// Facet complexity `φ`: the largest encoding size among the inequalities
/// `𝒜_j x ≤ b_j`, `−𝒜_j x ≤ −b_j`, `−x_i ≤ 0`, and at least `ℓ + 1`.
pub fn facet_complexity(sys: &ZSystem) -> u64 {
    let l = sys.cols as u64;
    let inequality = |coeffs: &mut dyn Iterator<Item = u64>, rhs: u64| 1 + l + coeffs.sum::<u64>() + rhs;
    let mut phi = l + 1;
    for (row, b) in sys.matrix.iter().zip(&sys.rhs) {
        // negation leaves every size unchanged
        phi = phi.max(inequality(&mut row.iter().map(integer_size), integer_size(b)));
    }
    let zero = integer_size(&BigInt::zero());
    let one = integer_size(&BigInt::one());
    if l > 0 {
        phi = phi.max(inequality(&mut std::iter::once(one).chain((1..l).map(|_| zero)), zero));
    }
    phi
}

/// `M = 2^{6ℓ³φ}`: if some `x ∈ ℕ^ℓ` solves the system, one of encoding
/// size at most `6ℓ³φ` does, and its coordinate sum is below `M`.
pub fn box_bound(sys: &ZSystem) -> BigInt {
    let l = sys.cols as u64;
    let exponent = 6 * l * l * l * facet_complexity(sys);
    BigInt::one() << exponent
}

/// How the coordinate-sum box of a reduction is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoxChoice {
    Explicit(BigInt),
    Theoretical,
}

impl BoxChoice {
    pub fn resolve(&self, sys: &ZSystem) -> BigInt {
        match self {
            BoxChoice::Explicit(m) => m.clone(),
            BoxChoice::Theoretical => box_bound(sys),
        }
    }
}

/// Convenience for callers holding rationals.
pub fn to_rational_vec(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(from_big).collect()
}
