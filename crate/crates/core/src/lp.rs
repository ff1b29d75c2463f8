//! Exact rational linear programming over `{x : Mx = d, x ≥ 0}`.
//!
//! A two-phase tableau simplex on `BigRational`. Phase 1 minimises the sum
//! of artificial variables; a positive optimum yields a Farkas ray from the
//! phase-1 duals, a zero optimum drives the artificials out of the basis
//! (rows where that is impossible are linearly redundant and stay in place
//! so row indices keep matching the caller's). Every returned point, ray or
//! direction is re-checked against the instance before it is handed back.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dot, from_big, Rational};

pub mod network;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpInstance {
    matrix: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    objective: Option<Vec<Rational>>,
    cols: usize,
}

impl LpInstance {
    pub fn new(matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>, cols: usize) -> Result<Self> {
        if matrix.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} constraint rows but {} right-hand side entries",
                matrix.len(),
                rhs.len()
            )));
        }
        if let Some(i) = matrix.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "constraint row {i} has {} entries, expected {cols}",
                matrix[i].len()
            )));
        }
        Ok(Self {
            matrix,
            rhs,
            objective: None,
            cols,
        })
    }

    pub fn from_integer_rows(rows: &[Vec<BigInt>], rhs: &[BigInt], cols: usize) -> Result<Self> {
        Self::new(
            rows.iter().map(|r| r.iter().map(from_big).collect()).collect(),
            rhs.iter().map(from_big).collect(),
            cols,
        )
    }

    pub fn with_objective(mut self, objective: Vec<Rational>) -> Result<Self> {
        if objective.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} entries, expected {}",
                objective.len(),
                self.cols
            )));
        }
        self.objective = Some(objective);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn objective(&self) -> Option<&[Rational]> {
        self.objective.as_deref()
    }

    /// `Mx − d`.
    pub fn residual(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, d)| dot(row, x) - d)
            .collect()
    }

    /// `Mx = d` and `x ≥ 0`, exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.cols && x.iter().all(|v| !v.is_negative()) && self.residual(x).iter().all(Zero::is_zero)
    }

    /// `Mᵀξ ≥ 0` and `dᵀξ < 0`, exactly.
    pub fn is_farkas_ray(&self, ray: &[Rational]) -> bool {
        if ray.len() != self.rows() {
            return false;
        }
        let mut col_sums = vec![Rational::zero(); self.cols];
        for (row, xi) in self.matrix.iter().zip(ray) {
            if xi.is_zero() {
                continue;
            }
            for (acc, a) in col_sums.iter_mut().zip(row) {
                if !a.is_zero() {
                    *acc += a * xi;
                }
            }
        }
        col_sums.iter().all(|v| !v.is_negative()) && dot(&self.rhs, ray).is_negative()
    }

    pub fn objective_value(&self, x: &[Rational]) -> Option<Rational> {
        self.objective.as_ref().map(|g| dot(g, x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    Feasible {
        point: Vec<Rational>,
    },
    InfeasibleWithRay {
        ray: Vec<Rational>,
    },
    Unbounded {
        point: Vec<Rational>,
        direction: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::InfeasibleWithRay { .. })
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } | LpOutcome::Feasible { point } | LpOutcome::Unbounded { point, .. } => {
                Some(point)
            }
            LpOutcome::InfeasibleWithRay { .. } => None,
        }
    }

    pub fn ray(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::InfeasibleWithRay { ray } => Some(ray),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variable; never cycles.
    #[default]
    Bland,
    /// Most negative reduced cost; falls back to Bland after a run of
    /// degenerate pivots.
    Dantzig,
}

const DEGENERATE_RUN_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, Default)]
pub struct Simplex {
    rule: PivotRule,
}

impl Simplex {
    pub fn new(rule: PivotRule) -> Self {
        Self { rule }
    }

    pub fn feasibility(&self, inst: &LpInstance) -> LpOutcome {
        let mut t = Tableau::new(inst, self.rule);
        match t.phase_one() {
            PhaseOne::Infeasible(ray) => checked_ray(inst, ray),
            PhaseOne::Feasible => {
                let point = t.point();
                assert!(inst.is_feasible_point(&point), "simplex produced an infeasible point");
                LpOutcome::Feasible { point }
            }
        }
    }

    pub fn minimize(&self, inst: &LpInstance) -> Result<LpOutcome> {
        let objective = inst.objective().ok_or(Error::MissingObjective)?;
        let mut t = Tableau::new(inst, self.rule);
        if let PhaseOne::Infeasible(ray) = t.phase_one() {
            return Ok(checked_ray(inst, ray));
        }
        let outcome = match t.phase_two(objective) {
            PhaseTwo::Optimal => {
                let point = t.point();
                let value = dot(objective, &point);
                LpOutcome::Optimal { value, point }
            }
            PhaseTwo::Unbounded(direction) => LpOutcome::Unbounded {
                point: t.point(),
                direction,
            },
        };
        let point = outcome.point().expect("phase two yields a point");
        assert!(inst.is_feasible_point(point), "simplex produced an infeasible point");
        if let LpOutcome::Unbounded { direction, .. } = &outcome {
            let zero_rhs = LpInstance::new(inst.matrix.clone(), vec![Rational::zero(); inst.rows()], inst.cols)
                .expect("same shape");
            assert!(zero_rhs.is_feasible_point(direction), "bad recession direction");
            assert!(dot(objective, direction).is_negative(), "direction does not improve");
        }
        Ok(outcome)
    }
}

fn checked_ray(inst: &LpInstance, ray: Vec<Rational>) -> LpOutcome {
    assert!(inst.is_farkas_ray(&ray), "phase-one duals are not a Farkas ray");
    LpOutcome::InfeasibleWithRay { ray }
}

/// Feasibility of `Mx = d, x ≥ 0` with Bland's rule.
pub fn solve_feasibility(inst: &LpInstance) -> LpOutcome {
    Simplex::new(PivotRule::Bland).feasibility(inst)
}

/// Minimises the instance objective with Bland's rule.
pub fn solve_min(inst: &LpInstance) -> Result<LpOutcome> {
    Simplex::new(PivotRule::Bland).minimize(inst)
}

/// A basic feasible solution, returned only when it is integral.
///
/// With `unimodular_hint` the caller promises a totally unimodular matrix
/// and integral right-hand side, so a fractional vertex is reported as
/// [`Error::NonIntegralVertex`] instead of `Ok(None)`.
pub fn integral_vertex(inst: &LpInstance, unimodular_hint: bool) -> Result<Option<Vec<BigInt>>> {
    let LpOutcome::Feasible { point } = solve_feasibility(inst) else {
        return Ok(None);
    };
    if point.iter().all(|v| v.is_integer()) {
        return Ok(Some(point.iter().map(|v| v.to_integer()).collect()));
    }
    if unimodular_hint {
        Err(Error::NonIntegralVertex)
    } else {
        Ok(None)
    }
}

enum PhaseOne {
    Feasible,
    Infeasible(Vec<Rational>),
}

enum PhaseTwo {
    Optimal,
    Unbounded(Vec<Rational>),
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
    cost: Vec<Rational>,
    cost_rhs: Rational,
    n: usize,
    rule: PivotRule,
    degenerate_run: usize,
}

impl Tableau {
    fn new(inst: &LpInstance, rule: PivotRule) -> Self {
        let r = inst.rows();
        let n = inst.cols();
        let mut rows = Vec::with_capacity(r);
        let mut rhs = Vec::with_capacity(r);
        let mut flipped = Vec::with_capacity(r);
        for (i, (row, d)) in inst.matrix.iter().zip(&inst.rhs).enumerate() {
            let flip = d.is_negative();
            let mut full: Vec<Rational> = Vec::with_capacity(n + r);
            full.extend(row.iter().map(|v| if flip { -v } else { v.clone() }));
            full.extend((0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            rows.push(full);
            rhs.push(if flip { -d } else { d.clone() });
            flipped.push(flip);
        }
        Self {
            rows,
            rhs,
            basis: (n..n + r).collect(),
            flipped,
            cost: Vec::new(),
            cost_rhs: Rational::zero(),
            n,
            rule,
            degenerate_run: 0,
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col].clone();
        if !piv.is_one() {
            for v in self.rows[row].iter_mut().filter(|v| !v.is_zero()) {
                *v = &*v / &piv;
            }
            self.rhs[row] = &self.rhs[row] / &piv;
        }
        let support: Vec<usize> = self.rows[row]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect();
        let (before, rest) = self.rows.split_at_mut(row);
        let (pivot_row, after) = rest.split_first_mut().expect("row in range");
        let pivot_rhs = self.rhs[row].clone();
        for (t, other) in before
            .iter_mut()
            .enumerate()
            .chain(after.iter_mut().enumerate().map(|(i, r)| (i + row + 1, r)))
        {
            let f = other[col].clone();
            if f.is_zero() {
                continue;
            }
            for &k in &support {
                let d = &f * &pivot_row[k];
                other[k] -= d;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[t] -= &f * &pivot_rhs;
            }
        }
        let f = self.cost[col].clone();
        if !f.is_zero() {
            for &k in &support {
                let d = &f * &pivot_row[k];
                self.cost[k] -= d;
            }
            self.cost_rhs -= &f * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    fn entering(&mut self, allowed: usize) -> Option<usize> {
        let use_bland = self.rule == PivotRule::Bland || self.degenerate_run >= DEGENERATE_RUN_LIMIT;
        if use_bland {
            (0..allowed).find(|&j| self.cost[j].is_negative())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..allowed {
                if self.cost[j].is_negative() && best.is_none_or(|b| self.cost[j] < self.cost[b]) {
                    best = Some(j);
                }
            }
            best
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let a = &row[col];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / a;
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs pivots until no allowed column has negative reduced cost.
    /// Returns the unbounded column if the ratio test fails.
    fn optimise(&mut self, allowed: usize) -> Option<usize> {
        while let Some(col) = self.entering(allowed) {
            let Some(row) = self.leaving(col) else {
                return Some(col);
            };
            if self.rhs[row].is_zero() {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(row, col);
        }
        None
    }

    fn phase_one(&mut self) -> PhaseOne {
        let r = self.rows.len();
        let width = self.n + r;
        self.cost = vec![Rational::zero(); width];
        self.cost_rhs = Rational::zero();
        for (row, d) in self.rows.iter().zip(&self.rhs) {
            for (c, v) in self.cost.iter_mut().zip(&row[..self.n]) {
                if !v.is_zero() {
                    *c -= v;
                }
            }
            self.cost_rhs -= d;
        }
        let unbounded = self.optimise(self.n);
        debug_assert!(unbounded.is_none(), "phase one is bounded below by zero");
        let infeasibility = -self.cost_rhs.clone();
        if infeasibility.is_positive() {
            // cost of artificial i is 1 − π_i; the ray is −π mapped back through row flips.
            let ray = (0..r)
                .map(|i| {
                    let pi = Rational::one() - &self.cost[self.n + i];
                    if self.flipped[i] {
                        pi
                    } else {
                        -pi
                    }
                })
                .collect();
            return PhaseOne::Infeasible(ray);
        }
        for i in 0..r {
            if self.basis[i] < self.n {
                continue;
            }
            if let Some(j) = (0..self.n).find(|&j| !self.rows[i][j].is_zero()) {
                self.pivot(i, j);
            }
        }
        PhaseOne::Feasible
    }

    fn phase_two(&mut self, objective: &[Rational]) -> PhaseTwo {
        let weight = |j: usize| -> Rational {
            if j < self.n {
                objective[j].clone()
            } else {
                Rational::zero()
            }
        };
        let width = self.cost.len();
        let mut cost: Vec<Rational> = (0..width).map(weight).collect();
        let mut cost_rhs = Rational::zero();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = weight(self.basis[i]);
            if cb.is_zero() {
                continue;
            }
            for (c, a) in cost.iter_mut().zip(row) {
                if !a.is_zero() {
                    *c -= &cb * a;
                }
            }
            cost_rhs -= &cb * &self.rhs[i];
        }
        self.cost = cost;
        self.cost_rhs = cost_rhs;
        self.degenerate_run = 0;
        match self.optimise(self.n) {
            None => PhaseTwo::Optimal,
            Some(col) => {
                let mut dir = vec![Rational::zero(); self.n];
                dir[col] = Rational::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    if b < self.n {
                        dir[b] = -self.rows[i][col].clone();
                    }
                }
                PhaseTwo::Unbounded(dir)
            }
        }
    }

    fn point(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn inst(rows: &[&[i64]], rhs: &[i64]) -> LpInstance {
        let cols = rows.first().map_or(0, |r| r.len());
        LpInstance::new(
            rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            rhs.iter().map(|&v| int(v)).collect(),
            cols,
        )
        .unwrap()
    }

    fn ratvec(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| Rational::new(n.into(), d.into())).collect()
    }

    #[test]
    fn min_sum_on_frobenius_line() {
        let lp = inst(&[&[3, 4]], &[12]).with_objective(vec![int(1), int(1)]).unwrap();
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            let out = Simplex::new(rule).minimize(&lp).unwrap();
            assert_eq!(out.value(), Some(&int(3)));
            assert_eq!(out.point().unwrap(), &[int(0), int(3)]);
        }
    }

    #[test]
    fn min_first_coordinate() {
        let lp = inst(&[&[3, 4]], &[11]).with_objective(vec![int(1), int(0)]).unwrap();
        let out = solve_min(&lp).unwrap();
        assert_eq!(out.value(), Some(&int(0)));
        assert_eq!(out.point().unwrap(), ratvec(&[(0, 1), (11, 4)]).as_slice());
    }

    #[test]
    fn zero_objective() {
        let lp = inst(&[&[1, 1]], &[2]).with_objective(vec![int(0), int(0)]).unwrap();
        assert_eq!(solve_min(&lp).unwrap().value(), Some(&int(0)));
    }

    #[test]
    fn zero_rhs_is_feasible_at_origin() {
        let lp = inst(&[&[1, -1], &[2, 3]], &[0, 0]);
        assert_eq!(
            solve_feasibility(&lp),
            LpOutcome::Feasible {
                point: vec![int(0), int(0)]
            }
        );
    }

    #[test]
    fn infeasible_ray_is_verified() {
        let lp = inst(&[&[1, 1], &[1, 1]], &[1, 2]);
        let out = solve_feasibility(&lp);
        let ray = out.ray().expect("infeasible");
        assert!(lp.is_farkas_ray(ray));
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        let lp = inst(&[&[-1, 0]], &[-2]);
        assert_eq!(solve_feasibility(&lp).point().unwrap(), &[int(2), int(0)]);
        let lp = inst(&[&[1, 2]], &[-2]);
        assert!(lp.is_farkas_ray(solve_feasibility(&lp).ray().unwrap()));
    }

    #[test]
    fn redundant_rows_keep_indexing() {
        let lp = inst(&[&[1, 1, 0], &[0, 0, 0], &[2, 2, 0], &[0, 1, 1]], &[1, 0, 2, 1]);
        let out = solve_feasibility(&lp);
        assert!(lp.is_feasible_point(out.point().unwrap()));
    }

    #[test]
    fn unbounded_direction() {
        let lp = inst(&[&[1, -1]], &[1]).with_objective(vec![int(0), int(-1)]).unwrap();
        match solve_min(&lp).unwrap() {
            LpOutcome::Unbounded { direction, .. } => assert_eq!(direction, vec![int(1), int(1)]),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn missing_objective() {
        assert_eq!(solve_min(&inst(&[&[1]], &[1])).unwrap_err(), Error::MissingObjective);
    }

    #[test]
    fn integral_vertex_hint() {
        let lp = inst(&[&[2]], &[1]);
        assert_eq!(integral_vertex(&lp, true).unwrap_err(), Error::NonIntegralVertex);
        assert_eq!(integral_vertex(&lp, false).unwrap(), None);
        let lp = inst(&[&[1, 1]], &[3]);
        assert_eq!(
            integral_vertex(&lp, true).unwrap(),
            Some(vec![BigInt::from(3), BigInt::zero()])
        );
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's classic cycling instance in equality form (slacks s1..s3 appended).
        let lp = LpInstance::new(
            vec![
                ratvec(&[(1, 4), (-8, 1), (-1, 1), (9, 1), (1, 1), (0, 1), (0, 1)]),
                ratvec(&[(1, 2), (-12, 1), (-1, 2), (3, 1), (0, 1), (1, 1), (0, 1)]),
                ratvec(&[(0, 1), (0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (1, 1)]),
            ],
            ratvec(&[(0, 1), (0, 1), (1, 1)]),
            7,
        )
        .unwrap()
        .with_objective(ratvec(&[(-3, 4), (20, 1), (-1, 2), (6, 1), (0, 1), (0, 1), (0, 1)]))
        .unwrap();
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            let out = Simplex::new(rule).minimize(&lp).unwrap();
            assert_eq!(out.value(), Some(&Rational::new((-5).into(), 4.into())));
        }
    }
}
