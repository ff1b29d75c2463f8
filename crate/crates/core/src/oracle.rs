//! Brute-force reference answers, independent of the lattice machinery.
//!
//! Used by the test suites and the `oracle` subcommand to cross-check the
//! certificate engine on small instances.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::lp::{solve_feasibility, LpInstance};
use crate::problem::IpProblem;
use crate::rational::{int, Rational};
use crate::reduction::{group_sum, AbelianGroupSpec, Modulus, ZSystem};

/// Default cap on the size of the search box.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// All solutions of `Ax = b, x ∈ ℕⁿ`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub solutions: Vec<Vec<u64>>,
    /// The whole search box was covered.
    pub exhausted: bool,
}

impl SolutionSet {
    pub fn is_feasible(&self) -> bool {
        !self.solutions.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    budget: u128,
}

impl Default for Oracle {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET }
    }
}

impl Oracle {
    pub fn with_budget(budget: u128) -> Self {
        Self { budget }
    }

    /// `x_k ≤ min_j ⌊b_j / A_{j;k}⌋` over the rows where `A_{j;k} > 0`.
    pub fn bounds(problem: &IpProblem) -> Vec<u64> {
        problem
            .columns()
            .iter()
            .map(|a| {
                a.iter()
                    .zip(problem.b())
                    .filter(|(&v, _)| v > 0)
                    .map(|(&v, &b)| b / v)
                    .min()
                    .expect("columns are nonzero")
            })
            .collect()
    }

    pub fn enumerate_solutions(&self, problem: &IpProblem) -> Result<SolutionSet> {
        let bounds = Self::bounds(problem);
        let volume = bounds.iter().fold(1u128, |acc, &u| acc.saturating_mul(u as u128 + 1));
        if volume > self.budget {
            return Err(Error::BoxTooLarge {
                volume: volume.to_string(),
                budget: self.budget,
            });
        }
        let mut solutions = Vec::new();
        let mut x = vec![0u64; problem.n()];
        let mut residual = problem.b().to_vec();
        search(problem.columns(), 0, &mut x, &mut residual, &mut solutions);
        Ok(SolutionSet {
            solutions,
            exhausted: true,
        })
    }

    /// `min cᵀx` over the integer solutions; `None` when there are none.
    pub fn ip_optimum(&self, problem: &IpProblem) -> Result<Option<(Rational, Vec<u64>)>> {
        let cost = problem.cost().ok_or(Error::MissingObjective)?;
        let set = self.enumerate_solutions(problem)?;
        Ok(set
            .solutions
            .into_iter()
            .map(|x| {
                let v: Rational = cost.iter().zip(&x).map(|(c, &xi)| c * int(xi as i64)).sum();
                (v, x)
            })
            .min_by(|a, b| a.0.cmp(&b.0)))
    }
}

fn search(columns: &[Vec<u64>], k: usize, x: &mut [u64], residual: &mut [u64], out: &mut Vec<Vec<u64>>) {
    if k == columns.len() {
        if residual.iter().all(|&r| r == 0) {
            out.push(x.to_vec());
        }
        return;
    }
    let a = &columns[k];
    let cap = a
        .iter()
        .zip(residual.iter())
        .filter(|(&v, _)| v > 0)
        .map(|(&v, &r)| r / v)
        .min()
        .unwrap_or(0);
    for q in 0..=cap {
        x[k] = q;
        search(columns, k + 1, x, residual, out);
        if q < cap {
            for (r, &v) in residual.iter_mut().zip(a) {
                *r -= v;
            }
        }
    }
    for (r, &v) in residual.iter_mut().zip(a) {
        *r += v * cap;
    }
    x[k] = 0;
}

pub fn enumerate_solutions(problem: &IpProblem) -> Result<SolutionSet> {
    Oracle::default().enumerate_solutions(problem)
}

pub fn ip_optimum(problem: &IpProblem) -> Result<Option<(Rational, Vec<u64>)>> {
    Oracle::default().ip_optimum(problem)
}

/// Whether `point` is a convex combination of `solutions`, decided by an
/// exact LP in the weights.
pub fn hull_membership(point: &[Rational], solutions: &[Vec<u64>]) -> bool {
    if solutions.is_empty() {
        return false;
    }
    let n = point.len();
    let mut matrix: Vec<Vec<Rational>> = (0..n)
        .map(|k| solutions.iter().map(|s| int(s[k] as i64)).collect())
        .collect();
    matrix.push(vec![Rational::one(); solutions.len()]);
    let mut rhs = point.to_vec();
    rhs.push(Rational::one());
    let lp = LpInstance::new(matrix, rhs, solutions.len()).expect("consistent shape");
    solve_feasibility(&lp).is_feasible()
}

/// Solutions of `𝒜x = b` with `x ∈ ℕ^ℓ` and `Σx ≤ box_bound`.
pub fn zsystem_box_solutions(sys: &ZSystem, box_bound: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut x = vec![0u64; sys.cols()];
    fn rec(sys: &ZSystem, k: usize, left: u64, x: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == x.len() {
            let ok = sys.matrix().iter().zip(sys.rhs()).all(|(row, b)| {
                row.iter()
                    .zip(x.iter())
                    .map(|(a, &v)| a * BigInt::from(v))
                    .sum::<BigInt>()
                    == *b
            });
            if ok {
                out.push(x.clone());
            }
            return;
        }
        for q in 0..=left {
            x[k] = q;
            rec(sys, k + 1, left - q, x, out);
        }
        x[k] = 0;
    }
    rec(sys, 0, box_bound, &mut x, &mut out);
    out
}

/// The submonoid generated by the spec's generators, by breadth-first
/// closure. Needs every modulus finite; `limit` caps the group order.
pub fn semigroup_closure(spec: &AbelianGroupSpec, limit: u128) -> Result<BTreeSet<Vec<i64>>> {
    let mut order = 1u128;
    for m in spec.moduli() {
        match m {
            Modulus::Finite(p) => order = order.saturating_mul(*p as u128),
            Modulus::Infinite => {
                return Err(Error::DimensionMismatch(
                    "closure enumeration needs every modulus finite".into(),
                ))
            }
        }
    }
    if order > limit {
        return Err(Error::BoxTooLarge {
            volume: order.to_string(),
            budget: limit,
        });
    }
    let mut seen = BTreeSet::from([spec.identity()]);
    let mut queue = VecDeque::from([spec.identity()]);
    while let Some(g) = queue.pop_front() {
        for a in spec.generators() {
            let h = group_sum(&g, a, spec.moduli());
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    Ok(seen)
}

/// Membership in the semigroup, by closure.
pub fn semigroup_member(spec: &AbelianGroupSpec, limit: u128) -> Result<bool> {
    Ok(semigroup_closure(spec, limit)?.contains(spec.target()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frobenius(b: u64) -> IpProblem {
        IpProblem::new(vec![vec![3, 4]], vec![b], None).unwrap()
    }

    #[test]
    fn frobenius_solutions() {
        let feasible: Vec<u64> = (0..=12)
            .filter(|&b| enumerate_solutions(&frobenius(b)).unwrap().is_feasible())
            .collect();
        assert_eq!(feasible, vec![0, 3, 4, 6, 7, 8, 9, 10, 11, 12]);
        let twelve = enumerate_solutions(&frobenius(12)).unwrap();
        assert_eq!(twelve.solutions, vec![vec![0, 3], vec![4, 0]]);
    }

    #[test]
    fn nested_loop_agreement() {
        let p = IpProblem::new(vec![vec![1, 2, 0], vec![0, 1, 3]], vec![4, 5], None).unwrap();
        let got = enumerate_solutions(&p).unwrap().solutions;
        let mut want = Vec::new();
        for x0 in 0..=4u64 {
            for x1 in 0..=5u64 {
                for x2 in 0..=5u64 {
                    if x0 + 2 * x1 == 4 && x1 + 3 * x2 == 5 {
                        want.push(vec![x0, x1, x2]);
                    }
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn budget_is_enforced() {
        let p = IpProblem::new(vec![vec![1, 1, 1]], vec![1000], None).unwrap();
        assert!(matches!(
            Oracle::with_budget(1000).enumerate_solutions(&p),
            Err(Error::BoxTooLarge { .. })
        ));
    }

    #[test]
    fn optimum_with_cost() {
        let p = frobenius(12).with_cost(vec![int(1), int(1)]).unwrap();
        assert_eq!(ip_optimum(&p).unwrap(), Some((int(3), vec![0, 3])));
        assert_eq!(
            ip_optimum(&frobenius(5).with_cost(vec![int(1), int(1)]).unwrap()).unwrap(),
            None
        );
        assert_eq!(ip_optimum(&frobenius(5)).unwrap_err(), Error::MissingObjective);
    }

    #[test]
    fn hull_checks() {
        let sols = vec![vec![0, 3], vec![4, 0]];
        assert!(hull_membership(&[int(2), Rational::new(3.into(), 2.into())], &sols));
        assert!(!hull_membership(&[int(1), int(1)], &sols));
        assert!(!hull_membership(&[int(0)], &[]));
    }

    #[test]
    fn cyclic_closure() {
        let spec = AbelianGroupSpec::new(&[Some(6)], vec![vec![4]], vec![2]).unwrap();
        let closure = semigroup_closure(&spec, 1000).unwrap();
        assert_eq!(closure, BTreeSet::from([vec![0], vec![2], vec![4]]));
        let spec = AbelianGroupSpec::new(&[Some(6)], vec![vec![4]], vec![3]).unwrap();
        assert!(!semigroup_member(&spec, 1000).unwrap());
    }

    #[test]
    fn zsystem_brute_force() {
        let sys = ZSystem::from_i64(&[vec![1, -1]], &[1]).unwrap();
        assert_eq!(zsystem_box_solutions(&sys, 3), vec![vec![1, 0], vec![2, 1]]);
    }
}
