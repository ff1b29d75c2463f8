//! Moment relaxations `J_1 ≤ J_2 ≤ … ≤ J_{|β|}` of `min{cᵀx : Ax = b, x ∈ ℕⁿ}`.
//!
//! Level `ℓ` keeps the rows `yᵀA^{(z)} = b^z` of the moment system for the
//! lattice points with `1 ≤ |z| ≤ ℓ`, where column `(k,u)` of `A^{(z)}` is
//! `(u + A_k)^z − u^z`, and minimises `cᵀEy`. Level 1 is the classical LP
//! relaxation in the aggregated variables `x̂ = Ey`; the last level uses
//! every nontrivial row, so its optimum is the integer optimum and `Ey` lies
//! in the integer hull.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{degree, monomial_pow, Point};
use crate::lp::{LpInstance, LpOutcome, PivotRule, Simplex};
use crate::matrices::{aggregate, row_a_z, AggregationE, ColumnLayout};
use crate::problem::IpProblem;
use crate::rational::{from_big, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelStatus {
    Optimal,
    /// Feasible; no objective was given.
    Feasible,
    Infeasible,
    Unbounded,
}

impl LevelStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelStatus::Optimal => "optimal",
            LevelStatus::Feasible => "feasible",
            LevelStatus::Infeasible => "infeasible",
            LevelStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyLevel {
    pub level: u64,
    /// Number of constraint rows `#{z ≤ β : 1 ≤ |z| ≤ ℓ}`.
    pub rows: usize,
    pub status: LevelStatus,
    /// `J_ℓ` when optimal.
    pub value: Option<Rational>,
    /// The vertex `y` found, when feasible.
    pub y: Option<Vec<Rational>>,
    /// `x̂ = Ey`, when feasible.
    pub x_hat: Option<Vec<Rational>>,
    /// Farkas ray over the level's rows, when infeasible.
    pub ray: Option<Vec<Rational>>,
}

impl HierarchyLevel {
    pub fn is_feasible(&self) -> bool {
        matches!(
            self.status,
            LevelStatus::Optimal | LevelStatus::Feasible | LevelStatus::Unbounded
        )
    }
}

/// `β = b` when every column fits under `b`, otherwise the default box.
pub fn hierarchy_beta(columns: &[Point], b: &[u64]) -> Point {
    if columns.iter().all(|a| a.iter().zip(b).all(|(x, y)| x <= y)) {
        b.to_vec()
    } else {
        crate::problem::default_beta(columns, b)
    }
}

/// Column layout and moment rows sorted by degree, shared by all levels.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    problem: IpProblem,
    layout: ColumnLayout,
    aggregation: AggregationE,
    // (|z|, row, b^z) for every z ≠ 0, ascending in |z| then lattice order
    rows: Vec<(u64, Vec<BigInt>, BigInt)>,
    rule: PivotRule,
}

impl Hierarchy {
    pub fn new(problem: &IpProblem) -> Result<Self> {
        let layout = ColumnLayout::new(problem.columns(), problem.beta())?;
        let aggregation = AggregationE::new(&layout);
        let mut rows: Vec<(u64, Vec<BigInt>, BigInt)> = layout
            .lattice()
            .points()
            .filter(|z| degree(z) > 0)
            .map(|z| {
                let row = row_a_z(&layout, &z);
                let rhs = monomial_pow(problem.b(), &z);
                (degree(&z), row, rhs)
            })
            .collect();
        // stable: lattice order survives inside each degree
        rows.sort_by_key(|r| r.0);
        Ok(Self {
            problem: problem.clone(),
            layout,
            aggregation,
            rows,
            rule: PivotRule::Dantzig,
        })
    }

    pub fn with_rule(mut self, rule: PivotRule) -> Self {
        self.rule = rule;
        self
    }

    /// `|β| = Σ_j β_j`.
    pub fn max_level(&self) -> u64 {
        degree(self.problem.beta())
    }

    pub fn layout(&self) -> &ColumnLayout {
        &self.layout
    }

    pub fn row_count(&self, level: u64) -> usize {
        self.rows.partition_point(|r| r.0 <= level)
    }

    pub fn relaxation(&self, level: u64) -> Result<LpInstance> {
        let max = self.max_level();
        if level == 0 || level > max {
            return Err(Error::LevelOutOfRange { level, max });
        }
        let count = self.row_count(level);
        let matrix = self.rows[..count]
            .iter()
            .map(|(_, row, _)| row.iter().map(from_big).collect())
            .collect();
        let rhs = self.rows[..count].iter().map(|(_, _, b)| from_big(b)).collect();
        let inst = LpInstance::new(matrix, rhs, self.layout.len())?;
        match self.problem.cost() {
            Some(c) => {
                let objective = self.layout.keys().iter().map(|key| c[key.generator].clone()).collect();
                inst.with_objective(objective)
            }
            None => Ok(inst),
        }
    }

    pub fn solve_level(&self, level: u64) -> Result<HierarchyLevel> {
        let inst = self.relaxation(level)?;
        let simplex = Simplex::new(self.rule);
        let outcome = if inst.objective().is_some() {
            simplex.minimize(&inst)?
        } else {
            simplex.feasibility(&inst)
        };
        let rows = inst.rows();
        let mut out = HierarchyLevel {
            level,
            rows,
            status: LevelStatus::Infeasible,
            value: None,
            y: None,
            x_hat: None,
            ray: None,
        };
        match outcome {
            LpOutcome::InfeasibleWithRay { ray } => out.ray = Some(ray),
            LpOutcome::Optimal { value, point } => {
                out.status = LevelStatus::Optimal;
                out.value = Some(value);
                out.x_hat = Some(aggregate(&self.aggregation, &point));
                out.y = Some(point);
            }
            LpOutcome::Feasible { point } => {
                out.status = LevelStatus::Feasible;
                out.x_hat = Some(aggregate(&self.aggregation, &point));
                out.y = Some(point);
            }
            LpOutcome::Unbounded { point, .. } => {
                out.status = LevelStatus::Unbounded;
                out.x_hat = Some(aggregate(&self.aggregation, &point));
                out.y = Some(point);
            }
        }
        Ok(out)
    }

    /// Levels `1..=max_level` (default `|β|`), stopping after the first
    /// infeasible level since every later level contains its rows.
    pub fn solve(&self, max_level: Option<u64>) -> Result<Vec<HierarchyLevel>> {
        let top = max_level.unwrap_or_else(|| self.max_level());
        if top == 0 || top > self.max_level() {
            return Err(Error::LevelOutOfRange {
                level: top,
                max: self.max_level(),
            });
        }
        let mut levels = Vec::new();
        for level in 1..=top {
            let solved = self.solve_level(level)?;
            let stop = solved.status == LevelStatus::Infeasible;
            levels.push(solved);
            if stop {
                break;
            }
        }
        Ok(levels)
    }
}

pub fn relaxation(problem: &IpProblem, level: u64) -> Result<LpInstance> {
    Hierarchy::new(problem)?.relaxation(level)
}

pub fn solve_hierarchy(problem: &IpProblem, max_level: Option<u64>) -> Result<Vec<HierarchyLevel>> {
    Hierarchy::new(problem)?.solve(max_level)
}

/// `x̂ = Ey` of a feasible level.
pub fn recover_point(level: &HierarchyLevel) -> Option<Vec<Rational>> {
    level.x_hat.clone()
}

/// `J_ℓ ≤ J_{ℓ+1}` over consecutive optimal levels.
pub fn is_monotone(levels: &[HierarchyLevel]) -> bool {
    levels.windows(2).all(|w| match (&w[0].value, &w[1].value) {
        (Some(a), Some(b)) => a <= b,
        _ => true,
    })
}

/// `min{cᵀx : Ax = b, x ≥ 0}` over `ℝⁿ` (or plain feasibility without `c`).
pub fn classical_relaxation(problem: &IpProblem) -> Result<LpInstance> {
    let matrix = problem
        .rows()
        .iter()
        .map(|r| r.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect())
        .collect();
    let rhs = problem
        .b()
        .iter()
        .map(|&v| Rational::from_integer(BigInt::from(v)))
        .collect();
    let inst = LpInstance::new(matrix, rhs, problem.n())?;
    match problem.cost() {
        Some(c) => inst.with_objective(c.to_vec()),
        None => Ok(inst),
    }
}

/// `true` when `y` and `b` have the right shapes and `Ax̂ = b` for `x̂ = Ey`.
pub fn solves_aggregated(problem: &IpProblem, x_hat: &[Rational]) -> bool {
    x_hat.len() == problem.n()
        && problem.rows().iter().zip(problem.b()).all(|(row, &b)| {
            row.iter()
                .zip(x_hat)
                .map(|(&a, x)| x * Rational::from_integer(BigInt::from(a)))
                .fold(Rational::zero(), |acc, v| acc + v)
                == Rational::from_integer(BigInt::from(b))
        })
}
