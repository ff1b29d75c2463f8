use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::rational::Rational;

/// `Ax = b, x ∈ ℕⁿ` with `A ∈ ℕ^{m×n}`, a degree box `β`, and an optional
/// linear cost.
///
/// Construction checks the standing hypotheses of the lifted systems: every
/// column is nonzero and `A_k ≤ β`, `b ≤ β` componentwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpProblem {
    rows: Vec<Vec<u64>>,
    columns: Vec<Point>,
    b: Point,
    beta: Point,
    cost: Option<Vec<Rational>>,
}

impl IpProblem {
    /// Builds the problem; `beta = None` picks the componentwise maximum of
    /// `b` and the columns of `A`.
    pub fn new(a_rows: Vec<Vec<u64>>, b: Vec<u64>, beta: Option<Vec<u64>>) -> Result<Self> {
        if a_rows.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but b has {} entries",
                a_rows.len(),
                b.len()
            )));
        }
        let n = a_rows.first().map_or(0, Vec::len);
        if let Some(bad) = a_rows.iter().position(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} of A has {} entries, expected {n}",
                a_rows[bad].len()
            )));
        }
        let columns: Vec<Point> = (0..n).map(|k| a_rows.iter().map(|r| r[k]).collect()).collect();
        if let Some(k) = columns.iter().position(|c| c.iter().all(|&v| v == 0)) {
            return Err(Error::ZeroGeneratorColumn { column: k });
        }
        let beta = match beta {
            Some(beta) => {
                if beta.len() != b.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "beta has {} entries, expected {}",
                        beta.len(),
                        b.len()
                    )));
                }
                beta
            }
            None => default_beta(&columns, &b),
        };
        if b.iter().zip(&beta).any(|(x, y)| x > y) {
            return Err(Error::RhsExceedsBox);
        }
        if let Some(k) = columns.iter().position(|c| c.iter().zip(&beta).any(|(x, y)| x > y)) {
            return Err(Error::GeneratorExceedsBox { column: k });
        }
        Ok(Self {
            rows: a_rows,
            columns,
            b,
            beta,
            cost: None,
        })
    }

    pub fn with_cost(mut self, cost: Vec<Rational>) -> Result<Self> {
        if cost.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "c has {} entries, expected {}",
                cost.len(),
                self.n()
            )));
        }
        self.cost = Some(cost);
        Ok(self)
    }

    /// Same `A`, `β` and cost with another right-hand side.
    pub fn with_rhs(&self, b: Vec<u64>) -> Result<Self> {
        let p = IpProblem::new(self.rows.clone(), b, Some(self.beta.clone()))?;
        Ok(Self {
            cost: self.cost.clone(),
            ..p
        })
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Generator columns `A_1, …, A_n`.
    pub fn columns(&self) -> &[Point] {
        &self.columns
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn beta(&self) -> &[u64] {
        &self.beta
    }

    pub fn cost(&self) -> Option<&[Rational]> {
        self.cost.as_deref()
    }

    pub fn is_solution(&self, x: &[u64]) -> bool {
        x.len() == self.n()
            && self.rows.iter().zip(&self.b).all(|(row, &bj)| {
                row.iter()
                    .zip(x)
                    .map(|(&a, &xk)| u128::from(a) * u128::from(xk))
                    .sum::<u128>()
                    == u128::from(bj)
            })
    }
}

/// Componentwise `max(b, A_1, …, A_n)`.
pub fn default_beta(columns: &[Point], b: &[u64]) -> Point {
    let mut beta = b.to_vec();
    for col in columns {
        for (bj, &a) in beta.iter_mut().zip(col) {
            *bj = (*bj).max(a);
        }
    }
    beta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_beta_is_componentwise_max() {
        let p = IpProblem::new(vec![vec![3, 1], vec![0, 4]], vec![2, 2], None).unwrap();
        assert_eq!(p.beta(), &[3, 4]);
        assert_eq!(p.columns(), &[vec![3, 0], vec![1, 4]]);
    }

    #[test]
    fn rejects_zero_column() {
        let err = IpProblem::new(vec![vec![3, 0]], vec![3], None).unwrap_err();
        assert_eq!(err, Error::ZeroGeneratorColumn { column: 1 });
    }

    #[test]
    fn rejects_small_beta() {
        assert_eq!(
            IpProblem::new(vec![vec![3, 4]], vec![5], Some(vec![3])).unwrap_err(),
            Error::RhsExceedsBox
        );
        assert_eq!(
            IpProblem::new(vec![vec![3, 4]], vec![2], Some(vec![3])).unwrap_err(),
            Error::GeneratorExceedsBox { column: 1 }
        );
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(
            IpProblem::new(vec![vec![1, 2], vec![1]], vec![1, 1], None),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn solution_check() {
        let p = IpProblem::new(vec![vec![3, 4]], vec![10], None).unwrap();
        assert!(p.is_solution(&[2, 1]));
        assert!(!p.is_solution(&[1, 1]));
        assert!(!p.is_solution(&[2]));
    }
}
