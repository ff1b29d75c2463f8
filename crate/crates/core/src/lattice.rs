//! Lattice points of the degree box `{z ∈ ℕ^m : z ≤ β}`.
//!
//! Every matrix in the crate indexes its lattice rows and columns through
//! [`LatticeBox`]. Points are ordered lexicographically with the first
//! coordinate most significant, so the index of `z` is the mixed-radix
//! number `z_1 z_2 … z_m` with digit `j` in base `1 + β_j`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A point of `ℕ^m`; also used for exponent vectors.
pub type Point = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBox {
    beta: Vec<u64>,
    radices: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl LatticeBox {
    pub fn new(beta: &[u64]) -> Result<Self> {
        let too_large = || Error::LatticeTooLarge { beta: beta.to_vec() };
        let radices = beta
            .iter()
            .map(|&b| usize::try_from(b).ok().and_then(|b| b.checked_add(1)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(too_large)?;
        let mut strides = vec![1usize; radices.len()];
        let mut len = 1usize;
        for j in (0..radices.len()).rev() {
            strides[j] = len;
            len = len.checked_mul(radices[j]).ok_or_else(too_large)?;
        }
        Ok(Self {
            beta: beta.to_vec(),
            radices,
            strides,
            len,
        })
    }

    /// The box corner `β`.
    pub fn beta(&self) -> &[u64] {
        &self.beta
    }

    /// Dimension `m`.
    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// Number of lattice points `s = Π_j (1 + β_j)`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn contains(&self, point: &[u64]) -> bool {
        point.len() == self.dim() && point.iter().zip(&self.beta).all(|(p, b)| p <= b)
    }

    /// Index of `point`, or `None` when it lies outside the box.
    pub fn index_of(&self, point: &[u64]) -> Option<usize> {
        if !self.contains(point) {
            return None;
        }
        Some(point.iter().zip(&self.strides).map(|(&p, &s)| p as usize * s).sum())
    }

    /// Inverse of [`LatticeBox::index_of`].
    ///
    /// # Panics
    ///
    /// Panics if `index >= self.len()`.
    pub fn point_of(&self, index: usize) -> Point {
        assert!(index < self.len, "lattice index {index} out of range");
        self.strides
            .iter()
            .zip(&self.radices)
            .map(|(&s, &r)| ((index / s) % r) as u64)
            .collect()
    }

    /// All points in index order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len).map(move |i| self.point_of(i))
    }
}

/// All `z ≤ β` in lexicographic order; `β = ()` yields the single empty point.
pub fn enumerate_points(beta: &[u64]) -> Result<Vec<Point>> {
    let lattice = LatticeBox::new(beta)?;
    Ok(lattice.points().collect())
}

/// `w^z = Π_j w_j^{z_j}` with the convention `0^0 = 1`.
pub fn monomial_pow(w: &[u64], z: &[u64]) -> BigInt {
    assert_eq!(w.len(), z.len(), "monomial base and exponent differ in length");
    let mut acc = BigInt::one();
    for (&base, &exp) in w.iter().zip(z) {
        if exp == 0 {
            continue;
        }
        if base == 0 {
            return BigInt::zero();
        }
        acc *= BigInt::from(base).pow(u32::try_from(exp).expect("exponent exceeds u32"));
    }
    acc
}

/// Total degree `|z| = z_1 + … + z_m`.
pub fn degree(z: &[u64]) -> u64 {
    z.iter().sum()
}

/// Componentwise `a + b`.
pub fn add_points(a: &[u64], b: &[u64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Componentwise `a - b` when `b ≤ a`.
pub fn sub_points(a: &[u64], b: &[u64]) -> Option<Point> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}
