//! The lifted matrices of an `Ax = b` instance.
//!
//! Rows are lattice points `w ≤ β` (see [`crate::lattice`]); columns are the
//! pairs `(k, u)` with `u ≤ β − A_k`, ordered by generator then by `u`.
//!
//! * `Θ` is a network matrix: column `(k, u)` has `−1` at row `u` and `+1` at
//!   row `u + A_k`.
//! * `Δ[z; w] = w^z` is the Kronecker product of the univariate Vandermonde
//!   blocks `D_j[z; w] = w^z`, `0 ≤ z, w ≤ β_j`.
//! * Rows of `ΔΘ` and `Δ′Θ` have closed forms and are generated on demand
//!   by [`row_a_z`] and [`row_dual_z`] instead of multiplying dense matrices.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{add_points, monomial_pow, LatticeBox, Point};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnKey {
    /// Zero-based generator index `k`.
    pub generator: usize,
    /// Offset `u` with `u + A_k ≤ β`.
    pub offset: Point,
}

/// Column indexing shared by `Θ`, `ΔΘ`, `Δ′Θ`, `E` and the lifted vector `y`.
#[derive(Debug, Clone)]
pub struct ColumnLayout {
    lattice: LatticeBox,
    generators: Vec<Point>,
    keys: Vec<ColumnKey>,
    block_starts: Vec<usize>,
    sub_boxes: Vec<LatticeBox>,
}

impl ColumnLayout {
    pub fn new(generators: &[Point], beta: &[u64]) -> Result<Self> {
        let lattice = LatticeBox::new(beta)?;
        let mut keys = Vec::new();
        let mut block_starts = Vec::with_capacity(generators.len() + 1);
        let mut sub_boxes = Vec::with_capacity(generators.len());
        for (k, a) in generators.iter().enumerate() {
            if a.len() != beta.len() {
                return Err(Error::DimensionMismatch(format!(
                    "generator {k} has {} entries, beta has {}",
                    a.len(),
                    beta.len()
                )));
            }
            if a.iter().all(|&v| v == 0) {
                return Err(Error::ZeroGeneratorColumn { column: k });
            }
            let room = crate::lattice::sub_points(beta, a).ok_or(Error::GeneratorExceedsBox { column: k })?;
            let sub = LatticeBox::new(&room)?;
            block_starts.push(keys.len());
            keys.extend(sub.points().map(|offset| ColumnKey { generator: k, offset }));
            sub_boxes.push(sub);
        }
        block_starts.push(keys.len());
        Ok(Self {
            lattice,
            generators: generators.to_vec(),
            keys,
            block_starts,
            sub_boxes,
        })
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn keys(&self) -> &[ColumnKey] {
        &self.keys
    }

    /// Total column count `p = Σ_k Π_j (1 + β_j − A_{j;k})`.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Column range of generator `k`; its length is `p_k`.
    pub fn block(&self, k: usize) -> std::ops::Range<usize> {
        self.block_starts[k]..self.block_starts[k + 1]
    }

    pub fn index_of(&self, generator: usize, offset: &[u64]) -> Option<usize> {
        let local = self.sub_boxes.get(generator)?.index_of(offset)?;
        Some(self.block_starts[generator] + local)
    }

    /// Lattice indices of the `−1` and `+1` entries of a `Θ` column.
    pub fn endpoints(&self, col: usize) -> (usize, usize) {
        let key = &self.keys[col];
        let tail = self
            .lattice
            .index_of(&key.offset)
            .expect("column offset inside the box");
        let head = self
            .lattice
            .index_of(&add_points(&key.offset, &self.generators[key.generator]))
            .expect("column head inside the box");
        (tail, head)
    }
}

/// Sparse `Θ ∈ {0, ±1}^{s×p}`; exactly one `−1` and one `+1` per column.
#[derive(Debug, Clone)]
pub struct ThetaMatrix {
    layout: ColumnLayout,
    tails: Vec<usize>,
    heads: Vec<usize>,
}

impl ThetaMatrix {
    pub fn layout(&self) -> &ColumnLayout {
        &self.layout
    }

    pub fn rows(&self) -> usize {
        self.layout.lattice.len()
    }

    pub fn cols(&self) -> usize {
        self.layout.len()
    }

    /// `(row of −1, row of +1)` for column `col`.
    pub fn column(&self, col: usize) -> (usize, usize) {
        (self.tails[col], self.heads[col])
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        if self.tails[col] == row {
            -1
        } else if self.heads[col] == row {
            1
        } else {
            0
        }
    }

    /// Structural network-matrix test: every column carries exactly one
    /// `−1` and one `+1` on distinct rows.
    pub fn is_network_matrix(&self) -> bool {
        self.tails
            .iter()
            .zip(&self.heads)
            .all(|(t, h)| t != h && *t < self.rows() && *h < self.rows())
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols()]; self.rows()];
        for col in 0..self.cols() {
            out[self.tails[col]][col] = BigInt::from(-1);
            out[self.heads[col]][col] = BigInt::one();
        }
        out
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols()]; self.rows()];
        for col in 0..self.cols() {
            out[self.tails[col]][col] = Rational::from_integer((-1).into());
            out[self.heads[col]][col] = Rational::one();
        }
        out
    }

    /// `Θy`.
    pub fn mul_vec(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows()];
        for (col, v) in y.iter().enumerate() {
            out[self.tails[col]] -= v;
            out[self.heads[col]] += v;
        }
        out
    }

    /// `Θᵀπ`: entry `(k,u)` is `π[u + A_k] − π[u]`.
    pub fn transpose_mul(&self, pi: &[Rational]) -> Vec<Rational> {
        (0..self.cols())
            .map(|col| &pi[self.heads[col]] - &pi[self.tails[col]])
            .collect()
    }
}

pub fn build_theta(generators: &[Point], beta: &[u64]) -> Result<ThetaMatrix> {
    let layout = ColumnLayout::new(generators, beta)?;
    let (tails, heads) = (0..layout.len()).map(|c| layout.endpoints(c)).unzip();
    Ok(ThetaMatrix { layout, tails, heads })
}

/// `Δ` kept in factored form: one Vandermonde block per coordinate.
#[derive(Debug, Clone)]
pub struct DeltaMatrix {
    lattice: LatticeBox,
    blocks: Vec<Vec<Vec<BigInt>>>,
}

impl DeltaMatrix {
    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    /// The univariate block `D_j` with `D_j[z; w] = w^z`.
    pub fn block(&self, j: usize) -> &[Vec<BigInt>] {
        &self.blocks[j]
    }

    /// `Δ[z; w]` by lattice index.
    pub fn entry(&self, z: usize, w: usize) -> BigInt {
        let zp = self.lattice.point_of(z);
        let wp = self.lattice.point_of(w);
        monomial_pow(&wp, &zp)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let pts: Vec<Point> = self.lattice.points().collect();
        pts.iter()
            .map(|z| pts.iter().map(|w| monomial_pow(w, z)).collect())
            .collect()
    }

    /// Solves `Δ ξ = r` one axis at a time.
    pub fn solve(&self, rhs: &[Rational]) -> Vec<Rational> {
        let inverses: Vec<_> = self.blocks.iter().map(|b| invert_block(b)).collect();
        apply_kronecker(&self.lattice, &inverses, rhs)
    }

    /// Solves `Δᵀ ξ = r`.
    pub fn solve_transpose(&self, rhs: &[Rational]) -> Vec<Rational> {
        let inverses: Vec<_> = self.blocks.iter().map(|b| transpose(&invert_block(b))).collect();
        apply_kronecker(&self.lattice, &inverses, rhs)
    }

    /// `Δ v` through the factored form.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        let blocks: Vec<_> = self.blocks.iter().map(|b| to_rational(b)).collect();
        apply_kronecker(&self.lattice, &blocks, v)
    }

    /// `Δᵀ v` through the factored form.
    pub fn transpose_mul(&self, v: &[Rational]) -> Vec<Rational> {
        let blocks: Vec<_> = self.blocks.iter().map(|b| transpose(&to_rational(b))).collect();
        apply_kronecker(&self.lattice, &blocks, v)
    }
}

pub fn build_delta(beta: &[u64]) -> Result<DeltaMatrix> {
    let lattice = LatticeBox::new(beta)?;
    let blocks = beta
        .iter()
        .map(|&bj| {
            (0..=bj)
                .map(|z| (0..=bj).map(|w| monomial_pow(&[w], &[z])).collect())
                .collect()
        })
        .collect();
    Ok(DeltaMatrix { lattice, blocks })
}

fn to_rational(m: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    m.iter()
        .map(|r| r.iter().cloned().map(Rational::from_integer).collect())
        .collect()
}

fn transpose(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
}

/// Gauss-Jordan inverse of a nonsingular Vandermonde block.
fn invert_block(block: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    let n = block.len();
    let mut a = to_rational(block);
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Vandermonde block with distinct nodes is nonsingular");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col].clone();
        for v in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *v = &*v / &scale;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let d = &f * &a[col][c];
                a[r][c] -= d;
                let d = &f * &inv[col][c];
                inv[r][c] -= d;
            }
        }
    }
    inv
}

/// `(M_1 ⊗ … ⊗ M_m) v` with `v` indexed by the lattice order.
fn apply_kronecker(lattice: &LatticeBox, factors: &[Vec<Vec<Rational>>], v: &[Rational]) -> Vec<Rational> {
    let mut cur = v.to_vec();
    for (j, m) in factors.iter().enumerate() {
        let stride = lattice.strides()[j];
        let radix = lattice.radices()[j];
        let mut next = vec![Rational::zero(); cur.len()];
        for (idx, slot) in next.iter_mut().enumerate() {
            let digit = (idx / stride) % radix;
            let base = idx - digit * stride;
            let mut acc = Rational::zero();
            for (t, coef) in m[digit].iter().enumerate() {
                if !coef.is_zero() {
                    acc += coef * &cur[base + t * stride];
                }
            }
            *slot = acc;
        }
        cur = next;
    }
    cur
}

/// Row `z` of `ΔΘ`: entry `(k,u)` is `(u + A_k)^z − u^z ≥ 0`.
pub fn row_a_z(layout: &ColumnLayout, z: &[u64]) -> Vec<BigInt> {
    layout
        .keys()
        .iter()
        .map(|key| {
            let head = add_points(&key.offset, &layout.generators()[key.generator]);
            monomial_pow(&head, z) - monomial_pow(&key.offset, z)
        })
        .collect()
}

/// Row `z` of `Δ′Θ`: entry `(k,u)` is `z^{u + A_k} − z^u`.
pub fn row_dual_z(layout: &ColumnLayout, z: &[u64]) -> Vec<BigInt> {
    layout
        .keys()
        .iter()
        .map(|key| {
            let head = add_points(&key.offset, &layout.generators()[key.generator]);
            monomial_pow(z, &head) - monomial_pow(z, &key.offset)
        })
        .collect()
}

/// Dense `ΔΘ`, one [`row_a_z`] per lattice point.
pub fn delta_theta_dense(layout: &ColumnLayout) -> Vec<Vec<BigInt>> {
    layout.lattice().points().map(|z| row_a_z(layout, &z)).collect()
}

/// Dense `Δ′Θ`, one [`row_dual_z`] per lattice point.
pub fn dual_theta_dense(layout: &ColumnLayout) -> Vec<Vec<BigInt>> {
    layout.lattice().points().map(|z| row_dual_z(layout, &z)).collect()
}

/// The right-hand sides `𝐛`, `Δ𝐛` and `Δ′𝐛`, indexed by lattice point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhsVectors {
    /// `𝐛[0] = −1`, `𝐛[b] = +1`, zero elsewhere; all zero when `b = 0`.
    pub lifted: Vec<BigInt>,
    /// `(Δ𝐛)[z] = b^z − 0^z`.
    pub moments: Vec<BigInt>,
    /// `(Δ′𝐛)[z] = z^b − 1`.
    pub dual: Vec<BigInt>,
}

pub fn rhs_vectors(b: &[u64], beta: &[u64]) -> Result<RhsVectors> {
    let lattice = LatticeBox::new(beta)?;
    let target = lattice.index_of(b).ok_or(Error::RhsExceedsBox)?;
    let mut lifted = vec![BigInt::zero(); lattice.len()];
    lifted[0] -= 1;
    lifted[target] += 1;
    let zero = vec![0; beta.len()];
    let mut moments = Vec::with_capacity(lattice.len());
    let mut dual = Vec::with_capacity(lattice.len());
    for z in lattice.points() {
        moments.push(monomial_pow(b, &z) - monomial_pow(&zero, &z));
        dual.push(monomial_pow(&z, b) - BigInt::one());
    }
    Ok(RhsVectors { lifted, moments, dual })
}

/// `E ∈ {0,1}^{n×p}` summing the `y` coordinates of each generator block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationE {
    blocks: Vec<std::ops::Range<usize>>,
    cols: usize,
}

impl AggregationE {
    pub fn new(layout: &ColumnLayout) -> Self {
        Self {
            blocks: (0..layout.generators().len()).map(|k| layout.block(k)).collect(),
            cols: layout.len(),
        }
    }

    pub fn rows(&self) -> usize {
        self.blocks.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `k` has `p_k` ones.
    pub fn row_len(&self, k: usize) -> usize {
        self.blocks[k].len()
    }

    pub fn entry(&self, k: usize, col: usize) -> u8 {
        u8::from(self.blocks[k].contains(&col))
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows())
            .map(|k| (0..self.cols).map(|c| BigInt::from(self.entry(k, c))).collect())
            .collect()
    }
}

/// `x̂ = E y`, i.e. `x̂_k = Σ_u y[k,u]`.
pub fn aggregate(e: &AggregationE, y: &[Rational]) -> Vec<Rational> {
    assert_eq!(y.len(), e.cols, "lifted vector has the wrong length");
    e.blocks
        .iter()
        .map(|r| y[r.clone()].iter().fold(Rational::zero(), |acc, v| acc + v))
        .collect()
}

/// Integer version of [`aggregate`].
pub fn aggregate_integer(e: &AggregationE, y: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(y.len(), e.cols, "lifted vector has the wrong length");
    e.blocks.iter().map(|r| y[r.clone()].iter().sum()).collect()
}

/// Rows of decimal integers, space separated, one row per line.
pub fn dense_dump(matrix: &[Vec<BigInt>]) -> String {
    let mut out = String::new();
    for row in matrix {
        let line: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn frobenius_layout() -> ColumnLayout {
        ColumnLayout::new(&[vec![3], vec![4]], &[5]).unwrap()
    }

    #[test]
    fn frobenius_theta() {
        let theta = build_theta(&[vec![3], vec![4]], &[5]).unwrap();
        let expected = ints(&[
            &[-1, 0, 0, -1, 0],
            &[0, -1, 0, 0, -1],
            &[0, 0, -1, 0, 0],
            &[1, 0, 0, 0, 0],
            &[0, 1, 0, 1, 0],
            &[0, 0, 1, 0, 1],
        ]);
        assert_eq!(theta.to_dense(), expected);
        assert!(theta.is_network_matrix());
    }

    #[test]
    fn single_step_theta() {
        let theta = build_theta(&[vec![1]], &[1]).unwrap();
        assert_eq!(theta.to_dense(), ints(&[&[-1], &[1]]));
    }

    #[test]
    fn identity_generators_theta() {
        // Keys: (0,(0,0)), (0,(0,1)), (1,(0,0)), (1,(1,0)); rows (0,0),(0,1),(1,0),(1,1).
        let theta = build_theta(&[vec![1, 0], vec![0, 1]], &[1, 1]).unwrap();
        let keys: Vec<_> = theta
            .layout()
            .keys()
            .iter()
            .map(|k| (k.generator, k.offset.clone()))
            .collect();
        assert_eq!(
            keys,
            vec![(0, vec![0, 0]), (0, vec![0, 1]), (1, vec![0, 0]), (1, vec![1, 0])]
        );
        let expected = ints(&[&[-1, 0, -1, 0], &[0, -1, 1, 0], &[1, 0, 0, -1], &[0, 1, 0, 1]]);
        assert_eq!(theta.to_dense(), expected);
    }

    #[test]
    fn zero_generator_rejected() {
        assert_eq!(
            build_theta(&[vec![0, 0]], &[1, 1]).unwrap_err(),
            Error::ZeroGeneratorColumn { column: 0 }
        );
    }

    #[test]
    fn frobenius_delta() {
        let delta = build_delta(&[5]).unwrap();
        let expected = ints(&[
            &[1, 1, 1, 1, 1, 1],
            &[0, 1, 2, 3, 4, 5],
            &[0, 1, 4, 9, 16, 25],
            &[0, 1, 8, 27, 64, 125],
            &[0, 1, 16, 81, 256, 625],
            &[0, 1, 32, 243, 1024, 3125],
        ]);
        assert_eq!(delta.to_dense(), expected);
    }

    #[test]
    fn trivial_delta() {
        assert_eq!(build_delta(&[0]).unwrap().to_dense(), ints(&[&[1]]));
    }

    #[test]
    fn delta_is_kronecker_of_blocks() {
        let d = ints(&[&[1, 1], &[0, 1]]);
        let mut kron = vec![vec![BigInt::zero(); 4]; 4];
        for (i, row) in kron.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = &d[i / 2][j / 2] * &d[i % 2][j % 2];
            }
        }
        assert_eq!(build_delta(&[1, 1]).unwrap().to_dense(), kron);
    }

    #[test]
    fn row_a_z_examples() {
        let layout = frobenius_layout();
        let row: Vec<i64> = row_a_z(&layout, &[2]).iter().map(|v| v.try_into().unwrap()).collect();
        assert_eq!(row, vec![9, 15, 21, 16, 24]);
        let row: Vec<i64> = row_a_z(&layout, &[1]).iter().map(|v| v.try_into().unwrap()).collect();
        assert_eq!(row, vec![3, 3, 3, 4, 4]);
        assert!(row_a_z(&layout, &[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn row_dual_z_examples() {
        let layout = frobenius_layout();
        let row: Vec<i64> = row_dual_z(&layout, &[2])
            .iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        assert_eq!(row, vec![7, 14, 28, 15, 30]);
        assert!(row_dual_z(&layout, &[1]).iter().all(Zero::is_zero));
        let row: Vec<i64> = row_dual_z(&layout, &[0])
            .iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        assert_eq!(row, vec![-1, 0, 0, -1, 0]);
    }

    #[test]
    fn rhs_examples() {
        let r = rhs_vectors(&[5], &[5]).unwrap();
        assert_eq!(r.moments, ints(&[&[0, 5, 25, 125, 625, 3125]])[0]);
        assert_eq!(r.lifted, ints(&[&[-1, 0, 0, 0, 0, 1]])[0]);
        let r = rhs_vectors(&[0], &[5]).unwrap();
        assert!(r.moments.iter().all(Zero::is_zero));
        assert!(r.dual.iter().all(Zero::is_zero));
        assert!(r.lifted.iter().all(Zero::is_zero));
        let r = rhs_vectors(&[3], &[5]).unwrap();
        assert_eq!(r.dual, ints(&[&[-1, 0, 7, 26, 63, 124]])[0]);
    }

    #[test]
    fn aggregation_examples() {
        let layout = frobenius_layout();
        let e = AggregationE::new(&layout);
        let mut y = vec![Rational::zero(); layout.len()];
        y[0] = int(1);
        assert_eq!(aggregate(&e, &y), vec![int(1), int(0)]);
        let y = vec![Rational::zero(); layout.len()];
        assert_eq!(aggregate(&e, &y), vec![int(0), int(0)]);
        assert_eq!(e.row_len(0), 3);
        assert_eq!(e.row_len(1), 2);

        // beta = 10, y[1,0] = y[1,1] = 1 routes 0 -> 3 -> 6.
        let layout = ColumnLayout::new(&[vec![3], vec![4]], &[10]).unwrap();
        let theta = build_theta(&[vec![3], vec![4]], &[10]).unwrap();
        let mut y = vec![Rational::zero(); layout.len()];
        y[layout.index_of(0, &[0]).unwrap()] = int(1);
        y[layout.index_of(0, &[3]).unwrap()] = int(1);
        let rhs = rhs_vectors(&[6], &[10]).unwrap();
        let lifted: Vec<Rational> = rhs.lifted.iter().map(crate::rational::from_big).collect();
        assert_eq!(theta.mul_vec(&y), lifted);
        assert_eq!(aggregate(&AggregationE::new(&layout), &y), vec![int(2), int(0)]);
    }

    #[test]
    fn delta_solves_invert_products() {
        let delta = build_delta(&[2, 3]).unwrap();
        let v: Vec<Rational> = (0..12).map(|i| int(i * i - 5)).collect();
        assert_eq!(delta.solve(&delta.mul_vec(&v)), v);
        assert_eq!(delta.solve_transpose(&delta.transpose_mul(&v)), v);
        // factored product agrees with the dense one
        let dense = delta.to_dense();
        let direct: Vec<Rational> = dense
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v)
                    .fold(Rational::zero(), |a, (d, x)| a + crate::rational::from_big(d) * x)
            })
            .collect();
        assert_eq!(delta.mul_vec(&v), direct);
    }

    #[test]
    fn dump_format() {
        assert_eq!(dense_dump(&ints(&[&[1, -2], &[30, 4]])), "1 -2\n30 4\n");
    }
}
