//! `Θy = 𝐛, y ≥ 0` as a unit flow on the lattice graph.
//!
//! Column `(k,u)` of `Θ` is the arc `u → u + A_k`, and `𝐛` asks for one unit
//! from the origin to `b`. A breadth-first path gives an integral vertex;
//! when `b` is unreachable, the potential `π = −1` off the reachable set
//! satisfies `Θᵀπ ≥ 0` and `𝐛ᵀπ = −1`. Both answers are re-checked exactly.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Point};
use crate::lp::LpOutcome;
use crate::matrices::{ColumnKey, ThetaMatrix};
use crate::rational::{from_big, Rational};

pub fn theta_feasibility(theta: &ThetaMatrix, lifted_rhs: &[BigInt]) -> Result<LpOutcome> {
    if lifted_rhs.len() != theta.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} entries, Θ has {} rows",
            lifted_rhs.len(),
            theta.rows()
        )));
    }
    let nonzero: Vec<usize> = (0..lifted_rhs.len()).filter(|&i| !lifted_rhs[i].is_zero()).collect();
    let (source, sink) = match nonzero.as_slice() {
        [] => {
            return Ok(LpOutcome::Feasible {
                point: vec![Rational::zero(); theta.cols()],
            })
        }
        [a, b] => {
            let (a, b) = (*a, *b);
            match (lifted_rhs[a].is_negative(), lifted_rhs[b].is_negative()) {
                _ if lifted_rhs[a].abs() != BigInt::one() || lifted_rhs[b].abs() != BigInt::one() => {
                    return Err(not_unit_flow())
                }
                (true, false) => (a, b),
                (false, true) => (b, a),
                _ => return Err(not_unit_flow()),
            }
        }
        _ => return Err(not_unit_flow()),
    };

    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); theta.rows()];
    for col in 0..theta.cols() {
        out_arcs[theta.column(col).0].push(col);
    }
    let mut parent: Vec<Option<usize>> = vec![None; theta.rows()];
    let mut seen = vec![false; theta.rows()];
    let mut queue = VecDeque::from([source]);
    seen[source] = true;
    while let Some(node) = queue.pop_front() {
        if node == sink {
            break;
        }
        for &col in &out_arcs[node] {
            let head = theta.column(col).1;
            if !seen[head] {
                seen[head] = true;
                parent[head] = Some(col);
                queue.push_back(head);
            }
        }
    }

    let rhs: Vec<Rational> = lifted_rhs.iter().map(from_big).collect();
    if seen[sink] {
        let mut point = vec![Rational::zero(); theta.cols()];
        let mut node = sink;
        while let Some(col) = parent[node] {
            point[col] = Rational::one();
            node = theta.column(col).0;
        }
        assert_eq!(theta.mul_vec(&point), rhs, "path flow does not meet the demand");
        Ok(LpOutcome::Feasible { point })
    } else {
        let ray: Vec<Rational> = seen
            .iter()
            .map(|&s| if s { Rational::zero() } else { -Rational::one() })
            .collect();
        assert!(
            theta.transpose_mul(&ray).iter().all(|v| !v.is_negative()),
            "cut potential violates an arc"
        );
        assert!(crate::rational::dot(&rhs, &ray).is_negative());
        Ok(LpOutcome::InfeasibleWithRay { ray })
    }
}

/// Reachability of `b` from the origin on the lattice graph of `Θ`, without
/// building `Θ`: node indices follow [`LatticeBox`] order and the arc for
/// generator `k` adds a fixed stride offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitFlow {
    /// Arcs `(k, u)` of an origin-to-`b` path, in path order.
    Path(Vec<ColumnKey>),
    /// Nodes reachable from the origin; `b` is not among them.
    Cut(Vec<bool>),
}

impl UnitFlow {
    pub fn is_path(&self) -> bool {
        matches!(self, UnitFlow::Path(_))
    }

    /// Generator counts along the path.
    pub fn multiplicities(&self, generators: usize) -> Option<Vec<u64>> {
        match self {
            UnitFlow::Path(arcs) => {
                let mut x = vec![0u64; generators];
                for key in arcs {
                    x[key.generator] += 1;
                }
                Some(x)
            }
            UnitFlow::Cut(_) => None,
        }
    }

    /// `π = −1` off the reachable set, `0` on it.
    pub fn cut_potential(&self) -> Option<Vec<Rational>> {
        match self {
            UnitFlow::Cut(seen) => Some(
                seen.iter()
                    .map(|&s| if s { Rational::zero() } else { -Rational::one() })
                    .collect(),
            ),
            UnitFlow::Path(_) => None,
        }
    }
}

pub fn lattice_unit_flow(generators: &[Point], beta: &[u64], b: &[u64]) -> Result<UnitFlow> {
    lattice_shortest_flow(generators, beta, b, &vec![1; generators.len()])
}

/// Like [`lattice_unit_flow`], but the path minimises the total weight of
/// its arcs, where every arc of generator `k` weighs `weights[k] ∈ {0, 1}`.
///
/// Arcs only increase the lattice index, so one sweep in index order
/// settles every distance; the path is then traced back from `b`.
pub fn lattice_shortest_flow(generators: &[Point], beta: &[u64], b: &[u64], weights: &[u8]) -> Result<UnitFlow> {
    let lattice = LatticeBox::new(beta)?;
    if !lattice.contains(b) {
        return Err(Error::RhsExceedsBox);
    }
    if weights.len() != generators.len() || weights.iter().any(|&w| w > 1) {
        return Err(Error::DimensionMismatch(
            "arc weights must be 0 or 1, one per generator".into(),
        ));
    }
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
    }
    let m = beta.len();
    let strides = lattice.strides();
    let radices = lattice.radices();
    // generators that fit somewhere, with their index step and digit caps
    let arcs: Vec<(usize, usize, Vec<usize>, u32)> = generators
        .iter()
        .enumerate()
        .filter_map(|(k, a)| {
            let caps = a
                .iter()
                .zip(beta)
                .map(|(&v, &bound)| bound.checked_sub(v).map(|c| c as usize))
                .collect::<Option<Vec<usize>>>()?;
            let step = a.iter().zip(strides).map(|(&v, &s)| v as usize * s).sum();
            Some((k, step, caps, u32::from(weights[k])))
        })
        .collect();
    let sink = lattice.index_of(b).expect("checked above");
    const UNSEEN: u32 = u32::MAX;
    let mut dist = vec![UNSEEN; lattice.len()];
    dist[0] = 0;
    let mut digits = vec![0usize; m];
    for node in 0..lattice.len() {
        if node == sink && dist[sink] != UNSEEN {
            break;
        }
        let d = dist[node];
        if d != UNSEEN {
            for (_, step, caps, w) in &arcs {
                if digits.iter().zip(caps).all(|(dig, cap)| dig <= cap) {
                    let head = &mut dist[node + step];
                    if d + w < *head {
                        *head = d + w;
                    }
                }
            }
        }
        for j in (0..m).rev() {
            digits[j] += 1;
            if digits[j] < radices[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    if dist[sink] == UNSEEN {
        return Ok(UnitFlow::Cut(dist.iter().map(|&d| d != UNSEEN).collect()));
    }
    let mut path = Vec::new();
    let mut node = sink;
    while node != 0 {
        let at = lattice.point_of(node);
        let (k, step) = arcs
            .iter()
            .find_map(|(k, step, _, w)| {
                let tail = crate::lattice::sub_points(&at, &generators[*k])?;
                let prev = node - step;
                (dist[prev] != UNSEEN && dist[prev] + w == dist[node] && lattice.index_of(&tail) == Some(prev))
                    .then_some((*k, *step))
            })
            .expect("a settled node has a settled predecessor");
        node -= step;
        path.push(ColumnKey {
            generator: k,
            offset: lattice.point_of(node),
        });
    }
    path.reverse();
    Ok(UnitFlow::Path(path))
}

fn not_unit_flow() -> Error {
    Error::DimensionMismatch("right-hand side is not a unit source/sink vector".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{build_theta, rhs_vectors};

    #[test]
    fn frobenius_decisions() {
        let theta = build_theta(&[vec![3], vec![4]], &[5]).unwrap();
        for b in 0..=5u64 {
            let rhs = rhs_vectors(&[b], &[5]).unwrap();
            let out = theta_feasibility(&theta, &rhs.lifted).unwrap();
            assert_eq!(out.is_feasible(), [0, 3, 4].contains(&b), "b = {b}");
        }
    }

    #[test]
    fn implicit_search_matches_theta() {
        let gens = vec![vec![1, 2], vec![2, 0], vec![0, 3]];
        let beta = [4, 5];
        let theta = build_theta(&gens, &beta).unwrap();
        for b0 in 0..=4 {
            for b1 in 0..=5 {
                let b = [b0, b1];
                let rhs = rhs_vectors(&b, &beta).unwrap();
                let explicit = theta_feasibility(&theta, &rhs.lifted).unwrap();
                let implicit = lattice_unit_flow(&gens, &beta, &b).unwrap();
                assert_eq!(explicit.is_feasible(), implicit.is_path(), "b = {b:?}");
                if let Some(x) = implicit.multiplicities(3) {
                    let got: Vec<u64> = (0..2).map(|j| (0..3).map(|k| gens[k][j] * x[k]).sum()).collect();
                    assert_eq!(got, b);
                }
                if let Some(pi) = implicit.cut_potential() {
                    assert!(theta.transpose_mul(&pi).iter().all(|v| !v.is_negative()));
                }
            }
        }
    }

    #[test]
    fn path_arcs_chain() {
        let flow = lattice_unit_flow(&[vec![3], vec![4]], &[10], &[10]).unwrap();
        let UnitFlow::Path(arcs) = flow else {
            panic!("10 = 3 + 3 + 4")
        };
        let mut at = vec![0u64];
        for key in &arcs {
            assert_eq!(key.offset, at);
            at[0] += [3, 4][key.generator];
        }
        assert_eq!(at, vec![10]);
    }

    #[test]
    fn zero_weight_arcs_are_free() {
        // 6 = 2 + 2 + 2 = 3 + 3; charging only the 3-arcs picks 2 + 2 + 2
        let gens = vec![vec![2], vec![3]];
        let flow = lattice_shortest_flow(&gens, &[6], &[6], &[0, 1]).unwrap();
        assert_eq!(flow.multiplicities(2), Some(vec![3, 0]));
        let flow = lattice_shortest_flow(&gens, &[6], &[6], &[1, 1]).unwrap();
        assert_eq!(flow.multiplicities(2), Some(vec![0, 2]));
    }

    #[test]
    fn rejects_general_supplies() {
        let theta = build_theta(&[vec![1]], &[2]).unwrap();
        let rhs = vec![BigInt::from(-2), BigInt::zero(), BigInt::from(2)];
        assert!(theta_feasibility(&theta, &rhs).is_err());
    }
}
