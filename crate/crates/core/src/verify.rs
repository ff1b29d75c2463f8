//! Solver-independent checks of certificates.
//!
//! Only the row generators of the moment matrices are shared with the
//! engine. Everything else (the cone test, the sign test, the evaluation at
//! `b`) is recomputed here from the certificate's support.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::certificates::{verify_witness, CertificateKind, WitnessPolynomials};
use crate::lattice::{monomial_pow, Point};
use crate::matrices::{row_a_z, row_dual_z, ColumnLayout};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub reasons: Vec<String>,
    /// Recomputed value at `b`, when the support was usable.
    pub value_at_b: Option<BigInt>,
    /// Smallest recomputed cone residual.
    pub min_residual: Option<BigInt>,
}

impl Verdict {
    fn reject(reason: String) -> Self {
        Self {
            accepted: false,
            reasons: vec![reason],
            value_at_b: None,
            min_residual: None,
        }
    }
}

/// Checks that `ξ` (given by its support over the box `β`) lies in the cone
/// of its kind for the generators, and that its value at `b` is negative.
pub fn verify_certificate(
    kind: CertificateKind,
    beta: &[u64],
    support: &[(Point, BigInt)],
    generators: &[Point],
    b: &[u64],
) -> Verdict {
    if b.len() != beta.len() {
        return Verdict::reject(format!("b has {} entries, beta has {}", b.len(), beta.len()));
    }
    if b.iter().zip(beta).any(|(x, y)| x > y) {
        return Verdict::reject("b lies outside the certificate's box".into());
    }
    let layout = match ColumnLayout::new(generators, beta) {
        Ok(l) => l,
        Err(e) => return Verdict::reject(format!("cannot rebuild the columns: {e}")),
    };
    let mut residuals = vec![BigInt::zero(); layout.len()];
    for (z, xi) in support {
        if z.len() != beta.len() || z.iter().zip(beta).any(|(a, c)| a > c) {
            return Verdict::reject(format!("support point {z:?} lies outside beta"));
        }
        let row = match kind {
            CertificateKind::Polynomial => row_a_z(&layout, z),
            CertificateKind::Exponential => row_dual_z(&layout, z),
        };
        for (acc, r) in residuals.iter_mut().zip(row) {
            *acc += xi * r;
        }
    }
    let mut value = BigInt::zero();
    for (z, xi) in support {
        value += match kind {
            CertificateKind::Polynomial if z.iter().all(|&v| v == 0) => BigInt::zero(),
            CertificateKind::Polynomial => xi * monomial_pow(b, z),
            CertificateKind::Exponential => xi * (monomial_pow(z, b) - BigInt::one()),
        };
    }
    let mut reasons = Vec::new();
    for (col, r) in residuals.iter().enumerate() {
        if r.is_negative() {
            let key = &layout.keys()[col];
            reasons.push(format!(
                "cone residual {r} < 0 at generator {} offset {:?}",
                key.generator, key.offset
            ));
        }
    }
    if !value.is_negative() {
        reasons.push(format!("value at b is {value}, not negative"));
    }
    Verdict {
        accepted: reasons.is_empty(),
        reasons,
        value_at_b: Some(value),
        min_residual: residuals.iter().min().cloned(),
    }
}

/// Formal check of a feasibility witness.
pub fn verify_feasibility(w: &WitnessPolynomials, generators: &[Point], b: &[u64], beta: &[u64]) -> Verdict {
    if verify_witness(w, b, generators, beta) {
        Verdict {
            accepted: true,
            reasons: Vec::new(),
            value_at_b: None,
            min_residual: None,
        }
    } else {
        Verdict::reject(
            "the witness polynomials do not give z^b - 1 = sum_k Q_k (z^A_k - 1) with nonnegative coefficients".into(),
        )
    }
}
