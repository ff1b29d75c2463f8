//! JSON files read and written by the command line.
//!
//! Problem file:
//!
//! ```json
//! { "A": [[3, 4]], "b": [5], "beta": [5], "c": [1, "1/2"], "box": 10 }
//! ```
//!
//! `A` and `b` may hold negative integers; such systems are decided through
//! the `ℕ`-reduction and need a `box`. `beta`, `c` and `box` are optional.
//!
//! Group file (`null` modulus for a free coordinate):
//!
//! ```json
//! { "P": [3, null], "generators": [[2, 5]], "target": [1, 4], "box": 10 }
//! ```
//!
//! Every number in a report is a string, so big integers and rationals
//! (`"num/den"`) survive any JSON reader.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::certificates::{CertificateKind, InfeasibilityCertificate, WitnessPolynomials};
use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Point};
use crate::problem::IpProblem;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::reduction::{AbelianGroupSpec, NSystem, ZSystem};

/// A JSON number or a decimal string, for values that may exceed 64 bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            Scalar::Int(v) => Ok(BigInt::from(*v)),
            Scalar::Text(t) => t
                .trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("`{t}` is not an integer"))),
        }
    }

    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Scalar::Int(v) => Ok(Rational::from_integer(BigInt::from(*v))),
            Scalar::Text(t) => parse_rational(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<Scalar>>,
    pub b: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Scalar>>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_bound: Option<Scalar>,
}

/// A problem file after parsing: either nonnegative data or an integer
/// system that needs the reduction.
#[derive(Debug, Clone)]
pub enum LoadedProblem {
    Natural(IpProblem),
    Integer(ZSystem),
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))
    }

    pub fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn zsystem(&self) -> Result<ZSystem> {
        let matrix = self
            .a
            .iter()
            .map(|r| r.iter().map(Scalar::to_bigint).collect())
            .collect::<Result<Vec<Vec<BigInt>>>>()?;
        let rhs = self.b.iter().map(Scalar::to_bigint).collect::<Result<Vec<BigInt>>>()?;
        ZSystem::new(matrix, rhs, self.cols())
    }

    pub fn cost(&self) -> Result<Option<Vec<Rational>>> {
        self.c
            .as_ref()
            .map(|c| c.iter().map(Scalar::to_rational).collect())
            .transpose()
    }

    pub fn box_bound(&self) -> Result<Option<BigInt>> {
        self.box_bound.as_ref().map(Scalar::to_bigint).transpose()
    }

    /// `beta_override` replaces the file's `beta`.
    pub fn load(&self, beta_override: Option<Vec<u64>>) -> Result<LoadedProblem> {
        let sys = self.zsystem()?;
        if !sys.is_natural() {
            return Ok(LoadedProblem::Integer(sys));
        }
        let to_u64 = |v: &BigInt| -> Result<u64> {
            u64::try_from(v).map_err(|_| Error::ValueTooLarge(format!("{v} does not fit in 64 bits")))
        };
        let rows = sys
            .matrix()
            .iter()
            .map(|r| r.iter().map(to_u64).collect())
            .collect::<Result<Vec<Vec<u64>>>>()?;
        let b = sys.rhs().iter().map(to_u64).collect::<Result<Vec<u64>>>()?;
        let mut problem = IpProblem::new(rows, b, beta_override.or_else(|| self.beta.clone()))?;
        if let Some(c) = self.cost()? {
            problem = problem.with_cost(c)?;
        }
        Ok(LoadedProblem::Natural(problem))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    #[serde(rename = "P")]
    pub moduli: Vec<Option<i64>>,
    pub generators: Vec<Vec<i64>>,
    pub target: Vec<i64>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_bound: Option<Scalar>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("group file: {e}")))
    }

    pub fn spec(&self) -> Result<AbelianGroupSpec> {
        AbelianGroupSpec::new(&self.moduli, self.generators.clone(), self.target.clone())
    }

    pub fn box_bound(&self) -> Result<Option<BigInt>> {
        self.box_bound.as_ref().map(Scalar::to_bigint).transpose()
    }
}

pub fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn rational_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub z: Point,
    pub xi: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub columns: usize,
    pub min: String,
    pub values: Vec<String>,
}

/// Certificate as written to disk. Only `kind`, `beta` and `support` are
/// trusted by the verifier; the rest is informational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub kind: CertificateKind,
    pub m: usize,
    pub beta: Point,
    pub b: Point,
    pub support: Vec<SupportEntry>,
    pub value_at_b: String,
    pub residuals: ResidualSummary,
}

impl CertificateDoc {
    pub fn from_certificate(cert: &InfeasibilityCertificate) -> Self {
        let min = cert
            .residuals
            .iter()
            .min()
            .map_or_else(|| "0".to_string(), ToString::to_string);
        Self {
            kind: cert.kind,
            m: cert.beta.len(),
            beta: cert.beta.clone(),
            b: cert.b.clone(),
            support: cert
                .support()
                .into_iter()
                .map(|(z, xi)| SupportEntry { z, xi: xi.to_string() })
                .collect(),
            value_at_b: cert.value_at_b.to_string(),
            residuals: ResidualSummary {
                columns: cert.residuals.len(),
                min,
                values: strings(&cert.residuals),
            },
        }
    }

    /// Support entries with parsed coefficients, checked against `beta`.
    pub fn parsed_support(&self) -> Result<Vec<(Point, BigInt)>> {
        let lattice = LatticeBox::new(&self.beta)?;
        self.support
            .iter()
            .map(|e| {
                if !lattice.contains(&e.z) {
                    return Err(Error::Parse(format!("support point {:?} lies outside beta", e.z)));
                }
                let xi =
                    e.xi.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("`{}` is not an integer", e.xi)))?;
                Ok((e.z.clone(), xi))
            })
            .collect()
    }

    /// The same document with one support coefficient negated.
    pub fn with_negated_entry(&self, index: usize) -> Self {
        let mut doc = self.clone();
        let entry = &mut doc.support[index];
        let v: BigInt = entry.xi.parse().expect("document coefficients are integers");
        entry.xi = (-v).to_string();
        doc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub z: Point,
    pub coefficient: String,
}

/// `Q_k` as a list of terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub generator: usize,
    pub terms: Vec<TermDoc>,
}

pub fn witness_docs(w: &WitnessPolynomials) -> Vec<WitnessDoc> {
    w.polynomials()
        .iter()
        .enumerate()
        .map(|(k, q)| WitnessDoc {
            generator: k,
            terms: q
                .terms()
                .map(|(z, c)| TermDoc {
                    z: z.clone(),
                    coefficient: format_rational(c),
                })
                .collect(),
        })
        .collect()
}

pub fn witness_from_docs(docs: &[WitnessDoc], n: usize) -> Result<WitnessPolynomials> {
    let mut polys = vec![crate::certificates::Polynomial::zero(); n];
    for d in docs {
        let q = polys
            .get_mut(d.generator)
            .ok_or_else(|| Error::Parse(format!("witness names generator {} of {n}", d.generator)))?;
        for t in &d.terms {
            q.add_term(t.z.clone(), parse_rational(&t.coefficient)?);
        }
    }
    Ok(WitnessPolynomials::new(polys))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSystemDoc {
    pub a_star: Vec<Vec<String>>,
    pub b_star: Vec<String>,
    pub alpha: Vec<String>,
    pub rho: String,
    #[serde(rename = "box")]
    pub box_bound: String,
    pub original_columns: usize,
    pub compactified: bool,
}

impl NSystemDoc {
    pub fn from_nsystem(n: &NSystem) -> Self {
        Self {
            a_star: n.a_star.iter().map(|r| strings(r)).collect(),
            b_star: strings(&n.b_star),
            alpha: strings(&n.alpha),
            rho: n.rho.to_string(),
            box_bound: n.box_bound.to_string(),
            original_columns: n.original_columns,
            compactified: n.compactified,
        }
    }
}

/// Whether some entry of the integer data is negative.
pub fn has_negative(sys: &ZSystem) -> bool {
    sys.matrix().iter().flatten().chain(sys.rhs()).any(Signed::is_negative)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_natural_problem() {
        let f = ProblemFile::parse(r#"{"A": [[3, 4]], "b": [5], "beta": [6], "c": [1, "1/2"]}"#).unwrap();
        let LoadedProblem::Natural(p) = f.load(None).unwrap() else {
            panic!("natural data")
        };
        assert_eq!(p.beta(), &[6]);
        assert_eq!(p.cost().unwrap()[1], Rational::new(1.into(), 2.into()));
        let LoadedProblem::Natural(p) = f.load(Some(vec![9])).unwrap() else {
            panic!("natural data")
        };
        assert_eq!(p.beta(), &[9]);
    }

    #[test]
    fn negative_data_needs_reduction() {
        let f = ProblemFile::parse(r#"{"A": [[-1]], "b": [-2], "box": 5}"#).unwrap();
        assert!(matches!(f.load(None).unwrap(), LoadedProblem::Integer(_)));
        assert_eq!(f.box_bound().unwrap(), Some(BigInt::from(5)));
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(ProblemFile::parse("{\"A\": [[1]]"), Err(Error::Parse(_))));
        assert!(matches!(
            ProblemFile::parse("{\"A\": [[1]], \"b\": [1], \"d\": 0}"),
            Err(Error::Parse(_))
        ));
        let ragged = ProblemFile::parse(r#"{"A": [[1, 2], [1]], "b": [1, 1]}"#).unwrap();
        assert!(matches!(ragged.load(None), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn group_file() {
        let g = GroupFile::parse(r#"{"P": [3, null], "generators": [[2, 5]], "target": [1, 4]}"#).unwrap();
        let spec = g.spec().unwrap();
        assert_eq!(spec.finite_count(), 1);
        assert_eq!(g.box_bound().unwrap(), None);
    }

    #[test]
    fn big_box_as_string() {
        let f = ProblemFile::parse(r#"{"A": [[1]], "b": [1], "box": "123456789012345678901234567890"}"#).unwrap();
        assert_eq!(
            f.box_bound().unwrap().unwrap().to_string(),
            "123456789012345678901234567890"
        );
    }
}
