//! JSON documents.
//!
//! Polynomials are ascending coefficient arrays. A coefficient is a JSON
//! integer, or a string `"a/b"` with `b > 0` and `gcd(|a|, b) = 1` when it
//! is not an integer (integers outside the 64-bit range are strings too).
//! Floating-point numbers are rejected.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::{AnalysisReport, MultiplicityRow};
use crate::middle_factor::ValidationReport;
use crate::two_by_two::{CaseDim, CaseTag, RationalFunction, TransformCheck, TransformResult};
use crate::{KernelBasis, MiddleFactor, Poly, Rational, RowSpec};

pub const DOCUMENT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coeff(pub Rational);

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = &self.0;
        if v.is_integer() {
            if let Some(i) = v.numer().to_i64() {
                return s.serialize_i64(i);
            }
            return s.serialize_str(&v.numer().to_string());
        }
        s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
    }
}

impl FromStr for Coeff {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, String> {
        let int = |part: &str| -> std::result::Result<BigInt, String> {
            let digits = part.strip_prefix('-').unwrap_or(part);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("coefficient {text:?} is not of the form \"a/b\""));
            }
            part.parse().map_err(|e| format!("coefficient {text:?}: {e}"))
        };
        let (num, den) = match text.split_once('/') {
            Some((a, b)) => (int(a)?, int(b)?),
            None => (int(text)?, BigInt::one()),
        };
        if !den.is_positive() {
            return Err(format!("coefficient {text:?} needs a positive denominator"));
        }
        if !num.gcd(&den).is_one() {
            return Err(format!("coefficient {text:?} is not in lowest terms"));
        }
        Ok(Coeff(Rational::new_raw(num, den)))
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct CoeffVisitor;

        impl Visitor<'_> for CoeffVisitor {
            type Value = Coeff;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a string \"a/b\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Coeff, E> {
                Ok(Coeff(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Coeff, E> {
                Ok(Coeff(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Coeff, E> {
                Err(E::custom(format!(
                    "floating-point coefficient {v} is not allowed; write exact values as \"a/b\" strings"
                )))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Coeff, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(CoeffVisitor)
    }
}

/// Ascending coefficients of a polynomial, trailing zeros stripped on the
/// way in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyJson(pub Vec<Coeff>);

impl From<&Poly> for PolyJson {
    fn from(p: &Poly) -> Self {
        PolyJson(p.coeffs().iter().cloned().map(Coeff).collect())
    }
}

impl From<&PolyJson> for Poly {
    fn from(p: &PolyJson) -> Self {
        Poly::from_coeffs(p.0.iter().map(|c| c.0.clone()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDocument {
    pub q: PolyJson,
    pub k_diag: i64,
    pub lower: Vec<PolyJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub version: String,
    pub k: i64,
    pub rows: Vec<RowDocument>,
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.version != DOCUMENT_VERSION {
            return Err(Error::Document(format!(
                "unsupported version {:?}, expected {DOCUMENT_VERSION:?}",
                doc.version
            )));
        }
        Ok(doc.canonical())
    }

    /// Same document with trailing zero coefficients removed.
    pub fn canonical(&self) -> Self {
        Self::from_middle_factor(&self.to_middle_factor())
    }

    pub fn to_middle_factor(&self) -> MiddleFactor {
        let rows = self
            .rows
            .iter()
            .map(|r| RowSpec::new((&r.q).into(), r.k_diag, r.lower.iter().map(Poly::from).collect()))
            .collect();
        MiddleFactor::new(self.k, rows)
    }

    pub fn from_middle_factor(mf: &MiddleFactor) -> Self {
        InstanceDocument {
            version: DOCUMENT_VERSION.to_string(),
            k: mf.k,
            rows: mf
                .rows
                .iter()
                .map(|r| RowDocument {
                    q: (&r.q).into(),
                    k_diag: r.kdiag,
                    lower: r.lower.iter().map(PolyJson::from).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

pub fn basis_json(b: &KernelBasis) -> Vec<Vec<PolyJson>> {
    b.vectors.iter().map(|v| v.iter().map(PolyJson::from).collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    /// Absent when `p21 = 0`.
    pub case: Option<CaseTag>,
    pub dim_by_case: CaseDim,
    pub bound_only: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub input: InstanceDocument,
    pub validation: ValidationReport,
    pub dim_ker: usize,
    pub index: i64,
    pub codim_ran: usize,
    pub kappa: Vec<i64>,
    pub special_form: bool,
    pub method: crate::kernel::Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<Vec<PolyJson>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_by_two: Option<CaseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<MultiplicityRow>>,
    pub timing_ms: u64,
}

impl ReportDocument {
    pub fn new(input: InstanceDocument, validation: ValidationReport, report: &AnalysisReport) -> Self {
        ReportDocument {
            input,
            validation,
            dim_ker: report.dim_ker,
            index: report.index,
            codim_ran: report.codim_ran,
            kappa: report.kappa.clone(),
            special_form: report.special_form,
            method: report.method,
            kernel: None,
            two_by_two: None,
            indices: None,
            timing_ms: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalFunctionJson {
    pub num: PolyJson,
    pub den: PolyJson,
}

impl From<&RationalFunction<Rational>> for RationalFunctionJson {
    fn from(f: &RationalFunction<Rational>) -> Self {
        let r = f.reduced();
        RationalFunctionJson { num: (&r.num).into(), den: (&r.den).into() }
    }
}

type RationalMatrixJson = [[RationalFunctionJson; 2]; 2];

fn matrix_json(m: &crate::two_by_two::RationalMatrix<Rational>) -> RationalMatrixJson {
    let e = |i: usize, j: usize| RationalFunctionJson::from(&m[i][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformDocument {
    pub input: InstanceDocument,
    pub omega_minus: RationalMatrixJson,
    pub omega_plus: RationalMatrixJson,
    pub diagonal_instance: InstanceDocument,
    pub verification: TransformCheck,
    pub verdict: &'static str,
}

impl TransformDocument {
    pub fn new(input: &MiddleFactor, result: &TransformResult<Rational>, check: TransformCheck) -> Self {
        TransformDocument {
            input: InstanceDocument::from_middle_factor(input),
            omega_minus: matrix_json(&result.omega_minus),
            omega_plus: matrix_json(&result.omega_plus),
            diagonal_instance: InstanceDocument::from_middle_factor(&result.new_factor),
            verdict: if check.passed() { "pass" } else { "fail" },
            verification: check,
        }
    }
}

/// Exact value of a coefficient for callers that build documents by hand.
pub fn coeff(num: i64, den: i64) -> Coeff {
    assert!(!den.is_zero(), "zero denominator");
    Coeff(Rational::new(num.into(), den.into()))
}
