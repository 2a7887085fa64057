//! Re-evaluation of stored witnesses: every violation (and search witness)
//! in a report can be recomputed from its serialized inputs.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::cotlar::{
    ank_kernel_observation, ank_roundtrip_observation, bianchi_observation, cotlar_observation, g0_observation,
    invariance_observation, kernel_pair_observation, kernel_single_observation, lemma21_exact_observation,
    lemma21_float_observation, lemma23_observation, lemma32_exact_observation, lemma32_float_observation,
    lemma34_exact_observation, proof_observation, psu2_observation, remark_observation,
};
use crate::error::{Error, Result};
use crate::ncfourier::{norm2k, parse_alg_elem};
use crate::psl2::CMat2;
use crate::report::{Observed, ReportDocument, Violation};
use crate::symbol::decomposition_observation;
use crate::text::{parse_cmat, parse_matrix};

/// Tolerance used when a report does not record one.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub inputs: Vec<String>,
    pub stored: BTreeMap<String, Value>,
    pub recomputed: BTreeMap<String, Value>,
}

impl ReplayOutcome {
    pub fn matches(&self) -> bool {
        self.stored == self.recomputed
    }
}

fn arity(inputs: &[String], n: usize) -> Result<()> {
    if inputs.len() == n {
        Ok(())
    } else {
        Err(Error::parse(format!("expected {n} inputs, found {}", inputs.len())))
    }
}

/// Lattice matrices are accepted wherever a complex matrix is expected.
fn any_cmat(s: &str) -> Result<CMat2> {
    parse_matrix(s).map(|g| g.to_complex()).or_else(|_| parse_cmat(s))
}

/// Observed values of `check` on `inputs`. Errors raised by the check
/// itself become an `error` entry, as in the sweeps; malformed inputs and
/// unknown checks are errors.
pub fn observe(check: &str, inputs: &[String], tol: f64) -> Result<BTreeMap<String, Value>> {
    let run: Result<Observed> = match check {
        "kernel-decomposition" => {
            arity(inputs, 1)?;
            Ok(decomposition_observation(&parse_matrix(&inputs[0])?).0)
        }
        "cotlar" | "invariance" | "proof-terms" | "bianchi-counterexample" => {
            arity(inputs, 2)?;
            let (g, h) = (parse_matrix(&inputs[0])?, parse_matrix(&inputs[1])?);
            match check {
                "cotlar" => cotlar_observation(&g, &h),
                "invariance" => invariance_observation(&g, &h),
                "proof-terms" => proof_observation(&g, &h, tol),
                _ => bianchi_observation(&g, &h),
            }
            .map(|o| o.0)
        }
        "kernel-structure" => match inputs.len() {
            1 => kernel_single_observation(&parse_matrix(&inputs[0])?).map(|o| o.0),
            _ => {
                arity(inputs, 2)?;
                kernel_pair_observation(&parse_matrix(&inputs[0])?, &parse_matrix(&inputs[1])?).map(|o| o.0)
            }
        },
        "g0-invariance" | "psu2-invariance" => {
            arity(inputs, 2)?;
            let (x, y) = (parse_cmat(&inputs[0])?, parse_cmat(&inputs[1])?);
            Ok(if check == "g0-invariance" { g0_observation(&x, &y, tol) } else { psu2_observation(&x, &y, tol) }.0)
        }
        "column-product-float" => {
            arity(inputs, 1)?;
            Ok(lemma21_float_observation(&parse_cmat(&inputs[0])?, tol).0)
        }
        "quadratic-inequality-float" => {
            arity(inputs, 1)?;
            Ok(lemma32_float_observation(&parse_cmat(&inputs[0])?, tol).0)
        }
        "l-shape-equivalence" => {
            arity(inputs, 1)?;
            Ok(lemma23_observation(&any_cmat(&inputs[0])?, tol).0)
        }
        "column-product-exact" => {
            arity(inputs, 1)?;
            Ok(lemma21_exact_observation(&parse_matrix(&inputs[0])?).0)
        }
        "quadratic-identity-exact" => {
            arity(inputs, 1)?;
            lemma32_exact_observation(&parse_matrix(&inputs[0])?).map(|o| o.0)
        }
        "transpose-sign-exact" => {
            arity(inputs, 1)?;
            lemma34_exact_observation(&parse_matrix(&inputs[0])?).map(|o| o.0)
        }
        "row-norm-formula" => {
            arity(inputs, 2)?;
            remark_observation(&parse_matrix(&inputs[0])?, &parse_cmat(&inputs[1])?, tol).map(|o| o.0)
        }
        "ank" => {
            arity(inputs, 1)?;
            match parse_matrix(&inputs[0]) {
                Ok(g) => ank_kernel_observation(&g, tol),
                Err(_) => ank_roundtrip_observation(&parse_cmat(&inputs[0])?, tol),
            }
            .map(|o| o.0)
        }
        other => return Err(Error::parse(format!("no replay rule for check {other:?}"))),
    };
    Ok(match run {
        Ok(obs) => obs.0,
        Err(e) => Observed::new().with("error", e.to_string()).0,
    })
}

/// The norm experiment stores `k` in the observed values.
fn observe_norm(v: &Violation) -> Result<BTreeMap<String, Value>> {
    arity(&v.inputs, 1)?;
    let x = parse_alg_elem(&v.inputs[0])?;
    let k = v
        .observed
        .get("k")
        .and_then(Value::as_u64)
        .and_then(|k| u32::try_from(k).ok())
        .ok_or_else(|| Error::parse("missing or invalid `k`"))?;
    let ratio = norm2k(&x.apply_multiplier(), k)?.value / norm2k(&x, k)?.value;
    Ok(Observed::new().with("k", k).with("ratio", ratio).0)
}

pub fn replay_violation(check: &str, v: &Violation, tol: f64) -> Result<ReplayOutcome> {
    if v.inputs.is_empty() {
        return Err(Error::Precondition("entry has no inputs to replay".into()));
    }
    let recomputed = if check == "norm-experiment" { observe_norm(v)? } else { observe(check, &v.inputs, tol)? };
    Ok(ReplayOutcome { inputs: v.inputs.clone(), stored: v.observed.clone(), recomputed })
}

/// Replays every stored violation and the witness of a report.
pub fn replay_document(doc: &ReportDocument) -> Vec<Result<ReplayOutcome>> {
    let tol = doc.universe.tol.unwrap_or(DEFAULT_TOL);
    doc.violations.iter().chain(doc.witness.as_ref()).map(|v| replay_violation(&doc.check, v, tol)).collect()
}
