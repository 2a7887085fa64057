//! Search for pairs `(l, h)` in a Bianchi group with `l` in `L+` and a
//! nonzero Cotlar residual.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::cotlar_residual;
use crate::error::{Error, Result};
use crate::psl2::{enumerate, ProjMat};
use crate::quadring::RingParam;
use crate::report::{CheckReport, Observed, Tally, Universe};
use crate::symbol::{kernel_class, m_exact, KernelClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    /// `h' = omega h omega` for some `h` with `m(lh) != 0` and `m(h) = m(l^-1)`.
    OmegaConjugate,
    /// Direct scan of `L+ x box`.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BianchiWitness {
    pub l: ProjMat,
    /// The element the conjugate was built from, for the recipe.
    pub source: Option<ProjMat>,
    pub h: ProjMat,
    pub residual: i32,
    pub method: SearchMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BianchiSearch {
    pub ring: RingParam,
    pub bound: u32,
    pub witness: Option<BianchiWitness>,
    /// Elements of `L+` in the box.
    pub l_plus: u64,
    /// Elements `l` of `L+` in the box with `m(l^-1) = 0`, i.e. `l^-1` in `K'`.
    pub l_plus_inverse_in_kernel: u64,
    /// `(l, h)` pairs examined before the witness was found.
    pub pairs_scanned: u64,
}

/// Values on one candidate pair; the flag is set when `l` is in `L+` and the
/// residual is nonzero.
pub fn bianchi_observation(l: &ProjMat, h: &ProjMat) -> Result<(Observed, bool)> {
    let class = kernel_class(l);
    let residual = cotlar_residual(l, h)?;
    let obs = Observed::new()
        .with("class_l", class.as_str())
        .with("m_l_inv", m_exact(&l.inverse()))
        .with("m_h", m_exact(h))
        .with("m_lh", m_exact(&l.mul(h)?))
        .with("m_l", m_exact(l))
        .with("residual", residual);
    Ok((obs, class == KernelClass::LPlus && residual != 0))
}

/// Tries the conjugation recipe over `L+` elements of the box (those with
/// `l^-1` outside `K'` first), then falls back to an exhaustive scan.
pub fn search_bianchi_counterexample(ring: RingParam, bound: u32) -> Result<BianchiSearch> {
    if ring.is_full() {
        return Err(Error::Precondition(format!("the search runs on a maximal order, got {ring}")));
    }
    let elements = enumerate(ring, bound);
    let mut l_plus: Vec<ProjMat> = elements.iter().copied().filter(|g| kernel_class(g) == KernelClass::LPlus).collect();
    let inverse_in_kernel = l_plus.iter().filter(|l| m_exact(&l.inverse()) == 0).count() as u64;
    // stable: keeps the enumeration order within each group
    l_plus.sort_by_key(|l| m_exact(&l.inverse()) == 0);

    let omega = ProjMat::omega(ring);
    let mut search = BianchiSearch {
        ring,
        bound,
        witness: None,
        l_plus: l_plus.len() as u64,
        l_plus_inverse_in_kernel: inverse_in_kernel,
        pairs_scanned: 0,
    };

    for l in &l_plus {
        let m_inv = m_exact(&l.inverse());
        if m_inv == 0 {
            continue;
        }
        for h in &elements {
            search.pairs_scanned += 1;
            if m_exact(h) != m_inv || m_exact(&l.mul(h)?) == 0 {
                continue;
            }
            let h2 = omega.mul(h)?.mul(&omega)?;
            let residual = cotlar_residual(l, &h2)?;
            if residual != 0 {
                search.witness = Some(BianchiWitness {
                    l: *l,
                    source: Some(*h),
                    h: h2,
                    residual,
                    method: SearchMethod::OmegaConjugate,
                });
                return Ok(search);
            }
        }
    }

    for l in &l_plus {
        for h in &elements {
            search.pairs_scanned += 1;
            let residual = cotlar_residual(l, h)?;
            if residual != 0 {
                search.witness =
                    Some(BianchiWitness { l: *l, source: None, h: *h, residual, method: SearchMethod::Exhaustive });
                return Ok(search);
            }
        }
    }
    Ok(search)
}

/// Report form of the search. Finding a witness is the success condition:
/// it goes in `witness`, and an unsuccessful search records one violation.
pub fn counterexample_report(ring: RingParam, bound: u32) -> Result<CheckReport> {
    let start = Instant::now();
    let search = search_bianchi_counterexample(ring, bound)?;
    let mut tally = Tally { checked: search.pairs_scanned, ..Default::default() };
    let witness = match &search.witness {
        Some(w) => {
            let (obs, _) = bianchi_observation(&w.l, &w.h)?;
            Some(obs.into_violation(vec![w.l.to_string(), w.h.to_string()]))
        }
        None => {
            tally.violation(
                Observed::new().with("error", "no pair with nonzero residual in the box").into_violation(vec![]),
            );
            None
        }
    };
    let mut report = tally.into_report(
        "bianchi-counterexample",
        Universe {
            description: format!("L+ x box pairs in the B={bound} box of PSL2({ring})"),
            ring: Some(ring.to_string()),
            bound: Some(bound),
            ..Default::default()
        },
        start.elapsed(),
    );
    report.witness = witness;
    report.stats.insert("l_plus".into(), search.l_plus.into());
    report.stats.insert("l_plus_inverse_in_kernel".into(), search.l_plus_inverse_in_kernel.into());
    if let Some(w) = &search.witness {
        report.stats.insert("method".into(), serde_json::to_value(w.method).expect("plain enum"));
        if let Some(src) = w.source {
            report.stats.insert("source".into(), src.to_string().into());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_ring_is_rejected() {
        let r = RingParam::full(2).unwrap();
        assert!(matches!(search_bianchi_counterexample(r, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn witness_for_seven() {
        let r = RingParam::maximal(7).unwrap();
        let s = search_bianchi_counterexample(r, 2).unwrap();
        let w = s.witness.expect("witness");
        assert_eq!(w.method, SearchMethod::OmegaConjugate);
        assert_eq!(kernel_class(&w.l), KernelClass::LPlus);
        assert_ne!(cotlar_residual(&w.l, &w.h).unwrap(), 0);
        let src = w.source.unwrap();
        assert_eq!(m_exact(&w.h), -m_exact(&src));
        assert_eq!(m_exact(&w.l.mul(&w.h).unwrap()), -m_exact(&w.l.mul(&src).unwrap()));
    }

    #[test]
    fn some_l_plus_inverse_has_zero_symbol() {
        // l = [[a, -conj(a)], [conj(a), a]] with a = (3 + sqrt(-7))/2: Re(a^2) = 1/2
        let r = RingParam::maximal(7).unwrap();
        let l = ProjMat::from_half(r, [(3, 1), (-3, 1), (3, -1), (3, 1)]).unwrap();
        assert_eq!(kernel_class(&l), KernelClass::LPlus);
        assert_eq!(m_exact(&l.inverse()), 0);
        let s = search_bianchi_counterexample(r, 2).unwrap();
        assert!(s.l_plus_inverse_in_kernel > 0);
        assert!(s.l_plus_inverse_in_kernel < s.l_plus);
    }

    #[test]
    fn report_has_witness() {
        let rep = counterexample_report(RingParam::maximal(11).unwrap(), 2).unwrap();
        assert!(rep.passed());
        let w = rep.witness.unwrap();
        assert_ne!(w.observed["residual"], 0);
    }
}
