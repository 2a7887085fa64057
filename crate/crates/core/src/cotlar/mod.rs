//! Verification of the Cotlar identity
//! `(m(g^-1) - m(h)) (m(gh) - m(g)) = 0` for `g` outside the kernel, the
//! invariance laws of the symbol, the supporting lemmas, the sign
//! decomposition used in the proof, and the counterexample search on
//! Bianchi groups.

mod bianchi;
mod invariance;
mod lemmas;
mod proof;

use std::time::Instant;

use rand::Rng;

pub use bianchi::{
    bianchi_observation, counterexample_report, search_bianchi_counterexample, BianchiSearch, BianchiWitness,
    SearchMethod,
};
pub use invariance::{
    g0_observation, invariance_observation, kernel_pair_observation, kernel_single_observation, psu2_observation,
    random_g0, verify_g0_invariance, verify_invariance, verify_kernel_structure, verify_psu2_invariance,
};
pub use lemmas::{
    check_lemma21_exact, check_lemma21_float, check_lemma23, check_lemma32_exact, check_lemma32_float,
    check_lemma34_exact, check_remark_formula, conditioned_l_sample, default_l_plus, lemma21_exact_observation,
    lemma21_float_observation, lemma23_observation, lemma32_exact_observation, lemma32_float_observation,
    lemma34_exact_observation, remark_observation, verify_lemma21_exact, verify_lemma21_float, verify_lemma23,
    verify_lemma32_exact, verify_lemma32_float, verify_lemma34_exact, verify_remark_formula, Lemma23Entry,
    Lemma32Entry, Lemma34Entry,
};
pub use proof::{
    ank_kernel_observation, ank_roundtrip_observation, proof_observation, proof_terms, verify_ank, verify_proof_terms,
    ProofTerms,
};

use crate::error::{Error, Result};
use crate::psl2::{enumerate, random_word, standard_generators, ProjMat};
use crate::quadring::RingParam;
use crate::report::{CheckReport, Observed, Tally, Universe, Violation};
use crate::rng::stream_rng;
use crate::sweep::{sweep, CHUNK};
use crate::symbol::{kernel_class, m_exact};

pub const DEFAULT_WORD_PAIRS: u64 = 10_000;
pub const MAX_WORD_LEN: usize = 8;

/// Random streams for random-word pairs start here so they never collide
/// with the streams used for box sampling.
const WORD_STREAM_BASE: u64 = 1 << 40;

/// `(m(g^-1) - m(h)) (m(gh) - m(g))`, an integer in `[-4, 4]`.
pub fn cotlar_residual(g: &ProjMat, h: &ProjMat) -> Result<i32> {
    let gh = g.mul(h)?;
    Ok((m_exact(&g.inverse()) - m_exact(h)) * (m_exact(&gh) - m_exact(g)))
}

/// Observed values for one pair; a violation is a nonzero residual with
/// `g` outside `K_n`.
pub fn cotlar_observation(g: &ProjMat, h: &ProjMat) -> Result<(Observed, bool)> {
    let gh = g.mul(h)?;
    let (m_ginv, m_h, m_gh, m_g) = (m_exact(&g.inverse()), m_exact(h), m_exact(&gh), m_exact(g));
    let residual = (m_ginv - m_h) * (m_gh - m_g);
    let g_in_k = kernel_class(g).in_k();
    let obs = Observed::new()
        .with("m_g_inv", m_ginv)
        .with("m_h", m_h)
        .with("m_gh", m_gh)
        .with("m_g", m_g)
        .with("g_in_kernel", g_in_k)
        .with("residual", residual);
    Ok((obs, !g_in_k && residual != 0))
}

pub(crate) fn error_violation(inputs: Vec<String>, err: &Error) -> Violation {
    Observed::new().with("error", err.to_string()).into_violation(inputs)
}

pub(crate) fn require_full(ring: RingParam, what: &str) -> Result<()> {
    if ring.is_full() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} is stated for Z[sqrt(-n)], got {ring}")))
    }
}

fn check_pair(t: &mut Tally, g: &ProjMat, h: &ProjMat) {
    t.checked += 1;
    match cotlar_observation(g, h) {
        Ok((obs, bad)) => {
            if obs.0["m_g_inv"] != obs.0["m_h"] {
                t.count("nontrivial_pairs");
            }
            if bad {
                t.violation(obs.into_violation(vec![g.to_string(), h.to_string()]));
            }
        }
        Err(e) => t.violation(error_violation(vec![g.to_string(), h.to_string()], &e)),
    }
}

/// [`verify_cotlar_with`] with [`DEFAULT_WORD_PAIRS`] random-word pairs.
pub fn verify_cotlar(ring: RingParam, bound: u32, pair_budget: u64, seed: u64) -> Result<CheckReport> {
    verify_cotlar_with(ring, bound, pair_budget, DEFAULT_WORD_PAIRS, seed)
}

/// Checks the residual on pairs `(g, h)` with `g` outside `K_n`:
///
/// * box pairs: `g` from the non-kernel part of the `B`-box, `h` from the
///   whole box; the full product when it fits in `pair_budget`, otherwise
///   `pair_budget` seeded uniform draws;
/// * random-word pairs (`g` of length `1..=8` outside `K_n`, `h` of length
///   `0..=8`): at least `word_pairs`, and enough to bring the total up to
///   `pair_budget` when the box is smaller.
pub fn verify_cotlar_with(
    ring: RingParam,
    bound: u32,
    pair_budget: u64,
    word_pairs: u64,
    seed: u64,
) -> Result<CheckReport> {
    require_full(ring, "the Cotlar identity")?;
    let start = Instant::now();
    let elements = enumerate(ring, bound);
    let outside: Vec<ProjMat> = elements.iter().copied().filter(|g| !kernel_class(g).in_k()).collect();
    let product = outside.len() as u64 * elements.len() as u64;
    let sampled = product > pair_budget;
    let box_pairs = product.min(pair_budget) as usize;
    let word_pairs = word_pairs.max(pair_budget.saturating_sub(box_pairs as u64));

    let box_tally = sweep(box_pairs, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for i in range {
            let (gi, hi) = if sampled {
                (rng.random_range(0..outside.len()), rng.random_range(0..elements.len()))
            } else {
                (i / elements.len(), i % elements.len())
            };
            check_pair(&mut t, &outside[gi], &elements[hi]);
        }
        t
    });

    let gens = standard_generators(ring);
    let word_tally = sweep(word_pairs as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, WORD_STREAM_BASE + chunk);
        let mut t = Tally::default();
        for _ in range {
            let drawn = (|| -> Result<(ProjMat, ProjMat)> {
                let g = loop {
                    let len = rng.random_range(1..=MAX_WORD_LEN);
                    let g = random_word(&gens, len, &mut rng)?;
                    if !kernel_class(&g).in_k() {
                        break g;
                    }
                };
                let len = rng.random_range(0..=MAX_WORD_LEN);
                Ok((g, random_word(&gens, len, &mut rng)?))
            })();
            match drawn {
                Ok((g, h)) => check_pair(&mut t, &g, &h),
                Err(e) => {
                    t.checked += 1;
                    t.violation(error_violation(vec![], &e));
                }
            }
        }
        t
    });

    let mut report = box_tally.merge(word_tally).into_report(
        "cotlar",
        Universe {
            description: format!(
                "{box_pairs} {} pairs from the B={bound} box of PSL2({ring}) ({} non-kernel x {} elements) \
                 plus {word_pairs} random-word pairs of length <= {MAX_WORD_LEN}",
                if sampled { "sampled" } else { "exhaustive" },
                outside.len(),
                elements.len()
            ),
            ring: Some(ring.to_string()),
            bound: Some(bound),
            samples: Some(box_pairs as u64 + word_pairs),
            seed: Some(seed),
            tol: None,
        },
        start.elapsed(),
    );
    report.stats.insert("box_pairs".into(), (box_pairs as u64).into());
    report.stats.insert("word_pairs".into(), word_pairs.into());
    report.stats.insert("box_sampled".into(), sampled.into());
    Ok(report)
}
