//! The three-term sign decomposition of `m(gh) m(g)` through the ANK
//! coordinates of `h`, and ANK checks on lattice and random elements.

use std::time::Instant;

use rand::Rng;

use super::{error_violation, require_full};
use crate::ank::{ank_decompose, reconstruction_error, unitarity_error};
use crate::error::{Error, Result};
use crate::psl2::{enumerate, random_psl2c, CMat2, ProjMat};
use crate::quadring::RingParam;
use crate::report::{CheckReport, Observed, Tally, Universe};
use crate::rng::stream_rng;
use crate::sweep::{sweep, CHUNK};
use crate::symbol::{kernel_class, m_exact};
use crate::text::format_cmat;

/// Rejection sampling gives up after this many draws per requested pair.
const MAX_DRAWS_PER_PAIR: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofTerms {
    pub i: f64,
    pub ii: f64,
    pub iii: f64,
    pub s: f64,
    pub re_t: f64,
    pub im_t: f64,
}

impl ProofTerms {
    pub fn total(&self) -> f64 {
        self.i + self.ii + self.iii
    }
}

/// Splits `Re<r1(g), r2(g)> * Re<r1(gh), r2(gh)>` into
///
/// * `I = M Re(ac̄) s^-2 (1 + (Re t)^2)`
/// * `II = M Re(ad̄ + bc̄) Re t`
/// * `III = M (Re(ac̄) s^-2 (Im t)^2 + Re(bd̄) s^2 + Im(bc̄ - ad̄) Im t)`
///
/// where `M = Re(ac̄ + bd̄)` and `(s, t)` are the ANK coordinates of `h`.
/// Requires `g, h` outside the kernel with `m(g^-1) != m(h)`.
pub fn proof_terms(g: &ProjMat, h: &ProjMat) -> Result<ProofTerms> {
    require_full(g.ring(), "the proof decomposition")?;
    if g.ring() != h.ring() {
        return Err(Error::MixedRings { left: g.ring().to_string(), right: h.ring().to_string() });
    }
    if kernel_class(g).in_k() || kernel_class(h).in_k() {
        return Err(Error::Precondition("g and h must lie outside K_n".into()));
    }
    if m_exact(&g.inverse()) == m_exact(h) {
        return Err(Error::Precondition("requires m(g^-1) != m(h)".into()));
    }
    let k = ank_decompose(&h.to_complex())?;
    let gc = g.to_complex();
    let (a, b, c, d) = (gc.a, gc.b, gc.c, gc.d);
    let re = |x: num_complex::Complex64| x.re;
    let rac = re(a * c.conj());
    let rbd = re(b * d.conj());
    let m = rac + rbd;
    let s2 = k.s * k.s;
    let (tr, ti) = (k.t.re, k.t.im);
    let cross = re(a * d.conj() + b * c.conj());
    let im = (b * c.conj() - a * d.conj()).im;
    Ok(ProofTerms {
        i: m * rac / s2 * (1.0 + tr * tr),
        ii: m * cross * tr,
        iii: m * (rac / s2 * ti * ti + rbd * s2 + im * ti),
        s: k.s,
        re_t: tr,
        im_t: ti,
    })
}

fn float_sign(x: f64, tol: f64) -> i32 {
    if x.abs() <= tol {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

pub fn proof_observation(g: &ProjMat, h: &ProjMat, tol: f64) -> Result<(Observed, bool)> {
    let p = proof_terms(g, h)?;
    let expected = m_exact(&g.mul(h)?) * m_exact(g);
    let got = float_sign(p.total(), tol);
    let re_t_sign = float_sign(p.re_t, tol);
    let obs = Observed::new()
        .with("term_i", p.i)
        .with("term_ii", p.ii)
        .with("term_iii", p.iii)
        .with("sign_total", got)
        .with("m_gh_m_g", expected)
        .with("sign_re_t", re_t_sign)
        .with("m_h", m_exact(h));
    let bad = p.i < -tol || p.ii < -tol || p.iii < -tol || got != expected || re_t_sign != m_exact(h);
    Ok((obs, bad))
}

/// Draws `pairs` qualifying pairs from the box (with replacement) and checks
/// the term signs and the sign of the total.
pub fn verify_proof_terms(ring: RingParam, bound: u32, pairs: u64, seed: u64, tol: f64) -> Result<CheckReport> {
    require_full(ring, "the proof decomposition")?;
    let start = Instant::now();
    let outside: Vec<ProjMat> = enumerate(ring, bound).into_iter().filter(|g| !kernel_class(g).in_k()).collect();
    if outside.is_empty() {
        return Err(Error::Precondition(format!("no non-kernel elements in the B={bound} box")));
    }
    let tally = sweep(pairs as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for _ in range {
            let mut drawn = None;
            for _ in 0..MAX_DRAWS_PER_PAIR {
                t.count("draws");
                let g = &outside[rng.random_range(0..outside.len())];
                let h = &outside[rng.random_range(0..outside.len())];
                if m_exact(&g.inverse()) != m_exact(h) {
                    drawn = Some((g, h));
                    break;
                }
            }
            t.checked += 1;
            let Some((g, h)) = drawn else {
                t.violation(Observed::new().with("error", "no qualifying pair drawn").into_violation(vec![]));
                continue;
            };
            let inputs = || vec![g.to_string(), h.to_string()];
            match proof_observation(g, h, tol) {
                Ok((obs, bad)) => {
                    if let Ok(p) = proof_terms(g, h) {
                        t.observe_min("term_i", p.i);
                        t.observe_min("term_ii", p.ii);
                        t.observe_min("term_iii", p.iii);
                        t.observe_min("abs_total", p.total().abs());
                    }
                    if bad {
                        t.violation(obs.into_violation(inputs()));
                    }
                }
                Err(e) => t.violation(error_violation(inputs(), &e)),
            }
        }
        t
    });
    Ok(tally.into_report(
        "proof-terms",
        Universe {
            description: format!(
                "{pairs} seeded pairs (g, h) of non-kernel elements of the B={bound} box of PSL2({ring}) with m(g^-1) != m(h)"
            ),
            ring: Some(ring.to_string()),
            bound: Some(bound),
            samples: Some(pairs),
            seed: Some(seed),
            tol: Some(tol),
        },
        start.elapsed(),
    ))
}

pub fn ank_roundtrip_observation(g: &CMat2, tol: f64) -> Result<(Observed, bool)> {
    let k = ank_decompose(g)?;
    let err = reconstruction_error(g, &k);
    let unit = unitarity_error(&k.u);
    let obs = Observed::new().with("reconstruction_error", err).with("unitarity_error", unit).with("s", k.s);
    Ok((obs, !(err < tol && unit < tol && k.s > 0.0)))
}

/// On a lattice element: `Re t` vanishes (within `tol`) on the kernel and
/// has the sign of `m` elsewhere.
pub fn ank_kernel_observation(g: &ProjMat, tol: f64) -> Result<(Observed, bool)> {
    let k = ank_decompose(&g.to_complex())?;
    let in_k = kernel_class(g).in_k();
    let m = m_exact(g);
    let re_t_sign = float_sign(k.t.re, tol);
    let obs = Observed::new().with("re_t", k.t.re).with("in_kernel", in_k).with("m", m);
    let bad = if in_k { k.t.re.abs() >= tol } else { re_t_sign != m };
    Ok((obs, bad))
}

/// Round trip on `samples` random elements of PSL2(C) plus the kernel
/// relation on every box element.
pub fn verify_ank(ring: RingParam, bound: u32, samples: u64, seed: u64, tol: f64) -> CheckReport {
    let start = Instant::now();
    let random = sweep(samples as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for _ in range {
            let g = random_psl2c(&mut rng);
            t.checked += 1;
            match ank_roundtrip_observation(&g, tol) {
                Ok((obs, bad)) => {
                    t.observe_max("reconstruction_error", obs.0["reconstruction_error"].as_f64().unwrap_or(f64::NAN));
                    if bad {
                        t.violation(obs.into_violation(vec![format_cmat(&g)]));
                    }
                }
                Err(e) => t.violation(error_violation(vec![format_cmat(&g)], &e)),
            }
        }
        t
    });
    let elements = enumerate(ring, bound);
    let lattice = sweep(elements.len(), CHUNK, |_, range| {
        let mut t = Tally::default();
        for g in &elements[range] {
            t.checked += 1;
            t.count("lattice");
            match ank_kernel_observation(g, tol) {
                Ok((obs, bad)) => {
                    if obs.0["in_kernel"] == true {
                        t.count("lattice_kernel");
                        t.observe_max("kernel_abs_re_t", obs.0["re_t"].as_f64().unwrap_or(f64::NAN).abs());
                    }
                    if bad {
                        t.violation(obs.into_violation(vec![g.to_string()]));
                    }
                }
                Err(e) => t.violation(error_violation(vec![g.to_string()], &e)),
            }
        }
        t
    });
    random.merge(lattice).into_report(
        "ank",
        Universe {
            description: format!(
                "{samples} seeded random PSL2(C) round trips plus all {} elements of the B={bound} box of PSL2({ring})",
                elements.len()
            ),
            ring: Some(ring.to_string()),
            bound: Some(bound),
            samples: Some(samples),
            seed: Some(seed),
            tol: Some(tol),
        },
        start.elapsed(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadring::QInt;

    #[test]
    fn translation_pair() {
        let r = RingParam::full(2).unwrap();
        let t = ProjMat::translation(r, QInt::ONE).unwrap();
        let p = proof_terms(&t, &t).unwrap();
        // g = h = [[1,1],[0,1]]: M = 1, s = 1, t = 1
        assert_eq!((p.i, p.ii, p.iii), (0.0, 1.0, 1.0));
        let (_, bad) = proof_observation(&t, &t, 1e-9).unwrap();
        assert!(!bad);
    }

    #[test]
    fn preconditions() {
        let r = RingParam::full(2).unwrap();
        let t = ProjMat::translation(r, QInt::ONE).unwrap();
        let e = ProjMat::identity(r);
        assert!(matches!(proof_terms(&t, &e), Err(Error::Precondition(_))));
        assert!(matches!(proof_terms(&t, &t.inverse()), Err(Error::Precondition(_))));
        let r7 = RingParam::maximal(7).unwrap();
        assert!(proof_terms(&ProjMat::omega(r7), &ProjMat::omega(r7)).is_err());
    }

    #[test]
    fn terms_add_up_to_the_product_pairing() {
        let r = RingParam::full(3).unwrap();
        let outside: Vec<_> = enumerate(r, 1).into_iter().filter(|g| !kernel_class(g).in_k()).collect();
        for g in &outside {
            for h in &outside {
                let Ok(p) = proof_terms(g, h) else { continue };
                let gh = g.to_complex().mul(&h.to_complex());
                let want = g.to_complex().row_pairing_re() * gh.row_pairing_re();
                assert!((p.total() - want).abs() < 1e-9 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn small_sweeps() {
        let r = RingParam::full(2).unwrap();
        let rep = verify_proof_terms(r, 2, 2000, 3, 1e-9).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations.first());
        let rep = verify_ank(r, 1, 2000, 3, 1e-9);
        assert!(rep.passed(), "{:?}", rep.violations.first());
        assert!(rep.stats["lattice_kernel"].as_u64().unwrap() > 0);
    }
}
