use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{error_violation, require_full};
use crate::error::Result;
use crate::psl2::{enumerate, random_psl2c, random_su2, CMat2, ProjMat};
use crate::quadring::RingParam;
use crate::report::{CheckReport, Observed, Tally, Universe};
use crate::rng::stream_rng;
use crate::sweep::{sweep, CHUNK};
use crate::symbol::{chi, kernel_class, m_exact, m_float, KernelClass};
use crate::text::format_cmat;

/// Right `K_n`-invariance and left `(K_n, chi)`-invariance for one pair;
/// `h` must lie in `K_n`.
pub fn invariance_observation(g: &ProjMat, h: &ProjMat) -> Result<(Observed, bool)> {
    let chi_h = chi(h)?;
    let m_g = m_exact(g);
    let m_gh = m_exact(&g.mul(h)?);
    let m_hg = m_exact(&h.mul(g)?);
    let obs = Observed::new().with("m_g", m_g).with("m_gh", m_gh).with("m_hg", m_hg).with("chi_h", chi_h);
    Ok((obs, m_gh != m_g || m_hg != chi_h * m_g))
}

/// `m(gh) = m(g)` and `m(hg) = chi(h) m(g)` for every box element `g` and
/// every box element `h` of `K_n`.
pub fn verify_invariance(ring: RingParam, bound: u32) -> Result<CheckReport> {
    require_full(ring, "kernel invariance")?;
    let start = Instant::now();
    let elements = enumerate(ring, bound);
    let kernel: Vec<ProjMat> = elements.iter().copied().filter(|g| kernel_class(g).in_k()).collect();
    let tally = sweep(elements.len(), 256, |_, range| {
        let mut t = Tally::default();
        for g in &elements[range] {
            for h in &kernel {
                t.checked += 1;
                let inputs = || vec![g.to_string(), h.to_string()];
                match invariance_observation(g, h) {
                    Ok((obs, true)) => t.violation(obs.into_violation(inputs())),
                    Ok(_) => {}
                    Err(e) => t.violation(error_violation(inputs(), &e)),
                }
            }
        }
        t
    });
    let mut report = tally.into_report(
        "invariance",
        Universe {
            description: format!(
                "all pairs (g, h) with g in the B={bound} box of PSL2({ring}) ({} elements) and h in its kernel part ({} elements)",
                elements.len(),
                kernel.len()
            ),
            ring: Some(ring.to_string()),
            bound: Some(bound),
            ..Default::default()
        },
        start.elapsed(),
    );
    report.stats.insert("kernel_size".into(), (kernel.len() as u64).into());
    Ok(report)
}

/// `m(omega g) = -m(g)`, and `omega K+ = K+ omega = K-` (and vice versa)
/// for a single element.
pub fn kernel_single_observation(g: &ProjMat) -> Result<(Observed, bool)> {
    let w = ProjMat::omega(g.ring());
    let wg = w.mul(g)?;
    let gw = g.mul(&w)?;
    let class = kernel_class(g);
    let (cwg, cgw) = (kernel_class(&wg), kernel_class(&gw));
    let swapped = match class {
        KernelClass::KPlus => Some(KernelClass::KMinus),
        KernelClass::KMinus => Some(KernelClass::KPlus),
        _ => None,
    };
    let omega_ok = swapped.is_none_or(|s| cwg == s && cgw == s);
    let obs = Observed::new()
        .with("m_g", m_exact(g))
        .with("m_omega_g", m_exact(&wg))
        .with("class_g", class.as_str())
        .with("class_omega_g", cwg.as_str())
        .with("class_g_omega", cgw.as_str());
    Ok((obs, m_exact(&wg) != -m_exact(g) || !omega_ok))
}

/// Closure of `K_n` under products and `chi(gh) = chi(g) chi(h)`.
pub fn kernel_pair_observation(g: &ProjMat, h: &ProjMat) -> Result<(Observed, bool)> {
    let (cg, ch) = (chi(g)?, chi(h)?);
    let gh = g.mul(h)?;
    let class = kernel_class(&gh);
    let cgh = chi(&gh).ok();
    let obs = Observed::new()
        .with("chi_g", cg)
        .with("chi_h", ch)
        .with("class_gh", class.as_str())
        .with("chi_gh", cgh.map_or(0, |c| c));
    Ok((obs, cgh != Some(cg * ch)))
}

/// Structure of the kernel on the box: the omega relations on every
/// element and the character law on every pair of kernel elements.
pub fn verify_kernel_structure(ring: RingParam, bound: u32) -> Result<CheckReport> {
    require_full(ring, "the kernel character")?;
    let start = Instant::now();
    let elements = enumerate(ring, bound);
    let kernel: Vec<ProjMat> = elements.iter().copied().filter(|g| kernel_class(g).in_k()).collect();
    let singles = sweep(elements.len(), CHUNK, |_, range| {
        let mut t = Tally::default();
        for g in &elements[range] {
            t.checked += 1;
            match kernel_single_observation(g) {
                Ok((obs, true)) => t.violation(obs.into_violation(vec![g.to_string()])),
                Ok(_) => {}
                Err(e) => t.violation(error_violation(vec![g.to_string()], &e)),
            }
        }
        t
    });
    let pairs = sweep(kernel.len(), 64, |_, range| {
        let mut t = Tally::default();
        for g in &kernel[range] {
            for h in &kernel {
                t.checked += 1;
                let inputs = || vec![g.to_string(), h.to_string()];
                match kernel_pair_observation(g, h) {
                    Ok((obs, true)) => t.violation(obs.into_violation(inputs())),
                    Ok(_) => {}
                    Err(e) => t.violation(error_violation(inputs(), &e)),
                }
            }
        }
        t
    });
    let mut report = singles.merge(pairs).into_report(
        "kernel-structure",
        Universe {
            description: format!(
                "omega relations on all {} elements and the character law on all {}^2 kernel pairs of the B={bound} box of PSL2({ring})",
                elements.len(),
                kernel.len()
            ),
            ring: Some(ring.to_string()),
            bound: Some(bound),
            ..Default::default()
        },
        start.elapsed(),
    );
    report.stats.insert("kernel_pairs".into(), ((kernel.len() * kernel.len()) as u64).into());
    Ok(report)
}

/// An element `[[x, iy], [iz, w]]` of `G_0` with `x = +-exp(N/2)`, `y, z`
/// standard normal and `w = (1 - yz)/x`, so that `det = xw + yz = 1`.
pub fn random_g0<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    let z0: f64 = StandardNormal.sample(rng);
    let x = (0.5 * z0).exp() * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let y: f64 = StandardNormal.sample(rng);
    let z: f64 = StandardNormal.sample(rng);
    let w = (1.0 - y * z) / x;
    CMat2::new(x.into(), Complex64::new(0.0, y), Complex64::new(0.0, z), w.into())
}

fn guarded_comparison(before: &CMat2, after: &CMat2, tol: f64) -> (Observed, bool) {
    let (re_before, re_after) = (before.row_pairing_re(), after.row_pairing_re());
    let guarded = re_before.abs() > 10.0 * tol;
    let (m_before, m_after) = (m_float(before, tol), m_float(after, tol));
    let obs = Observed::new()
        .with("re_before", re_before)
        .with("re_after", re_after)
        .with("m_before", m_before)
        .with("m_after", m_after)
        .with("guarded", guarded);
    (obs, guarded && m_before != m_after)
}

/// `m(g0 g) = m(g)` outside the dead zone.
pub fn g0_observation(g0: &CMat2, g: &CMat2, tol: f64) -> (Observed, bool) {
    guarded_comparison(g, &g0.mul(g), tol)
}

/// `m(g u) = m(g)` outside the dead zone.
pub fn psu2_observation(g: &CMat2, u: &CMat2, tol: f64) -> (Observed, bool) {
    guarded_comparison(g, &g.mul(u), tol)
}

fn float_invariance(
    check: &str,
    what: &str,
    samples: u64,
    seed: u64,
    tol: f64,
    draw: impl Fn(&mut rand_chacha::ChaCha8Rng) -> (CMat2, CMat2) + Sync,
    observe: impl Fn(&CMat2, &CMat2, f64) -> (Observed, bool) + Sync,
) -> CheckReport {
    let start = Instant::now();
    let tally = sweep(samples as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for _ in range {
            let (x, y) = draw(&mut rng);
            t.checked += 1;
            let (obs, bad) = observe(&x, &y, tol);
            if obs.0["guarded"] == false {
                t.count("dead_zone_skipped");
            }
            let drift = (obs.0["re_after"].as_f64().unwrap() - obs.0["re_before"].as_f64().unwrap()).abs();
            t.observe_max("re_drift", drift);
            if bad {
                t.violation(obs.into_violation(vec![format_cmat(&x), format_cmat(&y)]));
            }
        }
        t
    });
    tally.into_report(
        check,
        Universe {
            description: format!("{samples} seeded random pairs ({what}), dead-zone guard 10*tol"),
            samples: Some(samples),
            seed: Some(seed),
            tol: Some(tol),
            ..Default::default()
        },
        start.elapsed(),
    )
}

/// Left invariance under `G_0` on random pairs `(g0, g)`.
pub fn verify_g0_invariance(samples: u64, seed: u64, tol: f64) -> CheckReport {
    float_invariance(
        "g0-invariance",
        "g0 in G_0, g in PSL2(C)",
        samples,
        seed,
        tol,
        |rng| (random_g0(rng), random_psl2c(rng)),
        g0_observation,
    )
}

/// Right invariance under PSU(2) on random pairs `(g, u)`.
pub fn verify_psu2_invariance(samples: u64, seed: u64, tol: f64) -> CheckReport {
    float_invariance(
        "psu2-invariance",
        "g in PSL2(C), u Haar in SU(2)",
        samples,
        seed,
        tol,
        |rng| (random_psl2c(rng), random_su2(rng)),
        psu2_observation,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psl2::random_psl2c_seeded;

    #[test]
    fn identity_in_kernel_is_trivially_invariant() {
        let r = RingParam::full(2).unwrap();
        let e = ProjMat::identity(r);
        for g in enumerate(r, 1) {
            assert!(!invariance_observation(&g, &e).unwrap().1);
        }
    }

    #[test]
    fn invariance_needs_kernel_element() {
        let r = RingParam::full(2).unwrap();
        let t = ProjMat::translation(r, crate::quadring::QInt::ONE).unwrap();
        assert!(invariance_observation(&t, &t).is_err());
    }

    #[test]
    fn small_box_invariance() {
        for n in [1, 2, 5] {
            let r = RingParam::full(n).unwrap();
            let rep = verify_invariance(r, 1).unwrap();
            assert!(rep.passed(), "{:?}", rep.violations.first());
            let rep = verify_kernel_structure(r, 1).unwrap();
            assert!(rep.passed(), "{:?}", rep.violations.first());
        }
    }

    #[test]
    fn g0_samples_are_unimodular_and_identity_is_neutral() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..1000 {
            assert!(random_g0(&mut rng).is_unimodular(1e-9));
        }
        let g = random_psl2c_seeded(8);
        assert!(!g0_observation(&CMat2::identity(), &g, 1e-9).1);
        // omega is unitary, so right multiplication by it preserves m
        assert!(!psu2_observation(&g, &CMat2::omega(), 1e-9).1);
    }

    #[test]
    fn float_invariance_small_runs() {
        assert!(verify_g0_invariance(5000, 1, 1e-9).passed());
        assert!(verify_psu2_invariance(5000, 1, 1e-9).passed());
    }
}
