//! Per-element checks of the supporting inequalities and identities, each
//! with an exact variant on lattice elements (scaled integers) and/or a
//! float variant on PSL2(C).

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{error_violation, require_full};
use crate::error::{Error, Result};
use crate::psl2::{enumerate, random_psl2c, CMat2, ProjMat};
use crate::quadring::{QInt, RingParam};
use crate::report::{CheckReport, Observed, Tally, Universe};
use crate::rng::stream_rng;
use crate::sweep::{sweep, CHUNK};
use crate::symbol::{kernel_class, m_exact, m_float, sign, KernelClass};
use crate::text::format_cmat;

fn re_pair(x: Complex64, y: Complex64) -> f64 {
    (x * y.conj()).re
}

fn im_pair(x: Complex64, y: Complex64) -> f64 {
    (x * y.conj()).im
}

// ---------------------------------------------------------------------------
// Column products: Re(a c̄) Re(b d̄) >= -1/4, and >= 0 on Z[sqrt(-n)]

/// `Re(a conj(c)) * Re(b conj(d))` on a complex matrix.
pub fn check_lemma21_float(g: &CMat2) -> f64 {
    re_pair(g.a, g.c) * re_pair(g.b, g.d)
}

pub fn lemma21_float_observation(g: &CMat2, tol: f64) -> (Observed, bool) {
    let p = check_lemma21_float(g);
    (Observed::new().with("product", p), p < -0.25 - tol)
}

/// Returns `(16 * Re(a c̄) Re(b d̄), lower bound)`; the bound is 0 on the full
/// ring and `16 * (-1/4)` on the maximal order.
pub fn check_lemma21_exact(g: &ProjMat) -> (i128, i128) {
    let r = g.ring();
    let p = r.re4(g.a(), g.c()) * r.re4(g.b(), g.d());
    (p, if r.is_full() { 0 } else { -4 })
}

pub fn lemma21_exact_observation(g: &ProjMat) -> (Observed, bool) {
    let (p, lower) = check_lemma21_exact(g);
    (Observed::new().with("product16", p as i64).with("lower16", lower as i64), p < lower)
}

// ---------------------------------------------------------------------------
// Quadratic inequality: Im(b c̄ - a d̄)^2 - 4 Re(a c̄) Re(b d̄) <= 1

/// Left-hand side of the quadratic inequality on a complex matrix.
pub fn check_lemma32_float(g: &CMat2) -> f64 {
    let im = im_pair(g.b, g.c) - im_pair(g.a, g.d);
    im * im - 4.0 * re_pair(g.a, g.c) * re_pair(g.b, g.d)
}

pub fn lemma32_float_observation(g: &CMat2, tol: f64) -> (Observed, bool) {
    let lhs = check_lemma32_float(g);
    (Observed::new().with("lhs", lhs), lhs > 1.0 + tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma32Entry {
    /// `16 * LHS`, from the scaled real and imaginary parts.
    pub lhs16: i128,
    /// `16 * p(X)` with `p(X) = -4X(1 + X)`.
    pub p16: i128,
    /// `X = n a2 d2 + b1 c1` in integer coordinates `x = x1 + x2 sqrt(-n)`.
    pub x: i128,
}

/// Integer coordinates `(x1, x2)` of a full-ring element.
fn parts(x: QInt) -> (i128, i128) {
    ((x.u / 2) as i128, (x.v / 2) as i128)
}

pub fn check_lemma32_exact(g: &ProjMat) -> Result<Lemma32Entry> {
    let r = g.ring();
    require_full(r, "the exact quadratic identity")?;
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let n = r.n() as i128;
    let t = r.im_coeff4(b, c) - r.im_coeff4(a, d);
    let lhs16 = n * t * t - 4 * r.re4(a, c) * r.re4(b, d);
    let (_, a2) = parts(a);
    let (b1, _) = parts(b);
    let (c1, _) = parts(c);
    let (_, d2) = parts(d);
    let x = n * a2 * d2 + b1 * c1;
    Ok(Lemma32Entry { lhs16, p16: -64 * x * (1 + x), x })
}

pub fn lemma32_exact_observation(g: &ProjMat) -> Result<(Observed, bool)> {
    let e = check_lemma32_exact(g)?;
    let obs = Observed::new().with("lhs16", e.lhs16 as i64).with("p16", e.p16 as i64).with("x", e.x as i64);
    Ok((obs, e.lhs16 != e.p16 || e.lhs16 > 0))
}

// ---------------------------------------------------------------------------
// m(g) m(g^t) Re(a d̄ + b c̄) >= 0

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma34Entry {
    /// `m(g) * m(g^t) * sign(Re(a d̄ + b c̄))`
    pub product: i32,
    /// Polynomial identity status when `Re(a c̄) != 0` and `Re(a b̄) != 0`:
    /// `(literal form equal, corrected form equal)`.
    pub identity: Option<(bool, bool)>,
}

/// The literal form compares `Re(a c̄) Re(a d̄) Re(a d̄ + b c̄)` against
/// `(AX + B)(2X + 1)` with `A = n(a1^2 + a2^2)`; the corrected form compares
/// `Re(a c̄) Re(a b̄) Re(a d̄ + b c̄)` with `A = a1^2 + n a2^2 = |a|^2`. In both,
/// `B = n a2^2` and `X = b1 c1 + n a2 d2`. Everything is scaled by 64.
pub fn check_lemma34_exact(g: &ProjMat) -> Result<Lemma34Entry> {
    let r = g.ring();
    require_full(r, "the transpose sign relation")?;
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let product = m_exact(g) * m_exact(&g.transpose()) * sign(r.re4(a, d) + r.re4(b, c));

    let (ac, ab) = (r.re4(a, c), r.re4(a, b));
    let identity = (ac != 0 && ab != 0).then(|| {
        let n = r.n() as i128;
        let (a1, a2) = parts(a);
        let (b1, _) = parts(b);
        let (c1, _) = parts(c);
        let (_, d2) = parts(d);
        let x = b1 * c1 + n * a2 * d2;
        let bb = n * a2 * a2;
        let poly = |aa: i128| 64 * (aa * x + bb) * (2 * x + 1);
        let tail = r.re4(a, d) + r.re4(b, c);
        let literal = ac * r.re4(a, d) * tail == poly(n * (a1 * a1 + a2 * a2));
        let corrected = ac * ab * tail == poly(a1 * a1 + n * a2 * a2);
        (literal, corrected)
    });
    Ok(Lemma34Entry { product, identity })
}

pub fn lemma34_exact_observation(g: &ProjMat) -> Result<(Observed, bool)> {
    let e = check_lemma34_exact(g)?;
    let mut obs = Observed::new().with("product", e.product);
    if let Some((literal, corrected)) = e.identity {
        obs = obs.with("literal_identity", literal).with("corrected_identity", corrected);
    }
    Ok((obs, e.product < 0))
}

// ---------------------------------------------------------------------------
// Re(a c̄) = -Re(b d̄) = 1/2  <=>  c = d̄, a = -b̄, Re(a c̄) = 1/2   (and mirror)

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma23Entry {
    pub columns_plus: bool,
    pub shape_plus: bool,
    pub columns_minus: bool,
    pub shape_minus: bool,
}

impl Lemma23Entry {
    pub fn holds(&self) -> bool {
        self.columns_plus == self.shape_plus && self.columns_minus == self.shape_minus
    }

    pub fn vacuous(&self) -> bool {
        !(self.columns_plus || self.shape_plus || self.columns_minus || self.shape_minus)
    }
}

fn lemma23_first_item(g: &CMat2, tol: f64) -> (bool, bool) {
    let close = |x: f64, y: f64| (x - y).abs() <= tol;
    let ac = re_pair(g.a, g.c);
    let columns = close(ac, 0.5) && close(re_pair(g.b, g.d), -0.5);
    let shape = (g.c - g.d.conj()).norm() <= tol && (g.a + g.b.conj()).norm() <= tol && close(ac, 0.5);
    (columns, shape)
}

/// Both sides of both equivalences; the second item is the first applied
/// to `[[a, -b], [-c, d]]`.
pub fn check_lemma23(g: &CMat2, tol: f64) -> Lemma23Entry {
    let (columns_plus, shape_plus) = lemma23_first_item(g, tol);
    let mirrored = CMat2::new(g.a, -g.b, -g.c, g.d);
    let (columns_minus, shape_minus) = lemma23_first_item(&mirrored, tol);
    Lemma23Entry { columns_plus, shape_plus, columns_minus, shape_minus }
}

pub fn lemma23_observation(g: &CMat2, tol: f64) -> (Observed, bool) {
    let e = check_lemma23(g, tol);
    let obs = Observed::new()
        .with("columns_plus", e.columns_plus)
        .with("shape_plus", e.shape_plus)
        .with("columns_minus", e.columns_minus)
        .with("shape_minus", e.shape_minus);
    (obs, !e.holds())
}

/// Random `[[a, -ā], [c, c̄]]` (`sign = 1`) or `[[a, ā], [c, -c̄]]`
/// (`sign = -1`) with `Re(a c̄) = sign / 2`, which makes the determinant 1.
pub fn conditioned_l_sample<R: Rng + ?Sized>(rng: &mut R, sign: f64) -> CMat2 {
    loop {
        let a = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        let c = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        let r = re_pair(a, c);
        if r.abs() < 0.05 {
            continue;
        }
        let c = c * (0.5 * sign / r);
        return if sign > 0.0 { CMat2::new(a, -a.conj(), c, c.conj()) } else { CMat2::new(a, a.conj(), c, -c.conj()) };
    }
}

// ---------------------------------------------------------------------------
// m(l g) = sign(|r1(g)| - |r2(g)|) for l in L+

/// `[[(1+sqrt(-7))/2, -(1-sqrt(-7))/2], [1, 1]]` in `Z[(1+sqrt(-7))/2]`.
pub fn default_l_plus() -> ProjMat {
    let ring = RingParam::maximal(7).expect("7 is square-free and 3 mod 4");
    ProjMat::from_half(ring, [(1, 1), (-1, 1), (2, 0), (2, 0)]).expect("det 1")
}

/// Returns `(m(l g), predicted sign, guarded)`; the prediction is only
/// compared when `| |r1|^2 - |r2|^2 | / 2 > 10 tol`.
pub fn check_remark_formula(l: &ProjMat, g: &CMat2, tol: f64) -> Result<(i32, i32, bool)> {
    if kernel_class(l) != KernelClass::LPlus {
        return Err(Error::Precondition(format!("{l} is not in L+")));
    }
    let m_lg = m_float(&l.to_complex().mul(g), tol);
    let (r1, r2) = g.row_norms();
    let gap = (r1 * r1 - r2 * r2) / 2.0;
    let predicted = if gap.abs() <= tol {
        0
    } else if r1 > r2 {
        1
    } else {
        -1
    };
    Ok((m_lg, predicted, gap.abs() > 10.0 * tol))
}

pub fn remark_observation(l: &ProjMat, g: &CMat2, tol: f64) -> Result<(Observed, bool)> {
    let (m_lg, predicted, guarded) = check_remark_formula(l, g, tol)?;
    let obs = Observed::new().with("m_lg", m_lg).with("predicted", predicted).with("guarded", guarded);
    Ok((obs, guarded && m_lg != predicted))
}

// ---------------------------------------------------------------------------
// sweeps

fn float_universe(samples: u64, seed: u64, tol: f64, what: &str) -> Universe {
    Universe {
        description: format!("{samples} seeded samples: {what}"),
        samples: Some(samples),
        seed: Some(seed),
        tol: Some(tol),
        ..Default::default()
    }
}

fn box_universe(ring: RingParam, bound: u32, count: usize) -> Universe {
    Universe {
        description: format!("all {count} elements of the B={bound} box of PSL2({ring})"),
        ring: Some(ring.to_string()),
        bound: Some(bound),
        ..Default::default()
    }
}

pub fn verify_lemma21_float(samples: u64, seed: u64, tol: f64) -> CheckReport {
    let start = Instant::now();
    let tally = sweep(samples as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for _ in range {
            let g = random_psl2c(&mut rng);
            t.checked += 1;
            t.observe_min("product", check_lemma21_float(&g));
            let (obs, bad) = lemma21_float_observation(&g, tol);
            if bad {
                t.violation(obs.into_violation(vec![format_cmat(&g)]));
            }
        }
        t
    });
    tally.into_report(
        "column-product-float",
        float_universe(samples, seed, tol, "random PSL2(C), Re(ac̄)Re(bd̄) >= -1/4"),
        start.elapsed(),
    )
}

fn exact_sweep(
    check: &str,
    ring: RingParam,
    bound: u32,
    observe: impl Fn(&ProjMat, &mut Tally) -> Result<(Observed, bool)> + Sync,
) -> CheckReport {
    let start = Instant::now();
    let elements = enumerate(ring, bound);
    let tally = sweep(elements.len(), CHUNK, |_, range| {
        let mut t = Tally::default();
        for g in &elements[range] {
            t.checked += 1;
            match observe(g, &mut t) {
                Ok((obs, true)) => t.violation(obs.into_violation(vec![g.to_string()])),
                Ok(_) => {}
                Err(e) => t.violation(error_violation(vec![g.to_string()], &e)),
            }
        }
        t
    });
    tally.into_report(check, box_universe(ring, bound, elements.len()), start.elapsed())
}

pub fn verify_lemma21_exact(ring: RingParam, bound: u32) -> CheckReport {
    exact_sweep("column-product-exact", ring, bound, |g, t| {
        t.observe_min("product16", check_lemma21_exact(g).0 as f64);
        Ok(lemma21_exact_observation(g))
    })
}

pub fn verify_lemma32_float(samples: u64, seed: u64, tol: f64) -> CheckReport {
    let start = Instant::now();
    let tally = sweep(samples as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for _ in range {
            let g = random_psl2c(&mut rng);
            t.checked += 1;
            t.observe_max("lhs", check_lemma32_float(&g));
            let (obs, bad) = lemma32_float_observation(&g, tol);
            if bad {
                t.violation(obs.into_violation(vec![format_cmat(&g)]));
            }
        }
        t
    });
    tally.into_report(
        "quadratic-inequality-float",
        float_universe(samples, seed, tol, "random PSL2(C), Im(bc̄ - ad̄)^2 - 4Re(ac̄)Re(bd̄) <= 1"),
        start.elapsed(),
    )
}

pub fn verify_lemma32_exact(ring: RingParam, bound: u32) -> Result<CheckReport> {
    require_full(ring, "the exact quadratic identity")?;
    Ok(exact_sweep("quadratic-identity-exact", ring, bound, |g, t| {
        if let Ok(e) = check_lemma32_exact(g) {
            t.observe_max("lhs16", e.lhs16 as f64);
        }
        lemma32_exact_observation(g)
    }))
}

/// The inequality is the pass criterion; the two polynomial forms are
/// tallied in the stats (`literal_identity_*`, `corrected_identity_*`).
pub fn verify_lemma34_exact(ring: RingParam, bound: u32) -> Result<CheckReport> {
    require_full(ring, "the transpose sign relation")?;
    Ok(exact_sweep("transpose-sign-exact", ring, bound, |g, t| {
        if let Ok(Lemma34Entry { identity: Some((literal, corrected)), .. }) = check_lemma34_exact(g) {
            t.count("identity_evaluated");
            t.count(if literal { "literal_identity_equal" } else { "literal_identity_unequal" });
            t.count(if corrected { "corrected_identity_equal" } else { "corrected_identity_unequal" });
        }
        lemma34_exact_observation(g)
    }))
}

/// Three universes: the given lattice elements of `L+ u L-` (embedded),
/// conditioned samples of both shapes, and unconditioned samples where the
/// equivalence is usually vacuous.
pub fn verify_lemma23(lattice: &[ProjMat], samples: u64, seed: u64, tol: f64) -> CheckReport {
    let start = Instant::now();
    let mut head = Tally::default();
    for l in lattice {
        head.checked += 1;
        head.count("lattice");
        let (obs, bad) = lemma23_observation(&l.to_complex(), tol);
        if bad {
            head.violation(obs.into_violation(vec![l.to_string()]));
        }
    }
    let body = sweep(samples as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for i in range {
            let g = match i % 3 {
                0 => {
                    t.count("conditioned_plus");
                    conditioned_l_sample(&mut rng, 1.0)
                }
                1 => {
                    t.count("conditioned_minus");
                    conditioned_l_sample(&mut rng, -1.0)
                }
                _ => {
                    t.count("unconditioned");
                    random_psl2c(&mut rng)
                }
            };
            t.checked += 1;
            let (obs, bad) = lemma23_observation(&g, tol);
            if check_lemma23(&g, tol).vacuous() {
                t.count("vacuous");
            }
            if bad {
                t.violation(obs.into_violation(vec![format_cmat(&g)]));
            }
        }
        t
    });
    head.merge(body).into_report(
        "l-shape-equivalence",
        float_universe(
            samples,
            seed,
            tol,
            &format!(
                "{} lattice L elements, then conditioned L+/L- shapes and unconditioned PSL2(C) in rotation",
                lattice.len()
            ),
        ),
        start.elapsed(),
    )
}

pub fn verify_remark_formula(l: &ProjMat, samples: u64, seed: u64, tol: f64) -> Result<CheckReport> {
    if kernel_class(l) != KernelClass::LPlus {
        return Err(Error::Precondition(format!("{l} is not in L+")));
    }
    let start = Instant::now();
    let tally = sweep(samples as usize, CHUNK, |chunk, range| {
        let mut rng = stream_rng(seed, chunk);
        let mut t = Tally::default();
        for _ in range {
            let g = random_psl2c(&mut rng);
            t.checked += 1;
            match remark_observation(l, &g, tol) {
                Ok((obs, bad)) => {
                    if obs.0["guarded"] == false {
                        t.count("dead_zone_skipped");
                    }
                    if bad {
                        t.violation(obs.into_violation(vec![l.to_string(), format_cmat(&g)]));
                    }
                }
                Err(e) => t.violation(error_violation(vec![l.to_string(), format_cmat(&g)], &e)),
            }
        }
        t
    });
    let mut universe = float_universe(samples, seed, tol, &format!("m(l g) against row norms of random g, l = {l}"));
    universe.ring = Some(l.ring().to_string());
    Ok(tally.into_report("row-norm-formula", universe, start.elapsed()))
}
