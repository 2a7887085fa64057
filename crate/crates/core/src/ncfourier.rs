//! Finitely supported elements of the group algebra of a lattice:
//! convolution, adjoint, trace, even moments `tau((x* x)^k)` and the
//! multiplier `T_m`.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::time::Instant;

use num_complex::{Complex, Complex64};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psl2::{enumerate, random_word, standard_generators, ProjMat};
use crate::quadring::RingParam;
use crate::report::{CheckReport, Observed, Tally, Universe};
use crate::rng::stream_rng;
use crate::symbol::m_exact;
use crate::text::{format_complex, parse_complex, parse_matrix};

/// Largest moment order accepted by [`moment`].
pub const MAX_K: u32 = 64;

pub const DEFAULT_SUPPORT_BUDGET: usize = 100_000;

/// Left factor terms per convolution work item.
const CONVOLVE_CHUNK: usize = 64;

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Coefficient field of the algebra.
pub trait Coefficient: Copy + PartialEq + Debug + Send + Sync {
    type Acc: Default + Send;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    fn conj(self) -> Self;
    fn from_int(k: i32) -> Self;
    /// `|x|^2` as a coefficient.
    fn norm_sqr(self) -> Self;
    fn to_complex(self) -> Complex64;
    fn accumulate(acc: &mut Self::Acc, x: Self);
    fn merge(acc: &mut Self::Acc, other: Self::Acc);
    fn finish(acc: Self::Acc) -> Self;
}

impl Coefficient for Complex64 {
    type Acc = (Neumaier, Neumaier);

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn from_int(k: i32) -> Self {
        Complex64::new(k as f64, 0.0)
    }
    fn norm_sqr(self) -> Self {
        Complex64::new(Complex::norm_sqr(&self), 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn accumulate(acc: &mut Self::Acc, x: Self) {
        acc.0.add(x.re);
        acc.1.add(x.im);
    }
    fn merge(acc: &mut Self::Acc, other: Self::Acc) {
        acc.0.merge(other.0);
        acc.1.merge(other.1);
    }
    fn finish(acc: Self::Acc) -> Self {
        Complex64::new(acc.0.value(), acc.1.value())
    }
}

/// Exact Gaussian-integer coefficients, for small identities.
impl Coefficient for Complex<i128> {
    type Acc = Complex<i128>;

    fn zero() -> Self {
        Complex::new(0, 0)
    }
    fn one() -> Self {
        Complex::new(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn from_int(k: i32) -> Self {
        Complex::new(k as i128, 0)
    }
    fn norm_sqr(self) -> Self {
        Complex::new(self.re * self.re + self.im * self.im, 0)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
    fn accumulate(acc: &mut Self::Acc, x: Self) {
        *acc += x;
    }
    fn merge(acc: &mut Self::Acc, other: Self::Acc) {
        *acc += other;
    }
    fn finish(acc: Self::Acc) -> Self {
        acc
    }
}

/// `sum x_g lambda_g` with finitely many nonzero `x_g`.
#[derive(Clone, PartialEq)]
pub struct AlgElem<C: Coefficient = Complex64> {
    ring: RingParam,
    terms: BTreeMap<ProjMat, C>,
}

impl<C: Coefficient> Debug for AlgElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(g, c)| (g.to_string(), c))).finish()
    }
}

impl<C: Coefficient> AlgElem<C> {
    pub fn zero(ring: RingParam) -> Self {
        AlgElem { ring, terms: BTreeMap::new() }
    }

    pub fn delta(g: ProjMat) -> Self {
        Self::monomial(g, C::one())
    }

    pub fn monomial(g: ProjMat, c: C) -> Self {
        let mut x = Self::zero(g.ring());
        if !c.is_zero() {
            x.terms.insert(g, c);
        }
        x
    }

    /// Sums repeated group elements and drops zero coefficients.
    pub fn from_terms(ring: RingParam, terms: impl IntoIterator<Item = (ProjMat, C)>) -> Result<Self> {
        let mut map: BTreeMap<ProjMat, C> = BTreeMap::new();
        for (g, c) in terms {
            if g.ring() != ring {
                return Err(Error::MixedRings { left: ring.to_string(), right: g.ring().to_string() });
            }
            let slot = map.entry(g).or_insert_with(C::zero);
            *slot = slot.add(c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(AlgElem { ring, terms: map })
    }

    pub fn ring(&self) -> RingParam {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<ProjMat, C> {
        &self.terms
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &ProjMat) -> C {
        self.terms.get(g).copied().unwrap_or_else(C::zero)
    }

    pub fn scale(&self, c: C) -> Self {
        let terms = self.terms.iter().map(|(g, x)| (*g, x.mul(c))).filter(|(_, x)| !x.is_zero()).collect();
        AlgElem { ring: self.ring, terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Self::from_terms(self.ring, self.terms.iter().chain(&other.terms).map(|(g, c)| (*g, *c)))
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::MixedRings { left: self.ring.to_string(), right: other.ring.to_string() })
        }
    }

    /// [`Self::convolve_with_budget`] with [`DEFAULT_SUPPORT_BUDGET`].
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.convolve_with_budget(other, DEFAULT_SUPPORT_BUDGET)
    }

    /// `(xy)_g = sum_h x_h y_{h^-1 g}`. Work is split over the left support
    /// in fixed chunks whose partial sums are merged in order, so the result
    /// does not depend on the thread count. Fails if the product support
    /// exceeds `budget`.
    pub fn convolve_with_budget(&self, other: &Self, budget: usize) -> Result<Self> {
        self.same_ring(other)?;
        let left: Vec<(&ProjMat, &C)> = self.terms.iter().collect();
        let parts: Vec<BTreeMap<ProjMat, C::Acc>> = left
            .par_chunks(CONVOLVE_CHUNK)
            .map(|chunk| -> Result<BTreeMap<ProjMat, C::Acc>> {
                let mut acc: BTreeMap<ProjMat, C::Acc> = BTreeMap::new();
                for (g, x) in chunk {
                    for (h, y) in &other.terms {
                        C::accumulate(acc.entry(g.mul(h)?).or_default(), x.mul(*y));
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut total: BTreeMap<ProjMat, C::Acc> = BTreeMap::new();
        for part in parts {
            for (g, a) in part {
                C::merge(total.entry(g).or_default(), a);
            }
            if total.len() > budget {
                return Err(Error::SupportBudget { size: total.len(), budget });
            }
        }
        let terms: BTreeMap<ProjMat, C> =
            total.into_iter().map(|(g, a)| (g, C::finish(a))).filter(|(_, c)| !c.is_zero()).collect();
        Ok(AlgElem { ring: self.ring, terms })
    }

    /// `(x*)_g = conj(x_{g^-1})`.
    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(g, c)| (g.inverse(), c.conj())).collect();
        AlgElem { ring: self.ring, terms }
    }

    /// Coefficient at the identity.
    pub fn trace(&self) -> C {
        self.coeff(&ProjMat::identity(self.ring))
    }

    /// `sum |x_g|^2 = tau(x* x)`.
    pub fn l2_sqr(&self) -> C {
        let mut acc = C::Acc::default();
        for c in self.terms.values() {
            C::accumulate(&mut acc, c.norm_sqr());
        }
        C::finish(acc)
    }

    /// `T_m x = sum m(g) x_g lambda_g`.
    pub fn apply_multiplier(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(g, c)| {
                let m = m_exact(g);
                (m != 0).then(|| (*g, c.mul(C::from_int(m))))
            })
            .collect();
        AlgElem { ring: self.ring, terms }
    }
}

/// `tau((x* x)^k)` as `sum |v_g|^2` with `v = (x* x)^j` for `k = 2j` and
/// `v = x (x* x)^j` for `k = 2j + 1`.
pub fn moment<C: Coefficient>(x: &AlgElem<C>, k: u32, budget: usize) -> Result<C> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::Precondition(format!("k must lie in 1..={MAX_K}")));
    }
    let xsx = x.adjoint().convolve_with_budget(x, budget)?;
    let mut v = if k % 2 == 1 { x.clone() } else { AlgElem::delta(ProjMat::identity(x.ring())) };
    for _ in 0..k / 2 {
        v = v.convolve_with_budget(&xsx, budget)?;
    }
    Ok(v.l2_sqr())
}

/// `tau((x* x)^k)` by forming the full power; a cross-check of [`moment`].
pub fn moment_direct<C: Coefficient>(x: &AlgElem<C>, k: u32, budget: usize) -> Result<C> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::Precondition(format!("k must lie in 1..={MAX_K}")));
    }
    let xsx = x.adjoint().convolve_with_budget(x, budget)?;
    let mut p = xsx.clone();
    for _ in 1..k {
        p = p.convolve_with_budget(&xsx, budget)?;
    }
    Ok(p.trace())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormProfile {
    pub k: u32,
    /// `exact_moment^(1/2k)`
    pub value: f64,
    pub exact_moment: f64,
}

pub fn norm2k(x: &AlgElem, k: u32) -> Result<NormProfile> {
    norm2k_with_budget(x, k, DEFAULT_SUPPORT_BUDGET)
}

pub fn norm2k_with_budget(x: &AlgElem, k: u32, budget: usize) -> Result<NormProfile> {
    let m = moment(x, k, budget)?.re;
    Ok(NormProfile { k, value: m.powf(1.0 / (2.0 * k as f64)), exact_moment: m })
}

/// `|trace((T_m x)* y) - trace(x* T_m y)|`.
pub fn self_adjointness_gap(x: &AlgElem, y: &AlgElem) -> Result<f64> {
    let lhs = x.apply_multiplier().adjoint().convolve(y)?.trace();
    let rhs = x.adjoint().convolve(&y.apply_multiplier())?.trace();
    Ok((lhs - rhs).norm())
}

/// `|trace(xy) - trace(yx)|`.
pub fn trace_commutator_gap(x: &AlgElem, y: &AlgElem) -> Result<f64> {
    Ok((x.convolve(y)?.trace() - y.convolve(x)?.trace()).norm())
}

/// `1 + log2(1 + sqrt 2)`
pub fn beta() -> f64 {
    1.0 + (1.0 + 2f64.sqrt()).log2()
}

/// `(p^2 / (p - 1))^beta`
pub fn theory_bound(p: f64) -> f64 {
    (p * p / (p - 1.0)).powf(beta())
}

/// Random element with `support` distinct group elements, half from the
/// `B = 2` box and half random words of length `1..=8`, with standard
/// complex normal coefficients.
pub fn random_element<R: Rng + ?Sized>(
    ring: RingParam,
    box_elements: &[ProjMat],
    support: usize,
    rng: &mut R,
) -> Result<AlgElem> {
    let gens = standard_generators(ring);
    let mut terms = BTreeMap::new();
    let mut attempts = 0;
    while terms.len() < support {
        attempts += 1;
        if attempts > 100 * support + 100 {
            return Err(Error::Precondition(format!("could not draw {support} distinct group elements")));
        }
        let g = if terms.len() % 2 == 0 && !box_elements.is_empty() {
            box_elements[rng.random_range(0..box_elements.len())]
        } else {
            let len = rng.random_range(1..=8);
            random_word(&gens, len, rng)?
        };
        let c = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        terms.entry(g).or_insert(c);
    }
    AlgElem::from_terms(ring, terms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub k: u32,
    pub p: f64,
    pub theory_bound: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// `max_ratio / theory_bound`, reported only.
    pub c_report: f64,
    pub evaluated: u64,
}

/// Ratios `||T_m x||_2k / ||x||_2k` over random elements. The only asserted
/// bound is the `L_2` contraction at `k = 1` (relative slack `1e-12`).
pub fn norm_ratio_experiment(
    ring: RingParam,
    ks: &[u32],
    trials: u64,
    support: usize,
    seed: u64,
) -> Result<(Vec<NormRow>, CheckReport)> {
    if ks.contains(&0) {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let start = Instant::now();
    let pool = enumerate(ring, 2);
    let per_trial: Vec<(Vec<Option<f64>>, Tally)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut t = Tally::default();
            let mut rng = stream_rng(seed, trial);
            let x = match random_element(ring, &pool, support, &mut rng) {
                Ok(x) => x,
                Err(e) => {
                    t.checked += 1;
                    t.violation(Observed::new().with("error", e.to_string()).into_violation(vec![]));
                    return (vec![None; ks.len()], t);
                }
            };
            let tx = x.apply_multiplier();
            let ratios = ks
                .iter()
                .map(|&k| {
                    t.checked += 1;
                    let r = norm2k(&tx, k).and_then(|a| Ok(a.value / norm2k(&x, k)?.value));
                    match r {
                        Ok(r) => {
                            if k == 1 && r > 1.0 + 1e-12 {
                                t.violation(
                                    Observed::new()
                                        .with("k", k)
                                        .with("ratio", r)
                                        .into_violation(vec![format_alg_elem(&x)]),
                                );
                            }
                            Some(r)
                        }
                        Err(Error::SupportBudget { .. }) => {
                            t.count("budget_exceeded");
                            None
                        }
                        Err(e) => {
                            t.violation(Observed::new().with("error", e.to_string()).into_violation(vec![]));
                            None
                        }
                    }
                })
                .collect();
            (ratios, t)
        })
        .collect();

    let mut rows = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let ratios: Vec<f64> = per_trial.iter().filter_map(|(r, _)| r[i]).collect();
        let p = 2.0 * k as f64;
        let bound = theory_bound(p);
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let mean_ratio = if ratios.is_empty() { 0.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 };
        rows.push(NormRow {
            k,
            p,
            theory_bound: bound,
            max_ratio,
            mean_ratio,
            c_report: max_ratio / bound,
            evaluated: ratios.len() as u64,
        });
    }
    let tally = per_trial.into_iter().fold(Tally::default(), |acc, (_, t)| acc.merge(t));
    let mut report = tally.into_report(
        "norm-experiment",
        Universe {
            description: format!(
                "{trials} random elements of the group algebra of PSL2({ring}) with support {support}, k in {ks:?}"
            ),
            ring: Some(ring.to_string()),
            bound: Some(2),
            samples: Some(trials),
            seed: Some(seed),
            tol: Some(1e-12),
        },
        start.elapsed(),
    );
    report.stats.insert("beta".into(), beta().into());
    report.stats.insert("table".into(), serde_json::to_value(&rows).expect("plain data"));
    Ok((rows, report))
}

/// One line per term, `<re>,<im> : <matrix>`, in key order.
pub fn format_alg_elem(x: &AlgElem) -> String {
    let mut out = String::new();
    for (g, c) in x.terms() {
        out.push_str(&format_complex(*c));
        out.push_str(" : ");
        out.push_str(&g.to_string());
        out.push('\n');
    }
    out
}

/// Parses [`format_alg_elem`] output. Blank lines are ignored; at least
/// one term is required (it fixes the ring), terms must share a ring and
/// must not repeat. Zero coefficients are dropped.
pub fn parse_alg_elem(s: &str) -> Result<AlgElem> {
    let mut ring = None;
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::new();
    for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (coeff, matrix) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("expected `<coeff> : <matrix>`, found {line:?}")))?;
        let c = parse_complex(coeff.trim())?;
        let g = parse_matrix(matrix.trim())?;
        match ring {
            None => ring = Some(g.ring()),
            Some(r) if r != g.ring() => {
                return Err(Error::MixedRings { left: r.to_string(), right: g.ring().to_string() });
            }
            _ => {}
        }
        if !seen.insert(g) {
            return Err(Error::parse(format!("repeated term {g}")));
        }
        terms.push((g, c));
    }
    let ring = ring.ok_or_else(|| Error::parse("no terms"))?;
    AlgElem::from_terms(ring, terms)
}
