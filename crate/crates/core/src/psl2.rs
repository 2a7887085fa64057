//! Projective 2x2 matrices over the quadratic rings and over complex floats.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadring::{QInt, RingParam};
use crate::rng::stream_rng;

/// A determinant-one matrix `[[a, b], [c, d]]` over a quadratic ring, stored
/// as the canonical representative of its class in PSL2: the first nonzero
/// value among `(a.u, a.v, b.u, b.v, c.u, c.v, d.u, d.v)` is positive.
///
/// Field order matters: the derived `Ord` is the lexicographic order on
/// half-coordinates used by [`enumerate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjMat {
    ring: RingParam,
    a: QInt,
    b: QInt,
    c: QInt,
    d: QInt,
}

pub fn determinant(ring: RingParam, [a, b, c, d]: [QInt; 4]) -> Result<QInt> {
    ring.mul(a, d)?.sub(ring.mul(b, c)?)
}

fn canonical_sign(entries: [QInt; 4]) -> [QInt; 4] {
    let first = entries.iter().flat_map(|x| [x.u, x.v]).find(|&c| c != 0).unwrap_or(0);
    if first < 0 {
        entries.map(QInt::neg)
    } else {
        entries
    }
}

impl ProjMat {
    /// Validates ring membership and `det = 1`, then canonicalizes the sign.
    pub fn new(ring: RingParam, entries: [QInt; 4]) -> Result<Self> {
        for x in entries {
            ring.elem(x.u, x.v)?;
        }
        let det = determinant(ring, entries)?;
        if det != QInt::ONE {
            return Err(Error::Determinant(format!("{det}")));
        }
        Ok(Self::from_canonical_parts(ring, canonical_sign(entries)))
    }

    /// From half-coordinate pairs `(u, v)` in row-major order.
    pub fn from_half(ring: RingParam, entries: [(i64, i64); 4]) -> Result<Self> {
        let e = [
            ring.elem(entries[0].0, entries[0].1)?,
            ring.elem(entries[1].0, entries[1].1)?,
            ring.elem(entries[2].0, entries[2].1)?,
            ring.elem(entries[3].0, entries[3].1)?,
        ];
        Self::new(ring, e)
    }

    /// From integer coordinates `x1 + x2*sqrt(-n)` in row-major order.
    pub fn from_parts(ring: RingParam, entries: [(i64, i64); 4]) -> Result<Self> {
        Self::from_half(ring, entries.map(|(x1, x2)| (2 * x1, 2 * x2)))
    }

    fn from_canonical_parts(ring: RingParam, [a, b, c, d]: [QInt; 4]) -> Self {
        ProjMat { ring, a, b, c, d }
    }

    /// Entries assumed to have det 1 already (products of group elements).
    fn from_unimodular(ring: RingParam, entries: [QInt; 4]) -> Self {
        debug_assert_eq!(determinant(ring, entries), Ok(QInt::ONE));
        Self::from_canonical_parts(ring, canonical_sign(entries))
    }

    pub fn identity(ring: RingParam) -> Self {
        Self::from_canonical_parts(ring, [QInt::ONE, QInt::ZERO, QInt::ZERO, QInt::ONE])
    }

    /// `[[0, -1], [1, 0]]`; its square is the identity in PSL2.
    pub fn omega(ring: RingParam) -> Self {
        Self::from_unimodular(ring, [QInt::ZERO, QInt::ONE.neg(), QInt::ONE, QInt::ZERO])
    }

    /// `[[1, x], [0, 1]]`
    pub fn translation(ring: RingParam, x: QInt) -> Result<Self> {
        Self::new(ring, [QInt::ONE, x, QInt::ZERO, QInt::ONE])
    }

    pub fn ring(&self) -> RingParam {
        self.ring
    }

    pub fn a(&self) -> QInt {
        self.a
    }

    pub fn b(&self) -> QInt {
        self.b
    }

    pub fn c(&self) -> QInt {
        self.c
    }

    pub fn d(&self) -> QInt {
        self.d
    }

    pub fn entries(&self) -> [QInt; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// The two sign representatives of the class, canonical one first.
    pub fn representatives(&self) -> [[QInt; 4]; 2] {
        let e = self.entries();
        [e, e.map(QInt::neg)]
    }

    fn same_ring(&self, other: &ProjMat) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::MixedRings { left: self.ring.to_string(), right: other.ring.to_string() });
        }
        Ok(())
    }

    pub fn mul(&self, other: &ProjMat) -> Result<ProjMat> {
        self.same_ring(other)?;
        let r = self.ring;
        let a = r.mul(self.a, other.a)?.add(r.mul(self.b, other.c)?)?;
        let b = r.mul(self.a, other.b)?.add(r.mul(self.b, other.d)?)?;
        let c = r.mul(self.c, other.a)?.add(r.mul(self.d, other.c)?)?;
        let d = r.mul(self.c, other.b)?.add(r.mul(self.d, other.d)?)?;
        Ok(Self::from_unimodular(r, [a, b, c, d]))
    }

    /// Adjugate `[[d, -b], [-c, a]]`.
    pub fn inverse(&self) -> ProjMat {
        Self::from_unimodular(self.ring, [self.d, self.b.neg(), self.c.neg(), self.a])
    }

    pub fn transpose(&self) -> ProjMat {
        Self::from_unimodular(self.ring, [self.a, self.c, self.b, self.d])
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.ring)
    }

    pub fn to_complex(&self) -> CMat2 {
        let r = self.ring;
        CMat2::new(r.to_complex(self.a), r.to_complex(self.b), r.to_complex(self.c), r.to_complex(self.d))
    }
}

impl fmt::Display for ProjMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::format_matrix(self))
    }
}

/// Every projective class whose eight half-coordinates lie in `[-2B, 2B]`,
/// once each, sorted by half-coordinates.
///
/// Scans `(a, b, c)` over the box and solves `d = (1 + bc)/a` exactly; the
/// `a = 0` slice is scanned over all `d`. Work is split by the value of `a`.
pub fn enumerate(ring: RingParam, bound: u32) -> Vec<ProjMat> {
    let entries = box_elements(ring, bound);
    let limit = 2 * bound as i64;
    let in_box = |x: QInt| x.u.abs() <= limit && x.v.abs() <= limit;
    let mut out: Vec<ProjMat> = entries
        .par_iter()
        .flat_map_iter(|&a| {
            let mut found = Vec::new();
            for &b in &entries {
                for &c in &entries {
                    // entries are tiny, ring products cannot overflow here
                    let bc = ring.mul(b, c).expect("box entries are small");
                    let candidates: Vec<QInt> = if a.is_zero() {
                        if bc != QInt::ONE.neg() {
                            continue;
                        }
                        entries.clone()
                    } else {
                        let rhs = QInt::ONE.add(bc).expect("small");
                        match ring.div_exact(rhs, a) {
                            Some(d) if in_box(d) => vec![d],
                            _ => continue,
                        }
                    };
                    for d in candidates {
                        let e = [a, b, c, d];
                        if canonical_sign(e) == e {
                            found.push(ProjMat::from_canonical_parts(ring, e));
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.par_sort_unstable();
    out
}

/// Ring elements with both half-coordinates in `[-2B, 2B]`, sorted.
pub fn box_elements(ring: RingParam, bound: u32) -> Vec<QInt> {
    let limit = 2 * bound as i64;
    let mut out = Vec::new();
    for u in -limit..=limit {
        for v in -limit..=limit {
            let x = QInt { u, v };
            if ring.contains(x) {
                out.push(x);
            }
        }
    }
    out
}

/// A small generating set: `omega`, the translations by 1 and by the
/// ring's integral generator, and (for `n = 1`) `diag(i, -i)`.
pub fn standard_generators(ring: RingParam) -> Vec<ProjMat> {
    let mut gens = vec![
        ProjMat::omega(ring),
        ProjMat::translation(ring, QInt::ONE).expect("unimodular"),
        ProjMat::translation(ring, ring.integral_generator()).expect("unimodular"),
    ];
    if ring.is_full() && ring.n() == 1 {
        let i = ring.sqrt_neg();
        gens.push(ProjMat::new(ring, [i, QInt::ZERO, QInt::ZERO, i.neg()]).expect("unimodular"));
    }
    gens
}

/// Product of `len` uniform picks from `gens`, each inverted with
/// probability 1/2.
pub fn random_word<R: Rng + ?Sized>(gens: &[ProjMat], len: usize, rng: &mut R) -> Result<ProjMat> {
    let first = gens.first().ok_or_else(|| Error::Precondition("empty generator list".into()))?;
    let ring = first.ring();
    if let Some(g) = gens.iter().find(|g| g.ring() != ring) {
        return Err(Error::MixedRings { left: ring.to_string(), right: g.ring().to_string() });
    }
    let mut acc = ProjMat::identity(ring);
    for _ in 0..len {
        let g = gens[rng.random_range(0..gens.len())];
        let g = if rng.random_bool(0.5) { g.inverse() } else { g };
        acc = acc.mul(&g)?;
    }
    Ok(acc)
}

pub fn random_word_seeded(gens: &[ProjMat], len: usize, seed: u64) -> Result<ProjMat> {
    random_word(gens, len, &mut stream_rng(seed, 0))
}

/// A complex 2x2 matrix, modelling an element of PSL2(C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

pub const DET_TOL: f64 = 1e-9;

impl CMat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        CMat2 { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn omega() -> Self {
        Self::real(0.0, -1.0, 1.0, 0.0)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.det() - 1.0).norm() <= tol
    }

    pub fn mul(&self, o: &CMat2) -> CMat2 {
        CMat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Adjugate; the inverse for determinant-one matrices.
    pub fn inverse(&self) -> CMat2 {
        CMat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn transpose(&self) -> CMat2 {
        CMat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn adjoint(&self) -> CMat2 {
        CMat2::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn neg(&self) -> CMat2 {
        CMat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn max_abs_diff(&self, o: &CMat2) -> f64 {
        self.entries().iter().zip(o.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Distance in PSL2: the smaller of the distances to `o` and `-o`.
    pub fn projective_diff(&self, o: &CMat2) -> f64 {
        self.max_abs_diff(o).min(self.max_abs_diff(&o.neg()))
    }

    pub fn row_norms(&self) -> (f64, f64) {
        ((self.a.norm_sqr() + self.b.norm_sqr()).sqrt(), (self.c.norm_sqr() + self.d.norm_sqr()).sqrt())
    }

    /// `Re<r1, r2> = Re(a conj(c) + b conj(d))`.
    pub fn row_pairing_re(&self) -> f64 {
        (self.a * self.c.conj() + self.b * self.d.conj()).re
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random element of SU(2) from a normalized Gaussian quaternion.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let alpha = Complex64::new(q[0], q[1]) / norm;
        let beta = Complex64::new(q[2], q[3]) / norm;
        return CMat2::new(alpha, -beta.conj(), beta, alpha.conj());
    }
}

/// `[[1/s, t/s], [0, s]]`
pub fn upper_triangular(s: f64, t: Complex64) -> CMat2 {
    CMat2::new((1.0 / s).into(), t / s, 0.0.into(), s.into())
}

/// Random element of PSL2(C) built as `A * u` with `s` log-normal,
/// `t` complex Gaussian and `u` Haar in SU(2).
pub fn random_psl2c<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    let z: f64 = StandardNormal.sample(rng);
    let s = (0.5 * z).exp();
    let t = complex_normal(rng);
    let u = random_su2(rng);
    upper_triangular(s, t).mul(&u)
}

pub fn random_psl2c_seeded(seed: u64) -> CMat2 {
    random_psl2c(&mut stream_rng(seed, 0))
}
