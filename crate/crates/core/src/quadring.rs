//! Exact arithmetic in `Z[sqrt(-n)]` and in the maximal order
//! `O_{-n} = Z[(1 + sqrt(-n))/2]` (for square-free `n = 3 mod 4`).
//!
//! Both rings share one representation: an element is stored in
//! half-coordinates `(u, v)` meaning `(u + v*sqrt(-n)) / 2` with
//! `u = v (mod 2)`. Elements of the full ring `Z[sqrt(-n)]` have both
//! coordinates even.
//!
//! Real and imaginary parts of products are returned scaled by 4 so that
//! every lemma check stays in the integers.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest magnitude allowed for a half-coordinate.
///
/// Keeps every product formed by `re4`/`im_coeff4` inside `i128` without
/// per-call overflow checks.
pub const MAX_COORD: i64 = 1 << 40;

/// Largest supported ring parameter.
pub const MAX_N: i64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    /// `Z[sqrt(-n)]`
    Full,
    /// `Z[(1 + sqrt(-n))/2]`
    #[serde(rename = "max")]
    MaximalOrder,
}

impl RingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RingKind::Full => "full",
            RingKind::MaximalOrder => "max",
        }
    }
}

impl std::str::FromStr for RingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(RingKind::Full),
            "max" => Ok(RingKind::MaximalOrder),
            other => Err(Error::parse(format!("unknown ring kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingParam {
    n: i64,
    kind: RingKind,
}

pub fn is_square_free(n: i64) -> bool {
    if n < 1 {
        return false;
    }
    let mut p = 2i64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl RingParam {
    pub fn new(n: i64, kind: RingKind) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidRing(format!("n must be >= 1, got {n}")));
        }
        if n > MAX_N {
            return Err(Error::InvalidRing(format!("n = {n} exceeds {MAX_N}")));
        }
        if kind == RingKind::MaximalOrder && (n % 4 != 3 || !is_square_free(n)) {
            return Err(Error::InvalidRing(format!(
                "the maximal order Z[(1+sqrt(-n))/2] needs square-free n = 3 mod 4, got n = {n}"
            )));
        }
        Ok(RingParam { n, kind })
    }

    pub fn full(n: i64) -> Result<Self> {
        Self::new(n, RingKind::Full)
    }

    pub fn maximal(n: i64) -> Result<Self> {
        Self::new(n, RingKind::MaximalOrder)
    }

    pub fn n(self) -> i64 {
        self.n
    }

    pub fn kind(self) -> RingKind {
        self.kind
    }

    pub fn is_full(self) -> bool {
        self.kind == RingKind::Full
    }

    /// Builds `(u + v*sqrt(-n))/2`, rejecting pairs outside the ring.
    pub fn elem(self, u: i64, v: i64) -> Result<QInt> {
        let x = QInt { u, v };
        if self.contains(x) {
            Ok(x)
        } else if u.abs() > MAX_COORD || v.abs() > MAX_COORD {
            Err(Error::Overflow)
        } else {
            Err(Error::Parity { u, v, ring: self.to_string() })
        }
    }

    /// Builds `x1 + x2*sqrt(-n)` from integer coordinates.
    pub fn from_parts(self, x1: i64, x2: i64) -> Result<QInt> {
        let u = x1.checked_mul(2).ok_or(Error::Overflow)?;
        let v = x2.checked_mul(2).ok_or(Error::Overflow)?;
        self.elem(u, v)
    }

    pub fn contains(self, x: QInt) -> bool {
        if x.u.abs() > MAX_COORD || x.v.abs() > MAX_COORD {
            return false;
        }
        match self.kind {
            RingKind::Full => x.u % 2 == 0 && x.v % 2 == 0,
            RingKind::MaximalOrder => (x.u - x.v) % 2 == 0,
        }
    }

    pub fn integer(self, k: i64) -> Result<QInt> {
        self.from_parts(k, 0)
    }

    /// `sqrt(-n)`
    pub fn sqrt_neg(self) -> QInt {
        QInt { u: 0, v: 2 }
    }

    /// The additive generator beyond 1: `sqrt(-n)` for the full ring and
    /// `(1 + sqrt(-n))/2` for the maximal order.
    pub fn integral_generator(self) -> QInt {
        match self.kind {
            RingKind::Full => QInt { u: 0, v: 2 },
            RingKind::MaximalOrder => QInt { u: 1, v: 1 },
        }
    }

    pub fn mul(self, x: QInt, y: QInt) -> Result<QInt> {
        let (u1, v1, u2, v2) = (x.u as i128, x.v as i128, y.u as i128, y.v as i128);
        let n = self.n as i128;
        let u = u1 * u2 - n * v1 * v2;
        let v = u1 * v2 + u2 * v1;
        debug_assert!(u % 2 == 0 && v % 2 == 0, "parity invariant broken");
        QInt::bounded(u / 2, v / 2)
    }

    /// Norm `x * conj(x)`, an ordinary integer for both ring kinds.
    pub fn norm(self, x: QInt) -> i128 {
        self.re4(x, x) / 4
    }

    /// `4 * Re(x * conj(y)) = u1*u2 + n*v1*v2`.
    pub fn re4(self, x: QInt, y: QInt) -> i128 {
        x.u as i128 * y.u as i128 + self.n as i128 * x.v as i128 * y.v as i128
    }

    /// The integer `t` with `Im(x * conj(y)) = t * sqrt(n) / 4`.
    pub fn im_coeff4(self, x: QInt, y: QInt) -> i128 {
        y.u as i128 * x.v as i128 - x.u as i128 * y.v as i128
    }

    /// Exact quotient `x / a` when it exists in the ring.
    pub fn div_exact(self, x: QInt, a: QInt) -> Option<QInt> {
        if a.is_zero() {
            return None;
        }
        let norm = self.norm(a);
        let (u1, v1, u2, v2) = (x.u as i128, x.v as i128, a.u as i128, -(a.v as i128));
        let n = self.n as i128;
        // half-coordinates of x * conj(a), doubled
        let uu = u1 * u2 - n * v1 * v2;
        let vv = u1 * v2 + u2 * v1;
        let den = 2 * norm;
        if uu % den != 0 || vv % den != 0 {
            return None;
        }
        let q = QInt::bounded(uu / den, vv / den).ok()?;
        self.contains(q).then_some(q)
    }

    pub fn is_unit(self, x: QInt) -> bool {
        self.norm(x) == 1
    }

    pub fn to_complex(self, x: QInt) -> Complex64 {
        Complex64::new(x.u as f64 / 2.0, x.v as f64 * (self.n as f64).sqrt() / 2.0)
    }
}

impl fmt::Display for RingParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RingKind::Full => write!(f, "Z[sqrt(-{})]", self.n),
            RingKind::MaximalOrder => write!(f, "Z[(1+sqrt(-{}))/2]", self.n),
        }
    }
}

/// An element `(u + v*sqrt(-n))/2`; the ring is supplied by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QInt {
    pub u: i64,
    pub v: i64,
}

impl QInt {
    pub const ZERO: QInt = QInt { u: 0, v: 0 };
    pub const ONE: QInt = QInt { u: 2, v: 0 };

    fn bounded(u: i128, v: i128) -> Result<QInt> {
        let limit = MAX_COORD as i128;
        if u.abs() > limit || v.abs() > limit {
            return Err(Error::Overflow);
        }
        Ok(QInt { u: u as i64, v: v as i64 })
    }

    pub fn add(self, y: QInt) -> Result<QInt> {
        Self::bounded(self.u as i128 + y.u as i128, self.v as i128 + y.v as i128)
    }

    pub fn sub(self, y: QInt) -> Result<QInt> {
        Self::bounded(self.u as i128 - y.u as i128, self.v as i128 - y.v as i128)
    }

    pub fn neg(self) -> QInt {
        QInt { u: -self.u, v: -self.v }
    }

    pub fn conj(self) -> QInt {
        QInt { u: self.u, v: -self.v }
    }

    pub fn is_zero(self) -> bool {
        self.u == 0 && self.v == 0
    }

    pub fn is_real(self) -> bool {
        self.v == 0
    }

    pub fn is_imaginary(self) -> bool {
        self.u == 0
    }
}

impl fmt::Display for QInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.u, self.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(u: i64, v: i64) -> QInt {
        QInt { u, v }
    }

    #[test]
    fn ring_param_validation() {
        assert!(RingParam::full(0).is_err());
        assert!(RingParam::full(4).is_ok());
        assert!(RingParam::maximal(7).is_ok());
        assert!(RingParam::maximal(3).is_ok());
        assert!(RingParam::maximal(5).is_err());
        // 27 = 3 mod 4 but not square-free
        assert!(RingParam::maximal(27).is_err());
    }

    #[test]
    fn parity_is_enforced() {
        let full = RingParam::full(2).unwrap();
        let max = RingParam::maximal(7).unwrap();
        assert!(full.elem(1, 1).is_err());
        assert!(max.elem(1, 1).is_ok());
        assert!(max.elem(1, 0).is_err());
    }

    #[test]
    fn addition_examples() {
        assert_eq!(q(2, 0).add(q(0, 0)).unwrap(), q(2, 0));
        assert_eq!(q(2, 2).add(q(2, -2)).unwrap(), q(4, 0));
        // (1+sqrt(-7))/2 + (1-sqrt(-7))/2 = 1
        assert_eq!(q(1, 1).add(q(1, -1)).unwrap(), QInt::ONE);
    }

    #[test]
    fn multiplication_examples() {
        let r2 = RingParam::full(2).unwrap();
        assert_eq!(r2.mul(q(2, 2), q(2, -2)).unwrap(), q(6, 0));
        assert_eq!(r2.mul(QInt::ONE, q(4, -6)).unwrap(), q(4, -6));
        let r7 = RingParam::maximal(7).unwrap();
        // ((1+sqrt(-7))/2)^2 = (1 + 2 sqrt(-7) - 7)/4 = (-3 + sqrt(-7))/2
        assert_eq!(r7.mul(q(1, 1), q(1, 1)).unwrap(), q(-3, 1));
    }

    #[test]
    fn re4_and_im_coeff4_examples() {
        let r2 = RingParam::full(2).unwrap();
        let r7 = RingParam::maximal(7).unwrap();
        assert_eq!(r2.re4(QInt::ONE, QInt::ONE), 4);
        assert_eq!(r7.re4(q(1, 1), QInt::ONE), 2);
        assert_eq!(r2.im_coeff4(QInt::ONE, QInt::ONE), 0);
        // Im((1 + sqrt(-2)) * 1) = sqrt(2) = 4 * sqrt(2) / 4
        assert_eq!(r2.im_coeff4(q(2, 2), QInt::ONE), 4);
    }

    #[test]
    fn overflow_is_reported() {
        let r = RingParam::full(5).unwrap();
        let big = r.elem(MAX_COORD & !1, 0).unwrap();
        assert_eq!(r.mul(big, big), Err(Error::Overflow));
        assert_eq!(big.add(big), Err(Error::Overflow));
    }

    #[test]
    fn full_ring_units_are_plus_minus_one() {
        for n in 2..=12 {
            let r = RingParam::full(n).unwrap();
            for x1 in -10..=10 {
                for x2 in -10..=10 {
                    let x = r.from_parts(x1, x2).unwrap();
                    if r.is_unit(x) {
                        assert!(x == QInt::ONE || x == QInt::ONE.neg(), "n={n}: unit {x}");
                    }
                }
            }
        }
        // Z[i] also has +-i
        let r1 = RingParam::full(1).unwrap();
        assert!(r1.is_unit(r1.sqrt_neg()));
    }

    #[test]
    fn exact_division() {
        let r = RingParam::maximal(7).unwrap();
        let a = q(1, 1);
        let b = q(3, -1);
        let p = r.mul(a, b).unwrap();
        assert_eq!(r.div_exact(p, a), Some(b));
        assert_eq!(r.div_exact(QInt::ONE, q(4, 0)), None);
        assert_eq!(r.div_exact(QInt::ONE, QInt::ZERO), None);
    }

    fn max_elem() -> impl Strategy<Value = QInt> {
        (-1000i64..1000, -1000i64..1000).prop_map(|(u, v)| QInt { u, v: if (u - v) % 2 == 0 { v } else { v + 1 } })
    }

    fn full_elem() -> impl Strategy<Value = QInt> {
        (-500i64..500, -500i64..500).prop_map(|(a, b)| QInt { u: 2 * a, v: 2 * b })
    }

    proptest! {
        #[test]
        fn parity_closure(x in max_elem(), y in max_elem(), n in prop::sample::select(vec![3i64, 7, 11, 15, 19, 23])) {
            let r = RingParam::maximal(n).unwrap();
            prop_assert!(r.contains(x.add(y).unwrap()));
            prop_assert!(r.contains(x.sub(y).unwrap()));
            prop_assert!(r.contains(r.mul(x, y).unwrap()));
        }

        #[test]
        fn conj_is_an_involution_and_norms_are_real(x in max_elem()) {
            let r = RingParam::maximal(7).unwrap();
            prop_assert_eq!(x.conj().conj(), x);
            prop_assert_eq!(r.mul(x, x.conj()).unwrap().v, 0);
        }

        #[test]
        fn re4_symmetric_im_coeff4_antisymmetric(x in full_elem(), y in full_elem(), n in 1i64..20) {
            let r = RingParam::full(n).unwrap();
            prop_assert_eq!(r.re4(x, y), r.re4(y, x));
            prop_assert_eq!(r.im_coeff4(x, y), -r.im_coeff4(y, x));
        }

        #[test]
        fn scaled_real_part_matches_floats(x in full_elem(), y in full_elem(), n in 1i64..20) {
            let r = RingParam::full(n).unwrap();
            let exact = r.re4(x, y) as f64;
            let prod = r.to_complex(x) * r.to_complex(y).conj();
            let float = 4.0 * prod.re;
            let scale = exact.abs().max(1.0);
            prop_assert!(((exact * exact) - float * float).abs() <= 1e-9 * scale * scale);
            let im = r.im_coeff4(x, y) as f64 * (n as f64).sqrt() / 4.0;
            prop_assert!((im - prod.im).abs() <= 1e-9 * prod.norm().max(1.0));
        }

        #[test]
        fn multiplication_matches_floats(x in max_elem(), y in max_elem()) {
            let r = RingParam::maximal(11).unwrap();
            let exact = r.to_complex(r.mul(x, y).unwrap());
            let float = r.to_complex(x) * r.to_complex(y);
            prop_assert!((exact - float).norm() <= 1e-9 * float.norm().max(1.0));
        }
    }
}
