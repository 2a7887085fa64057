//! The symbol `m(g) = sign(Re(a conj(c) + b conj(d)))`, the shape
//! classification of its zero set, and the character on the kernel.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psl2::{enumerate, CMat2, ProjMat};
use crate::quadring::{QInt, RingParam};
use crate::report::{CheckReport, Observed, Tally, Universe};
use crate::sweep::{sweep, CHUNK};

pub fn sign(x: i128) -> i32 {
    x.signum() as i32
}

/// Exact symbol on a lattice element. Both products flip together under
/// `g -> -g`, so this is well defined on PSL2.
pub fn m_exact(g: &ProjMat) -> i32 {
    let r = g.ring();
    sign(r.re4(g.a(), g.c()) + r.re4(g.b(), g.d()))
}

/// Float symbol with a dead zone: 0 whenever `|Re<r1, r2>| <= tol`.
pub fn m_float(g: &CMat2, tol: f64) -> i32 {
    let x = g.row_pairing_re();
    if x.abs() <= tol {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelClass {
    KPlus,
    KMinus,
    LPlus,
    LMinus,
    NotKernel,
}

impl KernelClass {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelClass::KPlus => "K+",
            KernelClass::KMinus => "K-",
            KernelClass::LPlus => "L+",
            KernelClass::LMinus => "L-",
            KernelClass::NotKernel => "none",
        }
    }

    /// Member of `K_n = K_n^+ u K_n^-`.
    pub fn in_k(self) -> bool {
        matches!(self, KernelClass::KPlus | KernelClass::KMinus)
    }
}

impl fmt::Display for KernelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn shape_of(ring: RingParam, [a, b, c, d]: [QInt; 4]) -> KernelClass {
    if a.is_real() && d.is_real() && b.is_imaginary() && c.is_imaginary() {
        KernelClass::KPlus
    } else if a.is_imaginary() && d.is_imaginary() && b.is_real() && c.is_real() {
        KernelClass::KMinus
    } else if b == a.conj().neg() && d == c.conj() && ring.re4(a, c) == 2 {
        KernelClass::LPlus
    } else if b == a.conj() && d == c.conj().neg() && ring.re4(a, c) == -2 {
        KernelClass::LMinus
    } else {
        KernelClass::NotKernel
    }
}

/// Classifies `g` by entry shape alone (never by evaluating `m`):
///
/// * `K+`: `a, d` real, `b, c` in `Z sqrt(-n)`
/// * `K-`: `a, d` in `Z sqrt(-n)`, `b, c` real
/// * `L+`: `b = -conj(a)`, `d = conj(c)`, `Re(a conj(c)) = 1/2`
/// * `L-`: `b = conj(a)`, `d = -conj(c)`, `Re(a conj(c)) = -1/2`
///
/// Both sign representatives are tried. The determinant is always 1, so
/// on the `K-` shape the integer relation is `n x w + y z = -1`.
pub fn kernel_class(g: &ProjMat) -> KernelClass {
    g.representatives()
        .into_iter()
        .map(|e| shape_of(g.ring(), e))
        .find(|&c| c != KernelClass::NotKernel)
        .unwrap_or(KernelClass::NotKernel)
}

/// The character on `K_n`: +1 on `K+`, -1 on `K-`.
pub fn chi(g: &ProjMat) -> Result<i32> {
    match kernel_class(g) {
        KernelClass::KPlus => Ok(1),
        KernelClass::KMinus => Ok(-1),
        other => Err(Error::Precondition(format!("chi is only defined on K_n, got class {other}"))),
    }
}

/// Evaluates everything the kernel decomposition asserts about `g` and
/// whether any of it fails.
pub fn decomposition_observation(g: &ProjMat) -> (Observed, bool) {
    let r = g.ring();
    let m = m_exact(g);
    let class = kernel_class(g);
    let ac = r.re4(g.a(), g.c());
    let bd = r.re4(g.b(), g.d());
    let mut reasons = Vec::new();

    if (m == 0) != (class != KernelClass::NotKernel) {
        reasons.push("zero set differs from shape classification");
    }
    if r.is_full() && matches!(class, KernelClass::LPlus | KernelClass::LMinus) {
        reasons.push("L shape in the full ring");
    }
    // column products: both vanish, or (maximal order) they are +-1/2 and cancel
    let columns_explain_zero = (ac == 0 && bd == 0) || (!r.is_full() && ac == -bd && ac.abs() == 2);
    if (m == 0) != columns_explain_zero {
        reasons.push("m = 0 not explained by column products");
    }
    if ac == 0 && bd == 0 && !class.in_k() {
        reasons.push("vanishing column products without K shape");
    }

    let obs = Observed::new()
        .with("m", m)
        .with("class", class.as_str())
        .with("re4_ac", ac as i64)
        .with("re4_bd", bd as i64)
        .with("reasons", reasons.clone());
    (obs, !reasons.is_empty())
}

/// For every element of the `B`-box of `PSL2(ring)`: `m(g) = 0` exactly
/// when the shape classifier puts `g` in `K+ u K- u L+ u L-`, together with
/// the column-product characterization of the zero set.
///
/// For the maximal order with `n = 3` the decomposition is known to fail
/// (the order has extra units); the exceptions are reported as violations.
pub fn verify_theorem_b(ring: RingParam, bound: u32) -> CheckReport {
    let start = Instant::now();
    let elements = enumerate(ring, bound);
    let tally = sweep(elements.len(), CHUNK, |_, range| {
        let mut t = Tally::default();
        for g in &elements[range] {
            t.checked += 1;
            let class = kernel_class(g);
            t.count(match class {
                KernelClass::KPlus => "class_k_plus",
                KernelClass::KMinus => "class_k_minus",
                KernelClass::LPlus => "class_l_plus",
                KernelClass::LMinus => "class_l_minus",
                KernelClass::NotKernel => "class_none",
            });
            if m_exact(g) == 0 {
                t.count("m_zero");
            }
            let (obs, bad) = decomposition_observation(g);
            if bad {
                t.violation(obs.into_violation(vec![g.to_string()]));
            }
        }
        t
    });
    let applies = ring.is_full() || ring.n() != 3;
    let mut report = tally.into_report(
        "kernel-decomposition",
        Universe {
            description: format!(
                "all of PSL2({ring}) with half-coordinates in [-{b2}, {b2}]{}",
                if applies { "" } else { "; decomposition not expected to hold for n = 3" },
                b2 = 2 * bound
            ),
            ring: Some(ring.to_string()),
            bound: Some(bound),
            ..Default::default()
        },
        start.elapsed(),
    );
    report.stats.insert("decomposition_expected".into(), applies.into());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psl2::CMat2;
    use crate::quadring::RingParam;

    fn full(n: i64) -> RingParam {
        RingParam::full(n).unwrap()
    }

    #[test]
    fn symbol_examples() {
        let r = full(2);
        assert_eq!(m_exact(&ProjMat::identity(r)), 0);
        assert_eq!(m_exact(&ProjMat::translation(r, QInt::ONE).unwrap()), 1);
        assert_eq!(m_exact(&ProjMat::omega(r)), 0);
        assert_eq!(m_float(&CMat2::identity(), 1e-9), 0);
        assert_eq!(m_float(&CMat2::real(2.0, 0.0, 0.0, 0.5), 1e-9), 0);
        assert_eq!(m_float(&CMat2::real(1.0, 1.0, 0.0, 1.0), 1e-9), 1);
    }

    #[test]
    fn class_examples() {
        let r = full(5);
        assert_eq!(kernel_class(&ProjMat::identity(r)), KernelClass::KPlus);
        assert_eq!(kernel_class(&ProjMat::omega(r)), KernelClass::KMinus);
        let r7 = RingParam::maximal(7).unwrap();
        let l = ProjMat::from_half(r7, [(1, 1), (-1, 1), (2, 0), (2, 0)]).unwrap();
        assert_eq!(kernel_class(&l), KernelClass::LPlus);
        assert_eq!(m_exact(&l), 0);
        assert_eq!(kernel_class(&ProjMat::translation(r, QInt::ONE).unwrap()), KernelClass::NotKernel);
    }

    #[test]
    fn k_minus_relation_is_det_one() {
        let r = full(2);
        let s = r.sqrt_neg();
        // [[sqrt(-2), 1], [-3, sqrt(-2)]]: det = -2 + 3 = 1, n x w + y z = 2 - 3 = -1
        let g = ProjMat::new(r, [s, QInt::ONE, r.integer(-3).unwrap(), s]).unwrap();
        assert_eq!(kernel_class(&g), KernelClass::KMinus);
        assert_eq!(m_exact(&g), 0);
    }

    #[test]
    fn chi_values() {
        let r = full(3);
        let w = ProjMat::omega(r);
        assert_eq!(chi(&ProjMat::identity(r)), Ok(1));
        assert_eq!(chi(&w), Ok(-1));
        assert_eq!(chi(&w.mul(&w).unwrap()), Ok(1));
        assert!(chi(&ProjMat::translation(r, QInt::ONE).unwrap()).is_err());
    }

    #[test]
    fn omega_flips_the_symbol() {
        let r = full(2);
        let w = ProjMat::omega(r);
        for g in enumerate(r, 2) {
            assert_eq!(m_exact(&w.mul(&g).unwrap()), -m_exact(&g));
        }
    }

    #[test]
    fn decomposition_small_runs() {
        let rep = verify_theorem_b(full(2), 2);
        assert!(rep.passed(), "{:?}", rep.violations.first());
        assert_eq!(rep.stats.get("class_l_plus"), None);
        let rep = verify_theorem_b(RingParam::maximal(7).unwrap(), 2);
        assert!(rep.passed(), "{:?}", rep.violations.first());
        assert!(rep.stats["class_l_plus"].as_u64().unwrap() > 0);
        assert!(rep.stats["class_l_minus"].as_u64().unwrap() > 0);
    }

    #[test]
    fn order_three_exception() {
        let r3 = RingParam::maximal(3).unwrap();
        // u3 = diag(xi, conj(xi)), xi = (-1 + sqrt(-3))/2
        let u3 = ProjMat::from_half(r3, [(-1, 1), (0, 0), (0, 0), (-1, -1)]).unwrap();
        assert_eq!(m_exact(&u3), 0);
        assert_eq!(kernel_class(&u3), KernelClass::NotKernel);
        let rep = verify_theorem_b(r3, 2);
        assert!(!rep.passed());
        assert!(rep.violations.iter().any(|v| v.inputs[0] == u3.to_string()));
        assert_eq!(rep.stats["decomposition_expected"], false);
    }
}
