//! Cross-checks against naive reimplementations.

use std::collections::BTreeSet;

use num_complex::Complex64;

use cotlar_core::cotlar::{check_lemma32_exact, check_lemma34_exact, cotlar_residual};
use cotlar_core::psl2::{enumerate, ProjMat};
use cotlar_core::quadring::RingParam;
use cotlar_core::symbol::{kernel_class, m_exact};

/// Integer-coordinate entries `x1 + x2 sqrt(-n)` as 2x2 tuples.
type Naive = [(i64, i64); 4];

fn naive_mul(n: i64, x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    (x.0 * y.0 - n * x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

/// Every 8-tuple in `[-B, B]^8` with `ad - bc = 1`, modulo sign.
fn naive_full_box(n: i64, b: i64) -> BTreeSet<Naive> {
    let r = -b..=b;
    let elems: Vec<(i64, i64)> = r.clone().flat_map(|x| r.clone().map(move |y| (x, y))).collect();
    let mut out = BTreeSet::new();
    for &a in &elems {
        for &bb in &elems {
            for &c in &elems {
                for &d in &elems {
                    let ad = naive_mul(n, a, d);
                    let bc = naive_mul(n, bb, c);
                    if (ad.0 - bc.0, ad.1 - bc.1) != (1, 0) {
                        continue;
                    }
                    let e = [a, bb, c, d];
                    let neg = e.map(|(x, y)| (-x, -y));
                    out.insert(e.max(neg));
                }
            }
        }
    }
    out
}

fn as_naive(g: &ProjMat) -> Naive {
    let e = g.entries().map(|x| (x.u / 2, x.v / 2));
    e.max(e.map(|(x, y)| (-x, -y)))
}

#[test]
fn enumeration_matches_naive_scan() {
    for n in [1, 2, 5] {
        let ring = RingParam::full(n).unwrap();
        let fast: BTreeSet<Naive> = enumerate(ring, 2).iter().map(as_naive).collect();
        let slow = naive_full_box(n, 2);
        assert_eq!(fast.len(), enumerate(ring, 2).len(), "duplicates for n={n}");
        assert_eq!(fast, slow, "n={n}");
    }
    assert_eq!(naive_full_box(2, 2).len(), 582);
}

#[test]
fn maximal_order_box_contains_full_box() {
    let full: BTreeSet<_> = enumerate(RingParam::full(7).unwrap(), 2).iter().map(|g| g.entries()).collect();
    let max: BTreeSet<_> = enumerate(RingParam::maximal(7).unwrap(), 2).iter().map(|g| g.entries()).collect();
    assert!(full.is_subset(&max));
    assert!(max.len() > full.len());
}

fn complex_entries(g: &ProjMat) -> [Complex64; 4] {
    g.to_complex().entries()
}

fn float_m(e: [Complex64; 4]) -> i32 {
    let x = (e[0] * e[2].conj() + e[1] * e[3].conj()).re;
    if x.abs() < 1e-9 {
        0
    } else {
        x.signum() as i32
    }
}

#[test]
fn exact_symbol_matches_floats() {
    for ring in [RingParam::full(3).unwrap(), RingParam::maximal(11).unwrap()] {
        for g in enumerate(ring, 2) {
            assert_eq!(m_exact(&g), float_m(complex_entries(&g)), "{g}");
        }
    }
}

#[test]
fn quadratic_identity_by_float_expansion() {
    for n in [1i64, 2, 3, 5, 6] {
        let ring = RingParam::full(n).unwrap();
        for g in enumerate(ring, 2) {
            let [a, b, c, d] = complex_entries(&g);
            let im = (b * c.conj() - a * d.conj()).im;
            let lhs = im * im - 4.0 * (a * c.conj()).re * (b * d.conj()).re;
            let e = g.entries();
            let x = n * (e[0].v / 2) * (e[3].v / 2) + (e[1].u / 2) * (e[2].u / 2);
            let p = -4.0 * x as f64 * (1.0 + x as f64);
            assert!((lhs - p).abs() < 1e-9, "{g}: {lhs} vs {p}");
            let entry = check_lemma32_exact(&g).unwrap();
            assert_eq!(entry.lhs16 as f64, 16.0 * p);
            assert!(lhs <= 1e-9);
        }
    }
}

#[test]
fn polynomial_forms_by_float_expansion() {
    // the literal form uses Re(a d̄) and n(a1^2 + a2^2) and misses for every n
    for n in [1i64, 2, 3, 5] {
        let ring = RingParam::full(n).unwrap();
        let mut literal_mismatch = 0;
        for g in enumerate(ring, 2) {
            let Some((literal, corrected)) = check_lemma34_exact(&g).unwrap().identity else { continue };
            let [a, b, c, d] = complex_entries(&g);
            let lhs = (a * c.conj()).re * (a * b.conj()).re * (a * d.conj() + b * c.conj()).re;
            let e = g.entries().map(|z| (z.u / 2, z.v / 2));
            let x = (e[1].0 * e[2].0 + n * e[0].1 * e[3].1) as f64;
            let big_b = (n * e[0].1 * e[0].1) as f64;
            let big_a = (e[0].0 * e[0].0 + n * e[0].1 * e[0].1) as f64;
            assert!((lhs - (big_a * x + big_b) * (2.0 * x + 1.0)).abs() < 1e-9, "{g}");
            assert!(corrected);
            if !literal {
                literal_mismatch += 1;
            }
        }
        assert!(literal_mismatch > 0, "n={n}");
    }
}

#[test]
fn cotlar_residual_by_float_symbol() {
    let ring = RingParam::full(2).unwrap();
    let elements = enumerate(ring, 1);
    for g in &elements {
        for h in &elements {
            let (gc, hc) = (g.to_complex(), h.to_complex());
            let want = (float_m(gc.inverse().entries()) - float_m(hc.entries()))
                * (float_m(gc.mul(&hc).entries()) - float_m(gc.entries()));
            assert_eq!(cotlar_residual(g, h).unwrap(), want);
            if !kernel_class(g).in_k() {
                assert_eq!(want, 0, "{g} {h}");
            }
        }
    }
}
