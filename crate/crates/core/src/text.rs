//! Line-oriented text formats.
//!
//! Exact matrices:
//! `n=<n>;kind=<full|max>;a=<u>/<v>;b=<u>/<v>;c=<u>/<v>;d=<u>/<v>`
//! in half-coordinates. Complex matrices:
//! `a=<re>,<im>;b=<re>,<im>;c=<re>,<im>;d=<re>,<im>` with round-trip
//! float formatting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::psl2::{CMat2, ProjMat, DET_TOL};
use crate::quadring::{QInt, RingKind, RingParam};

const ENTRY_KEYS: [&str; 4] = ["a", "b", "c", "d"];

pub fn format_matrix(g: &ProjMat) -> String {
    let r = g.ring();
    let [a, b, c, d] = g.entries();
    format!(
        "n={};kind={};a={}/{};b={}/{};c={}/{};d={}/{}",
        r.n(),
        r.kind().as_str(),
        a.u,
        a.v,
        b.u,
        b.v,
        c.u,
        c.v,
        d.u,
        d.v
    )
}

fn field<'a>(part: &'a str, key: &str) -> Result<&'a str> {
    match part.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        _ => Err(Error::parse(format!("expected `{key}=...`, found {part:?}"))),
    }
}

fn int(s: &str) -> Result<i64> {
    s.parse().map_err(|_| Error::parse(format!("bad integer {s:?}")))
}

fn float(s: &str) -> Result<f64> {
    let x: f64 = s.parse().map_err(|_| Error::parse(format!("bad number {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::parse(format!("non-finite number {s:?}")));
    }
    Ok(x)
}

/// Parses the exact matrix format; rejects parity violations and `det != 1`.
pub fn parse_matrix(s: &str) -> Result<ProjMat> {
    let parts: Vec<&str> = s.trim().split(';').collect();
    if parts.len() != 6 {
        return Err(Error::parse(format!("expected 6 `;`-separated fields, found {}", parts.len())));
    }
    let n = int(field(parts[0], "n")?)?;
    let kind: RingKind = field(parts[1], "kind")?.parse()?;
    let ring = RingParam::new(n, kind)?;
    let mut entries = [QInt::ZERO; 4];
    for (slot, (part, key)) in entries.iter_mut().zip(parts[2..].iter().zip(ENTRY_KEYS)) {
        let value = field(part, key)?;
        let (u, v) =
            value.split_once('/').ok_or_else(|| Error::parse(format!("expected `<u>/<v>`, found {value:?}")))?;
        *slot = ring.elem(int(u)?, int(v)?)?;
    }
    ProjMat::new(ring, entries)
}

pub(crate) fn format_complex(z: Complex64) -> String {
    format!("{:?},{:?}", z.re, z.im)
}

pub(crate) fn parse_complex(s: &str) -> Result<Complex64> {
    let (re, im) = s.split_once(',').ok_or_else(|| Error::parse(format!("expected `<re>,<im>`, found {s:?}")))?;
    Ok(Complex64::new(float(re)?, float(im)?))
}

pub fn format_cmat(g: &CMat2) -> String {
    let e = g.entries();
    format!(
        "a={};b={};c={};d={}",
        format_complex(e[0]),
        format_complex(e[1]),
        format_complex(e[2]),
        format_complex(e[3])
    )
}

/// Parses the complex matrix format; rejects `|det - 1| > 1e-9`.
pub fn parse_cmat(s: &str) -> Result<CMat2> {
    let parts: Vec<&str> = s.trim().split(';').collect();
    if parts.len() != 4 {
        return Err(Error::parse(format!("expected 4 `;`-separated fields, found {}", parts.len())));
    }
    let mut e = [Complex64::new(0.0, 0.0); 4];
    for (slot, (part, key)) in e.iter_mut().zip(parts.iter().zip(ENTRY_KEYS)) {
        *slot = parse_complex(field(part, key)?)?;
    }
    let g = CMat2::new(e[0], e[1], e[2], e[3]);
    if !g.is_unimodular(DET_TOL) {
        return Err(Error::Determinant(format!("{}", g.det())));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psl2::{random_psl2c, random_word, standard_generators};
    use crate::rng::stream_rng;
    use proptest::prelude::*;

    #[test]
    fn matrix_format_is_exact() {
        let ring = RingParam::maximal(7).unwrap();
        let l = ProjMat::from_half(ring, [(1, 1), (-1, 1), (2, 0), (2, 0)]).unwrap();
        let s = format_matrix(&l);
        assert_eq!(s, "n=7;kind=max;a=1/1;b=-1/1;c=2/0;d=2/0");
        assert_eq!(parse_matrix(&s).unwrap(), l);
    }

    #[test]
    fn matrix_parser_rejections() {
        // parity: odd coordinates in the full ring
        assert!(matches!(parse_matrix("n=2;kind=full;a=1/1;b=0/0;c=0/0;d=2/0"), Err(Error::Parity { .. })));
        // det = 2
        assert!(matches!(parse_matrix("n=2;kind=full;a=2/0;b=0/0;c=0/0;d=4/0"), Err(Error::Determinant(_))));
        // maximal order with n = 1 mod 4
        assert!(matches!(parse_matrix("n=5;kind=max;a=2/0;b=0/0;c=0/0;d=2/0"), Err(Error::InvalidRing(_))));
        assert!(parse_matrix("n=2;kind=full;a=2/0;b=0/0;c=0/0").is_err());
        assert!(parse_matrix("n=2;kind=full;b=0/0;a=2/0;c=0/0;d=2/0").is_err());
        assert!(parse_matrix("n=2;kind=half;a=2/0;b=0/0;c=0/0;d=2/0").is_err());
        assert!(parse_matrix("").is_err());
    }

    #[test]
    fn negated_input_parses_to_canonical() {
        let g = parse_matrix("n=2;kind=full;a=-2/0;b=0/0;c=0/0;d=-2/0").unwrap();
        assert!(g.is_identity());
    }

    #[test]
    fn cmat_parser_rejections() {
        assert!(parse_cmat("a=1,0;b=0,0;c=0,0;d=2,0").is_err());
        assert!(parse_cmat("a=NaN,0;b=0,0;c=0,0;d=1,0").is_err());
        assert!(parse_cmat("a=1,0;b=0,0;c=0,0").is_err());
        assert_eq!(parse_cmat("a=1,0;b=0,0;c=0,0;d=1,0").unwrap(), CMat2::identity());
    }

    proptest! {
        #[test]
        fn exact_round_trip(seed in 0u64..2000, n in prop::sample::select(vec![(1, false), (2, false), (7, true), (11, true)])) {
            let ring = if n.1 { RingParam::maximal(n.0) } else { RingParam::full(n.0) }.unwrap();
            let mut rng = stream_rng(seed, 0);
            let g = random_word(&standard_generators(ring), 6, &mut rng).unwrap();
            prop_assert_eq!(parse_matrix(&format_matrix(&g)).unwrap(), g);
        }

        #[test]
        fn float_round_trip_is_bit_exact(seed in 0u64..2000) {
            let g = random_psl2c(&mut stream_rng(seed, 0));
            prop_assert_eq!(parse_cmat(&format_cmat(&g)).unwrap(), g);
        }
    }
}
