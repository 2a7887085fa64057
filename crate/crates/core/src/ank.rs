//! Explicit ANK decomposition `g = [[1/s, t/s], [0, s]] * u` on PSL2(C),
//! with `s = |r2(g)|`, `t = <r1(g), r2(g)>` and `u` unitary.
//!
//! The pairing conjugates its second argument, `<(a, b), (c, d)> =
//! a conj(c) + b conj(d)`, so `m(g) = sign(Re t)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::psl2::{upper_triangular, CMat2};

/// Rows with norm below this are rejected.
pub const MIN_ROW_NORM: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnkCoords {
    pub s: f64,
    pub t: Complex64,
    pub u: CMat2,
}

impl AnkCoords {
    pub fn reconstruct(&self) -> CMat2 {
        upper_triangular(self.s, self.t).mul(&self.u)
    }
}

/// Fixes the projective sign: the first nonzero entry (row-major) gets
/// nonnegative real part, then nonnegative imaginary part.
fn normalize_unitary(u: CMat2) -> CMat2 {
    let first = u.entries().into_iter().find(|z| *z != Complex64::new(0.0, 0.0));
    match first {
        Some(z) if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) => u.neg(),
        _ => u,
    }
}

pub fn ank_decompose(g: &CMat2) -> Result<AnkCoords> {
    let s = (g.c.norm_sqr() + g.d.norm_sqr()).sqrt();
    if s.is_nan() || s < MIN_ROW_NORM {
        return Err(Error::DegenerateRow(s));
    }
    let t = g.a * g.c.conj() + g.b * g.d.conj();
    // the unitary whose second row is r2 / s; then r2 u* = (0, s)
    let u = CMat2::new(g.d.conj() / s, -g.c.conj() / s, g.c / s, g.d / s);
    Ok(AnkCoords { s, t, u: normalize_unitary(u) })
}

/// Entrywise reconstruction error, up to the global sign.
pub fn reconstruction_error(g: &CMat2, coords: &AnkCoords) -> f64 {
    coords.reconstruct().projective_diff(g)
}

pub fn unitarity_error(u: &CMat2) -> f64 {
    u.mul(&u.adjoint()).max_abs_diff(&CMat2::identity())
}
