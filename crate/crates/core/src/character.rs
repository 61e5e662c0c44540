//! Additive characters of `F_p` and residues of Laurent series.

use num_complex::Complex64;

use crate::error::Result;
use crate::fieldpoly::{mod_inv, Poly};

/// `omega^k = e^{2 pi i k / p}` for `k = 0, ..., p-1`, exact where the value is real.
pub fn roots_of_unity(p: u64) -> Vec<Complex64> {
    (0..p)
        .map(|k| {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else if 2 * k == p {
                Complex64::new(-1.0, 0.0)
            } else {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / p as f64;
                Complex64::new(theta.cos(), theta.sin())
            }
        })
        .collect()
}

/// A complex character sum whose exact value is known to be real.
///
/// `imag_residual` is the magnitude of the discarded imaginary part; callers
/// assert it is at rounding level instead of dropping it silently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterValue {
    pub value: f64,
    pub imag_residual: f64,
}

impl CharacterValue {
    pub fn from_complex(z: Complex64) -> Self {
        Self {
            value: z.re,
            imag_residual: z.im.abs(),
        }
    }
}

/// Coefficient of `x^{-1}` in the Laurent expansion of `a / f`.
pub fn residue_coefficient(a: &Poly, f: &Poly) -> Result<u64> {
    let m = f.degree().unwrap_or(0);
    let r = a.rem(f)?;
    if m == 0 {
        return Ok(0);
    }
    Ok(r.coeff(m - 1) * mod_inv(f.leading_coeff(), f.p()) % f.p())
}
