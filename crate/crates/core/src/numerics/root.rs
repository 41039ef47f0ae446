//! Bracketed root finding: Illinois-modified regula falsi with a bisection
//! safeguard whenever the bracket fails to halve.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_ITER: usize = 500;

/// An interval with function values of opposite sign at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Evaluates `g` at both ends and checks the sign change.
    pub fn new<F: FnMut(f64) -> f64>(lo: f64, hi: f64, mut g: F) -> Result<Self> {
        Self::from_values(lo, hi, g(lo), g(hi))
    }

    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Domain {
                what: "bracket width",
                value: hi - lo,
            });
        }
        let straddles = (f_lo <= 0.0 && f_hi >= 0.0) || (f_lo >= 0.0 && f_hi <= 0.0);
        if !straddles || f_lo.is_nan() || f_hi.is_nan() {
            return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }
}

/// Locates a root of `g` inside `bracket`.
///
/// Returns the midpoint of the final bracket once its width is at most `tol`,
/// or a point where `g` vanishes exactly.
pub fn find_root<F: FnMut(f64) -> f64>(mut g: F, bracket: Bracket, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            what: "root tolerance",
            value: tol,
        });
    }
    let Bracket {
        lo: mut a,
        hi: mut b,
        f_lo: mut fa,
        f_hi: mut fb,
    } = bracket;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    // -1: last update moved `a`, +1: moved `b`.
    let mut last_side = 0i8;
    let mut bisect_next = false;
    for _ in 0..MAX_ITER {
        let width = b - a;
        if width <= tol {
            break;
        }
        let mut x = if bisect_next {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = g(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::Domain {
                what: "root function value",
                value: x,
            });
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
            if last_side == -1 {
                fb *= 0.5;
            }
            last_side = -1;
        } else {
            b = x;
            fb = fx;
            if last_side == 1 {
                fa *= 0.5;
            }
            last_side = 1;
        }
        bisect_next = !bisect_next && (b - a) > 0.5 * width;
    }
    Ok(0.5 * (a + b))
}
