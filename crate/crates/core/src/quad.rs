//! Adaptive Simpson quadrature over finite intervals and the whole real line.
//!
//! The real-line variant substitutes x = t/(1-t^2), mapping (-1, 1) onto
//! (-inf, inf); it assumes the integrand decays at infinity, which holds for
//! every moment integrand in this crate (density times a polynomial that the
//! density tail dominates).

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return Err(Error::Numeric(format!(
            "integrand not finite near [{lm:.6e}, {rm:.6e}]"
        )));
    }
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "quadrature failed to converge on [{a:.6e}, {b:.6e}] (residual {:.3e})",
            err.abs()
        )));
    }
    let l = refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive: {tol}")));
    }
    // Seed the recursion on a few panels so a symmetric integrand cannot fool
    // the first error estimate into accepting a spurious zero.
    let panels = 8;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let pa = a + k as f64 * h;
        let pb = pa + h;
        let pm = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        if !fa.is_finite() || !fm.is_finite() || !fb.is_finite() {
            return Err(Error::Numeric(format!(
                "integrand not finite on [{pa:.6e}, {pb:.6e}]"
            )));
        }
        let whole = simpson(fa, fm, fb, pb - pa);
        total += refine(&f, pa, pb, fa, fm, fb, whole, tol / panels as f64, MAX_DEPTH)?;
    }
    Ok(total)
}

/// Integrates `f` over the whole real line to absolute tolerance `tol`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    let g = move |t: f64| {
        let u = 1.0 - t * t;
        if u <= 0.0 {
            return 0.0; // the integrand is required to vanish at infinity
        }
        let x = t / u;
        let v = f(x) * (1.0 + t * t) / (u * u);
        // Underflow at the far tails multiplies a zero density by a large
        // Jacobian; flush the resulting non-finite noise to zero only if the
        // density itself vanished.
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_interval(g, -1.0, 1.0, tol)
}
