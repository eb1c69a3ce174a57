//! Bracketed Newton iteration for monotone scalar equations.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: h(lo) = {h_lo:e}, h(hi) = {h_hi:e}")]
    NoSignChange { lo: f64, hi: f64, h_lo: f64, h_hi: f64 },
    #[error("root finder did not converge in {iterations} iterations (last residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("residual evaluated to a non-finite value at {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Accept `x` once `|h(x)| ≤ tolerance`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a root of `h` in `[lo, hi]`.
///
/// A Newton step from the current iterate is taken only when it lands
/// strictly inside the bracket and shrinks `|h|`; otherwise the bracket is
/// bisected. Returns early when the bracket has collapsed to adjacent floats,
/// since no representable point does better.
pub fn safeguarded_newton<H, D>(
    h: H,
    dh: D,
    lo: f64,
    hi: f64,
    options: RootOptions,
) -> Result<Root, RootError>
where
    H: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut ha = h(a);
    let mut hb = h(b);
    if !ha.is_finite() {
        return Err(RootError::NonFinite { at: a });
    }
    if !hb.is_finite() {
        return Err(RootError::NonFinite { at: b });
    }
    if ha == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0 });
    }
    if hb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0 });
    }
    if ha.signum() == hb.signum() {
        return Err(RootError::NoSignChange { lo: a, hi: b, h_lo: ha, h_hi: hb });
    }

    // Start from whichever end is closer to zero.
    let (mut x, mut hx) = if ha.abs() < hb.abs() { (a, ha) } else { (b, hb) };
    for iteration in 1..=options.max_iterations {
        if hx.abs() <= options.tolerance {
            return Ok(Root { x, residual: hx, iterations: iteration - 1 });
        }

        let slope = dh(x);
        let newton = if slope.is_finite() && slope != 0.0 { x - hx / slope } else { f64::NAN };
        let mut candidate = None;
        if newton > a && newton < b {
            let hn = h(newton);
            if !hn.is_finite() {
                return Err(RootError::NonFinite { at: newton });
            }
            if hn.abs() < hx.abs() {
                candidate = Some((newton, hn));
            }
        }
        let (next, hnext) = match candidate {
            Some(c) => c,
            None => {
                let mid = a + 0.5 * (b - a);
                if mid <= a || mid >= b {
                    // Bracket is two adjacent floats.
                    let best = if ha.abs() <= hb.abs() { (a, ha) } else { (b, hb) };
                    return Ok(Root { x: best.0, residual: best.1, iterations: iteration });
                }
                let hm = h(mid);
                if !hm.is_finite() {
                    return Err(RootError::NonFinite { at: mid });
                }
                (mid, hm)
            }
        };

        if hnext == 0.0 {
            return Ok(Root { x: next, residual: 0.0, iterations: iteration });
        }
        if hnext.signum() == ha.signum() {
            a = next;
            ha = hnext;
        } else {
            b = next;
            hb = hnext;
        }
        x = next;
        hx = hnext;
    }
    if hx.abs() <= options.tolerance {
        return Ok(Root { x, residual: hx, iterations: options.max_iterations });
    }
    Err(RootError::NotConverged { iterations: options.max_iterations, residual: hx })
}
