//! Bracketed bisection on `f64`.
//!
//! Both routines keep halving until the bracket endpoints are adjacent
//! floats (or the iteration cap is hit), so the answer is as good as the
//! function evaluation allows.

pub const MAX_BISECTIONS: usize = 200;

/// Bracket `[lo, hi]` with `f(lo) < target <= f(hi)` for nondecreasing `f`.
/// Returns the shrunk bracket; the caller picks the endpoint it prefers.
pub fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> (f64, f64) {
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Root of `f` inside `[a, b]` given `f(a)` and `f(b)` of opposite sign (or
/// one of them zero). Stops once `|b - a| <= tol` or the floats are adjacent.
pub fn bisect_sign(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let fb = f(b);
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum(), "bisect_sign needs a sign change");
    for _ in 0..MAX_BISECTIONS {
        let mid = a + 0.5 * (b - a);
        if (b - a).abs() <= tol || mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    a + 0.5 * (b - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increasing_bracket_is_tight() {
        let (lo, hi) = bisect_increasing(|x| x * x, 0.0, 2.0, 2.0);
        assert!(lo * lo < 2.0 && hi * hi >= 2.0);
        assert!(hi - lo <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn sign_bisection_finds_root() {
        let r = bisect_sign(f64::cos, 0.0, 3.0, 0.0);
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(bisect_sign(|x| x - 1.0, 1.0, 2.0, 0.0), 1.0);
    }
}
