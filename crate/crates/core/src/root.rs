//! Bracketed scalar root finding.

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs
/// (or one of them is zero).
///
/// Stops once the bracket is narrower than `tol` or after `max_iter` halvings
/// and returns the midpoint of the final bracket. Exact zeros at a probe are
/// returned immediately.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `count` points spaced geometrically from `lo` to `hi` inclusive.
pub(crate) fn geometric_grid(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let ratio = libm::log(hi / lo);
    let last = (count - 1) as f64;
    (0..count).map(move |i| {
        if i + 1 == count {
            hi
        } else {
            lo * libm::exp(ratio * i as f64 / last)
        }
    })
}
