//! One-dimensional maximization: coarse grid, then golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`, stopping
/// when the bracket is narrower than `tol`.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Evaluates `f` on a grid of spacing `step` over `[lo, hi]` and refines around
/// the best grid point, within one step on each side.
pub fn grid_then_golden(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
) -> (f64, f64) {
    let n = ((hi - lo) / step).ceil() as usize;
    let (best, _) = (0..=n)
        .map(|i| (lo + i as f64 * step).min(hi))
        .map(|x| (x, f(x)))
        .fold((lo, f64::NEG_INFINITY), |acc, (x, v)| {
            if v > acc.1 {
                (x, v)
            } else {
                acc
            }
        });
    golden_section_max(&f, (best - step).max(lo), (best + step).min(hi), tol)
}
