//! Golden-section search on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[a, b]` until the bracket is narrower than `width`.
/// Returns the best point seen, endpoints included; ties keep the smaller
/// abscissa.
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, width: f64) -> (f64, f64) {
    let mut best = (a, f(a));
    let consider = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx > best.1 || (fx == best.1 && x < best.0) {
            *best = (x, fx);
        }
    };
    let fb = f(b);
    consider(b, fb, &mut best);

    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);
    while hi - lo > width {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            consider(x1, f1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            consider(x2, f2, &mut best);
        }
    }
    best
}

/// Minimizes `f` on `[a, b]`; see [`golden_max`].
pub fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, width: f64) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), a, b, width);
    (x, -v)
}
