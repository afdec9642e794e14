//! Small quadrature toolkit: composite Simpson (optionally split at known
//! kinks) and adaptive Simpson for reference values.

/// Composite Simpson on `[a, b]` with `panels` subintervals (rounded up to
/// an even count, at least 2).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let x = a + i as f64 * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b))
}

/// Composite Simpson of uniformly spaced samples. An odd number of
/// intervals is closed with Simpson's 3/8 rule on the last three.
pub fn simpson_samples(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * dx * (values[0] + values[1]),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, 0.0)
            } else {
                let k = n - 4;
                (
                    k,
                    3.0 * dx / 8.0
                        * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]),
                )
            };
            let mut acc = values[0] + values[simpson_end];
            for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            acc * dx / 3.0 + tail
        }
    }
}

/// Composite Simpson with spacing at most `dx`, restarted at every breakpoint
/// inside `(a, b)`. Segment endpoints are sampled a hair inside the segment so
/// that one-sided limits are used at jumps.
pub fn simpson_piecewise<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    dx: f64,
) -> f64 {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + y.abs()));

    cuts.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let len = hi - lo;
            if len <= 0.0 {
                return 0.0;
            }
            let panels = ((len / dx) - 1e-9).ceil().max(2.0) as usize;
            let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
            let g = |x: f64| {
                if x <= lo {
                    f(lo + eps)
                } else if x >= hi {
                    f(hi - eps)
                } else {
                    f(x)
                }
            };
            simpson(g, lo, hi, panels)
        })
        .sum()
}

/// Adaptive Simpson with Richardson correction, to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 2);
        assert!((v - 3.75).abs() < 1e-13);
    }

    #[test]
    fn samples_odd_and_even_counts() {
        for n in [3usize, 4, 5, 10, 11] {
            let dx = 1.0 / (n - 1) as f64;
            let values: Vec<f64> = (0..n).map(|i| (i as f64 * dx).powi(3)).collect();
            assert!(
                (simpson_samples(&values, dx) - 0.25).abs() < 1e-13,
                "n = {n}"
            );
        }
    }

    #[test]
    fn piecewise_handles_jump() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { x * x };
        let v = simpson_piecewise(f, 0.0, 1.0, &[0.3], 0.01);
        let exact = 0.3 + (1.0 - 0.027) / 3.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_reference() {
        let v = adaptive_simpson(|x| x.sin().powi(4), 0.0, PI, 1e-14);
        assert!((v - 3.0 * PI / 8.0).abs() < 1e-12);
    }
}
