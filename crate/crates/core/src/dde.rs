//! Method-of-steps integration of the delayed equation of motion
//!
//! ```text
//! β'(t) = -(iΩ + Nγ/2) β(t) - γ Σ_{l=1}^{N-1} (N - l) β(t - l) Θ(t - l)
//! ```
//!
//! starting from `β(0) = 1` with zero history. The step `h = 1/M` divides
//! every delay, so the delayed terms needed by classical RK4 (at `t`,
//! `t + h/2` and `t + h`) fall on a grid of spacing `h/2`. Full-step values
//! come from RK4; the in-between values are filled by the cubic Hermite
//! dense output of the same step, which is accurate to `O(h⁴)` and keeps the
//! scheme globally fourth order.
//!
//! The stepper works on the envelope `b(t) = β(t) e^{iΩt}`, for which the
//! equation reads `b' = -(Nγ/2) b - γ Σ (N - l) e^{iΩl} b(t - l) Θ(t - l)`.
//! Without the fast phase, RK4 does not damp the `e^{-iΩt}` rotation
//! artificially when `Ωh` is not small. Stored samples are `β`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::GiantAtomParams;

pub const DEFAULT_STEPS_PER_TAU: usize = 256;
pub const MIN_STEPS_PER_TAU: usize = 16;

/// Sampled atomic amplitude `β(t)` on a half-step grid `t_j = j·h/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrace {
    steps_per_tau: usize,
    omega_tau: f64,
    t_max: f64,
    samples: Vec<Complex64>,
}

impl AmplitudeTrace {
    /// Integration step `h = τ/M`.
    pub fn dt(&self) -> f64 {
        1.0 / self.steps_per_tau as f64
    }

    /// Spacing of the stored samples, `h/2`.
    pub fn sample_spacing(&self) -> f64 {
        0.5 * self.dt()
    }

    pub fn steps_per_tau(&self) -> usize {
        self.steps_per_tau
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// All stored samples; `samples()[j]` is `β(j·h/2)`.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_time(&self, j: usize) -> f64 {
        j as f64 * self.sample_spacing()
    }

    /// `(t_k, β(t_k))` at the full integration steps `t_k = k·h`, up to `t_max`.
    pub fn full_steps(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        let h = self.dt();
        let t_max = self.t_max;
        self.samples
            .iter()
            .step_by(2)
            .enumerate()
            .map(move |(k, &b)| (k as f64 * h, b))
            .take_while(move |&(t, _)| t <= t_max + 1e-12)
    }

    /// Dense output, see [`beta_at`].
    pub fn beta_at(&self, t: f64) -> Result<Complex64> {
        beta_at(self, t)
    }
}

/// Integrates from the bare excited state, `β(0) = 1`.
pub fn integrate_beta(
    params: &GiantAtomParams,
    t_max: f64,
    steps_per_tau: usize,
) -> Result<AmplitudeTrace> {
    integrate_beta_from(params, t_max, steps_per_tau, Complex64::new(1.0, 0.0))
}

/// Integrates with an arbitrary initial amplitude and zero history.
pub fn integrate_beta_from(
    params: &GiantAtomParams,
    t_max: f64,
    steps_per_tau: usize,
    beta0: Complex64,
) -> Result<AmplitudeTrace> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::validation(
            "t_max",
            format!("must be finite and > 0, got {t_max}"),
        ));
    }
    if steps_per_tau < MIN_STEPS_PER_TAU {
        return Err(Error::validation(
            "steps_per_tau",
            format!("must be >= {MIN_STEPS_PER_TAU}, got {steps_per_tau}"),
        ));
    }

    let m = steps_per_tau;
    let h = 1.0 / m as f64;
    let n_steps = (t_max * m as f64 - 1e-9).ceil().max(1.0) as usize;
    let n_legs = params.n_legs();
    let gamma = params.gamma_tau();
    let omega = params.omega_tau();
    let local = Complex64::new(-0.5 * params.n() * gamma, 0.0);
    let weights: Vec<Complex64> = (1..n_legs)
        .map(|l| Complex64::from_polar((n_legs - l) as f64 * gamma, omega * l as f64))
        .collect();
    // half-step index offset of the delay l·τ
    let lag = |l: usize| 2 * l * m;

    let mut env = Vec::with_capacity(2 * n_steps + 1);
    env.push(beta0);

    // Σ_l γ(N - l) e^{iΩl} b(t_j - l) over the delays already switched on for
    // the step starting at full index k: the delay l is active iff k·h >= l.
    let delayed = |env: &[Complex64], j: usize, k: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, w) in weights.iter().enumerate() {
            let l = i + 1;
            if k < l * m {
                break;
            }
            acc += env[j - lag(l)] * w;
        }
        acc
    };
    let rhs = |y: Complex64, hist: Complex64| local * y - hist;

    for k in 0..n_steps {
        let j = 2 * k;
        let y0 = env[j];
        let d0 = delayed(&env, j, k);
        let dm = delayed(&env, j + 1, k);
        let d1 = delayed(&env, j + 2, k);

        let k1 = rhs(y0, d0);
        let k2 = rhs(y0 + k1 * (0.5 * h), dm);
        let k3 = rhs(y0 + k2 * (0.5 * h), dm);
        let k4 = rhs(y0 + k3 * h, d1);
        let y1 = y0 + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        let f1 = rhs(y1, d1);
        let mid = (y0 + y1) * 0.5 + (k1 - f1) * (h / 8.0);

        if !(y1.re.is_finite() && y1.im.is_finite() && mid.re.is_finite() && mid.im.is_finite()) {
            return Err(Error::Divergence {
                t: (k + 1) as f64 * h,
            });
        }
        env.push(mid);
        env.push(y1);
    }

    let half = 0.5 * h;
    let samples = env
        .into_iter()
        .enumerate()
        .map(|(j, b)| b * phase(-omega * (j as f64 * half)))
        .collect();

    Ok(AmplitudeTrace {
        steps_per_tau: m,
        omega_tau: omega,
        t_max,
        samples,
    })
}

/// `β(t)` for any `0 <= t <= t_max`.
///
/// Four-point Lagrange interpolation of the envelope `β e^{iΩt}` on the
/// half-step samples. The stencil
/// never straddles an integer multiple of `τ`, where the derivatives of `β`
/// jump. Returns the stored sample bit-for-bit when `t` is on the grid.
pub fn beta_at(trace: &AmplitudeTrace, t: f64) -> Result<Complex64> {
    let t_max = trace.t_max;
    if !(t >= 0.0 && t <= t_max + 1e-12 * t_max.max(1.0)) {
        return Err(Error::OutOfRange {
            t,
            min: 0.0,
            max: t_max,
        });
    }
    let samples = &trace.samples;
    let last = samples.len() - 1;
    let per_tau = 2 * trace.steps_per_tau;
    let u = t * per_tau as f64;
    let i = (u.floor() as usize).min(last);
    let frac = u - i as f64;
    if frac == 0.0 {
        return Ok(samples[i]);
    }
    let i = i.min(last - 1);

    let seg = i / per_tau;
    let seg_lo = seg * per_tau;
    let seg_hi = ((seg + 1) * per_tau).min(last);
    let start = if seg_hi - seg_lo >= 3 {
        (i.saturating_sub(1)).clamp(seg_lo, seg_hi - 3)
    } else {
        i.saturating_sub(1).min(last.saturating_sub(3))
    };

    let x = u - start as f64;
    let half = trace.sample_spacing();
    let omega = trace.omega_tau;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (x - b as f64) / (a as f64 - b as f64);
            }
        }
        let ta = (start + a) as f64 * half;
        acc += samples[start + a] * phase(omega * ta) * w;
    }
    Ok(acc * phase(-omega * t))
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darkstates::dark_condition_omega_tau;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn single_dark() -> GiantAtomParams {
        let g = TAU * 0.018;
        GiantAtomParams::new(3, g, dark_condition_omega_tau(3, 1, g).unwrap()).unwrap()
    }

    fn max_diff(coarse: &AmplitudeTrace, fine: &AmplitudeTrace) -> f64 {
        // every coarse sample coincides with every other fine sample
        coarse
            .samples()
            .iter()
            .zip(fine.samples().iter().step_by(2))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn rejects_bad_input() {
        let p = single_dark();
        assert!(matches!(
            integrate_beta(&p, 0.0, 64),
            Err(Error::Validation { field: "t_max", .. })
        ));
        assert!(matches!(
            integrate_beta(&p, 5.0, 8),
            Err(Error::Validation {
                field: "steps_per_tau",
                ..
            })
        ));
    }

    #[test]
    fn first_interval_is_pure_exponential() {
        let p = single_dark();
        let trace = integrate_beta(&p, 1.0, DEFAULT_STEPS_PER_TAU).unwrap();
        let rate = Complex64::new(-0.5 * 3.0 * p.gamma_tau(), -p.omega_tau());
        for (j, b) in trace.samples().iter().enumerate() {
            let t = trace.sample_time(j);
            assert!((b - (rate * t).exp()).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let p = single_dark();
        let runs: Vec<_> = [16, 32, 64, 128]
            .iter()
            .map(|&m| integrate_beta(&p, 20.0, m).unwrap())
            .collect();
        let errs: Vec<f64> = runs.windows(2).map(|w| max_diff(&w[0], &w[1])).collect();
        for pair in errs.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(ratio >= 8.0 * 0.9, "errors {errs:?}, ratio {ratio}");
        }
    }

    #[test]
    fn dense_output_exact_on_grid_and_refines() {
        let p = single_dark();
        let trace = integrate_beta(&p, 10.0, 256).unwrap();
        assert_eq!(trace.beta_at(0.0).unwrap(), Complex64::new(1.0, 0.0));
        for j in [1usize, 17, 512, 1023, 4000] {
            let t = trace.sample_time(j);
            assert_eq!(trace.beta_at(t).unwrap(), trace.samples()[j]);
        }
        let fine = integrate_beta(&p, 10.0, 512).unwrap();
        for j in [3usize, 511, 512, 2001, 5119] {
            let t = (j as f64 + 0.5) * trace.sample_spacing();
            let coarse = trace.beta_at(t).unwrap();
            let reference = fine.samples()[2 * j + 1];
            assert!((coarse - reference).norm() < 1e-8, "t = {t}");
        }
        assert!(matches!(trace.beta_at(10.5), Err(Error::OutOfRange { .. })));
        assert!(trace.beta_at(-0.1).is_err());
    }

    #[test]
    fn linear_in_initial_amplitude() {
        let p = single_dark();
        let c = Complex64::new(0.3, -0.7);
        let base = integrate_beta(&p, 8.0, 64).unwrap();
        let scaled = integrate_beta_from(&p, 8.0, 64, c).unwrap();
        for (a, b) in base.samples().iter().zip(scaled.samples()) {
            assert!((a * c - b).norm() < 1e-14);
        }
    }

    #[test]
    fn long_time_trapping() {
        let p = single_dark();
        let trace = integrate_beta(&p, 200.0, DEFAULT_STEPS_PER_TAU).unwrap();
        let prob = trace.samples().last().unwrap().norm_sqr();
        // A(1)² with A(1) = 1.5 / (1.5 + 3γτ)
        let a = 1.5 / (1.5 + 3.0 * p.gamma_tau());
        assert!((prob - a * a).abs() < 0.01 * a * a, "prob {prob}");
        assert!((a * a - 0.6651).abs() < 1e-4);
    }

    #[test]
    fn markov_limit_exponential_decay() {
        // e^{iΩl} = 1 so the delayed terms add coherently: rate N²γ/2
        let p = GiantAtomParams::new(3, 1e-6, TAU).unwrap();
        let rate = p.markov_rate();
        let t_max = 3.0 / rate;
        let trace = integrate_beta(&p, t_max, MIN_STEPS_PER_TAU).unwrap();
        for (t, b) in trace.full_steps().step_by(4093) {
            let expected = (-2.0 * rate * t).exp();
            assert!(
                (b.norm_sqr() / expected - 1.0).abs() < 1e-4,
                "t = {t}: {} vs {expected}",
                b.norm_sqr()
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn amplitude_is_contractive(
            n in 2usize..7, g in 0.01f64..3.0, w in 0.1f64..40.0
        ) {
            let p = GiantAtomParams::new(n, g, w).unwrap();
            let trace = integrate_beta(&p, 20.0, 64).unwrap();
            for b in trace.samples() {
                prop_assert!(b.norm() <= 1.0 + 1e-9);
            }
        }
    }
}
