//! Waveguide field radiated by the atom.
//!
//! With `τ = v = 1` the field is
//!
//! ```text
//! φ(x, t) = -i √(γ/2) Σ_m β(t - |x - x_m|) Θ(t - |x - x_m|)
//! ```
//!
//! and `p(x, t) = |φ(x, t)|²` is the probability density of the emitted
//! boson. `Θ(0) = 1` for `t > 0`; at `t = 0` the field is the vacuum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::darkstates::{dark_amplitude, dark_frequency, sin_sq, DarkPair};
use crate::dde::AmplitudeTrace;
use crate::error::{Error, Result};
use crate::params::GiantAtomParams;
use crate::quadrature::simpson_piecewise;

/// Default spatial resolution, `vτ/200`.
pub const DEFAULT_DX: f64 = 1.0 / 200.0;

/// Field amplitude for an arbitrary atomic amplitude `β(·)`.
pub fn field_from<B>(params: &GiantAtomParams, beta: B, x: f64, t: f64) -> Result<Complex64>
where
    B: Fn(f64) -> Result<Complex64>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    if t <= 0.0 {
        return Ok(acc);
    }
    for xm in params.coupling_points() {
        let retarded = t - (x - xm).abs();
        if retarded >= 0.0 {
            acc += beta(retarded)?;
        }
    }
    let scale = (0.5 * params.gamma_tau()).sqrt();
    Ok(Complex64::new(0.0, -scale) * acc)
}

/// `φ(x, t)` reconstructed from an integrated trace.
pub fn field_amplitude(
    params: &GiantAtomParams,
    trace: &AmplitudeTrace,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    if t > trace.t_max() {
        return Err(Error::OutOfRange {
            t,
            min: 0.0,
            max: trace.t_max(),
        });
    }
    field_from(params, |r| trace.beta_at(r), x, t)
}

/// `p(x, t) = |φ(x, t)|²`.
pub fn intensity(params: &GiantAtomParams, trace: &AmplitudeTrace, x: f64, t: f64) -> Result<f64> {
    field_amplitude(params, trace, x, t).map(|phi| phi.norm_sqr())
}

/// Right- and left-moving parts `(φ_R, φ_L)` of the field, with `φ = φ_R + φ_L`.
///
/// Coupling point `m` feeds `φ_R` for `x >= x_m` and `φ_L` for `x < x_m`.
pub fn channel_amplitudes(
    params: &GiantAtomParams,
    trace: &AmplitudeTrace,
    x: f64,
    t: f64,
) -> Result<(Complex64, Complex64)> {
    if t > trace.t_max() {
        return Err(Error::OutOfRange {
            t,
            min: 0.0,
            max: trace.t_max(),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    if t <= 0.0 {
        return Ok((zero, zero));
    }
    let (mut right, mut left) = (zero, zero);
    for xm in params.coupling_points() {
        let retarded = t - (x - xm).abs();
        if retarded < 0.0 {
            continue;
        }
        let b = trace.beta_at(retarded)?;
        if x >= xm {
            right += b;
        } else {
            left += b;
        }
    }
    let scale = Complex64::new(0.0, -(0.5 * params.gamma_tau()).sqrt());
    Ok((scale * right, scale * left))
}

/// `|β(t)|² + ∫ (|φ_R|² + |φ_L|²) dx` over `[-t, N-1+t]`.
///
/// This is the norm the equation of motion conserves. It differs from
/// [`total_probability`] by the interference integral `2Re ∫ φ_R* φ_L dx`,
/// which is of order `γ/Ω`.
pub fn channel_total_probability(
    params: &GiantAtomParams,
    trace: &AmplitudeTrace,
    t: f64,
    dx: f64,
) -> Result<f64> {
    if !(dx > 0.0) {
        return Err(Error::validation("dx", format!("must be > 0, got {dx}")));
    }
    let atom = trace.beta_at(t)?.norm_sqr();
    let (lo, hi) = (-t, params.extent() + t);
    let breaks = field_breakpoints(params, t, lo, hi);
    let field = simpson_piecewise(
        |x| {
            channel_amplitudes(params, trace, x, t)
                .map(|(r, l)| r.norm_sqr() + l.norm_sqr())
                .unwrap_or(f64::NAN)
        },
        lo,
        hi,
        &breaks,
        dx,
    );
    Ok(atom + field)
}

/// Uniform spatial grid and the timestamps to sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub times: Vec<f64>,
}

impl GridSpec {
    /// `[0, N-1]` at the default resolution.
    pub fn over_atom(params: &GiantAtomParams, times: Vec<f64>) -> Self {
        Self {
            x_min: 0.0,
            x_max: params.extent(),
            dx: DEFAULT_DX,
            times,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return Err(Error::validation(
                "dx",
                format!("must be > 0, got {}", self.dx),
            ));
        }
        if !(self.x_max >= self.x_min) {
            return Err(Error::validation(
                "x_max",
                format!("window [{}, {}] is empty", self.x_min, self.x_max),
            ));
        }
        Ok(())
    }

    fn len(&self) -> usize {
        ((self.x_max - self.x_min) / self.dx + 1e-9).floor() as usize + 1
    }
}

/// Field intensity `p(x_j, t)` on `x_j = x_min + j·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub t: f64,
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(j, &p)| (self.x(j), p))
    }
}

/// Samples `p(x, t)` on the grid at every requested time.
pub fn intensity_map(
    params: &GiantAtomParams,
    trace: &AmplitudeTrace,
    spec: &GridSpec,
) -> Result<Vec<FieldGrid>> {
    spec.validate()?;
    let len = spec.len();
    spec.times
        .iter()
        .map(|&t| {
            let values = (0..len)
                .into_par_iter()
                .map(|j| intensity(params, trace, spec.x_min + j as f64 * spec.dx, t))
                .collect::<Result<Vec<f64>>>()?;
            Ok(FieldGrid {
                x_min: spec.x_min,
                x_max: spec.x_min + (len - 1) as f64 * spec.dx,
                dx: spec.dx,
                t,
                values,
            })
        })
        .collect()
}

/// Positions in `[x_min, x_max]` where some retarded time `t - |x - x_m|`
/// is a non-negative integer: the wavefronts and the kinks of `p(·, t)`.
pub fn field_breakpoints(params: &GiantAtomParams, t: f64, x_min: f64, x_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let k_max = t.floor().max(0.0) as usize;
    for xm in params.coupling_points() {
        for k in 0..=k_max {
            let d = t - k as f64;
            for x in [xm - d, xm + d] {
                if x > x_min && x < x_max {
                    out.push(x);
                }
            }
        }
        out.push(xm);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `∫ p(x, t) dx` over `[x_min, x_max]` by composite Simpson with spacing at
/// most `dx`, restarted at every kink of the integrand.
pub fn integrated_intensity(
    params: &GiantAtomParams,
    trace: &AmplitudeTrace,
    t: f64,
    x_min: f64,
    x_max: f64,
    dx: f64,
) -> Result<f64> {
    if !(dx > 0.0) {
        return Err(Error::validation("dx", format!("must be > 0, got {dx}")));
    }
    // surface the range error before quadrature swallows it
    field_amplitude(params, trace, x_min, t)?;
    let breaks = field_breakpoints(params, t, x_min, x_max);
    Ok(simpson_piecewise(
        |x| intensity(params, trace, x, t).unwrap_or(f64::NAN),
        x_min,
        x_max,
        &breaks,
        dx,
    ))
}

/// `|β(t)|² + ∫ p(x, t) dx` over the whole causal support `[-t, N-1+t]`.
pub fn total_probability(
    params: &GiantAtomParams,
    trace: &AmplitudeTrace,
    t: f64,
    dx: f64,
) -> Result<f64> {
    let atom = trace.beta_at(t)?.norm_sqr();
    let field = integrated_intensity(params, trace, t, -t, params.extent() + t, dx)?;
    Ok(atom + field)
}

fn check_positive_mode(n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidMode {
            n,
            reason: "dark-mode indices must be positive",
        });
    }
    Ok(())
}

/// Long-time bound-state intensity `p_n(x)` for dark mode `n`.
///
/// Writing `x = m' - 1 + λ` with `m' ∈ 1..=N` and `λ ∈ [0, 1)`,
///
/// ```text
/// p_n(x) = 8γ sin²(nπ/N) sin²(nπm'/N) sin²[nπ(m' + 2λ - 1)/N] / (2sin²(nπ/N) + Nγτ)²
/// ```
///
/// and zero outside `[0, N-1]`.
pub fn bound_profile(params: &GiantAtomParams, n: i64, x: f64) -> Result<f64> {
    check_positive_mode(n)?;
    let extent = params.extent();
    if !(0.0..=extent).contains(&x) {
        return Ok(0.0);
    }
    let nf = params.n();
    let cell = x.floor().min(extent - 1.0);
    let m_prime = cell + 1.0;
    let lambda = x - cell;
    let k = PI * n as f64 / nf;
    let s2 = sin_sq(params.n_legs(), n);
    let g = params.gamma_tau();
    let denom = 2.0 * s2 + nf * g;
    Ok(8.0
        * g
        * s2
        * (k * m_prime).sin().powi(2)
        * (k * (m_prime + 2.0 * lambda - 1.0)).sin().powi(2)
        / (denom * denom))
}

/// Total bound-field intensity `I(n) = ∫ p_n(x) dx`, closed form.
pub fn total_intensity(params: &GiantAtomParams, n: i64) -> Result<f64> {
    check_positive_mode(n)?;
    Ok(total_intensity_closed_form(
        params.n_legs(),
        n,
        params.gamma_tau(),
    ))
}

/// `2Nγτ sin²(nπ/N) (1 + (N/4nπ) sin(2nπ/N)) / (2sin²(nπ/N) + Nγτ)²`.
pub(crate) fn total_intensity_closed_form(n_legs: usize, n: i64, gamma_tau: f64) -> f64 {
    let nf = n_legs as f64;
    let s2 = sin_sq(n_legs, n);
    let denom = 2.0 * s2 + nf * gamma_tau;
    let shape = 1.0 + nf / (4.0 * PI * n as f64) * (2.0 * PI * n as f64 / nf).sin();
    2.0 * nf * gamma_tau * s2 * shape / (denom * denom)
}

/// Field left in the waveguide by two coexisting dark modes,
///
/// ```text
/// I(n1, n2)(t) = I(n1) + I(n2) - 4A(n1)A(n2) Ω/(Ω_{n1} + Ω_{n2}) cos[(Ω_{n1} - Ω_{n2}) t]
/// ```
pub fn oscillating_intensity(params: &GiantAtomParams, pair: &DarkPair, t: f64) -> Result<f64> {
    check_pair(params, pair)?;
    let n_legs = params.n_legs();
    let g = params.gamma_tau();
    let (w1, w2) = pair.mode_frequencies();
    let (a1, a2) = pair.amplitudes();
    let i1 = total_intensity_closed_form(n_legs, pair.n1, g);
    let i2 = total_intensity_closed_form(n_legs, pair.n2, g);
    Ok(i1 + i2 - 4.0 * a1 * a2 * params.omega_tau() / (w1 + w2) * ((w1 - w2) * t).cos())
}

/// Long-time `|β(t)|²` of a pair, `A1² + A2² + 2A1A2 cos[(Ω_{n1} - Ω_{n2})t]`.
pub fn pair_atomic_probability(pair: &DarkPair, t: f64) -> f64 {
    let (a1, a2) = pair.amplitudes();
    a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * (pair.beat * t).cos()
}

fn check_pair(params: &GiantAtomParams, pair: &DarkPair) -> Result<()> {
    let mismatch = |reason: String| Error::PairMismatch {
        n1: pair.n1,
        n2: pair.n2,
        reason,
    };
    if pair.n_legs != params.n_legs() {
        return Err(mismatch(format!(
            "pair has N = {}, parameters have N = {}",
            pair.n_legs,
            params.n_legs()
        )));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    if !close(pair.gamma_tau, params.gamma_tau()) || !close(pair.omega_tau, params.omega_tau()) {
        return Err(mismatch(format!(
            "pair forces (Ωτ, γτ) = ({}, {}), parameters have ({}, {})",
            pair.omega_tau,
            pair.gamma_tau,
            params.omega_tau(),
            params.gamma_tau()
        )));
    }
    Ok(())
}

/// One stationary component `A e^{-iΩ_n t}` of the long-time atomic amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkComponent {
    pub amplitude: f64,
    /// `Ω_n τ`.
    pub omega_n: f64,
}

impl DarkComponent {
    pub fn for_mode(params: &GiantAtomParams, n: i64) -> Self {
        Self {
            amplitude: dark_amplitude(params.n_legs(), n, params.gamma_tau()),
            omega_n: dark_frequency(params.n_legs(), n),
        }
    }
}

/// Long-time intensity `p(x, t)` generated by a superposition of dark modes,
/// with every retarded time taken as already switched on.
pub fn stationary_intensity(
    params: &GiantAtomParams,
    components: &[DarkComponent],
    x: f64,
    t: f64,
) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for xm in params.coupling_points() {
        let retarded = t - (x - xm).abs();
        for c in components {
            acc += Complex64::from_polar(c.amplitude, -c.omega_n * retarded);
        }
    }
    0.5 * params.gamma_tau() * acc.norm_sqr()
}
