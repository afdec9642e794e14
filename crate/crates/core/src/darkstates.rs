//! Dark states, coexisting dark-state pairs and the oscillating-bound-state
//! lattice.
//!
//! A dark state is a purely imaginary root `s = -iΩ_n` of the characteristic
//! function with `Ω_n = 2nπ/N` (units of `1/τ`). It exists when
//!
//! ```text
//! Ωτ = 2nπ/N - (Nγτ/2) cot(nπ/N)
//! ```
//!
//! Two such conditions hold at once, with energy matching
//! `(Ω_{n1} + Ω_{n2})/2 = Ω`, exactly on the lattice `n1 = pN + n`,
//! `n2 = qN - n` (`p >= q >= 1`, `1 <= n < N/2`) where
//! `Ωτ/2π = (p + q)/2` and `γτ/2π = [(p - q)/N + 2n/N²] tan(nπ/N)`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::characteristic::characteristic_fn;
use crate::error::{Error, Result};
use crate::field::total_intensity_closed_form;
use crate::params::GiantAtomParams;
use num_complex::Complex64;

/// `|Ω_n - Ω|/Ω` above which a dark mode is flagged as beyond the RWA.
pub const DEFAULT_RWA_THRESHOLD: f64 = 0.1;
/// Default enumeration bound for `p` and `q`.
pub const DEFAULT_PQ_MAX: u32 = 12;
/// Tolerance on `|F(-iΩ_n)|` for accepting a mode as dark.
pub const DARK_TOLERANCE: f64 = 1e-10;

/// Dark frequency `Ω_n τ = 2nπ/N`.
pub fn dark_frequency(n_legs: usize, n: i64) -> f64 {
    TAU * n as f64 / n_legs as f64
}

fn check_mode(n_legs: usize, n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidMode {
            n,
            reason: "dark-mode indices must be positive",
        });
    }
    if n % n_legs as i64 == 0 {
        return Err(Error::SingularMode { n, n_legs });
    }
    Ok(())
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// `Ωτ` at which mode `n` is dark for the given `γτ`.
pub fn dark_condition_omega_tau(n_legs: usize, n: i64, gamma_tau: f64) -> Result<f64> {
    check_mode(n_legs, n)?;
    let nf = n_legs as f64;
    let r = n.rem_euclid(n_legs as i64);
    // r = N/2 gives cot = 0 exactly instead of ~6e-17
    let c = if 2 * r == n_legs as i64 {
        0.0
    } else {
        cot(PI * r as f64 / nf)
    };
    Ok(dark_frequency(n_legs, n) - 0.5 * nf * gamma_tau * c)
}

/// Residual amplitude `A(n) = 2sin²(nπ/N) / (2sin²(nπ/N) + Nγτ)`.
///
/// Returns 0 for `n ≡ 0 (mod N)`.
pub fn dark_amplitude(n_legs: usize, n: i64, gamma_tau: f64) -> f64 {
    if n % n_legs as i64 == 0 {
        return 0.0;
    }
    let s2 = sin_sq(n_legs, n);
    2.0 * s2 / (2.0 * s2 + n_legs as f64 * gamma_tau)
}

pub(crate) fn sin_sq(n_legs: usize, n: i64) -> f64 {
    let r = n.rem_euclid(n_legs as i64);
    (PI * r as f64 / n_legs as f64).sin().powi(2)
}

/// True iff `n >= 1` and `|Ω_n - Ω|/Ω <= DEFAULT_RWA_THRESHOLD`.
pub fn rwa_check(n_legs: usize, n: i64, gamma_tau: f64, omega_tau: f64) -> bool {
    rwa_check_with(n_legs, n, gamma_tau, omega_tau, DEFAULT_RWA_THRESHOLD)
}

/// [`rwa_check`] with an explicit threshold.
///
/// The relative detuning is `(Nγτ/2)|cot(nπ/N)| / Ωτ`, which equals
/// `|Ω_n - Ω|/Ω` whenever mode `n` satisfies the dark-state condition.
pub fn rwa_check_with(
    n_legs: usize,
    n: i64,
    gamma_tau: f64,
    omega_tau: f64,
    threshold: f64,
) -> bool {
    if n < 1 || n % n_legs as i64 == 0 || !(gamma_tau >= 0.0) || !(omega_tau > 0.0) {
        return false;
    }
    rwa_detuning(n_legs, n, gamma_tau, omega_tau) <= threshold
}

/// `(Nγτ/2)|cot(nπ/N)| / Ωτ`.
pub fn rwa_detuning(n_legs: usize, n: i64, gamma_tau: f64, omega_tau: f64) -> f64 {
    let nf = n_legs as f64;
    let c = if 2 * n == n_legs as i64 {
        0.0
    } else {
        cot(PI * n as f64 / nf)
    };
    0.5 * nf * gamma_tau * c.abs() / omega_tau
}

/// A single nondecaying mode of a given system.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkState {
    pub n: i64,
    /// `Ω_n τ`.
    pub omega_n: f64,
    /// `A(n)`.
    pub amplitude: f64,
    /// Total bound-field intensity `I(n)`.
    pub intensity: f64,
    pub rwa_ok: bool,
}

impl DarkState {
    /// Builds the record for mode `n`, checking that `s = -iΩ_n` is a root of
    /// the characteristic function of `params`.
    pub fn new(params: &GiantAtomParams, n: i64) -> Result<Self> {
        check_mode(params.n_legs(), n)?;
        let n_legs = params.n_legs();
        let omega_n = dark_frequency(n_legs, n);
        let residual = characteristic_fn(params, Complex64::new(0.0, -omega_n)).norm();
        if residual >= DARK_TOLERANCE * (1.0 + params.omega_tau()) {
            return Err(Error::InvalidMode {
                n,
                reason: "s = -iΩ_n is not a root of the characteristic function",
            });
        }
        let g = params.gamma_tau();
        Ok(Self {
            n,
            omega_n,
            amplitude: dark_amplitude(n_legs, n, g),
            intensity: total_intensity_closed_form(n_legs, n, g),
            rwa_ok: rwa_check(n_legs, n, g, params.omega_tau()),
        })
    }
}

/// All dark modes `1 <= n <= n_max` of `params`.
pub fn dark_states(params: &GiantAtomParams, n_max: i64) -> Vec<DarkState> {
    (1..=n_max)
        .filter(|n| n % params.n_legs() as i64 != 0)
        .filter_map(|n| DarkState::new(params, n).ok())
        .collect()
}

/// Two coexisting dark modes at a forced lattice point `(Ωτ, γτ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkPair {
    pub n_legs: usize,
    pub n1: i64,
    pub n2: i64,
    pub p: u32,
    pub q: u32,
    pub n: u32,
    pub omega_tau: f64,
    pub gamma_tau: f64,
    /// `Ωτ/2π = (p + q)/2`, exact.
    pub omega_tau_2pi: f64,
    pub gamma_tau_2pi: f64,
    /// `(Ω_{n1} - Ω_{n2})τ`.
    pub beat: f64,
    /// `A(n1)·A(n2)`.
    pub osc_amplitude: f64,
    pub rwa_ok: bool,
}

impl DarkPair {
    /// Lattice point `(p, q, n)` for `N` coupling points.
    pub fn from_lattice(n_legs: usize, p: u32, q: u32, n: u32) -> Result<Self> {
        if n_legs < 3 {
            return Err(Error::StructuralImpossibility { n_legs });
        }
        if q < 1 || p < q {
            return Err(Error::validation(
                "p, q",
                format!("need p >= q >= 1, got p = {p}, q = {q}"),
            ));
        }
        if n < 1 || 2 * n as usize >= n_legs {
            return Err(Error::validation(
                "n",
                format!("need 1 <= n < N/2, got n = {n} for N = {n_legs}"),
            ));
        }
        let nf = n_legs as f64;
        let n1 = p as i64 * n_legs as i64 + n as i64;
        let n2 = q as i64 * n_legs as i64 - n as i64;
        let gamma_tau_2pi =
            ((p - q) as f64 / nf + 2.0 * n as f64 / (nf * nf)) * (PI * n as f64 / nf).tan();
        let gamma_tau = TAU * gamma_tau_2pi;
        let omega_tau_2pi = (p + q) as f64 / 2.0;
        let omega_tau = PI * (p + q) as f64;
        let osc_amplitude =
            dark_amplitude(n_legs, n1, gamma_tau) * dark_amplitude(n_legs, n2, gamma_tau);
        let rwa_ok = rwa_check(n_legs, n1, gamma_tau, omega_tau)
            && rwa_check(n_legs, n2, gamma_tau, omega_tau);
        Ok(Self {
            n_legs,
            n1,
            n2,
            p,
            q,
            n,
            omega_tau,
            gamma_tau,
            omega_tau_2pi,
            gamma_tau_2pi,
            beat: TAU * (n1 - n2) as f64 / nf,
            osc_amplitude,
            rwa_ok,
        })
    }

    pub fn params(&self) -> Result<GiantAtomParams> {
        GiantAtomParams::new(self.n_legs, self.gamma_tau, self.omega_tau)
    }

    /// `(Ω_{n1}τ, Ω_{n2}τ)`.
    pub fn mode_frequencies(&self) -> (f64, f64) {
        (
            dark_frequency(self.n_legs, self.n1),
            dark_frequency(self.n_legs, self.n2),
        )
    }

    pub fn amplitudes(&self) -> (f64, f64) {
        (
            dark_amplitude(self.n_legs, self.n1, self.gamma_tau),
            dark_amplitude(self.n_legs, self.n2, self.gamma_tau),
        )
    }

    /// Beat period `2π / (Ω_{n1} - Ω_{n2})` in units of `τ`.
    pub fn beat_period(&self) -> f64 {
        TAU / self.beat
    }
}

/// Every lattice pair with `q <= p`, `p <= p_max`, `q <= q_max`, `1 <= n < N/2`.
///
/// Ordered by `(p, q, n)`.
pub fn find_pairs(n_legs: usize, p_max: u32, q_max: u32) -> Result<Vec<DarkPair>> {
    if n_legs < 3 {
        return Err(Error::StructuralImpossibility { n_legs });
    }
    let n_max = ((n_legs - 1) / 2) as u32;
    let triples: Vec<(u32, u32, u32)> = (1..=p_max)
        .flat_map(|p| (1..=q_max.min(p)).flat_map(move |q| (1..=n_max).map(move |n| (p, q, n))))
        .collect();
    triples
        .into_par_iter()
        .map(|(p, q, n)| DarkPair::from_lattice(n_legs, p, q, n))
        .collect()
}

/// One single-dark-state line `Ωτ(γτ)` sampled for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkLine {
    pub n: i64,
    /// `(γτ, Ωτ)` samples inside the scan window.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeScan {
    pub n_legs: usize,
    pub omega_tau_max: f64,
    pub gamma_tau_max: f64,
    pub dots: Vec<DarkPair>,
    pub lines: Vec<DarkLine>,
}

/// Number of `γτ` samples per overlay line.
pub const LINE_SAMPLES: usize = 401;

/// Oscillating-bound-state lattice inside `0 < Ωτ <= omega_tau_max`,
/// `0 < γτ <= gamma_tau_max`, with the single-dark-state lines as overlay.
///
/// `N = 2` yields no dots (but still the lines).
pub fn scan_lattice(n_legs: usize, omega_tau_max: f64, gamma_tau_max: f64) -> LatticeScan {
    let dots = if n_legs >= 3 && omega_tau_max > 0.0 && gamma_tau_max > 0.0 {
        // Ωτ = π(p + q) <= max  ⇒  p + q <= max/π
        let sum_max = (omega_tau_max / PI + 1e-9).floor() as u32;
        let p_max = sum_max.saturating_sub(1);
        find_pairs(n_legs, p_max, p_max)
            .unwrap_or_default()
            .into_iter()
            .filter(|d| d.p + d.q <= sum_max && d.gamma_tau <= gamma_tau_max)
            .collect()
    } else {
        Vec::new()
    };
    LatticeScan {
        n_legs,
        omega_tau_max,
        gamma_tau_max,
        dots,
        lines: dark_lines(n_legs, omega_tau_max, gamma_tau_max),
    }
}

fn dark_lines(n_legs: usize, omega_tau_max: f64, gamma_tau_max: f64) -> Vec<DarkLine> {
    if !(omega_tau_max > 0.0 && gamma_tau_max > 0.0) {
        return Vec::new();
    }
    let nf = n_legs as f64;
    // steepest descending line has slope (N/2)cot(π/N); anything starting
    // higher than this can never enter the window
    let reach = omega_tau_max + 0.5 * nf * gamma_tau_max * cot(PI / nf);
    let n_cap = (reach * nf / TAU).ceil() as i64 + 1;
    (1..=n_cap)
        .filter(|n| n % n_legs as i64 != 0)
        .filter_map(|n| {
            let points: Vec<(f64, f64)> = (0..LINE_SAMPLES)
                .map(|i| gamma_tau_max * i as f64 / (LINE_SAMPLES - 1) as f64)
                .filter_map(|g| {
                    let w = dark_condition_omega_tau(n_legs, n, g).ok()?;
                    (w > 0.0 && w <= omega_tau_max).then_some((g, w))
                })
                .collect();
            (!points.is_empty()).then_some(DarkLine { n, points })
        })
        .collect()
}
