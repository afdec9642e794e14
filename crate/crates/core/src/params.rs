//! System description in dimensionless units.
//!
//! Every quantity is measured with the neighbour travel time `τ = 1` and the
//! wave velocity `v = 1`: times are in units of `τ`, positions in units of
//! `vτ`, rates and frequencies in units of `1/τ`. The coupling points then sit
//! on the integers, `x_m = m - 1` for `m = 1..=N`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// A giant atom with `N` equidistant coupling points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiantAtomParams {
    n_legs: usize,
    gamma_tau: f64,
    omega_tau: f64,
}

impl GiantAtomParams {
    /// `gamma_tau` is the per-point relaxation rate times `τ`, `omega_tau`
    /// the atomic transition (angular) frequency times `τ`.
    pub fn new(n_legs: usize, gamma_tau: f64, omega_tau: f64) -> Result<Self> {
        if n_legs < 2 {
            return Err(Error::validation(
                "n_legs",
                format!("need at least 2 coupling points, got {n_legs}"),
            ));
        }
        check_positive("gamma_tau", gamma_tau)?;
        check_positive("omega_tau", omega_tau)?;
        Ok(Self {
            n_legs,
            gamma_tau,
            omega_tau,
        })
    }

    /// Same as [`GiantAtomParams::new`] but with both frequencies given in
    /// units of `2π` (`γτ/2π`, `Ωτ/2π`).
    pub fn from_cycles(n_legs: usize, gamma_tau_2pi: f64, omega_tau_2pi: f64) -> Result<Self> {
        Self::new(n_legs, TAU * gamma_tau_2pi, TAU * omega_tau_2pi)
    }

    pub fn n_legs(&self) -> usize {
        self.n_legs
    }

    pub fn gamma_tau(&self) -> f64 {
        self.gamma_tau
    }

    pub fn omega_tau(&self) -> f64 {
        self.omega_tau
    }

    pub fn gamma_tau_2pi(&self) -> f64 {
        self.gamma_tau / TAU
    }

    pub fn omega_tau_2pi(&self) -> f64 {
        self.omega_tau / TAU
    }

    /// `N` as a float, for formulas.
    pub(crate) fn n(&self) -> f64 {
        self.n_legs as f64
    }

    /// Positions of the coupling points, `0, 1, ..., N-1`.
    pub fn coupling_points(&self) -> impl Iterator<Item = f64> + Clone {
        (0..self.n_legs).map(|m| m as f64)
    }

    /// Distance between the outermost coupling points, `N - 1`.
    pub fn extent(&self) -> f64 {
        (self.n_legs - 1) as f64
    }

    /// Total relaxation rate in the Markov limit, `N²γτ / 2` (amplitude decay).
    pub fn markov_rate(&self) -> f64 {
        0.5 * self.n() * self.n() * self.gamma_tau
    }

    pub fn with_omega_tau(&self, omega_tau: f64) -> Result<Self> {
        Self::new(self.n_legs, self.gamma_tau, omega_tau)
    }

    /// Converts back to ordinary frequencies in Hz for a given travel time in
    /// seconds. Returns `(Ω/2π, γ/2π)`.
    pub fn to_physical(&self, tau: f64) -> Result<(f64, f64)> {
        check_positive("tau", tau)?;
        Ok((self.omega_tau / TAU / tau, self.gamma_tau / TAU / tau))
    }
}

/// Builds dimensionless parameters from laboratory values.
///
/// `omega` and `gamma` are ordinary frequencies in Hz (the `Ω/2π` and `γ/2π`
/// of an experiment), `tau` is the neighbour travel time in seconds.
pub fn params_from_physical(
    omega: f64,
    gamma: f64,
    tau: f64,
    n_legs: usize,
) -> Result<GiantAtomParams> {
    check_positive("omega", omega)?;
    check_positive("gamma", gamma)?;
    check_positive("tau", tau)?;
    GiantAtomParams::new(n_legs, gamma * tau * TAU, omega * tau * TAU)
}

fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}
