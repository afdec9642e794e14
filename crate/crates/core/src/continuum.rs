//! The limit of infinitely many coupling points.
//!
//! With `N → ∞` the total travel time `Nτ → T` and the total rate
//! `N²γ → Γ` stay finite. Here `ΓT` and `ΩT` are the dimensionless
//! products; a finite-`N` system with `τ = 1` maps to `ΓT = N³γτ`,
//! `ΩT = NΩτ` and a coupling region of length `L = N - 1`.

use std::f64::consts::{PI, TAU};

use crate::darkstates::{dark_frequency, DarkPair};
use crate::error::{Error, Result};

/// Tolerance for accepting a root of the quadratic as an integer.
pub const INTEGER_TOLERANCE: f64 = 1e-9;

/// Positive integers `n` with `ΩT = 2nπ - ΓT/(2nπ)`.
///
/// The roots are `n = [ΩT ± √((ΩT)² + 4ΓT)] / 4π`; the `-` root is always
/// negative, so at most one value is returned.
pub fn continuum_dark_indices(omega_t: f64, gamma_t: f64) -> Vec<i64> {
    if !(omega_t > 0.0 && gamma_t > 0.0) {
        return Vec::new();
    }
    let disc = (omega_t * omega_t + 4.0 * gamma_t).sqrt();
    [omega_t + disc, omega_t - disc]
        .into_iter()
        .map(|v| v / (2.0 * TAU))
        .filter_map(|n| {
            let r = n.round();
            (r >= 1.0 && (n - r).abs() <= INTEGER_TOLERANCE).then_some(r as i64)
        })
        .collect()
}

/// `ΩT` at which mode `n` is dark in the continuum.
pub fn continuum_dark_omega_t(n: i64, gamma_t: f64) -> f64 {
    let k = TAU * n as f64;
    k - gamma_t / k
}

/// `p_n(x) = u/(u + 1)² · (4/L) sin⁴(nπx/L)` with `u = 2n²π²/ΓT`.
///
/// Zero outside `[0, L]`.
pub fn continuum_profile(gamma_t: f64, n: i64, length: f64, x: f64) -> Result<f64> {
    check(gamma_t, n)?;
    if !(length > 0.0) {
        return Err(Error::validation(
            "length",
            format!("must be > 0, got {length}"),
        ));
    }
    if !(0.0..=length).contains(&x) {
        return Ok(0.0);
    }
    let u = 2.0 * (n * n) as f64 * PI * PI / gamma_t;
    Ok(u / ((u + 1.0) * (u + 1.0)) * 4.0 / length * (PI * n as f64 * x / length).sin().powi(4))
}

/// `∫ p_n dx = (3n²π²/ΓT) / (2n²π²/ΓT + 1)²`, at most 3/8.
pub fn continuum_total_intensity(gamma_t: f64, n: i64) -> Result<f64> {
    check(gamma_t, n)?;
    let v = (n * n) as f64 * PI * PI / gamma_t;
    Ok(3.0 * v / ((2.0 * v + 1.0) * (2.0 * v + 1.0)))
}

fn check(gamma_t: f64, n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidMode {
            n,
            reason: "continuum modes start at n = 1",
        });
    }
    if !(gamma_t.is_finite() && gamma_t > 0.0) {
        return Err(Error::validation(
            "gamma_t",
            format!("must be > 0, got {gamma_t}"),
        ));
    }
    Ok(())
}

/// `γτ = ΓT/N³` for a finite comb approximating the continuum.
pub fn discrete_gamma_tau(gamma_t: f64, n_legs: usize) -> f64 {
    gamma_t / (n_legs as f64).powi(3)
}

/// The comb pair `n1 = N + n`, `n2 = N - n` and its continuum limit.
///
/// Frequencies are in units of `1/τ` (sub-cell travel time) unless the name
/// says `_t`, which means multiplied by `T = Nτ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombPairLimit {
    pub n: u32,
    pub n_legs: usize,
    pub pair: DarkPair,
    /// `Ωτ = 2π`.
    pub omega_tau: f64,
    /// `N³γτ` of the finite comb.
    pub gamma_t: f64,
    /// `(2nπ)²`.
    pub gamma_t_limit: f64,
    /// `(Ω_{n1}τ, Ω_{n2}τ)` of the finite comb.
    pub mode_frequencies: (f64, f64),
    /// `Ωτ ± Γτ/(2πn)` using the finite comb's `Γ = N²γ`.
    pub limit_frequencies: (f64, f64),
}

impl CombPairLimit {
    /// Largest deviation between the finite-comb and limiting mode
    /// frequencies, in units of `1/T`.
    pub fn frequency_deviation_t(&self) -> f64 {
        let nf = self.n_legs as f64;
        let (a, b) = self.mode_frequencies;
        let (c, d) = self.limit_frequencies;
        nf * (a - c).abs().max((b - d).abs())
    }
}

/// Comb pair `(p, q) = (1, 1)` with offset `n` on `N` coupling points.
pub fn comb_pair_limit(n: u32, n_legs: usize) -> Result<CombPairLimit> {
    if n < 1 || 2 * n as usize >= n_legs {
        return Err(Error::validation(
            "n",
            format!("need 1 <= n < N/2, got n = {n} for N = {n_legs}"),
        ));
    }
    let pair = DarkPair::from_lattice(n_legs, 1, 1, n)?;
    let nf = n_legs as f64;
    let gamma_t = nf.powi(3) * pair.gamma_tau;
    let gamma_tau_total = nf * nf * pair.gamma_tau;
    let split = gamma_tau_total / (TAU * n as f64);
    Ok(CombPairLimit {
        n,
        n_legs,
        omega_tau: pair.omega_tau,
        gamma_t,
        gamma_t_limit: (TAU * n as f64).powi(2),
        mode_frequencies: (
            dark_frequency(n_legs, pair.n1),
            dark_frequency(n_legs, pair.n2),
        ),
        limit_frequencies: (pair.omega_tau + split, pair.omega_tau - split),
        pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_simpson;

    #[test]
    fn integer_index_recovered() {
        let gamma_t = PI * PI;
        let omega_t = TAU - PI / 2.0;
        assert_eq!(continuum_dark_indices(omega_t, gamma_t), vec![1]);
        for n in 1..6 {
            for gamma_t in [0.5, 7.0, 40.0] {
                let omega_t = continuum_dark_omega_t(n, gamma_t);
                if omega_t <= 0.0 {
                    continue;
                }
                let found = continuum_dark_indices(omega_t, gamma_t);
                assert_eq!(found, vec![n]);
                assert!(
                    (continuum_dark_omega_t(found[0], gamma_t) - omega_t).abs()
                        < 1e-12 * omega_t.max(1.0)
                );
            }
        }
    }

    #[test]
    fn generic_point_has_no_index() {
        assert!(continuum_dark_indices(2.0_f64.sqrt() * 3.0, PI.sqrt() * 1.7).is_empty());
        assert!(continuum_dark_indices(-1.0, 1.0).is_empty());
    }

    #[test]
    fn profile_nodes_and_norm() {
        for n in 1..4 {
            for gamma_t in [3.0, 2.0 * (n * n) as f64 * PI * PI, 90.0] {
                let l = 7.5;
                assert_eq!(continuum_profile(gamma_t, n, l, 0.0).unwrap(), 0.0);
                assert!(continuum_profile(gamma_t, n, l, l).unwrap() < 1e-30);
                assert_eq!(continuum_profile(gamma_t, n, l, l + 0.1).unwrap(), 0.0);
                let q = adaptive_simpson(
                    |x| continuum_profile(gamma_t, n, l, x).unwrap(),
                    0.0,
                    l,
                    1e-15,
                );
                let c = continuum_total_intensity(gamma_t, n).unwrap();
                assert!((q - c).abs() < 1e-12, "{q} vs {c}");
            }
        }
        let peak = continuum_total_intensity(2.0 * PI * PI, 1).unwrap();
        assert!((peak - 3.0 / 8.0).abs() < 1e-15);
        assert!(continuum_profile(1.0, 0, 1.0, 0.5).is_err());
    }

    #[test]
    fn comb_limit_record() {
        let rec = comb_pair_limit(1, 64).unwrap();
        assert_eq!(rec.gamma_t_limit, 4.0 * PI * PI);
        assert!((rec.omega_tau - TAU).abs() < 1e-15);
        assert_eq!((rec.pair.n1, rec.pair.n2), (65, 63));
        assert!((rec.gamma_t / rec.gamma_t_limit - 1.0).abs() < 1e-3);
        assert!(comb_pair_limit(32, 64).is_err());
        assert!(comb_pair_limit(0, 64).is_err());
    }
}
