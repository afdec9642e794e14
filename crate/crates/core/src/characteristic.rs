//! The characteristic function of the delayed equation of motion.
//!
//! With `τ = 1`,
//!
//! ```text
//! F(s)  = s + iΩ + Nγ/2 + γ Σ_{l=1}^{N-1} (N - l) e^{-s l}
//! F'(s) = 1 - γ Σ_{l=1}^{N-1} (N - l) l e^{-s l}
//! ```
//!
//! The roots of `F` are the complex mode frequencies; `1 / F'(s_n)` is the
//! residue weight of mode `n` in the pole expansion of `β(t)`.

use num_complex::Complex64;

use crate::params::GiantAtomParams;

/// Complex frequency `s = re + i·im` in units of `1/τ`. `re` is the decay
/// rate (non-positive for physical modes), `im` the angular frequency.
pub type ComplexFreq = Complex64;

/// Evaluates `F(s)`.
pub fn characteristic_fn(params: &GiantAtomParams, s: ComplexFreq) -> Complex64 {
    let (value, _) = characteristic_with_derivative(params, s);
    value
}

/// Evaluates `F'(s)`.
pub fn characteristic_derivative(params: &GiantAtomParams, s: ComplexFreq) -> Complex64 {
    let (_, derivative) = characteristic_with_derivative(params, s);
    derivative
}

/// `(F(s), F'(s))` sharing one pass over the delay terms.
pub fn characteristic_with_derivative(
    params: &GiantAtomParams,
    s: ComplexFreq,
) -> (Complex64, Complex64) {
    let n = params.n_legs();
    let gamma = params.gamma_tau();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut weighted = Complex64::new(0.0, 0.0);
    for l in 1..n {
        let delayed = (-s * l as f64).exp();
        let c = (n - l) as f64;
        sum += delayed * c;
        weighted += delayed * (c * l as f64);
    }
    let value = s + Complex64::new(0.5 * n as f64 * gamma, params.omega_tau()) + sum * gamma;
    let derivative = Complex64::new(1.0, 0.0) - weighted * gamma;
    (value, derivative)
}

/// Residue weight `w = 1 / F'(s)` of a root `s`.
pub fn residue_weight(params: &GiantAtomParams, s: ComplexFreq) -> Complex64 {
    characteristic_derivative(params, s).inv()
}
