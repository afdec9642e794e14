//! Poles of the characteristic function and the residue series for `β(t)`.
//!
//! Roots are located by seeding Newton's method at the centre of every cell
//! of a grid laid over the search rectangle (cell side `≈ π/2N`, a quarter of
//! the typical root spacing `2π/N` along the imaginary axis). The number of
//! distinct roots is then checked against the winding number of `F` around
//! the rectangle, so a missed root is an error rather than a silent gap.
//!
//! The roots of a retarded delay equation form chains whose real parts
//! only drift to `-∞` logarithmically in `|Im s|`, so a lower bound on
//! `Re s` alone does not make the pole set finite. The reconstruction
//! window of [`reconstruction_poles`] therefore widens the imaginary range
//! with the requested depth.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::characteristic::{characteristic_fn, characteristic_with_derivative, ComplexFreq};
use crate::error::{Error, Result};
use crate::params::GiantAtomParams;

/// Default depth of the search rectangle.
pub const DEFAULT_RE_MIN: f64 = -12.0;
/// Every accepted root satisfies `|F(s)| <` this.
pub const RESIDUAL_TOLERANCE: f64 = 1e-11;
/// Roots closer than this are the same root.
pub const DEDUP_DISTANCE: f64 = 1e-8;
/// Minimum clearance between the rectangle boundary and any root.
pub const BOUNDARY_CLEARANCE: f64 = 1e-9;

const NEWTON_MAX_ITER: usize = 200;
const MAX_REFINEMENTS: usize = 4;

/// Axis-aligned rectangle in the complex `s` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRect {
    pub fn contains(&self, s: ComplexFreq) -> bool {
        (self.re_min..=self.re_max).contains(&s.re) && (self.im_min..=self.im_max).contains(&s.im)
    }

    fn boundary_distance(&self, s: ComplexFreq) -> f64 {
        let dre = (s.re - self.re_min).abs().min((s.re - self.re_max).abs());
        let dim = (s.im - self.im_min).abs().min((s.im - self.im_max).abs());
        let on_re_edge = (self.im_min..=self.im_max).contains(&s.im);
        let on_im_edge = (self.re_min..=self.re_max).contains(&s.re);
        match (on_re_edge, on_im_edge) {
            (true, true) => dre.min(dim),
            (true, false) => dre,
            (false, true) => dim,
            (false, false) => dre.hypot(dim),
        }
    }

    fn grown(&self, by: f64) -> Self {
        Self {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }

    fn corners_ccw(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// A root `s_n` with its residue weight `w_n = 1/F'(s_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub s: ComplexFreq,
    pub weight: Complex64,
    pub residual: f64,
}

/// Roots found inside a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    pub params: GiantAtomParams,
    pub rect: SearchRect,
    /// Sorted by `(Im s, Re s)`.
    pub poles: Vec<Pole>,
    /// Root count from the argument principle.
    pub winding: i64,
    /// Grid cells where Newton converged from none of the seeds.
    pub flagged_cells: Vec<SearchRect>,
}

impl PoleSet {
    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// `Σ_n w_n`.
    pub fn weight_sum(&self) -> Complex64 {
        self.poles.iter().map(|p| p.weight).sum()
    }

    /// Poles with `|Re s| <= tol`.
    pub fn dark(&self, tol: f64) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(move |p| p.s.re.abs() <= tol)
    }
}

/// Searches `Re s ∈ [re_min, γτ]`, `Im s ∈ [im_center ± im_halfwidth]`.
pub fn find_poles(
    params: &GiantAtomParams,
    re_min: f64,
    im_center: f64,
    im_halfwidth: f64,
) -> Result<PoleSet> {
    if !(re_min.is_finite() && re_min < 0.0) {
        return Err(Error::validation(
            "re_min",
            format!("must be finite and < 0, got {re_min}"),
        ));
    }
    if !(im_halfwidth.is_finite() && im_halfwidth > 0.0) || !im_center.is_finite() {
        return Err(Error::validation(
            "im_halfwidth",
            format!("need a finite centre and a half-width > 0, got {im_center} ± {im_halfwidth}"),
        ));
    }
    find_poles_in(
        params,
        SearchRect {
            re_min,
            re_max: params.gamma_tau(),
            im_min: im_center - im_halfwidth,
            im_max: im_center + im_halfwidth,
        },
    )
}

/// Window used to rebuild `β(t)`: `Re s >= re_min`, `Im s ∈ -Ω ± π|re_min|`.
pub fn reconstruction_poles(params: &GiantAtomParams, re_min: f64) -> Result<PoleSet> {
    find_poles(params, re_min, -params.omega_tau(), PI * re_min.abs())
}

/// Root search in an explicit rectangle.
pub fn find_poles_in(params: &GiantAtomParams, rect: SearchRect) -> Result<PoleSet> {
    let base_side = PI / (2.0 * params.n_legs() as f64);
    let mut roots: Vec<Complex64> = Vec::new();
    let mut flagged = Vec::new();
    let mut rect = rect;
    let mut winding = None;

    for refinement in 0..=MAX_REFINEMENTS {
        let side = base_side / (1 << refinement) as f64;
        let (found, failed) = seed_grid(params, &rect, side);
        merge_roots(&mut roots, found);
        flagged = failed;

        rect = clear_boundary(rect, &roots);
        let w = match winding {
            Some(w) => w,
            None => {
                let w = winding_with_resample(params, &mut rect)?;
                winding = Some(w);
                w
            }
        };
        let inside = roots.iter().filter(|s| rect.contains(**s)).count();
        if inside as i64 == w {
            break;
        }
        if refinement == MAX_REFINEMENTS {
            return Err(Error::IncompleteSearch {
                found: inside,
                expected: w,
            });
        }
    }

    let poles = roots
        .into_iter()
        .filter(|s| rect.contains(*s))
        .map(|s| {
            let (f, fp) = characteristic_with_derivative(params, s);
            Pole {
                s,
                weight: fp.inv(),
                residual: f.norm(),
            }
        })
        .collect();

    Ok(PoleSet {
        params: *params,
        rect,
        poles,
        winding: winding.unwrap_or(0),
        flagged_cells: flagged,
    })
}

/// `β(t) ≈ Σ_n w_n e^{s_n t}` over the poles in the set.
pub fn beta_from_poles(poles: &PoleSet, t: f64) -> Result<Complex64> {
    if poles.is_empty() {
        return Err(Error::EmptyPoleSet);
    }
    if !(t >= 0.0) {
        return Err(Error::validation(
            "t",
            format!("the residue series represents t >= 0 only, got {t}"),
        ));
    }
    Ok(poles.poles.iter().map(|p| p.weight * (p.s * t).exp()).sum())
}

fn seed_grid(
    params: &GiantAtomParams,
    rect: &SearchRect,
    side: f64,
) -> (Vec<Complex64>, Vec<SearchRect>) {
    let n_re = ((rect.re_max - rect.re_min) / side).ceil().max(1.0) as usize;
    let n_im = ((rect.im_max - rect.im_min) / side).ceil().max(1.0) as usize;
    let d_re = (rect.re_max - rect.re_min) / n_re as f64;
    let d_im = (rect.im_max - rect.im_min) / n_im as f64;

    let results: Vec<(Option<Complex64>, Option<SearchRect>)> = (0..n_re * n_im)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c % n_re, c / n_re);
            let cell = SearchRect {
                re_min: rect.re_min + i as f64 * d_re,
                re_max: rect.re_min + (i + 1) as f64 * d_re,
                im_min: rect.im_min + j as f64 * d_im,
                im_max: rect.im_min + (j + 1) as f64 * d_im,
            };
            let centre = Complex64::new(
                0.5 * (cell.re_min + cell.re_max),
                0.5 * (cell.im_min + cell.im_max),
            );
            if let Some(root) = newton(params, centre, side) {
                return (Some(root), None);
            }
            let quarter = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];
            for (a, b) in quarter {
                let seed = Complex64::new(cell.re_min + a * d_re, cell.im_min + b * d_im);
                if let Some(root) = newton(params, seed, side) {
                    return (Some(root), None);
                }
            }
            (None, Some(cell))
        })
        .collect();

    let mut roots = Vec::new();
    let mut failed = Vec::new();
    for (root, cell) in results {
        roots.extend(root);
        failed.extend(cell);
    }
    (roots, failed)
}

fn newton(params: &GiantAtomParams, seed: Complex64, max_step: f64) -> Option<Complex64> {
    let mut s = seed;
    let cap = max_step.max(0.5);
    let mut converged = 0;
    for _ in 0..NEWTON_MAX_ITER {
        let (f, fp) = characteristic_with_derivative(params, s);
        if fp.norm() == 0.0 || !fp.re.is_finite() || !fp.im.is_finite() {
            return None;
        }
        let mut step = f / fp;
        let len = step.norm();
        if !len.is_finite() {
            return None;
        }
        if len > cap {
            step *= cap / len;
        }
        s -= step;
        if len <= 1e-14 * (1.0 + s.norm()) {
            // a couple of extra sweeps settle the last bits
            converged += 1;
            if converged == 2 {
                break;
            }
        }
    }
    let residual = characteristic_fn(params, s).norm();
    (residual < RESIDUAL_TOLERANCE).then_some(s)
}

fn cmp_im_re(a: &Complex64, b: &Complex64) -> Ordering {
    a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re))
}

fn merge_roots(kept: &mut Vec<Complex64>, mut new: Vec<Complex64>) {
    new.sort_by(cmp_im_re);
    for s in new {
        if kept.iter().all(|k| (k - s).norm() > DEDUP_DISTANCE) {
            kept.push(s);
        }
    }
    kept.sort_by(cmp_im_re);
}

/// Pushes any edge that passes within `BOUNDARY_CLEARANCE` of a root outward.
fn clear_boundary(mut rect: SearchRect, roots: &[Complex64]) -> SearchRect {
    let nudge = 1e-6;
    for _ in 0..8 {
        let Some(s) = roots.iter().find(|s| {
            rect.grown(BOUNDARY_CLEARANCE).contains(**s)
                && rect.boundary_distance(**s) < BOUNDARY_CLEARANCE
        }) else {
            break;
        };
        if (s.re - rect.re_min).abs() < BOUNDARY_CLEARANCE {
            rect.re_min -= nudge;
        }
        if (s.re - rect.re_max).abs() < BOUNDARY_CLEARANCE {
            rect.re_max += nudge;
        }
        if (s.im - rect.im_min).abs() < BOUNDARY_CLEARANCE {
            rect.im_min -= nudge;
        }
        if (s.im - rect.im_max).abs() < BOUNDARY_CLEARANCE {
            rect.im_max += nudge;
        }
    }
    rect
}

fn winding_with_resample(params: &GiantAtomParams, rect: &mut SearchRect) -> Result<i64> {
    for _ in 0..8 {
        match winding_number(params, rect) {
            Some(w) => return Ok(w),
            None => *rect = rect.grown(1e-6),
        }
    }
    Err(Error::validation(
        "search rectangle",
        "boundary keeps passing through a root",
    ))
}

/// Number of roots inside `rect` (argument principle). `None` if the
/// boundary passes through or very close to a root.
pub fn winding_number(params: &GiantAtomParams, rect: &SearchRect) -> Option<i64> {
    let corners = rect.corners_ccw();
    let side = PI / (8.0 * params.n_legs() as f64);
    let mut total = 0.0;
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let pieces = ((b - a).norm() / side).ceil().max(1.0) as usize;
        for i in 0..pieces {
            let za = a + (b - a) * (i as f64 / pieces as f64);
            let zb = a + (b - a) * ((i + 1) as f64 / pieces as f64);
            total += arg_change(params, za, zb, 0)?;
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    ((turns - rounded).abs() < 1e-3).then_some(rounded as i64)
}

fn arg_change(params: &GiantAtomParams, za: Complex64, zb: Complex64, depth: u32) -> Option<f64> {
    let fa = characteristic_fn(params, za);
    let fb = characteristic_fn(params, zb);
    let scale = 1.0 + za.norm();
    if fa.norm() < 1e-9 * scale || fb.norm() < 1e-9 * scale {
        return None;
    }
    let delta = (fb / fa).arg();
    if delta.abs() < PI / 4.0 {
        // also guard against a full turn hidden between the endpoints
        let mid = 0.5 * (za + zb);
        let fm = characteristic_fn(params, mid);
        let d1 = (fm / fa).arg();
        let d2 = (fb / fm).arg();
        if ((d1 + d2) - delta).abs() < 1e-9 && d1.abs() < PI / 4.0 && d2.abs() < PI / 4.0 {
            return Some(delta);
        }
    }
    if depth > 40 {
        return None;
    }
    let mid = 0.5 * (za + zb);
    Some(arg_change(params, za, mid, depth + 1)? + arg_change(params, mid, zb, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darkstates::dark_condition_omega_tau;
    use crate::darkstates::DarkPair;
    use crate::dde::integrate_beta;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn single_dark() -> GiantAtomParams {
        let g = TAU * 0.018;
        GiantAtomParams::new(3, g, dark_condition_omega_tau(3, 1, g).unwrap()).unwrap()
    }

    #[test]
    fn finds_single_dark_root() {
        let p = single_dark();
        let set = find_poles(&p, -4.0, -p.omega_tau(), 6.0).unwrap();
        assert_eq!(set.len() as i64, set.winding);
        let dark: Vec<_> = set.dark(1e-10).collect();
        assert_eq!(dark.len(), 1);
        assert!((dark[0].s.im + 2.0 * PI / 3.0).abs() < 1e-10);
        assert!((dark[0].weight.re - 0.81553).abs() < 1e-5);
        assert!(dark[0].weight.im.abs() < 1e-10);
    }

    #[test]
    fn finds_pair_roots() {
        let pair = DarkPair::from_lattice(3, 5, 5, 1).unwrap();
        let p = pair.params().unwrap();
        let set = find_poles(&p, -6.0, -p.omega_tau(), 2.0 * PI).unwrap();
        let dark: Vec<f64> = set.dark(1e-10).map(|q| q.s.im).collect();
        assert_eq!(dark.len(), 2, "{dark:?}");
        assert!((dark[0] + 32.0 * PI / 3.0).abs() < 1e-9);
        assert!((dark[1] + 28.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn empty_region() {
        let p = GiantAtomParams::new(3, 50.0, 1.0).unwrap();
        // far right of every root: F(s) ≈ s there
        let set = find_poles_in(
            &p,
            SearchRect {
                re_min: 5.0,
                re_max: 8.0,
                im_min: -2.0,
                im_max: 2.0,
            },
        )
        .unwrap();
        assert!(set.is_empty());
        assert_eq!(set.winding, 0);
        assert!(matches!(
            beta_from_poles(&set, 1.0),
            Err(Error::EmptyPoleSet)
        ));
    }

    #[test]
    fn rejects_bad_rectangle() {
        let p = single_dark();
        assert!(find_poles(&p, 1.0, 0.0, 1.0).is_err());
        assert!(find_poles(&p, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn weight_sum_tends_to_jump_midpoint() {
        let p = single_dark();
        let distances: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&h| {
                let set = find_poles(&p, -12.0, -p.omega_tau(), h).unwrap();
                (set.weight_sum() - 0.5).norm()
            })
            .collect();
        assert!(distances.windows(2).all(|w| w[1] < w[0]), "{distances:?}");
        assert!(distances[2] < 0.03);
    }

    #[test]
    fn residue_series_matches_dde() {
        let p = single_dark();
        let trace = integrate_beta(&p, 50.0, 256).unwrap();
        let set = reconstruction_poles(&p, -10.0).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=450 {
            let t = 5.0 + 0.1 * k as f64;
            let d = (beta_from_poles(&set, t).unwrap() - trace.beta_at(t).unwrap()).norm();
            worst = worst.max(d);
        }
        assert!(worst < 1e-4, "{worst}");
        let late = beta_from_poles(&set, 400.0).unwrap();
        assert!((late.norm() - 0.81553).abs() < 1e-5);
    }

    #[test]
    fn poles_are_sorted_and_distinct() {
        let p = GiantAtomParams::new(4, 0.7, 3.0).unwrap();
        let set = find_poles(&p, -5.0, -3.0, 15.0).unwrap();
        for w in set.poles.windows(2) {
            assert!(cmp_im_re(&w[0].s, &w[1].s) == Ordering::Less);
            assert!((w[0].s - w[1].s).norm() > DEDUP_DISTANCE);
        }
        for pole in &set.poles {
            assert!(pole.residual < RESIDUAL_TOLERANCE);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn no_growing_modes(n in 2usize..6, g in 0.02f64..2.0, w in 0.5f64..30.0) {
            let p = GiantAtomParams::new(n, g, w).unwrap();
            let set = find_poles(&p, -4.0, -w, 8.0).unwrap();
            prop_assert_eq!(set.len() as i64, set.winding);
            for pole in &set.poles {
                prop_assert!(pole.s.re <= 1e-10, "{:?}", pole.s);
                prop_assert!(pole.residual < RESIDUAL_TOLERANCE);
            }
        }
    }
}
