use std::f64::consts::{PI, TAU};

use serde_json::{json, Value};

use giant_atom::continuum::{
    comb_pair_limit, continuum_dark_omega_t, continuum_profile, continuum_total_intensity,
};
use giant_atom::darkstates::{dark_condition_omega_tau, dark_states, find_pairs, scan_lattice};
use giant_atom::dde::integrate_beta;
use giant_atom::field::{bound_profile, intensity_map, total_intensity, GridSpec};
use giant_atom::quadrature::simpson_samples;
use giant_atom::spectral::find_poles;
use giant_atom::GiantAtomParams;

use crate::error::{CliError, CliResult};
use crate::output::{RunOutput, Table};
use crate::{
    AtomArgs, ContinuumArgs, DarkSearchArgs, FieldArgs, PolesArgs, ScanArgs, SimulateArgs,
};

fn resolve_atom(a: &AtomArgs) -> CliResult<GiantAtomParams> {
    // validates N and γτ before the dark condition is evaluated
    let base = GiantAtomParams::from_cycles(a.n_legs, a.gamma_tau_2pi, 1.0)?;
    let omega_tau = match (a.omega_tau_2pi, a.dark_n) {
        (Some(w), _) => TAU * w,
        (None, Some(n)) => dark_condition_omega_tau(a.n_legs, n, base.gamma_tau())?,
        (None, None) => {
            return Err(CliError::Usage(
                "one of --omega-tau-2pi or --dark-n is required".into(),
            ))
        }
    };
    Ok(base.with_omega_tau(omega_tau)?)
}

fn atom_json(a: &AtomArgs, p: &GiantAtomParams) -> Value {
    json!({
        "n_legs": a.n_legs,
        "gamma_tau_2pi": a.gamma_tau_2pi,
        "omega_tau_2pi": a.omega_tau_2pi,
        "dark_n": a.dark_n,
        "gamma_tau": p.gamma_tau(),
        "omega_tau": p.omega_tau(),
    })
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(a), Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

pub fn simulate(a: &SimulateArgs) -> CliResult<String> {
    let p = resolve_atom(&a.atom)?;
    if a.sample_every == 0 {
        return Err(CliError::Usage("--sample-every must be >= 1".into()));
    }
    if a.field {
        positive("--field-dt", a.field_dt)?;
        positive("--dx", a.dx)?;
        if !(a.x_margin.is_finite() && a.x_margin >= 0.0) {
            return Err(CliError::Usage(format!(
                "--x-margin must be >= 0, got {}",
                a.x_margin
            )));
        }
    }
    let trace = integrate_beta(&p, a.t_max, a.steps_per_tau)?;

    let mut out = RunOutput::create(&a.out_dir)?;
    let mut beta = Table::new(&["t", "re_beta", "im_beta", "prob"]);
    let mut last = (0.0, 0.0);
    for (t, b) in trace.full_steps().step_by(a.sample_every) {
        beta.push(vec![
            t.into(),
            b.re.into(),
            b.im.into(),
            b.norm_sqr().into(),
        ]);
        last = (t, b.norm_sqr());
    }
    out.write_table("beta.csv", &beta)?;

    let mut extra = String::new();
    if a.field {
        let count = (a.t_max / a.field_dt + 1e-9).floor() as usize;
        let times: Vec<f64> = (0..=count).map(|k| k as f64 * a.field_dt).collect();
        let spec = GridSpec {
            x_min: -a.x_margin,
            x_max: p.extent() + a.x_margin,
            dx: a.dx,
            times,
        };
        let mut pxt = Table::new(&["t", "x", "p"]);
        for grid in intensity_map(&p, &trace, &spec)? {
            for (x, v) in grid.points() {
                pxt.push(vec![grid.t.into(), x.into(), v.into()]);
            }
        }
        out.write_table("pxt.csv", &pxt)?;
        extra = format!(", pxt.csv {} rows", pxt.rows());
    }

    let params = merge(
        json!({
            "command": "simulate",
            "t_max": a.t_max,
            "steps_per_tau": a.steps_per_tau,
            "sample_every": a.sample_every,
            "field": a.field,
            "field_dt": a.field_dt,
            "dx": a.dx,
            "x_margin": a.x_margin,
        }),
        atom_json(&a.atom, &p),
    );
    out.finish(&params)?;
    Ok(format!(
        "simulate: {} rows in beta.csv{extra}; |β({})|² = {:.6}",
        beta.rows(),
        last.0,
        last.1
    ))
}

pub fn poles(a: &PolesArgs) -> CliResult<String> {
    let p = resolve_atom(&a.atom)?;
    let im_center = a.im_center.unwrap_or(-p.omega_tau());
    let im_halfwidth = a.im_halfwidth.unwrap_or(PI * a.re_min.abs());
    let set = find_poles(&p, a.re_min, im_center, im_halfwidth)?;

    let mut table = Table::new(&["re_s", "im_s", "re_weight", "im_weight", "residual", "dark"]);
    for pole in &set.poles {
        table.push(vec![
            pole.s.re.into(),
            pole.s.im.into(),
            pole.weight.re.into(),
            pole.weight.im.into(),
            pole.residual.into(),
            (pole.s.re.abs() <= giant_atom::darkstates::DARK_TOLERANCE).into(),
        ]);
    }
    let dark = set.dark(giant_atom::darkstates::DARK_TOLERANCE).count();
    let mut out = RunOutput::create(&a.out_dir)?;
    out.write_table("poles.csv", &table)?;
    let params = merge(
        json!({
            "command": "poles",
            "re_min": a.re_min,
            "im_center": im_center,
            "im_halfwidth": im_halfwidth,
            "rect": {
                "re_min": set.rect.re_min,
                "re_max": set.rect.re_max,
                "im_min": set.rect.im_min,
                "im_max": set.rect.im_max,
            },
            "winding": set.winding,
        }),
        atom_json(&a.atom, &p),
    );
    out.finish(&params)?;
    Ok(format!(
        "poles: {} roots (winding number {}), {dark} dark",
        set.len(),
        set.winding
    ))
}

pub fn dark_search(a: &DarkSearchArgs) -> CliResult<String> {
    let pairs = find_pairs(a.n_legs, a.p_max, a.q_max)?;
    let mut table = Table::new(&[
        "p",
        "q",
        "n",
        "n1",
        "n2",
        "omega_tau_2pi",
        "gamma_tau_2pi",
        "beat",
        "osc_amplitude",
        "rwa_ok",
    ]);
    for d in &pairs {
        table.push(vec![
            d.p.into(),
            d.q.into(),
            d.n.into(),
            d.n1.into(),
            d.n2.into(),
            d.omega_tau_2pi.into(),
            d.gamma_tau_2pi.into(),
            d.beat.into(),
            d.osc_amplitude.into(),
            d.rwa_ok.into(),
        ]);
    }
    let mut out = RunOutput::create(&a.out_dir)?;
    out.write_table("pairs.csv", &table)?;

    let mut summary = format!("dark-search: {} pairs for N = {}", pairs.len(), a.n_legs);
    if let (Some(g), Some(w)) = (a.gamma_tau_2pi, a.omega_tau_2pi) {
        let p = GiantAtomParams::from_cycles(a.n_legs, g, w)?;
        let states = dark_states(&p, a.n_max);
        let mut single = Table::new(&["n", "omega_n_tau_2pi", "amplitude", "intensity", "rwa_ok"]);
        for s in &states {
            single.push(vec![
                s.n.into(),
                (s.omega_n / TAU).into(),
                s.amplitude.into(),
                s.intensity.into(),
                s.rwa_ok.into(),
            ]);
        }
        out.write_table("dark_states.csv", &single)?;
        summary.push_str(&format!(
            ", {} dark states with n <= {}",
            states.len(),
            a.n_max
        ));
    }
    out.finish(&json!({
        "command": "dark-search",
        "n_legs": a.n_legs,
        "p_max": a.p_max,
        "q_max": a.q_max,
        "gamma_tau_2pi": a.gamma_tau_2pi,
        "omega_tau_2pi": a.omega_tau_2pi,
        "n_max": a.n_max,
    }))?;
    Ok(summary)
}

pub fn scan(a: &ScanArgs) -> CliResult<String> {
    if a.n_legs < 2 {
        return Err(CliError::Usage(format!(
            "--n-legs must be >= 2, got {}",
            a.n_legs
        )));
    }
    positive("--omega-tau-2pi-max", a.omega_tau_2pi_max)?;
    positive("--gamma-tau-2pi-max", a.gamma_tau_2pi_max)?;
    let scan = scan_lattice(
        a.n_legs,
        TAU * a.omega_tau_2pi_max,
        TAU * a.gamma_tau_2pi_max,
    );

    let mut dots = Table::new(&[
        "omega_tau_2pi",
        "gamma_tau_2pi",
        "n1",
        "n2",
        "osc_amplitude",
        "rwa_ok",
    ]);
    for d in &scan.dots {
        dots.push(vec![
            d.omega_tau_2pi.into(),
            d.gamma_tau_2pi.into(),
            d.n1.into(),
            d.n2.into(),
            d.osc_amplitude.into(),
            d.rwa_ok.into(),
        ]);
    }
    let mut lines = Table::new(&["n", "gamma_tau_2pi", "omega_tau_2pi"]);
    for line in &scan.lines {
        for &(g, w) in &line.points {
            lines.push(vec![line.n.into(), (g / TAU).into(), (w / TAU).into()]);
        }
    }
    let mut out = RunOutput::create(&a.out_dir)?;
    out.write_table("dots.csv", &dots)?;
    out.write_table("lines.csv", &lines)?;
    out.finish(&json!({
        "command": "scan",
        "n_legs": a.n_legs,
        "omega_tau_2pi_max": a.omega_tau_2pi_max,
        "gamma_tau_2pi_max": a.gamma_tau_2pi_max,
    }))?;
    Ok(format!(
        "scan: {} pair dots and {} dark-condition lines for N = {}",
        scan.dots.len(),
        scan.lines.len(),
        a.n_legs
    ))
}

pub fn field(a: &FieldArgs) -> CliResult<String> {
    positive("--dx", a.dx)?;
    let atom = AtomArgs {
        n_legs: a.n_legs,
        gamma_tau_2pi: a.gamma_tau_2pi,
        omega_tau_2pi: None,
        dark_n: Some(a.dark_n),
    };
    let p = resolve_atom(&atom)?;
    let extent = p.extent();
    let count = (extent / a.dx + 1e-9).floor() as usize;

    let mut table = Table::new(&["x", "p"]);
    let mut values = Vec::with_capacity(count + 1);
    for j in 0..=count {
        let x = j as f64 * a.dx;
        let v = bound_profile(&p, a.dark_n, x)?;
        values.push(v);
        table.push(vec![x.into(), v.into()]);
    }
    let closed = total_intensity(&p, a.dark_n)?;
    let mut out = RunOutput::create(&a.out_dir)?;
    out.write_table("profile.csv", &table)?;
    out.finish(&merge(
        json!({ "command": "field", "dx": a.dx, "total_intensity": closed }),
        atom_json(&atom, &p),
    ))?;
    Ok(format!(
        "field: {} samples of p_{}(x) on [0, {extent}], I(n) = {closed:.6} (samples integrate to {:.6})",
        values.len(),
        a.dark_n,
        simpson_samples(&values, a.dx)
    ))
}

pub fn continuum(a: &ContinuumArgs) -> CliResult<String> {
    positive("--length", a.length)?;
    if a.points < 2 {
        return Err(CliError::Usage(format!(
            "--points must be >= 2, got {}",
            a.points
        )));
    }
    let n = a.n;
    let gamma_t = match a.gamma_t_2pi {
        Some(v) => TAU * v,
        None => 2.0 * (n * n) as f64 * PI * PI,
    };
    let total = continuum_total_intensity(gamma_t, n)?;

    let mut table = Table::new(&["x", "p"]);
    for j in 0..a.points {
        let x = a.length * j as f64 / (a.points - 1) as f64;
        table.push(vec![
            x.into(),
            continuum_profile(gamma_t, n, a.length, x)?.into(),
        ]);
    }
    let mut out = RunOutput::create(&a.out_dir)?;
    out.write_table("continuum_profile.csv", &table)?;

    let mut comb_json = Value::Null;
    if let Some(n_legs) = a.comb_n_legs {
        let offset =
            u32::try_from(n).map_err(|_| CliError::Usage(format!("--n must be >= 1, got {n}")))?;
        let rec = comb_pair_limit(offset, n_legs)?;
        let mut comb = Table::new(&[
            "n_legs",
            "n1",
            "n2",
            "omega_tau_2pi",
            "gamma_tau_2pi",
            "gamma_t",
            "gamma_t_limit",
            "omega_plus_tau",
            "omega_minus_tau",
            "omega_plus_limit_tau",
            "omega_minus_limit_tau",
        ]);
        comb.push(vec![
            (rec.n_legs as i64).into(),
            rec.pair.n1.into(),
            rec.pair.n2.into(),
            rec.pair.omega_tau_2pi.into(),
            rec.pair.gamma_tau_2pi.into(),
            rec.gamma_t.into(),
            rec.gamma_t_limit.into(),
            rec.mode_frequencies.0.into(),
            rec.mode_frequencies.1.into(),
            rec.limit_frequencies.0.into(),
            rec.limit_frequencies.1.into(),
        ]);
        out.write_table("comb.csv", &comb)?;
        comb_json = json!(n_legs);
    }
    let omega_t = continuum_dark_omega_t(n, gamma_t);
    out.finish(&json!({
        "command": "continuum",
        "n": n,
        "gamma_t_2pi": a.gamma_t_2pi,
        "gamma_t": gamma_t,
        "omega_t": omega_t,
        "length": a.length,
        "points": a.points,
        "comb_n_legs": comb_json,
    }))?;
    Ok(format!(
        "continuum: n = {n}, ΓT = {gamma_t:.6}, dark at ΩT = {omega_t:.6}, I = {total:.6} (bound 3/8)"
    ))
}
