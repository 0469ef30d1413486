use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{
    AirfoilArgs, Cell, CliError, CommonArgs, FlowArgs, Format, Output, ProbeArgs, Rhs, RootsArgs,
    Run, Selector, Table, TransformArgs, VerifyArgs, WeightArgs, WeightId,
};
use crate::airfoil::{airfoil_residual, airfoil_solve};
use crate::cheb::{synth, Basis, ChebSeries, GridFunction, DEFAULT_N, TAIL_WARN_RATIO};
use crate::circle::{fht_via_circle_on, DEFAULT_M};
use crate::error::Error;
use crate::fht::{
    fht_apply, fht_series, fit_growth, nullspace_residual_on, parseval_check, probe_sweep, FhtInput,
};
use crate::func::{Bump, RealFn, SmoothTrial, TestFunction};
use crate::rootflow::{family_roots, flow_experiment, FlowConfig, DEFAULT_CELLS};
use crate::rootlab::{
    ks_to_arcsine, recurrence_from_weight, roots_via_jacobi, Family, RootSet,
    STIELTJES_OVERSAMPLING,
};

type CmdResult = Result<Run, CliError>;

const MAX_ROOTS_DEGREE: usize = 100_000;
const VERIFY_GRID: usize = 256;
const VERIFY_TOL: f64 = 1e-10;
const CIRCLE_POLY_LEN: usize = 12;
const CIRCLE_ANGLES: usize = 9;
const AIRFOIL_GRID: usize = 64;
const AIRFOIL_TOL: f64 = 1e-8;
const PROBE_GRID: usize = 4096;
const PROBE_EXCESS_TOL: f64 = 0.1;
const FLOW_DEGREE: usize = 400;
const NULLSPACE_VALUES: [f64; 6] = [1.0, -1.0, 1e3, -1e3, 1e-3, -1e-3];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn single_n(c: &CommonArgs, default: usize) -> Result<usize, CliError> {
    match c.n.as_slice() {
        [] => Ok(default),
        [0] => Err(usage("--n must be positive")),
        [n] => Ok(*n),
        _ => Err(usage("this command takes a single --n")),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be a positive number, got {v}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    command: &str,
    c: &CommonArgs,
    n: Value,
    grid: Value,
    tol: Value,
    format: Format,
    params: &impl Serialize,
) -> Value {
    json!({
        "command": command,
        "n": n,
        "grid": grid,
        "seed": c.seed,
        "format": format,
        "out": c.out.as_ref().map(|p| p.display().to_string()),
        "tol": tol,
        "params": params,
    })
}

fn run(
    command: &str,
    c: &CommonArgs,
    (n, grid, tol): (Value, Value, Value),
    default_format: Format,
    params: &impl Serialize,
    output: Output,
) -> CmdResult {
    let format = c.format.unwrap_or(default_format);
    Ok(Run {
        config: config(command, c, n, grid, tol, format, params),
        output,
        default_format,
    })
}

fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| usage(format!("bad sample {l:?} in {}: {e}", path.display())))
        })
        .collect()
}

pub fn transform(c: &CommonArgs, a: &TransformArgs) -> CmdResult {
    let tol = positive("--tol", c.tol.unwrap_or(TAIL_WARN_RATIO))?;
    let (input, catalog) = match a.selector {
        Selector::File => {
            let path = a
                .input
                .as_ref()
                .ok_or_else(|| usage("--selector file needs --input"))?;
            let values = read_samples(path)?;
            if !c.n.is_empty() && c.n != [values.len()] {
                return Err(usage(format!(
                    "--n {:?} does not match the {} samples in the file",
                    c.n,
                    values.len()
                )));
            }
            let f = GridFunction::from_values(values).map_err(|e| usage(e.to_string()))?;
            (FhtInput::new(f), None)
        }
        sel => {
            let f = match sel {
                Selector::NullFamily => TestFunction::NullFamily { c: a.c },
                Selector::Tk => TestFunction::TkOverWeight { k: a.k },
                Selector::Indicator => TestFunction::Indicator,
                _ => {
                    let b = Bump::new(a.center, a.width);
                    if !b.is_interior() {
                        return Err(usage(format!("bump {b:?} leaves (-1, 1)")));
                    }
                    TestFunction::Bump(b)
                }
            };
            let n = single_n(c, DEFAULT_N)?;
            (FhtInput::from_fn(n, &f)?, Some(f))
        }
    };
    let n = input.n();
    let tail = *input.tail();
    if !tail.is_resolved(tol) {
        let err = Error::Resolution {
            tail_ratio: tail.tail_ratio,
            threshold: tol,
        };
        if a.strict {
            return Err(err.into());
        }
        eprintln!("warning: {err}");
    }
    let input = input.with_tail_tolerance(f64::INFINITY);
    let mut table = Table::new(&["x", "f", "Hf"]);
    if a.at.is_empty() {
        let hf = fht_apply(&input)?;
        let xs = input.f().nodes();
        for j in (0..n).rev() {
            table.push(vec![
                xs[j].into(),
                input.f().values()[j].into(),
                hf.values()[j].into(),
            ]);
        }
    } else {
        let series = fht_series(&input)?;
        for &x in &a.at {
            if !(x > -1.0 && x < 1.0) {
                return Err(usage(format!("--at point {x} is not inside (-1, 1)")));
            }
            let f = match &catalog {
                Some(f) => f.eval(x),
                None => synth(input.series(), x)? / (1.0 - x * x).sqrt(),
            };
            table.push(vec![x.into(), f.into(), synth(&series, x)?.into()]);
        }
    }
    let mut summary = Map::new();
    summary.insert("a0".into(), json!(input.a0()));
    summary.insert("tail_ratio".into(), json!(tail.tail_ratio));
    summary.insert("resolved".into(), json!(tail.is_resolved(tol)));
    let output = Output {
        table: Some(table),
        summary,
        failures: Vec::new(),
    };
    run(
        "transform",
        c,
        (json!(n), Value::Null, json!(tol)),
        Format::Csv,
        a,
        output,
    )
}

fn trial_seeds(master: &mut ChaCha8Rng, count: usize) -> Vec<u64> {
    (0..count).map(|_| master.next_u64()).collect()
}

fn worst(results: Vec<(f64, u64)>) -> (f64, Option<u64>) {
    results.into_iter().fold((0.0, None), |(g, s), (gi, si)| {
        if gi > g || s.is_none() {
            (gi, Some(si))
        } else {
            (g, s)
        }
    })
}

fn parseval_trial(seed: u64, degree: usize, n: usize, nonzero_mean: bool) -> Result<f64, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(1..=degree);
    let mut a: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    a[0] = if nonzero_mean {
        rng.gen_range(0.5..1.5)
    } else {
        0.0
    };
    let input = FhtInput::from_weighted_series(&ChebSeries::new(Basis::FirstKind, a)?, n)?;
    match parseval_check(&input) {
        Ok(r) => Ok(r.rel_gap),
        Err(Error::MeanValueNonzero {
            lhs, corrected_rhs, ..
        }) if nonzero_mean => Ok((lhs - corrected_rhs).abs() / corrected_rhs),
        Err(e) => Err(e),
    }
}

fn circle_trial(seed: u64, n: usize, m: usize) -> Result<f64, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = SmoothTrial::random(&mut rng, CIRCLE_POLY_LEN);
    let series = fht_series(&FhtInput::from_fn(n, &f)?)?;
    let mut gap: f64 = 0.0;
    for i in 0..CIRCLE_ANGLES {
        let psi = PI / 6.0 + i as f64 * (2.0 * PI / 3.0) / (CIRCLE_ANGLES - 1) as f64;
        let via_circle = fht_via_circle_on(&f, psi, m)?;
        gap = gap.max((via_circle - synth(&series, psi.cos())?).abs());
    }
    Ok(gap)
}

pub fn verify(c: &CommonArgs, a: &VerifyArgs) -> CmdResult {
    let n = single_n(c, VERIFY_GRID)?;
    let m = c.grid.unwrap_or(DEFAULT_M);
    let tol = positive("--tol", c.tol.unwrap_or(VERIFY_TOL))?;
    let circle_tol = positive("--circle-tol", a.circle_tol)?;
    if a.trials == 0 || a.degree == 0 {
        return Err(usage("--trials and --degree must be positive"));
    }
    if a.degree + 1 > n {
        return Err(usage(format!(
            "degree {} needs --n >= {}",
            a.degree,
            a.degree + 1
        )));
    }
    if !m.is_power_of_two() || m < 2 {
        return Err(usage(format!("--grid {m} must be a power of two")));
    }
    let mut master = ChaCha8Rng::seed_from_u64(c.seed);
    let parseval_seeds = trial_seeds(&mut master, a.trials);
    let circle_seeds = trial_seeds(&mut master, a.circle_functions);

    let parseval: Vec<(f64, u64)> = parseval_seeds
        .par_iter()
        .map(|&s| parseval_trial(s, a.degree, n, a.nonzero_mean).map(|g| (g, s)))
        .collect::<Result<_, _>>()?;
    let (max_rel_gap, parseval_seed) = worst(parseval);

    let mut null_max: f64 = 0.0;
    for &cv in &NULLSPACE_VALUES {
        null_max = null_max.max(nullspace_residual_on(cv, n)? / cv.abs());
    }

    let circle: Vec<(f64, u64)> = circle_seeds
        .par_iter()
        .map(|&s| circle_trial(s, n, m).map(|g| (g, s)))
        .collect::<Result<_, _>>()?;
    let (max_abs_gap, circle_seed) = worst(circle);

    let mut failures = Vec::new();
    if max_rel_gap > tol {
        failures.push(format!(
            "parseval gap {max_rel_gap:e} > {tol:e} (trial seed {})",
            parseval_seed.unwrap_or_default()
        ));
    }
    if null_max > tol {
        failures.push(format!("null-space residual {null_max:e} > {tol:e}"));
    }
    if max_abs_gap > circle_tol {
        failures.push(format!(
            "circle gap {max_abs_gap:e} > {circle_tol:e} (trial seed {})",
            circle_seed.unwrap_or_default()
        ));
    }

    let mut table = Table::new(&["check", "value", "threshold", "passed"]);
    for (name, v, th) in [
        ("parseval", max_rel_gap, tol),
        ("nullspace", null_max, tol),
        ("circle_consistency", max_abs_gap, circle_tol),
    ] {
        table.push(vec![
            name.into(),
            v.into(),
            th.into(),
            Cell::Int((v <= th) as u64),
        ]);
    }
    let mut summary = Map::new();
    summary.insert(
        "parseval".into(),
        json!({
            "trials": a.trials,
            "max_rel_gap": max_rel_gap,
            "threshold": tol,
            "corrected_identity": a.nonzero_mean,
            "worst_seed": parseval_seed,
        }),
    );
    summary.insert(
        "nullspace".into(),
        json!({ "max_residual": null_max, "threshold": tol, "c": NULLSPACE_VALUES }),
    );
    summary.insert(
        "circle_consistency".into(),
        json!({
            "functions": a.circle_functions,
            "max_abs_gap": max_abs_gap,
            "threshold": circle_tol,
            "worst_seed": circle_seed,
        }),
    );
    summary.insert("passed".into(), json!(failures.is_empty()));
    let output = Output {
        table: Some(table),
        summary,
        failures,
    };
    run(
        "verify",
        c,
        (json!(n), json!(m), json!(tol)),
        Format::Json,
        a,
        output,
    )
}

fn family(w: &WeightArgs) -> Family {
    match w.weight {
        WeightId::Chebyshev => Family::Chebyshev,
        WeightId::Legendre => Family::Legendre,
        WeightId::Jacobi => Family::Jacobi {
            a: w.alpha,
            b: w.beta,
        },
        WeightId::Hermite => Family::Hermite,
    }
}

fn stieltjes_roots(fam: &Family, n: usize, q: usize) -> Result<RootSet, Error> {
    let w = fam
        .weight()
        .ok_or_else(|| Error::InvalidArgument("no weight on (-1, 1) for this family".into()))?;
    roots_via_jacobi(&recurrence_from_weight(w, n, q)?, n)
}

pub fn roots(c: &CommonArgs, a: &RootsArgs) -> CmdResult {
    let ns = if c.n.is_empty() {
        vec![100]
    } else {
        c.n.clone()
    };
    if let Some(&n) = ns.iter().find(|&&n| n == 0 || n > MAX_ROOTS_DEGREE) {
        return Err(usage(format!("degree {n} outside 1..={MAX_ROOTS_DEGREE}")));
    }
    let fam = family(&a.weight);
    if a.stieltjes && fam == Family::Hermite {
        return Err(usage("--stieltjes needs a weight on (-1, 1)"));
    }
    let tol = c.tol.map(|t| positive("--tol", t)).transpose()?;
    let runs: Vec<(usize, RootSet, f64, f64)> = ns
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let rs = if a.stieltjes {
                stieltjes_roots(&fam, n, c.grid.unwrap_or(STIELTJES_OVERSAMPLING * n))?
            } else {
                family_roots(&fam, n)?
            };
            let ks = ks_to_arcsine(&rs)?;
            Ok((n, rs, ks, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<_, Error>>()?;

    let mut table = Table::new(&["n", "index", "root"]);
    let mut summary_runs = Vec::new();
    let mut failures = Vec::new();
    for (n, rs, ks, secs) in &runs {
        for (i, r) in rs.roots().iter().enumerate() {
            table.push(vec![(*n).into(), i.into(), (*r).into()]);
        }
        let mut entry = json!({ "n": n, "ks_to_arcsine": ks });
        if a.timing {
            entry["runtime_s"] = json!(secs);
        }
        summary_runs.push(entry);
        if let Some(t) = tol {
            if *ks > t {
                failures.push(format!("n = {n}: ks {ks:e} > {t:e}"));
            }
        }
    }
    let mut summary = Map::new();
    summary.insert("runs".into(), Value::Array(summary_runs));
    let grid = if a.stieltjes {
        json!(c.grid)
    } else {
        Value::Null
    };
    let output = Output {
        table: Some(table),
        summary,
        failures,
    };
    run(
        "roots",
        c,
        (json!(ns), grid, json!(tol)),
        Format::Csv,
        a,
        output,
    )
}

pub fn flow(c: &CommonArgs, a: &FlowArgs) -> CmdResult {
    let n = single_n(c, FLOW_DEGREE)?;
    let cells = c.grid.unwrap_or(DEFAULT_CELLS);
    let fam = family(&a.weight);
    let default_tol = if fam == Family::Hermite { 0.08 } else { 0.05 };
    let tol = positive("--tol", c.tol.unwrap_or(default_tol))?;
    let dt = positive("--dt", a.dt)?;
    let mass_tol = positive("--mass-tol", a.mass_tol)?;
    if !(0.0..1.0).contains(&a.t) {
        return Err(usage(format!("--t {} outside [0, 1)", a.t)));
    }
    if a.bins == 0 {
        return Err(usage("--bins must be positive"));
    }
    let mut times = if a.snapshots.is_empty() {
        vec![0.0, 0.5 * a.t]
    } else {
        a.snapshots.clone()
    };
    if times.iter().any(|s| !(0.0..=a.t).contains(s)) {
        return Err(usage(format!("snapshot times must lie in [0, {}]", a.t)));
    }
    times.sort_by(f64::total_cmp);

    let (cmp, snaps) = flow_experiment(&fam, a.t, n, FlowConfig { cells, dt }, &times)?;

    let mut table = Table::new(&["series", "t", "x", "density"]);
    for p in snaps.iter().chain(std::iter::once(&cmp.profile)) {
        for (x, u) in p.grid().iter().zip(p.u()) {
            table.push(vec!["pde".into(), p.t().into(), (*x).into(), (*u).into()]);
        }
    }
    // histogram scaled to the PDE mass so the two curves overlay
    let width = 2.0 / a.bins as f64;
    let mut counts = vec![0usize; a.bins];
    for r in cmp.roots.roots() {
        let b = (((r + 1.0) / width).floor().max(0.0) as usize).min(a.bins - 1);
        counts[b] += 1;
    }
    let total = cmp.roots.degree() as f64;
    let mass = cmp.mass();
    for (b, &k) in counts.iter().enumerate() {
        let x = -1.0 + (b as f64 + 0.5) * width;
        let density = k as f64 / (total * width) * mass;
        table.push(vec![
            "roots".into(),
            cmp.profile.t().into(),
            x.into(),
            density.into(),
        ]);
    }

    let expected = 1.0 - a.t;
    let mass_error = (mass - expected).abs();
    let mut failures = Vec::new();
    if cmp.ks > tol {
        failures.push(format!("ks {:e} > {tol:e}", cmp.ks));
    }
    if mass_error > mass_tol {
        failures.push(format!("mass error {mass_error:e} > {mass_tol:e}"));
    }
    let mut summary = Map::new();
    summary.insert("ks_pde_vs_empirical".into(), json!(cmp.ks));
    summary.insert("ks_threshold".into(), json!(tol));
    summary.insert("mass".into(), json!(mass));
    summary.insert("expected_mass".into(), json!(expected));
    summary.insert("mass_error".into(), json!(mass_error));
    summary.insert("mass_threshold".into(), json!(mass_tol));
    summary.insert("derivatives".into(), json!(cmp.derivatives));
    summary.insert("clipped_cells".into(), json!(cmp.clipped));
    summary.insert("passed".into(), json!(failures.is_empty()));
    let output = Output {
        table: Some(table),
        summary,
        failures,
    };
    run(
        "flow",
        c,
        (json!(n), json!(cells), json!(tol)),
        Format::Csv,
        a,
        output,
    )
}

pub fn airfoil(c: &CommonArgs, a: &AirfoilArgs) -> CmdResult {
    let n = single_n(c, AIRFOIL_GRID)?;
    let tol = positive("--tol", c.tol.unwrap_or(AIRFOIL_TOL))?;
    if !a.c.is_finite() {
        return Err(usage("--c must be finite"));
    }
    let uk = ChebSeries::unit(Basis::SecondKind, a.k, a.k + 1);
    let g = GridFunction::sample(n, |x| match a.g {
        Rhs::One => 1.0,
        Rhs::Zero => 0.0,
        Rhs::Uk => synth(&uk, x).unwrap_or(f64::NAN),
    })?;
    let base = airfoil_solve(&g, 0.0)?;
    let user = airfoil_solve(&g, a.c)?;
    let residual = airfoil_residual(&base, &g)?.max(airfoil_residual(&user, &g)?);
    let f0 = base.sample(n)?;
    let fc = user.sample(n)?;
    let xs = g.nodes();
    let mut table = Table::new(&["x", "f_c0", "f_c"]);
    for j in (0..n).rev() {
        table.push(vec![
            xs[j].into(),
            f0.values()[j].into(),
            fc.values()[j].into(),
        ]);
    }
    let mut failures = Vec::new();
    if residual > tol {
        failures.push(format!("residual {residual:e} > {tol:e}"));
    }
    let mut summary = Map::new();
    summary.insert("residual".into(), json!(residual));
    summary.insert("residual_threshold".into(), json!(tol));
    summary.insert("c".into(), json!(a.c));
    summary.insert("coefficients".into(), json!(user.coefficients().coeffs()));
    summary.insert("passed".into(), json!(failures.is_empty()));
    let output = Output {
        table: Some(table),
        summary,
        failures,
    };
    run(
        "airfoil",
        c,
        (json!(n), Value::Null, json!(tol)),
        Format::Csv,
        a,
        output,
    )
}

pub fn probe(c: &CommonArgs, a: &ProbeArgs) -> CmdResult {
    let n = single_n(c, PROBE_GRID)?;
    let tol = positive("--tol", c.tol.unwrap_or(PROBE_EXCESS_TOL))?;
    if a.widths.is_empty() {
        return Err(usage("--widths needs at least one value"));
    }
    if let Some(w) = a.widths.iter().find(|w| !(**w > 0.0 && **w <= 2.0)) {
        return Err(usage(format!("bump width {w} outside (0, 2]")));
    }
    let reports = probe_sweep(&a.widths, n)?;
    let mut table = Table::new(&[
        "width",
        "inner_norm",
        "deriv_norm",
        "outer_norm",
        "log_ratio",
    ]);
    for (w, r) in a.widths.iter().zip(&reports) {
        table.push(vec![
            (*w).into(),
            r.inner_norm.into(),
            r.deriv_norm.into(),
            r.outer_norm.into(),
            r.log_ratio.into(),
        ]);
    }
    let mut summary = Map::new();
    let mut failures = Vec::new();
    if reports.len() >= 3 {
        let fit = fit_growth(&reports)?;
        if fit.superlinear_excess > tol {
            failures.push(format!(
                "superlinear excess {:e} > {tol:e}",
                fit.superlinear_excess
            ));
        }
        summary.insert(
            "fit".into(),
            serde_json::to_value(fit).map_err(|e| usage(e.to_string()))?,
        );
    }
    summary.insert("probes".into(), json!(reports.len()));
    summary.insert("passed".into(), json!(failures.is_empty()));
    let output = Output {
        table: Some(table),
        summary,
        failures,
    };
    run(
        "probe",
        c,
        (json!(n), Value::Null, json!(tol)),
        Format::Csv,
        a,
        output,
    )
}
