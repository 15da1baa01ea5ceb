use std::io::BufReader;

use hamca::conservation::verify_theorem_a;
use hamca::continuum::{dispersion, ContinuumSignal};
use hamca::engine::{evolve, CAHistory};
use hamca::exact::{GaussMatrix, GaussianInt, HamiltonianSpec};
use hamca::io::{read_history_jsonl, write_continuum_csv, write_history_jsonl, write_residual_csv, write_tensor_json, write_uncertainty_csv};
use hamca::multipartite::{build_product, correlation_check, MultiHistory};
use hamca::random::task_rng;
use hamca::spectral::{detect_cycle, growth_rate, ontology_scan, spectrum, ClosedForm};
use hamca::suite::{run_suite, SuiteConfig, SuiteReport};
use hamca::uncertainty::{gaussian_state, min_delta_x_search, random_guarded_state, uncertainty_report, UncertaintyReport};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, Grid, Loaded};
use crate::error::{CliError, Kind};
use crate::output::OutDir;

pub const COMMANDS: [&str; 9] = [
    "evolve",
    "conserve",
    "closed-form",
    "cycle",
    "reconstruct",
    "dispersion",
    "multi",
    "uncertainty",
    "suite",
];

pub struct Ctx<'a> {
    pub cfg: &'a Loaded,
    pub out: &'a mut OutDir,
    pub seed: u64,
    pub format: Format,
}

/// Result of a command: the summary printed on stdout and any failure that
/// should set the exit code after outputs are written.
pub struct Outcome {
    pub summary: Value,
    pub timings: Option<Value>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(summary: Value) -> Self {
        Outcome {
            summary,
            timings: None,
            failure: None,
        }
    }
}

pub fn dispatch(command: &str, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    match command {
        "evolve" => cmd_evolve(ctx),
        "conserve" => cmd_conserve(ctx),
        "closed-form" => cmd_closed_form(ctx),
        "cycle" => cmd_cycle(ctx),
        "reconstruct" => cmd_reconstruct(ctx),
        "dispersion" => cmd_dispersion(ctx),
        "multi" => cmd_multi(ctx),
        "uncertainty" => cmd_uncertainty(ctx),
        "suite" => cmd_suite(ctx),
        other => Err(CliError::new(
            Kind::Usage,
            format!("unknown command {other:?}; expected one of {}", COMMANDS.join(", ")),
        )),
    }
}

fn to_io(e: impl std::fmt::Display) -> CliError {
    CliError::new(Kind::Io, e.to_string())
}

/// Writes a table as `<stem>.csv` or `<stem>.jsonl`.
fn write_table(ctx: &mut Ctx, stem: &str, header: &[&str], rows: &[Vec<Value>]) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match ctx.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(to_io)?;
            for row in rows {
                let cells = row.iter().map(|v| match v {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                });
                w.write_record(cells).map_err(to_io)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for row in rows {
                let obj: serde_json::Map<String, Value> =
                    header.iter().map(|h| h.to_string()).zip(row.iter().cloned()).collect();
                serde_json::to_writer(&mut buf, &obj).map_err(to_io)?;
                buf.push(b'\n');
            }
        }
    }
    ctx.out.write(&format!("{stem}.{}", ext(ctx.format)), &buf)
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    }
}

fn write_jsonl_rows<T: Serialize>(ctx: &mut Ctx, name: &str, rows: &[T]) -> Result<(), CliError> {
    let mut buf = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut buf, r).map_err(to_io)?;
        buf.push(b'\n');
    }
    ctx.out.write(name, &buf)
}

fn gauss(z: &GaussianInt) -> Value {
    Value::String(z.to_string())
}

/// History from `history` (file) or from evolving `H, psi0, psi1` for `N` steps.
fn history(ctx: &Ctx) -> Result<CAHistory, CliError> {
    let cfg = ctx.cfg;
    if let Some(path) = &cfg.config.history {
        let file = std::fs::File::open(cfg.resolve(path))
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let hist = read_history_jsonl(BufReader::new(file)).map_err(|e| CliError::config(e.to_string()))?;
        return Ok(hist.with_scale(cfg.config.l)?);
    }
    let h = cfg.hamiltonian(cfg.config.h.as_ref())?;
    let psi0 = cfg.vector(cfg.config.psi0.as_ref(), "psi0")?;
    let psi1 = cfg.vector(cfg.config.psi1.as_ref(), "psi1")?;
    Ok(evolve(&psi0, &psi1, &h, cfg.steps()?)?.with_scale(cfg.config.l)?)
}

fn cmd_evolve(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let hist = history(ctx)?;
    match ctx.format {
        Format::Jsonl => {
            let mut buf = Vec::new();
            write_history_jsonl(&hist, &mut buf)?;
            ctx.out.write("history.jsonl", &buf)?;
        }
        Format::Csv => {
            let rows: Vec<Vec<Value>> = hist
                .states()
                .iter()
                .enumerate()
                .flat_map(|(n, psi)| {
                    psi.iter()
                        .enumerate()
                        .map(move |(a, z)| vec![json!(n), json!(a), json!(z.re.to_string()), json!(z.im.to_string())])
                })
                .collect();
            write_table(ctx, "history", &["n", "alpha", "re", "im"], &rows)?;
        }
    }
    let spec = spectrum(hist.hamiltonian());
    let summary = json!({
        "command": "evolve",
        "dim": hist.dim(),
        "steps": hist.last_index(),
        "solution": hist.is_solution(),
        "admissible": spec.admissible,
        "max_abs_eigenvalue": spec.max_abs_eigenvalue(),
        "growth_rate": growth_rate(&spec),
        "final_norm_sqr": hist.state(hist.last_index()).norm_sqr().to_string(),
    });
    ctx.out.write_json("summary.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn cmd_conserve(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let hist = history(ctx)?;
    if hist.last_index() < 1 {
        return Err(CliError::config("conserve needs N >= 1"));
    }
    let h = hist.hamiltonian().matrix().clone();
    let gs: Vec<GaussMatrix> = match &ctx.cfg.config.g {
        Some(list) => list
            .iter()
            .map(|s| ctx.cfg.fetch(s, "G"))
            .collect::<Result<_, _>>()?,
        None => vec![
            GaussMatrix::identity(hist.dim()),
            h.clone(),
            h.polynomial(&[GaussianInt::real(3), GaussianInt::real(2), GaussianInt::real(1)]),
        ],
    };
    let reports = gs
        .par_iter()
        .map(|g| verify_theorem_a(&hist, g))
        .collect::<Result<Vec<_>, _>>()?;
    let mut entries = Vec::new();
    for (k, r) in reports.iter().enumerate() {
        let rows: Vec<Vec<Value>> = r
            .series
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![json!(i + 1), json!(v.re.to_string()), json!(v.im.to_string())])
            .collect();
        write_table(ctx, &format!("q_{k}"), &["n", "re_q", "im_q"], &rows)?;
        entries.push(json!({
            "index": k,
            "commutes": r.commutes,
            "holds": r.holds(),
            "first_drift": r.first_drift,
            "first_local_violation": r.first_local_violation,
            "is_real": r.series.is_real,
            "q_first": r.series.values.first().map(gauss),
        }));
    }
    let summary = json!({
        "command": "conserve",
        "steps": hist.last_index(),
        "solution": hist.is_solution(),
        "observables": entries,
    });
    ctx.out.write_json("conserve.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn cmd_closed_form(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let hist = history(ctx)?;
    let spec = spectrum(hist.hamiltonian());
    if !spec.admissible {
        return Err(CliError::precondition(format!(
            "spectrum leaves the band [-2, 2] (max |l eps| = {}); closed form not evaluated",
            spec.max_abs_eigenvalue()
        )));
    }
    let cf = ClosedForm::new(hist.state(0), hist.state(1), hist.hamiltonian())?;
    let mut worst: f64 = 0.0;
    let rows: Vec<Vec<Value>> = hist
        .states()
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let exact = s.to_complex();
            let approx = cf.state(n as i64);
            let diff: f64 = exact.iter().zip(&approx).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let scale = exact.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let rel = diff / scale.max(1.0);
            worst = worst.max(rel);
            vec![json!(n), json!(scale), json!(rel)]
        })
        .collect();
    write_table(ctx, "closed_form", &["n", "norm", "relative_deviation"], &rows)?;
    let summary = json!({
        "command": "closed-form",
        "steps": hist.last_index(),
        "eigenvalues": spec.eigenvalues,
        "norm_bound": cf.norm_bound(),
        "max_relative_deviation": worst,
    });
    ctx.out.write_json("closed_form.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn cmd_cycle(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let h = cfg.hamiltonian(cfg.config.h.as_ref())?;
    let psi0 = cfg.vector(cfg.config.psi0.as_ref(), "psi0")?;
    let psi1 = cfg.vector(cfg.config.psi1.as_ref(), "psi1")?;
    let max_steps = cfg.config.max_steps.unwrap_or(10_000);
    let report = detect_cycle(&psi0, &psi1, &h, max_steps)?;
    let mut summary = json!({
        "command": "cycle",
        "antiperiod": report.antiperiod,
        "period": report.period,
        "ontological": report.ontological,
        "first_superposition_index": report.first_superposition_index,
        "steps_scanned": report.steps_scanned,
    });
    if let Some(basis) = &cfg.config.basis {
        let basis = basis.iter().map(|b| cfg.fetch(b, "basis")).collect::<Result<Vec<_>, _>>()?;
        let run = evolve(&psi0, &psi1, &h, report.steps_scanned + 1)?;
        let scan = ontology_scan(&run, &basis)?;
        summary["ontological"] = json!(scan.ontological);
        summary["first_superposition_index"] = json!(scan.first_superposition_index);
    }
    ctx.out.write_json("cycle.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn cmd_reconstruct(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let hist = history(ctx)?;
    let sig = ContinuumSignal::from_history(&hist, ctx.cfg.config.guard)?;
    let (lo, hi) = sig.guarded_interval();
    let ts = match &ctx.cfg.config.times {
        Some(g) => g.points()?,
        None => Grid {
            start: lo,
            stop: hi,
            step: hist.scale() / 4.0,
        }
        .points()?,
    };
    let rows = ts
        .par_iter()
        .map(|&t| sig.sweep(&[t]).map(|mut r| r.remove(0)))
        .collect::<Result<Vec<_>, _>>()?;
    let name = format!("continuum.{}", ext(ctx.format));
    match ctx.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_continuum_csv(&rows, hist.dim(), &mut buf)?;
            ctx.out.write(&name, &buf)?;
        }
        Format::Jsonl => write_jsonl_rows(ctx, &name, &rows)?,
    }
    let max_residual = rows.iter().filter_map(|r| r.residual_norm).fold(0.0, f64::max);
    let summary = json!({
        "command": "reconstruct",
        "points": rows.len(),
        "guarded_interval": [lo, hi],
        "max_residual_norm": max_residual,
    });
    ctx.out.write_json("reconstruct.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn cmd_dispersion(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let l = ctx.cfg.config.l;
    let grid = ctx.cfg.config.grid.clone().unwrap_or(Grid {
        start: -2.0,
        stop: 2.0,
        step: 0.25,
    });
    let pts = grid.points()?;
    let rows = pts
        .iter()
        .map(|&le| Ok(vec![json!(le), json!(l * dispersion(le, l)?)]))
        .collect::<Result<Vec<_>, hamca::Error>>()?;
    write_table(ctx, "dispersion", &["l_epsilon", "l_E"], &rows)?;
    Ok(Outcome::ok(json!({
        "command": "dispersion",
        "points": rows.len(),
        "first": rows.first(),
        "last": rows.last(),
    })))
}

fn cmd_multi(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let multi = cfg.config.multi.as_ref().ok_or_else(|| CliError::config("missing section multi"))?;
    if multi.factors.is_empty() {
        return Err(CliError::config("multi needs at least one factor"));
    }
    let mut factors = Vec::new();
    for f in &multi.factors {
        let h = cfg.hamiltonian(Some(&f.h))?;
        let psi0 = cfg.fetch(&f.psi0, "psi0")?;
        let psi1 = cfg.fetch(&f.psi1, "psi1")?;
        if f.clock < 2 {
            return Err(CliError::config("each clock needs at least 2 slices"));
        }
        factors.push(evolve(&psi0, &psi1, &h, f.clock - 1)?.with_scale(cfg.config.l)?);
    }
    let product = build_product(&factors)?;
    let psi = match &multi.interaction {
        Some(src) => {
            let i = cfg.fetch(src, "interaction")?;
            let hams: Vec<HamiltonianSpec> = product.hamiltonians().to_vec();
            MultiHistory::new(product.clocks().to_vec(), product.values().to_vec(), hams, Some(i), cfg.config.l)?
        }
        None => product,
    };
    let mut buf = Vec::new();
    write_tensor_json(&psi, &mut buf)?;
    ctx.out.write("tensor.json", &buf)?;
    let residuals = psi.residual_map()?;
    let name = format!("residual.{}", ext(ctx.format));
    match ctx.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_residual_csv(&residuals, psi.m(), &mut buf)?;
            ctx.out.write(&name, &buf)?;
        }
        Format::Jsonl => write_jsonl_rows(ctx, &name, &residuals)?,
    }
    let nonzero = residuals.iter().filter(|e| !e.value.is_zero()).count();
    let mut summary = json!({
        "command": "multi",
        "m": psi.m(),
        "dims": psi.dims(),
        "clocks": psi.clocks(),
        "interacting": psi.interaction().is_some(),
        "residual_entries": residuals.len(),
        "nonzero_residuals": nonzero,
        "first_violation": psi.first_eom_violation()?,
    });
    if let Some(gs) = &multi.g {
        if gs.len() != 2 {
            return Err(CliError::config("multi.G needs exactly two matrices"));
        }
        let g1 = cfg.fetch(&gs[0], "G")?;
        let g2 = cfg.fetch(&gs[1], "G")?;
        summary["correlation"] = serde_json::to_value(correlation_check(&psi, &g1, &g2)?).map_err(to_io)?;
    }
    ctx.out.write_json("multi.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn cmd_uncertainty(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let u = &ctx.cfg.config.uncertainty;
    let l = ctx.cfg.config.l;
    let seed = ctx.seed;
    let mut rows: Vec<(String, UncertaintyReport)> = (0..u.random_states)
        .into_par_iter()
        .map(|k| {
            let mut rng = task_rng(seed, k as u64);
            let st = random_guarded_state(&mut rng, u.half_width, l)?;
            Ok((format!("random_{k}"), uncertainty_report(&st)?))
        })
        .collect::<Result<_, hamca::Error>>()?;
    for (k, g) in u.gaussians.iter().enumerate() {
        let st = gaussian_state(u.half_width, l, g.sigma, g.k)?;
        rows.push((format!("gaussian_{k}"), uncertainty_report(&st)?));
    }
    let name = format!("uncertainty.{}", ext(ctx.format));
    match ctx.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_uncertainty_csv(&rows, &mut buf)?;
            ctx.out.write(&name, &buf)?;
        }
        Format::Jsonl => {
            let recs: Vec<Value> = rows
                .iter()
                .map(|(id, r)| {
                    let mut v = serde_json::to_value(r).expect("report serializes");
                    v["id"] = json!(id);
                    v
                })
                .collect();
            write_jsonl_rows(ctx, &name, &recs)?;
        }
    }
    let min = if u.families.is_empty() {
        None
    } else {
        Some(min_delta_x_search(l, u.search_half_width, &u.families, u.saturation_tolerance)?)
    };
    if let Some(m) = &min {
        ctx.out.write_json("min_delta_x.json", m)?;
    }
    let count = |f: fn(&UncertaintyReport) -> bool| rows.iter().filter(|(_, r)| f(r)).count();
    let summary = json!({
        "command": "uncertainty",
        "states": rows.len(),
        "satisfied_robertson": count(|r| r.satisfied_robertson),
        "satisfied_paper": count(|r| r.satisfied_paper),
        "satisfied_paper_half": count(|r| r.satisfied_paper_half),
        "satisfied_derived": count(|r| r.satisfied_derived),
        "gaussian_products": rows.iter().filter(|(id, _)| id.starts_with("gaussian")).map(|(_, r)| r.product).collect::<Vec<_>>(),
        "min_delta_x": min.as_ref().map(|m| json!({
            "delta_x_min": m.delta_x_min,
            "target": m.target,
            "relative_discrepancy": m.relative_discrepancy,
            "saturation_ratio": m.saturation_ratio,
        })),
    });
    ctx.out.write_json("uncertainty.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn cmd_suite(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let section = &cfg.config.suite;
    let pauli_reference = match &section.pauli_fixture {
        Some(path) => {
            let bytes = cfg.read_file(path)?;
            let hist = read_history_jsonl(&bytes[..])
                .map_err(|e| CliError::config(format!("fixture {}: {e}", path.display())))?;
            Some(hist.into_states())
        }
        None => None,
    };
    let suite_cfg = SuiteConfig {
        seed: ctx.seed,
        max_steps: section.max_steps.or(cfg.config.max_steps).unwrap_or(10_000),
        only: section.only.clone(),
        pauli_reference,
    };
    let report: SuiteReport = run_suite(&suite_cfg);
    ctx.out.write_json("verdict.json", &report)?;
    let timings: Vec<Value> = report
        .criteria
        .iter()
        .map(|c| json!({"id": c.id, "status": c.status, "elapsed_s": c.elapsed_s, "budget_s": c.budget_s}))
        .collect();
    let mut summary = serde_json::to_value(&report).map_err(to_io)?;
    for (c, t) in summary["criteria"].as_array_mut().expect("array").iter_mut().zip(&timings) {
        c["elapsed_s"] = t["elapsed_s"].clone();
    }
    let failure = (!report.passed).then(|| {
        let ids: Vec<String> = report.failed().map(|c| format!("{} ({})", c.id, c.name)).collect();
        CliError::new(Kind::Acceptance, format!("failed criteria: {}", ids.join(", ")))
    });
    Ok(Outcome {
        summary,
        timings: Some(json!(timings)),
        failure,
    })
}
