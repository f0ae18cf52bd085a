//! One function per subcommand: run the pipeline and fill a `Report`.

use std::collections::BTreeMap;
use std::time::Instant;

use collapse_spectra::coeffs::{coefficient_matrices, CoeffOptions};
use collapse_spectra::ellipse::{expansion_coefficients, verify_expansion};
use collapse_spectra::harness::{
    convergence_study, run_ellipse_suite, validate_eigenvalue, LimitSelector, Provenance, Thresholds,
    ValidationReport,
};
use collapse_spectra::limit_spectrum::{
    eigenpair, group_degenerate, limit_eigenvalues, AngularPart, DEFAULT_GROUP_TOL,
};
use collapse_spectra::meridian::{spectrum, GridRule, MAX_PER_MODE, MIN_NODES};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{Command, RunConfig};
use crate::report::{num, to_value, Report, Table};
use crate::RunError;

/// Modes checked by the validation ellipse suite and its `ε` list.
const ELLIPSE_SUITE_K: [u32; 3] = [1, 2, 3];
const ELLIPSE_SUITE_EPS: [f64; 3] = [0.1, 0.05, 0.025];
/// Grid-refinement study on the sphere, first nonzero `m = 0` eigenvalue.
const CONVERGENCE_NODES: [usize; 4] = [500, 1000, 2000, 4000];

struct Output {
    table: Table,
    extras: Map<String, Value>,
    flags: Value,
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let start = Instant::now();
    let out = match config.command {
        Command::Limit => limit(config)?,
        Command::Coeffs => coeffs(config)?,
        Command::Direct => direct(config)?,
        Command::Ellipse => ellipse(config)?,
        Command::Validate => validate(config)?,
    };
    let opts = coeff_options(config);
    Ok(Report {
        command: config.command.name(),
        config: to_value(config),
        table: out.table,
        extras: out.extras,
        flags: out.flags,
        tolerances: json!({
            "extrapolation_tol": num(opts.extrapolation_tol),
            "quad_tol": num(opts.quad_tol),
            "delta_schedule": opts.delta_schedule,
            "thresholds": to_value(&Thresholds::default()),
        }),
        grid: json!({
            "rule": to_value(&grid_rule(config)),
            "min_nodes": MIN_NODES,
        }),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn coeff_options(config: &RunConfig) -> CoeffOptions {
    CoeffOptions {
        extrapolation_tol: config.tol,
        ..CoeffOptions::default()
    }
}

fn grid_rule(config: &RunConfig) -> GridRule {
    GridRule::Resolution(config.grid_c)
}

fn no_flags() -> Value {
    json!({})
}

fn limit(config: &RunConfig) -> Result<Output, RunError> {
    let mut table = Table::new(&["index", "lambda", "bc", "nu", "k", "multiplicity"]);
    for (i, e) in limit_eigenvalues(config.count)?.iter().enumerate() {
        table.push(vec![
            Value::from(i + 1),
            num(e.lambda),
            Value::from(e.bc.to_string()),
            Value::from(e.nu),
            Value::from(e.k),
            Value::from(e.multiplicity),
        ]);
    }
    Ok(Output {
        table,
        extras: Map::new(),
        flags: no_flags(),
    })
}

fn coeffs(config: &RunConfig) -> Result<Output, RunError> {
    let profile = config.flattening_profile()?;
    let pair = eigenpair(config.bc, config.nu, config.k, AngularPart::Cos)?;
    let group = group_degenerate(pair.lambda, DEFAULT_GROUP_TOL)?;
    let matrices = coefficient_matrices(&group, &profile, &coeff_options(config))?;

    let mut table = Table::new(&["eps", "member", "mu", "predicted"]);
    for &eps in &config.eps {
        let predicted = matrices.predict(eps)?;
        let mu = if eps < 1.0 {
            matrices.mu_at(eps)?.into_iter().map(num).collect()
        } else {
            vec![Value::Null; predicted.len()]
        };
        for (i, (m, p)) in mu.into_iter().zip(predicted).enumerate() {
            table.push(vec![num(eps), Value::from(i + 1), m, num(p)]);
        }
    }
    let members: Vec<Value> = group
        .pairs
        .iter()
        .map(|p| json!({ "bc": p.bc, "nu": p.nu, "k": p.k, "angular": p.angular, "lambda": num(p.lambda) }))
        .collect();
    let mut extras = Map::new();
    extras.insert("lambda_limit".into(), num(group.lambda));
    extras.insert("a2".into(), num(matrices.a2));
    extras.insert("multiplicity".into(), Value::from(group.multiplicity()));
    extras.insert("members".into(), Value::Array(members));
    extras.insert("lambda0".into(), to_value(&matrices.lambda0.rows()));
    extras.insert("lambda1".into(), to_value(&matrices.lambda1.rows()));
    Ok(Output {
        table,
        extras,
        flags: no_flags(),
    })
}

fn direct(config: &RunConfig) -> Result<Output, RunError> {
    let per_mode = config.count.min(MAX_PER_MODE);
    let rule = grid_rule(config);
    let spectra = config
        .eps
        .par_iter()
        .map(|&eps| spectrum(eps, config.mmax, per_mode, rule))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&["eps", "nodes", "index", "lambda", "m", "mode_index", "parity"]);
    for spec in &spectra {
        let rows = spec
            .entries
            .iter()
            .flat_map(|e| std::iter::repeat(e).take(e.multiplicity as usize))
            .take(config.count);
        for (i, e) in rows.enumerate() {
            table.push(vec![
                num(spec.eps),
                Value::from(spec.nodes),
                Value::from(i + 1),
                num(e.lambda),
                Value::from(e.m),
                Value::from(e.index + 1),
                to_value(&e.parity),
            ]);
        }
    }
    let mut extras = Map::new();
    extras.insert(
        "total_arclength".into(),
        Value::Array(spectra.iter().map(|s| num(s.total_arclength)).collect()),
    );
    Ok(Output {
        table,
        extras,
        flags: no_flags(),
    })
}

fn ellipse(config: &RunConfig) -> Result<Output, RunError> {
    let rows = verify_expansion(config.k, &config.eps)?;
    let mut table = Table::new(&["eps", "exact", "expansion", "residual", "scaled_residual"]);
    for r in &rows {
        table.push(vec![
            num(r.eps),
            num(r.exact),
            num(r.expansion),
            num(r.residual),
            num(r.scaled_residual),
        ]);
    }
    let (c0, c1, c2) = expansion_coefficients(config.k);
    let ratios: Vec<Value> = rows
        .windows(2)
        .map(|w| num(w[1].scaled_residual / w[0].scaled_residual))
        .collect();
    let mut extras = Map::new();
    extras.insert("k".into(), Value::from(config.k));
    extras.insert("coefficients".into(), json!({ "c0": num(c0), "c1": num(c1), "c2": num(c2) }));
    extras.insert("scaled_residual_ratios".into(), Value::Array(ratios));
    Ok(Output {
        table,
        extras,
        flags: no_flags(),
    })
}

fn validate(config: &RunConfig) -> Result<Output, RunError> {
    if !config.flattening_profile()?.is_ellipsoid() {
        return Err(RunError::Config(
            "validation compares against the direct solver, which only supports the ellipsoid".into(),
        ));
    }
    let thresholds = Thresholds::default();
    let opts = coeff_options(config);
    let rule = grid_rule(config);
    let fits = config
        .eig
        .iter()
        .map(|&sel: &LimitSelector| validate_eigenvalue(sel, &config.eps, rule, &opts, &thresholds))
        .collect::<Result<Vec<_>, _>>()?;
    let ellipse = run_ellipse_suite(&ELLIPSE_SUITE_K, &ELLIPSE_SUITE_EPS, &thresholds)?;
    let convergence = vec![convergence_study(1.0, 0, 1, &CONVERGENCE_NODES)?];
    let provenance = Provenance {
        version: env!("CARGO_PKG_VERSION").into(),
        coeff_options: opts,
        timings: BTreeMap::new(),
    };
    let report = ValidationReport::new(fits, ellipse, convergence, thresholds, provenance);

    let mut table = Table::new(&["eigenvalue", "eps", "nodes", "direct", "predicted"]);
    for f in &report.fits {
        for (i, &eps) in f.eps_schedule.iter().enumerate() {
            table.push(vec![
                Value::from(f.selector.to_string()),
                num(eps),
                Value::from(f.nodes[i]),
                num(f.direct[i]),
                num(f.predicted[i]),
            ]);
        }
    }
    let mut flags = to_value(&report.flags);
    if let Value::Object(map) = &mut flags {
        map.insert("all_pass".into(), Value::from(report.all_pass()));
    }
    let mut extras = Map::new();
    extras.insert("report".into(), to_value(&report));
    Ok(Output { table, extras, flags })
}
