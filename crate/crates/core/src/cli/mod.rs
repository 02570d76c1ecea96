//! Config-driven front end behind the `rdi` binary. [`execute`] computes
//! every artifact in memory; [`run`] loads the config, executes and writes the
//! files only when everything succeeded.

pub mod config;
mod output;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{CommandKind, Figure, Grid, LemmaSpec, RunConfig, Setting, SourceSpec};
pub use output::{curve_csv, fmt_sig, table_csv, Artifacts};

use crate::error::{usage, Error, Result};
use crate::prob::{mutual_information, JointPmf};
use crate::rd::DistortionSpec;
use crate::regions::{
    corollary_floor, corollary_region, count_kinks, gaussian_region, helper_inner_bound, inner_bound_closed,
    inner_bound_open, outer_bound_closed, outer_bound_open, region_closed, region_helper_degraded,
    region_helper_logloss, region_open_markov, CorollaryCase, CorollaryParams, GaussianChainParams, RdiPoint,
};
use crate::sim::{
    codeword_binning_entropy, exact_binning_entropy, one_time_pad, simulate_scheme_open, BinningExperiment,
    CodewordBinningExperiment, PadIndex, MAX_ENUMERATION,
};

/// Tolerance for the post-emission monotonicity and floor checks. Solver
/// curves carry the optimizer's duality-gap noise.
const CURVE_TOL: f64 = 1e-6;

/// Number of distortion points per reproduced curve.
pub const FIGURE_POINTS: usize = 101;

/// Process exit status for an error: 2 for invalid input, 3 for an
/// infeasible problem, 1 for I/O failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible { .. } => 3,
        Error::Io(_) => 1,
        Error::Usage(_) | Error::InvalidPmf(_) | Error::Capacity { .. } | Error::Precondition(_) | Error::Json(_) => 2,
    }
}

/// Loads `config_path`, executes `command` and writes the artifacts into
/// `out` (or the config's `output`, or the working directory).
pub fn run(command: CommandKind, config_path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(config_path)?;
    let config = RunConfig::from_json(&text)?;
    let dir = out.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let artifacts = execute(command, config, seed)?;
    artifacts.write_to(&dir)
}

/// Extracts the resolved command and config stored in a JSON report, for
/// re-evaluation.
pub fn config_from_report(report: &str) -> Result<(CommandKind, RunConfig)> {
    let v: Value = serde_json::from_str(report)?;
    let config: RunConfig = serde_json::from_value(v.get("config").cloned().unwrap_or(Value::Null))?;
    let command = config.command.ok_or_else(|| Error::Usage("report config has no command".into()))?;
    Ok((command, config))
}

/// Runs `command` on `config` without touching the file system.
pub fn execute(command: CommandKind, mut config: RunConfig, seed: Option<u64>) -> Result<Artifacts> {
    if let Some(c) = config.command {
        if c != command {
            return usage(format!("config is for '{}', invoked as '{}'", c.name(), command.name()));
        }
    }
    config.command = Some(command);
    if seed.is_some() {
        config.seed = seed;
    }
    if let Some(s) = config.seed {
        config.solver.rng_seed = s;
    }
    config.solver.validate()?;
    match command {
        CommandKind::Region | CommandKind::Sweep | CommandKind::Gaussian => curve_command(command, &config),
        CommandKind::Simulate => simulate_command(&config),
        CommandKind::VerifyLemma => lemma_command(&config),
        CommandKind::Reproduce => reproduce_command(&config),
    }
}

#[derive(Debug, Clone, Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    case: String,
    params: Value,
    seed: Option<u64>,
    timestamp_unix: u64,
}

impl Metadata {
    fn new(command: CommandKind, case: String, params: Value, seed: Option<u64>) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self { tool: "rdi", version: env!("CARGO_PKG_VERSION"), command: command.name(), case, params, seed, timestamp_unix }
    }
}

/// Post-emission checks of one or more curves, grouped by helper rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveChecks {
    pub r_non_increasing: bool,
    pub delta_non_increasing: bool,
    pub floor: Option<f64>,
    pub above_floor: Option<bool>,
    /// Total over the curves of switches between the floor and the
    /// rate-dependent branch of the leakage.
    pub kinks: Option<usize>,
}

impl CurveChecks {
    pub fn passed(&self) -> bool {
        self.r_non_increasing && self.delta_non_increasing && self.above_floor.unwrap_or(true)
    }
}

/// Monotonicity in `D` within each run of equal `R_h`, and `Delta >= floor`.
pub fn check_curve(points: &[RdiPoint], floor: Option<f64>) -> CurveChecks {
    let mut r_ok = true;
    let mut delta_ok = true;
    let mut kinks = 0;
    for curve in points.chunk_by(|a, b| a.r_h == b.r_h) {
        for w in curve.windows(2) {
            r_ok &= w[1].r <= w[0].r + CURVE_TOL;
            delta_ok &= w[1].delta <= w[0].delta + CURVE_TOL;
        }
        if let Some(f) = floor {
            let deltas: Vec<f64> = curve.iter().map(|p| p.delta).collect();
            kinks += count_kinks(&deltas, f, 1e-9);
        }
    }
    CurveChecks {
        r_non_increasing: r_ok,
        delta_non_increasing: delta_ok,
        floor,
        above_floor: floor.map(|f| points.iter().all(|p| p.delta >= f - CURVE_TOL)),
        kinks: floor.map(|_| kinks),
    }
}

/// An evaluated curve and what identifies it.
struct Curve {
    case: String,
    params: Value,
    points: Vec<RdiPoint>,
    floor: Option<f64>,
    /// Per-point extra data, when the evaluator reports any.
    extra: Option<Vec<Value>>,
}

fn grid(config: &RunConfig, needs_rh: bool) -> Result<Vec<(Option<f64>, f64)>> {
    let ds = config.d.as_ref().ok_or_else(|| Error::Usage("missing 'd' grid".into()))?.points("d")?;
    let rhs: Vec<Option<f64>> = match (&config.rh, needs_rh) {
        (Some(g), true) => g.points("rh")?.into_iter().map(Some).collect(),
        (None, true) => return usage("this source needs an 'rh' grid"),
        (Some(_), false) => return usage("'rh' is only used in the helper setting"),
        (None, false) => vec![None],
    };
    Ok(rhs.iter().flat_map(|&rh| ds.iter().map(move |&d| (rh, d))).collect())
}

fn mi(source: &JointPmf, a: &str, b: &str) -> Result<f64> {
    mutual_information(source, &[a], &[b], &[])
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn case_name<T: Serialize>(v: &T) -> String {
    to_value(v).as_str().unwrap_or_default().to_string()
}

fn erasure_curve(case: CorollaryCase, params: &CorollaryParams, pts: &[(Option<f64>, f64)]) -> Result<Curve> {
    let points = pts.par_iter().map(|&(rh, d)| corollary_region(case, params, d, rh)).collect::<Result<Vec<_>>>()?;
    Ok(Curve {
        case: case_name(&case),
        params: to_value(params),
        points,
        floor: Some(corollary_floor(case, params)?),
        extra: None,
    })
}

fn gaussian_curve(params: &GaussianChainParams, pts: &[(Option<f64>, f64)]) -> Result<Curve> {
    let evaluated = pts
        .par_iter()
        .map(|&(rh, d)| {
            let rh = rh.expect("gaussian grids carry a helper rate");
            gaussian_region(params, rh, d).map(|g| (RdiPoint { r_h: Some(rh), ..g.point }, g.saturated))
        })
        .collect::<Result<Vec<_>>>()?;
    // With D -> infinity the rate-dependent branch vanishes and Delta is the floor.
    let floor = gaussian_region(params, 0.0, f64::MAX)?.point.delta;
    let params_value = to_value(params);
    Ok(Curve {
        case: params_value.get("ordering").and_then(Value::as_str).unwrap_or_default().to_string(),
        params: params_value,
        points: evaluated.iter().map(|e| e.0).collect(),
        floor: Some(floor),
        extra: Some(evaluated.iter().map(|e| json!({ "saturated": e.1 })).collect()),
    })
}

fn pmf_curve(config: &RunConfig, source: &JointPmf, setting: Setting, pts: &[(Option<f64>, f64)]) -> Result<Curve> {
    let dist = match (setting, &config.distortion) {
        (Setting::HelperLogloss, None | Some(DistortionSpec::LogLoss)) => DistortionSpec::LogLoss,
        (Setting::HelperLogloss, Some(_)) => return usage("helper-logloss uses log-loss distortion"),
        (_, Some(d)) => d.clone(),
        (_, None) => return usage("missing 'distortion'"),
    };
    let solver = &config.solver;
    let points = pts
        .par_iter()
        .map(|&(rh, d)| match setting {
            Setting::OpenMarkov => region_open_markov(source, &dist, d, solver),
            Setting::Closed => region_closed(source, &dist, d, solver),
            Setting::HelperDegraded => region_helper_degraded(source, &dist, rh.expect("helper grid"), d, solver),
            Setting::HelperLogloss => region_helper_logloss(source, rh.expect("helper grid"), d, solver).map(|r| r.0),
        })
        .collect::<Result<Vec<_>>>()?;
    let eve = if matches!(setting, Setting::HelperDegraded | Setting::HelperLogloss) { "W" } else { "Z" };
    Ok(Curve { case: case_name(&setting), params: Value::Null, points, floor: Some(mi(source, "X", eve)?), extra: None })
}

fn evaluate_curve(command: CommandKind, config: &RunConfig) -> Result<Curve> {
    let source = config.source.as_ref().ok_or_else(|| Error::Usage("missing 'source'".into()))?;
    if command == CommandKind::Gaussian && !matches!(source, SourceSpec::Gaussian(_)) {
        return usage("the gaussian command needs a gaussian source");
    }
    match source {
        SourceSpec::Erasure { case, params } => {
            if config.setting.is_some() || config.distortion.is_some() {
                return usage("erasure sources fix their own setting and distortion");
            }
            erasure_curve(*case, params, &grid(config, case.is_helper())?)
        }
        SourceSpec::Gaussian(params) => {
            if config.setting.is_some() || config.distortion.is_some() {
                return usage("gaussian sources use squared error in the helper setting");
            }
            params.validate()?;
            gaussian_curve(params, &grid(config, true)?)
        }
        SourceSpec::Pmf(pmf) => {
            let setting = config.setting.ok_or_else(|| Error::Usage("inline pmf sources need a 'setting'".into()))?;
            let helper = matches!(setting, Setting::HelperDegraded | Setting::HelperLogloss);
            pmf_curve(config, pmf, setting, &grid(config, helper)?)
        }
    }
}

/// Inner and outer bounds for the configured auxiliaries.
fn aux_bounds(config: &RunConfig) -> Result<Option<Value>> {
    let Some(aux) = &config.aux else { return Ok(None) };
    let Some(SourceSpec::Pmf(source)) = &config.source else {
        return usage("'aux' needs an inline pmf source");
    };
    let bounds = match config.setting {
        Some(Setting::OpenMarkov) => {
            json!({ "inner": inner_bound_open(source, aux)?, "outer": outer_bound_open(source, aux)? })
        }
        Some(Setting::Closed) => {
            json!({ "inner": inner_bound_closed(source, aux)?, "outer": outer_bound_closed(source, aux)? })
        }
        Some(Setting::HelperDegraded | Setting::HelperLogloss) => {
            let rhs = config.rh.as_ref().ok_or_else(|| Error::Usage("missing 'rh' grid".into()))?.points("rh")?;
            let inner = rhs.iter().map(|&rh| helper_inner_bound(source, aux, rh, None)).collect::<Result<Vec<_>>>()?;
            json!({ "inner": inner })
        }
        None => return usage("inline pmf sources need a 'setting'"),
    };
    Ok(Some(bounds))
}

fn report_json(value: Value) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn curve_command(command: CommandKind, config: &RunConfig) -> Result<Artifacts> {
    let curve = evaluate_curve(command, config)?;
    let bounds = if command == CommandKind::Region { aux_bounds(config)? } else { None };
    let checks = check_curve(&curve.points, curve.floor);
    if !checks.passed() {
        eprintln!("warning: curve checks failed: {checks:?}");
    }
    let mut report = json!({
        "metadata": Metadata::new(command, curve.case.clone(), curve.params.clone(), config.seed),
        "config": config,
        "points": curve.points,
        "checks": checks,
    });
    if let Some(extra) = curve.extra {
        report["point_details"] = Value::Array(extra);
    }
    if let Some(b) = bounds {
        report["bounds"] = b;
    }
    let mut out = Artifacts::default();
    out.add(format!("{}.csv", command.name()), curve_csv(&curve.points));
    out.add(format!("{}.json", command.name()), report_json(report)?);
    Ok(out)
}

fn require_seed(config: &RunConfig, what: &str) -> Result<u64> {
    config.seed.ok_or_else(|| Error::Usage(format!("{what} needs a seed (config 'seed' or --seed)")))
}

fn simulate_command(config: &RunConfig) -> Result<Artifacts> {
    let seed = require_seed(config, "simulate")?;
    let Some(SourceSpec::Pmf(source)) = &config.source else {
        return usage("simulate needs an inline pmf source");
    };
    if !matches!(config.setting, None | Some(Setting::OpenMarkov)) {
        return usage("simulate runs the open-switch scheme only");
    }
    let aux = config.aux.as_ref().ok_or_else(|| Error::Usage("simulate needs 'aux'".into()))?;
    let mut scheme = config.scheme.clone().unwrap_or_default();
    scheme.seed = seed;
    scheme.validate()?;
    let report = simulate_scheme_open(source, aux, &scheme)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let s = report.sizes;
    let rate = ((s.m0 * s.m1o * s.mk) as f64).log2() / report.n as f64;
    let point = RdiPoint::new(rate, report.empirical_distortion, report.exact_leakage_rate);
    let json_report = json!({
        "metadata": Metadata::new(CommandKind::Simulate, "open-scheme".into(), Value::Null, Some(seed)),
        "config": config,
        "points": [point],
        "simulation": report,
    });
    let mut out = Artifacts::default();
    out.add("simulate.csv", curve_csv(&[point]));
    out.add("simulate.json", report_json(json_report)?);
    Ok(out)
}

fn lemma_command(config: &RunConfig) -> Result<Artifacts> {
    let lemma = config.lemma.as_ref().ok_or_else(|| Error::Usage("verify-lemma needs 'lemma'".into()))?;
    let (case, csv, details) = match lemma {
        LemmaSpec::Binning { n, r_k, seeds, source } => {
            let seeds = match seeds {
                Some(s) if !s.is_empty() => s.clone(),
                Some(_) => return usage("'seeds' is empty"),
                None => vec![require_seed(config, "binning verification")?],
            };
            let rates = r_k.points("r_k")?;
            let runs: Vec<(u64, f64)> = seeds.iter().flat_map(|&s| rates.iter().map(move |&r| (s, r))).collect();
            let reports = runs
                .iter()
                .map(|&(seed, r_k)| exact_binning_entropy(&BinningExperiment { n: *n, r_k, seed, source: source.clone() }))
                .collect::<Result<Vec<_>>>()?;
            let monotone: Vec<bool> = reports
                .chunks(rates.len())
                .map(|c| c.windows(2).all(|w| w[1].entropy <= w[0].entropy + 1e-9))
                .collect();
            let max_slack = reports.iter().map(|r| r.slack).fold(f64::NEG_INFINITY, f64::max);
            let rows: Vec<Vec<f64>> = runs
                .iter()
                .zip(&reports)
                .map(|(&(seed, r_k), r)| vec![seed as f64, r_k, r.bins as f64, r.entropy, r.bound, r.slack])
                .collect();
            let csv = table_csv(&["seed", "r_k", "bins", "entropy", "bound", "slack"], &rows);
            let details = json!({
                "seeds": seeds,
                "reports": reports,
                "non_increasing_per_seed": monotone,
                "max_slack": max_slack,
            });
            ("binning", csv, details)
        }
        LemmaSpec::Codeword { n, r_tilde, r_k, source, epsilon } => {
            let seed = require_seed(config, "codeword verification")?;
            let exp = CodewordBinningExperiment {
                n: *n,
                r_tilde: *r_tilde,
                r_k: *r_k,
                seed,
                source: source.clone(),
                epsilon: *epsilon,
            };
            let r = codeword_binning_entropy(&exp)?;
            let csv = table_csv(
                &["n", "r_tilde", "r_k", "codewords", "bins", "entropy", "bound", "slack", "typical_mass"],
                &[vec![*n as f64, *r_tilde, *r_k, r.codewords as f64, r.bins as f64, r.entropy, r.bound, r.slack, r.typical_mass]],
            );
            ("codeword", csv, json!({ "seed": seed, "report": r }))
        }
        LemmaSpec::Pad { modulus } => {
            let (by_message, by_key) = verify_pad(*modulus)?;
            let csv = table_csv(
                &["modulus", "bijective_in_message", "bijective_in_key"],
                &[vec![*modulus as f64, by_message as u8 as f64, by_key as u8 as f64]],
            );
            ("pad", csv, json!({ "bijective_in_message": by_message, "bijective_in_key": by_key }))
        }
    };
    let report = json!({
        "metadata": Metadata::new(CommandKind::VerifyLemma, case.into(), Value::Null, config.seed),
        "config": config,
        "lemma": details,
    });
    let mut out = Artifacts::default();
    out.add("verify-lemma.csv", csv);
    out.add("verify-lemma.json", report_json(report)?);
    Ok(out)
}

/// Exhaustively checks that the pad is a bijection in the message for every
/// key (so decoding works) and in the key for every message (so a uniform key
/// makes the output uniform and independent of the message).
fn verify_pad(modulus: u64) -> Result<(bool, bool)> {
    if modulus == 0 || (modulus as u128) * (modulus as u128) > MAX_ENUMERATION {
        return usage(format!("pad modulus {modulus} outside [1, 10^4]"));
    }
    let bijective = |fix_key: bool| -> Result<bool> {
        for a in 1..=modulus {
            let mut seen = vec![false; modulus as usize];
            for b in 1..=modulus {
                let (m, k) = if fix_key { (b, a) } else { (a, b) };
                let c = one_time_pad(PadIndex::new(m, modulus)?, PadIndex::new(k, modulus)?)?.value();
                if std::mem::replace(&mut seen[(c - 1) as usize], true) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    Ok((bijective(true)?, bijective(false)?))
}

/// The baked-in example curves of each figure.
pub fn figure_cases(figure: Figure) -> Vec<(CorollaryCase, CorollaryParams)> {
    match figure {
        Figure::Fig3 => vec![
            (CorollaryCase::ErasedYHamming, CorollaryParams::erased(0.8, 0.5)),
            (CorollaryCase::LoglossOpen, CorollaryParams::erased(0.8, 0.5)),
        ],
        Figure::Fig4 => vec![
            (CorollaryCase::ErasedZHamming, CorollaryParams::erased(0.8, 0.9)),
            (CorollaryCase::DoubleErasureHamming, CorollaryParams::double(0.9, 0.8)),
            (CorollaryCase::LoglossClosed, CorollaryParams::double(0.9, 0.8)),
        ],
    }
}

const PLOT_STUB: &str = r#"#!/usr/bin/env python3
"""Plot Delta against D for every curve CSV in this directory."""
import csv
import glob
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
prefix = sys.argv[1] if len(sys.argv) > 1 else "@PREFIX@"
for path in sorted(glob.glob(os.path.join(here, prefix + "*.csv"))):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    plt.plot([float(r["D"]) for r in rows], [float(r["Delta"]) for r in rows], label=os.path.basename(path)[:-4])
plt.xlabel("D")
plt.ylabel("Delta")
plt.legend()
plt.savefig(os.path.join(here, (prefix or "curves") + ".png"), dpi=150)
"#;

fn reproduce_command(config: &RunConfig) -> Result<Artifacts> {
    let figure = config.figure.ok_or_else(|| Error::Usage("reproduce needs 'figure'".into()))?;
    if config.source.is_some() || config.d.is_some() || config.rh.is_some() {
        return usage("reproduce uses built-in sources and grids");
    }
    let fig = case_name(&figure);
    let d_grid = Grid::Range { start: 0.0, stop: 1.0, count: FIGURE_POINTS }.points("d")?;
    let pts: Vec<(Option<f64>, f64)> = d_grid.iter().map(|&d| (None, d)).collect();
    let mut out = Artifacts::default();
    let mut curves = Vec::new();
    for (case, params) in figure_cases(figure) {
        let curve = erasure_curve(case, &params, &pts)?;
        let checks = check_curve(&curve.points, curve.floor);
        if !checks.passed() {
            eprintln!("warning: {} curve checks failed: {checks:?}", curve.case);
        }
        out.add(format!("{fig}_{}.csv", curve.case), curve_csv(&curve.points));
        curves.push(json!({ "case": curve.case, "params": curve.params, "points": curve.points, "checks": checks }));
    }
    let report = json!({
        "metadata": Metadata::new(CommandKind::Reproduce, fig.clone(), Value::Null, config.seed),
        "config": config,
        "curves": curves,
    });
    out.add(format!("{fig}.json"), report_json(report)?);
    out.add(format!("plot_{fig}.py"), PLOT_STUB.replace("@PREFIX@", &format!("{fig}_")));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap()
    }

    #[test]
    fn gaussian_row() {
        let c = cfg(r#"{"source": {"gaussian": {"ordering": "W-Z-X-Y", "var_w": 1, "var_a": 1, "var_b": 1, "var_c": 1}},
                        "d": [0.5], "rh": [0.5]}"#);
        let a = execute(CommandKind::Gaussian, c, None).unwrap();
        let csv = std::str::from_utf8(a.get("gaussian.csv").unwrap()).unwrap();
        assert_eq!(csv, "D,R,Delta,Rh\n0.5,0.292481250361,0.292481250361,0.5\n");
    }

    #[test]
    fn erased_y_sweep_floor() {
        let c = cfg(r#"{"source": {"erasure": {"case": "erased-y-hamming", "params": {"p_e": 0.8, "q": 0.5}}},
                        "d": {"start": 0, "stop": 0.5, "count": 11}}"#);
        let a = execute(CommandKind::Sweep, c, None).unwrap();
        let csv = std::str::from_utf8(a.get("sweep.csv").unwrap()).unwrap();
        let rows: Vec<Vec<f64>> =
            csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 11);
        for r in rows.iter().filter(|r| r[0] >= 0.4 - 1e-12) {
            assert_abs_diff_eq!(r[2], 0.029049, epsilon = 1e-6);
        }
    }

    #[test]
    fn validation_errors() {
        let bad_grid = cfg(r#"{"source": {"erasure": {"case": "erased-y-hamming", "params": {"p_e": 0.8, "q": 0.5}}},
                               "d": [0.3, 0.1]}"#);
        assert_eq!(exit_code(&execute(CommandKind::Sweep, bad_grid, None).unwrap_err()), 2);
        let no_seed = cfg(r#"{"lemma": {"kind": "codeword", "n": 4, "r_tilde": 0.9, "r_k": 0.3,
            "source": {"axes": [{"name": "U", "size": 2}, {"name": "W", "size": 2}], "probs": [0.25, 0.25, 0.25, 0.25]}}}"#);
        assert_eq!(exit_code(&execute(CommandKind::VerifyLemma, no_seed, None).unwrap_err()), 2);
        let wrong = cfg(r#"{"command": "sweep"}"#);
        assert!(execute(CommandKind::Region, wrong, None).is_err());
    }

    #[test]
    fn pad_lemma() {
        let a = execute(CommandKind::VerifyLemma, cfg(r#"{"lemma": {"kind": "pad", "modulus": 12}}"#), None).unwrap();
        assert_eq!(a.get("verify-lemma.csv").unwrap(), b"modulus,bijective_in_message,bijective_in_key\n12,1,1\n");
    }

    #[test]
    fn reproduce_fig4_files() {
        let a = execute(CommandKind::Reproduce, cfg(r#"{"figure": "fig4"}"#), None).unwrap();
        let csvs: Vec<_> = a.files.iter().filter(|f| f.0.ends_with(".csv")).collect();
        assert_eq!(csvs.len(), 3);
        for (_, c) in csvs {
            assert_eq!(std::str::from_utf8(c).unwrap().lines().count(), FIGURE_POINTS + 1);
        }
    }
}
