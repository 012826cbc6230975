//! Command-line runs: each command computes one table and writes it as CSV
//! (with `#` metadata lines) or as a single JSON document.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::annealing::{
    quadruplet_curve, radius_threshold, triplet_grid, triplet_scan, AnnealConfig, RadiusScan, FREE_THRESHOLD,
};
use crate::estimation::{hoeffding_samples, theorem2_report, CostParams};
use crate::free_geometry::{make_cone_states, solve_critical_angles, ConeFamily};
use crate::hierarchy::{build_rotation_set_with_limit, convergence_report, DEFAULT_MAX_ROTATION_STEP, PUBLISHED_COUNTS};
use crate::quantifiers::Measure;
use crate::quantum_core::{MultiObject, UnitarySU2};
use crate::random::{random_povm, random_su2};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    HierarchyTable,
    QuadrupletCurve,
    HierarchyCurve,
    TripletScan,
    RadiusThreshold,
    Theorem2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Angles are given and reported in units of π.
#[derive(Parser, Clone, Debug, Serialize)]
#[command(name = "absneg", version, about = "Absolute Wigner negativity of qubit state sets")]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Bloch radius of the cone states.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta_max: f64,
    /// Grid points in θ (default 241; 9 for triplet-scan; 31 for radius-threshold).
    #[arg(long)]
    pub theta_steps: Option<usize>,
    /// Grid points per φ axis in triplet-scan.
    #[arg(long, default_value_t = 9)]
    pub phi_steps: usize,
    /// Largest hierarchy step (default 3).
    #[arg(long)]
    pub m: Option<u32>,
    /// Allow hierarchy steps above 4.
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long, env = "ABSNEG_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Defaults for `command`, as if no other flag were given.
    pub fn new(command: Command) -> Self {
        Self::parse_from(["absneg", "--command", command.to_possible_value().unwrap().get_name()])
    }

    fn anneal(&self) -> AnnealConfig {
        AnnealConfig { restarts: self.restarts, rng_seed: self.seed, ..AnnealConfig::default() }
    }

    fn grid(&self, default_steps: usize) -> Result<Vec<f64>, CliError> {
        let n = self.theta_steps.unwrap_or(default_steps);
        if n < 2 || !(0.0..=1.0).contains(&self.theta_min) || !(self.theta_min..=1.0).contains(&self.theta_max) {
            return Err(CliError::Usage(format!(
                "need 0 ≤ theta-min ≤ theta-max ≤ 1 and at least 2 steps (got {}, {}, {n})",
                self.theta_min, self.theta_max
            )));
        }
        let (a, b) = (self.theta_min * PI, self.theta_max * PI);
        Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
    }

    fn max_m(&self) -> Result<u32, CliError> {
        let m = self.m.unwrap_or(3);
        let limit = if self.allow_large { crate::hierarchy::MAX_GEODESIC_STEP } else { DEFAULT_MAX_ROTATION_STEP };
        if m > limit {
            return Err(CliError::Lib(crate::Error::SizeGuard(format!(
                "--m {m} exceeds {limit}; pass --allow-large to go beyond {DEFAULT_MAX_ROTATION_STEP}"
            ))));
        }
        Ok(m)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Computed rows plus a free-form summary and any published-value mismatches.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Value,
    pub failures: Vec<String>,
}

impl Report {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// 12 significant digits, plain notation for moderate magnitudes.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return "nan".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let s = format!("{:.*}", (11 - e) as usize, x);
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_sig(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::Null => "nan".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn over_pi(t: f64) -> Value {
    num(t / PI)
}

fn quat_cells(u: &UnitarySU2) -> Vec<Value> {
    u.quaternion().iter().map(|&c| num(c)).collect()
}

fn hierarchy_table(cfg: &RunConfig) -> Result<Report, CliError> {
    let max_m = cfg.max_m()?;
    let mut rep = Report::new(&["m", "O_count", "U_count", "ratio", "published_O", "published_U"]);
    for m in 0..=max_m {
        let set = build_rotation_set_with_limit(m, max_m.max(DEFAULT_MAX_ROTATION_STEP))?;
        let (o, u) = set.counts();
        let (_, po, pu) = PUBLISHED_COUNTS[m as usize];
        if m <= 2 && (o, u) != (po, pu) {
            rep.failures.push(format!("m={m}: computed ({o}, {u}), published ({po}, {pu})"));
        }
        rep.rows.push(vec![json!(m), json!(o), json!(u), num(o as f64 / u as f64), json!(po), json!(pu)]);
    }
    Ok(rep)
}

/// Maximal runs of grid points with value below the free threshold, as
/// (first θ, last θ) in units of π.
pub fn free_windows(thetas: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..=values.len() {
        let free = i < values.len() && values[i] < FREE_THRESHOLD;
        match (free, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((thetas[s] / PI, thetas[i - 1] / PI));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn quadruplet_curve_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid = cfg.grid(241)?;
    let curve = quadruplet_curve(&grid, cfg.r, &cfg.anneal())?;
    let mut rep = Report::new(&[
        "theta_over_pi",
        "mean_robustness",
        "mean_sum_negativity",
        "ratio",
        "best_quaternion_w",
        "best_quaternion_x",
        "best_quaternion_y",
        "best_quaternion_z",
    ]);
    for p in &curve {
        let mut row = vec![over_pi(p.theta), num(p.mean_robustness), num(p.mean_sum_negativity), p.ratio.map_or(Value::Null, num)];
        row.extend(quat_cells(&p.best));
        rep.rows.push(row);
    }
    let values: Vec<f64> = curve.iter().map(|p| p.mean_robustness).collect();
    let crit = solve_critical_angles()?;
    let ratio = (1.0 + 3f64.sqrt()) / 2.0;
    let dev = curve.iter().filter_map(|p| p.ratio).map(|x| (x - ratio).abs()).fold(0.0, f64::max);
    rep.summary = json!({
        "free_threshold": FREE_THRESHOLD,
        "free_windows_over_pi": free_windows(&grid, &values),
        "critical_angles_over_pi": [crit.theta1 / PI, crit.theta2 / PI, crit.theta3 / PI],
        "grid_step_over_pi": (grid[1] - grid[0]) / PI,
        "expected_ratio": ratio,
        "max_ratio_deviation": dev,
    });
    Ok(rep)
}

fn hierarchy_curve_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid = cfg.grid(241)?;
    let max_m = cfg.max_m()?;
    if max_m < 1 {
        return Err(CliError::Usage("hierarchy-curve needs --m ≥ 1".into()));
    }
    let reference: Vec<f64> = quadruplet_curve(&grid, cfg.r, &cfg.anneal())?.iter().map(|p| p.mean_robustness).collect();
    let bloch: Vec<Vec<_>> = grid
        .iter()
        .map(|&t| {
            make_cone_states(&ConeFamily::quadruplet(t, cfg.r))?
                .iter()
                .map(|s| Ok(s.bloch()?.vec()))
                .collect::<crate::Result<Vec<_>>>()
        })
        .collect::<crate::Result<_>>()?;
    let steps: Vec<u32> = (1..=max_m).collect();
    let mut curves = Vec::new();
    for &m in &steps {
        let set = build_rotation_set_with_limit(m, max_m.max(DEFAULT_MAX_ROTATION_STEP))?;
        curves.push(bloch.iter().map(|b| set.bound(b, Measure::Robustness).0).collect::<Vec<f64>>());
    }
    let mut cols = vec!["theta_over_pi".to_string(), "annealed".to_string()];
    cols.extend(steps.iter().map(|m| format!("m{m}")));
    let mut rep = Report { columns: cols, ..Default::default() };
    for (i, &t) in grid.iter().enumerate() {
        let mut row = vec![over_pi(t), num(reference[i])];
        row.extend(curves.iter().map(|c| num(c[i])));
        rep.rows.push(row);
        if curves[curves.len() - 1][i] < reference[i] - 1e-9 {
            rep.failures.push(format!("θ={}π: hierarchy bound below annealed value", t / PI));
        }
        for (k, w) in curves.windows(2).enumerate() {
            if w[1][i] > w[0][i] + 1e-9 {
                rep.failures.push(format!("θ={}π: m={} bound above m={}", t / PI, k + 2, k + 1));
            }
        }
    }
    rep.summary = match convergence_report(&grid, &steps, &curves, &reference) {
        Ok(c) => json!({
            "steps": c.steps,
            "l2_distances": c.distances,
            "fit_amplitude": c.amplitude,
            "fit_rate": c.rate,
            "published_fit": {"amplitude": 0.0603, "rate": 0.627},
        }),
        Err(e) => json!({ "convergence": e.to_string() }),
    };
    Ok(rep)
}

fn triplet_scan_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.theta_steps.unwrap_or(9);
    let pts = triplet_grid(n, cfg.phi_steps, cfg.phi_steps);
    let res = triplet_scan(&pts, &cfg.anneal())?;
    let mut rep = Report::new(&["theta_over_pi", "phi2_over_pi", "phi3_over_pi", "best_value", "resourceful"]);
    for p in &res {
        rep.rows.push(vec![over_pi(p.theta), over_pi(p.phi2), over_pi(p.phi3), num(p.best_value), json!(p.resourceful)]);
    }
    let hits: Vec<_> = res.iter().filter(|p| p.resourceful).collect();
    let mean = |f: &dyn Fn(&&crate::annealing::TripletPoint) -> f64| {
        if hits.is_empty() {
            Value::Null
        } else {
            num(hits.iter().map(f).sum::<f64>() / hits.len() as f64 / PI)
        }
    };
    rep.summary = json!({
        "points": res.len(),
        "resourceful": hits.len(),
        "free_threshold": FREE_THRESHOLD,
        "resourceful_mean_theta_over_pi": mean(&|p| p.theta),
        "resourceful_mean_phi2_plus_phi3_over_pi": mean(&|p| p.phi2 + p.phi3),
    });
    Ok(rep)
}

pub const RADIUS_WINDOW: (f64, f64) = (0.7325, 0.7425);

fn radius_threshold_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let scan = RadiusScan { coarse_points: cfg.theta_steps.unwrap_or(31), ..RadiusScan::default() };
    let t = radius_threshold(&cfg.anneal(), &scan)?;
    let mut rep = Report::new(&["theta_over_pi", "free_radius"]);
    for &(th, r) in &t.coarse {
        rep.rows.push(vec![over_pi(th), num(r)]);
    }
    if !(RADIUS_WINDOW.0..=RADIUS_WINDOW.1).contains(&t.radius) {
        rep.failures.push(format!("threshold {} outside [{}, {}]", t.radius, RADIUS_WINDOW.0, RADIUS_WINDOW.1));
    }
    rep.summary = json!({
        "radius": t.radius,
        "bracket": [t.bracket.0, t.bracket.1],
        "theta_over_pi": t.theta / PI,
        "published": 0.7375,
        "scan": scan,
    });
    Ok(rep)
}

fn theorem2_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let states = make_cone_states(&ConeFamily::quadruplet(cfg.theta_max * PI, cfg.r))?;
    let pairs = states.into_iter().map(|s| (s, random_povm(2, 3, &mut rng))).collect();
    let mo = MultiObject::new(pairs)?;
    let mut us = vec![UnitarySU2::identity()];
    us.extend((1..50).map(|_| random_su2(&mut rng)));
    let cp = CostParams::default();
    let recs = theorem2_report(&mo, &us, &cp)?;
    let mut rep = Report::new(&["q_w", "q_x", "q_y", "q_z", "identity_lhs", "identity_rhs", "eq29_slack", "eq30_slack"]);
    let (mut dev, mut s29, mut s30) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for r in &recs {
        let mut row: Vec<Value> = r.quaternion.iter().map(|&c| num(c)).collect();
        row.extend([num(r.identity_lhs), num(r.identity_rhs), num(r.eq29_slack), num(r.eq30_slack)]);
        rep.rows.push(row);
        dev = dev.max((r.identity_lhs - r.identity_rhs).abs());
        s29 = s29.min(r.eq29_slack);
        s30 = s30.min(r.eq30_slack);
    }
    if dev > 1e-9 {
        rep.failures.push(format!("forward identity off by {dev}"));
    }
    if s29 < -1e-9 || s30 < -1e-9 {
        rep.failures.push(format!("negative slack: eq29 {s29}, eq30 {s30}"));
    }
    rep.summary = json!({
        "records": recs,
        "max_identity_deviation": dev,
        "min_eq29_slack": s29,
        "min_eq30_slack": s30,
        "cost_params": cp,
        "hoeffding_samples": hoeffding_samples(&cp),
    });
    Ok(rep)
}

/// Computes the report for `cfg.command` without writing anything.
pub fn compute(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::HierarchyTable => hierarchy_table(cfg),
        Command::QuadrupletCurve => quadruplet_curve_cmd(cfg),
        Command::HierarchyCurve => hierarchy_curve_cmd(cfg),
        Command::TripletScan => triplet_scan_cmd(cfg),
        Command::RadiusThreshold => radius_threshold_cmd(cfg),
        Command::Theorem2 => theorem2_cmd(cfg),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Serializes a report with its reproducibility header.
pub fn render(cfg: &RunConfig, rep: &Report, duration_s: f64) -> Result<Vec<u8>, CliError> {
    let config = serde_json::to_value(cfg)?;
    match cfg.format {
        Format::Json => {
            let rows: Vec<Value> = rep
                .rows
                .iter()
                .map(|r| Value::Object(rep.columns.iter().cloned().zip(r.iter().cloned()).collect()))
                .collect();
            let doc = json!({
                "tool": "absneg",
                "version": VERSION,
                "command": cfg.command,
                "config": config,
                "seed": cfg.seed,
                "duration_s": duration_s,
                "rows": rows,
                "summary": rep.summary,
                "validation_failures": rep.failures,
            });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = Vec::new();
            let w = &mut out;
            let head = [
                format!("# absneg {VERSION}"),
                format!("# config: {config}"),
                format!("# seed: {}", cfg.seed),
                format!("# duration_s: {duration_s:.3}"),
            ];
            for line in head {
                writeln!(w, "{line}").expect("write to Vec");
            }
            if !rep.summary.is_null() {
                writeln!(w, "# summary: {}", rep.summary).expect("write to Vec");
            }
            for f in &rep.failures {
                writeln!(w, "# validation failure: {f}").expect("write to Vec");
            }
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(&rep.columns)?;
            for r in &rep.rows {
                csv.write_record(r.iter().map(cell))?;
            }
            csv.flush().map_err(io_err(Path::new("<buffer>")))?;
            drop(csv);
            Ok(out)
        }
    }
}

/// Runs one command, writes its output and returns the report.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    if let Some(n) = cfg.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if !(0.0..=1.0).contains(&cfg.r) {
        return Err(CliError::Usage(format!("--r {} outside [0, 1]", cfg.r)));
    }
    let t0 = Instant::now();
    let rep = compute(cfg)?;
    let bytes = render(cfg, &rep, t0.elapsed().as_secs_f64())?;
    match &cfg.out {
        Some(p) => {
            std::fs::write(p, &bytes).map_err(io_err(p))?;
            if cfg.format == Format::Csv && !rep.summary.is_null() {
                let side = p.with_extension("summary.json");
                std::fs::write(&side, serde_json::to_vec_pretty(&rep.summary)?).map_err(io_err(&side))?;
            }
        }
        None => std::io::stdout().write_all(&bytes).map_err(io_err(Path::new("<stdout>")))?,
    }
    Ok(rep)
}

/// Process exit code: 0 success, 2 published-value mismatch, 1 runtime error.
pub fn exit_code(result: &Result<Report, CliError>) -> i32 {
    match result {
        Ok(r) if r.failures.is_empty() => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(12.0), "12");
        assert_eq!(fmt_sig(PI), "3.14159265359");
        assert_eq!(fmt_sig(-0.001234567890123), "-0.00123456789012");
        assert_eq!(fmt_sig(1.5e-9), "1.50000000000e-9");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    #[test]
    fn windows() {
        let t: Vec<f64> = (0..6).map(|i| i as f64 * PI / 5.0).collect();
        let v = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        assert_eq!(free_windows(&t, &v), vec![(0.0, 0.2), (0.6, 0.6), (1.0, 1.0)]);
    }

    #[test]
    fn defaults() {
        let c = RunConfig::new(Command::Theorem2);
        assert_eq!(c.r, 1.0);
        assert_eq!(c.restarts, 8);
        assert_eq!(c.format, Format::Csv);
        assert!(c.grid(241).unwrap().len() == 241);
        let bad = RunConfig { theta_min: 0.8, theta_max: 0.2, ..c };
        assert!(bad.grid(10).is_err());
    }
}
