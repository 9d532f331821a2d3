//! `qbattery` command-line front end.
//!
//! Exit status: 0 when everything checked passes, 1 when a check fails,
//! 2 on a configuration or I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::capacity::capacity_report;
use crate::dynamics::sample_times;
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, Subsystem};
use crate::model::{battery_ground_population, evolve_closed_form, HamiltonianParams};
use crate::noise::{noisy_resources, NoiseParams};
use crate::relations::{
    all_pass, detuned, detuning_summary, imaginarity_zero_capacities, report_json, report_text,
    table1_rows, verify_subset_with, GridSpec, RelationId, IDENTITY_TOL, TABLE1_STEPS,
    TABLE1_T_MAX,
};
use crate::resources::{measure_all, ResourceReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Column order of `evolve` output.
pub const EVOLVE_HEADER: &str =
    "t,p,capacity_b,capacity_c,capacity_total,residual,concurrence,steering,bell,coherence,imaginarity,texture";

const RESONANCE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "qbattery",
    version,
    about = "Two-qubit quantum battery capacity and resources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity and resource series along one trajectory as CSV.
    Evolve {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        time: TimeArgs,
        /// Phase-flip probability applied to the evolved state.
        #[arg(long)]
        gamma: Option<f64>,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic and integrated capacities at the five tabulated times.
    Table1,
    /// One CSV per detuning `Δ = ω_c − ω_b` plus a summary line each.
    SweepDetuning {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "0.2,0.3,0.4,0.5"
        )]
        deltas: Vec<f64>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Resource and capacity series for several noise strengths as one wide CSV.
    NoiseSweep {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[arg(
            long = "gamma",
            value_delimiter = ',',
            default_value = "0,0.1,0.25,0.4,0.5"
        )]
        gammas: Vec<f64>,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the relation suite over the default grid.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = IDENTITY_TOL)]
        tol: f64,
        /// Path of the JSON sidecar.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restrict to these relations.
        #[arg(long = "relation", value_delimiter = ',')]
        relations: Vec<String>,
        /// Biases one relation's residuals to exercise the failure path.
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
}

/// Model constants; unset values fall back to the subcommand's defaults.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Battery level splitting
    #[arg(long, allow_negative_numbers = true)]
    pub omega_b: Option<f64>,
    /// Charger level splitting
    #[arg(long, allow_negative_numbers = true)]
    pub omega_c: Option<f64>,
    /// Exchange coupling
    #[arg(long, allow_negative_numbers = true)]
    pub j1: Option<f64>,
    /// Ising coupling
    #[arg(long, allow_negative_numbers = true)]
    pub j2: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self, defaults: HamiltonianParams) -> Result<HamiltonianParams> {
        HamiltonianParams::new(
            self.omega_b.unwrap_or(defaults.omega_b),
            self.omega_c.unwrap_or(defaults.omega_c),
            self.j1.unwrap_or(defaults.j1),
            self.j2.unwrap_or(defaults.j2),
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct TimeArgs {
    /// End of the sampled interval
    #[arg(long, allow_negative_numbers = true, default_value_t = TABLE1_T_MAX)]
    pub t_max: f64,
    /// Number of samples, both ends included
    #[arg(long, default_value_t = TABLE1_STEPS)]
    pub steps: usize,
}

/// Validated settings of one trajectory run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: HamiltonianParams,
    pub t_max: f64,
    pub steps: usize,
    pub gamma: Option<f64>,
}

impl RunConfig {
    pub fn new(
        params: HamiltonianParams,
        t_max: f64,
        steps: usize,
        gamma: Option<f64>,
    ) -> Result<Self> {
        params.validate()?;
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "steps must be at least 2, got {steps}"
            )));
        }
        if let Some(g) = gamma {
            NoiseParams::new(g)?;
        }
        Ok(Self {
            params,
            t_max,
            steps,
            gamma,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        sample_times(self.t_max, self.steps)
    }
}

/// `ω_b = ω_c = 1`, `J₁ = J₂ = 0.1`
pub fn figure2_params() -> HamiltonianParams {
    HamiltonianParams {
        omega_b: 1.0,
        omega_c: 1.0,
        j1: 0.1,
        j2: 0.1,
    }
}

/// `ω_b = J₁ = J₂ = 1`, resonant until a detuning is added.
pub fn figure3_params() -> HamiltonianParams {
    HamiltonianParams {
        omega_b: 1.0,
        omega_c: 1.0,
        j1: 1.0,
        j2: 1.0,
    }
}

/// One `evolve` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveRow {
    pub t: f64,
    pub p: f64,
    pub capacity_b: f64,
    pub capacity_c: f64,
    pub capacity_total: f64,
    pub residual: f64,
    pub resources: ResourceReport,
}

impl EvolveRow {
    pub fn values(&self) -> [f64; 12] {
        let r = &self.resources;
        [
            self.t,
            self.p,
            self.capacity_b,
            self.capacity_c,
            self.capacity_total,
            self.residual,
            r.concurrence,
            r.steering,
            r.bell,
            r.coherence_l1,
            r.imaginarity_l1,
            r.texture_tr,
        ]
    }
}

/// Measures of the (optionally dephased) evolved state.
pub fn resources_at(p: &HamiltonianParams, t: f64, gamma: Option<f64>) -> Result<ResourceReport> {
    match gamma {
        Some(g) => noisy_resources(p, t, g),
        None => {
            let rho = evolve_closed_form(p, t).density();
            measure_all(&rho, &partial_trace(&rho, Subsystem::Battery)?)
        }
    }
}

/// Row at time `t`; every column is a function of `t` and the configuration.
pub fn evolve_row(p: &HamiltonianParams, t: f64, gamma: Option<f64>) -> Result<EvolveRow> {
    let caps = capacity_report(p, t)?;
    Ok(EvolveRow {
        t,
        p: battery_ground_population(p, t),
        capacity_b: caps.battery,
        capacity_c: caps.charger,
        capacity_total: caps.total,
        residual: caps.residual,
        resources: resources_at(p, t, gamma)?,
    })
}

pub fn evolve_rows(config: &RunConfig) -> Result<Vec<EvolveRow>> {
    config
        .times()
        .into_iter()
        .map(|t| evolve_row(&config.params, t, config.gamma))
        .collect()
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Numeric table with a header row, LF line endings.
pub fn write_table<H, R>(header: &[H], rows: R) -> Result<String>
where
    H: AsRef<str>,
    R: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))
        .map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_float(v)))
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn evolve_csv(rows: &[EvolveRow]) -> Result<String> {
    let header: Vec<&str> = EVOLVE_HEADER.split(',').collect();
    write_table(&header, rows.iter().map(|r| r.values().to_vec()))
}

/// Parses a numeric CSV with a header row.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = reader
        .records()
        .map(|record| {
            record
                .map_err(csv_err)?
                .iter()
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|e| Error::InvalidConfig(format!("bad cell {c:?}: {e}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_evolve(config: &RunConfig, out: Option<&Path>) -> Result<i32> {
    emit(out, &evolve_csv(&evolve_rows(config)?)?)?;
    Ok(EXIT_PASS)
}

/// Table with a sampling header; the exit status reports the comparison.
pub fn cmd_table1(w: &mut dyn Write) -> Result<i32> {
    let rows = table1_rows()?;
    writeln!(
        w,
        "sampling: {TABLE1_STEPS} points on [0, {TABLE1_T_MAX}], t_i = i*{TABLE1_T_MAX}/{}",
        TABLE1_STEPS - 1
    )?;
    writeln!(
        w,
        "{:>8} {:>12} {:>11} {:>10} {:>11} {:>10} result",
        "t", "t_sample", "printed_ana", "analytic", "printed_num", "integrated"
    )?;
    for r in &rows {
        writeln!(
            w,
            "{:>8.3} {:>12.8} {:>11.4} {:>10.7} {:>11.4} {:>10.7} {}",
            r.t_printed,
            r.t_sample,
            r.published_analytical,
            r.analytical,
            r.published_numerical,
            r.integrated,
            if r.passes() { "ok" } else { "DEVIATES" }
        )?;
    }
    Ok(if rows.iter().all(|r| r.passes()) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

pub const DETUNING_HEADER: &str = "t,capacity_b,coherence,imaginarity";

/// File name of the CSV written for one detuning.
pub fn detuning_file_name(delta: f64) -> String {
    format!("detuning_{delta}.csv")
}

pub fn cmd_sweep_detuning(
    base: &HamiltonianParams,
    deltas: &[f64],
    t_max: f64,
    steps: usize,
    dir: &Path,
    w: &mut dyn Write,
) -> Result<i32> {
    if deltas.is_empty() {
        return Err(Error::InvalidConfig(
            "--deltas needs at least one value".into(),
        ));
    }
    let mut status = EXIT_PASS;
    fs::create_dir_all(dir)?;
    for &delta in deltas {
        let config = RunConfig::new(detuned(base, delta)?, t_max, steps, None)?;
        let rows = config
            .times()
            .into_iter()
            .map(|t| {
                let r = resources_at(&config.params, t, None)?;
                let cap = capacity_report(&config.params, t)?.battery;
                Ok(vec![t, cap, r.coherence_l1, r.imaginarity_l1])
            })
            .collect::<Result<Vec<_>>>()?;
        let header: Vec<&str> = DETUNING_HEADER.split(',').collect();
        let csv = write_table(&header, rows)?;
        fs::write(dir.join(detuning_file_name(delta)), csv)?;

        let s = detuning_summary(base, delta, t_max, steps)?;
        let ok = if delta == 0.0 {
            (s.charging_peak - s.ceiling).abs() <= RESONANCE_TOL
        } else {
            s.charged_below_ceiling()
        };
        let charged = s.charged_max.map_or("none".to_string(), fmt_float);
        writeln!(
            w,
            "delta={delta} omega_c={} 2omega_b={} grid_max={} charged_max={charged} charging_peak={} {}",
            s.params.omega_c,
            s.ceiling,
            fmt_float(s.grid_max),
            fmt_float(s.charging_peak),
            match (ok, delta == 0.0) {
                (true, true) => "peak reaches 2omega_b",
                (true, false) => "charged capacity below 2omega_b",
                (false, _) => "UNEXPECTED",
            }
        )?;
        if !ok {
            status = EXIT_FAIL;
        }
    }
    Ok(status)
}

const NOISE_COLUMNS: [&str; 7] = [
    "concurrence",
    "steering",
    "bell",
    "coherence",
    "imaginarity",
    "texture",
    "capacity_b",
];

pub fn noise_sweep_csv(config: &RunConfig, gammas: &[f64]) -> Result<String> {
    if gammas.is_empty() {
        return Err(Error::InvalidConfig(
            "--gamma needs at least one value".into(),
        ));
    }
    for &g in gammas {
        NoiseParams::new(g)?;
    }
    let mut header = vec!["t".to_string()];
    for g in gammas {
        header.extend(NOISE_COLUMNS.iter().map(|c| format!("{c}@{g}")));
    }
    let mut rows = Vec::with_capacity(config.steps);
    for t in config.times() {
        let cap = capacity_report(&config.params, t)?.battery;
        let mut row = vec![t];
        for &g in gammas {
            let r = noisy_resources(&config.params, t, g)?;
            row.extend([
                r.concurrence,
                r.steering,
                r.bell,
                r.coherence_l1,
                r.imaginarity_l1,
                r.texture_tr,
                cap,
            ]);
        }
        rows.push(row);
    }
    write_table(&header, rows)
}

pub fn cmd_noise_sweep(config: &RunConfig, gammas: &[f64], out: Option<&Path>) -> Result<i32> {
    emit(out, &noise_sweep_csv(config, gammas)?)?;
    Ok(EXIT_PASS)
}

pub fn cmd_verify(
    seed: u64,
    tol: f64,
    relations: &[RelationId],
    corrupt: Option<RelationId>,
    sidecar: Option<&Path>,
    w: &mut dyn Write,
) -> Result<i32> {
    let grid = GridSpec::default_with_seed(seed);
    let verdicts = verify_subset_with(relations, &grid, tol, corrupt.map(|r| (r, 1.0)))?;
    write!(w, "{}", report_text(&verdicts))?;

    let detuned_grid = GridSpec {
        detuned_only: true,
        ..grid
    };
    let zeros = imaginarity_zero_capacities(&detuned_grid)?;
    let worst = zeros
        .iter()
        .map(|z| z.capacity / z.ceiling)
        .fold(0.0, f64::max);
    writeln!(
        w,
        "imaginarity zeros at t = pi/(e1-e2) on {} detuned sets: max capacity/2omega_b = {worst:.6} ({})",
        zeros.len(),
        if zeros.iter().all(|z| z.below_ceiling()) {
            "no peak"
        } else {
            "PEAK"
        }
    )?;
    if let Some(path) = sidecar {
        fs::write(path, report_json(&verdicts)?)?;
    }
    Ok(if all_pass(&verdicts) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn parse_relations(names: &[String]) -> Result<Vec<RelationId>> {
    if names.is_empty() {
        return Ok(RelationId::ALL.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn dispatch(cli: Cli) -> Result<i32> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match cli.command {
        Command::Evolve {
            params,
            time,
            gamma,
            out,
        } => {
            let config = RunConfig::new(
                params.resolve(figure2_params())?,
                time.t_max,
                time.steps,
                gamma,
            )?;
            drop(w);
            cmd_evolve(&config, out.as_deref())
        }
        Command::Table1 => cmd_table1(&mut w),
        Command::SweepDetuning {
            params,
            time,
            deltas,
            out,
        } => {
            let base = params.resolve(figure3_params())?;
            cmd_sweep_detuning(&base, &deltas, time.t_max, time.steps, &out, &mut w)
        }
        Command::NoiseSweep {
            params,
            time,
            gammas,
            out,
        } => {
            let config = RunConfig::new(
                params.resolve(figure2_params())?,
                time.t_max,
                time.steps,
                None,
            )?;
            drop(w);
            cmd_noise_sweep(&config, &gammas, out.as_deref())
        }
        Command::Verify {
            seed,
            tol,
            out,
            relations,
            corrupt,
        } => {
            let relations = parse_relations(&relations)?;
            let corrupt = corrupt.map(|c| c.parse()).transpose()?;
            cmd_verify(seed, tol, &relations, corrupt, out.as_deref(), &mut w)
        }
    }
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789e10, 0.0] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn run_config_rejects_bad_values() {
        let p = figure2_params();
        assert!(RunConfig::new(p, 0.0, 10, None).is_err());
        assert!(RunConfig::new(p, 1.0, 1, None).is_err());
        assert!(RunConfig::new(p, 1.0, 2, Some(1.5)).is_err());
        assert_eq!(
            RunConfig::new(p, 1.0, 2, None).unwrap().times(),
            vec![0.0, 1.0]
        );
    }

    #[test]
    fn exit_codes_for_bad_arguments() {
        assert_eq!(run(["qbattery", "evolve", "--steps", "1"]), EXIT_CONFIG);
        assert_eq!(run(["qbattery", "nonsense"]), EXIT_CONFIG);
        assert_eq!(
            run(["qbattery", "verify", "--relation", "thm99_nope"]),
            EXIT_CONFIG
        );
    }

    #[test]
    fn table1_exits_cleanly() {
        let mut buf = Vec::new();
        assert_eq!(cmd_table1(&mut buf).unwrap(), EXIT_PASS);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("sampling: 1000 points"));
        assert_eq!(text.lines().count(), 7);
    }
}
