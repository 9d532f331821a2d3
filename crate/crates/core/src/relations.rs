//! Named numerical checks of every capacity/resource relation, evaluated
//! over parameter grids and reduced to pass/fail verdicts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::capacity::{
    capacity_report, capacity_report_of_state, capacity_spectral, charging_peak_capacity, formulas,
    subadditivity_check, subadditivity_of_state,
};
use crate::dynamics::{
    battery_energy_series, charger_energy_series, integrate, sample_times, spectral_evolution,
    spread,
};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, sqrt_clamped, trace_distance, Subsystem};
use crate::model::{
    battery_ground_population, battery_hamiltonian, evolve_closed_form, imaginarity_closed_form,
    re_alpha_beta_conj, HamiltonianParams, ModelSpectrum,
};
use crate::noise::{noisy_capacity_relations, noisy_state, NoiseParams};
use crate::resources::{measure_all, ResourceReport};
use crate::sampling::{random_positive_params, random_x_state, rng_from_seed};

/// Tolerance of the identity relations.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Fixed tolerance of the integrator-versus-analytic table comparison.
pub const TABLE1_TOL: f64 = 5e-3;
/// Allowed gap between the analytic table column and the published one.
pub const TABLE1_PUBLISHED_TOL: f64 = 1e-3;

/// Every relation checked by the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationId {
    Thm1Entanglement,
    Thm2Subadditivity,
    Thm3Residual,
    Thm4Conservation,
    Thm5Steering,
    Thm6Bell,
    Thm7Coherence,
    Thm8Imaginarity,
    Thm9Texture,
    Thm10TextureResidual,
    XidSteeringOfE,
    XidBellOfE,
    XidCoherenceEqE,
    XidImagDecomp,
    XidTextureFamily,
    Tbl1Crosscheck,
    AppBFamily,
}

impl RelationId {
    pub const ALL: [RelationId; 17] = [
        RelationId::Thm1Entanglement,
        RelationId::Thm2Subadditivity,
        RelationId::Thm3Residual,
        RelationId::Thm4Conservation,
        RelationId::Thm5Steering,
        RelationId::Thm6Bell,
        RelationId::Thm7Coherence,
        RelationId::Thm8Imaginarity,
        RelationId::Thm9Texture,
        RelationId::Thm10TextureResidual,
        RelationId::XidSteeringOfE,
        RelationId::XidBellOfE,
        RelationId::XidCoherenceEqE,
        RelationId::XidImagDecomp,
        RelationId::XidTextureFamily,
        RelationId::Tbl1Crosscheck,
        RelationId::AppBFamily,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationId::Thm1Entanglement => "thm1_entanglement",
            RelationId::Thm2Subadditivity => "thm2_subadditivity",
            RelationId::Thm3Residual => "thm3_residual",
            RelationId::Thm4Conservation => "thm4_conservation",
            RelationId::Thm5Steering => "thm5_steering",
            RelationId::Thm6Bell => "thm6_bell",
            RelationId::Thm7Coherence => "thm7_coherence",
            RelationId::Thm8Imaginarity => "thm8_imaginarity",
            RelationId::Thm9Texture => "thm9_texture",
            RelationId::Thm10TextureResidual => "thm10_texture_residual",
            RelationId::XidSteeringOfE => "xid_steering_of_E",
            RelationId::XidBellOfE => "xid_bell_of_E",
            RelationId::XidCoherenceEqE => "xid_coherence_eq_E",
            RelationId::XidImagDecomp => "xid_imag_decomp",
            RelationId::XidTextureFamily => "xid_texture_family",
            RelationId::Tbl1Crosscheck => "tbl1_crosscheck",
            RelationId::AppBFamily => "appB_family",
        }
    }

    /// Inequalities report signed slack instead of a residual.
    pub fn is_inequality(self) -> bool {
        self == RelationId::Thm2Subadditivity
    }

    /// The table comparison carries integration and rounding error of the
    /// published values, so it keeps its own tolerance.
    pub fn fixed_tolerance(self) -> Option<f64> {
        (self == RelationId::Tbl1Crosscheck).then_some(TABLE1_TOL)
    }

    /// Relations evaluated pointwise on the noiseless `(params, t)` grid.
    fn is_pointwise(self) -> bool {
        !matches!(
            self,
            RelationId::Thm2Subadditivity
                | RelationId::Thm4Conservation
                | RelationId::Tbl1Crosscheck
                | RelationId::AppBFamily
        )
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRelation(s.to_string()))
    }
}

impl Serialize for RelationId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Axes of the verification grid plus the seeded random sample count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub omega_b: Vec<f64>,
    pub omega_c: Vec<f64>,
    pub j1: Vec<f64>,
    pub j2: Vec<f64>,
    pub t_max: f64,
    pub t_points: usize,
    pub gammas: Vec<f64>,
    /// Random X-states drawn for the subadditivity check.
    pub random_samples: usize,
    pub seed: u64,
    /// Drop parameter sets with `ω_b = ω_c`.
    pub detuned_only: bool,
}

impl GridSpec {
    pub fn default_with_seed(seed: u64) -> Self {
        Self {
            omega_b: vec![0.5, 1.0, 2.0],
            omega_c: vec![0.5, 1.0, 1.2, 2.0],
            j1: vec![0.1, 0.5, 1.0],
            j2: vec![0.0, 0.1, 1.0],
            t_max: 50.0,
            t_points: 200,
            gammas: vec![0.0, 0.1, 0.25, 0.4, 0.5],
            random_samples: 10_000,
            seed,
            detuned_only: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let axes = [&self.omega_b, &self.omega_c, &self.j1, &self.j2];
        if axes.iter().any(|a| a.is_empty()) {
            return Err(Error::InvalidConfig(
                "every parameter axis needs a value".into(),
            ));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) || self.t_points < 2 {
            return Err(Error::InvalidConfig(format!(
                "need t_max > 0 and at least 2 time points, got {} and {}",
                self.t_max, self.t_points
            )));
        }
        for &g in &self.gammas {
            NoiseParams::new(g)?;
        }
        if self.param_sets()?.is_empty() {
            return Err(Error::InvalidConfig("grid has no parameter sets".into()));
        }
        Ok(())
    }

    /// Cartesian product of the parameter axes.
    pub fn param_sets(&self) -> Result<Vec<HamiltonianParams>> {
        let mut out = Vec::new();
        for &wb in &self.omega_b {
            for &wc in &self.omega_c {
                if self.detuned_only && wb == wc {
                    continue;
                }
                for &j1 in &self.j1 {
                    for &j2 in &self.j2 {
                        out.push(HamiltonianParams::new(wb, wc, j1, j2)?);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn times(&self) -> Vec<f64> {
        sample_times(self.t_max, self.t_points)
    }

    fn points(&self) -> Result<Vec<(HamiltonianParams, f64)>> {
        let times = self.times();
        Ok(self
            .param_sets()?
            .into_iter()
            .flat_map(|p| times.iter().map(move |&t| (p, t)))
            .collect())
    }
}

/// Grid location of a worst residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase {
    pub params: HamiltonianParams,
    pub t: Option<f64>,
    pub gamma: Option<f64>,
}

impl WorstCase {
    fn at(params: HamiltonianParams, t: f64) -> Self {
        Self {
            params,
            t: Some(t),
            gamma: None,
        }
    }
}

impl fmt::Display for WorstCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        write!(
            f,
            "omega_b={} omega_c={} j1={} j2={}",
            p.omega_b, p.omega_c, p.j1, p.j2
        )?;
        if let Some(t) = self.t {
            write!(f, " t={t}")?;
        }
        if let Some(g) = self.gamma {
            write!(f, " gamma={g}")?;
        }
        Ok(())
    }
}

/// Reduced outcome of one relation over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationVerdict {
    pub relation: RelationId,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_case: Option<WorstCase>,
    /// Smallest signed slack, for inequality relations only.
    pub min_slack: Option<f64>,
}

impl RelationVerdict {
    /// `name samples max_residual tolerance PASS|FAIL`, plus the worst-case
    /// location on failure.
    pub fn report_line(&self) -> String {
        let mut line = format!(
            "{:<24} {:>8} {:>12.3e} {:>9.1e} {}",
            self.relation.name(),
            self.samples,
            self.max_residual,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        );
        if let Some(slack) = self.min_slack {
            line.push_str(&format!(" min_slack={slack:.3e}"));
        }
        if !self.pass {
            if let Some(w) = &self.worst_case {
                line.push_str(&format!(" worst at {w}"));
            }
        }
        line
    }
}

/// One evaluated sample: a residual (or signed slack) and where it came from.
#[derive(Debug, Clone, Copy)]
struct Sample {
    value: f64,
    at: WorstCase,
}

/// Everything the pointwise relations need at one `(params, t)`.
struct PointData {
    params: HamiltonianParams,
    t: f64,
    r: ResourceReport,
    capacity: f64,
    residual: f64,
    re_ab: f64,
}

impl PointData {
    fn new(p: &HamiltonianParams, t: f64) -> Result<Self> {
        let rho = evolve_closed_form(p, t).density();
        let battery = partial_trace(&rho, Subsystem::Battery)?;
        let caps = capacity_report_of_state(p, &rho)?;
        Ok(Self {
            params: *p,
            t,
            r: measure_all(&rho, &battery)?,
            capacity: caps.battery,
            residual: caps.residual,
            re_ab: re_alpha_beta_conj(p, t),
        })
    }

    fn residual(&self, relation: RelationId) -> Result<f64> {
        let (p, r, wb) = (&self.params, &self.r, self.params.omega_b);
        let cap = self.capacity;
        let e = r.concurrence;
        let t2 = r.texture_tr * r.texture_tr;
        let value = match relation {
            RelationId::Thm1Entanglement => (cap - formulas::from_concurrence(wb, e)?).abs(),
            RelationId::Thm3Residual => {
                (self.residual - formulas::residual_from_concurrence(p, e)?).abs()
            }
            RelationId::Thm5Steering => (cap - formulas::from_steering(wb, r.steering)?).abs(),
            RelationId::Thm6Bell => (cap - formulas::from_bell(wb, r.bell)?).abs(),
            RelationId::Thm7Coherence => {
                (cap - formulas::from_coherence(wb, r.coherence_l1)?).abs()
            }
            RelationId::Thm8Imaginarity => {
                let via_formula =
                    (cap - formulas::from_imaginarity(wb, self.re_ab, r.imaginarity_l1)?).abs();
                let closed = (r.imaginarity_l1 - imaginarity_closed_form(p, self.t)).abs();
                via_formula.max(closed)
            }
            RelationId::Thm9Texture => (cap - formulas::from_texture(wb, r.texture_tr)?).abs(),
            RelationId::Thm10TextureResidual => {
                (4.0 * t2 - formulas::texture_sq4_from_residual(p, self.residual)).abs()
            }
            RelationId::XidSteeringOfE => (r.steering - 2.0 * e * e).abs(),
            RelationId::XidBellOfE => (r.bell - (2.0 * (1.0 + e * e).sqrt() - 2.0)).abs(),
            RelationId::XidCoherenceEqE => (r.coherence_l1 - e).abs(),
            RelationId::XidImagDecomp => (r.coherence_l1.powi(2)
                - (4.0 * self.re_ab * self.re_ab + r.imaginarity_l1.powi(2)))
            .abs(),
            RelationId::XidTextureFamily => {
                let half_gap = 2.0 * sqrt_clamped(0.5 - t2)?;
                [
                    (e - half_gap).abs(),
                    (r.steering - (4.0 - 8.0 * t2)).abs(),
                    (r.bell - (2.0 * sqrt_clamped(3.0 - 4.0 * t2)? - 2.0)).abs(),
                    (r.coherence_l1 - half_gap).abs(),
                    // squared form: I² = 2 − 4Re(αβ*)² − 4T²
                    (r.imaginarity_l1.powi(2) - (2.0 - 4.0 * self.re_ab * self.re_ab - 4.0 * t2))
                        .abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max)
            }
            _ => unreachable!("{relation} is not pointwise"),
        };
        Ok(value)
    }
}

fn finite_or_inf(x: Result<f64>) -> f64 {
    match x {
        Ok(v) if v.is_finite() => v,
        _ => f64::INFINITY,
    }
}

/// Sequential, order-preserving reduction so verdicts are reproducible.
///
/// The negated comparisons let a NaN sample win the worst case.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn reduce(relation: RelationId, samples: &[Sample], tolerance: f64, bias: f64) -> RelationVerdict {
    let mut worst: Option<Sample> = None;
    for s in samples {
        let s = Sample {
            value: if relation.is_inequality() {
                s.value - bias
            } else {
                s.value + bias
            },
            at: s.at,
        };
        let worse = match worst {
            None => true,
            Some(w) if relation.is_inequality() => !(s.value >= w.value),
            Some(w) => !(s.value <= w.value),
        };
        if worse {
            worst = Some(s);
        }
    }
    let (max_residual, min_slack, pass) = match worst {
        None => (0.0, None, true),
        Some(w) if relation.is_inequality() => {
            let slack = if w.value.is_nan() {
                f64::NEG_INFINITY
            } else {
                w.value
            };
            ((-slack).max(0.0), Some(slack), slack >= -tolerance)
        }
        Some(w) => {
            let r = if w.value.is_nan() {
                f64::INFINITY
            } else {
                w.value
            };
            (r, None, r <= tolerance)
        }
    };
    RelationVerdict {
        relation,
        samples: samples.len(),
        max_residual,
        tolerance,
        pass,
        worst_case: worst.map(|w| w.at),
        min_slack,
    }
}

fn point_data(grid: &GridSpec) -> Result<Vec<Option<PointData>>> {
    Ok(grid
        .points()?
        .par_iter()
        .map(|(p, t)| PointData::new(p, *t).ok())
        .collect())
}

fn pointwise_samples(
    relation: RelationId,
    grid: &GridSpec,
    data: &[Option<PointData>],
) -> Result<Vec<Sample>> {
    let points = grid.points()?;
    Ok(points
        .par_iter()
        .zip(data.par_iter())
        .map(|((p, t), d)| Sample {
            value: d
                .as_ref()
                .map_or(f64::INFINITY, |d| finite_or_inf(d.residual(relation))),
            at: WorstCase::at(*p, *t),
        })
        .collect())
}

fn subadditivity_samples(grid: &GridSpec) -> Result<Vec<Sample>> {
    let points = grid.points()?;
    let slack_of = |r: Result<crate::capacity::Subadditivity>| match r {
        Ok(s) if s.slack().is_finite() => s.slack(),
        _ => f64::NEG_INFINITY,
    };
    let mut out: Vec<Sample> = points
        .par_iter()
        .map(|(p, t)| Sample {
            value: slack_of(subadditivity_of_state(
                &evolve_closed_form(p, *t).density(),
                p,
            )),
            at: WorstCase::at(*p, *t),
        })
        .collect();
    let mut rng = rng_from_seed(grid.seed);
    let draws: Vec<_> = (0..grid.random_samples)
        .map(|_| (random_x_state(&mut rng), random_positive_params(&mut rng)))
        .collect();
    let random: Vec<Sample> = draws
        .par_iter()
        .map(|(x, p)| Sample {
            value: slack_of(subadditivity_check(x, p)),
            at: WorstCase {
                params: *p,
                t: None,
                gamma: None,
            },
        })
        .collect();
    out.extend(random);
    Ok(out)
}

/// Parameter sets of the grid with the flip-flop coupling switched off.
fn uncoupled_sets(grid: &GridSpec) -> Result<Vec<HamiltonianParams>> {
    let mut sets: Vec<HamiltonianParams> = Vec::new();
    for p in grid.param_sets()? {
        let q = HamiltonianParams { j1: 0.0, ..p };
        if !sets.contains(&q) {
            sets.push(q);
        }
    }
    Ok(sets)
}

fn conservation_samples(grid: &GridSpec) -> Result<Vec<Sample>> {
    let sets = uncoupled_sets(grid)?;
    Ok(sets
        .par_iter()
        .map(|p| {
            let value = finite_or_inf((|| {
                let traj = integrate(p, grid.t_max, grid.t_points)?;
                let eb = spread(&battery_energy_series(&traj, p)?);
                let ec = spread(&charger_energy_series(&traj, p)?);
                Ok(eb.max(ec))
            })());
            Sample {
                value,
                at: WorstCase {
                    params: *p,
                    t: None,
                    gamma: None,
                },
            }
        })
        .collect())
}

fn noise_point_residual(p: &HamiltonianParams, t: f64, gamma: f64) -> Result<f64> {
    let noise = NoiseParams::new(gamma)?;
    let att = noise.attenuation();
    let clean = evolve_closed_form(p, t).density();
    let clean_r = measure_all(&clean, &partial_trace(&clean, Subsystem::Battery)?)?;
    let noisy = noisy_state(p, t, gamma)?;
    let report = noisy_capacity_relations(p, t, gamma)?;
    let r = crate::noise::noisy_resources(p, t, gamma)?;

    let mut worst = report.max_residual();
    for i in 0..4 {
        worst = worst.max((noisy.matrix()[(i, i)] - clean.matrix()[(i, i)]).norm());
    }
    worst = worst.max((r.concurrence - att * clean_r.concurrence).abs());
    worst = worst.max((r.coherence_l1 - att * clean_r.coherence_l1).abs());
    worst = worst.max((r.texture_tr - clean_r.texture_tr).abs());
    if noise.is_half() {
        let vanishing = [
            r.concurrence,
            r.steering,
            r.bell,
            r.coherence_l1,
            r.imaginarity_l1,
        ];
        worst = worst.max(vanishing.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn noise_samples(grid: &GridSpec) -> Result<Vec<Sample>> {
    let points = grid.points()?;
    let tagged: Vec<_> = grid
        .gammas
        .iter()
        .flat_map(|&g| points.iter().map(move |&(p, t)| (p, t, g)))
        .collect();
    Ok(tagged
        .par_iter()
        .map(|&(p, t, g)| Sample {
            value: finite_or_inf(noise_point_residual(&p, t, g)),
            at: WorstCase {
                params: p,
                t: Some(t),
                gamma: Some(g),
            },
        })
        .collect())
}

/// One row of the analytic-versus-integrated capacity table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    /// Time as printed in the published table.
    pub t_printed: f64,
    /// Exact sampling point `k·t_max/(steps−1)` the printed time rounds.
    pub t_sample: f64,
    pub published_analytical: f64,
    pub published_numerical: f64,
    /// Closed-form capacity at `t_printed`.
    pub analytical: f64,
    /// RK4 capacity at `t_sample`.
    pub integrated: f64,
}

impl Table1Row {
    pub fn analytical_deviation(&self) -> f64 {
        (self.analytical - self.published_analytical).abs()
    }

    pub fn integration_deviation(&self) -> f64 {
        (self.integrated - self.analytical).abs()
    }

    pub fn passes(&self) -> bool {
        self.analytical_deviation() <= TABLE1_PUBLISHED_TOL
            && self.integration_deviation() <= TABLE1_TOL
    }
}

/// Published table: printed time, sample index, analytical and numerical values.
pub const TABLE1: [(f64, usize, f64, f64); 5] = [
    (5.005, 100, 1.0789, 1.0789),
    (10.01, 200, 0.8359, 0.8359),
    (15.02, 300, 1.9811, 1.9808),
    (20.02, 400, 1.3012, 1.3012),
    (25.03, 500, 0.5788, 0.5769),
];
pub const TABLE1_T_MAX: f64 = 50.0;
pub const TABLE1_STEPS: usize = 1000;

pub fn table1_params() -> HamiltonianParams {
    HamiltonianParams {
        omega_b: 1.0,
        omega_c: 1.0,
        j1: 0.1,
        j2: 0.1,
    }
}

/// Recomputes the table with the closed form and the RK4 integrator.
pub fn table1_rows() -> Result<Vec<Table1Row>> {
    let p = table1_params();
    let traj = integrate(&p, TABLE1_T_MAX, TABLE1_STEPS)?;
    let hb = battery_hamiltonian(&p);
    TABLE1
        .iter()
        .map(
            |&(t_printed, k, published_analytical, published_numerical)| {
                let battery = partial_trace(&traj.states[k], Subsystem::Battery)?;
                Ok(Table1Row {
                    t_printed,
                    t_sample: traj.times[k],
                    published_analytical,
                    published_numerical,
                    analytical: capacity_report(&p, t_printed)?.battery,
                    integrated: capacity_spectral(&battery, &hb)?,
                })
            },
        )
        .collect()
}

fn table1_samples() -> Result<Vec<Sample>> {
    let p = table1_params();
    Ok(table1_rows()?
        .into_iter()
        .map(|row| Sample {
            value: row.integration_deviation().max(row.analytical_deviation()),
            at: WorstCase::at(p, row.t_printed),
        })
        .collect())
}

fn samples_for(
    relation: RelationId,
    grid: &GridSpec,
    data: Option<&[Option<PointData>]>,
) -> Result<Vec<Sample>> {
    match relation {
        RelationId::Thm2Subadditivity => subadditivity_samples(grid),
        RelationId::Thm4Conservation => conservation_samples(grid),
        RelationId::Tbl1Crosscheck => table1_samples(),
        RelationId::AppBFamily => noise_samples(grid),
        _ => match data {
            Some(d) => pointwise_samples(relation, grid, d),
            None => pointwise_samples(relation, grid, &point_data(grid)?),
        },
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

fn verify_inner(
    relation: RelationId,
    grid: &GridSpec,
    tol: f64,
    bias: f64,
    data: Option<&[Option<PointData>]>,
) -> Result<RelationVerdict> {
    let samples = samples_for(relation, grid, data)?;
    let tol = relation.fixed_tolerance().unwrap_or(tol);
    Ok(reduce(relation, &samples, tol, bias))
}

/// Evaluates one relation over the grid.
pub fn verify(relation: RelationId, grid: &GridSpec, tol: f64) -> Result<RelationVerdict> {
    check_tol(tol)?;
    grid.validate()?;
    verify_inner(relation, grid, tol, 0.0, None)
}

/// Like [`verify`] but shifts every residual by `bias` against the relation.
///
/// Negative control for the pass/fail plumbing.
#[doc(hidden)]
pub fn verify_corrupted(
    relation: RelationId,
    grid: &GridSpec,
    tol: f64,
    bias: f64,
) -> Result<RelationVerdict> {
    check_tol(tol)?;
    grid.validate()?;
    verify_inner(relation, grid, tol, bias, None)
}

/// Verdicts for the given relations, in the given order.
pub fn verify_subset(
    relations: &[RelationId],
    grid: &GridSpec,
    tol: f64,
) -> Result<Vec<RelationVerdict>> {
    verify_subset_with(relations, grid, tol, None)
}

/// [`verify_subset`] with an optional corrupted relation.
#[doc(hidden)]
pub fn verify_subset_with(
    relations: &[RelationId],
    grid: &GridSpec,
    tol: f64,
    corrupt: Option<(RelationId, f64)>,
) -> Result<Vec<RelationVerdict>> {
    if relations.is_empty() {
        return Ok(Vec::new());
    }
    check_tol(tol)?;
    grid.validate()?;
    let data = if relations.iter().any(|r| r.is_pointwise()) {
        Some(point_data(grid)?)
    } else {
        None
    };
    relations
        .iter()
        .map(|&r| {
            let bias = match corrupt {
                Some((c, b)) if c == r => b,
                _ => 0.0,
            };
            verify_inner(r, grid, tol, bias, data.as_deref())
        })
        .collect()
}

/// One verdict per relation at the identity tolerance.
pub fn verify_all(grid: &GridSpec) -> Result<Vec<RelationVerdict>> {
    verify_subset(&RelationId::ALL, grid, IDENTITY_TOL)
}

pub fn all_pass(verdicts: &[RelationVerdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}

/// Line-oriented report, one relation per line.
pub fn report_text(verdicts: &[RelationVerdict]) -> String {
    let mut out = format!(
        "{:<24} {:>8} {:>12} {:>9} verdict\n",
        "relation", "samples", "max_residual", "tolerance"
    );
    for v in verdicts {
        out.push_str(&v.report_line());
        out.push('\n');
    }
    out
}

/// Structured sidecar, one record per relation.
pub fn report_json(verdicts: &[RelationVerdict]) -> Result<String> {
    serde_json::to_string_pretty(verdicts).map_err(|e| Error::Io(e.to_string()))
}

/// Battery capacity at the first charged zero of the imaginarity,
/// `t = π/(e₁−e₂)`, for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImaginarityZero {
    pub params: HamiltonianParams,
    pub t: f64,
    pub imaginarity: f64,
    pub capacity: f64,
    pub ceiling: f64,
}

impl ImaginarityZero {
    pub fn below_ceiling(&self) -> bool {
        self.capacity < self.ceiling
    }
}

/// Imaginarity zeros of every coupled parameter set in the grid.
///
/// At even multiples of `π/(e₁−e₂)` the pair is back in `|01⟩`, so only the
/// odd (charged) zeros say anything about the charging peak.
pub fn imaginarity_zero_capacities(grid: &GridSpec) -> Result<Vec<ImaginarityZero>> {
    grid.param_sets()?
        .into_iter()
        .filter(|p| p.j1 != 0.0)
        .map(|p| {
            let t = PI / ModelSpectrum::of(&p).gap();
            let rho = evolve_closed_form(&p, t).density();
            let r = measure_all(&rho, &partial_trace(&rho, Subsystem::Battery)?)?;
            Ok(ImaginarityZero {
                params: p,
                t,
                imaginarity: r.imaginarity_l1,
                capacity: capacity_report(&p, t)?.battery,
                ceiling: 2.0 * p.omega_b,
            })
        })
        .collect()
}

/// Maximum battery capacity along one detuned trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetuningSummary {
    pub delta: f64,
    pub params: HamiltonianParams,
    /// Maximum over every sample, including `t = 0` and the revivals.
    pub grid_max: f64,
    /// Maximum over samples where the battery is more than half charged.
    pub charged_max: Option<f64>,
    /// Capacity at the first charging extremum `t = π/(e₁−e₂)`.
    pub charging_peak: f64,
    pub ceiling: f64,
}

impl DetuningSummary {
    /// Whether the charged battery stays strictly below `2ω_b`.
    pub fn charged_below_ceiling(&self) -> bool {
        self.charging_peak < self.ceiling && self.charged_max.is_none_or(|m| m < self.ceiling)
    }
}

/// Detuning `Δ = ω_c − ω_b` added to a base parameter set.
pub fn detuned(base: &HamiltonianParams, delta: f64) -> Result<HamiltonianParams> {
    HamiltonianParams::new(base.omega_b, base.omega_b + delta, base.j1, base.j2)
}

pub fn detuning_summary(
    base: &HamiltonianParams,
    delta: f64,
    t_max: f64,
    steps: usize,
) -> Result<DetuningSummary> {
    if steps < 2 || !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "need t_max > 0 and steps >= 2, got {t_max} and {steps}"
        )));
    }
    let p = detuned(base, delta)?;
    let mut grid_max: f64 = 0.0;
    let mut charged_max: Option<f64> = None;
    for t in sample_times(t_max, steps) {
        let c = capacity_report(&p, t)?.battery;
        grid_max = grid_max.max(c);
        if battery_ground_population(&p, t) < 0.5 {
            charged_max = Some(charged_max.map_or(c, |m| m.max(c)));
        }
    }
    Ok(DetuningSummary {
        delta,
        params: p,
        grid_max,
        charged_max,
        charging_peak: charging_peak_capacity(&p)?,
        ceiling: 2.0 * p.omega_b,
    })
}

/// Pairwise trace distances between the three evolution routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    pub closed_vs_spectral: f64,
    pub closed_vs_rk4: f64,
    pub spectral_vs_rk4: f64,
    pub worst_case: Option<WorstCase>,
}

impl OracleReport {
    pub fn max_distance(&self) -> f64 {
        self.closed_vs_spectral
            .max(self.closed_vs_rk4)
            .max(self.spectral_vs_rk4)
    }
}

/// closed/spectral, closed/rk4, spectral/rk4 and where.
type Distances = (f64, f64, f64, WorstCase);

/// Closed form, spectral propagator and RK4 compared on every grid point.
pub fn oracle_equivalence(grid: &GridSpec) -> Result<OracleReport> {
    grid.validate()?;
    let per_set: Vec<Result<Vec<Distances>>> = grid
        .param_sets()?
        .par_iter()
        .map(|p| {
            let traj = integrate(p, grid.t_max, grid.t_points)?;
            traj.times
                .iter()
                .zip(&traj.states)
                .map(|(&t, rk4)| {
                    let closed = evolve_closed_form(p, t).density();
                    let spectral = spectral_evolution(p, t)?;
                    Ok((
                        trace_distance(&closed, &spectral),
                        trace_distance(&closed, rk4),
                        trace_distance(&spectral, rk4),
                        WorstCase::at(*p, t),
                    ))
                })
                .collect()
        })
        .collect();
    let mut report = OracleReport {
        samples: 0,
        closed_vs_spectral: 0.0,
        closed_vs_rk4: 0.0,
        spectral_vs_rk4: 0.0,
        worst_case: None,
    };
    let mut worst = -1.0;
    for set in per_set {
        for (a, b, c, at) in set? {
            report.samples += 1;
            report.closed_vs_spectral = report.closed_vs_spectral.max(a);
            report.closed_vs_rk4 = report.closed_vs_rk4.max(b);
            report.spectral_vs_rk4 = report.spectral_vs_rk4.max(c);
            let m = a.max(b).max(c);
            if m > worst {
                worst = m;
                report.worst_case = Some(at);
            }
        }
    }
    Ok(report)
}
