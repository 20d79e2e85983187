//! Trace metrics and CSV output.
//!
//! The attenuation ratios are squared-norm integral ratios,
//!
//! ```text
//! γ_T,sim = ∫‖T(z̃)‖² / ∫(‖D(v_w)‖² + ‖D(v_c)‖²)
//! γ_O,sim = ∫‖O(z̃)‖² / ∫(‖P(v_w)‖² + ‖P(v_c)‖²)
//! ```
//!
//! compared directly against the configured level. [`RatioMode::Sqrt`]
//! takes the square root first, i.e. the L2-gain reading of the same
//! integrals. Disturbances are the logged effective ones (see
//! [`SimRecord`]).

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::controllers::{AttenuationSpec, SingularRegionSpec};
use crate::error::{Error, Result};
use crate::simulator::{SimRecord, SimTrace};

/// Relative round-off slack when checking `‖v_s‖ ≤ κ_s √s̄ ‖Γ‖`, which is
/// an identity-level bound evaluated in floating point.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RatioMode {
    #[default]
    AsPrinted,
    Sqrt,
}

/// Trapezoidal `∫ y dt` over possibly non-uniform samples.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    assert_eq!(t.len(), y.len(), "trapezoid needs matching samples");
    t.windows(2)
        .zip(y.windows(2))
        .map(|(tw, yw)| 0.5 * (tw[1] - tw[0]) * (yw[0] + yw[1]))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffortSummary {
    /// `∫‖u‖ dt`.
    pub effort_integral: f64,
    pub u_norm: Vec<f64>,
    /// `√(‖P(z̃)‖² + ‖D(z̃)‖²)` per record.
    pub err_norm: Vec<f64>,
    pub max_err_norm: f64,
    pub final_err_norm: f64,
    pub min_sigma_min: f64,
}

pub fn effort_and_error(trace: &SimTrace) -> EffortSummary {
    let t: Vec<f64> = trace.records.iter().map(|r| r.t).collect();
    let u_norm: Vec<f64> = trace.records.iter().map(SimRecord::u_norm).collect();
    let err_norm: Vec<f64> = trace.records.iter().map(SimRecord::err_norm).collect();
    EffortSummary {
        effort_integral: trapezoid(&t, &u_norm),
        max_err_norm: err_norm.iter().copied().fold(0.0, f64::max),
        final_err_norm: err_norm.last().copied().unwrap_or(0.0),
        min_sigma_min: trace.records.iter().map(|r| r.sigma_min).fold(f64::INFINITY, f64::min),
        u_norm,
        err_norm,
    }
}

/// Squared-norm series entering the attenuation ratios.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AttenuationSeries {
    pub t: Vec<f64>,
    pub translation_error: Vec<f64>,
    pub orientation_error: Vec<f64>,
    /// `‖D(v_w)‖² + ‖D(v_c)‖²`.
    pub dual_disturbance: Vec<f64>,
    /// `‖P(v_w)‖² + ‖P(v_c)‖²`.
    pub primary_disturbance: Vec<f64>,
}

impl AttenuationSeries {
    pub fn from_trace(trace: &SimTrace) -> Self {
        let mut s = AttenuationSeries::default();
        for r in &trace.records {
            s.t.push(r.t);
            s.translation_error.push(r.error.translation.norm_squared());
            s.orientation_error.push(r.error.orientation.norm_squared());
            let (w, c) = (&r.v_w, &r.v_c);
            s.primary_disturbance
                .push(w.fixed_rows::<3>(0).norm_squared() + c.fixed_rows::<3>(0).norm_squared());
            s.dual_disturbance
                .push(w.fixed_rows::<3>(3).norm_squared() + c.fixed_rows::<3>(3).norm_squared());
        }
        s
    }

    /// `(γ_T,sim, γ_O,sim)`; a ratio is `None` when its disturbance energy
    /// is zero.
    pub fn ratios(&self, mode: RatioMode) -> (Option<f64>, Option<f64>) {
        let ratio = |num: &[f64], den: &[f64]| {
            let d = trapezoid(&self.t, den);
            (d > 0.0).then(|| {
                let r = trapezoid(&self.t, num) / d;
                match mode {
                    RatioMode::AsPrinted => r,
                    RatioMode::Sqrt => r.sqrt(),
                }
            })
        };
        (
            ratio(&self.translation_error, &self.dual_disturbance),
            ratio(&self.orientation_error, &self.primary_disturbance),
        )
    }
}

/// One pass/fail check with the numbers it compared.
#[derive(Clone, Debug, PartialEq)]
pub struct Flag {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttenuationReport {
    pub mode: RatioMode,
    pub gamma_t_sim: Option<f64>,
    pub gamma_o_sim: Option<f64>,
    /// Levels the ratios are compared with: the larger of each pair.
    pub gamma_t: Option<f64>,
    pub gamma_o: Option<f64>,
    pub effort_integral: f64,
    pub max_err_norm: f64,
    pub final_err_norm: f64,
    pub max_translation_error: f64,
    pub max_orientation_error: f64,
    pub min_sigma_min: f64,
    /// `σ_region (1 − σ_far⁻¹)` when a singular region is configured.
    pub sigma_floor: Option<f64>,
    /// Largest `‖v_s‖ / (κ_s √s̄ ‖Γ‖)` seen, when the law reports it.
    pub max_induced_ratio: Option<f64>,
    pub flags: Vec<Flag>,
}

impl AttenuationReport {
    pub fn passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }
}

pub fn attenuation(
    trace: &SimTrace,
    spec: Option<&AttenuationSpec>,
    region: Option<&SingularRegionSpec>,
    mode: RatioMode,
) -> AttenuationReport {
    let summary = effort_and_error(trace);
    let (gamma_t_sim, gamma_o_sim) = AttenuationSeries::from_trace(trace).ratios(mode);
    let gamma_t = spec.map(|s| s.gamma_t1.max(s.gamma_t2));
    let gamma_o = spec.map(|s| s.gamma_o1.max(s.gamma_o2));
    let mut flags = Vec::new();
    for (name, sim, bound) in [("gamma_T", gamma_t_sim, gamma_t), ("gamma_O", gamma_o_sim, gamma_o)] {
        if let (Some(v), Some(b)) = (sim, bound) {
            flags.push(Flag {
                name,
                value: v,
                bound: b,
                passed: v <= b,
            });
        }
    }
    let sigma_floor = region.map(SingularRegionSpec::sigma_floor);
    if let Some(floor) = sigma_floor {
        flags.push(Flag {
            name: "sigma_floor",
            value: summary.min_sigma_min,
            bound: floor,
            passed: summary.min_sigma_min >= floor,
        });
    }
    let mut max_induced_ratio: Option<f64> = None;
    let mut induced_ok = true;
    for (v, b) in trace.records.iter().filter_map(|r| r.induced) {
        induced_ok &= v <= b * (1.0 + BOUND_SLACK) + f64::EPSILON;
        if b > 0.0 {
            max_induced_ratio = Some(max_induced_ratio.map_or(v / b, |m| m.max(v / b)));
        }
    }
    if trace.records.iter().any(|r| r.induced.is_some()) {
        flags.push(Flag {
            name: "induced_bound",
            value: max_induced_ratio.unwrap_or(0.0),
            bound: 1.0,
            passed: induced_ok,
        });
    }
    let max_of = |f: fn(&SimRecord) -> f64| trace.records.iter().map(f).fold(0.0, f64::max);
    AttenuationReport {
        mode,
        gamma_t_sim,
        gamma_o_sim,
        gamma_t,
        gamma_o,
        effort_integral: summary.effort_integral,
        max_err_norm: summary.max_err_norm,
        final_err_norm: summary.final_err_norm,
        max_translation_error: max_of(|r| r.error.translation.norm()),
        max_orientation_error: max_of(|r| r.error.orientation.norm()),
        min_sigma_min: summary.min_sigma_min,
        sigma_floor,
        max_induced_ratio,
        flags,
    }
}

pub fn csv_header(dof: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..dof).map(|i| format!("q{i}")));
    cols.extend((0..dof).map(|i| format!("u{i}")));
    cols.extend((0..8).map(|i| format!("x{i}")));
    cols.extend((0..8).map(|i| format!("xd{i}")));
    cols.extend(["err_norm", "u_norm", "sigma_min", "kappa_s"].map(String::from));
    cols.extend((0..6).map(|i| format!("vw{i}")));
    cols.extend((0..6).map(|i| format!("vc{i}")));
    cols.join(",")
}

/// Trace as CSV, every value with 17 significant digits.
pub fn trace_csv(trace: &SimTrace) -> String {
    let mut s = csv_header(trace.dof);
    s.push('\n');
    let mut row: Vec<f64> = Vec::new();
    for r in &trace.records {
        row.clear();
        row.push(r.t);
        row.extend(r.q.iter());
        row.extend(r.u.iter());
        row.extend(r.x.vec8().iter());
        row.extend(r.x_d.vec8().iter());
        row.extend([r.err_norm(), r.u_norm(), r.sigma_min, r.kappa_s]);
        row.extend(r.v_w.iter());
        row.extend(r.v_c.iter());
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v:.16e}");
        }
        s.push('\n');
    }
    s
}

pub fn write_trace_csv(trace: &SimTrace, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &trace_csv(trace))
}

/// A finished scenario as it appears in `summary.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub controller: String,
    pub report: AttenuationReport,
}

pub const SUMMARY_HEADER: &str = "scenario,controller,effort,max_err_norm,final_err_norm,min_sigma_min,\
gamma_T_sim,gamma_T,gamma_O_sim,gamma_O,max_induced_ratio,passed,failed_flags";

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for row in rows {
        let r = &row.report;
        let failed: Vec<&str> = r.flags.iter().filter(|f| !f.passed).map(|f| f.name).collect();
        let _ = writeln!(
            s,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{},{},{},{}",
            row.scenario,
            row.controller,
            r.effort_integral,
            r.max_err_norm,
            r.final_err_norm,
            r.min_sigma_min,
            opt(r.gamma_t_sim),
            opt(r.gamma_t),
            opt(r.gamma_o_sim),
            opt(r.gamma_o),
            opt(r.max_induced_ratio),
            r.passed(),
            failed.join(";"),
        );
    }
    s
}

pub fn write_summary_csv(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &summary_csv(rows))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
