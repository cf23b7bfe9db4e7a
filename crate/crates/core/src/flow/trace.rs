use serde::Serialize;
use serde_json::json;

use super::FlowConfig;
use crate::geometry::HalfSphereGrid;
use crate::io::{fmt_f64, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TMax,
    /// min F fell below the threshold; the surface is close to flat.
    MinCurvature,
    MaxHeight,
    MaxSteps,
    AngleResidual,
    ConvexityLoss,
    NumericalFailure,
}

impl StopReason {
    /// Whether the run ended for a reason that signals a numerical breakdown.
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            StopReason::AngleResidual | StopReason::ConvexityLoss | StopReason::NumericalFailure
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub t: f64,
    /// W_{0,θ}..W_{n+1,θ}.
    pub w: Vec<f64>,
    pub max_f: f64,
    pub min_f: f64,
    /// max of the unnormalized mean curvature.
    pub max_h: f64,
    /// NaN for n < 3.
    pub q_monitor: f64,
    /// AF deficits for k = 1..=(n-1)/2.
    pub phi: Vec<f64>,
    /// max (log Σ 1/κ_i - log ⟨x, e⟩); NaN once undefined.
    pub convexity: f64,
    pub height_min: f64,
    pub height_max: f64,
    pub angle_residual: f64,
    pub kappa_min: f64,
    /// Step that produced this row (0 for the initial row).
    pub dt: f64,
    /// ∫ E_k f dA for k = 0..=n, f the normal speed.
    pub flux: Vec<f64>,
    pub t_star_remaining: Option<f64>,
}

/// Largest relative rise of max F and max H between consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StepStats {
    pub max_f_rise: f64,
    pub max_h_rise: f64,
}

impl StepStats {
    pub(crate) fn record(&mut self, f0: f64, f1: f64, h0: f64, h1: f64) {
        let rise = |a: f64, b: f64| (b - a) / a.abs().max(1e-300);
        if f0.is_finite() && f1.is_finite() {
            self.max_f_rise = self.max_f_rise.max(rise(f0, f1));
        }
        self.max_h_rise = self.max_h_rise.max(rise(h0, h1));
    }
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub config: FlowConfig,
    pub rows: Vec<TraceRow>,
    pub stop: StopReason,
    pub steps: usize,
    pub t_final: f64,
    /// Diagnostic for failure stops.
    pub failure: Option<String>,
    pub final_grid: HalfSphereGrid,
    pub step_stats: StepStats,
}

impl FlowTrace {
    pub fn n(&self) -> usize {
        self.config.grid.n
    }

    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("trace always holds the initial row")
    }

    pub fn csv_header(&self) -> Vec<String> {
        let n = self.n();
        let mut h = vec!["t".to_string()];
        h.extend((0..=n + 1).map(|k| format!("W{k}")));
        h.extend(["maxF", "maxH", "Q"].map(String::from));
        h.extend((1..=(n - 1) / 2).map(|k| format!("phi_{k}")));
        h.extend(["height_min", "height_max", "angle_residual", "kappa_min", "dt"].map(String::from));
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header().join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![fmt_f64(r.t)];
            cells.extend(r.w.iter().map(|&x| fmt_f64(x)));
            cells.extend([r.max_f, r.max_h, r.q_monitor].map(fmt_f64));
            cells.extend(r.phi.iter().map(|&x| fmt_f64(x)));
            cells.extend([r.height_min, r.height_max, r.angle_residual, r.kappa_min, r.dt].map(fmt_f64));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Run summary; non-finite numbers become null.
    pub fn summary_json(&self, seed: u64) -> serde_json::Value {
        let first = &self.rows[0];
        let last = self.last();
        json!({
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "seed": seed,
            "stop": self.stop,
            "failure": self.failure,
            "steps": self.steps,
            "rows": self.rows.len(),
            "t_final": self.t_final,
            "initial": first,
            "final": last,
            "step_stats": self.step_stats,
        })
    }
}
