//! Parameter sweeps: information contents, relation slacks, saturation
//! flags and Venn region at every grid point.

use rayon::prelude::*;

use crate::catalog::{parameter_grid, CatalogFamily};
use crate::error::Result;
use crate::info::InfoContents;
use crate::measurement::Measurement;
use crate::tradeoff::{analyze, TradeoffReport, Tolerances, VennRegion};

/// Fixed CSV header for sweep output.
pub const SWEEP_HEADER: [&str; 16] = [
    "param", "G", "F", "D", "R", "gd_slack", "gr_slack", "gdr_slack", "dr_slack", "gd_sat", "gr_sat", "gdr_sat",
    "dr_sat", "region", "rhs_gd", "rhs_gdr",
];

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub info: InfoContents,
    pub tradeoffs: TradeoffReport,
    pub region: VennRegion,
    pub rhs_gd: f64,
    pub rhs_gdr: f64,
}

impl SweepRow {
    pub fn evaluate(param: f64, m: &Measurement, tol: &Tolerances) -> Result<Self> {
        let a = analyze(m, tol)?;
        Ok(Self {
            param,
            info: a.info,
            tradeoffs: a.tradeoffs,
            region: a.region,
            rhs_gd: a.rhs_gd,
            rhs_gdr: a.rhs_gdr,
        })
    }

    /// Fields in [`SWEEP_HEADER`] order, formatted with `{:?}`-style
    /// shortest round-trip floats.
    pub fn fields(&self) -> [String; 16] {
        let t = &self.tradeoffs;
        let num = |x: f64| format!("{x:?}");
        let flag = |b: bool| if b { "true" } else { "false" }.to_string();
        [
            num(self.param),
            num(self.info.gain),
            num(self.info.op_fidelity),
            num(self.info.disturbance),
            num(self.info.reversibility),
            num(t.gd.slack),
            num(t.gr.slack),
            num(t.gdr.slack),
            num(t.dr.slack),
            flag(t.gd.saturated),
            flag(t.gr.saturated),
            flag(t.gdr.saturated),
            flag(t.dr.saturated),
            self.region.label.as_str().to_string(),
            num(self.rhs_gd),
            num(self.rhs_gdr),
        ]
    }
}

/// Evaluates `build(p)` on an inclusive grid of `steps` points over
/// [lo, hi]. Rows come back in grid order.
pub fn sweep_with<F>(build: F, lo: f64, hi: f64, steps: usize, tol: &Tolerances) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<Measurement> + Sync,
{
    parameter_grid(lo, hi, steps)?
        .into_par_iter()
        .map(|p| SweepRow::evaluate(p, &build(p)?, tol))
        .collect()
}

/// Sweep of a catalog family over [lo, hi].
pub fn sweep_family(family: &CatalogFamily, lo: f64, hi: f64, steps: usize, tol: &Tolerances) -> Result<Vec<SweepRow>> {
    sweep_with(|p| family.build(p), lo, hi, steps, tol)
}
