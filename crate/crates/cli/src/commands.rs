//! Subcommand implementations. Every command writes its report to the
//! given writer and returns an error (with the matching exit code) after
//! the report when a check fails.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use qmeas_core::catalog::parameter_grid;
use qmeas_core::info::{information_gain, operation_fidelity, overall_fidelity, reversibility};
use qmeas_core::montecarlo::stream_rng;
use qmeas_core::oracle::{
    exact_estimation_fidelity, exact_operation_fidelity, exact_overall_fidelity, exact_reversibility, mc_average,
    McKind, OracleEstimate,
};
use qmeas_core::reversal::success_amplitude;
use qmeas_core::sweep::{sweep_family, SweepRow, SWEEP_HEADER};
use qmeas_core::tradeoff::rhs_gap_gdr_vs_gd;
use qmeas_core::{
    analyze as analyze_measurement, family, optimal_reversal, Analysis, InequalityReport, Measurement, RegionLabel,
    ReversalOperation, ReversalSingularTable, Tolerances, VennRegion,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::document::MeasurementDocument;
use crate::error::{CliError, CliResult};
use crate::{AnalyzeArgs, AuditArgs, ExportArgs, McArgs, OracleCheckArgs, OracleMode, SweepArgs};

/// Largest |formula − exact oracle| accepted.
pub const EXACT_AGREEMENT: f64 = 1e-10;
/// A Monte Carlo value disagrees only if it is off by more than this many
/// standard errors and by more than [`EXACT_AGREEMENT`].
pub const MC_Z_LIMIT: f64 = 6.0;

fn io(e: std::io::Error) -> CliError {
    CliError::input(format!("cannot write output: {e}"))
}

fn write_text(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(io)
}

fn write_json(out: &mut dyn Write, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::numeric(e.to_string()))?;
    text.push('\n');
    write_text(out, &text)
}

fn flag(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn status(r: &InequalityReport) -> &'static str {
    if !r.satisfied {
        "VIOLATED"
    } else if r.saturated {
        "saturated"
    } else {
        "strict"
    }
}

fn report_json(r: &InequalityReport) -> Value {
    json!({
        "lhs": r.lhs,
        "rhs": r.rhs,
        "slack": r.slack,
        "satisfied": r.satisfied,
        "saturated": r.saturated,
    })
}

fn region_json(v: &VennRegion) -> Value {
    json!({
        "label": v.label.as_str(),
        "in_gdr": v.in_gdr,
        "in_gd": v.in_gd,
        "in_gr": v.in_gr,
        "in_dr": v.in_dr,
        "implications_hold": v.implications_hold(),
    })
}

fn region_line(v: &VennRegion) -> String {
    format!(
        "Venn region: {}  [G-D-R: {}, G-D: {}, G-R: {}, D-R: {}]\n",
        v.label,
        flag(v.in_gdr),
        flag(v.in_gd),
        flag(v.in_gr),
        flag(v.in_dr)
    )
}

/// Relations of an analysis in report order.
fn relations(a: &Analysis) -> [InequalityReport; 6] {
    let t = &a.tradeoffs;
    [t.gd, t.gr, t.gdr, t.dr, a.lemma1, a.lemma2]
}

/// Error describing violated relations and failed Venn implications.
fn violations(a: &Analysis) -> Option<CliError> {
    let mut bad: Vec<String> = relations(a)
        .iter()
        .filter(|r| !r.satisfied)
        .map(|r| format!("{} (slack {:e})", r.name, r.slack))
        .collect();
    if !a.region.implications_hold() {
        bad.push("Venn implications".into());
    }
    (!bad.is_empty()).then(|| CliError::numeric(format!("violated: {}", bad.join(", "))))
}

/// One formula compared with an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub quantity: &'static str,
    pub formula: f64,
    pub oracle: OracleEstimate,
}

impl CrossCheck {
    pub fn delta(&self) -> f64 {
        (self.formula - self.oracle.value).abs()
    }

    pub fn agrees(&self) -> bool {
        let delta = self.delta();
        if self.oracle.samples == 0 {
            delta <= EXACT_AGREEMENT
        } else {
            delta <= EXACT_AGREEMENT || self.oracle.z_score(self.formula) <= MC_Z_LIMIT
        }
    }
}

/// Formula values for 𝒢, 𝒻, 𝒻(R∘M) and ℛ (optimal reversal) against the
/// chosen oracle.
pub fn cross_check(m: &Measurement, mode: OracleMode, mc: &McArgs) -> CliResult<Vec<CrossCheck>> {
    let cm = m.canonicalize()?;
    let table = cm.table()?;
    let rev = optimal_reversal(&cm);
    let rt = ReversalSingularTable::new(&rev, &cm)?;
    let estimates = cm.optimal_estimates()?;
    let canonical = cm.positive_part()?;
    let formulas = [
        information_gain(&table),
        operation_fidelity(&table),
        overall_fidelity(&table, &rt)?,
        reversibility(&table),
    ];
    McKind::ALL
        .iter()
        .zip(formulas)
        .enumerate()
        .map(|(k, (&kind, formula))| {
            let oracle = match mode {
                OracleMode::Exact => match kind {
                    McKind::Gain => exact_estimation_fidelity(m, &estimates)?,
                    McKind::OpFidelity => exact_operation_fidelity(&canonical)?,
                    McKind::OverallFidelity => exact_overall_fidelity(m, &rev)?,
                    McKind::Reversibility => exact_reversibility(m, &rev)?,
                },
                OracleMode::Mc => {
                    let target = if kind == McKind::OpFidelity { &canonical } else { m };
                    mc_average(
                        kind,
                        target,
                        Some(&rev),
                        Some(&estimates),
                        mc.samples,
                        mc.seed.wrapping_add(k as u64),
                    )?
                }
            };
            Ok(CrossCheck {
                quantity: kind.name(),
                formula,
                oracle,
            })
        })
        .collect()
}

fn cross_check_text(rows: &[CrossCheck], mode: OracleMode) -> String {
    let mut s = String::new();
    let name = match mode {
        OracleMode::Exact => "exact",
        OracleMode::Mc => "Monte Carlo",
    };
    let _ = writeln!(s, "oracle cross-check ({name})");
    let _ = writeln!(
        s,
        "  {:<18} {:>18} {:>18} {:>10} {:>8}",
        "quantity", "formula", "oracle", "|delta|", "z"
    );
    for r in rows {
        let z = if r.oracle.samples == 0 {
            "-".to_string()
        } else {
            format!("{:.2}", r.oracle.z_score(r.formula))
        };
        let _ = writeln!(
            s,
            "  {:<18} {:>18.15} {:>18.15} {:>10.2e} {:>8}{}",
            r.quantity,
            r.formula,
            r.oracle.value,
            r.delta(),
            z,
            if r.agrees() { "" } else { "  MISMATCH" }
        );
    }
    let max = rows.iter().map(CrossCheck::delta).fold(0.0, f64::max);
    let _ = writeln!(s, "  max |delta| = {max:.3e}");
    s
}

fn mismatch(rows: &[CrossCheck]) -> Option<CliError> {
    let bad: Vec<&str> = rows.iter().filter(|r| !r.agrees()).map(|r| r.quantity).collect();
    (!bad.is_empty()).then(|| CliError::numeric(format!("oracle disagrees with formula: {}", bad.join(", "))))
}

/// Checks on a reversal supplied in the document.
struct ProvidedReversal {
    completeness_residual: f64,
    success_amplitudes: Vec<Option<f64>>,
    composed_fidelity: f64,
    reversibility: f64,
}

fn check_provided(m: &Measurement, rev: &ReversalOperation, tol: &Tolerances) -> CliResult<ProvidedReversal> {
    if rev.dim() != m.dim() || rev.outcomes() != m.outcomes() {
        return Err(CliError::input(format!(
            "reversal is for d={} with {} outcomes; measurement has d={} with {} outcomes",
            rev.dim(),
            rev.outcomes(),
            m.dim(),
            m.outcomes()
        )));
    }
    let residual = rev.completeness_residual();
    if residual > tol.completeness {
        return Err(CliError::input(format!(
            "reversal operators are not complete: residual {residual:e} exceeds tolerance {:e}",
            tol.completeness
        )));
    }
    let success_amplitudes = (0..m.outcomes())
        .map(|r| success_amplitude(rev, m, r).ok())
        .collect();
    let composed = rev.compose_with(m)?;
    Ok(ProvidedReversal {
        completeness_residual: residual,
        success_amplitudes,
        composed_fidelity: operation_fidelity(&composed.singular_table()?),
        reversibility: exact_reversibility(m, rev)?.value,
    })
}

/// `analyze` and `classify`.
pub fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CliResult<()> {
    let doc = MeasurementDocument::read(&args.file)?;
    if doc.is_template() {
        return Err(CliError::input(format!(
            "{}: document contains expressions in p; use it with `sweep --template`",
            args.file.display()
        )));
    }
    let tol = args.tol.resolve(doc.tolerance)?;
    let m = doc.measurement(None, tol.completeness)?;
    let provided = doc.reversal(None)?;
    let a = analyze_measurement(&m, &tol)?;
    let name = doc.label.clone().unwrap_or_else(|| args.file.display().to_string());

    if args.classify_only {
        if args.json {
            write_json(out, &json!({ "measurement": name, "region": region_json(&a.region) }))?;
        } else {
            write_text(out, &region_line(&a.region))?;
        }
        return if a.region.implications_hold() {
            Ok(())
        } else {
            Err(CliError::numeric("Venn implications violated"))
        };
    }

    let cm = m.canonicalize()?;
    let rev = optimal_reversal(&cm);
    let provided = provided.map(|r| check_provided(&m, &r, &tol)).transpose()?;
    let checks = args.oracle.map(|mode| cross_check(&m, mode, &args.mc)).transpose()?;
    let completeness = m.validate_completeness(tol.completeness).residual;

    if args.json {
        let rel: serde_json::Map<String, Value> = relations(&a)
            .iter()
            .map(|r| (r.name.short_name().to_string(), report_json(r)))
            .collect();
        let mut doc_json = json!({
            "measurement": name,
            "dim": m.dim(),
            "outcomes": m.outcomes(),
            "completeness_residual": completeness,
            "info": {
                "G": a.info.gain,
                "F": a.info.op_fidelity,
                "D": a.info.disturbance,
                "R": a.info.reversibility,
            },
            "rhs_gd": a.rhs_gd,
            "rhs_gdr": a.rhs_gdr,
            "relations": rel,
            "lemma1_equality": a.lemma1_equality,
            "region": region_json(&a.region),
            "optimal_reversal": {
                "overall_fidelity": a.overall_fidelity,
                "reversibility": a.info.reversibility,
                "success_amplitudes": (0..m.outcomes()).map(|r| cm.singulars(r)[m.dim() - 1]).collect::<Vec<_>>(),
                "branches": (0..m.outcomes()).map(|r| rev.operators(r).len()).collect::<Vec<_>>(),
            },
        });
        if let Some(p) = &provided {
            doc_json["provided_reversal"] = json!({
                "completeness_residual": p.completeness_residual,
                "success_amplitudes": p.success_amplitudes,
                "overall_fidelity": p.composed_fidelity,
                "reversibility": p.reversibility,
            });
        }
        if let Some(rows) = &checks {
            doc_json["oracle"] = rows
                .iter()
                .map(|r| {
                    json!({
                        "quantity": r.quantity,
                        "formula": r.formula,
                        "oracle": r.oracle.value,
                        "std_error": r.oracle.std_error,
                        "samples": r.oracle.samples,
                        "delta": r.delta(),
                        "agrees": r.agrees(),
                    })
                })
                .collect::<Vec<_>>()
                .into();
        }
        write_json(out, &doc_json)?;
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "measurement: {name} (d={}, {} outcomes)", m.dim(), m.outcomes());
        let _ = writeln!(s, "completeness residual: {completeness:.3e}");
        let _ = writeln!(s);
        let _ = writeln!(s, "information contents");
        let _ = writeln!(s, "  G = {:.15}", a.info.gain);
        let _ = writeln!(s, "  F = {:.15}", a.info.op_fidelity);
        let _ = writeln!(s, "  D = {:.15}", a.info.disturbance);
        let _ = writeln!(s, "  R = {:.15}", a.info.reversibility);
        let _ = writeln!(s);
        let _ = writeln!(s, "relations (lhs <= rhs)");
        let _ = writeln!(
            s,
            "  {:<12} {:>18} {:>18} {:>11}  status",
            "relation", "lhs", "rhs", "slack"
        );
        for r in relations(&a) {
            let _ = writeln!(
                s,
                "  {:<12} {:>18.15} {:>18.15} {:>11.3e}  {}",
                r.name.to_string(),
                r.lhs,
                r.rhs,
                r.slack,
                status(&r)
            );
        }
        let _ = writeln!(s, "  R = F(RM) for the optimal reversal: {}", flag(a.lemma1_equality));
        let _ = writeln!(s);
        s.push_str(&region_line(&a.region));
        let _ = writeln!(s);
        let _ = writeln!(s, "optimal reversal");
        for r in 0..m.outcomes() {
            let _ = writeln!(
                s,
                "  outcome {r}: success amplitude {:.15}, {} operator(s), {} success branch(es)",
                cm.singulars(r)[m.dim() - 1],
                rev.operators(r).len(),
                rev.success_count(r)
            );
        }
        let _ = writeln!(s, "  F(RM) = {:.15}", a.overall_fidelity);
        let _ = writeln!(s, "  R     = {:.15}", a.info.reversibility);
        if let Some(p) = &provided {
            let _ = writeln!(s);
            let _ = writeln!(s, "provided reversal");
            let _ = writeln!(s, "  completeness residual: {:.3e}", p.completeness_residual);
            for (r, amp) in p.success_amplitudes.iter().enumerate() {
                match amp {
                    Some(x) => {
                        let _ = writeln!(s, "  outcome {r}: success amplitude {x:.15}");
                    }
                    None => {
                        let _ = writeln!(s, "  outcome {r}: not proportional to the identity on success");
                    }
                }
            }
            let _ = writeln!(s, "  F(RM) = {:.15}", p.composed_fidelity);
            let _ = writeln!(s, "  reversibility achieved = {:.15}", p.reversibility);
        }
        if let (Some(rows), Some(mode)) = (&checks, args.oracle) {
            let _ = writeln!(s);
            s.push_str(&cross_check_text(rows, mode));
        }
        write_text(out, &s)?;
    }

    if let Some(e) = violations(&a) {
        return Err(e);
    }
    if let Some(p) = &provided {
        let lemma2 = p.composed_fidelity - a.info.op_fidelity;
        if lemma2 > tol.numeric {
            return Err(CliError::numeric(format!(
                "provided reversal raises the operation fidelity by {lemma2:e}"
            )));
        }
    }
    match checks.as_deref().and_then(mismatch) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn write_csv(rows: &[SweepRow], out: &mut dyn Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush().map_err(io)
}

fn template_sweep(path: &Path, lo: f64, hi: f64, steps: usize, args: &SweepArgs) -> CliResult<Vec<SweepRow>> {
    let doc = MeasurementDocument::read(path)?;
    let tol = args.tol.resolve(doc.tolerance)?;
    parameter_grid(lo, hi, steps)?
        .into_par_iter()
        .map(|p| {
            let m = doc
                .measurement(Some(p), tol.completeness)
                .map_err(|e| CliError::input(format!("p={p}: {e}")))?;
            Ok(SweepRow::evaluate(p, &m, &tol)?)
        })
        .collect()
}

/// `sweep`: CSV with one row per grid point.
pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let rows = match (&args.family, &args.template) {
        (Some(name), None) => {
            let f = family(name)?;
            let lo = args.from.unwrap_or(f.range.0);
            let hi = args.to.unwrap_or(f.range.1);
            for p in [lo, hi] {
                if let Some(w) = f.range_warning(p) {
                    eprintln!("warning: {w}");
                }
            }
            let tol = args.tol.resolve(None)?;
            sweep_family(&f, lo, hi, args.steps, &tol)?
        }
        (None, Some(path)) => template_sweep(path, args.from.unwrap_or(0.0), args.to.unwrap_or(1.0), args.steps, args)?,
        _ => return Err(CliError::input("give exactly one of --family and --template")),
    };
    match &args.output {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
            write_csv(&rows, &mut file)?;
            write_text(out, &format!("wrote {} rows to {}\n", rows.len(), path.display()))
        }
        None => write_csv(&rows, out),
    }
}

/// Per-instance audit results.
struct AuditItem {
    relations: [InequalityReport; 6],
    gap: f64,
    implications: bool,
    region: RegionLabel,
    completeness: f64,
    qubit_identity: f64,
}

const REGIONS: [RegionLabel; 6] = [
    RegionLabel::I,
    RegionLabel::II,
    RegionLabel::III,
    RegionLabel::IV,
    RegionLabel::V,
    RegionLabel::Unclassified,
];

/// `audit`: all relations on `count` seeded random measurements.
pub fn audit(args: &AuditArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.dim < 2 {
        return Err(CliError::input(format!("--dim must be at least 2, got {}", args.dim)));
    }
    if args.outcomes < 1 || args.count < 1 {
        return Err(CliError::input("--outcomes and --count must be at least 1"));
    }
    let tol = args.tol.resolve(None)?;
    let items = (0..args.count as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(args.seed, k);
            let m = Measurement::random(args.dim, args.outcomes, &mut rng)?;
            let a = analyze_measurement(&m, &tol)?;
            Ok(AuditItem {
                relations: relations(&a),
                gap: rhs_gap_gdr_vs_gd(&a.info, &tol)?,
                implications: a.region.implications_hold(),
                region: a.region.label,
                completeness: m.validate_completeness(tol.completeness).residual,
                qubit_identity: ((2.0 / 3.0 - a.info.gain) - a.info.reversibility / 6.0).abs(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "audit: d={}, n={}, count={}, seed={}",
        args.dim, args.outcomes, args.count, args.seed
    );
    let _ = writeln!(s, "  {:<12} {:>12} {:>11}", "relation", "min slack", "violations");
    let mut total = 0;
    for j in 0..6 {
        let name = items[0].relations[j].name;
        let min = items.iter().map(|it| it.relations[j].slack).fold(f64::INFINITY, f64::min);
        let bad = items.iter().filter(|it| !it.relations[j].satisfied).count();
        total += bad;
        let _ = writeln!(s, "  {:<12} {:>12.3e} {:>11}", name.to_string(), min, bad);
    }
    let min_gap = items.iter().map(|it| it.gap).fold(f64::INFINITY, f64::min);
    let bad_gap = items.iter().filter(|it| it.gap < -tol.numeric).count();
    total += bad_gap;
    let _ = writeln!(s, "  rhs(G-D) - rhs(G-D-R): min {min_gap:.3e}, negative {bad_gap}");
    let bad_impl = items.iter().filter(|it| !it.implications).count();
    total += bad_impl;
    let _ = writeln!(s, "  Venn implication violations: {bad_impl}");
    let counts: Vec<String> = REGIONS
        .iter()
        .map(|&l| format!("{}: {}", l.as_str(), items.iter().filter(|it| it.region == l).count()))
        .collect();
    let _ = writeln!(s, "  regions: {}", counts.join(", "));
    let max_res = items.iter().map(|it| it.completeness).fold(0.0, f64::max);
    let _ = writeln!(s, "  max completeness residual: {max_res:.3e}");
    if args.dim == 2 {
        let max_id = items.iter().map(|it| it.qubit_identity).fold(0.0, f64::max);
        let _ = writeln!(s, "  qubit identity max |(2/3 - G) - R/6|: {max_id:.3e}");
    }
    let _ = writeln!(s, "violations: {total}");
    write_text(out, &s)?;
    if total > 0 {
        return Err(CliError::numeric(format!("{total} violations in the audit")));
    }
    Ok(())
}

/// `oracle-check`: formula, exact oracle and Monte Carlo side by side.
pub fn oracle_check(args: &OracleCheckArgs, out: &mut dyn Write) -> CliResult<()> {
    let (m, expected, name) = match (&args.file, &args.family) {
        (Some(path), None) => {
            let doc = MeasurementDocument::read(path)?;
            let tol = doc.completeness_tolerance(args.tol_complete);
            let m = doc.measurement(None, tol)?;
            let name = doc.label.clone().unwrap_or_else(|| path.display().to_string());
            (m, None, name)
        }
        (None, Some(fname)) => {
            let f = family(fname)?;
            let p = args.param.ok_or_else(|| CliError::input("--family needs --param"))?;
            let m = f.build(p)?;
            let expected = match f.range_warning(p) {
                Some(w) => {
                    eprintln!("warning: {w}");
                    None
                }
                None => Some(f.expected(p)),
            };
            (m, expected, format!("{fname} p={p}"))
        }
        _ => return Err(CliError::input("give exactly one of FILE and --family")),
    };
    let exact = cross_check(&m, OracleMode::Exact, &args.mc)?;
    let mc = cross_check(&m, OracleMode::Mc, &args.mc)?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "oracle check: {name} (d={}, {} outcomes, {} samples, seed {})",
        m.dim(),
        m.outcomes(),
        args.mc.samples,
        args.mc.seed
    );
    let _ = writeln!(
        s,
        "  {:<18} {:>18} {:>18} {:>18} {:>10} {:>18} {:>10} {:>7}",
        "quantity", "closed form", "formula", "exact", "|delta|", "monte carlo", "std err", "z"
    );
    let closed = expected.map(|e| [Some(e.gain), Some(e.op_fidelity), None, Some(e.reversibility)]);
    let mut failures = Vec::new();
    for (k, (e, r)) in exact.iter().zip(&mc).enumerate() {
        let cf = closed.and_then(|c| c[k]);
        let cf_text = cf.map_or("-".to_string(), |x| format!("{x:.15}"));
        if cf.is_some_and(|x| (x - e.formula).abs() > EXACT_AGREEMENT) {
            failures.push(format!("{} closed form", e.quantity));
        }
        if !e.agrees() {
            failures.push(format!("{} exact", e.quantity));
        }
        if !r.agrees() {
            failures.push(format!("{} monte carlo", e.quantity));
        }
        let _ = writeln!(
            s,
            "  {:<18} {:>18} {:>18.15} {:>18.15} {:>10.2e} {:>18.15} {:>10.2e} {:>7.2}",
            e.quantity,
            cf_text,
            e.formula,
            e.oracle.value,
            e.delta(),
            r.oracle.value,
            r.oracle.std_error,
            r.oracle.z_score(r.formula)
        );
    }
    let max = exact.iter().map(CrossCheck::delta).fold(0.0, f64::max);
    let _ = writeln!(s, "  max |formula - exact| = {max:.3e}");
    let _ = writeln!(
        s,
        "  result: {}",
        if failures.is_empty() { "agree" } else { "MISMATCH" }
    );
    write_text(out, &s)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::numeric(format!("disagreement: {}", failures.join(", "))))
    }
}

/// `export`: a catalog measurement as a document.
pub fn export(args: &ExportArgs, out: &mut dyn Write) -> CliResult<()> {
    let f = family(&args.family)?;
    if let Some(w) = f.range_warning(args.param) {
        eprintln!("warning: {w}");
    }
    let m = f.build(args.param)?;
    let rev = if args.no_reversal {
        None
    } else {
        Some(f.reversal(args.param)?)
    };
    let mut text = MeasurementDocument::from_measurement(&m, rev.as_ref()).to_json();
    text.push('\n');
    match &args.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => write_text(out, &text),
    }
}
