//! Trade-off relations among 𝒢, 𝒟 and ℛ, their saturation conditions, and
//! classification of measurements into the optimal-measurement sets.
//!
//! Relations, with d the dimension:
//!
//! * Lemma 1   2 + (d−1)ℛ ≤ (d+1)𝒻(R∘M)
//! * 𝒢-𝒟       √(𝒻−1/(d+1)) ≤ √(𝒢−1/(d+1)) + √((d−1)(2/(d+1)−𝒢))
//! * 𝒢-ℛ       d(d+1)𝒢 + (d−1)ℛ ≤ 2d
//! * 𝒢-𝒟-ℛ     √(𝒻−1/(d+1)) ≤ √(𝒢−1/(d+1)) + √(ℛ/(d(d+1)))
//!                               + √((d−2)(2/(d+1)−𝒢−ℛ/(d(d+1))))
//! * Lemma 2   𝒻(R∘M) ≤ 𝒻(M)
//! * 𝒟-ℛ       (d−1)ℛ + (d+1)𝒟 ≤ d−1

use std::fmt;

use crate::error::{Error, Result};
use crate::info::{operation_fidelity, overall_fidelity, InfoContents};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::measurement::{compose_measurements, Measurement, SingularTable, COMPLETENESS_TOL};
use crate::reversal::{optimal_reversal, ReversalSingularTable};

/// Numerical tolerances used by checks and classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Frobenius tolerance on Σ M̂†M̂ − 𝟙.
    pub completeness: f64,
    /// |slack| at or below this counts as saturated; also used for the
    /// structural conditions (norm and eigenvalue differences).
    pub saturation: f64,
    /// slack ≥ −numeric counts as satisfied.
    pub numeric: f64,
    /// Radicands in [−radicand, 0) are clamped to zero.
    pub radicand: f64,
    /// Require the 𝒢-ℛ rank-one direction to be a computational basis ket.
    pub strict_gr: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            completeness: COMPLETENESS_TOL,
            saturation: 1e-8,
            numeric: 1e-10,
            radicand: 1e-12,
            strict_gr: false,
        }
    }
}

impl Tolerances {
    /// Tolerances for parameter endpoints where structure degenerates.
    pub fn relaxed() -> Self {
        Self {
            saturation: 1e-6,
            ..Self::default()
        }
    }

    pub fn with_saturation(mut self, tol: f64) -> Self {
        self.saturation = tol;
        self
    }
}

/// The trade-off relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inequality {
    Lemma1,
    GainDisturbance,
    GainReversibility,
    GainDisturbanceReversibility,
    Lemma2,
    DisturbanceReversibility,
}

impl Inequality {
    pub fn short_name(self) -> &'static str {
        match self {
            Self::Lemma1 => "lemma1",
            Self::GainDisturbance => "gd",
            Self::GainReversibility => "gr",
            Self::GainDisturbanceReversibility => "gdr",
            Self::Lemma2 => "lemma2",
            Self::DisturbanceReversibility => "dr",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Lemma1 => "R-F(RM)",
            Self::GainDisturbance => "G-D",
            Self::GainReversibility => "G-R",
            Self::GainDisturbanceReversibility => "G-D-R",
            Self::Lemma2 => "F(RM)-F(M)",
            Self::DisturbanceReversibility => "D-R",
        };
        f.write_str(s)
    }
}

/// lhs ≤ rhs evaluated numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub name: Inequality,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs.
    pub slack: f64,
    pub satisfied: bool,
    pub saturated: bool,
}

impl InequalityReport {
    pub fn new(name: Inequality, lhs: f64, rhs: f64, tol: &Tolerances) -> Self {
        let slack = rhs - lhs;
        Self {
            name,
            lhs,
            rhs,
            slack,
            satisfied: slack >= -tol.numeric,
            saturated: slack.abs() <= tol.saturation,
        }
    }
}

fn sqrt_clamped(x: f64, context: &'static str, tol: &Tolerances) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -tol.radicand {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand { context, value: x })
    }
}

fn dims(info: &InfoContents) -> (f64, f64) {
    let d = info.dim as f64;
    (d, d * (d + 1.0))
}

/// √(𝒻 − 1/(d+1)), shared left-hand side of 𝒢-𝒟 and 𝒢-𝒟-ℛ.
fn fidelity_side(info: &InfoContents, tol: &Tolerances) -> Result<f64> {
    let (d, _) = dims(info);
    sqrt_clamped(info.op_fidelity - 1.0 / (d + 1.0), "fidelity term", tol)
}

/// Right-hand side of 𝒢-𝒟.
pub fn rhs_gd(info: &InfoContents, tol: &Tolerances) -> Result<f64> {
    let (d, _) = dims(info);
    let a = sqrt_clamped(info.gain - 1.0 / (d + 1.0), "gain term", tol)?;
    let b = sqrt_clamped((d - 1.0) * (2.0 / (d + 1.0) - info.gain), "gain complement", tol)?;
    Ok(a + b)
}

/// Right-hand side of 𝒢-𝒟-ℛ.
pub fn rhs_gdr(info: &InfoContents, tol: &Tolerances) -> Result<f64> {
    let (d, norm) = dims(info);
    let a = sqrt_clamped(info.gain - 1.0 / (d + 1.0), "gain term", tol)?;
    let r = sqrt_clamped(info.reversibility / norm, "reversibility term", tol)?;
    let rest = if info.dim == 2 {
        0.0
    } else {
        sqrt_clamped(
            (d - 2.0) * (2.0 / (d + 1.0) - info.gain - info.reversibility / norm),
            "gain-reversibility complement",
            tol,
        )?
    };
    Ok(a + r + rest)
}

pub fn check_gd(info: &InfoContents, tol: &Tolerances) -> Result<InequalityReport> {
    Ok(InequalityReport::new(
        Inequality::GainDisturbance,
        fidelity_side(info, tol)?,
        rhs_gd(info, tol)?,
        tol,
    ))
}

pub fn check_gr(info: &InfoContents, tol: &Tolerances) -> InequalityReport {
    let (d, norm) = dims(info);
    InequalityReport::new(
        Inequality::GainReversibility,
        norm * info.gain + (d - 1.0) * info.reversibility,
        2.0 * d,
        tol,
    )
}

pub fn check_gdr(info: &InfoContents, tol: &Tolerances) -> Result<InequalityReport> {
    Ok(InequalityReport::new(
        Inequality::GainDisturbanceReversibility,
        fidelity_side(info, tol)?,
        rhs_gdr(info, tol)?,
        tol,
    ))
}

pub fn check_dr(info: &InfoContents, tol: &Tolerances) -> InequalityReport {
    let (d, _) = dims(info);
    InequalityReport::new(
        Inequality::DisturbanceReversibility,
        (d - 1.0) * info.reversibility + (d + 1.0) * info.disturbance,
        d - 1.0,
        tol,
    )
}

/// 2 + (d−1)ℛ ≤ (d+1)𝒻(R∘M).
pub fn check_lemma1(info: &InfoContents, overall_f: f64, tol: &Tolerances) -> InequalityReport {
    let (d, _) = dims(info);
    InequalityReport::new(
        Inequality::Lemma1,
        2.0 + (d - 1.0) * info.reversibility,
        (d + 1.0) * overall_f,
        tol,
    )
}

/// 𝒻(R∘M) ≤ 𝒻(M).
pub fn check_lemma2(f_after: f64, f_before: f64, tol: &Tolerances) -> InequalityReport {
    InequalityReport::new(Inequality::Lemma2, f_after, f_before, tol)
}

/// Equality condition of Lemma 1: with u_i^l = (λ_i^r λ_i^{r,l})_r, the
/// vectors of every non-success branch l ≥ 1 are mutually orthogonal.
pub fn lemma1_equality_holds(t: &SingularTable, rt: &ReversalSingularTable, tol: f64) -> Result<bool> {
    if t.dim() != rt.dim() || t.outcomes() != rt.outcomes() {
        return Err(Error::Dimension("reversal table does not match measurement table".into()));
    }
    let d = t.dim();
    let branches = (0..rt.outcomes()).map(|r| rt.branches(r).len()).max().unwrap_or(0);
    for l in 1..branches {
        let u: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..t.outcomes())
                    .map(|r| rt.branches(r).get(l).map_or(0.0, |b| t.get(r, i) * b[i]))
                    .collect()
            })
            .collect();
        for i in 0..d {
            for j in i + 1..d {
                let dot: f64 = u[i].iter().zip(&u[j]).map(|(a, b)| a * b).sum();
                if dot > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// 𝒻 after each stage of a sequential composition: 𝒻(M₁), 𝒻(M₂∘M₁), ….
pub fn fidelity_chain(stages: &[Measurement]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(stages.len());
    let mut acc: Option<Measurement> = None;
    for stage in stages {
        let next = match &acc {
            None => stage.clone(),
            Some(prev) => compose_measurements(stage, prev)?,
        };
        out.push(operation_fidelity(&next.singular_table()?));
        acc = Some(next);
    }
    Ok(out)
}

/// Lemma 2 reports for consecutive entries of a fidelity chain.
pub fn check_chain(fidelities: &[f64], tol: &Tolerances) -> Vec<InequalityReport> {
    fidelities
        .windows(2)
        .map(|w| check_lemma2(w[1], w[0], tol))
        .collect()
}

/// rhs(𝒢-𝒟) − rhs(𝒢-𝒟-ℛ) ≥ 0; zero for qubits.
pub fn rhs_gap_gdr_vs_gd(info: &InfoContents, tol: &Tolerances) -> Result<f64> {
    Ok(rhs_gd(info, tol)? - rhs_gdr(info, tol)?)
}

/// The four relations evaluated on one set of information contents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffReport {
    pub gd: InequalityReport,
    pub gr: InequalityReport,
    pub gdr: InequalityReport,
    pub dr: InequalityReport,
}

impl TradeoffReport {
    pub fn evaluate(info: &InfoContents, tol: &Tolerances) -> Result<Self> {
        Ok(Self {
            gd: check_gd(info, tol)?,
            gr: check_gr(info, tol),
            gdr: check_gdr(info, tol)?,
            dr: check_dr(info, tol),
        })
    }

    pub fn all(&self) -> [InequalityReport; 4] {
        [self.gd, self.gr, self.gdr, self.dr]
    }
}

/// Regions of the optimal-measurement Venn diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// In all four sets.
    I,
    /// 𝒢-𝒟 (hence 𝒢-𝒟-ℛ and 𝒢-ℛ) but not 𝒟-ℛ.
    II,
    /// 𝒢-𝒟-ℛ only.
    III,
    /// 𝒢-ℛ only.
    IV,
    /// None of the sets.
    V,
    /// A membership pattern outside the five regions above, e.g. 𝒢-ℛ and
    /// 𝒟-ℛ without 𝒢-𝒟.
    Unclassified,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::I => "i",
            Self::II => "ii",
            Self::III => "iii",
            Self::IV => "iv",
            Self::V => "v",
            Self::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unclassified => f.write_str("unclassified"),
            other => write!(f, "({})", other.as_str()),
        }
    }
}

/// Membership in the sets of measurements saturating each relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VennRegion {
    pub in_gdr: bool,
    pub in_gd: bool,
    pub in_gr: bool,
    pub in_dr: bool,
    pub label: RegionLabel,
}

impl VennRegion {
    pub fn from_flags(in_gdr: bool, in_gd: bool, in_gr: bool, in_dr: bool) -> Self {
        let label = match (in_gdr, in_gd, in_gr, in_dr) {
            (true, true, true, true) => RegionLabel::I,
            (true, true, true, false) => RegionLabel::II,
            (true, false, false, false) => RegionLabel::III,
            (false, false, true, false) => RegionLabel::IV,
            (false, false, false, false) => RegionLabel::V,
            _ => RegionLabel::Unclassified,
        };
        Self {
            in_gdr,
            in_gd,
            in_gr,
            in_dr,
            label,
        }
    }

    /// in_GD ⇒ in_GDR ∧ in_GR, and in_GDR ∧ in_GR ⇒ in_GD.
    pub fn implications_hold(&self) -> bool {
        (!self.in_gd || (self.in_gdr && self.in_gr)) && (!(self.in_gdr && self.in_gr) || self.in_gd)
    }
}

/// Whether all v_i = (λ_i^r)_r are parallel: the Gram matrix of the
/// normalized non-zero v_i has rank one within `tol`.
pub fn columns_collinear(t: &SingularTable, tol: f64) -> Result<bool> {
    let units: Vec<Vec<f64>> = (0..t.dim())
        .map(|i| t.column_vector(i))
        .filter_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n > tol).then(|| v.iter().map(|x| x / n).collect())
        })
        .collect();
    if units.len() < 2 {
        return Ok(true);
    }
    let k = units.len();
    let gram: Vec<f64> = (0..k * k)
        .map(|idx| {
            let (a, b) = (idx / k, idx % k);
            units[a].iter().zip(&units[b]).map(|(x, y)| x * y).sum()
        })
        .collect();
    let eig = hermitian_eigen(&ComplexMatrix::from_real(k, k, &gram)?)?;
    Ok(eig.values[1] < tol * eig.values[0])
}

fn column_norm(t: &SingularTable, i: usize) -> f64 {
    t.column_vector(i).iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norms_equal(t: &SingularTable, range: std::ops::Range<usize>, tol: f64) -> bool {
    let norms: Vec<f64> = range.map(|i| column_norm(t, i)).collect();
    let (lo, hi) = norms
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    norms.len() < 2 || hi - lo <= tol
}

/// 𝒢-ℛ condition for one operator: M̂†M̂ = a|j⟩⟨j| + b𝟙 with a, b ≥ 0, i.e.
/// all eigenvalues but the largest coincide. In strict mode |j⟩ must also
/// be a computational basis ket, so M̂†M̂ must be diagonal.
fn gr_condition(op: &ComplexMatrix, singulars: &[f64], tol: &Tolerances) -> bool {
    let d = singulars.len();
    let equal_tail = d < 3 || singulars[1].powi(2) - singulars[d - 1].powi(2) <= tol.saturation;
    if !equal_tail {
        return false;
    }
    !tol.strict_gr || (&op.adjoint() * op).max_off_diagonal() <= tol.saturation
}

/// 𝒟-ℛ condition for one operator: rank at most one, or proportional to
/// a unitary (all singular values equal).
fn dr_condition(singulars: &[f64], tol: f64) -> bool {
    let d = singulars.len();
    d < 2 || singulars[1] <= tol || singulars[0] - singulars[d - 1] <= tol
}

/// Set memberships from the saturation conditions:
///
/// * 𝒢-𝒟-ℛ: all v_i collinear and |v_1| = … = |v_{d−2}|
/// * 𝒢-𝒟:   all v_i collinear and |v_1| = … = |v_{d−1}|
/// * 𝒢-ℛ:   every M̂_r†M̂_r = a_r|j_r⟩⟨j_r| + b_r𝟙
/// * 𝒟-ℛ:   every M̂_r has rank ≤ 1 or is proportional to a unitary
///
/// The 𝒟-ℛ condition follows from (d+1)𝒻 − 2 − (d−1)ℛ =
/// (1/d) Σ_r [2(d−1)μ_r Σ_i δ_i^r + Σ_{i≠j} δ_i^r δ_j^r], with μ_r = λ_{d−1}^r and
/// δ_i^r = λ_i^r − μ_r ≥ 0; it covers von Neumann measurements and unitaries.
pub fn saturation_conditions(t: &SingularTable, m: &Measurement, tol: &Tolerances) -> Result<VennRegion> {
    if t.dim() != m.dim() || t.outcomes() != m.outcomes() {
        return Err(Error::Dimension("singular table does not match measurement".into()));
    }
    let d = t.dim();
    let collinear = columns_collinear(t, tol.saturation)?;
    let in_gdr = collinear && (d < 4 || norms_equal(t, 1..d - 1, tol.saturation));
    let in_gd = collinear && norms_equal(t, 1..d, tol.saturation);
    let in_gr = m
        .operators()
        .iter()
        .zip(t.rows())
        .all(|(op, row)| gr_condition(op, row, tol));
    let in_dr = t.rows().iter().all(|row| dr_condition(row, tol.saturation));
    Ok(VennRegion::from_flags(in_gdr, in_gd, in_gr, in_dr))
}

/// Everything computed for one measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub info: InfoContents,
    pub table: SingularTable,
    pub tradeoffs: TradeoffReport,
    pub rhs_gd: f64,
    pub rhs_gdr: f64,
    pub overall_fidelity: f64,
    pub lemma1: InequalityReport,
    pub lemma1_equality: bool,
    pub lemma2: InequalityReport,
    pub region: VennRegion,
}

/// Information contents, all relations (with the optimal reversal for the
/// two lemmas) and the Venn classification of `m`.
pub fn analyze(m: &Measurement, tol: &Tolerances) -> Result<Analysis> {
    m.ensure_complete(tol.completeness)?;
    let cm = m.canonicalize()?;
    let table = cm.table_with_tol(tol.completeness)?;
    let info = InfoContents::from_table(&table);
    let tradeoffs = TradeoffReport::evaluate(&info, tol)?;
    let rev = optimal_reversal(&cm);
    let rt = ReversalSingularTable::new(&rev, &cm)?;
    let overall = overall_fidelity(&table, &rt)?;
    Ok(Analysis {
        rhs_gd: rhs_gd(&info, tol)?,
        rhs_gdr: rhs_gdr(&info, tol)?,
        overall_fidelity: overall,
        lemma1: check_lemma1(&info, overall, tol),
        lemma1_equality: lemma1_equality_holds(&table, &rt, tol.saturation)?,
        lemma2: check_lemma2(overall, info.op_fidelity, tol),
        region: saturation_conditions(&table, m, tol)?,
        info,
        table,
        tradeoffs,
    })
}
