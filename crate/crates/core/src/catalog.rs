//! Built-in parameterized measurement families with closed-form
//! information contents and hand-written optimal reversals.
//!
//! Outcome indices are 0-based; |i⟩ is read modulo 3 in the qutrit
//! families.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::info::InfoContents;
use crate::linalg::ComplexMatrix;
use crate::measurement::Measurement;
use crate::reversal::{completion_weight, ReversalOperation};
use crate::tradeoff::RegionLabel;

/// Names accepted by [`family`].
pub const FAMILY_NAMES: [&str; 7] = [
    "qubit_weak",
    "main_text",
    "vn_projective",
    "ex_ii",
    "ex_iii",
    "ex_iv",
    "ex_v",
];

/// Lower end of the `main_text` range, (7 − √37)/2 rounded to six digits;
/// below this the two largest singular values swap and 𝒢 = (1+p)/4 no
/// longer holds.
pub const MAIN_TEXT_LOWER: f64 = 0.458619;

/// A parameterized family p ↦ {M̂_r(p)}.
#[derive(Debug, Clone, Copy)]
pub struct CatalogFamily {
    pub name: &'static str,
    pub description: &'static str,
    pub dim: usize,
    /// Parameter range on which the closed forms hold.
    pub range: (f64, f64),
    /// Venn region at interior parameters.
    pub expected_region: RegionLabel,
    builder: fn(f64) -> Vec<ComplexMatrix>,
    closed_form: fn(f64) -> (f64, f64, f64),
    reversal: fn(f64) -> Vec<(Vec<ComplexMatrix>, usize)>,
}

/// Looks up a family by name.
pub fn family(name: &str) -> Result<CatalogFamily> {
    let f = match name {
        "qubit_weak" => CatalogFamily {
            name: "qubit_weak",
            description: "qubit weak measurement {√η|1⟩⟨1|, |0⟩⟨0| + √(1−η)|1⟩⟨1|}",
            dim: 2,
            range: (0.0, 1.0),
            expected_region: RegionLabel::IV,
            builder: qubit_weak_ops,
            closed_form: |eta| {
                let s = 1.0 + (1.0 - eta).sqrt();
                ((3.0 + eta) / 6.0, (2.0 + eta + s * s) / 6.0, 1.0 - eta)
            },
            reversal: qubit_weak_reversal,
        },
        "main_text" => CatalogFamily {
            name: "main_text",
            description: "qutrit family saturating 𝒢-𝒟-ℛ but not 𝒢-𝒟",
            dim: 3,
            range: (MAIN_TEXT_LOWER, 1.0),
            expected_region: RegionLabel::III,
            builder: |p| cyclic(&[p.sqrt(), ((1.0 - p) * (3.0 - p) / 3.0).sqrt(), (p * (1.0 - p) / 3.0).sqrt()]),
            closed_form: |p| {
                let s = p.sqrt() + ((1.0 - p) * (3.0 - p) / 3.0).sqrt() + (p * (1.0 - p) / 3.0).sqrt();
                ((1.0 + p) / 4.0, 0.25 + s * s / 4.0, p * (1.0 - p))
            },
            reversal: |p| cyclic_reversal(&[p.sqrt(), ((1.0 - p) * (3.0 - p) / 3.0).sqrt(), (p * (1.0 - p) / 3.0).sqrt()]),
        },
        "vn_projective" => CatalogFamily {
            name: "vn_projective",
            description: "von Neumann measurement {|i⟩⟨i|} on a qutrit (parameter ignored)",
            dim: 3,
            range: (0.0, 1.0),
            expected_region: RegionLabel::I,
            builder: |_| cyclic(&[1.0, 0.0, 0.0]),
            closed_form: |_| (0.5, 0.5, 0.0),
            reversal: |_| vec![(vec![ComplexMatrix::identity(3)], 0); 3],
        },
        "ex_ii" => CatalogFamily {
            name: "ex_ii",
            description: "√p|i⟩⟨i| + √((1−p)/2)(𝟙 − |i⟩⟨i|), i = 0, 1, 2",
            dim: 3,
            range: (1.0 / 3.0, 1.0),
            expected_region: RegionLabel::II,
            builder: |p| {
                let b = ((1.0 - p) / 2.0).sqrt();
                cyclic(&[p.sqrt(), b, b])
            },
            closed_form: |p| {
                (
                    (1.0 + p) / 4.0,
                    (3.0 - p + 2.0 * (2.0 * p * (1.0 - p)).sqrt()) / 4.0,
                    1.5 * (1.0 - p),
                )
            },
            reversal: ex_ii_reversal,
        },
        "ex_iii" => CatalogFamily {
            name: "ex_iii",
            description: "√p|i⟩⟨i| + √(2(1−p)/3)|i+1⟩⟨i+1| + √((1−p)/3)|i+2⟩⟨i+2|",
            dim: 3,
            range: (0.4, 1.0),
            expected_region: RegionLabel::III,
            builder: |p| cyclic(&[p.sqrt(), (2.0 * (1.0 - p) / 3.0).sqrt(), ((1.0 - p) / 3.0).sqrt()]),
            closed_form: |p| {
                let f = (3.0 + SQRT_2 * (1.0 - p) + (3f64.sqrt() + 6f64.sqrt()) * (p * (1.0 - p)).sqrt()) / 6.0;
                ((1.0 + p) / 4.0, f, 1.0 - p)
            },
            reversal: ex_iii_reversal,
        },
        "ex_iv" => CatalogFamily {
            name: "ex_iv",
            description: "two weak outcomes √(1/3)|i⟩⟨i| + √(p/6)(rest) and a third completing outcome",
            dim: 3,
            range: (0.0, 1.0),
            expected_region: RegionLabel::IV,
            builder: ex_iv_ops,
            closed_form: |p| {
                let f = (44.0 + 2.0 * p + 8.0 * (2.0 * p).sqrt() + 4.0 * SQRT_2 * ((3.0 - p) * (4.0 - p)).sqrt()) / 72.0;
                ((14.0 - p) / 36.0, f, (4.0 + p) / 6.0)
            },
            reversal: ex_iv_reversal,
        },
        "ex_v" => CatalogFamily {
            name: "ex_v",
            description: "qutrit weak measurement {√p|1⟩⟨1|, |0⟩⟨0| + √(1−p)|1⟩⟨1| + |2⟩⟨2|}",
            dim: 3,
            range: (0.0, 1.0),
            expected_region: RegionLabel::V,
            builder: ex_v_ops,
            closed_form: |p| ((4.0 + p) / 12.0, (2.0 + (1.0 - p).sqrt()) / 3.0, 1.0 - p),
            reversal: ex_v_reversal,
        },
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(f)
}

/// Every family, in [`FAMILY_NAMES`] order.
pub fn all_families() -> Vec<CatalogFamily> {
    FAMILY_NAMES.iter().map(|n| family(n).expect("built-in family")).collect()
}

/// The family's explicit reversal at parameter p.
pub fn reversal_for(name: &str, p: f64) -> Result<ReversalOperation> {
    family(name)?.reversal(p)
}

impl CatalogFamily {
    fn check_param(&self, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "{}: parameter {p} outside [0, 1]",
                self.name
            )));
        }
        Ok(())
    }

    /// Builds the measurement at p ∈ [0, 1]. Parameters outside
    /// [`CatalogFamily::range`] are allowed; see [`CatalogFamily::range_warning`].
    pub fn build(&self, p: f64) -> Result<Measurement> {
        self.check_param(p)?;
        Ok(Measurement::new((self.builder)(p))?.with_label(format!("{} p={p}", self.name)))
    }

    /// Set when p lies outside the range where the closed forms hold.
    pub fn range_warning(&self, p: f64) -> Option<String> {
        let (lo, hi) = self.range;
        (p < lo || p > hi).then(|| {
            format!(
                "{}: p={p} is outside [{lo}, {hi}]; closed forms and expected region do not apply",
                self.name
            )
        })
    }

    /// Closed-form (𝒢, 𝒻, ℛ) at p.
    pub fn expected(&self, p: f64) -> InfoContents {
        let (g, f, r) = (self.closed_form)(p);
        InfoContents::new(self.dim, g, f, r)
    }

    /// Hand-written optimal reversal. Outcomes that cannot be reversed at
    /// p get a single identity operator and no success branch.
    pub fn reversal(&self, p: f64) -> Result<ReversalOperation> {
        self.check_param(p)?;
        let groups = (self.reversal)(p);
        let counts = groups.iter().map(|(_, s)| *s).collect();
        ReversalOperation::new(self.dim, groups.into_iter().map(|(ops, _)| ops).collect(), counts)
    }

    /// `steps` equally spaced parameters covering the range, endpoints
    /// included.
    pub fn grid(&self, steps: usize) -> Result<Vec<f64>> {
        parameter_grid(self.range.0, self.range.1, steps)
    }

    /// Whether p is a range endpoint, where structure may degenerate.
    pub fn is_endpoint(&self, p: f64) -> bool {
        (p - self.range.0).abs() < 1e-12 || (p - self.range.1).abs() < 1e-12
    }
}

/// Inclusive grid lo = p_0 < … < p_{steps−1} = hi.
pub fn parameter_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("a sweep needs at least 2 steps, got {steps}")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("empty parameter range [{lo}, {hi}]")));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if k + 1 == steps { hi } else { lo + (hi - lo) * k as f64 / n })
        .collect())
}

/// Operators diag(x) with entries cyclically shifted by i, i = 0, 1, 2.
fn cyclic(x: &[f64; 3]) -> Vec<ComplexMatrix> {
    (0..3).map(|i| ComplexMatrix::from_diag(&rotate(x, i))).collect()
}

fn rotate(x: &[f64; 3], i: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, v) in x.iter().enumerate() {
        out[(i + k) % 3] = *v;
    }
    out
}

fn irreversible(dim: usize) -> (Vec<ComplexMatrix>, usize) {
    (vec![ComplexMatrix::identity(dim)], 0)
}

/// Reversal of a diagonal operator with entries x (all > 0): success
/// min(x)/x and completion √(1 − (min(x)/x)²).
fn diagonal_reversal(x: &[f64]) -> (Vec<ComplexMatrix>, usize) {
    let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return irreversible(x.len());
    }
    let success: Vec<f64> = x.iter().map(|v| min / v).collect();
    let rest: Vec<f64> = success.iter().map(|&s| completion_weight(s)).collect();
    (vec![ComplexMatrix::from_diag(&success), ComplexMatrix::from_diag(&rest)], 1)
}

fn cyclic_reversal(x: &[f64; 3]) -> Vec<(Vec<ComplexMatrix>, usize)> {
    (0..3).map(|i| diagonal_reversal(&rotate(x, i))).collect()
}

fn qubit_weak_ops(eta: f64) -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::from_diag(&[0.0, eta.sqrt()]),
        ComplexMatrix::from_diag(&[1.0, (1.0 - eta).sqrt()]),
    ]
}

fn qubit_weak_reversal(eta: f64) -> Vec<(Vec<ComplexMatrix>, usize)> {
    let second = if eta < 1.0 {
        (
            vec![
                ComplexMatrix::from_diag(&[(1.0 - eta).sqrt(), 1.0]),
                ComplexMatrix::from_diag(&[eta.sqrt(), 0.0]),
            ],
            1,
        )
    } else {
        irreversible(2)
    };
    vec![irreversible(2), second]
}

fn ex_ii_reversal(p: f64) -> Vec<(Vec<ComplexMatrix>, usize)> {
    if p >= 1.0 {
        return vec![irreversible(3); 3];
    }
    (0..3)
        .map(|i| {
            let success = rotate(&[((1.0 - p) / (2.0 * p)).sqrt(), 1.0, 1.0], i);
            let rest = rotate(&[((3.0 * p - 1.0) / (2.0 * p)).max(0.0).sqrt(), 0.0, 0.0], i);
            (vec![ComplexMatrix::from_diag(&success), ComplexMatrix::from_diag(&rest)], 1)
        })
        .collect()
}

fn ex_iii_reversal(p: f64) -> Vec<(Vec<ComplexMatrix>, usize)> {
    if p >= 1.0 {
        return vec![irreversible(3); 3];
    }
    let h = 0.5f64.sqrt();
    (0..3)
        .map(|i| {
            let success = rotate(&[((1.0 - p) / (3.0 * p)).sqrt(), h, 1.0], i);
            let rest = rotate(&[((4.0 * p - 1.0) / (3.0 * p)).sqrt(), h, 0.0], i);
            (vec![ComplexMatrix::from_diag(&success), ComplexMatrix::from_diag(&rest)], 1)
        })
        .collect()
}

fn ex_iv_ops(p: f64) -> Vec<ComplexMatrix> {
    let weak = [(1.0f64 / 3.0).sqrt(), (p / 6.0).sqrt(), (p / 6.0).sqrt()];
    let b = ((4.0 - p) / 6.0).sqrt();
    vec![
        ComplexMatrix::from_diag(&rotate(&weak, 0)),
        ComplexMatrix::from_diag(&rotate(&weak, 1)),
        ComplexMatrix::from_diag(&[b, b, ((3.0 - p) / 3.0).sqrt()]),
    ]
}

fn ex_iv_reversal(p: f64) -> Vec<(Vec<ComplexMatrix>, usize)> {
    let weak = |i: usize| {
        if p <= 0.0 {
            return irreversible(3);
        }
        // The completion weight on |i⟩ is √((2−p)/2) so that
        // (p/2) + (2−p)/2 = 1.
        let success = rotate(&[(p / 2.0).sqrt(), 1.0, 1.0], i);
        let rest = rotate(&[((2.0 - p) / 2.0).sqrt(), 0.0, 0.0], i);
        (vec![ComplexMatrix::from_diag(&success), ComplexMatrix::from_diag(&rest)], 1)
    };
    let third = (
        vec![
            ComplexMatrix::from_diag(&[1.0, 1.0, ((4.0 - p) / (2.0 * (3.0 - p))).sqrt()]),
            ComplexMatrix::from_diag(&[0.0, 0.0, ((2.0 - p) / (2.0 * (3.0 - p))).sqrt()]),
        ],
        1,
    );
    vec![weak(0), weak(1), third]
}

fn ex_v_ops(p: f64) -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::from_diag(&[0.0, p.sqrt(), 0.0]),
        ComplexMatrix::from_diag(&[1.0, (1.0 - p).sqrt(), 1.0]),
    ]
}

fn ex_v_reversal(p: f64) -> Vec<(Vec<ComplexMatrix>, usize)> {
    let second = if p < 1.0 {
        let s = (1.0 - p).sqrt();
        let q = p.sqrt();
        (
            vec![ComplexMatrix::from_diag(&[s, 1.0, s]), ComplexMatrix::from_diag(&[q, 0.0, q])],
            1,
        )
    } else {
        irreversible(3)
    };
    vec![irreversible(3), second]
}
