//! JSON measurement documents.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "label": "weak",
//!   "operators": [
//!     [[[0, 0], [0, 0]], [[0, 0], [0.6, 0]]],
//!     [[[1, 0], [0, 0]], [[0, 0], [0.8, 0]]]
//!   ],
//!   "reversal": {
//!     "operators": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]], [...]],
//!     "success_count": [0, 1]
//!   }
//! }
//! ```
//!
//! Every matrix entry is a `[re, im]` pair. In sweep templates an entry may
//! also be a string expression in the parameter `p`, e.g. `"math::sqrt(p)"`.

use evalexpr::{build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Value};
use qmeas_core::measurement::COMPLETENESS_TOL;
use qmeas_core::{ComplexMatrix, Measurement, ReversalOperation, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value as JsonValue;

use crate::error::{CliError, CliResult};

/// One real number: a literal, or an expression in `p` (templates only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

/// Rows of `[re, im]` entries.
pub type MatrixDoc = Vec<Vec<Vec<Scalar>>>;

/// A success count shared by every outcome, or one per outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SuccessCount {
    Uniform(usize),
    PerOutcome(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReversalDoc {
    /// Operators grouped per outcome.
    pub operators: Vec<Vec<MatrixDoc>>,
    pub success_count: SuccessCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Completeness tolerance for this document (default 1e-8).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub operators: Vec<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reversal: Option<ReversalDoc>,
}

impl MeasurementDocument {
    /// Parses JSON text; errors carry the line and column.
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            let msg = msg.strip_suffix(&suffix).unwrap_or(&msg);
            CliError::input(format!("parse error at line {}, column {}: {msg}", e.line(), e.column()))
        })
    }

    pub fn read(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Document with literal entries for `m` and, optionally, a reversal.
    pub fn from_measurement(m: &Measurement, rev: Option<&ReversalOperation>) -> Self {
        let reversal = rev.map(|rev| ReversalDoc {
            operators: rev.groups().iter().map(|ops| ops.iter().map(matrix_doc).collect()).collect(),
            success_count: SuccessCount::PerOutcome(rev.success_counts().to_vec()),
        });
        Self {
            dim: m.dim(),
            label: (!m.label().is_empty()).then(|| m.label().to_string()),
            tolerance: None,
            operators: m.operators().iter().map(matrix_doc).collect(),
            reversal,
        }
    }

    /// Pretty JSON with each matrix row on one line.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("documents always serialize");
        let mut out = String::new();
        write_value(&value, 0, &mut out);
        out
    }

    /// Whether any entry is an expression in `p`.
    pub fn is_template(&self) -> bool {
        let has_expr = |m: &MatrixDoc| m.iter().flatten().flatten().any(|s| matches!(s, Scalar::Expr(_)));
        self.operators.iter().any(has_expr)
            || self
                .reversal
                .as_ref()
                .is_some_and(|r| r.operators.iter().flatten().any(has_expr))
    }

    /// Completeness tolerance: `override_tol`, else the document's, else
    /// the default.
    pub fn completeness_tolerance(&self, override_tol: Option<f64>) -> f64 {
        override_tol.or(self.tolerance).unwrap_or(COMPLETENESS_TOL)
    }

    /// The measurement, with expressions evaluated at `param`, checked for
    /// completeness.
    pub fn measurement(&self, param: Option<f64>, tol: f64) -> CliResult<Measurement> {
        if self.dim == 0 {
            return Err(CliError::input("dim must be at least 1"));
        }
        if self.operators.is_empty() {
            return Err(CliError::input("a measurement needs at least one operator"));
        }
        let ops = self
            .operators
            .iter()
            .enumerate()
            .map(|(k, m)| to_matrix(m, self.dim, &format!("operator {k}"), param))
            .collect::<CliResult<Vec<_>>>()?;
        let mut m = Measurement::new(ops)?;
        if let Some(label) = &self.label {
            m = m.with_label(label.clone());
        }
        let completeness = m.validate_completeness(tol);
        if !completeness.valid {
            return Err(CliError::input(format!(
                "operators are not complete: residual ‖Σ M†M − 1‖_F = {:e} exceeds tolerance {tol:e}",
                completeness.residual
            )));
        }
        Ok(m)
    }

    /// The document's reversal block, if any.
    pub fn reversal(&self, param: Option<f64>) -> CliResult<Option<ReversalOperation>> {
        let Some(block) = &self.reversal else {
            return Ok(None);
        };
        if block.operators.len() != self.operators.len() {
            return Err(CliError::input(format!(
                "reversal has {} outcome groups for {} operators",
                block.operators.len(),
                self.operators.len()
            )));
        }
        let groups = block
            .operators
            .iter()
            .enumerate()
            .map(|(r, ops)| {
                ops.iter()
                    .enumerate()
                    .map(|(l, m)| to_matrix(m, self.dim, &format!("reversal outcome {r}, operator {l}"), param))
                    .collect::<CliResult<Vec<_>>>()
            })
            .collect::<CliResult<Vec<_>>>()?;
        let counts = match &block.success_count {
            SuccessCount::Uniform(s) => vec![*s; groups.len()],
            SuccessCount::PerOutcome(v) => v.clone(),
        };
        Ok(Some(ReversalOperation::new(self.dim, groups, counts)?))
    }
}

/// Nesting depth of arrays inside `v` (a scalar has depth 0).
fn array_depth(v: &JsonValue) -> usize {
    match v {
        JsonValue::Array(items) => 1 + items.iter().map(array_depth).max().unwrap_or(0),
        _ => 0,
    }
}

/// Pretty-prints `v`, writing arrays at most two deep (matrix rows, count
/// lists) on a single line.
fn write_value(v: &JsonValue, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        JsonValue::Array(items) if array_depth(v) <= 2 => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(item, indent, out);
            }
            out.push(']');
        }
        JsonValue::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                out.push_str(if k > 0 { ",\n" } else { "\n" });
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&pad(indent));
            out.push(']');
        }
        JsonValue::Object(map) => {
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(if k > 0 { ",\n" } else { "\n" });
                out.push_str(&pad(indent + 1));
                out.push_str(&JsonValue::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|z| vec![Scalar::Number(z.re), Scalar::Number(z.im)])
                .collect()
        })
        .collect()
}

fn to_matrix(doc: &MatrixDoc, dim: usize, what: &str, param: Option<f64>) -> CliResult<ComplexMatrix> {
    if doc.len() != dim {
        return Err(CliError::input(format!("{what}: expected {dim} rows, found {}", doc.len())));
    }
    let mut rows = Vec::with_capacity(dim);
    for (i, row) in doc.iter().enumerate() {
        if row.len() != dim {
            return Err(CliError::input(format!(
                "{what}, row {i}: expected {dim} entries, found {}",
                row.len()
            )));
        }
        let mut out = Vec::with_capacity(dim);
        for (j, entry) in row.iter().enumerate() {
            let at = || format!("{what}, row {i}, column {j}");
            let [re, im] = entry.as_slice() else {
                return Err(CliError::input(format!("{}: expected a [re, im] pair", at())));
            };
            out.push(C64::new(evaluate(re, param, &at)?, evaluate(im, param, &at)?));
        }
        rows.push(out);
    }
    Ok(ComplexMatrix::from_rows(rows)?)
}

fn evaluate(s: &Scalar, param: Option<f64>, at: &dyn Fn() -> String) -> CliResult<f64> {
    let value = match s {
        Scalar::Number(x) => *x,
        Scalar::Expr(expr) => {
            let p = param.ok_or_else(|| {
                CliError::input(format!("{}: expression \"{expr}\" is only allowed in sweep templates", at()))
            })?;
            eval_expression(expr, p).map_err(|e| CliError::input(format!("{}: {e}", at())))?
        }
    };
    if !value.is_finite() {
        return Err(CliError::input(format!("{}: entry is not finite", at())));
    }
    Ok(value)
}

/// Evaluates `expr` with the variable `p` bound.
pub fn eval_expression(expr: &str, p: f64) -> Result<f64, String> {
    let tree = build_operator_tree::<DefaultNumericTypes>(expr).map_err(|e| format!("cannot parse \"{expr}\": {e}"))?;
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    ctx.set_value("p".into(), Value::Float(p)).map_err(|e| e.to_string())?;
    tree.eval_number_with_context(&ctx)
        .map_err(|e| format!("cannot evaluate \"{expr}\" at p={p}: {e}"))
}
