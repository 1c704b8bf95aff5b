//! Information gain, disturbance and reversibility of generalized quantum
//! measurements, their trade-off relations, and independent Haar-average
//! oracles.

pub mod catalog;
pub mod error;
pub mod linalg;
pub mod info;
pub mod measurement;
pub mod montecarlo;
pub mod oracle;
pub mod reversal;
pub mod sweep;
pub mod tradeoff;

pub use catalog::{family, CatalogFamily};
pub use error::{Error, Result};
pub use info::{InfoContents, Provenance};
pub use linalg::{ComplexMatrix, StateVector, C64};
pub use measurement::{compose_measurements, CanonicalMeasurement, Measurement, SingularTable};
pub use reversal::{optimal_reversal, ReversalOperation, ReversalSingularTable};
pub use tradeoff::{analyze, Analysis, InequalityReport, RegionLabel, Tolerances, VennRegion};
