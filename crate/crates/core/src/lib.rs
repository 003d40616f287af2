//! Directional antenna analysis for train-mounted grade-crossing warning
//! transmitters.
//!
//! The crate derives the minimal azimuthal gain envelope a locomotive
//! antenna needs so that every vehicle inside the road safe zone hears the
//! warning while the train is inside the railway notification zone, sizes
//! the smallest aperture that realizes it, and checks arbitrary candidate
//! patterns (uniform linear arrays included) against the requirement.
//!
//! Pipeline overview:
//!
//! ```text
//! safety  ──► link_budget ──► envelope ──► sizing
//!                                 │
//!                                 ├──► array    (candidate grading)
//!                                 └──► coverage (brute-force oracle)
//! ```
//!
//! All internal quantities are linear (watts, linear gain, meters, radians).
//! Decibels and degrees only appear at the edges: constructors, reports and
//! file formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array;
pub mod config;
pub mod coverage;
pub mod envelope;
pub mod error;
pub mod link_budget;
pub mod pattern;
pub mod safety;
pub mod sizing;
pub mod units;

pub use array::{ComplianceReport, UniformLinearArraySpec, Violation};
pub use coverage::{CoverageGrid, CoverageReport, TracePoint};
pub use envelope::CrossingGeometry;
pub use error::{Error, Result};
pub use link_budget::LinkBudgetParams;
pub use pattern::AzimuthPattern;
pub use safety::{SafetyScenario, Scenario, StoppingTable, Surface};
pub use sizing::AntennaDimensions;
pub use units::{GainDbi, PowerDbm};
