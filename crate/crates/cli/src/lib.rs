//! Batch front-end: scenario configs in, CSV/JSON results plus provenance
//! sidecars out. The [`suite`] module bundles the toolkit's verification
//! scenarios into one pass/fail report.

pub mod scenario;
pub mod suite;

pub use scenario::{run_scenario, ScenarioKind};
