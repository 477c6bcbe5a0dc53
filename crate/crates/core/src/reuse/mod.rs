//! Data schema inference, reuse planning and stepwise binding.

mod plan;
mod schema;
mod session;
mod table;

pub use plan::{
    fill_level, generate_plan, group_levels, suggest_encoding, Choice, ReuseStep, StepKind,
};
pub use schema::{
    check_compatibility, generate_sample_data, infer_schema, CompatibilityReport, DataSchema,
};
pub use session::ReuseSession;
pub use table::{Column, DataTable};
