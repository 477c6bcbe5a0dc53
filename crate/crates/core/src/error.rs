use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config field {field} must be positive and finite, got {value}")]
    NonPositive { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("malformed svg: {0}")]
    MalformedSvg(String),
    #[error("root element is <{0}>, expected <svg>")]
    NoSvgRoot(String),
    #[error("unsupported transform: {0}")]
    UnsupportedTransform(String),
    #[error("scene is empty after filtering")]
    EmptyScene,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecorationError {
    #[error("unknown element id {0}")]
    UnknownElement(usize),
    #[error("region is empty")]
    InvalidRegion,
    #[error("tier {tier} out of range (axis has {tiers} tiers)")]
    TierOutOfRange { tier: usize, tiers: usize },
    #[error("element {0} is not collinear with its tier")]
    NotCollinear(usize),
    #[error("element {0} has the wrong kind for this correction")]
    WrongKind(usize),
    #[error("element {0} is claimed by more than one decoration")]
    DoubleClaim(usize),
    #[error("correction payload does not match its kind")]
    PayloadMismatch,
    #[error("no rectangles remain after stripping decorations")]
    EmptyScene,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrecError {
    #[error("scene contains no rectangles")]
    EmptyScene,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("table has no columns")]
    NoColumns,
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReuseError {
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("field {field:?} has type {found}, step expects {expected}")]
    IncompatibleFieldType {
        field: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("step {index} out of range (plan has {len} steps, cursor at {cursor})")]
    StepOutOfRange {
        index: usize,
        len: usize,
        cursor: usize,
    },
    #[error("channel {0} is not offered by this step")]
    InvalidChannel(String),
    #[error(transparent)]
    Render(#[from] RenderError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("all values equal ({0}); position scale has no extent")]
    AllValuesEqual(f64),
    #[error("scale needs at least one value")]
    EmptyDomain,
    #[error("step {0} has no choice; final render needs every step bound")]
    UnboundStep(usize),
    #[error("layout: {0}")]
    Layout(String),
}

/// Any failure between SVG text and a template.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Decoration(#[from] DecorationError),
    #[error(transparent)]
    Grec(#[from] GrecError),
}

impl PipelineError {
    /// Stable short name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Config(_) => "config",
            PipelineError::Ingest(_) => "ingest",
            PipelineError::Decoration(_) => "decoration",
            PipelineError::Grec(_) => "deconstruct",
        }
    }
}
