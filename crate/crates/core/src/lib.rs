#![no_std]

extern crate alloc;

pub mod color;
pub mod config;
pub mod decoration;
pub mod error;
pub mod fieldtype;
pub mod geom;
pub mod grec;
pub mod ingest;
pub mod pipeline;
pub mod render;
pub mod reuse;
pub mod scene;

pub use config::{Aggregation, Config};
pub use error::PipelineError;
pub use fieldtype::{infer_field_type, FieldType};
pub use geom::{AffineMatrix, BBox};
pub use pipeline::deconstruct_svg;
pub use scene::{ElementKind, NormalizedScene, SceneElement, Style};
