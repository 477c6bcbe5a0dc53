//! SVG ingestion: XML → node arena → absolute-coordinate scene → noise-free
//! scene.

mod noise;
mod normalize;
mod path;
mod transform;
mod tree;

pub use noise::filter_noise;
pub use normalize::{build_scene, parse_length, resolve_absolute};
pub use path::{path_points, path_to_shape, polygon_to_shape, PathPoints, PathShape};
pub use transform::{parse_numbers, parse_transform};
pub use tree::{parse_svg, RawNode, SvgTree};

use crate::config::Config;
use crate::error::IngestError;
use crate::scene::NormalizedScene;

/// Full ingestion: parse, flatten transforms, recognize marks, drop noise.
pub fn ingest(svg_text: &str, config: &Config) -> Result<NormalizedScene, IngestError> {
    let tree = parse_svg(svg_text)?;
    let scene = build_scene(&tree, config)?;
    filter_noise(&scene, config)
}
