//! Rendering bound templates to SVG, plus the synthetic chart generator.

mod layout;
mod scale;

pub use layout::{layout_grid, layout_pack, layout_stack};
pub use scale::{nice_ceil, nice_floor, Scale};
mod chart;

pub use chart::{render_chart, RenderMode};
mod corpus;

pub use corpus::{
    check_round_trip, corpus_specs, generate_synthetic_chart, grouped_bar_stress, heatmap_stress,
    mutation_specs, Archetype, ChartSpec, CorrectionRecipe, GeneratedChart, Mutation, SvgVariant,
};
