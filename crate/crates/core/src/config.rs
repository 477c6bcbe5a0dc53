use alloc::format;
use alloc::string::String;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// How a group-level size encoding aggregates the leaf values it covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Sum,
    Mean,
    Max,
}

/// Every tunable threshold of the pipeline. Exported artifacts embed the
/// record that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Config {
    /// Coincident-vertex tolerance for the path rectangle test.
    pub vertex_dedup_px: f64,
    /// A rect covering at least this fraction of the viewBox is background.
    pub background_area_fraction: f64,
    /// Elements entirely outside the viewBox scaled by this factor are dropped.
    pub offscreen_factor: f64,
    /// Register thick `<line>` elements as candidate rects.
    pub thick_lines_as_rects: bool,
    pub thick_line_min_width: f64,

    pub collinear_tol_px: f64,
    pub tick_max_len_px: f64,
    pub tick_label_radius_px: f64,
    /// Axis line must span this fraction of the label extent.
    pub axis_line_span: f64,
    /// Grid lines span this fraction of the plot area.
    pub grid_line_span: f64,
    /// Legend swatches are at most this fraction of the viewBox area.
    pub legend_mark_max_area: f64,
    /// Longer texts are treated as annotations, not axis labels.
    pub axis_label_max_chars: f64,

    pub eps_stack: f64,
    pub eps_align: f64,
    pub eps_gap: f64,
    pub packing_gap_cap: f64,

    pub fade_opacity: f64,
    pub aggregation: Aggregation,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            vertex_dedup_px: 0.5,
            background_area_fraction: 0.95,
            offscreen_factor: 2.0,
            thick_lines_as_rects: false,
            thick_line_min_width: 6.0,
            collinear_tol_px: 2.0,
            tick_max_len_px: 8.0,
            tick_label_radius_px: 10.0,
            axis_line_span: 0.8,
            grid_line_span: 0.8,
            legend_mark_max_area: 0.01,
            axis_label_max_chars: 24.0,
            eps_stack: 1.0,
            eps_align: 1.0,
            eps_gap: 1.0,
            packing_gap_cap: 5.0,
            fade_opacity: 0.3,
            aggregation: Aggregation::Sum,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks = [
            ("vertexDedupPx", self.vertex_dedup_px),
            ("backgroundAreaFraction", self.background_area_fraction),
            ("offscreenFactor", self.offscreen_factor),
            ("thickLineMinWidth", self.thick_line_min_width),
            ("collinearTolPx", self.collinear_tol_px),
            ("tickMaxLenPx", self.tick_max_len_px),
            ("tickLabelRadiusPx", self.tick_label_radius_px),
            ("axisLineSpan", self.axis_line_span),
            ("gridLineSpan", self.grid_line_span),
            ("legendMarkMaxArea", self.legend_mark_max_area),
            ("axisLabelMaxChars", self.axis_label_max_chars),
            ("epsStack", self.eps_stack),
            ("epsAlign", self.eps_align),
            ("epsGap", self.eps_gap),
            ("packingGapCap", self.packing_gap_cap),
            ("fadeOpacity", self.fade_opacity),
        ];
        for (name, v) in checks {
            if !v.is_finite() || v <= 0.0 {
                return Err(ConfigError::NonPositive {
                    field: name,
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Compact `key=value;…` rendering embedded in exported SVG metadata.
    pub fn fingerprint(&self) -> String {
        format!(
            "vertexDedupPx={};backgroundAreaFraction={};offscreenFactor={};thickLinesAsRects={};\
             thickLineMinWidth={};collinearTolPx={};tickMaxLenPx={};tickLabelRadiusPx={};\
             axisLineSpan={};gridLineSpan={};legendMarkMaxArea={};axisLabelMaxChars={};epsStack={};epsAlign={};\
             epsGap={};packingGapCap={};fadeOpacity={};aggregation={:?}",
            self.vertex_dedup_px,
            self.background_area_fraction,
            self.offscreen_factor,
            self.thick_lines_as_rects,
            self.thick_line_min_width,
            self.collinear_tol_px,
            self.tick_max_len_px,
            self.tick_label_radius_px,
            self.axis_line_span,
            self.grid_line_span,
            self.legend_mark_max_area,
            self.axis_label_max_chars,
            self.eps_stack,
            self.eps_align,
            self.eps_gap,
            self.packing_gap_cap,
            self.fade_opacity,
            self.aggregation,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Config::default().validate().unwrap();
        assert_eq!(Config::default().packing_gap_cap, 5.0);
    }

    #[test]
    fn rejects_non_positive() {
        let cfg = Config {
            eps_gap: 0.0,
            ..Config::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = Config {
            fade_opacity: f64::NAN,
            ..Config::default()
        };
        assert!(cfg.validate().is_err());
    }
}
