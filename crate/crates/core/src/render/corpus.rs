//! Synthetic chart generator with known ground truth.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::color::lerp_hex;
use crate::decoration::{
    AxisSummary, Correction, CorrectionKind, DecorationSummary, LegendKind, Target,
};
use crate::fieldtype::infer_field_type;
use crate::geom::BBox;
use crate::grec::{Channel, Gravity, LevelSummary, NodeKind, RelationCategory, TemplateSummary};
use crate::scene::NormalizedScene;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Archetype {
    Bar,
    GroupedBar,
    StackedBar,
    DivergingStacked,
    GroupedStacked,
    Heatmap,
    Bullet,
    TreemapBar,
    Marimekko,
    Range,
    Waterfall,
    SmallMultiples,
}

impl Archetype {
    pub const ALL: [Archetype; 12] = [
        Archetype::Bar,
        Archetype::GroupedBar,
        Archetype::StackedBar,
        Archetype::DivergingStacked,
        Archetype::GroupedStacked,
        Archetype::Heatmap,
        Archetype::Bullet,
        Archetype::TreemapBar,
        Archetype::Marimekko,
        Archetype::Range,
        Archetype::Waterfall,
        Archetype::SmallMultiples,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Archetype::Bar => "bar",
            Archetype::GroupedBar => "groupedBar",
            Archetype::StackedBar => "stackedBar",
            Archetype::DivergingStacked => "divergingStacked",
            Archetype::GroupedStacked => "groupedStacked",
            Archetype::Heatmap => "heatmap",
            Archetype::Bullet => "bullet",
            Archetype::TreemapBar => "treemapBar",
            Archetype::Marimekko => "marimekko",
            Archetype::Range => "range",
            Archetype::Waterfall => "waterfall",
            Archetype::SmallMultiples => "smallMultiples",
        }
    }
}

/// How the marks are structured in the SVG document.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SvgVariant {
    /// Marks grouped by fill colour.
    A,
    /// Every element a direct child of the root.
    B,
    /// Rectangles written as paths under nested transforms.
    C,
}

impl SvgVariant {
    pub const ALL: [SvgVariant; 3] = [SvgVariant::A, SvgVariant::B, SvgVariant::C];
}

/// Seeded decoration-detection failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mutation {
    /// An axis label too long to be taken for one.
    M1,
    /// A short annotation collinear with the axis labels.
    M2,
    /// A second label row whose count does not divide the first.
    M3,
    /// Axis labels drawn inside the plot.
    M4,
    /// Marker and note pairs that read as a legend.
    M5,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::M1,
        Mutation::M2,
        Mutation::M3,
        Mutation::M4,
        Mutation::M5,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChartSpec {
    pub archetype: Archetype,
    pub variant: SvgVariant,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
}

impl ChartSpec {
    pub fn id(&self) -> String {
        let m = self.mutation.map(|m| format!("-{m:?}")).unwrap_or_default();
        format!(
            "{}-{:?}-{}{}",
            self.archetype.name(),
            self.variant,
            self.seed,
            m
        )
    }
}

/// A correction expressed against text content so it can be resolved to
/// element ids after ingestion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorrectionRecipe {
    pub kind: CorrectionKind,
    pub target: Target,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub texts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<BBox>,
}

impl CorrectionRecipe {
    /// Looks the texts up in `scene`; `None` when one is missing.
    pub fn resolve(&self, scene: &NormalizedScene) -> Option<Correction> {
        let mut ids = Vec::new();
        for t in &self.texts {
            ids.push(
                scene
                    .texts()
                    .find(|e| e.text_content() == t && !ids.contains(&e.id))?
                    .id,
            );
        }
        Some(match self.kind {
            CorrectionKind::AddLabel => {
                Correction::add_label(self.target, self.tier.unwrap_or(0), &ids)
            }
            CorrectionKind::RemoveLabel => Correction::remove_label(self.target, &ids),
            CorrectionKind::AddTier => Correction::add_tier(self.target),
            CorrectionKind::DesignateRegion => {
                Correction::designate_region(self.target, self.region?)
            }
            CorrectionKind::RemoveDecoration => Correction::remove_decoration(self.target),
            CorrectionKind::SetFieldType => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratedChart {
    pub spec: ChartSpec,
    pub svg: String,
    pub expected: TemplateSummary,
    pub expected_decoration: DecorationSummary,
    pub c_group: usize,
    pub rect_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<CorrectionRecipe>,
}

/// The round-trip corpus: every archetype in every variant for each seed.
pub fn corpus_specs(seeds: &[u64]) -> Vec<ChartSpec> {
    let mut out = Vec::new();
    for &archetype in &Archetype::ALL {
        for &variant in &SvgVariant::ALL {
            for &seed in seeds {
                out.push(ChartSpec {
                    archetype,
                    variant,
                    seed,
                    mutation: None,
                });
            }
        }
    }
    out
}

/// One bar chart per decoration failure class.
pub fn mutation_specs(seed: u64) -> Vec<ChartSpec> {
    Mutation::ALL
        .iter()
        .map(|&m| ChartSpec {
            archetype: Archetype::Bar,
            variant: SvgVariant::B,
            seed,
            mutation: Some(m),
        })
        .collect()
}

const SERIES: [&str; 6] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2",
];
const BAR: &str = "#4c78a8";
const NAMES: [&str; 12] = [
    "Apples", "Pears", "Plums", "Grapes", "Lemons", "Limes", "Kiwis", "Mangos", "Melons", "Figs",
    "Dates", "Cherries",
];
const SERIES_NAMES: [&str; 6] = ["North", "South", "East", "West", "Central", "Other"];
const YEARS: [&str; 4] = ["2017", "2018", "2019", "2020"];
const FONT: f64 = 10.0;

struct Mark {
    b: BBox,
    fill: String,
}

struct Text {
    x: f64,
    y: f64,
    s: String,
    anchor: &'static str,
}

struct Line {
    a: (f64, f64),
    b: (f64, f64),
}

#[derive(Default)]
struct Drawing {
    marks: Vec<Mark>,
    texts: Vec<Text>,
    lines: Vec<Line>,
    /// Legend swatches, kept apart so they are never data marks.
    swatches: Vec<Mark>,
    gradient: Option<(BBox, String, String)>,
    x_tiers: Vec<Vec<String>>,
    y_tiers: Vec<Vec<String>>,
    legend: Vec<(String, String)>,
    continuous: bool,
}

impl Drawing {
    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        self.marks.push(Mark {
            b: BBox::new(x, y, w, h),
            fill: fill.to_string(),
        });
    }

    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &'static str) {
        self.texts.push(Text {
            x,
            y,
            s: s.to_string(),
            anchor,
        });
    }

    fn plot(&self) -> BBox {
        BBox::enclosing(self.marks.iter().map(|m| &m.b)).unwrap_or_default()
    }

    /// Labels centred under the given x positions, `tier` rows below the plot.
    fn x_labels(&mut self, centers: &[f64], labels: &[String], tier: usize) {
        let bottom = self.plot().bottom();
        let y = bottom + 14.0 + 14.0 * tier as f64;
        for (x, s) in centers.iter().zip(labels) {
            self.text(*x, y, s, "middle");
        }
        if tier == 0 {
            let p = self.plot();
            self.lines.push(Line {
                a: (p.x - 4.0, bottom),
                b: (p.right() + 4.0, bottom),
            });
            for x in centers {
                self.lines.push(Line {
                    a: (*x, bottom),
                    b: (*x, bottom + 4.0),
                });
            }
        }
        while self.x_tiers.len() <= tier {
            self.x_tiers.push(Vec::new());
        }
        self.x_tiers[tier] = sorted_by(centers, labels);
    }

    /// Right-aligned labels left of the plot at the given y centres.
    fn y_labels(&mut self, centers: &[f64], labels: &[String]) {
        let p = self.plot();
        for (y, s) in centers.iter().zip(labels) {
            self.text(p.x - 8.0, y + 3.5, s, "end");
            self.lines.push(Line {
                a: (p.x - 5.0, *y),
                b: (p.x, *y),
            });
        }
        self.lines.push(Line {
            a: (p.x, p.y - 4.0),
            b: (p.x, p.bottom() + 4.0),
        });
        self.y_tiers = vec![sorted_by(centers, labels)];
    }

    /// Numeric value labels for a zero-based vertical axis.
    fn y_value_axis(&mut self, baseline: f64, px_per_unit: f64, max_value: f64, suffix: &str) {
        let step = crate::render::nice_ceil(max_value / 4.0).max(1.0);
        let top = self.plot().y;
        let mut centers = Vec::new();
        let mut labels = Vec::new();
        let mut v = 0.0;
        while v <= max_value + 1e-9 && baseline - v * px_per_unit >= top - 0.5 {
            centers.push(baseline - v * px_per_unit);
            labels.push(format!("{}{suffix}", v as i64));
            v += step;
        }
        self.y_labels(&centers, &labels);
    }

    /// Horizontal swatch legend above the plot.
    fn legend_row(&mut self, entries: &[(&str, &str)]) {
        let mut x = self.plot().x;
        for (label, color) in entries {
            self.swatches.push(Mark {
                b: BBox::new(x, 6.0, 10.0, 10.0),
                fill: color.to_string(),
            });
            self.text(x + 14.0, 15.0, label, "start");
            x += 14.0 + label.chars().count() as f64 * FONT * 0.6 + 16.0;
        }
        self.legend = entries
            .iter()
            .map(|(l, c)| (l.to_string(), c.to_string()))
            .collect();
    }
}

fn sorted_by(keys: &[f64], labels: &[String]) -> Vec<String> {
    let mut v: Vec<(f64, String)> = keys.iter().copied().zip(labels.iter().cloned()).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.into_iter().map(|(_, s)| s).collect()
}

fn names(list: &[&str], n: usize) -> Vec<String> {
    (0..n).map(|i| list[i % list.len()].to_string()).collect()
}

fn level(kind: NodeKind, category: Option<RelationCategory>, gravity: Gravity) -> LevelSummary {
    LevelSummary {
        kind,
        category,
        gravity,
    }
}

fn col(cat: RelationCategory, g: Gravity) -> LevelSummary {
    level(NodeKind::Collection, Some(cat), g)
}

fn leaf() -> LevelSummary {
    level(NodeKind::Leaf, None, Gravity::None)
}

fn summary(levels: Vec<LevelSummary>, mut channels: Vec<Channel>, forest: bool) -> TemplateSummary {
    channels.sort();
    TemplateSummary {
        levels,
        channels,
        forest,
    }
}

/// Picks `n` values in `lo..hi` whose pairwise differences all exceed `sep`.
fn spread(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, sep: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| libm::round(rng.random_range(lo..hi)))
            .collect();
        let ok = (0..n).all(|i| (0..i).all(|j| (v[i] - v[j]).abs() > sep));
        if ok || n < 2 {
            return v;
        }
    }
}

const OX: f64 = 70.0;
const OY: f64 = 40.0;
const BASE: f64 = 260.0;

fn bar(d: &mut Drawing, rng: &mut ChaCha8Rng, count: Option<usize>) -> (TemplateSummary, usize) {
    let n = count.unwrap_or_else(|| rng.random_range(5..9));
    let hs = spread(rng, n, 20.0, 200.0, 1.5);
    let mut centers = Vec::new();
    for (i, h) in hs.iter().enumerate() {
        let x = OX + 32.0 * i as f64;
        d.rect(x, BASE - h, 24.0, *h, BAR);
        centers.push(x + 12.0);
    }
    d.x_labels(&centers, &names(&NAMES, n), 0);
    d.y_value_axis(BASE, 1.0, 200.0, "");
    (
        summary(
            vec![col(RelationCategory::HGrid, Gravity::Bottom), leaf()],
            vec![Channel::Height],
            false,
        ),
        1,
    )
}

fn grouped_bar(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let g = rng.random_range(3..5);
    let s = 3;
    let mut centers = Vec::new();
    for gi in 0..g {
        let gx = OX + gi as f64 * (s as f64 * 16.0 + 20.0);
        let hs = spread(rng, s, 20.0, 200.0, 1.5);
        for (si, h) in hs.iter().enumerate() {
            d.rect(gx + si as f64 * 16.0, BASE - h, 14.0, *h, SERIES[si]);
        }
        centers.push(gx + (s as f64 * 16.0 - 2.0) / 2.0);
    }
    d.x_labels(&centers, &names(&YEARS, g), 0);
    d.y_value_axis(BASE, 1.0, 200.0, "");
    let entries: Vec<(&str, &str)> = (0..s).map(|i| (SERIES_NAMES[i], SERIES[i])).collect();
    d.legend_row(&entries);
    let lv = vec![
        col(RelationCategory::HGrid, Gravity::Bottom),
        col(RelationCategory::HGrid, Gravity::Bottom),
        leaf(),
    ];
    (summary(lv, vec![Channel::Height, Channel::Fill], false), 2)
}

fn stacked_column(d: &mut Drawing, rng: &mut ChaCha8Rng, x: f64, w: f64, segments: usize) {
    let mut y = BASE;
    for k in 0..segments {
        let h = libm::round(rng.random_range(12.0..60.0));
        y -= h;
        d.rect(x, y, w, h, SERIES[k]);
    }
}

fn stacked_bar(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let n = rng.random_range(4..7);
    let mut centers = Vec::new();
    for i in 0..n {
        let x = OX + 34.0 * i as f64;
        stacked_column(d, rng, x, 24.0, 3);
        centers.push(x + 12.0);
    }
    d.x_labels(&centers, &names(&NAMES, n), 0);
    d.y_value_axis(BASE, 1.0, 180.0, "");
    let entries: Vec<(&str, &str)> = (0..3).map(|i| (SERIES_NAMES[i], SERIES[i])).collect();
    d.legend_row(&entries);
    let lv = vec![
        col(RelationCategory::HGrid, Gravity::Bottom),
        col(RelationCategory::VStack, Gravity::None),
        leaf(),
    ];
    (summary(lv, vec![Channel::Height, Channel::Fill], false), 2)
}

fn diverging(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let rows = rng.random_range(4..7);
    let center = OX + 200.0;
    let mut ys = Vec::new();
    for r in 0..rows {
        let y = OY + r as f64 * 26.0;
        let w = [
            rng.random_range(20.0..90.0),
            rng.random_range(16.0..50.0),
            rng.random_range(20.0..90.0),
        ];
        let w: Vec<f64> = w.iter().map(|v| libm::round(*v)).collect();
        let mid = center - w[1] / 2.0;
        d.rect(mid - w[0], y, w[0], 18.0, SERIES[0]);
        d.rect(mid, y, w[1], 18.0, SERIES[1]);
        d.rect(mid + w[1], y, w[2], 18.0, SERIES[2]);
        ys.push(y + 9.0);
    }
    d.y_labels(&ys, &names(&NAMES, rows));
    d.legend_row(&[
        ("Disagree", SERIES[0]),
        ("Neutral", SERIES[1]),
        ("Agree", SERIES[2]),
    ]);
    let lv = vec![
        col(RelationCategory::VGrid, Gravity::None),
        col(RelationCategory::HStack, Gravity::None),
        leaf(),
    ];
    (summary(lv, vec![Channel::Width, Channel::Fill], false), 2)
}

fn grouped_stacked(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let g = rng.random_range(3..5);
    let mut inner_c = Vec::new();
    let mut inner_l = Vec::new();
    let mut outer_c = Vec::new();
    for gi in 0..g {
        let gx = OX + gi as f64 * (2.0 * 20.0 + 24.0);
        for k in 0..2 {
            let x = gx + k as f64 * 20.0;
            stacked_column(d, rng, x, 16.0, 3);
            inner_c.push(x + 8.0);
            inner_l.push(["Q1", "Q2"][k].to_string());
        }
        outer_c.push(gx + 18.0);
    }
    d.x_labels(&inner_c, &inner_l, 0);
    d.x_labels(&outer_c, &names(&YEARS, g), 1);
    d.y_value_axis(BASE, 1.0, 180.0, "");
    let entries: Vec<(&str, &str)> = (0..3).map(|i| (SERIES_NAMES[i], SERIES[i])).collect();
    d.legend_row(&entries);
    let lv = vec![
        col(RelationCategory::HGrid, Gravity::Bottom),
        col(RelationCategory::HGrid, Gravity::Bottom),
        col(RelationCategory::VStack, Gravity::None),
        leaf(),
    ];
    (summary(lv, vec![Channel::Height, Channel::Fill], false), 3)
}

fn heatmap_cells(
    d: &mut Drawing,
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    cell: f64,
    gap: f64,
) {
    for r in 0..rows {
        for c in 0..cols {
            let t = rng.random_range(0.0..1.0);
            let fill = lerp_hex("#f7fbff", "#08306b", t);
            d.rect(
                OX + c as f64 * (cell + gap),
                OY + r as f64 * (cell + gap),
                cell,
                cell,
                &fill,
            );
        }
    }
}

fn heatmap(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let rows = rng.random_range(4..7);
    let cols = rng.random_range(6..9);
    heatmap_cells(d, rng, rows, cols, 20.0, 2.0);
    let xc: Vec<f64> = (0..cols).map(|c| OX + c as f64 * 22.0 + 10.0).collect();
    let yc: Vec<f64> = (0..rows).map(|r| OY + r as f64 * 22.0 + 10.0).collect();
    let months = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug"];
    d.x_labels(&xc, &names(&months, cols), 0);
    d.y_labels(&yc, &names(&NAMES, rows));
    let bar = BBox::new(OX + 200.0, 4.0, 100.0, 8.0);
    d.gradient = Some((bar, "#f7fbff".to_string(), "#08306b".to_string()));
    d.text(bar.x, 22.0, "0", "middle");
    d.text(bar.right(), 22.0, "100", "middle");
    d.continuous = true;
    (
        summary(
            vec![col(RelationCategory::HGrid, Gravity::None), leaf()],
            vec![Channel::Fill],
            false,
        ),
        1,
    )
}

fn bullet(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let rows = rng.random_range(3..6);
    let measures = spread(rng, rows, 40.0, 190.0, 1.5);
    let markers = spread(rng, rows, 30.0, 190.0, 1.5);
    let mut ys = Vec::new();
    for r in 0..rows {
        let y = OY + r as f64 * 40.0;
        d.rect(OX, y, 200.0, 24.0, "#dddddd");
        d.rect(OX, y + 8.0, measures[r], 8.0, "#333333");
        d.rect(OX + markers[r], y + 4.0, 2.0, 16.0, "#d62728");
        ys.push(y + 12.0);
    }
    d.y_labels(
        &ys,
        &names(
            &["Revenue", "Profit", "Orders", "Customers", "Satisfaction"],
            rows,
        ),
    );
    let bottom = d.plot().bottom();
    let xs: Vec<f64> = (0..5).map(|i| OX + 50.0 * i as f64).collect();
    let labels: Vec<String> = (0..5).map(|i| format!("{}", i * 50)).collect();
    let _ = bottom;
    d.x_labels(&xs, &labels, 0);
    let lv = vec![
        col(RelationCategory::VGrid, Gravity::None),
        level(NodeKind::Glyph, None, Gravity::None),
        leaf(),
    ];
    (
        summary(lv, vec![Channel::X, Channel::Width, Channel::Fill], false),
        1,
    )
}

fn treemap_bar(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    const W: f64 = 90.0;
    let years = rng.random_range(2..4);
    const CONTINENTS: usize = 6;
    let colors = SERIES;
    let mut inner_c = Vec::new();
    let mut inner_l = Vec::new();
    let mut outer_c = Vec::new();
    let heights = spread(rng, 2 * years, 80.0, 210.0, 4.0);
    let mut x = OX;
    for y in 0..years {
        let year_x = x;
        for side in 0..2 {
            let h = heights[2 * y + side];
            let frame = BBox::new(x, BASE - h, W, h);
            // two columns of stacked continents whose cuts never line up
            let (continent_values, boxes) = loop {
                let values: Vec<Vec<f64>> = (0..CONTINENTS)
                    .map(|_| {
                        let k = rng.random_range(3..5);
                        (0..k).map(|_| rng.random_range(5.0..40.0)).collect()
                    })
                    .collect();
                let sums: Vec<f64> = values.iter().map(|v| v.iter().sum()).collect();
                let total: f64 = sums.iter().sum();
                let lw = libm::round((W - 3.0) * sums[..3].iter().sum::<f64>() / total)
                    .clamp(36.0, W - 39.0);
                let columns = [
                    (frame.x, lw, &sums[..3]),
                    (frame.x + lw + 3.0, W - lw - 3.0, &sums[3..]),
                ];
                let mut boxes = Vec::new();
                let mut cuts: Vec<Vec<f64>> = Vec::new();
                for (cx, cw, part) in columns {
                    let free = h - 3.0 * (part.len() - 1) as f64;
                    let psum: f64 = part.iter().sum();
                    let mut cy = frame.y;
                    let mut col_cuts = Vec::new();
                    for (k, v) in part.iter().enumerate() {
                        let bh = if k + 1 == part.len() {
                            frame.bottom() - cy
                        } else {
                            libm::round(free * v / psum)
                        };
                        boxes.push(BBox::new(cx, cy, cw, bh));
                        cy += bh + 3.0;
                        if k + 1 < part.len() {
                            col_cuts.push(cy);
                        }
                    }
                    cuts.push(col_cuts);
                }
                let tall = boxes.iter().all(|b| b.height >= 16.0);
                let staggered = cuts[0]
                    .iter()
                    .all(|a| cuts[1].iter().all(|b| (a - b).abs() > 6.0));
                if tall && staggered {
                    break (values, boxes);
                }
            };
            for (ci, cb) in boxes.iter().enumerate() {
                let leaves = crate::render::layout_pack(*cb, &continent_values[ci], 1.0);
                for lb in leaves {
                    d.marks.push(Mark {
                        b: lb,
                        fill: colors[ci].to_string(),
                    });
                }
            }
            inner_c.push(x + W / 2.0);
            inner_l.push(["Import", "Export"][side].to_string());
            x += W + 10.0;
        }
        outer_c.push(year_x + W + 5.0);
        x += 30.0 - 10.0;
    }
    d.x_labels(&inner_c, &inner_l, 0);
    d.x_labels(&outer_c, &names(&YEARS, years), 1);
    let regions = ["Asia", "Europe", "Africa", "Americas", "Oceania", "Arctic"];
    let entries: Vec<(&str, &str)> = regions
        .iter()
        .zip(colors.iter())
        .map(|(r, c)| (*r, *c))
        .collect();
    d.legend_row(&entries);
    let lv = vec![
        col(RelationCategory::HGrid, Gravity::Bottom),
        col(RelationCategory::HGrid, Gravity::Bottom),
        col(RelationCategory::Packing, Gravity::None),
        col(RelationCategory::Packing, Gravity::None),
        leaf(),
    ];
    (
        summary(
            lv,
            vec![Channel::Height, Channel::Area, Channel::Fill],
            false,
        ),
        4,
    )
}

fn marimekko(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let cols = rng.random_range(3..6);
    let mut x = OX;
    let mut centers = Vec::new();
    let mut prev: Vec<f64> = Vec::new();
    for _ in 0..cols {
        let w = libm::round(rng.random_range(30.0..90.0));
        // segment boundaries stay clear of the previous column's
        let cuts = loop {
            let a = libm::round(rng.random_range(30.0..90.0));
            let b = libm::round(rng.random_range(110.0..170.0));
            if prev
                .iter()
                .all(|p| (p - a).abs() > 4.0 && (p - b).abs() > 4.0)
            {
                break vec![a, b];
            }
        };
        let edges = [0.0, cuts[0], cuts[1], 200.0];
        for k in 0..3 {
            d.rect(x, OY + edges[k], w, edges[k + 1] - edges[k], SERIES[k]);
        }
        prev = cuts;
        centers.push(x + w / 2.0);
        x += w;
    }
    d.x_labels(&centers, &names(&NAMES, cols), 0);
    d.y_value_axis(OY + 200.0, 2.0, 100.0, "%");
    let entries: Vec<(&str, &str)> = (0..3).map(|i| (SERIES_NAMES[i], SERIES[i])).collect();
    d.legend_row(&entries);
    let lv = vec![
        col(RelationCategory::HStack, Gravity::None),
        col(RelationCategory::VStack, Gravity::None),
        leaf(),
    ];
    (
        summary(
            lv,
            vec![Channel::Width, Channel::Height, Channel::Fill],
            false,
        ),
        2,
    )
}

fn range(d: &mut Drawing, rng: &mut ChaCha8Rng, waterfall: bool) -> (TemplateSummary, usize) {
    let n = rng.random_range(5..9);
    let mut centers = Vec::new();
    let mut total = 100.0;
    let mut spans: Vec<(f64, f64, &str)> = Vec::new();
    loop {
        spans.clear();
        for i in 0..n {
            if waterfall {
                let up = i % 3 != 1;
                let delta = libm::round(rng.random_range(10.0..50.0));
                let next = if up {
                    total + delta
                } else {
                    (total - delta).max(10.0)
                };
                spans.push((
                    total.min(next),
                    total.max(next),
                    if next >= total { SERIES[2] } else { SERIES[3] },
                ));
                total = next;
            } else {
                let lo = libm::round(rng.random_range(10.0..60.0));
                let hi = libm::round(rng.random_range(80.0..160.0));
                spans.push((lo, hi, BAR));
            }
        }
        let tops = spans.iter().map(|s| s.1).collect::<Vec<_>>();
        let distinct = |v: &[f64]| v.iter().any(|a| (a - v[0]).abs() > 2.0);
        if distinct(&tops)
            && distinct(&spans.iter().map(|s| s.0).collect::<Vec<_>>())
            && spans.iter().all(|s| s.1 - s.0 >= 4.0)
        {
            break;
        }
        total = 100.0;
    }
    let max = spans.iter().map(|s| s.1).fold(0.0, f64::max);
    let k = 200.0 / max.max(1.0);
    for (i, (lo, hi, fill)) in spans.iter().enumerate() {
        let x = OX + 30.0 * i as f64;
        let top = libm::round(BASE - hi * k);
        let bottom = libm::round(BASE - lo * k);
        d.rect(x, top, 20.0, bottom - top, fill);
        centers.push(x + 10.0);
    }
    d.x_labels(&centers, &names(&NAMES, n), 0);
    let mut channels = vec![Channel::TopSide, Channel::BottomSide];
    if waterfall {
        d.legend_row(&[("Increase", SERIES[2]), ("Decrease", SERIES[3])]);
        channels.push(Channel::Fill);
    }
    (
        summary(
            vec![col(RelationCategory::HGrid, Gravity::None), leaf()],
            channels,
            false,
        ),
        1,
    )
}

fn small_multiples(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    for p in 0..3 {
        let (px, py) = (OX + p as f64 * 150.0, OY + p as f64 * 130.0);
        let n = rng.random_range(3..6);
        let hs = spread(rng, n, 15.0, 100.0, 1.5);
        for (i, h) in hs.iter().enumerate() {
            d.rect(px + i as f64 * 22.0, py + 110.0 - h, 16.0, *h, BAR);
        }
    }
    let lv = vec![
        level(NodeKind::Collection, None, Gravity::None),
        col(RelationCategory::HGrid, Gravity::Bottom),
        leaf(),
    ];
    (
        summary(lv, vec![Channel::X, Channel::Y, Channel::Height], true),
        2,
    )
}

/// One row of small shaded cells with their values written beside them,
/// which reads like a swatch legend.
fn value_strip(d: &mut Drawing, rng: &mut ChaCha8Rng) -> (TemplateSummary, usize) {
    let n = rng.random_range(4..7);
    let values = spread(rng, n, 0.0, 100.0, 1.0);
    for (i, v) in values.iter().enumerate() {
        let x = OX + 40.0 * i as f64;
        d.rect(
            x,
            OY,
            10.0,
            10.0,
            &lerp_hex("#fee8c8", "#b30000", v / 100.0),
        );
        d.text(x + 14.0, OY + 8.5, &format!("{}", *v as i64), "start");
    }
    (
        summary(
            vec![col(RelationCategory::HGrid, Gravity::None), leaf()],
            vec![Channel::Fill],
            false,
        ),
        1,
    )
}

fn mutate(d: &mut Drawing, m: Mutation) -> Vec<CorrectionRecipe> {
    let plot = d.plot();
    let recipe = |kind, target, tier: Option<usize>, texts: Vec<String>| CorrectionRecipe {
        kind,
        target,
        tier,
        texts,
        region: None,
    };
    match m {
        Mutation::M1 => {
            let long = "Stone fruit and berry total".to_string();
            let t = d
                .texts
                .iter_mut()
                .find(|t| t.anchor == "middle" && t.y > plot.bottom())
                .map(|t| {
                    let old = core::mem::replace(&mut t.s, long.clone());
                    old
                });
            if let Some(old) = t {
                for l in d.x_tiers[0].iter_mut().filter(|l| **l == old).take(1) {
                    *l = long.clone();
                }
            }
            vec![recipe(
                CorrectionKind::AddLabel,
                Target::XAxis,
                Some(0),
                vec![long],
            )]
        }
        Mutation::M2 => {
            let y = plot.bottom() + 14.0;
            d.text(plot.right() + 12.0, y, "n=48", "middle");
            vec![recipe(
                CorrectionKind::RemoveLabel,
                Target::XAxis,
                None,
                vec!["n=48".to_string()],
            )]
        }
        Mutation::M3 => {
            let centers: Vec<f64> = d.marks.iter().map(|m| m.b.center_x()).collect();
            let n = centers.len();
            let quarters: Vec<String> = (0..n.div_ceil(3)).map(|q| format!("Q{}", q + 1)).collect();
            let qc: Vec<f64> = (0..quarters.len())
                .map(|q| {
                    let chunk = &centers[3 * q..(3 * q + 3).min(n)];
                    chunk.iter().sum::<f64>() / chunk.len() as f64
                })
                .collect();
            d.x_labels(&qc, &quarters, 1);
            vec![
                recipe(CorrectionKind::AddTier, Target::XAxis, None, Vec::new()),
                recipe(CorrectionKind::AddLabel, Target::XAxis, Some(1), quarters),
            ]
        }
        Mutation::M4 => {
            // move the value labels inside the plot
            let labels = d.y_tiers.first().cloned().unwrap_or_default();
            let mut region: Option<BBox> = None;
            for t in d
                .texts
                .iter_mut()
                .filter(|t| t.anchor == "end" && t.x < plot.x)
            {
                t.x = plot.x + 30.0;
                let b = BBox::new(t.x - 24.0, t.y - 8.0, 24.0, 10.0);
                region = Some(region.map_or(b, |r| r.union(&b)));
            }
            d.lines
                .retain(|l| !(l.a.0 < plot.x && l.b.0 <= plot.x && l.a.1 == l.b.1));
            let _ = labels;
            let mut r = recipe(
                CorrectionKind::DesignateRegion,
                Target::YAxis,
                None,
                Vec::new(),
            );
            r.region = region.map(|b| b.inset(-3.0));
            vec![r]
        }
        Mutation::M5 => vec![recipe(
            CorrectionKind::RemoveDecoration,
            Target::Legend,
            None,
            Vec::new(),
        )],
    }
}

fn num(v: f64) -> String {
    let s = format!("{:.2}", v);
    String::from(s.trim_end_matches('0').trim_end_matches('.'))
}

fn write_svg(d: &Drawing, variant: SvgVariant) -> String {
    let mut all: Vec<&Mark> = d.marks.iter().collect();
    all.extend(d.swatches.iter());
    let content = BBox::enclosing(
        all.iter()
            .map(|m| m.b)
            .chain(
                d.texts
                    .iter()
                    .map(|t| BBox::new(t.x - 80.0, t.y - 10.0, 160.0, 14.0)),
            )
            .collect::<Vec<_>>()
            .iter(),
    )
    .unwrap_or_default();
    let w = libm::ceil(content.right() + 30.0);
    let h = libm::ceil(content.bottom() + 20.0);
    let mut s = String::new();
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">");
    if let Some((_, lo, hi)) = &d.gradient {
        let _ = writeln!(
            s,
            "<defs><linearGradient id=\"ramp\"><stop offset=\"0\" stop-color=\"{lo}\"/><stop offset=\"1\" stop-color=\"{hi}\"/></linearGradient></defs>"
        );
    }
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>"
    );
    // variant C writes local coordinates under two transforms netting (6, 4)
    let (dx, dy) = if variant == SvgVariant::C {
        (6.0, 4.0)
    } else {
        (0.0, 0.0)
    };
    if variant == SvgVariant::C {
        s.push_str("<g transform=\"translate(10,10)\">\n<g transform=\"matrix(1,0,0,1,-4,-6)\">\n");
    }
    let rect = |s: &mut String, m: &Mark, with_fill: bool| {
        let (x, y) = (m.b.x - dx, m.b.y - dy);
        let fill = if with_fill {
            format!(" fill=\"{}\"", m.fill)
        } else {
            String::new()
        };
        if variant == SvgVariant::C {
            let _ = writeln!(
                s,
                "<path d=\"M{} {} H{} V{} H{} Z\"{fill}/>",
                num(x),
                num(y),
                num(x + m.b.width),
                num(y + m.b.height),
                num(x)
            );
        } else {
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"{fill}/>",
                num(x),
                num(y),
                num(m.b.width),
                num(m.b.height)
            );
        }
    };
    if variant == SvgVariant::A {
        let mut fills: Vec<&str> = Vec::new();
        for m in &d.marks {
            if !fills.contains(&m.fill.as_str()) {
                fills.push(&m.fill);
            }
        }
        for (i, f) in fills.iter().enumerate() {
            let _ = writeln!(s, "<g class=\"series-{i}\" fill=\"{f}\">");
            for m in d.marks.iter().filter(|m| m.fill == *f) {
                rect(&mut s, m, false);
            }
            s.push_str("</g>\n");
        }
    } else {
        for m in &d.marks {
            rect(&mut s, m, true);
        }
    }
    if variant == SvgVariant::A {
        s.push_str("<g class=\"axes\" stroke=\"#333333\">\n");
    }
    for l in &d.lines {
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>",
            num(l.a.0 - dx),
            num(l.a.1 - dy),
            num(l.b.0 - dx),
            num(l.b.1 - dy)
        );
    }
    if variant == SvgVariant::A {
        s.push_str("</g>\n<g class=\"legend\">\n");
    }
    for m in &d.swatches {
        rect(&mut s, m, true);
    }
    if let Some((b, _, _)) = &d.gradient {
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"url(#ramp)\"/>",
            num(b.x - dx),
            num(b.y - dy),
            num(b.width),
            num(b.height)
        );
    }
    if variant == SvgVariant::A {
        s.push_str("</g>\n<g class=\"labels\" font-size=\"10\">\n");
    }
    for t in &d.texts {
        let size = if variant == SvgVariant::A {
            String::new()
        } else {
            String::from(" font-size=\"10\"")
        };
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{}\"{size}>{}</text>",
            num(t.x - dx),
            num(t.y - dy),
            t.anchor,
            t.s
        );
    }
    if variant == SvgVariant::A {
        s.push_str("</g>\n");
    }
    if variant == SvgVariant::C {
        s.push_str("</g>\n</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn axis_summary(tiers: &[Vec<String>]) -> Option<AxisSummary> {
    if tiers.is_empty() || tiers[0].is_empty() {
        return None;
    }
    Some(AxisSummary {
        tiers: tiers.to_vec(),
        field_types: tiers.iter().map(|t| infer_field_type(t)).collect(),
    })
}

pub fn generate_synthetic_chart(spec: &ChartSpec) -> GeneratedChart {
    let idx = Archetype::ALL
        .iter()
        .position(|a| *a == spec.archetype)
        .unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_mul(1000).wrapping_add(idx));
    let mut d = Drawing::default();
    let (expected, c_group) = match spec.archetype {
        _ if spec.mutation == Some(Mutation::M5) => value_strip(&mut d, &mut rng),
        // seven bars so no quarter row divides them
        Archetype::Bar if spec.mutation == Some(Mutation::M3) => bar(&mut d, &mut rng, Some(7)),
        Archetype::Bar => bar(&mut d, &mut rng, None),
        Archetype::GroupedBar => grouped_bar(&mut d, &mut rng),
        Archetype::StackedBar => stacked_bar(&mut d, &mut rng),
        Archetype::DivergingStacked => diverging(&mut d, &mut rng),
        Archetype::GroupedStacked => grouped_stacked(&mut d, &mut rng),
        Archetype::Heatmap => heatmap(&mut d, &mut rng),
        Archetype::Bullet => bullet(&mut d, &mut rng),
        Archetype::TreemapBar => treemap_bar(&mut d, &mut rng),
        Archetype::Marimekko => marimekko(&mut d, &mut rng),
        Archetype::Range => range(&mut d, &mut rng, false),
        Archetype::Waterfall => range(&mut d, &mut rng, true),
        Archetype::SmallMultiples => small_multiples(&mut d, &mut rng),
    };
    let corrections = spec.mutation.map(|m| mutate(&mut d, m)).unwrap_or_default();
    let legend_kind = if d.continuous {
        LegendKind::Continuous
    } else if d.legend.is_empty() {
        LegendKind::None
    } else {
        LegendKind::Discrete
    };
    let expected_decoration = DecorationSummary {
        x_axis: axis_summary(&d.x_tiers),
        y_axis: axis_summary(&d.y_tiers),
        legend_kind,
        legend_entries: d.legend.clone(),
    };
    GeneratedChart {
        spec: spec.clone(),
        svg: write_svg(&d, spec.variant),
        expected,
        expected_decoration,
        c_group,
        rect_count: d.marks.len(),
        corrections,
    }
}

/// `rows × cols` heatmap without decorations, for load tests.
pub fn heatmap_stress(rows: usize, cols: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = Drawing::default();
    heatmap_cells(&mut d, &mut rng, rows, cols, 6.0, 1.0);
    write_svg(&d, SvgVariant::B)
}

/// Grouped bars totalling `groups × per_group` rectangles.
pub fn grouped_bar_stress(groups: usize, per_group: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = Drawing::default();
    for g in 0..groups {
        let gx = OX + g as f64 * (per_group as f64 * 5.0 + 12.0);
        for i in 0..per_group {
            let h = libm::round(rng.random_range(10.0..200.0));
            d.rect(
                gx + i as f64 * 5.0,
                BASE - h,
                4.0,
                h,
                SERIES[i % SERIES.len()],
            );
        }
    }
    write_svg(&d, SvgVariant::B)
}

/// Runs the full pipeline on `chart` and compares against its ground
/// truth. With `corrected`, the chart's correction recipes are applied
/// after detection.
pub fn check_round_trip(
    chart: &GeneratedChart,
    corrected: bool,
    cfg: &crate::Config,
) -> Result<(), String> {
    use crate::pipeline::{apply_corrections, deconstruct_scene, detect_svg};
    let (scene, model) = detect_svg(&chart.svg, cfg).map_err(|e| e.to_string())?;
    let model = if corrected {
        let list: Option<Vec<Correction>> = chart
            .corrections
            .iter()
            .map(|r| r.resolve(&scene))
            .collect();
        let list = list.ok_or_else(|| String::from("correction refers to a missing text"))?;
        apply_corrections(&scene, model, &list, cfg).map_err(|e| e.to_string())?
    } else {
        model
    };
    let deco = model.summary();
    if deco != chart.expected_decoration {
        return Err(format!(
            "decoration: got {deco:?}, want {:?}",
            chart.expected_decoration
        ));
    }
    let t = deconstruct_scene(&scene, model, cfg).map_err(|e| e.to_string())?;
    let got = t.summary();
    if got != chart.expected {
        return Err(format!("template: got {got:?}, want {:?}", chart.expected));
    }
    if t.c_group() != chart.c_group {
        return Err(format!(
            "cGroup: got {}, want {}",
            t.c_group(),
            chart.c_group
        ));
    }
    Ok(())
}
