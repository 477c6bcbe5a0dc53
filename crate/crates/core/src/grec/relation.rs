//! Pairwise spatial relationship classification.

use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::geom::BBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationCategory {
    HStack,
    VStack,
    HGrid,
    VGrid,
    Packing,
    Overlapping,
    Null,
}

impl RelationCategory {
    /// The five arrangement categories a cell can hold, in storage order.
    pub const ARRANGEMENTS: [RelationCategory; 5] = [
        RelationCategory::HStack,
        RelationCategory::VStack,
        RelationCategory::HGrid,
        RelationCategory::VGrid,
        RelationCategory::Packing,
    ];

    fn slot(self) -> Option<usize> {
        Self::ARRANGEMENTS.iter().position(|c| *c == self)
    }

    pub fn is_stack(self) -> bool {
        matches!(self, RelationCategory::HStack | RelationCategory::VStack)
    }

    pub fn is_grid(self) -> bool {
        matches!(self, RelationCategory::HGrid | RelationCategory::VGrid)
    }

    /// Stack, then grid, then packing.
    pub fn priority(self) -> u8 {
        match self {
            RelationCategory::HStack | RelationCategory::VStack => 0,
            RelationCategory::HGrid | RelationCategory::VGrid => 1,
            RelationCategory::Packing => 2,
            _ => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RelationCategory::HStack => "HS",
            RelationCategory::VStack => "VS",
            RelationCategory::HGrid => "HG",
            RelationCategory::VGrid => "VG",
            RelationCategory::Packing => "P",
            RelationCategory::Overlapping => "-1",
            RelationCategory::Null => "X",
        }
    }
}

impl fmt::Display for RelationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Result of the distance function for one pair: overlap, or the set of
/// applicable arrangements with their gaps. Empty means null.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RelationSet {
    pub overlapping: bool,
    gaps: [Option<f64>; 5],
    /// Edge gap when the pair faces each other within the packing cap,
    /// whether or not the gap matches the level's packing gap.
    pub facing_gap: Option<f64>,
}

impl RelationSet {
    pub const OVERLAPPING: RelationSet = RelationSet {
        overlapping: true,
        gaps: [None; 5],
        facing_gap: None,
    };

    pub fn insert(&mut self, cat: RelationCategory, gap: f64) {
        if let Some(s) = cat.slot() {
            self.gaps[s] = Some(gap);
        }
    }

    pub fn contains(&self, cat: RelationCategory) -> bool {
        match cat {
            RelationCategory::Overlapping => self.overlapping,
            RelationCategory::Null => self.is_null(),
            c => c.slot().is_some_and(|s| self.gaps[s].is_some()),
        }
    }

    pub fn gap(&self, cat: RelationCategory) -> Option<f64> {
        cat.slot().and_then(|s| self.gaps[s])
    }

    pub fn is_null(&self) -> bool {
        !self.overlapping && self.gaps.iter().all(Option::is_none)
    }

    /// Worth keeping in a sparse matrix.
    pub fn is_stored(&self) -> bool {
        !self.is_null() || self.facing_gap.is_some()
    }

    pub fn categories(&self) -> Vec<RelationCategory> {
        if self.overlapping {
            return alloc::vec![RelationCategory::Overlapping];
        }
        let cats: Vec<RelationCategory> = RelationCategory::ARRANGEMENTS
            .iter()
            .copied()
            .filter(|c| self.contains(*c))
            .collect();
        if cats.is_empty() {
            alloc::vec![RelationCategory::Null]
        } else {
            cats
        }
    }

    /// Cell label as drawn in a distance matrix, e.g. `HS,HG` or `-1`.
    pub fn label(&self) -> alloc::string::String {
        let labels: Vec<&str> = self.categories().iter().map(|c| c.label()).collect();
        labels.join(",")
    }
}

/// Interior overlap below this is treated as touching.
pub(crate) fn touch_tol(cfg: &Config) -> f64 {
    0.5 * cfg.eps_stack
}

/// Cross-axis intervals closer than this (negative overlap) still count as
/// overlapping for grid purposes.
pub(crate) fn cross_tol(cfg: &Config) -> f64 {
    0.5 * cfg.eps_align
}

pub(crate) fn strictly_overlap(a: &BBox, b: &BBox, cfg: &Config) -> bool {
    let t = touch_tol(cfg);
    a.x_overlap(b) > t && a.y_overlap(b) > t
}

/// Edge gap between two boxes that face each other, if they do.
pub(crate) fn facing_gap(a: &BBox, b: &BBox, cfg: &Config) -> Option<f64> {
    let t = touch_tol(cfg);
    let (ox, oy) = (a.x_overlap(b), a.y_overlap(b));
    if ox > t && oy > t {
        None
    } else if oy > t {
        Some((-ox).max(0.0))
    } else if ox > t {
        Some((-oy).max(0.0))
    } else {
        None
    }
}

/// Classifies a pair. `blocked` tells whether the union of the two boxes
/// meets any other item; `packing_gap` is the level's candidate gap.
pub(crate) fn classify(
    a: &BBox,
    b: &BBox,
    blocked: impl Fn() -> bool,
    packing_gap: Option<f64>,
    cfg: &Config,
) -> RelationSet {
    let t = touch_tol(cfg);
    let ct = cross_tol(cfg);
    let (ox, oy) = (a.x_overlap(b), a.y_overlap(b));
    if ox > t && oy > t {
        return RelationSet::OVERLAPPING;
    }
    let mut set = RelationSet::default();
    let horizontal = ox <= t && oy >= -ct;
    let vertical = oy <= t && ox >= -ct;
    if (horizontal || vertical) && !blocked() {
        if horizontal {
            let gap = (-ox).max(0.0);
            set.insert(RelationCategory::HGrid, gap);
            let matched = (a.y - b.y).abs() <= cfg.eps_align
                && (a.bottom() - b.bottom()).abs() <= cfg.eps_align;
            if ox.abs() < cfg.eps_stack && matched {
                set.insert(RelationCategory::HStack, gap);
            }
        }
        if vertical {
            let gap = (-oy).max(0.0);
            set.insert(RelationCategory::VGrid, gap);
            let matched = (a.x - b.x).abs() <= cfg.eps_align
                && (a.right() - b.right()).abs() <= cfg.eps_align;
            if oy.abs() < cfg.eps_stack && matched {
                set.insert(RelationCategory::VStack, gap);
            }
        }
    }
    if let Some(g) = facing_gap(a, b, cfg).filter(|g| *g <= cfg.packing_gap_cap) {
        set.facing_gap = Some(g);
        if packing_gap.is_some_and(|p| (g - p).abs() <= cfg.eps_gap) {
            set.insert(RelationCategory::Packing, g);
        }
    }
    set
}

/// Smallest edge gap among facing pairs, the level's packing gap
/// candidate. Quadratic; the matrix builder uses a sweep instead.
pub fn candidate_packing_gap(items: &[BBox], cfg: &Config) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if let Some(g) = facing_gap(&items[i], &items[j], cfg) {
                best = Some(best.map_or(g, |b| b.min(g)));
            }
        }
    }
    best.filter(|g| *g <= cfg.packing_gap_cap)
}

/// The distance function for items `i` and `j` among `items`.
pub fn pair_distance(
    items: &[BBox],
    i: usize,
    j: usize,
    packing_gap: Option<f64>,
    cfg: &Config,
) -> RelationSet {
    let (a, b) = (&items[i], &items[j]);
    let blocked = || {
        let u = a.union(b);
        items
            .iter()
            .enumerate()
            .any(|(k, c)| k != i && k != j && strictly_overlap(&u, c, cfg))
    };
    classify(a, b, blocked, packing_gap, cfg)
}

/// Anchoring of children inside their grid cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gravity {
    Top,
    Bottom,
    Left,
    Right,
    CenterH,
    CenterV,
    None,
}

/// How children are ordered along the flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowOrder {
    LeftToRight,
    TopToBottom,
    RowMajor,
    /// Largest first, as a squarified packing lays them out.
    BySize,
    None,
}

/// Parameters of a collection's arrangement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelationshipDescriptor {
    pub category: RelationCategory,
    /// Stack and packing gap.
    pub gap: f64,
    pub gap_x: f64,
    pub gap_y: f64,
    pub rows: usize,
    pub cols: usize,
    pub gravity: Gravity,
    pub order: FlowOrder,
}
