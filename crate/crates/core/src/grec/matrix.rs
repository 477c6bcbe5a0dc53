//! Sparse pairwise relationship matrix and common-relationship extraction.

use alloc::vec::Vec;

use super::relation::{
    classify, cross_tol, facing_gap, strictly_overlap, RelationCategory, RelationSet,
};
use crate::config::Config;
use crate::geom::BBox;

/// Sorted-interval index answering "does this box meet any item other than
/// these two" with early exit.
struct SpatialIndex<'a> {
    items: &'a [BBox],
    by_x: Vec<u32>,
    xs: Vec<f64>,
    by_y: Vec<u32>,
    ys: Vec<f64>,
    max_w: f64,
    max_h: f64,
}

impl<'a> SpatialIndex<'a> {
    fn new(items: &'a [BBox]) -> Self {
        let mut by_x: Vec<u32> = (0..items.len() as u32).collect();
        by_x.sort_by(|&a, &b| {
            let (a, b) = (&items[a as usize], &items[b as usize]);
            a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
        });
        let mut by_y: Vec<u32> = (0..items.len() as u32).collect();
        by_y.sort_by(|&a, &b| {
            let (a, b) = (&items[a as usize], &items[b as usize]);
            a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x))
        });
        let xs = by_x.iter().map(|&i| items[i as usize].x).collect();
        let ys = by_y.iter().map(|&i| items[i as usize].y).collect();
        let max_w = items.iter().map(|b| b.width).fold(0.0, f64::max);
        let max_h = items.iter().map(|b| b.height).fold(0.0, f64::max);
        Self {
            items,
            by_x,
            xs,
            by_y,
            ys,
            max_w,
            max_h,
        }
    }

    fn blocked(&self, u: &BBox, a: usize, b: usize, cfg: &Config) -> bool {
        let lo_x = self.xs.partition_point(|&x| x < u.x - self.max_w);
        let hi_x = self.xs.partition_point(|&x| x < u.right());
        let lo_y = self.ys.partition_point(|&y| y < u.y - self.max_h);
        let hi_y = self.ys.partition_point(|&y| y < u.bottom());
        let range = if hi_x.saturating_sub(lo_x) <= hi_y.saturating_sub(lo_y) {
            &self.by_x[lo_x..hi_x.max(lo_x)]
        } else {
            &self.by_y[lo_y..hi_y.max(lo_y)]
        };
        range.iter().any(|&k| {
            let k = k as usize;
            k != a && k != b && strictly_overlap(u, &self.items[k], cfg)
        })
    }
}

/// Upper-triangular sparse matrix of relation sets. Null cells are not
/// stored.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    pub n: usize,
    /// Stored cells `(i, j, set)` with `i < j`.
    pub cells: Vec<(usize, usize, RelationSet)>,
    /// Per item, indices into `cells`.
    adjacency: Vec<Vec<u32>>,
    pub packing_gap: Option<f64>,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> RelationSet {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.adjacency
            .get(i)
            .and_then(|adj| {
                adj.iter()
                    .map(|&c| &self.cells[c as usize])
                    .find(|c| c.0 == i && c.1 == j)
            })
            .map_or(RelationSet::default(), |c| c.2)
    }

    /// Stored neighbours of `i` with the cell contents.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, &RelationSet)> + '_ {
        self.adjacency[i].iter().map(move |&c| {
            let (a, b, ref s) = self.cells[c as usize];
            (if a == i { b } else { a }, s)
        })
    }

    /// Matrix labels, `n × n`, upper triangle only (lower cells empty).
    pub fn labels(&self) -> Vec<Vec<alloc::string::String>> {
        let mut out = alloc::vec![alloc::vec![alloc::string::String::new(); self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate().skip(i + 1) {
                *cell = self.get(i, j).label();
            }
        }
        out
    }
}

/// Enumerates pairs whose x or y intervals overlap (within the cross
/// tolerance). Diagonal pairs can hold no relationship.
fn candidate_pairs(items: &[BBox], cfg: &Config) -> Vec<(u32, u32)> {
    let e = cross_tol(cfg);
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[a].x.total_cmp(&items[b].x));
    for (p, &i) in order.iter().enumerate() {
        for &j in &order[p + 1..] {
            if items[j].x > items[i].right() + e {
                break;
            }
            out.push((i.min(j) as u32, i.max(j) as u32));
        }
    }
    order.sort_by(|&a, &b| items[a].y.total_cmp(&items[b].y));
    for (p, &i) in order.iter().enumerate() {
        for &j in &order[p + 1..] {
            if items[j].y > items[i].bottom() + e {
                break;
            }
            if items[i].x_overlap(&items[j]) >= -e {
                continue;
            }
            out.push((i.min(j) as u32, i.max(j) as u32));
        }
    }
    out
}

/// Builds the matrix over item boxes. The packing gap is the smallest
/// facing gap among the items.
pub fn build_distance_matrix(items: &[BBox], cfg: &Config) -> DistanceMatrix {
    let pairs = candidate_pairs(items, cfg);
    let packing_gap = pairs
        .iter()
        .filter_map(|&(i, j)| facing_gap(&items[i as usize], &items[j as usize], cfg))
        .fold(None, |acc: Option<f64>, g| {
            Some(acc.map_or(g, |a| a.min(g)))
        })
        .filter(|g| *g <= cfg.packing_gap_cap);
    let index = SpatialIndex::new(items);
    let mut cells = Vec::new();
    let mut adjacency = alloc::vec![Vec::new(); items.len()];
    for (i, j) in pairs {
        let (i, j) = (i as usize, j as usize);
        let (a, b) = (&items[i], &items[j]);
        let set = classify(
            a,
            b,
            || index.blocked(&a.union(b), i, j, cfg),
            packing_gap,
            cfg,
        );
        if set.is_stored() {
            let c = cells.len() as u32;
            adjacency[i].push(c);
            adjacency[j].push(c);
            cells.push((i, j, set));
        }
    }
    DistanceMatrix {
        n: items.len(),
        cells,
        adjacency,
        packing_gap,
    }
}

/// Count of distinct gap values (within `eps_gap`) for a category; fewer
/// means more consistent.
fn gap_spread(m: &DistanceMatrix, cat: RelationCategory, cfg: &Config) -> usize {
    let mut gaps: Vec<f64> = m.cells.iter().filter_map(|c| c.2.gap(cat)).collect();
    gaps.sort_by(f64::total_cmp);
    let mut distinct = 0;
    let mut last: Option<f64> = None;
    for g in gaps {
        if last.is_none_or(|l| g - l > cfg.eps_gap) {
            distinct += 1;
            last = Some(g);
        }
    }
    distinct
}

/// Every category for which each item has at least one partner, in
/// priority order: stacks, grids, packing. Within stacks and within grids
/// the orientation with fewer distinct gaps comes first, then horizontal.
pub fn common_relationships(m: &DistanceMatrix, cfg: &Config) -> Vec<RelationCategory> {
    if m.n < 2 {
        return Vec::new();
    }
    let mut common: Vec<RelationCategory> = RelationCategory::ARRANGEMENTS
        .iter()
        .copied()
        .filter(|&cat| (0..m.n).all(|i| m.neighbors(i).any(|(_, s)| s.contains(cat))))
        .collect();
    common.sort_by_key(|&c| {
        (
            c.priority(),
            gap_spread(m, c, cfg),
            matches!(c, RelationCategory::VStack | RelationCategory::VGrid),
        )
    });
    common
}

/// The single highest-priority common category, if any.
pub fn extract_common_relationship(m: &DistanceMatrix, cfg: &Config) -> Option<RelationCategory> {
    common_relationships(m, cfg).into_iter().next()
}

/// Resolves the common category from explicit per-item category sets; used
/// to state the priority law independently of geometry.
pub fn common_from_sets(sets: &[Vec<RelationSet>]) -> Option<RelationCategory> {
    let n = sets.len();
    RelationCategory::ARRANGEMENTS
        .iter()
        .copied()
        .filter(|&cat| n >= 2 && sets.iter().all(|row| row.iter().any(|s| s.contains(cat))))
        .min_by_key(|c| {
            (
                c.priority(),
                matches!(c, RelationCategory::VStack | RelationCategory::VGrid),
            )
        })
}
