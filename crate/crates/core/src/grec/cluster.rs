//! Greedy grouping of one level's items under a common relationship.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::matrix::{common_relationships, DistanceMatrix};
use super::refine::bands;
use super::relation::{cross_tol, strictly_overlap, RelationCategory, RelationSet};
use crate::config::Config;
use crate::geom::BBox;

/// Outcome of clustering one level.
#[derive(Clone, Debug, PartialEq)]
pub enum Partition {
    /// Collections formed under a stack orientation, the grid class
    /// (reported as `HGrid`), or packing.
    Collections {
        category: RelationCategory,
        groups: Vec<Vec<usize>>,
    },
    /// Overlap components.
    Glyphs(Vec<Vec<usize>>),
    /// Nothing applies; positions are data-driven.
    Unresolved { overlapping: bool },
}

fn qualifies(s: &RelationSet, cat: RelationCategory) -> Option<f64> {
    if cat.is_grid() {
        match (
            s.gap(RelationCategory::HGrid),
            s.gap(RelationCategory::VGrid),
        ) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    } else {
        s.gap(cat)
    }
}

/// Heap entry ordered by (gap, y, x, index), smallest first.
#[derive(PartialEq)]
struct Entry(f64, f64, f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
            .then(o.1.total_cmp(&self.1))
            .then(o.2.total_cmp(&self.2))
            .then(o.3.cmp(&self.3))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Interval bands along one axis with stable ids.
#[derive(Clone, Default)]
struct Bands {
    spans: Vec<(f64, f64, usize)>,
    next_id: usize,
}

impl Bands {
    /// Places `[lo, hi]`, returning the updated bands and the band id, or
    /// `None` when it would bridge two bands or touch a neighbour.
    fn place(&self, lo: f64, hi: f64, tol: f64, eps_gap: f64) -> Option<(Bands, usize)> {
        let hits: Vec<usize> = (0..self.spans.len())
            .filter(|&k| hi.min(self.spans[k].1) - lo.max(self.spans[k].0) >= -tol)
            .collect();
        let mut out = self.clone();
        let id = match hits.as_slice() {
            [] => {
                let id = out.next_id;
                out.next_id += 1;
                out.spans.push((lo, hi, id));
                out.spans.sort_by(|a, b| a.0.total_cmp(&b.0));
                id
            }
            [k] => {
                let s = &mut out.spans[*k];
                s.0 = s.0.min(lo);
                s.1 = s.1.max(hi);
                s.2
            }
            _ => return None,
        };
        let gaps: Vec<f64> = out.spans.windows(2).map(|w| w[1].0 - w[0].1).collect();
        if gaps.iter().any(|g| *g <= tol) {
            return None;
        }
        let (lo_g, hi_g) = gaps
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| {
                (a.min(*g), b.max(*g))
            });
        if !gaps.is_empty() && hi_g - lo_g > eps_gap {
            return None;
        }
        Some((out, id))
    }
}

enum Growth {
    Stack {
        horizontal: bool,
        cross: (f64, f64),
        span: (f64, f64),
    },
    Grid {
        rows: Bands,
        cols: Bands,
        cells: BTreeSet<(usize, usize)>,
        size: (f64, f64),
        uniform: bool,
    },
    Packing,
}

impl Growth {
    fn start(cat: RelationCategory, first: &BBox) -> Self {
        match cat {
            RelationCategory::HStack => Growth::Stack {
                horizontal: true,
                cross: (first.y, first.bottom()),
                span: (first.x, first.right()),
            },
            RelationCategory::VStack => Growth::Stack {
                horizontal: false,
                cross: (first.x, first.right()),
                span: (first.y, first.bottom()),
            },
            RelationCategory::Packing => Growth::Packing,
            _ => {
                let mut rows = Bands::default();
                let mut cols = Bands::default();
                rows.spans.push((first.y, first.bottom(), 0));
                rows.next_id = 1;
                cols.spans.push((first.x, first.right(), 0));
                cols.next_id = 1;
                Growth::Grid {
                    rows,
                    cols,
                    cells: BTreeSet::from([(0, 0)]),
                    size: (first.width, first.height),
                    uniform: true,
                }
            }
        }
    }

    /// Adds `b` if the arrangement stays valid.
    fn try_add(
        &mut self,
        idx: usize,
        b: &BBox,
        m: &DistanceMatrix,
        members: &[bool],
        cfg: &Config,
    ) -> bool {
        match self {
            Growth::Stack {
                horizontal,
                cross,
                span,
            } => {
                let (c, s) = if *horizontal {
                    ((b.y, b.bottom()), (b.x, b.right()))
                } else {
                    ((b.x, b.right()), (b.y, b.bottom()))
                };
                if (c.0 - cross.0).abs() > cfg.eps_align || (c.1 - cross.1).abs() > cfg.eps_align {
                    return false;
                }
                if (s.0 - span.1).abs() < cfg.eps_stack {
                    span.1 = s.1;
                } else if (span.0 - s.1).abs() < cfg.eps_stack {
                    span.0 = s.0;
                } else {
                    return false;
                }
                true
            }
            Growth::Packing => m.neighbors(idx).all(|(j, s)| {
                !members[j] || s.facing_gap.is_none() || s.contains(RelationCategory::Packing)
            }),
            Growth::Grid {
                rows,
                cols,
                cells,
                size,
                uniform,
            } => {
                let tol = cross_tol(cfg);
                let Some((new_rows, r)) = rows.place(b.y, b.bottom(), tol, cfg.eps_gap) else {
                    return false;
                };
                let Some((new_cols, c)) = cols.place(b.x, b.right(), tol, cfg.eps_gap) else {
                    return false;
                };
                if cells.contains(&(r, c)) {
                    return false;
                }
                let same = (b.width - size.0).abs() <= cfg.eps_align
                    && (b.height - size.1).abs() <= cfg.eps_align;
                let still_uniform = *uniform && same;
                if new_rows.spans.len() > 1 && new_cols.spans.len() > 1 && !still_uniform {
                    return false;
                }
                *rows = new_rows;
                *cols = new_cols;
                cells.insert((r, c));
                *uniform = still_uniform;
                true
            }
        }
    }
}

/// Greedy clustering under one category: seed with the smallest-gap pair
/// (ties by the first item's top-left), grow while valid, repeat. Items
/// left without a partner come back as singletons.
pub fn greedy_partition(
    items: &[BBox],
    m: &DistanceMatrix,
    cat: RelationCategory,
    cfg: &Config,
) -> Vec<Vec<usize>> {
    greedy_partition_from(items, m, cat, 0, cfg).0
}

/// As [`greedy_partition`], but the seed pairs are taken starting at
/// rank `first` and wrap around. Also returns the number of seed pairs.
pub fn greedy_partition_from(
    items: &[BBox],
    m: &DistanceMatrix,
    cat: RelationCategory,
    first: usize,
    cfg: &Config,
) -> (Vec<Vec<usize>>, usize) {
    let n = items.len();
    let key = |i: usize| (items[i].y, items[i].x);
    let mut seeds: Vec<(f64, usize, usize)> = m
        .cells
        .iter()
        .filter_map(|&(i, j, ref s)| {
            let (a, b) = if key(i) <= key(j) { (i, j) } else { (j, i) };
            // grids seed along their own orientation and may grow across it
            s.gap(cat).map(|g| (g, a, b))
        })
        .collect();
    seeds.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(key(x.1).0.total_cmp(&key(y.1).0))
            .then(key(x.1).1.total_cmp(&key(y.1).1))
            .then(key(x.2).0.total_cmp(&key(y.2).0))
            .then(key(x.2).1.total_cmp(&key(y.2).1))
    });
    let first = first.min(seeds.len());
    seeds.rotate_left(first);
    let mut assigned = alloc::vec![false; n];
    let mut members = alloc::vec![false; n];
    let mut groups = Vec::new();
    for &(_, a, b) in &seeds {
        if assigned[a] || assigned[b] {
            continue;
        }
        let mut growth = Growth::start(cat, &items[a]);
        members[a] = true;
        if !growth.try_add(b, &items[b], m, &members, cfg) {
            members[a] = false;
            continue;
        }
        members[b] = true;
        let mut group = alloc::vec![a, b];
        let mut heap = BinaryHeap::new();
        let push = |heap: &mut BinaryHeap<Entry>, i: usize, members: &[bool], assigned: &[bool]| {
            for (j, s) in m.neighbors(i) {
                if !members[j] && !assigned[j] {
                    if let Some(g) = qualifies(s, cat) {
                        heap.push(Entry(g, items[j].y, items[j].x, j));
                    }
                }
            }
        };
        push(&mut heap, a, &members, &assigned);
        push(&mut heap, b, &members, &assigned);
        while let Some(Entry(_, _, _, j)) = heap.pop() {
            if members[j] || assigned[j] {
                continue;
            }
            if growth.try_add(j, &items[j], m, &members, cfg) {
                members[j] = true;
                group.push(j);
                push(&mut heap, j, &members, &assigned);
            }
        }
        for &i in &group {
            assigned[i] = true;
            members[i] = false;
        }
        group.sort_unstable();
        groups.push(group);
    }
    for i in 0..n {
        if !assigned[i] {
            groups.push(alloc::vec![i]);
        }
    }
    (groups, seeds.len())
}

pub(crate) fn group_box(items: &[BBox], g: &[usize]) -> BBox {
    BBox::enclosing(g.iter().map(|&i| &items[i])).unwrap_or_default()
}

/// No singletons and no two group boxes overlapping.
pub fn partition_is_valid(items: &[BBox], groups: &[Vec<usize>], cfg: &Config) -> bool {
    if groups.iter().any(|g| g.len() < 2) {
        return false;
    }
    !boxes_overlap(
        &groups
            .iter()
            .map(|g| group_box(items, g))
            .collect::<Vec<_>>(),
        cfg,
    )
}

pub(crate) fn boxes_overlap(boxes: &[BBox], cfg: &Config) -> bool {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| boxes[a].x.total_cmp(&boxes[b].x));
    for (p, &i) in order.iter().enumerate() {
        for &j in &order[p + 1..] {
            if boxes[j].x >= boxes[i].right() {
                break;
            }
            if strictly_overlap(&boxes[i], &boxes[j], cfg) {
                return true;
            }
        }
    }
    false
}

/// Connected components of the overlap graph.
pub fn overlap_components(m: &DistanceMatrix) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..m.n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(i, j, ref s) in &m.cells {
        if s.overlapping {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = alloc::vec![usize::MAX; m.n];
    for i in 0..m.n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

fn refines(fine: &[Vec<usize>], coarse: &[Vec<usize>], n: usize) -> bool {
    let mut owner = alloc::vec![usize::MAX; n];
    for (k, g) in coarse.iter().enumerate() {
        for &i in g {
            owner[i] = k;
        }
    }
    coarse.len() < fine.len()
        && fine
            .iter()
            .all(|g| g.iter().all(|&i| owner[i] == owner[g[0]]))
}

const SEED_RETRIES: usize = 8;

/// A horizontal grid may not contain a group that is a single column of
/// several rows, nor a vertical grid a single row of several columns.
fn fits_orientation(items: &[BBox], groups: &[Vec<usize>], cat: RelationCategory, cfg: &Config) -> bool {
    let tol = cross_tol(cfg);
    groups.iter().all(|g| {
        let rows = bands(g.iter().map(|&i| (items[i].y, items[i].bottom())), tol).len();
        let cols = bands(g.iter().map(|&i| (items[i].x, items[i].right())), tol).len();
        match cat {
            RelationCategory::HGrid => !(cols == 1 && rows > 1),
            RelationCategory::VGrid => !(rows == 1 && cols > 1),
            _ => true,
        }
    })
}

/// Clusters one level: common categories in priority order, first valid
/// partition wins. A grid partition that merely splits uniformly gapped
/// packing clusters yields to packing. Overlap components become glyphs
/// when `allow_glyphs` is set.
pub fn cluster_level(
    items: &[BBox],
    m: &DistanceMatrix,
    allow_glyphs: bool,
    cfg: &Config,
) -> Partition {
    let common = common_relationships(m, cfg);
    for &cat in &common {
        // the greedy pass is order dependent: when the smallest-gap seed
        // leads nowhere, restart from the next few seeds
        let valid = |g: &[Vec<usize>]| {
            partition_is_valid(items, g, cfg) && fits_orientation(items, g, cat, cfg)
        };
        let (mut groups, seeds) = greedy_partition_from(items, m, cat, 0, cfg);
        let mut first = 1;
        while !valid(&groups) && first < seeds.min(SEED_RETRIES) {
            groups = greedy_partition_from(items, m, cat, first, cfg).0;
            first += 1;
        }
        if !valid(&groups) {
            continue;
        }
        if cat.is_grid() && common.contains(&RelationCategory::Packing) {
            let packed = greedy_partition(items, m, RelationCategory::Packing, cfg);
            if partition_is_valid(items, &packed, cfg) && refines(&groups, &packed, items.len()) {
                return Partition::Collections {
                    category: RelationCategory::Packing,
                    groups: packed,
                };
            }
        }
        let category = if cat.is_grid() {
            RelationCategory::HGrid
        } else {
            cat
        };
        return Partition::Collections { category, groups };
    }
    let overlapping = m.cells.iter().any(|c| c.2.overlapping);
    if allow_glyphs && overlapping {
        let comps = overlap_components(m);
        if partition_is_valid(items, &comps, cfg) {
            return Partition::Glyphs(comps);
        }
    }
    Partition::Unresolved { overlapping }
}
