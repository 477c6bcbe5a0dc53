//! Exhaustive partition search for small single-level scenes. Used as an
//! independent check on greedy clustering: every set partition is tried,
//! each block is tested against a direct geometric definition of its
//! arrangement, and the best (category priority, block count) is compared
//! with what `cluster_level` returns.

use grec_core::geom::BBox;
use grec_core::grec::{build_distance_matrix, cluster_level, Partition, RelationCategory};
use grec_core::Config;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOUCH: f64 = 0.5;

pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..cur.len() {
            cur[k].push(i);
            go(i + 1, n, cur, out);
            cur[k].pop();
        }
        cur.push(vec![i]);
        go(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

fn overlap_len(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    a1.min(b1) - a0.max(b0)
}

fn interiors_meet(a: &BBox, b: &BBox) -> bool {
    overlap_len(a.x, a.x + a.width, b.x, b.x + b.width) > TOUCH
        && overlap_len(a.y, a.y + a.height, b.y, b.y + b.height) > TOUCH
}

fn hull(items: &[BBox], block: &[usize]) -> BBox {
    let x0 = block
        .iter()
        .map(|&i| items[i].x)
        .fold(f64::INFINITY, f64::min);
    let y0 = block
        .iter()
        .map(|&i| items[i].y)
        .fold(f64::INFINITY, f64::min);
    let x1 = block
        .iter()
        .map(|&i| items[i].x + items[i].width)
        .fold(f64::NEG_INFINITY, f64::max);
    let y1 = block
        .iter()
        .map(|&i| items[i].y + items[i].height)
        .fold(f64::NEG_INFINITY, f64::max);
    BBox::new(x0, y0, x1 - x0, y1 - y0)
}

/// Contiguous run of equal cross-extent boxes along one axis.
fn stack_valid(items: &[BBox], block: &[usize], horizontal: bool, cfg: &Config) -> bool {
    let span = |b: &BBox| {
        if horizontal {
            (b.x, b.x + b.width)
        } else {
            (b.y, b.y + b.height)
        }
    };
    let cross = |b: &BBox| {
        if horizontal {
            (b.y, b.y + b.height)
        } else {
            (b.x, b.x + b.width)
        }
    };
    let mut v: Vec<&BBox> = block.iter().map(|&i| &items[i]).collect();
    v.sort_by(|a, b| span(a).0.total_cmp(&span(b).0));
    let c0 = cross(v[0]);
    v.iter().all(|b| {
        let c = cross(b);
        (c.0 - c0.0).abs() <= cfg.eps_align && (c.1 - c0.1).abs() <= cfg.eps_align
    }) && v
        .windows(2)
        .all(|w| (span(w[1]).0 - span(w[0]).1).abs() < cfg.eps_stack)
}

/// Merges intervals that overlap (within tolerance) into bands.
fn bands(mut iv: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if overlap_len(last.0, last.1, lo, hi) >= -tol => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn even_bands(b: &[(f64, f64)], tol: f64, eps_gap: f64) -> bool {
    let gaps: Vec<f64> = b.windows(2).map(|w| w[1].0 - w[0].1).collect();
    let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    gaps.iter().all(|g| *g > tol) && (gaps.is_empty() || hi - lo <= eps_gap)
}

/// Rows and columns with separated, evenly gapped bands, at most one box
/// per cell, uniform boxes when both axes have several bands, and every
/// member sharing a row or column with another. A single row is a
/// horizontal grid, a single column a vertical one.
fn grid_valid(items: &[BBox], block: &[usize], horizontal: bool, cfg: &Config) -> bool {
    let tol = 0.5 * cfg.eps_align;
    let v: Vec<&BBox> = block.iter().map(|&i| &items[i]).collect();
    let rows = bands(v.iter().map(|b| (b.y, b.y + b.height)).collect(), tol);
    let cols = bands(v.iter().map(|b| (b.x, b.x + b.width)).collect(), tol);
    if !even_bands(&rows, tol, cfg.eps_gap) || !even_bands(&cols, tol, cfg.eps_gap) {
        return false;
    }
    let band_of = |bs: &[(f64, f64)], lo: f64, hi: f64| {
        bs.iter()
            .position(|b| overlap_len(b.0, b.1, lo, hi) >= -tol)
            .unwrap()
    };
    if (horizontal && rows.len() > 1 && cols.len() == 1)
        || (!horizontal && cols.len() > 1 && rows.len() == 1)
    {
        return false;
    }
    let mut cells = std::collections::BTreeSet::new();
    for b in &v {
        let cell = (
            band_of(&rows, b.y, b.y + b.height),
            band_of(&cols, b.x, b.x + b.width),
        );
        if !cells.insert(cell) {
            return false;
        }
    }
    let linked = cells
        .iter()
        .all(|c| cells.iter().any(|d| d != c && (d.0 == c.0 || d.1 == c.1)));
    if !linked {
        return false;
    }
    // a two-way grid is a lattice: equal boxes sharing exact row and
    // column extents
    let near = |a: f64, b: f64| (a - b).abs() <= cfg.eps_align;
    let lattice = v.iter().all(|a| {
        v.iter().all(|b| {
            near(a.width, b.width)
                && near(a.height, b.height)
                && (band_of(&rows, a.y, a.y + a.height) != band_of(&rows, b.y, b.y + b.height)
                    || near(a.y, b.y))
                && (band_of(&cols, a.x, a.x + a.width) != band_of(&cols, b.x, b.x + b.width)
                    || near(a.x, b.x))
        })
    });
    // a single line is connected through unobstructed neighbours that
    // face each other along the flow
    let faces = |horizontal: bool| {
        let joined = |i: usize, j: usize| {
            let (a, b) = (&items[i], &items[j]);
            let cross = if horizontal {
                overlap_len(a.y, a.y + a.height, b.y, b.y + b.height)
            } else {
                overlap_len(a.x, a.x + a.width, b.x, b.x + b.width)
            };
            let u = hull(items, &[i, j]);
            cross >= -tol
                && (0..items.len()).all(|k| k == i || k == j || !interiors_meet(&u, &items[k]))
        };
        let mut seen = vec![block[0]];
        let mut k = 0;
        while k < seen.len() {
            let i = seen[k];
            for &j in block {
                if !seen.contains(&j) && joined(i, j) {
                    seen.push(j);
                }
            }
            k += 1;
        }
        seen.len() == block.len()
    };
    match (rows.len(), cols.len()) {
        (1, _) => faces(true),
        (_, 1) => faces(false),
        _ => lattice,
    }
}

fn facing(a: &BBox, b: &BBox) -> Option<f64> {
    let ox = overlap_len(a.x, a.x + a.width, b.x, b.x + b.width);
    let oy = overlap_len(a.y, a.y + a.height, b.y, b.y + b.height);
    match (ox > TOUCH, oy > TOUCH) {
        (true, true) | (false, false) => None,
        (false, true) => Some((-ox).max(0.0)),
        (true, false) => Some((-oy).max(0.0)),
    }
}

/// The level's packing gap: the smallest facing gap, if within the cap.
fn packing_gap(items: &[BBox], cfg: &Config) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if let Some(g) = facing(&items[i], &items[j]) {
                best = Some(best.map_or(g, |b: f64| b.min(g)));
            }
        }
    }
    best.filter(|g| *g <= cfg.packing_gap_cap)
}

/// Members facing each other within the cap sit exactly at the level gap,
/// and the block is connected through such pairs.
fn packing_valid(items: &[BBox], block: &[usize], gap: f64, cfg: &Config) -> bool {
    let close =
        |i: usize, j: usize| facing(&items[i], &items[j]).filter(|g| *g <= cfg.packing_gap_cap);
    let consistent = block.iter().all(|&i| {
        block
            .iter()
            .all(|&j| i == j || close(i, j).map_or(true, |g| (g - gap).abs() <= cfg.eps_gap))
    });
    let mut seen = vec![block[0]];
    let mut k = 0;
    while k < seen.len() {
        let i = seen[k];
        for &j in block {
            if !seen.contains(&j) && close(i, j).is_some() {
                seen.push(j);
            }
        }
        k += 1;
    }
    consistent && seen.len() == block.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Class {
    HStack,
    VStack,
    HGrid,
    VGrid,
    Packing,
}

impl Class {
    const ALL: [Class; 5] = [
        Class::HStack,
        Class::VStack,
        Class::HGrid,
        Class::VGrid,
        Class::Packing,
    ];

    /// Stacks, then grids, then packing.
    pub fn priority(self) -> u8 {
        match self {
            Class::HStack | Class::VStack => 0,
            Class::HGrid | Class::VGrid => 1,
            Class::Packing => 2,
        }
    }
}

fn block_valid(
    items: &[BBox],
    block: &[usize],
    class: Class,
    gap: Option<f64>,
    cfg: &Config,
) -> bool {
    match class {
        Class::HStack => stack_valid(items, block, true, cfg),
        Class::VStack => stack_valid(items, block, false, cfg),
        Class::HGrid => grid_valid(items, block, true, cfg),
        Class::VGrid => grid_valid(items, block, false, cfg),
        Class::Packing => gap.is_some_and(|g| packing_valid(items, block, g, cfg)),
    }
}

pub fn partition_valid(items: &[BBox], p: &[Vec<usize>], class: Class, cfg: &Config) -> bool {
    let gap = packing_gap(items, cfg);
    if p.iter()
        .any(|b| b.len() < 2 || !block_valid(items, b, class, gap, cfg))
    {
        return false;
    }
    let hulls: Vec<BBox> = p.iter().map(|b| hull(items, b)).collect();
    (0..hulls.len()).all(|i| (i + 1..hulls.len()).all(|j| !interiors_meet(&hulls[i], &hulls[j])))
}

/// Best achievable (priority, block count) over every class and
/// partition, with the classes reaching it.
/// One exception: a grid whose blocks only split coarser packing blocks
/// (uniformly gapped clusters, as in a treemap) ranks as that packing.
pub fn best_rank(items: &[BBox], cfg: &Config) -> Option<((u8, usize), Vec<Class>)> {
    let parts = set_partitions(items.len());
    let valid = |class: Class| -> Vec<&Vec<Vec<usize>>> {
        parts
            .iter()
            .filter(|p| partition_valid(items, p, class, cfg))
            .collect()
    };
    let packings = valid(Class::Packing);
    let mut best: Option<((u8, usize), Vec<Class>)> = None;
    for class in Class::ALL {
        let ok = valid(class);
        let Some(mut n) = ok.iter().map(|p| p.len()).min() else {
            continue;
        };
        let mut class = class;
        if class.priority() == 1 {
            let coarser = packings
                .iter()
                .filter(|q| ok.iter().any(|p| p.len() == n && refines(p, q)))
                .map(|q| q.len())
                .min();
            if let Some(m) = coarser {
                (class, n) = (Class::Packing, m);
            }
        }
        let rank = (class.priority(), n);
        match &mut best {
            Some((r, classes)) if *r == rank => {
                if !classes.contains(&class) {
                    classes.push(class)
                }
            }
            Some((r, _)) if *r < rank => {}
            _ => best = Some((rank, vec![class])),
        }
    }
    best
}

/// Every block of `fine` lies inside one block of `coarse`, which has
/// fewer blocks.
fn refines(fine: &[Vec<usize>], coarse: &[Vec<usize>]) -> bool {
    coarse.len() < fine.len()
        && fine
            .iter()
            .all(|f| coarse.iter().any(|c| f.iter().all(|i| c.contains(i))))
}

/// Oracle classes a reported category may stand for. Grid partitions are
/// reported under one name whatever their orientation.
fn classes_of(cat: RelationCategory) -> Vec<Class> {
    match cat {
        RelationCategory::HStack => vec![Class::HStack],
        RelationCategory::VStack => vec![Class::VStack],
        RelationCategory::Packing => vec![Class::Packing],
        _ => vec![Class::HGrid, Class::VGrid],
    }
}

/// Compares greedy clustering with the exhaustive optimum.
pub fn check(items: &[BBox], cfg: &Config) -> Result<(), String> {
    let m = build_distance_matrix(items, cfg);
    let best = best_rank(items, cfg);
    match (cluster_level(items, &m, false, cfg), best) {
        (Partition::Collections { category, groups }, Some(best)) => {
            let hit = classes_of(category)
                .into_iter()
                .any(|c| best.1.contains(&c) && partition_valid(items, &groups, c, cfg));
            if !hit || groups.len() != best.0 .1 {
                return Err(format!(
                    "greedy {category:?} {groups:?}, oracle best {best:?}"
                ));
            }
            Ok(())
        }
        (Partition::Unresolved { .. }, None) => Ok(()),
        (got, best) => Err(format!("greedy {got:?}, oracle best {best:?}")),
    }
}

/// A small non-overlapping scene on a coarse lattice, so that abutments,
/// equal gaps and shared edges happen often.
pub fn random_scene(rng: &mut ChaCha8Rng, n: usize) -> Vec<BBox> {
    loop {
        let mut items: Vec<BBox> = Vec::new();
        let mut tries = 0;
        while items.len() < n && tries < 200 {
            tries += 1;
            let b = BBox::new(
                4.0 * rng.random_range(0..12) as f64,
                4.0 * rng.random_range(0..12) as f64,
                [8.0, 12.0, 16.0][rng.random_range(0..3)],
                [8.0, 12.0, 16.0][rng.random_range(0..3)],
            );
            if items.iter().all(|a| !interiors_meet(a, &b)) {
                items.push(b);
            }
        }
        if items.len() == n {
            return items;
        }
    }
}

pub fn random_cases(count: usize, seed: u64) -> Vec<Vec<BBox>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=6);
            random_scene(&mut rng, n)
        })
        .collect()
}
