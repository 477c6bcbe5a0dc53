use alloc::string::String;
use alloc::vec::Vec;

use super::*;
use crate::scene::{SceneElement, Style};

fn scene(rects: &[(f64, f64, f64, f64, &str)]) -> NormalizedScene {
    let elements = rects
        .iter()
        .enumerate()
        .map(|(i, &(x, y, w, h, fill))| {
            SceneElement::rect(
                i,
                BBox::new(x, y, w, h),
                Style {
                    fill: String::from(fill),
                    ..Style::default()
                },
            )
        })
        .collect();
    NormalizedScene {
        elements,
        view_box: BBox::new(0.0, 0.0, 800.0, 600.0),
        ..NormalizedScene::default()
    }
}

fn run(rects: &[(f64, f64, f64, f64, &str)]) -> GrecTemplate {
    deconstruct(&scene(rects), DecorationModel::empty(), &Config::default()).unwrap()
}

fn shape(t: &GrecTemplate) -> Vec<(NodeKind, Option<RelationCategory>, Gravity)> {
    t.summary()
        .levels
        .into_iter()
        .map(|l| (l.kind, l.category, l.gravity))
        .collect()
}

fn channels(t: &GrecTemplate) -> Vec<Channel> {
    t.summary().channels
}

use Channel as C;
use NodeKind::{Collection as Col, Glyph as Gly, Leaf};
use RelationCategory as R;

const PAL: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

#[test]
fn bar_chart() {
    let hs = [120.0, 80.0, 150.0, 60.0, 100.0];
    let rects: Vec<_> = hs
        .iter()
        .enumerate()
        .map(|(i, &h)| (i as f64 * 30.0, 200.0 - h, 20.0, h, PAL[0]))
        .collect();
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::HGrid), Gravity::Bottom),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(channels(&t), [C::Height]);
    let rel = t.root.relationship.as_ref().unwrap();
    assert!((rel.gap - 10.0).abs() < 1e-9);
    assert_eq!(t.c_group(), 1);
}

#[test]
fn grouped_bar_chart() {
    let mut rects = Vec::new();
    for g in 0..4 {
        for s in 0..3 {
            let h = 40.0 + ((g * 3 + s) * 37 % 90) as f64;
            rects.push((
                g as f64 * 56.0 + s as f64 * 12.0,
                200.0 - h,
                10.0,
                h,
                PAL[s],
            ));
        }
    }
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::HGrid), Gravity::Bottom),
            (Col, Some(R::HGrid), Gravity::Bottom),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(channels(&t), [C::Height, C::Fill]);
}

#[test]
fn stacked_bar_chart() {
    let mut rects = Vec::new();
    for g in 0..4 {
        let mut y = 200.0;
        for s in 0..3 {
            let h = 20.0 + ((g * 3 + s) * 23 % 50) as f64;
            y -= h;
            rects.push((g as f64 * 30.0, y, 20.0, h, PAL[s]));
        }
    }
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::HGrid), Gravity::Bottom),
            (Col, Some(R::VStack), Gravity::None),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(channels(&t), [C::Height, C::Fill]);
}

#[test]
fn heatmap() {
    let mut rects = Vec::new();
    for r in 0..3 {
        for c in 0..4 {
            rects.push((
                c as f64 * 22.0,
                r as f64 * 22.0,
                20.0,
                20.0,
                PAL[(r + c) % 4],
            ));
        }
    }
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::HGrid), Gravity::None),
            (Leaf, None, Gravity::None)
        ]
    );
    let rel = t.root.relationship.as_ref().unwrap();
    assert_eq!((rel.rows, rel.cols), (3, 4));
    assert_eq!(rel.order, FlowOrder::RowMajor);
    assert_eq!(channels(&t), [C::Fill]);
}

#[test]
fn diverging_stacked_has_cross_group_alignment() {
    let mut rects = Vec::new();
    let widths = [[30.0, 40.0, 20.0], [50.0, 20.0, 35.0], [20.0, 60.0, 25.0]];
    for (r, w) in widths.iter().enumerate() {
        let y = r as f64 * 28.0;
        let mid = 200.0 - w[1] / 2.0;
        rects.push((mid - w[0], y, w[0], 20.0, PAL[0]));
        rects.push((mid, y, w[1], 20.0, PAL[1]));
        rects.push((mid + w[1], y, w[2], 20.0, PAL[2]));
    }
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::VGrid), Gravity::None),
            (Col, Some(R::HStack), Gravity::None),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(channels(&t), [C::Width, C::Fill]);
    let cga: Vec<_> = t
        .constraints
        .iter()
        .filter(|c| c.kind == ConstraintKind::CrossGroupAlign)
        .collect();
    assert_eq!(cga.len(), 1, "{:?}", cga);
    assert_eq!(cga[0].axes, [Alignment::CenterH]);
    assert_eq!(cga[0].anchor_color.as_deref(), Some(PAL[1]));
    assert_eq!(cga[0].members.len(), 3);
}

#[test]
fn range_chart_uses_sides() {
    let spans = [(40.0, 120.0), (70.0, 150.0), (20.0, 90.0), (60.0, 180.0)];
    let rects: Vec<_> = spans
        .iter()
        .enumerate()
        .map(|(i, &(t, b))| (i as f64 * 30.0, t, 20.0, b - t, PAL[0]))
        .collect();
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::HGrid), Gravity::None),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(channels(&t), [C::TopSide, C::BottomSide]);
    assert!(t
        .encodings
        .iter()
        .all(|e| e.options == [C::TopSide, C::BottomSide, C::Height]));
}

#[test]
fn two_rows_of_stacks() {
    let widths = [
        [30.0, 20.0, 50.0, 10.0, 40.0],
        [25.0, 45.0, 15.0, 35.0, 30.0],
    ];
    let mut rects = Vec::new();
    for (r, ws) in widths.iter().enumerate() {
        let mut x = 0.0;
        for (k, w) in ws.iter().enumerate() {
            rects.push((x, r as f64 * 30.0, *w, 20.0, PAL[k % 4]));
            x += w;
        }
    }
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::VGrid), Gravity::None),
            (Col, Some(R::HStack), Gravity::None),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(t.root.children.len(), 2);
    assert!(t.root.children.iter().all(|c| c.children.len() == 5));
}

#[test]
fn marimekko() {
    let cols = [
        (60.0, [0.2, 0.5, 0.3]),
        (30.0, [0.4, 0.4, 0.2]),
        (90.0, [0.1, 0.3, 0.6]),
    ];
    let mut rects = Vec::new();
    let mut x = 0.0;
    for (w, fr) in cols {
        let mut y = 0.0;
        for (k, f) in fr.iter().enumerate() {
            rects.push((x, y, w, 200.0 * f, PAL[k]));
            y += 200.0 * f;
        }
        x += w;
    }
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::HStack), Gravity::None),
            (Col, Some(R::VStack), Gravity::None),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(channels(&t), [C::Width, C::Height, C::Fill]);
}

#[test]
fn bullet_glyphs() {
    let measures = [120.0, 80.0, 150.0];
    let markers = [140.0, 100.0, 130.0];
    let mut rects = Vec::new();
    for r in 0..3 {
        let y = r as f64 * 40.0;
        rects.push((0.0, y, 200.0, 24.0, "#dddddd"));
        rects.push((0.0, y + 8.0, measures[r], 8.0, "#333333"));
        rects.push((markers[r], y + 4.0, 2.0, 16.0, "#d62728"));
    }
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [
            (Col, Some(R::VGrid), Gravity::None),
            (Gly, None, Gravity::None),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(t.glyph_depth(), Some(1));
    assert_eq!(t.glyph_sets.len(), 3);
    assert_eq!(channels(&t), [C::X, C::Width, C::Fill]);
    let align = t
        .constraints
        .iter()
        .filter(|c| c.kind == ConstraintKind::GlyphAlign)
        .count();
    assert!(align >= 3);
}

#[test]
fn scatter_is_position_encoded() {
    let pts = [
        (13.0, 87.0),
        (50.0, 20.0),
        (90.0, 140.0),
        (140.0, 60.0),
        (180.0, 110.0),
    ];
    let rects: Vec<_> = pts.iter().map(|&(x, y)| (x, y, 6.0, 6.0, PAL[0])).collect();
    let t = run(&rects);
    assert_eq!(
        shape(&t),
        [(Col, None, Gravity::None), (Leaf, None, Gravity::None)]
    );
    assert!(t.root.children.iter().all(|c| c.position_encoded));
    assert_eq!(channels(&t), [C::X, C::Y]);
    assert!(!t.forest);
}

#[test]
fn panels_form_a_forest() {
    let mut rects = Vec::new();
    for p in 0..3 {
        let (ox, oy) = (p as f64 * 150.0, p as f64 * 130.0);
        for i in 0..4 {
            let h = 20.0 + ((p * 4 + i) * 29 % 70) as f64;
            rects.push((ox + i as f64 * 25.0, oy + 100.0 - h, 20.0, h, PAL[0]));
        }
    }
    let t = run(&rects);
    assert!(t.forest);
    assert_eq!(
        shape(&t),
        [
            (Col, None, Gravity::None),
            (Col, Some(R::HGrid), Gravity::Bottom),
            (Leaf, None, Gravity::None)
        ]
    );
    assert_eq!(channels(&t), [C::X, C::Y, C::Height]);
    assert_eq!(t.c_group(), 2);
}

#[test]
fn single_rect_becomes_collection() {
    let t = run(&[(0.0, 0.0, 10.0, 10.0, PAL[0])]);
    assert_eq!(t.root.kind, Col);
    assert_eq!(t.root.leaf_ids(), [0]);
}

#[test]
fn empty_scene_is_error() {
    let err = deconstruct(
        &NormalizedScene::default(),
        DecorationModel::empty(),
        &Config::default(),
    );
    assert_eq!(err.unwrap_err(), GrecError::EmptyScene);
}
