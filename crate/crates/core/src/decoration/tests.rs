use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::scene::{SceneElement, Style};

struct B {
    els: Vec<SceneElement>,
}

impl B {
    fn new() -> Self {
        Self { els: Vec::new() }
    }
    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) -> usize {
        let id = self.els.len();
        let style = Style {
            fill: fill.to_string(),
            ..Style::default()
        };
        self.els
            .push(SceneElement::rect(id, BBox::new(x, y, w, h), style));
        id
    }
    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64) -> usize {
        let id = self.els.len();
        let style = Style {
            stroke: "#000000".to_string(),
            fill: "none".to_string(),
            ..Style::default()
        };
        self.els
            .push(SceneElement::line(id, (x1, y1), (x2, y2), style));
        id
    }
    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str) -> usize {
        let id = self.els.len();
        let style = Style {
            font_size: 10.0,
            text_anchor: anchor.to_string(),
            ..Style::default()
        };
        self.els
            .push(SceneElement::text(id, (x, y), s.to_string(), style));
        id
    }
    fn scene(self) -> NormalizedScene {
        NormalizedScene {
            elements: self.els,
            view_box: BBox::new(0.0, 0.0, 400.0, 300.0),
            gradients: Default::default(),
        }
    }
}

/// Four bars on a baseline at y=200 with year labels and ticks.
fn bar_chart(b: &mut B) {
    for i in 0..4 {
        let x = 50.0 + 60.0 * i as f64;
        b.rect(
            x,
            200.0 - 30.0 * (i + 1) as f64,
            40.0,
            30.0 * (i + 1) as f64,
            "#4c78a8",
        );
    }
    b.line(40.0, 200.0, 290.0, 200.0);
    for (i, y) in ["1978", "1985", "1993", "2001"].iter().enumerate() {
        let x = 70.0 + 60.0 * i as f64;
        b.line(x, 200.0, x, 205.0);
        b.text(x, 216.0, y, "middle");
    }
}

fn cfg() -> Config {
    Config::default()
}

#[test]
fn bottom_year_labels_make_date_axis() {
    let mut b = B::new();
    bar_chart(&mut b);
    let s = b.scene();
    let (x, y) = detect_axes(&s, &cfg());
    let x = x.unwrap();
    assert!(y.is_none());
    assert_eq!(x.tiers.len(), 1);
    assert_eq!(x.tiers[0].texts(), vec!["1978", "1985", "1993", "2001"]);
    assert_eq!(x.field_type(), FieldType::Date);
    assert_eq!(x.ticks.len(), 4);
    assert!(x.axis_line.is_some());
    assert!(x.numeric_domain.is_none());
    assert_eq!(x.pixel_range, (70.0, 250.0));
}

#[test]
fn no_text_no_axes() {
    let mut b = B::new();
    b.rect(10.0, 10.0, 20.0, 20.0, "#000000");
    b.line(0.0, 30.0, 100.0, 30.0);
    assert_eq!(detect_axes(&b.scene(), &cfg()), (None, None));
}

#[test]
fn second_row_becomes_tier_one() {
    let mut b = B::new();
    let months = ["Jan", "Feb", "Mar", "Jan", "Feb", "Mar"];
    for (i, m) in months.iter().enumerate() {
        let x = 20.0 + 30.0 * i as f64;
        b.rect(x, 100.0, 20.0, 100.0, "#4c78a8");
        b.text(x + 10.0, 214.0, m, "middle");
    }
    b.text(60.0, 230.0, "2020", "middle");
    b.text(150.0, 230.0, "2021", "middle");
    b.text(100.0, 260.0, "Month", "middle");
    let x = detect_axes(&b.scene(), &cfg()).0.unwrap();
    assert_eq!(x.tiers.len(), 2);
    assert_eq!(x.tiers[1].texts(), vec!["2020", "2021"]);
    assert_eq!(x.tiers[0].field_type, FieldType::Date);
}

#[test]
fn non_dividing_row_is_left_out() {
    let mut b = B::new();
    for i in 0..7 {
        let x = 20.0 + 30.0 * i as f64;
        b.rect(x, 100.0, 20.0, 100.0, "#4c78a8");
        b.text(x + 10.0, 214.0, &alloc::format!("c{i}"), "middle");
    }
    b.text(60.0, 230.0, "A", "middle");
    b.text(150.0, 230.0, "B", "middle");
    let x = detect_axes(&b.scene(), &cfg()).0.unwrap();
    assert_eq!(x.tiers.len(), 1);
}

#[test]
fn quantitative_y_axis() {
    let mut b = B::new();
    bar_chart(&mut b);
    for (i, v) in ["0", "50", "100"].iter().enumerate() {
        let y = 200.0 - 50.0 * i as f64;
        b.line(35.0, y, 40.0, y);
        b.text(33.0, y + 3.0, v, "end");
    }
    let (x, y) = detect_axes(&b.scene(), &cfg());
    assert!(x.is_some());
    let y = y.unwrap();
    assert_eq!(y.field_type(), FieldType::Quantitative);
    assert_eq!(y.numeric_domain, Some((0.0, 100.0)));
    assert_eq!(y.ticks.len(), 3);
    // label centers sit on the ticks
    assert!((y.value_at(150.0).unwrap() - 50.0).abs() < 1e-9);
}

fn swatch_legend(b: &mut B, colors: &[(&str, &str)]) -> Vec<usize> {
    let mut ids = Vec::new();
    for (i, (label, color)) in colors.iter().enumerate() {
        let y = 20.0 + 16.0 * i as f64;
        ids.push(b.rect(320.0, y, 10.0, 10.0, color));
        ids.push(b.text(334.0, y + 8.0, label, "start"));
    }
    ids
}

#[test]
fn discrete_legend() {
    let mut b = B::new();
    bar_chart(&mut b);
    swatch_legend(
        &mut b,
        &[("a", "#1f77b4"), ("b", "#ff7f0e"), ("c", "#2ca02c")],
    );
    let l = detect_legend(&b.scene(), &cfg());
    assert_eq!(l.kind, LegendKind::Discrete);
    let got: Vec<(String, String)> = l
        .entries
        .iter()
        .map(|e| (e.label.clone(), e.color.clone()))
        .collect();
    assert_eq!(
        got,
        vec![
            ("a".into(), "#1f77b4".into()),
            ("b".into(), "#ff7f0e".into()),
            ("c".into(), "#2ca02c".into())
        ]
    );
    assert!(l.region.is_some());
}

#[test]
fn continuous_legend() {
    let mut b = B::new();
    bar_chart(&mut b);
    let bar = b.rect(300.0, 20.0, 80.0, 10.0, "url(#g)");
    for (i, v) in ["0", "50", "100"].iter().enumerate() {
        b.text(300.0 + 40.0 * i as f64, 44.0, v, "middle");
    }
    let mut s = b.scene();
    s.gradients.insert(
        "g".into(),
        vec![
            GradientStop {
                offset: 0.0,
                color: "#ffffff".into(),
            },
            GradientStop {
                offset: 1.0,
                color: "#08306b".into(),
            },
        ],
    );
    let l = detect_legend(&s, &cfg());
    assert_eq!(l.kind, LegendKind::Continuous);
    assert_eq!(l.gradient_bar, Some(bar));
    assert_eq!(l.gradient_stops.len(), 2);
    assert_eq!(l.value_range(), Some((0.0, 100.0)));
}

#[test]
fn no_legend() {
    let mut b = B::new();
    bar_chart(&mut b);
    assert_eq!(detect_legend(&b.scene(), &cfg()).kind, LegendKind::None);
}

#[test]
fn add_tier_then_label() {
    let mut b = B::new();
    bar_chart(&mut b);
    let decade = b.text(160.0, 232.0, "1980s", "middle");
    let s = b.scene();
    let m = detect(&s, &cfg());
    assert_eq!(m.x_axis.as_ref().unwrap().tiers.len(), 1);
    let m = apply_correction(&m, &s, &cfg(), &Correction::add_tier(Target::XAxis)).unwrap();
    let m = apply_correction(
        &m,
        &s,
        &cfg(),
        &Correction::add_label(Target::XAxis, 1, &[decade]),
    )
    .unwrap();
    let x = m.x_axis.unwrap();
    assert_eq!(x.tiers.len(), 2);
    assert_eq!(x.tiers[1].texts(), vec!["1980s"]);
}

#[test]
fn tier_out_of_range() {
    let mut b = B::new();
    bar_chart(&mut b);
    let t = b.text(160.0, 232.0, "x", "middle");
    let s = b.scene();
    let m = detect(&s, &cfg());
    let err = apply_correction(
        &m,
        &s,
        &cfg(),
        &Correction::add_label(Target::XAxis, 3, &[t]),
    )
    .unwrap_err();
    assert_eq!(err, DecorationError::TierOutOfRange { tier: 3, tiers: 1 });
    let err = apply_correction(
        &m,
        &s,
        &cfg(),
        &Correction::add_label(Target::XAxis, 0, &[999]),
    )
    .unwrap_err();
    assert_eq!(err, DecorationError::UnknownElement(999));
}

#[test]
fn remove_then_add_restores() {
    let mut b = B::new();
    bar_chart(&mut b);
    let s = b.scene();
    let m = detect(&s, &cfg());
    let id = m.x_axis.as_ref().unwrap().tiers[0].labels[2].id;
    let removed = apply_correction(
        &m,
        &s,
        &cfg(),
        &Correction::remove_label(Target::XAxis, &[id]),
    )
    .unwrap();
    assert_eq!(removed.x_axis.as_ref().unwrap().tiers[0].labels.len(), 3);
    let back = apply_correction(
        &removed,
        &s,
        &cfg(),
        &Correction::add_label(Target::XAxis, 0, &[id]),
    )
    .unwrap();
    assert_eq!(back, m);
}

#[test]
fn misaligned_label_rejected() {
    let mut b = B::new();
    bar_chart(&mut b);
    let t = b.text(300.0, 222.0, "2009", "middle");
    let s = b.scene();
    let m = detect(&s, &cfg());
    let err = apply_correction(
        &m,
        &s,
        &cfg(),
        &Correction::add_label(Target::XAxis, 0, &[t]),
    )
    .unwrap_err();
    assert_eq!(err, DecorationError::NotCollinear(t));
}

#[test]
fn remove_false_legend() {
    let mut b = B::new();
    bar_chart(&mut b);
    swatch_legend(&mut b, &[("note 1", "#999999"), ("note 2", "#999999")]);
    let s = b.scene();
    let m = detect(&s, &cfg());
    assert_eq!(m.legend.kind, LegendKind::Discrete);
    let m = apply_correction(
        &m,
        &s,
        &cfg(),
        &Correction::remove_decoration(Target::Legend),
    )
    .unwrap();
    assert_eq!(m.legend.kind, LegendKind::None);
}

#[test]
fn designate_region_finds_inner_y_axis() {
    let mut b = B::new();
    bar_chart(&mut b);
    // labels drawn inside the plot, right of its left edge
    for (i, v) in ["0", "50", "100"].iter().enumerate() {
        b.text(44.0, 200.0 - 50.0 * i as f64 - 2.0, v, "start");
    }
    let s = b.scene();
    let m = detect(&s, &cfg());
    assert!(m.y_axis.is_none());
    let err = apply_correction(
        &m,
        &s,
        &cfg(),
        &Correction::designate_region(Target::YAxis, BBox::new(0.0, 0.0, 0.0, 5.0)),
    )
    .unwrap_err();
    assert_eq!(err, DecorationError::InvalidRegion);
    let c = Correction::designate_region(Target::YAxis, BBox::new(40.0, 80.0, 20.0, 130.0));
    let m = apply_correction(&m, &s, &cfg(), &c).unwrap();
    let y = m.y_axis.unwrap();
    assert_eq!(y.tiers[0].texts(), vec!["100", "50", "0"]);
    assert_eq!(y.field_type(), FieldType::Quantitative);
}

#[test]
fn set_field_type_overrides() {
    let mut b = B::new();
    bar_chart(&mut b);
    let s = b.scene();
    let m = detect(&s, &cfg());
    let c = Correction::set_field_type(Target::XAxis, 0, FieldType::Categorical);
    let m = apply_correction(&m, &s, &cfg(), &c).unwrap();
    assert_eq!(m.x_axis.unwrap().field_type(), FieldType::Categorical);
}

#[test]
fn payload_shape_checked() {
    let mut b = B::new();
    bar_chart(&mut b);
    let s = b.scene();
    let m = detect(&s, &cfg());
    let c = Correction {
        kind: CorrectionKind::AddLabel,
        target: Target::XAxis,
        payload: CorrectionPayload::default(),
    };
    assert_eq!(
        apply_correction(&m, &s, &cfg(), &c),
        Err(DecorationError::PayloadMismatch)
    );
}

#[test]
fn correction_json_shape() {
    let c = Correction::add_label(Target::XAxis, 1, &[4]);
    let j = serde_json::to_string(&c).unwrap();
    assert_eq!(
        j,
        r#"{"kind":"AddLabel","target":"XAxis","payload":{"elementIds":[4],"tier":1}}"#
    );
}

#[test]
fn strip_removes_decorations_and_gridlines() {
    let mut b = B::new();
    let grid = b.line(40.0, 150.0, 290.0, 150.0);
    bar_chart(&mut b);
    for (i, v) in ["0", "50", "100"].iter().enumerate() {
        let y = 200.0 - 50.0 * i as f64;
        b.line(35.0, y, 40.0, y);
        b.text(33.0, y + 3.0, v, "end");
    }
    b.text(150.0, 20.0, "A title", "middle");
    let s = b.scene();
    let m = detect(&s, &cfg());
    let out = strip_decorations(&s, &m, &cfg()).unwrap();
    assert_eq!(out.rects().count(), 4);
    assert_eq!(out.texts().count(), 0);
    assert!(out.get(grid).is_none());
    let claimed = m.claimed_ids();
    assert!(out.elements.iter().all(|e| !claimed.contains(&e.id)));
}

#[test]
fn strip_only_swatches_is_empty() {
    let mut b = B::new();
    swatch_legend(&mut b, &[("a", "#1f77b4"), ("b", "#ff7f0e")]);
    let s = b.scene();
    let m = detect(&s, &cfg());
    assert_eq!(
        strip_decorations(&s, &m, &cfg()),
        Err(DecorationError::EmptyScene)
    );
}
