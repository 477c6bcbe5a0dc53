//! Flattening the node arena into absolute-coordinate scene elements.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::path::{path_points, path_to_shape, polygon_to_shape, PathShape};
use super::transform::parse_numbers;
use super::tree::{SvgTree, INHERITED};
use crate::color::normalize_color;
use crate::config::Config;
use crate::error::IngestError;
use crate::geom::{AffineMatrix, BBox};
use crate::scene::{GradientStop, NormalizedScene, SceneElement, Style};

const DRAWABLE: &[&str] = &[
    "rect", "line", "path", "text", "polygon", "polyline", "circle", "ellipse",
];
const NON_RENDERED: &[&str] = &[
    "defs",
    "clipPath",
    "mask",
    "pattern",
    "marker",
    "symbol",
    "linearGradient",
    "radialGradient",
    "title",
    "desc",
    "metadata",
    "style",
    "script",
    "filter",
];

/// Pairs every drawable leaf with the composition of all transforms from the
/// root down to (and including) the leaf itself.
pub fn resolve_absolute(tree: &SvgTree) -> Result<Vec<(usize, AffineMatrix)>, IngestError> {
    let mut out = Vec::new();
    walk(tree, 0, AffineMatrix::IDENTITY, &mut out)?;
    Ok(out)
}

fn walk(
    tree: &SvgTree,
    idx: usize,
    parent: AffineMatrix,
    out: &mut Vec<(usize, AffineMatrix)>,
) -> Result<(), IngestError> {
    let node = tree.node(idx);
    if NON_RENDERED.contains(&node.tag.as_str()) {
        return Ok(());
    }
    let mut m = parent;
    if idx != 0 && node.tag == "svg" {
        let x = node.attr("x").and_then(parse_length).unwrap_or(0.0);
        let y = node.attr("y").and_then(parse_length).unwrap_or(0.0);
        m = m.then_apply_to(&AffineMatrix::translate(x, y));
    }
    match &node.local_transform {
        Some(Ok(t)) => m = m.then_apply_to(t),
        Some(Err(name)) => return Err(IngestError::UnsupportedTransform(name.clone())),
        None => {}
    }
    if DRAWABLE.contains(&node.tag.as_str()) {
        out.push((idx, m));
        // text children (tspan) belong to the text element
        return Ok(());
    }
    for &c in &node.children {
        walk(tree, c, m, out)?;
    }
    Ok(())
}

/// Parses a length in px; `pt` and `em` are converted, percentages rejected.
pub fn parse_length(s: &str) -> Option<f64> {
    let s = s.trim();
    let (num, factor) = if let Some(n) = s.strip_suffix("px") {
        (n, 1.0)
    } else if let Some(n) = s.strip_suffix("pt") {
        (n, 4.0 / 3.0)
    } else if let Some(n) = s.strip_suffix("em") {
        (n, 16.0)
    } else if s.ends_with('%') {
        return None;
    } else {
        (s, 1.0)
    };
    num.trim().parse::<f64>().ok().map(|v| v * factor)
}

fn parse_opacity(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(p) = s.strip_suffix('%') {
        return p.parse::<f64>().ok().map(|v| (v / 100.0).clamp(0.0, 1.0));
    }
    s.parse::<f64>().ok().map(|v| v.clamp(0.0, 1.0))
}

/// Resolves the effective style of a node: its own declarations win over
/// the nearest ancestor's, opacity multiplies down the chain.
fn resolve_style(tree: &SvgTree, idx: usize, m: &AffineMatrix) -> Option<Style> {
    let chain = tree.ancestry(idx);
    let mut inherited: BTreeMap<&str, &str> = BTreeMap::new();
    let mut opacity = 1.0;
    for &i in &chain {
        let n = tree.node(i);
        if n.style("display") == Some("none") {
            return None;
        }
        if let Some(o) = n.style("opacity").and_then(parse_opacity) {
            opacity *= o;
        }
        for &k in INHERITED {
            if let Some(v) = n.style(k) {
                if v != "inherit" {
                    inherited.insert(k, v);
                }
            }
        }
    }
    if matches!(
        inherited.get("visibility"),
        Some(&"hidden") | Some(&"collapse")
    ) {
        return None;
    }
    let mut style = Style {
        opacity,
        ..Style::default()
    };
    if let Some(f) = inherited.get("fill") {
        style.fill = normalize_color(f);
    }
    if let Some(s) = inherited.get("stroke") {
        style.stroke = normalize_color(s);
    }
    let scale = m.mean_scale();
    if let Some(w) = inherited.get("stroke-width").and_then(|v| parse_length(v)) {
        style.stroke_width = w;
    }
    style.stroke_width *= scale;
    if let Some(o) = inherited.get("fill-opacity").and_then(|v| parse_opacity(v)) {
        style.fill_opacity = o;
    }
    if let Some(fs) = inherited.get("font-size").and_then(|v| parse_length(v)) {
        style.font_size = fs;
    }
    style.font_size *= scale;
    if let Some(a) = inherited.get("text-anchor") {
        style.text_anchor = a.to_string();
    }
    Some(style)
}

fn num_attr(tree: &SvgTree, idx: usize, name: &str) -> Option<f64> {
    tree.node(idx).attr(name).and_then(parse_length)
}

fn transformed_hull(m: &AffineMatrix, pts: &[(f64, f64)]) -> Option<BBox> {
    let mut it = pts.iter().map(|&(x, y)| m.apply(x, y));
    let first = it.next()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.0, first.1, first.0, first.1);
    for (x, y) in it {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    Some(BBox::from_corners(x0, y0, x1, y1))
}

fn box_element(m: &AffineMatrix, b: BBox, style: Style) -> SceneElement {
    let corners = [
        (b.x, b.y),
        (b.right(), b.y),
        (b.right(), b.bottom()),
        (b.x, b.bottom()),
    ];
    let hull = transformed_hull(m, &corners).unwrap_or(b);
    let mut e = SceneElement::rect(0, hull, style);
    if !m.is_axis_aligned() {
        e.kind = crate::scene::ElementKind::Other;
    }
    e
}

fn shape_element(
    m: &AffineMatrix,
    shape: PathShape,
    hull: &[(f64, f64)],
    style: Style,
) -> SceneElement {
    match shape {
        PathShape::Rect(b) => box_element(m, b, style),
        PathShape::Line(p, q) => SceneElement::line(0, m.apply(p.0, p.1), m.apply(q.0, q.1), style),
        PathShape::None => {
            let b = transformed_hull(m, hull).unwrap_or_default();
            let mut e = SceneElement::rect(0, b, style);
            e.kind = crate::scene::ElementKind::Other;
            e
        }
    }
}

fn points_attr(s: &str) -> Vec<(f64, f64)> {
    let nums = parse_numbers(s).unwrap_or_default();
    nums.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Builds the unfiltered scene: every drawable leaf becomes one element with
/// absolute geometry and resolved style.
pub fn build_scene(tree: &SvgTree, config: &Config) -> Result<NormalizedScene, IngestError> {
    let leaves = resolve_absolute(tree)?;
    let tol = config.vertex_dedup_px;
    let mut elements = Vec::with_capacity(leaves.len());
    for (idx, m) in leaves {
        let Some(style) = resolve_style(tree, idx, &m) else {
            continue;
        };
        let node = tree.node(idx);
        let elem = match node.tag.as_str() {
            "rect" => {
                let b = BBox::new(
                    num_attr(tree, idx, "x").unwrap_or(0.0),
                    num_attr(tree, idx, "y").unwrap_or(0.0),
                    num_attr(tree, idx, "width").unwrap_or(0.0),
                    num_attr(tree, idx, "height").unwrap_or(0.0),
                );
                box_element(&m, b, style)
            }
            "line" => {
                let p = (
                    num_attr(tree, idx, "x1").unwrap_or(0.0),
                    num_attr(tree, idx, "y1").unwrap_or(0.0),
                );
                let q = (
                    num_attr(tree, idx, "x2").unwrap_or(0.0),
                    num_attr(tree, idx, "y2").unwrap_or(0.0),
                );
                let (p, q) = (m.apply(p.0, p.1), m.apply(q.0, q.1));
                thick_line_as_rect(p, q, &style, config)
                    .unwrap_or_else(|| SceneElement::line(0, p, q, style))
            }
            "path" => {
                let d = node.attr("d").unwrap_or("");
                let hull = path_points(d).map(|p| p.points).unwrap_or_default();
                shape_element(&m, path_to_shape(d, tol), &hull, style)
            }
            "polygon" | "polyline" => {
                let pts = points_attr(node.attr("points").unwrap_or(""));
                shape_element(&m, polygon_to_shape(&pts, tol), &pts, style)
            }
            "circle" | "ellipse" => {
                let cx = num_attr(tree, idx, "cx").unwrap_or(0.0);
                let cy = num_attr(tree, idx, "cy").unwrap_or(0.0);
                let r = num_attr(tree, idx, "r");
                let rx = num_attr(tree, idx, "rx").or(r).unwrap_or(0.0);
                let ry = num_attr(tree, idx, "ry").or(r).unwrap_or(0.0);
                let hull = [(cx - rx, cy - ry), (cx + rx, cy + ry)];
                shape_element(&m, PathShape::None, &hull, style)
            }
            "text" => {
                let content = collapse_ws(tree.text_content(idx));
                if content.is_empty() {
                    continue;
                }
                let first_tspan = node
                    .children
                    .iter()
                    .copied()
                    .find(|&c| tree.node(c).tag == "tspan");
                let coord = |name: &str| {
                    num_attr(tree, idx, name)
                        .or_else(|| first_tspan.and_then(|t| first_number(tree.node(t).attr(name))))
                        .unwrap_or(0.0)
                };
                let (ax, ay) = m.apply(coord("x"), coord("y"));
                SceneElement::text(0, (ax, ay), content, style)
            }
            _ => continue,
        };
        let mut elem = elem;
        elem.id = elements.len();
        elem.source_path = tree.ancestry(idx);
        elements.push(elem);
    }
    let view_box = view_box(tree).unwrap_or_else(|| {
        BBox::enclosing(elements.iter().map(|e| e.bbox()).collect::<Vec<_>>().iter())
            .unwrap_or_default()
    });
    Ok(NormalizedScene {
        elements,
        view_box,
        gradients: gradients(tree),
    })
}

fn first_number(s: Option<&str>) -> Option<f64> {
    s.and_then(parse_numbers).and_then(|v| v.first().copied())
}

fn collapse_ws(s: &str) -> String {
    let mut out = String::new();
    for w in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

fn thick_line_as_rect(
    p: (f64, f64),
    q: (f64, f64),
    style: &Style,
    config: &Config,
) -> Option<SceneElement> {
    if !config.thick_lines_as_rects || style.stroke_width < config.thick_line_min_width {
        return None;
    }
    let half = style.stroke_width / 2.0;
    let b = if (p.1 - q.1).abs() < 1e-9 {
        BBox::from_corners(p.0, p.1 - half, q.0, p.1 + half)
    } else if (p.0 - q.0).abs() < 1e-9 {
        BBox::from_corners(p.0 - half, p.1, p.0 + half, q.1)
    } else {
        return None;
    };
    let mut s = style.clone();
    s.fill = s.stroke.clone();
    s.stroke = String::from(crate::color::NONE);
    Some(SceneElement::rect(0, b, s))
}

fn view_box(tree: &SvgTree) -> Option<BBox> {
    let root = tree.root();
    if let Some(v) = root.attr("viewBox").and_then(parse_numbers) {
        if v.len() == 4 && v[2] > 0.0 && v[3] > 0.0 {
            return Some(BBox::new(v[0], v[1], v[2], v[3]));
        }
    }
    let w = root.attr("width").and_then(parse_length)?;
    let h = root.attr("height").and_then(parse_length)?;
    (w > 0.0 && h > 0.0).then(|| BBox::new(0.0, 0.0, w, h))
}

fn gradients(tree: &SvgTree) -> BTreeMap<String, Vec<GradientStop>> {
    let mut out = BTreeMap::new();
    for n in &tree.nodes {
        if n.tag != "linearGradient" && n.tag != "radialGradient" {
            continue;
        }
        let Some(id) = n.attr("id") else { continue };
        let stops: Vec<GradientStop> = n
            .children
            .iter()
            .map(|&c| tree.node(c))
            .filter(|s| s.tag == "stop")
            .map(|s| {
                let offset = s.attr("offset").and_then(parse_opacity).unwrap_or(0.0);
                let color = s
                    .style("stop-color")
                    .or_else(|| s.attr("stop-color"))
                    .or_else(|| {
                        s.attrs
                            .get("style")
                            .and_then(|st| stop_color_from_style(st))
                    })
                    .map(normalize_color)
                    .unwrap_or_else(|| String::from("#000000"));
                GradientStop { offset, color }
            })
            .collect();
        out.insert(id.to_string(), stops);
    }
    out
}

fn stop_color_from_style(style: &str) -> Option<&str> {
    style
        .split(';')
        .filter_map(|d| d.split_once(':'))
        .find(|(k, _)| k.trim() == "stop-color")
        .map(|(_, v)| v.trim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_svg;
    use crate::scene::ElementKind;

    fn scene(svg: &str) -> NormalizedScene {
        build_scene(&parse_svg(svg).unwrap(), &Config::default()).unwrap()
    }

    #[test]
    fn inherits_group_fill() {
        let s = scene(
            r##"<svg><g fill="#ff0000"><rect x="0" y="0" width="10" height="5"/></g></svg>"##,
        );
        assert_eq!(s.elements.len(), 1);
        assert_eq!(s.elements[0].style.fill, "#ff0000");
    }

    #[test]
    fn missing_position_defaults_to_origin() {
        let s = scene(r#"<svg><rect width="10" height="5"/></svg>"#);
        let r = &s.elements[0];
        assert_eq!((r.x, r.y, r.width, r.height), (0.0, 0.0, 10.0, 5.0));
    }

    #[test]
    fn translation_composes() {
        let s = scene(
            r#"<svg><g transform="translate(10,20)"><rect x="5" y="5" width="1" height="1"/></g></svg>"#,
        );
        assert_eq!((s.elements[0].x, s.elements[0].y), (15.0, 25.0));
    }

    #[test]
    fn nested_matrix_and_translate() {
        let s = scene(
            r#"<svg><g transform="matrix(1,0,0,1,5,5)"><g transform="translate(10,0)"><rect width="1" height="1"/></g></g></svg>"#,
        );
        assert_eq!((s.elements[0].x, s.elements[0].y), (15.0, 5.0));
    }

    #[test]
    fn uniform_scale() {
        let s =
            scene(r#"<svg><g transform="scale(2)"><rect x="3" width="4" height="1"/></g></svg>"#);
        assert_eq!((s.elements[0].x, s.elements[0].width), (6.0, 8.0));
    }

    #[test]
    fn rotated_rect_becomes_other() {
        let s = scene(r#"<svg><rect width="4" height="2" transform="rotate(30)"/></svg>"#);
        assert_eq!(s.elements[0].kind, ElementKind::Other);
    }

    #[test]
    fn unsupported_transform_errors() {
        let t =
            parse_svg(r#"<svg><g transform="skewX(10)"><rect width="1" height="1"/></g></svg>"#)
                .unwrap();
        assert_eq!(
            resolve_absolute(&t),
            Err(IngestError::UnsupportedTransform("skewX".into()))
        );
    }

    #[test]
    fn path_rect_and_line_recognized() {
        let s = scene(
            r#"<svg><path d="M0,0 H10 V5 H0 Z" fill="red"/><path d="M0,0 L10,10" stroke="black"/></svg>"#,
        );
        assert_eq!(s.elements[0].kind, ElementKind::Rect);
        assert_eq!(s.elements[0].style.fill, "#ff0000");
        assert_eq!(s.elements[1].kind, ElementKind::Line);
    }

    #[test]
    fn inline_style_beats_presentation_beats_group() {
        let s = scene(
            r#"<svg><g fill="green"><rect fill="red" style="fill:blue" width="1" height="1"/><rect fill="red" width="1" height="1"/><rect width="1" height="1"/></g></svg>"#,
        );
        let fills: Vec<_> = s.elements.iter().map(|e| e.style.fill.as_str()).collect();
        assert_eq!(fills, ["#0000ff", "#ff0000", "#008000"]);
    }

    #[test]
    fn text_anchor_and_content() {
        let s = scene(
            r#"<svg><g transform="translate(0,100)"><text x="10" y="5" font-size="12px" text-anchor="middle">  19<tspan>85</tspan> </text></g></svg>"#,
        );
        let t = &s.elements[0];
        assert_eq!(t.kind, ElementKind::Text);
        assert_eq!(t.text_content(), "1985");
        assert_eq!(t.anchor(), (10.0, 105.0));
        assert_eq!(t.style.font_size, 12.0);
    }

    #[test]
    fn opacity_multiplies() {
        let s =
            scene(r#"<svg><g opacity="0.5"><rect opacity="0.5" width="1" height="1"/></g></svg>"#);
        assert_eq!(s.elements[0].style.opacity, 0.25);
    }

    #[test]
    fn defs_are_not_drawn_and_gradients_recorded() {
        let s = scene(
            r##"<svg><defs><linearGradient id="g"><stop offset="0%" stop-color="white"/><stop offset="100%" style="stop-color:#08306b"/></linearGradient><rect width="5" height="5"/></defs><rect fill="url(#g)" width="100" height="10"/></svg>"##,
        );
        assert_eq!(s.elements.len(), 1);
        assert_eq!(s.elements[0].style.fill, "url(#g)");
        let stops = &s.gradients["g"];
        assert_eq!(stops.len(), 2);
        assert_eq!(stops[1].color, "#08306b");
        assert_eq!(stops[1].offset, 1.0);
    }

    #[test]
    fn thick_line_flag() {
        let svg =
            r#"<svg><line x1="0" y1="10" x2="50" y2="10" stroke="red" stroke-width="8"/></svg>"#;
        let tree = parse_svg(svg).unwrap();
        let off = build_scene(&tree, &Config::default()).unwrap();
        assert_eq!(off.elements[0].kind, ElementKind::Line);
        let cfg = Config {
            thick_lines_as_rects: true,
            ..Config::default()
        };
        let on = build_scene(&tree, &cfg).unwrap();
        assert_eq!(on.elements[0].kind, ElementKind::Rect);
        assert_eq!((on.elements[0].y, on.elements[0].height), (6.0, 8.0));
    }
}
