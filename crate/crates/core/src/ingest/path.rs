//! Path-data rectangle and line recognition.

use alloc::vec::Vec;

use crate::geom::BBox;

#[derive(Clone, Debug, PartialEq)]
pub enum PathShape {
    Rect(BBox),
    Line((f64, f64), (f64, f64)),
    None,
}

/// Vertices of a path, with flags for what the recognizer must reject.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathPoints {
    /// On-path vertices plus curve control points (a conservative hull).
    pub points: Vec<(f64, f64)>,
    pub curved: bool,
    pub subpaths: usize,
}

/// Classifies path data as an axis-aligned rectangle, a two-vertex line, or
/// neither. Coincident vertices within `tol` are merged first.
pub fn path_to_shape(d: &str, tol: f64) -> PathShape {
    match path_points(d) {
        Some(p) if !p.curved && p.subpaths == 1 => polygon_to_shape(&p.points, tol),
        _ => PathShape::None,
    }
}

/// Same test for an explicit vertex list (polygons, polylines).
pub fn polygon_to_shape(points: &[(f64, f64)], tol: f64) -> PathShape {
    let mut pts = dedup_cyclic(points, tol);
    if pts.len() == 2 {
        return PathShape::Line(pts[0], pts[1]);
    }
    remove_collinear(&mut pts, tol);
    if pts.len() != 4 {
        return PathShape::None;
    }
    for i in 0..4 {
        let (a, b) = (pts[i], pts[(i + 1) % 4]);
        let horizontal = (a.1 - b.1).abs() <= tol;
        let vertical = (a.0 - b.0).abs() <= tol;
        if horizontal == vertical {
            return PathShape::None;
        }
        // edges alternate orientation around the cycle
        let c = pts[(i + 2) % 4];
        let next_horizontal = (b.1 - c.1).abs() <= tol;
        if horizontal == next_horizontal {
            return PathShape::None;
        }
    }
    let xs = pts.iter().map(|p| p.0);
    let ys = pts.iter().map(|p| p.1);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    PathShape::Rect(BBox::from_corners(x0, y0, x1, y1))
}

fn dedup_cyclic(points: &[(f64, f64)], tol: f64) -> Vec<(f64, f64)> {
    let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last().is_none_or(|&q| !close(p, q)) {
            out.push(p);
        }
    }
    while out.len() > 1 && close(out[0], out[out.len() - 1]) {
        out.pop();
    }
    out
}

fn remove_collinear(pts: &mut Vec<(f64, f64)>, tol: f64) {
    loop {
        let n = pts.len();
        if n < 3 {
            return;
        }
        let idx = (0..n).find(|&i| {
            let a = pts[(i + n - 1) % n];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            let (ux, uy) = (b.0 - a.0, b.1 - a.1);
            let (vx, vy) = (c.0 - b.0, c.1 - b.1);
            let len = libm::hypot(vx, vy).max(libm::hypot(ux, uy)).max(1e-12);
            // distance of b from line a-c, and b lies between a and c
            let cross = (ux * vy - uy * vx).abs() / len;
            cross <= tol && ux * vx + uy * vy >= 0.0
        });
        match idx {
            Some(i) => {
                pts.remove(i);
            }
            None => return,
        }
    }
}

/// Walks path data collecting absolute vertices. Returns `None` when the
/// data cannot be tokenized.
pub fn path_points(d: &str) -> Option<PathPoints> {
    let tokens = tokenize(d)?;
    let mut out = PathPoints::default();
    let (mut cx, mut cy) = (0.0f64, 0.0f64);
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    let mut i = 0;
    let mut cmd = ' ';
    while i < tokens.len() {
        if let Token::Cmd(c) = tokens[i] {
            cmd = c;
            i += 1;
            if matches!(c, 'Z' | 'z') {
                cx = sx;
                cy = sy;
                continue;
            }
        }
        let arity = match cmd.to_ascii_uppercase() {
            'M' | 'L' | 'T' => 2,
            'H' | 'V' => 1,
            'C' => 6,
            'S' | 'Q' => 4,
            'A' => 7,
            _ => return None,
        };
        let mut args = [0.0f64; 7];
        for slot in args.iter_mut().take(arity) {
            match tokens.get(i) {
                Some(Token::Num(v)) => *slot = *v,
                _ => return None,
            }
            i += 1;
        }
        let rel = cmd.is_ascii_lowercase();
        let (ox, oy) = if rel { (cx, cy) } else { (0.0, 0.0) };
        match cmd.to_ascii_uppercase() {
            'M' => {
                cx = ox + args[0];
                cy = oy + args[1];
                sx = cx;
                sy = cy;
                out.subpaths += 1;
                out.points.push((cx, cy));
                // subsequent pairs are implicit lineto
                cmd = if rel { 'l' } else { 'L' };
            }
            'L' | 'T' => {
                cx = ox + args[0];
                cy = oy + args[1];
                out.points.push((cx, cy));
                if cmd.eq_ignore_ascii_case(&'T') {
                    out.curved = true;
                }
            }
            'H' => {
                cx = if rel { cx + args[0] } else { args[0] };
                out.points.push((cx, cy));
            }
            'V' => {
                cy = if rel { cy + args[0] } else { args[0] };
                out.points.push((cx, cy));
            }
            'C' | 'S' | 'Q' => {
                out.curved = true;
                let pairs = arity / 2;
                for k in 0..pairs {
                    out.points.push((ox + args[2 * k], oy + args[2 * k + 1]));
                }
                cx = ox + args[arity - 2];
                cy = oy + args[arity - 1];
            }
            'A' => {
                out.curved = true;
                cx = ox + args[5];
                cy = oy + args[6];
                out.points.push((cx, cy));
            }
            _ => return None,
        }
    }
    (!out.points.is_empty()).then_some(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Token {
    Cmd(char),
    Num(f64),
}

fn tokenize(d: &str) -> Option<Vec<Token>> {
    let bytes = d.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() || c == ',' {
            i += 1;
        } else if "MmLlHhVvCcSsQqTtAaZz".contains(c) {
            out.push(Token::Cmd(c));
            i += 1;
        } else if c == '-' || c == '+' || c == '.' || c.is_ascii_digit() {
            let start = i;
            i += 1;
            let mut seen_dot = c == '.';
            let mut seen_exp = false;
            while i < bytes.len() {
                let ch = bytes[i] as char;
                if ch.is_ascii_digit() {
                    i += 1;
                } else if ch == '.' && !seen_dot && !seen_exp {
                    seen_dot = true;
                    i += 1;
                } else if (ch == 'e' || ch == 'E') && !seen_exp {
                    seen_exp = true;
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
                        i += 1;
                    }
                } else {
                    break;
                }
            }
            out.push(Token::Num(d[start..i].parse().ok()?));
        } else {
            return None;
        }
    }
    Some(out)
}
