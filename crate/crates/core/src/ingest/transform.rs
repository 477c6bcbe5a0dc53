use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::geom::AffineMatrix;

/// Parses an SVG `transform` attribute into the composition of its listed
/// functions, applied right to left as the SVG spec requires.
pub fn parse_transform(s: &str) -> Result<AffineMatrix, String> {
    let mut m = AffineMatrix::IDENTITY;
    let mut rest = s.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
        if rest.is_empty() {
            break;
        }
        let open = rest.find('(').ok_or_else(|| s.to_string())?;
        let close = rest.find(')').ok_or_else(|| s.to_string())?;
        if close < open {
            return Err(s.to_string());
        }
        let name = rest[..open].trim();
        let args = parse_numbers(&rest[open + 1..close]).ok_or_else(|| s.to_string())?;
        let f = match (name, args.as_slice()) {
            ("translate", [tx]) => AffineMatrix::translate(*tx, 0.0),
            ("translate", [tx, ty]) => AffineMatrix::translate(*tx, *ty),
            ("scale", [k]) => AffineMatrix::scale(*k, *k),
            ("scale", [sx, sy]) => AffineMatrix::scale(*sx, *sy),
            ("rotate", [deg]) => AffineMatrix::rotate(*deg),
            ("rotate", [deg, cx, cy]) => AffineMatrix::translate(*cx, *cy)
                .then_apply_to(&AffineMatrix::rotate(*deg))
                .then_apply_to(&AffineMatrix::translate(-cx, -cy)),
            ("matrix", [a, b, c, d, e, f]) => AffineMatrix::new(*a, *b, *c, *d, *e, *f),
            _ => return Err(name.to_string()),
        };
        m = m.then_apply_to(&f);
        rest = &rest[close + 1..];
    }
    Ok(m)
}

/// Splits a list of SVG numbers separated by commas and/or whitespace.
pub fn parse_numbers(s: &str) -> Option<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().ok())
        .collect()
}
