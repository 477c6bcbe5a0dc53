//! Planar geometry shared by every stage: axis-aligned boxes and 2D affine
//! transforms.

use serde::{Deserialize, Serialize};

/// Axis-aligned box in pixel space, `y` growing downwards.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl BBox {
    pub const fn new(x: f64, y: f64, width: f64, height: f64) -> Self {
        Self {
            x,
            y,
            width,
            height,
        }
    }

    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        let (l, r) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        let (t, b) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        Self::new(l, t, r - l, b - t)
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    #[inline]
    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    #[inline]
    pub fn center_x(&self) -> f64 {
        self.x + self.width / 2.0
    }

    #[inline]
    pub fn center_y(&self) -> f64 {
        self.y + self.height / 2.0
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::from_corners(
            self.x.min(other.x),
            self.y.min(other.y),
            self.right().max(other.right()),
            self.bottom().max(other.bottom()),
        )
    }

    /// Length of the shared horizontal extent (negative when separated).
    #[inline]
    pub fn x_overlap(&self, other: &BBox) -> f64 {
        self.right().min(other.right()) - self.x.max(other.x)
    }

    /// Length of the shared vertical extent (negative when separated).
    #[inline]
    pub fn y_overlap(&self, other: &BBox) -> f64 {
        self.bottom().min(other.bottom()) - self.y.max(other.y)
    }

    /// Interior intersection: touching edges do not count, nor do
    /// intersections thinner than `tol` in either direction.
    pub fn overlaps(&self, other: &BBox, tol: f64) -> bool {
        self.x_overlap(other) > tol && self.y_overlap(other) > tol
    }

    pub fn contains_point(&self, px: f64, py: f64) -> bool {
        px >= self.x && px <= self.right() && py >= self.y && py <= self.bottom()
    }

    pub fn contains(&self, other: &BBox, tol: f64) -> bool {
        other.x >= self.x - tol
            && other.y >= self.y - tol
            && other.right() <= self.right() + tol
            && other.bottom() <= self.bottom() + tol
    }

    /// Expands the box around its center by `factor` in both dimensions.
    pub fn scaled_about_center(&self, factor: f64) -> BBox {
        let w = self.width * factor;
        let h = self.height * factor;
        BBox::new(self.center_x() - w / 2.0, self.center_y() - h / 2.0, w, h)
    }

    pub fn inset(&self, d: f64) -> BBox {
        let w = (self.width - 2.0 * d).max(0.0);
        let h = (self.height - 2.0 * d).max(0.0);
        BBox::new(self.x + d, self.y + d, w, h)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> BBox {
        BBox::new(self.x + dx, self.y + dy, self.width, self.height)
    }

    /// Bounding box of a non-empty sequence of boxes.
    pub fn enclosing<'a, I: IntoIterator<Item = &'a BBox>>(boxes: I) -> Option<BBox> {
        boxes.into_iter().fold(None, |acc, b| match acc {
            None => Some(*b),
            Some(a) => Some(a.union(b)),
        })
    }
}

/// 2D affine transform `[a c e; b d f; 0 0 1]`, matching SVG's
/// `matrix(a, b, c, d, e, f)` argument order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for AffineMatrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl AffineMatrix {
    pub const IDENTITY: AffineMatrix = AffineMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        e: 0.0,
        f: 0.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self { a, b, c, d, e, f }
    }

    pub const fn translate(tx: f64, ty: f64) -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0, tx, ty)
    }

    pub const fn scale(sx: f64, sy: f64) -> Self {
        Self::new(sx, 0.0, 0.0, sy, 0.0, 0.0)
    }

    /// Rotation by `deg` degrees about the origin.
    pub fn rotate(deg: f64) -> Self {
        let rad = deg.to_radians();
        let (s, c) = (libm::sin(rad), libm::cos(rad));
        Self::new(c, s, -s, c, 0.0, 0.0)
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn then_apply_to(&self, other: &AffineMatrix) -> AffineMatrix {
        AffineMatrix {
            a: self.a * other.a + self.c * other.b,
            b: self.b * other.a + self.d * other.b,
            c: self.a * other.c + self.c * other.d,
            d: self.b * other.c + self.d * other.d,
            e: self.a * other.e + self.c * other.f + self.e,
            f: self.b * other.e + self.d * other.f + self.f,
        }
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.a * x + self.c * y + self.e,
            self.b * x + self.d * y + self.f,
        )
    }

    /// True when the transform maps axis-aligned boxes to axis-aligned boxes
    /// (no rotation or skew beyond multiples of 180 degrees).
    pub fn is_axis_aligned(&self) -> bool {
        const EPS: f64 = 1e-9;
        self.b.abs() < EPS && self.c.abs() < EPS
    }

    pub fn apply_bbox(&self, b: &BBox) -> BBox {
        let (x0, y0) = self.apply(b.x, b.y);
        let (x1, y1) = self.apply(b.right(), b.bottom());
        BBox::from_corners(x0, y0, x1, y1)
    }

    /// Mean absolute scale, used to scale stroke widths and font sizes.
    pub fn mean_scale(&self) -> f64 {
        let sx = libm::hypot(self.a, self.b);
        let sy = libm::hypot(self.c, self.d);
        (sx + sy) / 2.0
    }
}
