//! Separable surfaces `f(x) + g(y) + h(z) = 0`.

use serde::{Deserialize, Serialize};

use crate::expr::{ExprError, Func1D, Interval, Jet3};
use crate::families::TabulatedFunc1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SurfacePoint {
    pub fn new(x: f64, y: f64, z: f64) -> SurfacePoint {
        SurfacePoint { x, y, z }
    }

    pub fn coord(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn with_coord(mut self, axis: Axis, v: f64) -> SurfacePoint {
        match axis {
            Axis::X => self.x = v,
            Axis::Y => self.y = v,
            Axis::Z => self.z = v,
        }
        self
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> SurfacePoint {
        SurfacePoint::new(a[0], a[1], a[2])
    }
}

/// One of the three single-variable summands: closed form or tabulated.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceFn {
    Expr(Func1D),
    Tabulated(TabulatedFunc1D),
}

impl SurfaceFn {
    pub fn domain(&self) -> Interval {
        match self {
            SurfaceFn::Expr(f) => f.domain(),
            SurfaceFn::Tabulated(t) => t.domain(),
        }
    }

    pub fn value(&self, t: f64) -> Result<f64, ExprError> {
        match self {
            SurfaceFn::Expr(f) => f.value(t),
            SurfaceFn::Tabulated(tab) => tab.jet3(t).map(|j| j.v),
        }
    }

    pub fn slope(&self, t: f64) -> Result<f64, ExprError> {
        match self {
            SurfaceFn::Expr(f) => f.slope(t),
            SurfaceFn::Tabulated(tab) => tab.jet3(t).map(|j| j.d1),
        }
    }

    pub fn jet3(&self, t: f64) -> Result<Jet3, ExprError> {
        match self {
            SurfaceFn::Expr(f) => f.jet3(t),
            SurfaceFn::Tabulated(tab) => tab.jet3(t),
        }
    }

    /// Whether the summand is identically constant (the variable never appears).
    pub fn is_constant(&self) -> bool {
        match self {
            SurfaceFn::Expr(f) => f.is_constant(),
            SurfaceFn::Tabulated(_) => false,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self, SurfaceFn::Tabulated(_))
    }

    /// Printable description: the expression, or a tabulation summary.
    pub fn describe(&self) -> String {
        match self {
            SurfaceFn::Expr(f) => f.source(),
            SurfaceFn::Tabulated(t) => format!(
                "tabulated[{} nodes on ({}, {})]",
                t.breakpoints().len(),
                t.domain().lo,
                t.domain().hi
            ),
        }
    }
}

impl From<Func1D> for SurfaceFn {
    fn from(f: Func1D) -> SurfaceFn {
        SurfaceFn::Expr(f)
    }
}

/// The zero set of `f(x) + g(y) + h(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableSurface {
    pub f: SurfaceFn,
    pub g: SurfaceFn,
    pub h: SurfaceFn,
}

impl SeparableSurface {
    pub fn new(f: impl Into<SurfaceFn>, g: impl Into<SurfaceFn>, h: impl Into<SurfaceFn>) -> Self {
        SeparableSurface {
            f: f.into(),
            g: g.into(),
            h: h.into(),
        }
    }

    /// Build from three expression strings in `x`, `y` and `z`, each on the whole line.
    pub fn from_exprs(f: &str, g: &str, h: &str) -> Result<SeparableSurface, ExprError> {
        Ok(SeparableSurface::new(
            Func1D::parse(f, "x", Interval::REAL_LINE)?,
            Func1D::parse(g, "y", Interval::REAL_LINE)?,
            Func1D::parse(h, "z", Interval::REAL_LINE)?,
        ))
    }

    pub fn component(&self, axis: Axis) -> &SurfaceFn {
        match axis {
            Axis::X => &self.f,
            Axis::Y => &self.g,
            Axis::Z => &self.h,
        }
    }

    pub fn domains(&self) -> [Interval; 3] {
        [self.f.domain(), self.g.domain(), self.h.domain()]
    }

    pub fn contains(&self, p: &SurfacePoint) -> bool {
        Axis::ALL
            .iter()
            .all(|&a| self.component(a).domain().contains(p.coord(a)))
    }

    /// `F(p) = f(x) + g(y) + h(z)`.
    pub fn eval(&self, p: &SurfacePoint) -> Result<f64, ExprError> {
        Ok(self.f.value(p.x)? + self.g.value(p.y)? + self.h.value(p.z)?)
    }

    pub fn jets(&self, p: &SurfacePoint) -> Result<[Jet3; 3], ExprError> {
        Ok([self.f.jet3(p.x)?, self.g.jet3(p.y)?, self.h.jet3(p.z)?])
    }

    pub fn has_tabulated(&self) -> bool {
        Axis::ALL.iter().any(|&a| self.component(a).is_tabulated())
    }

    /// Axis along which to solve for surface points: `z` unless `h` is
    /// constant, then `y`, then `x`.
    pub fn solve_axis(&self) -> Axis {
        [Axis::Z, Axis::Y, Axis::X]
            .into_iter()
            .find(|&a| !self.component(a).is_constant())
            .unwrap_or(Axis::Z)
    }
}

/// Expression triple used to describe ad-hoc surfaces in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExprTriple {
    pub f: String,
    pub g: String,
    pub h: String,
}

impl From<&SeparableSurface> for ExprTriple {
    fn from(s: &SeparableSurface) -> ExprTriple {
        ExprTriple {
            f: s.f.describe(),
            g: s.g.describe(),
            h: s.h.describe(),
        }
    }
}

/// Axis-aligned box `[lo, hi]` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Box3 {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Box3 {
        Box3 { lo, hi }
    }

    pub fn cube(lo: f64, hi: f64) -> Box3 {
        Box3::new([lo; 3], [hi; 3])
    }

    pub fn is_valid(&self) -> bool {
        (0..3).all(|i| self.lo[i].is_finite() && self.hi[i].is_finite() && self.lo[i] < self.hi[i])
    }

    pub fn range(&self, axis: Axis) -> (f64, f64) {
        (self.lo[axis.index()], self.hi[axis.index()])
    }

    pub fn with_range(mut self, axis: Axis, lo: f64, hi: f64) -> Box3 {
        self.lo[axis.index()] = lo;
        self.hi[axis.index()] = hi;
        self
    }

    pub fn contains(&self, p: &SurfacePoint) -> bool {
        let a = p.to_array();
        (0..3).all(|i| a[i] >= self.lo[i] && a[i] <= self.hi[i])
    }

    /// Clip each side to the open domain of the matching summand, pulling
    /// finite domain ends inward by a relative margin.
    pub fn clip_to_domains(&self, surface: &SeparableSurface) -> Box3 {
        let mut out = *self;
        for axis in Axis::ALL {
            let d = surface.component(axis).domain();
            let i = axis.index();
            if d.lo.is_finite() {
                out.lo[i] = out.lo[i].max(d.lo + 1e-9 * (1.0 + d.lo.abs()));
            }
            if d.hi.is_finite() {
                out.hi[i] = out.hi[i].min(d.hi - 1e-9 * (1.0 + d.hi.abs()));
            }
        }
        out
    }

    /// Parse `"x0,x1,y0,y1,z0,z1"`.
    pub fn parse(src: &str) -> Result<Box3, String> {
        let vals: Vec<f64> = src
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad box value `{}`: {e}", s.trim()))
            })
            .collect::<Result<_, _>>()?;
        if vals.len() != 6 {
            return Err(format!(
                "box needs 6 comma-separated values, got {}",
                vals.len()
            ));
        }
        let b = Box3::new([vals[0], vals[2], vals[4]], [vals[1], vals[3], vals[5]]);
        if !b.is_valid() {
            return Err("box bounds must be finite with lo < hi on every axis".into());
        }
        Ok(b)
    }
}
