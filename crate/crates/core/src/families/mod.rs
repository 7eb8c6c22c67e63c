//! Constructors for every separable family with constant Gaussian curvature:
//! right cylinders, translation surfaces, axis-parallel surfaces of
//! revolution, the two log/exp branches (generalized cone and generalized
//! cylinder) and the power-law cones.

mod profile;
pub mod random;
mod tabulated;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Ast, ExprError, Func1D, Interval, UnaryOp};
use crate::surface::{Axis, Box3, SeparableSurface};

pub use profile::{
    default_arc_span, rotational_profile, ProfileSample, RotationalProfile, MAX_SLOPE,
    MIN_RADIUS_FRACTION,
};
pub use tabulated::TabulatedFunc1D;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty zero set: {0}")]
    EmptyZeroSet(String),
    #[error("degenerate zero set (only a point): {0}")]
    Degenerate(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Coordinate plane containing a right cylinder's base curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Yz,
    Xz,
}

impl Plane {
    /// The two in-plane axes, in order, and the ruling axis.
    pub fn axes(self) -> (Axis, Axis, Axis) {
        match self {
            Plane::Xy => (Axis::X, Axis::Y, Axis::Z),
            Plane::Yz => (Axis::Y, Axis::Z, Axis::X),
            Plane::Xz => (Axis::X, Axis::Z, Axis::Y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    RightCylinder,
    Translation,
    RotationalParabolic,
    RotationalCgc,
    GeneralizedCone,
    ExpCylinder,
    ConicalPower,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 7] = [
        FamilyTag::RightCylinder,
        FamilyTag::Translation,
        FamilyTag::RotationalParabolic,
        FamilyTag::RotationalCgc,
        FamilyTag::GeneralizedCone,
        FamilyTag::ExpCylinder,
        FamilyTag::ConicalPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::RightCylinder => "right-cylinder",
            FamilyTag::Translation => "translation",
            FamilyTag::RotationalParabolic => "rotational-parabolic",
            FamilyTag::RotationalCgc => "rotational-cgc",
            FamilyTag::GeneralizedCone => "generalized-cone",
            FamilyTag::ExpCylinder => "exp-cylinder",
            FamilyTag::ConicalPower => "conical-power",
        }
    }
}

fn default_chart() -> [i8; 3] {
    [1, 1, -1]
}

/// Parameter record for one classified family.
///
/// JSON form: `{"family": "<tag>", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// `f(s) + g(t) + a = 0` in `plane`; the third coordinate is free.
    RightCylinder {
        f: Func1D,
        g: Func1D,
        a: f64,
        plane: Plane,
    },
    /// `z = a x + g(y)`.
    Translation { a: f64, g: Func1D },
    /// `h(z) = x^2 + y^2 + a x + b y + c`.
    RotationalParabolic { a: f64, b: f64, c: f64, h: Func1D },
    /// Surface of revolution about the z-axis with Gaussian curvature `K`,
    /// meridian through radius `r0` with slope `dr0` at `z = 0`.
    #[serde(rename = "rotational-cgc")]
    RotationalCgc {
        #[serde(rename = "K")]
        curvature: f64,
        r0: f64,
        dr0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arc_span: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
    },
    /// `m3 z + n3 = (m1 x + n1)^p (m2 y + n2)^q` with `q = 1 - p`.
    GeneralizedCone {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
        m: [f64; 3],
        n: [f64; 3],
    },
    /// `n1 e^(m1 x) + n2 e^(m2 y) + n3 e^(m3 z) = 0`.
    ExpCylinder { m: [f64; 3], n: [f64; 3] },
    /// `sum_i (m_i t_i + n_i)^(1/(1-k)) = 0` on the sign chart `chart`
    /// (the sign of `m_i t_i + n_i` per coordinate).
    ConicalPower {
        k: f64,
        m: [f64; 3],
        n: [f64; 3],
        #[serde(default = "default_chart")]
        chart: [i8; 3],
    },
}

fn var_name(axis: Axis) -> &'static str {
    axis.name()
}

fn expect_nonzero(name: &str, v: &[f64]) -> Result<(), FamilyError> {
    if v.iter().all(|x| x.is_finite() && *x != 0.0) {
        Ok(())
    } else {
        Err(FamilyError::InvalidParameter(format!(
            "{name} must be finite and non-zero, got {v:?}"
        )))
    }
}

fn expect_finite(name: &str, v: &[f64]) -> Result<(), FamilyError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(FamilyError::InvalidParameter(format!(
            "{name} must be finite, got {v:?}"
        )))
    }
}

/// `sign * (m t + n) > 0`, as an open interval in `t`.
fn chart_interval(m: f64, n: f64, sign: f64) -> Interval {
    let root = -n / m;
    if m * sign > 0.0 {
        Interval::new(root, f64::INFINITY)
    } else {
        Interval::new(f64::NEG_INFINITY, root)
    }
}

/// `c * (m t + n)` as a tree.
fn affine(m: f64, n: f64) -> Ast {
    Ast::add(Ast::mul(Ast::Const(m), Ast::Var), Ast::Const(n))
}

fn func(ast: Ast, domain: Interval, axis: Axis) -> Func1D {
    Func1D::with_var(crate::expr::simplify(&ast), domain, var_name(axis))
}

/// Coordinate value whose affine image `sign*(m t + n)` equals `b > 0`.
fn chart_coord(m: f64, n: f64, sign: f64, b: f64) -> f64 {
    (sign * b - n) / m
}

fn sorted(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Index of the entry whose sign differs from the other two.
fn odd_one_out(signs: [f64; 3]) -> Option<usize> {
    let pos = signs.iter().filter(|s| **s > 0.0).count();
    match pos {
        1 => signs.iter().position(|s| *s > 0.0),
        2 => signs.iter().position(|s| *s < 0.0),
        _ => None,
    }
}

fn pad(lo: f64, hi: f64, frac: f64) -> (f64, f64) {
    let w = (hi - lo).max(1e-3);
    (lo - frac * w, hi + frac * w)
}

impl FamilySpec {
    pub fn tag(&self) -> FamilyTag {
        match self {
            FamilySpec::RightCylinder { .. } => FamilyTag::RightCylinder,
            FamilySpec::Translation { .. } => FamilyTag::Translation,
            FamilySpec::RotationalParabolic { .. } => FamilyTag::RotationalParabolic,
            FamilySpec::RotationalCgc { .. } => FamilyTag::RotationalCgc,
            FamilySpec::GeneralizedCone { .. } => FamilyTag::GeneralizedCone,
            FamilySpec::ExpCylinder { .. } => FamilyTag::ExpCylinder,
            FamilySpec::ConicalPower { .. } => FamilyTag::ConicalPower,
        }
    }

    pub fn generalized_cone(p: f64, m: [f64; 3], n: [f64; 3]) -> FamilySpec {
        FamilySpec::GeneralizedCone {
            p,
            q: Some(1.0 - p),
            m,
            n,
        }
    }

    pub fn conical_power(k: f64, m: [f64; 3], n: [f64; 3]) -> FamilySpec {
        FamilySpec::ConicalPower {
            k,
            m,
            n,
            chart: default_chart(),
        }
    }

    pub fn rotational_cgc(curvature: f64, r0: f64, dr0: f64) -> FamilySpec {
        FamilySpec::RotationalCgc {
            curvature,
            r0,
            dr0,
            arc_span: None,
            step: None,
        }
    }

    /// Exponent `1/(1-k)` of a power-law cone.
    pub fn conical_exponent(k: f64) -> f64 {
        1.0 / (1.0 - k)
    }

    /// Even integer exponents make every term non-negative: the zero set
    /// collapses to the apex.
    pub fn is_degenerate_exponent(alpha: f64) -> bool {
        let r = alpha.round();
        (alpha - r).abs() <= 1e-9 * alpha.abs().max(1.0) && r % 2.0 == 0.0
    }

    /// Check the parameter invariants without building anything.
    pub fn validate(&self) -> Result<(), FamilyError> {
        match self {
            FamilySpec::RightCylinder { f, g, a, .. } => {
                expect_finite("a", &[*a])?;
                if f.is_constant() || g.is_constant() {
                    return Err(FamilyError::InvalidParameter(
                        "right cylinder base curve needs two non-constant functions".into(),
                    ));
                }
            }
            FamilySpec::Translation { a, .. } => expect_nonzero("a", &[*a])?,
            FamilySpec::RotationalParabolic { a, b, c, h } => {
                expect_finite("a, b, c", &[*a, *b, *c])?;
                if h.is_constant() {
                    return Err(FamilyError::InvalidParameter(
                        "constant h gives a right circular cylinder".into(),
                    ));
                }
            }
            FamilySpec::RotationalCgc {
                curvature, r0, dr0, ..
            } => {
                expect_nonzero("K", &[*curvature])?;
                if !(r0.is_finite() && *r0 > 0.0) {
                    return Err(FamilyError::InvalidParameter("r0 must be positive".into()));
                }
                if !(dr0.abs() < 1.0) {
                    return Err(FamilyError::InvalidParameter(
                        "|dr0| must be below 1".into(),
                    ));
                }
            }
            FamilySpec::GeneralizedCone { p, q, m, n } => {
                expect_finite("p, n", &[*p, n[0], n[1], n[2]])?;
                expect_nonzero("m", m)?;
                if *p == 0.0 || *p == 1.0 {
                    return Err(FamilyError::InvalidParameter(
                        "p and q = 1 - p must both be non-zero".into(),
                    ));
                }
                if let Some(q) = q {
                    if (p + q - 1.0).abs() > 1e-12 {
                        return Err(FamilyError::InvalidParameter(format!(
                            "p + q must equal 1 (p = {p}, q = {q})"
                        )));
                    }
                }
            }
            FamilySpec::ExpCylinder { m, n } => {
                expect_nonzero("m", m)?;
                expect_nonzero("n", n)?;
                if odd_one_out(*n).is_none() {
                    return Err(FamilyError::EmptyZeroSet(
                        "all n have the same sign, the exponential sum never vanishes".into(),
                    ));
                }
            }
            FamilySpec::ConicalPower { k, m, n, chart } => {
                expect_finite("k, n", &[*k, n[0], n[1], n[2]])?;
                expect_nonzero("m", m)?;
                if *k == 0.0 || *k == 1.0 {
                    return Err(FamilyError::InvalidParameter(
                        "k = 0 and k = 1 belong to the log and exp branches".into(),
                    ));
                }
                if chart.iter().any(|s| *s != 1 && *s != -1) {
                    return Err(FamilyError::InvalidParameter(
                        "chart entries must be +1 or -1".into(),
                    ));
                }
                let signs = chart.map(f64::from);
                if odd_one_out(signs).is_none() {
                    return Err(FamilyError::EmptyZeroSet(
                        "all power terms share one sign on this chart".into(),
                    ));
                }
                let alpha = Self::conical_exponent(*k);
                if Self::is_degenerate_exponent(alpha) {
                    return Err(FamilyError::Degenerate(format!(
                        "exponent 1/(1-k) = {alpha} is an even integer"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<SeparableSurface, FamilyError> {
        build_surface(self)
    }

    /// Default sampling box for this family, or the clipped unit box.
    pub fn admissible_box(&self) -> Box3 {
        admissible_box(self)
    }
}

pub fn build_surface(spec: &FamilySpec) -> Result<SeparableSurface, FamilyError> {
    spec.validate()?;
    let line = Interval::REAL_LINE;
    let surface = match spec {
        FamilySpec::RightCylinder { f, g, a, plane } => {
            let (first, second, ruling) = plane.axes();
            let mut parts: [Option<Func1D>; 3] = [None, None, None];
            parts[first.index()] =
                Some(Func1D::with_var(f.ast().clone(), f.domain(), first.name()));
            parts[second.index()] =
                Some(Func1D::with_var(g.ast().clone(), g.domain(), second.name()));
            parts[ruling.index()] = Some(Func1D::with_var(Ast::Const(*a), line, ruling.name()));
            let [x, y, z] = parts.map(|p| p.expect("all three slots filled"));
            SeparableSurface::new(x, y, z)
        }
        FamilySpec::Translation { a, g } => SeparableSurface::new(
            func(Ast::mul(Ast::Const(*a), Ast::Var), line, Axis::X),
            Func1D::with_var(g.ast().clone(), g.domain(), "y"),
            func(Ast::neg(Ast::Var), line, Axis::Z),
        ),
        FamilySpec::RotationalParabolic { a, b, c, h } => {
            let quad = |lin: f64, axis| {
                func(
                    Ast::add(
                        Ast::pow(Ast::Var, Ast::Const(2.0)),
                        Ast::mul(Ast::Const(lin), Ast::Var),
                    ),
                    line,
                    axis,
                )
            };
            SeparableSurface::new(
                quad(*a, Axis::X),
                quad(*b, Axis::Y),
                func(
                    Ast::sub(Ast::Const(*c), h.ast().clone()),
                    h.domain(),
                    Axis::Z,
                ),
            )
        }
        FamilySpec::RotationalCgc {
            curvature,
            r0,
            dr0,
            arc_span,
            step,
        } => {
            let span = arc_span.unwrap_or_else(|| default_arc_span(*curvature));
            let step = step.unwrap_or(DEFAULT_STEP_FRACTION * span);
            let prof = rotational_profile(*curvature, *r0, *dr0, span, step)?;
            let sq = |axis| func(Ast::pow(Ast::Var, Ast::Const(2.0)), line, axis);
            SeparableSurface::new(
                sq(Axis::X),
                sq(Axis::Y),
                crate::surface::SurfaceFn::Tabulated(prof.h),
            )
        }
        FamilySpec::GeneralizedCone { p, m, n, .. } => {
            // f = -p log(m1 x + n1), g = -q log(m2 y + n2), h = log(m3 z + n3)
            let weights = [-p, -(1.0 - p), 1.0];
            let parts = Axis::ALL.map(|axis| {
                let i = axis.index();
                func(
                    Ast::mul(
                        Ast::Const(weights[i]),
                        Ast::unary(UnaryOp::Log, affine(m[i], n[i])),
                    ),
                    chart_interval(m[i], n[i], 1.0),
                    axis,
                )
            });
            let [x, y, z] = parts;
            SeparableSurface::new(x, y, z)
        }
        FamilySpec::ExpCylinder { m, n } => {
            let parts = Axis::ALL.map(|axis| {
                let i = axis.index();
                func(
                    Ast::mul(
                        Ast::Const(n[i]),
                        Ast::unary(UnaryOp::Exp, Ast::mul(Ast::Const(m[i]), Ast::Var)),
                    ),
                    line,
                    axis,
                )
            });
            let [x, y, z] = parts;
            SeparableSurface::new(x, y, z)
        }
        FamilySpec::ConicalPower { k, m, n, chart } => {
            // sign * (sign * (m t + n))^alpha, a real power of a positive base
            let alpha = FamilySpec::conical_exponent(*k);
            let parts = Axis::ALL.map(|axis| {
                let i = axis.index();
                let s = f64::from(chart[i]);
                func(
                    Ast::mul(
                        Ast::Const(s),
                        Ast::pow(affine(s * m[i], s * n[i]), Ast::Const(alpha)),
                    ),
                    chart_interval(m[i], n[i], s),
                    axis,
                )
            });
            let [x, y, z] = parts;
            SeparableSurface::new(x, y, z)
        }
    };
    Ok(surface)
}

/// Default integration step for rotational profiles, as a fraction of the
/// arc span. The interpolated curvature error near the slope limit scales
/// with the fourth power of the step.
pub const DEFAULT_STEP_FRACTION: f64 = 2.5e-4;

/// Positive-chart base range used by the cone-like families.
const BASE_RANGE: (f64, f64) = (0.5, 2.0);

pub fn admissible_box(spec: &FamilySpec) -> Box3 {
    let Ok(surface) = build_surface(spec) else {
        return Box3::cube(-1.0, 1.0);
    };
    let fallback = Box3::cube(-1.0, 1.0).clip_to_domains(&surface);
    let b = match spec {
        FamilySpec::GeneralizedCone { m, n, .. } => {
            let mut b = fallback;
            for axis in Axis::ALL {
                let i = axis.index();
                let (lo, hi) = sorted(
                    chart_coord(m[i], n[i], 1.0, BASE_RANGE.0),
                    chart_coord(m[i], n[i], 1.0, BASE_RANGE.1),
                );
                b = b.with_range(axis, lo, hi);
            }
            b
        }
        FamilySpec::ExpCylinder { m, n } => {
            let odd = odd_one_out(*n).expect("validated");
            let others: Vec<usize> = (0..3).filter(|&i| i != odd).collect();
            // the two same-sign terms range over t in [-1, 1]
            let corner_sums = [-1.0, 1.0]
                .iter()
                .flat_map(|&a| [-1.0, 1.0].map(|b| (a, b)))
                .map(|(a, b)| {
                    n[others[0]].abs() * (m[others[0]] * a).exp()
                        + n[others[1]].abs() * (m[others[1]] * b).exp()
                });
            let (smin, smax) = corner_sums
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s), hi.max(s))
                });
            let t = |s: f64| (s / n[odd].abs()).ln() / m[odd];
            let (lo, hi) = sorted(t(smin), t(smax));
            let (lo, hi) = pad(lo, hi, 0.05);
            Box3::cube(-1.0, 1.0).with_range(Axis::from_index(odd), lo, hi)
        }
        FamilySpec::ConicalPower { k, m, n, chart } => {
            let alpha = FamilySpec::conical_exponent(*k);
            let signs = chart.map(f64::from);
            let odd = odd_one_out(signs).expect("validated");
            let mut b = fallback;
            let mut corner = Vec::new();
            for &b0 in &[BASE_RANGE.0, BASE_RANGE.1] {
                for &b1 in &[BASE_RANGE.0, BASE_RANGE.1] {
                    corner.push((b0.powf(alpha) + b1.powf(alpha)).powf(1.0 / alpha));
                }
            }
            let bmin = corner.iter().cloned().fold(f64::INFINITY, f64::min);
            let bmax = corner.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for axis in Axis::ALL {
                let i = axis.index();
                let (blo, bhi) = if i == odd {
                    // stay strictly inside the chart
                    let (lo, hi) = pad(bmin, bmax, 0.05);
                    (lo.max(0.5 * bmin), hi)
                } else {
                    BASE_RANGE
                };
                let (lo, hi) = sorted(
                    chart_coord(m[i], n[i], signs[i], blo),
                    chart_coord(m[i], n[i], signs[i], bhi),
                );
                b = b.with_range(axis, lo, hi);
            }
            b
        }
        FamilySpec::Translation { a, .. } => {
            let xy = Box3::cube(-1.0, 1.0).clip_to_domains(&surface);
            let mut zmin = f64::INFINITY;
            let mut zmax = f64::NEG_INFINITY;
            let (x0, x1) = xy.range(Axis::X);
            let (y0, y1) = xy.range(Axis::Y);
            for i in 0..=16 {
                for j in 0..=16 {
                    let x = x0 + (x1 - x0) * i as f64 / 16.0;
                    let y = y0 + (y1 - y0) * j as f64 / 16.0;
                    if let Ok(gy) = surface.g.value(y) {
                        let z = a * x + gy;
                        zmin = zmin.min(z);
                        zmax = zmax.max(z);
                    }
                }
            }
            if zmin.is_finite() {
                let (lo, hi) = pad(zmin, zmax, 0.05);
                xy.with_range(Axis::Z, lo, hi)
            } else {
                fallback
            }
        }
        FamilySpec::RotationalParabolic { a, b, c, .. } => {
            let (z0, z1) = fallback.range(Axis::Z);
            let shift = c - (a * a + b * b) / 4.0;
            let mut rmax: f64 = 0.0;
            for i in 0..=64 {
                let z = z0 + (z1 - z0) * i as f64 / 64.0;
                // x^2 + y^2 + ... = h(z) means radius^2 = -h_s(z) - shift
                if let Ok(hz) = surface.h.value(z) {
                    let rho2 = -hz - shift;
                    rmax = rmax.max(rho2.max(0.0).sqrt());
                }
            }
            let w = (1.1 * rmax).max(0.1);
            Box3::new(
                [-a / 2.0 - w, -b / 2.0 - w, z0],
                [-a / 2.0 + w, -b / 2.0 + w, z1],
            )
        }
        FamilySpec::RotationalCgc { .. } => {
            let dom = surface.h.domain();
            let inset = 1e-6 * (dom.hi - dom.lo);
            let mut rmax: f64 = 0.0;
            let n = 64;
            for i in 0..=n {
                let z = dom.lo + inset + (dom.hi - dom.lo - 2.0 * inset) * i as f64 / n as f64;
                if let Ok(hz) = surface.h.value(z) {
                    rmax = rmax.max((-hz).max(0.0).sqrt());
                }
            }
            let w = 1.1 * rmax;
            Box3::new([-w, -w, dom.lo + inset], [w, w, dom.hi - inset])
        }
        FamilySpec::RightCylinder { .. } => fallback,
    };
    if b.is_valid() {
        b
    } else {
        fallback
    }
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 5] = [
    "paper-fig1-left",
    "paper-fig1-middle",
    "paper-fig1-right",
    "unit-sphere",
    "catenoid",
];

/// Sphere `x^2 + y^2 + z^2 = r^2` in the axis-parallel rotational form.
pub fn sphere(r: f64) -> FamilySpec {
    FamilySpec::RotationalParabolic {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        h: Func1D::parse(&format!("{} - z^2", r * r), "z", Interval::REAL_LINE)
            .expect("valid expression"),
    }
}

/// `x^2 + y^2 = cosh(z)^2`, which does not have constant curvature.
pub fn catenoid() -> FamilySpec {
    FamilySpec::RotationalParabolic {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        h: Func1D::parse("cosh(z)^2", "z", Interval::REAL_LINE).expect("valid expression"),
    }
}

pub fn preset(name: &str) -> Option<FamilySpec> {
    let spec = match name {
        "paper-fig1-left" => FamilySpec::generalized_cone(2.0, [1.0; 3], [0.0; 3]),
        "paper-fig1-middle" => FamilySpec::ExpCylinder {
            m: [1.0; 3],
            n: [-1.0, 1.0, 1.0],
        },
        "paper-fig1-right" => FamilySpec::conical_power(2.0, [1.0; 3], [0.0; 3]),
        "unit-sphere" => sphere(1.0),
        "catenoid" => catenoid(),
        _ => return None,
    };
    Some(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfacePoint;

    #[test]
    fn worked_examples_build() {
        let cone = FamilySpec::generalized_cone(2.0, [1.0; 3], [0.0; 3])
            .build()
            .unwrap();
        // -2 log x + log y + log z = 0  <=>  x^2 = y z
        for (x, y) in [(1.0, 1.0), (1.5, 0.7), (0.6, 1.9)] {
            let z: f64 = x * x / y;
            let p = SurfacePoint::new(x, y, z);
            assert!(cone.eval(&p).unwrap().abs() < 1e-14);
        }
        assert_eq!(cone.f.describe(), "-2*log(x)");

        let exp = FamilySpec::ExpCylinder {
            m: [1.0; 3],
            n: [-1.0, 1.0, 1.0],
        }
        .build()
        .unwrap();
        let p = SurfacePoint::new(1.0, 0.0, (1f64.exp() - 1.0).ln());
        assert!(exp.eval(&p).unwrap().abs() < 1e-14);

        let recip = FamilySpec::conical_power(2.0, [1.0; 3], [0.0; 3])
            .build()
            .unwrap();
        // 1/x + 1/y + 1/z = 0 with z < 0
        let p = SurfacePoint::new(1.0, 1.0, -0.5);
        assert!(recip.eval(&p).unwrap().abs() < 1e-14);
        assert!(!recip.h.domain().contains(0.5));
    }

    #[test]
    fn json_round_trip() {
        let spec = FamilySpec::generalized_cone(2.0, [1.0; 3], [0.0; 3]);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            s,
            r#"{"family":"generalized-cone","params":{"p":2.0,"q":-1.0,"m":[1.0,1.0,1.0],"n":[0.0,0.0,0.0]}}"#
        );
        assert_eq!(serde_json::from_str::<FamilySpec>(&s).unwrap(), spec);

        let cgc: FamilySpec = serde_json::from_str(
            r#"{"family":"rotational-cgc","params":{"K":-1,"r0":0.5,"dr0":0}}"#,
        )
        .unwrap();
        assert_eq!(cgc, FamilySpec::rotational_cgc(-1.0, 0.5, 0.0));

        let cyl: FamilySpec = serde_json::from_str(
            r#"{"family":"right-cylinder","params":{"f":{"expr":"x^2"},"g":{"expr":"y^2","var":"y"},"a":-1,"plane":"xy"}}"#,
        )
        .unwrap();
        let s = cyl.build().unwrap();
        assert!(s.h.is_constant());
        assert!(s.eval(&SurfacePoint::new(0.6, 0.8, 123.0)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let empty = FamilySpec::ExpCylinder {
            m: [1.0; 3],
            n: [1.0, 2.0, 3.0],
        };
        assert!(matches!(empty.build(), Err(FamilyError::EmptyZeroSet(_))));
        let point = FamilySpec::conical_power(0.5, [1.0; 3], [0.0; 3]);
        assert!(matches!(point.build(), Err(FamilyError::Degenerate(_))));
        let point = FamilySpec::conical_power(0.75, [1.0; 3], [0.0; 3]);
        assert!(matches!(point.build(), Err(FamilyError::Degenerate(_))));
        let same_chart = FamilySpec::ConicalPower {
            k: 2.0,
            m: [1.0; 3],
            n: [0.0; 3],
            chart: [1, 1, 1],
        };
        assert!(matches!(
            same_chart.build(),
            Err(FamilyError::EmptyZeroSet(_))
        ));
        let bad_q = FamilySpec::GeneralizedCone {
            p: 2.0,
            q: Some(0.0),
            m: [1.0; 3],
            n: [0.0; 3],
        };
        assert!(matches!(
            bad_q.build(),
            Err(FamilyError::InvalidParameter(_))
        ));
        assert!(FamilySpec::generalized_cone(1.0, [1.0; 3], [0.0; 3])
            .build()
            .is_err());
        assert!(FamilySpec::Translation {
            a: 0.0,
            g: Func1D::parse("y^2", "y", Interval::REAL_LINE).unwrap()
        }
        .build()
        .is_err());
        assert!(FamilySpec::rotational_cgc(1.0, 1.0, 1.0).build().is_err());
    }

    #[test]
    fn boxes() {
        let b = FamilySpec::generalized_cone(2.0, [1.0; 3], [0.0; 3]).admissible_box();
        assert_eq!(b, Box3::cube(0.5, 2.0));

        let b = FamilySpec::conical_power(2.0, [1.0; 3], [0.0; 3]).admissible_box();
        assert_eq!(b.range(Axis::X), (0.5, 2.0));
        assert_eq!(b.range(Axis::Y), (0.5, 2.0));
        let (z0, z1) = b.range(Axis::Z);
        assert!(z0 < -1.0 && z1 < -0.1 && z1 > -0.25, "{z0} {z1}");

        let b = FamilySpec::ExpCylinder {
            m: [1.0; 3],
            n: [-1.0, 1.0, 1.0],
        }
        .admissible_box();
        // x = log(e^y + e^z) for y, z in [-1, 1]
        let (x0, x1) = b.range(Axis::X);
        assert!(x0 < (2.0 * (-1f64).exp()).ln() && x1 > (2.0 * 1f64.exp()).ln());
        assert_eq!(b.range(Axis::Y), (-1.0, 1.0));
    }
}
