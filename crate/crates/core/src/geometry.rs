//! Gaussian curvature of implicit and separable surfaces, and the
//! change-of-variables quantities `u = f(x)`, `X = f'(x)^2`, `X'(u) = 2 f''(x)`.
//!
//! Curvature is computed from the gradient and the cofactor expansion of the
//! Hessian,
//!
//! ```text
//! K |grad F|^4 = grad F^T . cof(Hess F) . grad F
//! ```
//!
//! which for `F = f(x) + g(y) + h(z)` collapses to
//! `K (f'^2 + g'^2 + h'^2)^2 = f'^2 g'' h'' + g'^2 f'' h'' + h'^2 f'' g''`.
//! Both expressions are even in `grad F`, so no choice of normal is involved.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::expr::{ExprError, Jet3};
use crate::surface::{Axis, SeparableSurface, SurfacePoint};

/// Points with `|grad F|` at or below this are treated as singular.
pub const REGULARITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("singular point: |grad F| = {grad_norm:e} is below the regularity threshold")]
    Singular { grad_norm: f64 },
    #[error("rotation is not orthogonal (|R^T R - I| = {deviation:e})")]
    NonOrthogonal { deviation: f64 },
    #[error("no nearby preimage of {target} along the {axis:?} summand")]
    NoPreimage { axis: Axis, target: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Value, gradient and Hessian of a trivariate function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitJet2 {
    pub value: f64,
    pub grad: Vector3<f64>,
    pub hess: Matrix3<f64>,
}

impl ImplicitJet2 {
    /// Jet of `lambda * F`.
    pub fn scaled(&self, lambda: f64) -> ImplicitJet2 {
        ImplicitJet2 {
            value: lambda * self.value,
            grad: self.grad * lambda,
            hess: self.hess * lambda,
        }
    }
}

pub fn implicit_jet(
    surface: &SeparableSurface,
    p: &SurfacePoint,
) -> Result<ImplicitJet2, GeometryError> {
    let [f, g, h] = surface.jets(p)?;
    Ok(ImplicitJet2 {
        value: f.v + g.v + h.v,
        grad: Vector3::new(f.d1, g.d1, h.d1),
        hess: Matrix3::from_diagonal(&Vector3::new(f.d2, g.d2, h.d2)),
    })
}

fn check_regular(grad_sq: f64) -> Result<(), GeometryError> {
    if grad_sq.sqrt() <= REGULARITY_EPS {
        Err(GeometryError::Singular {
            grad_norm: grad_sq.sqrt(),
        })
    } else {
        Ok(())
    }
}

/// Gaussian curvature of the level set through the jet's point, valid for an
/// arbitrary symmetric Hessian.
pub fn gauss_curvature_implicit(jet: &ImplicitJet2) -> Result<f64, GeometryError> {
    let (fx, fy, fz) = (jet.grad[0], jet.grad[1], jet.grad[2]);
    let h = &jet.hess;
    let (fxx, fyy, fzz) = (h[(0, 0)], h[(1, 1)], h[(2, 2)]);
    let (fxy, fxz, fyz) = (h[(0, 1)], h[(0, 2)], h[(1, 2)]);

    let grad_sq = fx * fx + fy * fy + fz * fz;
    check_regular(grad_sq)?;

    let numerator = fx * fx * (fyy * fzz - fyz * fyz)
        + fy * fy * (fzz * fxx - fxz * fxz)
        + fz * fz * (fxx * fyy - fxy * fxy)
        - 2.0 * fx * fy * (fxy * fzz - fyz * fxz)
        - 2.0 * fy * fz * (fyz * fxx - fxz * fxy)
        - 2.0 * fx * fz * (fxz * fyy - fxy * fyz);
    Ok(numerator / (grad_sq * grad_sq))
}

/// Gaussian curvature from the three one-variable jets.
pub fn gauss_curvature_from_jets(jets: &[Jet3; 3]) -> Result<f64, GeometryError> {
    let [f, g, h] = jets;
    let (f1s, g1s, h1s) = (f.d1 * f.d1, g.d1 * g.d1, h.d1 * h.d1);
    let grad_sq = f1s + g1s + h1s;
    check_regular(grad_sq)?;
    let numerator = f1s * g.d2 * h.d2 + g1s * f.d2 * h.d2 + h1s * f.d2 * g.d2;
    Ok(numerator / (grad_sq * grad_sq))
}

pub fn gauss_curvature_separable(
    surface: &SeparableSurface,
    p: &SurfacePoint,
) -> Result<f64, GeometryError> {
    gauss_curvature_from_jets(&surface.jets(p)?)
}

/// Change-of-variables data at a surface point.
///
/// `kappa_*` is `(X/X')'` evaluated through the chain rule,
/// `1 - f' f''' / (2 f''^2)`; it is `None` where the second derivative
/// vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UVWState {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    #[serde(rename = "X")]
    pub x_sq: f64,
    #[serde(rename = "Y")]
    pub y_sq: f64,
    #[serde(rename = "Z")]
    pub z_sq: f64,
    #[serde(rename = "dX")]
    pub dx: f64,
    #[serde(rename = "dY")]
    pub dy: f64,
    #[serde(rename = "dZ")]
    pub dz: f64,
    pub kappa_x: Option<f64>,
    pub kappa_y: Option<f64>,
    pub kappa_z: Option<f64>,
}

/// `(X/X')'` for one summand, absent when `f'' = 0`.
pub fn branch_kappa(j: &Jet3) -> Option<f64> {
    if j.d2 == 0.0 {
        return None;
    }
    let k = 1.0 - j.d1 * j.d3 / (2.0 * j.d2 * j.d2);
    k.is_finite().then_some(k)
}

impl UVWState {
    pub fn from_jets(jets: &[Jet3; 3]) -> UVWState {
        let [f, g, h] = jets;
        UVWState {
            u: f.v,
            v: g.v,
            w: h.v,
            x_sq: f.d1 * f.d1,
            y_sq: g.d1 * g.d1,
            z_sq: h.d1 * h.d1,
            dx: 2.0 * f.d2,
            dy: 2.0 * g.d2,
            dz: 2.0 * h.d2,
            kappa_x: branch_kappa(f),
            kappa_y: branch_kappa(g),
            kappa_z: branch_kappa(h),
        }
    }

    pub fn squares(&self) -> [f64; 3] {
        [self.x_sq, self.y_sq, self.z_sq]
    }

    pub fn slopes(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn kappas(&self) -> [Option<f64>; 3] {
        [self.kappa_x, self.kappa_y, self.kappa_z]
    }

    /// `XY'Z' + YX'Z' + ZX'Y' - 4K(X+Y+Z)^2`, unnormalized.
    pub fn k2_defect(&self, k: f64) -> f64 {
        let s = self.x_sq + self.y_sq + self.z_sq;
        self.x_sq * self.dy * self.dz
            + self.y_sq * self.dx * self.dz
            + self.z_sq * self.dx * self.dy
            - 4.0 * k * s * s
    }
}

pub fn uvw_state(surface: &SeparableSurface, p: &SurfacePoint) -> Result<UVWState, GeometryError> {
    Ok(UVWState::from_jets(&surface.jets(p)?))
}

/// Curvature identity residual normalized by `max(1, (X+Y+Z)^2)`.
pub fn k2_residual(state: &UVWState, k: f64) -> f64 {
    let s = state.x_sq + state.y_sq + state.z_sq;
    state.k2_defect(k) / (s * s).max(1.0)
}

/// Rigid motion `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidMotion {
    pub const ORTHOGONALITY_TOL: f64 = 1e-12;

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        let deviation = (rotation.transpose() * rotation - Matrix3::identity()).amax();
        if deviation > Self::ORTHOGONALITY_TOL {
            return Err(GeometryError::NonOrthogonal { deviation });
        }
        Ok(RigidMotion {
            rotation,
            translation,
        })
    }

    pub fn identity() -> RigidMotion {
        RigidMotion {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn inverse_apply(&self, q: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.transpose() * (q - self.translation)
    }
}

/// Jet of `F o T` at the point mapped to the original jet's point.
pub fn transform_jet(jet: &ImplicitJet2, motion: &RigidMotion) -> ImplicitJet2 {
    let r = &motion.rotation;
    ImplicitJet2 {
        value: jet.value,
        grad: r.transpose() * jet.grad,
        hess: r.transpose() * jet.hess * r,
    }
}

/// Invert a summand near `start`: find `t` with `fun(t) = target` by Newton steps.
fn invert_near(
    surface: &SeparableSurface,
    axis: Axis,
    start: f64,
    target: f64,
) -> Result<f64, GeometryError> {
    let comp = surface.component(axis);
    let mut t = start;
    for _ in 0..60 {
        let j = comp.jet3(t)?;
        if j.d1 == 0.0 {
            return Err(GeometryError::Singular { grad_norm: 0.0 });
        }
        let step = (j.v - target) / j.d1;
        t -= step;
        if step.abs() <= 1e-15 * (1.0 + t.abs()) {
            break;
        }
    }
    let residual = comp.value(t)? - target;
    if residual.abs() > 1e-12 * (1.0 + target.abs()) {
        return Err(GeometryError::NoPreimage { axis, target });
    }
    Ok(t)
}

/// Finite-difference probe of `Q_u - Q_v` and `Q_v - Q_w` for
/// `Q = XY'Z' + YX'Z' + ZX'Y' - 4K(X+Y+Z)^2`, moving along the plane
/// `u + v + w = 0` (so along the surface) with step `delta` in `(u, v, w)`.
pub fn lemma1_defects(
    surface: &SeparableSurface,
    p: &SurfacePoint,
    k: f64,
    delta: f64,
) -> Result<(f64, f64), GeometryError> {
    let base = surface.jets(p)?;
    let q_at = |shift: [f64; 3]| -> Result<f64, GeometryError> {
        let mut q = *p;
        for axis in Axis::ALL {
            let i = axis.index();
            if shift[i] != 0.0 {
                let t = invert_near(surface, axis, p.coord(axis), base[i].v + shift[i])?;
                q = q.with_coord(axis, t);
            }
        }
        Ok(uvw_state(surface, &q)?.k2_defect(k))
    };
    let uv = (q_at([delta, -delta, 0.0])? - q_at([-delta, delta, 0.0])?) / (2.0 * delta);
    let vw = (q_at([0.0, delta, -delta])? - q_at([0.0, -delta, delta])?) / (2.0 * delta);
    Ok((uv, vw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Func1D, Interval};

    fn positive() -> Interval {
        Interval::new(0.0, f64::INFINITY)
    }

    fn unit_sphere() -> SeparableSurface {
        SeparableSurface::from_exprs("x^2", "y^2", "z^2 - 1").unwrap()
    }

    fn cone_log_form() -> SeparableSurface {
        SeparableSurface::new(
            Func1D::parse("-2*log(x)", "x", positive()).unwrap(),
            Func1D::parse("log(y)", "y", positive()).unwrap(),
            Func1D::parse("log(z)", "z", positive()).unwrap(),
        )
    }

    #[test]
    fn jet_examples() {
        let j = implicit_jet(&unit_sphere(), &SurfacePoint::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.grad, Vector3::new(2.0, 0.0, 0.0));
        assert_eq!(j.hess, Matrix3::from_diagonal_element(2.0));
        assert_eq!(gauss_curvature_implicit(&j).unwrap(), 1.0);

        let j = implicit_jet(&cone_log_form(), &SurfacePoint::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.grad, Vector3::new(-2.0, 1.0, 1.0));
        assert_eq!(
            j.hess,
            Matrix3::from_diagonal(&Vector3::new(2.0, -1.0, -1.0))
        );
        assert_eq!(gauss_curvature_implicit(&j).unwrap(), 0.0);

        let plane = SeparableSurface::from_exprs("x", "y", "z").unwrap();
        let j = implicit_jet(&plane, &SurfacePoint::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(j.grad, Vector3::new(1.0, 1.0, 1.0));
        assert_eq!(j.hess, Matrix3::zeros());
        assert_eq!(gauss_curvature_implicit(&j).unwrap(), 0.0);
    }

    #[test]
    fn separable_examples() {
        for r in [0.5_f64, 1.0, 2.0] {
            let s =
                SeparableSurface::from_exprs("x^2", "y^2", &format!("z^2 - {}", r * r)).unwrap();
            let p = SurfacePoint::new(r * 0.6, 0.0, r * 0.8);
            let k = gauss_curvature_separable(&s, &p).unwrap();
            assert!((k - 1.0 / (r * r)).abs() < 1e-14);
        }
        let k =
            gauss_curvature_separable(&cone_log_form(), &SurfacePoint::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(k, 0.0);
        let exp_cyl = SeparableSurface::from_exprs("-exp(x)", "exp(y)", "exp(z)").unwrap();
        let k =
            gauss_curvature_separable(&exp_cyl, &SurfacePoint::new(2f64.ln(), 0.0, 0.0)).unwrap();
        assert!(k.abs() < 1e-15);
    }

    #[test]
    fn singular_point_rejected() {
        let s = unit_sphere();
        let err = gauss_curvature_separable(&s, &SurfacePoint::new(0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, GeometryError::Singular { .. }));
    }

    #[test]
    fn kappa_examples() {
        let st = uvw_state(
            &cone_log_form(),
            &SurfacePoint::new(1.3, 0.8, 1.3 * 1.3 / 0.8),
        )
        .unwrap();
        for k in st.kappas() {
            assert!(k.unwrap().abs() < 1e-14);
        }
        let exp_cyl = SeparableSurface::from_exprs("-exp(x)", "exp(y)", "exp(z)").unwrap();
        let st = uvw_state(
            &exp_cyl,
            &SurfacePoint::new(1.0, 0.0, (1f64.exp() - 1.0).ln()),
        )
        .unwrap();
        for k in st.kappas() {
            assert!((k.unwrap() - 0.5).abs() < 1e-14);
        }
        let recip = SeparableSurface::from_exprs("x^-1", "y^-1", "z^-1").unwrap();
        let st = uvw_state(&recip, &SurfacePoint::new(1.0, 1.0, -0.5)).unwrap();
        for k in st.kappas() {
            assert!((k.unwrap() - 0.25).abs() < 1e-14);
        }
        let translation = SeparableSurface::from_exprs("x", "y^2", "-z").unwrap();
        let st = uvw_state(&translation, &SurfacePoint::new(0.5, 0.5, 0.75)).unwrap();
        assert_eq!(st.kappa_x, None);
        assert_eq!(st.kappa_z, None);
    }

    #[test]
    fn k2_residual_examples() {
        let st = uvw_state(&unit_sphere(), &SurfacePoint::new(0.36, 0.48, 0.8)).unwrap();
        assert!(k2_residual(&st, 1.0).abs() < 1e-10);
        let st = uvw_state(&cone_log_form(), &SurfacePoint::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(k2_residual(&st, 0.0), 0.0);
        let st = UVWState {
            u: 0.0,
            v: 0.0,
            w: 0.0,
            x_sq: 1.0,
            y_sq: 1.0,
            z_sq: 1.0,
            dx: 0.0,
            dy: 0.0,
            dz: 0.0,
            kappa_x: None,
            kappa_y: None,
            kappa_z: None,
        };
        assert_eq!(k2_residual(&st, 1.0), -4.0);
    }

    #[test]
    fn transform_examples() {
        let j = implicit_jet(&cone_log_form(), &SurfacePoint::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(transform_jet(&j, &RigidMotion::identity()), j);

        let rot = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let m = RigidMotion::new(rot, Vector3::new(1.0, 2.0, 3.0)).unwrap();
        let t = transform_jet(&j, &m);
        assert_eq!(
            t.hess,
            Matrix3::from_diagonal(&Vector3::new(-1.0, 2.0, -1.0))
        );

        let sphere = implicit_jet(&unit_sphere(), &SurfacePoint::new(0.6, 0.0, 0.8)).unwrap();
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        let m = RigidMotion::new(rot, Vector3::zeros()).unwrap();
        let k = gauss_curvature_implicit(&transform_jet(&sphere, &m)).unwrap();
        assert!((k - 1.0).abs() < 1e-14);

        let skew = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            RigidMotion::new(skew, Vector3::zeros()),
            Err(GeometryError::NonOrthogonal { .. })
        ));
    }

    #[test]
    fn lemma1_on_sphere() {
        let p = SurfacePoint::new(0.36, 0.48, 0.8);
        let (uv, vw) = lemma1_defects(&unit_sphere(), &p, 1.0, 1e-4).unwrap();
        assert!(uv.abs() < 1e-9 && vw.abs() < 1e-9, "{uv} {vw}");
        // the catenoid has no constant K, so Q moves along the surface
        let catenoid = SeparableSurface::from_exprs("x^2", "y^2", "-cosh(z)^2").unwrap();
        let z: f64 = 0.7;
        let r = z.cosh();
        let p = SurfacePoint::new(r * 0.6, r * 0.8, z);
        let k = gauss_curvature_separable(&catenoid, &p).unwrap();
        let (uv, vw) = lemma1_defects(&catenoid, &p, k, 1e-4).unwrap();
        assert!(uv.abs().max(vw.abs()) > 1e-3, "{uv} {vw}");
    }
}
