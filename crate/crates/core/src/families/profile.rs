//! Profile curves of rotational surfaces with constant Gaussian curvature.
//!
//! With arclength `s`, a meridian `(r(s), z(s))` of a surface of revolution
//! about the z-axis has curvature `K` everywhere iff `r'' = -K r`, with
//! `z' = sqrt(1 - r'^2)`. The curve is integrated with classical RK4 in both
//! directions from `s = 0` and then re-read as `h(z) = -r(z)^2`, which gives
//! the separable form `x^2 + y^2 + h(z) = 0`.

use serde::Serialize;

use crate::expr::Jet3;

use super::{FamilyError, TabulatedFunc1D};

/// Integration stops once `|r'|` exceeds this (the meridian turns horizontal
/// and `r(z)` stops being a graph).
pub const MAX_SLOPE: f64 = 0.98;
/// Integration stops once `r` drops below this fraction of `r0`.
pub const MIN_RADIUS_FRACTION: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub s: f64,
    pub r: f64,
    pub dr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationalProfile {
    pub curvature: f64,
    pub samples: Vec<ProfileSample>,
    /// Set when the curve left the valid region before covering the span.
    pub truncated: bool,
    pub h: TabulatedFunc1D,
}

impl RotationalProfile {
    /// Conserved quantity `r'^2 + K r^2` at every stored node.
    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        let k = self.curvature;
        self.samples
            .iter()
            .map(move |p| p.dr * p.dr + k * p.r * p.r)
    }

    pub fn max_radius(&self) -> f64 {
        self.samples.iter().map(|p| p.r).fold(0.0, f64::max)
    }
}

type State = [f64; 3];

fn rhs(k: f64, st: &State) -> State {
    let [r, dr, _] = *st;
    [dr, -k * r, (1.0 - dr * dr).max(0.0).sqrt()]
}

fn rk4_step(k: f64, st: &State, h: f64) -> State {
    let add = |a: &State, b: &State, c: f64| [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]];
    let k1 = rhs(k, st);
    let k2 = rhs(k, &add(st, &k1, 0.5 * h));
    let k3 = rhs(k, &add(st, &k2, 0.5 * h));
    let k4 = rhs(k, &add(st, &k3, h));
    let mut out = *st;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn is_valid(st: &State, r_min: f64) -> bool {
    st[0] > r_min && st[1].abs() < MAX_SLOPE
}

/// Integrate one direction; returns the nodes after `s = 0` and whether the
/// run was cut short.
fn integrate(
    k: f64,
    start: State,
    half_span: f64,
    step: f64,
    r_min: f64,
) -> (Vec<ProfileSample>, bool) {
    let n = (half_span / step.abs()).ceil().max(1.0) as usize;
    let h = half_span / n as f64 * step.signum();
    let mut st = start;
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let next = rk4_step(k, &st, h);
        if !is_valid(&next, r_min) {
            return (out, true);
        }
        st = next;
        out.push(ProfileSample {
            s: h * i as f64,
            r: st[0],
            dr: st[1],
            z: st[2],
        });
    }
    (out, false)
}

/// Jet of `h(z) = -r(z)^2` from the arclength data at one node.
fn node_jet(k: f64, p: &ProfileSample) -> Jet3 {
    let (r, a) = (p.r, p.dr);
    let b = (1.0 - a * a).sqrt();
    let acc = -k * r;
    // derivatives of r with respect to z
    let r1 = a / b;
    let r2 = acc / b.powi(4);
    let r3 = a * (4.0 * acc * acc - k * b * b) / b.powi(7);
    Jet3 {
        v: -r * r,
        d1: -2.0 * r * r1,
        d2: -2.0 * (r1 * r1 + r * r2),
        d3: -2.0 * (3.0 * r1 * r2 + r * r3),
    }
}

/// Tabulate the constant-curvature profile through `(r0, 0)` with slope `dr0`.
pub fn rotational_profile(
    curvature: f64,
    r0: f64,
    dr0: f64,
    arc_span: f64,
    step: f64,
) -> Result<RotationalProfile, FamilyError> {
    let bad = |msg: &str| Err(FamilyError::InvalidParameter(msg.to_string()));
    if !(curvature.is_finite() && curvature != 0.0) {
        return bad("rotational profile needs a finite non-zero K");
    }
    if !(r0.is_finite() && r0 > 0.0) {
        return bad("rotational profile needs r0 > 0");
    }
    if !(dr0.abs() < MAX_SLOPE) {
        return bad("rotational profile needs |dr0| below the slope limit");
    }
    if !(arc_span.is_finite() && arc_span > 0.0) {
        return bad("arc span must be positive");
    }
    if !(step > 0.0 && step <= 1e-3 * arc_span * (1.0 + 1e-12)) {
        return bad("step must be positive and at most 1e-3 of the arc span");
    }

    let start = [r0, dr0, 0.0];
    let r_min = MIN_RADIUS_FRACTION * r0;
    let (fwd, cut_fwd) = integrate(curvature, start, 0.5 * arc_span, step, r_min);
    let (bwd, cut_bwd) = integrate(curvature, start, 0.5 * arc_span, -step, r_min);

    let mut samples: Vec<ProfileSample> = bwd.into_iter().rev().collect();
    samples.push(ProfileSample {
        s: 0.0,
        r: r0,
        dr: dr0,
        z: 0.0,
    });
    samples.extend(fwd);
    if samples.len() < 3 {
        return Err(FamilyError::EmptyZeroSet(
            "profile leaves the valid region immediately".into(),
        ));
    }

    let zs = samples.iter().map(|p| p.z).collect();
    let jets = samples.iter().map(|p| node_jet(curvature, p)).collect();
    let h = TabulatedFunc1D::new(zs, jets)?;
    Ok(RotationalProfile {
        curvature,
        samples,
        truncated: cut_fwd || cut_bwd,
        h,
    })
}

/// Arc span used when a spec does not give one: long enough that the
/// validity limits, not the span, end the curve in the usual cases.
pub fn default_arc_span(curvature: f64) -> f64 {
    if curvature > 0.0 {
        2.0 * std::f64::consts::PI / curvature.sqrt()
    } else {
        8.0 / (-curvature).sqrt()
    }
}
