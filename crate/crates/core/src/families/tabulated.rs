use crate::expr::{ExprError, Interval, Jet3};

use super::FamilyError;

/// Piecewise quintic Hermite interpolant through value, first and second
/// derivative samples. The interpolant is C² across breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFunc1D {
    breakpoints: Vec<f64>,
    jets: Vec<Jet3>,
}

impl TabulatedFunc1D {
    pub fn new(breakpoints: Vec<f64>, jets: Vec<Jet3>) -> Result<TabulatedFunc1D, FamilyError> {
        if breakpoints.len() < 2 || breakpoints.len() != jets.len() {
            return Err(FamilyError::InvalidParameter(format!(
                "tabulation needs at least two nodes with one jet each (got {} nodes, {} jets)",
                breakpoints.len(),
                jets.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(FamilyError::InvalidParameter(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let finite = |j: &Jet3| j.v.is_finite() && j.d1.is_finite() && j.d2.is_finite();
        if !jets.iter().all(finite) || !breakpoints.iter().all(|b| b.is_finite()) {
            return Err(FamilyError::InvalidParameter(
                "non-finite tabulation data".into(),
            ));
        }
        Ok(TabulatedFunc1D { breakpoints, jets })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn node_jets(&self) -> &[Jet3] {
        &self.jets
    }

    /// Open interval between the first and last breakpoint.
    pub fn domain(&self) -> Interval {
        Interval::new(
            self.breakpoints[0],
            self.breakpoints[self.breakpoints.len() - 1],
        )
    }

    pub fn jet3(&self, t: f64) -> Result<Jet3, ExprError> {
        let dom = self.domain();
        if !dom.contains(t) {
            return Err(ExprError::OutsideDomain {
                at: t,
                lo: dom.lo,
                hi: dom.hi,
            });
        }
        let i = self
            .breakpoints
            .partition_point(|&b| b <= t)
            .saturating_sub(1);
        let i = i.min(self.breakpoints.len() - 2);
        let (t0, t1) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let (j0, j1) = (&self.jets[i], &self.jets[i + 1]);
        let dt = t1 - t0;

        // p(s) on s in [0, 1], with derivatives scaled to the unit interval
        let a0 = j0.v;
        let a1 = j0.d1 * dt;
        let a2 = 0.5 * j0.d2 * dt * dt;
        let e0 = j1.v - a0 - a1 - a2;
        let e1 = j1.d1 * dt - a1 - 2.0 * a2;
        let e2 = j1.d2 * dt * dt - 2.0 * a2;
        let a3 = 10.0 * e0 - 4.0 * e1 + 0.5 * e2;
        let a4 = -15.0 * e0 + 7.0 * e1 - e2;
        let a5 = 6.0 * e0 - 3.0 * e1 + 0.5 * e2;

        let s = (t - t0) / dt;
        let v = a0 + s * (a1 + s * (a2 + s * (a3 + s * (a4 + s * a5))));
        let p1 = a1 + s * (2.0 * a2 + s * (3.0 * a3 + s * (4.0 * a4 + s * 5.0 * a5)));
        let p2 = 2.0 * a2 + s * (6.0 * a3 + s * (12.0 * a4 + s * 20.0 * a5));
        let p3 = 6.0 * a3 + s * (24.0 * a4 + s * 60.0 * a5);
        Ok(Jet3 {
            v,
            d1: p1 / dt,
            d2: p2 / (dt * dt),
            d3: p3 / (dt * dt * dt),
        })
    }
}
