//! Curvature constancy checks, structural evidence from the `(u, v, w)`
//! quantities, and classification into the flat and constant-curvature
//! separable families.

mod suite;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{gauss_curvature_from_jets, UVWState};
use crate::surface::{Axis, SeparableSurface, SurfacePoint};

pub use suite::{catalog, run_theorem_suite, CatalogEntry, CheckResult, Suite, TheoremCheckReport};

/// Fewest regular points accepted by the checks.
pub const MIN_POINTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("too few regular points: need {needed}, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("all {0} sample points are singular or unevaluable")]
    AllSingular(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub constancy: f64,
    pub structure: f64,
    pub kappa: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            constancy: 1e-8,
            structure: 1e-7,
            kappa: 1e-6,
        }
    }
}

impl Tolerances {
    /// Defaults, with the constancy tolerance loosened to `1e-4` when a
    /// summand is tabulated.
    pub fn for_surface(surface: &SeparableSurface) -> Tolerances {
        let mut t = Tolerances::default();
        if surface.has_tabulated() {
            t.constancy = 1e-4;
        }
        t
    }

    pub fn scaled(&self, factor: f64) -> Tolerances {
        Tolerances {
            constancy: self.constancy * factor,
            structure: self.structure * factor,
            kappa: self.kappa * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyReport {
    pub n_samples: usize,
    pub n_singular: usize,
    #[serde(rename = "K_mean")]
    pub k_mean: f64,
    #[serde(rename = "K_max_dev")]
    pub k_max_dev: f64,
    pub is_constant: bool,
    pub is_zero: bool,
    pub tol: f64,
}

/// Regular points with their jets-derived state and curvature.
struct Regular {
    states: Vec<UVWState>,
    curvatures: Vec<f64>,
    n_singular: usize,
}

fn regular_points(
    surface: &SeparableSurface,
    points: &[SurfacePoint],
) -> Result<Regular, VerifyError> {
    let mut states = Vec::with_capacity(points.len());
    let mut curvatures = Vec::with_capacity(points.len());
    for p in points {
        let Ok(jets) = surface.jets(p) else { continue };
        let Ok(k) = gauss_curvature_from_jets(&jets) else {
            continue;
        };
        states.push(UVWState::from_jets(&jets));
        curvatures.push(k);
    }
    let n_singular = points.len() - states.len();
    if states.is_empty() && !points.is_empty() {
        return Err(VerifyError::AllSingular(points.len()));
    }
    if states.len() < MIN_POINTS {
        return Err(VerifyError::TooFewPoints {
            needed: MIN_POINTS,
            found: states.len(),
        });
    }
    Ok(Regular {
        states,
        curvatures,
        n_singular,
    })
}

fn constancy_of(curvatures: &[f64], n_singular: usize, tol: f64) -> ConstancyReport {
    let n = curvatures.len();
    let mean = curvatures.iter().sum::<f64>() / n as f64;
    let max_dev = curvatures
        .iter()
        .map(|k| (k - mean).abs())
        .fold(0.0, f64::max);
    let is_constant = max_dev <= tol * (1.0 + mean.abs());
    ConstancyReport {
        n_samples: n,
        n_singular,
        k_mean: mean,
        k_max_dev: max_dev,
        is_constant,
        is_zero: is_constant && mean.abs() <= tol,
        tol,
    }
}

#[allow(non_snake_case)]
pub fn check_constant_K(
    surface: &SeparableSurface,
    points: &[SurfacePoint],
    tol: f64,
) -> Result<ConstancyReport, VerifyError> {
    let reg = regular_points(surface, points)?;
    Ok(constancy_of(&reg.curvatures, reg.n_singular, tol))
}

/// Axis pairs in the order `(x, y)`, `(y, z)`, `(x, z)`.
pub const PAIRS: [(Axis, Axis); 3] = [(Axis::X, Axis::Y), (Axis::Y, Axis::Z), (Axis::X, Axis::Z)];

/// Maxima over the samples of the quantities that separate the branches.
///
/// All magnitudes are relative: `square_share[i]` is `X_i / (X + Y + Z)`,
/// while `slope_magnitude[i]` and `slope_gap[j]` are divided by
/// `1 + |X'| + |Y'| + |Z'|` at each point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureEvidence {
    pub n_samples: usize,
    pub square_share: [f64; 3],
    pub square_zero: [bool; 3],
    pub slope_magnitude: [f64; 3],
    pub slope_zero: [bool; 3],
    pub slope_gap: [f64; 3],
    pub slope_equal: [bool; 3],
    pub kappa_samples: usize,
    pub kappa_estimate: Option<f64>,
    pub kappa_agreement: Option<f64>,
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

fn evidence_of(states: &[UVWState], tols: &Tolerances) -> StructureEvidence {
    let mut share = [0.0f64; 3];
    let mut slope = [0.0f64; 3];
    let mut gap = [0.0f64; 3];
    let mut kappas = Vec::new();
    for st in states {
        let sq = st.squares();
        let total: f64 = sq.iter().sum();
        let d = st.slopes();
        let scale = 1.0 + d.iter().map(|v| v.abs()).sum::<f64>();
        for i in 0..3 {
            share[i] = share[i].max(sq[i] / total);
            slope[i] = slope[i].max(d[i].abs() / scale);
        }
        for (j, (a, b)) in PAIRS.iter().enumerate() {
            gap[j] = gap[j].max((d[a.index()] - d[b.index()]).abs() / scale);
        }
        kappas.extend(st.kappas().into_iter().flatten());
    }
    let agreement = if kappas.is_empty() {
        None
    } else {
        let lo = kappas.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = kappas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(hi - lo)
    };
    let n_kappa = kappas.len();
    StructureEvidence {
        n_samples: states.len(),
        square_share: share,
        square_zero: share.map(|s| s <= tols.structure),
        slope_magnitude: slope,
        slope_zero: slope.map(|s| s <= tols.structure),
        slope_gap: gap,
        slope_equal: gap.map(|s| s <= tols.structure),
        kappa_samples: n_kappa,
        kappa_estimate: median(&mut kappas),
        kappa_agreement: agreement,
    }
}

pub fn estimate_structure(
    surface: &SeparableSurface,
    points: &[SurfacePoint],
    tols: &Tolerances,
) -> Result<StructureEvidence, VerifyError> {
    let reg = regular_points(surface, points)?;
    Ok(evidence_of(&reg.states, tols))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    RightCylinder,
    Translation,
    RotationalFlat,
    GeneralizedCone,
    ExpCylinder,
    ConicalPower,
    RotationalCgc,
    NotConstantCurvature,
    /// Flat, none of the degenerate cases, and no common branch constant.
    #[serde(rename = "contradiction-with-theorem-1")]
    ContradictionWithTheorem1,
    /// Non-zero constant curvature without the rotational structure.
    #[serde(rename = "contradiction-with-theorem-2")]
    ContradictionWithTheorem2,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::RightCylinder => "right-cylinder",
            Label::Translation => "translation",
            Label::RotationalFlat => "rotational-flat",
            Label::GeneralizedCone => "generalized-cone",
            Label::ExpCylinder => "exp-cylinder",
            Label::ConicalPower => "conical-power",
            Label::RotationalCgc => "rotational-cgc",
            Label::NotConstantCurvature => "not-constant-curvature",
            Label::ContradictionWithTheorem1 => "contradiction-with-theorem-1",
            Label::ContradictionWithTheorem2 => "contradiction-with-theorem-2",
        }
    }

    pub fn is_contradiction(self) -> bool {
        matches!(
            self,
            Label::ContradictionWithTheorem1 | Label::ContradictionWithTheorem2
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub label: Label,
    pub params: BTreeMap<String, f64>,
    pub evidence: StructureEvidence,
    pub constancy: ConstancyReport,
}

fn axis_param(params: &mut BTreeMap<String, f64>, axis: Axis) {
    params.insert("axis".into(), axis.index() as f64);
}

fn decide(
    constancy: &ConstancyReport,
    ev: &StructureEvidence,
    tols: &Tolerances,
) -> (Label, BTreeMap<String, f64>) {
    let mut params = BTreeMap::new();
    if !constancy.is_constant {
        return (Label::NotConstantCurvature, params);
    }
    let equal_pair = PAIRS
        .iter()
        .zip(ev.slope_equal)
        .find(|(_, eq)| *eq)
        .map(|((a, b), _)| {
            Axis::ALL
                .into_iter()
                .find(|c| c != a && c != b)
                .expect("third axis")
        });
    if !constancy.is_zero {
        params.insert("K".into(), constancy.k_mean);
        return match equal_pair {
            Some(axis) => {
                axis_param(&mut params, axis);
                (Label::RotationalCgc, params)
            }
            None => (Label::ContradictionWithTheorem2, params),
        };
    }
    if let Some(i) = ev.square_zero.iter().position(|&z| z) {
        axis_param(&mut params, Axis::from_index(i));
        return (Label::RightCylinder, params);
    }
    if let Some(i) = ev.slope_zero.iter().position(|&z| z) {
        axis_param(&mut params, Axis::from_index(i));
        return (Label::Translation, params);
    }
    if let Some(axis) = equal_pair {
        axis_param(&mut params, axis);
        return (Label::RotationalFlat, params);
    }
    let (Some(kappa), Some(spread)) = (ev.kappa_estimate, ev.kappa_agreement) else {
        return (Label::ContradictionWithTheorem1, params);
    };
    params.insert("kappa".into(), kappa);
    if spread > tols.kappa {
        return (Label::ContradictionWithTheorem1, params);
    }
    if kappa.abs() <= tols.kappa {
        params.insert("k".into(), 0.0);
        (Label::GeneralizedCone, params)
    } else if (kappa - 0.5).abs() <= tols.kappa {
        params.insert("k".into(), 1.0);
        (Label::ExpCylinder, params)
    } else {
        params.insert("k".into(), 1.0 / (2.0 * kappa));
        (Label::ConicalPower, params)
    }
}

pub fn classify(
    surface: &SeparableSurface,
    points: &[SurfacePoint],
    tols: &Tolerances,
) -> Result<ClassificationResult, VerifyError> {
    let reg = regular_points(surface, points)?;
    let constancy = constancy_of(&reg.curvatures, reg.n_singular, tols.constancy);
    let evidence = evidence_of(&reg.states, tols);
    let (label, params) = decide(&constancy, &evidence, tols);
    Ok(ClassificationResult {
        label,
        params,
        evidence,
        constancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{catenoid, preset, sphere, FamilySpec};
    use crate::sampler::sample_n;

    fn points_of(spec: &FamilySpec, n: usize) -> (SeparableSurface, Vec<SurfacePoint>) {
        let s = spec.build().unwrap();
        let pts = sample_n(&s, spec.admissible_box(), n, 3);
        assert!(pts.len() >= n, "{} points", pts.len());
        (s, pts)
    }

    #[test]
    fn constancy_examples() {
        let (s, p) = points_of(&preset("paper-fig1-left").unwrap(), 200);
        assert!(check_constant_K(&s, &p, 1e-8).unwrap().is_zero);

        let (s, p) = points_of(&sphere(1.0), 200);
        let r = check_constant_K(&s, &p, 1e-8).unwrap();
        assert!(r.is_constant && !r.is_zero);
        assert!((r.k_mean - 1.0).abs() < 1e-9);

        let (s, p) = points_of(&catenoid(), 200);
        assert!(!check_constant_K(&s, &p, 1e-8).unwrap().is_constant);

        assert!(matches!(
            check_constant_K(&s, &p[..10], 1e-8),
            Err(VerifyError::TooFewPoints { found: 10, .. })
        ));
    }

    #[test]
    fn structure_examples() {
        let tols = Tolerances::default();
        let g = crate::expr::Func1D::parse("y^2", "y", crate::expr::Interval::REAL_LINE).unwrap();
        let (s, p) = points_of(&FamilySpec::Translation { a: 1.0, g }, 100);
        let ev = estimate_structure(&s, &p, &tols).unwrap();
        assert_eq!(ev.slope_zero, [true, false, true]);

        let (s, p) = points_of(&sphere(1.0), 100);
        let ev = estimate_structure(&s, &p, &tols).unwrap();
        assert_eq!(ev.slope_equal, [true; 3]);

        let (s, p) = points_of(&preset("paper-fig1-middle").unwrap(), 100);
        let ev = estimate_structure(&s, &p, &tols).unwrap();
        assert!((ev.kappa_estimate.unwrap() - 0.5).abs() < 1e-12);
        assert!(ev.kappa_agreement.unwrap() <= 1e-9);
    }

    #[test]
    fn classify_examples() {
        let tols = Tolerances::default();
        let (s, p) = points_of(&preset("paper-fig1-left").unwrap(), 100);
        assert_eq!(
            classify(&s, &p, &tols).unwrap().label,
            Label::GeneralizedCone
        );

        let (s, p) = points_of(&sphere(1.0), 100);
        let r = classify(&s, &p, &tols).unwrap();
        assert_eq!(r.label, Label::RotationalCgc);
        assert!((r.params["K"] - 1.0).abs() < 1e-9);

        let (s, p) = points_of(&preset("paper-fig1-right").unwrap(), 100);
        let r = classify(&s, &p, &tols).unwrap();
        assert_eq!(r.label, Label::ConicalPower);
        assert!((r.params["k"] - 2.0).abs() < 1e-6);
        assert!((r.params["kappa"] - 0.25).abs() < 1e-6);
    }

    #[test]
    fn label_names_match_serde() {
        for l in [
            Label::RotationalCgc,
            Label::ContradictionWithTheorem1,
            Label::NotConstantCurvature,
        ] {
            assert_eq!(serde_json::to_value(l).unwrap(), l.name());
        }
    }
}
