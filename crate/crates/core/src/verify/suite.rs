//! The aggregate numerical check suite over a fixed catalog of surfaces.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::families::{
    catenoid, default_arc_span, preset, random::random_spec, rotational_profile, sphere,
    FamilySpec, FamilyTag,
};
use crate::geometry::{
    gauss_curvature_implicit, gauss_curvature_separable, implicit_jet, k2_residual, lemma1_defects,
    transform_jet, uvw_state, RigidMotion,
};
use crate::sampler::{marching_cubes, sample_n, GridSpec, VERTEX_TOL};
use crate::surface::{Axis, SeparableSurface, SurfacePoint};

use super::{check_constant_K, classify, Label, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Geometry,
    Families,
    Classifier,
}

impl Suite {
    fn includes(self, part: Suite) -> bool {
        self == Suite::All || self == part
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        match s {
            "all" => Ok(Suite::All),
            "geometry" => Ok(Suite::Geometry),
            "families" => Ok(Suite::Families),
            "classifier" => Ok(Suite::Classifier),
            other => Err(format!(
                "unknown suite `{other}` (expected all, geometry, families or classifier)"
            )),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::All => "all",
            Suite::Geometry => "geometry",
            Suite::Families => "families",
            Suite::Classifier => "classifier",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheckReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub n_checks: usize,
    pub n_failed: usize,
    pub checks: Vec<CheckResult>,
}

impl TheoremCheckReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// A named surface with its curvature, when that is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub spec: FamilySpec,
    pub nominal_k: Option<f64>,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn nominal_k(spec: &FamilySpec) -> Option<f64> {
    match spec {
        FamilySpec::RotationalCgc { curvature, .. } => Some(*curvature),
        FamilySpec::RotationalParabolic { .. } => None,
        _ => Some(0.0),
    }
}

/// The three worked examples, spheres of radius 0.5, 1 and 2, the catenoid,
/// and two random instances of every family.
pub fn catalog(seed: u64) -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for name in ["paper-fig1-left", "paper-fig1-middle", "paper-fig1-right"] {
        out.push(CatalogEntry {
            name: name.into(),
            spec: preset(name).expect("known preset"),
            nominal_k: Some(0.0),
        });
    }
    for r in [0.5, 1.0, 2.0] {
        out.push(CatalogEntry {
            name: format!("sphere-r{r}"),
            spec: sphere(r),
            nominal_k: Some(1.0 / (r * r)),
        });
    }
    out.push(CatalogEntry {
        name: "catenoid".into(),
        spec: catenoid(),
        nominal_k: None,
    });
    let mut rng = rng_for(seed, 1);
    for tag in FamilyTag::ALL {
        for i in 0..2 {
            let spec = random_spec(tag, &mut rng);
            let nominal = match tag {
                FamilyTag::RotationalParabolic => Some(0.0),
                _ => nominal_k(&spec),
            };
            out.push(CatalogEntry {
                name: format!("random-{}-{i}", tag.name()),
                spec,
                nominal_k: nominal,
            });
        }
    }
    out
}

struct Acc {
    name: &'static str,
    tol: f64,
    worst: f64,
    samples: usize,
    failures: usize,
    notes: Vec<String>,
}

impl Acc {
    fn new(name: &'static str, tol: f64) -> Acc {
        Acc {
            name,
            tol,
            worst: 0.0,
            samples: 0,
            failures: 0,
            notes: Vec::new(),
        }
    }

    fn observe(&mut self, value: f64) {
        self.samples += 1;
        if value.is_nan() {
            self.worst = f64::INFINITY;
        } else {
            self.worst = self.worst.max(value);
        }
        if !(value <= self.tol) {
            self.failures += 1;
        }
    }

    fn observe_tagged(&mut self, what: &str, value: f64) {
        let before = self.failures;
        self.observe(value);
        if self.failures > before && self.notes.len() < 8 {
            self.notes.push(format!("{what}: {value:e}"));
        }
    }

    fn fail(&mut self, note: String) {
        self.samples += 1;
        self.failures += 1;
        if self.notes.len() < 8 {
            self.notes.push(note);
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.failures == 0 && self.samples > 0,
            worst: self.worst,
            tolerance: self.tol,
            samples: self.samples,
            failures: self.failures,
            notes: self.notes,
        }
    }
}

struct Sampled {
    name: String,
    spec: FamilySpec,
    nominal_k: Option<f64>,
    surface: SeparableSurface,
    points: Vec<SurfacePoint>,
}

fn sample_entry(entry: &CatalogEntry, n: usize, seed: u64) -> Result<Sampled, String> {
    let surface = entry
        .spec
        .build()
        .map_err(|e| format!("{}: {e}", entry.name))?;
    let points = sample_n(&surface, entry.spec.admissible_box(), n, seed);
    Ok(Sampled {
        name: entry.name.clone(),
        spec: entry.spec.clone(),
        nominal_k: entry.nominal_k,
        surface,
        points,
    })
}

fn random_motion<R: Rng>(rng: &mut R) -> RigidMotion {
    let axis = Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let axis = if axis.norm() < 1e-3 {
        Vector3::z()
    } else {
        axis.normalize()
    };
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let rot = Rotation3::from_scaled_axis(axis * angle).into_inner();
    let t = Vector3::new(
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
    );
    RigidMotion::new(rot, t).expect("rotation matrices are orthogonal")
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

const POINTS_PER_SURFACE: usize = 600;
const FLAT_TAGS: [FamilyTag; 5] = [
    FamilyTag::RightCylinder,
    FamilyTag::Translation,
    FamilyTag::GeneralizedCone,
    FamilyTag::ExpCylinder,
    FamilyTag::ConicalPower,
];

fn geometry_checks(sampled: &[Sampled], seed: u64, out: &mut Vec<CheckResult>) {
    let mut agree = Acc::new("formula-agreement", 1e-10);
    let mut rigid = Acc::new("rigid-motion-invariance", 1e-10);
    let mut scale = Acc::new("scaling-invariance", 1e-10);
    let mut k2 = Acc::new("k2-residual", 1e-8);
    let mut rng = rng_for(seed, 2);
    for s in sampled {
        for (i, p) in s.points.iter().enumerate() {
            let Ok(jet) = implicit_jet(&s.surface, p) else {
                continue;
            };
            let (Ok(ki), Ok(ks)) = (
                gauss_curvature_implicit(&jet),
                gauss_curvature_separable(&s.surface, p),
            ) else {
                continue;
            };
            agree.observe_tagged(&s.name, relative(ki, ks));
            if let Ok(st) = uvw_state(&s.surface, p) {
                k2.observe_tagged(&s.name, k2_residual(&st, ks).abs());
            }
            if i % 10 == 0 {
                let motion = random_motion(&mut rng);
                match gauss_curvature_implicit(&transform_jet(&jet, &motion)) {
                    Ok(kt) => rigid.observe_tagged(&s.name, relative(kt, ki)),
                    Err(e) => rigid.fail(format!("{}: {e}", s.name)),
                }
                let mag: f64 = rng.gen_range(0.1..10.0);
                let lambda = if rng.gen_bool(0.5) { mag } else { -mag };
                match gauss_curvature_implicit(&jet.scaled(lambda)) {
                    Ok(kl) => scale.observe_tagged(&s.name, relative(kl, ki)),
                    Err(e) => scale.fail(format!("{}: {e}", s.name)),
                }
            }
        }
    }

    let mut lemma = Acc::new("lemma1-derivatives", 1e-5);
    let mut kappa = Acc::new("kappa-consistency", 1e-7);
    for s in sampled {
        let closed_form = !s.surface.has_tabulated()
            && Axis::ALL
                .iter()
                .all(|&a| !s.surface.component(a).is_constant());
        if let (Some(k), true) = (s.nominal_k, closed_form) {
            for p in s.points.iter().step_by(10) {
                let Ok(jets) = s.surface.jets(p) else {
                    continue;
                };
                if jets.iter().any(|j| j.d1.abs() < 1e-2) {
                    continue;
                }
                let total: f64 = jets.iter().map(|j| j.d1 * j.d1).sum();
                if let Ok((uv, vw)) = lemma1_defects(&s.surface, p, k, 1e-4) {
                    let norm = (total * total).max(1.0);
                    lemma.observe_tagged(&s.name, uv.abs().max(vw.abs()) / norm);
                }
            }
        }
        let kappa_branch = matches!(
            s.spec.tag(),
            FamilyTag::GeneralizedCone | FamilyTag::ExpCylinder | FamilyTag::ConicalPower
        );
        if kappa_branch {
            for p in &s.points {
                let Ok(st) = uvw_state(&s.surface, p) else {
                    continue;
                };
                if let [Some(a), Some(b), Some(c)] = st.kappas() {
                    kappa.observe_tagged(&s.name, (a - b).abs().max((b - c).abs()));
                }
            }
        }
    }
    out.extend([agree, rigid, scale, k2, lemma, kappa].map(Acc::finish));
}

fn families_checks(sampled: &[Sampled], seed: u64, out: &mut Vec<CheckResult>) {
    let mut round_trip = Acc::new("sampler-round-trip", 1e-9);
    for s in sampled {
        if s.points.is_empty() {
            round_trip.fail(format!("{}: no sample points", s.name));
        }
        for p in &s.points {
            match s.surface.eval(p) {
                Ok(v) => round_trip.observe_tagged(&s.name, v.abs()),
                Err(e) => round_trip.fail(format!("{}: {e}", s.name)),
            }
        }
    }

    let mut fig1 = Acc::new("fig1-flatness", 1e-8);
    let mut spheres = Acc::new("sphere-curvature", 1e-9);
    for s in sampled {
        let target = if s.name.starts_with("paper-fig1") {
            Some((&mut fig1, 0.0))
        } else if s.name.starts_with("sphere-") {
            Some((&mut spheres, s.nominal_k.expect("spheres have known K")))
        } else {
            None
        };
        if let Some((acc, k0)) = target {
            for p in &s.points {
                match gauss_curvature_separable(&s.surface, p) {
                    Ok(k) => acc.observe_tagged(&s.name, (k - k0).abs() / (1.0 + k0.abs())),
                    Err(e) => acc.fail(format!("{}: {e}", s.name)),
                }
            }
        }
    }

    let mut flat = Acc::new("flatness", 1e-8);
    let mut rng = rng_for(seed, 3);
    for tag in FLAT_TAGS {
        for i in 0..3 {
            let spec = random_spec(tag, &mut rng);
            let entry = CatalogEntry {
                name: format!("flat-{}-{i}", tag.name()),
                nominal_k: Some(0.0),
                spec,
            };
            match sample_entry(&entry, 1000, seed) {
                Ok(s) => {
                    if s.points.len() < 1000 {
                        flat.fail(format!("{}: only {} samples", s.name, s.points.len()));
                    }
                    for p in &s.points {
                        if let Ok(k) = gauss_curvature_separable(&s.surface, p) {
                            flat.observe_tagged(&s.name, k.abs());
                        }
                    }
                }
                Err(e) => flat.fail(e),
            }
        }
    }

    let mut cgc = Acc::new("rotational-cgc-curvature", 1e-4);
    let mut energy = Acc::new("profile-energy", 1e-8);
    let mut cases = vec![(-1.0, 0.5, 0.0), (1.0, 0.5, 0.0), (1.0, 0.8, 0.2)];
    for _ in 0..3 {
        if let FamilySpec::RotationalCgc {
            curvature, r0, dr0, ..
        } = random_spec(FamilyTag::RotationalCgc, &mut rng)
        {
            cases.push((curvature, r0, dr0));
        }
    }
    for (k, r0, dr0) in cases {
        let span = default_arc_span(k);
        match rotational_profile(k, r0, dr0, span, 1e-3 * span) {
            Ok(prof) => {
                let e0 = dr0 * dr0 + k * r0 * r0;
                for e in prof.energies() {
                    energy.observe_tagged(&format!("K={k} r0={r0}"), (e - e0).abs());
                }
            }
            Err(e) => energy.fail(format!("K={k} r0={r0}: {e}")),
        }
        let entry = CatalogEntry {
            name: format!("cgc K={k} r0={r0} dr0={dr0}"),
            spec: FamilySpec::rotational_cgc(k, r0, dr0),
            nominal_k: Some(k),
        };
        match sample_entry(&entry, 300, seed) {
            Ok(s) => {
                if s.points.len() < 100 {
                    cgc.fail(format!("{}: only {} samples", s.name, s.points.len()));
                }
                for p in &s.points {
                    match gauss_curvature_separable(&s.surface, p) {
                        Ok(km) => cgc.observe_tagged(&s.name, (km - k).abs()),
                        Err(e) => cgc.fail(format!("{}: {e}", s.name)),
                    }
                }
            }
            Err(e) => cgc.fail(e),
        }
    }

    let mut apex = Acc::new("cone-apex-scaling", 1e-9);
    let mut rulings = Acc::new("exp-cylinder-rulings", 1e-9);
    for s in sampled {
        match &s.spec {
            FamilySpec::GeneralizedCone { m, n, .. } => {
                let a = [-n[0] / m[0], -n[1] / m[1], -n[2] / m[2]];
                for p in &s.points {
                    let pa = p.to_array();
                    for t in [0.5, 2.0] {
                        let q =
                            SurfacePoint::from_array([0, 1, 2].map(|i| a[i] + t * (pa[i] - a[i])));
                        match s.surface.eval(&q) {
                            Ok(v) => apex.observe_tagged(&s.name, v.abs()),
                            Err(e) => apex.fail(format!("{}: {e}", s.name)),
                        }
                    }
                }
            }
            FamilySpec::ExpCylinder { m, .. } => {
                let d = [1.0 / m[0], 1.0 / m[1], 1.0 / m[2]];
                for p in &s.points {
                    let pa = p.to_array();
                    for t in [-1.0, -0.5, 0.5, 1.0] {
                        let q = SurfacePoint::from_array([0, 1, 2].map(|i| pa[i] + t * d[i]));
                        match s.surface.eval(&q) {
                            Ok(v) => rulings.observe_tagged(&s.name, v.abs()),
                            Err(e) => rulings.fail(format!("{}: {e}", s.name)),
                        }
                    }
                }
            }
            _ => {}
        }
    }

    let mut mesh = Acc::new("mesh-vertices", VERTEX_TOL);
    let mut determinism = Acc::new("sampler-determinism", 0.0);
    for name in [
        "paper-fig1-left",
        "paper-fig1-middle",
        "paper-fig1-right",
        "unit-sphere",
    ] {
        let spec = preset(name).expect("known preset");
        let surface = spec.build().expect("presets build");
        let grid = GridSpec::new(spec.admissible_box(), 20, seed);
        let m = marching_cubes(&surface, &grid);
        if m.triangles.is_empty() {
            mesh.fail(format!("{name}: empty mesh"));
        }
        let n = m.vertices.len() as u32;
        if m.triangles.iter().flatten().any(|&i| i >= n) {
            mesh.fail(format!("{name}: triangle index out of range"));
        }
        for v in &m.vertices {
            match surface.eval(v) {
                Ok(f) => mesh.observe_tagged(name, f.abs()),
                Err(e) => mesh.fail(format!("{name}: {e}")),
            }
        }
        let again = marching_cubes(&surface, &grid);
        determinism.observe_tagged(name, if again == m { 0.0 } else { 1.0 });
        let p1 = crate::sampler::sample_points(&surface, &grid);
        let p2 = crate::sampler::sample_points(&surface, &grid);
        determinism.observe_tagged(name, if p1 == p2 { 0.0 } else { 1.0 });
    }

    out.extend(
        [
            round_trip,
            fig1,
            spheres,
            flat,
            cgc,
            energy,
            apex,
            rulings,
            mesh,
            determinism,
        ]
        .map(Acc::finish),
    );
}

/// Label expected for random instances of each family tag.
pub(crate) fn expected_label(tag: FamilyTag) -> Label {
    match tag {
        FamilyTag::RightCylinder => Label::RightCylinder,
        FamilyTag::Translation => Label::Translation,
        FamilyTag::RotationalParabolic => Label::RotationalFlat,
        FamilyTag::RotationalCgc => Label::RotationalCgc,
        FamilyTag::GeneralizedCone => Label::GeneralizedCone,
        FamilyTag::ExpCylinder => Label::ExpCylinder,
        FamilyTag::ConicalPower => Label::ConicalPower,
    }
}

const CLASSIFY_POINTS: usize = 200;

fn classifier_checks(sampled: &[Sampled], seed: u64, out: &mut Vec<CheckResult>) {
    let mut round_trip = Acc::new("classifier-round-trip", 0.0);
    let mut sentinel = Acc::new("no-contradiction", 0.0);
    let mut k_fit = Acc::new("conical-k-recovery", 1e-6);
    let mut rng = rng_for(seed, 4);
    for tag in FamilyTag::ALL {
        for i in 0..20 {
            let spec = random_spec(tag, &mut rng);
            let entry = CatalogEntry {
                name: format!("{}-{i}", tag.name()),
                nominal_k: nominal_k(&spec),
                spec,
            };
            let s = match sample_entry(&entry, CLASSIFY_POINTS, seed) {
                Ok(s) => s,
                Err(e) => {
                    round_trip.fail(e);
                    continue;
                }
            };
            let tols = Tolerances::for_surface(&s.surface);
            match classify(&s.surface, &s.points, &tols) {
                Ok(r) => {
                    let ok = r.label == expected_label(tag);
                    round_trip.observe_tagged(
                        &format!("{} -> {}", s.name, r.label.name()),
                        if ok { 0.0 } else { 1.0 },
                    );
                    sentinel.observe_tagged(
                        &s.name,
                        if r.label.is_contradiction() { 1.0 } else { 0.0 },
                    );
                    if let (FamilySpec::ConicalPower { k, .. }, Some(fit)) =
                        (&s.spec, r.params.get("k"))
                    {
                        k_fit.observe_tagged(&s.name, (fit - k).abs() / k.abs());
                    }
                }
                Err(e) => round_trip.fail(format!("{}: {e}", s.name)),
            }
        }
    }

    let mut catalog_labels = Acc::new("catalog-labels", 0.0);
    let mut kappa = Acc::new("branch-kappa", 1e-6);
    let mut spheres = Acc::new("sphere-classification", 1e-8);
    let mut negative = Acc::new("negative-control", 0.0);
    let mut monotone = Acc::new("tolerance-monotone", 0.0);
    for s in sampled {
        let tols = Tolerances::for_surface(&s.surface);
        let r = match classify(&s.surface, &s.points, &tols) {
            Ok(r) => r,
            Err(e) => {
                catalog_labels.fail(format!("{}: {e}", s.name));
                continue;
            }
        };
        sentinel.observe_tagged(&s.name, if r.label.is_contradiction() { 1.0 } else { 0.0 });
        let expected = match s.name.as_str() {
            "paper-fig1-left" => Some((Label::GeneralizedCone, 0.0)),
            "paper-fig1-middle" => Some((Label::ExpCylinder, 0.5)),
            "paper-fig1-right" => Some((Label::ConicalPower, 0.25)),
            _ => None,
        };
        if let Some((label, k0)) = expected {
            catalog_labels.observe_tagged(&s.name, if r.label == label { 0.0 } else { 1.0 });
            match r.params.get("kappa") {
                Some(k) => kappa.observe_tagged(&s.name, (k - k0).abs()),
                None => kappa.fail(format!("{}: no kappa estimate", s.name)),
            }
        } else if s.name.starts_with("sphere-") {
            let k0 = s.nominal_k.expect("spheres have known K");
            if r.label != Label::RotationalCgc {
                spheres.fail(format!("{}: labelled {}", s.name, r.label.name()));
            }
            match r.params.get("K") {
                Some(k) => spheres.observe_tagged(&s.name, (k - k0).abs() / k0),
                None => spheres.fail(format!("{}: no fitted K", s.name)),
            }
        } else if s.name == "catenoid" {
            negative.observe_tagged(
                &s.name,
                if r.label == Label::NotConstantCurvature {
                    0.0
                } else {
                    1.0
                },
            );
        } else if s.name.starts_with("random-") {
            catalog_labels.observe_tagged(
                &format!("{} -> {}", s.name, r.label.name()),
                if r.label == expected_label(s.spec.tag()) {
                    0.0
                } else {
                    1.0
                },
            );
        }
        // a looser tolerance must keep every positive constancy verdict
        for factor in [10.0, 100.0] {
            let loose = Tolerances::for_surface(&s.surface).scaled(factor);
            if let (Ok(a), Ok(b)) = (
                check_constant_K(&s.surface, &s.points, tols.constancy),
                check_constant_K(&s.surface, &s.points, loose.constancy),
            ) {
                let broken = (a.is_constant && !b.is_constant) || (a.is_zero && !b.is_zero);
                monotone.observe_tagged(&s.name, if broken { 1.0 } else { 0.0 });
            }
        }
    }

    out.extend(
        [
            round_trip,
            sentinel,
            k_fit,
            catalog_labels,
            kappa,
            spheres,
            negative,
            monotone,
        ]
        .map(Acc::finish),
    );
}

/// Run every check of `suite` over the catalog built from `seed`.
pub fn run_theorem_suite(suite: Suite, seed: u64) -> TheoremCheckReport {
    let mut checks = Vec::new();
    let entries = catalog(seed);
    let mut sampled = Vec::new();
    let mut build = Acc::new("catalog-build", 0.0);
    for e in &entries {
        match sample_entry(e, POINTS_PER_SURFACE, seed) {
            Ok(s) => {
                let short = s.points.len() < 100;
                build.observe_tagged(
                    &format!("{}: {} samples", s.name, s.points.len()),
                    if short { 1.0 } else { 0.0 },
                );
                sampled.push(s);
            }
            Err(err) => build.fail(err),
        }
    }
    checks.push(build.finish());
    if suite.includes(Suite::Geometry) {
        geometry_checks(&sampled, seed, &mut checks);
    }
    if suite.includes(Suite::Families) {
        families_checks(&sampled, seed, &mut checks);
    }
    if suite.includes(Suite::Classifier) {
        classifier_checks(&sampled, seed, &mut checks);
    }
    let n_failed = checks.iter().filter(|c| !c.passed).count();
    TheoremCheckReport {
        suite,
        seed,
        passed: n_failed == 0,
        n_checks: checks.len(),
        n_failed,
        checks,
    }
}
