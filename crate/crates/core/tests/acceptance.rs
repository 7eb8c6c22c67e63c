//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sepsurf::expr::{Ast, Func1D, Interval, UnaryOp};
use sepsurf::families::random::random_spec;
use sepsurf::families::{
    catenoid, default_arc_span, preset, rotational_profile, sphere, FamilySpec, FamilyTag,
    DEFAULT_STEP_FRACTION,
};
use sepsurf::geometry::{
    gauss_curvature_implicit, gauss_curvature_separable, implicit_jet, k2_residual, uvw_state,
};
use sepsurf::sampler::sample_n;
use sepsurf::surface::{SeparableSurface, SurfacePoint};
use sepsurf::verify::{catalog, classify, ClassificationResult, Label, Tolerances};

const SEED: u64 = 42;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Outcome {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn build(spec: &FamilySpec) -> SeparableSurface {
    spec.build().unwrap_or_else(|e| panic!("{spec:?}: {e}"))
}

fn points(spec: &FamilySpec, surface: &SeparableSurface, n: usize, seed: u64) -> Vec<SurfacePoint> {
    sample_n(surface, spec.admissible_box(), n, seed)
}

fn classify_spec(spec: &FamilySpec, n: usize, seed: u64) -> Result<ClassificationResult, String> {
    let s = build(spec);
    let pts = points(spec, &s, n, seed);
    classify(&s, &pts, &Tolerances::for_surface(&s)).map_err(|e| e.to_string())
}

fn fig1_flatness() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut fewest = usize::MAX;
    let mut singular = 0;
    for name in ["paper-fig1-left", "paper-fig1-middle", "paper-fig1-right"] {
        let spec = preset(name).expect("preset");
        let s = build(&spec);
        let pts = points(&spec, &s, 1000, SEED);
        fewest = fewest.min(pts.len());
        for p in &pts {
            match gauss_curvature_separable(&s, p) {
                Ok(k) => worst = worst.max(k.abs()),
                Err(_) => singular += 1,
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 1e-8 && fewest >= 1000 && elapsed < Duration::from_secs(5),
        format!(
            "max |K| = {worst:.3e} (tol 1e-8), min samples {fewest}, {singular} singular, {:.2} s (limit 5 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn spheres() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        let spec = sphere(r);
        let s = build(&spec);
        let pts = points(&spec, &s, 1000, SEED);
        let k0 = 1.0 / (r * r);
        let tol = 1e-9 * (1.0 + k0);
        let dev = pts
            .iter()
            .map(|p| (gauss_curvature_separable(&s, p).map_or(f64::INFINITY, |k| k - k0)).abs())
            .fold(0.0f64, f64::max);
        let c = classify(&s, &pts, &Tolerances::for_surface(&s));
        let (label, fit) = match &c {
            Ok(c) => (c.label, c.params.get("K").copied().unwrap_or(f64::NAN)),
            Err(_) => (Label::NotConstantCurvature, f64::NAN),
        };
        let fit_err = (fit - k0).abs() / k0;
        ok &= pts.len() >= 1000 && dev <= tol && label == Label::RotationalCgc && fit_err <= 1e-8;
        parts.push(format!(
            "r={r}: n={} dev {dev:.2e}/{tol:.1e}, {} K rel err {fit_err:.1e}",
            pts.len(),
            label.name()
        ));
    }
    Outcome::new(ok, parts.join("; "))
}

fn formula_agreement() -> Outcome {
    let mut r = rng(3);
    let entries = catalog(SEED);
    let chosen: Vec<_> = entries.choose_multiple(&mut r, 10).collect();
    let mut worst = 0.0f64;
    let mut n = 0usize;
    for (i, e) in chosen.iter().enumerate() {
        let s = build(&e.spec);
        for p in points(&e.spec, &s, 1100, SEED + i as u64) {
            let Ok(jet) = implicit_jet(&s, &p) else {
                continue;
            };
            let (Ok(ki), Ok(ks)) = (
                gauss_curvature_implicit(&jet),
                gauss_curvature_separable(&s, &p),
            ) else {
                continue;
            };
            worst = worst.max((ki - ks).abs() / (1.0 + ks.abs()));
            n += 1;
        }
    }
    Outcome::new(
        worst <= 1e-10 && n >= 10_000,
        format!("max |Ki - Ks|/(1+|K|) = {worst:.3e} (tol 1e-10) over {n} points on 10 surfaces"),
    )
}

fn k2_residuals() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_name = String::new();
    let mut n = 0usize;
    for e in catalog(SEED) {
        let s = build(&e.spec);
        for p in points(&e.spec, &s, 600, SEED) {
            let (Ok(st), Ok(k)) = (uvw_state(&s, &p), gauss_curvature_separable(&s, &p)) else {
                continue;
            };
            let res = k2_residual(&st, k).abs();
            if res > worst {
                worst = res;
                worst_name = e.name.clone();
            }
            n += 1;
        }
    }
    Outcome::new(
        worst <= 1e-8,
        format!("max normalized residual {worst:.3e} (tol 1e-8, at {worst_name}) over {n} points"),
    )
}

fn branch_constants() -> Outcome {
    let mut r = rng(5);
    let mut ok = true;
    let mut kappa_dev = [0.0f64; 3];
    let mut named = vec![
        (0usize, preset("paper-fig1-left").unwrap()),
        (1, preset("paper-fig1-middle").unwrap()),
        (2, preset("paper-fig1-right").unwrap()),
    ];
    for _ in 0..5 {
        named.push((0, random_spec(FamilyTag::GeneralizedCone, &mut r)));
        named.push((1, random_spec(FamilyTag::ExpCylinder, &mut r)));
        let FamilySpec::ConicalPower { m, n, chart, .. } =
            random_spec(FamilyTag::ConicalPower, &mut r)
        else {
            unreachable!()
        };
        named.push((
            2,
            FamilySpec::ConicalPower {
                k: 2.0,
                m,
                n,
                chart,
            },
        ));
    }
    let targets = [0.0, 0.5, 0.25];
    for (i, (which, spec)) in named.iter().enumerate() {
        match classify_spec(spec, 300, SEED + i as u64).map(|c| c.params.get("kappa").copied()) {
            Ok(Some(kappa)) => {
                kappa_dev[*which] = kappa_dev[*which].max((kappa - targets[*which]).abs())
            }
            _ => {
                ok = false;
                kappa_dev[*which] = f64::INFINITY;
            }
        }
    }
    ok &= kappa_dev.iter().all(|d| *d <= 1e-6);

    let mut k_err = 0.0f64;
    let draws = 30;
    for i in 0..draws {
        let spec = random_spec(FamilyTag::ConicalPower, &mut r);
        let FamilySpec::ConicalPower { k, .. } = spec else {
            unreachable!()
        };
        let fit = classify_spec(&spec, 300, SEED + 100 + i)
            .ok()
            .and_then(|c| c.params.get("k").copied())
            .unwrap_or(f64::NAN);
        let err = (fit - k).abs() / k.abs();
        k_err = if err.is_nan() {
            f64::INFINITY
        } else {
            k_err.max(err)
        };
    }
    ok &= k_err <= 1e-6;
    Outcome::new(
        ok,
        format!(
            "kappa dev cone {:.1e}, exp {:.1e}, k=2 {:.1e} (tol 1e-6); k rel err {k_err:.1e} over {draws} draws (tol 1e-6)",
            kappa_dev[0], kappa_dev[1], kappa_dev[2]
        ),
    )
}

fn classifier_round_trip() -> Outcome {
    let mut r = rng(6);
    let mut correct = 0;
    let mut total = 0;
    let mut sentinel = 0;
    let mut misses = Vec::new();
    for tag in FamilyTag::ALL {
        for i in 0..20 {
            let spec = random_spec(tag, &mut r);
            total += 1;
            let label = classify_spec(&spec, 300, SEED + i).map(|c| c.label);
            if label == Ok(Label::ContradictionWithTheorem2) {
                sentinel += 1;
            }
            if label == Ok(expected(tag)) {
                correct += 1;
            } else {
                misses.push(format!("{}#{i}: {label:?}", tag.name()));
            }
        }
    }
    Outcome::new(
        correct == total && sentinel == 0,
        format!("{correct}/{total} correct, sentinel fired {sentinel} times {misses:?}"),
    )
}

fn expected(tag: FamilyTag) -> Label {
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

fn rotational_cgc() -> Outcome {
    // (K, r0, dr0) away from the round sphere
    let cases = [
        (-1.0, 0.5, 0.0),
        (-1.0, 0.7, 0.3),
        (1.0, 0.8, 0.2),
        (1.0, 0.5, 0.0),
        (1.0, 0.9, -0.25),
    ];
    let mut ok = true;
    let mut k_dev = 0.0f64;
    let mut e_dev = 0.0f64;
    let mut fewest = usize::MAX;
    for (i, (k, r0, dr0)) in cases.into_iter().enumerate() {
        let span = default_arc_span(k);
        match rotational_profile(k, r0, dr0, span, DEFAULT_STEP_FRACTION * span) {
            Ok(prof) => {
                let e0 = dr0 * dr0 + k * r0 * r0;
                e_dev = prof
                    .energies()
                    .map(|e| (e - e0).abs())
                    .fold(e_dev, f64::max);
            }
            Err(_) => ok = false,
        }
        let spec = FamilySpec::rotational_cgc(k, r0, dr0);
        let s = build(&spec);
        let pts = points(&spec, &s, 1000, SEED + i as u64);
        fewest = fewest.min(pts.len());
        for p in &pts {
            let dev = gauss_curvature_separable(&s, p).map_or(f64::INFINITY, |m| (m - k).abs());
            k_dev = k_dev.max(dev);
        }
    }
    ok &= k_dev <= 1e-4 && e_dev <= 1e-8 && fewest >= 100;
    Outcome::new(
        ok,
        format!(
            "max |K - K0| = {k_dev:.2e} (tol 1e-4), energy drift {e_dev:.2e} (tol 1e-8), {} profiles, min samples {fewest}",
            cases.len()
        ),
    )
}

fn random_ast(r: &mut ChaCha8Rng, depth: u32) -> Ast {
    if depth == 0 || r.gen_bool(0.25) {
        return match r.gen_range(0..3) {
            0 | 1 => Ast::Var,
            _ => Ast::Const((r.gen_range(-2.0..2.0f64) * 100.0).round() / 100.0),
        };
    }
    let a = random_ast(r, depth - 1);
    match r.gen_range(0..12) {
        0 => Ast::add(a, random_ast(r, depth - 1)),
        1 => Ast::sub(a, random_ast(r, depth - 1)),
        2 => Ast::mul(a, random_ast(r, depth - 1)),
        3 => Ast::neg(a),
        4 => Ast::unary(UnaryOp::Sin, a),
        5 => Ast::unary(UnaryOp::Cos, a),
        6 => Ast::unary(UnaryOp::Tanh, a),
        7 => Ast::unary(UnaryOp::Exp, Ast::unary(UnaryOp::Sin, a)),
        8 => Ast::unary(
            UnaryOp::Log,
            Ast::add(Ast::Const(1.5), Ast::unary(UnaryOp::Cos, a)),
        ),
        9 => Ast::unary(
            UnaryOp::Sqrt,
            Ast::add(Ast::Const(1.0), Ast::pow(a, Ast::Const(2.0))),
        ),
        10 => Ast::pow(a, Ast::Const(r.gen_range(2..4) as f64)),
        _ => Ast::div(
            a,
            Ast::add(Ast::Const(2.0), Ast::unary(UnaryOp::Cos, Ast::Var)),
        ),
    }
}

fn central(ast: &Ast, x: f64) -> Option<f64> {
    const H: f64 = 1e-5;
    Some((ast.eval(x + H).ok()? - ast.eval(x - H).ok()?) / (2.0 * H))
}

fn derivatives() -> Outcome {
    let mut r = rng(8);
    let mut pairs = 0;
    let mut skipped = 0;
    let mut worst = 0.0f64;
    while pairs < 1000 {
        let f = Func1D::new(random_ast(&mut r, 4), Interval::REAL_LINE);
        let x = r.gen_range(-1.5..1.5);
        let Ok(jet) = f.jet3(x) else {
            skipped += 1;
            continue;
        };
        let sym = [jet.d1, jet.d2, jet.d3];
        if sym.iter().any(|d| d.abs() > 1e3) {
            skipped += 1;
            continue;
        }
        let lower = [f.ast(), f.derivative(1), f.derivative(2)];
        let Some(fd) = lower
            .iter()
            .map(|a| central(a, x))
            .collect::<Option<Vec<f64>>>()
        else {
            skipped += 1;
            continue;
        };
        for (s, d) in sym.iter().zip(&fd) {
            worst = worst.max((s - d).abs() / s.abs().max(1.0));
        }
        pairs += 1;
    }
    Outcome::new(
        worst <= 1e-6,
        format!("max relative error {worst:.2e} (tol 1e-6) over {pairs} pairs, orders 1-3, {skipped} draws skipped"),
    )
}

fn negative_control() -> Outcome {
    match classify_spec(&catenoid(), 600, SEED) {
        Ok(c) => Outcome::new(
            c.label == Label::NotConstantCurvature,
            format!(
                "label {}, K spread {:.3e}",
                c.label.name(),
                c.constancy.k_max_dev
            ),
        ),
        Err(e) => Outcome::new(false, format!("classification failed: {e}")),
    }
}

fn determinism() -> Outcome {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_sepsurf"))
            .args(["verify", "--suite", "all", "--seed", "42"])
            .output()
            .expect("binary runs");
        (out, start.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let slowest = ta.max(tb);
    Outcome::new(
        a.status.code() == Some(0)
            && b.status.code() == Some(0)
            && a.stdout == b.stdout
            && !a.stdout.is_empty()
            && slowest < Duration::from_secs(60),
        format!(
            "exit {:?}/{:?}, reports identical: {} ({} bytes), slowest run {:.1} s (limit 60 s)",
            a.status.code(),
            b.status.code(),
            a.stdout == b.stdout,
            a.stdout.len(),
            slowest.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked examples are flat", fig1_flatness),
        ("sphere curvature and classification", spheres),
        ("implicit and separable curvature agree", formula_agreement),
        ("k2 residual on the catalog", k2_residuals),
        ("branch constant and k recovery", branch_constants),
        ("classifier round trip", classifier_round_trip),
        ("rotational constant-curvature profiles", rotational_cgc),
        ("symbolic derivatives", derivatives),
        ("catenoid negative control", negative_control),
        ("verify determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failed += 1;
        }
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {name}: {}", i + 1, o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
