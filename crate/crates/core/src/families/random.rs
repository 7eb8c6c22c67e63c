//! Random admissible instances of every family, used by the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{Func1D, Interval};

use super::{FamilySpec, FamilyTag, Plane};

fn signed<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let mag = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn parse(src: &str, var: &str) -> Func1D {
    Func1D::parse(src, var, Interval::REAL_LINE).expect("generated expressions parse")
}

/// Exponent `1/(1-k)` at least this far from every even integer.
const EVEN_MARGIN: f64 = 0.05;

fn random_conical_k<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let k: f64 = rng.gen_range(-3.0..=3.0);
        if k.abs() < 0.1 || (k - 1.0).abs() < 0.1 {
            continue;
        }
        let alpha = FamilySpec::conical_exponent(k);
        let nearest_even = 2.0 * (alpha / 2.0).round();
        if (alpha - nearest_even).abs() >= EVEN_MARGIN {
            return k;
        }
    }
}

/// Random sign chart with exactly one or exactly two positive entries.
fn random_chart<R: Rng + ?Sized>(rng: &mut R) -> [i8; 3] {
    let odd = rng.gen_range(0..3);
    let base: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut chart = [base; 3];
    chart[odd] = -base;
    chart
}

pub fn random_spec<R: Rng + ?Sized>(tag: FamilyTag, rng: &mut R) -> FamilySpec {
    match tag {
        FamilyTag::RightCylinder => {
            let plane = *[Plane::Xy, Plane::Yz, Plane::Xz]
                .choose(rng)
                .expect("non-empty");
            let (first, second, _) = plane.axes();
            let amp = rng.gen_range(1.0..=2.0);
            let f = if rng.gen_bool(0.5) {
                format!("{amp}*{v}^2", v = first.name())
            } else {
                format!("{amp}*(cosh({v}) - 1)", v = first.name())
            };
            let beta = rng.gen_range(1.0..=2.0);
            let gamma = rng.gen_range(-0.3..=0.3);
            let g = format!("{beta}*{v}^2 + {gamma}*{v}", v = second.name());
            let r: f64 = rng.gen_range(0.3..=0.7);
            FamilySpec::RightCylinder {
                f: parse(&f, first.name()),
                g: parse(&g, second.name()),
                a: -r * r,
                plane,
            }
        }
        FamilyTag::Translation => {
            let a = signed(rng, 0.5, 2.0);
            let c = signed(rng, 0.5, 2.0);
            let g = match rng.gen_range(0..4) {
                0 => format!("{c}*y^2"),
                1 => format!("{c}*sin(y)"),
                2 => format!("{c}*exp(0.5*y)"),
                _ => format!("{c}*cosh(y)"),
            };
            FamilySpec::Translation {
                a,
                g: parse(&g, "y"),
            }
        }
        FamilyTag::RotationalParabolic => {
            // circular cones about a vertical axis: flat surfaces of revolution
            let m = signed(rng, 0.3, 0.6);
            let n = rng.gen_range(0.8..=1.2);
            let a: f64 = rng.gen_range(-1.0..=1.0);
            let b: f64 = rng.gen_range(-1.0..=1.0);
            FamilySpec::RotationalParabolic {
                a,
                b,
                c: (a * a + b * b) / 4.0,
                h: parse(&format!("({m}*z + {n})^2"), "z"),
            }
        }
        FamilyTag::RotationalCgc => {
            let k = signed(rng, 0.5, 2.0);
            let rho = if k > 0.0 {
                rng.gen_range(0.4..=1.2)
            } else {
                rng.gen_range(0.3..=1.0)
            };
            FamilySpec::rotational_cgc(k, rho / k.abs().sqrt(), rng.gen_range(-0.3..=0.3))
        }
        FamilyTag::GeneralizedCone => {
            let p = loop {
                let p: f64 = rng.gen_range(-2.0..=3.0);
                if p.abs() >= 0.2 && (p - 1.0).abs() >= 0.2 {
                    break p;
                }
            };
            let m = [(); 3].map(|_| signed(rng, 0.5, 2.0));
            let n = [(); 3].map(|_| rng.gen_range(-1.0..=1.0));
            FamilySpec::generalized_cone(p, m, n)
        }
        FamilyTag::ExpCylinder => {
            let m = [(); 3].map(|_| signed(rng, 0.5, 1.5));
            let chart = random_chart(rng);
            let mut n = [0.0; 3];
            for i in 0..3 {
                n[i] = f64::from(chart[i]) * rng.gen_range(0.5..=2.0);
            }
            FamilySpec::ExpCylinder { m, n }
        }
        FamilyTag::ConicalPower => {
            let k = random_conical_k(rng);
            let m = [(); 3].map(|_| signed(rng, 0.5, 2.0));
            let n = [(); 3].map(|_| rng.gen_range(-1.0..=1.0));
            FamilySpec::ConicalPower {
                k,
                m,
                n,
                chart: random_chart(rng),
            }
        }
    }
}
