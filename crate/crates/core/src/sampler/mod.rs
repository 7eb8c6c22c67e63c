//! On-surface point sampling and marching-cubes meshing.

mod tables;

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::expr::ExprError;
use crate::geometry::{gauss_curvature_implicit, implicit_jet};
use crate::surface::{Axis, Box3, SeparableSurface, SurfaceFn, SurfacePoint};

use tables::TRI_TABLE;

/// Subintervals scanned per column when bracketing roots.
pub const SCAN_SUBDIVISIONS: usize = 256;
/// Half-width of the search window used along an unbounded axis.
pub const DEFAULT_WINDOW: f64 = 64.0;
/// Contract on `|F|` at every mesh vertex.
pub const VERTEX_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "box")]
    pub bounds: Box3,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(bounds: Box3, n: usize, seed: u64) -> GridSpec {
        GridSpec {
            bounds,
            nx: n,
            ny: n,
            nz: n,
            seed,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.bounds.is_valid() && self.nx >= 2 && self.ny >= 2 && self.nz >= 2
    }

    pub fn resolution(&self, axis: Axis) -> usize {
        [self.nx, self.ny, self.nz][axis.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<SurfacePoint>,
    pub triangles: Vec<[u32; 3]>,
    /// Gaussian curvature per vertex; NaN where the point is singular.
    pub vertex_k: Vec<f64>,
    pub skipped_cells: usize,
    pub grid: GridSpec,
}

/// One summand shifted by a constant: `phi(t) = comp(t) + offset`.
struct Shifted<'a> {
    comp: &'a SurfaceFn,
    offset: f64,
}

impl Shifted<'_> {
    fn value(&self, t: f64) -> Option<f64> {
        self.comp.value(t).ok().map(|v| v + self.offset)
    }

    fn slope(&self, t: f64) -> Option<f64> {
        self.comp.slope(t).ok()
    }
}

/// Bisect a sign change of `fun` on `[a, b]` down to adjacent floats.
fn bisect(mut a: f64, mut b: f64, mut fa: f64, fun: impl Fn(f64) -> Option<f64>) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        match fun(m) {
            Some(0.0) => return m,
            Some(fm) if (fm < 0.0) == (fa < 0.0) => {
                a = m;
                fa = fm;
            }
            Some(_) => b = m,
            // unevaluable interior point: shrink towards the known end
            None => b = m,
        }
    }
    0.5 * (a + b)
}

fn polish(phi: &Shifted<'_>, t: f64, lo: f64, hi: f64) -> f64 {
    let (Some(v), Some(d)) = (phi.value(t), phi.slope(t)) else {
        return t;
    };
    if d == 0.0 || v == 0.0 {
        return t;
    }
    let next = t - v / d;
    if next > lo && next < hi {
        if let Some(nv) = phi.value(next) {
            if nv.abs() < v.abs() {
                return next;
            }
        }
    }
    t
}

/// Roots of `phi` on `[a, b]` where `phi` is monotone or has one interior
/// turning point located through the slope.
fn roots_in(
    phi: &Shifted<'_>,
    (a, fa, sa): (f64, f64, Option<f64>),
    (b, fb, sb): (f64, f64, Option<f64>),
    out: &mut Vec<f64>,
) {
    let push_bracket = |lo: f64, hi: f64, flo: f64, fhi: f64, out: &mut Vec<f64>| {
        if flo == 0.0 {
            return;
        }
        if fhi == 0.0 {
            out.push(hi);
        } else if (flo < 0.0) != (fhi < 0.0) {
            let t = bisect(lo, hi, flo, |t| phi.value(t));
            out.push(polish(phi, t, lo, hi));
        }
    };
    if let (Some(sa), Some(sb)) = (sa, sb) {
        if sa != 0.0 && sb != 0.0 && (sa < 0.0) != (sb < 0.0) {
            // split at the turning point
            let tp = bisect(a, b, sa, |t| phi.slope(t));
            if let Some(fm) = phi.value(tp) {
                if fm == 0.0 {
                    out.push(tp);
                    return;
                }
                push_bracket(a, tp, fa, fm, out);
                push_bracket(tp, b, fm, fb, out);
                return;
            }
        }
    }
    push_bracket(a, b, fa, fb, out);
}

/// Solve `comp(t) = target` for `t` in the open window `(lo, hi)` intersected
/// with the summand's domain.
pub fn solve_fn(comp: &SurfaceFn, target: f64, lo: f64, hi: f64) -> Vec<f64> {
    let dom = comp.domain();
    let inset = |e: f64| 1e-9 * (1.0 + e.abs());
    let mut lo = lo.max(-DEFAULT_WINDOW);
    let mut hi = hi.min(DEFAULT_WINDOW);
    if dom.lo.is_finite() {
        lo = lo.max(dom.lo + inset(dom.lo));
    }
    if dom.hi.is_finite() {
        hi = hi.min(dom.hi - inset(dom.hi));
    }
    if !(lo < hi) {
        return Vec::new();
    }
    let phi = Shifted {
        comp,
        offset: -target,
    };
    let n = SCAN_SUBDIVISIONS;
    let nodes: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let vals: Vec<Option<f64>> = nodes.iter().map(|&t| phi.value(t)).collect();
    let slopes: Vec<Option<f64>> = nodes.iter().map(|&t| phi.slope(t)).collect();
    let mut out = Vec::new();
    if vals[0] == Some(0.0) {
        out.push(nodes[0]);
    }
    for i in 0..n {
        if let (Some(fa), Some(fb)) = (vals[i], vals[i + 1]) {
            roots_in(
                &phi,
                (nodes[i], fa, slopes[i]),
                (nodes[i + 1], fb, slopes[i + 1]),
                &mut out,
            );
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    out
}

/// Points of the surface on the line through `p` parallel to `axis`, with
/// the `axis` coordinate restricted to `(lo, hi)`.
pub fn solve_along(
    surface: &SeparableSurface,
    axis: Axis,
    p: &SurfacePoint,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>, ExprError> {
    let mut rest = 0.0;
    for other in Axis::ALL {
        if other != axis {
            rest += surface.component(other).value(p.coord(other))?;
        }
    }
    Ok(solve_fn(surface.component(axis), -rest, lo, hi))
}

/// All `z` with `f(x) + g(y) + h(z) = 0`, ascending.
pub fn solve_z(surface: &SeparableSurface, x: f64, y: f64) -> Result<Vec<f64>, ExprError> {
    solve_along(
        surface,
        Axis::Z,
        &SurfacePoint::new(x, y, 0.0),
        f64::NEG_INFINITY,
        f64::INFINITY,
    )
}

/// Jittered columns over the two non-solve axes of the box; every root along
/// the solve axis inside the box is returned.
pub fn sample_points(surface: &SeparableSurface, grid: &GridSpec) -> Vec<SurfacePoint> {
    let axis = surface.solve_axis();
    let others: Vec<Axis> = Axis::ALL.into_iter().filter(|&a| a != axis).collect();
    let (a, b) = (others[0], others[1]);
    let (na, nb) = (grid.resolution(a), grid.resolution(b));
    let (a0, a1) = grid.bounds.range(a);
    let (b0, b1) = grid.bounds.range(b);
    let (lo, hi) = grid.bounds.range(axis);
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut out = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            let ja: f64 = rng.gen_range(-0.25..=0.25);
            let jb: f64 = rng.gen_range(-0.25..=0.25);
            let ta = a0 + (a1 - a0) * (i as f64 + 0.5 + ja) / na as f64;
            let tb = b0 + (b1 - b0) * (j as f64 + 0.5 + jb) / nb as f64;
            let base = SurfacePoint::new(0.0, 0.0, 0.0)
                .with_coord(a, ta)
                .with_coord(b, tb);
            if let Ok(roots) = solve_along(surface, axis, &base, lo, hi) {
                out.extend(roots.into_iter().map(|t| base.with_coord(axis, t)));
            }
        }
    }
    out
}

/// At least `n` sample points in `bounds` (if the surface has that many
/// there), truncated to exactly `n`.
pub fn sample_n(
    surface: &SeparableSurface,
    bounds: Box3,
    n: usize,
    seed: u64,
) -> Vec<SurfacePoint> {
    let mut cols = ((n as f64).sqrt().ceil() as usize).max(2);
    let mut pts = Vec::new();
    for _ in 0..5 {
        pts = sample_points(surface, &GridSpec::new(bounds, cols, seed));
        if pts.len() >= n {
            break;
        }
        cols *= 2;
    }
    pts.truncate(n);
    pts
}

const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

const EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

fn node_coords(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}

/// Locate the zero of `F` on a grid edge along `axis` between `t0` and `t1`.
fn edge_root(phi: &Shifted<'_>, t0: f64, t1: f64, v0: f64, v1: f64) -> f64 {
    if v0 == 0.0 {
        return t0;
    }
    if v1 == 0.0 {
        return t1;
    }
    let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
    let mut t = t0 + (t1 - t0) * v0 / (v0 - v1);
    for _ in 0..5 {
        let (Some(v), Some(d)) = (phi.value(t), phi.slope(t)) else {
            break;
        };
        if v == 0.0 || d == 0.0 {
            break;
        }
        let next = t - v / d;
        t = if next >= lo && next <= hi {
            next
        } else {
            0.5 * (t + if (v < 0.0) == (v0 < 0.0) { t1 } else { t0 })
        };
    }
    match phi.value(t) {
        Some(v) if v.abs() <= VERTEX_TOL => t,
        _ => bisect(t0, t1, v0, |s| phi.value(s)),
    }
}

pub fn marching_cubes(surface: &SeparableSurface, grid: &GridSpec) -> Mesh {
    let n = [grid.nx, grid.ny, grid.nz];
    let coords: Vec<Vec<f64>> = Axis::ALL
        .iter()
        .map(|&a| {
            let (lo, hi) = grid.bounds.range(a);
            node_coords(lo, hi, n[a.index()])
        })
        .collect();
    let cached: Vec<Vec<Option<f64>>> = Axis::ALL
        .iter()
        .map(|&a| {
            let comp = surface.component(a);
            coords[a.index()]
                .iter()
                .map(|&t| comp.value(t).ok())
                .collect()
        })
        .collect();
    let value_at = |idx: [usize; 3]| -> Option<f64> {
        Some(cached[0][idx[0]]? + cached[1][idx[1]]? + cached[2][idx[2]]?)
    };

    let mut vertices = Vec::new();
    let mut edge_ids: HashMap<([usize; 3], usize), u32> = HashMap::new();
    let mut triangles = Vec::new();
    let mut skipped = 0;

    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let mut vals = [0.0; 8];
                let mut ok = true;
                for (c, off) in CORNERS.iter().enumerate() {
                    match value_at([i + off[0], j + off[1], k + off[2]]) {
                        Some(v) => vals[c] = v,
                        None => ok = false,
                    }
                }
                if !ok {
                    skipped += 1;
                    continue;
                }
                let mut case = 0usize;
                for (c, v) in vals.iter().enumerate() {
                    if *v < 0.0 {
                        case |= 1 << c;
                    }
                }
                if case == 0 || case == 255 {
                    continue;
                }
                let mut local = [u32::MAX; 12];
                for tri in TRI_TABLE[case].chunks(3) {
                    if tri[0] < 0 {
                        break;
                    }
                    let mut ids = [0u32; 3];
                    for (slot, &e) in ids.iter_mut().zip(tri) {
                        let e = e as usize;
                        if local[e] == u32::MAX {
                            let [c0, c1] = EDGES[e];
                            let (o0, o1) = (CORNERS[c0], CORNERS[c1]);
                            let p0 = [i + o0[0], j + o0[1], k + o0[2]];
                            let p1 = [i + o1[0], j + o1[1], k + o1[2]];
                            let axis = (0..3)
                                .find(|&d| p0[d] != p1[d])
                                .expect("edge spans an axis");
                            let key = (if p0[axis] < p1[axis] { p0 } else { p1 }, axis);
                            let id = *edge_ids.entry(key).or_insert_with(|| {
                                let ax = Axis::from_index(axis);
                                let mut rest = 0.0;
                                for d in 0..3 {
                                    if d != axis {
                                        rest += cached[d][p0[d]].expect("corner evaluable");
                                    }
                                }
                                let phi = Shifted {
                                    comp: surface.component(ax),
                                    offset: rest,
                                };
                                let t = edge_root(
                                    &phi,
                                    coords[axis][p0[axis]],
                                    coords[axis][p1[axis]],
                                    vals[c0],
                                    vals[c1],
                                );
                                let mut pt = [0.0; 3];
                                for d in 0..3 {
                                    pt[d] = coords[d][p0[d]];
                                }
                                pt[axis] = t;
                                vertices.push(SurfacePoint::from_array(pt));
                                (vertices.len() - 1) as u32
                            });
                            local[e] = id;
                        }
                        *slot = local[e];
                    }
                    triangles.push(ids);
                }
            }
        }
    }

    let vertex_k = vertices
        .iter()
        .map(|p| {
            implicit_jet(surface, p)
                .and_then(|j| gauss_curvature_implicit(&j))
                .unwrap_or(f64::NAN)
        })
        .collect();
    Mesh {
        vertices,
        triangles,
        vertex_k,
        skipped_cells: skipped,
        grid: *grid,
    }
}

/// OBJ text: `v` records with 17 significant digits, then 1-based `f` records.
pub fn obj_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        s.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", v.x, v.y, v.z));
    }
    for t in &mesh.triangles {
        s.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    s
}

pub fn export_obj(mesh: &Mesh, path: &Path) -> std::io::Result<()> {
    std::fs::File::create(path)?.write_all(obj_string(mesh).as_bytes())
}

#[derive(Serialize)]
struct MeshReport<'a> {
    #[serde(rename = "K")]
    k: &'a [f64],
    skipped_cells: usize,
    grid: &'a GridSpec,
}

pub fn report_string(mesh: &Mesh) -> String {
    let report = MeshReport {
        k: &mesh.vertex_k,
        skipped_cells: mesh.skipped_cells,
        grid: &mesh.grid,
    };
    serde_json::to_string_pretty(&report).expect("mesh report serializes") + "\n"
}

pub fn export_report(mesh: &Mesh, path: &Path) -> std::io::Result<()> {
    std::fs::File::create(path)?.write_all(report_string(mesh).as_bytes())
}
