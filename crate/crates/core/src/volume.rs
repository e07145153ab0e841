//! Signed volumes of tetrahedra and of closed oriented surfaces.
//!
//! The signed volume of a geodesic triangle's cone to `∞` is computed in
//! closed form: over a triangle on the hemisphere `|z − c|² + h² = r²` the
//! region above it has volume `∫ dA / (2(r² − |z − c|²))`. Splitting the
//! projected triangle into fans about `c`, each fan integrates to a sum of
//! Lobachevsky functions. A tetrahedron is the alternating sum of the cones
//! over its four faces, and a closed surface is the sum of the tetrahedra
//! spanned by an apex and its triangles.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeo::{BoundaryPoint, HPoint, Isometry, Vertex};
use crate::mesh::SurfaceMesh;
use crate::polyhedron::{
    angles_from_b, b_from_angles, boundary_mesh, build_geometry, edge_lengths, AngleParams, BParams, INTERIOR,
};
use crate::quadrature::Region;

/// Environment variable capping the worker threads used by volume sums.
pub const THREADS_ENV: &str = "CONEWRIGHT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedVolume {
    pub value: f64,
    pub est_error: f64,
}

/// Four vertices; the orientation is the vertex order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tetra(pub [Vertex; 4]);

fn zeta_even() -> &'static [f64; 30] {
    static TABLE: OnceLock<[f64; 30]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut z = [0.0; 30];
        z[0] = PI * PI / 6.0;
        z[1] = PI.powi(4) / 90.0;
        for (k, slot) in z.iter_mut().enumerate().skip(2) {
            let s = 2 * (k as i32 + 1);
            let n_max = 400;
            let mut acc: f64 = (2..=n_max).rev().map(|n| (n as f64).powi(-s)).sum();
            acc += (n_max as f64).powi(1 - s) / (s - 1) as f64;
            *slot = 1.0 + acc;
        }
        z
    })
}

/// Clausen function `Cl₂(θ) = −∫₀^θ ln|2 sin(u/2)| du`.
pub fn clausen(theta: f64) -> f64 {
    let mut x = theta.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    if x == 0.0 {
        return 0.0;
    }
    let z = zeta_even();
    let u = (x / TAU).powi(2);
    let mut pow = u;
    let mut series = 0.0;
    for (k, zk) in z.iter().enumerate() {
        let k1 = (k + 1) as f64;
        let term = zk / (k1 * (2.0 * k1 + 1.0)) * pow;
        series += term;
        if term < 1e-18 {
            break;
        }
        pow *= u;
    }
    x - x * x.abs().ln() + x * series
}

/// Lobachevsky function `Λ(x) = −∫₀^x ln|2 sin u| du = ½ Cl₂(2x)`.
pub fn lobachevsky(x: f64) -> f64 {
    0.5 * clausen(2.0 * x)
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Antiderivative in `φ` of the fan integrand for a chord at distance
/// `r cos δ` from the center.
fn fan_primitive(delta: f64, phi: f64) -> f64 {
    0.25 * (lobachevsky(delta + phi) - lobachevsky(delta - phi) + 2.0 * lobachevsky(FRAC_PI_2 - phi))
}

/// `∫ dA / (2(r² − |z − c|²))` over the fan triangle `(c, a, b)`, signed
/// positive when `a → b` turns counter-clockwise about `c`.
fn fan_integral(c: Complex64, r: f64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len = ab.norm();
    if len <= 1e-15 * r {
        return 0.0;
    }
    let e = ab / len;
    let ca = a - c;
    let foot = ca - e * (ca.re * e.re + ca.im * e.im);
    let d = foot.norm();
    if d <= 1e-14 * r {
        return 0.0;
    }
    let u = foot / d;
    let delta = (d / r).min(1.0).acos();
    let angle = |p: Complex64| {
        let w = p - c;
        cross(u, w).atan2(w.re * u.re + w.im * u.im).clamp(-delta, delta)
    };
    fan_primitive(delta, angle(b)) - fan_primitive(delta, angle(a))
}

/// Hemisphere through three vertices, `None` when their projections are
/// collinear (a vertical plane) or a vertex is `∞`.
fn hemisphere_through(v: &[Vertex; 3]) -> Option<(Complex64, f64)> {
    let mut z = [Complex64::new(0.0, 0.0); 3];
    let mut h2 = [0.0; 3];
    for k in 0..3 {
        z[k] = v[k].projection()?;
        let h = v[k].height()?;
        h2[k] = h * h;
    }
    let (d1, d2) = (z[1] - z[0], z[2] - z[0]);
    let det = cross(d1, d2);
    let scale = d1.norm() * d2.norm();
    if det.abs() <= 1e-13 * scale || scale == 0.0 {
        return None;
    }
    // 2 (zₖ − z₀)·c = |zₖ|² + hₖ² − |z₀|² − h₀², solved relative to z₀.
    let k1 = 0.5 * (d1.norm_sqr() + h2[1] - h2[0]);
    let k2 = 0.5 * (d2.norm_sqr() + h2[2] - h2[0]);
    let cx = (k1 * d2.im - k2 * d1.im) / det;
    let cy = (d1.re * k2 - d2.re * k1) / det;
    let rel = Complex64::new(cx, cy);
    let r2 = rel.norm_sqr() + h2[0];
    Some((z[0] + rel, r2.sqrt()))
}

/// Signed volume of the cone from `∞` over the geodesic triangle `(a, b, c)`;
/// positive when the projected triangle is clockwise.
pub fn cone_volume(v: &[Vertex; 3]) -> f64 {
    let Some((center, r)) = hemisphere_through(v) else { return 0.0 };
    let z = v.map(|x| x.projection().expect("finite by hemisphere_through"));
    let mut total = 0.0;
    for k in 0..3 {
        total += fan_integral(center, r, z[k], z[(k + 1) % 3]);
    }
    -total
}

fn tetra_by_cones(v: &[Vertex; 4]) -> f64 {
    cone_volume(&[v[1], v[2], v[3]]) - cone_volume(&[v[0], v[2], v[3]]) + cone_volume(&[v[0], v[1], v[3]])
        - cone_volume(&[v[0], v[1], v[2]])
}

/// Shape parameter of an all-ideal tetrahedron: the image of `v₃` under the
/// map sending `v₀, v₁, v₂` to `∞, 0, 1`.
pub fn ideal_shape(v: &[BoundaryPoint; 4]) -> Result<BoundaryPoint> {
    let g = Isometry::normalizing(&v[1], &v[2], &v[0])?;
    Ok(g.apply_boundary(&v[3]))
}

/// Bloch–Wigner sum `Λ(arg z) + Λ(arg 1/(1 − z)) + Λ(arg(1 − 1/z))`, the
/// volume of the ideal tetrahedron `(0, 1, ∞, z)` for `Im z > 0`.
pub fn ideal_volume_from_shape(z: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    lobachevsky(z.arg()) + lobachevsky((one / (one - z)).arg()) + lobachevsky((one - one / z).arg())
}

pub fn tetra_volume(t: &Tetra) -> Result<SignedVolume> {
    let v = &t.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if v[i].approx_eq(&v[j], 1e-13) {
                return Err(Error::CoincidentVertices);
            }
        }
    }
    let value = if let [Vertex::Ideal(a), Vertex::Ideal(b), Vertex::Ideal(c), Vertex::Ideal(d)] = v {
        match ideal_shape(&[*a, *b, *c, *d])? {
            BoundaryPoint::Finite(z) if z.im.abs() > 1e-15 * (1.0 + z.norm()) => -ideal_volume_from_shape(z),
            _ => 0.0,
        }
    } else {
        tetra_by_cones(v)
    };
    Ok(SignedVolume { value, est_error: 1e-13 * (1.0 + value.abs()) })
}

/// Summation over a fixed binary tree, independent of the thread count.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        n => {
            let (a, b) = x.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
            builder = builder.num_threads(n.max(1));
        }
        builder.build().expect("thread pool")
    })
}

/// Signed enclosed volume `V(f)` of a closed oriented surface, as the sum of
/// the signed tetrahedra joining `apex` to each triangle.
pub fn enclosed_volume(m: &SurfaceMesh, apex: &HPoint) -> Result<SignedVolume> {
    m.check_closed()?;
    let apex = Vertex::Finite(*apex);
    // Each triangle is evaluated in a canonical vertex order, so reversing the
    // orientation negates every term exactly.
    let tris: Vec<(f64, [Vertex; 3])> = m
        .proper_triangles()
        .map(|t| {
            let k = (0..3).min_by_key(|&k| t[k]).expect("three vertices");
            let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let (sign, order) = if b < c { (1.0, [a, b, c]) } else { (-1.0, [a, c, b]) };
            (sign, order.map(|i| m.vertices[i]))
        })
        .collect();
    let terms: Vec<f64> =
        pool().install(|| tris.par_iter().map(|(sign, v)| sign * tetra_by_cones(&[apex, v[0], v[1], v[2]])).collect());
    let value = pairwise_sum(&terms);
    let magnitude: f64 = terms.iter().map(|x| x.abs()).sum();
    Ok(SignedVolume { value, est_error: 1e-14 * (1.0 + magnitude) })
}

/// Degree-weighted volume of the trapezohedron with parameter `b`.
pub fn structure_volume(b: &BParams) -> SignedVolume {
    let g = build_geometry(b);
    enclosed_volume(&boundary_mesh(&g), &g.interior_sample()).expect("trapezohedron boundary is closed")
}

/// Geometric volume of a non-holed trapezohedron by direct quadrature of
/// `dA dh/h³` over the intersection of its face half-spaces. Independent of
/// the closed-form cone sums; returns (value, estimated error).
pub fn quadrature_volume(b: &BParams, tol: f64) -> Result<(f64, f64)> {
    if !b.in_b0() {
        return Err(Error::OutsideDomain("quadrature needs a non-holed parameter".into()));
    }
    let g = build_geometry(b);
    let halfspaces = g.faces_v.iter().chain(g.faces_h.iter()).map(|p| (*p, INTERIOR)).collect();
    let (xs, ys) = (g.big_p.map(|z| z.re), g.big_p.map(|z| z.im));
    let lo = |v: [f64; 4]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = |v: [f64; 4]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Uneven margins keep quadrature nodes off `O`, where the fiber is infinite.
    let region = Region { halfspaces, x: (lo(xs) - 0.0123, hi(xs) + 0.0371), y: (lo(ys) - 0.0217, hi(ys) + 0.0059) };
    Ok(region.volume(tol))
}

/// One end of a Schläfli path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathEnd {
    B(BParams),
    Alpha(AngleParams),
}

/// A straight path in `(log q, t)` or, when both ends are angles, in `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchlafliPath {
    pub from: PathEnd,
    pub to: PathEnd,
}

#[derive(Serialize, Deserialize)]
struct PathFile {
    schema: String,
    from: PathEnd,
    to: PathEnd,
}

impl SchlafliPath {
    pub fn from_json(s: &str) -> Result<Self> {
        let f: PathFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if f.schema != "path/1" {
            return Err(Error::Parse(format!("expected schema path/1, got {}", f.schema)));
        }
        for end in [&f.from, &f.to] {
            match end {
                PathEnd::B(b) => {
                    BParams::new(b.q, b.t)?;
                }
                PathEnd::Alpha(a) => {
                    AngleParams::new(a.alpha)?;
                }
            }
        }
        Ok(SchlafliPath { from: f.from, to: f.to })
    }

    pub fn to_json(&self) -> String {
        let f = PathFile { schema: "path/1".into(), from: self.from, to: self.to };
        serde_json::to_string_pretty(&f).expect("serializable")
    }

    pub fn reversed(&self) -> Self {
        SchlafliPath { from: self.to, to: self.from }
    }

    pub fn at(&self, s: f64) -> Result<BParams> {
        match (self.from, self.to) {
            (PathEnd::Alpha(a), PathEnd::Alpha(b)) => {
                let alpha = std::array::from_fn(|i| (1.0 - s) * a.alpha[i] + s * b.alpha[i]);
                b_from_angles(&AngleParams { alpha })
            }
            (a, b) => {
                let (a, b) = (end_to_b(&a)?, end_to_b(&b)?);
                let q = std::array::from_fn(|i| ((1.0 - s) * a.q[i].ln() + s * b.q[i].ln()).exp());
                BParams::new(q, (1.0 - s) * a.t + s * b.t)
            }
        }
    }
}

fn end_to_b(e: &PathEnd) -> Result<BParams> {
    match e {
        PathEnd::B(b) => Ok(*b),
        PathEnd::Alpha(a) => b_from_angles(a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchlafliReport {
    pub steps: usize,
    pub step: f64,
    pub max_rel_error: f64,
    /// Parameter at which the largest deviation occurred.
    pub worst_s: f64,
}

/// Compares the central difference of the structure volume along the path
/// with `−½ Σ ℓ(L̂ᵢ) dαᵢ/ds` at the interior nodes `s = k/steps`.
pub fn schlafli_check(path: &SchlafliPath, steps: usize) -> Result<SchlafliReport> {
    if steps < 2 {
        return Err(Error::OutsideDomain("at least two steps are required".into()));
    }
    let h = 1.0 / steps as f64;
    let nodes: Vec<usize> = (1..steps).collect();
    let results: Vec<Result<(f64, f64)>> = pool().install(|| {
        nodes
            .par_iter()
            .map(|&k| {
                let s = k as f64 * h;
                let at = |s: f64| -> Result<BParams> {
                    let b = path.at(s)?;
                    if !b.in_b0() {
                        return Err(Error::PathExitsDomain(s));
                    }
                    Ok(b)
                };
                let (bm, b0, bp) = (at(s - h)?, at(s)?, at(s + h)?);
                let dv = (structure_volume(&bp).value - structure_volume(&bm).value) / (2.0 * h);
                let lengths = edge_lengths(&build_geometry(&b0)).map_err(|_| Error::PathExitsDomain(s))?;
                let (am, ap) = (angles_from_b(&bm).alpha, angles_from_b(&bp).alpha);
                let pred: f64 = -0.5 * (0..4).map(|i| lengths[i] * (ap[i] - am[i]) / (2.0 * h)).sum::<f64>();
                let err = if pred.abs() < 1e-12 { (dv - pred).abs() } else { (dv - pred).abs() / pred.abs() };
                Ok((s, err))
            })
            .collect()
    });
    let mut worst = (0.0, 0.0);
    for r in results {
        let (s, e) = r?;
        if e > worst.1 {
            worst = (s, e);
        }
    }
    Ok(SchlafliReport { steps, step: h, max_rel_error: worst.1, worst_s: worst.0 })
}
