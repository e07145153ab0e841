//! The tetragonal holed trapezohedron family.
//!
//! A parameter `(q₁, …, q₄, t)` with `∏qᵢ = 1` and `t ≥ ½(qᵢ − qᵢ⁻¹)` fixes
//! planar points `Pᵢ, Rᵢ, Sᵢ, Qᵢ`, circles `Cᵢ` about `Rᵢ` through the origin,
//! and lifted vertices `P̃ᵢ, Q̃ᵢ` on the hemispheres over the `Cᵢ`. The
//! polyhedron has vertices `O, ∞, P̃ᵢ, Q̃ᵢ`, vertical faces over the lines
//! `PᵢPᵢ₊₁` and hemispherical faces over the `Cᵢ`. Its dihedral angle along
//! `L̂ᵢ = P̃ᵢQ̃ᵢ` is `αᵢ` with `cos αᵢ = (qᵢ − t)/√(1 + t²)`; every other
//! dihedral angle is `π/2`.
//!
//! Indices are 0-based in code and cyclic mod 4.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeo::{distance, BoundaryPoint, HPoint, Plane, Side, Vertex};
use crate::mesh::SurfaceMesh;

/// Tolerance on the `ℬ` inequalities accepted by [`BParams::new`].
pub const DOMAIN_TOL: f64 = 1e-10;
/// A lifted vertex is ideal when its height is below this multiple of `|Rᵢ|`.
pub const IDEAL_HEIGHT_REL: f64 = 1e-10;

#[inline]
fn nx(i: usize) -> usize {
    (i + 1) % 4
}

#[inline]
fn pv(i: usize) -> usize {
    (i + 3) % 4
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// A point of `ℬ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BParams {
    pub q: [f64; 4],
    pub t: f64,
}

impl BParams {
    /// Renormalizes `q` by its geometric mean, then checks the `ℬ` inequalities.
    pub fn new(q: [f64; 4], t: f64) -> Result<Self> {
        if q.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::OutsideDomain(format!("q must be positive, got {q:?}")));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::OutsideDomain(format!("t must be non-negative, got {t}")));
        }
        let mean = (q.iter().map(|x| x.ln()).sum::<f64>() / 4.0).exp();
        let q = q.map(|x| x / mean);
        for (i, &qi) in q.iter().enumerate() {
            let bound = 0.5 * (qi - 1.0 / qi);
            if t < bound - DOMAIN_TOL * (1.0 + bound.abs()) {
                return Err(Error::OutsideDomain(format!("t = {t} below ½(q{} − 1/q{}) = {bound}", i + 1, i + 1)));
            }
        }
        Ok(BParams { q, t })
    }

    /// Smallest admissible `t` for the given `q` (after renormalization).
    pub fn t_min(q: &[f64; 4]) -> f64 {
        q.iter().map(|&x| 0.5 * (x - 1.0 / x)).fold(0.0, f64::max)
    }

    /// `(1 − qᵢqᵢ₊₁)t − (qᵢ + qᵢ₊₁)`; non-negative exactly when face pair `i` is holed.
    pub fn hole_margin(&self, i: usize) -> f64 {
        let (a, b) = (self.q[i], self.q[nx(i)]);
        (1.0 - a * b) * self.t - (a + b)
    }

    pub fn is_holed(&self, i: usize) -> bool {
        self.hole_margin(i) >= 0.0
    }

    /// Membership in the non-holed part `ℬ₀`.
    pub fn in_b0(&self) -> bool {
        (0..4).all(|i| !self.is_holed(i))
    }

    /// Cyclic relabeling `qᵢ ↦ qᵢ₊₁`.
    pub fn rotated(&self) -> BParams {
        BParams { q: [self.q[1], self.q[2], self.q[3], self.q[0]], t: self.t }
    }

    /// Distance in the `(log q, t)` coordinates.
    pub fn deviation(&self, other: &BParams) -> f64 {
        let dq = (0..4).map(|i| (self.q[i].ln() - other.q[i].ln()).abs()).fold(0.0, f64::max);
        dq.max((self.t - other.t).abs())
    }
}

/// Dihedral angles `αᵢ ∈ [0, π)` at the edges `L̂ᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleParams {
    pub alpha: [f64; 4],
}

impl AngleParams {
    pub fn new(alpha: [f64; 4]) -> Result<Self> {
        for &a in &alpha {
            if !(0.0..std::f64::consts::PI).contains(&a) {
                return Err(Error::OutsideDomain(format!("angle {a} outside [0, π)")));
            }
        }
        Ok(AngleParams { alpha })
    }

    pub fn from_cosines(c: [f64; 4]) -> Result<Self> {
        for &x in &c {
            if !(x > -1.0 && x <= 1.0) {
                return Err(Error::CosineOutOfRange(x));
            }
        }
        Ok(AngleParams { alpha: c.map(f64::acos) })
    }

    pub fn cosines(&self) -> [f64; 4] {
        self.alpha.map(f64::cos)
    }
}

/// The map `f`.
pub fn angles_from_b(b: &BParams) -> AngleParams {
    let s = (1.0 + b.t * b.t).sqrt();
    let c = b.q.map(|q| ((q - b.t) / s).clamp(-1.0, 1.0));
    AngleParams { alpha: c.map(f64::acos) }
}

/// Inverse of `f`: with `qᵢ(t) = cᵢ√(1 + t²) + t`, solves `Σ ln qᵢ(t) = 0`,
/// which is strictly increasing in `t` on the range where all `qᵢ > 0`.
pub fn b_from_angles(a: &AngleParams) -> Result<BParams> {
    let c = a.cosines();
    for &x in &c {
        if !(x > -1.0 && x <= 1.0 + 1e-15) {
            return Err(Error::CosineOutOfRange(x));
        }
    }
    let c = c.map(|x| x.min(1.0));
    let q_at = |t: f64| c.map(|ci| ci * (1.0 + t * t).sqrt() + t);
    let g = |t: f64| -> f64 {
        let q = q_at(t);
        if q.iter().any(|&x| x <= 0.0) {
            f64::NEG_INFINITY
        } else {
            q.iter().map(|x| x.ln()).sum()
        }
    };
    let dg = |t: f64| -> f64 {
        let s = (1.0 + t * t).sqrt();
        c.iter().map(|&ci| (ci * t / s + 1.0) / (ci * s + t)).sum()
    };

    // qᵢ(t) > 0 iff t > −cᵢ/√(1 − cᵢ²) for cᵢ < 0.
    let mut lo = c.iter().filter(|&&ci| ci < 0.0).map(|&ci| -ci / (1.0 - ci * ci).sqrt()).fold(0.0, f64::max);
    if g(lo) >= 0.0 {
        // Only possible with all cᵢ = 1, where t = 0.
        return BParams::new(q_at(lo), lo);
    }
    let mut hi = lo.max(1.0);
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::OutsideDomain("no root for the angle equation".into()));
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut t = if -g(lo) < g(hi) { lo } else { hi };
    for _ in 0..3 {
        let d = dg(t);
        if !(d > 0.0) {
            break;
        }
        let next = t - g(t) / d;
        if !(next.is_finite()) || next < lo - (hi - lo) || next > hi + (hi - lo) {
            break;
        }
        t = next;
    }
    let t = t.max(0.0);
    BParams::new(q_at(t), t)
}

/// Planar configuration and lifted vertices of a trapezohedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapezohedronGeometry {
    pub b: BParams,
    pub p: [f64; 4],
    #[serde(rename = "P")]
    pub big_p: [Complex64; 4],
    #[serde(rename = "R")]
    pub big_r: [Complex64; 4],
    #[serde(rename = "S")]
    pub big_s: [Complex64; 4],
    #[serde(rename = "Q")]
    pub big_q: [Complex64; 4],
    /// Radii of the circles `Cᵢ` about `Rᵢ`; equal to `|Rᵢ|`.
    pub radii: [f64; 4],
    /// Vertical planes over `PᵢPᵢ₊₁`, directed from `Pᵢ` to `Pᵢ₊₁`.
    pub faces_v: [Plane; 4],
    /// Hemispheres over the `Cᵢ`.
    pub faces_h: [Plane; 4],
    pub p_tilde: [Vertex; 4],
    pub q_tilde: [Vertex; 4],
    pub holed: [bool; 4],
    pub alpha: [f64; 4],
}

/// Interior side of every face: the origin side of each vertical plane and
/// the region above each hemisphere. Both are `Side::Positive`.
pub const INTERIOR: Side = Side::Positive;

pub fn build_geometry(b: &BParams) -> TrapezohedronGeometry {
    build_geometry_scaled(b, 1.0)
}

/// Construction with `p₁ = scale`; the result is the image of the `p₁ = 1`
/// construction under `z ↦ scale·z`.
pub fn build_geometry_scaled(b: &BParams, scale: f64) -> TrapezohedronGeometry {
    let t = b.t;
    let mut p = [scale; 4];
    for i in 0..3 {
        p[i + 1] = b.q[i] * p[i];
    }
    let c = Complex64::new;
    let big_p = [c(p[0], p[1]), c(-p[2], p[1]), c(-p[2], -p[3]), c(p[0], -p[3])];
    let big_r = [c(p[0], t * p[0]), c(-t * p[1], p[1]), c(-p[2], -t * p[2]), c(t * p[3], -p[3])];
    let radii = big_r.map(|r| r.norm());

    // Second intersection of Cᵢ and Cᵢ₊₁ is the reflection of O in line RᵢRᵢ₊₁.
    let big_s: [Complex64; 4] = std::array::from_fn(|i| {
        let (r0, r1) = (big_r[i], big_r[nx(i)]);
        let d = r1 - r0;
        let foot = r0 - d * (dot(r0, d) / d.norm_sqr());
        foot * 2.0
    });
    // Qᵢ = line OSᵢ ∩ line PᵢPᵢ₊₁.
    let big_q: [Complex64; 4] = std::array::from_fn(|i| {
        let (a, d) = (big_p[i], big_p[nx(i)] - big_p[i]);
        let s = big_s[i];
        // a + u·d = λ·s  ⇒  u = cross(s, a)/cross(d, s)
        let u = cross(s, a) / cross(d, s);
        a + d * u
    });

    let faces_v: [Plane; 4] =
        std::array::from_fn(|i| Plane::vertical_through(big_p[i], big_p[nx(i)]).expect("distinct corner points"));
    let faces_h: [Plane; 4] = std::array::from_fn(|i| Plane::hemisphere(big_r[i], radii[i]).expect("positive radius"));

    let lift = |z: Complex64, i: usize| -> Vertex {
        let h2 = radii[i] * radii[i] - (z - big_r[i]).norm_sqr();
        let h = h2.max(0.0).sqrt();
        if h < IDEAL_HEIGHT_REL * radii[i] {
            Vertex::Ideal(BoundaryPoint::Finite(z))
        } else {
            Vertex::Finite(HPoint { x: z.re, y: z.im, h })
        }
    };
    let p_tilde = std::array::from_fn(|i| lift(big_p[i], i));
    let q_tilde = std::array::from_fn(|i| lift(big_q[i], i));
    let holed = std::array::from_fn(|i| b.is_holed(i));
    let alpha = angles_from_b(b).alpha;

    TrapezohedronGeometry {
        b: *b,
        p,
        big_p,
        big_r,
        big_s,
        big_q,
        radii,
        faces_v,
        faces_h,
        p_tilde,
        q_tilde,
        holed,
        alpha,
    }
}

/// Kind of a polyhedron edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// `L̂ᵢ = P̃ᵢQ̃ᵢ`: `Vᵢ ∩ Hᵢ`, dihedral `αᵢ`.
    Cone,
    /// `Q̃ᵢP̃ᵢ₊₁`: `Vᵢ ∩ Hᵢ₊₁`.
    Side,
    /// `OQ̃ᵢ`: `Hᵢ ∩ Hᵢ₊₁`.
    Bottom,
    /// `∞P̃ᵢ`: `Vᵢ₋₁ ∩ Vᵢ`.
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAngle {
    pub kind: EdgeKind,
    pub index: usize,
    /// Measured interior dihedral angle, `None` when the faces are tangent.
    pub measured: Option<f64>,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DihedralReport {
    /// Measured angles at the `L̂ᵢ`, `None` for degenerate (ideal) edges.
    pub cone: [Option<f64>; 4],
    /// Largest deviation of a measured `L̂ᵢ` angle from `αᵢ`.
    pub cone_error: f64,
    /// Largest deviation of the other twelve edges from `π/2`.
    pub right_angle_error: f64,
    pub edges: Vec<EdgeAngle>,
}

impl TrapezohedronGeometry {
    /// The two faces meeting along an edge.
    pub fn edge_faces(&self, kind: EdgeKind, i: usize) -> (Plane, Plane) {
        match kind {
            EdgeKind::Cone => (self.faces_v[i], self.faces_h[i]),
            EdgeKind::Side => (self.faces_v[i], self.faces_h[nx(i)]),
            EdgeKind::Bottom => (self.faces_h[i], self.faces_h[nx(i)]),
            EdgeKind::Top => (self.faces_v[pv(i)], self.faces_v[i]),
        }
    }

    /// Endpoints of an edge, in the order used by the edge's name.
    pub fn edge_vertices(&self, kind: EdgeKind, i: usize) -> (Vertex, Vertex) {
        let o = Vertex::Ideal(BoundaryPoint::new(0.0, 0.0));
        match kind {
            EdgeKind::Cone => (self.p_tilde[i], self.q_tilde[i]),
            EdgeKind::Side => (self.q_tilde[i], self.p_tilde[nx(i)]),
            EdgeKind::Bottom => (o, self.q_tilde[i]),
            EdgeKind::Top => (Vertex::infinity(), self.p_tilde[i]),
        }
    }

    pub fn measure_edge(&self, kind: EdgeKind, i: usize) -> Option<f64> {
        let (a, b) = self.edge_faces(kind, i);
        a.wedge_angle(INTERIOR, &b, INTERIOR).ok()
    }

    /// Geometric hole test: `Qᵢ` lies beyond `Pᵢ₊₁` on the ray from `Pᵢ`.
    /// Returns the affine parameter of `Qᵢ` on `Pᵢ → Pᵢ₊₁`.
    pub fn q_parameter(&self, i: usize) -> f64 {
        let d = self.big_p[nx(i)] - self.big_p[i];
        dot(self.big_q[i] - self.big_p[i], d) / d.norm_sqr()
    }

    pub fn holed_geometric(&self, i: usize) -> bool {
        let s = self.q_parameter(i);
        !(0.0..1.0).contains(&s)
    }

    pub fn vertices_all_ideal(&self) -> bool {
        self.p_tilde.iter().chain(self.q_tilde.iter()).all(Vertex::is_ideal)
    }

    /// An interior point close to `O`, above all four hemispheres and on the
    /// origin side of every vertical plane.
    pub fn interior_sample(&self) -> HPoint {
        let h = 2.0 * self.radii.iter().cloned().fold(0.0, f64::max);
        HPoint { x: 0.0, y: 0.0, h }
    }
}

pub fn check_dihedrals(g: &TrapezohedronGeometry) -> DihedralReport {
    use std::f64::consts::FRAC_PI_2;
    let mut edges = Vec::with_capacity(16);
    let mut cone = [None; 4];
    let mut cone_error = 0.0f64;
    let mut right_angle_error = 0.0f64;
    for kind in [EdgeKind::Cone, EdgeKind::Side, EdgeKind::Bottom, EdgeKind::Top] {
        for i in 0..4 {
            let expected = if kind == EdgeKind::Cone { g.alpha[i] } else { FRAC_PI_2 };
            let degenerate = kind == EdgeKind::Cone && {
                let (u, v) = g.edge_vertices(kind, i);
                u.approx_eq(&v, 1e-12) || (u.is_ideal() && v.is_ideal())
            };
            let measured = if degenerate { None } else { g.measure_edge(kind, i) };
            if let Some(m) = measured {
                let err = (m - expected).abs();
                if kind == EdgeKind::Cone {
                    cone[i] = Some(m);
                    cone_error = cone_error.max(err);
                } else {
                    right_angle_error = right_angle_error.max(err);
                }
            } else if kind != EdgeKind::Cone {
                right_angle_error = f64::INFINITY;
            }
            edges.push(EdgeAngle { kind, index: i, measured, expected });
        }
    }
    DihedralReport { cone, cone_error, right_angle_error, edges }
}

/// Length of `L̂ᵢ = P̃ᵢQ̃ᵢ`.
pub fn edge_length(g: &TrapezohedronGeometry, i: usize) -> Result<f64> {
    match (g.p_tilde[i], g.q_tilde[i]) {
        (Vertex::Finite(a), Vertex::Finite(b)) => {
            let d = distance(&a, &b);
            if d <= 0.0 {
                Err(Error::ZeroLength(i))
            } else {
                Ok(d)
            }
        }
        _ => Err(Error::IdealEdge(i)),
    }
}

pub fn edge_lengths(g: &TrapezohedronGeometry) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (i, l) in out.iter_mut().enumerate() {
        *l = edge_length(g, i)?;
    }
    Ok(out)
}

/// Labels of the ten combinatorial vertices, in mesh order before merging.
pub const VERTEX_LABELS: [&str; 10] = ["inf", "O", "Pt1", "Pt2", "Pt3", "Pt4", "Qt1", "Qt2", "Qt3", "Qt4"];

/// Outward-oriented boundary surface: the vertical quads
/// `(∞, P̃ᵢ, Q̃ᵢ, P̃ᵢ₊₁)` and the hemisphere quads `(O, Q̃ᵢ₊₁, P̃ᵢ₊₁, Q̃ᵢ)`,
/// each split from its first vertex. Coincident ideal vertices are merged;
/// triangles that collapse keep their slot with a repeated index.
pub fn boundary_mesh(g: &TrapezohedronGeometry) -> SurfaceMesh {
    let raw: Vec<Vertex> = std::iter::once(Vertex::infinity())
        .chain(std::iter::once(Vertex::Ideal(BoundaryPoint::new(0.0, 0.0))))
        .chain(g.p_tilde.iter().copied())
        .chain(g.q_tilde.iter().copied())
        .collect();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut index = [0usize; 10];
    for (k, v) in raw.iter().enumerate() {
        let found =
            if v.is_ideal() { vertices.iter().position(|w| w.is_ideal() && w.approx_eq(v, 1e-12)) } else { None };
        index[k] = found.unwrap_or_else(|| {
            vertices.push(*v);
            vertices.len() - 1
        });
    }
    let (inf, o) = (index[0], index[1]);
    let pt = |i: usize| index[2 + i];
    let qt = |i: usize| index[6 + i];
    let mut triangles = Vec::with_capacity(16);
    let mut carriers = Vec::with_capacity(16);
    for i in 0..4 {
        let quad = [inf, pt(i), qt(i), pt(nx(i))];
        triangles.push([quad[0], quad[1], quad[2]]);
        triangles.push([quad[0], quad[2], quad[3]]);
        carriers.extend([Some(g.faces_v[i]); 2]);
    }
    for i in 0..4 {
        let j = nx(i);
        let quad = [o, qt(j), pt(j), qt(i)];
        triangles.push([quad[0], quad[1], quad[2]]);
        triangles.push([quad[0], quad[2], quad[3]]);
        carriers.extend([Some(g.faces_h[j]); 2]);
    }
    SurfaceMesh { vertices, triangles, carriers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn close(a: Complex64, x: f64, y: f64) -> bool {
        (a - Complex64::new(x, y)).norm() < 1e-12
    }

    #[test]
    fn angles_from_b_examples() {
        let a = angles_from_b(&BParams::new([1.0; 4], 0.0).unwrap());
        assert_eq!(a.alpha, [0.0; 4]);
        let a = angles_from_b(&BParams::new([1.0; 4], 1.0).unwrap());
        assert!(a.alpha.iter().all(|x| (x - FRAC_PI_2).abs() < 1e-15));
        let b = BParams::new([0.5, 0.5, 2.0, 2.0], 2.0).unwrap();
        let a = angles_from_b(&b);
        assert!((a.cosines()[0] + 1.5 / 5f64.sqrt()).abs() < 1e-15);
        assert!((a.alpha[0] - 2.306_110_779_611_565).abs() < 1e-12);
    }

    #[test]
    fn b_from_angles_examples() {
        let b = b_from_angles(&AngleParams::new([0.0; 4]).unwrap()).unwrap();
        assert_eq!(b.t, 0.0);
        assert!(b.q.iter().all(|q| (q - 1.0).abs() < 1e-15));
        let b = b_from_angles(&AngleParams::new([FRAC_PI_2; 4]).unwrap()).unwrap();
        assert!((b.t - 1.0).abs() < 1e-12);
        assert!(b.q.iter().all(|q| (q - 1.0).abs() < 1e-12));
        assert!(matches!(AngleParams::from_cosines([-1.0, 0.0, 0.0, 0.0]), Err(Error::CosineOutOfRange(_))));
    }

    #[test]
    fn domain_is_enforced() {
        assert!(BParams::new([2.0, 0.5, 1.0, 1.0], 0.0).is_err());
        assert!(BParams::new([2.0, 0.5, 1.0, 1.0], 0.75).is_ok());
        assert!(BParams::new([1.0, 1.0, 1.0, -1.0], 1.0).is_err());
        let b = BParams::new([2.0, 2.0, 2.0, 2.0], 1.0).unwrap();
        assert!(b.q.iter().all(|q| (q - 1.0).abs() < 1e-15));
    }

    #[test]
    fn symmetric_geometry() {
        let g = build_geometry(&BParams::new([1.0; 4], 1.0).unwrap());
        assert!(close(g.big_r[0], 1.0, 1.0) && close(g.big_r[1], -1.0, 1.0));
        assert!(close(g.big_r[2], -1.0, -1.0) && close(g.big_r[3], 1.0, -1.0));
        assert!(close(g.big_s[0], 0.0, 2.0));
        assert!(close(g.big_q[0], 0.0, 1.0));
        let Vertex::Finite(q1) = g.q_tilde[0] else { panic!() };
        assert!((q1.x).abs() < 1e-12 && (q1.y - 1.0).abs() < 1e-12 && (q1.h - 1.0).abs() < 1e-12);
        let Vertex::Finite(p1) = g.p_tilde[0] else { panic!() };
        assert!((p1.x - 1.0).abs() < 1e-12 && (p1.y - 1.0).abs() < 1e-12 && (p1.h - SQRT_2).abs() < 1e-12);
        assert_eq!(g.holed, [false; 4]);
        let r = check_dihedrals(&g);
        assert!(r.cone_error < 1e-12 && r.right_angle_error < 1e-12);
        for l in edge_lengths(&g).unwrap() {
            assert!((l - SQRT_2.acosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn octahedron_geometry() {
        let g = build_geometry(&BParams::new([1.0; 4], 0.0).unwrap());
        assert!(g.vertices_all_ideal());
        for i in 0..4 {
            assert!((g.big_q[i] - g.big_p[i]).norm() < 1e-12);
        }
        let r = check_dihedrals(&g);
        assert!(r.right_angle_error < 1e-12, "{r:?}");
        assert_eq!(r.cone, [None; 4]);
        assert_eq!(edge_lengths(&g), Err(Error::IdealEdge(0)));
        let m = boundary_mesh(&g);
        assert_eq!(m.triangles.len(), 16);
        assert_eq!(m.vertices.len(), 6);
        assert!(m.vertices.iter().all(Vertex::is_ideal));
        m.check_closed().unwrap();
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn holed_example() {
        let b = BParams::new([0.5, 0.5, 2.0, 2.0], 2.0).unwrap();
        assert!(b.is_holed(0));
        let g = build_geometry(&b);
        assert!(g.holed[0] && g.holed_geometric(0));
        let m = boundary_mesh(&g);
        m.check_closed().unwrap();
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn mesh_triangles_lie_on_carriers() {
        let b = BParams::new([0.8, 1.3, 1.1, 1.0], 0.9).unwrap();
        let m = boundary_mesh(&build_geometry(&b));
        assert!(m.carrier_residual() < 1e-9);
        assert_eq!(m.vertices.len(), 10);
    }
}
