//! Upper half-space model of hyperbolic 3-space.
//!
//! Points of the sphere at infinity are [`BoundaryPoint`]s (a complex number or
//! the tagged value `Infinity`), interior points are [`HPoint`]s with positive
//! height, and orientation-preserving isometries are unit-determinant complex
//! matrices up to sign ([`Isometry`]). All Möbius arithmetic branches
//! explicitly on `Infinity`; float infinities are never used as coordinates.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `tr²` comparisons used by [`Isometry::classify`].
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Entrywise distance to `±1` below which a `tr² = 4` element is the identity.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Determinant tolerance accepted by [`Isometry::new`] before renormalizing.
pub const DET_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoundaryRepr", into = "BoundaryRepr")]
pub enum BoundaryPoint {
    Finite(Complex64),
    Infinity,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoundaryRepr {
    Tag(String),
    Point([f64; 2]),
}

impl From<BoundaryPoint> for BoundaryRepr {
    fn from(p: BoundaryPoint) -> Self {
        match p {
            BoundaryPoint::Finite(z) => BoundaryRepr::Point([z.re, z.im]),
            BoundaryPoint::Infinity => BoundaryRepr::Tag("inf".into()),
        }
    }
}

impl TryFrom<BoundaryRepr> for BoundaryPoint {
    type Error = String;
    fn try_from(r: BoundaryRepr) -> std::result::Result<Self, String> {
        match r {
            BoundaryRepr::Point([x, y]) => Ok(BoundaryPoint::Finite(Complex64::new(x, y))),
            BoundaryRepr::Tag(s) if s == "inf" => Ok(BoundaryPoint::Infinity),
            BoundaryRepr::Tag(s) => Err(format!("expected [x, y] or \"inf\", got {s:?}")),
        }
    }
}

impl BoundaryPoint {
    pub fn new(x: f64, y: f64) -> Self {
        BoundaryPoint::Finite(Complex64::new(x, y))
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            BoundaryPoint::Finite(z) => Some(*z),
            BoundaryPoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn conj(&self) -> Self {
        match self {
            BoundaryPoint::Finite(z) => BoundaryPoint::Finite(z.conj()),
            BoundaryPoint::Infinity => BoundaryPoint::Infinity,
        }
    }

    /// Chordal distance on the Riemann sphere; `Infinity` is handled exactly.
    pub fn chordal_distance(&self, other: &BoundaryPoint) -> f64 {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
            (BoundaryPoint::Finite(z), BoundaryPoint::Infinity)
            | (BoundaryPoint::Infinity, BoundaryPoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (BoundaryPoint::Finite(z), BoundaryPoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }

    pub fn approx_eq(&self, other: &BoundaryPoint, tol: f64) -> bool {
        self.chordal_distance(other) <= tol
    }
}

impl From<Complex64> for BoundaryPoint {
    fn from(z: Complex64) -> Self {
        BoundaryPoint::Finite(z)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            BoundaryPoint::Infinity => write!(f, "∞"),
        }
    }
}

/// A point `(x, y, h)` of the upper half-space, `h > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !x.is_finite() || !y.is_finite() || !h.is_finite() {
            return Err(Error::NotInHalfSpace(h));
        }
        Ok(HPoint { x, y, h })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_z(z: Complex64, h: f64) -> Result<Self> {
        HPoint::new(z.re, z.im, h)
    }

    /// Coordinates on the hyperboloid `-X0² + X1² + X2² + X3² = -1`.
    pub fn to_hyperboloid(&self) -> [f64; 4] {
        let rho2 = self.x * self.x + self.y * self.y + self.h * self.h;
        [(1.0 + rho2) / (2.0 * self.h), self.x / self.h, self.y / self.h, (1.0 - rho2) / (2.0 * self.h)]
    }

    pub fn from_hyperboloid(v: [f64; 4]) -> Result<Self> {
        let h = 1.0 / (v[0] + v[3]);
        HPoint::new(v[1] * h, v[2] * h, h)
    }

    /// Hyperbolic midpoint of the geodesic segment `[self, other]`.
    pub fn midpoint(&self, other: &HPoint) -> HPoint {
        self.lerp(other, 0.5)
    }

    /// Point at fraction `s` of the way from `self` to `other` along the geodesic.
    pub fn lerp(&self, other: &HPoint, s: f64) -> HPoint {
        let d = distance(self, other);
        if d == 0.0 {
            return *self;
        }
        let p = self.to_hyperboloid();
        let q = other.to_hyperboloid();
        let (wa, wb) = (((1.0 - s) * d).sinh() / d.sinh(), (s * d).sinh() / d.sinh());
        let v = [0, 1, 2, 3].map(|k| wa * p[k] + wb * q[k]);
        HPoint::from_hyperboloid(v).expect("geodesic point stays in the half-space")
    }

    fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.h]
    }
}

/// Hyperbolic distance in the upper half-space model.
pub fn distance(p: &HPoint, q: &HPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dh = p.h - q.h;
    let e = (dx * dx + dy * dy + dh * dh).sqrt();
    2.0 * (e / (2.0 * (p.h * q.h).sqrt())).asinh()
}

/// A polyhedron vertex: an interior point or an ideal point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vertex {
    Finite(HPoint),
    Ideal(BoundaryPoint),
}

impl Vertex {
    pub fn is_ideal(&self) -> bool {
        matches!(self, Vertex::Ideal(_))
    }

    pub fn infinity() -> Self {
        Vertex::Ideal(BoundaryPoint::Infinity)
    }

    /// Horizontal projection, `None` for the point `∞`.
    pub fn projection(&self) -> Option<Complex64> {
        match self {
            Vertex::Finite(p) => Some(p.z()),
            Vertex::Ideal(b) => b.finite(),
        }
    }

    /// Height above the boundary plane (`0` for finite ideal points).
    pub fn height(&self) -> Option<f64> {
        match self {
            Vertex::Finite(p) => Some(p.h),
            Vertex::Ideal(BoundaryPoint::Finite(_)) => Some(0.0),
            Vertex::Ideal(BoundaryPoint::Infinity) => None,
        }
    }

    pub fn apply(&self, g: &Isometry) -> Vertex {
        match self {
            Vertex::Finite(p) => Vertex::Finite(g.apply_interior(p)),
            Vertex::Ideal(b) => Vertex::Ideal(g.apply_boundary(b)),
        }
    }

    pub fn approx_eq(&self, other: &Vertex, tol: f64) -> bool {
        match (self, other) {
            (Vertex::Finite(p), Vertex::Finite(q)) => distance(p, q) <= tol,
            (Vertex::Ideal(a), Vertex::Ideal(b)) => a.approx_eq(b, tol),
            _ => false,
        }
    }
}

/// Element of PSL(2, C), stored as a unit-determinant representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Isometry {
    /// Builds an isometry from any non-singular matrix by dividing by a square
    /// root of its determinant.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > DET_TOL * scale * scale) || !det.is_finite() {
            return Err(Error::Singular(det.norm()));
        }
        let s = det.sqrt();
        Ok(Isometry { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Isometry::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Isometry { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn trace_sq(&self) -> Complex64 {
        let t = self.trace();
        t * t
    }

    pub fn inverse(&self) -> Self {
        Isometry { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Self {
        Isometry { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Matrix product `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .canonical()
    }

    pub fn conjugate_by(&self, k: &Isometry) -> Isometry {
        k.compose(self).compose(&k.inverse())
    }

    /// Sign representative: the first entry of (numerically) largest modulus
    /// has non-negative real part, or zero real part and non-negative
    /// imaginary part.
    pub fn canonical(&self) -> Isometry {
        let e = self.entries();
        let max = e.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lead = e.iter().find(|z| z.norm() >= max * (1.0 - 1e-12)).copied().unwrap_or(ONE);
        let flat = 1e-14 * max;
        let flip = lead.re < -flat || (lead.re.abs() <= flat && lead.im < 0.0);
        if flip {
            self.neg()
        } else {
            *self
        }
    }

    /// Maximum entrywise distance between the two matrices, minimized over sign.
    pub fn distance_up_to_sign(&self, other: &Isometry) -> f64 {
        let dist = |s: f64| {
            self.entries().iter().zip(other.entries().iter()).map(|(x, y)| (x - y * s).norm()).fold(0.0, f64::max)
        };
        dist(1.0).min(dist(-1.0))
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.distance_up_to_sign(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::identity(), tol)
    }

    pub fn to_reals(&self) -> [f64; 8] {
        let c = self.canonical();
        [c.a.re, c.a.im, c.b.re, c.b.im, c.c.re, c.c.im, c.d.re, c.d.im]
    }

    pub fn from_reals(r: [f64; 8]) -> Result<Self> {
        Isometry::new(
            Complex64::new(r[0], r[1]),
            Complex64::new(r[2], r[3]),
            Complex64::new(r[4], r[5]),
            Complex64::new(r[6], r[7]),
        )
    }

    /// Möbius action on the sphere at infinity.
    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c == ZERO {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == ZERO {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Poincaré extension to the upper half-space.
    pub fn apply_interior(&self, p: &HPoint) -> HPoint {
        let z = p.z();
        let h2 = p.h * p.h;
        let czd = self.c * z + self.d;
        let den = czd.norm_sqr() + self.c.norm_sqr() * h2;
        let w = ((self.a * z + self.b) * czd.conj() + self.a * self.c.conj() * h2) / den;
        HPoint { x: w.re, y: w.im, h: p.h / den }
    }

    /// Eigenvalues `(λ, 1/λ)` with `|λ| >= 1`.
    fn eigenvalues(&self) -> (Complex64, Complex64) {
        let t = self.trace();
        let disc = (t * t - 4.0).sqrt();
        let l1 = (t + disc) / 2.0;
        let l2 = (t - disc) / 2.0;
        if l1.norm() >= l2.norm() {
            (l1, l2)
        } else {
            (l2, l1)
        }
    }

    /// Fixed point belonging to eigenvalue `lambda`.
    fn fixed_point_for(&self, lambda: Complex64) -> BoundaryPoint {
        // Eigenvectors (b, λ - a) and (λ - d, c); take the better conditioned one.
        let v1 = (self.b, lambda - self.a);
        let v2 = (lambda - self.d, self.c);
        let n1 = v1.0.norm() + v1.1.norm();
        let n2 = v2.0.norm() + v2.1.norm();
        let (num, den) = if n1 >= n2 { v1 } else { v2 };
        if den.norm() <= 1e-14 * num.norm() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(num / den)
        }
    }

    /// The one or two fixed points on the sphere at infinity.
    pub fn fixed_points(&self) -> Vec<BoundaryPoint> {
        let (big, small) = self.eigenvalues();
        let p = self.fixed_point_for(big);
        let q = self.fixed_point_for(small);
        if p.approx_eq(&q, 1e-9) {
            vec![p]
        } else {
            vec![q, p]
        }
    }

    pub fn fixes(&self, p: &BoundaryPoint, tol: f64) -> bool {
        self.apply_boundary(p).approx_eq(p, tol)
    }

    pub fn classify(&self) -> IsomClass {
        let t2 = self.trace_sq();
        if (t2 - 4.0).norm() < CLASSIFY_TOL {
            if self.is_identity(IDENTITY_TOL) {
                return IsomClass::Identity;
            }
            return IsomClass::Parabolic;
        }
        if t2.im.abs() < CLASSIFY_TOL && t2.re >= -CLASSIFY_TOL && t2.re < 4.0 {
            let half = (t2.re.max(0.0).sqrt() / 2.0).min(1.0);
            return IsomClass::Elliptic { angle: 2.0 * half.acos() };
        }
        let (big, _) = self.eigenvalues();
        let k = big * big;
        IsomClass::Loxodromic { length: k.norm().ln(), twist: k.arg() }
    }

    /// Oriented axis. For loxodromic elements the attracting fixed point comes
    /// second; for elliptic elements the order makes the rotation angle about
    /// the oriented axis lie in `(0, π]`.
    pub fn axis(&self) -> Result<Geodesic> {
        match self.classify() {
            IsomClass::Identity => Err(Error::NoAxis("identity")),
            IsomClass::Parabolic => Err(Error::NoAxis("parabolic")),
            IsomClass::Loxodromic { .. } => {
                let (big, small) = self.eigenvalues();
                Geodesic::new(self.fixed_point_for(small), self.fixed_point_for(big))
            }
            IsomClass::Elliptic { .. } => {
                let (l1, l2) = self.eigenvalues();
                let g = Geodesic::new(self.fixed_point_for(l2), self.fixed_point_for(l1))?;
                let (angle, _) = self.motion_about(&g, 1e-6)?;
                if angle > PI + 1e-12 {
                    Ok(g.reversed())
                } else {
                    Ok(g)
                }
            }
        }
    }

    /// Rotation angle in `[0, 2π)` and translation length along an oriented
    /// geodesic whose endpoints `self` fixes (right-hand rule about the
    /// direction `from → to`).
    pub fn motion_about(&self, axis: &Geodesic, tol: f64) -> Result<(f64, f64)> {
        if !self.fixes(&axis.from, tol) || !self.fixes(&axis.to, tol) {
            return Err(Error::NoAxis("endpoints are not fixed"));
        }
        // Multiplier at the forward endpoint v is λ_v², with (v, 1) an eigenvector.
        let lambda = match axis.to {
            BoundaryPoint::Infinity => self.a,
            BoundaryPoint::Finite(v) => self.c * v + self.d,
        };
        let k = lambda * lambda;
        Ok((k.arg().rem_euclid(TAU), k.norm().ln()))
    }

    /// Rotation angle in `[0, 2π)` about an oriented axis fixed by `self`.
    pub fn rotation_angle_about(&self, axis: &Geodesic) -> Result<f64> {
        self.motion_about(axis, 1e-8).map(|(a, _)| a)
    }

    /// Rotation by `theta` about the oriented geodesic `axis`.
    pub fn rotation_about(axis: &Geodesic, theta: f64) -> Isometry {
        let e = Complex64::from_polar(1.0, theta / 2.0);
        let core = Isometry { a: e, b: ZERO, c: ZERO, d: e.inv() };
        core.conjugate_by(&axis.standard_frame())
    }

    /// Loxodromic motion translating by `length` along `axis` with rotation `twist`.
    pub fn loxodromic_along(axis: &Geodesic, length: f64, twist: f64) -> Isometry {
        let e = Complex64::new(length / 2.0, twist / 2.0).exp();
        let core = Isometry { a: e, b: ZERO, c: ZERO, d: e.inv() };
        core.conjugate_by(&axis.standard_frame())
    }

    /// The Möbius map sending `z1, z2, z3` to `0, 1, ∞`.
    pub fn normalizing(z1: &BoundaryPoint, z2: &BoundaryPoint, z3: &BoundaryPoint) -> Result<Isometry> {
        use BoundaryPoint::{Finite as F, Infinity as I};
        if z1.approx_eq(z2, 1e-14) || z1.approx_eq(z3, 1e-14) || z2.approx_eq(z3, 1e-14) {
            return Err(Error::RepeatedPoints);
        }
        let (a, b, c, d) = match (*z1, *z2, *z3) {
            (I, F(z2), F(z3)) => (ZERO, z2 - z3, ONE, -z3),
            (F(z1), I, F(z3)) => (ONE, -z1, ONE, -z3),
            (F(z1), F(z2), I) => (ONE, -z1, ZERO, z2 - z1),
            (F(z1), F(z2), F(z3)) => (z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)),
            _ => return Err(Error::RepeatedPoints),
        };
        Isometry::new(a, b, c, d)
    }

    /// The unique isometry with `g(src[k]) = dst[k]` for `k = 0, 1, 2`.
    pub fn from_boundary_triples(src: &[BoundaryPoint; 3], dst: &[BoundaryPoint; 3]) -> Result<Isometry> {
        let s = Isometry::normalizing(&src[0], &src[1], &src[2])?;
        let t = Isometry::normalizing(&dst[0], &dst[1], &dst[2])?;
        Ok(t.inverse().compose(&s))
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_reals().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = <[f64; 8]>::deserialize(d)?;
        Isometry::from_reals(r).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.canonical();
        write!(f, "[[{}, {}], [{}, {}]]", g.a, g.b, g.c, g.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsomClass {
    Identity,
    Parabolic,
    /// Rotation angle; `(0, π]` from [`Isometry::classify`], oriented values in
    /// `(0, 2π)` when measured about a given axis.
    Elliptic {
        angle: f64,
    },
    Loxodromic {
        length: f64,
        twist: f64,
    },
}

impl IsomClass {
    pub fn name(&self) -> &'static str {
        match self {
            IsomClass::Identity => "identity",
            IsomClass::Parabolic => "parabolic",
            IsomClass::Elliptic { .. } => "elliptic",
            IsomClass::Loxodromic { .. } => "loxodromic",
        }
    }
}

/// An oriented geodesic, given by its endpoints at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub from: BoundaryPoint,
    pub to: BoundaryPoint,
}

impl Geodesic {
    pub fn new(from: BoundaryPoint, to: BoundaryPoint) -> Result<Self> {
        if from.approx_eq(&to, 1e-14) {
            return Err(Error::RepeatedPoints);
        }
        Ok(Geodesic { from, to })
    }

    /// The vertical axis `0 → ∞`.
    pub fn vertical_axis() -> Self {
        Geodesic { from: BoundaryPoint::new(0.0, 0.0), to: BoundaryPoint::Infinity }
    }

    pub fn reversed(&self) -> Self {
        Geodesic { from: self.to, to: self.from }
    }

    /// An isometry taking `0 → ∞` onto this geodesic, preserving orientation.
    pub fn standard_frame(&self) -> Isometry {
        use BoundaryPoint::{Finite as F, Infinity as I};
        let m = match (self.from, self.to) {
            (F(u), F(v)) => Isometry::new(v, u, ONE, ONE),
            (I, F(v)) => Isometry::new(v, ONE, ONE, ZERO),
            (F(u), I) => Isometry::new(ONE, u, ZERO, ONE),
            (I, I) => unreachable!("geodesic endpoints are distinct"),
        };
        m.expect("distinct endpoints give a non-singular frame")
    }

    pub fn apply(&self, g: &Isometry) -> Geodesic {
        Geodesic { from: g.apply_boundary(&self.from), to: g.apply_boundary(&self.to) }
    }

    pub fn approx_eq(&self, other: &Geodesic, tol: f64) -> bool {
        self.from.approx_eq(&other.from, tol) && self.to.approx_eq(&other.to, tol)
    }

    /// Same unoriented geodesic.
    pub fn same_line(&self, other: &Geodesic, tol: f64) -> bool {
        self.approx_eq(other, tol) || self.approx_eq(&other.reversed(), tol)
    }

    /// The geodesic through two vertices, oriented from `u` to `v`.
    pub fn through(u: &Vertex, v: &Vertex) -> Result<Geodesic> {
        match (u, v) {
            (Vertex::Ideal(a), Vertex::Ideal(b)) => Geodesic::new(*a, *b),
            (Vertex::Finite(p), Vertex::Finite(q)) => {
                if distance(p, q) < 1e-14 {
                    return Err(Error::RepeatedPoints);
                }
                let dz = q.z() - p.z();
                let len = dz.norm();
                if len <= 1e-14 * (p.h + q.h) {
                    let base = BoundaryPoint::Finite(p.z());
                    return if q.h > p.h {
                        Geodesic::new(base, BoundaryPoint::Infinity)
                    } else {
                        Geodesic::new(BoundaryPoint::Infinity, base)
                    };
                }
                let e = dz / len;
                let s0 = (len * len + q.h * q.h - p.h * p.h) / (2.0 * len);
                let r = (s0 * s0 + p.h * p.h).sqrt();
                Geodesic::new(BoundaryPoint::Finite(p.z() + e * (s0 - r)), BoundaryPoint::Finite(p.z() + e * (s0 + r)))
            }
            (Vertex::Finite(p), Vertex::Ideal(b)) => match b {
                BoundaryPoint::Infinity => Geodesic::new(BoundaryPoint::Finite(p.z()), BoundaryPoint::Infinity),
                BoundaryPoint::Finite(w) => {
                    let dz = w - p.z();
                    let len = dz.norm();
                    if len <= 1e-14 * p.h {
                        return Geodesic::new(BoundaryPoint::Infinity, *b);
                    }
                    let e = dz / len;
                    let s0 = (len * len - p.h * p.h) / (2.0 * len);
                    let r = len - s0;
                    Geodesic::new(BoundaryPoint::Finite(p.z() + e * (s0 - r)), *b)
                }
            },
            (Vertex::Ideal(_), Vertex::Finite(_)) => Geodesic::through(v, u).map(|g| g.reversed()),
        }
    }
}

/// Which side of a plane a half-space lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Plane::side > 0`: outside a hemisphere, left of a directed vertical plane.
    Positive,
    Negative,
}

impl Side {
    pub fn sign(&self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }

    pub fn of(value: f64) -> Side {
        if value >= 0.0 {
            Side::Positive
        } else {
            Side::Negative
        }
    }
}

/// A totally geodesic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Plane {
    Hemisphere { center: Complex64, radius: f64 },
    Vertical { through: Complex64, direction: Complex64 },
}

impl Plane {
    pub fn hemisphere(center: Complex64, radius: f64) -> Result<Plane> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidPlane(format!("radius {radius}")));
        }
        Ok(Plane::Hemisphere { center, radius })
    }

    pub fn vertical(through: Complex64, direction: Complex64) -> Result<Plane> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidPlane("zero direction".into()));
        }
        Ok(Plane::Vertical { through, direction: direction / n })
    }

    /// Vertical plane over the line through two points, directed from `p` to `q`.
    pub fn vertical_through(p: Complex64, q: Complex64) -> Result<Plane> {
        Plane::vertical(p, q - p)
    }

    /// The plane whose boundary circle passes through three distinct points.
    pub fn through_boundary_points(p: &[BoundaryPoint; 3]) -> Result<Plane> {
        let finite: Vec<Complex64> = p.iter().filter_map(|b| b.finite()).collect();
        match finite.len() {
            2 => Plane::vertical_through(finite[0], finite[1]),
            3 => {
                let (a, b, c) = (finite[0], finite[1], finite[2]);
                let ab = b - a;
                let ac = c - a;
                let cross = ab.re * ac.im - ab.im * ac.re;
                let scale = ab.norm() * ac.norm();
                if scale == 0.0 {
                    return Err(Error::RepeatedPoints);
                }
                if cross.abs() <= 1e-13 * scale {
                    return Plane::vertical_through(a, if ab.norm() > ac.norm() { b } else { c });
                }
                // Circumcenter relative to a.
                let d = 2.0 * cross;
                let ux = (ac.im * ab.norm_sqr() - ab.im * ac.norm_sqr()) / d;
                let uy = (ab.re * ac.norm_sqr() - ac.re * ab.norm_sqr()) / d;
                let u = Complex64::new(ux, uy);
                Plane::hemisphere(a + u, u.norm())
            }
            _ => Err(Error::RepeatedPoints),
        }
    }

    /// Three distinct points of the boundary circle.
    pub fn boundary_points(&self) -> [BoundaryPoint; 3] {
        match *self {
            Plane::Hemisphere { center, radius } => [
                BoundaryPoint::Finite(center + radius),
                BoundaryPoint::Finite(center + Complex64::new(0.0, radius)),
                BoundaryPoint::Finite(center - radius),
            ],
            Plane::Vertical { through, direction } => {
                [BoundaryPoint::Finite(through), BoundaryPoint::Finite(through + direction), BoundaryPoint::Infinity]
            }
        }
    }

    /// Point of the boundary circle at parameter `s`.
    pub fn boundary_sample(&self, s: f64) -> BoundaryPoint {
        match *self {
            Plane::Hemisphere { center, radius } => BoundaryPoint::Finite(center + Complex64::from_polar(radius, s)),
            Plane::Vertical { through, direction } => BoundaryPoint::Finite(through + direction * s),
        }
    }

    /// Interior point of the plane for parameters `s, u ∈ [0, 1)`.
    pub fn interior_sample(&self, s: f64, u: f64) -> HPoint {
        match *self {
            Plane::Hemisphere { center, radius } => {
                let z = center + Complex64::from_polar(radius * u, TAU * s);
                HPoint { x: z.re, y: z.im, h: radius * (1.0 - u * u).sqrt() }
            }
            Plane::Vertical { through, direction } => {
                let z = through + direction * (4.0 * s - 2.0);
                HPoint { x: z.re, y: z.im, h: 0.2 + 2.0 * u }
            }
        }
    }

    pub fn apply(&self, g: &Isometry) -> Result<Plane> {
        let pts = self.boundary_points().map(|p| g.apply_boundary(&p));
        Plane::through_boundary_points(&pts)
    }

    /// Signed, scale-normalized side function; zero exactly on the plane.
    pub fn side_value(&self, p: &HPoint) -> f64 {
        match *self {
            Plane::Hemisphere { center, radius } => {
                ((p.z() - center).norm_sqr() + p.h * p.h - radius * radius) / (2.0 * radius)
            }
            Plane::Vertical { through, direction } => {
                let v = p.z() - through;
                direction.re * v.im - direction.im * v.re
            }
        }
    }

    pub fn side(&self, p: &HPoint) -> Side {
        Side::of(self.side_value(p))
    }

    pub fn contains(&self, p: &HPoint, tol: f64) -> bool {
        self.side_value(p).abs() <= tol
    }

    pub fn contains_boundary(&self, b: &BoundaryPoint, tol: f64) -> bool {
        match (*self, b) {
            (Plane::Vertical { .. }, BoundaryPoint::Infinity) => true,
            (Plane::Hemisphere { .. }, BoundaryPoint::Infinity) => false,
            (Plane::Hemisphere { center, radius }, BoundaryPoint::Finite(z)) => {
                ((z - center).norm() - radius).abs() <= tol * radius.max(1.0)
            }
            (Plane::Vertical { through, direction }, BoundaryPoint::Finite(z)) => {
                let v = z - through;
                (direction.re * v.im - direction.im * v.re).abs() <= tol * (1.0 + v.norm())
            }
        }
    }

    pub fn contains_vertex(&self, v: &Vertex, tol: f64) -> bool {
        match v {
            Vertex::Finite(p) => self.contains(p, tol),
            Vertex::Ideal(b) => self.contains_boundary(b, tol),
        }
    }

    /// Euclidean unit normal at a point of the plane, pointing to `Side::Positive`.
    fn normal_at(&self, x: [f64; 3]) -> [f64; 3] {
        match *self {
            Plane::Hemisphere { center, radius } => {
                [(x[0] - center.re) / radius, (x[1] - center.im) / radius, x[2] / radius]
            }
            Plane::Vertical { direction, .. } => [-direction.im, direction.re, 0.0],
        }
    }

    /// A point of `self ∩ other` in the half-space.
    pub fn meet_point(&self, other: &Plane) -> Result<HPoint> {
        match (*self, *other) {
            (Plane::Hemisphere { center: c1, radius: r1 }, Plane::Hemisphere { center: c2, radius: r2 }) => {
                let dc = c2 - c1;
                let d = dc.norm();
                if d <= 1e-15 * (r1 + r2) {
                    return Err(Error::PlanesDisjoint);
                }
                let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
                let h2 = r1 * r1 - a * a;
                if !(h2 > 1e-24 * r1 * r1) {
                    return Err(Error::PlanesDisjoint);
                }
                HPoint::from_z(c1 + dc * (a / d), h2.sqrt())
            }
            (Plane::Hemisphere { center, radius }, Plane::Vertical { through, direction })
            | (Plane::Vertical { through, direction }, Plane::Hemisphere { center, radius }) => {
                let v = center - through;
                let along = v.re * direction.re + v.im * direction.im;
                let foot = through + direction * along;
                let dist = (center - foot).norm();
                let h2 = radius * radius - dist * dist;
                if !(h2 > 1e-24 * radius * radius) {
                    return Err(Error::PlanesDisjoint);
                }
                HPoint::from_z(foot, h2.sqrt())
            }
            (Plane::Vertical { through: p1, direction: d1 }, Plane::Vertical { through: p2, direction: d2 }) => {
                let cross = d1.re * d2.im - d1.im * d2.re;
                if cross.abs() < 1e-14 {
                    return Err(Error::PlanesDisjoint);
                }
                let w = p2 - p1;
                let s = (w.re * d2.im - w.im * d2.re) / cross;
                HPoint::from_z(p1 + d1 * s, 1.0)
            }
        }
    }

    /// Interior angle of the wedge `{self on side_self} ∩ {other on side_other}`.
    pub fn wedge_angle(&self, side_self: Side, other: &Plane, side_other: Side) -> Result<f64> {
        let x = self.meet_point(other)?.as_array();
        let n1 = self.normal_at(x).map(|v| v * side_self.sign());
        let n2 = other.normal_at(x).map(|v| v * side_other.sign());
        let dot = n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2];
        Ok((-dot).clamp(-1.0, 1.0).acos())
    }
}

/// Dihedral angle between two planes, measured in the wedge containing `sample`.
pub fn dihedral_angle(p: &Plane, q: &Plane, sample: &HPoint) -> Result<f64> {
    p.wedge_angle(p.side(sample), q, q.side(sample))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Isometry {
        Isometry::new(a, b, cc, d).unwrap()
    }

    #[test]
    fn compose_examples() {
        let g = Isometry::from_real(1.0, 1.0, -2.0, -1.0).unwrap();
        assert!(Isometry::identity().compose(&g).approx_eq(&g, 1e-15));
        let a = m(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
        let expected = m(c(0.0, 1.0), c(0.0, 1.0), c(0.0, 2.0), c(0.0, 1.0));
        assert!(a.compose(&g).approx_eq(&expected, 1e-14));
        assert!(g.compose(&g.inverse()).is_identity(1e-14));
    }

    #[test]
    fn apply_boundary_examples() {
        let inv = m(c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0));
        assert_eq!(inv.apply_boundary(&BoundaryPoint::new(0.0, 0.0)), BoundaryPoint::Infinity);
        assert!(inv.apply_boundary(&BoundaryPoint::new(1.0, 0.0)).approx_eq(&BoundaryPoint::new(1.0, 0.0), 1e-15));
        assert_eq!(inv.apply_boundary(&BoundaryPoint::Infinity), BoundaryPoint::new(0.0, 0.0));
        let p = BoundaryPoint::new(3.0, 4.0);
        assert_eq!(Isometry::identity().apply_boundary(&p), p);
    }

    #[test]
    fn apply_interior_examples() {
        let o = HPoint::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(Isometry::identity().apply_interior(&o), o);
        let t = Isometry::from_real(0.5f64.exp(), 0.0, 0.0, (-0.5f64).exp()).unwrap();
        let q = t.apply_interior(&o);
        assert!((q.h - E).abs() < 1e-14 && q.x.abs() < 1e-15);
        let rot = Isometry::rotation_about(&Geodesic::vertical_axis(), PI);
        let r = rot.apply_interior(&HPoint::new(1.0, 0.0, 1.0).unwrap());
        assert!((r.x + 1.0).abs() < 1e-14 && r.y.abs() < 1e-14 && (r.h - 1.0).abs() < 1e-14);
    }

    #[test]
    fn classify_examples() {
        let e = Complex64::from_polar(1.0, FRAC_PI_4);
        match m(e, c(0.0, 0.0), c(0.0, 0.0), e.inv()).classify() {
            IsomClass::Elliptic { angle } => assert!((angle - FRAC_PI_2).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(Isometry::from_real(1.0, 1.0, 0.0, 1.0).unwrap().classify(), IsomClass::Parabolic);
        assert_eq!(Isometry::identity().classify(), IsomClass::Identity);
        assert_eq!(Isometry::identity().neg().classify(), IsomClass::Identity);
        let comm = Isometry::from_real(-3.0, -2.0, -4.0, -3.0).unwrap();
        assert!((comm.trace_sq() - 36.0).norm() < 1e-12);
        match comm.classify() {
            // tr = ±6 = 2 cosh(ℓ/2)
            IsomClass::Loxodromic { length, twist } => {
                assert!((length - 2.0 * 3.0f64.acosh()).abs() < 1e-12);
                assert!(twist.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn axis_examples() {
        let g = Isometry::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        let ax = g.axis().unwrap();
        assert!(ax.approx_eq(&Geodesic::vertical_axis(), 1e-14));

        // Fixed points of [[-3,-2],[-4,-3]] solve -4z² + 2 = 0; the attracting
        // one has |1/(cz+d)²| < 1.
        let comm = Isometry::from_real(-3.0, -2.0, -4.0, -3.0).unwrap();
        let ax = comm.axis().unwrap();
        let r = 0.5f64.sqrt();
        assert!(ax.from.approx_eq(&BoundaryPoint::new(-r, 0.0), 1e-12), "{:?}", ax);
        assert!(ax.to.approx_eq(&BoundaryPoint::new(r, 0.0), 1e-12));

        let k = m(c(1.0, 0.5), c(2.0, 0.0), c(0.3, -1.0), c(0.5, 0.2));
        let conj = g.conjugate_by(&k);
        assert!(conj.axis().unwrap().approx_eq(&ax_vertical().apply(&k), 1e-10));

        assert!(Isometry::identity().axis().is_err());
        assert!(Isometry::from_real(1.0, 1.0, 0.0, 1.0).unwrap().axis().is_err());
    }

    fn ax_vertical() -> Geodesic {
        Geodesic::vertical_axis()
    }

    #[test]
    fn rotation_and_loxodromic_examples() {
        let th = 1.3;
        let r = Isometry::rotation_about(&ax_vertical(), th);
        let e = Complex64::from_polar(1.0, th / 2.0);
        assert!(r.approx_eq(&m(e, c(0.0, 0.0), c(0.0, 0.0), e.inv()), 1e-15));
        let ax = Geodesic::new(BoundaryPoint::new(0.3, -1.0), BoundaryPoint::new(2.0, 0.5)).unwrap();
        assert!(Isometry::rotation_about(&ax, TAU).is_identity(1e-12));
        assert!(Isometry::rotation_about(&ax, 0.0).is_identity(1e-15));
        let l = Isometry::loxodromic_along(&ax_vertical(), 1.0, 0.0);
        let p = l.apply_interior(&HPoint::new(0.0, 0.0, 1.0).unwrap());
        assert!((p.h - E).abs() < 1e-14);
        let rot = Isometry::rotation_about(&ax, 4.0);
        assert!((rot.rotation_angle_about(&ax).unwrap() - 4.0).abs() < 1e-10);
        assert!((rot.rotation_angle_about(&ax.reversed()).unwrap() - (TAU - 4.0)).abs() < 1e-10);
    }

    #[test]
    fn distance_examples() {
        let a = HPoint::new(0.0, 0.0, 1.0).unwrap();
        let b = HPoint::new(0.0, 0.0, E).unwrap();
        assert!((distance(&a, &b) - 1.0).abs() < 1e-15);
        let p = HPoint::new(1.0, 1.0, SQRT_2).unwrap();
        let q = HPoint::new(0.0, 1.0, 1.0).unwrap();
        assert!((distance(&p, &q) - SQRT_2.acosh()).abs() < 1e-14);
        assert!((distance(&p, &q) - 0.881373587019543).abs() < 1e-12);
        assert_eq!(distance(&p, &p), 0.0);
    }

    #[test]
    fn dihedral_examples() {
        let x0 = Plane::vertical(c(0.0, 0.0), c(0.0, 1.0)).unwrap();
        let y0 = Plane::vertical(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let s = HPoint::new(1.0, 1.0, 1.0).unwrap();
        assert!((dihedral_angle(&x0, &y0, &s).unwrap() - FRAC_PI_2).abs() < 1e-15);

        let h = Plane::hemisphere(c(0.0, 0.0), 1.0).unwrap();
        let s = HPoint::new(0.1, 0.1, 2.0).unwrap();
        assert!((dihedral_angle(&h, &x0, &s).unwrap() - FRAC_PI_2).abs() < 1e-15);

        // Face pair at the cone edge of the symmetric trapezohedron.
        let h = Plane::hemisphere(c(1.0, 1.0), SQRT_2).unwrap();
        let v = Plane::vertical_through(c(1.0, 1.0), c(-1.0, 1.0)).unwrap();
        let s = HPoint::new(0.9, 0.9, 1.6).unwrap();
        assert!((dihedral_angle(&h, &v, &s).unwrap() - FRAC_PI_2).abs() < 1e-15);

        // Off-center hemisphere: cos θ = ±dist/radius.
        let h = Plane::hemisphere(c(1.0, 0.0), SQRT_2).unwrap();
        let s = HPoint::new(1.0, 0.9, 2.0).unwrap();
        assert!((dihedral_angle(&h, &v, &s).unwrap() - FRAC_PI_4).abs() < 1e-14);
        let s = HPoint::new(1.0, 1.1, 2.0).unwrap();
        assert!((dihedral_angle(&h, &v, &s).unwrap() - 3.0 * FRAC_PI_4).abs() < 1e-14);

        // Two hemispheres: cos θ = ±(r1² + r2² - d²)/(2 r1 r2).
        let h1 = Plane::hemisphere(c(0.0, 0.0), 1.0).unwrap();
        let h2 = Plane::hemisphere(c(1.0, 0.0), 1.0).unwrap();
        let above = HPoint::new(0.5, 0.0, 2.0).unwrap();
        let ang = dihedral_angle(&h1, &h2, &above).unwrap();
        assert!((ang - (-0.5f64).acos()).abs() < 1e-14);

        let far = Plane::hemisphere(c(5.0, 0.0), 1.0).unwrap();
        assert_eq!(dihedral_angle(&h1, &far, &above), Err(Error::PlanesDisjoint));
        let x1 = Plane::vertical(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        assert_eq!(dihedral_angle(&x0, &x1, &above), Err(Error::PlanesDisjoint));
    }

    #[test]
    fn boundary_triples_examples() {
        let std = [BoundaryPoint::new(0.0, 0.0), BoundaryPoint::new(1.0, 0.0), BoundaryPoint::Infinity];
        assert!(Isometry::from_boundary_triples(&std, &std).unwrap().is_identity(1e-15));
        let swapped = [BoundaryPoint::Infinity, BoundaryPoint::new(1.0, 0.0), BoundaryPoint::new(0.0, 0.0)];
        let g = Isometry::from_boundary_triples(&std, &swapped).unwrap();
        let inv = m(c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0));
        assert!(g.approx_eq(&inv, 1e-15));
        let t = [BoundaryPoint::new(2.0, 1.0), BoundaryPoint::new(-1.0, 0.5), BoundaryPoint::new(0.0, -3.0)];
        assert!(Isometry::from_boundary_triples(&t, &t).unwrap().is_identity(1e-12));
        let bad = [BoundaryPoint::new(2.0, 1.0), BoundaryPoint::new(2.0, 1.0), BoundaryPoint::Infinity];
        assert_eq!(Isometry::from_boundary_triples(&bad, &t), Err(Error::RepeatedPoints));
    }

    #[test]
    fn canonical_sign_rule() {
        let g = Isometry::from_real(-3.0, -2.0, -4.0, -3.0).unwrap();
        let cg = g.canonical();
        assert_eq!(cg.c, c(4.0, 0.0));
        let r = [0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let h = Isometry::from_reals(r).unwrap();
        assert_eq!(h.to_reals()[1], 1.0);
        let json = serde_json::to_string(&g).unwrap();
        let back: Isometry = serde_json::from_str(&json).unwrap();
        assert!(back.approx_eq(&g, 1e-15));
    }

    #[test]
    fn geodesic_through_points() {
        let p = HPoint::new(1.0, 1.0, SQRT_2).unwrap();
        let q = HPoint::new(0.0, 1.0, 1.0).unwrap();
        let g = Geodesic::through(&Vertex::Finite(p), &Vertex::Finite(q)).unwrap();
        // The edge lies on the hemisphere of radius √2 centered at (1, 1).
        assert!(g.from.approx_eq(&BoundaryPoint::new(1.0 + SQRT_2, 1.0), 1e-14));
        assert!(g.to.approx_eq(&BoundaryPoint::new(1.0 - SQRT_2, 1.0), 1e-14));
        let up = Geodesic::through(&Vertex::Finite(q), &Vertex::infinity()).unwrap();
        assert!(up.approx_eq(&Geodesic::new(BoundaryPoint::new(0.0, 1.0), BoundaryPoint::Infinity).unwrap(), 1e-15));
        let to_o = Geodesic::through(&Vertex::Finite(q), &Vertex::Ideal(BoundaryPoint::new(0.0, 0.0))).unwrap();
        assert!(to_o.from.approx_eq(&BoundaryPoint::new(0.0, 2.0), 1e-14));
        let back = Geodesic::through(&Vertex::Ideal(BoundaryPoint::new(0.0, 0.0)), &Vertex::Finite(q)).unwrap();
        assert!(back.approx_eq(&to_o.reversed(), 1e-15));
    }

    #[test]
    fn plane_through_points_and_midpoint() {
        let pl = Plane::through_boundary_points(&[
            BoundaryPoint::new(2.0, 0.0),
            BoundaryPoint::new(0.0, 2.0),
            BoundaryPoint::new(-2.0, 0.0),
        ])
        .unwrap();
        assert_eq!(pl, Plane::Hemisphere { center: c(0.0, 0.0), radius: 2.0 });
        let a = HPoint::new(0.0, 0.0, 1.0).unwrap();
        let b = HPoint::new(0.0, 0.0, E * E).unwrap();
        let mid = a.midpoint(&b);
        assert!((mid.h - E).abs() < 1e-13);
    }
}
