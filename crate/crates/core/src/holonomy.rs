//! Representation-level checks: relator verification, the SL(2, C) lifting
//! obstruction, and meridian/longitude conditions at a cone locus.
//!
//! Relators are evaluated with raw matrix products so the sign of a lift is
//! kept; [`Isometry::compose`] would canonicalize it away.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::FramingVector;
use crate::hypgeo::{Geodesic, IsomClass, Isometry};
use crate::linalg::{solve_gf2, Gf2Solution};

pub const SCHEMA: &str = "rep/1";
/// Entrywise tolerance for a relator to equal `±I`.
pub const RELATOR_TOL: f64 = 1e-10;
/// Chordal tolerance for shared fixed points.
pub const FIXED_POINT_TOL: f64 = 1e-8;
/// Relative tolerance for commutators and translation independence.
pub const PERIPHERAL_TOL: f64 = 1e-8;

pub type Word = Vec<(String, i64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn validate(&self) -> Result<()> {
        for (k, rel) in self.relators.iter().enumerate() {
            for (g, e) in rel {
                if !self.generators.contains(g) {
                    return Err(Error::UnknownGenerator(g.clone()));
                }
                if *e == 0 {
                    return Err(Error::Parse(format!("relator {k} has a zero exponent on {g}")));
                }
            }
        }
        Ok(())
    }

    /// `M[k][g]`: exponent sum of generator `g` in relator `k`, mod 2.
    pub fn parity_matrix(&self) -> Vec<Vec<u8>> {
        self.relators
            .iter()
            .map(|rel| {
                self.generators
                    .iter()
                    .map(|g| rel.iter().filter(|(h, _)| h == g).map(|(_, e)| e).sum::<i64>().rem_euclid(2) as u8)
                    .collect()
            })
            .collect()
    }
}

pub type GaussMatrix = [Complex<i64>; 4];

/// A generator image: an exact Gaussian-integer matrix of determinant one, or
/// a floating-point unit-determinant matrix. The sign is part of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Image {
    Exact(GaussMatrix),
    Float(Isometry),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ImageRepr {
    Reals([f64; 8]),
    Exact { exact: bool, entries: [[i64; 2]; 4] },
}

impl Serialize for Image {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Image::Exact(m) => ImageRepr::Exact { exact: true, entries: m.map(|z| [z.re, z.im]) }.serialize(s),
            Image::Float(g) => {
                let e = g.entries();
                ImageRepr::Reals([e[0].re, e[0].im, e[1].re, e[1].im, e[2].re, e[2].im, e[3].re, e[3].im]).serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for Image {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ImageRepr::deserialize(d)? {
            ImageRepr::Reals(r) => {
                // Rescaling by the principal √det keeps the sign of a det-1 input.
                Isometry::from_reals(r).map(Image::Float).map_err(serde::de::Error::custom)
            }
            ImageRepr::Exact { exact, entries } => {
                let m = entries.map(|[re, im]| Complex::new(re, im));
                if !exact {
                    let r = entries.map(|[re, im]| [re as f64, im as f64]);
                    let flat = [r[0][0], r[0][1], r[1][0], r[1][1], r[2][0], r[2][1], r[3][0], r[3][1]];
                    return Isometry::from_reals(flat).map(Image::Float).map_err(serde::de::Error::custom);
                }
                Image::exact(m).map_err(serde::de::Error::custom)
            }
        }
    }
}

fn gauss_det(m: &GaussMatrix) -> Option<Complex<i64>> {
    checked_dot(m[0], m[3], -m[1], m[2])
}

fn checked_mul(u: Complex<i64>, v: Complex<i64>) -> Option<Complex<i64>> {
    let re = u.re.checked_mul(v.re)?.checked_sub(u.im.checked_mul(v.im)?)?;
    let im = u.re.checked_mul(v.im)?.checked_add(u.im.checked_mul(v.re)?)?;
    Some(Complex::new(re, im))
}

fn checked_dot(u: Complex<i64>, v: Complex<i64>, w: Complex<i64>, x: Complex<i64>) -> Option<Complex<i64>> {
    let (p, q) = (checked_mul(u, v)?, checked_mul(w, x)?);
    Some(Complex::new(p.re.checked_add(q.re)?, p.im.checked_add(q.im)?))
}

/// Exact product; `None` on overflow.
fn gauss_mul(x: &GaussMatrix, y: &GaussMatrix) -> Option<GaussMatrix> {
    Some([
        checked_dot(x[0], y[0], x[1], y[2])?,
        checked_dot(x[0], y[1], x[1], y[3])?,
        checked_dot(x[2], y[0], x[3], y[2])?,
        checked_dot(x[2], y[1], x[3], y[3])?,
    ])
}

fn gauss_inv(m: &GaussMatrix) -> GaussMatrix {
    [m[3], -m[1], -m[2], m[0]]
}

type RawMatrix = [Complex64; 4];

fn raw_mul(x: &RawMatrix, y: &RawMatrix) -> RawMatrix {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

fn raw_inv(m: &RawMatrix) -> RawMatrix {
    [m[3], -m[1], -m[2], m[0]]
}

fn raw_norm(m: &RawMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

const RAW_ID: RawMatrix =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];

impl Image {
    pub fn exact(m: GaussMatrix) -> Result<Image> {
        match gauss_det(&m) {
            Some(d) if d == Complex::new(1, 0) => {}
            Some(d) => return Err(Error::Parse(format!("exact image has determinant {d} (must be 1)"))),
            None => return Err(Error::Parse("exact image entries overflow".into())),
        }
        Ok(Image::Exact(m))
    }

    pub fn raw(&self) -> RawMatrix {
        match self {
            Image::Exact(m) => m.map(|z| Complex64::new(z.re as f64, z.im as f64)),
            Image::Float(g) => g.entries(),
        }
    }

    pub fn isometry(&self) -> Isometry {
        match self {
            Image::Exact(_) => {
                let r = self.raw();
                Isometry { a: r[0], b: r[1], c: r[2], d: r[3] }
            }
            Image::Float(g) => *g,
        }
    }

    pub fn negated(&self) -> Image {
        match self {
            Image::Exact(m) => Image::Exact(m.map(|z| -z)),
            Image::Float(g) => Image::Float(g.neg()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepAssignment {
    pub images: BTreeMap<String, Image>,
}

impl RepAssignment {
    fn image(&self, g: &str) -> Result<&Image> {
        self.images.get(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))
    }

    /// The same representation with the lift of `g` negated.
    pub fn negated(&self, g: &str) -> Result<RepAssignment> {
        let mut out = self.clone();
        let img = self.image(g)?.negated();
        out.images.insert(g.to_string(), img);
        Ok(out)
    }

    /// Exact product when every letter has an exact image and no entry
    /// overflows.
    pub fn eval_exact(&self, word: &[(String, i64)]) -> Result<Option<GaussMatrix>> {
        let one = Complex::new(1, 0);
        let zero = Complex::new(0, 0);
        let mut acc: GaussMatrix = [one, zero, zero, one];
        for (g, e) in word {
            let Image::Exact(m) = self.image(g)? else { return Ok(None) };
            let step = if *e > 0 { *m } else { gauss_inv(m) };
            for _ in 0..e.unsigned_abs() {
                let Some(next) = gauss_mul(&acc, &step) else { return Ok(None) };
                acc = next;
            }
        }
        Ok(Some(acc))
    }

    /// Raw floating product together with a bound on the entry growth.
    pub fn eval_raw(&self, word: &[(String, i64)]) -> Result<(RawMatrix, f64)> {
        let mut acc = RAW_ID;
        let mut scale = 1.0;
        for (g, e) in word {
            let m = self.image(g)?.raw();
            let step = if *e > 0 { m } else { raw_inv(&m) };
            let n = 2.0 * raw_norm(&step);
            for _ in 0..e.unsigned_abs() {
                acc = raw_mul(&acc, &step);
                scale *= n.max(1.0);
            }
        }
        Ok((acc, scale))
    }

    pub fn eval(&self, word: &[(String, i64)]) -> Result<Isometry> {
        let (m, _) = self.eval_raw(word)?;
        Ok(Isometry { a: m[0], b: m[1], c: m[2], d: m[3] })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelatorValue {
    /// `+1` or `−1` when the relator evaluates to `±I`.
    pub sign: Option<i8>,
    /// Entrywise distance to the nearer of `±I`.
    pub residual: f64,
    pub exact: bool,
}

pub fn evaluate_relators(p: &Presentation, r: &RepAssignment) -> Result<Vec<RelatorValue>> {
    p.validate()?;
    p.relators
        .iter()
        .map(|rel| {
            if let Some(m) = r.eval_exact(rel)? {
                let one = Complex::new(1, 0);
                let zero = Complex::new(0, 0);
                let sign = if m == [one, zero, zero, one] {
                    Some(1)
                } else if m == [-one, zero, zero, -one] {
                    Some(-1)
                } else {
                    None
                };
                let residual = if sign.is_some() { 0.0 } else { f64::INFINITY };
                return Ok(RelatorValue { sign, residual, exact: true });
            }
            let (m, scale) = r.eval_raw(rel)?;
            let dist = |s: f64| {
                let id = RAW_ID.map(|z| z * s);
                m.iter().zip(&id).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
            };
            let (plus, minus) = (dist(1.0), dist(-1.0));
            let tol = RELATOR_TOL * scale.min(1e6);
            let sign = if plus <= tol {
                Some(1)
            } else if minus <= tol {
                Some(-1)
            } else {
                None
            };
            Ok(RelatorValue { sign, residual: plus.min(minus), exact: false })
        })
        .collect()
}

/// Whether each relator maps to `±I`.
pub fn verify_presentation(p: &Presentation, r: &RepAssignment) -> Result<Vec<bool>> {
    Ok(evaluate_relators(p, r)?.iter().map(|v| v.sign.is_some()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LiftWitness {
    /// Negating the lifts of these generators sends every relator to `+I`.
    Flips { generators: Vec<String> },
    /// Relators whose sum gives `0 = 1` in the ℤ₂ system.
    Certificate { relators: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub liftable: bool,
    pub signs: Vec<i8>,
    pub parity: Vec<Vec<u8>>,
    pub rhs: Vec<u8>,
    pub witness: LiftWitness,
}

/// Decides whether the representation lifts to SL(2, C) by solving
/// `M x = s` over ℤ₂, where `x_g = 1` negates the lift of `g`.
pub fn lift_obstruction(p: &Presentation, r: &RepAssignment) -> Result<LiftReport> {
    let values = evaluate_relators(p, r)?;
    let mut signs = Vec::with_capacity(values.len());
    for (k, v) in values.iter().enumerate() {
        signs.push(v.sign.ok_or(Error::RelatorNotCentral(k))?);
    }
    let parity = p.parity_matrix();
    let rhs: Vec<u8> = signs.iter().map(|&s| u8::from(s < 0)).collect();
    let (liftable, witness) = match solve_gf2(&parity, &rhs, p.generators.len()) {
        Gf2Solution::Solution(x) => {
            let generators = p.generators.iter().zip(&x).filter(|(_, &b)| b == 1).map(|(g, _)| g.clone()).collect();
            (true, LiftWitness::Flips { generators })
        }
        Gf2Solution::Inconsistent(y) => {
            let relators = y.iter().enumerate().filter(|(_, &b)| b == 1).map(|(k, _)| k).collect();
            (false, LiftWitness::Certificate { relators })
        }
    };
    Ok(LiftReport { liftable, signs, parity, rhs, witness })
}

/// Presentation and representation file (`rep/1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFile {
    pub schema: String,
    #[serde(flatten)]
    pub presentation: Presentation,
    pub images: BTreeMap<String, Image>,
}

impl RepFile {
    pub fn new(p: Presentation, r: RepAssignment) -> Self {
        RepFile { schema: SCHEMA.into(), presentation: p, images: r.images }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: RepFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if f.schema != SCHEMA {
            return Err(Error::Parse(format!("expected schema {SCHEMA}, found {}", f.schema)));
        }
        f.presentation.validate()?;
        for g in &f.presentation.generators {
            if !f.images.contains_key(g) {
                return Err(Error::UnknownGenerator(g.clone()));
            }
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rep file serializes") + "\n"
    }

    pub fn assignment(&self) -> RepAssignment {
        RepAssignment { images: self.images.clone() }
    }
}

fn word(letters: &[(&str, i64)]) -> Word {
    letters.iter().map(|(g, e)| (g.to_string(), *e)).collect()
}

fn gauss(entries: [[i64; 2]; 4]) -> GaussMatrix {
    entries.map(|[re, im]| Complex::new(re, im))
}

/// `⟨α, β, μ | μαμ⁻¹ = αβ², μβμ⁻¹ = β(αβ²)²⟩` with `α ↦ diag(i, −i)`,
/// `β ↦ [[1, 1], [−2, −1]]`, `μ ↦ I`. Both relators evaluate to `−I`.
pub fn weave_example() -> (Presentation, RepAssignment) {
    let p = Presentation {
        generators: vec!["alpha".into(), "beta".into(), "mu".into()],
        relators: vec![
            word(&[("mu", 1), ("alpha", 1), ("mu", -1), ("beta", -2), ("alpha", -1)]),
            word(&[
                ("mu", 1),
                ("beta", 1),
                ("mu", -1),
                ("beta", -2),
                ("alpha", -1),
                ("beta", -2),
                ("alpha", -1),
                ("beta", -1),
            ]),
        ],
    };
    let images = [
        ("alpha", gauss([[0, 1], [0, 0], [0, 0], [0, -1]])),
        ("beta", gauss([[1, 0], [1, 0], [-2, 0], [-1, 0]])),
        ("mu", gauss([[1, 0], [0, 0], [0, 0], [1, 0]])),
    ]
    .into_iter()
    .map(|(g, m)| (g.to_string(), Image::Exact(m)))
    .collect();
    (p, RepAssignment { images })
}

/// The commutator `αβα⁻¹β⁻¹` in the example, exactly.
pub fn weave_commutator() -> GaussMatrix {
    let (_, r) = weave_example();
    r.eval_exact(&word(&[("alpha", 1), ("beta", 1), ("alpha", -1), ("beta", -1)]))
        .expect("generators are present")
        .expect("images are exact")
}

/// `⟨α | α²⟩` with `α ↦ diag(i, −i)`.
pub fn order_two_example() -> (Presentation, RepAssignment) {
    let p = Presentation { generators: vec!["alpha".into()], relators: vec![word(&[("alpha", 2)])] };
    let images = [("alpha".to_string(), Image::Exact(gauss([[0, 1], [0, 0], [0, 0], [0, -1]])))].into_iter().collect();
    (p, RepAssignment { images })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisOrientation {
    /// Repelling to attracting fixed point of the longitude.
    Longitude,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeripheralPair {
    pub mu: Isometry,
    pub lambda: Isometry,
    pub orientation: AxisOrientation,
}

impl PeripheralPair {
    pub fn new(mu: Isometry, lambda: Isometry) -> Self {
        PeripheralPair { mu, lambda, orientation: AxisOrientation::Longitude }
    }

    pub fn conjugate_by(&self, k: &Isometry) -> Self {
        PeripheralPair { mu: self.mu.conjugate_by(k), lambda: self.lambda.conjugate_by(k), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeFailure {
    /// Meridian trace outside `[−2, 2]`.
    MeridianTrace,
    /// Longitude trace in `[−2, 2]` outside the parabolic case.
    LongitudeTrace,
    NonCommuting,
    /// Meridian axis differs from the longitude axis.
    SkewAxes,
    /// Commuting parabolics with parallel translations.
    RankOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeVerdict {
    ParabolicRankTwo,
    ConePair { theta: f64, length: f64, twist: f64 },
    Fails { reason: ConeFailure },
}

fn commutes(x: &Isometry, y: &Isometry) -> bool {
    let (xe, ye) = (x.entries(), y.entries());
    let c = raw_mul(&raw_mul(&xe, &ye), &raw_mul(&raw_inv(&xe), &raw_inv(&ye)));
    let scale = (raw_norm(&xe) * raw_norm(&ye)).powi(2).max(1.0);
    let dist = |s: f64| c.iter().zip(RAW_ID.iter()).map(|(u, v)| (u - v * s).norm()).fold(0.0, f64::max);
    dist(1.0).min(dist(-1.0)) <= PERIPHERAL_TOL * scale
}

/// `±g − I` with the sign giving trace `+2`; for a parabolic this is the
/// nilpotent part, conjugate to `[[0, τ], [0, 0]]` with `τ` the translation.
fn nilpotent_part(g: &Isometry) -> RawMatrix {
    let e = if g.trace().re < 0.0 { g.neg().entries() } else { g.entries() };
    [e[0] - 1.0, e[1], e[2], e[3] - 1.0]
}

/// Classifies a meridian/longitude pair at a cone locus or cusp.
pub fn cone_conditions(pp: &PeripheralPair) -> ConeVerdict {
    let fail = |reason| ConeVerdict::Fails { reason };
    let (mu, lambda) = (&pp.mu, &pp.lambda);
    let (cm, cl) = (mu.classify(), lambda.classify());
    if cm == IsomClass::Parabolic && cl == IsomClass::Parabolic {
        if !commutes(mu, lambda) {
            return fail(ConeFailure::NonCommuting);
        }
        // Commuting parabolics share a fixed point, so their nilpotent parts
        // are proportional; the ratio of translations is that factor.
        let (u, v) = (nilpotent_part(mu), nilpotent_part(lambda));
        let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let ratio: Complex64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum::<Complex64>() / uu;
        let cross = ratio.im;
        return if cross.abs() > PERIPHERAL_TOL * ratio.norm() {
            ConeVerdict::ParabolicRankTwo
        } else {
            fail(ConeFailure::RankOne)
        };
    }
    let IsomClass::Loxodromic { length, twist } = cl else {
        return fail(ConeFailure::LongitudeTrace);
    };
    let axis = match lambda.axis() {
        Ok(a) => a,
        Err(_) => return fail(ConeFailure::LongitudeTrace),
    };
    let axis = match pp.orientation {
        AxisOrientation::Longitude => axis,
        AxisOrientation::Reversed => axis.reversed(),
    };
    let theta = match cm {
        IsomClass::Loxodromic { .. } => return fail(ConeFailure::MeridianTrace),
        IsomClass::Parabolic => return fail(ConeFailure::NonCommuting),
        IsomClass::Identity => 0.0,
        IsomClass::Elliptic { .. } => match mu.motion_about(&axis, FIXED_POINT_TOL) {
            Ok((theta, _)) => theta,
            Err(_) => return fail(ConeFailure::SkewAxes),
        },
    };
    if !commutes(mu, lambda) {
        return fail(ConeFailure::NonCommuting);
    }
    ConeVerdict::ConePair { theta, length, twist }
}

/// `θᵢ + 4πkᵢ` together with the even-twist framing vector `(2k, 0, 0)`,
/// which lies in the kernel of every framing obstruction.
pub fn prop_angle_witness(theta: &[f64], k: &[i64]) -> Result<(Vec<f64>, FramingVector)> {
    if theta.len() != k.len() {
        return Err(Error::Dimension(format!("{} angles but {} multiples", theta.len(), k.len())));
    }
    let lifted: Vec<f64> = theta.iter().zip(k).map(|(t, &n)| t + 2.0 * TAU * n as f64).collect();
    if let Some(&bad) = lifted.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::NonPositiveAngle(bad));
    }
    let v = FramingVector::even_twist(k);
    debug_assert!(v.x.iter().all(|x| x % 2 == 0));
    Ok((lifted, v))
}

/// Standard-form cone pair about `0 → ∞`.
pub fn standard_cone_pair(theta: f64, length: f64, twist: f64) -> PeripheralPair {
    let axis = Geodesic::vertical_axis();
    PeripheralPair::new(Isometry::rotation_about(&axis, theta), Isometry::loxodromic_along(&axis, length, twist))
}

/// Angular distance on the circle.
pub fn angle_error(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
