//! Face pairings of polyhedron copies and their edge cycles.
//!
//! A [`GluingSpec`] lists copies of a polyhedron (optionally mirrored by
//! `z ↦ z̄`), an anchor triple of boundary points for each face, pairings of
//! faces, and the edge cycles obtained by walking around each edge class.
//! Pairing isometries are fixed by their anchor triples. The composite of a
//! cycle or word `[φ₁, …, φₖ]` is `φₖ ∘ ⋯ ∘ φ₁`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeo::{BoundaryPoint, Geodesic, HPoint, IsomClass, Isometry, Plane, Vertex};
use crate::polyhedron::TrapezohedronGeometry;

pub const SCHEMA: &str = "gluing/1";
/// Endpoint tolerance for a closed edge cycle.
pub const CLOSURE_TOL: f64 = 1e-8;
/// Angle tolerance for cone edges.
pub const ANGLE_TOL: f64 = 1e-8;
/// Entrywise tolerance for identity composites.
pub const IDENTITY_TOL: f64 = 1e-9;

/// A named point (`"inf"`, `"O"`, `"P1"`, `"Pt1"`, …) or a literal `[x, y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Name(String),
    Point([f64; 2]),
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Name(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCopy {
    /// Mirrored copies are the image of the base polyhedron under `z ↦ z̄`.
    pub mirror: bool,
    pub faces: BTreeMap<String, [Label; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRef {
    pub copy: usize,
    pub face: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub id: String,
    pub from: FaceRef,
    pub to: FaceRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Identity,
    /// `multiple · αᵢ` for the 1-based locus `i`.
    Cone {
        locus: usize,
        multiple: f64,
    },
    Angle {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCycle {
    pub id: String,
    pub start_copy: usize,
    /// Oriented edge, as vertex labels in the start copy.
    pub axis: [Label; 2],
    /// Pairing ids, each optionally suffixed `^-1`.
    pub path: Vec<String>,
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peripheral {
    pub locus: usize,
    pub meridian: Vec<String>,
    pub longitude: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingSpec {
    pub schema: String,
    pub name: String,
    pub copies: Vec<PolyCopy>,
    pub pairings: Vec<Pairing>,
    pub edge_cycles: Vec<EdgeCycle>,
    #[serde(default)]
    pub peripheral: Vec<Peripheral>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub edge: String,
    pub composite: Isometry,
    pub class: IsomClass,
    pub target_angle: f64,
    /// Rotation angle in `[0, 2π)` about the oriented edge.
    pub measured_angle: f64,
    pub translation: f64,
    pub pass: bool,
}

/// Resolves labels against an optional trapezohedron.
#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub geometry: Option<&'a TrapezohedronGeometry>,
}

impl<'a> Context<'a> {
    pub fn literal() -> Self {
        Context { geometry: None }
    }

    pub fn of(g: &'a TrapezohedronGeometry) -> Self {
        Context { geometry: Some(g) }
    }

    fn indexed(name: &str, prefix: &str) -> Option<usize> {
        let rest = name.strip_prefix(prefix)?;
        let i: usize = rest.parse().ok()?;
        (1..=4).contains(&i).then_some(i - 1)
    }

    pub fn vertex(&self, label: &Label) -> Result<Vertex> {
        let name = match label {
            Label::Point([x, y]) => return Ok(Vertex::Ideal(BoundaryPoint::new(*x, *y))),
            Label::Name(n) => n.as_str(),
        };
        match name {
            "inf" => return Ok(Vertex::infinity()),
            "O" => return Ok(Vertex::Ideal(BoundaryPoint::new(0.0, 0.0))),
            _ => {}
        }
        let g = self.geometry.ok_or_else(|| Error::Gluing(format!("label {name} needs a geometry")))?;
        let table: [(&str, &[Complex64; 4]); 4] = [("P", &g.big_p), ("Q", &g.big_q), ("R", &g.big_r), ("S", &g.big_s)];
        if let Some(i) = Context::indexed(name, "Pt") {
            return Ok(g.p_tilde[i]);
        }
        if let Some(i) = Context::indexed(name, "Qt") {
            return Ok(g.q_tilde[i]);
        }
        for (prefix, pts) in table {
            if let Some(i) = Context::indexed(name, prefix) {
                return Ok(Vertex::Ideal(BoundaryPoint::Finite(pts[i])));
            }
        }
        Err(Error::Gluing(format!("unknown label {name}")))
    }

    pub fn boundary(&self, label: &Label) -> Result<BoundaryPoint> {
        match self.vertex(label)? {
            Vertex::Ideal(b) => Ok(b),
            Vertex::Finite(_) => Err(Error::Gluing(format!("{label:?} is not a boundary point"))),
        }
    }
}

fn mirror_vertex(v: Vertex, mirror: bool) -> Vertex {
    if !mirror {
        return v;
    }
    match v {
        Vertex::Ideal(b) => Vertex::Ideal(b.conj()),
        Vertex::Finite(p) => Vertex::Finite(HPoint { x: p.x, y: -p.y, h: p.h }),
    }
}

/// A pairing traversed forwards or backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Step {
    pairing: usize,
    inverse: bool,
}

impl GluingSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: GluingSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if spec.schema != SCHEMA {
            return Err(Error::Parse(format!("expected schema {SCHEMA}, got {}", spec.schema)));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// Structural checks: references resolve and every face is paired once.
    pub fn validate(&self) -> Result<()> {
        let mut used: BTreeMap<(usize, &str), usize> = BTreeMap::new();
        for p in &self.pairings {
            for f in [&p.from, &p.to] {
                let copy = self
                    .copies
                    .get(f.copy)
                    .ok_or_else(|| Error::Gluing(format!("pairing {} names missing copy {}", p.id, f.copy)))?;
                if !copy.faces.contains_key(&f.face) {
                    return Err(Error::Gluing(format!("pairing {} names missing face {}", p.id, f.face)));
                }
                *used.entry((f.copy, f.face.as_str())).or_default() += 1;
            }
        }
        for (c, copy) in self.copies.iter().enumerate() {
            for face in copy.faces.keys() {
                match used.get(&(c, face.as_str())).copied().unwrap_or(0) {
                    1 => {}
                    n => return Err(Error::Gluing(format!("face {face} of copy {c} is paired {n} times"))),
                }
            }
        }
        for cycle in &self.edge_cycles {
            if cycle.start_copy >= self.copies.len() {
                return Err(Error::Gluing(format!("cycle {} starts in a missing copy", cycle.id)));
            }
            for s in &cycle.path {
                self.step(s)?;
            }
        }
        for p in &self.peripheral {
            for s in p.meridian.iter().chain(&p.longitude) {
                self.step(s)?;
            }
        }
        Ok(())
    }

    fn step(&self, token: &str) -> Result<Step> {
        let (id, inverse) = match token.strip_suffix("^-1") {
            Some(id) => (id, true),
            None => (token, false),
        };
        let pairing =
            self.pairings.iter().position(|p| p.id == id).ok_or_else(|| Error::UnknownGenerator(token.to_string()))?;
        Ok(Step { pairing, inverse })
    }

    pub fn pairing_index(&self, id: &str) -> Result<usize> {
        self.step(id).map(|s| s.pairing)
    }

    fn anchors(&self, ctx: &Context, f: &FaceRef) -> Result<[BoundaryPoint; 3]> {
        let copy = &self.copies[f.copy];
        let labels = &copy.faces[&f.face];
        let mut out = [BoundaryPoint::Infinity; 3];
        for (slot, l) in out.iter_mut().zip(labels) {
            let b = ctx.boundary(l)?;
            *slot = if copy.mirror { b.conj() } else { b };
        }
        Ok(out)
    }

    /// Carrier plane of a face in its copy.
    pub fn face_plane(&self, ctx: &Context, f: &FaceRef) -> Result<Plane> {
        Plane::through_boundary_points(&self.anchors(ctx, f)?)
    }

    /// The isometry sending the source face's anchors to the target face's.
    pub fn pairing_isometry(&self, ctx: &Context, index: usize) -> Result<Isometry> {
        let p = self.pairings.get(index).ok_or_else(|| Error::Gluing(format!("no pairing {index}")))?;
        let src = self.anchors(ctx, &p.from)?;
        let dst = self.anchors(ctx, &p.to)?;
        Isometry::from_boundary_triples(&src, &dst).map_err(|e| Error::Gluing(format!("pairing {}: {e}", p.id)))
    }

    /// Largest residual of sampled source-plane points mapped onto the target plane.
    pub fn pairing_plane_residual(&self, ctx: &Context, index: usize, samples: usize) -> Result<f64> {
        let p = &self.pairings[index];
        let g = self.pairing_isometry(ctx, index)?;
        let src = self.face_plane(ctx, &p.from)?;
        let dst = self.face_plane(ctx, &p.to)?;
        let mut worst = 0.0f64;
        for k in 0..samples {
            let s = (k as f64 + 0.5) / samples as f64;
            let x = src.interior_sample(s, 0.37 + 0.5 * s);
            worst = worst.max(dst.side_value(&g.apply_interior(&x)).abs());
        }
        Ok(worst)
    }

    /// Product of a word of pairing ids (`φₖ ∘ ⋯ ∘ φ₁` for `[φ₁, …, φₖ]`).
    pub fn holonomy_word(&self, ctx: &Context, word: &[String]) -> Result<Isometry> {
        let mut acc = Isometry::identity();
        for token in word {
            let s = self.step(token)?;
            let g = self.pairing_isometry(ctx, s.pairing)?;
            let g = if s.inverse { g.inverse() } else { g };
            acc = g.compose(&acc);
        }
        Ok(acc)
    }

    fn target_angle(target: &Target, ctx: &Context) -> Result<Option<f64>> {
        Ok(match target {
            Target::Identity => None,
            Target::Angle { value } => Some(*value),
            Target::Cone { locus, multiple } => {
                let g = ctx.geometry.ok_or_else(|| Error::Gluing("cone target needs a geometry".into()))?;
                let a = g.alpha.get(locus.wrapping_sub(1)).ok_or_else(|| Error::Gluing(format!("no locus {locus}")))?;
                Some(multiple * a)
            }
        })
    }

    pub fn edge_cycle_composite(&self, ctx: &Context, index: usize) -> Result<EdgeReport> {
        let cycle = self.edge_cycles.get(index).ok_or_else(|| Error::Gluing(format!("no edge cycle {index}")))?;
        // The walk must chain copies and return to its start.
        let mut copy = cycle.start_copy;
        for token in &cycle.path {
            let s = self.step(token)?;
            let p = &self.pairings[s.pairing];
            let (from, to) = if s.inverse { (&p.to, &p.from) } else { (&p.from, &p.to) };
            if from.copy != copy {
                return Err(Error::Gluing(format!("cycle {}: {token} does not leave copy {copy}", cycle.id)));
            }
            copy = to.copy;
        }
        if copy != cycle.start_copy {
            return Err(Error::Gluing(format!("cycle {} does not return to its start copy", cycle.id)));
        }
        let mirror = self.copies[cycle.start_copy].mirror;
        let u = mirror_vertex(ctx.vertex(&cycle.axis[0])?, mirror);
        let v = mirror_vertex(ctx.vertex(&cycle.axis[1])?, mirror);
        let axis = Geodesic::through(&u, &v)?;
        let composite = self.holonomy_word(ctx, &cycle.path)?;
        let (measured, translation) = composite
            .motion_about(&axis, CLOSURE_TOL)
            .map_err(|_| Error::Gluing(format!("cycle {} is not closed: edge endpoints move", cycle.id)))?;
        let target = GluingSpec::target_angle(&cycle.target, ctx)?;
        let target_angle = target.unwrap_or(TAU);
        let reduced = target_angle.rem_euclid(TAU);
        let full_turn = reduced.min(TAU - reduced) <= ANGLE_TOL;
        let pass = if target.is_none() || full_turn {
            composite.is_identity(IDENTITY_TOL)
        } else {
            let d = (measured - reduced).rem_euclid(TAU);
            d.min(TAU - d) <= ANGLE_TOL && translation.abs() <= ANGLE_TOL
        };
        Ok(EdgeReport {
            edge: cycle.id.clone(),
            composite,
            class: composite.classify(),
            target_angle,
            measured_angle: measured,
            translation,
            pass,
        })
    }

    /// Reports for every edge cycle; a cycle that fails to close is an error.
    pub fn check_all(&self, ctx: &Context) -> Result<Vec<EdgeReport>> {
        (0..self.edge_cycles.len()).map(|i| self.edge_cycle_composite(ctx, i)).collect()
    }

    /// Meridian and longitude holonomies of a 1-based locus.
    pub fn peripheral_pair(&self, ctx: &Context, locus: usize) -> Result<(Isometry, Isometry)> {
        let p = self
            .peripheral
            .iter()
            .find(|p| p.locus == locus)
            .ok_or_else(|| Error::Gluing(format!("no peripheral data for locus {locus}")))?;
        Ok((self.holonomy_word(ctx, &p.meridian)?, self.holonomy_word(ctx, &p.longitude)?))
    }
}

/// Rotation group of order `k`: `k` copies of the wedge `0 ≤ arg z ≤ θ` about
/// the vertical axis, face `B` of copy `j` glued to face `A` of copy `j + 1`.
pub fn wedge_spec(k: usize, theta: f64) -> GluingSpec {
    let e = Complex64::from_polar(1.0, theta);
    let faces: BTreeMap<String, [Label; 3]> = [
        ("A".to_string(), [Label::Point([0.0, 0.0]), "inf".into(), Label::Point([1.0, 0.0])]),
        ("B".to_string(), [Label::Point([0.0, 0.0]), "inf".into(), Label::Point([e.re, e.im])]),
    ]
    .into_iter()
    .collect();
    let copies = vec![PolyCopy { mirror: false, faces }; k];
    let pairings: Vec<Pairing> = (0..k)
        .map(|j| Pairing {
            id: format!("w{j}"),
            from: FaceRef { copy: j, face: "B".into() },
            to: FaceRef { copy: (j + 1) % k, face: "A".into() },
        })
        .collect();
    let cycle = EdgeCycle {
        id: "axis".into(),
        start_copy: 0,
        // Each pairing turns by −θ about 0 → ∞, so +θ about ∞ → 0.
        axis: ["inf".into(), Label::Point([0.0, 0.0])],
        path: pairings.iter().map(|p| p.id.clone()).collect(),
        target: Target::Angle { value: k as f64 * theta },
    };
    GluingSpec {
        schema: SCHEMA.into(),
        name: format!("wedge-{k}"),
        copies,
        pairings,
        edge_cycles: vec![cycle],
        peripheral: vec![],
    }
}

/// Four copies of the trapezohedron indexed by `ℤ₂²`, copy `c = x + 2y`.
/// Copies of odd parity are mirrored. Faces `Vᵢ` and `Hᵢ` join copy `c` to
/// copy `c + xᵢ` with `x = (a, b, a, b)`, `a = (1, 0)`, `b = (0, 1)`.
pub fn weave4_spec() -> GluingSpec {
    let shift = |i: usize| if i.is_multiple_of(2) { 1usize } else { 2usize };
    let add = |c: usize, s: usize| c ^ s;
    let mirror = |c: usize| ((c & 1) ^ (c >> 1)) == 1;
    let face_anchors = |f: &str, i: usize| -> [Label; 3] {
        let n = |p: &str, k: usize| Label::Name(format!("{p}{}", k % 4 + 1));
        match f {
            "V" => ["inf".into(), n("P", i), n("P", i + 1)],
            _ => ["O".into(), n("S", i + 3), n("S", i)],
        }
    };
    let copies: Vec<PolyCopy> = (0..4)
        .map(|c| PolyCopy {
            mirror: mirror(c),
            faces: ["V", "H"]
                .iter()
                .flat_map(|f| (0..4).map(move |i| (format!("{f}{}", i + 1), face_anchors(f, i))))
                .collect(),
        })
        .collect();

    let mut pairings = Vec::new();
    for c in [0usize, 3] {
        for f in ["V", "H"] {
            for i in 0..4 {
                pairings.push(Pairing {
                    id: format!("{f}{}.{c}", i + 1),
                    from: FaceRef { copy: c, face: format!("{f}{}", i + 1) },
                    to: FaceRef { copy: add(c, shift(i)), face: format!("{f}{}", i + 1) },
                });
            }
        }
    }
    let spec_so_far = GluingSpec {
        schema: SCHEMA.into(),
        name: "weave4".into(),
        copies: copies.clone(),
        pairings: pairings.clone(),
        edge_cycles: vec![],
        peripheral: vec![],
    };
    // Crossing face `f` out of copy `c`, as a path token.
    let cross = |c: usize, face: &str| -> (String, usize) {
        for p in &spec_so_far.pairings {
            if p.from.copy == c && p.from.face == face {
                return (p.id.clone(), p.to.copy);
            }
            if p.to.copy == c && p.to.face == face {
                return (format!("{}^-1", p.id), p.from.copy);
            }
        }
        unreachable!("every face is paired")
    };
    let walk = |start: usize, first: &str, second: &str| -> Vec<String> {
        let (mut c, mut path) = (start, Vec::new());
        loop {
            for f in [first, second] {
                let (tok, next) = cross(c, f);
                path.push(tok);
                c = next;
            }
            if c == start {
                return path;
            }
        }
    };
    let lbl = |p: &str, i: usize| Label::Name(format!("{p}{}", i % 4 + 1));
    let face = |p: &str, i: usize| format!("{p}{}", i % 4 + 1);
    let mut edge_cycles = Vec::new();
    for i in 0..4 {
        for start in [0usize, 3] {
            edge_cycles.push(EdgeCycle {
                id: format!("L{}.{start}", i + 1),
                start_copy: start,
                axis: [lbl("Pt", i), lbl("Qt", i)],
                path: walk(start, &face("H", i), &face("V", i)),
                target: Target::Cone { locus: i + 1, multiple: 2.0 },
            });
        }
    }
    for i in 0..4 {
        let right = [
            ("side", [lbl("Qt", i), lbl("Pt", i + 1)], face("V", i), face("H", i + 1)),
            ("bottom", [Label::from("O"), lbl("Qt", i)], face("H", i), face("H", i + 1)),
            ("top", [Label::from("inf"), lbl("Pt", i)], face("V", i + 3), face("V", i)),
        ];
        for (kind, axis, f1, f2) in right {
            edge_cycles.push(EdgeCycle {
                id: format!("{kind}{}", i + 1),
                start_copy: 0,
                axis,
                path: walk(0, &f1, &f2),
                target: Target::Identity,
            });
        }
    }
    let peripheral = (0..4)
        .map(|i| {
            let (m1, c1) = cross(0, &face("H", i));
            let (m2, _) = cross(c1, &face("V", i));
            let (l1, c2) = cross(0, &face("H", i + 1));
            let (l2, _) = cross(c2, &face("V", i + 3));
            Peripheral { locus: i + 1, meridian: vec![m1, m2], longitude: vec![l1, l2] }
        })
        .collect();
    GluingSpec { edge_cycles, peripheral, ..spec_so_far }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::{build_geometry, BParams};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn wedge_pairing_is_rotation() {
        let theta = 0.7;
        let e = Complex64::from_polar(1.0, theta);
        let src = [BoundaryPoint::new(0.0, 0.0), BoundaryPoint::Infinity, BoundaryPoint::new(0.0, 1.0)];
        let dst = [BoundaryPoint::new(0.0, 0.0), BoundaryPoint::Infinity, BoundaryPoint::Finite(e * Complex64::i())];
        let g = Isometry::from_boundary_triples(&src, &dst).unwrap();
        assert!(g.approx_eq(&Isometry::rotation_about(&Geodesic::vertical_axis(), theta), 1e-14));
    }

    #[test]
    fn wedge_cycles() {
        for k in 2..=8 {
            let theta = TAU / k as f64;
            let spec = wedge_spec(k, theta);
            spec.validate().unwrap();
            let r = spec.edge_cycle_composite(&Context::literal(), 0).unwrap();
            assert!(r.pass && r.class == IsomClass::Identity, "{r:?}");
            let spec = wedge_spec(k, 0.3);
            let r = spec.edge_cycle_composite(&Context::literal(), 0).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let spec = wedge_spec(2, 0.6);
        let g = spec.holonomy_word(&Context::literal(), &["w0".into(), "w0^-1".into()]).unwrap();
        assert!(g.is_identity(1e-14));
        assert!(spec.holonomy_word(&Context::literal(), &[]).unwrap().is_identity(0.0));
        assert!(matches!(spec.holonomy_word(&Context::literal(), &["nope".into()]), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn weave4_structure() {
        let spec = weave4_spec();
        spec.validate().unwrap();
        assert_eq!(spec.pairings.len(), 16);
        assert_eq!(spec.edge_cycles.len(), 20);
        let cone: Vec<_> = spec.edge_cycles.iter().filter(|c| c.path.len() == 2).collect();
        assert_eq!(cone.len(), 8);
        assert!(spec.edge_cycles.iter().filter(|c| c.path.len() == 4).count() == 12);
    }

    #[test]
    fn weave4_symmetric_case() {
        let spec = weave4_spec();
        let g = build_geometry(&BParams::new([1.0; 4], 1.0).unwrap());
        let ctx = Context::of(&g);
        for r in spec.check_all(&ctx).unwrap() {
            assert!(r.pass, "{r:?}");
            if r.edge.starts_with('L') {
                assert!((r.measured_angle - PI).abs() < 1e-9);
                assert!(matches!(r.class, IsomClass::Elliptic { angle } if (angle - PI).abs() < 1e-9));
            }
        }
        for i in 0..spec.pairings.len() {
            assert!(spec.pairing_plane_residual(&ctx, i, 20).unwrap() < 1e-9);
        }
        let (mu, _) = spec.peripheral_pair(&ctx, 1).unwrap();
        assert!(matches!(mu.classify(), IsomClass::Elliptic { angle } if (angle - PI).abs() < 1e-9));
        let g = build_geometry(&BParams::new([1.0; 4], 0.3).unwrap());
        let ctx = Context::of(&g);
        let expect = 2.0 * g.alpha[0];
        for r in spec.check_all(&ctx).unwrap() {
            assert!(r.pass, "{r:?}");
            if r.edge.starts_with('L') {
                assert!((r.measured_angle - expect).abs() < 1e-9 && expect < FRAC_PI_2 * 2.0);
            }
        }
    }
}
