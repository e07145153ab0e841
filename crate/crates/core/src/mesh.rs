//! Oriented triangulated surfaces in the upper half-space with finite or
//! ideal vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeo::{BoundaryPoint, HPoint, Isometry, Plane, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<[usize; 3]>,
    /// Carrier plane of each triangle, when known.
    pub carriers: Vec<Option<Plane>>,
}

fn is_degenerate(t: &[usize; 3]) -> bool {
    t[0] == t[1] || t[1] == t[2] || t[0] == t[2]
}

impl SurfaceMesh {
    pub fn new(vertices: Vec<Vertex>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let carriers = vec![None; triangles.len()];
        let mesh = SurfaceMesh { vertices, triangles, carriers };
        mesh.check_indices()?;
        Ok(mesh)
    }

    pub fn check_indices(&self) -> Result<()> {
        if self.carriers.len() != self.triangles.len() {
            return Err(Error::Dimension(format!(
                "{} carriers for {} triangles",
                self.carriers.len(),
                self.triangles.len()
            )));
        }
        for (k, t) in self.triangles.iter().enumerate() {
            if let Some(&v) = t.iter().find(|&&v| v >= self.vertices.len()) {
                return Err(Error::BadTriangle(k, v));
            }
        }
        Ok(())
    }

    /// Triangles with three distinct vertex indices.
    pub fn proper_triangles(&self) -> impl Iterator<Item = &[usize; 3]> {
        self.triangles.iter().filter(|t| !is_degenerate(t))
    }

    /// Every directed edge of a proper triangle is matched by its reverse,
    /// with multiplicity.
    pub fn check_closed(&self) -> Result<()> {
        self.check_indices()?;
        let mut count: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for t in self.proper_triangles() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a, b)).or_default() += 1;
            }
        }
        for (&(a, b), &n) in &count {
            if count.get(&(b, a)).copied().unwrap_or(0) != n {
                return Err(Error::MeshNotClosed(a, b));
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.check_closed().is_ok()
    }

    /// V − E + F over the proper triangles and the vertices they use.
    pub fn euler_characteristic(&self) -> i64 {
        let mut verts = BTreeSet::new();
        let mut edges = BTreeSet::new();
        let mut faces = 0i64;
        for t in self.proper_triangles() {
            faces += 1;
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                verts.insert(a);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        verts.len() as i64 - edges.len() as i64 + faces
    }

    pub fn reversed(&self) -> SurfaceMesh {
        SurfaceMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
            carriers: self.carriers.clone(),
        }
    }

    /// Image under an isometry. Carriers are mapped along.
    pub fn apply(&self, g: &Isometry) -> SurfaceMesh {
        SurfaceMesh {
            vertices: self.vertices.iter().map(|v| v.apply(g)).collect(),
            triangles: self.triangles.clone(),
            carriers: self.carriers.iter().map(|c| c.and_then(|p| p.apply(g).ok())).collect(),
        }
    }

    /// Disjoint union; the result is closed when both parts are.
    pub fn append(&mut self, other: &SurfaceMesh) {
        let off = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(other.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        self.carriers.extend_from_slice(&other.carriers);
    }

    pub fn triangle_vertices(&self, k: usize) -> [Vertex; 3] {
        self.triangles[k].map(|i| self.vertices[i])
    }

    /// Largest side-function residual of a vertex against its triangle's carrier.
    pub fn carrier_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (t, carrier) in self.triangles.iter().zip(&self.carriers) {
            let Some(plane) = carrier else { continue };
            for &i in t {
                let r = match &self.vertices[i] {
                    Vertex::Finite(p) => plane.side_value(p).abs(),
                    Vertex::Ideal(b) => {
                        if plane.contains_boundary(b, 1e-9) {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                    }
                };
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Wavefront OBJ text. `∞` is drawn at height `clip` over the centroid of
    /// the finite vertices; a finite ideal point `z` is drawn at `(z, 1/clip)`.
    pub fn to_obj(&self, clip: f64) -> String {
        let (mut cx, mut cy, mut n) = (0.0, 0.0, 0.0);
        for v in &self.vertices {
            if let Some(z) = v.projection() {
                cx += z.re;
                cy += z.im;
                n += 1.0;
            }
        }
        if n > 0.0 {
            cx /= n;
            cy /= n;
        }
        let mut out = String::from("# conewright surface mesh\n");
        for v in &self.vertices {
            let (x, y, h) = match v {
                Vertex::Finite(p) => (p.x, p.y, p.h),
                Vertex::Ideal(BoundaryPoint::Finite(z)) => (z.re, z.im, 1.0 / clip),
                Vertex::Ideal(BoundaryPoint::Infinity) => (cx, cy, clip),
            };
            let _ = writeln!(out, "v {x} {y} {h}");
        }
        for t in self.proper_triangles() {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }

    /// Sidecar describing which OBJ vertices are ideal (1-based indices).
    pub fn ideal_sidecar(&self, clip: f64) -> serde_json::Value {
        let ideal: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| match v {
                Vertex::Ideal(b) => Some(serde_json::json!({ "index": i + 1, "point": b })),
                Vertex::Finite(_) => None,
            })
            .collect();
        serde_json::json!({ "schema": "ideal-vertices/1", "clip_height": clip, "ideal": ideal })
    }
}

/// Geodesic sphere of radius `r` about `(0, 0, 1)`, built from a subdivided
/// icosahedron with `level` rounds of 4-to-1 splitting; outward orientation.
pub fn geodesic_sphere(r: f64, level: u32) -> SurfaceMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .iter()
    .map(|p| unit(*p))
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: usize, b: usize, pts: &mut Vec<[f64; 3]>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (pts[a], pts[b]);
                pts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                pts.len() - 1
            })
        };
        for t in &tris {
            let ab = midpoint(t[0], t[1], &mut pts);
            let bc = midpoint(t[1], t[2], &mut pts);
            let ca = midpoint(t[2], t[0], &mut pts);
            next.extend_from_slice(&[[t[0], ab, ca], [t[1], bc, ab], [t[2], ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    // In the upper half-space, the sphere about (0,0,1) of hyperbolic radius r
    // is the Euclidean sphere about (0,0,cosh r) of radius sinh r. The
    // icosahedron frame's outward normals stay outward under this map.
    let (ch, sh) = (r.cosh(), r.sinh());
    let vertices =
        pts.iter().map(|u| Vertex::Finite(HPoint { x: sh * u[0], y: sh * u[1], h: ch + sh * u[2] })).collect();
    let carriers = vec![None; tris.len()];
    SurfaceMesh { vertices, triangles: tris, carriers }
}

/// Volume of a hyperbolic ball of radius `r`.
pub fn ball_volume(r: f64) -> f64 {
    std::f64::consts::PI * ((2.0 * r).sinh() - 2.0 * r)
}

fn unit(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}
