//! Framing groups: the kernel of the ℤ₂ obstruction map
//! `f : ℤⁿ × (ℤ₂ⁿ/ℤ₂) × ℤ₂ᵐ → ℤ₂ʳ`, `f(x, y, z)ₖ = Σ aₖᵢxᵢ + Σ cₖⱼzⱼ`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_gf2, rank_gf2, smith_invariants};

pub const SCHEMA: &str = "handles/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleData {
    /// Cone loci.
    pub n: usize,
    /// Closed 1-handles.
    pub m: usize,
    /// 2-handles.
    pub r: usize,
    /// `r × n` meridian intersection numbers.
    pub a: Vec<Vec<i64>>,
    /// `r × m` 1-handle intersection parities.
    pub c: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct HandlesFile {
    schema: String,
    #[serde(flatten)]
    data: HandleData,
}

impl HandleData {
    pub fn new(n: usize, m: usize, a: Vec<Vec<i64>>, c: Vec<Vec<u8>>) -> Result<Self> {
        let h = HandleData { n, m, r: a.len(), a, c };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.r || self.c.len() != self.r {
            return Err(Error::Dimension(format!(
                "expected {} rows in a and c, found {} and {}",
                self.r,
                self.a.len(),
                self.c.len()
            )));
        }
        for (k, (ra, rc)) in self.a.iter().zip(&self.c).enumerate() {
            if ra.len() != self.n || rc.len() != self.m {
                return Err(Error::Dimension(format!("row {k}: expected {} + {} columns", self.n, self.m)));
            }
            if rc.iter().any(|&b| b > 1) {
                return Err(Error::Dimension(format!("row {k} of c is not a bit vector")));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: HandlesFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if f.schema != SCHEMA {
            return Err(Error::Parse(format!("expected schema {SCHEMA}, found {}", f.schema)));
        }
        f.data.validate()?;
        Ok(f.data)
    }

    pub fn to_json(&self) -> String {
        let f = HandlesFile { schema: SCHEMA.into(), data: self.clone() };
        serde_json::to_string_pretty(&f).expect("handle data serializes") + "\n"
    }

    /// Rows `(a mod 2 | c)` of the obstruction on the `(x, z)` coordinates.
    pub fn combined(&self) -> Vec<Vec<u8>> {
        self.a
            .iter()
            .zip(&self.c)
            .map(|(ra, rc)| ra.iter().map(|x| x.rem_euclid(2) as u8).chain(rc.iter().copied()).collect())
            .collect()
    }

    /// Reorders the cone loci and 1-handles: column `i` of the result is
    /// column `perm_x[i]` (resp. `perm_z[i]`) of `self`.
    pub fn permuted(&self, perm_x: &[usize], perm_z: &[usize]) -> HandleData {
        HandleData {
            a: self.a.iter().map(|row| perm_x.iter().map(|&i| row[i]).collect()).collect(),
            c: self.c.iter().map(|row| perm_z.iter().map(|&j| row[j]).collect()).collect(),
            ..self.clone()
        }
    }
}

/// `(x, y, z)` with `y` stored as the coset representative having `y₁ = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FramingVector {
    pub x: Vec<i64>,
    pub y: Vec<u8>,
    pub z: Vec<u8>,
}

impl FramingVector {
    pub fn new(x: Vec<i64>, y: Vec<u8>, z: Vec<u8>) -> Self {
        FramingVector { x, y, z }.canonical()
    }

    pub fn zero(n: usize, m: usize) -> Self {
        FramingVector { x: vec![0; n], y: vec![0; n], z: vec![0; m] }
    }

    /// `(2k, 0, ·)`; the `z` part is empty until [`FramingVector::padded`].
    pub fn even_twist(k: &[i64]) -> Self {
        FramingVector { x: k.iter().map(|v| 2 * v).collect(), y: vec![0; k.len()], z: vec![] }
    }

    /// Extends `z` with zeros to length `m`.
    pub fn padded(mut self, m: usize) -> Self {
        self.z.resize(m, 0);
        self
    }

    pub fn canonical(mut self) -> Self {
        if self.y.first() == Some(&1) {
            for b in &mut self.y {
                *b ^= 1;
            }
        }
        self
    }

    pub fn add(&self, other: &FramingVector) -> FramingVector {
        FramingVector {
            x: self.x.iter().zip(&other.x).map(|(u, v)| u + v).collect(),
            y: self.y.iter().zip(&other.y).map(|(u, v)| u ^ v).collect(),
            z: self.z.iter().zip(&other.z).map(|(u, v)| u ^ v).collect(),
        }
        .canonical()
    }

    pub fn neg(&self) -> FramingVector {
        FramingVector { x: self.x.iter().map(|v| -v).collect(), ..self.clone() }
    }
}

pub fn obstruction(h: &HandleData, v: &FramingVector) -> Result<Vec<u8>> {
    if v.x.len() != h.n || v.y.len() != h.n || v.z.len() != h.m {
        return Err(Error::Dimension(format!(
            "vector has shape ({}, {}, {}), handles need ({}, {}, {})",
            v.x.len(),
            v.y.len(),
            v.z.len(),
            h.n,
            h.n,
            h.m
        )));
    }
    Ok(h.a
        .iter()
        .zip(&h.c)
        .map(|(ra, rc)| {
            let s: i64 = ra.iter().zip(&v.x).map(|(a, x)| a * x).sum::<i64>()
                + rc.iter().zip(&v.z).map(|(&c, &z)| i64::from(c & z)).sum::<i64>();
            s.rem_euclid(2) as u8
        })
        .collect())
}

/// Abelian group `ℤ^free_rank ⊕ ⊕ ℤ/tᵢ`, `tᵢ > 1` sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramingGroup {
    pub generators: Vec<FramingVector>,
    /// Index in the ambient group, `2^rank f`.
    pub index: u64,
    pub infinite: bool,
    pub rank: usize,
    pub invariants: Invariants,
}

pub fn framing_group(h: &HandleData) -> Result<FramingGroup> {
    h.validate()?;
    let (n, m) = (h.n, h.m);
    let rows = h.combined();
    let rank = rank_gf2(&rows, n + m);
    let mut generators = Vec::new();
    for i in 0..n {
        let mut v = FramingVector::zero(n, m);
        v.x[i] = 2;
        generators.push(v);
    }
    for j in 1..n {
        let mut v = FramingVector::zero(n, m);
        v.y[j] = 1;
        generators.push(v);
    }
    for k in kernel_gf2(&rows, n + m) {
        let x = k[..n].iter().map(|&b| i64::from(b)).collect();
        generators.push(FramingVector { x, y: vec![0; n], z: k[n..].to_vec() });
    }
    Ok(FramingGroup { generators, index: 1u64 << rank, infinite: n >= 1, rank, invariants: invariants(h)? })
}

/// Group structure of `ker f` from a Smith normal form. The `(x, z)` part is
/// `L / ⟨2e_z⟩` where `L = {v ∈ ℤⁿ⁺ᵐ : (a | c) v ≡ 0}`; the `y` part is
/// `ℤ₂ⁿ⁻¹`.
pub fn invariants(h: &HandleData) -> Result<Invariants> {
    h.validate()?;
    let (n, m) = (h.n, h.m);
    let size = n + m;
    let kernel = kernel_gf2(&h.combined(), size);
    // Free columns: kernel vector k is the only one that is 1 at free[k].
    let free: Vec<usize> = kernel
        .iter()
        .map(|k| {
            (0..size)
                .find(|&c| k[c] == 1 && kernel.iter().filter(|o| o[c] == 1).count() == 1)
                .expect("reduced kernel basis")
        })
        .collect();
    let pivots: Vec<usize> = (0..size).filter(|c| !free.contains(c)).collect();
    // Basis of L: lifted kernel vectors, then 2e_p for pivot columns.
    let nb = kernel.len() + pivots.len();
    let coords = |t: usize| -> Vec<i64> {
        let mut v = vec![0i64; nb];
        if let Some(p) = pivots.iter().position(|&p| p == t) {
            v[kernel.len() + p] = 1;
        } else {
            let k = free.iter().position(|&f| f == t).expect("free column");
            v[k] = 2;
            for (pi, &p) in pivots.iter().enumerate() {
                if kernel[k][p] == 1 {
                    v[kernel.len() + pi] -= 1;
                }
            }
        }
        v
    };
    let relations: Vec<Vec<i64>> = (n..size).map(coords).collect();
    let mut torsion: Vec<i64> = if relations.is_empty() {
        vec![]
    } else {
        // Rows of the relation matrix are basis coordinates.
        let mat: Vec<Vec<i64>> = (0..nb).map(|b| relations.iter().map(|r| r[b]).collect()).collect();
        smith_invariants(&mat).into_iter().filter(|&d| d > 1).collect()
    };
    torsion.extend(std::iter::repeat_n(2, n.saturating_sub(1)));
    torsion.sort_unstable();
    Ok(Invariants { free_rank: size - m, torsion })
}

/// Adds a 1-handle and a 2-handle: `f'(v, z_{m+1}) = (f(v), z_{m+1})`.
pub fn stabilize(h: &HandleData) -> HandleData {
    let mut a = h.a.clone();
    a.push(vec![0; h.n]);
    let mut c: Vec<Vec<u8>> = h.c.iter().map(|row| row.iter().copied().chain([0]).collect()).collect();
    c.push((0..=h.m).map(|j| u8::from(j == h.m)).collect());
    HandleData { n: h.n, m: h.m + 1, r: h.r + 1, a, c }
}

fn y_cosets(n: usize) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![vec![]];
    }
    (0..1u32 << (n - 1))
        .map(|bits| (0..n).map(|i| if i == 0 { 0 } else { ((bits >> (i - 1)) & 1) as u8 }).collect())
        .collect()
}

/// Every element of `ker f` with `|xᵢ| ≤ bound`, by enumeration.
pub fn brute_force_kernel(h: &HandleData, bound: i64) -> Result<BTreeSet<FramingVector>> {
    h.validate()?;
    let mut out = BTreeSet::new();
    let side = (2 * bound + 1) as usize;
    let total = side.pow(h.n as u32);
    for idx in 0..total {
        let mut rest = idx;
        let x: Vec<i64> = (0..h.n)
            .map(|_| {
                let v = (rest % side) as i64 - bound;
                rest /= side;
                v
            })
            .collect();
        for zbits in 0..1u32 << h.m {
            let z: Vec<u8> = (0..h.m).map(|j| ((zbits >> j) & 1) as u8).collect();
            let probe = FramingVector { x: x.clone(), y: vec![0; h.n], z: z.clone() };
            if obstruction(h, &probe)?.iter().all(|&u| u == 0) {
                for y in y_cosets(h.n) {
                    out.insert(FramingVector { x: x.clone(), y, z: z.clone() });
                }
            }
        }
    }
    Ok(out)
}

/// Elements of the subgroup generated by `gens` with `|xᵢ| ≤ bound`, by
/// breadth-first search inside the box widened by the largest generator.
pub fn generated_in_box(gens: &[FramingVector], n: usize, m: usize, bound: i64) -> BTreeSet<FramingVector> {
    let reach = gens.iter().flat_map(|g| g.x.iter()).map(|v| v.abs()).max().unwrap_or(0);
    let wide = bound + reach;
    let side = (2 * wide + 1) as u64;
    // State key: mixed-radix x digits, then y bits, then z bits.
    let bits = |v: &[u8]| v.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i));
    let canon_y = |y: u64| if n > 0 && y & 1 == 1 { y ^ ((1u64 << n) - 1) } else { y };
    let pack = |x: &[i64], y: u64, z: u64| -> u64 {
        let mut key = 0u64;
        for &v in x.iter().rev() {
            key = key * side + (v + wide) as u64;
        }
        (key << (n + m)) | (y << m) | z
    };
    let unpack = |key: u64| -> (Vec<i64>, u64, u64) {
        let z = key & ((1u64 << m) - 1);
        let y = (key >> m) & ((1u64 << n) - 1);
        let mut rest = key >> (n + m);
        let x = (0..n)
            .map(|_| {
                let v = (rest % side) as i64 - wide;
                rest /= side;
                v
            })
            .collect();
        (x, y, z)
    };
    let steps: Vec<(Vec<i64>, u64, u64)> = gens
        .iter()
        .flat_map(|g| {
            let (y, z) = (bits(&g.y), bits(&g.z));
            [(g.x.clone(), y, z), (g.x.iter().map(|v| -v).collect(), y, z)]
        })
        .collect();
    let start = pack(&vec![0; n], 0, 0);
    let mut seen: HashSet<u64> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut x = vec![0i64; n];
    while let Some(key) = queue.pop_front() {
        let (x0, y0, z0) = unpack(key);
        'step: for (dx, dy, dz) in &steps {
            for i in 0..n {
                x[i] = x0[i] + dx[i];
                if x[i].abs() > wide {
                    continue 'step;
                }
            }
            let next = pack(&x, canon_y(y0 ^ dy), z0 ^ dz);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let to_bits = |v: u64, len: usize| (0..len).map(|i| ((v >> i) & 1) as u8).collect::<Vec<u8>>();
    seen.into_iter()
        .map(unpack)
        .filter(|(x, _, _)| x.iter().all(|v| v.abs() <= bound))
        .map(|(x, y, z)| FramingVector { x, y: to_bits(y, n), z: to_bits(z, m) })
        .collect()
}
