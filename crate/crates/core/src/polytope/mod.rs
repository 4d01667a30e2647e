//! Lattice polytopes: the built-in families, face lattice, sedentarity and smoothness.
//!
//! Faces are stored extensionally as sorted vertex-index sets. Facets are
//! found by brute force over affinely independent vertex subsets, which is
//! plenty for the dimensions this crate targets.

pub mod lattice;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2_linalg::{BitVec, Subspace};
use lattice::{det, primitive, rank, saturate, IMat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Simplex { n: usize, d: i64 },
    Cube { n: usize, d: i64 },
    Product { n1: usize, d1: i64, n2: usize, d2: i64 },
    Custom,
}

/// `normal · x <= offset`, with a primitive outer normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
    pub vertices: Vec<usize>,
}

impl Facet {
    fn value(&self, x: &[i64]) -> i64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    family: Family,
    facets: Vec<Facet>,
    faces: Vec<Face>,
    face_index: HashMap<Vec<usize>, usize>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeFile {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    #[serde(default = "custom")]
    family: Family,
}

fn custom() -> Family {
    Family::Custom
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl LatticePolytope {
    pub fn simplex(n: usize, d: i64) -> Result<Self> {
        check_params(n, d)?;
        let mut vs = vec![vec![0; n]];
        for i in 0..n {
            let mut v = vec![0; n];
            v[i] = d;
            vs.push(v);
        }
        Self::from_vertices(vs, Family::Simplex { n, d })
    }

    pub fn cube(n: usize, d: i64) -> Result<Self> {
        check_params(n, d)?;
        let vs = (0..1u32 << n).map(|m| (0..n).map(|i| if m >> i & 1 == 1 { d } else { 0 }).collect()).collect();
        Self::from_vertices(vs, Family::Cube { n, d })
    }

    /// `simplex(n1,d1) x simplex(n2,d2)` in coordinates `x_1..x_{n1}, y_1..y_{n2}`.
    pub fn product(n1: usize, d1: i64, n2: usize, d2: i64) -> Result<Self> {
        let a = Self::simplex(n1, d1)?;
        let b = Self::simplex(n2, d2)?;
        let vs = a
            .vertices
            .iter()
            .flat_map(|x| b.vertices.iter().map(move |y| x.iter().chain(y).copied().collect()))
            .collect();
        Self::from_vertices(vs, Family::Product { n1, d1, n2, d2 })
    }

    /// Full-dimensional lattice polytope given by its vertices.
    pub fn from_vertices(mut vertices: Vec<Vec<i64>>, family: Family) -> Result<Self> {
        let n = vertices.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidParameter("polytope needs positive dimension".into()));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch("vertices of different lengths".into()));
        }
        vertices.sort();
        vertices.dedup();
        if affine_rank(&vertices, &(0..vertices.len()).collect::<Vec<_>>()) != n {
            return Err(Error::Geometry("vertices do not span a full-dimensional polytope".into()));
        }
        let facets = find_facets(&vertices, n);
        for (i, v) in vertices.iter().enumerate() {
            if facets.iter().filter(|f| f.vertices.contains(&i)).count() < n {
                return Err(Error::Geometry(format!("{v:?} is not a vertex of the convex hull")));
            }
        }
        let mut seen: BTreeSet<Vec<usize>> = facets.iter().map(|f| f.vertices.clone()).collect();
        let mut frontier: Vec<Vec<usize>> = seen.iter().cloned().collect();
        while let Some(f) = frontier.pop() {
            for g in &facets {
                let meet: Vec<usize> = f.iter().filter(|i| g.vertices.contains(i)).copied().collect();
                if !meet.is_empty() && seen.insert(meet.clone()) {
                    frontier.push(meet);
                }
            }
        }
        seen.insert((0..vertices.len()).collect());
        let mut faces: Vec<Face> =
            seen.into_iter().map(|vs| Face { dim: affine_rank(&vertices, &vs), vertices: vs }).collect();
        faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
        let face_index = faces.iter().enumerate().map(|(i, f)| (f.vertices.clone(), i)).collect();
        Ok(LatticePolytope { dim: n, vertices, family, facets, faces, face_index })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: PolytopeFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let p = Self::from_vertices(f.vertices, f.family)?;
        if p.dim != f.dim {
            return Err(Error::DimensionMismatch(format!("declared dim {} but vertices have dim {}", f.dim, p.dim)));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolytopeFile { dim: self.dim, vertices: self.vertices.clone(), family: self.family.clone() })
            .expect("polytope serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// All nonempty faces including `P`, ordered by dimension.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_id(&self, vertices: &[usize]) -> Option<usize> {
        self.face_index.get(vertices).copied()
    }

    /// Number of faces of each dimension `0..dim` (excluding `P`).
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dim];
        for face in &self.faces {
            if face.dim < self.dim {
                f[face.dim] += 1;
            }
        }
        f
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim && self.facets.iter().all(|f| f.value(x) <= f.offset)
    }

    /// Index of the smallest face containing all the points.
    pub fn smallest_face(&self, points: &[Vec<i64>]) -> Result<usize> {
        if let Some(p) = points.iter().find(|p| !self.contains(p)) {
            return Err(Error::Geometry(format!("point {p:?} lies outside the polytope")));
        }
        let mut verts: Vec<usize> = (0..self.vertices.len()).collect();
        for f in &self.facets {
            if points.iter().all(|p| f.value(p) == f.offset) {
                verts.retain(|v| f.vertices.contains(v));
            }
        }
        self.face_id(&verts).ok_or_else(|| Error::Internal("face lattice is not closed under intersection".into()))
    }

    /// Primitive vectors spanning the saturated lattice of directions of a face.
    pub fn tangent_lattice(&self, face: usize) -> IMat {
        let vs = &self.faces[face].vertices;
        let base = &self.vertices[vs[0]];
        let diffs: IMat =
            vs[1..].iter().map(|&i| self.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        saturate(&diffs, self.dim)
    }

    /// `Sed(Q)`: the annihilator mod 2 of the saturated tangent lattice of `Q`.
    pub fn face_sedentarity(&self, face: usize) -> Subspace {
        let tangent = Subspace::from_vectors(
            self.dim,
            self.tangent_lattice(face)
                .iter()
                .map(|v| BitVec::from_indices(self.dim, v.iter().enumerate().filter(|(_, x)| *x % 2 != 0).map(|(i, _)| i))),
        );
        tangent.annihilator()
    }

    /// Sedentarity of the smallest face containing `points`.
    pub fn sedentarity(&self, points: &[Vec<i64>]) -> Result<Subspace> {
        Ok(self.face_sedentarity(self.smallest_face(points)?))
    }

    /// `None` if smooth; otherwise the first vertex whose facet normals fail to be a Z-basis.
    pub fn smoothness_check(&self) -> Option<Vec<i64>> {
        for (i, v) in self.vertices.iter().enumerate() {
            let normals: IMat = self.facets.iter().filter(|f| f.vertices.contains(&i)).map(|f| f.normal.clone()).collect();
            if normals.len() != self.dim || det(&normals).abs() != 1 {
                return Some(v.clone());
            }
        }
        None
    }

    pub fn is_smooth(&self) -> bool {
        self.smoothness_check().is_none()
    }

    /// Number of lattice points, by enumeration over the bounding box.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let lo: Vec<i64> = (0..self.dim).map(|k| self.vertices.iter().map(|v| v[k]).min().unwrap()).collect();
        let hi: Vec<i64> = (0..self.dim).map(|k| self.vertices.iter().map(|v| v[k]).max().unwrap()).collect();
        let mut out = Vec::new();
        let mut x = lo.clone();
        loop {
            if self.contains(&x) {
                out.push(x.clone());
            }
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if x[k] < hi[k] {
                    x[k] += 1;
                    break;
                }
                x[k] = lo[k];
            }
        }
    }

    /// Euclidean volume times `dim!`.
    pub fn normalized_volume(&self) -> i128 {
        match &self.family {
            Family::Simplex { n, d } => i128::from(*d).pow(*n as u32),
            Family::Cube { n, d } => i128::from(*d).pow(*n as u32) * factorial(*n),
            Family::Product { n1, d1, n2, d2 } => {
                i128::from(*d1).pow(*n1 as u32)
                    * i128::from(*d2).pow(*n2 as u32)
                    * factorial(n1 + n2)
                    / (factorial(*n1) * factorial(*n2))
            }
            Family::Custom => self.custom_volume(),
        }
    }

    /// Pulling triangulation from the least vertex of each face; exact for any lattice polytope.
    fn custom_volume(&self) -> i128 {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.pulling(&all, self.dim)
            .iter()
            .map(|s| {
                let b = &self.vertices[s[0]];
                let m: IMat = s[1..].iter().map(|&v| self.vertices[v].iter().zip(b).map(|(x, y)| x - y).collect()).collect();
                det(&m).abs()
            })
            .sum()
    }

    fn pulling(&self, verts: &[usize], dim: usize) -> Vec<Vec<usize>> {
        if dim == 0 {
            return vec![vec![verts[0]]];
        }
        let base = verts[0];
        let mut out = Vec::new();
        for face in self.faces.iter().filter(|f| f.dim + 1 == dim && f.vertices.iter().all(|v| verts.contains(v))) {
            if face.vertices.contains(&base) {
                continue;
            }
            for mut s in self.pulling(&face.vertices, face.dim) {
                s.insert(0, base);
                out.push(s);
            }
        }
        out
    }
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

fn check_params(n: usize, d: i64) -> Result<()> {
    if n == 0 || d <= 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and d >= 1, got n = {n}, d = {d}")));
    }
    Ok(())
}

fn affine_rank(vertices: &[Vec<i64>], idx: &[usize]) -> usize {
    if idx.len() <= 1 {
        return 0;
    }
    let base = &vertices[idx[0]];
    let diffs: IMat = idx[1..].iter().map(|&i| vertices[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    rank(&diffs, base.len())
}

fn find_facets(vertices: &[Vec<i64>], n: usize) -> Vec<Facet> {
    let mut facets: Vec<Facet> = Vec::new();
    let mut seen = BTreeSet::new();
    let nv = vertices.len();
    let mut comb: Vec<usize> = (0..n).collect();
    loop {
        if let Some(normal) = hyperplane_normal(vertices, &comb) {
            let vals: Vec<i64> = vertices.iter().map(|v| normal.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
            let h = vals[comb[0]];
            let normal = if vals.iter().all(|&x| x <= h) {
                Some((normal, h))
            } else if vals.iter().all(|&x| x >= h) {
                Some((normal.iter().map(|x| -x).collect(), -h))
            } else {
                None
            };
            if let Some((normal, offset)) = normal {
                let on: Vec<usize> =
                    (0..nv).filter(|&i| normal.iter().zip(&vertices[i]).map(|(a, b)| a * b).sum::<i64>() == offset).collect();
                if seen.insert(on.clone()) {
                    facets.push(Facet { normal, offset, vertices: on });
                }
            }
        }
        // next n-combination of 0..nv
        let mut i = n;
        loop {
            if i == 0 {
                facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
                return facets;
            }
            i -= 1;
            if comb[i] < nv - n + i {
                comb[i] += 1;
                for j in i + 1..n {
                    comb[j] = comb[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Primitive normal of the affine hyperplane through `n` points, if they span one.
fn hyperplane_normal(vertices: &[Vec<i64>], pts: &[usize]) -> Option<Vec<i64>> {
    let n = vertices[0].len();
    let base = &vertices[pts[0]];
    let diffs: IMat = pts[1..].iter().map(|&i| vertices[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let normal: Vec<i64> = (0..n)
        .map(|c| {
            let minor: IMat = diffs.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| *x).collect()).collect();
            let d = det(&minor) as i64;
            if c % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    if normal.iter().all(|x| *x == 0) {
        None
    } else {
        Some(primitive(&normal))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_faces() {
        let p = LatticePolytope::simplex(2, 1).unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.f_vector(), vec![3, 3]);
        let p = LatticePolytope::simplex(4, 3).unwrap();
        assert_eq!(p.f_vector(), vec![5, 10, 10, 5]);
        assert!(p.vertices().contains(&vec![0, 0, 3, 0]));
    }

    #[test]
    fn cube_faces() {
        let p = LatticePolytope::cube(2, 1).unwrap();
        assert_eq!(p.f_vector(), vec![4, 4]);
        assert_eq!(LatticePolytope::cube(3, 2).unwrap().f_vector(), vec![8, 12, 6]);
    }

    #[test]
    fn product_faces() {
        let p = LatticePolytope::product(1, 2, 2, 1).unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.f_vector(), vec![6, 9, 5]);
        assert!(p.is_smooth());
        assert_eq!(p.normalized_volume(), 2 * 3);
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(LatticePolytope::simplex(0, 2), Err(Error::InvalidParameter(_))));
        assert!(matches!(LatticePolytope::cube(2, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sedentarity_examples() {
        let p = LatticePolytope::simplex(2, 3).unwrap();
        let s = p.sedentarity(&[vec![1, 1]]).unwrap();
        assert_eq!(s.dim(), 0);
        let s = p.sedentarity(&[vec![0, 0]]).unwrap();
        assert_eq!(s, Subspace::full(2));
        let s = p.sedentarity(&[vec![0, 0], vec![3, 0]]).unwrap();
        assert_eq!(s, Subspace::from_vectors(2, [BitVec::parse("01").unwrap()]));
        let s = p.sedentarity(&[vec![1, 0], vec![2, 0]]).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(matches!(p.sedentarity(&[vec![3, 1]]), Err(Error::Geometry(_))));
    }

    #[test]
    fn smoothness() {
        for n in 1..=4 {
            assert!(LatticePolytope::simplex(n, 3).unwrap().is_smooth());
            assert!(LatticePolytope::cube(n, 2).unwrap().is_smooth());
        }
        let wedge = LatticePolytope::from_vertices(vec![vec![0, 0], vec![2, 0], vec![0, 1]], Family::Custom).unwrap();
        // (2,0) has edge directions (-1,0), (-2,1) of determinant 1; the singular corner is (0,1).
        assert_eq!(wedge.smoothness_check(), Some(vec![0, 1]));
        assert_eq!(wedge.normalized_volume(), 2);
    }

    #[test]
    fn sedentarity_complements_face_dimension() {
        let ps = [
            LatticePolytope::simplex(3, 2).unwrap(),
            LatticePolytope::cube(3, 2).unwrap(),
            LatticePolytope::product(1, 1, 2, 3).unwrap(),
            LatticePolytope::product(2, 2, 2, 1).unwrap(),
        ];
        for p in &ps {
            for (i, f) in p.faces().iter().enumerate() {
                assert_eq!(p.face_sedentarity(i).dim() + f.dim, p.dim());
                for (j, g) in p.faces().iter().enumerate() {
                    if f.vertices.iter().all(|v| g.vertices.contains(v)) {
                        assert!(p.face_sedentarity(i).contains_subspace(&p.face_sedentarity(j)));
                    }
                }
            }
            // closed under intersection
            for f in p.faces() {
                for g in p.faces() {
                    let meet: Vec<usize> = f.vertices.iter().filter(|v| g.vertices.contains(v)).copied().collect();
                    assert!(meet.is_empty() || p.face_id(&meet).is_some());
                }
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let p = LatticePolytope::product(1, 2, 1, 3).unwrap();
        let q = LatticePolytope::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.family(), p.family());
        assert_eq!(q.lattice_points().len(), 12);
    }
}
