//! Primitive triangulations of lattice polytopes, Viro triangulations, sign
//! distributions, and the mod-2 volume forms `ω(σ)`.
//!
//! Vertices are kept in lexicographic order and every simplex is a sorted list
//! of vertex indices, so "the least vertex" of a simplex is its first entry.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2_linalg::{binomial, wedge, BitVec, Subspace};
use crate::polytope::lattice::det;
use crate::polytope::{Family, LatticePolytope};

/// `t(F2) / Sed` with canonical representatives: a vector is reduced against
/// the echelon basis of `Sed`, and local coordinates are its bits at the
/// non-pivot positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SedQuotient {
    n: usize,
    rows: Vec<(u32, u64)>,
    free_mask: u64,
}

impl SedQuotient {
    pub fn new(sed: &Subspace) -> Self {
        let n = sed.ambient();
        let rows: Vec<(u32, u64)> =
            sed.basis().iter().zip(sed.pivots()).map(|(b, &p)| (p as u32, b.to_u64())).collect();
        let pivot_mask = rows.iter().fold(0u64, |m, (p, _)| m | 1 << p);
        let full = if n == 64 { !0 } else { (1u64 << n) - 1 };
        SedQuotient { n, rows, free_mask: full & !pivot_mask }
    }

    /// Dimension of the quotient.
    pub fn dim(&self) -> usize {
        self.free_mask.count_ones() as usize
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// Lexicographically least representative of `v + Sed`.
    #[inline]
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &(p, b) in &self.rows {
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    /// Local coordinates of the class of `v` (an index below `2^dim`).
    #[inline]
    pub fn local(&self, v: u64) -> u32 {
        crate::f2_linalg::compress(self.reduce(v), self.free_mask) as u32
    }

    /// Canonical representative with the given local coordinates.
    #[inline]
    pub fn rep(&self, local: u32) -> u64 {
        crate::f2_linalg::expand(u64::from(local), self.free_mask)
    }

    /// Local coordinates of the quotient basis vectors `e_j`, `j` free.
    pub fn free_coordinates(&self) -> Vec<usize> {
        (0..self.n).filter(|j| self.free_mask >> j & 1 == 1).collect()
    }

    /// A linear form on `t(F2)` (given by its coefficient mask) restricted to the
    /// quotient basis; only meaningful if the form vanishes on `Sed`.
    pub fn restrict_form(&self, form: u64) -> u64 {
        crate::f2_linalg::compress(form, self.free_mask)
    }
}

#[derive(Clone, Debug)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub facets: Vec<usize>,
    pub cofacets: Vec<usize>,
    /// Smallest face of `P` containing the simplex.
    pub carrier: usize,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    polytope: LatticePolytope,
    vertices: Vec<Vec<i64>>,
    maximal: Vec<Vec<usize>>,
    simplices: Vec<Simplex>,
    by_dim: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    face_quotients: Vec<SedQuotient>,
}

#[derive(Serialize, Deserialize)]
struct TriangulationFile {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    maximal_simplices: Vec<Vec<usize>>,
    polytope: PolytopeRef,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRef {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    #[serde(default = "custom_family")]
    family: Family,
}

fn custom_family() -> Family {
    Family::Custom
}

impl Triangulation {
    /// Builds and validates a triangulation from maximal simplices given by points.
    pub fn from_point_simplices(polytope: &LatticePolytope, simplices: &[Vec<Vec<i64>>]) -> Result<Self> {
        let pts: BTreeSet<Vec<i64>> = simplices.iter().flatten().cloned().collect();
        let vertices: Vec<Vec<i64>> = pts.into_iter().collect();
        let pos: HashMap<&Vec<i64>, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let maximal = simplices.iter().map(|s| s.iter().map(|p| pos[p]).collect()).collect();
        Self::new(polytope.clone(), vertices, maximal)
    }

    /// Builds and validates. Vertices are re-sorted lexicographically.
    pub fn new(polytope: LatticePolytope, vertices: Vec<Vec<i64>>, maximal: Vec<Vec<usize>>) -> Result<Self> {
        let n = polytope.dim();
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch("vertex dimension differs from the polytope".into()));
        }
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|a, b| vertices[*a].cmp(&vertices[*b]));
        let mut relabel = vec![0; vertices.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let sorted: Vec<Vec<i64>> = order.iter().map(|&i| vertices[i].clone()).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid_triangulation("repeated vertex", vec![]));
        }
        let mut maximal: Vec<Vec<usize>> = maximal
            .into_iter()
            .map(|s| {
                let mut s: Vec<usize> =
                    s.into_iter().map(|i| relabel.get(i).copied().ok_or(i)).collect::<std::result::Result<_, _>>().map_err(|i| {
                        Error::invalid_triangulation(format!("vertex index {i} out of range"), vec![])
                    })?;
                s.sort();
                Ok(s)
            })
            .collect::<Result<_>>()?;
        maximal.sort();
        let t = Self::assemble(polytope, sorted, maximal)?;
        t.validate()?;
        Ok(t)
    }

    fn assemble(polytope: LatticePolytope, vertices: Vec<Vec<i64>>, maximal: Vec<Vec<usize>>) -> Result<Self> {
        let n = polytope.dim();
        for (i, s) in maximal.iter().enumerate() {
            if s.len() != n + 1 || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid_triangulation("maximal simplex without n+1 distinct vertices", vec![i]));
            }
        }
        if let Some(v) = vertices.iter().position(|v| !polytope.contains(v)) {
            return Err(Error::Geometry(format!("vertex {:?} lies outside the polytope", vertices[v])));
        }
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in &maximal {
            for mask in 1u32..(1 << s.len()) {
                all.insert(s.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect());
            }
        }
        let mut list: Vec<Vec<usize>> = all.into_iter().collect();
        list.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let index: HashMap<Vec<usize>, usize> = list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut by_dim = vec![Vec::new(); n + 1];
        let mut simplices: Vec<Simplex> = Vec::with_capacity(list.len());
        for (i, s) in list.iter().enumerate() {
            by_dim[s.len() - 1].push(i);
            let pts: Vec<Vec<i64>> = s.iter().map(|&v| vertices[v].clone()).collect();
            let carrier = polytope.smallest_face(&pts)?;
            let facets = if s.len() == 1 {
                Vec::new()
            } else {
                (0..s.len())
                    .map(|k| {
                        let mut f = s.clone();
                        f.remove(k);
                        index[&f]
                    })
                    .collect()
            };
            simplices.push(Simplex { vertices: s.clone(), facets, cofacets: Vec::new(), carrier });
        }
        for i in 0..simplices.len() {
            for f in simplices[i].facets.clone() {
                simplices[f].cofacets.push(i);
            }
        }
        let face_quotients = (0..polytope.faces().len()).map(|f| SedQuotient::new(&polytope.face_sedentarity(f))).collect();
        Ok(Triangulation { polytope, vertices, maximal, simplices, by_dim, index, face_quotients })
    }

    /// Integrality, primitivity, covering by volume, and facet matching.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let mut bad = Vec::new();
        let mut volume: i128 = 0;
        for (i, s) in self.maximal.iter().enumerate() {
            let d = det(&self.edge_matrix(s));
            if d.abs() != 1 {
                bad.push(i);
            }
            volume += d.abs();
        }
        if !bad.is_empty() {
            return Err(Error::invalid_triangulation("non-primitive or degenerate maximal simplices", bad));
        }
        if volume != self.polytope.normalized_volume() {
            return Err(Error::invalid_triangulation(
                format!("normalized volumes sum to {volume}, polytope has {}", self.polytope.normalized_volume()),
                vec![],
            ));
        }
        // Every codimension-one face lies in the boundary with one neighbour, or
        // inside with exactly two neighbours on opposite sides.
        let mut around: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, s) in self.maximal.iter().enumerate() {
            for k in 0..=n {
                let mut f = s.clone();
                let apex = f.remove(k);
                around.entry(f).or_default().push((i, apex));
            }
        }
        for (f, owners) in &around {
            let on_boundary = self.simplex(self.index[f]).carrier != self.polytope.faces().len() - 1;
            let ok = match (on_boundary, owners.as_slice()) {
                (true, [_]) => true,
                (false, [(_, a), (_, b)]) => self.side(f, *a) != self.side(f, *b),
                _ => false,
            };
            if !ok {
                return Err(Error::invalid_triangulation(
                    format!("simplices meeting badly along the face {f:?}"),
                    owners.iter().map(|(i, _)| *i).collect(),
                ));
            }
        }
        Ok(())
    }

    fn edge_matrix(&self, s: &[usize]) -> Vec<Vec<i64>> {
        let b = &self.vertices[s[0]];
        s[1..].iter().map(|&v| self.vertices[v].iter().zip(b).map(|(x, y)| x - y).collect()).collect()
    }

    fn side(&self, face: &[usize], apex: usize) -> i128 {
        let mut s = face.to_vec();
        s.push(apex);
        det(&self.edge_matrix(&s)).signum()
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn maximal_simplices(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: usize) -> &Simplex {
        &self.simplices[id]
    }

    pub fn simplices_of_dim(&self, k: usize) -> &[usize] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn simplex_id(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    /// Number of simplices in each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    /// `t(F2)/Sed(σ)` for the simplex `σ`.
    pub fn quotient(&self, simplex: usize) -> &SedQuotient {
        &self.face_quotients[self.simplices[simplex].carrier]
    }

    pub fn sedentarity(&self, simplex: usize) -> Result<Subspace> {
        let pts: Vec<Vec<i64>> = self.simplices[simplex].vertices.iter().map(|&v| self.vertices[v].clone()).collect();
        self.polytope.sedentarity(&pts)
    }

    /// Edge vector `b - a` reduced mod 2, as a mask, for the vertices `a`, `b`.
    pub fn edge_mod2(&self, a: usize, b: usize) -> u64 {
        self.vertices[a]
            .iter()
            .zip(&self.vertices[b])
            .enumerate()
            .filter(|(_, (x, y))| (*y - *x) % 2 != 0)
            .fold(0u64, |m, (i, _)| m | 1 << i)
    }

    /// `ω(σ)`: the wedge of the edge vectors from the least vertex, mod 2, on
    /// the basis of `dim`-subsets of coordinates.
    pub fn omega(&self, simplex: usize) -> BitVec {
        let s = &self.simplices[simplex].vertices;
        let edges: Vec<u64> = s[1..].iter().map(|&v| self.edge_mod2(s[0], v)).collect();
        let w = wedge(self.dim(), &edges);
        debug_assert_eq!(w.len(), binomial(self.dim(), edges.len()));
        w
    }

    /// Maximal simplices of the restriction to a face of `P` (given by its
    /// vertex-index set in the polytope).
    pub fn restrict_to_face(&self, face: usize) -> Vec<Vec<Vec<i64>>> {
        let k = self.polytope.faces()[face].dim;
        self.simplices_of_dim(k)
            .iter()
            .filter(|&&s| {
                let c = self.simplices[s].carrier;
                self.polytope.faces()[c].vertices.iter().all(|v| self.polytope.faces()[face].vertices.contains(v))
            })
            .map(|&s| self.points(s))
            .collect()
    }

    pub fn points(&self, simplex: usize) -> Vec<Vec<i64>> {
        self.simplices[simplex].vertices.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    pub fn point_simplices(&self) -> Vec<Vec<Vec<i64>>> {
        self.maximal.iter().map(|s| s.iter().map(|&v| self.vertices[v].clone()).collect()).collect()
    }

    pub fn to_json(&self) -> String {
        let f = TriangulationFile {
            dim: self.dim(),
            vertices: self.vertices.clone(),
            maximal_simplices: self.maximal.clone(),
            polytope: PolytopeRef {
                dim: self.dim(),
                vertices: self.polytope.vertices().to_vec(),
                family: self.polytope.family().clone(),
            },
        };
        serde_json::to_string(&f).expect("triangulation serializes")
    }

    /// Parses and validates.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: TriangulationFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let p = LatticePolytope::from_vertices(f.polytope.vertices, f.polytope.family)?;
        if p.dim() != f.dim || f.polytope.dim != f.dim {
            return Err(Error::DimensionMismatch("declared dimensions disagree".into()));
        }
        Self::new(p, f.vertices, f.maximal_simplices)
    }
}

fn unit(n: usize, i: usize, d: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = d;
    v
}

fn shift(p: &[i64], by: &[i64]) -> Vec<i64> {
    p.iter().zip(by).map(|(a, b)| a + b).collect()
}

/// `V^n_d`: the Viro triangulation of the `d`-dilated unit `n`-simplex.
pub fn viro(n: usize, d: i64) -> Result<Triangulation> {
    let p = LatticePolytope::simplex(n, d)?;
    let simplices = viro_points(n, d)?;
    Triangulation::from_point_simplices(&p, &simplices)
}

fn viro_points(n: usize, d: i64) -> Result<Vec<Vec<Vec<i64>>>> {
    if d == 1 {
        let mut s = vec![vec![0; n]];
        s.extend((0..n).map(|i| unit(n, i, 1)));
        return Ok(vec![s]);
    }
    if n == 1 {
        return Ok((0..d).map(|k| vec![vec![k], vec![k + 1]]).collect());
    }
    plus_points(n, d - 1, &viro_points(n, d - 1)?, &viro_points(n - 1, d)?)
}

/// `K + L`: from `K` on `P^n_d` and `L` on `P^{n-1}_{d+1}`, the triangulation of
/// `P^n_{d+1}` that is `K` shifted by `e_n` above height one, and below it the
/// joins of `K` on `[e_n, e_n+d e_1, .., e_n+d e_i]` with `L` on
/// `[(d+1) e_i, .., (d+1) e_{n-1}]` (where `e_0 = 0`).
pub fn plus(k: &Triangulation, l: &Triangulation) -> Result<Triangulation> {
    let n = k.dim();
    let d = match k.polytope().family() {
        Family::Simplex { d, .. } => *d,
        _ => return Err(Error::InvalidParameter("K + L needs K on a simplex".into())),
    };
    if l.dim() + 1 != n || *l.polytope().family() != (Family::Simplex { n: n - 1, d: d + 1 }) {
        return Err(Error::InvalidParameter(format!("K + L needs L on simplex({}, {})", n.saturating_sub(1), d + 1)));
    }
    let simplices = plus_points(n, d, &k.point_simplices(), &l.point_simplices())?;
    Triangulation::from_point_simplices(&LatticePolytope::simplex(n, d + 1)?, &simplices)
}

fn plus_points(n: usize, d: i64, k: &[Vec<Vec<i64>>], l: &[Vec<Vec<i64>>]) -> Result<Vec<Vec<Vec<i64>>>> {
    let en = unit(n, n - 1, 1);
    let kk: Vec<Vec<Vec<i64>>> = k.iter().map(|s| s.iter().map(|p| shift(p, &en)).collect()).collect();
    let ll: Vec<Vec<Vec<i64>>> = l.iter().map(|s| s.iter().map(|p| p.iter().copied().chain([0]).collect()).collect()).collect();
    let mut out = kk.clone();
    for i in 0..n {
        // top face [e_n, e_n + d e_1, .., e_n + d e_i]: height 1 and x_{i+1..n-1} = 0
        let on_top = |p: &Vec<i64>| p[n - 1] == 1 && p[i..n - 1].iter().all(|x| *x == 0);
        // bottom face [(d+1)e_i, .., (d+1)e_{n-1}] (all of the base when i = 0)
        let on_bottom = |p: &Vec<i64>| {
            p[n - 1] == 0 && (i == 0 || (p[..i - 1].iter().all(|x| *x == 0) && p.iter().sum::<i64>() == d + 1))
        };
        let tops = faces_inside(&kk, i, on_top);
        let bottoms = faces_inside(&ll, n - 1 - i, on_bottom);
        for a in &tops {
            for b in &bottoms {
                let mut s = a.clone();
                s.extend(b.iter().cloned());
                s.sort();
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// All `k`-faces of the given simplices whose points satisfy `keep`.
fn faces_inside(simplices: &[Vec<Vec<i64>>], k: usize, keep: impl Fn(&Vec<i64>) -> bool) -> Vec<Vec<Vec<i64>>> {
    let mut out = BTreeSet::new();
    for s in simplices {
        let inside: Vec<&Vec<i64>> = s.iter().filter(|p| keep(p)).collect();
        if inside.len() < k + 1 {
            continue;
        }
        for comb in combinations(inside.len(), k + 1) {
            out.insert(comb.iter().map(|&i| inside[i].clone()).collect::<Vec<_>>());
        }
    }
    out.into_iter().collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    crate::f2_linalg::k_subsets(n, k).into_iter().map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// Staircase triangulation of the product of two triangulations, using the
/// lexicographic vertex orders of the factors.
pub fn product(a: &Triangulation, b: &Triangulation) -> Result<Triangulation> {
    let family = match (a.polytope().family(), b.polytope().family()) {
        (Family::Simplex { n: n1, d: d1 }, Family::Simplex { n: n2, d: d2 }) => {
            Family::Product { n1: *n1, d1: *d1, n2: *n2, d2: *d2 }
        }
        _ => Family::Custom,
    };
    let verts: Vec<Vec<i64>> = a
        .polytope()
        .vertices()
        .iter()
        .flat_map(|x| b.polytope().vertices().iter().map(move |y| x.iter().chain(y).copied().collect()))
        .collect();
    let p = LatticePolytope::from_vertices(verts, family)?;
    Triangulation::from_point_simplices(&p, &product_points(&a.point_simplices(), &b.point_simplices()))
}

fn product_points(a: &[Vec<Vec<i64>>], b: &[Vec<Vec<i64>>]) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for s in a {
        for t in b {
            let (p, q) = (s.len() - 1, t.len() - 1);
            // lattice paths from (0,0) to (p,q): choose which of the p+q steps go right
            for steps in crate::f2_linalg::k_subsets(p + q, p) {
                let (mut i, mut j) = (0, 0);
                let mut simplex = vec![s[0].iter().chain(&t[0]).copied().collect::<Vec<i64>>()];
                for k in 0..p + q {
                    if steps >> k & 1 == 1 {
                        i += 1;
                    } else {
                        j += 1;
                    }
                    simplex.push(s[i].iter().chain(&t[j]).copied().collect());
                }
                simplex.sort();
                out.push(simplex);
            }
        }
    }
    out
}

/// `[0,d]^n` triangulated as the staircase product of `n` unit-segment subdivisions.
pub fn cube(n: usize, d: i64) -> Result<Triangulation> {
    let seg = viro(1, d)?;
    let mut pts = seg.point_simplices();
    for _ in 1..n {
        pts = product_points(&pts, &seg.point_simplices());
    }
    Triangulation::from_point_simplices(&LatticePolytope::cube(n, d)?, &pts)
}

/// `viro(n1,d1) x viro(n2,d2)` on the product polytope.
pub fn product_of_viro(n1: usize, d1: i64, n2: usize, d2: i64) -> Result<Triangulation> {
    product(&viro(n1, d1)?, &viro(n2, d2)?)
}

/// Image of a triangulation of `simplex(n,d)` under the affine symmetry of the
/// simplex that permutes its vertices `0, d e_1, .., d e_n` by `perm`
/// (`perm[i]` is the image of vertex `i`).
pub fn permute_simplex(t: &Triangulation, perm: &[usize]) -> Result<Triangulation> {
    let (n, d) = match t.polytope().family() {
        Family::Simplex { n, d } => (*n, *d),
        _ => return Err(Error::InvalidParameter("vertex permutation needs a simplex".into())),
    };
    if perm.len() != n + 1 || (0..=n).any(|i| !perm.contains(&i)) {
        return Err(Error::InvalidParameter("not a permutation of the simplex vertices".into()));
    }
    // barycentric coordinates (d - sum x, x_1, .., x_n) are permuted
    let map = |p: &Vec<i64>| -> Vec<i64> {
        let mut bary = vec![d - p.iter().sum::<i64>()];
        bary.extend(p.iter().copied());
        let mut out = vec![0; n + 1];
        for (i, b) in bary.iter().enumerate() {
            out[perm[i]] = *b;
        }
        out[1..].to_vec()
    };
    let pts: Vec<Vec<Vec<i64>>> = t.point_simplices().iter().map(|s| s.iter().map(map).collect()).collect();
    Triangulation::from_point_simplices(t.polytope(), &pts)
}

/// Pullback of a triangulation of `simplex(n,d)` along the affine map
/// `simplex(n-1,d) -> simplex(n,d)`, `0 -> d e_1`, `d e_i -> d e_{i+1}`.
pub fn pullback_to_hypotenuse(t: &Triangulation) -> Result<Triangulation> {
    let (n, d) = match t.polytope().family() {
        Family::Simplex { n, d } if *n >= 2 => (*n, *d),
        _ => return Err(Error::InvalidParameter("pullback needs a simplex of dimension at least 2".into())),
    };
    let on_face = |p: &Vec<i64>| p.iter().sum::<i64>() == d;
    let pts: Vec<Vec<Vec<i64>>> = t
        .simplices_of_dim(n - 1)
        .iter()
        .map(|&s| t.points(s))
        .filter(|s| s.iter().all(on_face))
        .map(|s| s.iter().map(|p| p[1..].to_vec()).collect())
        .collect();
    Triangulation::from_point_simplices(&LatticePolytope::simplex(n - 1, d)?, &pts)
}

/// Canonical triangulation of the prism `[v_0..v_n] x [0,1]` over the unit
/// simplex: the simplices `[v_0..v_i] x {1} * [v_i..v_n] x {0}`.
pub fn prism(n: usize) -> Result<Triangulation> {
    let vs: Vec<Vec<i64>> = std::iter::once(vec![0; n]).chain((0..n).map(|i| unit(n, i, 1))).collect();
    let lift = |v: &Vec<i64>, h: i64| -> Vec<i64> { v.iter().copied().chain([h]).collect() };
    let simplices: Vec<Vec<Vec<i64>>> = (0..=n)
        .map(|i| vs[..=i].iter().map(|v| lift(v, 1)).chain(vs[i..].iter().map(|v| lift(v, 0))).collect())
        .collect();
    let corners: Vec<Vec<i64>> = vs.iter().flat_map(|v| [lift(v, 0), lift(v, 1)]).collect();
    let p = LatticePolytope::from_vertices(corners, Family::Product { n1: n, d1: 1, n2: 1, d2: 1 })?;
    Triangulation::from_point_simplices(&p, &simplices)
}

/// A sign `ε(v) ∈ F2` on each vertex of a triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignDistribution(pub Vec<u8>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SignFile {
    Explicit { signs: Vec<u8> },
    Seeded { random_seed: u64 },
}

impl SignDistribution {
    pub fn zero(t: &Triangulation) -> Self {
        SignDistribution(vec![0; t.vertices().len()])
    }

    /// `ε(v) = Π_i (v_i mod 2)`; in the plane this is `ij mod 2`.
    pub fn harnack(t: &Triangulation) -> Self {
        SignDistribution(t.vertices().iter().map(|v| u8::from(v.iter().all(|x| x % 2 != 0))).collect())
    }

    /// Vertex `i` gets the top bit of the `i`-th output of splitmix64 seeded with `seed`.
    pub fn seeded(t: &Triangulation, seed: u64) -> Self {
        let mut rng = SplitMix64::seed_from_u64(seed);
        SignDistribution(t.vertices().iter().map(|_| (rng.next_u64() >> 63) as u8).collect())
    }

    pub fn explicit(t: &Triangulation, signs: Vec<u8>) -> Result<Self> {
        if signs.len() != t.vertices().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} signs for {} vertices",
                signs.len(),
                t.vertices().len()
            )));
        }
        if signs.iter().any(|s| *s > 1) {
            return Err(Error::Parse("signs must be 0 or 1".into()));
        }
        Ok(SignDistribution(signs))
    }

    pub fn from_json(t: &Triangulation, s: &str) -> Result<Self> {
        match serde_json::from_str::<SignFile>(s).map_err(|e| Error::Parse(e.to_string()))? {
            SignFile::Explicit { signs } => Self::explicit(t, signs),
            SignFile::Seeded { random_seed } => Ok(Self::seeded(t, random_seed)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SignFile::Explicit { signs: self.0.clone() }).expect("signs serialize")
    }

    /// `ε(a) + ε(b)` for the edge with vertices `a`, `b`.
    pub fn d_edge(&self, a: usize, b: usize) -> u8 {
        self.0[a] ^ self.0[b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viro_sizes_and_validity() {
        for n in 1..=4usize {
            for d in 1..=4i64 {
                if n == 4 && d > 3 {
                    continue;
                }
                let t = viro(n, d).unwrap();
                assert_eq!(t.maximal_simplices().len() as i128, i128::from(d).pow(n as u32), "viro({n},{d})");
            }
        }
        for d in 5..=6 {
            assert_eq!(viro(2, d).unwrap().maximal_simplices().len() as i64, d * d);
        }
    }

    #[test]
    fn viro_four_four() {
        assert_eq!(viro(4, 4).unwrap().maximal_simplices().len(), 256);
    }

    #[test]
    fn viro_heredity() {
        for n in 2..=4usize {
            for d in 1..=3i64 {
                let t = viro(n, d).unwrap();
                let back = pullback_to_hypotenuse(&t).unwrap();
                let expect = viro(n - 1, d).unwrap();
                assert_eq!(back.maximal_simplices(), expect.maximal_simplices(), "n={n} d={d}");
                assert_eq!(back.vertices(), expect.vertices());
            }
        }
    }

    #[test]
    fn plus_rejects_mismatched_sizes() {
        let k = viro(2, 2).unwrap();
        let l = viro(1, 2).unwrap();
        assert!(matches!(plus(&k, &l), Err(Error::InvalidParameter(_))));
        let l = viro(1, 3).unwrap();
        assert_eq!(plus(&k, &l).unwrap().maximal_simplices().len(), 9);
    }

    #[test]
    fn prism_matches_staircase() {
        for n in 1..=3 {
            let p = prism(n).unwrap();
            let stair = product(&viro(n, 1).unwrap(), &viro(1, 1).unwrap()).unwrap();
            assert_eq!(p.point_simplices().len(), n + 1);
            assert_eq!(stair.point_simplices().len(), n + 1);
            // each prism simplex has exactly one vertical edge
            for simplex in p.point_simplices() {
                let vertical = simplex.iter().filter(|q| q[n] == 1 && simplex.contains(&{ let mut r = (*q).clone(); r[n] = 0; r })).count();
                assert_eq!(vertical, 1);
            }
        }
    }

    #[test]
    fn cubes_and_products() {
        assert_eq!(cube(2, 3).unwrap().maximal_simplices().len(), 18);
        assert_eq!(cube(3, 2).unwrap().maximal_simplices().len(), 48);
        let t = product_of_viro(1, 2, 2, 2).unwrap();
        assert_eq!(t.maximal_simplices().len(), 2 * 4 * 3);
    }

    #[test]
    fn validation_catches_problems() {
        let p = LatticePolytope::simplex(2, 2).unwrap();
        let big = vec![vec![vec![0, 0], vec![2, 0], vec![0, 2]]];
        assert!(matches!(Triangulation::from_point_simplices(&p, &big), Err(Error::InvalidTriangulation { .. })));
        let mut pts = viro(2, 2).unwrap().point_simplices();
        pts.pop();
        assert!(matches!(Triangulation::from_point_simplices(&p, &pts), Err(Error::InvalidTriangulation { .. })));
        // same area, but one triangle doubled and another missing
        let mut pts = viro(2, 2).unwrap().point_simplices();
        pts[1] = pts[0].clone();
        let e = Triangulation::from_point_simplices(&p, &pts);
        assert!(matches!(e, Err(Error::InvalidTriangulation { .. })));
    }

    #[test]
    fn omega_of_edges() {
        let t = viro(2, 1).unwrap();
        let e = t.simplex_id(&[1, 2]).unwrap();
        assert_eq!(t.vertices()[1], vec![0, 1]);
        assert_eq!(t.omega(e), BitVec::parse("11").unwrap());
        let top = t.simplices_of_dim(2)[0];
        assert_eq!(t.omega(top), BitVec::parse("1").unwrap());
    }

    #[test]
    fn sedentarity_of_simplices() {
        let t = viro(2, 3).unwrap();
        for s in 0..t.simplices().len() {
            let sed = t.sedentarity(s).unwrap();
            let q = t.quotient(s);
            assert_eq!(q.dim() + sed.dim(), 2);
            for v in 0..4u64 {
                assert_eq!(q.reduce(v), sed.reduce(&BitVec::from_u64(2, v)).to_u64());
                assert_eq!(q.rep(q.local(v)), q.reduce(v));
            }
        }
    }

    #[test]
    fn json_roundtrip_and_signs() {
        let t = viro(2, 3).unwrap();
        let u = Triangulation::from_json(&t.to_json()).unwrap();
        assert_eq!(t.maximal_simplices(), u.maximal_simplices());
        let s = SignDistribution::seeded(&t, 7);
        assert_eq!(s, SignDistribution::from_json(&t, r#"{"random_seed": 7}"#).unwrap());
        assert_eq!(s, SignDistribution::from_json(&t, &s.to_json()).unwrap());
        assert!(SignDistribution::from_json(&t, r#"{"signs": [0, 1]}"#).is_err());
        let h = SignDistribution::harnack(&t);
        assert_eq!(h.0.iter().map(|x| *x as usize).sum::<usize>(), 1);
    }
}
