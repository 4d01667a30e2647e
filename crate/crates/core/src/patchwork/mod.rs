//! Real lifts. `ℝP` is glued from copies of the triangulated polytope indexed
//! by `t(F2)`; a real simplex is a pair `(σ, w)` with `w ∈ V(σ) = t(F2)/Sed(σ)`
//! in local coordinates, and its `i`-th face is `(σ \ v_i, π(w))`. This is a
//! Δ-complex `ℝK` whose cochains carry the Alexander-Whitney cup product.
//!
//! [`hypersurface`] holds the patchworked hypersurface `ℝX` built from a sign
//! distribution, its filtered chain models and its maps to `ℝK`.

pub mod hypersurface;

pub use hypersurface::{CellFiltration, DirectHypersurface, FiltrationMethod, THypersurface};

use crate::cubical_complex::CubicalComplex;
use crate::error::{Error, Result};
use crate::f2_linalg::{BitVec, F2Matrix, QuotientBasis, SparseF2, Subspace};
use crate::tropical::quotient_map;
use crate::triangulation::Triangulation;

/// Image of a local coordinate vector under a map given by its columns.
#[inline]
pub fn apply_columns(cols: &[u64], v: u32) -> u32 {
    let mut out = 0u64;
    let mut bits = v;
    while bits != 0 {
        out ^= cols[bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    out as u32
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() % 2 == 1
}

/// A triangulation together with its cubical subdivision and real lift.
#[derive(Clone, Debug)]
pub struct RealLift {
    t: Triangulation,
    cx: CubicalComplex,
    local_dim: Vec<usize>,
    /// Per cubical cell, parallel to its facet list: the map `V(c) -> V(f)`, `None` when the upper simplex is kept.
    facet_maps: Vec<Vec<Option<Vec<u64>>>>,
    /// Per simplex: ids of the faces with vertex `i` removed, and the maps onto them.
    faces: Vec<Vec<(usize, Vec<u64>)>>,
    offset: Vec<usize>,
    counts: Vec<usize>,
}

impl RealLift {
    pub fn new(t: &Triangulation) -> Result<Self> {
        let t = t.clone();
        let cx = CubicalComplex::new(&t);
        let n = t.dim();
        for &e in t.simplices_of_dim(1) {
            let vs = &t.simplex(e).vertices;
            let form = t.edge_mod2(vs[0], vs[1]);
            let sed = t.sedentarity(e)?;
            if sed.basis().iter().any(|b| parity(form & b.to_u64())) {
                return Err(Error::Internal(format!("edge form of simplex {e} does not vanish on its sedentarity")));
            }
        }
        let local_dim: Vec<usize> = cx.cells().iter().map(|c| t.quotient(c.upper).dim()).collect();
        let facet_maps = (0..cx.len())
            .map(|c| {
                let up = cx.cell(c).upper;
                cx.facets(c)
                    .iter()
                    .map(|&f| {
                        let fu = cx.cell(f).upper;
                        (fu != up).then(|| quotient_map(&t, up, fu))
                    })
                    .collect()
            })
            .collect();
        let faces = (0..t.simplices().len())
            .map(|s| {
                let vs = &t.simplex(s).vertices;
                if vs.len() == 1 {
                    return Vec::new();
                }
                (0..vs.len())
                    .map(|i| {
                        let rest: Vec<usize> = vs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
                        let f = t.simplex_id(&rest).expect("faces of a simplex are simplices");
                        (f, quotient_map(&t, s, f))
                    })
                    .collect()
            })
            .collect();
        let mut offset = vec![0; t.simplices().len()];
        let mut counts = vec![0; n + 1];
        for (k, count) in counts.iter_mut().enumerate() {
            for &s in t.simplices_of_dim(k) {
                offset[s] = *count;
                *count += 1 << t.quotient(s).dim();
            }
        }
        Ok(RealLift { t, cx, local_dim, facet_maps, faces, offset, counts })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.t
    }

    pub fn cubical(&self) -> &CubicalComplex {
        &self.cx
    }

    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// `dim V(c)` for a cubical cell.
    pub fn local_dim(&self, cell: usize) -> usize {
        self.local_dim[cell]
    }

    /// `π(v)` for the `i`-th facet of a cubical cell.
    #[inline]
    pub fn push_to_facet(&self, cell: usize, i: usize, v: u32) -> u32 {
        match &self.facet_maps[cell][i] {
            Some(cols) => apply_columns(cols, v),
            None => v,
        }
    }

    /// `V(big) -> V(small)` for simplices `small ≤ big`, as columns.
    pub fn projection(&self, big: usize, small: usize) -> Vec<u64> {
        quotient_map(&self.t, big, small)
    }

    /// Number of real simplices of dimension `k`.
    pub fn real_count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn real_index(&self, simplex: usize, w: u32) -> usize {
        self.offset[simplex] + w as usize
    }

    /// `(σ, w)` for an index among real simplices of dimension `k`.
    pub fn real_simplex(&self, k: usize, index: usize) -> (usize, u32) {
        let list = self.t.simplices_of_dim(k);
        let pos = list.partition_point(|&s| self.offset[s] <= index) - 1;
        let s = list[pos];
        (s, (index - self.offset[s]) as u32)
    }

    /// `∂: C_k(ℝK) -> C_{k-1}(ℝK)`.
    pub fn boundary(&self, k: usize) -> SparseF2 {
        if k == 0 {
            return SparseF2::zeros(0, self.real_count(0));
        }
        let mut cols = Vec::with_capacity(self.real_count(k));
        for &s in self.t.simplices_of_dim(k) {
            for w in 0..1u32 << self.t.quotient(s).dim() {
                cols.push(self.faces[s].iter().map(|(f, m)| self.real_index(*f, apply_columns(m, w)) as u32).collect());
            }
        }
        SparseF2::from_columns(self.real_count(k - 1), cols)
    }

    /// `ω_ℝX`: on the real edge `(σ^1, w)` the value of the edge form of `σ^1` at `w`.
    pub fn omega_cochain(&self) -> BitVec {
        let mut out = BitVec::zeros(self.real_count(1));
        for &e in self.t.simplices_of_dim(1) {
            let vs = &self.t.simplex(e).vertices;
            let q = self.t.quotient(e);
            let form = q.restrict_form(self.t.edge_mod2(vs[0], vs[1]));
            for w in 0..1u32 << q.dim() {
                if parity(form & u64::from(w)) {
                    out.set(self.real_index(e, w), true);
                }
            }
        }
        out
    }

    /// Alexander-Whitney cup product of a `k`-cochain and an `l`-cochain on `ℝK`.
    pub fn cup(&self, k: usize, a: &BitVec, l: usize, b: &BitVec) -> Result<BitVec> {
        if a.len() != self.real_count(k) || b.len() != self.real_count(l) {
            return Err(Error::Degree(format!("cochains do not have degrees {k} and {l}")));
        }
        if k + l > self.dim() {
            return Err(Error::Degree(format!("no simplices in degree {}", k + l)));
        }
        let mut out = BitVec::zeros(self.real_count(k + l));
        for &s in self.t.simplices_of_dim(k + l) {
            let vs = &self.t.simplex(s).vertices;
            let front = self.t.simplex_id(&vs[..=k]).expect("face");
            let back = self.t.simplex_id(&vs[k..]).expect("face");
            let (pf, pb) = (self.projection(s, front), self.projection(s, back));
            for w in 0..1u32 << self.t.quotient(s).dim() {
                if a.get(self.real_index(front, apply_columns(&pf, w))) && b.get(self.real_index(back, apply_columns(&pb, w))) {
                    out.set(self.real_index(s, w), true);
                }
            }
        }
        Ok(out)
    }

    /// The top chain `[ℝP]`: every real `n`-simplex.
    pub fn fundamental_chain(&self) -> BitVec {
        let c = self.real_count(self.dim());
        BitVec::from_indices(c, 0..c)
    }

    /// Sum of all real `(n-1)`-simplices lying over a face of `P`.
    pub fn face_chain(&self, face: usize) -> BitVec {
        let p = self.t.polytope();
        let target = &p.faces()[face].vertices;
        let n = self.dim();
        let mut out = BitVec::zeros(self.real_count(n.saturating_sub(1)));
        for &s in self.t.simplices_of_dim(n.saturating_sub(1)) {
            let carrier = &p.faces()[self.t.simplex(s).carrier].vertices;
            if carrier.iter().all(|v| target.contains(v)) {
                for w in 0..1u32 << self.t.quotient(s).dim() {
                    out.set(self.real_index(s, w), true);
                }
            }
        }
        out
    }

    /// The facets `{x_{n-1-j} = 0}`, `j = 0..n`, when `P` has all of them; for
    /// a square this is `(y = 0, x = 0)`.
    pub fn coordinate_facets(&self) -> Option<Vec<usize>> {
        let p = self.t.polytope();
        let n = self.dim();
        (0..n)
            .map(|j| {
                let i = n - 1 - j;
                p.faces().iter().position(|f| f.dim + 1 == n && f.vertices.iter().all(|&v| p.vertices()[v][i] == 0))
            })
            .collect()
    }

    /// `H^*(ℝP; F2)` with representatives, computed on `ℝK`.
    pub fn cohomology(&self) -> Result<RealCohomology> {
        let n = self.dim();
        let cob: Vec<SparseF2> = (0..=n).map(|k| if k < n { self.boundary(k + 1).transpose() } else { SparseF2::zeros(0, self.real_count(n)) }).collect();
        let mut classes = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let len = self.real_count(k);
            let cycles = Subspace::from_vectors(
                len,
                cob[k].kernel_basis().into_iter().map(|z| BitVec::from_indices(len, z.into_iter().map(|j| j as usize))),
            );
            let bounds = if k == 0 { Subspace::zero(len) } else { cob[k - 1].to_dense().image() };
            classes.push(QuotientBasis::new(&cycles, &bounds)?);
        }
        Ok(RealCohomology { classes })
    }

    /// `H_*(ℝP; F2)` as cycles over boundaries, for classes of chains.
    pub fn homology(&self) -> Result<Vec<QuotientBasis>> {
        let n = self.dim();
        (0..=n)
            .map(|k| {
                let len = self.real_count(k);
                let z = self.boundary(k).kernel_basis();
                let cycles = Subspace::from_vectors(len, z.into_iter().map(|z| BitVec::from_indices(len, z.into_iter().map(|j| j as usize))));
                let bounds = if k == n { Subspace::zero(len) } else { self.boundary(k + 1).to_dense().image() };
                QuotientBasis::new(&cycles, &bounds)
            })
            .collect()
    }
}

/// `H^*(ℝP; F2)`: cocycle representatives per degree.
#[derive(Clone, Debug)]
pub struct RealCohomology {
    classes: Vec<QuotientBasis>,
}

impl RealCohomology {
    pub fn betti(&self) -> Vec<usize> {
        self.classes.iter().map(QuotientBasis::dim).collect()
    }

    pub fn dim(&self, k: usize) -> usize {
        self.classes.get(k).map_or(0, QuotientBasis::dim)
    }

    pub fn reps(&self, k: usize) -> &[BitVec] {
        self.classes.get(k).map_or(&[], QuotientBasis::reps)
    }

    pub fn class_of(&self, k: usize, cocycle: &BitVec) -> Result<BitVec> {
        self.classes
            .get(k)
            .and_then(|q| q.coordinates(cocycle))
            .ok_or_else(|| Error::InvariantViolation(format!("not a cocycle in degree {k}")))
    }

    /// A representative of the class with the given coordinates.
    pub fn cocycle(&self, k: usize, coords: &BitVec, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in coords.ones() {
            out.xor_assign(&self.reps(k)[i]);
        }
        out
    }

    /// Product of classes, in coordinates.
    pub fn product(&self, lift: &RealLift, k: usize, a: &BitVec, l: usize, b: &BitVec) -> Result<BitVec> {
        let x = self.cocycle(k, a, lift.real_count(k));
        let y = self.cocycle(l, b, lift.real_count(l));
        self.class_of(k + l, &lift.cup(k, &x, l, &y)?)
    }

    /// Matrix of `α ∪ -: H^j -> H^{j+1}` for `α ∈ H^1`.
    pub fn multiplication_matrix(&self, lift: &RealLift, alpha: &BitVec, j: usize) -> Result<F2Matrix> {
        let cols = (0..self.dim(j))
            .map(|i| self.product(lift, 1, alpha, j, &BitVec::unit(self.dim(j), i)))
            .collect::<Result<Vec<_>>>()?;
        F2Matrix::from_columns(self.dim(j + 1), &cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{cube, viro};

    #[test]
    fn real_projective_spaces() {
        for (n, d) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            let lift = RealLift::new(&viro(n, d).unwrap()).unwrap();
            for k in 1..=n {
                assert!(lift.boundary(k - 1).mul(&lift.boundary(k)).is_zero());
            }
            let h = lift.cohomology().unwrap();
            assert_eq!(h.betti(), vec![1; n + 1], "RP^{n} from degree {d}");
            let omega = lift.omega_cochain();
            if n >= 2 {
                assert!(lift.boundary(2).transpose().apply(&omega).is_zero());
            }
            let w = h.class_of(1, &omega).unwrap();
            assert_eq!(w.get(0), d % 2 == 1);
            // powers of the generator are nonzero up to degree n
            let a = BitVec::unit(1, 0);
            let mut p = a.clone();
            for k in 1..n {
                p = h.product(&lift, 1, &a, k, &p).unwrap();
                assert!(!p.is_zero());
            }
        }
    }

    #[test]
    fn circle_has_one_odd_edge() {
        let lift = RealLift::new(&viro(1, 1).unwrap()).unwrap();
        assert_eq!(lift.real_count(1), 2);
        assert_eq!(lift.omega_cochain().count_ones(), 1);
    }

    #[test]
    fn torus_ring_and_facet_classes() {
        let lift = RealLift::new(&cube(2, 2).unwrap()).unwrap();
        let h = lift.cohomology().unwrap();
        assert_eq!(h.betti(), vec![1, 2, 1]);
        let sq = |a: &BitVec| h.product(&lift, 1, a, 1, a).unwrap();
        for i in 0..2 {
            assert!(sq(&BitVec::unit(2, i)).is_zero());
        }
        let facets = lift.coordinate_facets().unwrap();
        let hom = lift.homology().unwrap();
        let mut classes = Vec::new();
        for f in facets {
            classes.push(hom[1].coordinates(&lift.face_chain(f)).unwrap());
        }
        assert_eq!(crate::cubical_complex::rank_of(&classes, 2), 2);
        assert!(hom[2].coordinates(&lift.fundamental_chain()).is_some_and(|c| !c.is_zero()));
    }

    #[test]
    fn real_simplex_lookup() {
        let lift = RealLift::new(&viro(2, 2).unwrap()).unwrap();
        for k in 0..=2 {
            for i in 0..lift.real_count(k) {
                let (s, w) = lift.real_simplex(k, i);
                assert_eq!(lift.real_index(s, w), i);
            }
        }
    }
}
