//! The T-hypersurface of a sign distribution `ε`.
//!
//! Over the cube `(σ^p; σ^q)` of `X` the real part has one cell for each
//! `v ∈ Arg_ε(σ^p; σ^q)`, the `v ∈ V(σ^q)` at which some edge `ab` of `σ^p`
//! has `ε(a) + ε(b) + ω_ab(v) = 1`. Folding identifies chains of `ℝX` with
//! chains of `X` valued in the cosheaf `c ↦ <x^v : v ∈ Arg(c)> ⊂ F2[V(c)]`,
//! whose filtration by `m^k` gives the tropical spectral sequence.
//!
//! [`DirectHypersurface`] rebuilds `ℝX` from its top cells alone, as an
//! independent check on the folded model.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{apply_columns, parity, RealCohomology, RealLift};
use crate::cubical_complex::{complex_with_coefficients, cup, sheaf_coefficients, AlgebraSheaf, Layout};
use crate::error::{Error, Result};
use crate::f2_linalg::{BitVec, F2Matrix, QuotientBasis, SparseF2, Subspace, TaggedEchelon};
use crate::group_algebra::{aug_power, aug_power_of_subspace, eta_inverse, monomial_function, monomial_span, translate};
use crate::spectral::{direct_pages, DirectPage, Direction, FilteredComplexF2};
use crate::triangulation::SignDistribution;
use crate::tropical::{form_kernel, TropicalCoefficients};
use crate::f2_linalg::k_subsets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiltrationMethod {
    /// `<x^v : v ∈ Arg> ∩ m^k`.
    Intersection,
    /// `Σ_e x^{o_e} m^k_{T_e}` over the edges `e` of the lower simplex.
    EdgeSum,
}

/// Filtration steps of one cell inside `F2[V(c)]`, `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellFiltration {
    pub cell: usize,
    pub local_dim: usize,
    pub steps: Vec<Subspace>,
}

#[derive(Clone, Debug)]
pub struct THypersurface<'a> {
    lift: &'a RealLift,
    signs: SignDistribution,
    args: Vec<Vec<u32>>,
    layout: Layout,
}

/// Local edge forms `(form, ε(a) + ε(b))` of the lower simplex of a cell.
fn lower_edges(lift: &RealLift, signs: &SignDistribution, cell: usize) -> Vec<(u64, u8)> {
    let t = lift.triangulation();
    let c = lift.cubical().cell(cell);
    let lo = &t.simplex(c.lower).vertices;
    let q = t.quotient(c.upper);
    let mut out = Vec::new();
    for i in 0..lo.len() {
        for j in i + 1..lo.len() {
            out.push((q.restrict_form(t.edge_mod2(lo[i], lo[j])), signs.d_edge(lo[i], lo[j])));
        }
    }
    out
}

impl<'a> THypersurface<'a> {
    pub fn new(lift: &'a RealLift, signs: &SignDistribution) -> Result<Self> {
        let t = lift.triangulation();
        let cx = lift.cubical();
        if signs.0.len() != t.vertices().len() {
            return Err(Error::DimensionMismatch(format!("{} signs for {} vertices", signs.0.len(), t.vertices().len())));
        }
        let mut args = vec![Vec::new(); cx.len()];
        for (c, slot) in args.iter_mut().enumerate() {
            if !cx.in_dual_hypersurface(c) {
                continue;
            }
            let m = lift.local_dim(c);
            let edges = lower_edges(lift, signs, c);
            *slot = (0..1u32 << m).filter(|&v| edges.iter().any(|&(f, d)| (d == 1) != parity(f & u64::from(v)))).collect();
            let p = cx.lower_dim(c);
            if slot.len() != (1 << m) - (1 << (m - p)) {
                return Err(Error::Internal(format!("cell {c}: |Arg| = {} with m = {m}, p = {p}", slot.len())));
            }
        }
        for c in cx.dual_hypersurface() {
            for (i, &f) in cx.facets(c).iter().enumerate() {
                if let Some(&v) = args[c].iter().find(|&&v| args[f].binary_search(&lift.push_to_facet(c, i, v)).is_err()) {
                    return Err(Error::Internal(format!("argument {v} of cell {c} leaves the arguments of facet {f}")));
                }
            }
        }
        let layout = Layout::new(cx, &args.iter().map(Vec::len).collect::<Vec<_>>());
        Ok(THypersurface { lift, signs: signs.clone(), args, layout })
    }

    pub fn lift(&self) -> &RealLift {
        self.lift
    }

    pub fn signs(&self) -> &SignDistribution {
        &self.signs
    }

    /// `Arg_ε(c)` as sorted local coordinates.
    pub fn args(&self, cell: usize) -> &[u32] {
        &self.args[cell]
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Number of degrees, `n` (cells of `ℝX` have dimension below `n`).
    pub fn num_degrees(&self) -> usize {
        self.lift.dim()
    }

    /// Number of cells of `ℝX` in each dimension.
    pub fn dims(&self) -> Vec<usize> {
        self.layout.dims[..self.num_degrees()].to_vec()
    }

    fn position(&self, cell: usize, v: u32) -> Result<usize> {
        self.args[cell]
            .binary_search(&v)
            .map_err(|_| Error::Internal(format!("{v} is not an argument of cell {cell}")))
    }

    /// `∂: C_q(ℝX) -> C_{q-1}(ℝX)` on the cells `(c, v)`.
    pub fn boundary(&self, q: usize) -> Result<SparseF2> {
        if q == 0 {
            return Ok(SparseF2::zeros(0, self.layout.dims[0]));
        }
        let cx = self.lift.cubical();
        let mut cols = Vec::with_capacity(self.layout.dims[q]);
        for &c in &self.layout.cells[q] {
            for &v in &self.args[c] {
                let mut col = Vec::with_capacity(2 * q);
                for (i, &f) in cx.facets(c).iter().enumerate() {
                    let w = self.lift.push_to_facet(c, i, v);
                    col.push((self.layout.offset[f].expect("facet in X") + self.position(f, w)?) as u32);
                }
                cols.push(col);
            }
        }
        Ok(SparseF2::from_columns(self.layout.dims[q - 1], cols))
    }

    pub fn boundaries(&self) -> Result<Vec<SparseF2>> {
        (0..self.num_degrees()).map(|q| self.boundary(q)).collect()
    }

    pub fn betti(&self) -> Result<Vec<usize>> {
        let d = self.boundaries()?;
        let ranks: Vec<usize> = d.iter().map(SparseF2::rank).collect();
        Ok((0..d.len()).map(|q| d[q].cols() - ranks[q] - ranks.get(q + 1).copied().unwrap_or(0)).collect())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims().iter().enumerate().map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    /// Sum of all top cells.
    pub fn fundamental_chain(&self) -> BitVec {
        let d = self.layout.dims[self.num_degrees() - 1];
        BitVec::from_indices(d, 0..d)
    }

    pub fn cell_filtration(&self, cell: usize, method: FiltrationMethod) -> Result<CellFiltration> {
        let n = self.lift.dim();
        let m = self.lift.local_dim(cell);
        let len = 1usize << m;
        let steps = match method {
            FiltrationMethod::Intersection => {
                let span = monomial_span(m, self.args[cell].iter().map(|&v| u64::from(v)));
                (0..=n).map(|k| if k > m { Ok(Subspace::zero(len)) } else { span.intersection(&aug_power(m, k)) }).collect::<Result<Vec<_>>>()?
            }
            FiltrationMethod::EdgeSum => {
                let edges = lower_edges(self.lift, &self.signs, cell);
                (0..=n)
                    .map(|k| {
                        let mut gens = Vec::new();
                        for &(f, d) in &edges {
                            if f == 0 {
                                return Err(Error::Internal(format!("edge form vanishes on cell {cell}")));
                            }
                            let o = if d == 1 { 0 } else { 1u64 << f.trailing_zeros() };
                            let step = aug_power_of_subspace(m, &form_kernel(f, m), k);
                            gens.extend(step.basis().iter().map(|b| translate(b, o)));
                        }
                        Ok(Subspace::from_vectors(len, gens))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(CellFiltration { cell, local_dim: m, steps })
    }

    /// Cells and levels where the two filtration constructions disagree.
    pub fn compare_filtrations(&self) -> Result<Vec<(usize, usize)>> {
        let mut bad = Vec::new();
        for c in self.lift.cubical().dual_hypersurface() {
            let a = self.cell_filtration(c, FiltrationMethod::Intersection)?;
            let b = self.cell_filtration(c, FiltrationMethod::EdgeSum)?;
            bad.extend((0..a.steps.len()).filter(|&k| a.steps[k] != b.steps[k]).map(|k| (c, k)));
        }
        Ok(bad)
    }

    /// Adapted basis of a cell: vectors of `F2[V(c)]` with their levels, highest level first.
    fn adapted_basis(&self, cell: usize, method: FiltrationMethod) -> Result<Vec<(BitVec, usize)>> {
        let f = self.cell_filtration(cell, method)?;
        let n = self.lift.dim();
        if f.steps[n].dim() != 0 {
            return Err(Error::Internal(format!("filtration of cell {cell} does not vanish at level {n}")));
        }
        let mut out = Vec::new();
        for k in (0..n).rev() {
            for v in f.steps[k + 1].complement_in(&f.steps[k])? {
                out.push((v, k));
            }
        }
        if out.len() != self.args[cell].len() {
            return Err(Error::Internal(format!("filtration of cell {cell} does not exhaust its arguments")));
        }
        Ok(out)
    }

    /// Cells and levels where `bv_k` of the graded piece is not `F_k^X(c)`.
    pub fn graded_check(&self, trop: &TropicalCoefficients) -> Result<Vec<(usize, usize)>> {
        let mut bad = Vec::new();
        for c in self.lift.cubical().dual_hypersurface() {
            let m = self.lift.local_dim(c);
            let basis = self.adapted_basis(c, FiltrationMethod::Intersection)?;
            for k in 0..self.lift.dim() {
                let fx = &trop.fx[k][c];
                let images = basis.iter().filter(|(_, l)| *l == k).map(|(p, _)| eta_inverse(m, k, p)).collect::<Result<Vec<_>>>()?;
                let count = images.len();
                let span = Subspace::from_vectors(fx.ambient(), images);
                if span != *fx || span.dim() != count {
                    bad.push((c, k));
                }
            }
        }
        Ok(bad)
    }

    /// The filtered chain complex of `ℝX` on a filtration-adapted basis, `F_k` from `m^k`.
    pub fn filtered_complex(&self, method: FiltrationMethod) -> Result<FilteredComplexF2> {
        let n = self.num_degrees();
        let cx = self.lift.cubical();
        let mut bases: HashMap<usize, (Vec<(BitVec, usize)>, TaggedEchelon)> = HashMap::new();
        for c in cx.dual_hypersurface() {
            let basis = self.adapted_basis(c, method)?;
            let mut e = TaggedEchelon::new(1 << self.lift.local_dim(c), basis.len());
            for (j, (v, _)) in basis.iter().enumerate() {
                e.insert(v.clone(), BitVec::unit(basis.len(), j));
            }
            bases.insert(c, (basis, e));
        }
        let mut degrees = Vec::with_capacity(n);
        let mut diff = Vec::with_capacity(n);
        for q in 0..n {
            let mut levels = Vec::with_capacity(self.layout.dims[q]);
            let mut cols = Vec::with_capacity(self.layout.dims[q]);
            for &c in &self.layout.cells[q] {
                let (basis, _) = &bases[&c];
                levels.extend(basis.iter().map(|(_, l)| *l));
                if q == 0 {
                    continue;
                }
                for (p, _) in basis {
                    let mut col = Vec::new();
                    for (i, &f) in cx.facets(c).iter().enumerate() {
                        let (_, ef) = &bases[&f];
                        let mut img = BitVec::zeros(1 << self.lift.local_dim(f));
                        for v in p.ones() {
                            img.flip(self.lift.push_to_facet(c, i, v as u32) as usize);
                        }
                        let (rest, coords) = ef.reduce(&img);
                        if !rest.is_zero() {
                            return Err(Error::Internal(format!("pushforward from cell {c} leaves the span on facet {f}")));
                        }
                        let o = self.layout.offset[f].expect("facet in X");
                        col.extend(coords.ones().map(|j| (o + j) as u32));
                    }
                    cols.push(col);
                }
            }
            degrees.push(levels);
            diff.push(if q == 0 { SparseF2::zeros(0, self.layout.dims[0]) } else { SparseF2::from_columns(self.layout.dims[q - 1], cols) });
        }
        FilteredComplexF2::new(Direction::Homology, n, degrees, diff)
    }

    /// `F_k` of each degree as subspaces of the cell basis (dense; small cases).
    pub fn homology_filtration(&self, method: FiltrationMethod) -> Result<Vec<Vec<Subspace>>> {
        let n = self.num_degrees();
        let mut out = Vec::with_capacity(n);
        for q in 0..n {
            let mut levels = Vec::with_capacity(n);
            for k in 0..n {
                let mut gens = Vec::new();
                for &c in &self.layout.cells[q] {
                    let idx: Vec<usize> = self.args[c].iter().map(|&v| v as usize).collect();
                    let o = self.layout.offset[c].unwrap();
                    for b in self.cell_filtration(c, method)?.steps[k].basis() {
                        gens.push(BitVec::from_indices(self.layout.dims[q], b.gather(&idx).ones().map(|j| o + j)));
                    }
                }
                levels.push(Subspace::from_vectors(self.layout.dims[q], gens));
            }
            out.push(levels);
        }
        Ok(out)
    }

    fn algebra(&self) -> ArgFunctions<'_> {
        ArgFunctions { lift: self.lift, args: &self.args }
    }

    /// Coboundaries of the cochains of `ℝX` (functions on the `Arg` sets),
    /// built from the sheaf `O_ℝX` and checked against the transposed boundaries.
    pub fn cochain_diffs(&self) -> Result<Vec<F2Matrix>> {
        let n = self.num_degrees();
        let cx = self.lift.cubical();
        let coeffs = sheaf_coefficients(cx, &self.algebra())?;
        let (complex, layout) = complex_with_coefficients(cx, &coeffs)?;
        if layout.dims != self.layout.dims {
            return Err(Error::Internal("sheaf layout differs from the cell layout".into()));
        }
        let mut out = Vec::with_capacity(n);
        for q in 0..n {
            let d = if q + 1 < n { complex.diff[q].clone() } else { F2Matrix::zeros(0, self.layout.dims[q]) };
            if q + 1 < n && d != self.boundary(q + 1)?.transpose().to_dense() {
                return Err(Error::Internal(format!("coboundary of degree {q} is not the transposed boundary")));
            }
            out.push(d);
        }
        Ok(out)
    }

    /// `F^k` of the cochains: restrictions of functions of degree at most `k`.
    pub fn cochain_filtration(&self) -> Vec<Vec<Subspace>> {
        let n = self.num_degrees();
        (0..n)
            .map(|q| {
                (0..n)
                    .map(|k| {
                        let mut gens = Vec::new();
                        for &c in &self.layout.cells[q] {
                            let m = self.lift.local_dim(c);
                            let idx: Vec<usize> = self.args[c].iter().map(|&v| v as usize).collect();
                            let o = self.layout.offset[c].unwrap();
                            for j in 0..=k.min(m) {
                                for s in k_subsets(m, j) {
                                    let f = monomial_function(m, s).gather(&idx);
                                    gens.push(BitVec::from_indices(self.layout.dims[q], f.ones().map(|i| o + i)));
                                }
                            }
                        }
                        Subspace::from_vectors(self.layout.dims[q], gens)
                    })
                    .collect()
            })
            .collect()
    }

    /// Cohomological pages with representatives (dense; small cases).
    pub fn cohomology_pages(&self) -> Result<Vec<DirectPage>> {
        direct_pages(Direction::Cohomology, self.num_degrees(), &self.cochain_diffs()?, &self.cochain_filtration())
    }

    /// Cup product of cochains of `ℝX`.
    pub fn cup(&self, a: &BitVec, qa: usize, b: &BitVec, qb: usize) -> Result<BitVec> {
        if qa + qb >= self.num_degrees() {
            return Err(Error::Degree(format!("no cells of ℝX in degree {}", qa + qb)));
        }
        cup(self.lift.triangulation(), self.lift.cubical(), &self.algebra(), &self.layout, (qa, a), (qb, b))
    }

    /// Whether a cell `(σ^p; σ^q)` has `σ^p` as the back face of `σ^q`, and then
    /// the front face with the map onto it.
    fn front_face(&self, cell: usize) -> Option<(usize, Vec<u64>)> {
        let t = self.lift.triangulation();
        let c = self.lift.cubical().cell(cell);
        let lo = &t.simplex(c.lower).vertices;
        let up = &t.simplex(c.upper).vertices;
        if up[up.len() - lo.len()..] != lo[..] {
            return None;
        }
        let front = t.simplex_id(&up[..=c.dim]).expect("face");
        Some((front, self.lift.projection(c.upper, front)))
    }

    /// Subdivision chain map `C_q(ℝX) -> C_q(ℝK)`.
    pub fn subdivide(&self, q: usize, chain: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.lift.real_count(q));
        for &c in &self.layout.cells[q] {
            let block = self.layout.block(chain, c);
            if block.is_zero() {
                continue;
            }
            if let Some((front, cols)) = self.front_face(c) {
                for i in block.ones() {
                    out.flip(self.lift.real_index(front, apply_columns(&cols, self.args[c][i])));
                }
            }
        }
        out
    }

    /// The dual of [`Self::subdivide`]: a `q`-cochain of `ℝK` seen on `ℝX`.
    pub fn restrict_cochain(&self, q: usize, cochain: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.layout.dims[q]);
        for &c in &self.layout.cells[q] {
            if let Some((front, cols)) = self.front_face(c) {
                let o = self.layout.offset[c].unwrap();
                for (i, &v) in self.args[c].iter().enumerate() {
                    if cochain.get(self.lift.real_index(front, apply_columns(&cols, v))) {
                        out.set(o + i, true);
                    }
                }
            }
        }
        out
    }

    /// Rank of `i^q: H^q(ℝP) -> H^q(ℝX)`.
    pub fn restriction_rank(&self, q: usize, ring: &RealCohomology) -> Result<usize> {
        if q >= self.num_degrees() {
            return Ok(0);
        }
        let d = if q == 0 { SparseF2::zeros(self.layout.dims[0], 0) } else { self.boundary(q)?.transpose() };
        let base = d.rank();
        let mut cols = d.columns().to_vec();
        for z in ring.reps(q) {
            cols.push(self.restrict_cochain(q, z).ones().map(|i| i as u32).collect());
        }
        Ok(SparseF2::from_columns(self.layout.dims[q], cols).rank() - base)
    }

    /// Rank of `i_q: H_q(ℝX) -> H_q(ℝP)`, through subdivision.
    pub fn inclusion_rank(&self, q: usize) -> Result<usize> {
        if q >= self.num_degrees() {
            return Ok(0);
        }
        let len = self.layout.dims[q];
        let bk = self.lift.boundary(q + 1);
        let base = bk.rank();
        let mut cols = bk.columns().to_vec();
        for z in self.boundary(q)?.kernel_basis() {
            let chain = BitVec::from_indices(len, z.into_iter().map(|j| j as usize));
            cols.push(self.subdivide(q, &chain).ones().map(|i| i as u32).collect());
        }
        Ok(SparseF2::from_columns(self.lift.real_count(q), cols).rank() - base)
    }

    /// `<β, [ℝX]> = <β ∪ ω, [ℝP]>` for each basis class `β ∈ H^{n-1}(ℝP)`; returns both sides.
    pub fn duality_pairs(&self, ring: &RealCohomology) -> Result<Vec<(bool, bool)>> {
        let n = self.lift.dim();
        let sx = self.subdivide(n - 1, &self.fundamental_chain());
        let omega = self.lift.omega_cochain();
        ring.reps(n - 1)
            .iter()
            .map(|b| {
                let lhs = b.dot(&sx);
                let rhs = self.lift.cup(n - 1, b, 1, &omega)?.count_ones() % 2 == 1;
                Ok((lhs, rhs))
            })
            .collect()
    }

    /// Homology class in `H_{n-1}(ℝP)` of each component (given by its top cells
    /// `(cube, v)`), in coordinates over the classes of `basis` chains.
    pub fn component_classes(&self, components: &[Vec<(usize, u32)>], basis: &[BitVec], homology: &QuotientBasis) -> Result<Vec<BitVec>> {
        let n = self.lift.dim();
        let coords = basis
            .iter()
            .map(|b| homology.coordinates(b).ok_or_else(|| Error::InvariantViolation("basis chain is not a cycle".into())))
            .collect::<Result<Vec<_>>>()?;
        let m = F2Matrix::from_columns(homology.dim(), &coords)?;
        components
            .iter()
            .map(|comp| {
                let mut chain = BitVec::zeros(self.layout.dims[n - 1]);
                for &(c, v) in comp {
                    chain.set(self.layout.offset[c].expect("top cell in X") + self.position(c, v)?, true);
                }
                let class = homology
                    .coordinates(&self.subdivide(n - 1, &chain))
                    .ok_or_else(|| Error::Internal("subdivided component is not a cycle".into()))?;
                m.solve(&class).ok_or_else(|| Error::InvariantViolation("component class outside the span of the basis".into()))
            })
            .collect()
    }
}

/// `O_ℝX`: functions on the `Arg` sets, restricted by pullback.
struct ArgFunctions<'b> {
    lift: &'b RealLift,
    args: &'b [Vec<u32>],
}

impl AlgebraSheaf for ArgFunctions<'_> {
    fn dim(&self, cell: usize) -> usize {
        self.args[cell].len()
    }

    fn restrict(&self, face: usize, cell: usize, x: &BitVec) -> BitVec {
        let cx = self.lift.cubical();
        let (up, fu) = (cx.cell(cell).upper, cx.cell(face).upper);
        let cols = (up != fu).then(|| self.lift.projection(up, fu));
        let mut out = BitVec::zeros(self.args[cell].len());
        for (i, &v) in self.args[cell].iter().enumerate() {
            let w = cols.as_ref().map_or(v, |c| apply_columns(c, v));
            let j = self.args[face].binary_search(&w).expect("arguments push forward");
            if x.get(j) {
                out.set(i, true);
            }
        }
        out
    }

    fn mul(&self, _cell: usize, a: &BitVec, b: &BitVec) -> BitVec {
        a.and(b)
    }

    fn unit(&self, cell: usize) -> BitVec {
        let d = self.args[cell].len();
        BitVec::from_indices(d, 0..d)
    }
}

/// `ℝX` as the closure of its top cells `(v; σ^1; σ^n)`, one for each real
/// top simplex `(σ^n, v)` and edge `σ^1` with `ε(a) + ε(b) + ω_ℝX(σ^1, π(v)) = 1`.
#[derive(Clone, Debug)]
pub struct DirectHypersurface {
    /// Cells `(cube, v)` per dimension, sorted.
    cells: Vec<Vec<(usize, u32)>>,
    index: Vec<HashMap<(usize, u32), usize>>,
    boundary: Vec<SparseF2>,
}

impl DirectHypersurface {
    pub fn build(lift: &RealLift, signs: &SignDistribution) -> Result<Self> {
        let t = lift.triangulation();
        let cx = lift.cubical();
        let n = t.dim();
        if signs.0.len() != t.vertices().len() {
            return Err(Error::DimensionMismatch(format!("{} signs for {} vertices", signs.0.len(), t.vertices().len())));
        }
        let omega = lift.omega_cochain();
        let mut found: Vec<std::collections::HashSet<(usize, u32)>> = vec![Default::default(); n];
        let mut stack = Vec::new();
        for &top in t.simplices_of_dim(n) {
            let vs = &t.simplex(top).vertices;
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    let e = t.simplex_id(&[vs[i], vs[j]]).expect("edge");
                    let proj = lift.projection(top, e);
                    let cube = cx.cell_id(e, top).expect("cube");
                    for v in 0..1u32 << t.quotient(top).dim() {
                        if (signs.d_edge(vs[i], vs[j]) == 1) != omega.get(lift.real_index(e, apply_columns(&proj, v))) && found[n - 1].insert((cube, v)) {
                            stack.push((cube, v));
                        }
                    }
                }
            }
        }
        while let Some((c, v)) = stack.pop() {
            for (i, &f) in cx.facets(c).iter().enumerate() {
                let w = lift.push_to_facet(c, i, v);
                if found[cx.cell(f).dim].insert((f, w)) {
                    stack.push((f, w));
                }
            }
        }
        let cells: Vec<Vec<(usize, u32)>> = found
            .into_iter()
            .map(|s| {
                let mut v: Vec<_> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        let index: Vec<HashMap<(usize, u32), usize>> = cells.iter().map(|l| l.iter().enumerate().map(|(i, &c)| (c, i)).collect()).collect();
        let mut boundary = vec![SparseF2::zeros(0, cells[0].len())];
        for q in 1..n {
            let cols = cells[q]
                .iter()
                .map(|&(c, v)| cx.facets(c).iter().enumerate().map(|(i, &f)| index[q - 1][&(f, lift.push_to_facet(c, i, v))] as u32).collect())
                .collect();
            boundary.push(SparseF2::from_columns(cells[q - 1].len(), cols));
        }
        Ok(DirectHypersurface { cells, index, boundary })
    }

    pub fn cells(&self, q: usize) -> &[(usize, u32)] {
        &self.cells[q]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn boundary(&self, q: usize) -> &SparseF2 {
        &self.boundary[q]
    }

    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.boundary.iter().map(SparseF2::rank).collect();
        (0..ranks.len()).map(|q| self.cells[q].len() - ranks[q] - ranks.get(q + 1).copied().unwrap_or(0)).collect()
    }

    /// The arguments over each cube, sorted.
    pub fn args(&self) -> HashMap<usize, Vec<u32>> {
        let mut out: HashMap<usize, Vec<u32>> = HashMap::new();
        for list in &self.cells {
            for &(c, v) in list {
                out.entry(c).or_default().push(v);
            }
        }
        out
    }

    /// Every codimension-one cell lies in exactly two top cells.
    pub fn manifold_check(&self) -> Result<()> {
        let n = self.cells.len();
        if n < 2 {
            return Ok(());
        }
        let mut count = vec![0usize; self.cells[n - 2].len()];
        for col in self.boundary[n - 1].columns() {
            for &i in col {
                count[i as usize] += 1;
            }
        }
        match count.iter().position(|&k| k != 2) {
            Some(i) => Err(Error::InvariantViolation(format!(
                "cell {:?} has {} top cofaces",
                self.cells[n - 2][i], count[i]
            ))),
            None => Ok(()),
        }
    }

    /// Top cells of each connected component, components ordered by their first top cell.
    pub fn components(&self) -> Vec<Vec<(usize, u32)>> {
        let offsets: Vec<usize> = self.cells.iter().scan(0, |acc, l| {
            let o = *acc;
            *acc += l.len();
            Some(o)
        }).collect();
        let total: usize = self.cells.iter().map(Vec::len).sum();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for q in 1..self.cells.len() {
            for (j, col) in self.boundary[q].columns().iter().enumerate() {
                for &i in col {
                    let (a, b) = (find(&mut parent, offsets[q] + j), find(&mut parent, offsets[q - 1] + i as usize));
                    parent[a] = b;
                }
            }
        }
        let top = self.cells.len() - 1;
        let mut groups: Vec<(usize, Vec<(usize, u32)>)> = Vec::new();
        for (j, &cell) in self.cells[top].iter().enumerate() {
            let r = find(&mut parent, offsets[top] + j);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, g)) => g.push(cell),
                None => groups.push((r, vec![cell])),
            }
        }
        groups.into_iter().map(|(_, g)| g).collect()
    }

    pub fn contains(&self, q: usize, cell: usize, v: u32) -> bool {
        self.index[q].contains_key(&(cell, v))
    }
}
