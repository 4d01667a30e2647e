//! Cubical subdivision of a triangulation, cellular (co)sheaves on it, and
//! plain F2 (co)homology.
//!
//! A cell is a pair `σ^p ≤ σ^q` of simplices of `K`, of dimension `q - p`.
//! Its faces are the pairs `(a; b)` with `σ^p ≤ a ≤ b ≤ σ^q`; the codimension
//! one faces add a vertex of `σ^q \ σ^p` to the lower simplex or remove one
//! from the upper simplex.
//!
//! The dual hypersurface `X` is the closed subcomplex of cells with `p >= 1`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::f2_linalg::{kernel_of_columns, BitVec, Echelon, F2Matrix, QuotientBasis, Subspace};
use crate::triangulation::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CubicalCell {
    pub lower: usize,
    pub upper: usize,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct CubicalComplex {
    cells: Vec<CubicalCell>,
    by_dim: Vec<Vec<usize>>,
    index: HashMap<(usize, usize), usize>,
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
    lower_dim: Vec<usize>,
}

impl CubicalComplex {
    pub fn new(t: &Triangulation) -> Self {
        let mut cells = Vec::new();
        for upper in 0..t.simplices().len() {
            let vs = &t.simplex(upper).vertices;
            for mask in 1u32..(1 << vs.len()) {
                let lower_vs: Vec<usize> = vs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                let lower = t.simplex_id(&lower_vs).expect("faces of a simplex are simplices");
                cells.push(CubicalCell { lower, upper, dim: vs.len() - lower_vs.len() });
            }
        }
        cells.sort_by_key(|c| (c.dim, c.upper, c.lower));
        let index: HashMap<(usize, usize), usize> = cells.iter().enumerate().map(|(i, c)| ((c.lower, c.upper), i)).collect();
        let top = cells.iter().map(|c| c.dim).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); top + 1];
        for (i, c) in cells.iter().enumerate() {
            by_dim[c.dim].push(i);
        }
        let mut facets = vec![Vec::new(); cells.len()];
        for (i, c) in cells.iter().enumerate() {
            let lo = &t.simplex(c.lower).vertices;
            let up = &t.simplex(c.upper).vertices;
            for &w in up.iter().filter(|w| !lo.contains(w)) {
                let mut raised = lo.clone();
                raised.push(w);
                raised.sort();
                let cut: Vec<usize> = up.iter().copied().filter(|&x| x != w).collect();
                let a = t.simplex_id(&raised).expect("face");
                let b = t.simplex_id(&cut).expect("face");
                facets[i].push(index[&(a, c.upper)]);
                facets[i].push(index[&(c.lower, b)]);
            }
        }
        let mut cofacets = vec![Vec::new(); cells.len()];
        for (i, fs) in facets.iter().enumerate() {
            for &f in fs {
                cofacets[f].push(i);
            }
        }
        let lower_dim = cells.iter().map(|c| t.simplex(c.lower).dim()).collect();
        CubicalComplex { cells, by_dim, index, facets, cofacets, lower_dim }
    }

    pub fn cells(&self) -> &[CubicalCell] {
        &self.cells
    }

    pub fn cell(&self, id: usize) -> CubicalCell {
        self.cells[id]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn top_dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    pub fn cells_of_dim(&self, k: usize) -> &[usize] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn cell_id(&self, lower: usize, upper: usize) -> Option<usize> {
        self.index.get(&(lower, upper)).copied()
    }

    pub fn facets(&self, id: usize) -> &[usize] {
        &self.facets[id]
    }

    pub fn cofacets(&self, id: usize) -> &[usize] {
        &self.cofacets[id]
    }

    /// Dimension `p` of the lower simplex.
    pub fn lower_dim(&self, id: usize) -> usize {
        self.lower_dim[id]
    }

    /// Cells of the dual hypersurface `X`: those with `p >= 1`.
    pub fn dual_hypersurface(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| self.lower_dim[c] >= 1).collect()
    }

    pub fn in_dual_hypersurface(&self, id: usize) -> bool {
        self.lower_dim[id] >= 1
    }

    /// Whether `face ≤ cell`.
    pub fn is_face(&self, t: &Triangulation, face: usize, cell: usize) -> bool {
        let (f, c) = (self.cells[face], self.cells[cell]);
        let sub = |a: usize, b: usize| t.simplex(a).vertices.iter().all(|v| t.simplex(b).vertices.contains(v));
        sub(c.lower, f.lower) && sub(f.upper, c.upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    /// Extension maps go from a cell to its faces; the complex is a chain complex.
    Cosheaf,
    /// Restriction maps go from a face to the cell; the complex is a cochain complex.
    Sheaf,
}

/// Coefficient spaces on the cells of a cubical complex with maps along covering pairs.
///
/// For a cosheaf the map stored at `(cell, facet)` is `F(cell) -> F(facet)`;
/// for a sheaf it is `G(facet) -> G(cell)`.
#[derive(Clone, Debug)]
pub struct CellularCoefficients {
    pub variance: Variance,
    pub dims: Vec<usize>,
    pub maps: HashMap<(usize, usize), F2Matrix>,
}

impl CellularCoefficients {
    /// Builds coefficient data from a dimension function and a map for every covering pair
    /// whose spaces are both nonzero.
    pub fn build(
        cx: &CubicalComplex,
        variance: Variance,
        dims: Vec<usize>,
        mut map: impl FnMut(usize, usize) -> F2Matrix,
    ) -> Result<Self> {
        if dims.len() != cx.len() {
            return Err(Error::DimensionMismatch("one dimension per cell expected".into()));
        }
        let mut maps = HashMap::new();
        for c in 0..cx.len() {
            for &f in cx.facets(c) {
                if dims[c] == 0 || dims[f] == 0 {
                    continue;
                }
                let m = map(c, f);
                let (r, k) = match variance {
                    Variance::Cosheaf => (dims[f], dims[c]),
                    Variance::Sheaf => (dims[c], dims[f]),
                };
                if m.rows() != r || m.cols() != k {
                    return Err(Error::DimensionMismatch(format!("coefficient map on ({c}, {f}) has the wrong shape")));
                }
                maps.insert((c, f), m);
            }
        }
        Ok(CellularCoefficients { variance, dims, maps })
    }

    /// Constant `F2` on the cells where `support` holds.
    pub fn constant(cx: &CubicalComplex, variance: Variance, support: impl Fn(usize) -> bool) -> Result<Self> {
        let dims = (0..cx.len()).map(|c| usize::from(support(c))).collect();
        Self::build(cx, variance, dims, |_, _| F2Matrix::identity(1))
    }

    fn get(&self, cell: usize, facet: usize) -> Option<&F2Matrix> {
        self.maps.get(&(cell, facet))
    }

    /// Both composites along every length-two chain `c'' < c' < c` agree.
    pub fn check_functoriality(&self, cx: &CubicalComplex) -> Result<()> {
        for c in 0..cx.len() {
            let mut seen: HashMap<usize, F2Matrix> = HashMap::new();
            for &f in cx.facets(c) {
                for &g in cx.facets(f) {
                    let composite = match (self.get(c, f), self.get(f, g)) {
                        (Some(a), Some(b)) => match self.variance {
                            Variance::Cosheaf => b.mul(a)?,
                            Variance::Sheaf => a.mul(b)?,
                        },
                        _ => {
                            let (r, k) = match self.variance {
                                Variance::Cosheaf => (self.dims[g], self.dims[c]),
                                Variance::Sheaf => (self.dims[c], self.dims[g]),
                            };
                            F2Matrix::zeros(r, k)
                        }
                    };
                    if let Some(prev) = seen.get(&g) {
                        if *prev != composite {
                            return Err(Error::CoefficientConsistency(format!(
                                "the two paths from cell {c} to cell {g} give different maps"
                            )));
                        }
                    } else {
                        seen.insert(g, composite);
                    }
                }
            }
        }
        Ok(())
    }

    /// The dual coefficient system (transposed maps, opposite variance).
    pub fn dual(&self) -> Self {
        CellularCoefficients {
            variance: match self.variance {
                Variance::Cosheaf => Variance::Sheaf,
                Variance::Sheaf => Variance::Cosheaf,
            },
            dims: self.dims.clone(),
            maps: self.maps.iter().map(|(k, m)| (*k, m.transpose())).collect(),
        }
    }
}

/// Position of each cell's coefficient block inside the graded chain groups.
#[derive(Clone, Debug)]
pub struct Layout {
    /// For each degree, the cells with nonzero coefficients, in order.
    pub cells: Vec<Vec<usize>>,
    /// For each cell, its offset inside its degree (if present).
    pub offset: Vec<Option<usize>>,
    pub dims: Vec<usize>,
    pub cell_dims: Vec<usize>,
}

impl Layout {
    pub fn new(cx: &CubicalComplex, cell_dims: &[usize]) -> Self {
        let mut offset = vec![None; cx.len()];
        let mut cells = Vec::new();
        let mut dims = Vec::new();
        for k in 0..=cx.top_dim() {
            let mut at = 0;
            let mut list = Vec::new();
            for &c in cx.cells_of_dim(k) {
                if cell_dims[c] > 0 {
                    offset[c] = Some(at);
                    at += cell_dims[c];
                    list.push(c);
                }
            }
            cells.push(list);
            dims.push(at);
        }
        Layout { cells, offset, dims, cell_dims: cell_dims.to_vec() }
    }

    /// Coordinates of `x` (a chain of the cell's degree) on one cell.
    pub fn block(&self, x: &BitVec, cell: usize) -> BitVec {
        match self.offset[cell] {
            Some(o) => x.slice(o, self.cell_dims[cell]),
            None => BitVec::zeros(0),
        }
    }
}

/// A chain complex (`∂: C_q -> C_{q-1}`) or cochain complex (`d: C^q -> C^{q+1}`) over F2.
#[derive(Clone, Debug)]
pub struct ChainComplexF2 {
    pub dims: Vec<usize>,
    /// `diff[q]` leaves degree `q`.
    pub diff: Vec<F2Matrix>,
    pub cochain: bool,
}

impl ChainComplexF2 {
    pub fn new(dims: Vec<usize>, diff: Vec<F2Matrix>, cochain: bool) -> Result<Self> {
        if dims.len() != diff.len() {
            return Err(Error::DimensionMismatch("one differential per degree expected".into()));
        }
        for (q, m) in diff.iter().enumerate() {
            let target = if cochain { dims.get(q + 1) } else { q.checked_sub(1).map(|p| &dims[p]) };
            if m.cols() != dims[q] || m.rows() != target.copied().unwrap_or(0) {
                return Err(Error::DimensionMismatch(format!("differential out of degree {q} has the wrong shape")));
            }
        }
        let c = ChainComplexF2 { dims, diff, cochain };
        c.check_square_zero()?;
        Ok(c)
    }

    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    fn check_square_zero(&self) -> Result<()> {
        for q in 0..self.dims.len() {
            let next = if self.cochain { q + 1 } else { q.wrapping_sub(1) };
            if next < self.dims.len() && !self.diff[next].mul(&self.diff[q])?.is_zero() {
                return Err(Error::Internal(format!("differential squares to nonzero at degree {q}")));
            }
        }
        Ok(())
    }

    /// The differential arriving in degree `q`.
    pub fn incoming(&self, q: usize) -> Option<&F2Matrix> {
        if self.cochain {
            q.checked_sub(1).map(|p| &self.diff[p])
        } else {
            self.diff.get(q + 1)
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.diff.iter().map(F2Matrix::rank).collect()
    }

    pub fn betti(&self) -> Vec<usize> {
        let r = self.ranks();
        (0..self.dims.len())
            .map(|q| {
                let incoming = if self.cochain { q.checked_sub(1).map_or(0, |p| r[p]) } else { r.get(q + 1).copied().unwrap_or(0) };
                self.dims[q] - r[q] - incoming
            })
            .collect()
    }

    pub fn cycles(&self, q: usize) -> Subspace {
        self.diff[q].kernel()
    }

    pub fn boundaries(&self, q: usize) -> Subspace {
        match self.incoming(q) {
            Some(m) => m.image(),
            None => Subspace::zero(self.dims[q]),
        }
    }

    /// Homology in degree `q` with pivot-chosen representatives.
    pub fn homology(&self, q: usize) -> Result<Homology> {
        Homology::new(&self.cycles(q), &self.boundaries(q))
    }

    /// The dual complex: transposed differentials.
    pub fn dual(&self) -> Self {
        ChainComplexF2 { dims: self.dims.clone(), diff: self.transposed(), cochain: !self.cochain }
    }

    fn transposed(&self) -> Vec<F2Matrix> {
        let n = self.dims.len();
        (0..n)
            .map(|q| {
                // the dual differential out of q is the transpose of the one arriving in q
                match self.incoming(q) {
                    Some(m) => m.transpose(),
                    None => F2Matrix::zeros(0, self.dims[q]),
                }
            })
            .collect()
    }
}

/// `cycles / boundaries` with a fixed basis of representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    quotient: QuotientBasis,
}

impl Homology {
    pub fn new(cycles: &Subspace, boundaries: &Subspace) -> Result<Self> {
        Ok(Homology { quotient: QuotientBasis::new(cycles, boundaries)? })
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn representatives(&self) -> &[BitVec] {
        self.quotient.reps()
    }

    /// Class of a cycle in the representative basis; `None` if not a cycle.
    pub fn class_of(&self, z: &BitVec) -> Option<BitVec> {
        self.quotient.coordinates(z)
    }
}

/// Assembles the (co)chain complex of `K` with the given coefficients.
pub fn complex_with_coefficients(cx: &CubicalComplex, f: &CellularCoefficients) -> Result<(ChainComplexF2, Layout)> {
    f.check_functoriality(cx)?;
    let layout = Layout::new(cx, &f.dims);
    let top = cx.top_dim();
    let mut diff = Vec::with_capacity(top + 1);
    for q in 0..=top {
        let (src, dst) = match f.variance {
            Variance::Cosheaf => (q, q.checked_sub(1)),
            Variance::Sheaf => (q, (q < top).then_some(q + 1)),
        };
        let Some(dst) = dst else {
            diff.push(F2Matrix::zeros(0, layout.dims[src]));
            continue;
        };
        let mut m = F2Matrix::zeros(layout.dims[dst], layout.dims[src]);
        let (big_deg, _) = match f.variance {
            Variance::Cosheaf => (src, dst),
            Variance::Sheaf => (dst, src),
        };
        for &c in &layout.cells[big_deg] {
            for &g in cx.facets(c) {
                let Some(block) = f.get(c, g) else { continue };
                let (r0, c0) = match f.variance {
                    Variance::Cosheaf => (layout.offset[g].unwrap(), layout.offset[c].unwrap()),
                    Variance::Sheaf => (layout.offset[c].unwrap(), layout.offset[g].unwrap()),
                };
                for i in 0..block.rows() {
                    for j in block.row(i).ones() {
                        m.flip(r0 + i, c0 + j);
                    }
                }
            }
        }
        diff.push(m);
    }
    let cochain = f.variance == Variance::Sheaf;
    let complex = ChainComplexF2::new(layout.dims.clone(), diff, cochain)?;
    Ok((complex, layout))
}

/// A sheaf of unital commutative F2-algebras on the cubical complex.
pub trait AlgebraSheaf {
    fn dim(&self, cell: usize) -> usize;
    /// Restriction from a face to a cell containing it (not necessarily covering).
    fn restrict(&self, face: usize, cell: usize, x: &BitVec) -> BitVec;
    fn mul(&self, cell: usize, a: &BitVec, b: &BitVec) -> BitVec;
    fn unit(&self, cell: usize) -> BitVec;
}

/// Coefficient data of an algebra sheaf (restrictions along covering pairs).
pub fn sheaf_coefficients<S: AlgebraSheaf + ?Sized>(cx: &CubicalComplex, s: &S) -> Result<CellularCoefficients> {
    let dims = (0..cx.len()).map(|c| s.dim(c)).collect();
    CellularCoefficients::build(cx, Variance::Sheaf, dims, |c, f| {
        let cols: Vec<BitVec> = (0..s.dim(f)).map(|j| s.restrict(f, c, &BitVec::unit(s.dim(f), j))).collect();
        F2Matrix::from_columns(s.dim(c), &cols).expect("restriction has the cell's dimension")
    })
}

/// `(α ∪ β)(σ^p; σ^{p+k+l}) = Σ_{σ^{p+k}} α(σ^p; σ^{p+k}) · β(σ^{p+k}; σ^{p+k+l})`,
/// both factors restricted to the big cell.
pub fn cup<S: AlgebraSheaf + ?Sized>(
    t: &Triangulation,
    cx: &CubicalComplex,
    s: &S,
    layout: &Layout,
    alpha: (usize, &BitVec),
    beta: (usize, &BitVec),
) -> Result<BitVec> {
    let (k, a) = alpha;
    let (l, b) = beta;
    if k >= layout.dims.len() || l >= layout.dims.len() || a.len() != layout.dims[k] || b.len() != layout.dims[l] {
        return Err(Error::Degree(format!("cochains do not match their stated degrees {k} and {l}")));
    }
    if k + l >= layout.dims.len() {
        return Err(Error::Degree(format!("no cells in degree {}", k + l)));
    }
    let mut out = BitVec::zeros(layout.dims[k + l]);
    for &c in &layout.cells[k + l] {
        let cell = cx.cell(c);
        let lo = &t.simplex(cell.lower).vertices;
        let up = &t.simplex(cell.upper).vertices;
        let extra: Vec<usize> = up.iter().copied().filter(|v| !lo.contains(v)).collect();
        let mut acc = BitVec::zeros(s.dim(c));
        for choice in crate::f2_linalg::k_subsets(extra.len(), k) {
            let mut mid: Vec<usize> = lo.clone();
            mid.extend((0..extra.len()).filter(|i| choice >> i & 1 == 1).map(|i| extra[i]));
            mid.sort();
            let mid = t.simplex_id(&mid).expect("face");
            let front = cx.cell_id(cell.lower, mid).expect("cell");
            let back = cx.cell_id(mid, cell.upper).expect("cell");
            if layout.offset[front].is_none() || layout.offset[back].is_none() {
                continue;
            }
            let fa = s.restrict(front, c, &layout.block(a, front));
            let fb = s.restrict(back, c, &layout.block(b, back));
            acc.xor_assign(&s.mul(c, &fa, &fb));
        }
        if let Some(o) = layout.offset[c] {
            for i in acc.ones() {
                out.flip(o + i);
            }
        }
    }
    Ok(out)
}

/// The degree-zero cochain equal to the unit on every cell.
pub fn unit_cochain<S: AlgebraSheaf + ?Sized>(s: &S, layout: &Layout) -> BitVec {
    let mut out = BitVec::zeros(layout.dims[0]);
    for &c in &layout.cells[0] {
        let o = layout.offset[c].unwrap();
        for i in s.unit(c).ones() {
            out.flip(o + i);
        }
    }
    out
}

/// Constant `F2` on the whole complex as an algebra sheaf.
pub struct ConstantAlgebra;

impl AlgebraSheaf for ConstantAlgebra {
    fn dim(&self, _cell: usize) -> usize {
        1
    }
    fn restrict(&self, _face: usize, _cell: usize, x: &BitVec) -> BitVec {
        x.clone()
    }
    fn mul(&self, _cell: usize, a: &BitVec, b: &BitVec) -> BitVec {
        a.and(b)
    }
    fn unit(&self, _cell: usize) -> BitVec {
        BitVec::unit(1, 0)
    }
}

/// Rank of a list of vectors.
pub fn rank_of(vectors: &[BitVec], len: usize) -> usize {
    let mut e = Echelon::new(len);
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

/// Kernel of the linear map sending the `j`-th basis vector to `images[j]`.
pub fn kernel_of(images: &[BitVec], target_len: usize) -> Subspace {
    kernel_of_columns(target_len, images, images.len())
}
