//! Tropical cosheaves `F_k^P = Λ^k(t(F2)/Sed)` and `F_k^X ⊂ F_k^P` on the
//! cubical subdivision, their dual sheaves, tropical (co)homology and the maps
//! induced by the inclusions `i_k`.
//!
//! On a cell `(σ^p; σ^q)` the space `V = t(F2)/Sed(σ^q)` is written in the
//! local coordinates of [`SedQuotient`]; `Λ^k V` has the basis `e_S` indexed by
//! the `k`-subsets `S` in the order of [`k_subsets`].

use crate::cubical_complex::{complex_with_coefficients, CellularCoefficients, ChainComplexF2, CubicalComplex, Layout, Variance};
use crate::error::{Error, Result};
use crate::f2_linalg::{binomial, det_mod2, induced_map_on_subquotient, k_subsets, wedge, BitVec, F2Matrix, QuotientBasis, Subspace};
use crate::triangulation::Triangulation;

/// `Λ^k` of the linear map `F2^a -> F2^b` whose columns are the masks `cols`.
pub fn exterior_power(cols: &[u64], b: usize, k: usize) -> F2Matrix {
    let subsets = k_subsets(cols.len(), k);
    let images: Vec<BitVec> = subsets
        .iter()
        .map(|&s| {
            let vs: Vec<u64> = (0..cols.len()).filter(|i| s >> i & 1 == 1).map(|i| cols[i]).collect();
            wedge(b, &vs)
        })
        .collect();
    F2Matrix::from_columns(binomial(b, k), &images).expect("wedge length")
}

/// Matrix of the contraction `ω·− : Λ^k V -> Λ^{k-p} V` for `ω = α_1 ∧ ... ∧ α_p`,
/// with the forms `α_i` given as masks on `V = F2^m`.
///
/// `ω·e_S = Σ_{T ⊂ S, |T| = k-p} det(α_i(e_s))_{s ∈ S \ T} e_T`.
pub fn contraction_matrix(forms: &[u64], m: usize, k: usize) -> F2Matrix {
    let p = forms.len();
    let sources = k_subsets(m, k);
    if k < p {
        return F2Matrix::zeros(0, sources.len());
    }
    let targets = k_subsets(m, k - p);
    let mut out = F2Matrix::zeros(targets.len(), sources.len());
    for (j, &s) in sources.iter().enumerate() {
        for (i, &t) in targets.iter().enumerate() {
            if t & !s != 0 {
                continue;
            }
            let rest = s & !t;
            let rows: Vec<u64> = forms.iter().map(|&a| crate::f2_linalg::compress(a, rest)).collect();
            if det_mod2(&rows) {
                out.set(i, j, true);
            }
        }
    }
    out
}

/// A basis (as masks) of the kernel of the nonzero form `alpha` on `F2^m`.
pub(crate) fn form_kernel(alpha: u64, m: usize) -> Vec<u64> {
    let pivot = alpha.trailing_zeros() as usize;
    (0..m).filter(|&j| j != pivot).map(|j| if alpha >> j & 1 == 1 { 1 << j | 1 << pivot } else { 1 << j }).collect()
}

/// Columns of `t(F2)/Sed(big) -> t(F2)/Sed(small)` for simplices `small ≤ big`.
pub fn quotient_map(t: &Triangulation, big: usize, small: usize) -> Vec<u64> {
    let (qb, qs) = (t.quotient(big), t.quotient(small));
    (0..qb.dim()).map(|j| u64::from(qs.local(qb.rep(1 << j)))).collect()
}

/// The edge forms of `σ` from its least vertex, restricted to `t(F2)/Sed(upper)`.
pub fn local_edge_forms(t: &Triangulation, simplex: usize, upper: usize) -> Vec<u64> {
    let vs = &t.simplex(simplex).vertices;
    let q = t.quotient(upper);
    vs[1..].iter().map(|&v| q.restrict_form(t.edge_mod2(vs[0], v))).collect()
}

#[derive(Clone, Debug)]
pub struct TropicalCoefficients {
    pub n: usize,
    /// `dim F_1^P` on each cell.
    pub local_dim: Vec<usize>,
    /// `F_k^X(c)` as a subspace of `Λ^k V(c)`, indexed `[k][cell]`.
    pub fx: Vec<Vec<Subspace>>,
}

impl TropicalCoefficients {
    /// Builds `F_k^X` by summing over the edges of the lower simplex and checks it
    /// against the kernel of the contraction by `ω(σ^p)` on every cell.
    pub fn build(t: &Triangulation, cx: &CubicalComplex) -> Result<Self> {
        let n = t.dim();
        let local_dim: Vec<usize> = cx.cells().iter().map(|c| t.quotient(c.upper).dim()).collect();
        let mut fx = vec![Vec::with_capacity(cx.len()); n + 1];
        for (id, cell) in cx.cells().iter().enumerate() {
            let m = local_dim[id];
            let lower = &t.simplex(cell.lower).vertices;
            let edges: Vec<u64> = (0..lower.len())
                .flat_map(|i| (i + 1..lower.len()).map(move |j| (i, j)))
                .map(|(i, j)| t.quotient(cell.upper).restrict_form(t.edge_mod2(lower[i], lower[j])))
                .collect();
            let omega = local_edge_forms(t, cell.lower, cell.upper);
            for (k, slot) in fx.iter_mut().enumerate() {
                let len = binomial(m, k);
                let mut gens = Vec::new();
                for &a in &edges {
                    if a == 0 {
                        return Err(Error::Internal(format!("edge form vanishes on the quotient at cell {id}")));
                    }
                    let ker = form_kernel(a, m);
                    for s in k_subsets(ker.len(), k) {
                        let vs: Vec<u64> = (0..ker.len()).filter(|i| s >> i & 1 == 1).map(|i| ker[i]).collect();
                        gens.push(wedge(m, &vs));
                    }
                }
                let sum = Subspace::from_vectors(len, gens);
                let via_contraction = if lower.len() == 1 {
                    Subspace::zero(len)
                } else {
                    contraction_matrix(&omega, m, k).kernel()
                };
                if sum != via_contraction {
                    return Err(Error::Internal(format!(
                        "F_{k}^X on cell {id}: edge sum and contraction kernel differ"
                    )));
                }
                slot.push(sum);
            }
        }
        Ok(TropicalCoefficients { n, local_dim, fx })
    }

    fn ext_p(&self, t: &Triangulation, cx: &CubicalComplex, cell: usize, facet: usize, k: usize) -> F2Matrix {
        let (c, f) = (cx.cell(cell), cx.cell(facet));
        if c.upper == f.upper {
            F2Matrix::identity(binomial(self.local_dim[cell], k))
        } else {
            exterior_power(&quotient_map(t, c.upper, f.upper), self.local_dim[facet], k)
        }
    }

    /// The cosheaf `F_k^P`.
    pub fn cosheaf_p(&self, t: &Triangulation, cx: &CubicalComplex, k: usize) -> Result<CellularCoefficients> {
        let dims = self.local_dim.iter().map(|&m| binomial(m, k)).collect();
        CellularCoefficients::build(cx, Variance::Cosheaf, dims, |c, f| self.ext_p(t, cx, c, f, k))
    }

    /// The cosheaf `F_k^X` in the echelon bases of its subspaces.
    pub fn cosheaf_x(&self, t: &Triangulation, cx: &CubicalComplex, k: usize) -> Result<CellularCoefficients> {
        let dims = self.fx[k].iter().map(Subspace::dim).collect();
        let mut failure = None;
        let coeff = CellularCoefficients::build(cx, Variance::Cosheaf, dims, |c, f| {
            let ext = self.ext_p(t, cx, c, f, k);
            let cols: Vec<BitVec> = self.fx[k][c]
                .basis()
                .iter()
                .map(|b| {
                    let img = ext.apply(b).expect("shape");
                    self.fx[k][f].coordinates(&img).unwrap_or_else(|| {
                        failure = Some((c, f));
                        BitVec::zeros(self.fx[k][f].dim())
                    })
                })
                .collect();
            F2Matrix::from_columns(self.fx[k][f].dim(), &cols).expect("shape")
        })?;
        if let Some((c, f)) = failure {
            return Err(Error::Internal(format!("F_{k}^X is not preserved from cell {c} to cell {f}")));
        }
        Ok(coeff)
    }

    /// Chain map `C_q(F_k^X) -> C_q(F_k^P)` for every `q`.
    pub fn inclusion(&self, k: usize, lx: &Layout, lp: &Layout) -> Vec<F2Matrix> {
        (0..lx.dims.len())
            .map(|q| {
                let mut m = F2Matrix::zeros(lp.dims[q], lx.dims[q]);
                for &c in &lx.cells[q] {
                    let (ox, op) = (lx.offset[c].unwrap(), lp.offset[c].expect("F^X is inside F^P"));
                    for (j, b) in self.fx[k][c].basis().iter().enumerate() {
                        for i in b.ones() {
                            m.set(op + i, ox + j, true);
                        }
                    }
                }
                m
            })
            .collect()
    }
}

/// The chain complexes `C_*(K; F_p^X)` and `C_*(K; F_p^P)` for all `p`.
#[derive(Clone, Debug)]
pub struct TropicalComplexes {
    pub coefficients: TropicalCoefficients,
    pub x: Vec<(ChainComplexF2, Layout)>,
    pub p: Vec<(ChainComplexF2, Layout)>,
}

impl TropicalComplexes {
    pub fn build(t: &Triangulation, cx: &CubicalComplex) -> Result<Self> {
        let coefficients = TropicalCoefficients::build(t, cx)?;
        let n = t.dim();
        let mut x = Vec::new();
        let mut p = Vec::new();
        for k in 0..=n {
            x.push(complex_with_coefficients(cx, &coefficients.cosheaf_x(t, cx, k)?)?);
            p.push(complex_with_coefficients(cx, &coefficients.cosheaf_p(t, cx, k)?)?);
        }
        Ok(TropicalComplexes { coefficients, x, p })
    }

    /// `dim H_{p,q}(X; F2)` indexed `[p][q]`, `p, q = 0..=n`.
    pub fn table_x(&self) -> Vec<Vec<usize>> {
        self.x.iter().map(|(c, _)| c.betti()).collect()
    }

    /// `dim H_{p,q}(P; F2)` indexed `[p][q]`.
    pub fn table_p(&self) -> Vec<Vec<usize>> {
        self.p.iter().map(|(c, _)| c.betti()).collect()
    }

    /// `dim H^{p,q}(X; F2)` from the transposed complexes.
    pub fn cotable_x(&self) -> Vec<Vec<usize>> {
        self.x.iter().map(|(c, _)| c.dual().betti()).collect()
    }

    /// `Σ (-1)^{p+q} dim C_q(F_p^X)`.
    pub fn euler_characteristic_x(&self) -> i64 {
        signed_sum(self.x.iter().map(|(c, _)| c.dims.clone()))
    }

    /// `i_{p,q}` on homology and `i^{p,q}` on cohomology, with adjointness checked.
    pub fn inclusion_maps(&self, p: usize, q: usize) -> Result<InclusionMaps> {
        let (cxx, lx) = &self.x[p];
        let (cxp, lp) = &self.p[p];
        let chain = &self.coefficients.inclusion(p, lx, lp)[q];
        let (zx, bx) = (cxx.cycles(q), cxx.boundaries(q));
        let (zp, bp) = (cxp.cycles(q), cxp.boundaries(q));
        let homology = induced_map_on_subquotient(chain, &zx, &bx, &zp, &bp)?;
        let (dx, dp) = (cxx.dual(), cxp.dual());
        let (czx, cbx) = (dx.cycles(q), dx.boundaries(q));
        let (czp, cbp) = (dp.cycles(q), dp.boundaries(q));
        let cochain = chain.transpose();
        let cohomology = induced_map_on_subquotient(&cochain, &czp, &cbp, &czx, &cbx)?;
        let gx = pairing(&QuotientBasis::new(&czx, &cbx)?, &QuotientBasis::new(&zx, &bx)?);
        let gp = pairing(&QuotientBasis::new(&czp, &cbp)?, &QuotientBasis::new(&zp, &bp)?);
        if cohomology.transpose().mul(&gx)? != gp.mul(&homology)? {
            return Err(Error::Internal(format!("i_{{{p},{q}}} and i^{{{p},{q}}} are not adjoint")));
        }
        Ok(InclusionMaps { homology, cohomology })
    }
}

fn signed_sum(dims: impl Iterator<Item = Vec<usize>>) -> i64 {
    dims.enumerate()
        .map(|(p, ds)| ds.iter().enumerate().map(|(q, &d)| if (p + q) % 2 == 0 { d as i64 } else { -(d as i64) }).sum::<i64>())
        .sum()
}

/// Kronecker pairing matrix `⟨ξ_i, z_j⟩` between representative bases.
pub fn pairing(cohomology: &QuotientBasis, homology: &QuotientBasis) -> F2Matrix {
    let rows: Vec<BitVec> = cohomology
        .reps()
        .iter()
        .map(|xi| BitVec::from_bools(&homology.reps().iter().map(|z| xi.dot(z)).collect::<Vec<_>>()))
        .collect();
    F2Matrix::from_rows(homology.dim(), rows).expect("row length")
}

#[derive(Clone, Debug)]
pub struct InclusionMaps {
    /// `i_{p,q}: H_{p,q}(X) -> H_{p,q}(P)`.
    pub homology: F2Matrix,
    /// `i^{p,q}: H^{p,q}(P) -> H^{p,q}(X)`.
    pub cohomology: F2Matrix,
}

impl InclusionMaps {
    pub fn is_iso(m: &F2Matrix) -> bool {
        m.rows() == m.cols() && m.rank() == m.rows()
    }
}
