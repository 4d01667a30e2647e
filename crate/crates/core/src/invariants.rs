//! The rank `ℓ`, the degeneracy index `r` and `ι`, and a verifier that
//! evaluates each structural statement from independently computed sides.
//!
//! `ℓ(ℝX) = max{q0 : i^q: H^q(ℝP) -> H^q(ℝX) injective for q <= q0}` (`-1` if
//! `i^0` is not), `r(ℝX) = min{r0 : d_r = 0 for r >= r0}`, and for `α ∈ H^1`,
//! `ι(α)` is the least `q >= -1` such that `α ∪ -` kills a nonzero class of degree `q + 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2_linalg::{BitVec, F2Matrix, QuotientBasis};
use crate::patchwork::{FiltrationMethod, RealCohomology, RealLift, THypersurface};
use crate::patchwork::hypersurface::DirectHypersurface;
use crate::polytope::Family;
use crate::spectral::{page_pairing, Pages};
use crate::triangulation::SignDistribution;
use crate::tropical::{TropicalCoefficients, TropicalComplexes};

/// A finite graded commutative F2-algebra given by structure constants on bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRing {
    dims: Vec<usize>,
    /// `table[i][j][a * dims[j] + b]` is `e_a e_b ∈ A^{i+j}`, for `i + j` in range.
    table: Vec<Vec<Vec<BitVec>>>,
}

impl GradedRing {
    pub fn from_cohomology(lift: &RealLift, ring: &RealCohomology) -> Result<Self> {
        let dims = ring.betti();
        let top = dims.len();
        let mut table = vec![vec![Vec::new(); top]; top];
        for i in 0..top {
            for j in 0..top - i {
                for a in 0..dims[i] {
                    for b in 0..dims[j] {
                        let p = ring.product(lift, i, &BitVec::unit(dims[i], a), j, &BitVec::unit(dims[j], b))?;
                        table[i][j].push(p);
                    }
                }
            }
        }
        Ok(GradedRing { dims, table })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Product of classes given in coordinates; zero past the top degree.
    pub fn mul(&self, i: usize, a: &BitVec, j: usize, b: &BitVec) -> BitVec {
        let k = i + j;
        let mut out = BitVec::zeros(self.dims.get(k).copied().unwrap_or(0));
        if k >= self.dims.len() {
            return out;
        }
        for x in a.ones() {
            for y in b.ones() {
                out.xor_assign(&self.table[i][j][x * self.dims[j] + y]);
            }
        }
        out
    }

    /// Künneth: `H^*(Y × Z) = H^*(Y) ⊗ H^*(Z)`. Degree `k` has basis `e_a ⊗ f_b`,
    /// `a ∈ A^i`, `b ∈ B^{k-i}`, ordered by `i`, then `a`, then `b`.
    pub fn tensor(&self, other: &GradedRing) -> GradedRing {
        let (la, lb) = (self.dims.len(), other.dims.len());
        let top = la + lb - 1;
        let mut offset = vec![vec![0usize; la]; top];
        let mut dims = vec![0usize; top];
        for (k, row) in offset.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = dims[k];
                if k >= i && k - i < lb {
                    dims[k] += self.dims[i] * other.dims[k - i];
                }
            }
        }
        let index = |i: usize, a: usize, j: usize, b: usize| offset[i + j][i] + a * other.dims[j] + b;
        let mut table = vec![vec![Vec::new(); top]; top];
        for k in 0..top {
            for l in 0..top - k {
                let mut entries = vec![BitVec::zeros(dims[k + l]); dims[k] * dims[l]];
                for i in 0..la.min(k + 1) {
                    let j = k - i;
                    if j >= lb {
                        continue;
                    }
                    for i2 in 0..la.min(l + 1) {
                        let j2 = l - i2;
                        if j2 >= lb {
                            continue;
                        }
                        for a in 0..self.dims[i] {
                            for b in 0..other.dims[j] {
                                for a2 in 0..self.dims[i2] {
                                    for b2 in 0..other.dims[j2] {
                                        let x = self.mul(i, &BitVec::unit(self.dims[i], a), i2, &BitVec::unit(self.dims[i2], a2));
                                        let y = other.mul(j, &BitVec::unit(other.dims[j], b), j2, &BitVec::unit(other.dims[j2], b2));
                                        let e = &mut entries[(index(i, a, j, b) - offset[k][0]) * dims[l] + index(i2, a2, j2, b2) - offset[l][0]];
                                        for s in x.ones() {
                                            for t in y.ones() {
                                                e.flip(index(i + i2, s, j + j2, t));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                table[k][l] = entries;
            }
        }
        GradedRing { dims, table }
    }

    /// `(x, 0)` and `(0, y)` for degree-one classes of the factors of a tensor product.
    pub fn tensor_degree_one(&self, other: &GradedRing, x: &BitVec, y: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.dims[1] * other.dims[0] + self.dims[0] * other.dims[1]);
        // degree 1 = A^0 ⊗ B^1 then A^1 ⊗ B^0; the units are e_0 and f_0
        for b in y.ones() {
            out.flip(b);
        }
        for a in x.ones() {
            out.flip(self.dims[0] * other.dims[1] + a * other.dims[0]);
        }
        out
    }

    /// Matrix of `α ∪ -: A^j -> A^{j+1}`.
    pub fn multiplication_matrix(&self, alpha: &BitVec, j: usize) -> F2Matrix {
        let rows = self.dims.get(j + 1).copied().unwrap_or(0);
        let cols: Vec<BitVec> = (0..self.dims[j]).map(|b| self.mul(1, alpha, j, &BitVec::unit(self.dims[j], b))).collect();
        F2Matrix::from_columns(rows, &cols).expect("product lands in degree j + 1")
    }

    pub fn iota(&self, alpha: &BitVec) -> i64 {
        for j in 0..self.dims.len() {
            if self.dims[j] > 0 && self.multiplication_matrix(alpha, j).rank() < self.dims[j] {
                return j as i64 - 1;
            }
        }
        self.dims.len() as i64 - 1
    }

    /// `ι(Y)`: the maximum of `ι(α)` over all of `A^1`.
    pub fn iota_space(&self) -> i64 {
        let b1 = self.dims.get(1).copied().unwrap_or(0);
        (0..1u64 << b1).map(|m| self.iota(&BitVec::from_u64(b1, m))).max().unwrap_or(-1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    fn new(check: &str, ok: bool, detail: impl Into<String>) -> Self {
        Verdict { check: check.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }

    fn skipped(check: &str, reason: impl Into<String>) -> Self {
        Verdict { check: check.into(), status: Status::Skipped, detail: reason.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantRecord {
    pub cells_rx: Vec<usize>,
    pub betti_rx: Vec<usize>,
    pub betti_rp: Vec<usize>,
    pub tropical_table: Option<Vec<Vec<usize>>>,
    pub euler_characteristic: i64,
    pub components: usize,
    /// Class in `H_{n-1}(ℝP)` of each component over the coordinate facet
    /// classes, sorted; present when those classes form a basis.
    pub component_classes: Option<Vec<Vec<u8>>>,
    /// Ranks of `i^q` for `q = 0..n`.
    pub restriction_ranks: Vec<usize>,
    pub ell: i64,
    pub r_index: usize,
    /// `(r, p, q)` of every nonzero differential `d_r`, `r >= 1`, on the cohomological pages.
    pub nonzero_differentials: Vec<(usize, usize, usize)>,
    pub omega_class: Vec<u8>,
    pub iota_degree: i64,
    pub iota_p: i64,
    pub verdicts: Vec<Verdict>,
}

impl InvariantRecord {
    /// Whether some statement was contradicted.
    pub fn counterexample(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == Status::Fail)
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub record: InvariantRecord,
    pub homology_pages: Pages,
    pub cohomology_pages: Pages,
    /// Ranks of the page pairings on `E_1` and `E_2`, when computed.
    pub pairing_ranks: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Compute the tropical homology table (dense).
    pub tropical_table: bool,
    /// Build the cohomological pages with representatives and their cup pairings (dense).
    pub pairing: bool,
    /// The triangulation is a Viro triangulation of a dilated simplex.
    pub viro: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { tropical_table: true, pairing: false, viro: false }
    }
}

/// Per-triangulation data shared by every sign distribution.
#[derive(Clone, Debug)]
pub struct Context {
    pub lift: RealLift,
    pub ring: RealCohomology,
    pub graded: GradedRing,
    pub omega_class: BitVec,
    pub iota_degree: i64,
    pub iota_p: i64,
    pub coefficients: TropicalCoefficients,
    pub tropical_table: Option<Vec<Vec<usize>>>,
    facet_classes: Option<(Vec<BitVec>, QuotientBasis)>,
    pub options: Options,
}

/// Largest `ℝK` top-simplex count for which `H_{n-1}(ℝP)` is built densely.
const DENSE_HOMOLOGY_LIMIT: usize = 20_000;

impl Context {
    pub fn new(lift: RealLift, options: Options) -> Result<Self> {
        let n = lift.dim();
        let omega = lift.omega_cochain();
        if n >= 2 && !lift.boundary(2).transpose().apply(&omega).is_zero() {
            return Err(Error::Internal("ω is not a cocycle".into()));
        }
        let ring = lift.cohomology()?;
        let graded = GradedRing::from_cohomology(&lift, &ring)?;
        let omega_class = ring.class_of(1, &omega)?;
        let iota_degree = graded.iota(&omega_class);
        let iota_p = graded.iota_space();
        let coefficients = TropicalCoefficients::build(lift.triangulation(), lift.cubical())?;
        let tropical_table = if options.tropical_table {
            let table = TropicalComplexes::build(lift.triangulation(), lift.cubical())?.table_x();
            Some(table[..n].iter().map(|row| row[..n].to_vec()).collect())
        } else {
            None
        };
        let facet_classes = match lift.coordinate_facets() {
            Some(facets) if n >= 1 && facets.len() == ring.dim(n - 1) && lift.real_count(n) <= DENSE_HOMOLOGY_LIMIT => {
                let basis: Vec<BitVec> = facets.into_iter().map(|f| lift.face_chain(f)).collect();
                let hom = lift.homology()?.swap_remove(n - 1);
                let coords: Option<Vec<BitVec>> = basis.iter().map(|b| hom.coordinates(b)).collect();
                let spans = coords.is_some_and(|c| c.len() == hom.dim() && F2Matrix::from_columns(hom.dim(), &c).is_ok_and(|m| m.rank() == hom.dim()));
                spans.then_some((basis, hom))
            }
            _ => None,
        };
        Ok(Context { lift, ring, graded, omega_class, iota_degree, iota_p, coefficients, tropical_table, facet_classes, options })
    }

    pub fn dim(&self) -> usize {
        self.lift.dim()
    }

    /// `(n, d)` when `P` is a dilated primitive simplex.
    fn simplex_degree(&self) -> Option<(usize, i64)> {
        match self.lift.triangulation().polytope().family() {
            Family::Simplex { n, d } => Some((*n, *d)),
            _ => None,
        }
    }

    /// Computes every invariant and verdict for one sign distribution.
    /// Internal inconsistencies between independent constructions are errors;
    /// contradicted statements are `Fail` verdicts.
    pub fn analyze(&self, signs: &SignDistribution) -> Result<Analysis> {
        let n = self.dim();
        let lift = &self.lift;
        let x = THypersurface::new(lift, signs)?;
        let direct = DirectHypersurface::build(lift, signs)?;
        direct.manifold_check()?;
        let args = direct.args();
        for c in lift.cubical().dual_hypersurface() {
            if args.get(&c).map_or(&[][..], Vec::as_slice) != x.args(c) {
                return Err(Error::Internal(format!("direct and folded models differ over cube {c}")));
            }
        }
        let betti = direct.betti();
        if x.betti()? != betti {
            return Err(Error::Internal("folded and direct Betti numbers differ".into()));
        }
        if let Some(&(c, k)) = x.compare_filtrations()?.first() {
            return Err(Error::Internal(format!("filtrations differ on cell {c} at level {k}")));
        }
        if let Some(&(c, k)) = x.graded_check(&self.coefficients)?.first() {
            return Err(Error::Internal(format!("graded piece {k} of cell {c} is not F_{k}^X")));
        }
        let fc = x.filtered_complex(FiltrationMethod::Intersection)?;
        let pages = fc.pages();
        pages.check_transitions()?;
        let co = fc.dualize().pages();
        co.check_transitions()?;

        let mut restriction_ranks = Vec::with_capacity(n);
        for q in 0..n {
            let up = x.restriction_rank(q, &self.ring)?;
            let down = x.inclusion_rank(q)?;
            if up != down {
                return Err(Error::Internal(format!("rank of i^{q} is {up} but rank of i_{q} is {down}")));
            }
            restriction_ranks.push(up);
        }
        let injective = |q: usize| q < n && restriction_ranks[q] == self.ring.dim(q);
        let ell = (0..=n).find(|&q| !injective(q)).map_or(n as i64, |q| q as i64 - 1);
        let r = co.degeneracy_index();
        if r != pages.degeneracy_index() {
            return Err(Error::Internal("homological and cohomological degeneracy indices differ".into()));
        }

        let mut verdicts = Vec::new();
        let table = self.tropical_table.as_ref();
        match table {
            Some(t) => {
                let bad: Vec<(usize, usize)> = (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).filter(|&(p, q)| pages.dim(1, p, q) != t[p][q]).collect();
                verdicts.push(Verdict::new("e1_equals_tropical", bad.is_empty(), format!("mismatched entries {bad:?}")));
            }
            None => verdicts.push(Verdict::skipped("e1_equals_tropical", "tropical table not computed")),
        }
        let abut = pages.abutment();
        verdicts.push(Verdict::new("convergence", abut == betti, format!("abutment {abut:?}, direct Betti {betti:?}")));
        let chi: i64 = betti.iter().enumerate().map(|(q, &b)| if q % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        let page_chi: Vec<i64> = (0..=pages.length).map(|r| pages.euler_characteristic(r)).collect();
        verdicts.push(Verdict::new(
            "euler_characteristic",
            chi == x.euler_characteristic() && page_chi.iter().all(|&e| e == chi),
            format!("cells {}, Betti {chi}, pages {page_chi:?}", x.euler_characteristic()),
        ));

        let mut off_lines = Vec::new();
        for rr in 2..=pages.length {
            for p in 0..n {
                for q in 0..n {
                    if pages.dim(rr, p, q) != 0 && p != q && p + q != n - 1 {
                        off_lines.push((rr, p, q));
                    }
                }
            }
        }
        verdicts.push(Verdict::new("structure", off_lines.is_empty(), format!("nonzero entries off the lines {off_lines:?}")));

        let mut asym = Vec::new();
        for rr in 1..=co.length {
            if co.dim(rr, n - 1, n - 1) != 1 {
                asym.push(format!("dim E_{rr}^(n-1,n-1) = {}", co.dim(rr, n - 1, n - 1)));
            }
            for p in 0..n {
                for q in 0..n {
                    if co.dim(rr, p, q) != co.dim(rr, n - 1 - p, n - 1 - q) {
                        asym.push(format!("dim E_{rr}^({p},{q})"));
                    }
                    let (p2, q2) = (n - 1 - p + rr, (n - 1 - q).checked_sub(1));
                    let partner = q2.filter(|_| p2 < n).map_or(0, |q2| co.rank(rr, p2, q2));
                    if co.rank(rr, p, q) != partner {
                        asym.push(format!("rank d_{rr}^({p},{q})"));
                    }
                }
            }
        }
        let detail = if asym.is_empty() { format!("pages 1..={} symmetric", co.length) } else { asym.join("; ") };
        verdicts.push(Verdict::new("symmetry", asym.is_empty(), detail));

        let pairing_ranks = if self.options.pairing {
            let direct_pages = x.cohomology_pages()?;
            if Pages::from_direct(crate::spectral::Direction::Cohomology, &direct_pages) != co {
                return Err(Error::Internal("direct cohomological pages differ from the dual counting pages".into()));
            }
            let mut ranks = Vec::new();
            let mut degenerate = Vec::new();
            for page in direct_pages.iter().filter(|pg| pg.r == 1 || pg.r == 2) {
                let blocks = page_pairing(page, (n - 1, n - 1), |a, qa, b, qb| x.cup(a, qa, b, qb))?;
                ranks.push(blocks.iter().map(|b| b.rank).collect());
                degenerate.extend(blocks.iter().filter(|b| !b.is_perfect()).map(|b| (page.r, b.left)));
            }
            verdicts.push(Verdict::new("page_pairing", degenerate.is_empty(), format!("degenerate blocks {degenerate:?}")));
            let transport = cup_transport(&x, &self.ring)?;
            verdicts.push(Verdict::new("cup_transport", transport.is_empty(), format!("degree pairs where the cubical cup differs {transport:?}")));
            Some(ranks)
        } else {
            verdicts.push(Verdict::skipped("page_pairing", "dense pairing not requested"));
            None
        };

        // Vanishing and degeneracy criteria, with r ≡ n (mod 2).
        let page_zero = |rr: usize| (0..n).all(|p| (0..n).all(|q| co.rank(rr, p, q) == 0));
        let mut mism = Vec::new();
        let mut mism_deg = Vec::new();
        for rr in (2..=n).filter(|rr| (n - rr) % 2 == 0) {
            let q = (n - rr) / 2;
            if page_zero(rr) != injective(q) {
                mism.push(rr);
            }
            let all_after = (rr..=co.length).all(page_zero);
            if all_after != (0..=q).all(injective) {
                mism_deg.push(rr);
            }
        }
        verdicts.push(Verdict::new("vanishing_criterion", mism.is_empty(), format!("pages where the two sides differ {mism:?}")));
        verdicts.push(Verdict::new("degeneracy_criterion", mism_deg.is_empty(), format!("pages where the two sides differ {mism_deg:?}")));

        let (ni, ri) = (n as i64, r as i64);
        let bound = (ni - ri).div_euclid(2);
        let eq_needed = ri >= 3 + (ni % 2);
        verdicts.push(Verdict::new(
            "ell_lower_bound",
            ell >= bound && (!eq_needed || ell == bound),
            format!("ℓ = {ell}, ⌊(n - r)/2⌋ = {bound}, equality required: {eq_needed}"),
        ));
        let rbound = 2.max(ni - 2 * ell - 1);
        let eq_needed = 2 * ell <= ni - 5;
        verdicts.push(Verdict::new(
            "r_upper_bound",
            ri <= rbound && (!eq_needed || ri == rbound),
            format!("r = {r}, max(2, n - 2ℓ - 1) = {rbound}, equality required: {eq_needed}"),
        ));
        verdicts.push(Verdict::new("ell_at_least_iota", ell >= self.iota_degree, format!("ℓ = {ell}, ι[ω] = {}", self.iota_degree)));

        match table {
            Some(t) => {
                let bounds: Vec<usize> = (0..n).map(|q| (0..n).map(|p| t[p][q]).sum()).collect();
                verdicts.push(Verdict::new(
                    "betti_upper_bound",
                    betti.iter().zip(&bounds).all(|(b, u)| b <= u),
                    format!("b = {betti:?}, bounds {bounds:?}"),
                ));
                if n % 2 == 1 {
                    let total: usize = betti.iter().sum();
                    let trop: usize = t.iter().flatten().sum();
                    verdicts.push(Verdict::new("mod4_congruence", total % 4 == trop % 4, format!("Σb = {total}, Σh = {trop}")));
                } else {
                    verdicts.push(Verdict::skipped("mod4_congruence", "ℝX has odd dimension"));
                }
            }
            None => {
                verdicts.push(Verdict::skipped("betti_upper_bound", "tropical table not computed"));
                verdicts.push(Verdict::skipped("mod4_congruence", "tropical table not computed"));
            }
        }

        match self.simplex_degree() {
            Some((_, d)) if d % 2 == 1 => {
                verdicts.push(Verdict::new("odd_degree_degeneration", r <= 2 && ell == ni - 1, format!("r = {r}, ℓ = {ell}")))
            }
            _ => verdicts.push(Verdict::skipped("odd_degree_degeneration", "not an odd dilate of a simplex")),
        }
        if self.options.viro {
            let need = (ni - 1) / 2;
            verdicts.push(Verdict::new("viro_rank_maximality", ell >= need && r <= 2, format!("ℓ = {ell} (needs {need}), r = {r}")));
        } else {
            verdicts.push(Verdict::skipped("viro_rank_maximality", "not a Viro triangulation"));
        }
        let pairs = x.duality_pairs(&self.ring)?;
        verdicts.push(Verdict::new(
            "degree_duality",
            pairs.iter().all(|(a, b)| a == b),
            format!("(<β, [ℝX]>, <β ∪ ω, [ℝP]>) = {pairs:?}"),
        ));

        let components = direct.components();
        let component_classes = match &self.facet_classes {
            Some((basis, hom)) => {
                let mut c: Vec<Vec<u8>> = x
                    .component_classes(&components, basis, hom)?
                    .iter()
                    .map(|v| (0..v.len()).map(|i| u8::from(v.get(i))).collect())
                    .collect();
                c.sort();
                Some(c)
            }
            None => None,
        };
        let record = InvariantRecord {
            cells_rx: x.dims(),
            betti_rx: betti,
            betti_rp: self.ring.betti(),
            tropical_table: self.tropical_table.clone(),
            euler_characteristic: chi,
            components: components.len(),
            component_classes,
            restriction_ranks,
            ell,
            r_index: r,
            nonzero_differentials: co.nonzero_differentials().into_iter().filter(|d| d.0 >= 1).collect(),
            omega_class: (0..self.omega_class.len()).map(|i| u8::from(self.omega_class.get(i))).collect(),
            iota_degree: self.iota_degree,
            iota_p: self.iota_p,
            verdicts,
        };
        Ok(Analysis { record, homology_pages: pages, cohomology_pages: co, pairing_ranks })
    }
}

/// Degree pairs `(i, j)` where, for some basis classes `α, β` of `H^*(ℝP)`,
/// `i^*(α ∪ β)` and `i^*α ∪ i^*β` differ in `H^{i+j}(ℝX)`.
pub fn cup_transport(x: &THypersurface<'_>, ring: &RealCohomology) -> Result<Vec<(usize, usize)>> {
    let n = x.num_degrees();
    let lift = x.lift();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..n - i {
            let k = i + j;
            let d = if k == 0 { None } else { Some(x.boundary(k)?.transpose()) };
            let base = d.as_ref().map_or(0, |d| d.rank());
            let mut ok = true;
            for a in ring.reps(i) {
                for b in ring.reps(j) {
                    let top = x.restrict_cochain(k, &lift.cup(i, a, j, b)?);
                    let mut diff = x.cup(&x.restrict_cochain(i, a), i, &x.restrict_cochain(j, b), j)?;
                    diff.xor_assign(&top);
                    let mut cols = d.as_ref().map_or_else(Vec::new, |d| d.columns().to_vec());
                    cols.push(diff.ones().map(|t| t as u32).collect());
                    if crate::f2_linalg::SparseF2::from_columns(diff.len(), cols).rank() != base {
                        ok = false;
                    }
                }
            }
            if !ok {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{cube, product_of_viro, viro};

    fn ring_of(t: &crate::triangulation::Triangulation) -> GradedRing {
        let lift = RealLift::new(t).unwrap();
        GradedRing::from_cohomology(&lift, &lift.cohomology().unwrap()).unwrap()
    }

    #[test]
    fn iota_of_projective_spaces_and_tori() {
        for n in 1..=3 {
            for d in 1..=2 {
                assert_eq!(ring_of(&viro(n, d).unwrap()).iota_space(), n as i64 - 1);
            }
        }
        for n in 1..=3 {
            let g = ring_of(&cube(n, 1).unwrap());
            assert_eq!(g.iota_space(), 0);
            assert!(g.iota(&BitVec::zeros(n)) == -1);
        }
    }

    #[test]
    fn kunneth_matches_the_product_lift() {
        for (n1, n2) in [(1, 1), (1, 2)] {
            let direct = ring_of(&product_of_viro(n1, 1, n2, 1).unwrap());
            let k = ring_of(&viro(n1, 1).unwrap()).tensor(&ring_of(&viro(n2, 1).unwrap()));
            assert_eq!(direct.dims(), k.dims());
            let b1 = k.dims()[1];
            let mut a: Vec<i64> = (0..1u64 << b1).map(|m| direct.iota(&BitVec::from_u64(b1, m))).collect();
            let mut b: Vec<i64> = (0..1u64 << b1).map(|m| k.iota(&BitVec::from_u64(b1, m))).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
            assert_eq!(k.iota_space(), n1.max(n2) as i64 - 1);
        }
    }

    #[test]
    fn analyze_small_instances() {
        for (t, viro_flag) in [(viro(2, 3).unwrap(), true), (viro(3, 2).unwrap(), true), (cube(2, 3).unwrap(), false)] {
            let lift = RealLift::new(&t).unwrap();
            let ctx = Context::new(lift, Options { tropical_table: true, pairing: true, viro: viro_flag }).unwrap();
            for seed in 0..3 {
                let a = ctx.analyze(&SignDistribution::seeded(&t, seed)).unwrap();
                assert!(!a.record.counterexample(), "{:?}", a.record.verdicts);
                assert!(a.record.r_index <= 2);
            }
        }
    }

    #[test]
    fn random_cubics_pass_everything() {
        let t = viro(2, 3).unwrap();
        let ctx = Context::new(RealLift::new(&t).unwrap(), Options { viro: true, ..Options::default() }).unwrap();
        for seed in 0..50 {
            let r = ctx.analyze(&SignDistribution::seeded(&t, seed)).unwrap().record;
            assert!(r.verdicts.iter().all(|v| v.status != Status::Fail), "{:?}", r.verdicts);
            assert!(r.r_index <= 2);
        }
    }

    #[test]
    fn harnack_cubic_record() {
        let t = viro(2, 3).unwrap();
        let ctx = Context::new(RealLift::new(&t).unwrap(), Options { viro: true, ..Options::default() }).unwrap();
        let a = ctx.analyze(&SignDistribution::harnack(&t)).unwrap();
        assert_eq!(a.record.betti_rx, vec![2, 2]);
        assert_eq!(a.record.tropical_table, Some(vec![vec![1, 1], vec![1, 1]]));
        assert_eq!(a.record.r_index, 1);
        assert_eq!(a.record.ell, 1);
        assert_eq!(a.record.iota_degree, 1);
    }
}
