//! Spectral sequences of finite filtered complexes over F2.
//!
//! Homological side: a decreasing filtration `F_p` of a chain complex, pages
//! `E^r_{p,q}` with `∂^r` of bidegree `(+r, -1)`. Cohomological side: an
//! increasing filtration `F^p` of a cochain complex, pages `E_r^{p,q}` with
//! `d_r` of bidegree `(-r, +1)`. Filtration indices run over `0..length`.
//! The cohomological side is computed through the relabeling
//! `p -> length-1-p`, `q -> top-q`, which makes it homological.
//!
//! [`FilteredComplexF2::pages`] counts every page from one column reduction
//! per degree on a filtration-adapted basis. [`direct_pages`] builds `Z^r`,
//! the boundaries and the differentials as explicit subspaces and carries
//! representatives; it is the slow, literal engine.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2_linalg::sparse::{normalize, reduce_columns};
use crate::f2_linalg::{induced_map_on_subquotient, BitVec, F2Matrix, QuotientBasis, SparseF2, Subspace, TaggedEchelon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Homology,
    Cohomology,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Homology => Direction::Cohomology,
            Direction::Cohomology => Direction::Homology,
        }
    }

    /// Degree reached by the differential leaving `q` in a complex with `n` degrees.
    fn target(self, q: usize, n: usize) -> Option<usize> {
        match self {
            Direction::Homology => q.checked_sub(1),
            Direction::Cohomology => (q + 1 < n).then_some(q + 1),
        }
    }

    /// Degree whose differential arrives in `q`.
    fn source(self, q: usize, n: usize) -> Option<usize> {
        match self {
            Direction::Homology => (q + 1 < n).then_some(q + 1),
            Direction::Cohomology => q.checked_sub(1),
        }
    }
}

/// A filtered (co)chain complex on a filtration-adapted basis: basis element
/// `j` of degree `q` has filtration degree `degrees[q][j]`, and
/// `F_p = span{t >= p}` (homology) or `F^p = span{t <= p}` (cohomology).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplexF2 {
    direction: Direction,
    length: usize,
    degrees: Vec<Vec<usize>>,
    /// `diff[q]` leaves degree `q`.
    diff: Vec<SparseF2>,
}

impl FilteredComplexF2 {
    pub fn new(direction: Direction, length: usize, degrees: Vec<Vec<usize>>, diff: Vec<SparseF2>) -> Result<Self> {
        let n = degrees.len();
        if diff.len() != n {
            return Err(Error::DimensionMismatch("one differential per degree expected".into()));
        }
        for q in 0..n {
            let rows = direction.target(q, n).map_or(0, |t| degrees[t].len());
            if diff[q].cols() != degrees[q].len() || diff[q].rows() != rows {
                return Err(Error::DimensionMismatch(format!("differential out of degree {q} has the wrong shape")));
            }
            if let Some(&t) = degrees[q].iter().find(|&&t| t >= length) {
                return Err(Error::InvalidParameter(format!("filtration degree {t} outside 0..{length}")));
            }
            let Some(tq) = direction.target(q, n) else { continue };
            for (j, col) in diff[q].columns().iter().enumerate() {
                let s = degrees[q][j];
                for &i in col {
                    let t = degrees[tq][i as usize];
                    let ok = match direction {
                        Direction::Homology => t >= s,
                        Direction::Cohomology => t <= s,
                    };
                    if !ok {
                        return Err(Error::InvalidParameter(format!(
                            "differential does not preserve the filtration: degree {q} element {j} (level {s}) hits level {t}"
                        )));
                    }
                }
            }
            if !diff[tq].mul(&diff[q]).is_zero() {
                return Err(Error::InvalidParameter(format!("differential squares to nonzero at degree {q}")));
            }
        }
        Ok(FilteredComplexF2 { direction, length, degrees, diff })
    }

    /// Builds the adapted form of a complex whose filtration is given by
    /// arbitrary subspaces `filtration[q][p]` (`p in 0..length`). Also returns,
    /// per degree, the adapted basis as the columns of a square matrix.
    pub fn from_subspaces(
        direction: Direction,
        length: usize,
        diff: &[F2Matrix],
        filtration: &[Vec<Subspace>],
    ) -> Result<(Self, Vec<F2Matrix>)> {
        validate_subspace_data(direction, length, diff, filtration)?;
        let n = diff.len();
        let mut degrees = Vec::with_capacity(n);
        let mut bases = Vec::with_capacity(n);
        for (q, flag) in filtration.iter().enumerate() {
            let dim = diff[q].cols();
            let order: Vec<usize> = match direction {
                Direction::Homology => (0..length).rev().collect(),
                Direction::Cohomology => (0..length).collect(),
            };
            let mut prev = Subspace::zero(dim);
            let mut cols = Vec::with_capacity(dim);
            let mut t = Vec::with_capacity(dim);
            for p in order {
                for v in prev.complement_in(&flag[p])? {
                    cols.push(v);
                    t.push(p);
                }
                prev = flag[p].clone();
            }
            degrees.push(t);
            bases.push(F2Matrix::from_columns(dim, &cols)?);
        }
        let coords: Vec<TaggedEchelon> = bases
            .iter()
            .map(|b| {
                let mut e = TaggedEchelon::new(b.rows(), b.cols());
                for (j, c) in b.columns().into_iter().enumerate() {
                    e.insert(c, BitVec::unit(b.cols(), j));
                }
                e
            })
            .collect();
        let mut sparse = Vec::with_capacity(n);
        for q in 0..n {
            let Some(tq) = direction.target(q, n) else {
                sparse.push(SparseF2::zeros(0, diff[q].cols()));
                continue;
            };
            let cols = bases[q]
                .columns()
                .iter()
                .map(|c| {
                    let img = diff[q].apply(c)?;
                    Ok(coords[tq].reduce(&img).1.ones().map(|i| i as u32).collect())
                })
                .collect::<Result<Vec<Vec<u32>>>>()?;
            sparse.push(SparseF2::from_columns(diff[q].rows(), cols));
        }
        Ok((FilteredComplexF2::new(direction, length, degrees, sparse)?, bases))
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn top(&self) -> usize {
        self.degrees.len().saturating_sub(1)
    }

    pub fn num_degrees(&self) -> usize {
        self.degrees.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(Vec::len).collect()
    }

    pub fn degrees(&self, q: usize) -> &[usize] {
        &self.degrees[q]
    }

    pub fn diff(&self, q: usize) -> &SparseF2 {
        &self.diff[q]
    }

    /// `dim F_p C_q` (homology) or `dim F^p C^q` (cohomology).
    pub fn filtration_dim(&self, q: usize, p: usize) -> usize {
        self.degrees[q]
            .iter()
            .filter(|&&t| match self.direction {
                Direction::Homology => t >= p,
                Direction::Cohomology => t <= p,
            })
            .count()
    }

    /// The filtration as coordinate subspaces, `[q][p]`.
    pub fn coordinate_filtration(&self) -> Vec<Vec<Subspace>> {
        self.degrees
            .iter()
            .map(|ts| {
                (0..self.length)
                    .map(|p| {
                        let ones = ts.iter().enumerate().filter(|&(_, &t)| match self.direction {
                            Direction::Homology => t >= p,
                            Direction::Cohomology => t <= p,
                        });
                        Subspace::from_vectors(ts.len(), ones.map(|(j, _)| BitVec::unit(ts.len(), j)))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn dense_diff(&self) -> Vec<F2Matrix> {
        self.diff.iter().map(SparseF2::to_dense).collect()
    }

    /// The dual complex: transposed differentials, and on the dual basis the
    /// dual filtration `ann(F_{p+1})` (resp. `ann(F^{p-1})`), which keeps each
    /// dual basis vector at the level of its partner.
    pub fn dualize(&self) -> Self {
        let n = self.degrees.len();
        let direction = self.direction.flip();
        let diff = (0..n)
            .map(|q| match self.direction.source(q, n) {
                Some(s) => self.diff[s].transpose(),
                None => SparseF2::zeros(0, self.degrees[q].len()),
            })
            .collect();
        FilteredComplexF2 { direction, length: self.length, degrees: self.degrees.clone(), diff }
    }

    /// Betti numbers of the underlying complex.
    pub fn betti(&self) -> Vec<usize> {
        let n = self.degrees.len();
        let ranks: Vec<usize> = self.diff.iter().map(SparseF2::rank).collect();
        (0..n).map(|q| self.degrees[q].len() - ranks[q] - self.direction.source(q, n).map_or(0, |s| ranks[s])).collect()
    }

    /// Degrees and differentials relabeled into the homological convention.
    fn hom_view(&self) -> (Vec<Vec<usize>>, Vec<&SparseF2>) {
        match self.direction {
            Direction::Homology => (self.degrees.clone(), self.diff.iter().collect()),
            Direction::Cohomology => {
                let l = self.length;
                let t = self.degrees.iter().rev().map(|ts| ts.iter().map(|&t| l - 1 - t).collect()).collect();
                (t, self.diff.iter().rev().collect())
            }
        }
    }

    /// All pages `r = 0..=length` by counting persistence pairs.
    pub fn pages(&self) -> Pages {
        let (l, n) = (self.length, self.degrees.len());
        let (t, diff) = self.hom_view();
        // sources[q][p][gap], targets[q][p][gap]
        let mut sources = vec![vec![vec![0usize; l]; l]; n];
        let mut targets = vec![vec![vec![0usize; l]; l]; n];
        for q in 1..n {
            let by_level = |ts: &[usize]| {
                let mut order: Vec<usize> = (0..ts.len()).collect();
                order.sort_by_key(|&j| std::cmp::Reverse(ts[j]));
                order
            };
            let col_order = by_level(&t[q]);
            let row_order = by_level(&t[q - 1]);
            let mut row_pos = vec![0u32; row_order.len()];
            for (k, &i) in row_order.iter().enumerate() {
                row_pos[i] = k as u32;
            }
            let cols = col_order.iter().map(|&j| normalize(diff[q].column(j).iter().map(|&i| row_pos[i as usize]).collect())).collect();
            let reduced = reduce_columns(row_order.len(), cols, |a, b| t[q][col_order[a]] >= t[q][col_order[b]]);
            for (k, c) in reduced.iter().enumerate() {
                if let Some(&low) = c.last() {
                    let tc = t[q][col_order[k]];
                    let tr = t[q - 1][row_order[low as usize]];
                    sources[q][tc][tr - tc] += 1;
                    targets[q - 1][tr][tr - tc] += 1;
                }
            }
        }
        let mut count = vec![vec![0usize; n]; l];
        for (q, ts) in t.iter().enumerate() {
            for &p in ts {
                count[p][q] += 1;
            }
        }
        let mut dims = Vec::with_capacity(l + 1);
        let mut ranks = Vec::with_capacity(l + 1);
        for r in 0..=l {
            let mut d = vec![vec![0usize; n]; l];
            let mut k = vec![vec![0usize; n]; l];
            for p in 0..l {
                for q in 0..n {
                    let dead: usize = (0..r.min(l)).map(|g| sources[q][p][g] + targets[q][p][g]).sum();
                    let (po, qo) = self.original_index(p, q);
                    d[po][qo] = count[p][q] - dead;
                    k[po][qo] = if r < l { sources[q][p][r] } else { 0 };
                }
            }
            dims.push(d);
            ranks.push(k);
        }
        Pages { direction: self.direction, length: l, dims, ranks }
    }

    fn original_index(&self, p: usize, q: usize) -> (usize, usize) {
        match self.direction {
            Direction::Homology => (p, q),
            Direction::Cohomology => (self.length - 1 - p, self.top() - q),
        }
    }

    /// Pages from explicit subquotients on the coordinate filtration.
    pub fn direct_pages(&self) -> Result<Vec<DirectPage>> {
        direct_pages(self.direction, self.length, &self.dense_diff(), &self.coordinate_filtration())
    }
}

/// Page dimensions and differential ranks, indexed `[r][p][q]` for
/// `r = 0..=length`. The last page is `E^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pages {
    pub direction: Direction,
    pub length: usize,
    pub dims: Vec<Vec<Vec<usize>>>,
    /// Rank of the differential leaving `(p, q)`.
    pub ranks: Vec<Vec<Vec<usize>>>,
}

impl Pages {
    pub fn from_direct(direction: Direction, pages: &[DirectPage]) -> Self {
        Pages {
            direction,
            length: pages.len().saturating_sub(1),
            dims: pages.iter().map(DirectPage::dims).collect(),
            ranks: pages.iter().map(DirectPage::ranks).collect(),
        }
    }

    pub fn num_degrees(&self) -> usize {
        self.dims.first().and_then(|d| d.first()).map_or(0, Vec::len)
    }

    /// `dim E_{p,q}` on page `r`; pages past the last one are `E^∞`.
    pub fn dim(&self, r: usize, p: usize, q: usize) -> usize {
        self.dims[r.min(self.length)].get(p).and_then(|row| row.get(q)).copied().unwrap_or(0)
    }

    pub fn rank(&self, r: usize, p: usize, q: usize) -> usize {
        if r >= self.length {
            return 0;
        }
        self.ranks[r].get(p).and_then(|row| row.get(q)).copied().unwrap_or(0)
    }

    pub fn e_infinity(&self) -> &[Vec<usize>] {
        &self.dims[self.length]
    }

    /// Bidegree reached by the page-`r` differential leaving `(p, q)`.
    pub fn target(&self, r: usize, p: usize, q: usize) -> Option<(usize, usize)> {
        let (p, q, r) = (p as i64, q as i64, r as i64);
        let (tp, tq) = match self.direction {
            Direction::Homology => (p + r, q - 1),
            Direction::Cohomology => (p - r, q + 1),
        };
        (tp >= 0 && tq >= 0 && (tp as usize) < self.length && (tq as usize) < self.num_degrees()).then_some((tp as usize, tq as usize))
    }

    /// `(r, p, q)` of every nonzero differential.
    pub fn nonzero_differentials(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (r, page) in self.ranks.iter().enumerate() {
            for (p, row) in page.iter().enumerate() {
                for (q, &k) in row.iter().enumerate() {
                    if k > 0 {
                        out.push((r, p, q));
                    }
                }
            }
        }
        out
    }

    /// Least `r0` such that every differential on pages `r >= r0` vanishes.
    pub fn degeneracy_index(&self) -> usize {
        self.nonzero_differentials().iter().map(|&(r, _, _)| r + 1).max().unwrap_or(0)
    }

    pub fn total_dim(&self, r: usize) -> usize {
        self.dims[r.min(self.length)].iter().flatten().sum()
    }

    pub fn euler_characteristic(&self, r: usize) -> i64 {
        let page = &self.dims[r.min(self.length)];
        page.iter().flat_map(|row| row.iter().enumerate()).map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    /// `sum_p dim E^∞_{p,q}` per degree `q`.
    pub fn abutment(&self) -> Vec<usize> {
        (0..self.num_degrees()).map(|q| self.e_infinity().iter().map(|row| row[q]).sum()).collect()
    }

    /// Checks `dim E^{r+1} = dim E^r - rank(out) - rank(in)` everywhere.
    pub fn check_transitions(&self) -> Result<()> {
        for r in 0..self.length {
            let mut incoming = vec![vec![0usize; self.num_degrees()]; self.length];
            for p in 0..self.length {
                for q in 0..self.num_degrees() {
                    let k = self.rank(r, p, q);
                    match self.target(r, p, q) {
                        Some((tp, tq)) => incoming[tp][tq] += k,
                        None if k > 0 => return Err(Error::Internal(format!("page {r}: differential at ({p},{q}) leaves the table"))),
                        None => {}
                    }
                }
            }
            for p in 0..self.length {
                for q in 0..self.num_degrees() {
                    let expect = self.dim(r, p, q) as i64 - self.rank(r, p, q) as i64 - incoming[p][q] as i64;
                    if expect != self.dim(r + 1, p, q) as i64 {
                        return Err(Error::Internal(format!("page {}: dimension at ({p},{q}) is not the homology of page {r}", r + 1)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One page built from explicit subquotients `Z^r / (Z^{r-1}_{p+1} + B^r)`.
#[derive(Clone, Debug)]
pub struct DirectPage {
    pub r: usize,
    pub direction: Direction,
    /// `entries[p][q]`, with representatives in the ambient (co)chain group.
    pub entries: Vec<Vec<QuotientBasis>>,
    /// `differentials[p][q]`: matrix of the differential leaving `(p, q)`.
    pub differentials: Vec<Vec<F2Matrix>>,
}

impl DirectPage {
    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.entries.iter().map(|row| row.iter().map(QuotientBasis::dim).collect()).collect()
    }

    pub fn ranks(&self) -> Vec<Vec<usize>> {
        self.differentials.iter().map(|row| row.iter().map(F2Matrix::rank).collect()).collect()
    }
}

fn validate_subspace_data(direction: Direction, length: usize, diff: &[F2Matrix], filtration: &[Vec<Subspace>]) -> Result<()> {
    let n = diff.len();
    if filtration.len() != n {
        return Err(Error::DimensionMismatch("one filtration per degree expected".into()));
    }
    for q in 0..n {
        let dim = diff[q].cols();
        let rows = direction.target(q, n).map_or(0, |t| diff[t].cols());
        if diff[q].rows() != rows {
            return Err(Error::DimensionMismatch(format!("differential out of degree {q} has the wrong shape")));
        }
        let flag = &filtration[q];
        if flag.len() != length || flag.iter().any(|s| s.ambient() != dim) {
            return Err(Error::DimensionMismatch(format!("filtration of degree {q} has the wrong shape")));
        }
        let (full, pairs): (usize, Vec<(usize, usize)>) = match direction {
            Direction::Homology => (0, (1..length).map(|p| (p, p - 1)).collect()),
            Direction::Cohomology => (length.saturating_sub(1), (1..length).map(|p| (p - 1, p)).collect()),
        };
        if length > 0 && flag[full].dim() != dim {
            return Err(Error::InvalidParameter(format!("filtration of degree {q} is not exhaustive")));
        }
        if length == 0 && dim > 0 {
            return Err(Error::InvalidParameter("empty filtration on a nonzero complex".into()));
        }
        for (small, big) in pairs {
            if !flag[big].contains_subspace(&flag[small]) {
                return Err(Error::InvalidParameter(format!("filtration of degree {q} is not monotone at {small}")));
            }
        }
        if let Some(t) = direction.target(q, n) {
            for p in 0..length {
                if !filtration[t][p].contains_subspace(&flag[p].image_under(&diff[q])?) {
                    return Err(Error::InvalidParameter(format!("differential out of degree {q} does not preserve level {p}")));
                }
            }
            if !diff[t].mul(&diff[q])?.is_zero() {
                return Err(Error::InvalidParameter(format!("differential squares to nonzero at degree {q}")));
            }
        }
    }
    Ok(())
}

struct Direct<'a> {
    direction: Direction,
    length: i64,
    diff: Vec<&'a F2Matrix>,
    filtration: &'a [Vec<Subspace>],
    z: HashMap<(i64, i64, usize), Subspace>,
}

impl Direct<'_> {
    fn n(&self) -> usize {
        self.diff.len()
    }

    fn dim(&self, q: usize) -> usize {
        self.diff[q].cols()
    }

    /// `F_p` of homological degree `q`, for any integer `p`.
    fn f(&self, p: i64, q: usize) -> Subspace {
        if p <= 0 {
            return Subspace::full(self.dim(q));
        }
        if p >= self.length {
            return Subspace::zero(self.dim(q));
        }
        match self.direction {
            Direction::Homology => self.filtration[q][p as usize].clone(),
            Direction::Cohomology => self.filtration[self.n() - 1 - q][(self.length - 1 - p) as usize].clone(),
        }
    }

    /// `Z^r_{p,q} = {a in F_p : ∂a in F_{p+r}}`.
    fn z(&mut self, r: i64, p: i64, q: usize) -> Result<Subspace> {
        if let Some(s) = self.z.get(&(r, p, q)) {
            return Ok(s.clone());
        }
        let fp = self.f(p, q);
        let s = if q == 0 { fp } else { fp.intersection(&self.f(p + r, q - 1).preimage(self.diff[q])?)? };
        self.z.insert((r, p, q), s.clone());
        Ok(s)
    }

    /// `∂ Z^{r-1}_{p-r+1, q+1}`.
    fn b(&mut self, r: i64, p: i64, q: usize) -> Result<Subspace> {
        if q + 1 >= self.n() {
            return Ok(Subspace::zero(self.dim(q)));
        }
        self.z(r - 1, p - r + 1, q + 1)?.image_under(self.diff[q + 1])
    }

    fn denominator(&mut self, r: i64, p: i64, q: usize) -> Result<Subspace> {
        self.z(r - 1, p + 1, q)?.sum(&self.b(r, p, q)?)
    }

    fn entry(&mut self, r: i64, p: i64, q: usize) -> Result<QuotientBasis> {
        let num = self.z(r, p, q)?;
        let den = self.denominator(r, p, q)?;
        // the defining form (Z^r + F_{p+1}) / (B^r + F_{p+1}) must agree in size
        let f1 = self.f(p + 1, q);
        let lit = num.sum(&f1)?.dim() as i64 - self.b(r, p, q)?.sum(&f1)?.dim() as i64;
        let e = QuotientBasis::new(&num, &den)?;
        if lit != e.dim() as i64 {
            return Err(Error::Internal(format!("page {r} entry ({p},{q}): subquotient forms disagree")));
        }
        Ok(e)
    }

    fn differential(&mut self, r: i64, p: i64, q: usize) -> Result<F2Matrix> {
        let src_num = self.z(r, p, q)?;
        let src_den = self.denominator(r, p, q)?;
        if q == 0 {
            let dim = QuotientBasis::new(&src_num, &src_den)?.dim();
            return Ok(F2Matrix::zeros(0, dim));
        }
        let dst_num = self.z(r, p + r, q - 1)?;
        let dst_den = self.denominator(r, p + r, q - 1)?;
        induced_map_on_subquotient(self.diff[q], &src_num, &src_den, &dst_num, &dst_den)
    }
}

/// Pages `r = 0..=length` of a filtered complex given by arbitrary filtration
/// subspaces `filtration[q][p]`, with representatives and differential matrices.
pub fn direct_pages(direction: Direction, length: usize, diff: &[F2Matrix], filtration: &[Vec<Subspace>]) -> Result<Vec<DirectPage>> {
    validate_subspace_data(direction, length, diff, filtration)?;
    let n = diff.len();
    let hdiff: Vec<&F2Matrix> = match direction {
        Direction::Homology => diff.iter().collect(),
        Direction::Cohomology => diff.iter().rev().collect(),
    };
    let mut d = Direct { direction, length: length as i64, diff: hdiff, filtration, z: HashMap::new() };
    let index = |p: usize, q: usize| match direction {
        Direction::Homology => (p, q),
        Direction::Cohomology => (length - 1 - p, n - 1 - q),
    };
    let mut pages = Vec::with_capacity(length + 1);
    for r in 0..=length {
        let mut entries: Vec<Vec<Option<QuotientBasis>>> = vec![vec![None; n]; length];
        let mut differentials: Vec<Vec<Option<F2Matrix>>> = vec![vec![None; n]; length];
        for p in 0..length {
            for q in 0..n {
                let (po, qo) = index(p, q);
                entries[po][qo] = Some(d.entry(r as i64, p as i64, q)?);
                differentials[po][qo] = Some(d.differential(r as i64, p as i64, q)?);
            }
        }
        pages.push(DirectPage {
            r,
            direction,
            entries: entries.into_iter().map(|row| row.into_iter().map(Option::unwrap).collect()).collect(),
            differentials: differentials.into_iter().map(|row| row.into_iter().map(Option::unwrap).collect()).collect(),
        });
    }
    Ok(pages)
}

/// Pairing matrix between two entries of a cohomological page, read in the
/// one-dimensional target entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingBlock {
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub matrix: F2Matrix,
    pub rank: usize,
}

impl PairingBlock {
    pub fn is_perfect(&self) -> bool {
        self.matrix.rows() == self.matrix.cols() && self.rank == self.matrix.rows()
    }
}

/// Cup pairings `E_r^{p,q} x E_r^{P-p,Q-q} -> E_r^{P,Q}` on representatives.
/// `cup(a, deg_a, b, deg_b)` multiplies cochains.
pub fn page_pairing(
    page: &DirectPage,
    target: (usize, usize),
    cup: impl Fn(&BitVec, usize, &BitVec, usize) -> Result<BitVec>,
) -> Result<Vec<PairingBlock>> {
    if page.direction != Direction::Cohomology {
        return Err(Error::InvalidParameter("page pairing needs cohomological pages".into()));
    }
    let (tp, tq) = target;
    let top = page.entries.get(tp).and_then(|row| row.get(tq)).ok_or_else(|| Error::InvalidParameter("pairing target outside the page".into()))?;
    if top.dim() != 1 {
        return Err(Error::Structure(format!("page {} entry ({tp},{tq}) has dimension {} instead of 1", page.r, top.dim())));
    }
    let mut blocks = Vec::new();
    for p in 0..=tp.min(page.entries.len() - 1) {
        for q in 0..=tq.min(page.entries[p].len() - 1) {
            let (a, b) = (&page.entries[p][q], &page.entries[tp - p][tq - q]);
            let mut m = F2Matrix::zeros(a.dim(), b.dim());
            for (i, x) in a.reps().iter().enumerate() {
                for (j, y) in b.reps().iter().enumerate() {
                    let c = cup(x, q, y, tq - q)?;
                    let coord = top
                        .coordinates(&c)
                        .ok_or_else(|| Error::Internal(format!("cup of page {} representatives left the target numerator", page.r)))?;
                    m.set(i, j, coord.get(0));
                }
            }
            let rank = m.rank();
            blocks.push(PairingBlock { left: (p, q), right: (tp - p, tq - q), matrix: m, rank });
        }
    }
    Ok(blocks)
}
