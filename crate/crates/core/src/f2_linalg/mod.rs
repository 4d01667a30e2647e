//! Dense linear algebra over F2 with bit-packed rows.
//!
//! Subspaces are stored by a basis in reduced echelon form: each basis vector
//! has a pivot (its lowest set coordinate), pivots strictly increase, and every
//! other basis vector vanishes at each pivot. Read as the columns of an
//! `ambient x dim` matrix this is the reduced column echelon form, so two
//! spanning sets of the same space always canonicalize to identical data.

use std::fmt;

pub mod sparse;

pub use sparse::SparseF2;

use crate::error::{Error, Result};

const W: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(W)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    /// Parses a string of `0`/`1` characters, coordinate 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad bit {c:?} in {s:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_bools(&bits))
    }

    /// Low `len` bits of `mask`, bit i being coordinate i.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        assert!(len <= W);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = if len == W { mask } else { mask & ((1u64 << len) - 1) };
        }
        v
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= W);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % W);
        if b {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / W] ^= 1u64 << (i % W);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec { len: self.len, words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    /// Standard bilinear pairing.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * W + w.trailing_zeros() as usize)
    }

    pub fn last_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * W + (W - 1 - w.leading_zeros() as usize))
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * W + t)
                }
            })
        })
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        BitVec::from_indices(
            self.len + other.len,
            self.ones().chain(other.ones().map(|i| i + self.len)),
        )
    }

    /// Coordinates `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        BitVec::from_indices(len, self.ones().filter(|&i| i >= start && i < start + len).map(|i| i - start))
    }

    /// Entries at the listed coordinates, in order.
    pub fn gather(&self, idx: &[usize]) -> BitVec {
        BitVec::from_indices(idx.len(), idx.iter().enumerate().filter(|(_, &j)| self.get(j)).map(|(i, _)| i))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "[{s}]")
    }
}

/// Row-major bit matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!("row of length {} in a matrix with {cols} columns", bad.len())));
        }
        Ok(F2Matrix { rows: rows.len(), cols, data: rows })
    }

    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Result<Self> {
        let t = Self::from_rows(rows, columns.to_vec())?;
        Ok(t.transpose())
    }

    /// Matrix from strings such as `["110", "011"]`, one per row.
    pub fn parse(rows: &[&str]) -> Result<Self> {
        let data: Vec<BitVec> = rows.iter().map(|r| BitVec::parse(r)).collect::<Result<_>>()?;
        let cols = data.first().map_or(0, |r| r.len());
        Self::from_rows(cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.data[r].set(c, b)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[BitVec] {
        &self.data
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn columns(&self) -> Vec<BitVec> {
        self.transpose().data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                t.data[c].set(r, true);
            }
        }
        t
    }

    pub fn apply(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} against {} columns", x.len(), self.cols)));
        }
        Ok(BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.data[r].dot(x))))
    }

    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let acc = &mut out.data[r];
            for k in row.ones() {
                acc.xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.xor(b)).collect();
        Ok(F2Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for r in &self.data {
            e.insert(r.clone());
        }
        e.rank()
    }

    /// Null space as a subspace of the source `F2^cols`.
    pub fn kernel(&self) -> Subspace {
        kernel_of_columns(self.rows, &self.columns(), self.cols)
    }

    /// Column space as a subspace of the target `F2^rows`.
    pub fn image(&self) -> Subspace {
        Subspace::from_vectors(self.rows, self.columns())
    }

    /// Solves `self * x = b` for some `x`, if solvable.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        let cols = self.columns();
        let mut e = TaggedEchelon::new(self.rows, self.cols);
        for (j, c) in cols.into_iter().enumerate() {
            e.insert(c, BitVec::unit(self.cols, j));
        }
        let (rest, tag) = e.reduce(b);
        rest.is_zero().then_some(tag)
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<F2Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut e = TaggedEchelon::new(n, n);
        for (j, c) in self.columns().into_iter().enumerate() {
            if e.insert(c, BitVec::unit(n, j)).is_some() {
                return None;
            }
        }
        let cols: Vec<BitVec> = (0..n).map(|i| e.reduce(&BitVec::unit(n, i)).1).collect();
        F2Matrix::from_columns(n, &cols).ok()
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.concat(b)).collect();
        Ok(F2Matrix { rows: self.rows, cols: self.cols + other.cols, data })
    }
}

/// Incrementally built echelon basis keyed by leading coordinate. Vectors are
/// kept semi-reduced; `into_subspace` finishes the reduction.
#[derive(Clone, Debug)]
pub struct Echelon {
    len: usize,
    rows: Vec<BitVec>,
    by_pivot: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon { len, rows: Vec::new(), by_pivot: vec![None; len] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; the result is zero iff `v` lies in their span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        self.reduce_in_place(&mut v);
        v
    }

    fn reduce_in_place(&self, v: &mut BitVec) {
        let mut from = 0;
        while let Some(p) = next_one(v, from) {
            if let Some(k) = self.by_pivot[p] {
                v.xor_assign(&self.rows[k]);
            }
            from = p + 1;
        }
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, mut v: BitVec) -> bool {
        debug_assert_eq!(v.len(), self.len);
        self.reduce_in_place(&mut v);
        match v.first_one() {
            None => false,
            Some(p) => {
                self.by_pivot[p] = Some(self.rows.len());
                self.rows.push(v);
                true
            }
        }
    }

    pub fn into_subspace(self) -> Subspace {
        Subspace::from_vectors(self.len, self.rows)
    }
}

fn next_one(v: &BitVec, from: usize) -> Option<usize> {
    if from >= v.len() {
        return None;
    }
    let mut wi = from / W;
    let mut w = v.words()[wi] & (!0u64 << (from % W));
    loop {
        if w != 0 {
            return Some(wi * W + w.trailing_zeros() as usize);
        }
        wi += 1;
        if wi >= v.words().len() {
            return None;
        }
        w = v.words()[wi];
    }
}

/// Echelon basis where each row carries a tag recording which inputs it combines.
#[derive(Clone, Debug)]
pub struct TaggedEchelon {
    rows: Vec<(BitVec, BitVec)>,
    by_pivot: Vec<Option<usize>>,
    tag_len: usize,
}

impl TaggedEchelon {
    pub fn new(len: usize, tag_len: usize) -> Self {
        TaggedEchelon { rows: Vec::new(), by_pivot: vec![None; len], tag_len }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut v = v.clone();
        let mut tag = BitVec::zeros(self.tag_len);
        let mut from = 0;
        while let Some(p) = next_one(&v, from) {
            if let Some(k) = self.by_pivot[p] {
                v.xor_assign(&self.rows[k].0);
                tag.xor_assign(&self.rows[k].1);
            }
            from = p + 1;
        }
        (v, tag)
    }

    /// Inserts `v` with tag `t`. If `v` reduces to zero, returns the tag of the
    /// vanishing combination.
    pub fn insert(&mut self, v: BitVec, t: BitVec) -> Option<BitVec> {
        let (v, rt) = self.reduce(&v);
        let tag = rt.xor(&t);
        match v.first_one() {
            None => Some(tag),
            Some(p) => {
                self.by_pivot[p] = Some(self.rows.len());
                self.rows.push((v, tag));
                None
            }
        }
    }
}

/// Kernel of the map `F2^n -> F2^rows` sending `e_j` to `columns[j]`.
pub(crate) fn kernel_of_columns(rows: usize, columns: &[BitVec], n: usize) -> Subspace {
    let mut e = TaggedEchelon::new(rows, n);
    let mut kernel = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        if let Some(k) = e.insert(c.clone(), BitVec::unit(n, j)) {
            kernel.push(k);
        }
    }
    Subspace::from_vectors(n, kernel)
}

/// A linear subspace of `F2^ambient` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in F2^{}: {:?})", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_vectors(ambient, (0..ambient).map(|i| BitVec::unit(ambient, i)))
    }

    /// Span of the given vectors.
    pub fn from_vectors(ambient: usize, vectors: impl IntoIterator<Item = BitVec>) -> Self {
        let mut rows: Vec<BitVec> = vectors.into_iter().filter(|v| !v.is_zero()).collect();
        for v in &rows {
            assert_eq!(v.len(), ambient, "vector length does not match ambient dimension");
        }
        let pivots = rref(&mut rows);
        Subspace { ambient, basis: rows, pivots }
    }

    /// Span of the columns of `m`.
    pub fn canonicalize(m: &F2Matrix) -> Self {
        Self::from_vectors(m.rows(), m.columns())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The basis as the columns of an `ambient x dim` matrix.
    pub fn to_matrix(&self) -> F2Matrix {
        F2Matrix::from_columns(self.ambient, &self.basis).expect("basis vectors have ambient length")
    }

    /// Representative of `v` modulo this subspace that vanishes on all pivots.
    /// It is the lexicographically least element of the coset.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        self.contains(v).then(|| v.gather(&self.pivots))
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of F2^{} and F2^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        Ok(Subspace::from_vectors(self.ambient, self.basis.iter().chain(&other.basis).cloned()))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        Ok(self.sum_and_intersection(other)?.1)
    }

    /// Zassenhaus: echelonize the rows `[u | u]` and `[w | 0]`; rows with a
    /// zero left half carry the intersection on the right.
    pub fn sum_and_intersection(&self, other: &Subspace) -> Result<(Subspace, Subspace)> {
        self.check_same_ambient(other)?;
        let n = self.ambient;
        let mut rows: Vec<BitVec> = self
            .basis
            .iter()
            .map(|u| u.concat(u))
            .chain(other.basis.iter().map(|w| w.concat(&BitVec::zeros(n))))
            .collect();
        rref(&mut rows);
        let mut sum = Vec::new();
        let mut int = Vec::new();
        for r in rows {
            let left = r.slice(0, n);
            if left.is_zero() {
                int.push(r.slice(n, n));
            } else {
                sum.push(left);
            }
        }
        Ok((Subspace::from_vectors(n, sum), Subspace::from_vectors(n, int)))
    }

    /// Basis vectors of `sup` (in its canonical order) completing `self` to a basis of `sup`.
    pub fn complement_in(&self, sup: &Subspace) -> Result<Vec<BitVec>> {
        self.check_same_ambient(sup)?;
        if !sup.contains_subspace(self) {
            return Err(Error::InvariantViolation("complement of a subspace not contained in the larger one".into()));
        }
        let mut e = Echelon::new(self.ambient);
        for b in &self.basis {
            e.insert(b.clone());
        }
        Ok(sup.basis.iter().filter(|b| e.insert((*b).clone())).cloned().collect())
    }

    /// `{x : f x in self}` for `f` with target `F2^ambient`.
    pub fn preimage(&self, f: &F2Matrix) -> Result<Subspace> {
        if f.rows() != self.ambient {
            return Err(Error::DimensionMismatch("preimage under a map with a different target".into()));
        }
        let residuals: Vec<BitVec> = f.columns().iter().map(|c| self.reduce(c)).collect();
        Ok(kernel_of_columns(self.ambient, &residuals, f.cols()))
    }

    /// Image under `f`.
    pub fn image_under(&self, f: &F2Matrix) -> Result<Subspace> {
        if f.cols() != self.ambient {
            return Err(Error::DimensionMismatch("image under a map with a different source".into()));
        }
        let imgs: Vec<BitVec> = self.basis.iter().map(|b| f.apply(b)).collect::<Result<_>>()?;
        Ok(Subspace::from_vectors(f.rows(), imgs))
    }

    /// The subspace of `F2^ambient` vanishing on every vector of `self` under the dot pairing.
    pub fn annihilator(&self) -> Subspace {
        kernel_of_columns(self.dim(), &self.to_matrix().transpose().columns(), self.ambient)
    }
}

/// In-place reduced row echelon form; returns pivot columns.
pub(crate) fn rref(rows: &mut Vec<BitVec>) -> Vec<usize> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut done = 0;
    loop {
        let mut best: Option<(usize, usize)> = None;
        for (i, r) in rows.iter().enumerate().skip(done) {
            if let Some(p) = r.first_one() {
                if best.is_none_or(|(bp, _)| p < bp) {
                    best = Some((p, i));
                }
            }
        }
        let Some((p, i)) = best else { break };
        rows.swap(done, i);
        let pivot_row = rows[done].clone();
        for (k, r) in rows.iter_mut().enumerate() {
            if k != done && r.get(p) {
                r.xor_assign(&pivot_row);
            }
        }
        pivots.push(p);
        done += 1;
    }
    rows.truncate(done);
    pivots
}

/// A basis of `num / den`: vectors of `num` completing `den`, with a way to
/// read off quotient coordinates.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    reps: Vec<BitVec>,
    echelon: TaggedEchelon,
    den: Subspace,
}

impl QuotientBasis {
    pub fn new(num: &Subspace, den: &Subspace) -> Result<Self> {
        let reps = den.complement_in(num)?;
        let mut echelon = TaggedEchelon::new(num.ambient(), reps.len());
        for b in den.basis() {
            echelon.insert(b.clone(), BitVec::zeros(reps.len()));
        }
        for (i, r) in reps.iter().enumerate() {
            echelon.insert(r.clone(), BitVec::unit(reps.len(), i));
        }
        Ok(QuotientBasis { reps, echelon, den: den.clone() })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[BitVec] {
        &self.reps
    }

    pub fn denominator(&self) -> &Subspace {
        &self.den
    }

    /// Coordinates of the class of `v`; `None` if `v` is outside the numerator.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        let (rest, tag) = self.echelon.reduce(v);
        rest.is_zero().then_some(tag)
    }
}

/// Matrix of the map `src_num/src_den -> dst_num/dst_den` induced by `f`, in
/// the bases given by [`QuotientBasis::new`].
pub fn induced_map_on_subquotient(
    f: &F2Matrix,
    src_num: &Subspace,
    src_den: &Subspace,
    dst_num: &Subspace,
    dst_den: &Subspace,
) -> Result<F2Matrix> {
    if f.cols() != src_num.ambient() || f.rows() != dst_num.ambient() {
        return Err(Error::DimensionMismatch("map does not fit the subquotients".into()));
    }
    if src_den.ambient() != src_num.ambient() || dst_den.ambient() != dst_num.ambient() {
        return Err(Error::DimensionMismatch("numerator and denominator ambients differ".into()));
    }
    if !src_num.contains_subspace(src_den) || !dst_num.contains_subspace(dst_den) {
        return Err(Error::InvariantViolation("denominator not contained in numerator".into()));
    }
    if !dst_num.contains_subspace(&src_num.image_under(f)?) {
        return Err(Error::InvariantViolation("f(src_num) is not inside dst_num".into()));
    }
    if !dst_den.contains_subspace(&src_den.image_under(f)?) {
        return Err(Error::InvariantViolation("f(src_den) is not inside dst_den".into()));
    }
    let src = QuotientBasis::new(src_num, src_den)?;
    let dst = QuotientBasis::new(dst_num, dst_den)?;
    let mut cols = Vec::with_capacity(src.dim());
    for r in src.reps() {
        let img = f.apply(r)?;
        cols.push(dst.coordinates(&img).ok_or_else(|| Error::Internal("image left the target numerator".into()))?);
    }
    F2Matrix::from_columns(dst.dim(), &cols)
}

/// Binomial coefficient as usize (zero outside range).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// The `k`-subsets of `0..n` as bitmasks, in lexicographic order of their sorted elements.
pub fn k_subsets(n: usize, k: usize) -> Vec<u64> {
    fn go(start: usize, n: usize, k: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            go(i + 1, n, k - 1, acc | 1 << i, out);
        }
    }
    assert!(n < 64);
    let mut out = Vec::with_capacity(binomial(n, k));
    go(0, n, k, 0, &mut out);
    out
}

/// Determinant over F2 of a small square matrix given by row masks.
pub fn det_mod2(rows: &[u64]) -> bool {
    let mut rows = rows.to_vec();
    let n = rows.len();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| rows[r] >> c & 1 == 1) else { return false };
        rows.swap(c, p);
        for r in c + 1..n {
            if rows[r] >> c & 1 == 1 {
                rows[r] ^= rows[c];
            }
        }
    }
    true
}

/// Coefficients of `v_1 ∧ ... ∧ v_k` on the basis `e_S` (`S` from [`k_subsets`]) of `Λ^k F2^n`.
pub fn wedge(n: usize, vs: &[u64]) -> BitVec {
    let subsets = k_subsets(n, vs.len());
    BitVec::from_indices(
        subsets.len(),
        subsets.iter().enumerate().filter(|(_, &s)| det_mod2(&vs.iter().map(|v| compress(*v, s)).collect::<Vec<_>>())).map(|(i, _)| i),
    )
}

/// Bits of `v` at the positions of `mask`, packed to the low end.
pub fn compress(v: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros();
        out |= (v >> i & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`compress`]: spreads the low bits of `v` over the positions of `mask`.
pub fn expand(v: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros();
        out |= (v >> k & 1) << i;
        k += 1;
        m &= m - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn span(ambient: usize, vs: &[&str]) -> Subspace {
        Subspace::from_vectors(ambient, vs.iter().map(|s| BitVec::parse(s).unwrap()))
    }

    #[test]
    fn dependent_generators_have_dim_two() {
        let s = span(4, &["1100", "0110", "1010"]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.pivots(), &[0, 1]);
    }

    #[test]
    fn projection_onto_quotient_by_first_axis() {
        let f = F2Matrix::parse(&["100", "010"]).unwrap();
        let m = induced_map_on_subquotient(
            &f,
            &Subspace::full(3),
            &Subspace::zero(3),
            &Subspace::full(2),
            &span(2, &["10"]),
        )
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn containment_violation_is_reported() {
        let f = F2Matrix::identity(2);
        let err = induced_map_on_subquotient(&f, &Subspace::full(2), &Subspace::zero(2), &span(2, &["10"]), &Subspace::zero(2));
        assert!(matches!(err, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn mismatched_ambients() {
        assert!(matches!(Subspace::full(2).sum(&Subspace::full(3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn bit_helpers() {
        let v = BitVec::parse("0010011").unwrap();
        assert_eq!(v.first_one(), Some(2));
        assert_eq!(v.last_one(), Some(6));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![2, 5, 6]);
        let long = BitVec::from_indices(200, [3, 64, 130, 199]);
        assert_eq!(long.ones().collect::<Vec<_>>(), vec![3, 64, 130, 199]);
        assert_eq!(next_one(&long, 65), Some(130));
        assert_eq!(long.slice(60, 10).ones().collect::<Vec<_>>(), vec![4]);
    }

    #[test]
    fn subsets_and_wedges() {
        assert_eq!(k_subsets(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(k_subsets(5, 3).len(), 10);
        // (1,0) ∧ (0,1) = e_{12}; (1,1) ∧ (1,1) = 0
        assert_eq!(wedge(2, &[0b01, 0b10]), BitVec::parse("1").unwrap());
        assert!(wedge(2, &[0b11, 0b11]).is_zero());
        assert_eq!(wedge(3, &[0b011]), BitVec::parse("110").unwrap());
        assert_eq!(expand(compress(0b1011, 0b1110), 0b1110), 0b1010);
    }

    #[test]
    fn solve_and_annihilator() {
        let a = F2Matrix::parse(&["110", "011"]).unwrap();
        let b = BitVec::parse("10").unwrap();
        let x = a.solve(&b).unwrap();
        assert_eq!(a.apply(&x).unwrap(), b);
        let s = span(3, &["110"]);
        let ann = s.annihilator();
        assert_eq!(ann.dim(), 2);
        assert!(ann.basis().iter().all(|v| !v.dot(&BitVec::parse("110").unwrap())));
    }

    fn all_vectors(n: usize) -> Vec<BitVec> {
        (0..1u64 << n).map(|m| BitVec::from_u64(n, m)).collect()
    }

    fn arb_vecs(n: usize, max: usize) -> impl Strategy<Value = Vec<BitVec>> {
        prop::collection::vec(0u64..(1 << n), 0..max).prop_map(move |ms| ms.into_iter().map(|m| BitVec::from_u64(n, m)).collect())
    }

    proptest! {
        #[test]
        fn grassmann_and_brute_force(a in arb_vecs(6, 5), b in arb_vecs(6, 5)) {
            let u = Subspace::from_vectors(6, a);
            let w = Subspace::from_vectors(6, b);
            let (s, i) = u.sum_and_intersection(&w).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
            let brute: Vec<BitVec> = all_vectors(6).into_iter().filter(|v| u.contains(v) && w.contains(v)).collect();
            prop_assert_eq!(brute.len(), 1usize << i.dim());
            prop_assert!(brute.iter().all(|v| i.contains(v)));
        }

        #[test]
        fn canonical_form_is_invariant_under_column_operations(a in arb_vecs(7, 6), ops in prop::collection::vec((0usize..6, 0usize..6), 0..12)) {
            let mut cols = a.clone();
            for (i, j) in ops {
                if i != j && i < cols.len() && j < cols.len() {
                    let c = cols[j].clone();
                    cols[i].xor_assign(&c);
                }
            }
            if !cols.is_empty() {
                cols.rotate_left(1);
            }
            prop_assert_eq!(Subspace::from_vectors(7, a), Subspace::from_vectors(7, cols));
        }

        #[test]
        fn rank_nullity(rows in prop::collection::vec(0u64..(1 << 6), 1..7)) {
            let m = F2Matrix::from_rows(6, rows.into_iter().map(|r| BitVec::from_u64(6, r)).collect()).unwrap();
            let k = m.kernel();
            prop_assert_eq!(m.rank() + k.dim(), m.cols());
            prop_assert_eq!(m.image().dim(), m.rank());
            for v in k.basis() {
                prop_assert!(m.apply(v).unwrap().is_zero());
            }
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn preimage_matches_enumeration(rows in prop::collection::vec(0u64..(1 << 5), 4), w in arb_vecs(4, 3)) {
            let f = F2Matrix::from_rows(5, rows.into_iter().map(|r| BitVec::from_u64(5, r)).collect()).unwrap();
            let w = Subspace::from_vectors(4, w);
            let pre = w.preimage(&f).unwrap();
            let brute = all_vectors(5).into_iter().filter(|x| w.contains(&f.apply(x).unwrap())).count();
            prop_assert_eq!(brute, 1usize << pre.dim());
        }

        #[test]
        fn annihilator_is_orthogonal_complement(a in arb_vecs(6, 5)) {
            let s = Subspace::from_vectors(6, a);
            let ann = s.annihilator();
            prop_assert_eq!(s.dim() + ann.dim(), 6);
            prop_assert_eq!(ann.annihilator(), s);
        }
    }
}
