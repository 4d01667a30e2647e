//! Sparse F2 matrices stored by columns (sorted row indices) and the standard
//! left-to-right column reduction.

use super::{BitVec, F2Matrix};

/// Symmetric difference of two sorted index lists.
pub fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorts and cancels repeated indices in pairs.
pub fn normalize(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    let mut out: Vec<u32> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseF2 {
    rows: usize,
    cols: Vec<Vec<u32>>,
}

impl SparseF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseF2 { rows, cols: vec![Vec::new(); cols] }
    }

    /// Columns given as index lists; repeated indices cancel.
    pub fn from_columns(rows: usize, cols: Vec<Vec<u32>>) -> Self {
        let cols: Vec<Vec<u32>> = cols.into_iter().map(normalize).collect();
        debug_assert!(cols.iter().all(|c| c.last().is_none_or(|&r| (r as usize) < rows)));
        SparseF2 { rows, cols }
    }

    pub fn from_dense(m: &F2Matrix) -> Self {
        let t = m.transpose();
        SparseF2 { rows: m.rows(), cols: (0..m.cols()).map(|j| t.row(j).ones().map(|i| i as u32).collect()).collect() }
    }

    pub fn to_dense(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for &i in c {
                m.set(i as usize, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> SparseF2 {
        let mut t = vec![Vec::new(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &i in c {
                t[i as usize].push(j as u32);
            }
        }
        SparseF2 { rows: self.cols.len(), cols: t }
    }

    pub fn apply(&self, x: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rows);
        for j in x.ones() {
            for &i in &self.cols[j] {
                out.flip(i as usize);
            }
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseF2) -> SparseF2 {
        let cols = other.cols.iter().map(|c| normalize(c.iter().flat_map(|&k| self.cols[k as usize].iter().copied()).collect())).collect();
        SparseF2 { rows: self.rows, cols }
    }

    /// Reduced columns of the standard reduction (each nonzero column has a distinct last index).
    pub fn reduce(&self) -> Vec<Vec<u32>> {
        reduce_columns(self.rows, self.cols.clone(), |_, _| true)
    }

    pub fn rank(&self) -> usize {
        self.reduce().iter().filter(|c| !c.is_empty()).count()
    }

    /// Kernel basis as index lists over the columns.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let mut cols = self.cols.clone();
        let mut tags: Vec<Vec<u32>> = (0..cols.len() as u32).map(|j| vec![j]).collect();
        let mut owner: Vec<u32> = vec![u32::MAX; self.rows];
        let mut kernel = Vec::new();
        for j in 0..cols.len() {
            while let Some(&low) = cols[j].last() {
                let i = owner[low as usize];
                if i == u32::MAX {
                    owner[low as usize] = j as u32;
                    break;
                }
                cols[j] = xor_sorted(&cols[j], &cols[i as usize]);
                tags[j] = xor_sorted(&tags[j], &tags[i as usize]);
            }
            if cols[j].is_empty() {
                kernel.push(std::mem::take(&mut tags[j]));
            }
        }
        kernel
    }
}

/// Left-to-right reduction: while an earlier column has the same last index, add it.
/// `allowed(i, j)` asserts that adding column `i` into column `j` is legitimate.
pub fn reduce_columns(rows: usize, mut cols: Vec<Vec<u32>>, allowed: impl Fn(usize, usize) -> bool) -> Vec<Vec<u32>> {
    let mut owner: Vec<u32> = vec![u32::MAX; rows];
    for j in 0..cols.len() {
        while let Some(&low) = cols[j].last() {
            let i = owner[low as usize];
            if i == u32::MAX {
                owner[low as usize] = j as u32;
                break;
            }
            debug_assert!(allowed(i as usize, j));
            let merged = xor_sorted(&cols[j], &cols[i as usize]);
            cols[j] = merged;
        }
    }
    cols
}
