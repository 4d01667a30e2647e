//! Integer matrices: Smith normal form with transforms, determinants, saturation.

pub type IMat = Vec<Vec<i64>>;

/// `u * a * v = diag(d)`, with `v_inv` the inverse of `v`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: Vec<i64>,
    pub u: IMat,
    pub v: IMat,
    pub v_inv: IMat,
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn smith_normal_form(a: &IMat, cols: usize) -> Snf {
    let rows = a.len();
    let mut m = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut vi = identity(cols);
    let r = rows.min(cols);

    // Column ops act on v by columns and on v_inv by the inverse row op.
    let col_add = |m: &mut IMat, v: &mut IMat, vi: &mut IMat, src: usize, dst: usize, c: i64| {
        for row in m.iter_mut() {
            row[dst] += c * row[src];
        }
        for row in v.iter_mut() {
            row[dst] += c * row[src];
        }
        let s = vi[dst].clone();
        for (x, y) in vi[src].iter_mut().zip(s) {
            *x -= c * y;
        }
    };
    let col_swap = |m: &mut IMat, v: &mut IMat, vi: &mut IMat, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vi.swap(i, j);
    };

    for t in 0..r {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            m.swap(t, bi);
            u.swap(t, bi);
            col_swap(&mut m, &mut v, &mut vi, t, bj);
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    let (top, rest) = m.split_at_mut(i);
                    for (x, y) in rest[0].iter_mut().zip(&top[t]) {
                        *x -= q * y;
                    }
                    let (top, rest) = u.split_at_mut(i);
                    for (x, y) in rest[0].iter_mut().zip(&top[t]) {
                        *x -= q * y;
                    }
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    col_add(&mut m, &mut v, &mut vi, t, j, -q);
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and retry.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    let (top, rest) = m.split_at_mut(i);
                    for (x, y) in top[t].iter_mut().zip(&rest[0]) {
                        *x += y;
                    }
                    let (top, rest) = u.split_at_mut(i);
                    for (x, y) in top[t].iter_mut().zip(&rest[0]) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if t < rows && t < cols && m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let d = (0..r).map(|i| m[i][i]).collect();
    Snf { d, u, v, v_inv: vi }
}

/// A Z-basis of the saturation `span_Q(rows) ∩ Z^cols`.
pub fn saturate(rows: &IMat, cols: usize) -> IMat {
    if rows.is_empty() {
        return Vec::new();
    }
    let s = smith_normal_form(rows, cols);
    s.d.iter().enumerate().filter(|(_, d)| **d != 0).map(|(i, _)| s.v_inv[i].clone()).collect()
}

/// Exact determinant by fraction-free elimination.
pub fn det(a: &IMat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(sw) = (k + 1..n).find(|&i| m[i][k] != 0) else { return 0 };
            m.swap(k, sw);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn rank(rows: &IMat, cols: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    smith_normal_form(rows, cols).d.iter().filter(|d| **d != 0).count()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Divides by the gcd of the entries (no-op on the zero vector).
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mul(a: &IMat, b: &IMat) -> IMat {
        let k = b.len();
        let c = b.first().map_or(0, |r| r.len());
        a.iter().map(|r| (0..c).map(|j| (0..k).map(|t| r[t] * b[t][j]).sum()).collect()).collect()
    }

    #[test]
    fn known_invariants() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&a, 3);
        assert_eq!(s.d, vec![2, 6, 12]);
    }

    #[test]
    fn saturation_of_scaled_edge() {
        assert_eq!(saturate(&vec![vec![3, 0]], 2).len(), 1);
        let b = saturate(&vec![vec![3, 0]], 2);
        assert_eq!(primitive(&b[0]).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 0]);
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&vec![vec![0, -1], vec![1, 2]]), 1);
        assert_eq!(det(&vec![vec![-1, 0], vec![1, 2]]), -2);
        assert_eq!(det(&vec![vec![2, 0, 0], vec![0, 3, 0], vec![1, 1, 1]]), 6);
    }

    proptest! {
        #[test]
        fn snf_is_a_factorization(a in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 1..4)) {
            let s = smith_normal_form(&a, 4);
            let d = mul(&mul(&s.u, &a), &s.v);
            for (i, row) in d.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if i == j { prop_assert_eq!(*x, s.d[i]); } else { prop_assert_eq!(*x, 0); }
                }
            }
            prop_assert_eq!(mul(&s.v, &s.v_inv), identity(4));
            prop_assert_eq!(det(&s.u).abs(), 1);
            for w in s.d.windows(2) {
                if w[0] != 0 { prop_assert_eq!(w[1] % w[0], 0); } else { prop_assert_eq!(w[1], 0); }
            }
        }
    }
}
