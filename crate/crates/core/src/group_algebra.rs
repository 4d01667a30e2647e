//! The group algebra `F2[V]` of `V = F2^m`, its augmentation filtration
//! `m^k`, the function algebra `O(V)` with the polynomial-degree filtration
//! `O^(k)`, the isomorphism `η: Λ^k V -> m^k / m^{k+1}` and the contraction `f·P`.
//!
//! Elements of `F2[V]` and functions on `V` are both bit vectors of length
//! `2^m` indexed by the mask of `v`. Writing `g_S = Π_{i ∈ S} (1 + x^{e_i})`,
//! the family `(g_S)` is a basis of `F2[V]` and `m^k` is spanned by the `g_S`
//! with `|S| >= k`; coordinates in this basis are the superset Möbius transform.

use crate::error::{Error, Result};
use crate::f2_linalg::{k_subsets, BitVec, Subspace};

fn size(m: usize) -> usize {
    1usize << m
}

/// `x^v`.
pub fn monomial(m: usize, v: u64) -> BitVec {
    BitVec::unit(size(m), v as usize)
}

/// `aug(P) = Σ p_v`.
pub fn aug(p: &BitVec) -> bool {
    p.count_ones() % 2 == 1
}

/// Product in `F2[V]` (XOR convolution of coefficient vectors).
pub fn product(a: &BitVec, b: &BitVec) -> BitVec {
    let mut out = BitVec::zeros(a.len());
    for u in a.ones() {
        for v in b.ones() {
            out.flip(u ^ v);
        }
    }
    out
}

/// `x^o · P`.
pub fn translate(p: &BitVec, o: u64) -> BitVec {
    BitVec::from_indices(p.len(), p.ones().map(|v| v ^ o as usize))
}

/// `Π_i (1 + x^{v_i})`.
pub fn product_of_generators(m: usize, vs: &[u64]) -> BitVec {
    let mut acc = monomial(m, 0);
    for &v in vs {
        acc = acc.xor(&translate(&acc, v));
    }
    acc
}

/// Superset sums `c_T = Σ_{S ⊇ T} p_S`; an involution over F2.
pub fn superset_transform(p: &BitVec) -> BitVec {
    let n = p.len();
    let mut bits: Vec<bool> = (0..n).map(|i| p.get(i)).collect();
    let mut step = 1;
    while step < n {
        for i in 0..n {
            if i & step == 0 {
                bits[i] ^= bits[i | step];
            }
        }
        step <<= 1;
    }
    BitVec::from_bools(&bits)
}

/// Subset sums `a_T = Σ_{S ⊆ T} f_S`; an involution over F2.
pub fn subset_transform(f: &BitVec) -> BitVec {
    let n = f.len();
    let mut bits: Vec<bool> = (0..n).map(|i| f.get(i)).collect();
    let mut step = 1;
    while step < n {
        for i in 0..n {
            if i & step != 0 {
                bits[i] ^= bits[i ^ step];
            }
        }
        step <<= 1;
    }
    BitVec::from_bools(&bits)
}

/// Largest `k` with `P ∈ m^k`; `None` for `P = 0`.
pub fn filtration_degree(p: &BitVec) -> Option<usize> {
    superset_transform(p).ones().map(|s| s.count_ones() as usize).min()
}

pub fn in_aug_power(p: &BitVec, k: usize) -> bool {
    filtration_degree(p).is_none_or(|d| d >= k)
}

/// `m^k ⊂ F2[V]`, spanned by `g_S`, `|S| >= k`.
pub fn aug_power(m: usize, k: usize) -> Subspace {
    let gens = (k..=m).flat_map(|j| k_subsets(m, j)).map(|s| BitVec::from_indices(size(m), (0..size(m)).filter(|&t| t as u64 & !s == 0)));
    Subspace::from_vectors(size(m), gens)
}

/// `m^k_W ⊂ F2[W] ⊂ F2[V]` for the subspace `W` with the given basis.
pub fn aug_power_of_subspace(m: usize, basis: &[u64], k: usize) -> Subspace {
    let gens = (k..=basis.len()).flat_map(|j| k_subsets(basis.len(), j)).map(|s| {
        let vs: Vec<u64> = (0..basis.len()).filter(|i| s >> i & 1 == 1).map(|i| basis[i]).collect();
        product_of_generators(m, &vs)
    });
    Subspace::from_vectors(size(m), gens)
}

/// `<x^v : v ∈ S>`.
pub fn monomial_span(m: usize, set: impl IntoIterator<Item = u64>) -> Subspace {
    Subspace::from_vectors(size(m), set.into_iter().map(|v| monomial(m, v)))
}

/// `η(w)` for `w ∈ Λ^k V` on the subset basis: the representative `Σ_S w_S g_S` of `m^k / m^{k+1}`.
pub fn eta(m: usize, k: usize, w: &BitVec) -> BitVec {
    let subsets = k_subsets(m, k);
    let mut c = BitVec::zeros(size(m));
    for i in w.ones() {
        c.set(subsets[i] as usize, true);
    }
    superset_transform(&c)
}

/// `η^{-1}`: the class of `P ∈ m^k` in `m^k / m^{k+1} ≅ Λ^k V`. This is the
/// Borel-Viro projection `bv_k`.
pub fn eta_inverse(m: usize, k: usize, p: &BitVec) -> Result<BitVec> {
    let c = superset_transform(p);
    if c.ones().any(|s| (s.count_ones() as usize) < k) {
        return Err(Error::InvariantViolation(format!("element is not in m^{k}")));
    }
    let subsets = k_subsets(m, k);
    Ok(BitVec::from_bools(&subsets.iter().map(|&s| c.get(s as usize)).collect::<Vec<_>>()))
}

/// Degree of `f` as a reduced polynomial; `None` for the zero function.
pub fn degree(f: &BitVec) -> Option<usize> {
    subset_transform(f).ones().map(|s| s.count_ones() as usize).max()
}

/// Truth table of the monomial `Π_{i ∈ S} x_i`.
pub fn monomial_function(m: usize, s: u64) -> BitVec {
    BitVec::from_indices(size(m), (0..size(m)).filter(|&v| v as u64 & s == s))
}

/// Truth table of the linear form `α`.
pub fn linear_function(m: usize, alpha: u64) -> BitVec {
    BitVec::from_indices(size(m), (0..size(m)).filter(|&v| (v as u64 & alpha).count_ones() % 2 == 1))
}

/// `O^(k)`: functions of degree at most `k`.
pub fn degree_filtration(m: usize, k: usize) -> Subspace {
    let gens = (0..=k.min(m)).flat_map(|j| k_subsets(m, j)).map(|s| monomial_function(m, s));
    Subspace::from_vectors(size(m), gens)
}

/// `f·P = Σ f(v) p_v x^v`.
pub fn contract(f: &BitVec, p: &BitVec) -> BitVec {
    f.and(p)
}

/// `<f; P> = aug(f·P)`.
pub fn pairing(f: &BitVec, p: &BitVec) -> bool {
    f.dot(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2_linalg::{binomial, wedge};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    /// All linear subspaces of `F2^m` of dimension `d`, as sorted element lists.
    fn subspaces(m: usize, d: usize) -> Vec<Vec<u64>> {
        let mut found = std::collections::BTreeSet::new();
        let all: Vec<u64> = (1..size(m) as u64).collect();
        fn go(m: usize, d: usize, start: usize, all: &[u64], span: Vec<u64>, found: &mut std::collections::BTreeSet<Vec<u64>>) {
            if span.len() == 1 << d {
                let mut s = span;
                s.sort();
                found.insert(s);
                return;
            }
            for (i, &v) in all.iter().enumerate().skip(start) {
                if span.contains(&v) {
                    continue;
                }
                let mut next = span.clone();
                next.extend(span.iter().map(|u| u ^ v));
                go(m, d, i + 1, all, next, found);
            }
        }
        go(m, d, 0, &all, vec![0], &mut found);
        found.into_iter().collect()
    }

    fn random_element(rng: &mut impl Rng, m: usize) -> BitVec {
        BitVec::from_bools(&(0..size(m)).map(|_| rng.gen()).collect::<Vec<bool>>())
    }

    fn random_in(rng: &mut impl Rng, s: &Subspace) -> BitVec {
        let mut v = BitVec::zeros(s.ambient());
        for b in s.basis() {
            if rng.gen() {
                v.xor_assign(b);
            }
        }
        v
    }

    #[test]
    fn aug_power_dimensions_and_subspace_sums() {
        assert_eq!(aug_power(3, 0).dim(), 8);
        assert_eq!(aug_power(3, 2).dim(), 4);
        assert_eq!(aug_power(3, 3).dim(), 1);
        for m in 0..=4 {
            for k in 0..=m + 1 {
                let expected: usize = (k..=m).map(|j| binomial(m, j)).sum();
                assert_eq!(aug_power(m, k).dim(), expected);
                if k >= 1 && k <= m {
                    let sums = subspaces(m, k).into_iter().map(|w| BitVec::from_indices(size(m), w.iter().map(|&v| v as usize)));
                    assert_eq!(Subspace::from_vectors(size(m), sums), aug_power(m, k), "m = {m}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn multiplication_by_a_generator_preserves_steps() {
        for m in 1..=4 {
            for k in 0..=m {
                let mk = aug_power(m, k);
                for v in 0..size(m) as u64 {
                    let moved = Subspace::from_vectors(size(m), mk.basis().iter().map(|b| translate(b, v)));
                    assert_eq!(moved, mk);
                    // and x^v acts as the identity on m^k / m^{k+1}
                    for b in mk.basis() {
                        assert!(in_aug_power(&translate(b, v).xor(b), k + 1));
                    }
                }
            }
        }
    }

    #[test]
    fn eta_is_an_isomorphism_and_multiplicative() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for m in 0..=5 {
            for k in 0..=m {
                assert_eq!(aug_power(m, k).dim() - aug_power(m, k + 1).dim(), binomial(m, k));
                for i in 0..binomial(m, k) {
                    let w = BitVec::unit(binomial(m, k), i);
                    assert_eq!(eta_inverse(m, k, &eta(m, k, &w)).unwrap(), w);
                }
            }
        }
        assert_eq!(eta(3, 0, &BitVec::unit(1, 0)), monomial(3, 0));
        for _ in 0..50 {
            let m = rng.gen_range(1..=4);
            let k = rng.gen_range(0..=m);
            let l = rng.gen_range(0..=m - k);
            let u: Vec<u64> = (0..k).map(|_| rng.gen_range(0..size(m) as u64)).collect();
            let w: Vec<u64> = (0..l).map(|_| rng.gen_range(0..size(m) as u64)).collect();
            let pu = product_of_generators(m, &u);
            let pw = product_of_generators(m, &w);
            // Π(1 + x^{v_i}) represents v_1 ∧ ... ∧ v_k
            assert_eq!(eta_inverse(m, k, &pu).unwrap(), wedge(m, &u));
            let both: Vec<u64> = u.iter().chain(&w).copied().collect();
            let prod = product(&eta(m, k, &wedge(m, &u)), &eta(m, l, &wedge(m, &w)));
            assert_eq!(eta_inverse(m, k + l, &prod).unwrap(), wedge(m, &both));
            assert_eq!(product(&pu, &pw), product_of_generators(m, &both));
        }
    }

    #[test]
    fn contraction_examples() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let one = BitVec::from_indices(16, 0..16);
        let p = random_element(&mut rng, 4);
        assert_eq!(contract(&one, &p), p);
        // χ_A for the affine hyperplane x_0 + x_2 = 1
        let chi = linear_function(4, 0b101);
        let all = BitVec::from_indices(16, 0..16);
        assert_eq!(contract(&chi, &all), BitVec::from_indices(16, (0..16).filter(|v| (v & 0b101usize).count_ones() == 1)));
        for _ in 0..200 {
            let m = rng.gen_range(1..=4);
            let l = rng.gen_range(0..=2.min(m));
            let k = rng.gen_range(0..=m - l);
            let f = random_in(&mut rng, &degree_filtration(m, l));
            let pp = random_in(&mut rng, &aug_power(m, k + l));
            assert!(in_aug_power(&contract(&f, &pp), k));
        }
    }

    #[test]
    fn contraction_induces_the_exterior_contraction() {
        // a linear form α acting on Π(1 + x^{v_i}) gives the contraction α·(v_1 ∧ ... ∧ v_k)
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let m = rng.gen_range(1..=4);
            let k = rng.gen_range(1..=m);
            let alpha = rng.gen_range(0..size(m) as u64);
            let vs: Vec<u64> = (0..k).map(|_| rng.gen_range(0..size(m) as u64)).collect();
            let lhs = eta_inverse(m, k - 1, &contract(&linear_function(m, alpha), &product_of_generators(m, &vs))).unwrap();
            let rhs = crate::tropical::contraction_matrix(&[alpha], m, k).apply(&wedge(m, &vs)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn degree_filtration_duality() {
        for m in 0..=4 {
            for k in 0..=m {
                let o = degree_filtration(m, k);
                assert_eq!(o.dim(), (0..=k).map(|j| binomial(m, j)).sum::<usize>());
                let mk1 = aug_power(m, k + 1);
                for f in o.basis() {
                    for g in mk1.basis() {
                        assert!(!pairing(f, g));
                    }
                }
                assert_eq!(mk1.annihilator(), o);
                if k >= 1 {
                    assert_eq!(aug_power(m, k).dim() + degree_filtration(m, k - 1).dim(), size(m));
                }
            }
            assert_eq!(degree_filtration(m, 0).dim(), 1);
            assert_eq!(degree_filtration(m, m).dim(), size(m));
        }
    }

    #[test]
    fn degree_filtration_is_multiplicative() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for m in 1..=4 {
            for k in 0..=m {
                for l in 0..=m - k {
                    let (ok, ol, okl) = (degree_filtration(m, k), degree_filtration(m, l), degree_filtration(m, k + l));
                    for _ in 0..10 {
                        let f = random_in(&mut rng, &ok);
                        let g = random_in(&mut rng, &ol);
                        assert!(okl.contains(&f.and(&g)));
                        assert!(degree(&f.and(&g)).is_none_or(|d| d <= k + l));
                    }
                }
            }
        }
    }

    #[test]
    fn subspace_intersection() {
        for m in 1..=4 {
            for d in 0..=m {
                for w in subspaces(m, d) {
                    let basis: Vec<u64> = Subspace::from_vectors(m, w.iter().map(|&v| BitVec::from_u64(m, v)))
                        .basis()
                        .iter()
                        .map(BitVec::to_u64)
                        .collect();
                    let fw = monomial_span(m, w.iter().copied());
                    for k in 0..=m {
                        assert_eq!(fw.intersection(&aug_power(m, k)).unwrap(), aug_power_of_subspace(m, &basis, k));
                    }
                }
            }
        }
    }

    #[test]
    fn affine_complement() {
        for m in 1..=4 {
            // A cut out by l independent affine hyperplanes α_i = c_i
            for l in 1..=m {
                for forms in k_subsets(size(m) - 1, l).into_iter().take(40) {
                    let alphas: Vec<u64> = (0..size(m) as u64 - 1).filter(|i| forms >> i & 1 == 1).map(|i| i + 1).collect();
                    if Subspace::from_vectors(m, alphas.iter().map(|&a| BitVec::from_u64(m, a))).dim() < l {
                        continue;
                    }
                    for c in 0..1u64 << l {
                        let on = |v: u64, i: usize| ((v & alphas[i]).count_ones() as u64 % 2) == (c >> i & 1);
                        let outside_a = monomial_span(m, (0..size(m) as u64).filter(|&v| !(0..l).all(|i| on(v, i))));
                        for k in 0..=m {
                            let mk = aug_power(m, k);
                            let lhs = outside_a.intersection(&mk).unwrap();
                            let rhs = (0..l).fold(Subspace::zero(size(m)), |acc, i| {
                                let part = monomial_span(m, (0..size(m) as u64).filter(|&v| !on(v, i))).intersection(&mk).unwrap();
                                acc.sum(&part).unwrap()
                            });
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn transforms_are_involutions(bits in prop::collection::vec(any::<bool>(), 16)) {
            let p = BitVec::from_bools(&bits);
            prop_assert_eq!(superset_transform(&superset_transform(&p)), p.clone());
            prop_assert_eq!(subset_transform(&subset_transform(&p)), p.clone());
        }

        #[test]
        fn degree_agrees_with_filtration_membership(bits in prop::collection::vec(any::<bool>(), 16)) {
            let f = BitVec::from_bools(&bits);
            for k in 0..=4 {
                prop_assert_eq!(degree_filtration(4, k).contains(&f), degree(&f).is_none_or(|d| d <= k));
                prop_assert_eq!(aug_power(4, k).contains(&f), in_aug_power(&f, k));
            }
        }
    }
}
