use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use empkit_core::algebra::{chain_expand, compute_s, compute_t, compute_t_by_columns, GMatrix};
use empkit_core::networks::{all_lower_patterns, figure_one};
use empkit_core::{Dag, Rational, Scalar};

type Poly = BTreeMap<Vec<(usize, usize)>, i64>;

/// Right-hand side of `X[l,j] = T[l,j] - sum_i T[l,i] G[i,j]`, with every
/// edge `G[i,j]` substituted recursively and vanishing `T` factors dropped.
fn substitute(dag: &Dag, l: usize, j: usize) -> Poly {
    let mut poly = Poly::new();
    if !dag.reaches(j, l) {
        return poly;
    }
    poly.insert(vec![(l, j)], 1);
    for i in j + 1..l {
        if !dag.is_g_entry(i, j) || !dag.reaches(i, l) {
            continue;
        }
        for (mono, coeff) in substitute(dag, i, j) {
            let mut factors = vec![(l, i)];
            factors.extend(mono);
            *poly.entry(factors).or_default() -= coeff;
        }
    }
    poly.retain(|_, c| *c != 0);
    poly
}

fn expansion_poly(dag: &Dag, l: usize, j: usize) -> Poly {
    chain_expand(dag, (l, j)).unwrap().monomials.iter().map(|m| (m.factors().collect(), i64::from(m.sign))).collect()
}

#[test]
fn chain_expansion_equals_recursive_substitution() {
    for n in 2..=5 {
        for dag in all_lower_patterns(n) {
            for l in 2..=n {
                for j in 1..l {
                    assert_eq!(
                        expansion_poly(&dag, l, j),
                        substitute(&dag, l, j),
                        "({l},{j}) in {:?}",
                        dag.g_entries().collect::<Vec<_>>()
                    );
                }
            }
        }
    }
    let fig = figure_one();
    for l in 2..=7 {
        for j in 1..l {
            assert_eq!(expansion_poly(&fig, l, j), substitute(&fig, l, j));
        }
    }
}

#[test]
fn float_instantiation_tracks_exact_values() {
    let dag = figure_one();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let exact: GMatrix<Rational> = GMatrix::random(&dag, &mut rng);
    let approx = GMatrix::from_fn(&dag, |l, j| exact.get(l, j).magnitude() * sign(&exact.get(l, j)));
    let (te, ta) = (compute_t(&exact), compute_t(&approx));
    for l in 1..=7 {
        for j in 1..=7 {
            let e = te.get(l, j).magnitude() * sign(te.get(l, j));
            let a = *ta.get(l, j);
            assert!((e - a).abs() <= 1e-9 * e.abs().max(1.0), "T[{l},{j}]: {e} vs {a}");
        }
    }
    let single: GMatrix<f32> = GMatrix::from_fn(&dag, |l, j| (l as f32 - j as f32) / 7.0);
    let s = compute_s(&compute_t(&single));
    for ((l, j), v) in single.entries() {
        assert!((s.get(l, j) + v).abs() < 1e-5);
    }
}

fn sign(q: &Rational) -> f64 {
    if num_traits::Signed::is_negative(q) {
        -1.0
    } else {
        1.0
    }
}

fn small_dag() -> impl Strategy<Value = Dag> {
    (1usize..=8).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let slots = (2..=n).flat_map(|l| (1..l).map(move |j| (l, j)));
            let entries: Vec<_> = slots.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            Dag::from_lower_pattern(n, &entries)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursions_agree_exactly(dag in small_dag(), seed in any::<u64>()) {
        let g: GMatrix<Rational> = GMatrix::random(&dag, &mut ChaCha8Rng::seed_from_u64(seed));
        let t = compute_t(&g);
        prop_assert_eq!(&t, &compute_t_by_columns(&g));
        let s = compute_s(&t);
        for l in 1..=dag.n() {
            for j in 1..l {
                prop_assert_eq!(s.get(l, j).clone(), -g.get(l, j));
                let vanishes = !dag.reaches(j, l);
                prop_assert_eq!(t.get(l, j).is_negligible(), vanishes);
            }
        }
    }
}
