use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use empkit_core::algebra::{compute_t, TMatrix};
use empkit_core::emp::upper_bound_emp;
use empkit_core::networks::{all_lower_patterns, figure_one};
use empkit_core::synthesis::{
    explicit_emp, initial_emp, saturate, saturate_in_order, Entry, EquationSystem, KnowledgeState, Scope,
};
use empkit_core::verify::draw_network;
use empkit_core::{Dag, Emp, Rational};

type Snapshot = (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>, Vec<Option<Rational>>);

fn snapshot(state: &KnowledgeState<Rational>, system: &EquationSystem) -> Snapshot {
    let values = system.edges().iter().map(|&(l, j)| state.value(Entry::G(l, j)).cloned()).collect();
    (state.known_t(), state.known_g(), values)
}

fn revealed(system: &EquationSystem, t: &TMatrix<Rational>, emp: &Emp) -> KnowledgeState<Rational> {
    let mut state = KnowledgeState::structural(system);
    state.reveal(emp, |r, c| t.get(r, c).clone());
    state
}

fn emp_from_code(n: usize, mut code: usize) -> Emp {
    let (mut e, mut m) = (Vec::new(), Vec::new());
    for v in 1..=n {
        match code % 3 {
            0 => e.push(v),
            1 => m.push(v),
            _ => {
                e.push(v);
                m.push(v)
            }
        }
        code /= 3;
    }
    Emp::new(e, m)
}

fn check_confluence(dag: &Dag, emp: &Emp, rng: &mut ChaCha8Rng, shuffles: usize) {
    let system = EquationSystem::new(dag);
    let t = compute_t(&draw_network(dag, 5));
    let mut reference = revealed(&system, &t, emp);
    saturate(&system, &mut reference, Scope::All);
    let expected = snapshot(&reference, &system);
    assert!(saturate(&system, &mut reference, Scope::All).is_empty(), "not idempotent");
    let mut order: Vec<usize> = (0..system.equations().len()).collect();
    for _ in 0..shuffles {
        order.shuffle(rng);
        let mut state = revealed(&system, &t, emp);
        saturate_in_order(&system, &mut state, Scope::All, &order);
        assert_eq!(snapshot(&state, &system), expected, "order {order:?} on {}", emp.to_text(dag.n()));
    }
}

#[test]
fn closure_is_order_independent_on_figure_one() {
    let dag = figure_one();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for code in (0..3usize.pow(7)).step_by(7) {
        check_confluence(&dag, &emp_from_code(7, code), &mut rng, 3);
    }
}

#[test]
fn closure_is_order_independent_up_to_five_nodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=5 {
        for dag in all_lower_patterns(n) {
            let random = emp_from_code(n, (dag.edge_count() * 31 + n) % 3usize.pow(n as u32));
            for emp in [initial_emp(&dag), explicit_emp(&dag), upper_bound_emp(&dag), random] {
                check_confluence(&dag, &emp, &mut rng, 2);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn knowledge_grows_with_the_pattern(small in 0usize..2187, extra in 0usize..2187) {
        let dag = figure_one();
        let system = EquationSystem::new(&dag);
        let t = compute_t(&draw_network(&dag, 9));
        let a = emp_from_code(7, small);
        let b = a.union(&emp_from_code(7, extra));
        let mut sa = revealed(&system, &t, &a);
        let mut sb = revealed(&system, &t, &b);
        saturate(&system, &mut sa, Scope::All);
        saturate(&system, &mut sb, Scope::All);
        prop_assert!(sa.known_t().is_subset(&sb.known_t()));
        prop_assert!(sa.known_g().is_subset(&sb.known_g()));
    }

    #[test]
    fn saturation_only_adds(code in 0usize..2187, col in 1usize..=7) {
        let dag = figure_one();
        let system = EquationSystem::new(&dag);
        let t = compute_t(&draw_network(&dag, 2));
        let mut state = revealed(&system, &t, &emp_from_code(7, code));
        let before = snapshot(&state, &system);
        saturate(&system, &mut state, Scope::Column(col));
        let after = snapshot(&state, &system);
        prop_assert!(before.0.is_subset(&after.0) && before.1.is_subset(&after.1));
        for (b, a) in before.2.iter().zip(&after.2) {
            if b.is_some() {
                prop_assert_eq!(b, a);
            }
        }
    }
}
