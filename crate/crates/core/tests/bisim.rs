mod common;

use common::{random, t};
use maxshare_core::bisim::{collapse_with_map, is_homomorphism};
use maxshare_core::corpus;
use maxshare_core::gen::{scope_ladder, unrolled_comb};
use maxshare_core::{
    bisimilar, collapse, infer_abspre, is_eager_scope, isomorphic, readback, term_size,
    translate_fo_max, translate_fo_min, unshare_s, unshare_variables, Label, TermGraph,
};
use proptest::prelude::*;

fn shared(g: &TermGraph, label: Label) -> usize {
    let deg = g.non_backlink_indegree();
    g.vertices()
        .filter(|&v| g.label(v) == label && deg[v.index()] > 1)
        .count()
}

#[test]
fn unrolled_fixed_point_is_bisimilar_and_collapses() {
    let l = translate_fo_max(&corpus::FIX.term());
    let p = translate_fo_max(&corpus::FIX_UNROLLED.term());
    assert!(bisimilar(&l, &p));
    assert!(bisimilar(&p, &l));
    assert!(isomorphic(&collapse(&p), &l));
}

#[test]
fn delimited_counters_are_not_bisimilar() {
    let l = translate_fo_min(&corpus::COUNTER.term());
    let l2 = translate_fo_min(&corpus::COUNTER_NESTED.term());
    assert!(!bisimilar(&l, &l2));
    assert!(bisimilar(&l2, &l2));
}

#[test]
fn redex_counter_collapses_to_the_plain_counter() {
    let l1 = translate_fo_min(&corpus::COUNTER_REDEX.term());
    let l = translate_fo_min(&corpus::COUNTER.term());
    assert!(isomorphic(&collapse(&l1), &l));
    assert!(isomorphic(&collapse(&l), &l));
}

#[test]
fn unsharing_delimiters_recovers_the_minimal_translation() {
    let term = corpus::SCOPE_INNER_ALIAS.term();
    let max = translate_fo_max(&term);
    let min = translate_fo_min(&term);
    assert!(isomorphic(&unshare_s(&max), &min));
    assert!(isomorphic(&unshare_s(&min), &min));
}

#[test]
fn unsharing_variables_of_self_application() {
    let g = collapse(&translate_fo_max(&t(r"\x. (\y. y) x x")));
    let u = unshare_variables(&g);
    assert_eq!(shared(&u, Label::Var0), 0);
    assert!(bisimilar(&u, &g));
    let plain = translate_fo_max(&t(r"\x. x x"));
    assert!(isomorphic(&unshare_variables(&plain), &plain));
}

#[test]
fn collapse_ids_follow_the_least_member() {
    let g = unrolled_comb(3);
    let (c, map) = collapse_with_map(&g);
    assert_eq!(c.len(), 8);
    assert_eq!(map[g.root().index()], c.root());
    assert!(is_homomorphism(&g, &c, &map));
    // Each class keeps the relative order of its least member.
    let mut firsts = vec![None; c.len()];
    for v in g.vertices() {
        firsts[map[v.index()].index()].get_or_insert(v);
    }
    assert!(firsts.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn delimiter_unsharing_reads_back_near_linearly() {
    for n in [8, 16, 32, 64] {
        let c = collapse(&translate_fo_max(&scope_ladder(n)));
        let u = unshare_s(&c);
        assert!(bisimilar(&u, &c));
        let size = term_size(&readback(&u).unwrap()) as f64;
        let bound = 6.0 * n as f64 * (n as f64).log2();
        assert!(size <= bound, "n={n}: {size}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bisimilarity_agrees_with_collapse(a in any::<u64>(), b in any::<u64>(), same in any::<bool>()) {
        let ga = translate_fo_max(&random(a));
        let gb = if same { translate_fo_min(&random(a)) } else { translate_fo_max(&random(b)) };
        prop_assert_eq!(bisimilar(&ga, &gb), isomorphic(&collapse(&ga), &collapse(&gb)));
        prop_assert_eq!(bisimilar(&ga, &gb), bisimilar(&gb, &ga));
        if same {
            prop_assert!(bisimilar(&ga, &gb));
        }
    }

    #[test]
    fn collapse_is_a_smaller_eager_homomorphic_image(seed in any::<u64>()) {
        let g = translate_fo_min(&random(seed));
        let (c, map) = collapse_with_map(&g);
        prop_assert!(c.len() <= g.len());
        prop_assert!(is_homomorphism(&g, &c, &map));
        let p = infer_abspre(&c).unwrap();
        prop_assert!(is_eager_scope(&c, &p));
        prop_assert!(isomorphic(&collapse(&c), &c));
    }

    #[test]
    fn unsharing_preserves_bisimilarity(seed in any::<u64>()) {
        let g = collapse(&translate_fo_max(&random(seed)));
        for u in [unshare_s(&g), unshare_variables(&g)] {
            prop_assert!(bisimilar(&u, &g));
            prop_assert!(infer_abspre(&u).is_ok());
        }
        prop_assert_eq!(shared(&unshare_s(&g), Label::S), 0);
        prop_assert_eq!(shared(&unshare_variables(&g), Label::Var0), 0);
    }
}
