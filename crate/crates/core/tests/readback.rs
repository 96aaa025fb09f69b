mod common;

use common::{random, t};
use maxshare_core::corpus;
use maxshare_core::{
    alpha_eq, graph_size, isomorphic, maximal_shared_form, oracle_equiv, print, readback,
    translate_fo_max, unfolding_equivalent, unshare_variables, SharingOptions, Term, TermGraph,
};
use proptest::prelude::*;

const ALL_OPTIONS: [SharingOptions; 4] = [
    SharingOptions {
        unshare_vars: false,
        unshare_s: false,
    },
    SharingOptions {
        unshare_vars: true,
        unshare_s: false,
    },
    SharingOptions {
        unshare_vars: false,
        unshare_s: true,
    },
    SharingOptions {
        unshare_vars: true,
        unshare_s: true,
    },
];

fn msf(term: &Term) -> Term {
    maximal_shared_form(term, SharingOptions::default())
}

/// The body of an outermost abstraction, which has a free variable.
fn opened(term: Term) -> Term {
    match term {
        Term::Abs(_, body) => *body,
        other => other,
    }
}

#[test]
fn self_application_reads_back_with_one_shared_function() {
    let src = corpus::SELF_APPLY.term();
    let r = readback(&translate_fo_max(&src)).unwrap();
    assert!(alpha_eq(&r, &src), "{}", print(&r));
    assert!(alpha_eq(&msf(&src), &src));
}

#[test]
fn unshared_graph_reads_back_without_lets() {
    let g = TermGraph::from_dump("0: LAM -> 1\n1: VAR0 -> 0\n").unwrap();
    assert!(alpha_eq(&readback(&g).unwrap(), &t(r"\x. x")));
    let g = translate_fo_max(&t(r"\a. \b. a (\c. b c)"));
    assert!(alpha_eq(&readback(&g).unwrap(), &t(r"\a. \b. a (\c. b c)")));
}

#[test]
fn fixed_point_reads_back_to_itself() {
    let r = readback(&translate_fo_max(&corpus::FIX.term())).unwrap();
    assert!(alpha_eq(&r, &corpus::FIX.term()), "{}", print(&r));
}

#[test]
fn pipeline_examples() {
    let fix = corpus::FIX.term();
    assert!(alpha_eq(&msf(&corpus::FIX_UNROLLED.term()), &fix));
    assert!(alpha_eq(&msf(&fix), &fix));
    assert!(alpha_eq(
        &msf(&corpus::ID_ID.term()),
        &corpus::ID_ID_SHARED.term()
    ));
}

#[test]
fn already_compact_terms_are_fixed_points() {
    for e in [
        corpus::FIX,
        corpus::COUNTER,
        corpus::SELF_APPLY,
        corpus::DOUBLE,
    ] {
        let r = msf(&e.term());
        assert!(alpha_eq(&r, &e.term()), "{}: {}", e.name, print(&r));
    }
}

#[test]
fn equivalence_examples() {
    assert!(unfolding_equivalent(
        &corpus::FIX.term(),
        &corpus::FIX_UNROLLED.term()
    ));
    assert!(!unfolding_equivalent(
        &corpus::COUNTER.term(),
        &corpus::COUNTER_NESTED.term()
    ));
    assert!(unfolding_equivalent(
        &corpus::COUNTER_REDEX.term(),
        &corpus::COUNTER.term()
    ));
    assert!(unfolding_equivalent(&t("f x"), &t("let g = f in g x")));
    assert!(!unfolding_equivalent(&t("f x"), &t("f y")));
}

#[test]
fn equivalence_agrees_with_the_oracle_on_the_corpus() {
    for a in corpus::ALL {
        for b in corpus::ALL {
            assert_eq!(
                unfolding_equivalent(&a.term(), &b.term()),
                oracle_equiv(&a.term(), &b.term(), 10),
                "{} {}",
                a.name,
                b.name
            );
        }
    }
}

#[test]
fn corpus_round_trips() {
    for e in corpus::ALL {
        let g = translate_fo_max(&e.term());
        let back = translate_fo_max(&readback(&g).unwrap());
        assert!(isomorphic(&back, &g), "{}", e.name);
        for opts in ALL_OPTIONS {
            let r = maximal_shared_form(&e.term(), opts);
            assert!(oracle_equiv(&e.term(), &r, 10), "{} {opts:?}", e.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn readback_is_a_right_inverse(seed in any::<u64>()) {
        let g = translate_fo_max(&random(seed));
        let back = translate_fo_max(&readback(&g).unwrap());
        prop_assert!(isomorphic(&back, &g));
    }

    #[test]
    fn collapsed_graphs_round_trip(seed in any::<u64>()) {
        let g = maxshare_core::collapse(&translate_fo_max(&random(seed)));
        let back = translate_fo_max(&readback(&g).unwrap());
        prop_assert!(isomorphic(&back, &g));
    }

    #[test]
    fn pipeline_preserves_the_unfolding(seed in any::<u64>(), open in any::<bool>(), k in 0usize..4) {
        let term = if open { opened(random(seed)) } else { random(seed) };
        let opts = ALL_OPTIONS[k];
        let r = maximal_shared_form(&term, opts);
        prop_assert!(oracle_equiv(&term, &r, 10), "{} => {}", print(&term), print(&r));
        prop_assert!(unfolding_equivalent(&term, &r));
    }

    #[test]
    fn pipeline_is_idempotent(seed in any::<u64>(), open in any::<bool>(), k in 0usize..4) {
        let term = if open { opened(random(seed)) } else { random(seed) };
        let opts = ALL_OPTIONS[k];
        let once = maximal_shared_form(&term, opts);
        let twice = maximal_shared_form(&once, opts);
        prop_assert!(alpha_eq(&once, &twice), "{} then {}", print(&once), print(&twice));
    }

    #[test]
    fn pipeline_does_not_grow_the_graph(seed in any::<u64>()) {
        let term = random(seed);
        let plain = SharingOptions { unshare_vars: false, unshare_s: false };
        let g = translate_fo_max(&term);
        prop_assert!(graph_size(&translate_fo_max(&maximal_shared_form(&term, plain))) <= graph_size(&g));
        let bound = graph_size(&unshare_variables(&g));
        prop_assert!(graph_size(&translate_fo_max(&msf(&term))) <= bound);
    }

    #[test]
    fn equivalence_is_sound_for_the_oracle(a in any::<u64>(), b in any::<u64>(), same in any::<bool>()) {
        let ta = random(a);
        let tb = if same { msf(&random(a)) } else { random(b) };
        let decided = unfolding_equivalent(&ta, &tb);
        if decided {
            prop_assert!(oracle_equiv(&ta, &tb, 12));
        }
        if same {
            prop_assert!(decided);
        }
    }
}
