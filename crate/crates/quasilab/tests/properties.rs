//! Randomized checks of the representation-level contracts: parser
//! round-trips, the substitution lemma for evaluation, closure-operator
//! laws for principal congruences, and quotient/embedding sanity.

use std::rc::Rc;

use proptest::prelude::*;
use quasilab::congruence::{con_all, con_q, Congruence};
use quasilab::corpus::{corpus, names};
use quasilab::deduction::Quasivariety;
use quasilab::kernel::{
    holds, parse_term, Budgets, FiniteAlgebra, HoldsOutcome, Quasiequation, Signature, Term,
};
use quasilab::morphisms::{embeds, isomorphic, quotient};
use quasilab::report::Verdict;

fn b() -> Budgets {
    Budgets::default()
}

fn term_strategy(sig: Rc<Signature>, nvars: usize) -> BoxedStrategy<Term> {
    let ops: Vec<(usize, usize)> = sig
        .ops
        .iter()
        .enumerate()
        .map(|(i, o)| (i, o.arity))
        .collect();
    let nullary: Vec<usize> = ops.iter().filter(|(_, k)| *k == 0).map(|(i, _)| *i).collect();
    let mut leaves = vec![(0..nvars).prop_map(Term::var).boxed()];
    if !nullary.is_empty() {
        leaves.push(
            prop::sample::select(nullary)
                .prop_map(|op| Term::apply(op, vec![]))
                .boxed(),
        );
    }
    let leaf = prop::strategy::Union::new(leaves).boxed();
    let positive: Vec<(usize, usize)> = ops.into_iter().filter(|(_, k)| *k > 0).collect();
    leaf.prop_recursive(3, 24, 3, move |inner| {
        prop::sample::select(positive.clone())
            .prop_flat_map(move |(op, k)| {
                prop::collection::vec(inner.clone(), k..=k)
                    .prop_map(move |cs| Term::apply(op, cs))
            })
            .boxed()
    })
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // printing then parsing is stable: the reparsed term prints the same
    // and evaluates identically under the variable renumbering
    #[test]
    fn print_parse_round_trip(t in term_strategy(corpus("m3").unwrap().sig.clone(), 3)) {
        let a = corpus("m3").unwrap();
        let text = t.print(&a.sig);
        let (t2, _) = parse_term(&text, &a.sig).unwrap();
        prop_assert_eq!(t2.print(&a.sig), parse_term(&t2.print(&a.sig), &a.sig).unwrap().0.print(&a.sig));
        // reparsing the reparse is the identity
        let (t3, _) = parse_term(&t2.print(&a.sig), &a.sig).unwrap();
        prop_assert!(t3 == t2);
    }

    // eval(t[x0 := s], v) = eval(t, v[x0 -> eval(s, v)])
    #[test]
    fn substitution_lemma(
        t in term_strategy(corpus("m3").unwrap().sig.clone(), 3),
        s in term_strategy(corpus("m3").unwrap().sig.clone(), 3),
        v in prop::collection::vec(0usize..3, 3),
    ) {
        let a = corpus("m3").unwrap();
        let composed = t.subst(&[s.clone(), Term::var(1), Term::var(2)]);
        let mut shifted = v.clone();
        shifted[0] = s.eval(&a, &v);
        prop_assert_eq!(composed.eval(&a, &v), t.eval(&a, &shifted));
    }

    // exhaustive equation checking agrees with a direct double loop
    #[test]
    fn holds_agrees_with_brute_force(
        l in term_strategy(corpus("z4").unwrap().sig.clone(), 2),
        r in term_strategy(corpus("z4").unwrap().sig.clone(), 2),
    ) {
        let a = corpus("z4").unwrap();
        let eq = Quasiequation::new(vec![], (l.clone(), r.clone()));
        let verdict = matches!(holds(&a, &eq, &b()).unwrap(), HoldsOutcome::Holds);
        let mut brute = true;
        for x in 0..a.size {
            for y in 0..a.size {
                if l.eval(&a, &[x, y]) != r.eval(&a, &[x, y]) {
                    brute = false;
                }
            }
        }
        prop_assert_eq!(verdict, brute);
    }

    // principal relative congruence generation is a closure operator:
    // extensive, monotone, idempotent
    #[test]
    fn principal_congruences_form_a_closure_operator(
        x1 in 0usize..3, y1 in 0usize..3, x2 in 0usize..3, y2 in 0usize..3,
    ) {
        let a = corpus("heyting3").unwrap();
        let q = Quasivariety::new(vec![corpus("heyting3").unwrap()]).unwrap();
        let lat = con_q(&a, &q.refs(), &b()).unwrap();
        let one = lat.principal(&[(x1, y1)]);
        let both = lat.principal(&[(x1, y1), (x2, y2)]);
        prop_assert!(one.related(x1, y1), "extensive");
        prop_assert!(one.leq(&both), "monotone");
        // regenerate from all related pairs: nothing new may appear
        let mut pairs = Vec::new();
        for p in 0..a.size {
            for qq in 0..a.size {
                if both.related(p, qq) {
                    pairs.push((p, qq));
                }
            }
        }
        let again = lat.principal(&pairs);
        prop_assert!(again == both, "idempotent");
    }
}

#[test]
fn quotients_by_extreme_congruences() {
    for name in names() {
        let a = corpus(name).unwrap();
        let (by_delta, _) = quotient(&a, &Congruence::delta(a.size));
        assert!(
            isomorphic(&a, &by_delta, &b()).is_yes(),
            "{}: quotient by the identity congruence must be isomorphic",
            name
        );
        let (by_nabla, _) = quotient(&a, &Congruence::nabla(a.size));
        assert_eq!(by_nabla.size, 1, "{}", name);
    }
}

#[test]
fn embeddings_respect_size_and_isomorphism() {
    let small: Vec<FiniteAlgebra> = ["m2", "m3", "m4"].iter().map(|n| corpus(n).unwrap()).collect();
    for x in &small {
        for y in &small {
            if let Verdict::Yes(_) = embeds(x, y, &b()) {
                assert!(x.size <= y.size);
            }
            if isomorphic(x, y, &b()).is_yes() {
                assert!(embeds(x, y, &b()).is_yes() && embeds(y, x, &b()).is_yes());
            }
        }
    }
}

#[test]
fn free_algebras_grow_monotonically() {
    for name in ["lattice2", "z2", "z4", "impl2"] {
        let q = Quasivariety::new(vec![corpus(name).unwrap()]).unwrap();
        let mut prev = 0usize;
        for rank in 1..=3 {
            let f = match q.free(rank, &b()) {
                Ok(f) if !f.truncated => f,
                _ => break,
            };
            assert!(f.size() >= prev, "{}: free size dropped at rank {}", name, rank);
            prev = f.size();
        }
    }
}

#[test]
fn every_corpus_algebra_is_a_member_of_its_own_quasivariety() {
    for name in names() {
        let a = corpus(name).unwrap();
        if a.size > 8 {
            continue; // relative congruence scan on the 16-element lattice is out of scope here
        }
        let lat = con_q(&a, &[&a], &b()).unwrap();
        assert!(lat.has_delta, "{}", name);
        let full = con_all(&a, &b()).unwrap();
        for theta in &lat.members {
            assert!(
                full.members.contains(theta),
                "{}: a relative congruence must be a congruence",
                name
            );
        }
    }
}
