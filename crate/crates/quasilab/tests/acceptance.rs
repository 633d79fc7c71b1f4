//! End-to-end acceptance suite: one test per criterion, each printing a
//! single pass line (failures panic with the discrepancy).

use quasilab::clones::{term_clone, u_presentable, CloneSpec};
use quasilab::congruence::{con_all, con_q, is_filtral, Congruence};
use quasilab::corpus::{corpus, names};
use quasilab::deduction::{AdmissibleEvidence, Quasivariety};
use quasilab::discriminator::{
    dual_to_fixedpoint, fixedpoint_to_dual, is_dual_i_discriminator, is_fixedpoint_discriminator,
    is_rpip_witness, primitive_by_commutation, synth_dual_i_discriminator,
};
use quasilab::kernel::{
    holds, parse_quasiequation, parse_term, Budgets, FiniteAlgebra, HoldsOutcome, Quasiequation,
    Signature, Term,
};
use quasilab::morphisms::{embeds, product, product_coords, subalgebras_upto_iso};
use quasilab::projectivity::{primitive, projective, weakly_projective};
use quasilab::report::Verdict;

fn b() -> Budgets {
    Budgets::default()
}

fn qv(name: &str) -> Quasivariety {
    Quasivariety::new(vec![corpus(name).unwrap()]).unwrap()
}

fn alg(name: &str) -> FiniteAlgebra {
    corpus(name).unwrap()
}

/// m3 with its three elements adjoined as nullary operations, for
/// polynomial (rather than term) clones.
fn kleene_with_constants() -> FiniteAlgebra {
    let m3 = alg("m3");
    let mut ops: Vec<(String, usize)> = m3
        .sig
        .ops
        .iter()
        .map(|o| (o.name.clone(), o.arity))
        .collect();
    for e in 0..m3.size {
        ops.push((format!("k{}", e), 0));
    }
    let sig = std::rc::Rc::new(Signature::new(
        ops.iter().map(|(n, k)| (n.as_str(), *k)).collect(),
    ));
    let mut tables = m3.tables.clone();
    for e in 0..m3.size {
        tables.push(vec![e]);
    }
    FiniteAlgebra::new("m3+consts", sig, m3.labels.clone(), tables).unwrap()
}

/// Does a ternary table (row-major over a `size`-element carrier) satisfy
/// t(a,b,c) = t(a,b,d) iff a = b or c = d?
fn table_is_ternary_intersection_witness(t: &[usize], size: usize) -> bool {
    for a in 0..size {
        for bb in 0..size {
            for c in 0..size {
                for d in 0..size {
                    let eq = t[(a * size + bb) * size + c] == t[(a * size + bb) * size + d];
                    if eq != (a == bb || c == d) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn criterion_01_kleene_quaternary_intersection_witnesses() {
    let m3 = alg("m3");
    let h = "meet(meet(x,neg(x)),meet(y,neg(y)))";
    let hzw = "meet(meet(z,neg(z)),meet(w,neg(w)))";
    let q1s = format!("join({h},{hzw})");
    let extra = "meet(meet(join(x,y),join(neg(x),neg(y))),meet(join(z,w),join(neg(z),neg(w))))";
    let q2s = format!("join({q1s},{extra})");
    let q1 = parse_term(&q1s, &m3.sig).unwrap().0;
    let q2 = parse_term(&q2s, &m3.sig).unwrap().0;
    assert!(
        is_rpip_witness(&[&m3], &q1, &q2).unwrap().is_yes(),
        "witness pair fails on the 3-element Kleene chain"
    );
    let m4 = alg("m4");
    let q1m = parse_term(&q1s, &m4.sig).unwrap().0;
    let q2m = parse_term(&q2s, &m4.sig).unwrap().0;
    match is_rpip_witness(&[&m4], &q1m, &q2m).unwrap() {
        Verdict::No((name, tuple)) => {
            assert_eq!(name, m4.name);
            assert_eq!(tuple, (0, 1, 0, 2), "expected counterexample (0,a,0,b)");
        }
        other => panic!("expected a counterexample on m4, got {:?}", other),
    }
    println!("criterion 01 (quaternary intersection witnesses): pass");
}

#[test]
fn criterion_02_kleene_unary_polynomial_trichotomy() {
    let poly = kleene_with_constants();
    let tc = term_clone(&poly, 1, 100_000);
    assert!(!tc.truncated, "unary polynomial closure must complete");
    let mut injectives = Vec::new();
    for p in &tc.tables {
        // constant 0 or 1, constant a, or fixes a
        let boolean_constant = (p[0] == p[1] && p[1] == p[2]) && (p[0] == 0 || p[0] == 2);
        let constant_a = p[0] == 1 && p[1] == 1 && p[2] == 1;
        let fixes_a = p[1] == 1;
        assert!(
            boolean_constant || constant_a || fixes_a,
            "polynomial {:?} escapes the trichotomy",
            p
        );
        if p[0] != p[1] && p[1] != p[2] && p[0] != p[2] {
            injectives.push(p.clone());
        }
    }
    injectives.sort();
    assert_eq!(
        injectives,
        vec![vec![0, 1, 2], vec![2, 1, 0]],
        "injective unary polynomials must be exactly identity and negation"
    );
    println!(
        "criterion 02 (unary polynomial trichotomy, closure size {}): pass",
        tc.tables.len()
    );
}

#[test]
fn criterion_03_no_ternary_intersection_witness_for_kleene() {
    let m3 = alg("m3");
    let tc = term_clone(&m3, 3, 100_000);
    assert!(!tc.truncated, "ternary clone closure must complete under cap");
    let mut passers = 0usize;
    for t in &tc.tables {
        if table_is_ternary_intersection_witness(t, 3) {
            // would also need to pass on the 2-element subalgebra {0, 2}
            let sub = [0usize, 2];
            let mut restricted = Vec::with_capacity(8);
            for &a in &sub {
                for &bb in &sub {
                    for &c in &sub {
                        let v = t[(a * 3 + bb) * 3 + c];
                        restricted.push(sub.iter().position(|&e| e == v).unwrap());
                    }
                }
            }
            if table_is_ternary_intersection_witness(&restricted, 2) {
                passers += 1;
            }
        }
    }
    assert_eq!(passers, 0, "no clone member may be an intersection witness");
    println!(
        "criterion 03 (ternary clone of the Kleene chain, closure size {}, no witness): pass",
        tc.tables.len()
    );
}

#[test]
fn criterion_04_implication_algebra() {
    let a = alg("impl2");
    let p = parse_term("imp(imp(imp(x,y),imp(imp(y,x),z)),z)", &a.sig)
        .unwrap()
        .0;
    let rep = is_dual_i_discriminator(&[&a], &p).unwrap();
    assert!(rep.pass());
    assert_eq!(rep.per_algebra[0].pi, vec![1, 1], "diagonal must be constantly 1");
    // every ternary clone member takes value 1 at one of the three
    // off-diagonal unit probes
    let tc = term_clone(&a, 3, 100_000);
    assert!(!tc.truncated);
    for t in &tc.tables {
        assert!(
            t[1] == 1 || t[2] == 1 || t[4] == 1,
            "clone member {:?} misses all three probes",
            t
        );
    }
    // fixedpoint conversion roundtrip, designated element 1
    let d = dual_to_fixedpoint(&p).unwrap();
    assert!(is_fixedpoint_discriminator(&a, &d, 1).unwrap().is_yes());
    let top = parse_term("imp(x,x)", &a.sig).unwrap().0;
    let p2 = fixedpoint_to_dual(&d, &top).unwrap();
    assert!(is_dual_i_discriminator(&[&a], &p2).unwrap().pass());
    let q = qv("impl2");
    assert!(primitive_by_commutation(&q, &p, &b()).unwrap().is_yes());
    assert!(primitive(&q, &b()).is_yes());
    println!("criterion 04 (implication algebra discriminator and primitivity): pass");
}

#[test]
fn criterion_05_simple_de_morgan_algebras() {
    for name in ["m2", "m3", "m4"] {
        let a = alg(name);
        let lat = con_all(&a, &b()).unwrap();
        assert_eq!(lat.len(), 2, "{} must have exactly identity and full", name);
    }
    println!("criterion 05 (de Morgan simplicity): pass");
}

#[test]
fn criterion_06_structural_completeness_contrasts() {
    assert!(qv("impl2").structurally_complete(&b()).is_yes());
    assert!(qv("lattice2").structurally_complete(&b()).is_yes());
    let qk = qv("m3");
    assert!(qk.structurally_complete(&b()).is_no());
    let rule = parse_quasiequation("neg(x) = x => x = y", qk.sig()).unwrap().0;
    assert!(qk.derivable(&rule, &b()).is_no());
    match qk.admissible(&rule, &b()) {
        Verdict::Yes(AdmissibleEvidence::PremiseUnsatisfiable { .. }) => {}
        other => panic!("rule must be admissible via premise obstruction, got {:?}", other),
    }
    match primitive(&qk, &b()) {
        Verdict::No(w) => assert_eq!(w.candidate.size, 3, "witness must be the chain itself"),
        other => panic!("expected a primitivity counterexample, got {:?}", other),
    }
    // primitivity implies structural completeness, across the corpus
    // (unknown verdicts are vacuous; the 16-element lattice is gated)
    for name in names() {
        if name == "fano" {
            continue;
        }
        let q = qv(name);
        if primitive(&q, &b()).is_yes() {
            assert!(
                !q.structurally_complete(&b()).is_no(),
                "{}: primitive but not structurally complete",
                name
            );
        }
    }
    println!("criterion 06 (structural completeness contrasts): pass");
}

#[test]
fn criterion_07_cyclic_group_of_order_four() {
    let q = qv("z4");
    let rule = parse_quasiequation("add(x,x) = zero => x = zero", q.sig())
        .unwrap()
        .0;
    assert!(q.derivable(&rule, &b()).is_no());
    assert!(q.admissible(&rule, &b()).is_no());
    assert!(q.structurally_complete(&b()).is_yes());
    assert!(primitive(&q, &b()).is_yes());
    assert_eq!(q.free(1, &b()).unwrap().size(), 4);
    assert_eq!(q.free(2, &b()).unwrap().size(), 16);
    println!("criterion 07 (cyclic group of order four): pass");
}

#[test]
fn criterion_08_free_lattice_size() {
    let q = qv("lattice2");
    assert_eq!(q.free(3, &b()).unwrap().size(), 18);
    println!("criterion 08 (rank-3 free algebra over the 2-element lattice has 18 elements): pass");
}

#[test]
fn criterion_09_weak_projectivity_collapses_on_subdirectly_irreducibles() {
    for name in ["m2", "m3", "m4", "z2", "z4", "impl2", "heyting3"] {
        let q = qv(name);
        let a = alg(name);
        let p = projective(&q, &a, &b());
        let wp = weakly_projective(&q, &a, &b()).unwrap();
        let p_ans = if p.is_yes() {
            Some(true)
        } else if p.is_no() {
            Some(false)
        } else {
            None
        };
        let wp_ans = if wp.is_yes() {
            Some(true)
        } else if wp.is_no() {
            Some(false)
        } else {
            None
        };
        assert!(p_ans.is_some(), "{}: projectivity undecided", name);
        assert_eq!(p_ans, wp_ans, "{}: verdicts differ", name);
    }
    println!("criterion 09 (weakly projective = projective on subdirectly irreducibles): pass");
}

/// Deterministic pool of terms of depth <= 2 over 3 variables and a
/// fixed sample of at most two operations of the signature.
fn term_pool(a: &FiniteAlgebra) -> Vec<Term> {
    let unary = a.sig.ops.iter().position(|o| o.arity == 1);
    let nary: Vec<usize> = a
        .sig
        .ops
        .iter()
        .enumerate()
        .filter(|(_, o)| o.arity >= 2)
        .map(|(i, _)| i)
        .take(2)
        .collect();
    let vars: Vec<Term> = (0..3).map(Term::var).collect();
    let mut depth1: Vec<Term> = Vec::new();
    if let Some(op) = unary {
        for v in &vars {
            depth1.push(Term::apply(op, vec![v.clone()]));
        }
    }
    for &op in &nary {
        let k = a.sig.arity(op);
        // a few argument patterns, not the full k-fold product
        for pat in [[0usize, 1, 2], [1, 0, 0], [2, 2, 1]] {
            depth1.push(Term::apply(
                op,
                (0..k).map(|p| vars[pat[p % 3]].clone()).collect(),
            ));
        }
    }
    let mut pool = vars.clone();
    pool.extend(depth1.clone());
    // depth 2: sample op applications over depth-1 terms
    let mut seed = 0x9e3779b97f4a7c15u64;
    let mut next = move |n: usize| {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 33) as usize) % n
    };
    if !depth1.is_empty() {
        for _ in 0..12 {
            if let Some(op) = unary {
                pool.push(Term::apply(op, vec![depth1[next(depth1.len())].clone()]));
            }
            for &op in &nary {
                let k = a.sig.arity(op);
                pool.push(Term::apply(
                    op,
                    (0..k).map(|_| depth1[next(depth1.len())].clone()).collect(),
                ));
            }
        }
    }
    pool
}

#[test]
fn criterion_10_rank_bound_validation() {
    // admissibility decided at rank n* must agree with rank n*+1 on a
    // bounded corpus of rules; pairs with an unknown side are skipped
    let mut budgets = b();
    budgets.assignments = 2_000_000;
    let mut compared = 0usize;
    for name in names() {
        let a = alg(name);
        if a.size > 3 {
            continue;
        }
        let q = qv(name);
        let pool = term_pool(&a);
        let mut seed = 0x853c49e6748fea9bu64;
        let mut next = move |n: usize| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) as usize) % n
        };
        for i in 0..48 {
            let npremises = i % 3; // 0, 1 or 2 premises
            let mut premises = Vec::new();
            for _ in 0..npremises {
                premises.push((pool[next(pool.len())].clone(), pool[next(pool.len())].clone()));
            }
            let conclusion = (pool[next(pool.len())].clone(), pool[next(pool.len())].clone());
            let rule = Quasiequation::new(premises, conclusion);
            let at_star = q.admissible_at(&rule, q.n_star(), &budgets);
            let above = q.admissible_at(&rule, q.n_star() + 1, &budgets);
            let answer = |v: &Verdict<_, _>| {
                if v.is_yes() {
                    Some(true)
                } else if v.is_no() {
                    Some(false)
                } else {
                    None
                }
            };
            if let (Some(x), Some(y)) = (answer(&at_star), answer(&above)) {
                assert_eq!(x, y, "{}: rank discrepancy on rule {}", name, i);
                compared += 1;
            }
        }
    }
    assert!(compared > 50, "too few decided pairs ({})", compared);
    println!(
        "criterion 10 (admissibility rank bound, {} decided pairs, zero discrepancies): pass",
        compared
    );
}

#[test]
fn criterion_11_characteristic_quasiequations() {
    for name in ["m2", "z2", "impl2"] {
        let a = alg(name);
        let q = qv(name);
        let ch = q.characteristic_quasiequation(&a, &b()).unwrap();
        let square = product(&[&a, &a], &b()).unwrap();
        for (_, c) in subalgebras_upto_iso(&square, &b()).unwrap() {
            let refutes = matches!(holds(&c, &ch, &b()).unwrap(), HoldsOutcome::Fails(_));
            let emb = embeds(&a, &c, &b()).is_yes();
            assert_eq!(
                refutes, emb,
                "{}: refutation and embedding disagree on a {}-element subalgebra",
                name, c.size
            );
        }
    }
    println!("criterion 11 (characteristic rules refuted exactly by extensions): pass");
}

#[test]
fn criterion_12_discriminator_synthesis() {
    let s = alg("synth3");
    let p = Term::apply(0, vec![Term::var(0), Term::var(1), Term::var(2)]);
    let cert = synth_dual_i_discriminator(&[&s], &p).unwrap();
    assert_eq!(cert.n, 1);
    assert_eq!(cert.l, 2);
    assert!(cert.report.pass());
    assert_eq!(cert.report.per_algebra[0].pi, vec![0, 1, 2], "diagonal must be the identity");
    let a = alg("impl2");
    let pi = parse_term("imp(imp(imp(x,y),imp(imp(y,x),z)),z)", &a.sig)
        .unwrap()
        .0;
    let cert2 = synth_dual_i_discriminator(&[&a], &pi).unwrap();
    assert!(cert2.report.pass());
    println!("criterion 12 (discriminator synthesis, n=1 L=2): pass");
}

#[test]
fn criterion_13_heyting_chain_reduct_presentability() {
    let h = alg("heyting3");
    let q = qv("heyting3");
    let lat = con_q(&h, &q.refs(), &b()).unwrap();
    let frag_imp = CloneSpec::parse("meet(x,y); imp(x,y)", &h.sig).unwrap();
    let frag_join = CloneSpec::parse("meet(x,y); join(x,y)", &h.sig).unwrap();
    for x in 0..h.size {
        for y in 0..h.size {
            let theta = lat.principal(&[(x, y)]);
            for spec in [&frag_imp, &frag_join] {
                assert!(
                    u_presentable(&q, &h, &theta, spec, &b()).unwrap().is_yes(),
                    "principal congruence of ({x},{y}) fails"
                );
            }
        }
    }
    println!("criterion 13 (Heyting 3-chain reduct presentability): pass");
}

#[test]
fn criterion_14_filtral_congruences() {
    let m2 = alg("m2");
    let sq = product(&[&m2, &m2], &b()).unwrap();
    let sizes = [m2.size, m2.size];
    let coords: Vec<Vec<usize>> = (0..sq.size).map(|e| product_coords(e, &sizes)).collect();
    for i in 0..2 {
        let kernel: Vec<usize> = coords.iter().map(|c| c[i]).collect();
        let theta = Congruence::from_kernel(&kernel);
        assert!(
            is_filtral(2, &sq, &coords, &theta).is_yes(),
            "projection kernel {i} must be filtral"
        );
    }
    let z2 = alg("z2");
    let zsq = product(&[&z2, &z2], &b()).unwrap();
    let zc: Vec<Vec<usize>> = (0..zsq.size).map(|e| product_coords(e, &sizes)).collect();
    let sum_kernel: Vec<usize> = zc.iter().map(|c| (c[0] + c[1]) % 2).collect();
    let theta = Congruence::from_kernel(&sum_kernel);
    assert!(
        is_filtral(2, &zsq, &zc, &theta).is_no(),
        "the sum kernel must not be filtral"
    );
    println!("criterion 14 (filtral congruences on squares): pass");
}

#[test]
fn criterion_15_sixteen_element_lattice_smoke_test() {
    let f = alg("fano");
    assert_eq!(f.size, 16);
    let lat = con_all(&f, &b()).unwrap();
    assert_eq!(lat.len(), 2, "the lattice must be simple");
    // bottom and top, then any third element gives a 0-1 sublattice chain
    let meet = f.sig.ops.iter().position(|o| o.name == "meet").unwrap();
    let join = f.sig.ops.iter().position(|o| o.name == "join").unwrap();
    let bottom = (0..f.size)
        .find(|&z| (0..f.size).all(|x| f.apply(meet, &[z, x]) == z))
        .expect("a bottom element");
    let top = (0..f.size)
        .find(|&z| (0..f.size).all(|x| f.apply(join, &[z, x]) == z))
        .expect("a top element");
    let mid = (0..f.size).find(|&m| m != bottom && m != top).unwrap();
    let chain = [bottom, mid, top];
    for &x in &chain {
        for &y in &chain {
            assert!(chain.contains(&f.apply(meet, &[x, y])));
            assert!(chain.contains(&f.apply(join, &[x, y])));
        }
    }
    // anything past simplicity and subalgebra checks needs raised budgets
    println!("criterion 15 (16-element lattice loads, simple, 0-1 chain): pass");
}
