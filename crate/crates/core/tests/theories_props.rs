use std::sync::Arc;

use proptest::prelude::*;
use veq_core::theories::{
    congruent, general_cosolution_theories, interprovable, match_term, quotient_theory, unify, Axiom, Budget,
    Decision, Signature, Substitution, Term, TheoryMorphism, TheoryPresentation,
};

fn term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0usize..2).prop_map(Term::var),
        Just(Term::constant("a")),
        Just(Term::constant("b")),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("f", vec![s, t])),
        ]
    })
}

/// All terms of depth at most 1 over two variables.
fn small_terms() -> Vec<Term> {
    let leaves = vec![Term::var(0), Term::var(1), Term::constant("a"), Term::constant("b")];
    let mut out = leaves.clone();
    for s in &leaves {
        out.push(Term::app("g", vec![s.clone()]));
        for t in &leaves {
            out.push(Term::app("f", vec![s.clone(), t.clone()]));
        }
    }
    out
}

fn tuple_of(ts: Vec<Term>) -> Term {
    Term::app("tuple", ts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn mgu_unifies_is_idempotent_and_most_general(s in term(3), t in term(3)) {
        let Some(theta) = unify(&s, &t) else {
            return Ok(());
        };
        prop_assert_eq!(theta.apply(&s), theta.apply(&t));
        prop_assert_eq!(theta.apply(&theta.apply(&s)), theta.apply(&s));
        prop_assert!(theta.is_idempotent());
        let vars: Vec<usize> = s.vars().union(&t.vars()).copied().collect();
        if vars.len() > 2 {
            return Ok(());
        }
        let pool = small_terms();
        let mut assignments: Vec<Vec<Term>> = vec![vec![]];
        for _ in &vars {
            assignments = assignments
                .into_iter()
                .flat_map(|a| pool.iter().map(move |p| { let mut b = a.clone(); b.push(p.clone()); b }))
                .collect();
        }
        for values in assignments {
            let sigma = Substitution::from_pairs(vars.iter().copied().zip(values.iter().cloned()));
            if sigma.apply(&s) != sigma.apply(&t) {
                continue;
            }
            // sigma = tau . theta on the variables involved.
            let pattern = tuple_of(vars.iter().map(|&v| theta.apply(&Term::var(v))).collect());
            let target = tuple_of(vars.iter().map(|&v| sigma.apply(&Term::var(v))).collect());
            let mut tau = Substitution::new();
            prop_assert!(match_term(&pattern, &target, &mut tau), "unifier does not factor through the mgu");
        }
    }

    #[test]
    fn unify_fails_only_without_unifiers(s in term(2), t in term(2)) {
        if unify(&s, &t).is_none() {
            let vars: Vec<usize> = s.vars().union(&t.vars()).copied().collect();
            prop_assume!(vars.len() <= 2);
            for x in small_terms() {
                for y in small_terms() {
                    let sigma = Substitution::from_pairs(vars.iter().copied().zip([x.clone(), y.clone()]));
                    prop_assert_ne!(sigma.apply(&s), sigma.apply(&t));
                }
            }
        }
    }
}

fn monoid() -> Arc<TheoryPresentation> {
    let sig = Signature::new([("mul", 2), ("e", 0)]).unwrap();
    let (x, y, z) = (Term::var(0), Term::var(1), Term::var(2));
    let mul = |a: &Term, b: &Term| Term::app("mul", vec![a.clone(), b.clone()]);
    let e = Term::constant("e");
    Arc::new(
        TheoryPresentation::new(
            sig,
            vec![
                Axiom::new(mul(&mul(&x, &y), &z), mul(&x, &mul(&y, &z))),
                Axiom::new(mul(&e, &x), x.clone()),
                Axiom::new(mul(&x, &e), x.clone()),
            ],
        )
        .unwrap(),
    )
}

fn monoid_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(0usize..3).prop_map(Term::var), Just(Term::constant("e"))];
    leaf.prop_recursive(depth, 12, 2, |inner| {
        (inner.clone(), inner).prop_map(|(s, t)| Term::app("mul", vec![s, t]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn certificates_replay(s in monoid_term(2), t in monoid_term(2)) {
        let m = monoid();
        if let Decision::Provable(c) = congruent(&m, &s, &t, Budget::steps(300)).unwrap() {
            prop_assert_eq!(&c.start, &s);
            prop_assert_eq!(c.replay(&m).unwrap(), t);
        }
    }
}

#[test]
fn quotient_morphism_is_full_and_bijective_on_objects() {
    let m = monoid();
    let comm = (
        Term::app("mul", vec![Term::var(0), Term::var(1)]),
        Term::app("mul", vec![Term::var(1), Term::var(0)]),
    );
    let (q, canonical) = quotient_theory(&m, &[comm.clone()]).unwrap();
    assert!(canonical.is_bijective_on_objects());
    assert!(canonical.is_full_by_construction());
    for (i, (_, _)) in q.signature().ops().enumerate() {
        let generic = q.signature().generic_term(i);
        assert_eq!(canonical.apply(&generic), generic);
    }
    // Interprovable axiom sets give isomorphic quotients.
    let alt = (
        Term::app("mul", vec![Term::var(1), Term::var(0)]),
        Term::app("mul", vec![Term::var(0), Term::var(1)]),
    );
    let (q2, _) = quotient_theory(&m, &[alt]).unwrap();
    assert!(interprovable(&q, &q2, Budget::default()).unwrap());
}

#[test]
fn cosolution_of_theories_coequalizes() {
    let m = monoid();
    let id = TheoryMorphism::identity_on_symbols(m.clone(), m.clone()).unwrap();
    let op = TheoryMorphism::from_named(
        m.clone(),
        m.clone(),
        &[
            ("mul".into(), Term::app("mul", vec![Term::var(1), Term::var(0)])),
            ("e".into(), Term::constant("e")),
        ],
    )
    .unwrap();
    let (q, canonical) = general_cosolution_theories(&[(id.clone(), op.clone())]).unwrap();
    for (i, _) in m.signature().ops().enumerate() {
        let sigma = m.signature().generic_term(i);
        let lhs = canonical.apply(&id.apply(&sigma));
        let rhs = canonical.apply(&op.apply(&sigma));
        assert!(congruent(&q, &lhs, &rhs, Budget::default()).unwrap().is_provable());
    }
}
