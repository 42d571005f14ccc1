//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use veq::corpus;
use veq::run::RunError;
use veq::workspace::Workspace;
use veq_core::birkhoff::{
    abelianization, centralizer, find_isomorphism, hsp_member, hsp_member_with, identities_of, satisfies,
    FiniteAlgebra, FiniteGroup, HspAnswer, HspOptions, Identity,
};
use veq_core::equations::{
    act, general_solution, generated_equation, generated_variety, implies, is_solution, leq, single_equation_reduction,
    Equation, EquationSystem, FinSetCat,
};
use veq_core::finset::{equalizer, factor_through, intersect, pullback, FinFunction, FinSet, SubobjectMono};
use veq_core::inserters::{
    check_limit_creation, inserter, shift_left, shift_right, sigma_alg_as_inserter, verify_forgetful,
    verify_universal_property, Adjunction, FiniteCategory, Functor, Poset, SortedSignature,
};
use veq_core::par::Exec;
use veq_core::series::{
    is_linear_recurrence, recurrence_equivalence_check, recurrence_family, wronskian_monotonicity_check,
    TruncatedSeries, ZeroTest,
};
use veq_core::theories::{
    congruent, factor_through_quotient, general_cosolution_theories, interprovable, match_term, quotient_theory,
    unify, Budget, Decision, Signature, Substitution, Term, TheoryMorphism,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("equation calculus on random finite-set systems", equation_calculus),
        ("centralizers and abelianizations of the bundled groups", groups),
        ("syntactic unification", unification),
        ("quotient theories", quotient_theories),
        ("identities and HSP membership", hsp),
        ("inserters, shifts and limit creation", inserters),
        ("signature algebras as an inserter", sigma_algebras),
        ("linear recurrences via Wronskians", series),
        ("command-line interface", cli),
    ];
    let mut failures = 0;
    let start = Instant::now();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} {name}: FAIL ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn load(family: &str) -> Workspace {
    Workspace::parse_all(corpus::family(family).expect("bundled family")).expect("bundled corpus loads")
}

// ---------------------------------------------------------------------------
// 1

type System = EquationSystem<Arc<FinSet>, FinFunction>;

fn set(n: usize) -> Arc<FinSet> {
    Arc::new(FinSet::range(n))
}

fn random_function(r: &mut ChaCha8Rng, dom: usize, cod: usize) -> FinFunction {
    FinFunction::new(set(dom), set(cod), (0..dom).map(|_| r.gen_range(0..cod)).collect()).unwrap()
}

fn random_system(r: &mut ChaCha8Rng, a: usize) -> System {
    let count = r.gen_range(1..=3);
    let eqs = (0..count)
        .map(|_| {
            let b = r.gen_range(1..=5);
            Equation::new(random_function(r, a, b), random_function(r, a, b))
        })
        .collect();
    EquationSystem::new(&FinSetCat, eqs).unwrap()
}

fn solves_at(e: &System, x: usize) -> bool {
    e.equations().iter().all(|q| q.lhs.apply(x) == q.rhs.apply(x))
}

fn mask(e: &System) -> Vec<bool> {
    (0..e.domain().len()).map(|x| solves_at(e, x)).collect()
}

fn equation_calculus() -> Check {
    let mut r = rng(1);
    let probes: Vec<Arc<FinSet>> = (0..=2).map(set).collect();
    let systems = 240;
    let mut factorizations = 0usize;
    for case in 0..systems {
        let a = r.gen_range(1..=5);
        let e = random_system(&mut r, a);
        let k = random_system(&mut r, a);
        let v = general_solution(&FinSetCat, &e).map_err(|x| x.to_string())?;
        let w = general_solution(&FinSetCat, &k).map_err(|x| x.to_string())?;

        ensure!(v.is_injective() && v.image_mask() == mask(&e), "case {case}: general solution differs from the filter");

        // Every solution out of a small probe factors through v exactly once.
        for x in &probes {
            for sol in FinFunction::enumerate(x, e.domain()) {
                let solves = is_solution(&FinSetCat, &sol, &e).unwrap();
                let mediators = FinFunction::enumerate(x, v.dom())
                    .iter()
                    .filter(|h| v.compose(h).unwrap() == sol)
                    .count();
                ensure!(mediators == usize::from(solves), "case {case}: factorization count {mediators}");
                factorizations += 1;
            }
        }

        // Implication is the order of general solutions and the subset relation.
        let holds = implies(&FinSetCat, &e, &k).unwrap();
        let oracle = (0..a).all(|x| !solves_at(&e, x) || solves_at(&k, x));
        ensure!(holds == oracle, "case {case}: implies disagrees with enumeration");
        ensure!(holds == leq(&FinSetCat, &v, &w).unwrap().is_some(), "case {case}: implies disagrees with v <= w");

        // Action by g: a solves Eg iff g a solves E; E => K gives Eg => Kg.
        let b = r.gen_range(0..=4);
        let g = random_function(&mut r, b, a);
        let eg = act(&FinSetCat, &e, &g).unwrap();
        let kg = act(&FinSetCat, &k, &g).unwrap();
        for x in &probes {
            for sol in FinFunction::enumerate(x, g.dom()) {
                let ga = g.compose(&sol).unwrap();
                ensure!(
                    is_solution(&FinSetCat, &sol, &eg).unwrap() == is_solution(&FinSetCat, &ga, &e).unwrap(),
                    "case {case}: action does not commute with solutions"
                );
            }
        }
        if holds {
            ensure!(implies(&FinSetCat, &eg, &kg).unwrap(), "case {case}: implication not preserved by action");
        }

        // Pullback stability.
        let sq = pullback(&g, &v).unwrap();
        let direct = general_solution(&FinSetCat, &eg).unwrap();
        ensure!(
            sq.left.is_injective() && sq.left.image_mask() == direct.image_mask(),
            "case {case}: pullback of the general solution is not the general solution of Eg"
        );

        // Left factor of a variety through a mono is a variety.
        let extra: Vec<bool> = (0..a).map(|_| r.gen_bool(0.5)).collect();
        let b_mask: Vec<bool> = v.image_mask().iter().zip(&extra).map(|(s, x)| *s || *x).collect();
        let incl = SubobjectMono::from_mask(e.domain().clone(), &b_mask).into_inclusion();
        let w_factor = factor_through(&v, &incl).unwrap().ok_or("general solution escapes its superset")?;
        let ev = act(&FinSetCat, &e, &incl).unwrap();
        ensure!(
            general_solution(&FinSetCat, &ev).unwrap().image_mask() == w_factor.image_mask(),
            "case {case}: left factor is not the general solution of Ev"
        );

        // General solution is the intersection of equalizers.
        let eqs: Vec<SubobjectMono> = e.equations().iter().map(|q| equalizer(&q.lhs, &q.rhs).unwrap()).collect();
        ensure!(intersect(&eqs).unwrap().mask() == v.image_mask(), "case {case}: not the intersection of equalizers");

        // A single equation with the same solutions.
        let single = single_equation_reduction(&FinSetCat, &e).unwrap();
        let single = EquationSystem::new(&FinSetCat, vec![single]).unwrap();
        ensure!(mask(&single) == mask(&e), "case {case}: single-equation reduction changes solutions");

        // Generated equation and variety of a family of maps into A.
        let members = r.gen_range(1..=3);
        let family: Vec<FinFunction> = (0..members)
            .map(|_| {
                let d = r.gen_range(0..=2);
                random_function(&mut r, d, a)
            })
            .collect();
        let gen_eq = generated_equation(&FinSetCat, &family).unwrap();
        let gen = EquationSystem::new(&FinSetCat, vec![gen_eq]).unwrap();
        for f in &family {
            ensure!(is_solution(&FinSetCat, f, &gen).unwrap(), "case {case}: family does not solve its equation");
        }
        for y in [set(1), set(2)] {
            let maps = FinFunction::enumerate(e.domain(), &y);
            for p in &maps {
                for q in &maps {
                    let kq = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), q.clone())]).unwrap();
                    if family.iter().all(|f| is_solution(&FinSetCat, f, &kq).unwrap()) {
                        ensure!(implies(&FinSetCat, &gen, &kq).unwrap(), "case {case}: generated equation is not strongest");
                    }
                }
            }
        }
        let mut oracle = vec![true; a];
        for bits in 0u32..(1 << a) {
            let sub: Vec<bool> = (0..a).map(|i| bits >> i & 1 == 1).collect();
            if family.iter().all(|f| (0..f.dom().len()).all(|x| sub[f.apply(x)])) {
                oracle.iter_mut().zip(&sub).for_each(|(o, s)| *o &= *s);
            }
        }
        let gv = generated_variety(&FinSetCat, &family).unwrap();
        ensure!(gv.image_mask() == oracle, "case {case}: generated variety differs from the subset intersection");
    }
    Ok(format!("{systems} systems, {factorizations} factorizations checked"))
}

// ---------------------------------------------------------------------------
// 2

fn commutator_subgroup_brute(g: &FiniteGroup) -> Vec<bool> {
    let n = g.order();
    let mut inside = vec![false; n];
    inside[g.unit()] = true;
    for a in 0..n {
        for b in 0..n {
            let c = g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b)));
            inside[c] = true;
        }
    }
    loop {
        let members: Vec<usize> = (0..n).filter(|&x| inside[x]).collect();
        let mut grew = false;
        for &a in &members {
            for &b in &members {
                let c = g.mul(a, b);
                if !inside[c] {
                    inside[c] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            return inside;
        }
    }
}

fn groups() -> Check {
    let ws = load("groups");
    ensure!(ws.groups.len() == 14, "expected 14 groups, found {}", ws.groups.len());
    let mut elements = 0;
    for (name, entry) in &ws.groups {
        let g = &entry.value;
        let n = g.order();
        ensure!(n <= 16, "{name} has order {n}");
        for x in 0..n {
            let got = centralizer(g, &[x]).map_err(|e| e.to_string())?.mask();
            let want: Vec<bool> = (0..n).map(|y| g.mul(x, y) == g.mul(y, x)).collect();
            ensure!(got == want, "{name}: centralizer of {} differs", g.carrier().label(x));
            elements += 1;
        }
        let all: Vec<usize> = (0..n).collect();
        let center = centralizer(g, &all).map_err(|e| e.to_string())?.mask();
        let want: Vec<bool> = (0..n).map(|y| all.iter().all(|&x| g.mul(x, y) == g.mul(y, x))).collect();
        ensure!(center == want, "{name}: center differs");

        let ab = abelianization(g).map_err(|e| e.to_string())?;
        let comm = commutator_subgroup_brute(g);
        let comm_size = comm.iter().filter(|&&c| c).count();
        ensure!(ab.is_surjective(), "{name}: abelianization is not onto");
        ensure!(ab.target().size() * comm_size == n, "{name}: quotient has the wrong order");
        for a in 0..n {
            for b in 0..n {
                let same_coset = comm[g.mul(a, g.inv(b))];
                ensure!((ab.apply(a) == ab.apply(b)) == same_coset, "{name}: fibers are not commutator cosets");
            }
        }
    }
    let iso = |g: &str, h: &str| -> Result<bool, String> {
        let ab = abelianization(&ws.groups[g].value).map_err(|e| e.to_string())?;
        let target = ws.groups[h].value.algebra().clone();
        Ok(find_isomorphism(ab.target(), &target).map_err(|e| e.to_string())?.is_some())
    };
    ensure!(iso("S3", "Z2")?, "S3 does not abelianize to Z2");
    ensure!(iso("Q8", "V4")?, "Q8 does not abelianize to Z2 x Z2");
    ensure!(!iso("Q8", "Z4")?, "Q8 abelianization is cyclic");
    Ok(format!("14 groups, {elements} centralizers"))
}

// ---------------------------------------------------------------------------
// 3

fn random_term(r: &mut ChaCha8Rng, depth: u32, vars: usize) -> Term {
    if depth == 0 || r.gen_ratio(1, 3) {
        return match r.gen_range(0..vars + 2) {
            0 => Term::constant("a"),
            1 => Term::constant("b"),
            v => Term::var(v - 2),
        };
    }
    if r.gen_bool(0.4) {
        Term::app("g", vec![random_term(r, depth - 1, vars)])
    } else {
        Term::app("f", vec![random_term(r, depth - 1, vars), random_term(r, depth - 1, vars)])
    }
}

/// Every term of depth at most 1 over the variables 0 and 1 and the
/// constants a and b.
fn depth_one_terms() -> Vec<Term> {
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

fn unification() -> Check {
    let (x, y) = (Term::var(0), Term::var(1));
    let (a, b) = (Term::constant("a"), Term::constant("b"));
    let s = Term::app("f", vec![x.clone(), b.clone()]);
    let t = Term::app("f", vec![a.clone(), y.clone()]);
    let mgu = unify(&s, &t).ok_or("f(x,b) and f(a,y) do not unify")?;
    ensure!(mgu == Substitution::from_pairs([(0, a), (1, b)]), "unexpected mgu");

    let mut r = rng(3);
    let pool = depth_one_terms();
    let (mut unifiable, mut idempotent, mut general, mut refuted) = (0, 0, 0, 0);
    for case in 0..600 {
        let s = random_term(&mut r, 2, 2);
        let t = random_term(&mut r, 2, 2);
        let vars: Vec<usize> = s.vars().union(&t.vars()).copied().collect();
        let theta = unify(&s, &t);
        if let Some(theta) = &theta {
            unifiable += 1;
            ensure!(theta.apply(&s) == theta.apply(&t), "case {case}: mgu does not unify");
            let all_vars: BTreeSet<usize> = vars.iter().copied().chain(theta.iter().map(|(v, _)| v)).collect();
            let twice = all_vars.iter().all(|&v| {
                let once = theta.apply(&Term::var(v));
                theta.apply(&once) == once
            });
            ensure!(twice && theta.is_idempotent(), "case {case}: mgu is not idempotent");
            idempotent += 1;
        }
        // Enumerate every substitution with images of depth <= 1; the
        // unified instances then have depth <= 3.
        for u in &pool {
            for v in &pool {
                let sigma = Substitution::from_pairs(vars.iter().copied().zip([u.clone(), v.clone()]));
                if sigma.apply(&s) != sigma.apply(&t) {
                    continue;
                }
                let Some(theta) = &theta else {
                    return Err(format!("case {case}: unify failed but a unifier exists"));
                };
                let pattern = Term::app("tuple", vars.iter().map(|&w| theta.apply(&Term::var(w))).collect());
                let target = Term::app("tuple", vars.iter().map(|&w| sigma.apply(&Term::var(w))).collect());
                ensure!(match_term(&pattern, &target, &mut Substitution::new()), "case {case}: unifier not an instance");
                general += 1;
            }
        }
        if theta.is_none() {
            refuted += 1;
        }
    }
    Ok(format!(
        "{unifiable} unifiable ({idempotent} idempotent), {general} enumerated unifiers factor, {refuted} refuted"
    ))
}

// ---------------------------------------------------------------------------
// 4

fn mul(a: Term, b: Term) -> Term {
    Term::app("mul", vec![a, b])
}

fn quotient_theories() -> Check {
    let ws = load("theories");
    let mon = ws.theories["Mon"].value.clone();
    let (x, y, z) = (Term::var(0), Term::var(1), Term::var(2));
    let e = Term::constant("e");
    let comm = (mul(x.clone(), y.clone()), mul(y.clone(), x.clone()));
    let (q, canonical) = quotient_theory(&mon, &[comm.clone()]).map_err(|e| e.to_string())?;

    let consequences = [
        (mul(mul(x.clone(), y.clone()), z.clone()), mul(y.clone(), mul(x.clone(), z.clone()))),
        (mul(x.clone(), mul(y.clone(), z.clone())), mul(y.clone(), mul(x.clone(), z.clone()))),
        (mul(mul(x.clone(), y.clone()), z.clone()), mul(mul(x.clone(), z.clone()), y.clone())),
        (mul(e.clone(), mul(x.clone(), y.clone())), mul(y.clone(), x.clone())),
        (mul(mul(x.clone(), y.clone()), e.clone()), mul(y.clone(), x.clone())),
        (mul(x.clone(), mul(y.clone(), z.clone())), mul(z.clone(), mul(y.clone(), x.clone()))),
        (mul(mul(z.clone(), y.clone()), x.clone()), mul(x.clone(), mul(y.clone(), z.clone()))),
        (mul(x.clone(), mul(y.clone(), x.clone())), mul(mul(x.clone(), x.clone()), y.clone())),
        (
            mul(mul(x.clone(), y.clone()), mul(x.clone(), y.clone())),
            mul(mul(x.clone(), x.clone()), mul(y.clone(), y.clone())),
        ),
        (mul(mul(x.clone(), e.clone()), mul(e.clone(), y.clone())), mul(y.clone(), x.clone())),
    ];
    let mut steps = 0;
    for (i, (l, r)) in consequences.iter().enumerate() {
        match congruent(&q, l, r, Budget::steps(10_000)).map_err(|e| e.to_string())? {
            Decision::Provable(cert) => {
                ensure!(cert.replay(&q).map_err(|e| e.to_string())? == *r, "consequence {i}: certificate does not replay");
                steps += cert.steps.len();
            }
            other => return Err(format!("consequence {i} not proved: {other:?}")),
        }
    }
    ensure!(
        !congruent(&mon, &comm.0, &comm.1, Budget::steps(2_000)).unwrap().is_provable(),
        "commutativity proved in plain monoids"
    );
    ensure!(
        canonical.is_bijective_on_objects() && canonical.is_full_by_construction(),
        "canonical morphism is not full and bijective on objects"
    );
    for (i, _) in mon.signature().ops().enumerate() {
        let generic = mon.signature().generic_term(i);
        ensure!(canonical.apply(&generic) == generic, "canonical morphism moves a symbol");
    }

    // Interprovable axiom sets present isomorphic quotients.
    let alternatives = [
        vec![comm.clone()],
        vec![(mul(y.clone(), x.clone()), mul(x.clone(), y.clone()))],
        vec![(mul(mul(x.clone(), y.clone()), z.clone()), mul(mul(y.clone(), x.clone()), z.clone()))],
        vec![(mul(x.clone(), mul(y.clone(), z.clone())), mul(x.clone(), mul(z.clone(), y.clone())))],
    ];
    let quotients = alternatives
        .iter()
        .map(|extra| quotient_theory(&mon, extra))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let budget = Budget::steps(10_000);
    for (i, (qi, mi)) in quotients.iter().enumerate() {
        for (j, (qj, mj)) in quotients.iter().enumerate() {
            ensure!(interprovable(qi, qj, budget).unwrap(), "quotients {i} and {j} are not interprovable");
            let there = factor_through_quotient(mi, mj, budget).unwrap().ok_or("no mediator")?;
            let back = factor_through_quotient(mj, mi, budget).unwrap().ok_or("no mediator back")?;
            let round = back.compose(&there).map_err(|e| e.to_string())?;
            ensure!(
                round.provably_equal(&TheoryMorphism::identity_on_symbols(qi.clone(), qi.clone()).unwrap(), budget).unwrap(),
                "mediators {i} -> {j} are not mutually inverse"
            );
        }
    }
    ensure!(!interprovable(&mon, &q, Budget::steps(2_000)).unwrap(), "monoids and commutative monoids interprovable");

    // The cosolution of the identity and the opposite multiplication is the
    // commutative quotient.
    let id = ws.thmors["Id"].value.morphism.clone();
    let op = ws.thmors["Op"].value.morphism.clone();
    let (co, _) = general_cosolution_theories(&[(id, op)]).map_err(|e| e.to_string())?;
    ensure!(interprovable(&co, &q, budget).unwrap(), "cosolution of (Id, Op) is not the commutative quotient");
    Ok(format!("10 consequences in {steps} steps, {} interprovable presentations", quotients.len()))
}

// ---------------------------------------------------------------------------
// 5

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One table per isomorphism class of binary operations on `n` elements:
/// the lexicographically least relabelling.
fn magma_classes(n: usize) -> Vec<Vec<usize>> {
    let cells = n * n;
    let perms = permutations(n);
    let mut out = Vec::new();
    for code in 0..n.pow(cells as u32) {
        let t: Vec<usize> = (0..cells).map(|i| code / n.pow((cells - 1 - i) as u32) % n).collect();
        let least = perms
            .iter()
            .map(|p| {
                let mut u = vec![0; cells];
                for a in 0..n {
                    for b in 0..n {
                        u[p[a] * n + p[b]] = p[t[a * n + b]];
                    }
                }
                u
            })
            .min()
            .expect("at least one permutation");
        if least == t {
            out.push(t);
        }
    }
    out
}

fn hsp() -> Check {
    let ws = load("algebras");
    let alg = |n: &str| ws.algebras[n].value.clone();
    let meet = alg("Meet");
    let (x, y) = (Term::var(0), Term::var(1));
    let ids = identities_of(&meet, 2, 2).map_err(|e| e.to_string())?;
    for want in [
        Identity::new(mul(x.clone(), y.clone()), mul(y.clone(), x.clone())),
        Identity::new(mul(x.clone(), x.clone()), x.clone()),
    ] {
        ensure!(ids.iter().any(|id| id.same_up_to_symmetry(&want)), "meet identities miss {want:?}");
    }
    for id in &ids {
        ensure!(satisfies(&meet, id).unwrap(), "meet fails its own identity {id:?}");
    }

    match hsp_member(&alg("Chain3"), &meet, 2).map_err(|e| e.to_string())? {
        HspAnswer::Yes(w) => {
            ensure!(w.k <= 2, "witness uses k = {}", w.k);
            let iso = w.replay(&meet, &alg("Chain3")).map_err(|e| e.to_string())?;
            ensure!(iso.is_bijective(), "replayed witness is not an isomorphism");
        }
        other => return Err(format!("3-chain rejected: {other:?}")),
    }
    for name in ["Xor", "Nand"] {
        let b = alg(name);
        match hsp_member(&b, &meet, 2).map_err(|e| e.to_string())? {
            HspAnswer::NoWithinBounds {
                violated: Some((id, env)),
                ..
            } => {
                ensure!(satisfies(&meet, &id).unwrap(), "{name}: certificate is not an identity of the meet");
                let (l, r) = (b.eval(&id.lhs, &env).unwrap(), b.eval(&id.rhs, &env).unwrap());
                ensure!(l != r, "{name}: certificate assignment does not violate the identity");
            }
            other => return Err(format!("{name} not rejected with a certificate: {other:?}")),
        }
    }

    // Identity transport over magmas of size <= 3 up to isomorphism.
    let sig = Signature::new([("mul", 2)]).unwrap();
    let mut algebras: Vec<Arc<FiniteAlgebra>> = Vec::new();
    for n in 1..=3 {
        for t in magma_classes(n) {
            algebras.push(Arc::new(FiniteAlgebra::new(sig.clone(), set(n), vec![t]).unwrap()));
        }
    }
    ensure!(algebras.len() == 1 + 10 + 3330, "found {} magma classes", algebras.len());
    let identities: Vec<Vec<Identity>> =
        algebras.iter().map(|a| identities_of(a, 2, 2)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let small: Vec<usize> = (0..algebras.len()).filter(|&i| algebras[i].size() <= 2).collect();
    let large: Vec<usize> = (0..algebras.len()).filter(|&i| algebras[i].size() == 3).collect();
    let violates = |b: usize, a: usize| identities[a].iter().any(|id| !satisfies(&algebras[b], id).unwrap());
    let quiet = |k_max| HspOptions {
        k_max,
        identity_vars: 0,
        identity_depth: 0,
    };
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for a in 0..algebras.len() {
        for &b in &small {
            pairs.push((b, a, 2));
            if algebras[a].size() == 3 {
                pairs.push((a, b, 2));
            }
        }
    }
    let mut r = rng(5);
    let sampled = 20_000;
    for _ in 0..sampled {
        pairs.push((large[r.gen_range(0..large.len())], large[r.gen_range(0..large.len())], 1));
    }
    let (mut members, mut rejected) = (0, 0);
    for &(b, a, k) in &pairs {
        let bad = violates(b, a);
        let witness_needed = !bad && algebras[b].size() <= 2 && algebras[a].size() <= 2;
        if !bad && !witness_needed {
            continue;
        }
        match hsp_member_with(&algebras[b], &algebras[a], quiet(k), Exec::default()).map_err(|e| e.to_string())? {
            HspAnswer::Yes(w) => {
                ensure!(!bad, "member of HSP fails an identity: B={:?} A={:?}", algebras[b], algebras[a]);
                w.replay(&algebras[a], &algebras[b]).map_err(|e| format!("witness does not replay: {e}"))?;
                members += 1;
            }
            HspAnswer::NoWithinBounds { .. } => rejected += 1,
        }
    }
    Ok(format!(
        "{} classes, {} pairs ({sampled} sampled among size 3), {members} replayed witnesses, {rejected} rejections",
        algebras.len(),
        pairs.len()
    ))
}

// ---------------------------------------------------------------------------
// 6

fn random_poset(r: &mut ChaCha8Rng, n: usize) -> Arc<FiniteCategory> {
    let mut relations = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(0.4) {
                relations.push((a, b));
            }
        }
    }
    let p = Poset::new(set(n), &relations).unwrap();
    Arc::new(FiniteCategory::from_poset(&p))
}

fn leq_in(cat: &FiniteCategory, a: usize, b: usize) -> bool {
    !cat.hom(a, b).is_empty()
}

fn random_monotone(r: &mut ChaCha8Rng, src: &Arc<FiniteCategory>, tgt: &Arc<FiniteCategory>) -> Functor {
    loop {
        let map: Vec<usize> = (0..src.object_count()).map(|_| r.gen_range(0..tgt.object_count())).collect();
        if let Ok(f) = Functor::from_object_map(src.clone(), tgt.clone(), map) {
            return f;
        }
    }
}

/// A Galois connection `L ⊣ R` with `R` random and `L(p)` the least `q`
/// with `p <= R q`, when every such least element exists.
fn random_galois(r: &mut ChaCha8Rng) -> Option<Adjunction> {
    let (m, n) = (r.gen_range(1..=4), r.gen_range(1..=4));
    let x = random_poset(r, m);
    let y = random_poset(r, n);
    let right = random_monotone(r, &y, &x);
    let mut left_map = Vec::new();
    for p in 0..x.object_count() {
        let above: Vec<usize> = (0..y.object_count()).filter(|&q| leq_in(&x, p, right.object(q))).collect();
        let least = above.iter().copied().find(|&q| above.iter().all(|&o| leq_in(&y, q, o)))?;
        left_map.push(least);
    }
    let left = Functor::from_object_map(x, y, left_map).ok()?;
    Adjunction::thin(left, right).ok()
}

fn inserter_checks(f: &Functor, g: &Functor, label: &str, limits: &mut usize) -> Result<(), String> {
    let ins = inserter(f, g).map_err(|e| format!("{label}: {e}"))?;
    let report = verify_forgetful(&ins.forgetful);
    ensure!(report.all(), "{label}: forgetful functor fails {report:?}");
    let lim = check_limit_creation(&ins);
    ensure!(lim.passes(), "{label}: limits not created {lim:?}");
    if lim.hypotheses_hold {
        *limits += 1;
    }
    Ok(())
}

fn inserters() -> Check {
    let ws = load("inserters");
    let mut instances = 0;
    let mut limits = 0;
    let functors: Vec<(&String, &Functor)> = ws.functors.iter().map(|(n, e)| (n, &e.value.functor)).collect();
    for (nf, f) in &functors {
        for (ng, g) in &functors {
            if f.is_parallel(g) {
                inserter_checks(f, g, &format!("Ins({nf}, {ng})"), &mut limits)?;
                let ins = inserter(f, g).unwrap();
                for x in [FiniteCategory::terminal(), FiniteCategory::arrow_category()] {
                    let cones = verify_universal_property(&ins, &Arc::new(x)).map_err(|e| e.to_string())?;
                    ensure!(cones.holds(), "Ins({nf}, {ng}): universal property fails {cones:?}");
                }
                instances += 1;
            }
        }
    }
    for (name, entry) in &ws.adjunctions {
        let adj = &entry.value.adjunction;
        let (l, rr) = (adj.left(), adj.right());
        for (nf, f) in &functors {
            if f.is_parallel(rr) {
                let s = shift_left(f, rr, adj).map_err(|e| e.to_string())?;
                ensure!(s.round_trip_is_identity() && s.is_concrete(), "left shift of {nf} along {name}");
            }
            if f.is_parallel(l) {
                let s = shift_right(l, f, adj).map_err(|e| e.to_string())?;
                ensure!(s.round_trip_is_identity() && s.is_concrete(), "right shift of {nf} along {name}");
            }
        }
    }

    let mut r = rng(6);
    let (mut galois, mut attempts) = (0, 0);
    while galois < 60 {
        attempts += 1;
        ensure!(attempts < 10_000, "could not build Galois connections");
        let Some(adj) = random_galois(&mut r) else { continue };
        galois += 1;
        let (l, rr) = (adj.left(), adj.right());
        let f = random_monotone(&mut r, rr.source(), rr.target());
        let s = shift_left(&f, rr, &adj).map_err(|e| e.to_string())?;
        ensure!(s.round_trip_is_identity(), "Galois instance {galois}: left shift is not invertible");
        ensure!(s.is_concrete(), "Galois instance {galois}: left shift is not concrete");
        inserter_checks(&f, rr, "random left", &mut limits)?;
        let g = random_monotone(&mut r, l.source(), l.target());
        let s = shift_right(l, &g, &adj).map_err(|e| e.to_string())?;
        ensure!(s.round_trip_is_identity(), "Galois instance {galois}: right shift is not invertible");
        ensure!(s.is_concrete(), "Galois instance {galois}: right shift is not concrete");
        inserter_checks(l, &g, "random right", &mut limits)?;
        instances += 2;
    }
    Ok(format!(
        "{instances} inserters, {galois} Galois connections, limit hypotheses held in {limits}"
    ))
}

// ---------------------------------------------------------------------------
// 7

fn algebras_of(arities: &[usize], n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for &k in arities {
        let cells = n.pow(k as u32);
        let tables: Vec<Vec<usize>> = (0..n.pow(cells as u32))
            .map(|code| (0..cells).map(|i| code / n.pow((cells - 1 - i) as u32) % n).collect())
            .collect();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                tables.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn is_hom(arities: &[usize], a: &[Vec<usize>], an: usize, b: &[Vec<usize>], bn: usize, h: &[usize]) -> bool {
    arities.iter().enumerate().all(|(op, &k)| {
        (0..an.pow(k as u32)).all(|code| {
            let args: Vec<usize> = (0..k).map(|i| code / an.pow((k - 1 - i) as u32) % an).collect();
            let image_code = args.iter().fold(0, |acc, &x| acc * bn + h[x]);
            h[a[op][code]] == b[op][image_code]
        })
    })
}

fn sigma_algebras() -> Check {
    let candidates: [&[(&str, usize)]; 10] = [
        &[],
        &[("c", 0)],
        &[("u", 1)],
        &[("mul", 2)],
        &[("c", 0), ("u", 1)],
        &[("c", 0), ("mul", 2)],
        &[("u", 1), ("mul", 2)],
        &[("c", 0), ("u", 1), ("mul", 2)],
        &[("c", 0), ("d", 0)],
        &[("u", 1), ("v", 1)],
    ];
    let bound = 2;
    let mut total_objects = 0;
    for ops in candidates {
        let sig = Signature::new(ops.iter().copied()).map_err(|e| e.to_string())?;
        let report = sigma_alg_as_inserter(&SortedSignature::one_sorted(&sig), bound).map_err(|e| e.to_string())?;
        let arities: Vec<usize> = ops.iter().map(|(_, k)| *k).collect();
        let algebras: Vec<(usize, Vec<Vec<usize>>)> =
            (0..=bound).flat_map(|n| algebras_of(&arities, n).into_iter().map(move |a| (n, a))).collect();
        let mut homs = 0;
        for (an, a) in &algebras {
            for (bn, b) in &algebras {
                let maps = if *an == 0 { 1 } else { bn.pow(*an as u32) };
                for code in 0..maps {
                    let h: Vec<usize> = (0..*an).map(|i| code / bn.pow((an - 1 - i) as u32) % bn).collect();
                    if is_hom(&arities, a, *an, b, *bn, &h) {
                        homs += 1;
                    }
                }
            }
        }
        ensure!(report.isomorphic, "{ops:?}: comparison functor is not an isomorphism");
        ensure!(
            report.direct_objects == algebras.len() && report.inserter_objects == algebras.len(),
            "{ops:?}: {} / {} objects, expected {}",
            report.direct_objects,
            report.inserter_objects,
            algebras.len()
        );
        ensure!(
            report.direct_arrows == homs && report.inserter_arrows == homs,
            "{ops:?}: {} / {} arrows, expected {homs}",
            report.direct_arrows,
            report.inserter_arrows
        );
        total_objects += algebras.len();
    }
    Ok(format!("{} signatures, {total_objects} algebras", candidates.len()))
}

// ---------------------------------------------------------------------------
// 8

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Does some non-zero `a` satisfy `Σ a_j f_{k+j} = 0` for every `k` with
/// `k + n` inside the known coefficients? Decided by the rank of the
/// Hankel-shaped system.
fn hankel_oracle(f: &TruncatedSeries, n: usize) -> bool {
    let p = f.precision();
    let mut rows: Vec<Vec<BigRational>> = (0..p - n).map(|k| (0..=n).map(|j| f.coeff(k + j).clone()).collect()).collect();
    let mut rank = 0;
    for col in 0..=n {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, pivot);
        let lead = rows[rank][col].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][col].is_zero() {
                let factor = &rows[i][col] / &lead;
                for c in col..=n {
                    let delta = &factor * &rows[rank][c];
                    rows[i][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank < n + 1
}

fn series() -> Check {
    let ws = load("series");
    let fib = ws.series["fib"].value.series.clone();
    ensure!(fib.precision() == 64, "fib has precision {}", fib.precision());
    let test = |f: &TruncatedSeries, n| is_linear_recurrence(f, n).map_err(|e| e.to_string());
    ensure!(test(&fib, 2)?.is_zero(), "fib order 2 not zero");
    ensure!(matches!(test(&fib, 1)?, ZeroTest::Nonzero(_)), "fib order 1 not nonzero");
    let pow2sq = ws.series["pow2sq"].value.series.clone();
    ensure!(pow2sq.precision() == 32, "pow2sq has precision {}", pow2sq.precision());
    for n in [1, 2] {
        ensure!(matches!(test(&pow2sq, n)?, ZeroTest::Nonzero(_)), "pow2sq order {n} not nonzero");
    }

    // Both sides of the equivalence, on random pairs.
    let mut r = rng(8);
    let mut holding = 0;
    for case in 0..100 {
        let n = r.gen_range(1..=4);
        let mut a: Vec<BigRational> = (0..=n).map(|_| q(r.gen_range(-3..=3))).collect();
        if a[n].is_zero() {
            a[n] = q(1);
        }
        let prec = r.gen_range(n + 2..=24);
        let mut coeffs: Vec<BigRational> = (0..prec.min(n)).map(|_| q(r.gen_range(-5..=5))).collect();
        let satisfying = case % 2 == 0;
        while coeffs.len() < prec {
            let k = coeffs.len() - n;
            let next = if satisfying {
                -(0..n).fold(BigRational::zero(), |acc, j| acc + &a[j] * &coeffs[k + j]) / &a[n]
            } else {
                q(r.gen_range(-5..=5))
            };
            coeffs.push(next);
        }
        let f = TruncatedSeries::new(coeffs.clone()).map_err(|e| e.to_string())?;
        let outcome = recurrence_equivalence_check(&f, &a).map_err(|e| format!("case {case}: {e}"))?;
        let direct = (0..prec - n).all(|k| (0..=n).fold(BigRational::zero(), |acc, j| acc + &a[j] * &coeffs[k + j]).is_zero());
        ensure!(outcome.holds == direct, "case {case}: holds = {} but direct = {direct}", outcome.holds);
        ensure!(!satisfying || outcome.holds, "case {case}: constructed solution rejected");
        holding += usize::from(outcome.holds);
    }

    // Monotonicity and the linear-algebra oracle on the corpus.
    let mut comparisons = 0;
    for (name, entry) in &ws.series {
        let f = &entry.value.series;
        for n in 1..=4 {
            if f.precision() < 2 * n + 2 {
                continue;
            }
            let report = wronskian_monotonicity_check(&recurrence_family(n), f).map_err(|e| e.to_string())?;
            ensure!(!report.flagged, "{name}: monotonicity flagged at order {n}");
            let got = test(f, n)?.is_zero();
            let want = hankel_oracle(f, n);
            ensure!(got == want, "{name}: order {n} Wronskian says {got}, linear algebra says {want}");
            comparisons += 1;
        }
    }
    let fib128 = ws.series["fib"].value.at_precision(128).map_err(|e| e.to_string())?;
    ensure!(test(&fib128, 2)?.is_zero(), "fib at higher precision flips to nonzero");
    ensure!(
        BigRational::one() == *fib.coeff(1) && fib128.coeff(63) == fib.coeff(63),
        "fib changes when re-expanded"
    );
    Ok(format!("100 equivalence pairs ({holding} holding), {comparisons} oracle comparisons"))
}

// ---------------------------------------------------------------------------
// 9

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn veq(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_veq")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn cli() -> Check {
    let dir = golden_dir();
    let manifest = std::fs::read_to_string(dir.join("commands.txt")).map_err(|e| e.to_string())?;
    let commands: Vec<Vec<&str>> = manifest
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split(' ').collect())
        .collect();
    let mut actual = String::new();
    let mut codes: HashMap<i32, usize> = HashMap::new();
    for cmd in &commands {
        let mut args = cmd.clone();
        args.extend(["--json", "--corpus", "all"]);
        let (code, out) = veq(&args);
        let record: serde_json::Value = serde_json::from_str(out.trim_end()).map_err(|e| format!("{cmd:?}: {e}"))?;
        let expected_code = match record["status"].as_str() {
            Some("ok") => 0,
            Some("negative") => 1,
            Some("error") => record["payload"]["exit"].as_i64().unwrap_or(-1) as i32,
            other => return Err(format!("{cmd:?}: bad status {other:?}")),
        };
        ensure!(code == expected_code, "{cmd:?}: exit {code}, record says {expected_code}");
        *codes.entry(code).or_default() += 1;
        args.push("--sequential");
        ensure!(veq(&args) == (code, out.clone()), "{cmd:?}: sequential run differs");
        actual.push_str(&out);
    }
    let golden = dir.join("expected.jsonl");
    if std::env::var_os("VEQ_BLESS").is_some() {
        std::fs::write(&golden, &actual).map_err(|e| e.to_string())?;
    }
    let expected = std::fs::read_to_string(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if expected != actual {
        let line = expected.lines().zip(actual.lines()).position(|(a, b)| a != b).unwrap_or(0);
        return Err(format!("golden output differs at record {}", line + 1));
    }

    for family in corpus::FAMILIES.iter().map(|(n, _)| *n).chain(["all"]) {
        let ws = load(family);
        let printed = ws.print();
        let again = Workspace::parse(&printed).map_err(|e| format!("{family}: reparse failed: {e}"))?;
        ensure!(again == ws, "{family}: print/parse round trip changes the workspace");
        ensure!(again.print() == printed, "{family}: printing is not idempotent");
    }

    for (args, want) in [
        (vec!["solve", "E", "--corpus", "finset"], 0),
        (vec!["implies", "E", "K", "--corpus", "finset"], 1),
        (vec!["solve", "Nope", "--corpus", "finset"], 2),
        (vec!["unify", "f(x", "x"], 2),
        (vec!["frobnicate"], 2),
        (vec![], 2),
    ] {
        let (code, _) = veq(&args);
        ensure!(code == want, "{args:?}: exit {code}, expected {want}");
    }
    ensure!(RunError::Internal("probe".into()).exit_code() == 3, "internal errors do not map to exit 3");
    let mut seen: Vec<_> = codes.into_iter().collect();
    seen.sort();
    Ok(format!("{} golden records, exit codes {seen:?}, 7 round trips", commands.len()))
}
