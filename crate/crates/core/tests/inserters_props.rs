use std::sync::Arc;

use proptest::prelude::*;
use veq_core::birkhoff::FiniteAlgebra;
use veq_core::finset::FinSet;
use veq_core::inserters::{
    enumerate_functors, free_f_algebra, inserter, verify_forgetful, verify_universal_property, FiniteCategory,
    Functor, Polynomial, Poset,
};

fn poset(n: usize, bits: &[bool]) -> Arc<FiniteCategory> {
    let mut relations = Vec::new();
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if bits[k] {
                relations.push((a, b));
            }
            k += 1;
        }
    }
    Arc::new(FiniteCategory::from_poset(&Poset::new(Arc::new(FinSet::range(n)), &relations).unwrap()))
}

fn finite_poset(max: usize) -> impl Strategy<Value = Arc<FiniteCategory>> {
    (1..=max).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |b| poset(n, &b)))
}

fn leq(c: &FiniteCategory, a: usize, b: usize) -> bool {
    !c.hom(a, b).is_empty()
}

fn monotone_maps(x: &FiniteCategory, c: &FiniteCategory) -> usize {
    let (n, m) = (x.object_count(), c.object_count());
    (0..m.pow(n as u32))
        .filter(|&code| {
            let map: Vec<usize> = (0..n).map(|i| code / m.pow((n - 1 - i) as u32) % m).collect();
            (0..n).all(|a| (0..n).all(|b| !leq(x, a, b) || leq(c, map[a], map[b])))
        })
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functors_between_posets_are_monotone_maps(x in finite_poset(3), c in finite_poset(3)) {
        let functors = enumerate_functors(&x, &c, 10_000).unwrap();
        prop_assert_eq!(functors.len(), monotone_maps(&x, &c));
    }

    #[test]
    fn inserters_of_poset_functors((f, g) in (finite_poset(3), finite_poset(3)).prop_flat_map(|(a, b)| {
        let fs = enumerate_functors(&a, &b, 10_000).unwrap();
        let n = fs.len();
        (0..n, 0..n).prop_map(move |(i, j)| (fs[i].clone(), fs[j].clone()))
    })) {
        let ins = inserter(&f, &g).unwrap();
        prop_assert!(verify_forgetful(&ins.forgetful).all());
        // Objects are exactly the A with F A <= G A.
        let a = f.source();
        let expected: Vec<usize> = (0..a.object_count()).filter(|&o| leq(f.target(), f.object(o), g.object(o))).collect();
        let got: Vec<usize> = ins.pairs.iter().map(|&(o, _)| o).collect();
        prop_assert_eq!(got, expected);
        for x in [FiniteCategory::terminal(), FiniteCategory::arrow_category()] {
            prop_assert!(verify_universal_property(&ins, &Arc::new(x)).unwrap().holds());
        }
    }
}

fn nat_like() -> Polynomial {
    Polynomial::new(vec![("zero".into(), 0), ("succ".into(), 1)]).unwrap()
}

fn tree_like() -> Polynomial {
    Polynomial::new(vec![("leaf".into(), 0), ("node".into(), 2)]).unwrap()
}

#[test]
fn truncated_free_algebras_grow_by_embedding() {
    for functor in [nat_like(), tree_like()] {
        for g in 0..=2 {
            let gens = Arc::new(FinSet::range(g));
            let mut prev = free_f_algebra(&functor, &gens, 0).unwrap();
            for d in 1..=3 {
                let next = free_f_algebra(&functor, &gens, d).unwrap();
                assert!(prev.size() < next.size());
                assert!(prev.embeds_in(&next));
                assert!(!next.embeds_in(&prev));
                prev = next;
            }
        }
    }
}

#[test]
fn truncated_free_algebra_sizes() {
    // x; zero, succ(x); then two new successors per level.
    let gens = Arc::new(FinSet::range(1));
    let nat = free_f_algebra(&nat_like(), &gens, 3).unwrap();
    assert_eq!(nat.size(), 1 + 2 + 2 + 2);
    let trees = free_f_algebra(&tree_like(), &Arc::new(FinSet::range(0)), 2).unwrap();
    // leaf, node(leaf, leaf).
    assert_eq!(trees.size(), 2);
}

#[test]
fn free_algebra_extends_uniquely() {
    let functor = tree_like();
    let gens = Arc::new(FinSet::range(2));
    let free = free_f_algebra(&functor, &gens, 1).unwrap();
    for n in 1..=2 {
        let carrier = Arc::new(FinSet::range(n));
        for leaf in 0..n {
            for code in 0..n.pow((n * n) as u32) {
                let node: Vec<usize> = (0..n * n).map(|i| code / n.pow((n * n - 1 - i) as u32) % n).collect();
                let target = FiniteAlgebra::new(functor.signature().clone(), carrier.clone(), vec![vec![leaf], node]).unwrap();
                for a in 0..n {
                    for b in 0..n {
                        let map = free.extend(&target, &[a, b]).unwrap();
                        assert!(free.is_homomorphism(&target, &map));
                        assert_eq!(free.count_extensions(&target, &[a, b]).unwrap(), 1);
                    }
                }
            }
        }
    }
}

#[test]
fn identity_inserter_is_the_base() {
    let c = poset(3, &[true, false, true]);
    let id = Functor::identity(&c);
    let ins = inserter(&id, &id).unwrap();
    assert_eq!(ins.category.object_count(), c.object_count());
    assert_eq!(ins.category.arrow_count(), c.arrow_count());
}
