//! Systems of equations, solutions, and general (co)solutions over any
//! category that exposes the finite (co)limits they need.
//!
//! A category plugs in by implementing [`CompCategory`]. Constructions a
//! category cannot perform report [`EquationError::CapabilityMissing`]; the
//! flags returned by [`CompCategory::capabilities`] say up front which
//! providers are available.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::finset::{self, FinFunction, FinSet, FinSetError, SubobjectMono};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquationError {
    #[error("category does not provide {0}")]
    CapabilityMissing(&'static str),
    #[error("morphism target does not match the system domain")]
    TargetMismatch,
    #[error("morphism source does not match the cosystem codomain")]
    SourceMismatch,
    #[error("morphisms do not share a codomain")]
    CodMismatch,
    #[error("systems have different domains")]
    DomainMismatch,
    #[error("equation sides are not parallel")]
    NotParallel,
    #[error("a system of equations must be non-empty")]
    EmptySystem,
    #[error("a generating family must be non-empty")]
    EmptyList,
    #[error("morphisms are not composable")]
    NotComposable,
    #[error("{0}")]
    Instance(String),
}

impl From<FinSetError> for EquationError {
    fn from(e: FinSetError) -> Self {
        match e {
            FinSetError::NotParallel => EquationError::NotParallel,
            FinSetError::EmptyList => EquationError::EmptyList,
            FinSetError::CodMismatch | FinSetError::TargetMismatch => EquationError::CodMismatch,
            FinSetError::NotComposable => EquationError::NotComposable,
            other => EquationError::Instance(other.to_string()),
        }
    }
}

/// Which optional constructions a category provides.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Capabilities {
    pub equalizers: bool,
    pub products: bool,
    pub intersections: bool,
    pub coequalizers: bool,
    pub coproducts: bool,
    pub cokernel_pairs: bool,
    pub pullbacks: bool,
    pub mono_test: bool,
    pub factorization: bool,
}

impl Capabilities {
    pub fn all() -> Self {
        Capabilities {
            equalizers: true,
            products: true,
            intersections: true,
            coequalizers: true,
            coproducts: true,
            cokernel_pairs: true,
            pullbacks: true,
            mono_test: true,
            factorization: true,
        }
    }
}

/// A category in which equations can be computed with.
///
/// Composition is written in application order: `compose(g, f)` is `g ∘ f`.
/// The optional providers default to [`EquationError::CapabilityMissing`].
pub trait CompCategory: Sync {
    type Obj: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Mor: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn source(&self, f: &Self::Mor) -> Self::Obj;
    fn target(&self, f: &Self::Mor) -> Self::Obj;
    fn identity(&self, a: &Self::Obj) -> Self::Mor;
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor, EquationError>;
    fn capabilities(&self) -> Capabilities;

    fn mor_eq(&self, f: &Self::Mor, g: &Self::Mor) -> bool {
        f == g
    }

    /// Equalizer of a parallel pair, as a monomorphism into their source.
    fn equalizer(&self, _p: &Self::Mor, _q: &Self::Mor) -> Result<Self::Mor, EquationError> {
        Err(EquationError::CapabilityMissing("equalizers"))
    }

    /// Intersection of monomorphisms sharing a target.
    fn intersect(&self, _monos: &[Self::Mor]) -> Result<Self::Mor, EquationError> {
        Err(EquationError::CapabilityMissing("intersections"))
    }

    /// The induced map `⟨legs⟩` into the product of the legs' targets.
    fn tuple(&self, _legs: &[Self::Mor]) -> Result<Self::Mor, EquationError> {
        Err(EquationError::CapabilityMissing("finite products"))
    }

    /// Coequalizer of a parallel pair, as an epimorphism out of their target.
    fn coequalizer(&self, _p: &Self::Mor, _q: &Self::Mor) -> Result<Self::Mor, EquationError> {
        Err(EquationError::CapabilityMissing("coequalizers"))
    }

    /// The induced map `[legs]` out of the coproduct of the legs' sources.
    fn copair(&self, _legs: &[Self::Mor]) -> Result<Self::Mor, EquationError> {
        Err(EquationError::CapabilityMissing("finite coproducts"))
    }

    fn cokernel_pair(&self, _f: &Self::Mor) -> Result<(Self::Mor, Self::Mor), EquationError> {
        Err(EquationError::CapabilityMissing("cokernel pairs"))
    }

    /// Pullback of `f` and `m` (shared target). Returns `(left, right)` with
    /// `f ∘ left = m ∘ right`; `left` is the leg opposite `m`.
    fn pullback(&self, _f: &Self::Mor, _m: &Self::Mor) -> Result<(Self::Mor, Self::Mor), EquationError> {
        Err(EquationError::CapabilityMissing("pullbacks"))
    }

    fn is_mono(&self, _f: &Self::Mor) -> Result<bool, EquationError> {
        Err(EquationError::CapabilityMissing("a mono test"))
    }

    /// Some `h` with `f = g ∘ h`, if one exists.
    fn factor(&self, _f: &Self::Mor, _g: &Self::Mor) -> Result<Option<Self::Mor>, EquationError> {
        Err(EquationError::CapabilityMissing("factorization search"))
    }
}

/// A pair of parallel arrows `lhs ≈ rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation<M> {
    pub lhs: M,
    pub rhs: M,
}

impl<M> Equation<M> {
    pub fn new(lhs: M, rhs: M) -> Self {
        Equation { lhs, rhs }
    }
}

fn check_parallel<C: CompCategory>(cat: &C, eq: &Equation<C::Mor>) -> Result<(), EquationError> {
    if cat.source(&eq.lhs) != cat.source(&eq.rhs) || cat.target(&eq.lhs) != cat.target(&eq.rhs) {
        return Err(EquationError::NotParallel);
    }
    Ok(())
}

/// Non-empty family of equations sharing a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem<O, M> {
    domain: O,
    equations: Vec<Equation<M>>,
}

impl<O: Clone + PartialEq, M: Clone> EquationSystem<O, M> {
    pub fn new<C>(cat: &C, equations: Vec<Equation<M>>) -> Result<Self, EquationError>
    where
        C: CompCategory<Obj = O, Mor = M>,
    {
        let first = equations.first().ok_or(EquationError::EmptySystem)?;
        let domain = cat.source(&first.lhs);
        for eq in &equations {
            check_parallel(cat, eq)?;
            if cat.source(&eq.lhs) != domain {
                return Err(EquationError::DomainMismatch);
            }
        }
        Ok(EquationSystem { domain, equations })
    }

    pub fn domain(&self) -> &O {
        &self.domain
    }

    pub fn equations(&self) -> &[Equation<M>] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

/// Non-empty family of equations sharing a codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoEquationSystem<O, M> {
    codomain: O,
    equations: Vec<Equation<M>>,
}

impl<O: Clone + PartialEq, M: Clone> CoEquationSystem<O, M> {
    pub fn new<C>(cat: &C, equations: Vec<Equation<M>>) -> Result<Self, EquationError>
    where
        C: CompCategory<Obj = O, Mor = M>,
    {
        let first = equations.first().ok_or(EquationError::EmptySystem)?;
        let codomain = cat.target(&first.lhs);
        for eq in &equations {
            check_parallel(cat, eq)?;
            if cat.target(&eq.lhs) != codomain {
                return Err(EquationError::CodMismatch);
            }
        }
        Ok(CoEquationSystem { codomain, equations })
    }

    pub fn codomain(&self) -> &O {
        &self.codomain
    }

    pub fn equations(&self) -> &[Equation<M>] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

pub type System<C> = EquationSystem<<C as CompCategory>::Obj, <C as CompCategory>::Mor>;
pub type CoSystem<C> = CoEquationSystem<<C as CompCategory>::Obj, <C as CompCategory>::Mor>;

/// `a ⊨ E`: `f ∘ a = g ∘ a` for every equation.
pub fn is_solution<C: CompCategory>(cat: &C, a: &C::Mor, system: &System<C>) -> Result<bool, EquationError> {
    if cat.target(a) != system.domain {
        return Err(EquationError::TargetMismatch);
    }
    for eq in &system.equations {
        let l = cat.compose(&eq.lhs, a)?;
        let r = cat.compose(&eq.rhs, a)?;
        if !cat.mor_eq(&l, &r) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a f = a g` for every equation of the cosystem.
pub fn is_cosolution<C: CompCategory>(cat: &C, a: &C::Mor, cosystem: &CoSystem<C>) -> Result<bool, EquationError> {
    if cat.source(a) != cosystem.codomain {
        return Err(EquationError::SourceMismatch);
    }
    for eq in &cosystem.equations {
        let l = cat.compose(a, &eq.lhs)?;
        let r = cat.compose(a, &eq.rhs)?;
        if !cat.mor_eq(&l, &r) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The general solution, built as the intersection of the equalizers of the
/// individual equations.
pub fn general_solution<C: CompCategory>(cat: &C, system: &System<C>) -> Result<C::Mor, EquationError> {
    let caps = cat.capabilities();
    if !caps.equalizers {
        return Err(EquationError::CapabilityMissing("equalizers"));
    }
    let equalizers = system
        .equations
        .iter()
        .map(|eq| cat.equalizer(&eq.lhs, &eq.rhs))
        .collect::<Result<Vec<_>, _>>()?;
    if equalizers.len() == 1 {
        return Ok(equalizers.into_iter().next().unwrap());
    }
    if !caps.intersections {
        return Err(EquationError::CapabilityMissing("intersections"));
    }
    cat.intersect(&equalizers)
}

/// Right action `E·g = { p∘g ≈ q∘g }`.
pub fn act<C: CompCategory>(cat: &C, system: &System<C>, g: &C::Mor) -> Result<System<C>, EquationError> {
    if cat.target(g) != system.domain {
        return Err(EquationError::TargetMismatch);
    }
    let equations = system
        .equations
        .iter()
        .map(|eq| Ok(Equation::new(cat.compose(&eq.lhs, g)?, cat.compose(&eq.rhs, g)?)))
        .collect::<Result<Vec<_>, EquationError>>()?;
    Ok(EquationSystem {
        domain: cat.source(g),
        equations,
    })
}

/// Left action `g·E = { g∘p ≈ g∘q }` on a cosystem.
pub fn act_left<C: CompCategory>(cat: &C, g: &C::Mor, cosystem: &CoSystem<C>) -> Result<CoSystem<C>, EquationError> {
    if cat.source(g) != cosystem.codomain {
        return Err(EquationError::SourceMismatch);
    }
    let equations = cosystem
        .equations
        .iter()
        .map(|eq| Ok(Equation::new(cat.compose(g, &eq.lhs)?, cat.compose(g, &eq.rhs)?)))
        .collect::<Result<Vec<_>, EquationError>>()?;
    Ok(CoEquationSystem {
        codomain: cat.target(g),
        equations,
    })
}

/// `f ≤ g`: returns a witness `h` with `f = g ∘ h` when one exists.
pub fn leq<C: CompCategory>(cat: &C, f: &C::Mor, g: &C::Mor) -> Result<Option<C::Mor>, EquationError> {
    if cat.target(f) != cat.target(g) {
        return Err(EquationError::CodMismatch);
    }
    if !cat.capabilities().factorization {
        return Err(EquationError::CapabilityMissing("factorization search"));
    }
    cat.factor(f, g)
}

/// `E ⟹ K`, decided by comparing general solutions.
pub fn implies<C: CompCategory>(cat: &C, e: &System<C>, k: &System<C>) -> Result<bool, EquationError> {
    if e.domain != k.domain {
        return Err(EquationError::DomainMismatch);
    }
    let v = general_solution(cat, e)?;
    let w = general_solution(cat, k)?;
    Ok(leq(cat, &v, &w)?.is_some())
}

/// One equation with the same solutions as the whole system, obtained by
/// tupling the sides into the product of the targets.
pub fn single_equation_reduction<C: CompCategory>(
    cat: &C,
    system: &System<C>,
) -> Result<Equation<C::Mor>, EquationError> {
    if system.equations.len() == 1 {
        return Ok(system.equations[0].clone());
    }
    if !cat.capabilities().products {
        return Err(EquationError::CapabilityMissing("finite products"));
    }
    let lhs: Vec<C::Mor> = system.equations.iter().map(|e| e.lhs.clone()).collect();
    let rhs: Vec<C::Mor> = system.equations.iter().map(|e| e.rhs.clone()).collect();
    Ok(Equation::new(cat.tuple(&lhs)?, cat.tuple(&rhs)?))
}

fn common_target<C: CompCategory>(cat: &C, family: &[C::Mor]) -> Result<C::Obj, EquationError> {
    let first = family.first().ok_or(EquationError::EmptyList)?;
    let target = cat.target(first);
    if family.iter().any(|f| cat.target(f) != target) {
        return Err(EquationError::CodMismatch);
    }
    Ok(target)
}

/// The equation generated by a family: the cokernel pair of the map out of
/// the coproduct of the family's sources.
pub fn generated_equation<C: CompCategory>(cat: &C, family: &[C::Mor]) -> Result<Equation<C::Mor>, EquationError> {
    common_target(cat, family)?;
    let caps = cat.capabilities();
    if family.len() > 1 && !caps.coproducts {
        return Err(EquationError::CapabilityMissing("finite coproducts"));
    }
    if !caps.cokernel_pairs {
        return Err(EquationError::CapabilityMissing("cokernel pairs"));
    }
    let joint = if family.len() == 1 {
        family[0].clone()
    } else {
        cat.copair(family)?
    };
    let (p, q) = cat.cokernel_pair(&joint)?;
    Ok(Equation::new(p, q))
}

/// The least variety through which every member of the family factors.
pub fn generated_variety<C: CompCategory>(cat: &C, family: &[C::Mor]) -> Result<C::Mor, EquationError> {
    let eq = generated_equation(cat, family)?;
    let system = EquationSystem::new(cat, vec![eq])?;
    general_solution(cat, &system)
}

/// The general cosolution, built by coequalizing the equations one after
/// another.
pub fn general_cosolution<C: CompCategory>(cat: &C, cosystem: &CoSystem<C>) -> Result<C::Mor, EquationError> {
    if !cat.capabilities().coequalizers {
        return Err(EquationError::CapabilityMissing("coequalizers"));
    }
    let mut acc = cat.identity(&cosystem.codomain);
    for eq in &cosystem.equations {
        let l = cat.compose(&acc, &eq.lhs)?;
        let r = cat.compose(&acc, &eq.rhs)?;
        if cat.mor_eq(&l, &r) {
            continue;
        }
        let e = cat.coequalizer(&l, &r)?;
        acc = cat.compose(&e, &acc)?;
    }
    Ok(acc)
}

/// The category of finite sets and functions.
#[derive(Clone, Copy, Debug, Default)]
pub struct FinSetCat;

impl CompCategory for FinSetCat {
    type Obj = Arc<FinSet>;
    type Mor = FinFunction;

    fn source(&self, f: &FinFunction) -> Arc<FinSet> {
        f.dom().clone()
    }

    fn target(&self, f: &FinFunction) -> Arc<FinSet> {
        f.cod().clone()
    }

    fn identity(&self, a: &Arc<FinSet>) -> FinFunction {
        FinFunction::identity(a.clone())
    }

    fn compose(&self, g: &FinFunction, f: &FinFunction) -> Result<FinFunction, EquationError> {
        Ok(g.compose(f)?)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::all()
    }

    fn equalizer(&self, p: &FinFunction, q: &FinFunction) -> Result<FinFunction, EquationError> {
        Ok(finset::equalizer(p, q)?.into_inclusion())
    }

    fn intersect(&self, monos: &[FinFunction]) -> Result<FinFunction, EquationError> {
        let subs = monos
            .iter()
            .map(|m| {
                if !m.is_injective() {
                    return Err(EquationError::Instance("intersection of a non-injective map".into()));
                }
                Ok(m.image())
            })
            .collect::<Result<Vec<SubobjectMono>, _>>()?;
        Ok(finset::intersect(&subs)?.into_inclusion())
    }

    fn tuple(&self, legs: &[FinFunction]) -> Result<FinFunction, EquationError> {
        Ok(finset::tuple(legs)?)
    }

    fn coequalizer(&self, p: &FinFunction, q: &FinFunction) -> Result<FinFunction, EquationError> {
        Ok(finset::coequalizer(p, q)?)
    }

    fn copair(&self, legs: &[FinFunction]) -> Result<FinFunction, EquationError> {
        Ok(finset::copair(legs)?)
    }

    fn cokernel_pair(&self, f: &FinFunction) -> Result<(FinFunction, FinFunction), EquationError> {
        Ok(finset::cokernel_pair(f)?)
    }

    fn pullback(&self, f: &FinFunction, m: &FinFunction) -> Result<(FinFunction, FinFunction), EquationError> {
        let sq = finset::pullback(f, m)?;
        Ok((sq.left, sq.right))
    }

    fn is_mono(&self, f: &FinFunction) -> Result<bool, EquationError> {
        Ok(f.is_injective())
    }

    fn factor(&self, f: &FinFunction, g: &FinFunction) -> Result<Option<FinFunction>, EquationError> {
        Ok(finset::factor_through(f, g)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[&str]) -> Arc<FinSet> {
        Arc::new(FinSet::new(labels.iter().copied()).unwrap())
    }

    fn fun(dom: &Arc<FinSet>, cod: &Arc<FinSet>, table: &[usize]) -> FinFunction {
        FinFunction::new(dom.clone(), cod.clone(), table.to_vec()).unwrap()
    }

    fn abc() -> (Arc<FinSet>, Arc<FinSet>, FinFunction, FinFunction) {
        let a = set(&["a", "b", "c"]);
        let two = set(&["0", "1"]);
        let p = fun(&a, &two, &[0, 1, 1]);
        let q = fun(&a, &two, &[0, 0, 1]);
        (a, two, p, q)
    }

    fn carrier(f: &FinFunction) -> Vec<&str> {
        f.dom().labels().collect()
    }

    #[test]
    fn general_solution_of_the_abc_system() {
        let (a, _, p, q) = abc();
        let sys = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), q)]).unwrap();
        let v = general_solution(&FinSetCat, &sys).unwrap();
        assert_eq!(carrier(&v), ["a", "c"]);
        assert!(is_solution(&FinSetCat, &v, &sys).unwrap());

        let trivial = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), p)]).unwrap();
        assert_eq!(general_solution(&FinSetCat, &trivial).unwrap(), FinFunction::identity(a));
    }

    #[test]
    fn is_solution_checks_pointwise() {
        let (_, _, p, q) = abc();
        let sys = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), q)]).unwrap();
        let pt = set(&["*"]);
        let pick_b = fun(&pt, p.dom(), &[1]);
        let pick_c = fun(&pt, p.dom(), &[2]);
        assert!(!is_solution(&FinSetCat, &pick_b, &sys).unwrap());
        assert!(is_solution(&FinSetCat, &pick_c, &sys).unwrap());
        let wrong = fun(&pt, &set(&["z"]), &[0]);
        assert_eq!(is_solution(&FinSetCat, &wrong, &sys), Err(EquationError::TargetMismatch));
    }

    #[test]
    fn systems_must_be_nonempty_and_parallel() {
        let (_, two, p, _) = abc();
        assert_eq!(
            EquationSystem::<Arc<FinSet>, FinFunction>::new(&FinSetCat, vec![]),
            Err(EquationError::EmptySystem)
        );
        let other = fun(&two, &two, &[0, 1]);
        assert_eq!(
            EquationSystem::new(&FinSetCat, vec![Equation::new(p, other)]),
            Err(EquationError::NotParallel)
        );
    }

    #[test]
    fn act_by_identity_and_by_general_solution() {
        let (a, _, p, q) = abc();
        let sys = EquationSystem::new(&FinSetCat, vec![Equation::new(p, q)]).unwrap();
        let same = act(&FinSetCat, &sys, &FinFunction::identity(a)).unwrap();
        assert_eq!(same, sys);
        let v = general_solution(&FinSetCat, &sys).unwrap();
        let acted = act(&FinSetCat, &sys, &v).unwrap();
        assert_eq!(acted.len(), sys.len());
        assert!(acted.equations().iter().all(|e| e.lhs == e.rhs));
    }

    #[test]
    fn implies_by_subset() {
        // E has solutions {a,c}; K has solutions {a}.
        let (a, two, p, q) = abc();
        let r = fun(&a, &two, &[0, 1, 0]);
        let e = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), q.clone())]).unwrap();
        let k = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), q), Equation::new(p.clone(), r)]).unwrap();
        assert!(implies(&FinSetCat, &k, &e).unwrap());
        assert!(!implies(&FinSetCat, &e, &k).unwrap());
        assert!(implies(&FinSetCat, &e, &e).unwrap());
        let trivial = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), p)]).unwrap();
        assert!(implies(&FinSetCat, &e, &trivial).unwrap());
    }

    #[test]
    fn reduction_keeps_single_equations() {
        let (_, _, p, q) = abc();
        let sys = EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), q.clone())]).unwrap();
        assert_eq!(single_equation_reduction(&FinSetCat, &sys).unwrap(), Equation::new(p.clone(), q));
        let degenerate =
            EquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), p.clone()), Equation::new(p.clone(), p)]).unwrap();
        let eq = single_equation_reduction(&FinSetCat, &degenerate).unwrap();
        assert_eq!(eq.lhs, eq.rhs);
    }

    #[test]
    fn generated_equation_of_a_point() {
        let two = set(&["0", "1"]);
        let pt = set(&["*"]);
        let const0 = fun(&pt, &two, &[0]);
        let eq = generated_equation(&FinSetCat, &[const0.clone()]).unwrap();
        let sys = EquationSystem::new(&FinSetCat, vec![eq]).unwrap();
        // A map into {0,1} solves the generated equation iff it lands in {0}.
        for x in [set(&["u"]), set(&["u", "v"])] {
            for a in FinFunction::enumerate(&x, &two) {
                let lands_in_zero = a.table().iter().all(|&i| i == 0);
                assert_eq!(is_solution(&FinSetCat, &a, &sys).unwrap(), lands_in_zero);
            }
        }
        let id = FinFunction::identity(two.clone());
        let eq = generated_equation(&FinSetCat, &[id.clone()]).unwrap();
        assert_eq!(eq.lhs, eq.rhs);
        assert_eq!(generated_variety(&FinSetCat, &[id.clone()]).unwrap(), id);
        assert_eq!(generated_equation(&FinSetCat, &[]), Err(EquationError::EmptyList));
    }

    #[test]
    fn generated_variety_is_union_of_images() {
        let a = set(&["a", "b", "c"]);
        let pt = set(&["*"]);
        let pick_a = fun(&pt, &a, &[0]);
        let pick_c = fun(&pt, &a, &[2]);
        let v = generated_variety(&FinSetCat, &[pick_a, pick_c]).unwrap();
        assert_eq!(carrier(&v), ["a", "c"]);
    }

    #[test]
    fn general_cosolution_glues_in_finset() {
        let pt = set(&["*"]);
        let three = set(&["0", "1", "2"]);
        let p = fun(&pt, &three, &[0]);
        let q = fun(&pt, &three, &[1]);
        let r = fun(&pt, &three, &[2]);
        let cosys = CoEquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), q), Equation::new(p.clone(), r)]).unwrap();
        let e = general_cosolution(&FinSetCat, &cosys).unwrap();
        assert_eq!(e.cod().len(), 1);
        assert!(is_cosolution(&FinSetCat, &e, &cosys).unwrap());
        let trivial = CoEquationSystem::new(&FinSetCat, vec![Equation::new(p.clone(), p)]).unwrap();
        assert_eq!(general_cosolution(&FinSetCat, &trivial).unwrap(), FinFunction::identity(three));
    }

    #[test]
    fn leq_rejects_image_escape() {
        let a = set(&["a", "b", "c"]);
        let pt = set(&["*"]);
        let pick_b = fun(&pt, &a, &[1]);
        let sub = SubobjectMono::from_mask(a.clone(), &[true, false, true]);
        assert_eq!(leq(&FinSetCat, &pick_b, sub.inclusion()).unwrap(), None);
        let id = FinFunction::identity(a);
        assert_eq!(leq(&FinSetCat, &id, &id).unwrap(), Some(id.clone()));
    }
}
