//! One-sorted finitely presented theories.
//!
//! A theory is a signature plus axioms (pairs of terms). Morphisms `n -> m`
//! are `m`-tuples of terms in `n` variables, so objects are plain naturals and
//! every theory morphism fixes them. Provability in a presentation is only
//! semi-decidable; [`congruent`] searches a bounded space and answers either
//! with a replayable certificate or with [`Decision::Unknown`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::par::Exec;

pub type Symbol = Arc<str>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error("duplicate operation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("variable index {index} is outside a context of size {context}")]
    VariableOutOfContext { index: usize, context: usize },
    #[error("invalid budget: {0}")]
    BudgetInvalid(String),
    #[error("morphisms are not parallel")]
    NotParallel,
    #[error("equation pair does not share a source theory")]
    SourceMismatch,
    #[error("morphisms do not share a target theory")]
    TargetMismatch,
    #[error("no image given for symbol `{0}`")]
    MissingImage(String),
    #[error("certificate step {step} does not replay: {reason}")]
    BadCertificate { step: usize, reason: String },
}

/// A first-order term over a one-sorted signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(index: usize) -> Self {
        Term::Var(index)
    }

    pub fn app(symbol: &str, args: Vec<Term>) -> Self {
        Term::App(Arc::from(symbol), args)
    }

    pub fn constant(symbol: &str) -> Self {
        Term::app(symbol, Vec::new())
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn context_size(&self) -> usize {
        self.vars().last().map_or(0, |v| v + 1)
    }

    pub fn occurs(&self, var: usize) -> bool {
        match self {
            Term::Var(v) => *v == var,
            Term::App(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn subterm(&self, position: &[usize]) -> Option<&Term> {
        match (position.split_first(), self) {
            (None, _) => Some(self),
            (Some((&i, rest)), Term::App(_, args)) => args.get(i)?.subterm(rest),
            (Some(_), Term::Var(_)) => None,
        }
    }

    pub fn replace_at(&self, position: &[usize], replacement: Term) -> Option<Term> {
        match (position.split_first(), self) {
            (None, _) => Some(replacement),
            (Some((&i, rest)), Term::App(f, args)) => {
                let mut args = args.clone();
                let slot = args.get_mut(i)?;
                *slot = slot.replace_at(rest, replacement)?;
                Some(Term::App(f.clone(), args))
            }
            (Some(_), Term::Var(_)) => None,
        }
    }

    /// All positions in pre-order.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out);
        out
    }

    fn collect_positions(&self, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                path.push(i);
                a.collect_positions(path, out);
                path.pop();
            }
        }
    }

    /// Renames variables in order of first occurrence.
    pub fn normalize_vars(&self) -> Term {
        let mut map = BTreeMap::new();
        self.renumber(&mut map)
    }

    fn renumber(&self, map: &mut BTreeMap<usize, usize>) -> Term {
        match self {
            Term::Var(v) => {
                let next = map.len();
                Term::Var(*map.entry(*v).or_insert(next))
            }
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.renumber(map)).collect()),
        }
    }

    pub fn display<'a>(&'a self, names: &'a VarNames) -> TermDisplay<'a> {
        TermDisplay { term: self, names }
    }
}

/// Size first, then structure: the canonical order used to pick
/// representatives.
pub fn canonical_cmp(a: &Term, b: &Term) -> std::cmp::Ordering {
    a.size().cmp(&b.size()).then_with(|| a.cmp(b))
}

/// Variable naming used when printing terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
}

const DEFAULT_VAR_NAMES: [&str; 6] = ["x", "y", "z", "w", "u", "v"];

impl VarNames {
    pub fn new(names: Vec<String>) -> Self {
        VarNames { names }
    }

    /// `x, y, z, w, u, v, x6, x7, ...`, skipping any name in `avoid`.
    pub fn standard_avoiding(avoid: &Signature) -> Self {
        let mut names = Vec::new();
        let mut i = 0;
        while names.len() < 64 {
            let candidate = if i < DEFAULT_VAR_NAMES.len() {
                DEFAULT_VAR_NAMES[i].to_string()
            } else {
                format!("x{i}")
            };
            if avoid.arity(&candidate).is_none() {
                names.push(candidate);
            }
            i += 1;
        }
        VarNames { names }
    }

    /// Numbered names past the list continue from the last listed one.
    fn overflow_offset(&self) -> Option<usize> {
        let last = self.names.last()?;
        let k: usize = last.strip_prefix('x')?.parse().ok()?;
        k.checked_sub(self.names.len() - 1)
    }

    pub fn name(&self, index: usize) -> String {
        self.names.get(index).cloned().unwrap_or_else(|| {
            let offset = self.overflow_offset().unwrap_or(0);
            format!("x{}", index + offset)
        })
    }

    /// Inverse of [`VarNames::name`].
    pub fn index_of(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        let k: usize = name.strip_prefix('x')?.parse().ok()?;
        let index = k.checked_sub(self.overflow_offset().unwrap_or(0))?;
        (index >= self.names.len() && name == format!("x{k}")).then_some(index)
    }
}

impl Default for VarNames {
    fn default() -> Self {
        VarNames::standard_avoiding(&Signature::default())
    }
}

#[cfg(test)]
mod var_name_tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let names = VarNames::standard_avoiding(&Signature::new([("u", 0)]).unwrap());
        for i in [0, 3, 4, 5, 63, 64, 100] {
            assert_eq!(names.index_of(&names.name(i)), Some(i));
        }
        assert_eq!(names.index_of("u"), None);
        assert_eq!(names.index_of("x07"), None);
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    names: &'a VarNames,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => write!(f, "{}", self.names.name(*v)),
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a.display(self.names))?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&VarNames::default()))
    }
}

/// Operation symbols with arities, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    ops: IndexMap<String, usize>,
}

impl Signature {
    pub fn new<I, S>(ops: I) -> Result<Self, TheoryError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut map = IndexMap::new();
        for (name, arity) in ops {
            let name = name.into();
            if map.contains_key(&name) {
                return Err(TheoryError::DuplicateSymbol(name));
            }
            map.insert(name, arity);
        }
        Ok(Signature { ops: map })
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.ops.get(symbol).copied()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.ops.get_index_of(symbol)
    }

    pub fn ops(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.ops.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, index: usize) -> (&str, usize) {
        let (n, &a) = self.ops.get_index(index).expect("operation index");
        (n.as_str(), a)
    }

    /// Checks symbols and arities, and variables against `context` when given.
    pub fn check_term(&self, term: &Term, context: Option<usize>) -> Result<(), TheoryError> {
        match term {
            Term::Var(v) => match context {
                Some(n) if *v >= n => Err(TheoryError::VariableOutOfContext { index: *v, context: n }),
                _ => Ok(()),
            },
            Term::App(s, args) => {
                let expected = self
                    .arity(s)
                    .ok_or_else(|| TheoryError::UnknownSymbol(s.to_string()))?;
                if expected != args.len() {
                    return Err(TheoryError::ArityMismatch {
                        symbol: s.to_string(),
                        expected,
                        got: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a, context))
            }
        }
    }

    /// The generic term `σ(x0, ..., x(k-1))` for the operation at `index`.
    pub fn generic_term(&self, index: usize) -> Term {
        let (name, arity) = self.op(index);
        Term::app(name, (0..arity).map(Term::Var).collect())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, a)) in self.ops().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}/{a}")?;
        }
        Ok(())
    }
}

/// A finite map from variables to terms, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<usize, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Term)>) -> Self {
        Substitution(pairs.into_iter().collect())
    }

    pub fn get(&self, var: usize) -> Option<&Term> {
        self.0.get(&var)
    }

    pub fn insert(&mut self, var: usize, term: Term) {
        self.0.insert(var, term);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Term)> + '_ {
        self.0.iter().map(|(&v, t)| (v, t))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, term: &Term) -> Term {
        substitute(term, self)
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &Substitution) -> Substitution {
        let mut out: BTreeMap<usize, Term> = inner.0.iter().map(|(&v, t)| (v, self.apply(t))).collect();
        for (&v, t) in &self.0 {
            out.entry(v).or_insert_with(|| t.clone());
        }
        out.retain(|&v, t| *t != Term::Var(v));
        Substitution(out)
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self) == *self
    }

    /// Display with `{x↦a, y↦b}`-style output.
    pub fn display<'a>(&'a self, names: &'a VarNames) -> SubstitutionDisplay<'a> {
        SubstitutionDisplay { subst: self, names }
    }
}

pub struct SubstitutionDisplay<'a> {
    subst: &'a Substitution,
    names: &'a VarNames,
}

impl fmt::Display for SubstitutionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.subst.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} ↦ {}", self.names.name(v), t.display(self.names))?;
        }
        write!(f, "}}")
    }
}

/// Simultaneous substitution; variables outside the map are unchanged.
pub fn substitute(term: &Term, s: &Substitution) -> Term {
    match term {
        Term::Var(v) => s.get(*v).cloned().unwrap_or(Term::Var(*v)),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| substitute(a, s)).collect()),
    }
}

/// Syntactic most general unifier with occurs check. The result is
/// idempotent and only binds variables of the two terms.
pub fn unify(t1: &Term, t2: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    let mut stack = vec![(t1.clone(), t2.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = subst.apply(&a);
        let b = subst.apply(&b);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(x) {
                    return None;
                }
                let single = Substitution::from_pairs([(x, t.clone())]);
                for bound in subst.0.values_mut() {
                    *bound = single.apply(bound);
                }
                subst.insert(x, t);
            }
            (Term::App(f, fs), Term::App(g, gs)) => {
                if f != g || fs.len() != gs.len() {
                    return None;
                }
                stack.extend(fs.into_iter().zip(gs).rev());
            }
        }
    }
    Some(subst)
}

/// One-way matching: `σ` with `σ(pattern) = term`, extending `bindings`.
pub fn match_term(pattern: &Term, term: &Term, bindings: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match bindings.get(*v) {
            Some(bound) => bound == term,
            None => {
                bindings.insert(*v, term.clone());
                true
            }
        },
        Term::App(f, ps) => match term {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, t)| match_term(p, t, bindings))
            }
            _ => false,
        },
    }
}

/// An axiom `lhs ~ rhs` in a context of `vars` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub lhs: Term,
    pub rhs: Term,
}

impl Axiom {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Axiom { lhs, rhs }
    }

    pub fn context_size(&self) -> usize {
        self.lhs.context_size().max(self.rhs.context_size())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TheoryPresentation {
    signature: Signature,
    axioms: Vec<Axiom>,
    /// Per axiom: may it rewrite forward, backward (target variables bound
    /// by the source side).
    usable: Vec<[bool; 2]>,
}

impl TheoryPresentation {
    pub fn new(signature: Signature, axioms: Vec<Axiom>) -> Result<Self, TheoryError> {
        for ax in &axioms {
            signature.check_term(&ax.lhs, None)?;
            signature.check_term(&ax.rhs, None)?;
        }
        let usable = axioms
            .iter()
            .map(|ax| {
                let (l, r) = (ax.lhs.vars(), ax.rhs.vars());
                [r.is_subset(&l), l.is_subset(&r)]
            })
            .collect();
        Ok(TheoryPresentation {
            signature,
            axioms,
            usable,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    /// Names for printing variables that do not collide with symbols.
    pub fn var_names(&self) -> VarNames {
        VarNames::standard_avoiding(&self.signature)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Instance of the axiom's left side rewritten to its right side.
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// One replacement of equals by equals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofStep {
    pub position: Vec<usize>,
    pub axiom: usize,
    pub substitution: Substitution,
    pub direction: Direction,
    pub result: Term,
}

/// A chain `start = t0 ~ t1 ~ ... ~ tn`, each step an axiom instance applied
/// at one position. The empty chain proves `t ~ t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub start: Term,
    pub steps: Vec<ProofStep>,
}

impl Certificate {
    pub fn end(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    /// Re-checks every step against `theory` and returns the final term.
    pub fn replay(&self, theory: &TheoryPresentation) -> Result<Term, TheoryError> {
        let mut current = self.start.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let bad = |reason: &str| TheoryError::BadCertificate {
                step: i,
                reason: reason.to_string(),
            };
            let axiom = theory.axioms.get(step.axiom).ok_or_else(|| bad("unknown axiom"))?;
            let (from, to) = match step.direction {
                Direction::Forward => (&axiom.lhs, &axiom.rhs),
                Direction::Backward => (&axiom.rhs, &axiom.lhs),
            };
            if to.vars().iter().any(|v| step.substitution.get(*v).is_none())
                || from.vars().iter().any(|v| step.substitution.get(*v).is_none())
            {
                return Err(bad("substitution does not cover the axiom's variables"));
            }
            let sub = current.subterm(&step.position).ok_or_else(|| bad("no such position"))?;
            if *sub != step.substitution.apply(from) {
                return Err(bad("subterm is not an instance of the axiom side"));
            }
            let next = current
                .replace_at(&step.position, step.substitution.apply(to))
                .ok_or_else(|| bad("no such position"))?;
            if next != step.result {
                return Err(bad("recorded result differs"));
            }
            current = next;
        }
        Ok(current)
    }
}

/// Limits for [`congruent`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of terms expanded.
    pub max_steps: usize,
    /// Largest term size explored; `None` allows the larger side plus four.
    pub max_term_size: Option<usize>,
}

impl Budget {
    pub fn steps(max_steps: usize) -> Self {
        Budget {
            max_steps,
            max_term_size: None,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::steps(10_000)
    }
}

const DEFAULT_SIZE_SLACK: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Provable(Certificate),
    Unknown { explored: usize },
}

impl Decision {
    pub fn is_provable(&self) -> bool {
        matches!(self, Decision::Provable(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Decision::Provable(c) => Some(c),
            Decision::Unknown { .. } => None,
        }
    }
}

/// Single-step rewrites of `term`: positions in pre-order, axioms in order,
/// forward before backward. Directions whose target side has variables the
/// source side does not bind are skipped.
pub fn rewrites(theory: &TheoryPresentation, term: &Term) -> Vec<ProofStep> {
    let mut out = Vec::new();
    for position in term.positions() {
        let sub = term.subterm(&position).expect("position from positions()");
        for (k, ax) in theory.axioms.iter().enumerate() {
            for (d, direction) in [Direction::Forward, Direction::Backward].into_iter().enumerate() {
                if !theory.usable[k][d] {
                    continue;
                }
                let (from, to) = match direction {
                    Direction::Forward => (&ax.lhs, &ax.rhs),
                    Direction::Backward => (&ax.rhs, &ax.lhs),
                };
                let mut sigma = Substitution::new();
                if !match_term(from, sub, &mut sigma) {
                    continue;
                }
                let replaced = sigma.apply(to);
                if replaced == *sub {
                    continue;
                }
                let result = term.replace_at(&position, replaced).expect("valid position");
                out.push(ProofStep {
                    position: position.clone(),
                    axiom: k,
                    substitution: sigma,
                    direction,
                    result,
                });
            }
        }
    }
    out
}

struct Side {
    seen: HashMap<Term, Option<(Term, ProofStep)>>,
    frontier: VecDeque<Term>,
}

impl Side {
    fn new(root: &Term) -> Self {
        let mut seen = HashMap::new();
        seen.insert(root.clone(), None);
        Side {
            seen,
            frontier: VecDeque::from([root.clone()]),
        }
    }

    /// Steps from the root to `t`.
    fn path_to(&self, t: &Term) -> Vec<(Term, ProofStep)> {
        let mut path = Vec::new();
        let mut cur = t.clone();
        while let Some(Some((parent, step))) = self.seen.get(&cur) {
            path.push((parent.clone(), step.clone()));
            cur = parent.clone();
        }
        path.reverse();
        path
    }
}

/// Decides `lhs ~ rhs` in the congruence generated by the axioms, within
/// `budget`. Never reports non-congruence.
pub fn congruent(
    theory: &TheoryPresentation,
    lhs: &Term,
    rhs: &Term,
    budget: Budget,
) -> Result<Decision, TheoryError> {
    congruent_with(theory, lhs, rhs, budget, Exec::default())
}

pub fn congruent_with(
    theory: &TheoryPresentation,
    lhs: &Term,
    rhs: &Term,
    budget: Budget,
    exec: Exec,
) -> Result<Decision, TheoryError> {
    theory.signature.check_term(lhs, None)?;
    theory.signature.check_term(rhs, None)?;
    if budget.max_steps == 0 {
        return Err(TheoryError::BudgetInvalid("step limit must be positive".into()));
    }
    let largest = lhs.size().max(rhs.size());
    let size_limit = match budget.max_term_size {
        Some(s) if s < largest => {
            return Err(TheoryError::BudgetInvalid(format!(
                "term size limit {s} is below the size of the input ({largest})"
            )))
        }
        Some(s) => s,
        None => largest + DEFAULT_SIZE_SLACK,
    };
    if lhs == rhs {
        return Ok(Decision::Provable(Certificate {
            start: lhs.clone(),
            steps: Vec::new(),
        }));
    }

    let mut sides = [Side::new(lhs), Side::new(rhs)];
    let mut explored = 0usize;
    while explored < budget.max_steps {
        // Grow the side with the smaller frontier, one level at a time.
        let which = if sides[0].frontier.is_empty() {
            1
        } else if sides[1].frontier.is_empty() || sides[0].frontier.len() <= sides[1].frontier.len() {
            0
        } else {
            1
        };
        if sides[which].frontier.is_empty() {
            break;
        }
        let take = sides[which].frontier.len().min(budget.max_steps - explored);
        let level: Vec<Term> = sides[which].frontier.drain(..take).collect();
        explored += level.len();
        let expansions = exec.map(&level, |t| rewrites(theory, t));
        for (parent, steps) in level.into_iter().zip(expansions) {
            for step in steps {
                if step.result.size() > size_limit || sides[which].seen.contains_key(&step.result) {
                    continue;
                }
                let meet = step.result.clone();
                sides[which].seen.insert(meet.clone(), Some((parent.clone(), step)));
                if sides[1 - which].seen.contains_key(&meet) {
                    return Ok(Decision::Provable(join(&sides, &meet, lhs)));
                }
                sides[which].frontier.push_back(meet);
            }
        }
    }
    Ok(Decision::Unknown { explored })
}

fn join(sides: &[Side; 2], meet: &Term, lhs: &Term) -> Certificate {
    let mut steps: Vec<ProofStep> = sides[0].path_to(meet).into_iter().map(|(_, s)| s).collect();
    // The right side was explored from rhs; walk it back towards rhs.
    for (parent, step) in sides[1].path_to(meet).into_iter().rev() {
        steps.push(ProofStep {
            position: step.position,
            axiom: step.axiom,
            substitution: step.substitution,
            direction: step.direction.flip(),
            result: parent,
        });
    }
    Certificate {
        start: lhs.clone(),
        steps,
    }
}

/// A theory morphism given by the image of each source symbol: a term in the
/// symbol's arity many variables over the target signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryMorphism {
    source: Arc<TheoryPresentation>,
    target: Arc<TheoryPresentation>,
    images: Vec<Term>,
}

impl TheoryMorphism {
    pub fn new(
        source: Arc<TheoryPresentation>,
        target: Arc<TheoryPresentation>,
        images: Vec<Term>,
    ) -> Result<Self, TheoryError> {
        if images.len() != source.signature.len() {
            let missing = source.signature.op(images.len().min(source.signature.len().saturating_sub(1))).0;
            return Err(TheoryError::MissingImage(missing.to_string()));
        }
        for (i, image) in images.iter().enumerate() {
            let (_, arity) = source.signature.op(i);
            target.signature.check_term(image, Some(arity))?;
        }
        Ok(TheoryMorphism { source, target, images })
    }

    /// Build from `(symbol, image)` pairs in any order.
    pub fn from_named(
        source: Arc<TheoryPresentation>,
        target: Arc<TheoryPresentation>,
        named: &[(String, Term)],
    ) -> Result<Self, TheoryError> {
        let mut images = Vec::with_capacity(source.signature.len());
        for (name, _) in source.signature.ops() {
            let image = named
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| TheoryError::MissingImage(name.to_string()))?;
            images.push(image);
        }
        if let Some((extra, _)) = named.iter().find(|(n, _)| source.signature.arity(n).is_none()) {
            return Err(TheoryError::UnknownSymbol(extra.clone()));
        }
        TheoryMorphism::new(source, target, images)
    }

    /// Sends every symbol to itself; `target` must contain the source
    /// signature.
    pub fn identity_on_symbols(
        source: Arc<TheoryPresentation>,
        target: Arc<TheoryPresentation>,
    ) -> Result<Self, TheoryError> {
        let images = (0..source.signature.len())
            .map(|i| source.signature.generic_term(i))
            .collect();
        TheoryMorphism::new(source, target, images)
    }

    pub fn source(&self) -> &Arc<TheoryPresentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<TheoryPresentation> {
        &self.target
    }

    pub fn images(&self) -> &[Term] {
        &self.images
    }

    pub fn image_of(&self, symbol: &str) -> Option<&Term> {
        self.source.signature.index_of(symbol).map(|i| &self.images[i])
    }

    /// Translates a source term into the target signature.
    pub fn apply(&self, term: &Term) -> Term {
        match term {
            Term::Var(v) => Term::Var(*v),
            Term::App(f, args) => {
                let i = self
                    .source
                    .signature
                    .index_of(f)
                    .expect("term checked against the source signature");
                let args: Vec<Term> = args.iter().map(|a| self.apply(a)).collect();
                let s = Substitution::from_pairs(args.into_iter().enumerate());
                s.apply(&self.images[i])
            }
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TheoryMorphism) -> Result<TheoryMorphism, TheoryError> {
        if *inner.target != *self.source {
            return Err(TheoryError::TargetMismatch);
        }
        let images = inner.images.iter().map(|t| self.apply(t)).collect();
        TheoryMorphism::new(inner.source.clone(), self.target.clone(), images)
    }

    /// Objects are naturals and fixed by every morphism.
    pub fn is_bijective_on_objects(&self) -> bool {
        true
    }

    /// Every target symbol is the image of some source symbol applied to
    /// distinct variables in order, so every target term is an image.
    pub fn is_full_by_construction(&self) -> bool {
        (0..self.target.signature.len()).all(|j| {
            let generic = self.target.signature.generic_term(j);
            self.images.contains(&generic)
        })
    }

    /// Checks that every source axiom is sent to a provable target equation.
    pub fn check_axioms(&self, budget: Budget) -> Result<Vec<Decision>, TheoryError> {
        self.source
            .axioms
            .iter()
            .map(|ax| congruent(&self.target, &self.apply(&ax.lhs), &self.apply(&ax.rhs), budget))
            .collect()
    }

    /// True when `self` and `other` agree symbol-wise up to provable
    /// congruence in the target.
    pub fn provably_equal(&self, other: &TheoryMorphism, budget: Budget) -> Result<bool, TheoryError> {
        if self.source != other.source || self.target != other.target {
            return Err(TheoryError::NotParallel);
        }
        for (a, b) in self.images.iter().zip(&other.images) {
            if !congruent(&self.target, a, b, budget)?.is_provable() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The presentation `T/∼` with `extra` added as axioms, and the canonical
/// morphism `T -> T/∼` (identity on symbols).
pub fn quotient_theory(
    theory: &Arc<TheoryPresentation>,
    extra: &[(Term, Term)],
) -> Result<(Arc<TheoryPresentation>, TheoryMorphism), TheoryError> {
    let mut axioms = theory.axioms.clone();
    axioms.extend(extra.iter().map(|(l, r)| Axiom::new(l.clone(), r.clone())));
    let quotient = Arc::new(TheoryPresentation::new(theory.signature.clone(), axioms)?);
    let canonical = TheoryMorphism::identity_on_symbols(theory.clone(), quotient.clone())?;
    Ok((quotient, canonical))
}

/// The generating pairs `P(σ) ≈ Q(σ)` over the source symbols of each
/// equation, skipping syntactically equal pairs.
pub fn cosystem_generators(pairs: &[(TheoryMorphism, TheoryMorphism)]) -> Result<Vec<(Term, Term)>, TheoryError> {
    let first = pairs.first().ok_or(TheoryError::NotParallel)?;
    let target = &first.0.target;
    let mut extra = Vec::new();
    for (p, q) in pairs {
        if p.source != q.source {
            return Err(TheoryError::SourceMismatch);
        }
        if p.target != *target || q.target != *target {
            return Err(TheoryError::TargetMismatch);
        }
        for (a, b) in p.images.iter().zip(&q.images) {
            if a != b && !extra.contains(&(a.clone(), b.clone())) {
                extra.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(extra)
}

/// General cosolution of a cosystem of theory-morphism pairs into a common
/// theory: the quotient by the congruence their images generate.
pub fn general_cosolution_theories(
    pairs: &[(TheoryMorphism, TheoryMorphism)],
) -> Result<(Arc<TheoryPresentation>, TheoryMorphism), TheoryError> {
    let extra = cosystem_generators(pairs)?;
    quotient_theory(&pairs[0].0.target, &extra)
}

/// Given the canonical quotient `m: T -> T/∼` and another morphism `other`
/// out of `T` that coequalizes the same pairs, returns the mediating
/// morphism `T/∼ -> T'` when each quotient axiom is provable in `T'`.
pub fn factor_through_quotient(
    m: &TheoryMorphism,
    other: &TheoryMorphism,
    budget: Budget,
) -> Result<Option<TheoryMorphism>, TheoryError> {
    if m.source != other.source {
        return Err(TheoryError::SourceMismatch);
    }
    let mediator = TheoryMorphism::new(m.target.clone(), other.target.clone(), other.images.clone())?;
    let all = mediator.check_axioms(budget)?.iter().all(Decision::is_provable);
    Ok(all.then_some(mediator))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelMembership {
    InKernel(Certificate),
    Unknown { explored: usize },
}

/// Membership of `(f, g)` in the kernel pair of `m`.
pub fn kernel_pair_membership(
    m: &TheoryMorphism,
    f: &Term,
    g: &Term,
    budget: Budget,
) -> Result<KernelMembership, TheoryError> {
    m.source.signature.check_term(f, None)?;
    m.source.signature.check_term(g, None)?;
    Ok(match congruent(&m.target, &m.apply(f), &m.apply(g), budget)? {
        Decision::Provable(c) => KernelMembership::InKernel(c),
        Decision::Unknown { explored } => KernelMembership::Unknown { explored },
    })
}

/// Witness that a parallel pair is a Lawvere equation: the wide subtheory
/// of the source on which both morphisms agree syntactically, whose
/// inclusion `U` satisfies `P U = Q U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawvereWitness {
    p: TheoryMorphism,
    q: TheoryMorphism,
    agreeing_symbols: Vec<String>,
}

impl LawvereWitness {
    /// Source symbols whose images coincide.
    pub fn agreeing_symbols(&self) -> &[String] {
        &self.agreeing_symbols
    }

    /// Whether a source term is a morphism of the agreement subtheory.
    pub fn contains(&self, term: &Term) -> bool {
        self.p.apply(term) == self.q.apply(term)
    }

    /// The witness is the identity when `P` and `Q` coincide.
    pub fn is_identity(&self) -> bool {
        self.p == self.q
    }
}

pub fn is_lawvere_equation(p: &TheoryMorphism, q: &TheoryMorphism) -> Result<LawvereWitness, TheoryError> {
    if p.source != q.source || p.target != q.target {
        return Err(TheoryError::NotParallel);
    }
    let agreeing_symbols = p
        .source
        .signature
        .ops()
        .zip(p.images.iter().zip(&q.images))
        .filter(|(_, (a, b))| a == b)
        .map(|((name, _), _)| name.to_string())
        .collect();
    Ok(LawvereWitness {
        p: p.clone(),
        q: q.clone(),
        agreeing_symbols,
    })
}

/// Two presentations over the same signature whose axioms are mutually
/// provable present isomorphic quotients.
pub fn interprovable(a: &TheoryPresentation, b: &TheoryPresentation, budget: Budget) -> Result<bool, TheoryError> {
    if a.signature != b.signature {
        return Ok(false);
    }
    for (from, to) in [(a, b), (b, a)] {
        for ax in &from.axioms {
            if !congruent(to, &ax.lhs, &ax.rhs, budget)?.is_provable() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
