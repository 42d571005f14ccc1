//! Finite algebras over a one-sorted signature: satisfaction of identities,
//! subalgebras, congruences, products, bounded HSP membership, identity
//! extraction and free algebras of term functions. Finite groups live here
//! too, with centralizers and abelianization computed by the equations
//! engine over [`FinAlgCat`].
//!
//! Operation tables are stored flat, indexed by the argument tuple in
//! mixed radix with the first argument most significant.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::equations::{
    general_cosolution, general_solution, Capabilities, CoEquationSystem, CompCategory, Equation, EquationError,
    EquationSystem,
};
use crate::finset::{self, FinFunction, FinSet, FinSetError, SubobjectMono};
use crate::par::Exec;
use crate::theories::{
    canonical_cmp, congruent, match_term, Axiom, Budget, Signature, Substitution, Term, TheoryError, TheoryPresentation,
    VarNames,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BirkhoffError {
    #[error("variable {0} is not bound by the assignment")]
    UnboundVariable(usize),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("operation table for `{symbol}`: {reason}")]
    BadTable { symbol: String, reason: String },
    #[error("carrier of size {size} exceeds the bound {bound}")]
    CarrierTooLarge { size: usize, bound: usize },
    #[error("bounds too large: {0}")]
    BoundsTooLarge(String),
    #[error("empty list of algebras")]
    EmptyList,
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("`{0}` is not an element of the group")]
    ElementNotInG(String),
    #[error("map is not a homomorphism")]
    NotAHomomorphism,
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    FinSet(#[from] FinSetError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

/// Default carrier bound for [`congruences`].
pub const CONGRUENCE_BOUND: usize = 8;
const TERM_LIMIT: usize = 20_000;
const TABLE_CELL_LIMIT: usize = 50_000_000;
const FREE_ALGEBRA_LIMIT: usize = 20_000;
const HSP_SEARCH_LIMIT: usize = 5_000_000;

fn encode(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

fn decode(mut idx: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = idx % n.max(1);
        idx /= n.max(1);
    }
    out
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Calls `f` on every tuple in `0..n` of length `k`, in mixed-radix order.
fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > 0 && n == 0 {
        return;
    }
    let mut t = vec![0; k];
    loop {
        f(&t);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// How an element of a closure was first produced.
type Provenance = Option<(usize, Vec<usize>)>;

/// Closes `seeds` under operations of the given arities. Elements come out
/// in discovery order: seeds, constants, then rounds of new results. Returns
/// `None` if more than `limit` elements appear.
fn close_under<E, F>(seeds: Vec<E>, arities: &[usize], limit: usize, apply: F) -> Option<(Vec<E>, Vec<Provenance>)>
where
    E: Clone + Eq + Hash,
    F: Fn(usize, &[&E]) -> E,
{
    let mut elems: Vec<E> = Vec::new();
    let mut prov: Vec<Provenance> = Vec::new();
    let mut index: HashMap<E, usize> = HashMap::new();
    let mut push = |e: E, p: Provenance, elems: &mut Vec<E>, prov: &mut Vec<Provenance>| {
        if !index.contains_key(&e) {
            index.insert(e.clone(), elems.len());
            elems.push(e);
            prov.push(p);
        }
    };
    for s in seeds {
        push(s, None, &mut elems, &mut prov);
    }
    for (op, &k) in arities.iter().enumerate() {
        if k == 0 {
            push(apply(op, &[]), Some((op, Vec::new())), &mut elems, &mut prov);
        }
    }
    let mut old = 0;
    loop {
        let len = elems.len();
        if len > limit {
            return None;
        }
        for (op, &k) in arities.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut fresh = Vec::new();
            for_each_tuple(len, k, |t| {
                if t.iter().all(|&i| i < old) {
                    return;
                }
                let args: Vec<&E> = t.iter().map(|&i| &elems[i]).collect();
                fresh.push((apply(op, &args), t.to_vec()));
            });
            for (e, t) in fresh {
                push(e, Some((op, t)), &mut elems, &mut prov);
            }
        }
        if elems.len() == len {
            return Some((elems, prov));
        }
        old = len;
    }
}

/// A finite algebra: a carrier with one total table per operation symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    signature: Signature,
    carrier: Arc<FinSet>,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(signature: Signature, carrier: Arc<FinSet>, tables: Vec<Vec<usize>>) -> Result<Self, BirkhoffError> {
        if tables.len() != signature.len() {
            return Err(BirkhoffError::SignatureMismatch(format!(
                "{} tables for {} operation symbols",
                tables.len(),
                signature.len()
            )));
        }
        let n = carrier.len();
        for (i, table) in tables.iter().enumerate() {
            let (symbol, arity) = signature.op(i);
            let bad = |reason: String| BirkhoffError::BadTable {
                symbol: symbol.to_string(),
                reason,
            };
            let expected = checked_pow(n, arity).ok_or_else(|| bad("table too large".into()))?;
            if table.len() != expected {
                return Err(bad(format!("expected {expected} entries, got {}", table.len())));
            }
            if let Some(&v) = table.iter().find(|&&v| v >= n) {
                return Err(bad(format!("entry {v} is outside the carrier")));
            }
        }
        Ok(FiniteAlgebra {
            signature,
            carrier,
            tables,
        })
    }

    /// Builds the tables by calling `f(op, args)`.
    pub fn from_fn(
        signature: Signature,
        carrier: Arc<FinSet>,
        f: impl Fn(usize, &[usize]) -> usize,
    ) -> Result<Self, BirkhoffError> {
        let n = carrier.len();
        let mut tables = Vec::with_capacity(signature.len());
        for i in 0..signature.len() {
            let (_, arity) = signature.op(i);
            let mut table = Vec::new();
            for_each_tuple(n, arity, |t| table.push(f(i, t)));
            tables.push(table);
        }
        FiniteAlgebra::new(signature, carrier, tables)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn carrier(&self) -> &Arc<FinSet> {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    fn arities(&self) -> Vec<usize> {
        self.signature.ops().map(|(_, a)| a).collect()
    }

    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        self.tables[op][encode(args, self.size())]
    }

    pub fn op_index(&self, symbol: &str) -> Option<usize> {
        self.signature.index_of(symbol)
    }

    /// Checks that `t` only uses this algebra's symbols at their arities.
    pub fn check_term(&self, t: &Term) -> Result<(), BirkhoffError> {
        self.signature
            .check_term(t, None)
            .map_err(|e| BirkhoffError::SignatureMismatch(e.to_string()))
    }

    pub fn eval(&self, t: &Term, env: &[usize]) -> Result<usize, BirkhoffError> {
        self.check_term(t)?;
        if let Some(v) = t.vars().into_iter().find(|&v| v >= env.len()) {
            return Err(BirkhoffError::UnboundVariable(v));
        }
        if let Some(&bad) = env.iter().find(|&&a| a >= self.size()) {
            return Err(BirkhoffError::SignatureMismatch(format!("element {bad} is outside the carrier")));
        }
        Ok(self.eval_unchecked(t, env))
    }

    pub(crate) fn eval_unchecked(&self, t: &Term, env: &[usize]) -> usize {
        match t {
            Term::Var(v) => env[*v],
            Term::App(f, args) => {
                let op = self.signature.index_of(f).expect("checked term");
                let vals: Vec<usize> = args.iter().map(|a| self.eval_unchecked(a, env)).collect();
                self.apply(op, &vals)
            }
        }
    }

    /// The values of `t` under every assignment of `n_vars` variables, in
    /// mixed-radix order with the first variable most significant.
    pub fn term_function(&self, t: &Term, n_vars: usize) -> Result<Vec<usize>, BirkhoffError> {
        self.check_term(t)?;
        if let Some(v) = t.vars().into_iter().find(|&v| v >= n_vars) {
            return Err(BirkhoffError::UnboundVariable(v));
        }
        let n = self.size();
        let total = checked_pow(n, n_vars).ok_or_else(|| BirkhoffError::BoundsTooLarge("assignments".into()))?;
        Ok((0..total).map(|e| self.eval_unchecked(t, &decode(e, n, n_vars))).collect())
    }

    /// The least subset containing `seeds` closed under every operation.
    pub fn closure(&self, seeds: &[usize]) -> Vec<bool> {
        let (elems, _) = close_under(seeds.to_vec(), &self.arities(), usize::MAX, |op, args| {
            let vals: Vec<usize> = args.iter().map(|&&a| a).collect();
            self.apply(op, &vals)
        })
        .expect("no limit");
        let mut mask = vec![false; self.size()];
        elems.into_iter().for_each(|e| mask[e] = true);
        mask
    }

    pub fn is_closed(&self, mask: &[bool]) -> bool {
        let members: Vec<usize> = (0..self.size()).filter(|&i| mask[i]).collect();
        (0..self.signature.len()).all(|op| {
            let (_, k) = self.signature.op(op);
            let mut ok = true;
            for_each_tuple(members.len(), k, |t| {
                if ok {
                    let args: Vec<usize> = t.iter().map(|&i| members[i]).collect();
                    ok = mask[self.apply(op, &args)];
                }
            });
            ok
        })
    }

    /// A generating set found greedily in carrier order.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut reached = self.closure(&[]);
        for a in 0..self.size() {
            if !reached[a] {
                gens.push(a);
                reached = self.closure(&gens);
            }
        }
        gens
    }

    /// The subalgebra on a closed subset, with its inclusion.
    pub fn subalgebra(self: &Arc<Self>, mask: &[bool]) -> Result<AlgHom, BirkhoffError> {
        if !self.is_closed(mask) {
            return Err(BirkhoffError::BadTable {
                symbol: "*".into(),
                reason: "subset is not closed under the operations".into(),
            });
        }
        let sub = SubobjectMono::from_mask(self.carrier.clone(), mask);
        let members: Vec<usize> = sub.inclusion().table().to_vec();
        let mut position = vec![usize::MAX; self.size()];
        members.iter().enumerate().for_each(|(i, &m)| position[m] = i);
        let algebra = FiniteAlgebra::from_fn(self.signature.clone(), sub.carrier().clone(), |op, args| {
            let lifted: Vec<usize> = args.iter().map(|&a| members[a]).collect();
            position[self.apply(op, &lifted)]
        })?;
        Ok(AlgHom {
            src: Arc::new(algebra),
            tgt: self.clone(),
            map: members,
        })
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{", self.carrier)?;
        for (i, (name, arity)) in self.signature.ops().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, " {name}/{arity} = [")?;
            for (j, &v) in self.tables[i].iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.carrier.label(v))?;
            }
            write!(f, "]")?;
        }
        write!(f, " }}")
    }
}

/// A homomorphism of finite algebras over the same signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgHom {
    src: Arc<FiniteAlgebra>,
    tgt: Arc<FiniteAlgebra>,
    map: Vec<usize>,
}

impl AlgHom {
    pub fn new(src: Arc<FiniteAlgebra>, tgt: Arc<FiniteAlgebra>, map: Vec<usize>) -> Result<Self, BirkhoffError> {
        if src.signature != tgt.signature {
            return Err(BirkhoffError::SignatureMismatch("homomorphism between different signatures".into()));
        }
        if map.len() != src.size() || map.iter().any(|&b| b >= tgt.size()) {
            return Err(BirkhoffError::NotAHomomorphism);
        }
        let h = AlgHom { src, tgt, map };
        if !h.preserves_operations() {
            return Err(BirkhoffError::NotAHomomorphism);
        }
        Ok(h)
    }

    fn preserves_operations(&self) -> bool {
        (0..self.src.signature.len()).all(|op| {
            let (_, k) = self.src.signature.op(op);
            let mut ok = true;
            for_each_tuple(self.src.size(), k, |t| {
                if ok {
                    let image: Vec<usize> = t.iter().map(|&a| self.map[a]).collect();
                    ok = self.map[self.src.apply(op, t)] == self.tgt.apply(op, &image);
                }
            });
            ok
        })
    }

    pub fn identity(a: &Arc<FiniteAlgebra>) -> Self {
        AlgHom {
            src: a.clone(),
            tgt: a.clone(),
            map: (0..a.size()).collect(),
        }
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        &self.src
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        &self.tgt
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AlgHom) -> Result<AlgHom, BirkhoffError> {
        if inner.tgt != self.src {
            return Err(BirkhoffError::Equation(EquationError::NotComposable));
        }
        Ok(AlgHom {
            src: inner.src.clone(),
            tgt: self.tgt.clone(),
            map: inner.map.iter().map(|&a| self.map[a]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        self.as_function().is_injective()
    }

    pub fn is_surjective(&self) -> bool {
        self.as_function().is_surjective()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn image_mask(&self) -> Vec<bool> {
        self.as_function().image_mask()
    }

    /// The underlying function of carriers.
    pub fn as_function(&self) -> FinFunction {
        FinFunction::new(self.src.carrier.clone(), self.tgt.carrier.clone(), self.map.clone())
            .expect("homomorphism tables are total")
    }

    pub fn kernel(&self) -> Congruence {
        Congruence::from_labels(&self.map)
    }
}

impl fmt::Display for AlgHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_function())
    }
}

/// A partition of the carrier, stored as class ids numbered by first
/// occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    block: Vec<usize>,
}

impl Congruence {
    /// Normalizes arbitrary class labels.
    pub fn from_labels<T: Eq + Hash + Clone>(labels: &[T]) -> Self {
        let mut ids: HashMap<T, usize> = HashMap::new();
        let block = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Congruence { block }
    }

    pub fn discrete(n: usize) -> Self {
        Congruence { block: (0..n).collect() }
    }

    pub fn total(n: usize) -> Self {
        Congruence { block: vec![0; n] }
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn class_count(&self) -> usize {
        self.block.iter().max().map_or(0, |m| m + 1)
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        self.block.iter().enumerate().for_each(|(i, &c)| out[c].push(i));
        out
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.block[a] == self.block[b]
    }

    pub fn is_discrete(&self) -> bool {
        self.class_count() == self.block.len()
    }

    /// Compatibility with every operation, checked one argument position at
    /// a time against each class's first element.
    pub fn is_compatible(&self, a: &FiniteAlgebra) -> bool {
        if self.block.len() != a.size() {
            return false;
        }
        let firsts: Vec<usize> = self.classes().iter().map(|c| c[0]).collect();
        (0..a.signature.len()).all(|op| {
            let (_, k) = a.signature.op(op);
            let mut ok = true;
            for_each_tuple(a.size(), k, |t| {
                if !ok {
                    return;
                }
                let base = self.block[a.apply(op, t)];
                let mut moved = t.to_vec();
                for i in 0..k {
                    let rep = firsts[self.block[t[i]]];
                    if rep != t[i] {
                        moved[i] = rep;
                        if self.block[a.apply(op, &moved)] != base {
                            ok = false;
                            return;
                        }
                        moved[i] = t[i];
                    }
                }
            });
            ok
        })
    }

    /// The least congruence relating every given pair.
    pub fn generated_by(a: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Self {
        let mut uf: Vec<usize> = (0..a.size()).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut c = x;
            while uf[c] != r {
                let next = uf[c];
                uf[c] = r;
                c = next;
            }
            r
        }
        fn union(uf: &mut [usize], x: usize, y: usize) -> bool {
            let (rx, ry) = (find(uf, x), find(uf, y));
            if rx == ry {
                return false;
            }
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            uf[hi] = lo;
            true
        }
        for &(x, y) in pairs {
            union(&mut uf, x, y);
        }
        loop {
            let mut changed = false;
            for op in 0..a.signature.len() {
                let (_, k) = a.signature.op(op);
                for_each_tuple(a.size(), k, |t| {
                    let mut moved = t.to_vec();
                    for i in 0..k {
                        let root = find(&mut uf, t[i]);
                        if root != t[i] {
                            moved[i] = root;
                            let (u, v) = (a.apply(op, t), a.apply(op, &moved));
                            changed |= union(&mut uf, u, v);
                            moved[i] = t[i];
                        }
                    }
                });
            }
            if !changed {
                break;
            }
        }
        let roots: Vec<usize> = (0..a.size()).map(|x| find(&mut uf, x)).collect();
        Congruence::from_labels(&roots)
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes: Vec<String> = self
            .classes()
            .iter()
            .map(|c| c.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{{{}}}", classes.join("|"))
    }
}

/// The quotient map `A -> A/θ`. Classes are labelled by their least label.
pub fn quotient(a: &Arc<FiniteAlgebra>, theta: &Congruence) -> Result<AlgHom, BirkhoffError> {
    if !theta.is_compatible(a) {
        return Err(BirkhoffError::BadTable {
            symbol: "*".into(),
            reason: "partition is not a congruence".into(),
        });
    }
    let q = finset::quotient_from_classes(a.carrier(), |i| theta.block[i]);
    let classes = theta.classes();
    let qmap = q.table().to_vec();
    // Quotient classes are ordered by first member, like the congruence.
    let algebra = FiniteAlgebra::from_fn(a.signature.clone(), q.cod().clone(), |op, args| {
        let reps: Vec<usize> = args.iter().map(|&c| classes[c][0]).collect();
        qmap[a.apply(op, &reps)]
    })?;
    Ok(AlgHom {
        src: a.clone(),
        tgt: Arc::new(algebra),
        map: qmap,
    })
}

/// An equation between terms, read as universally quantified over
/// `context` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    pub context: usize,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        let context = lhs.context_size().max(rhs.context_size());
        Identity { lhs, rhs, context }
    }

    pub fn display<'a>(&'a self, names: &'a VarNames) -> IdentityDisplay<'a> {
        IdentityDisplay { id: self, names }
    }

    /// Same identity up to swapping sides.
    pub fn same_up_to_symmetry(&self, other: &Identity) -> bool {
        (self.lhs == other.lhs && self.rhs == other.rhs) || (self.lhs == other.rhs && self.rhs == other.lhs)
    }
}

pub struct IdentityDisplay<'a> {
    id: &'a Identity,
    names: &'a VarNames,
}

impl fmt::Display for IdentityDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≈ {}", self.id.lhs.display(self.names), self.id.rhs.display(self.names))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&VarNames::default()))
    }
}

pub fn satisfies(a: &FiniteAlgebra, id: &Identity) -> Result<bool, BirkhoffError> {
    Ok(find_violation(a, id, Exec::default())?.is_none())
}

/// The first assignment (in mixed-radix order) on which the sides differ.
pub fn find_violation(a: &FiniteAlgebra, id: &Identity, exec: Exec) -> Result<Option<Vec<usize>>, BirkhoffError> {
    a.check_term(&id.lhs)?;
    a.check_term(&id.rhs)?;
    let context = id.context.max(id.lhs.context_size()).max(id.rhs.context_size());
    let n = a.size();
    let total = checked_pow(n, context).ok_or_else(|| BirkhoffError::BoundsTooLarge("assignments".into()))?;
    Ok(exec.find_map_first_range(total, |e| {
        let env = decode(e, n, context);
        (a.eval_unchecked(&id.lhs, &env) != a.eval_unchecked(&id.rhs, &env)).then_some(env)
    }))
}

/// All non-empty subalgebras, with inclusions, ordered by size and then by
/// member indices.
pub fn subalgebras(a: &Arc<FiniteAlgebra>) -> Result<Vec<AlgHom>, BirkhoffError> {
    let start = a.closure(&[]);
    let mut seen: HashSet<Vec<bool>> = HashSet::from([start.clone()]);
    let mut queue = vec![start];
    let mut found = Vec::new();
    while let Some(s) = queue.pop() {
        for x in 0..a.size() {
            if s[x] {
                continue;
            }
            let mut seeds: Vec<usize> = (0..a.size()).filter(|&i| s[i]).collect();
            seeds.push(x);
            let t = a.closure(&seeds);
            if seen.insert(t.clone()) {
                queue.push(t);
            }
        }
        found.push(s);
    }
    let mut masks: Vec<Vec<usize>> = found
        .iter()
        .map(|m| (0..a.size()).filter(|&i| m[i]).collect::<Vec<_>>())
        .filter(|m| !m.is_empty())
        .collect();
    masks.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    masks
        .into_iter()
        .map(|members| {
            let mut mask = vec![false; a.size()];
            members.iter().for_each(|&i| mask[i] = true);
            a.subalgebra(&mask)
        })
        .collect()
}

/// Restricted-growth strings of length `n`, in lexicographic order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for c in 0..=limit {
            prefix.push(c);
            go(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, &mut out);
    out
}

pub fn congruences(a: &FiniteAlgebra) -> Result<Vec<Congruence>, BirkhoffError> {
    congruences_bounded(a, CONGRUENCE_BOUND, Exec::default())
}

/// Every compatible partition, by exhaustive enumeration.
pub fn congruences_bounded(a: &FiniteAlgebra, bound: usize, exec: Exec) -> Result<Vec<Congruence>, BirkhoffError> {
    if a.size() > bound {
        return Err(BirkhoffError::CarrierTooLarge { size: a.size(), bound });
    }
    let all = partitions(a.size());
    Ok(exec.filter_map(&all, |p| {
        let c = Congruence { block: p.clone() };
        c.is_compatible(a).then_some(c)
    }))
}

/// The product with its projections. A single factor is returned as is.
pub fn product_algebra(factors: &[Arc<FiniteAlgebra>]) -> Result<(Arc<FiniteAlgebra>, Vec<AlgHom>), BirkhoffError> {
    let first = factors.first().ok_or(BirkhoffError::EmptyList)?;
    if factors.iter().any(|f| f.signature != first.signature) {
        return Err(BirkhoffError::SignatureMismatch("factors have different signatures".into()));
    }
    if factors.len() == 1 {
        return Ok((first.clone(), vec![AlgHom::identity(first)]));
    }
    let carriers: Vec<Arc<FinSet>> = factors.iter().map(|f| f.carrier.clone()).collect();
    let (carrier, projections) = finset::product(&carriers)?;
    let algebra = FiniteAlgebra::from_fn(first.signature.clone(), carrier, |op, args| {
        let coords: Vec<Vec<usize>> = args.iter().map(|&x| finset::unflatten(x, &carriers)).collect();
        let out: Vec<usize> = (0..factors.len())
            .map(|j| {
                let column: Vec<usize> = coords.iter().map(|c| c[j]).collect();
                factors[j].apply(op, &column)
            })
            .collect();
        finset::flatten(&out, &carriers)
    })?;
    let product = Arc::new(algebra);
    let projections = projections
        .into_iter()
        .zip(factors)
        .map(|(p, f)| AlgHom {
            src: product.clone(),
            tgt: f.clone(),
            map: p.table().to_vec(),
        })
        .collect();
    Ok((product, projections))
}

/// Closure of generator pairs in `A × B`; `Some(map)` when it is the graph of
/// a function on all of `A`.
fn extend_to_hom(a: &FiniteAlgebra, b: &FiniteAlgebra, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let seeds: Vec<(usize, usize)> = gens.iter().copied().zip(images.iter().copied()).collect();
    let (pairs, _) = close_under(seeds, &a.arities(), usize::MAX, |op, args| {
        let xs: Vec<usize> = args.iter().map(|p| p.0).collect();
        let ys: Vec<usize> = args.iter().map(|p| p.1).collect();
        (a.apply(op, &xs), b.apply(op, &ys))
    })?;
    let mut map = vec![usize::MAX; a.size()];
    for (x, y) in pairs {
        if map[x] != usize::MAX && map[x] != y {
            return None;
        }
        map[x] = y;
    }
    map.iter().all(|&y| y != usize::MAX).then_some(map)
}

/// Every homomorphism `A -> B`, found by extending images of a generating
/// set.
pub fn homomorphisms(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>, exec: Exec) -> Result<Vec<AlgHom>, BirkhoffError> {
    if a.signature != b.signature {
        return Err(BirkhoffError::SignatureMismatch("homomorphism between different signatures".into()));
    }
    let gens = a.generating_set();
    let total = checked_pow(b.size(), gens.len())
        .filter(|&t| t <= HSP_SEARCH_LIMIT)
        .ok_or_else(|| BirkhoffError::BoundsTooLarge("too many generator images".into()))?;
    let maps = exec.map_range(total, |idx| {
        let images = decode(idx, b.size(), gens.len());
        extend_to_hom(a, b, &gens, &images)
    });
    Ok(maps
        .into_iter()
        .flatten()
        .map(|map| AlgHom {
            src: a.clone(),
            tgt: b.clone(),
            map,
        })
        .collect())
}

/// Some isomorphism `A -> B`, if the two are isomorphic.
pub fn find_isomorphism(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<Option<AlgHom>, BirkhoffError> {
    if a.signature != b.signature {
        return Err(BirkhoffError::SignatureMismatch("isomorphism between different signatures".into()));
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    let gens = a.generating_set();
    let total = checked_pow(b.size(), gens.len())
        .filter(|&t| t <= HSP_SEARCH_LIMIT)
        .ok_or_else(|| BirkhoffError::BoundsTooLarge("too many generator images".into()))?;
    let found = Exec::default().find_map_first_range(total, |idx| {
        let images = decode(idx, b.size(), gens.len());
        let map = extend_to_hom(a, b, &gens, &images)?;
        let mut hit = vec![false; b.size()];
        map.iter().for_each(|&y| hit[y] = true);
        hit.iter().all(|&h| h).then_some(map)
    });
    Ok(found.map(|map| AlgHom {
        src: a.clone(),
        tgt: b.clone(),
        map,
    }))
}

/// The unique `ψ` with `ψ ∘ q = φ` for a surjective `q`, if it exists.
pub fn factor_through_surjection(q: &AlgHom, phi: &AlgHom) -> Result<Option<AlgHom>, BirkhoffError> {
    if q.src != phi.src {
        return Err(BirkhoffError::Equation(EquationError::DomainMismatch));
    }
    if !q.is_surjective() {
        return Ok(None);
    }
    let mut map = vec![usize::MAX; q.tgt.size()];
    for a in 0..q.src.size() {
        let slot = &mut map[q.map[a]];
        if *slot != usize::MAX && *slot != phi.map[a] {
            return Ok(None);
        }
        *slot = phi.map[a];
    }
    Ok(AlgHom::new(q.tgt.clone(), phi.tgt.clone(), map).ok())
}

/// Evidence that `B` is a homomorphic image of a subalgebra of `A^k`: the
/// subalgebra generated by `generators` maps onto `B` by `map`, with kernel
/// `congruence`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HspWitness {
    pub k: usize,
    pub generators: Vec<Vec<usize>>,
    pub generator_images: Vec<usize>,
    pub subalgebra: Vec<Vec<usize>>,
    pub map: Vec<usize>,
    pub congruence: Congruence,
}

impl HspWitness {
    /// Rebuilds the subalgebra of `A^k`, checks the map is a surjective
    /// homomorphism with the recorded kernel, and returns the induced
    /// isomorphism `S/θ -> B`.
    pub fn replay(&self, a: &FiniteAlgebra, b: &Arc<FiniteAlgebra>) -> Result<AlgHom, BirkhoffError> {
        let fail = |reason: &str| BirkhoffError::BadTable {
            symbol: "witness".into(),
            reason: reason.to_string(),
        };
        if a.signature != b.signature {
            return Err(BirkhoffError::SignatureMismatch("witness algebras differ in signature".into()));
        }
        let elems = power_closure(a, self.k, &self.generators);
        if elems != self.subalgebra {
            return Err(fail("generators do not generate the recorded subalgebra"));
        }
        let index: HashMap<&Vec<usize>, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let labels: Vec<String> = elems
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().map(|&x| a.carrier.label(x)).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let carrier = Arc::new(FinSet::new(labels)?);
        let s = Arc::new(FiniteAlgebra::from_fn(a.signature.clone(), carrier, |op, args| {
            let out: Vec<usize> = (0..self.k)
                .map(|j| {
                    let column: Vec<usize> = args.iter().map(|&i| elems[i][j]).collect();
                    a.apply(op, &column)
                })
                .collect();
            index[&out]
        })?);
        let h = AlgHom::new(s.clone(), b.clone(), self.map.clone()).map_err(|_| fail("map is not a homomorphism"))?;
        if !h.is_surjective() {
            return Err(fail("map is not surjective"));
        }
        if h.kernel() != self.congruence {
            return Err(fail("kernel differs from the recorded congruence"));
        }
        let q = quotient(&s, &self.congruence)?;
        let induced = factor_through_surjection(&q, &h)?.ok_or_else(|| fail("map does not factor"))?;
        if !induced.is_bijective() {
            return Err(fail("induced map is not an isomorphism"));
        }
        Ok(induced)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HspAnswer {
    Yes(HspWitness),
    /// No witness with `k ≤ k_searched`. When `violated` is present, `B`
    /// fails an identity of `A` and so lies outside HSP(A) outright.
    NoWithinBounds {
        k_searched: usize,
        violated: Option<(Identity, Vec<usize>)>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HspOptions {
    pub k_max: usize,
    /// Bounds for the identities searched for a certificate on failure.
    pub identity_vars: usize,
    pub identity_depth: usize,
}

impl HspOptions {
    pub fn for_target(b: &FiniteAlgebra) -> Self {
        HspOptions {
            k_max: b.size().max(1),
            identity_vars: 2,
            identity_depth: 2,
        }
    }
}

/// Is `B` in HSP(A) with exponent at most `k_max`?
pub fn hsp_member(b: &Arc<FiniteAlgebra>, a: &Arc<FiniteAlgebra>, k_max: usize) -> Result<HspAnswer, BirkhoffError> {
    let opts = HspOptions {
        k_max,
        ..HspOptions::for_target(b)
    };
    hsp_member_with(b, a, opts, Exec::default())
}

pub fn hsp_member_with(
    b: &Arc<FiniteAlgebra>,
    a: &Arc<FiniteAlgebra>,
    opts: HspOptions,
    exec: Exec,
) -> Result<HspAnswer, BirkhoffError> {
    if a.signature != b.signature {
        return Err(BirkhoffError::SignatureMismatch("algebras have different signatures".into()));
    }
    let gens = b.generating_set();
    let mut k_searched = 0;
    for k in 1..=opts.k_max {
        let Some(width) = checked_pow(a.size(), k) else { break };
        let Some(total) = checked_pow(width, gens.len()).filter(|&t| t <= HSP_SEARCH_LIMIT) else {
            break;
        };
        k_searched = k;
        let found = exec.find_map_first_range(total, |idx| {
            let generators: Vec<Vec<usize>> = decode(idx, width, gens.len())
                .into_iter()
                .map(|c| decode(c, a.size(), k))
                .collect();
            let map = graph_over_power(a, b, k, &generators, &gens)?;
            Some((generators, map))
        });
        if let Some((generators, graph)) = found {
            let subalgebra = power_closure(a, k, &generators);
            let map: Vec<usize> = subalgebra
                .iter()
                .map(|t| graph[encode(t, a.size())].expect("closed graph covers the subalgebra"))
                .collect();
            let congruence = Congruence::from_labels(&map);
            return Ok(HspAnswer::Yes(HspWitness {
                k,
                generators,
                generator_images: gens,
                subalgebra,
                map,
                congruence,
            }));
        }
    }
    let violated = violated_identity(a, b, opts.identity_vars, opts.identity_depth, exec)?;
    Ok(HspAnswer::NoWithinBounds { k_searched, violated })
}

/// The subalgebra of `A^k` generated by `generators`, in closure order.
fn power_closure(a: &FiniteAlgebra, k: usize, generators: &[Vec<usize>]) -> Vec<Vec<usize>> {
    close_under(generators.to_vec(), &a.arities(), usize::MAX, |op, args| {
        (0..k)
            .map(|j| {
                let column: Vec<usize> = args.iter().map(|t| t[j]).collect();
                a.apply(op, &column)
            })
            .collect::<Vec<usize>>()
    })
    .expect("no limit")
    .0
}

/// Closes the pairs `(generators[i], images[i])` in `A^k × B`; returns the
/// result as a map indexed by encoded tuple when it is the graph of a
/// function. Stops at the first tuple reached with two values.
fn graph_over_power(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    k: usize,
    generators: &[Vec<usize>],
    images: &[usize],
) -> Option<Vec<Option<usize>>> {
    let n = a.size();
    let mut graph: Vec<Option<usize>> = vec![None; checked_pow(n, k)?];
    let mut elems: Vec<(Vec<usize>, usize)> = Vec::new();
    let add = |t: Vec<usize>, y: usize, graph: &mut Vec<Option<usize>>, elems: &mut Vec<(Vec<usize>, usize)>| {
        let slot = &mut graph[encode(&t, n)];
        match *slot {
            Some(v) => v == y,
            None => {
                *slot = Some(y);
                elems.push((t, y));
                true
            }
        }
    };
    for (t, &y) in generators.iter().zip(images) {
        if !add(t.clone(), y, &mut graph, &mut elems) {
            return None;
        }
    }
    let arities = a.arities();
    for (op, &ar) in arities.iter().enumerate() {
        if ar == 0 && !add(vec![a.apply(op, &[]); k], b.apply(op, &[]), &mut graph, &mut elems) {
            return None;
        }
    }
    let mut old = 0;
    loop {
        let len = elems.len();
        for (op, &ar) in arities.iter().enumerate() {
            if ar == 0 {
                continue;
            }
            let mut ok = true;
            let mut fresh = Vec::new();
            for_each_tuple(len, ar, |idx| {
                if !ok || idx.iter().all(|&i| i < old) {
                    return;
                }
                let t: Vec<usize> = (0..k)
                    .map(|j| {
                        let column: Vec<usize> = idx.iter().map(|&i| elems[i].0[j]).collect();
                        a.apply(op, &column)
                    })
                    .collect();
                let ys: Vec<usize> = idx.iter().map(|&i| elems[i].1).collect();
                let y = b.apply(op, &ys);
                match graph[encode(&t, n)] {
                    Some(v) if v != y => ok = false,
                    Some(_) => {}
                    None => fresh.push((t, y)),
                }
            });
            if !ok {
                return None;
            }
            for (t, y) in fresh {
                if !add(t, y, &mut graph, &mut elems) {
                    return None;
                }
            }
        }
        if elems.len() == len {
            return Some(graph);
        }
        old = len;
    }
}

/// The first identity of `A` (within the bounds) that `B` fails, with a
/// violating assignment.
pub fn violated_identity(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    n_vars: usize,
    depth: usize,
    exec: Exec,
) -> Result<Option<(Identity, Vec<usize>)>, BirkhoffError> {
    let ids = match identities_with(a, IdentityOptions::new(n_vars, depth), exec) {
        Ok(ids) => ids,
        Err(BirkhoffError::BoundsTooLarge(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    for id in ids {
        if let Some(env) = find_violation(b, &id, exec)? {
            return Ok(Some((id, env)));
        }
    }
    Ok(None)
}

/// Options for [`identities_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityOptions {
    pub n_vars: usize,
    pub depth: usize,
    /// Keep every pair of distinct terms with equal term functions.
    pub raw: bool,
    /// Step budget for the derivability check used to drop redundant pairs.
    pub dedup_budget: usize,
}

impl IdentityOptions {
    pub fn new(n_vars: usize, depth: usize) -> Self {
        IdentityOptions {
            n_vars,
            depth,
            raw: false,
            dedup_budget: 64,
        }
    }
}

/// Terms over `sig` in `n_vars` variables up to `depth`, by depth, with the
/// argument indices each application was built from.
fn enumerate_terms(sig: &Signature, n_vars: usize, depth: usize) -> Result<Vec<(Term, Option<(usize, Vec<usize>)>)>, BirkhoffError> {
    let mut terms: Vec<(Term, Option<(usize, Vec<usize>)>)> = (0..n_vars).map(|v| (Term::Var(v), None)).collect();
    let mut prev_end = 0;
    for d in 1..=depth {
        let end = terms.len();
        let mut level = Vec::new();
        for op in 0..sig.len() {
            let (name, k) = sig.op(op);
            if k == 0 {
                if d == 1 {
                    level.push((Term::constant(name), Some((op, Vec::new()))));
                }
                continue;
            }
            let count = checked_pow(end, k).unwrap_or(usize::MAX);
            if count > TERM_LIMIT || terms.len() + level.len() > TERM_LIMIT {
                return Err(BirkhoffError::BoundsTooLarge(format!(
                    "more than {TERM_LIMIT} terms at depth {d}"
                )));
            }
            for_each_tuple(end, k, |t| {
                if t.iter().all(|&i| i < prev_end) {
                    return;
                }
                let args = t.iter().map(|&i| terms[i].0.clone()).collect();
                level.push((Term::app(name, args), Some((op, t.to_vec()))));
            });
        }
        if terms.len() + level.len() > TERM_LIMIT {
            return Err(BirkhoffError::BoundsTooLarge(format!("more than {TERM_LIMIT} terms")));
        }
        terms.extend(level);
        prev_end = end;
    }
    Ok(terms)
}

pub fn identities_of(a: &FiniteAlgebra, n_vars: usize, depth: usize) -> Result<Vec<Identity>, BirkhoffError> {
    identities_with(a, IdentityOptions::new(n_vars, depth), Exec::default())
}

/// Pairs of enumerated terms with equal term functions on `A`. Each identity
/// is oriented from the larger term to the canonical (smallest) member of its
/// class. Unless `raw` is set, pairs derivable from those already kept are
/// dropped.
pub fn identities_with(a: &FiniteAlgebra, opts: IdentityOptions, exec: Exec) -> Result<Vec<Identity>, BirkhoffError> {
    let terms = enumerate_terms(&a.signature, opts.n_vars, opts.depth)?;
    let n = a.size();
    let width = checked_pow(n, opts.n_vars)
        .filter(|w| w.saturating_mul(terms.len()) <= TABLE_CELL_LIMIT)
        .ok_or_else(|| BirkhoffError::BoundsTooLarge("term-function tables too large".into()))?;

    // Term functions, level by level (arguments always precede the term).
    let mut tfs: Vec<Vec<usize>> = Vec::with_capacity(terms.len());
    let mut i = 0;
    while i < terms.len() {
        let mut j = i;
        while j < terms.len() && terms[j].1.as_ref().is_none_or(|(_, args)| args.iter().all(|&x| x < i)) {
            j += 1;
        }
        let done = &tfs;
        let batch = exec.map(&terms[i..j], |(t, built)| match (t, built) {
            (Term::Var(v), _) => (0..width).map(|e| decode(e, n, opts.n_vars)[*v]).collect(),
            (_, Some((op, args))) => (0..width)
                .map(|e| {
                    let vals: Vec<usize> = args.iter().map(|&x| done[x][e]).collect();
                    a.apply(*op, &vals)
                })
                .collect(),
            _ => unreachable!("applications carry their arguments"),
        });
        tfs.extend(batch);
        i = j;
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut by_tf: HashMap<&Vec<usize>, usize> = HashMap::new();
    for (idx, tf) in tfs.iter().enumerate() {
        let c = *by_tf.entry(tf).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(idx);
    }
    for class in &mut classes {
        class.sort_by(|&x, &y| canonical_cmp(&terms[x].0, &terms[y].0));
    }
    classes.sort_by(|x, y| canonical_cmp(&terms[x[0]].0, &terms[y[0]].0));

    if opts.raw {
        let mut out = Vec::new();
        for class in &classes {
            for (p, &x) in class.iter().enumerate() {
                for &y in &class[..p] {
                    out.push(Identity {
                        lhs: terms[x].0.clone(),
                        rhs: terms[y].0.clone(),
                        context: opts.n_vars,
                    });
                }
                if out.len() > TERM_LIMIT * 10 {
                    return Err(BirkhoffError::BoundsTooLarge("too many raw identities".into()));
                }
            }
        }
        return Ok(out);
    }

    let mut candidates: Vec<(usize, usize)> = classes
        .iter()
        .flat_map(|class| class[1..].iter().map(move |&x| (x, class[0])))
        .collect();
    candidates.sort_by(|p, q| {
        canonical_cmp(&terms[p.0].0, &terms[q.0].0).then_with(|| canonical_cmp(&terms[p.1].0, &terms[q.1].0))
    });
    let mut kept: Vec<Axiom> = Vec::new();
    let mut out = Vec::new();
    for (x, rep) in candidates {
        let (lhs, rhs) = (&terms[x].0, &terms[rep].0);
        if normal_form(&kept, lhs) == normal_form(&kept, rhs) {
            continue;
        }
        if !kept.is_empty() {
            let theory = TheoryPresentation::new(a.signature.clone(), kept.clone())?;
            let budget = Budget::steps(opts.dedup_budget.max(1));
            if congruent(&theory, lhs, rhs, budget)?.is_provable() {
                continue;
            }
        }
        kept.push(Axiom::new(lhs.clone(), rhs.clone()));
        out.push(Identity {
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            context: opts.n_vars,
        });
    }
    Ok(out)
}

/// Rewrites with `rules` read left to right, only where that makes the
/// subterm canonically smaller, for a bounded number of steps. Every step is
/// an axiom instance, so equal results prove the inputs congruent.
fn normal_form(rules: &[Axiom], t: &Term) -> Term {
    let mut t = t.clone();
    'steps: for _ in 0..256 {
        for position in t.positions() {
            let sub = t.subterm(&position).expect("valid position");
            for rule in rules {
                let mut sigma = Substitution::new();
                if !match_term(&rule.lhs, sub, &mut sigma) || !rule.rhs.vars().iter().all(|v| sigma.get(*v).is_some()) {
                    continue;
                }
                let replaced = sigma.apply(&rule.rhs);
                if canonical_cmp(&replaced, sub).is_lt() {
                    t = t.replace_at(&position, replaced).expect("valid position");
                    continue 'steps;
                }
            }
        }
        break;
    }
    t
}

/// The free algebra on `n` generators in the variety generated by `A`,
/// realized as the algebra of `n`-ary term functions on `A`.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    pub algebra: Arc<FiniteAlgebra>,
    /// The term function of each element, over all `|A|^n` assignments.
    pub functions: Vec<Vec<usize>>,
    /// A term inducing each element; also its label.
    pub representatives: Vec<Term>,
    pub n: usize,
    base: Arc<FiniteAlgebra>,
}

impl FreeAlgebra {
    /// The element of generator `i` (the `i`-th projection).
    pub fn generator(&self, i: usize) -> usize {
        let width = self.functions.first().map_or(0, Vec::len);
        let projection: Vec<usize> = (0..width).map(|e| decode(e, self.base.size(), self.n)[i]).collect();
        self.functions
            .iter()
            .position(|f| *f == projection)
            .expect("projections are generators")
    }

    /// The universal map from terms: the element a term evaluates to.
    pub fn evaluate(&self, t: &Term) -> Result<usize, BirkhoffError> {
        let tf = self.base.term_function(t, self.n)?;
        Ok(self
            .functions
            .iter()
            .position(|f| *f == tf)
            .expect("term functions are closed under the operations"))
    }
}

pub fn free_algebra_in_variety(a: &Arc<FiniteAlgebra>, n: usize) -> Result<FreeAlgebra, BirkhoffError> {
    let size = a.size();
    let width = checked_pow(size, n)
        .filter(|&w| w <= 4096)
        .ok_or_else(|| BirkhoffError::BoundsTooLarge(format!("{size}^{n} assignments")))?;
    let projections: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..width).map(|e| decode(e, size, n)[i]).collect())
        .collect();
    let (functions, provenance) = close_under(projections, &a.arities(), FREE_ALGEBRA_LIMIT, |op, args| {
        (0..width)
            .map(|e| {
                let vals: Vec<usize> = args.iter().map(|f| f[e]).collect();
                a.apply(op, &vals)
            })
            .collect::<Vec<usize>>()
    })
    .ok_or_else(|| BirkhoffError::BoundsTooLarge(format!("more than {FREE_ALGEBRA_LIMIT} term functions")))?;

    let mut representatives: Vec<Term> = Vec::with_capacity(functions.len());
    for (i, p) in provenance.iter().enumerate() {
        let t = match p {
            None => Term::Var(i),
            Some((op, args)) => Term::app(
                a.signature.op(*op).0,
                args.iter().map(|&j| representatives[j].clone()).collect(),
            ),
        };
        representatives.push(t);
    }
    let names = VarNames::standard_avoiding(&a.signature);
    let labels: Vec<String> = representatives.iter().map(|t| t.display(&names).to_string()).collect();
    let carrier = Arc::new(FinSet::new(labels)?);
    let index: HashMap<&Vec<usize>, usize> = functions.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let algebra = FiniteAlgebra::from_fn(a.signature.clone(), carrier, |op, args| {
        let f: Vec<usize> = (0..width)
            .map(|e| {
                let vals: Vec<usize> = args.iter().map(|&x| functions[x][e]).collect();
                a.apply(op, &vals)
            })
            .collect();
        index[&f]
    })?;
    Ok(FreeAlgebra {
        algebra: Arc::new(algebra),
        functions,
        representatives,
        n,
        base: a.clone(),
    })
}

pub fn group_signature() -> Signature {
    Signature::new([("mul", 2), ("inv", 1), ("e", 0)]).expect("distinct symbols")
}

const MUL: usize = 0;
const INV: usize = 1;
const UNIT: usize = 2;

/// A finite group as an algebra over `mul/2, inv/1, e/0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    algebra: Arc<FiniteAlgebra>,
}

impl FiniteGroup {
    /// From a multiplication table (row = left factor); the unit and
    /// inverses are derived and all axioms checked.
    pub fn from_cayley(carrier: Arc<FinSet>, mul: Vec<usize>) -> Result<Self, BirkhoffError> {
        let n = carrier.len();
        if n == 0 {
            return Err(BirkhoffError::NotAGroup("empty carrier".into()));
        }
        if mul.len() != n * n || mul.iter().any(|&v| v >= n) {
            return Err(BirkhoffError::NotAGroup(format!("expected {} table entries within the carrier", n * n)));
        }
        let m = |a: usize, b: usize| mul[a * n + b];
        let unit = (0..n)
            .find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))
            .ok_or_else(|| BirkhoffError::NotAGroup("no identity element".into()))?;
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            let b = (0..n)
                .find(|&b| m(a, b) == unit && m(b, a) == unit)
                .ok_or_else(|| BirkhoffError::NotAGroup(format!("`{}` has no inverse", carrier.label(a))))?;
            inv.push(b);
        }
        let algebra = FiniteAlgebra::new(group_signature(), carrier, vec![mul.clone(), inv, vec![unit]])?;
        FiniteGroup::from_algebra(algebra)
    }

    pub fn from_algebra(algebra: FiniteAlgebra) -> Result<Self, BirkhoffError> {
        if algebra.signature != group_signature() {
            return Err(BirkhoffError::NotAGroup("signature must be mul/2, inv/1, e/0".into()));
        }
        let x = || Term::Var(0);
        let y = || Term::Var(1);
        let z = || Term::Var(2);
        let mul = |a: Term, b: Term| Term::app("mul", vec![a, b]);
        let inv = |a: Term| Term::app("inv", vec![a]);
        let e = || Term::constant("e");
        let axioms = [
            ("associativity", Identity::new(mul(mul(x(), y()), z()), mul(x(), mul(y(), z())))),
            ("left unit", Identity::new(mul(e(), x()), x())),
            ("right unit", Identity::new(mul(x(), e()), x())),
            ("left inverse", Identity::new(mul(inv(x()), x()), e())),
            ("right inverse", Identity::new(mul(x(), inv(x())), e())),
        ];
        for (name, id) in axioms {
            if !satisfies(&algebra, &id)? {
                return Err(BirkhoffError::NotAGroup(format!("{name} fails")));
            }
        }
        Ok(FiniteGroup {
            algebra: Arc::new(algebra),
        })
    }

    /// `Z/n` with labels `0..n-1`.
    pub fn cyclic(n: usize) -> Result<Self, BirkhoffError> {
        let carrier = Arc::new(FinSet::range(n));
        let mul = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        FiniteGroup::from_cayley(carrier, mul)
    }

    /// The permutation group generated by `generators` (images of
    /// `0..degree`), labelled in cycle notation with points counted from 1.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>]) -> Result<Self, BirkhoffError> {
        let identity: Vec<usize> = (0..degree).collect();
        let mut seeds = vec![identity];
        seeds.extend(generators.iter().cloned());
        let (elems, _) = close_under(seeds, &[2], 100_000, |_, args| {
            // (p·q)(i) = p(q(i))
            (0..degree).map(|i| args[0][args[1][i]]).collect::<Vec<usize>>()
        })
        .ok_or_else(|| BirkhoffError::BoundsTooLarge("permutation group too large".into()))?;
        let index: HashMap<&Vec<usize>, usize> = elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let labels: Vec<String> = elems.iter().map(|p| cycle_notation(p)).collect();
        let n = elems.len();
        let mut mul = Vec::with_capacity(n * n);
        for p in &elems {
            for q in &elems {
                let pq: Vec<usize> = (0..degree).map(|i| p[q[i]]).collect();
                mul.push(index[&pq]);
            }
        }
        FiniteGroup::from_cayley(Arc::new(FinSet::new(labels)?), mul)
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn carrier(&self) -> &Arc<FinSet> {
        self.algebra.carrier()
    }

    pub fn order(&self) -> usize {
        self.algebra.size()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.algebra.apply(MUL, &[a, b])
    }

    pub fn inv(&self, a: usize) -> usize {
        self.algebra.apply(INV, &[a])
    }

    pub fn unit(&self) -> usize {
        self.algebra.apply(UNIT, &[])
    }

    pub fn element(&self, label: &str) -> Result<usize, BirkhoffError> {
        self.carrier()
            .index_of(label)
            .ok_or_else(|| BirkhoffError::ElementNotInG(label.to_string()))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Conjugation `x ↦ g x g⁻¹`.
    pub fn conjugation(&self, g: usize) -> AlgHom {
        let map = (0..self.order()).map(|x| self.mul(self.mul(g, x), self.inv(g))).collect();
        AlgHom {
            src: self.algebra.clone(),
            tgt: self.algebra.clone(),
            map,
        }
    }

    /// The subgroup generated by all commutators, as a mask.
    pub fn commutator_subgroup(&self) -> Vec<bool> {
        let n = self.order();
        let comms: Vec<usize> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))))
            .collect();
        self.algebra.closure(&comms)
    }
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push((i + 1).to_string());
            i = p[i];
        }
        let sep = if p.len() > 9 { "," } else { "" };
        out.push_str(&format!("({})", cycle.join(sep)));
    }
    if out.is_empty() {
        "e".to_string()
    } else {
        out
    }
}

/// Finite algebras over one signature and their homomorphisms. Groups use
/// it with the group signature: every construction below stays inside the
/// variety of the inputs.
#[derive(Clone, Copy, Debug, Default)]
pub struct FinAlgCat;

impl CompCategory for FinAlgCat {
    type Obj = Arc<FiniteAlgebra>;
    type Mor = AlgHom;

    fn source(&self, f: &AlgHom) -> Arc<FiniteAlgebra> {
        f.src.clone()
    }

    fn target(&self, f: &AlgHom) -> Arc<FiniteAlgebra> {
        f.tgt.clone()
    }

    fn identity(&self, a: &Arc<FiniteAlgebra>) -> AlgHom {
        AlgHom::identity(a)
    }

    fn compose(&self, g: &AlgHom, f: &AlgHom) -> Result<AlgHom, EquationError> {
        g.compose(f).map_err(|_| EquationError::NotComposable)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            coproducts: false,
            cokernel_pairs: false,
            ..Capabilities::all()
        }
    }

    fn equalizer(&self, p: &AlgHom, q: &AlgHom) -> Result<AlgHom, EquationError> {
        if p.src != q.src || p.tgt != q.tgt {
            return Err(EquationError::NotParallel);
        }
        let mask: Vec<bool> = (0..p.src.size()).map(|a| p.map[a] == q.map[a]).collect();
        p.src.subalgebra(&mask).map_err(instance)
    }

    fn intersect(&self, monos: &[AlgHom]) -> Result<AlgHom, EquationError> {
        let first = monos.first().ok_or(EquationError::EmptyList)?;
        if monos.iter().any(|m| m.tgt != first.tgt) {
            return Err(EquationError::CodMismatch);
        }
        if monos.iter().any(|m| !m.is_injective()) {
            return Err(EquationError::Instance("intersection of a non-injective map".into()));
        }
        let mut mask = vec![true; first.tgt.size()];
        for m in monos {
            let image = m.image_mask();
            mask.iter_mut().zip(image).for_each(|(a, b)| *a &= b);
        }
        first.tgt.subalgebra(&mask).map_err(instance)
    }

    fn tuple(&self, legs: &[AlgHom]) -> Result<AlgHom, EquationError> {
        let first = legs.first().ok_or(EquationError::EmptyList)?;
        if legs.iter().any(|l| l.src != first.src) {
            return Err(EquationError::DomainMismatch);
        }
        let targets: Vec<Arc<FiniteAlgebra>> = legs.iter().map(|l| l.tgt.clone()).collect();
        let (product, _) = product_algebra(&targets).map_err(instance)?;
        let carriers: Vec<Arc<FinSet>> = targets.iter().map(|t| t.carrier.clone()).collect();
        let map = (0..first.src.size())
            .map(|a| {
                let coords: Vec<usize> = legs.iter().map(|l| l.map[a]).collect();
                if legs.len() == 1 {
                    coords[0]
                } else {
                    finset::flatten(&coords, &carriers)
                }
            })
            .collect();
        Ok(AlgHom {
            src: first.src.clone(),
            tgt: product,
            map,
        })
    }

    fn coequalizer(&self, p: &AlgHom, q: &AlgHom) -> Result<AlgHom, EquationError> {
        if p.src != q.src || p.tgt != q.tgt {
            return Err(EquationError::NotParallel);
        }
        let pairs: Vec<(usize, usize)> = (0..p.src.size()).map(|a| (p.map[a], q.map[a])).collect();
        let theta = Congruence::generated_by(&p.tgt, &pairs);
        quotient(&p.tgt, &theta).map_err(instance)
    }

    fn pullback(&self, f: &AlgHom, m: &AlgHom) -> Result<(AlgHom, AlgHom), EquationError> {
        if f.tgt != m.tgt {
            return Err(EquationError::CodMismatch);
        }
        let (product, projections) = product_algebra(&[f.src.clone(), m.src.clone()]).map_err(instance)?;
        let mask: Vec<bool> = (0..product.size())
            .map(|i| f.map[projections[0].map[i]] == m.map[projections[1].map[i]])
            .collect();
        let incl = product.subalgebra(&mask).map_err(instance)?;
        let left = projections[0].compose(&incl).map_err(instance)?;
        let right = projections[1].compose(&incl).map_err(instance)?;
        Ok((left, right))
    }

    fn is_mono(&self, f: &AlgHom) -> Result<bool, EquationError> {
        Ok(f.is_injective())
    }

    fn factor(&self, f: &AlgHom, g: &AlgHom) -> Result<Option<AlgHom>, EquationError> {
        if f.tgt != g.tgt {
            return Err(EquationError::CodMismatch);
        }
        if g.is_injective() {
            let mut preimage = vec![usize::MAX; g.tgt.size()];
            g.map.iter().enumerate().for_each(|(y, &t)| preimage[t] = y);
            let map: Option<Vec<usize>> = f
                .map
                .iter()
                .map(|&t| (preimage[t] != usize::MAX).then_some(preimage[t]))
                .collect();
            return Ok(map.map(|map| AlgHom {
                src: f.src.clone(),
                tgt: g.src.clone(),
                map,
            }));
        }
        let homs = homomorphisms(&f.src, &g.src, Exec::default()).map_err(instance)?;
        Ok(homs.into_iter().find(|h| h.map.iter().map(|&y| g.map[y]).eq(f.map.iter().copied())))
    }
}

fn instance(e: BirkhoffError) -> EquationError {
    match e {
        BirkhoffError::Equation(e) => e,
        other => EquationError::Instance(other.to_string()),
    }
}

/// `C_G(S)`, the general solution of `{ φ_g ≈ id }` for `g ∈ S`, where `φ_g`
/// is conjugation by `g`.
pub fn centralizer(g: &FiniteGroup, s: &[usize]) -> Result<SubobjectMono, BirkhoffError> {
    if let Some(&bad) = s.iter().find(|&&x| x >= g.order()) {
        return Err(BirkhoffError::ElementNotInG(bad.to_string()));
    }
    if s.is_empty() {
        return Ok(SubobjectMono::full(g.carrier().clone()));
    }
    let id = AlgHom::identity(g.algebra());
    let equations = s.iter().map(|&x| Equation::new(g.conjugation(x), id.clone())).collect();
    let system = EquationSystem::new(&FinAlgCat, equations)?;
    let m = general_solution(&FinAlgCat, &system)?;
    Ok(SubobjectMono::from_mask(g.carrier().clone(), &m.image_mask()))
}

pub fn centralizer_of_labels(g: &FiniteGroup, labels: &[&str]) -> Result<SubobjectMono, BirkhoffError> {
    let s = labels.iter().map(|l| g.element(l)).collect::<Result<Vec<_>, _>>()?;
    centralizer(g, &s)
}

/// `G -> G^ab`, the general cosolution of `{ φ_g ≈ id }` over all `g`.
pub fn abelianization(g: &FiniteGroup) -> Result<AlgHom, BirkhoffError> {
    let id = AlgHom::identity(g.algebra());
    let equations = (0..g.order()).map(|x| Equation::new(g.conjugation(x), id.clone())).collect();
    let cosystem = CoEquationSystem::new(&FinAlgCat, equations)?;
    Ok(general_cosolution(&FinAlgCat, &cosystem)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_sig() -> Signature {
        Signature::new([("mul", 2)]).unwrap()
    }

    fn magma(n: usize, table: &[usize]) -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::new(binary_sig(), Arc::new(FinSet::range(n)), vec![table.to_vec()]).unwrap())
    }

    fn semilattice() -> Arc<FiniteAlgebra> {
        magma(2, &[0, 0, 0, 1])
    }

    fn mul(a: Term, b: Term) -> Term {
        Term::app("mul", vec![a, b])
    }

    fn x() -> Term {
        Term::Var(0)
    }

    fn y() -> Term {
        Term::Var(1)
    }

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let a = semilattice();
        assert_eq!(a.eval(&x(), &[1]).unwrap(), 1);
        assert_eq!(a.eval(&mul(x(), x()), &[1]).unwrap(), 1);
        assert_eq!(a.eval(&y(), &[1]), Err(BirkhoffError::UnboundVariable(1)));
        assert!(matches!(
            a.eval(&Term::constant("e"), &[]),
            Err(BirkhoffError::SignatureMismatch(_))
        ));
        let g = s3();
        let t = Term::app("mul", vec![x(), Term::app("inv", vec![x()])]);
        for a in 0..6 {
            assert_eq!(g.algebra().eval(&t, &[a]).unwrap(), g.unit());
        }
    }

    #[test]
    fn satisfies_examples() {
        let a = semilattice();
        assert!(satisfies(&a, &Identity::new(x(), x())).unwrap());
        assert!(satisfies(&a, &Identity::new(mul(x(), y()), mul(y(), x()))).unwrap());
        let left = magma(2, &[0, 0, 1, 1]);
        let comm = Identity::new(mul(x(), y()), mul(y(), x()));
        assert!(!satisfies(&left, &comm).unwrap());
        assert_eq!(find_violation(&left, &comm, Exec::Sequential).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn subalgebra_examples() {
        let subs = subalgebras(&semilattice()).unwrap();
        let carriers: Vec<Vec<usize>> = subs.iter().map(|h| h.map().to_vec()).collect();
        assert_eq!(carriers, vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(subalgebras(s3().algebra()).unwrap().len(), 6);
        let trivial = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(subalgebras(trivial.algebra()).unwrap().len(), 1);
    }

    #[test]
    fn congruence_examples() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let cs = congruences(z4.algebra()).unwrap();
        assert_eq!(cs.len(), 3);
        assert!(cs.contains(&Congruence::discrete(4)));
        assert!(cs.contains(&Congruence::total(4)));
        assert_eq!(congruences(&semilattice()).unwrap().len(), 2);
        let big = FiniteGroup::cyclic(9).unwrap();
        assert!(matches!(
            congruences(big.algebra()),
            Err(BirkhoffError::CarrierTooLarge { size: 9, bound: 8 })
        ));
    }

    #[test]
    fn product_examples() {
        let (diamond, proj) = product_algebra(&[semilattice(), semilattice()]).unwrap();
        assert_eq!(diamond.size(), 4);
        assert_eq!(proj.len(), 2);
        assert!(satisfies(&diamond, &Identity::new(mul(x(), x()), x())).unwrap());
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let (klein, _) = product_algebra(&[z2.algebra().clone(), z2.algebra().clone()]).unwrap();
        let klein = FiniteGroup::from_algebra((*klein).clone()).unwrap();
        assert!(klein.is_abelian());
        assert!((0..4).all(|a| klein.mul(a, a) == klein.unit()));
        assert!(matches!(product_algebra(&[]), Err(BirkhoffError::EmptyList)));
    }

    #[test]
    fn hsp_examples() {
        let a = semilattice();
        let trivial = quotient(&a, &Congruence::total(2)).unwrap().target().clone();
        match hsp_member(&trivial, &a, 1).unwrap() {
            HspAnswer::Yes(w) => {
                assert_eq!(w.k, 1);
                w.replay(&a, &trivial).unwrap();
            }
            other => panic!("{other:?}"),
        }
        let chain = magma(3, &[0, 0, 0, 0, 1, 1, 0, 1, 2]);
        match hsp_member(&chain, &a, 3).unwrap() {
            HspAnswer::Yes(w) => {
                assert_eq!(w.k, 2);
                let iso = w.replay(&a, &chain).unwrap();
                assert!(iso.is_bijective());
            }
            other => panic!("{other:?}"),
        }
        let constant = magma(2, &[0, 0, 0, 0]);
        match hsp_member(&constant, &a, 2).unwrap() {
            HspAnswer::NoWithinBounds { violated: Some((id, env)), .. } => {
                assert!(satisfies(&a, &id).unwrap());
                assert!(!satisfies(&constant, &id).unwrap());
                assert_ne!(
                    constant.eval(&id.lhs, &env).unwrap(),
                    constant.eval(&id.rhs, &env).unwrap()
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tampered_witness_fails() {
        let a = semilattice();
        let chain = magma(3, &[0, 0, 0, 0, 1, 1, 0, 1, 2]);
        let HspAnswer::Yes(mut w) = hsp_member(&chain, &a, 2).unwrap() else {
            panic!()
        };
        w.map.swap(0, 1);
        assert!(w.replay(&a, &chain).is_err());
    }

    #[test]
    fn identity_examples() {
        let ids = identities_of(&semilattice(), 2, 2).unwrap();
        let comm = Identity::new(mul(x(), y()), mul(y(), x()));
        let idem = Identity::new(mul(x(), x()), x());
        assert!(ids.iter().any(|i| i.same_up_to_symmetry(&comm)));
        assert!(ids.iter().any(|i| i.same_up_to_symmetry(&idem)));
        assert!(ids.iter().all(|i| i.lhs != i.rhs));

        let z2 = FiniteGroup::cyclic(2).unwrap();
        let ids = identities_of(z2.algebra(), 1, 3).unwrap();
        let sq = Identity::new(mul(x(), x()), Term::constant("e"));
        assert!(ids.iter().any(|i| i.same_up_to_symmetry(&sq)));

        let raw = identities_with(
            &semilattice(),
            IdentityOptions {
                raw: true,
                ..IdentityOptions::new(2, 2)
            },
            Exec::Sequential,
        )
        .unwrap();
        assert!(raw.len() >= ids.len());
        assert!(raw.iter().all(|i| satisfies(&semilattice(), i).unwrap()));
    }

    #[test]
    fn free_algebra_examples() {
        assert_eq!(free_algebra_in_variety(&semilattice(), 1).unwrap().algebra.size(), 1);
        let f2 = free_algebra_in_variety(&semilattice(), 2).unwrap();
        assert_eq!(f2.algebra.size(), 3);
        assert_eq!(f2.evaluate(&mul(y(), x())).unwrap(), f2.evaluate(&mul(x(), y())).unwrap());
        assert_ne!(f2.generator(0), f2.generator(1));
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(free_algebra_in_variety(z2.algebra(), 1).unwrap().algebra.size(), 2);
    }

    #[test]
    fn centralizer_examples() {
        let g = s3();
        assert!(centralizer(&g, &[g.unit()]).unwrap().is_full());
        let c = centralizer_of_labels(&g, &["(12)"]).unwrap();
        let labels: Vec<&str> = c.carrier().labels().collect();
        assert_eq!(labels, vec!["e", "(12)"]);
        let z6 = FiniteGroup::cyclic(6).unwrap();
        assert!(centralizer(&z6, &[1, 2]).unwrap().is_full());
        assert!(matches!(
            centralizer_of_labels(&g, &["(14)"]),
            Err(BirkhoffError::ElementNotInG(_))
        ));
    }

    #[test]
    fn abelianization_examples() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        assert!(abelianization(&z4).unwrap().is_bijective());
        let q = abelianization(&s3()).unwrap();
        assert_eq!(q.target().size(), 2);
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert!(find_isomorphism(q.target(), z2.algebra()).unwrap().is_some());
    }

    #[test]
    fn finalgcat_equations() {
        // The equalizer of two homomorphisms Z4 -> Z2 is a subgroup.
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let homs = homomorphisms(z4.algebra(), z2.algebra(), Exec::Sequential).unwrap();
        assert_eq!(homs.len(), 2);
        let eq = FinAlgCat.equalizer(&homs[0], &homs[1]).unwrap();
        assert_eq!(eq.source().size(), 2);
        let (left, right) = FinAlgCat.pullback(&homs[1], &homs[1]).unwrap();
        assert_eq!(left.source().size(), 8);
        assert_eq!(homs[1].compose(&left).unwrap(), homs[1].compose(&right).unwrap());
    }
}
