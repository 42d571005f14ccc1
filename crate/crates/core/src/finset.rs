//! Finite sets, total functions between them, and the finite limits and
//! colimits the equation calculus consumes.
//!
//! Elements are text labels. Every construction emits canonical labels so
//! results are reproducible: products use `(a,b)`, binary coproducts use
//! `inl:a`/`inr:b` (`in0:`, `in1:`, ... for three or more summands), and a
//! quotient class is named by its lexicographically least member.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FinSetError {
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("table has {got} entries but the domain has {expected} elements")]
    NotTotal { expected: usize, got: usize },
    #[error("image index {index} is outside a codomain of size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("functions are not parallel (domains or codomains differ)")]
    NotParallel,
    #[error("construction needs a non-empty list")]
    EmptyList,
    #[error("functions do not share a codomain")]
    CodMismatch,
    #[error("subobjects do not share a target")]
    TargetMismatch,
    #[error("functions are not composable")]
    NotComposable,
    #[error("function is not injective")]
    NotInjective,
}

/// A finite set with an ordered list of distinct labels.
#[derive(Clone, Default)]
pub struct FinSet {
    elements: IndexSet<String>,
}

impl FinSet {
    pub fn new<I, S>(labels: I) -> Result<Self, FinSetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut elements = IndexSet::new();
        for label in labels {
            let label = label.into();
            if elements.contains(&label) {
                return Err(FinSetError::DuplicateLabel(label));
            }
            elements.insert(label);
        }
        Ok(FinSet { elements })
    }

    pub fn empty() -> Self {
        FinSet::default()
    }

    /// `{0, 1, ..., n-1}` with decimal labels.
    pub fn range(n: usize) -> Self {
        FinSet {
            elements: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.elements[index]
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.elements.iter().map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.get_index_of(label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.elements.contains(label)
    }

    fn require(&self, label: &str) -> Result<usize, FinSetError> {
        self.index_of(label)
            .ok_or_else(|| FinSetError::UnknownLabel(label.to_string()))
    }
}

// Order matters: two sets with the same labels in a different order are
// different objects here.
impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements.len() == other.elements.len()
            && self.elements.iter().eq(other.elements.iter())
    }
}

impl Eq for FinSet {}

impl Hash for FinSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.elements.len().hash(state);
        for e in &self.elements {
            e.hash(state);
        }
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A total function between finite sets, stored as an index table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinFunction {
    dom: Arc<FinSet>,
    cod: Arc<FinSet>,
    table: Vec<usize>,
}

impl FinFunction {
    pub fn new(
        dom: impl Into<Arc<FinSet>>,
        cod: impl Into<Arc<FinSet>>,
        table: Vec<usize>,
    ) -> Result<Self, FinSetError> {
        let dom = dom.into();
        let cod = cod.into();
        if table.len() != dom.len() {
            return Err(FinSetError::NotTotal {
                expected: dom.len(),
                got: table.len(),
            });
        }
        if let Some(&index) = table.iter().find(|&&i| i >= cod.len()) {
            return Err(FinSetError::OutOfRange {
                index,
                size: cod.len(),
            });
        }
        Ok(FinFunction { dom, cod, table })
    }

    /// Builds a function from `(input, output)` label pairs; every domain
    /// element must appear exactly once.
    pub fn from_pairs<'a, I>(
        dom: impl Into<Arc<FinSet>>,
        cod: impl Into<Arc<FinSet>>,
        pairs: I,
    ) -> Result<Self, FinSetError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let dom = dom.into();
        let cod = cod.into();
        let mut table = vec![usize::MAX; dom.len()];
        let mut seen = 0;
        for (x, y) in pairs {
            let i = dom.require(x)?;
            let j = cod.require(y)?;
            if table[i] != usize::MAX {
                return Err(FinSetError::DuplicateLabel(x.to_string()));
            }
            table[i] = j;
            seen += 1;
        }
        if seen != dom.len() {
            return Err(FinSetError::NotTotal {
                expected: dom.len(),
                got: seen,
            });
        }
        FinFunction::new(dom, cod, table)
    }

    pub fn identity(set: impl Into<Arc<FinSet>>) -> Self {
        let set = set.into();
        let table = (0..set.len()).collect();
        FinFunction {
            dom: set.clone(),
            cod: set,
            table,
        }
    }

    pub fn constant(
        dom: impl Into<Arc<FinSet>>,
        cod: impl Into<Arc<FinSet>>,
        value: usize,
    ) -> Result<Self, FinSetError> {
        let dom = dom.into();
        let table = vec![value; dom.len()];
        FinFunction::new(dom, cod, table)
    }

    pub fn dom(&self) -> &Arc<FinSet> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinSet> {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, index: usize) -> usize {
        self.table[index]
    }

    pub fn apply_label(&self, label: &str) -> Option<&str> {
        self.dom
            .index_of(label)
            .map(|i| self.cod.label(self.table[i]))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &FinFunction) -> Result<FinFunction, FinSetError> {
        if *inner.cod != *self.dom {
            return Err(FinSetError::NotComposable);
        }
        Ok(FinFunction {
            dom: inner.dom.clone(),
            cod: self.cod.clone(),
            table: inner.table.iter().map(|&i| self.table[i]).collect(),
        })
    }

    pub fn is_parallel(&self, other: &FinFunction) -> bool {
        self.dom == other.dom && self.cod == other.cod
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        self.table
            .iter()
            .all(|&j| !std::mem::replace(&mut hit[j], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        for &j in &self.table {
            hit[j] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective()
    }

    /// Membership mask of the image in the codomain.
    pub fn image_mask(&self) -> Vec<bool> {
        let mut hit = vec![false; self.cod.len()];
        for &j in &self.table {
            hit[j] = true;
        }
        hit
    }

    /// The image as a canonical subobject of the codomain.
    pub fn image(&self) -> SubobjectMono {
        SubobjectMono::from_mask(self.cod.clone(), &self.image_mask())
    }

    /// Every function `dom -> cod`, in lexicographic order of tables.
    pub fn enumerate(dom: &Arc<FinSet>, cod: &Arc<FinSet>) -> Vec<FinFunction> {
        let n = dom.len();
        let m = cod.len();
        if m == 0 {
            return if n == 0 {
                vec![FinFunction::identity(dom.clone())]
            } else {
                Vec::new()
            };
        }
        let count = m.checked_pow(n as u32).expect("function space too large");
        let mut out = Vec::with_capacity(count);
        let mut table = vec![0usize; n];
        loop {
            out.push(FinFunction {
                dom: dom.clone(),
                cod: cod.clone(),
                table: table.clone(),
            });
            let mut pos = n;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                table[pos] += 1;
                if table[pos] < m {
                    break;
                }
                table[pos] = 0;
            }
        }
    }
}

impl fmt::Debug for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &j) in self.table.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", self.dom.label(i), self.cod.label(j))?;
        }
        write!(f, "}}")
    }
}

/// A subset of `target` in target order, with its inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubobjectMono {
    carrier: Arc<FinSet>,
    target: Arc<FinSet>,
    inclusion: FinFunction,
}

impl SubobjectMono {
    pub fn from_mask(target: Arc<FinSet>, mask: &[bool]) -> Self {
        debug_assert_eq!(mask.len(), target.len());
        let indices: Vec<usize> = (0..target.len()).filter(|&i| mask[i]).collect();
        let carrier = Arc::new(FinSet {
            elements: indices.iter().map(|&i| target.label(i).to_string()).collect(),
        });
        let inclusion = FinFunction {
            dom: carrier.clone(),
            cod: target.clone(),
            table: indices,
        };
        SubobjectMono {
            carrier,
            target,
            inclusion,
        }
    }

    /// The whole of `target`.
    pub fn full(target: Arc<FinSet>) -> Self {
        let mask = vec![true; target.len()];
        Self::from_mask(target, &mask)
    }

    pub fn carrier(&self) -> &Arc<FinSet> {
        &self.carrier
    }

    pub fn target(&self) -> &Arc<FinSet> {
        &self.target
    }

    pub fn inclusion(&self) -> &FinFunction {
        &self.inclusion
    }

    pub fn into_inclusion(self) -> FinFunction {
        self.inclusion
    }

    pub fn mask(&self) -> Vec<bool> {
        self.inclusion.image_mask()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.carrier.contains(label)
    }

    pub fn is_full(&self) -> bool {
        self.carrier.len() == self.target.len()
    }
}

/// Pullback of `f: X -> Z` and `m: Y -> Z`.
///
/// `left: P -> X` is the leg opposite `m` and `right: P -> Y` the leg opposite
/// `f`, so that `f ∘ left = m ∘ right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackSquare {
    pub apex: Arc<FinSet>,
    pub left: FinFunction,
    pub right: FinFunction,
}

pub fn equalizer(p: &FinFunction, q: &FinFunction) -> Result<SubobjectMono, FinSetError> {
    if !p.is_parallel(q) {
        return Err(FinSetError::NotParallel);
    }
    let mask: Vec<bool> = p.table.iter().zip(&q.table).map(|(a, b)| a == b).collect();
    Ok(SubobjectMono::from_mask(p.dom.clone(), &mask))
}

fn tuple_label(parts: &[&str]) -> String {
    let mut s = String::from("(");
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(p);
    }
    s.push(')');
    s
}

/// Cartesian product with lexicographically ordered tuples and projections.
///
/// A single factor is returned unchanged with the identity projection.
pub fn product(objs: &[Arc<FinSet>]) -> Result<(Arc<FinSet>, Vec<FinFunction>), FinSetError> {
    if objs.is_empty() {
        return Err(FinSetError::EmptyList);
    }
    if objs.len() == 1 {
        return Ok((objs[0].clone(), vec![FinFunction::identity(objs[0].clone())]));
    }
    let total: usize = objs.iter().map(|o| o.len()).product();
    let mut labels = Vec::with_capacity(total);
    let mut coords: Vec<Vec<usize>> = vec![Vec::with_capacity(total); objs.len()];
    for flat in 0..total {
        let idx = unflatten(flat, objs);
        let parts: Vec<&str> = idx.iter().zip(objs).map(|(&i, o)| o.label(i)).collect();
        labels.push(tuple_label(&parts));
        for (k, &i) in idx.iter().enumerate() {
            coords[k].push(i);
        }
    }
    let apex = Arc::new(FinSet::new(labels)?);
    let projections = coords
        .into_iter()
        .zip(objs)
        .map(|(table, o)| FinFunction {
            dom: apex.clone(),
            cod: o.clone(),
            table,
        })
        .collect();
    Ok((apex, projections))
}

/// Index of a tuple in the lexicographic (first factor most significant)
/// enumeration of a product.
pub fn flatten(idx: &[usize], objs: &[Arc<FinSet>]) -> usize {
    idx.iter()
        .zip(objs)
        .fold(0, |acc, (&i, o)| acc * o.len() + i)
}

pub fn unflatten(mut flat: usize, objs: &[Arc<FinSet>]) -> Vec<usize> {
    let mut idx = vec![0; objs.len()];
    for k in (0..objs.len()).rev() {
        let n = objs[k].len();
        idx[k] = flat % n;
        flat /= n;
    }
    idx
}

/// The mediating map `⟨legs⟩` into the product of the legs' codomains.
pub fn tuple(legs: &[FinFunction]) -> Result<FinFunction, FinSetError> {
    let first = legs.first().ok_or(FinSetError::EmptyList)?;
    if legs.iter().any(|l| l.dom != first.dom) {
        return Err(FinSetError::NotParallel);
    }
    let cods: Vec<Arc<FinSet>> = legs.iter().map(|l| l.cod.clone()).collect();
    let (apex, _) = product(&cods)?;
    let table = (0..first.dom.len())
        .map(|x| {
            let idx: Vec<usize> = legs.iter().map(|l| l.table[x]).collect();
            flatten(&idx, &cods)
        })
        .collect();
    FinFunction::new(first.dom.clone(), apex, table)
}

fn coproduct_tag(k: usize, n: usize) -> String {
    match (n, k) {
        (2, 0) => "inl".to_string(),
        (2, _) => "inr".to_string(),
        _ => format!("in{k}"),
    }
}

/// Tagged disjoint union with coprojections; a single summand is returned
/// unchanged.
pub fn coproduct(objs: &[Arc<FinSet>]) -> Result<(Arc<FinSet>, Vec<FinFunction>), FinSetError> {
    if objs.is_empty() {
        return Err(FinSetError::EmptyList);
    }
    if objs.len() == 1 {
        return Ok((objs[0].clone(), vec![FinFunction::identity(objs[0].clone())]));
    }
    let mut labels = Vec::new();
    let mut tables = Vec::with_capacity(objs.len());
    for (k, o) in objs.iter().enumerate() {
        let tag = coproduct_tag(k, objs.len());
        let start = labels.len();
        labels.extend(o.labels().map(|l| format!("{tag}:{l}")));
        tables.push((start..labels.len()).collect::<Vec<_>>());
    }
    let apex = Arc::new(FinSet::new(labels)?);
    let coprojections = tables
        .into_iter()
        .zip(objs)
        .map(|(table, o)| FinFunction {
            dom: o.clone(),
            cod: apex.clone(),
            table,
        })
        .collect();
    Ok((apex, coprojections))
}

/// The mediating map `[legs]` out of the coproduct of the legs' domains.
pub fn copair(legs: &[FinFunction]) -> Result<FinFunction, FinSetError> {
    let first = legs.first().ok_or(FinSetError::EmptyList)?;
    if legs.iter().any(|l| l.cod != first.cod) {
        return Err(FinSetError::CodMismatch);
    }
    let doms: Vec<Arc<FinSet>> = legs.iter().map(|l| l.dom.clone()).collect();
    let (apex, _) = coproduct(&doms)?;
    let table = legs.iter().flat_map(|l| l.table.iter().copied()).collect();
    FinFunction::new(apex, first.cod.clone(), table)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so class order is stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Canonical surjection `set -> set/≈` for the equivalence generated by
/// `pairs`. Classes are ordered by their first member in `set` order and
/// named by their lexicographically least label.
pub fn quotient_by_pairs(
    set: &Arc<FinSet>,
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> FinFunction {
    let mut uf = UnionFind::new(set.len());
    for (a, b) in pairs {
        uf.union(a, b);
    }
    quotient_from_classes(set, |i| uf.find(i))
}

/// Canonical surjection for the partition given by `class_of` (any class key
/// per element).
pub fn quotient_from_classes(set: &Arc<FinSet>, mut class_of: impl FnMut(usize) -> usize) -> FinFunction {
    let n = set.len();
    let keys: Vec<usize> = (0..n).map(&mut class_of).collect();
    let mut class_index: indexmap::IndexMap<usize, usize> = indexmap::IndexMap::new();
    let mut best: Vec<usize> = Vec::new();
    let mut table = Vec::with_capacity(n);
    for (i, &k) in keys.iter().enumerate() {
        let next = class_index.len();
        let c = *class_index.entry(k).or_insert(next);
        if c == best.len() {
            best.push(i);
        } else if set.label(i) < set.label(best[c]) {
            best[c] = i;
        }
        table.push(c);
    }
    let quotient = Arc::new(FinSet {
        elements: best.iter().map(|&i| set.label(i).to_string()).collect(),
    });
    FinFunction {
        dom: set.clone(),
        cod: quotient,
        table,
    }
}

pub fn coequalizer(p: &FinFunction, q: &FinFunction) -> Result<FinFunction, FinSetError> {
    if !p.is_parallel(q) {
        return Err(FinSetError::NotParallel);
    }
    Ok(quotient_by_pairs(
        &p.cod,
        p.table.iter().copied().zip(q.table.iter().copied()),
    ))
}

/// Pushout of `f` along itself, returned as the pair of legs `(p, q)`.
pub fn cokernel_pair(f: &FinFunction) -> Result<(FinFunction, FinFunction), FinSetError> {
    let (sum, inj) = coproduct(&[f.cod.clone(), f.cod.clone()])?;
    let n = f.cod.len();
    let glue = f.table.iter().map(|&y| (y, n + y));
    let e = quotient_by_pairs(&sum, glue);
    let p = e.compose(&inj[0])?;
    let q = e.compose(&inj[1])?;
    Ok((p, q))
}

pub fn pullback(f: &FinFunction, m: &FinFunction) -> Result<PullbackSquare, FinSetError> {
    if f.cod != m.cod {
        return Err(FinSetError::CodMismatch);
    }
    let mut labels = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for x in 0..f.dom.len() {
        for y in 0..m.dom.len() {
            if f.table[x] == m.table[y] {
                labels.push(tuple_label(&[f.dom.label(x), m.dom.label(y)]));
                left.push(x);
                right.push(y);
            }
        }
    }
    let apex = Arc::new(FinSet::new(labels)?);
    Ok(PullbackSquare {
        left: FinFunction::new(apex.clone(), f.dom.clone(), left)?,
        right: FinFunction::new(apex.clone(), m.dom.clone(), right)?,
        apex,
    })
}

pub fn intersect(monos: &[SubobjectMono]) -> Result<SubobjectMono, FinSetError> {
    let first = monos.first().ok_or(FinSetError::EmptyList)?;
    if monos.iter().any(|m| m.target != first.target) {
        return Err(FinSetError::TargetMismatch);
    }
    let mut mask = vec![true; first.target.len()];
    for m in monos {
        for (slot, hit) in mask.iter_mut().zip(m.mask()) {
            *slot &= hit;
        }
    }
    Ok(SubobjectMono::from_mask(first.target.clone(), &mask))
}

/// Some `h` with `f = g ∘ h`, choosing the earliest preimage for each
/// element. When `g` is injective the factorization is unique.
pub fn factor_through(f: &FinFunction, g: &FinFunction) -> Result<Option<FinFunction>, FinSetError> {
    if f.cod != g.cod {
        return Err(FinSetError::CodMismatch);
    }
    let mut preimage = vec![None; g.cod.len()];
    for (y, &z) in g.table.iter().enumerate() {
        preimage[z].get_or_insert(y);
    }
    let table: Option<Vec<usize>> = f.table.iter().map(|&z| preimage[z]).collect();
    Ok(table.map(|table| FinFunction {
        dom: f.dom.clone(),
        cod: g.dom.clone(),
        table,
    }))
}
