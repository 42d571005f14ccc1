//! Finite categories, functors, natural transformations and adjunctions;
//! the inserter `Ins(F, G)` of a parallel pair with its forgetful functor;
//! the adjoint shifts between inserters; free algebras for polynomial
//! endofunctors on finite sets; and many-sorted algebras presented as an
//! inserter.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::birkhoff::FiniteAlgebra;
use crate::finset::{FinSet, FinSetError};
use crate::par::Exec;
use crate::theories::{Signature, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InserterError {
    #[error("invalid category: {0}")]
    InvalidCategory(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid natural transformation: {0}")]
    InvalidNatTrans(String),
    #[error("invalid adjunction: {0}")]
    AdjunctionInvalid(String),
    #[error("functors are not parallel")]
    NotParallel,
    #[error("invalid poset: {0}")]
    InvalidPoset(String),
    #[error("term `{0}` lies beyond the depth bound")]
    DepthTooSmall(String),
    #[error("bound too large: {0}")]
    BoundTooLarge(String),
    #[error(transparent)]
    FinSet(#[from] FinSetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

const UNDEFINED: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Composition {
    /// `table[g * m + f] = g ∘ f`.
    Table(Vec<u32>),
    /// Arrows are tuples of functions between tuples of finite sets.
    Functions {
        sizes: Vec<Vec<usize>>,
        maps: Vec<Vec<Vec<usize>>>,
        index: HashMap<(usize, usize, Vec<Vec<usize>>), usize>,
    },
}

/// A finite category with explicitly listed arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Arc<FinSet>,
    arrows: Vec<Arrow>,
    identities: Vec<usize>,
    homs: Vec<Vec<usize>>,
    composition: Composition,
}

impl FiniteCategory {
    /// A category from explicit data; `compose(g, f)` must be defined on
    /// every composable pair. Unit and associativity laws are checked.
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<usize>,
        compose: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self, InserterError> {
        let cat = FiniteCategory::build(objects, arrows, identities, compose)?;
        cat.validate()?;
        Ok(cat)
    }

    /// Like [`FiniteCategory::new`] without the exhaustive law check, for
    /// categories derived from already valid ones.
    pub(crate) fn build(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<usize>,
        compose: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self, InserterError> {
        let objects = Arc::new(FinSet::new(objects)?);
        let n = objects.len();
        let m = arrows.len();
        if identities.len() != n {
            return Err(InserterError::InvalidCategory("one identity per object required".into()));
        }
        for (o, &i) in identities.iter().enumerate() {
            let a = arrows
                .get(i)
                .ok_or_else(|| InserterError::InvalidCategory("identity index out of range".into()))?;
            if a.src != o || a.tgt != o {
                return Err(InserterError::InvalidCategory(format!("identity of object {o} is not an endomorphism")));
            }
        }
        if let Some(a) = arrows.iter().find(|a| a.src >= n || a.tgt >= n) {
            return Err(InserterError::InvalidCategory(format!("arrow `{}` has an unknown endpoint", a.name)));
        }
        let mut names = std::collections::HashSet::new();
        if let Some(a) = arrows.iter().find(|a| !names.insert(a.name.as_str())) {
            return Err(InserterError::InvalidCategory(format!("duplicate arrow name `{}`", a.name)));
        }
        let mut table = vec![UNDEFINED; m * m];
        for g in 0..m {
            for f in 0..m {
                if arrows[f].tgt != arrows[g].src {
                    continue;
                }
                let h = compose(g, f).ok_or_else(|| {
                    InserterError::InvalidCategory(format!("composite {} . {} is undefined", arrows[g].name, arrows[f].name))
                })?;
                if h >= m || arrows[h].src != arrows[f].src || arrows[h].tgt != arrows[g].tgt {
                    return Err(InserterError::InvalidCategory(format!(
                        "composite {} . {} has the wrong endpoints",
                        arrows[g].name, arrows[f].name
                    )));
                }
                table[g * m + f] = h as u32;
            }
        }
        let homs = hom_lists(n, &arrows);
        Ok(FiniteCategory {
            objects,
            arrows,
            identities,
            homs,
            composition: Composition::Table(table),
        })
    }

    /// Objects, named arrows and composites `(g, f, g∘f)` by arrow name.
    /// Identities `id_X` are added in front of the given arrows.
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<(String, usize, usize)>,
        composites: &[(String, String, String)],
    ) -> Result<Self, InserterError> {
        let n = objects.len();
        let mut all: Vec<Arrow> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| Arrow {
                name: format!("id_{o}"),
                src: i,
                tgt: i,
            })
            .collect();
        all.extend(arrows.into_iter().map(|(name, src, tgt)| Arrow { name, src, tgt }));
        let by_name: HashMap<&str, usize> = all.iter().enumerate().map(|(i, a)| (a.name.as_str(), i)).collect();
        let lookup = |name: &str| {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| InserterError::InvalidCategory(format!("unknown arrow `{name}`")))
        };
        let mut table: HashMap<(usize, usize), usize> = HashMap::new();
        for (g, f, h) in composites {
            let key = (lookup(g)?, lookup(f)?);
            if table.insert(key, lookup(h)?).is_some() {
                return Err(InserterError::InvalidCategory(format!("composite {g} . {f} given twice")));
            }
        }
        let identities: Vec<usize> = (0..n).collect();
        FiniteCategory::new(objects, all, identities, |g, f| {
            if g < n {
                Some(f)
            } else if f < n {
                Some(g)
            } else {
                table.get(&(g, f)).copied()
            }
        })
    }

    /// The thin category of a poset: one arrow `a<=b` per relation, with
    /// identities named `id_a`.
    pub fn from_poset(p: &Poset) -> Self {
        let n = p.size();
        let mut arrows = Vec::new();
        let mut index = vec![usize::MAX; n * n];
        for a in 0..n {
            index[a * n + a] = arrows.len();
            arrows.push(Arrow {
                name: format!("id_{}", p.elements.label(a)),
                src: a,
                tgt: a,
            });
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && p.leq(a, b) {
                    index[a * n + b] = arrows.len();
                    arrows.push(Arrow {
                        name: format!("{}<={}", p.elements.label(a), p.elements.label(b)),
                        src: a,
                        tgt: b,
                    });
                }
            }
        }
        let ends: Vec<(usize, usize)> = arrows.iter().map(|a| (a.src, a.tgt)).collect();
        let labels = p.elements.labels().map(String::from).collect();
        FiniteCategory::build(labels, arrows, (0..n).collect(), |g, f| {
            Some(index[ends[f].0 * n + ends[g].1])
        })
        .expect("posets give categories")
    }

    /// All tuples of functions between the given tuples of set sizes.
    pub fn concrete(labels: Vec<String>, sizes: Vec<Vec<usize>>) -> Result<Self, InserterError> {
        let n = labels.len();
        if sizes.len() != n || sizes.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(InserterError::InvalidCategory("objects must be size tuples of one length".into()));
        }
        let mut arrows = Vec::new();
        let mut maps: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut index = HashMap::new();
        let mut identities = vec![0; n];
        for a in 0..n {
            for b in 0..n {
                let count = sizes[a]
                    .iter()
                    .zip(&sizes[b])
                    .try_fold(1usize, |acc, (&m, &k)| acc.checked_mul(k.checked_pow(m as u32)?))
                    .filter(|&c| c <= 1_000_000)
                    .ok_or_else(|| InserterError::BoundTooLarge("too many functions between objects".into()))?;
                for idx in 0..count {
                    let mut rest = idx;
                    let mut tuple = Vec::with_capacity(sizes[a].len());
                    for (&m, &k) in sizes[a].iter().zip(&sizes[b]).rev() {
                        let per = k.pow(m as u32);
                        let code = rest % per.max(1);
                        rest /= per.max(1);
                        tuple.push(decode_function(code, m, k));
                    }
                    tuple.reverse();
                    if a == b && tuple.iter().all(|f| f.iter().enumerate().all(|(i, &v)| i == v)) {
                        identities[a] = arrows.len();
                    }
                    let body: Vec<String> = tuple
                        .iter()
                        .map(|f| f.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                        .collect();
                    index.insert((a, b, tuple.clone()), arrows.len());
                    arrows.push(Arrow {
                        name: format!("{}->{}:[{}]", labels[a], labels[b], body.join("|")),
                        src: a,
                        tgt: b,
                    });
                    maps.push(tuple);
                }
            }
        }
        let objects = Arc::new(FinSet::new(labels)?);
        let homs = hom_lists(n, &arrows);
        Ok(FiniteCategory {
            objects,
            arrows,
            identities,
            homs,
            composition: Composition::Functions { sizes, maps, index },
        })
    }

    /// One object, one arrow.
    pub fn terminal() -> Self {
        FiniteCategory::from_parts(vec!["*".into()], vec![], &[]).expect("valid")
    }

    /// Two objects and one arrow between them.
    pub fn arrow_category() -> Self {
        FiniteCategory::from_parts(vec!["0".into(), "1".into()], vec![("u".into(), 0, 1)], &[]).expect("valid")
    }

    /// Exhaustive unit and associativity check.
    pub fn validate(&self) -> Result<(), InserterError> {
        let m = self.arrows.len();
        for f in 0..m {
            let a = &self.arrows[f];
            if self.compose(self.identities[a.tgt], f) != Some(f) || self.compose(f, self.identities[a.src]) != Some(f) {
                return Err(InserterError::InvalidCategory(format!("unit law fails at `{}`", a.name)));
            }
        }
        let ok = Exec::default().all_range(m, |f| {
            let tf = self.arrows[f].tgt;
            self.homs_from(tf).all(|g| {
                let tg = self.arrows[g].tgt;
                self.homs_from(tg).all(|h| {
                    let hg = self.compose(h, g).expect("composable");
                    let gf = self.compose(g, f).expect("composable");
                    self.compose(hg, f) == self.compose(h, gf)
                })
            })
        });
        if !ok {
            return Err(InserterError::InvalidCategory("composition is not associative".into()));
        }
        Ok(())
    }

    fn homs_from(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.object_count();
        (0..n).flat_map(move |b| self.homs[a * n + b].iter().copied())
    }

    pub fn objects(&self) -> &Arc<FinSet> {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_label(&self, o: usize) -> &str {
        self.objects.label(o)
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.index_of(label)
    }

    pub fn arrow(&self, f: usize) -> &Arrow {
        &self.arrows[f]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn identity(&self, o: usize) -> usize {
        self.identities[o]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.arrows[f].src] == f
    }

    /// `g ∘ f`, when composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        if self.arrows[f].tgt != self.arrows[g].src {
            return None;
        }
        match &self.composition {
            Composition::Table(t) => {
                let h = t[g * self.arrows.len() + f];
                (h != UNDEFINED).then_some(h as usize)
            }
            Composition::Functions { maps, index, .. } => {
                let composite: Vec<Vec<usize>> = maps[g]
                    .iter()
                    .zip(&maps[f])
                    .map(|(gg, ff)| ff.iter().map(|&x| gg[x]).collect())
                    .collect();
                index.get(&(self.arrows[f].src, self.arrows[g].tgt, composite)).copied()
            }
        }
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.homs[a * self.object_count() + b]
    }

    pub fn inverse(&self, f: usize) -> Option<usize> {
        let Arrow { src, tgt, .. } = self.arrows[f];
        self.hom(tgt, src).iter().copied().find(|&g| {
            self.compose(g, f) == Some(self.identities[src]) && self.compose(f, g) == Some(self.identities[tgt])
        })
    }

    pub fn is_iso(&self, f: usize) -> bool {
        self.inverse(f).is_some()
    }

    pub fn is_thin(&self) -> bool {
        self.homs.iter().all(|h| h.len() <= 1)
    }

    /// For concrete categories: the component functions of an arrow.
    pub fn functions(&self, f: usize) -> Option<&[Vec<usize>]> {
        match &self.composition {
            Composition::Functions { maps, .. } => Some(&maps[f]),
            Composition::Table(_) => None,
        }
    }

    /// For concrete categories: the size tuple of an object.
    pub fn sizes(&self, o: usize) -> Option<&[usize]> {
        match &self.composition {
            Composition::Functions { sizes, .. } => Some(&sizes[o]),
            Composition::Table(_) => None,
        }
    }

    /// For concrete categories: the arrow with the given components.
    pub fn concrete_arrow(&self, a: usize, b: usize, maps: &[Vec<usize>]) -> Option<usize> {
        match &self.composition {
            Composition::Functions { index, .. } => index.get(&(a, b, maps.to_vec())).copied(),
            Composition::Table(_) => None,
        }
    }
}

fn hom_lists(n: usize, arrows: &[Arrow]) -> Vec<Vec<usize>> {
    let mut homs = vec![Vec::new(); n * n];
    for (i, a) in arrows.iter().enumerate() {
        homs[a.src * n + a.tgt].push(i);
    }
    homs
}

/// The function `0..m -> 0..k` with mixed-radix code `code` (first
/// argument most significant).
fn decode_function(mut code: usize, m: usize, k: usize) -> Vec<usize> {
    let mut f = vec![0; m];
    for slot in f.iter_mut().rev() {
        *slot = code % k.max(1);
        code /= k.max(1);
    }
    f
}

impl fmt::Display for FiniteCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} objects, {} arrows", self.object_count(), self.arrow_count())
    }
}

/// A finite partial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    elements: Arc<FinSet>,
    leq: Vec<bool>,
}

impl Poset {
    /// The reflexive-transitive closure of `relations`, which must be
    /// antisymmetric.
    pub fn new(elements: Arc<FinSet>, relations: &[(usize, usize)]) -> Result<Self, InserterError> {
        let n = elements.len();
        let mut leq = vec![false; n * n];
        for a in 0..n {
            leq[a * n + a] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(InserterError::InvalidPoset("relation mentions an unknown element".into()));
            }
            leq[a * n + b] = true;
        }
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if leq[a * n + k] && leq[k * n + b] {
                        leq[a * n + b] = true;
                    }
                }
            }
        }
        Poset::from_matrix(elements, leq)
    }

    pub fn from_matrix(elements: Arc<FinSet>, leq: Vec<bool>) -> Result<Self, InserterError> {
        let n = elements.len();
        if leq.len() != n * n {
            return Err(InserterError::InvalidPoset("matrix has the wrong size".into()));
        }
        let r = |a: usize, b: usize| leq[a * n + b];
        for a in 0..n {
            if !r(a, a) {
                return Err(InserterError::InvalidPoset("not reflexive".into()));
            }
            for b in 0..n {
                if a != b && r(a, b) && r(b, a) {
                    return Err(InserterError::InvalidPoset(format!(
                        "`{}` and `{}` are distinct but mutually related",
                        elements.label(a),
                        elements.label(b)
                    )));
                }
                for c in 0..n {
                    if r(a, b) && r(b, c) && !r(a, c) {
                        return Err(InserterError::InvalidPoset("not transitive".into()));
                    }
                }
            }
        }
        Ok(Poset { elements, leq })
    }

    pub fn elements(&self) -> &Arc<FinSet> {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size() + b]
    }

    /// Covering pairs `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && self.leq(a, b)
                    && !(0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_monotone(&self, map: &[usize], target: &Poset) -> bool {
        let n = self.size();
        map.len() == n && (0..n).all(|a| (0..n).all(|b| !self.leq(a, b) || target.leq(map[a], map[b])))
    }
}

/// A functor between finite categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    src: Arc<FiniteCategory>,
    tgt: Arc<FiniteCategory>,
    objects: Vec<usize>,
    arrows: Vec<usize>,
}

impl Functor {
    pub fn new(
        src: Arc<FiniteCategory>,
        tgt: Arc<FiniteCategory>,
        objects: Vec<usize>,
        arrows: Vec<usize>,
    ) -> Result<Self, InserterError> {
        let bad = |m: String| InserterError::InvalidFunctor(m);
        if objects.len() != src.object_count() || arrows.len() != src.arrow_count() {
            return Err(bad("maps must be total".into()));
        }
        if objects.iter().any(|&o| o >= tgt.object_count()) || arrows.iter().any(|&a| a >= tgt.arrow_count()) {
            return Err(bad("image outside the target".into()));
        }
        for (f, a) in src.arrows.iter().enumerate() {
            let image = tgt.arrow(arrows[f]);
            if image.src != objects[a.src] || image.tgt != objects[a.tgt] {
                return Err(bad(format!("arrow `{}` is sent to the wrong hom-set", a.name)));
            }
        }
        for o in 0..src.object_count() {
            if arrows[src.identity(o)] != tgt.identity(objects[o]) {
                return Err(bad(format!("identity of `{}` is not preserved", src.object_label(o))));
            }
        }
        for f in 0..src.arrow_count() {
            for g in src.homs_from(src.arrow(f).tgt) {
                let gf = src.compose(g, f).expect("composable");
                if tgt.compose(arrows[g], arrows[f]) != Some(arrows[gf]) {
                    return Err(bad(format!(
                        "composite {} . {} is not preserved",
                        src.arrow(g).name,
                        src.arrow(f).name
                    )));
                }
            }
        }
        Ok(Functor {
            src,
            tgt,
            objects,
            arrows,
        })
    }

    /// For a thin target: the arrow map is forced by the object map.
    pub fn from_object_map(
        src: Arc<FiniteCategory>,
        tgt: Arc<FiniteCategory>,
        objects: Vec<usize>,
    ) -> Result<Self, InserterError> {
        if objects.len() != src.object_count() || objects.iter().any(|&o| o >= tgt.object_count()) {
            return Err(InserterError::InvalidFunctor("object map must be total".into()));
        }
        let arrows = src
            .arrows
            .iter()
            .map(|a| {
                let hom = tgt.hom(objects[a.src], objects[a.tgt]);
                match hom {
                    [only] => Ok(*only),
                    [] => Err(InserterError::InvalidFunctor(format!("no image for arrow `{}`", a.name))),
                    _ => Err(InserterError::InvalidFunctor(format!(
                        "image of arrow `{}` is ambiguous; target is not thin",
                        a.name
                    ))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Functor::new(src, tgt, objects, arrows)
    }

    pub fn identity(cat: &Arc<FiniteCategory>) -> Self {
        Functor {
            src: cat.clone(),
            tgt: cat.clone(),
            objects: (0..cat.object_count()).collect(),
            arrows: (0..cat.arrow_count()).collect(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Functor) -> Result<Functor, InserterError> {
        if inner.tgt != self.src {
            return Err(InserterError::InvalidFunctor("functors are not composable".into()));
        }
        Ok(Functor {
            src: inner.src.clone(),
            tgt: self.tgt.clone(),
            objects: inner.objects.iter().map(|&o| self.objects[o]).collect(),
            arrows: inner.arrows.iter().map(|&a| self.arrows[a]).collect(),
        })
    }

    pub fn source(&self) -> &Arc<FiniteCategory> {
        &self.src
    }

    pub fn target(&self) -> &Arc<FiniteCategory> {
        &self.tgt
    }

    pub fn object(&self, o: usize) -> usize {
        self.objects[o]
    }

    pub fn arrow(&self, f: usize) -> usize {
        self.arrows[f]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.objects
    }

    pub fn arrow_map(&self) -> &[usize] {
        &self.arrows
    }

    pub fn is_parallel(&self, other: &Functor) -> bool {
        self.src == other.src && self.tgt == other.tgt
    }
}

/// A natural transformation `α: F ⇒ G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    src: Functor,
    tgt: Functor,
    components: Vec<usize>,
}

impl NatTrans {
    pub fn new(src: Functor, tgt: Functor, components: Vec<usize>) -> Result<Self, InserterError> {
        if !src.is_parallel(&tgt) {
            return Err(InserterError::NotParallel);
        }
        let c = &src.src;
        let d = &src.tgt;
        if components.len() != c.object_count() {
            return Err(InserterError::InvalidNatTrans("one component per object required".into()));
        }
        for (o, &k) in components.iter().enumerate() {
            let a = d.arrows.get(k).ok_or_else(|| InserterError::InvalidNatTrans("unknown arrow".into()))?;
            if a.src != src.objects[o] || a.tgt != tgt.objects[o] {
                return Err(InserterError::InvalidNatTrans(format!(
                    "component at `{}` has the wrong type",
                    c.object_label(o)
                )));
            }
        }
        for (f, a) in c.arrows.iter().enumerate() {
            let left = d.compose(tgt.arrows[f], components[a.src]);
            let right = d.compose(components[a.tgt], src.arrows[f]);
            if left != right {
                return Err(InserterError::InvalidNatTrans(format!("naturality fails at `{}`", a.name)));
            }
        }
        Ok(NatTrans { src, tgt, components })
    }

    pub fn source(&self) -> &Functor {
        &self.src
    }

    pub fn target(&self) -> &Functor {
        &self.tgt
    }

    pub fn component(&self, o: usize) -> usize {
        self.components[o]
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }
}

/// `L ⊣ R` with `L: X -> Y`, unit `1_X ⇒ R L` and counit `L R ⇒ 1_Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjunction {
    left: Functor,
    right: Functor,
    unit: Vec<usize>,
    counit: Vec<usize>,
}

impl Adjunction {
    pub fn new(left: Functor, right: Functor, unit: Vec<usize>, counit: Vec<usize>) -> Result<Self, InserterError> {
        let invalid = |m: String| InserterError::AdjunctionInvalid(m);
        if left.tgt != right.src || right.tgt != left.src {
            return Err(invalid("functors must go back and forth".into()));
        }
        let x = left.src.clone();
        let y = left.tgt.clone();
        let rl = right.compose(&left)?;
        let lr = left.compose(&right)?;
        NatTrans::new(Functor::identity(&x), rl, unit.clone()).map_err(|e| invalid(format!("unit: {e}")))?;
        NatTrans::new(lr, Functor::identity(&y), counit.clone()).map_err(|e| invalid(format!("counit: {e}")))?;
        for o in 0..x.object_count() {
            let lo = left.objects[o];
            if y.compose(counit[lo], left.arrows[unit[o]]) != Some(y.identity(lo)) {
                return Err(invalid(format!("triangle identity fails at `{}`", x.object_label(o))));
            }
        }
        for o in 0..y.object_count() {
            let ro = right.objects[o];
            if x.compose(right.arrows[counit[o]], unit[ro]) != Some(x.identity(ro)) {
                return Err(invalid(format!("triangle identity fails at `{}`", y.object_label(o))));
            }
        }
        Ok(Adjunction {
            left,
            right,
            unit,
            counit,
        })
    }

    /// Between thin categories the unit and counit are forced.
    pub fn thin(left: Functor, right: Functor) -> Result<Self, InserterError> {
        let x = left.src.clone();
        let y = left.tgt.clone();
        let pick = |cat: &FiniteCategory, a: usize, b: usize| {
            cat.hom(a, b).first().copied().ok_or_else(|| {
                InserterError::AdjunctionInvalid(format!(
                    "no arrow {} -> {}",
                    cat.object_label(a),
                    cat.object_label(b)
                ))
            })
        };
        let unit = (0..x.object_count())
            .map(|o| pick(&x, o, right.objects[left.objects[o]]))
            .collect::<Result<Vec<_>, _>>()?;
        let counit = (0..y.object_count())
            .map(|o| pick(&y, left.objects[right.objects[o]], o))
            .collect::<Result<Vec<_>, _>>()?;
        Adjunction::new(left, right, unit, counit)
    }

    pub fn left(&self) -> &Functor {
        &self.left
    }

    pub fn right(&self) -> &Functor {
        &self.right
    }

    pub fn unit(&self, o: usize) -> usize {
        self.unit[o]
    }

    pub fn counit(&self, o: usize) -> usize {
        self.counit[o]
    }
}

/// `Ins(F, G)` with its forgetful functor `U` and the universal
/// transformation `λ: F U ⇒ G U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inserter {
    pub category: Arc<FiniteCategory>,
    pub forgetful: Functor,
    pub lambda: NatTrans,
    /// Object `i` is the pair `(A, r: FA -> GA)`.
    pub pairs: Vec<(usize, usize)>,
    f: Functor,
    g: Functor,
    arrow_index: HashMap<(usize, usize, usize), usize>,
}

pub fn inserter(f: &Functor, g: &Functor) -> Result<Inserter, InserterError> {
    if !f.is_parallel(g) {
        return Err(InserterError::NotParallel);
    }
    let a = f.src.clone();
    let b = f.tgt.clone();
    let mut pairs = Vec::new();
    for o in 0..a.object_count() {
        for &r in b.hom(f.objects[o], g.objects[o]) {
            pairs.push((o, r));
        }
    }
    let labels: Vec<String> = pairs
        .iter()
        .map(|&(o, r)| format!("({},{})", a.object_label(o), b.arrow(r).name))
        .collect();
    let mut arrows = Vec::new();
    let mut base = Vec::new();
    let mut arrow_index = HashMap::new();
    for (i, &(o, r)) in pairs.iter().enumerate() {
        for (j, &(p, s)) in pairs.iter().enumerate() {
            for &d in a.hom(o, p) {
                if b.compose(g.arrows[d], r) == b.compose(s, f.arrows[d]) {
                    arrow_index.insert((d, i, j), arrows.len());
                    arrows.push(Arrow {
                        name: format!("{}:{}->{}", a.arrow(d).name, labels[i], labels[j]),
                        src: i,
                        tgt: j,
                    });
                    base.push(d);
                }
            }
        }
    }
    let identities: Vec<usize> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(o, _))| arrow_index[&(a.identity(o), i, i)])
        .collect();
    let category = Arc::new(FiniteCategory::build(labels, arrows.clone(), identities, |e, d| {
        let composite = a.compose(base[e], base[d])?;
        arrow_index.get(&(composite, arrows[d].src, arrows[e].tgt)).copied()
    })?);
    let forgetful = Functor {
        src: category.clone(),
        tgt: a.clone(),
        objects: pairs.iter().map(|p| p.0).collect(),
        arrows: base,
    };
    let lambda = NatTrans {
        src: f.compose(&forgetful)?,
        tgt: g.compose(&forgetful)?,
        components: pairs.iter().map(|p| p.1).collect(),
    };
    Ok(Inserter {
        category,
        forgetful,
        lambda,
        pairs,
        f: f.clone(),
        g: g.clone(),
        arrow_index,
    })
}

impl Inserter {
    pub fn object_of(&self, base: usize, r: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (base, r))
    }

    /// The inserter arrow over base arrow `d` from object `i` to `j`.
    pub fn arrow_over(&self, d: usize, i: usize, j: usize) -> Option<usize> {
        self.arrow_index.get(&(d, i, j)).copied()
    }

    pub fn functors(&self) -> (&Functor, &Functor) {
        (&self.f, &self.g)
    }

    /// The unique `W: X -> Ins(F, G)` with `U W = V` and `λ W = α`.
    pub fn induced(&self, v: &Functor, alpha: &[usize]) -> Result<Functor, InserterError> {
        if v.tgt != self.f.src {
            return Err(InserterError::InvalidFunctor("cone does not land in the base".into()));
        }
        let fv = self.f.compose(v)?;
        let gv = self.g.compose(v)?;
        NatTrans::new(fv, gv, alpha.to_vec())?;
        let objects = (0..v.src.object_count())
            .map(|x| self.object_of(v.objects[x], alpha[x]).expect("every pair is an object"))
            .collect::<Vec<_>>();
        let arrows = v
            .src
            .arrows
            .iter()
            .enumerate()
            .map(|(k, a)| {
                self.arrow_over(v.arrows[k], objects[a.src], objects[a.tgt])
                    .ok_or_else(|| InserterError::InvalidNatTrans("cone is not natural".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Functor::new(v.src.clone(), self.category.clone(), objects, arrows)
    }
}

/// Every functor `X -> C`, by backtracking over object images and then
/// arrow images. Gives up past `limit` results.
pub fn enumerate_functors(x: &Arc<FiniteCategory>, c: &Arc<FiniteCategory>, limit: usize) -> Result<Vec<Functor>, InserterError> {
    let mut out = Vec::new();
    let n = x.object_count();
    let nc = c.object_count();
    let total = nc
        .checked_pow(n as u32)
        .filter(|&t| t <= 1_000_000)
        .ok_or_else(|| InserterError::BoundTooLarge("too many object maps".into()))?;
    for code in 0..total {
        let objects = decode_function(code, n, nc);
        let mut arrows = vec![usize::MAX; x.arrow_count()];
        let free: Vec<usize> = (0..x.arrow_count()).filter(|&f| !x.is_identity(f)).collect();
        for o in 0..n {
            arrows[x.identity(o)] = c.identity(objects[o]);
        }
        fn go(
            k: usize,
            free: &[usize],
            x: &Arc<FiniteCategory>,
            c: &Arc<FiniteCategory>,
            objects: &[usize],
            arrows: &mut Vec<usize>,
            out: &mut Vec<Functor>,
            limit: usize,
        ) -> Result<(), InserterError> {
            if k == free.len() {
                if let Ok(f) = Functor::new(x.clone(), c.clone(), objects.to_vec(), arrows.clone()) {
                    out.push(f);
                    if out.len() > limit {
                        return Err(InserterError::BoundTooLarge("too many functors".into()));
                    }
                }
                return Ok(());
            }
            let a = x.arrow(free[k]);
            for &img in c.hom(objects[a.src], objects[a.tgt]) {
                arrows[free[k]] = img;
                go(k + 1, free, x, c, objects, arrows, out, limit)?;
            }
            Ok(())
        }
        go(0, &free, x, c, &objects, &mut arrows, &mut out, limit)?;
    }
    Ok(out)
}

/// Every natural transformation `F ⇒ G`.
pub fn enumerate_nat_trans(f: &Functor, g: &Functor, limit: usize) -> Result<Vec<NatTrans>, InserterError> {
    if !f.is_parallel(g) {
        return Err(InserterError::NotParallel);
    }
    let d = &f.tgt;
    let choices: Vec<&[usize]> = (0..f.src.object_count())
        .map(|o| d.hom(f.objects[o], g.objects[o]))
        .collect();
    let total = choices
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
        .filter(|&t| t <= limit.saturating_mul(64).max(1_000_000))
        .ok_or_else(|| InserterError::BoundTooLarge("too many component choices".into()))?;
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut components = Vec::with_capacity(choices.len());
        for c in choices.iter().rev() {
            components.push(c[code % c.len()]);
            code /= c.len();
        }
        components.reverse();
        if let Ok(t) = NatTrans::new(f.clone(), g.clone(), components) {
            out.push(t);
            if out.len() > limit {
                return Err(InserterError::BoundTooLarge("too many transformations".into()));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConeReport {
    pub cones: usize,
    pub unique_factorizations: usize,
}

impl ConeReport {
    pub fn holds(&self) -> bool {
        self.cones == self.unique_factorizations
    }
}

/// Checks the universal property of `Ins(F, G)` against every cone
/// `(V: X -> A, α: F V ⇒ G V)` out of `x`: exactly one `W` with `U W = V`
/// and `λ W = α` exists among all functors `X -> Ins(F, G)`.
pub fn verify_universal_property(ins: &Inserter, x: &Arc<FiniteCategory>) -> Result<ConeReport, InserterError> {
    const LIMIT: usize = 100_000;
    let base = ins.f.src.clone();
    let candidates = enumerate_functors(x, &ins.category, LIMIT)?;
    let mut report = ConeReport::default();
    for v in enumerate_functors(x, &base, LIMIT)? {
        let fv = ins.f.compose(&v)?;
        let gv = ins.g.compose(&v)?;
        for alpha in enumerate_nat_trans(&fv, &gv, LIMIT)? {
            report.cones += 1;
            let w = ins.induced(&v, alpha.components())?;
            let matching = candidates
                .iter()
                .filter(|c| {
                    ins.forgetful.compose(c).is_ok_and(|uc| uc == v)
                        && (0..x.object_count()).all(|o| ins.lambda.components[c.objects[o]] == alpha.components[o])
                })
                .collect::<Vec<_>>();
            if matching.len() == 1 && *matching[0] == w {
                report.unique_factorizations += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForgetfulReport {
    pub faithful: bool,
    pub conservative: bool,
    pub amnestic: bool,
    pub uniquely_transportable: bool,
}

impl ForgetfulReport {
    pub fn all(&self) -> bool {
        self.faithful && self.conservative && self.amnestic && self.uniquely_transportable
    }
}

/// Decides the four properties exhaustively.
pub fn verify_forgetful(u: &Functor) -> ForgetfulReport {
    let c = &u.src;
    let d = &u.tgt;
    let n = c.object_count();
    let faithful = (0..n).all(|a| {
        (0..n).all(|b| {
            let images: std::collections::HashSet<usize> = c.hom(a, b).iter().map(|&f| u.arrows[f]).collect();
            images.len() == c.hom(a, b).len()
        })
    });
    let conservative = (0..c.arrow_count()).all(|f| !d.is_iso(u.arrows[f]) || c.is_iso(f));
    let amnestic = (0..c.arrow_count()).all(|f| !(c.is_iso(f) && d.is_identity(u.arrows[f])) || c.is_identity(f));
    let uniquely_transportable = (0..n).all(|obj| {
        let uc = u.objects[obj];
        (0..d.object_count()).all(|target| {
            d.hom(uc, target).iter().filter(|&&e| d.is_iso(e)).all(|&e| {
                let lifts = (0..n)
                    .flat_map(|other| c.hom(obj, other).iter().copied())
                    .filter(|&f| u.arrows[f] == e && c.is_iso(f))
                    .count();
                lifts == 1
            })
        })
    });
    ForgetfulReport {
        faithful,
        conservative,
        amnestic,
        uniquely_transportable,
    }
}

/// Is `(p, π1, π2)` a product of the targets of `π1`, `π2`?
pub fn is_product(cat: &FiniteCategory, pi1: usize, pi2: usize) -> bool {
    let p = cat.arrow(pi1).src;
    if cat.arrow(pi2).src != p {
        return false;
    }
    let (a, b) = (cat.arrow(pi1).tgt, cat.arrow(pi2).tgt);
    (0..cat.object_count()).all(|x| {
        cat.hom(x, a).iter().all(|&f| {
            cat.hom(x, b).iter().all(|&g| {
                cat.hom(x, p)
                    .iter()
                    .filter(|&&h| cat.compose(pi1, h) == Some(f) && cat.compose(pi2, h) == Some(g))
                    .count()
                    == 1
            })
        })
    })
}

pub fn find_product(cat: &FiniteCategory, a: usize, b: usize) -> Option<(usize, usize)> {
    (0..cat.object_count()).find_map(|p| {
        cat.hom(p, a)
            .iter()
            .find_map(|&pi1| cat.hom(p, b).iter().find(|&&pi2| is_product(cat, pi1, pi2)).map(|&pi2| (pi1, pi2)))
    })
}

/// Is `m` an equalizer of the parallel pair `f, g`?
pub fn is_equalizer(cat: &FiniteCategory, m: usize, f: usize, g: usize) -> bool {
    let src = cat.arrow(f).src;
    if cat.arrow(m).tgt != src || cat.compose(f, m) != cat.compose(g, m) {
        return false;
    }
    let e = cat.arrow(m).src;
    (0..cat.object_count()).all(|x| {
        cat.hom(x, src)
            .iter()
            .filter(|&&h| cat.compose(f, h) == cat.compose(g, h))
            .all(|&h| cat.hom(x, e).iter().filter(|&&u| cat.compose(m, u) == Some(h)).count() == 1)
    })
}

pub fn find_equalizer(cat: &FiniteCategory, f: usize, g: usize) -> Option<usize> {
    let src = cat.arrow(f).src;
    (0..cat.object_count()).find_map(|e| cat.hom(e, src).iter().copied().find(|&m| is_equalizer(cat, m, f, g)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LimitReport {
    /// The base has binary products and equalizers and `G` preserves them.
    pub hypotheses_hold: bool,
    pub products_checked: usize,
    pub products_created: usize,
    pub equalizers_checked: usize,
    pub equalizers_created: usize,
}

impl LimitReport {
    pub fn passes(&self) -> bool {
        !self.hypotheses_hold
            || (self.products_checked == self.products_created && self.equalizers_checked == self.equalizers_created)
    }
}

/// When the base has binary products and equalizers preserved by `G`,
/// checks that `Ins(F, G)` has them and that `U` preserves them.
pub fn check_limit_creation(ins: &Inserter) -> LimitReport {
    let a = &ins.f.src;
    let b = &ins.f.tgt;
    let g = &ins.g;
    let parallel_pairs = |cat: &FiniteCategory| {
        let n = cat.object_count();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let hom = cat.hom(x, y);
                for (i, &f) in hom.iter().enumerate() {
                    for &h in &hom[i + 1..] {
                        out.push((f, h));
                    }
                }
            }
        }
        out
    };
    let mut report = LimitReport::default();
    let mut hypotheses = true;
    'outer: for x in 0..a.object_count() {
        for y in 0..a.object_count() {
            match find_product(a, x, y) {
                Some((p1, p2)) if is_product(b, g.arrows[p1], g.arrows[p2]) => {}
                _ => {
                    hypotheses = false;
                    break 'outer;
                }
            }
        }
    }
    if hypotheses {
        hypotheses = parallel_pairs(a).into_iter().all(|(f, h)| {
            find_equalizer(a, f, h).is_some_and(|m| is_equalizer(b, g.arrows[m], g.arrows[f], g.arrows[h]))
        });
    }
    report.hypotheses_hold = hypotheses;
    if !hypotheses {
        return report;
    }
    let c = &ins.category;
    let u = &ins.forgetful;
    for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            report.products_checked += 1;
            if let Some((p1, p2)) = find_product(c, x, y) {
                if is_product(a, u.arrows[p1], u.arrows[p2]) {
                    report.products_created += 1;
                }
            }
        }
    }
    for (f, h) in parallel_pairs(c) {
        report.equalizers_checked += 1;
        if let Some(m) = find_equalizer(c, f, h) {
            if is_equalizer(a, u.arrows[m], u.arrows[f], u.arrows[h]) {
                report.equalizers_created += 1;
            }
        }
    }
    report
}

/// Mutually inverse concrete functors `Ψ: Ins(F,G) -> target` and `Φ`.
#[derive(Clone, Debug)]
pub struct Shift {
    pub source: Inserter,
    pub target: Inserter,
    pub psi: Functor,
    pub phi: Functor,
}

impl Shift {
    pub fn round_trip_is_identity(&self) -> bool {
        let id_s = Functor::identity(&self.source.category);
        let id_t = Functor::identity(&self.target.category);
        self.phi.compose(&self.psi).is_ok_and(|c| c == id_s) && self.psi.compose(&self.phi).is_ok_and(|c| c == id_t)
    }

    /// Both functors commute with the forgetful functors.
    pub fn is_concrete(&self) -> bool {
        self.target.forgetful.compose(&self.psi).is_ok_and(|c| c == self.source.forgetful)
            && self.source.forgetful.compose(&self.phi).is_ok_and(|c| c == self.target.forgetful)
    }
}

fn lift_objects(
    from: &Inserter,
    to: &Inserter,
    transform: impl Fn(usize, usize) -> Option<usize>,
) -> Result<Functor, InserterError> {
    let objects = from
        .pairs
        .iter()
        .map(|&(o, r)| {
            let t = transform(o, r).ok_or_else(|| InserterError::AdjunctionInvalid("transpose undefined".into()))?;
            to.object_of(o, t)
                .ok_or_else(|| InserterError::AdjunctionInvalid("transpose is not an object of the target".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let arrows = from
        .category
        .arrows
        .iter()
        .enumerate()
        .map(|(k, a)| {
            to.arrow_over(from.forgetful.arrows[k], objects[a.src], objects[a.tgt])
                .ok_or_else(|| InserterError::AdjunctionInvalid("morphism does not transport".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Functor::new(from.category.clone(), to.category.clone(), objects, arrows)
}

/// For `H ⊣ G`: `Ins(F, G) ≅ Ins(H F, 1)` via `r ↦ ε ∘ H r` and
/// `t ↦ G t ∘ η`.
pub fn shift_left(f: &Functor, g: &Functor, adj: &Adjunction) -> Result<Shift, InserterError> {
    if !f.is_parallel(g) {
        return Err(InserterError::NotParallel);
    }
    if adj.right != *g {
        return Err(InserterError::AdjunctionInvalid("right adjoint must be G".into()));
    }
    let h = &adj.left;
    let a = f.src.clone();
    let b = f.tgt.clone();
    let source = inserter(f, g)?;
    let target = inserter(&h.compose(f)?, &Functor::identity(&a))?;
    let psi = lift_objects(&source, &target, |o, r| a.compose(adj.counit[o], h.arrows[r]))?;
    let phi = lift_objects(&target, &source, |o, t| b.compose(g.arrows[t], adj.unit[f.objects[o]]))?;
    Ok(Shift {
        source,
        target,
        psi,
        phi,
    })
}

/// For `F ⊣ H`: `Ins(F, G) ≅ Ins(1, H G)` via `r ↦ H r ∘ η` and
/// `t ↦ ε ∘ F t`.
pub fn shift_right(f: &Functor, g: &Functor, adj: &Adjunction) -> Result<Shift, InserterError> {
    if !f.is_parallel(g) {
        return Err(InserterError::NotParallel);
    }
    if adj.left != *f {
        return Err(InserterError::AdjunctionInvalid("left adjoint must be F".into()));
    }
    let h = &adj.right;
    let a = f.src.clone();
    let b = f.tgt.clone();
    let source = inserter(f, g)?;
    let target = inserter(&Functor::identity(&a), &h.compose(g)?)?;
    let psi = lift_objects(&source, &target, |o, r| a.compose(h.arrows[r], adj.unit[o]))?;
    let phi = lift_objects(&target, &source, |o, t| b.compose(adj.counit[g.objects[o]], f.arrows[t]))?;
    Ok(Shift {
        source,
        target,
        psi,
        phi,
    })
}

/// A polynomial endofunctor `F(X) = Σ X^k` on finite sets, one named
/// injection per summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    summands: Signature,
}

impl Polynomial {
    pub fn new(summands: Vec<(String, usize)>) -> Result<Self, InserterError> {
        Signature::new(summands)
            .map(|summands| Polynomial { summands })
            .map_err(|e| InserterError::InvalidFunctor(e.to_string()))
    }

    /// F-algebras are algebras over this signature.
    pub fn signature(&self) -> &Signature {
        &self.summands
    }
}

/// The free F-algebra on a finite set, truncated at a depth: generators
/// have depth 0 and each application adds one.
#[derive(Clone, Debug)]
pub struct FreeFAlgebra {
    pub functor: Polynomial,
    pub generators: Arc<FinSet>,
    pub depth: usize,
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
}

const FREE_F_LIMIT: usize = 100_000;

pub fn free_f_algebra(functor: &Polynomial, generators: &Arc<FinSet>, depth: usize) -> Result<FreeFAlgebra, InserterError> {
    let sig = &functor.summands;
    let mut terms: Vec<Term> = (0..generators.len()).map(Term::Var).collect();
    let mut prev_end = 0;
    for d in 1..=depth {
        let end = terms.len();
        let mut level = Vec::new();
        for s in 0..sig.len() {
            let (name, k) = sig.op(s);
            if k == 0 {
                if d == 1 {
                    level.push(Term::constant(name));
                }
                continue;
            }
            if end == 0 {
                continue;
            }
            let count = end.checked_pow(k as u32).unwrap_or(usize::MAX);
            if count > FREE_F_LIMIT {
                return Err(InserterError::BoundTooLarge(format!("more than {FREE_F_LIMIT} terms")));
            }
            let mut t = vec![0; k];
            loop {
                if t.iter().any(|&i| i >= prev_end) {
                    level.push(Term::app(name, t.iter().map(|&i| terms[i].clone()).collect()));
                }
                let mut i = k;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    t[i] += 1;
                    if t[i] < end {
                        break;
                    }
                    t[i] = 0;
                }
                if t.iter().all(|&v| v == 0) {
                    break;
                }
            }
        }
        terms.extend(level);
        if terms.len() > FREE_F_LIMIT {
            return Err(InserterError::BoundTooLarge(format!("more than {FREE_F_LIMIT} terms")));
        }
        prev_end = end;
    }
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(FreeFAlgebra {
        functor: functor.clone(),
        generators: generators.clone(),
        depth,
        terms,
        index,
    })
}

impl FreeFAlgebra {
    pub fn size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// The insertion of generators.
    pub fn insertion(&self, g: usize) -> usize {
        g
    }

    /// The structure map on summand `s`; undefined past the depth bound.
    pub fn structure(&self, s: usize, args: &[usize]) -> Result<usize, InserterError> {
        let (name, _) = self.functor.summands.op(s);
        let t = Term::app(name, args.iter().map(|&a| self.terms[a].clone()).collect());
        self.index_of(&t)
            .ok_or_else(|| InserterError::DepthTooSmall(self.display_term(&t)))
    }

    pub fn display_term(&self, t: &Term) -> String {
        match t {
            Term::Var(g) => self.generators.label(*g).to_string(),
            Term::App(f, args) if args.is_empty() => f.to_string(),
            Term::App(f, args) => {
                let inner: Vec<String> = args.iter().map(|a| self.display_term(a)).collect();
                format!("{f}({})", inner.join(","))
            }
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| self.display_term(t)).collect()
    }

    /// The extension of `on_generators` to a map into a finite F-algebra,
    /// by recursion on terms.
    pub fn extend(&self, target: &FiniteAlgebra, on_generators: &[usize]) -> Result<Vec<usize>, InserterError> {
        if target.signature() != &self.functor.summands {
            return Err(InserterError::InvalidFunctor("target is not an algebra for this functor".into()));
        }
        if on_generators.len() != self.generators.len() {
            return Err(InserterError::InvalidFunctor("one image per generator required".into()));
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let v = match t {
                Term::Var(g) => on_generators[*g],
                Term::App(f, args) => {
                    let s = target.op_index(f).expect("same signature");
                    let vals: Vec<usize> = args.iter().map(|a| out[self.index[a]]).collect();
                    target.apply(s, &vals)
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    /// Is `map` a homomorphism wherever the structure map is defined?
    pub fn is_homomorphism(&self, target: &FiniteAlgebra, map: &[usize]) -> bool {
        self.terms.iter().enumerate().all(|(i, t)| match t {
            Term::Var(_) => true,
            Term::App(f, args) => {
                let s = target.op_index(f).expect("same signature");
                let vals: Vec<usize> = args.iter().map(|a| map[self.index[a]]).collect();
                map[i] == target.apply(s, &vals)
            }
        })
    }

    /// Exhaustively counts homomorphisms into `target` that restrict to
    /// `on_generators`.
    pub fn count_extensions(&self, target: &FiniteAlgebra, on_generators: &[usize]) -> Result<usize, InserterError> {
        let free = self.size() - self.generators.len();
        let total = target
            .size()
            .checked_pow(free as u32)
            .filter(|&t| t <= 10_000_000)
            .ok_or_else(|| InserterError::BoundTooLarge("too many candidate maps".into()))?;
        let count = Exec::default()
            .map_range(total, |code| {
                let mut map = on_generators.to_vec();
                map.extend(decode_function(code, free, target.size()));
                self.is_homomorphism(target, &map)
            })
            .into_iter()
            .filter(|&b| b)
            .count();
        Ok(count)
    }

    /// Every term of `self` is in `bigger` and the structure maps agree.
    pub fn embeds_in(&self, bigger: &FreeFAlgebra) -> bool {
        self.functor == bigger.functor
            && self.generators == bigger.generators
            && self.terms.iter().all(|t| bigger.index.contains_key(t))
            && (0..self.functor.summands.len()).all(|s| {
                let k = self.functor.summands.op(s).1;
                let n = self.size();
                let mut ok = true;
                let mut t = vec![0; k];
                let total = n.pow(k as u32);
                for code in 0..total {
                    let mut c = code;
                    for slot in t.iter_mut().rev() {
                        *slot = c % n;
                        c /= n;
                    }
                    if let Ok(v) = self.structure(s, &t) {
                        let lifted: Vec<usize> = t.iter().map(|&i| bigger.index[&self.terms[i]]).collect();
                        ok &= bigger.structure(s, &lifted).ok() == Some(bigger.index[&self.terms[v]]);
                    }
                }
                ok
            })
    }
}

/// A many-sorted signature: each operation has input sorts and an output
/// sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedSignature {
    pub sorts: Vec<String>,
    pub ops: Vec<(String, Vec<usize>, usize)>,
}

impl SortedSignature {
    pub fn one_sorted(sig: &Signature) -> Self {
        SortedSignature {
            sorts: vec!["s".into()],
            ops: sig.ops().map(|(n, k)| (n.to_string(), vec![0; k], 0)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaAlgReport {
    pub direct_objects: usize,
    pub direct_arrows: usize,
    pub inserter_objects: usize,
    pub inserter_arrows: usize,
    /// The comparison functor from the direct category to the inserter
    /// exists and is bijective on objects and arrows.
    pub isomorphic: bool,
}

/// Σ-algebras with every carrier of size at most `bound`, built directly
/// and as `Ins(ŝ, t̂)` over sorted sets; reports whether the comparison
/// functor is an isomorphism.
pub fn sigma_alg_as_inserter(sig: &SortedSignature, bound: usize) -> Result<SigmaAlgReport, InserterError> {
    if bound > 3 {
        return Err(InserterError::BoundTooLarge(format!("carrier bound {bound} exceeds 3")));
    }
    let ns = sig.sorts.len();
    // Base: sorted sets with every size in 0..=bound.
    let size_tuples: Vec<Vec<usize>> = (0..(bound + 1).pow(ns as u32))
        .map(|code| decode_function(code, ns, bound + 1))
        .collect();
    let tuple_label = |t: &[usize]| {
        if t.len() == 1 {
            t[0].to_string()
        } else {
            format!("({})", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        }
    };
    let a = Arc::new(FiniteCategory::concrete(
        size_tuples.iter().map(|t| tuple_label(t)).collect(),
        size_tuples.clone(),
    )?);
    let in_size = |t: &[usize], op: &(String, Vec<usize>, usize)| op.1.iter().map(|&s| t[s]).product::<usize>();
    let s_hat: Vec<Vec<usize>> = size_tuples
        .iter()
        .map(|t| sig.ops.iter().map(|op| in_size(t, op)).collect())
        .collect();
    let t_hat: Vec<Vec<usize>> = size_tuples
        .iter()
        .map(|t| sig.ops.iter().map(|op| t[op.2]).collect())
        .collect();
    let mut b_objects: Vec<Vec<usize>> = Vec::new();
    for t in s_hat.iter().chain(&t_hat) {
        if !b_objects.contains(t) {
            b_objects.push(t.clone());
        }
    }
    let b = Arc::new(FiniteCategory::concrete(
        b_objects.iter().map(|t| format!("[{}]", tuple_label(t))).collect(),
        b_objects.clone(),
    )?);
    let b_index = |t: &Vec<usize>| b_objects.iter().position(|x| x == t).expect("listed");

    // ŝ(d) acts on argument tuples componentwise; t̂(d) is d at the
    // output sort.
    let s_arrow = |d: usize| {
        let src = &size_tuples[a.arrow(d).src];
        let maps = a.functions(d).expect("concrete");
        let comps: Vec<Vec<usize>> = sig
            .ops
            .iter()
            .map(|op| {
                let dims: Vec<usize> = op.1.iter().map(|&s| src[s]).collect();
                let tgt_dims: Vec<usize> = op.1.iter().map(|&s| size_tuples[a.arrow(d).tgt][s]).collect();
                let total: usize = dims.iter().product();
                (0..total)
                    .map(|code| {
                        let args = decode_mixed(code, &dims);
                        let imgs: Vec<usize> = args.iter().zip(&op.1).map(|(&x, &s)| maps[s][x]).collect();
                        encode_mixed(&imgs, &tgt_dims)
                    })
                    .collect()
            })
            .collect();
        let (x, y) = (b_index(&s_hat[a.arrow(d).src]), b_index(&s_hat[a.arrow(d).tgt]));
        b.concrete_arrow(x, y, &comps).expect("all functions present")
    };
    let t_arrow = |d: usize| {
        let maps = a.functions(d).expect("concrete");
        let comps: Vec<Vec<usize>> = sig.ops.iter().map(|op| maps[op.2].clone()).collect();
        let (x, y) = (b_index(&t_hat[a.arrow(d).src]), b_index(&t_hat[a.arrow(d).tgt]));
        b.concrete_arrow(x, y, &comps).expect("all functions present")
    };
    let s_functor = Functor::new(
        a.clone(),
        b.clone(),
        s_hat.iter().map(&b_index).collect(),
        (0..a.arrow_count()).map(s_arrow).collect(),
    )?;
    let t_functor = Functor::new(
        a.clone(),
        b.clone(),
        t_hat.iter().map(&b_index).collect(),
        (0..a.arrow_count()).map(t_arrow).collect(),
    )?;
    let ins = inserter(&s_functor, &t_functor)?;

    // Direct side: algebras as (sizes, tables) and sort-wise homomorphisms.
    let mut algebras: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    for (o, t) in size_tuples.iter().enumerate() {
        let counts: Vec<usize> = sig.ops.iter().map(|op| t[op.2].pow(in_size(t, op) as u32)).collect();
        let total: usize = counts.iter().product();
        if algebras.len() + total > 100_000 {
            return Err(InserterError::BoundTooLarge("too many algebras".into()));
        }
        for code in 0..total {
            let codes = decode_mixed(code, &counts);
            let tables = sig
                .ops
                .iter()
                .zip(codes)
                .map(|(op, c)| decode_function(c, in_size(t, op), t[op.2]))
                .collect();
            algebras.push((o, tables));
        }
    }
    let is_hom = |x: &(usize, Vec<Vec<usize>>), y: &(usize, Vec<Vec<usize>>), maps: &[Vec<usize>]| {
        let (sx, sy) = (&size_tuples[x.0], &size_tuples[y.0]);
        sig.ops.iter().enumerate().all(|(k, op)| {
            let dims: Vec<usize> = op.1.iter().map(|&s| sx[s]).collect();
            let tdims: Vec<usize> = op.1.iter().map(|&s| sy[s]).collect();
            (0..dims.iter().product::<usize>()).all(|code| {
                let args = decode_mixed(code, &dims);
                let imgs: Vec<usize> = args.iter().zip(&op.1).map(|(&v, &s)| maps[s][v]).collect();
                maps[op.2][x.1[k][code]] == y.1[k][encode_mixed(&imgs, &tdims)]
            })
        })
    };
    let mut d_arrows = Vec::new();
    let mut d_maps: Vec<usize> = Vec::new();
    for (i, x) in algebras.iter().enumerate() {
        for (j, y) in algebras.iter().enumerate() {
            for &d in a.hom(x.0, y.0) {
                if is_hom(x, y, a.functions(d).expect("concrete")) {
                    d_arrows.push(Arrow {
                        name: format!("h{}", d_arrows.len()),
                        src: i,
                        tgt: j,
                    });
                    d_maps.push(d);
                }
            }
        }
    }
    let d_index: HashMap<(usize, usize, usize), usize> = d_arrows
        .iter()
        .zip(&d_maps)
        .enumerate()
        .map(|(k, (ar, &d))| ((d, ar.src, ar.tgt), k))
        .collect();
    let identities = algebras
        .iter()
        .enumerate()
        .map(|(i, x)| d_index[&(a.identity(x.0), i, i)])
        .collect();
    let direct = Arc::new(FiniteCategory::build(
        (0..algebras.len()).map(|i| format!("A{i}")).collect(),
        d_arrows.clone(),
        identities,
        |g, f| {
            let c = a.compose(d_maps[g], d_maps[f])?;
            d_index.get(&(c, d_arrows[f].src, d_arrows[g].tgt)).copied()
        },
    )?);

    // Comparison: (sizes, tables) ↦ (sizes, r) with r the tables as one
    // arrow ŝA -> t̂A.
    let objects: Option<Vec<usize>> = algebras
        .iter()
        .map(|(o, tables)| {
            let r = b.concrete_arrow(b_index(&s_hat[*o]), b_index(&t_hat[*o]), tables)?;
            ins.object_of(*o, r)
        })
        .collect();
    let isomorphic = match objects {
        None => false,
        Some(objects) => {
            let arrows: Option<Vec<usize>> = d_arrows
                .iter()
                .zip(&d_maps)
                .map(|(ar, &d)| ins.arrow_over(d, objects[ar.src], objects[ar.tgt]))
                .collect();
            match arrows {
                None => false,
                Some(arrows) => {
                    let bijective = |v: &[usize], n: usize| {
                        let mut hit = vec![false; n];
                        v.iter().for_each(|&x| hit[x] = true);
                        v.len() == n && hit.iter().all(|&h| h)
                    };
                    bijective(&objects, ins.category.object_count())
                        && bijective(&arrows, ins.category.arrow_count())
                        && Functor::new(direct.clone(), ins.category.clone(), objects, arrows).is_ok()
                }
            }
        }
    };
    Ok(SigmaAlgReport {
        direct_objects: direct.object_count(),
        direct_arrows: direct.arrow_count(),
        inserter_objects: ins.category.object_count(),
        inserter_arrows: ins.category.arrow_count(),
        isomorphic,
    })
}

fn decode_mixed(mut code: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = code % d.max(1);
        code /= d.max(1);
    }
    out
}

fn encode_mixed(args: &[usize], dims: &[usize]) -> usize {
    args.iter().zip(dims).fold(0, |acc, (&a, &d)| acc * d + a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Poset {
        let rel: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::new(Arc::new(FinSet::range(n)), &rel).unwrap()
    }

    fn thin(p: &Poset) -> Arc<FiniteCategory> {
        Arc::new(FiniteCategory::from_poset(p))
    }

    #[test]
    fn categories_validate() {
        let c = FiniteCategory::from_parts(
            vec!["A".into(), "B".into()],
            vec![("f".into(), 0, 1), ("g".into(), 0, 1)],
            &[],
        )
        .unwrap();
        assert_eq!(c.arrow_count(), 4);
        assert_eq!(c.hom(0, 1).len(), 2);
        let missing = FiniteCategory::from_parts(
            vec!["A".into()],
            vec![("e".into(), 0, 0)],
            &[],
        );
        assert!(matches!(missing, Err(InserterError::InvalidCategory(_))));
        let idem = FiniteCategory::from_parts(
            vec!["A".into()],
            vec![("e".into(), 0, 0)],
            &[("e".into(), "e".into(), "e".into())],
        )
        .unwrap();
        assert!(!idem.is_iso(1));
        assert!(thin(&chain(3)).validate().is_ok());
    }

    #[test]
    fn identity_inserter_on_poset_is_everything() {
        let c = thin(&chain(3));
        let id = Functor::identity(&c);
        let ins = inserter(&id, &id).unwrap();
        assert_eq!(ins.category.object_count(), 3);
        assert_eq!(ins.category.arrow_count(), c.arrow_count());
        assert!(verify_forgetful(&ins.forgetful).all());
    }

    #[test]
    fn poset_inserter_is_subposet() {
        let p = chain(4);
        let c = thin(&p);
        let f = Functor::from_object_map(c.clone(), c.clone(), vec![1, 1, 2, 3]).unwrap();
        let g = Functor::from_object_map(c.clone(), c.clone(), vec![0, 2, 2, 2]).unwrap();
        let ins = inserter(&f, &g).unwrap();
        let objs: Vec<usize> = ins.pairs.iter().map(|p| p.0).collect();
        let expected: Vec<usize> = (0..4).filter(|&a| p.leq(f.object(a), g.object(a))).collect();
        assert_eq!(objs, expected);
        assert!(verify_forgetful(&ins.forgetful).all());
        assert!(check_limit_creation(&ins).passes());
        let report = verify_universal_property(&ins, &Arc::new(FiniteCategory::arrow_category())).unwrap();
        assert!(report.cones > 0 && report.holds());
    }

    #[test]
    fn constant_at_bottom_gives_whole_category() {
        let p = chain(3);
        let c = thin(&p);
        let f = Functor::from_object_map(c.clone(), c.clone(), vec![0, 0, 0]).unwrap();
        let g = Functor::identity(&c);
        let ins = inserter(&f, &g).unwrap();
        assert_eq!(ins.category.object_count(), 3);
        assert_eq!(ins.category.arrow_count(), c.arrow_count());
    }

    #[test]
    fn collapse_functor_is_not_faithful() {
        let c = Arc::new(
            FiniteCategory::from_parts(
                vec!["A".into(), "B".into()],
                vec![("f".into(), 0, 1), ("g".into(), 0, 1)],
                &[],
            )
            .unwrap(),
        );
        let one = Arc::new(FiniteCategory::terminal());
        let u = Functor::new(c.clone(), one, vec![0, 0], vec![0; 4]).unwrap();
        let report = verify_forgetful(&u);
        assert!(!report.faithful);
        assert!(!report.conservative);
        assert!(verify_forgetful(&Functor::identity(&c)).all());
    }

    #[test]
    fn galois_shift_is_identity_on_carriers() {
        // A = 3-chain, B = 2-chain; G collapses the top two; H is its left
        // adjoint.
        let a = thin(&chain(3));
        let b = thin(&chain(2));
        let g = Functor::from_object_map(a.clone(), b.clone(), vec![0, 1, 1]).unwrap();
        let h = Functor::from_object_map(b.clone(), a.clone(), vec![0, 1]).unwrap();
        let adj = Adjunction::thin(h, g.clone()).unwrap();
        let f = Functor::from_object_map(a.clone(), b.clone(), vec![1, 1, 1]).unwrap();
        let shift = shift_left(&f, &g, &adj).unwrap();
        assert!(shift.round_trip_is_identity());
        assert!(shift.is_concrete());
        let carriers: Vec<usize> = shift.source.pairs.iter().map(|p| p.0).collect();
        let shifted: Vec<usize> = shift.target.pairs.iter().map(|p| p.0).collect();
        assert_eq!(carriers, shifted);
        assert_eq!(carriers, vec![1, 2]);
    }

    #[test]
    fn identity_adjunction_shifts() {
        let c = thin(&chain(2));
        let id = Functor::identity(&c);
        let adj = Adjunction::new(id.clone(), id.clone(), vec![0, 1], vec![0, 1]).unwrap();
        let left = shift_left(&id, &id, &adj).unwrap();
        assert!(left.round_trip_is_identity() && left.is_concrete());
        let right = shift_right(&id, &id, &adj).unwrap();
        assert!(right.round_trip_is_identity() && right.is_concrete());
    }

    #[test]
    fn bad_adjunction_is_rejected() {
        let a = thin(&chain(2));
        let g = Functor::from_object_map(a.clone(), a.clone(), vec![0, 0]).unwrap();
        let h = Functor::from_object_map(a.clone(), a.clone(), vec![1, 1]).unwrap();
        assert!(matches!(Adjunction::thin(h, g), Err(InserterError::AdjunctionInvalid(_))));
    }

    #[test]
    fn free_f_algebra_examples() {
        let g = Arc::new(FinSet::new(["g"]).unwrap());
        let id = Polynomial::new(vec![("s".into(), 1)]).unwrap();
        let chain = free_f_algebra(&id, &g, 3).unwrap();
        assert_eq!(chain.labels(), vec!["g", "s(g)", "s(s(g))", "s(s(s(g)))"]);
        assert!(matches!(chain.structure(0, &[3]), Err(InserterError::DepthTooSmall(_))));

        let nat = Polynomial::new(vec![("s".into(), 1), ("z".into(), 0)]).unwrap();
        let empty = Arc::new(FinSet::empty());
        let numerals = free_f_algebra(&nat, &empty, 3).unwrap();
        assert_eq!(numerals.labels(), vec!["z", "s(z)", "s(s(z))"]);

        let sq = Polynomial::new(vec![("p".into(), 2)]).unwrap();
        let trees = free_f_algebra(&sq, &g, 2).unwrap();
        assert_eq!(trees.size(), 5);
        assert!(trees.embeds_in(&free_f_algebra(&sq, &g, 3).unwrap()));

        // Universal property against a 2-element algebra.
        let target = FiniteAlgebra::new(
            sq.signature().clone(),
            Arc::new(FinSet::range(2)),
            vec![vec![1, 0, 0, 1]],
        )
        .unwrap();
        for h in 0..2 {
            let ext = trees.extend(&target, &[h]).unwrap();
            assert!(trees.is_homomorphism(&target, &ext));
            assert_eq!(trees.count_extensions(&target, &[h]).unwrap(), 1);
        }
    }

    #[test]
    fn sigma_algebras_as_inserter() {
        let empty = SortedSignature::one_sorted(&Signature::default());
        let r = sigma_alg_as_inserter(&empty, 2).unwrap();
        assert!(r.isomorphic);
        assert_eq!(r.direct_objects, 3);
        let unary = SortedSignature::one_sorted(&Signature::new([("u", 1)]).unwrap());
        let r = sigma_alg_as_inserter(&unary, 2).unwrap();
        assert!(r.isomorphic);
        assert_eq!(r.direct_objects, 1 + 1 + 4);
        let binary = SortedSignature::one_sorted(&Signature::new([("m", 2)]).unwrap());
        let r = sigma_alg_as_inserter(&binary, 2).unwrap();
        assert!(r.isomorphic);
        assert_eq!(r.direct_objects, 1 + 1 + 16);
        assert!(matches!(sigma_alg_as_inserter(&binary, 4), Err(InserterError::BoundTooLarge(_))));
    }
}
