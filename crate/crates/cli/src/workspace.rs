//! Named definitions resolved from parsed declarations, and the printer
//! that writes them back as source.

use std::fmt::Write as _;
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use veq_core::birkhoff::{FiniteAlgebra, FiniteGroup};
use veq_core::finset::{FinFunction, FinSet};
use veq_core::inserters::{Adjunction, FiniteCategory, Functor, Poset};
use veq_core::series::TruncatedSeries;
use veq_core::theories::{Axiom, Signature, Term, TheoryMorphism, TheoryPresentation, VarNames};

use crate::dsl::{self, quote, Decl, DeclKind, Named, ParseError, Pos, RawTerm, SeriesLit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{pos}: unknown {kind} `{name}`")]
    Resolution { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: {kind} `{name}` is defined twice")]
    Duplicate { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: `{name}` fails its invariants: {reason}")]
    Invariant { pos: Pos, name: String, reason: String },
}

impl LoadError {
    fn invariant(decl: &Decl, reason: impl ToString) -> Self {
        LoadError::Invariant {
            pos: decl.pos,
            name: decl.name.clone(),
            reason: reason.to_string(),
        }
    }
}

/// A definition and where it came from. Equality ignores the position.
#[derive(Clone, Debug)]
pub struct Entry<T> {
    pub value: T,
    pub pos: Pos,
}

impl<T: PartialEq> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunDef {
    pub dom: String,
    pub cod: String,
    pub function: FinFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDef {
    pub on: String,
    pub equations: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThmorDef {
    pub source: String,
    pub target: String,
    pub morphism: TheoryMorphism,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CategorySource {
    Explicit,
    Poset(Poset),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CategoryDef {
    pub source: CategorySource,
    pub category: Arc<FiniteCategory>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctorDef {
    pub src: String,
    pub tgt: String,
    pub functor: Functor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjunctionDef {
    pub left: String,
    pub right: String,
    pub adjunction: Adjunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesDef {
    pub source: SeriesLit,
    pub series: TruncatedSeries,
}

impl SeriesDef {
    /// The series at another precision, when its source allows it.
    pub fn at_precision(&self, prec: usize) -> Result<TruncatedSeries, veq_core::series::SeriesError> {
        match &self.source {
            SeriesLit::List(c) if prec <= c.len() => Ok(self.series.truncate(prec)),
            SeriesLit::List(c) => Err(veq_core::series::SeriesError::PrecisionExhausted {
                needed: prec,
                available: c.len(),
            }),
            SeriesLit::Rec { initial, coeffs, .. } => TruncatedSeries::from_recurrence(initial, coeffs, prec),
            SeriesLit::RatFun { num, den, .. } => TruncatedSeries::from_rational_function(num, den, prec),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Workspace {
    pub sets: IndexMap<String, Entry<Arc<FinSet>>>,
    pub funs: IndexMap<String, Entry<FunDef>>,
    pub systems: IndexMap<String, Entry<SystemDef>>,
    pub cosystems: IndexMap<String, Entry<SystemDef>>,
    pub algebras: IndexMap<String, Entry<Arc<FiniteAlgebra>>>,
    pub groups: IndexMap<String, Entry<FiniteGroup>>,
    pub theories: IndexMap<String, Entry<Arc<TheoryPresentation>>>,
    pub thmors: IndexMap<String, Entry<ThmorDef>>,
    pub categories: IndexMap<String, Entry<CategoryDef>>,
    pub functors: IndexMap<String, Entry<FunctorDef>>,
    pub adjunctions: IndexMap<String, Entry<AdjunctionDef>>,
    pub series: IndexMap<String, Entry<SeriesDef>>,
}

fn lookup<'a, T>(map: &'a IndexMap<String, Entry<T>>, kind: &'static str, n: &Named) -> Result<&'a T, LoadError> {
    map.get(&n.name).map(|e| &e.value).ok_or_else(|| LoadError::Resolution {
        pos: n.pos,
        kind,
        name: n.name.clone(),
    })
}

fn insert<T>(map: &mut IndexMap<String, Entry<T>>, kind: &'static str, decl: &Decl, value: T) -> Result<(), LoadError> {
    if map.contains_key(&decl.name) {
        return Err(LoadError::Duplicate {
            pos: decl.pos,
            kind,
            name: decl.name.clone(),
        });
    }
    map.insert(decl.name.clone(), Entry { value, pos: decl.pos });
    Ok(())
}

/// Resolution order: each kind only refers to earlier kinds.
fn rank(kind: &DeclKind) -> usize {
    match kind {
        DeclKind::Set(_) => 0,
        DeclKind::Fun { .. } => 1,
        DeclKind::System { .. } => 2,
        DeclKind::Algebra { .. } => 3,
        DeclKind::Group { .. } => 4,
        DeclKind::Theory { .. } => 5,
        DeclKind::Thmor { .. } => 6,
        DeclKind::Category { .. } | DeclKind::Poset { .. } => 7,
        DeclKind::Functor { .. } => 8,
        DeclKind::Adjunction { .. } => 9,
        DeclKind::Series(_) => 10,
    }
}

/// Resolves a term against a signature: bare words are nullary symbols or
/// variables named by `names`.
pub fn resolve_term(raw: &RawTerm, sig: &Signature, names: &VarNames) -> Result<Term, LoadError> {
    let unknown = |kind| LoadError::Resolution {
        pos: raw.pos,
        kind,
        name: raw.head.clone(),
    };
    match &raw.args {
        None => {
            if sig.arity(&raw.head).is_some() {
                Ok(Term::constant(&raw.head))
            } else {
                names.index_of(&raw.head).map(Term::var).ok_or_else(|| unknown("symbol or variable"))
            }
        }
        Some(args) => {
            sig.arity(&raw.head).ok_or_else(|| unknown("symbol"))?;
            let args = args
                .iter()
                .map(|a| resolve_term(a, sig, names))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::app(&raw.head, args))
        }
    }
}

/// Resolves a term with no signature: standard variable names are
/// variables and every other word is a symbol.
pub fn resolve_free_term(raw: &RawTerm) -> Term {
    let names = VarNames::default();
    match &raw.args {
        None => names
            .index_of(&raw.head)
            .map(Term::var)
            .unwrap_or_else(|| Term::constant(&raw.head)),
        Some(args) => Term::app(&raw.head, args.iter().map(resolve_free_term).collect()),
    }
}

fn index_in(set: &FinSet, label: &str, pos: Pos, kind: &'static str) -> Result<usize, LoadError> {
    set.index_of(label).ok_or_else(|| LoadError::Resolution {
        pos,
        kind,
        name: label.to_string(),
    })
}

impl Workspace {
    pub fn parse(src: &str) -> Result<Self, LoadError> {
        Workspace::from_decls(dsl::parse(src)?)
    }

    /// Several sources share one namespace.
    pub fn parse_all<'a>(sources: impl IntoIterator<Item = &'a str>) -> Result<Self, LoadError> {
        let mut decls = Vec::new();
        for s in sources {
            decls.extend(dsl::parse(s)?);
        }
        Workspace::from_decls(decls)
    }

    pub fn from_decls(mut decls: Vec<Decl>) -> Result<Self, LoadError> {
        decls.sort_by_key(|d| rank(&d.kind));
        let mut ws = Workspace::default();
        for decl in &decls {
            ws.add(decl)?;
        }
        Ok(ws)
    }

    fn add(&mut self, decl: &Decl) -> Result<(), LoadError> {
        match &decl.kind {
            DeclKind::Set(labels) => {
                let set = FinSet::new(labels.iter().cloned()).map_err(|e| LoadError::invariant(decl, e))?;
                insert(&mut self.sets, "set", decl, Arc::new(set))
            }
            DeclKind::Fun { dom, cod, pairs } => {
                let d = lookup(&self.sets, "set", dom)?.clone();
                let c = lookup(&self.sets, "set", cod)?.clone();
                let function = FinFunction::from_pairs(d, c, pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
                    .map_err(|e| LoadError::invariant(decl, e))?;
                let def = FunDef {
                    dom: dom.name.clone(),
                    cod: cod.name.clone(),
                    function,
                };
                insert(&mut self.funs, "function", decl, def)
            }
            DeclKind::System { co, on, equations } => {
                let set = lookup(&self.sets, "set", on)?;
                for (l, r) in equations {
                    let (lf, rf) = (lookup(&self.funs, "function", l)?, lookup(&self.funs, "function", r)?);
                    if lf.function.dom() != rf.function.dom() || lf.function.cod() != rf.function.cod() {
                        return Err(LoadError::invariant(decl, format!("`{}` and `{}` are not parallel", l.name, r.name)));
                    }
                    let end = if *co { lf.function.cod() } else { lf.function.dom() };
                    if end != set {
                        let side = if *co { "codomain" } else { "domain" };
                        return Err(LoadError::invariant(decl, format!("`{}` does not have {side} `{}`", l.name, on.name)));
                    }
                }
                let def = SystemDef {
                    on: on.name.clone(),
                    equations: equations.iter().map(|(l, r)| (l.name.clone(), r.name.clone())).collect(),
                };
                if *co {
                    insert(&mut self.cosystems, "cosystem", decl, def)
                } else {
                    insert(&mut self.systems, "system", decl, def)
                }
            }
            DeclKind::Algebra { carrier, tables } => {
                let set = Arc::new(FinSet::new(carrier.iter().cloned()).map_err(|e| LoadError::invariant(decl, e))?);
                let sig = Signature::new(tables.iter().map(|(op, k, _)| (op.clone(), *k)))
                    .map_err(|e| LoadError::invariant(decl, e))?;
                let tabs = tables
                    .iter()
                    .map(|(_, _, entries)| {
                        entries
                            .iter()
                            .map(|l| index_in(&set, l, decl.pos, "carrier element"))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let algebra = FiniteAlgebra::new(sig, set, tabs).map_err(|e| LoadError::invariant(decl, e))?;
                insert(&mut self.algebras, "algebra", decl, Arc::new(algebra))
            }
            DeclKind::Group { carrier, rows } => {
                let set = Arc::new(FinSet::new(carrier.iter().cloned()).map_err(|e| LoadError::invariant(decl, e))?);
                if rows.len() != set.len() || rows.iter().any(|r| r.len() != set.len()) {
                    return Err(LoadError::invariant(decl, "table must be square over the carrier"));
                }
                let mul = rows
                    .iter()
                    .flatten()
                    .map(|l| index_in(&set, l, decl.pos, "group element"))
                    .collect::<Result<Vec<_>, _>>()?;
                let group = FiniteGroup::from_cayley(set, mul).map_err(|e| LoadError::invariant(decl, e))?;
                insert(&mut self.groups, "group", decl, group)
            }
            DeclKind::Theory { ops, axioms } => {
                let sig = Signature::new(ops.iter().cloned()).map_err(|e| LoadError::invariant(decl, e))?;
                let names = VarNames::standard_avoiding(&sig);
                let axioms = axioms
                    .iter()
                    .map(|(l, r)| Ok(Axiom::new(resolve_term(l, &sig, &names)?, resolve_term(r, &sig, &names)?)))
                    .collect::<Result<Vec<_>, LoadError>>()?;
                let theory = TheoryPresentation::new(sig, axioms).map_err(|e| LoadError::invariant(decl, e))?;
                insert(&mut self.theories, "theory", decl, Arc::new(theory))
            }
            DeclKind::Thmor { source, target, images } => {
                let s = lookup(&self.theories, "theory", source)?.clone();
                let t = lookup(&self.theories, "theory", target)?.clone();
                let names = t.var_names();
                let named = images
                    .iter()
                    .map(|(sym, raw)| Ok((sym.clone(), resolve_term(raw, t.signature(), &names)?)))
                    .collect::<Result<Vec<_>, LoadError>>()?;
                let morphism = TheoryMorphism::from_named(s, t, &named).map_err(|e| LoadError::invariant(decl, e))?;
                let def = ThmorDef {
                    source: source.name.clone(),
                    target: target.name.clone(),
                    morphism,
                };
                insert(&mut self.thmors, "theory morphism", decl, def)
            }
            DeclKind::Category {
                objects,
                arrows,
                composites,
            } => {
                let find = |o: &str| {
                    objects.iter().position(|x| x == o).ok_or_else(|| LoadError::Resolution {
                        pos: decl.pos,
                        kind: "object",
                        name: o.to_string(),
                    })
                };
                let arrows = arrows
                    .iter()
                    .map(|(n, a, b)| Ok((n.clone(), find(a)?, find(b)?)))
                    .collect::<Result<Vec<_>, LoadError>>()?;
                let category = FiniteCategory::from_parts(objects.clone(), arrows, composites)
                    .map_err(|e| LoadError::invariant(decl, e))?;
                let def = CategoryDef {
                    source: CategorySource::Explicit,
                    category: Arc::new(category),
                };
                insert(&mut self.categories, "category", decl, def)
            }
            DeclKind::Poset { elements, relations } => {
                let set = Arc::new(FinSet::new(elements.iter().cloned()).map_err(|e| LoadError::invariant(decl, e))?);
                let rel = relations
                    .iter()
                    .map(|(a, b)| Ok((index_in(&set, a, decl.pos, "element")?, index_in(&set, b, decl.pos, "element")?)))
                    .collect::<Result<Vec<_>, LoadError>>()?;
                let poset = Poset::new(set, &rel).map_err(|e| LoadError::invariant(decl, e))?;
                let def = CategoryDef {
                    category: Arc::new(FiniteCategory::from_poset(&poset)),
                    source: CategorySource::Poset(poset),
                };
                insert(&mut self.categories, "category", decl, def)
            }
            DeclKind::Functor { src, tgt, maps } => {
                let c = lookup(&self.categories, "category", src)?.category.clone();
                let d = lookup(&self.categories, "category", tgt)?.category.clone();
                let mut objects = vec![usize::MAX; c.object_count()];
                let mut arrows: Vec<usize> = (0..c.arrow_count()).map(|_| usize::MAX).collect();
                let mut explicit_arrows = false;
                for (a, b) in maps {
                    if let Some(o) = c.object_index(a) {
                        objects[o] = index_in(d.objects(), b, decl.pos, "object")?;
                    } else if let Some(f) = c.arrow_index(a) {
                        arrows[f] = d.arrow_index(b).ok_or_else(|| LoadError::Resolution {
                            pos: decl.pos,
                            kind: "arrow",
                            name: b.clone(),
                        })?;
                        explicit_arrows = true;
                    } else {
                        return Err(LoadError::Resolution {
                            pos: decl.pos,
                            kind: "object or arrow",
                            name: a.clone(),
                        });
                    }
                }
                if let Some(o) = objects.iter().position(|&o| o == usize::MAX) {
                    return Err(LoadError::invariant(decl, format!("object `{}` has no image", c.object_label(o))));
                }
                let functor = if explicit_arrows {
                    for o in 0..c.object_count() {
                        arrows[c.identity(o)] = d.identity(objects[o]);
                    }
                    if let Some(f) = arrows.iter().position(|&a| a == usize::MAX) {
                        return Err(LoadError::invariant(decl, format!("arrow `{}` has no image", c.arrow(f).name)));
                    }
                    Functor::new(c, d, objects, arrows)
                } else {
                    Functor::from_object_map(c, d, objects)
                }
                .map_err(|e| LoadError::invariant(decl, e))?;
                let def = FunctorDef {
                    src: src.name.clone(),
                    tgt: tgt.name.clone(),
                    functor,
                };
                insert(&mut self.functors, "functor", decl, def)
            }
            DeclKind::Adjunction {
                left,
                right,
                components,
            } => {
                let l = lookup(&self.functors, "functor", left)?.functor.clone();
                let r = lookup(&self.functors, "functor", right)?.functor.clone();
                let adjunction = match components {
                    None => Adjunction::thin(l, r),
                    Some((unit, counit)) => {
                        let arrows = |cat: &FiniteCategory, names: &[String]| {
                            names
                                .iter()
                                .map(|n| {
                                    cat.arrow_index(n).ok_or_else(|| LoadError::Resolution {
                                        pos: decl.pos,
                                        kind: "arrow",
                                        name: n.clone(),
                                    })
                                })
                                .collect::<Result<Vec<_>, _>>()
                        };
                        let unit = arrows(l.source(), unit)?;
                        let counit = arrows(l.target(), counit)?;
                        Adjunction::new(l, r, unit, counit)
                    }
                }
                .map_err(|e| LoadError::invariant(decl, e))?;
                let def = AdjunctionDef {
                    left: left.name.clone(),
                    right: right.name.clone(),
                    adjunction,
                };
                insert(&mut self.adjunctions, "adjunction", decl, def)
            }
            DeclKind::Series(lit) => {
                let series = match lit {
                    SeriesLit::List(c) => TruncatedSeries::new(c.clone()),
                    SeriesLit::Rec { initial, coeffs, prec } => TruncatedSeries::from_recurrence(initial, coeffs, *prec),
                    SeriesLit::RatFun { num, den, prec } => TruncatedSeries::from_rational_function(num, den, *prec),
                }
                .map_err(|e| LoadError::invariant(decl, e))?;
                let def = SeriesDef {
                    source: lit.clone(),
                    series,
                };
                insert(&mut self.series, "series", decl, def)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
            + self.funs.len()
            + self.systems.len()
            + self.cosystems.len()
            + self.algebras.len()
            + self.groups.len()
            + self.theories.len()
            + self.thmors.len()
            + self.categories.len()
            + self.functors.len()
            + self.adjunctions.len()
            + self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Source text that parses back to an equal workspace.
    pub fn print(&self) -> String {
        let mut out = String::new();
        let labels = |set: &FinSet| set.labels().map(quote).collect::<Vec<_>>().join(", ");
        for (name, e) in &self.sets {
            writeln!(out, "set {name} = {{{}}}", labels(&e.value)).unwrap();
        }
        for (name, e) in &self.funs {
            let f = &e.value.function;
            let pairs: Vec<String> = (0..f.dom().len())
                .map(|i| format!("{} -> {}", quote(f.dom().label(i)), quote(f.cod().label(f.apply(i)))))
                .collect();
            writeln!(out, "fun {name} : {} -> {} = {{{}}}", e.value.dom, e.value.cod, pairs.join(", ")).unwrap();
        }
        for (kw, map) in [("system", &self.systems), ("cosystem", &self.cosystems)] {
            for (name, e) in map {
                let eqs: Vec<String> = e.value.equations.iter().map(|(l, r)| format!("{l} ~ {r}")).collect();
                writeln!(out, "{kw} {name} on {} {{ {} }}", e.value.on, eqs.join("; ")).unwrap();
            }
        }
        for (name, e) in &self.algebras {
            let a = &e.value;
            let tables: Vec<String> = a
                .signature()
                .ops()
                .enumerate()
                .map(|(i, (op, k))| {
                    let entries: Vec<String> = a.table(i).iter().map(|&v| quote(a.carrier().label(v))).collect();
                    format!("{op}/{k} = [{}]", entries.join(", "))
                })
                .collect();
            writeln!(out, "algebra {name} = {{{}}} {{ {} }}", labels(a.carrier()), tables.join("; ")).unwrap();
        }
        for (name, e) in &self.groups {
            let g = &e.value;
            let n = g.order();
            let rows: Vec<String> = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| quote(g.carrier().label(g.mul(a, b))))
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .collect();
            writeln!(out, "group {name} = {{{}}} table [{}]", labels(g.carrier()), rows.join("; ")).unwrap();
        }
        for (name, e) in &self.theories {
            let t = &e.value;
            let names = t.var_names();
            let mut items: Vec<String> = t.signature().ops().map(|(op, k)| format!("op {op}/{k}")).collect();
            items.extend(
                t.axioms()
                    .iter()
                    .map(|ax| format!("axiom {} ~ {}", ax.lhs.display(&names), ax.rhs.display(&names))),
            );
            writeln!(out, "theory {name} {{ {} }}", items.join("; ")).unwrap();
        }
        for (name, e) in &self.thmors {
            let m = &e.value.morphism;
            let names = m.target().var_names();
            let items: Vec<String> = m
                .source()
                .signature()
                .ops()
                .zip(m.images())
                .map(|((op, _), t)| format!("{op} -> {}", t.display(&names)))
                .collect();
            writeln!(out, "thmor {name} : {} -> {} {{ {} }}", e.value.source, e.value.target, items.join("; ")).unwrap();
        }
        for (name, e) in &self.categories {
            let c = &e.value.category;
            match &e.value.source {
                CategorySource::Poset(p) => {
                    let rel: Vec<String> = p
                        .covers()
                        .iter()
                        .map(|&(a, b)| format!("{} <= {}", quote(p.elements().label(a)), quote(p.elements().label(b))))
                        .collect();
                    writeln!(out, "category {name} = poset {{{}}} {{{}}}", labels(p.elements()), rel.join(", ")).unwrap();
                }
                CategorySource::Explicit => {
                    let mut items = vec![format!("obj {}", labels(c.objects()))];
                    let proper: Vec<usize> = (0..c.arrow_count()).filter(|&f| !c.is_identity(f)).collect();
                    for &f in &proper {
                        let a = c.arrow(f);
                        items.push(format!(
                            "arr {} : {} -> {}",
                            quote(&a.name),
                            quote(c.object_label(a.src)),
                            quote(c.object_label(a.tgt))
                        ));
                    }
                    for &g in &proper {
                        for &f in &proper {
                            if let Some(h) = c.compose(g, f) {
                                items.push(format!(
                                    "comp {} . {} = {}",
                                    quote(&c.arrow(g).name),
                                    quote(&c.arrow(f).name),
                                    quote(&c.arrow(h).name)
                                ));
                            }
                        }
                    }
                    writeln!(out, "category {name} {{ {} }}", items.join("; ")).unwrap();
                }
            }
        }
        for (name, e) in &self.functors {
            let f = &e.value.functor;
            let (c, d) = (f.source(), f.target());
            let mut items: Vec<String> = (0..c.object_count())
                .map(|o| format!("{} -> {}", quote(c.object_label(o)), quote(d.object_label(f.object(o)))))
                .collect();
            if !d.is_thin() {
                items.extend(
                    (0..c.arrow_count())
                        .filter(|&a| !c.is_identity(a))
                        .map(|a| format!("{} -> {}", quote(&c.arrow(a).name), quote(&d.arrow(f.arrow(a)).name))),
                );
            }
            writeln!(out, "functor {name} : {} -> {} {{ {} }}", e.value.src, e.value.tgt, items.join("; ")).unwrap();
        }
        for (name, e) in &self.adjunctions {
            let adj = &e.value.adjunction;
            let (x, y) = (adj.left().source(), adj.left().target());
            write!(out, "adjunction {name} = {} -| {}", e.value.left, e.value.right).unwrap();
            if !(x.is_thin() && y.is_thin()) {
                let unit: Vec<String> = (0..x.object_count()).map(|o| quote(&x.arrow(adj.unit(o)).name)).collect();
                let counit: Vec<String> = (0..y.object_count()).map(|o| quote(&y.arrow(adj.counit(o)).name)).collect();
                write!(out, " unit [{}] counit [{}]", unit.join(", "), counit.join(", ")).unwrap();
            }
            out.push('\n');
        }
        for (name, e) in &self.series {
            writeln!(out, "series {name} = {}", print_series(&e.value.source)).unwrap();
        }
        out
    }
}

fn rationals(v: &[BigRational]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn print_series(lit: &SeriesLit) -> String {
    match lit {
        SeriesLit::List(c) => format!("[{}]", rationals(c)),
        SeriesLit::Rec { initial, coeffs, prec } => {
            format!("rec({}; {}) prec {prec}", rationals(initial), rationals(coeffs))
        }
        SeriesLit::RatFun { num, den, prec } => format!("ratfun([{}], [{}]) prec {prec}", rationals(num), rationals(den)),
    }
}

/// Integer helper for building series sources in code.
pub fn integers(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&i| BigRational::from_integer(BigInt::from(i))).collect()
}
