//! Command dispatch: each verb resolves its arguments in a [`Workspace`],
//! calls the owning module and produces one [`Record`].

use std::fmt::Display;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use veq_core::birkhoff::{
    abelianization, centralizer_of_labels, free_algebra_in_variety, hsp_member_with, identities_with, FiniteAlgebra,
    HspAnswer, HspOptions, IdentityOptions,
};
use veq_core::equations::{
    general_cosolution, general_solution, generated_equation, generated_variety, implies, is_cosolution, is_solution,
    single_equation_reduction, CoEquationSystem, Equation, EquationSystem, FinSetCat,
};
use veq_core::finset::{factor_through, FinFunction};
use veq_core::inserters::{check_limit_creation, inserter, shift_left, shift_right, verify_forgetful, Functor};
use veq_core::par::Exec;
use veq_core::series::{is_linear_recurrence, wronskian_with, TruncatedSeries, ZeroTest};
use veq_core::theories::{
    congruent_with, general_cosolution_theories, kernel_pair_membership, quotient_theory, unify, Budget, Certificate,
    Decision, KernelMembership, Term, TheoryPresentation, VarNames,
};

use crate::dsl::{self, Pos};
use crate::workspace::{resolve_free_term, resolve_term, Entry, LoadError, Workspace};

pub const VERBS: [&str; 23] = [
    "solve",
    "cosolve",
    "check-solution",
    "implies",
    "reduce",
    "genvar",
    "geneq",
    "unify",
    "decide",
    "quotient",
    "cosolve-theories",
    "kernel",
    "hsp",
    "identities",
    "freealg",
    "centralizer",
    "abelianize",
    "inserter",
    "verify-forgetful",
    "shift",
    "recurrence",
    "wronskian",
    "check",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Negative,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::Error => 2,
        }
    }
}

/// One structured result. Field order is fixed by the declaration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub verb: String,
    pub status: Status,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

impl Record {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub record: Record,
    pub text: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("`{name}` ({pos}): {message}")]
    Domain { name: String, pos: Pos, message: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Internal(_) => 3,
            _ => 2,
        }
    }

    pub fn record(&self, verb: &str) -> Record {
        Record {
            verb: verb.to_string(),
            status: Status::Error,
            payload: json!({ "message": self.to_string(), "exit": self.exit_code() }),
            precision: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub budget: usize,
    pub prec: Option<usize>,
    pub kmax: Option<usize>,
    pub depth: Option<usize>,
    pub vars: Option<usize>,
    pub exec: Exec,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            budget: Budget::default().max_steps,
            prec: None,
            kmax: None,
            depth: None,
            vars: None,
            exec: Exec::default(),
        }
    }
}

type RunResult = Result<Output, RunError>;

fn get<'a, T>(map: &'a indexmap::IndexMap<String, Entry<T>>, kind: &'static str, name: &str) -> Result<&'a Entry<T>, RunError> {
    map.get(name).ok_or_else(|| RunError::Unknown {
        kind,
        name: name.to_string(),
    })
}

fn domain<E: Display>(name: &str, pos: Pos) -> impl Fn(E) -> RunError + '_ {
    move |e| RunError::Domain {
        name: name.to_string(),
        pos,
        message: e.to_string(),
    }
}

fn arity(verb: &str, args: &[String], min: usize, max: Option<usize>, usage: &str) -> Result<(), RunError> {
    if args.len() < min || max.is_some_and(|m| args.len() > m) {
        return Err(RunError::Usage(format!("{verb} {usage}")));
    }
    Ok(())
}

fn labels(f: &veq_core::finset::FinSet) -> Vec<String> {
    f.labels().map(str::to_string).collect()
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn fun_json(f: &FinFunction) -> Value {
    let table: Vec<[&str; 2]> = (0..f.dom().len()).map(|i| [f.dom().label(i), f.cod().label(f.apply(i))]).collect();
    json!({ "domain": labels(f.dom()), "codomain": labels(f.cod()), "table": table })
}

fn ok(verb: &str, payload: Value, text: String) -> RunResult {
    Ok(Output {
        record: Record {
            verb: verb.to_string(),
            status: Status::Ok,
            payload,
            precision: None,
        },
        text,
    })
}

fn verdict(verb: &str, positive: bool, payload: Value, text: String) -> RunResult {
    let mut out = ok(verb, payload, text)?;
    if !positive {
        out.record.status = Status::Negative;
    }
    Ok(out)
}

fn with_precision(mut out: Output, precision: usize) -> Output {
    out.record.precision = Some(precision);
    out
}

fn certificate_json(c: &Certificate, names: &VarNames) -> Value {
    let steps: Vec<Value> = c
        .steps
        .iter()
        .map(|s| {
            json!({
                "position": s.position,
                "axiom": s.axiom,
                "direction": s.direction,
                "result": s.result.display(names).to_string(),
            })
        })
        .collect();
    json!({ "start": c.start.display(names).to_string(), "steps": steps })
}

fn certificate_text(c: &Certificate, names: &VarNames) -> String {
    let mut lines = vec![format!("  {}", c.start.display(names))];
    for s in &c.steps {
        lines.push(format!("~ {}    [axiom {} {:?} at {:?}]", s.result.display(names), s.axiom, s.direction, s.position));
    }
    lines.join("\n")
}

fn theory_text(t: &TheoryPresentation) -> String {
    let names = t.var_names();
    let mut items: Vec<String> = t.signature().ops().map(|(op, k)| format!("op {op}/{k}")).collect();
    items.extend(
        t.axioms()
            .iter()
            .map(|ax| format!("axiom {} ~ {}", ax.lhs.display(&names), ax.rhs.display(&names))),
    );
    items.join("; ")
}

fn axioms_json(t: &TheoryPresentation) -> Vec<String> {
    let names = t.var_names();
    t.axioms()
        .iter()
        .map(|ax| format!("{} ~ {}", ax.lhs.display(&names), ax.rhs.display(&names)))
        .collect()
}

fn theory_term(ws: &Workspace, theory: &str, src: &str) -> Result<Term, RunError> {
    let t = &get(&ws.theories, "theory", theory)?.value;
    let raw = dsl::parse_term(src).map_err(LoadError::from)?;
    Ok(resolve_term(&raw, t.signature(), &t.var_names())?)
}

fn fin_system(ws: &Workspace, name: &str) -> Result<EquationSystem<Arc<veq_core::finset::FinSet>, FinFunction>, RunError> {
    let e = get(&ws.systems, "system", name)?;
    let eqs = equations(ws, &e.value.equations)?;
    EquationSystem::new(&FinSetCat, eqs).map_err(domain(name, e.pos))
}

fn equations(ws: &Workspace, names: &[(String, String)]) -> Result<Vec<Equation<FinFunction>>, RunError> {
    names
        .iter()
        .map(|(l, r)| {
            Ok(Equation::new(
                get(&ws.funs, "function", l)?.value.function.clone(),
                get(&ws.funs, "function", r)?.value.function.clone(),
            ))
        })
        .collect()
}

fn functions(ws: &Workspace, names: &[String]) -> Result<Vec<FinFunction>, RunError> {
    names
        .iter()
        .map(|n| Ok(get(&ws.funs, "function", n)?.value.function.clone()))
        .collect()
}

fn functor<'a>(ws: &'a Workspace, name: &str) -> Result<&'a Functor, RunError> {
    Ok(&get(&ws.functors, "functor", name)?.value.functor)
}

fn series_at(ws: &Workspace, name: &str, prec: Option<usize>) -> Result<TruncatedSeries, RunError> {
    let e = get(&ws.series, "series", name)?;
    match prec {
        None => Ok(e.value.series.clone()),
        Some(p) => e.value.at_precision(p).map_err(domain(name, e.pos)),
    }
}

fn zero_test_text(z: ZeroTest) -> String {
    z.to_string()
}

/// Runs one command against a loaded workspace.
pub fn run(ws: &Workspace, verb: &str, args: &[String], opts: &Options) -> RunResult {
    let budget = Budget::steps(opts.budget);
    match verb {
        "solve" => {
            arity(verb, args, 1, Some(1), "SYSTEM")?;
            let e = get(&ws.systems, "system", &args[0])?;
            let system = fin_system(ws, &args[0])?;
            let m = general_solution(&FinSetCat, &system).map_err(domain(&args[0], e.pos))?;
            let carrier = labels(m.dom());
            let text = format!("carrier {}\ninclusion {m}", braces(&carrier));
            ok(verb, json!({ "system": args[0], "carrier": carrier, "inclusion": fun_json(&m) }), text)
        }
        "cosolve" => {
            arity(verb, args, 1, Some(1), "COSYSTEM")?;
            let e = get(&ws.cosystems, "cosystem", &args[0])?;
            let eqs = equations(ws, &e.value.equations)?;
            let cosystem = CoEquationSystem::new(&FinSetCat, eqs).map_err(domain(&args[0], e.pos))?;
            let q = general_cosolution(&FinSetCat, &cosystem).map_err(domain(&args[0], e.pos))?;
            let quotient = labels(q.cod());
            let text = format!("quotient {}\nmap {q}", braces(&quotient));
            ok(verb, json!({ "cosystem": args[0], "quotient": quotient, "map": fun_json(&q) }), text)
        }
        "check-solution" => {
            arity(verb, args, 2, Some(2), "SYSTEM FUNCTION")?;
            let a = &get(&ws.funs, "function", &args[1])?.value.function;
            if let Some(e) = ws.systems.get(&args[0]) {
                let system = fin_system(ws, &args[0])?;
                let holds = is_solution(&FinSetCat, a, &system).map_err(domain(&args[0], e.pos))?;
                let factor = if holds {
                    let m = general_solution(&FinSetCat, &system).map_err(domain(&args[0], e.pos))?;
                    factor_through(a, &m).map_err(domain(&args[1], e.pos))?
                } else {
                    None
                };
                let text = match &factor {
                    Some(f) => format!("solution; factors uniquely as {f}"),
                    None => "not a solution".to_string(),
                };
                let factor = factor.as_ref().map(fun_json);
                verdict(verb, holds, json!({ "system": args[0], "candidate": args[1], "solution": holds, "factorization": factor }), text)
            } else {
                let e = get(&ws.cosystems, "system or cosystem", &args[0])?;
                let eqs = equations(ws, &e.value.equations)?;
                let cosystem = CoEquationSystem::new(&FinSetCat, eqs).map_err(domain(&args[0], e.pos))?;
                let holds = is_cosolution(&FinSetCat, a, &cosystem).map_err(domain(&args[0], e.pos))?;
                let text = if holds { "cosolution" } else { "not a cosolution" }.to_string();
                verdict(verb, holds, json!({ "cosystem": args[0], "candidate": args[1], "solution": holds }), text)
            }
        }
        "implies" => {
            arity(verb, args, 2, Some(2), "SYSTEM SYSTEM")?;
            let e = fin_system(ws, &args[0])?;
            let k = fin_system(ws, &args[1])?;
            let pos = ws.systems[&args[0]].pos;
            let holds = implies(&FinSetCat, &e, &k).map_err(domain(&args[0], pos))?;
            let text = format!("{} {} {}", args[0], if holds { "implies" } else { "does not imply" }, args[1]);
            verdict(verb, holds, json!({ "premise": args[0], "conclusion": args[1], "implies": holds }), text)
        }
        "reduce" => {
            arity(verb, args, 1, Some(1), "SYSTEM")?;
            let system = fin_system(ws, &args[0])?;
            let pos = ws.systems[&args[0]].pos;
            let eq = single_equation_reduction(&FinSetCat, &system).map_err(domain(&args[0], pos))?;
            let text = format!("lhs {}\nrhs {}", eq.lhs, eq.rhs);
            ok(verb, json!({ "system": args[0], "lhs": fun_json(&eq.lhs), "rhs": fun_json(&eq.rhs) }), text)
        }
        "genvar" | "geneq" => {
            arity(verb, args, 1, None, "FUNCTION...")?;
            let family = functions(ws, args)?;
            let pos = ws.funs[&args[0]].pos;
            if verb == "genvar" {
                let m = generated_variety(&FinSetCat, &family).map_err(domain(&args[0], pos))?;
                let carrier = labels(m.dom());
                let text = format!("carrier {}\ninclusion {m}", braces(&carrier));
                ok(verb, json!({ "family": args, "carrier": carrier, "inclusion": fun_json(&m) }), text)
            } else {
                let eq = generated_equation(&FinSetCat, &family).map_err(domain(&args[0], pos))?;
                let text = format!("lhs {}\nrhs {}", eq.lhs, eq.rhs);
                ok(verb, json!({ "family": args, "lhs": fun_json(&eq.lhs), "rhs": fun_json(&eq.rhs) }), text)
            }
        }
        "unify" => {
            arity(verb, args, 2, Some(2), "TERM TERM")?;
            let t1 = resolve_free_term(&dsl::parse_term(&args[0]).map_err(LoadError::from)?);
            let t2 = resolve_free_term(&dsl::parse_term(&args[1]).map_err(LoadError::from)?);
            let names = VarNames::default();
            match unify(&t1, &t2) {
                Some(s) => {
                    let pairs: Vec<[String; 2]> = s.iter().map(|(v, t)| [names.name(v), t.display(&names).to_string()]).collect();
                    let text = s.display(&names).to_string();
                    ok(verb, json!({ "unifiable": true, "mgu": pairs, "display": text }), text)
                }
                None => verdict(verb, false, json!({ "unifiable": false, "mgu": null }), "not unifiable".into()),
            }
        }
        "decide" => {
            arity(verb, args, 3, Some(3), "THEORY TERM TERM")?;
            let e = get(&ws.theories, "theory", &args[0])?;
            let (l, r) = (theory_term(ws, &args[0], &args[1])?, theory_term(ws, &args[0], &args[2])?);
            let names = e.value.var_names();
            match congruent_with(&e.value, &l, &r, budget, opts.exec).map_err(domain(&args[0], e.pos))? {
                Decision::Provable(c) => {
                    if c.replay(&e.value).as_ref() != Ok(&r) {
                        return Err(RunError::Internal("certificate does not replay".into()));
                    }
                    let text = format!("provable in {} steps\n{}", c.steps.len(), certificate_text(&c, &names));
                    ok(verb, json!({ "theory": args[0], "provable": true, "certificate": certificate_json(&c, &names) }), text)
                }
                Decision::Unknown { explored } => verdict(
                    verb,
                    false,
                    json!({ "theory": args[0], "provable": false, "explored": explored }),
                    format!("unknown after exploring {explored} terms"),
                ),
            }
        }
        "quotient" => {
            if args.len() < 3 || args.len() % 2 == 0 {
                return Err(RunError::Usage(format!("{verb} THEORY TERM TERM [TERM TERM]...")));
            }
            let e = get(&ws.theories, "theory", &args[0])?;
            let extra = args[1..]
                .chunks(2)
                .map(|p| Ok((theory_term(ws, &args[0], &p[0])?, theory_term(ws, &args[0], &p[1])?)))
                .collect::<Result<Vec<_>, RunError>>()?;
            let (q, m) = quotient_theory(&e.value, &extra).map_err(domain(&args[0], e.pos))?;
            let (bij, full) = (m.is_bijective_on_objects(), m.is_full_by_construction());
            let text = format!("theory {{ {} }}\ncanonical morphism: bijective on objects {bij}, full {full}", theory_text(&q));
            ok(
                verb,
                json!({ "theory": args[0], "axioms": axioms_json(&q), "bijective_on_objects": bij, "full": full }),
                text,
            )
        }
        "cosolve-theories" => {
            if args.is_empty() || args.len() % 2 == 1 {
                return Err(RunError::Usage(format!("{verb} MORPHISM MORPHISM [MORPHISM MORPHISM]...")));
            }
            let pairs = args
                .chunks(2)
                .map(|p| {
                    Ok((
                        get(&ws.thmors, "theory morphism", &p[0])?.value.morphism.clone(),
                        get(&ws.thmors, "theory morphism", &p[1])?.value.morphism.clone(),
                    ))
                })
                .collect::<Result<Vec<_>, RunError>>()?;
            let pos = ws.thmors[&args[0]].pos;
            let (q, m) = general_cosolution_theories(&pairs).map_err(domain(&args[0], pos))?;
            let text = format!("theory {{ {} }}", theory_text(&q));
            ok(
                verb,
                json!({ "pairs": args, "axioms": axioms_json(&q), "full": m.is_full_by_construction() }),
                text,
            )
        }
        "kernel" => {
            arity(verb, args, 3, Some(3), "MORPHISM TERM TERM")?;
            let e = get(&ws.thmors, "theory morphism", &args[0])?;
            let m = &e.value.morphism;
            let source = &e.value.source;
            let (f, g) = (theory_term(ws, source, &args[1])?, theory_term(ws, source, &args[2])?);
            let names = m.target().var_names();
            match kernel_pair_membership(m, &f, &g, budget).map_err(domain(&args[0], e.pos))? {
                KernelMembership::InKernel(c) => {
                    let text = format!("in the kernel pair\n{}", certificate_text(&c, &names));
                    ok(verb, json!({ "morphism": args[0], "in_kernel": true, "certificate": certificate_json(&c, &names) }), text)
                }
                KernelMembership::Unknown { explored } => verdict(
                    verb,
                    false,
                    json!({ "morphism": args[0], "in_kernel": null, "explored": explored }),
                    format!("unknown after exploring {explored} terms"),
                ),
            }
        }
        "hsp" => {
            arity(verb, args, 2, Some(2), "TARGET ALGEBRA")?;
            let be = get(&ws.algebras, "algebra", &args[0])?;
            let a = &get(&ws.algebras, "algebra", &args[1])?.value;
            let b = &be.value;
            let defaults = HspOptions::for_target(b);
            let hsp_opts = HspOptions {
                k_max: opts.kmax.unwrap_or(defaults.k_max),
                identity_vars: opts.vars.unwrap_or(defaults.identity_vars),
                identity_depth: opts.depth.unwrap_or(defaults.identity_depth),
            };
            match hsp_member_with(b, a, hsp_opts, opts.exec).map_err(domain(&args[0], be.pos))? {
                HspAnswer::Yes(w) => {
                    w.replay(a, b).map_err(|e| RunError::Internal(format!("hsp witness does not replay: {e}")))?;
                    let tuple = |t: &Vec<usize>| format!("({})", t.iter().map(|&x| a.carrier().label(x)).collect::<Vec<_>>().join(","));
                    let generators: Vec<String> = w.generators.iter().map(tuple).collect();
                    let images: Vec<&str> = w.generator_images.iter().map(|&i| b.carrier().label(i)).collect();
                    let subalgebra: Vec<String> = w.subalgebra.iter().map(tuple).collect();
                    let map: Vec<&str> = w.map.iter().map(|&i| b.carrier().label(i)).collect();
                    let text = format!(
                        "member with k = {}: subalgebra of size {} generated by {} maps onto {}",
                        w.k,
                        subalgebra.len(),
                        braces(&generators),
                        args[0]
                    );
                    ok(
                        verb,
                        json!({
                            "target": args[0], "algebra": args[1], "member": true, "k": w.k,
                            "generators": generators, "generator_images": images,
                            "subalgebra": subalgebra, "map": map,
                        }),
                        text,
                    )
                }
                HspAnswer::NoWithinBounds { k_searched, violated } => {
                    let names = VarNames::standard_avoiding(b.signature());
                    let violated = violated.map(|(id, assignment)| {
                        let values: Vec<&str> = assignment.iter().map(|&x| b.carrier().label(x)).collect();
                        (id.display(&names).to_string(), values)
                    });
                    let text = match &violated {
                        Some((id, values)) => format!(
                            "not a member: {} satisfies {id} but {} fails it at ({})",
                            args[1],
                            args[0],
                            values.join(", ")
                        ),
                        None => format!("no witness with k <= {k_searched}"),
                    };
                    let violated = violated.map(|(id, values)| json!({ "identity": id, "assignment": values }));
                    verdict(
                        verb,
                        false,
                        json!({ "target": args[0], "algebra": args[1], "member": false, "k_searched": k_searched, "violated": violated }),
                        text,
                    )
                }
            }
        }
        "identities" => {
            arity(verb, args, 1, Some(1), "ALGEBRA")?;
            let e = get(&ws.algebras, "algebra", &args[0])?;
            let (n, d) = (opts.vars.unwrap_or(2), opts.depth.unwrap_or(2));
            let ids = identities_with(&e.value, IdentityOptions::new(n, d), opts.exec).map_err(domain(&args[0], e.pos))?;
            let names = VarNames::standard_avoiding(e.value.signature());
            let ids: Vec<String> = ids.iter().map(|i| i.display(&names).to_string()).collect();
            let text = ids.join("\n");
            ok(verb, json!({ "algebra": args[0], "vars": n, "depth": d, "identities": ids }), text)
        }
        "freealg" => {
            arity(verb, args, 1, Some(1), "ALGEBRA")?;
            let e = get(&ws.algebras, "algebra", &args[0])?;
            let n = opts.vars.unwrap_or(2);
            let free = free_algebra_in_variety(&e.value, n).map_err(domain(&args[0], e.pos))?;
            let names = VarNames::standard_avoiding(e.value.signature());
            let elements: Vec<String> = free.representatives.iter().map(|t| t.display(&names).to_string()).collect();
            let generators: Vec<usize> = (0..n).map(|i| free.generator(i)).collect();
            let text = format!("free algebra on {n} generators, {} elements\n{}", elements.len(), braces(&elements));
            ok(
                verb,
                json!({ "algebra": args[0], "generators": n, "size": elements.len(), "elements": elements, "generator_indices": generators }),
                text,
            )
        }
        "centralizer" => {
            arity(verb, args, 1, None, "GROUP ELEMENT...")?;
            let e = get(&ws.groups, "group", &args[0])?;
            let s: Vec<&str> = args[1..].iter().map(String::as_str).collect();
            let c = centralizer_of_labels(&e.value, &s).map_err(domain(&args[0], e.pos))?;
            let sub = labels(c.carrier());
            let text = format!("centralizer {} (order {})", braces(&sub), sub.len());
            ok(verb, json!({ "group": args[0], "of": s, "order": sub.len(), "subgroup": sub }), text)
        }
        "abelianize" => {
            arity(verb, args, 1, Some(1), "GROUP")?;
            let e = get(&ws.groups, "group", &args[0])?;
            let q = abelianization(&e.value).map_err(domain(&args[0], e.pos))?;
            let f = q.as_function();
            let quotient = labels(f.cod());
            let text = format!("abelianization of order {}\nmap {f}", quotient.len());
            ok(verb, json!({ "group": args[0], "order": quotient.len(), "quotient": quotient, "map": fun_json(&f) }), text)
        }
        "inserter" | "verify-forgetful" => {
            arity(verb, args, 2, Some(2), "FUNCTOR FUNCTOR")?;
            let (f, g) = (functor(ws, &args[0])?, functor(ws, &args[1])?);
            let pos = ws.functors[&args[0]].pos;
            let ins = inserter(f, g).map_err(domain(&args[0], pos))?;
            let cat = &ins.category;
            if verb == "inserter" {
                let objects = labels(cat.objects());
                let arrows: Vec<String> = (0..cat.arrow_count())
                    .filter(|&a| !cat.is_identity(a))
                    .map(|a| cat.arrow(a).name.clone())
                    .collect();
                let text = format!("{} objects {}\n{} non-identity arrows", objects.len(), braces(&objects), arrows.len());
                return ok(verb, json!({ "functors": args, "objects": objects, "arrows": arrows }), text);
            }
            let report = verify_forgetful(&ins.forgetful);
            let limits = check_limit_creation(&ins);
            let text = format!(
                "faithful {}\nconservative {}\namnestic {}\nuniquely transportable {}\nlimits: hypotheses {}, products {}/{}, equalizers {}/{}",
                report.faithful,
                report.conservative,
                report.amnestic,
                report.uniquely_transportable,
                limits.hypotheses_hold,
                limits.products_created,
                limits.products_checked,
                limits.equalizers_created,
                limits.equalizers_checked
            );
            verdict(
                verb,
                report.all() && limits.passes(),
                json!({
                    "functors": args,
                    "faithful": report.faithful,
                    "conservative": report.conservative,
                    "amnestic": report.amnestic,
                    "uniquely_transportable": report.uniquely_transportable,
                    "limits": {
                        "hypotheses_hold": limits.hypotheses_hold,
                        "products_checked": limits.products_checked,
                        "products_created": limits.products_created,
                        "equalizers_checked": limits.equalizers_checked,
                        "equalizers_created": limits.equalizers_created,
                    },
                }),
                text,
            )
        }
        "shift" => {
            arity(verb, args, 4, Some(4), "left|right FUNCTOR FUNCTOR ADJUNCTION")?;
            let (f, g) = (functor(ws, &args[1])?, functor(ws, &args[2])?);
            let adj = get(&ws.adjunctions, "adjunction", &args[3])?;
            let shift = match args[0].as_str() {
                "left" => shift_left(f, g, &adj.value.adjunction),
                "right" => shift_right(f, g, &adj.value.adjunction),
                _ => return Err(RunError::Usage(format!("{verb} left|right FUNCTOR FUNCTOR ADJUNCTION"))),
            }
            .map_err(domain(&args[3], adj.pos))?;
            let (round_trip, concrete) = (shift.round_trip_is_identity(), shift.is_concrete());
            let text = format!(
                "{} objects on each side; round trip identity {round_trip}; concrete {concrete}",
                shift.source.category.object_count()
            );
            verdict(
                verb,
                round_trip && concrete,
                json!({
                    "direction": args[0],
                    "functors": [args[1], args[2]],
                    "adjunction": args[3],
                    "source_objects": shift.source.category.object_count(),
                    "target_objects": shift.target.category.object_count(),
                    "round_trip_identity": round_trip,
                    "concrete": concrete,
                }),
                text,
            )
        }
        "recurrence" => {
            arity(verb, args, 3, Some(3), "SERIES order N")?;
            if args[1] != "order" {
                return Err(RunError::Usage(format!("{verb} SERIES order N")));
            }
            let n: usize = args[2]
                .parse()
                .map_err(|_| RunError::Usage(format!("order must be a natural number, got `{}`", args[2])))?;
            let f = series_at(ws, &args[0], opts.prec)?;
            let pos = ws.series[&args[0]].pos;
            let z = is_linear_recurrence(&f, n).map_err(domain(&args[0], pos))?;
            let out = verdict(
                verb,
                z.is_zero(),
                json!({ "series": args[0], "order": n, "zero_test": z }),
                format!("{} (precision {})", zero_test_text(z), f.precision()),
            )?;
            Ok(with_precision(out, f.precision()))
        }
        "wronskian" => {
            arity(verb, args, 1, None, "SERIES...")?;
            let fs = args
                .iter()
                .map(|s| series_at(ws, s, opts.prec))
                .collect::<Result<Vec<_>, _>>()?;
            let pos = ws.series[&args[0]].pos;
            let w = wronskian_with(&fs, opts.exec).map_err(domain(&args[0], pos))?;
            let z = w.zero_test();
            let coeffs: Vec<String> = w.coeffs().iter().map(|c| c.to_string()).collect();
            let out = verdict(
                verb,
                z.is_zero(),
                json!({ "series": args, "zero_test": z, "coefficients": coeffs }),
                format!("{w}\n{} (precision {})", zero_test_text(z), w.precision()),
            )?;
            Ok(with_precision(out, w.precision()))
        }
        "check" => {
            arity(verb, args, 0, Some(0), "")?;
            check(ws)
        }
        _ => Err(RunError::Usage(format!("unknown verb `{verb}`; expected one of {}", VERBS.join(", ")))),
    }
}

/// Re-validates every definition and the print/parse round trip.
fn check(ws: &Workspace) -> RunResult {
    for (name, e) in &ws.categories {
        e.value.category.validate().map_err(|err| RunError::Internal(format!("category `{name}`: {err}")))?;
    }
    for (name, e) in &ws.algebras {
        let a = &e.value;
        let rebuilt = FiniteAlgebra::new(a.signature().clone(), a.carrier().clone(), a.tables().to_vec());
        if rebuilt.as_ref().ok() != Some(a.as_ref()) {
            return Err(RunError::Internal(format!("algebra `{name}` no longer validates")));
        }
    }
    for (name, e) in &ws.thmors {
        let m = &e.value.morphism;
        for (img, (_, k)) in m.images().iter().zip(m.source().signature().ops()) {
            m.target()
                .signature()
                .check_term(img, Some(k))
                .map_err(|err| RunError::Internal(format!("theory morphism `{name}`: {err}")))?;
        }
    }
    let printed = ws.print();
    let reparsed = Workspace::parse(&printed).map_err(|e| RunError::Internal(format!("printed workspace fails to load: {e}")))?;
    if reparsed != *ws {
        return Err(RunError::Internal("printed workspace differs after reparsing".into()));
    }
    let counts = json!({
        "sets": ws.sets.len(),
        "functions": ws.funs.len(),
        "systems": ws.systems.len(),
        "cosystems": ws.cosystems.len(),
        "algebras": ws.algebras.len(),
        "groups": ws.groups.len(),
        "theories": ws.theories.len(),
        "morphisms": ws.thmors.len(),
        "categories": ws.categories.len(),
        "functors": ws.functors.len(),
        "adjunctions": ws.adjunctions.len(),
        "series": ws.series.len(),
    });
    ok(
        "check",
        json!({ "definitions": ws.len(), "counts": counts, "round_trip": true }),
        format!("{} definitions valid; round trip ok", ws.len()),
    )
}
