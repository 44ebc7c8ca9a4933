//! Shared generators for the property suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use casealt::categories::{CaseFeature, Category};
use casealt::entailment::{Arg, NfAtom, NormalForm};
use casealt::parser::{recombine, DerivationNode, Rule};
use casealt::terms::Term;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    Entity,
    Event,
    Prop,
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }
}

const BINDERS: [&str; 5] = ["x", "y", "z", "e", "k"];

/// Simply typed terms over the logical vocabulary. Such terms are strongly
/// normalizing, so every reduction order terminates.
pub struct TypedGen {
    pub rng: ChaCha8Rng,
    pub max_depth: usize,
}

impl TypedGen {
    pub fn term(&mut self, ty: &Ty) -> Term {
        let mut ctx = Vec::new();
        self.gen(ty, &mut ctx, self.max_depth)
    }

    fn var_of(&mut self, ty: &Ty, ctx: &[(String, Ty)]) -> Option<Term> {
        // innermost binding of a name shadows outer ones
        let mut visible: Vec<&str> = Vec::new();
        for (i, (name, t)) in ctx.iter().enumerate() {
            let shadowed = ctx[i + 1..].iter().any(|(n, _)| n == name);
            if !shadowed && t == ty {
                visible.push(name);
            }
        }
        visible.choose(&mut self.rng).map(|n| Term::var(*n))
    }

    fn small_type(&mut self) -> Ty {
        match self.rng.gen_range(0..5) {
            0 => Ty::Entity,
            1 => Ty::Event,
            2 => Ty::Prop,
            3 => Ty::arrow(Ty::Entity, Ty::Prop),
            _ => Ty::arrow(Ty::Event, Ty::Prop),
        }
    }

    fn gen(&mut self, ty: &Ty, ctx: &mut Vec<(String, Ty)>, depth: usize) -> Term {
        if depth > 0 && self.rng.gen_bool(0.25) {
            let arg_ty = self.small_type();
            let f = self.gen(&Ty::arrow(arg_ty.clone(), ty.clone()), ctx, depth - 1);
            let a = self.gen(&arg_ty, ctx, depth - 1);
            return Term::app(f, a);
        }
        if let Ty::Arrow(a, b) = ty {
            if depth == 0 || self.rng.gen_bool(0.7) {
                let x = *BINDERS.choose(&mut self.rng).unwrap();
                ctx.push((x.to_string(), (**a).clone()));
                let body = self.gen(b, ctx, depth.saturating_sub(1));
                ctx.pop();
                return Term::abs(x, body);
            }
            if let Some(v) = self.var_of(ty, ctx) {
                return v;
            }
            let x = *BINDERS.choose(&mut self.rng).unwrap();
            ctx.push((x.to_string(), (**a).clone()));
            let body = self.gen(b, ctx, depth.saturating_sub(1));
            ctx.pop();
            return Term::abs(x, body);
        }
        if self.rng.gen_bool(0.4) {
            if let Some(v) = self.var_of(ty, ctx) {
                return v;
            }
        }
        let d = depth.saturating_sub(1);
        match ty {
            Ty::Entity => Term::constant(*["j", "t"].choose(&mut self.rng).unwrap()),
            Ty::Event => Term::constant("ev0"),
            Ty::Prop => {
                if depth == 0 {
                    return match self.rng.gen_range(0..2) {
                        0 => Term::Top,
                        _ => Term::atom("rain", vec![Term::constant("ev0")]),
                    };
                }
                match self.rng.gen_range(0..5) {
                    0 => Term::Top,
                    1 => {
                        let e = self.gen(&Ty::Event, ctx, d);
                        let x = self.gen(&Ty::Entity, ctx, d);
                        Term::atom("run", vec![e, x])
                    }
                    2 => {
                        let e = self.gen(&Ty::Event, ctx, d);
                        let x = self.gen(&Ty::Entity, ctx, d);
                        Term::eq(Term::atom("Ag", vec![e]), x)
                    }
                    3 => Term::conj(self.gen(&Ty::Prop, ctx, d), self.gen(&Ty::Prop, ctx, d)),
                    _ => {
                        let x = *BINDERS.choose(&mut self.rng).unwrap();
                        ctx.push((x.to_string(), Ty::Event));
                        let body = self.gen(&Ty::Prop, ctx, d);
                        ctx.pop();
                        Term::exists(x, body)
                    }
                }
            }
            Ty::Arrow(..) => unreachable!(),
        }
    }
}

/// A simply typed term of one of three result types, chosen by seed.
pub fn typed_term(seed: u64) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ty = match seed % 3 {
        0 => Ty::Prop,
        1 => Ty::arrow(Ty::Entity, Ty::Prop),
        _ => Ty::arrow(Ty::arrow(Ty::Event, Ty::Prop), Ty::Prop),
    };
    let mut g = TypedGen { rng: ChaCha8Rng::seed_from_u64(rng.gen()), max_depth: 5 };
    g.term(&ty)
}

/// Untyped terms over a small name pool, free variables included.
pub fn untyped(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    const NAMES: [&str; 4] = ["x", "y", "z", "x'"];
    let leaf = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
        0 => Term::constant("c"),
        _ => Term::var(*NAMES.choose(rng).unwrap()),
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..7) {
        0 => leaf(rng),
        1 | 2 => Term::abs(*NAMES.choose(rng).unwrap(), untyped(rng, depth - 1)),
        3 | 4 => Term::app(untyped(rng, depth - 1), untyped(rng, depth - 1)),
        5 => Term::exists(*NAMES.choose(rng).unwrap(), untyped(rng, depth - 1)),
        _ => Term::conj(untyped(rng, depth - 1), untyped(rng, depth - 1)),
    }
}

/// Locally nameless form: bound variables as binder distances, free ones by
/// name. Alpha-equivalent terms have equal forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ln {
    Bound(usize),
    Free(String),
    Const(String),
    Abs(Box<Ln>),
    App(Box<Ln>, Box<Ln>),
    Exists(Box<Ln>),
    Conj(Box<Ln>, Box<Ln>),
    Atom(String, Vec<Ln>),
    Eq(Box<Ln>, Box<Ln>),
    Top,
}

pub fn to_ln(t: &Term) -> Ln {
    fn go(t: &Term, scope: &mut Vec<String>) -> Ln {
        match t {
            Term::Var(x) => match scope.iter().rev().position(|b| b == x) {
                Some(i) => Ln::Bound(i),
                None => Ln::Free(x.clone()),
            },
            Term::Const(c) => Ln::Const(c.clone()),
            Term::Abs(x, b) | Term::Exists(x, b) => {
                scope.push(x.clone());
                let body = Box::new(go(b, scope));
                scope.pop();
                if matches!(t, Term::Abs(..)) {
                    Ln::Abs(body)
                } else {
                    Ln::Exists(body)
                }
            }
            Term::App(a, b) => Ln::App(Box::new(go(a, scope)), Box::new(go(b, scope))),
            Term::Conj(a, b) => Ln::Conj(Box::new(go(a, scope)), Box::new(go(b, scope))),
            Term::Eq(a, b) => Ln::Eq(Box::new(go(a, scope)), Box::new(go(b, scope))),
            Term::Atom(p, args) => Ln::Atom(p.clone(), args.iter().map(|a| go(a, scope)).collect()),
            Term::Top => Ln::Top,
        }
    }
    go(t, &mut Vec::new())
}

/// Substitution for a free name. `value` has no dangling indices, so no
/// shifting is needed.
pub fn ln_subst(t: &Ln, x: &str, value: &Ln) -> Ln {
    let r = |u: &Ln| Box::new(ln_subst(u, x, value));
    match t {
        Ln::Free(y) if y == x => value.clone(),
        Ln::Bound(_) | Ln::Free(_) | Ln::Const(_) | Ln::Top => t.clone(),
        Ln::Abs(b) => Ln::Abs(r(b)),
        Ln::Exists(b) => Ln::Exists(r(b)),
        Ln::App(a, b) => Ln::App(r(a), r(b)),
        Ln::Conj(a, b) => Ln::Conj(r(a), r(b)),
        Ln::Eq(a, b) => Ln::Eq(r(a), r(b)),
        Ln::Atom(p, args) => Ln::Atom(p.clone(), args.iter().map(|a| ln_subst(a, x, value)).collect()),
    }
}

// Categories

pub fn feature() -> impl Strategy<Value = CaseFeature> {
    (1u8..8).prop_map(|b| CaseFeature::from_bits(b).unwrap())
}

pub fn category(with_vars: bool) -> impl Strategy<Value = Category> {
    let leaf = prop_oneof![
        Just(Category::s()),
        feature().prop_map(Category::np),
        if with_vars { prop_oneof![Just("X"), Just("Y")].prop_map(Category::var).boxed() } else { Just(Category::s()).boxed() },
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(r, a)| Category::fwd(r, a)),
            (inner.clone(), inner).prop_map(|(r, a)| Category::bwd(r, a)),
        ]
    })
}

/// Unification of variable-free categories, by structure.
pub fn oracle(a: &Category, b: &Category) -> Option<Category> {
    match (a, b) {
        (Category::S(f), Category::S(g)) => (f == g).then(|| a.clone()),
        (Category::Np(f), Category::Np(g)) => {
            let m = f.bits() & g.bits();
            CaseFeature::from_bits(m).map(Category::np)
        }
        (Category::Fwd(r1, a1), Category::Fwd(r2, a2)) => Some(Category::fwd(oracle(r1, r2)?, oracle(a1, a2)?)),
        (Category::Bwd(r1, a1), Category::Bwd(r2, a2)) => Some(Category::bwd(oracle(r1, r2)?, oracle(a1, a2)?)),
        _ => None,
    }
}

/// Pointwise subset on same-shaped categories.
pub fn refines(narrow: &Category, wide: &Category) -> bool {
    match (narrow, wide) {
        (Category::Np(f), Category::Np(g)) => f.is_subset(*g),
        (Category::Fwd(r1, a1), Category::Fwd(r2, a2)) | (Category::Bwd(r1, a1), Category::Bwd(r2, a2)) => {
            refines(r1, r2) && refines(a1, a2)
        }
        (Category::Var(_), _) => true,
        (a, b) => a == b,
    }
}

// Sentences

/// Sentences shaped like the suite's: case-marked names, a verb stem, a
/// stack of suffixes, optional tense.
pub fn sentence() -> impl Strategy<Value = Vec<String>> {
    let np = (prop_oneof![Just("Taro"), Just("Jiro")], prop_oneof![Just("ga"), Just("ni"), Just("o")])
        .prop_map(|(n, c)| format!("{n}-{c}"));
    let verb = prop_oneof![Just("homera"), Just("home"), Just("hasira"), Just("hasit")];
    let suffix = prop_oneof![Just("re"), Just("se"), Just("sera")];
    (
        prop::collection::vec(np, 0..=3),
        verb,
        prop::collection::vec(suffix, 0..=2),
        any::<bool>(),
    )
        .prop_map(|(nps, v, sfx, ta)| {
            let mut out = nps;
            out.push(v.to_string());
            out.extend(sfx.into_iter().map(str::to_string));
            if ta {
                out.push("ta".to_string());
            }
            out
        })
}

// Normal forms

pub const VARS: [&str; 2] = ["e1", "e2"];

pub fn arg(var_weight: u32) -> impl Strategy<Value = Arg> {
    prop_oneof![
        var_weight => prop::sample::select(VARS.to_vec()).prop_map(|v| Arg::Var(v.to_string())),
        2 => prop::sample::select(vec!["t", "j"]).prop_map(|c| Arg::Const(c.to_string())),
    ]
}

pub fn event() -> impl Strategy<Value = Arg> {
    prop::sample::select(VARS.to_vec()).prop_map(|v| Arg::Var(v.to_string()))
}

/// Atoms over the vocabulary the suite's logical forms use.
pub fn atom() -> impl Strategy<Value = NfAtom> {
    prop_oneof![
        (prop::sample::select(vec!["praise", "run"]), event(), arg(1), arg(1)).prop_map(|(p, e, x, y)| {
            let args = if p == "run" { vec![e, x] } else { vec![e, x, y] };
            NfAtom::Pred { name: p.to_string(), args }
        }),
        (event(), arg(1)).prop_map(|(e, x)| NfAtom::Pred { name: "cause".into(), args: vec![e, x] }),
        (prop::sample::select(vec!["praise", "run"]), event()).prop_map(|(p, e)| NfAtom::Pred { name: p.into(), args: vec![e] }),
        (prop::sample::select(vec!["Ag", "Th", "Cause"]), event(), arg(0))
            .prop_map(|(r, e, v)| NfAtom::RoleEq { role: r.into(), event: e, value: v }),
    ]
}

pub fn nf() -> impl Strategy<Value = NormalForm> {
    prop::collection::btree_set(atom(), 0..=6).prop_map(|atoms| {
        let mut nf = NormalForm { ex_vars: Default::default(), atoms };
        for a in &nf.atoms {
            let args = match a {
                NfAtom::Pred { args, .. } => args.clone(),
                NfAtom::RoleEq { event, value, .. } => vec![event.clone(), value.clone()],
            };
            for x in args {
                if let Arg::Var(v) = x {
                    nf.ex_vars.insert(v);
                }
            }
        }
        nf
    })
}

pub fn rename(atom: &NfAtom, map: &BTreeMap<String, String>) -> NfAtom {
    let r = |a: &Arg| match a {
        Arg::Var(v) => Arg::Var(map[v].clone()),
        c => c.clone(),
    };
    match atom {
        NfAtom::Pred { name, args } => NfAtom::Pred { name: name.clone(), args: args.iter().map(r).collect() },
        NfAtom::RoleEq { role, event, value } => NfAtom::RoleEq { role: role.clone(), event: r(event), value: r(value) },
    }
}

/// Every mapping of conclusion variables into premise variables, tried in turn.
pub fn brute_force(premise: &NormalForm, conclusion: &NormalForm, injective: bool) -> bool {
    let cvars: Vec<&String> = conclusion.ex_vars.iter().collect();
    let pvars: Vec<&String> = premise.ex_vars.iter().collect();
    let k = cvars.len() as u32;
    let n = pvars.len();
    if k > 0 && n == 0 {
        return false;
    }
    let total = if k == 0 { 1 } else { n.pow(k) };
    (0..total).any(|mut code| {
        let mut map = BTreeMap::new();
        for v in &cvars {
            map.insert((*v).clone(), pvars[code % n].clone());
            code /= n.max(1);
        }
        if injective && map.values().collect::<BTreeSet<_>>().len() != map.len() {
            return false;
        }
        conclusion.atoms.iter().all(|a| premise.atoms.contains(&rename(a, &map)))
    })
}


// Derivations

/// Every binary node is rebuilt by its rule from its children, with the
/// same category and an alpha-equal meaning.
pub fn check_homomorphism(node: &DerivationNode) -> Result<(), TestCaseError> {
    if node.rule != Rule::Lex {
        let rebuilt = recombine(node).unwrap();
        prop_assert!(rebuilt.is_some(), "rule {} no longer applies", node.rule.label());
        let rebuilt = rebuilt.unwrap();
        prop_assert_eq!(&rebuilt.category, &node.category);
        prop_assert!(rebuilt.semantics.alpha_equal(&node.semantics));
    }
    for c in &node.children {
        check_homomorphism(c)?;
    }
    Ok(())
}

