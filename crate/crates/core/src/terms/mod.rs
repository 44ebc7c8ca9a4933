//! Lambda terms extended with the logical vocabulary shared by the two
//! semantic frameworks: event quantification, conjunction, predicate atoms,
//! role equalities and the unit truth `T`.

mod reduce;
mod syntax;

use std::collections::BTreeSet;
use std::fmt;

pub use reduce::{beta_normalize, normalize_with, Strategy, DEFAULT_FUEL};
pub use syntax::{parse_term, print_term, SemSyntax};

/// Errors raised while reading or reducing terms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("reduction exceeded {fuel} beta steps")]
    FuelExhausted { fuel: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// Existential event quantifier. Printed as `Sig e:ev.` or `exists e (..)`.
    Exists(String, Box<Term>),
    /// Conjunction (`*` in DTS, `&` in first-order syntax).
    Conj(Box<Term>, Box<Term>),
    /// A constant predicate applied to a non-empty argument list.
    Atom(String, Vec<Term>),
    Eq(Box<Term>, Box<Term>),
    Top,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn abs(binder: impl Into<String>, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(body))
    }

    /// Nested abstraction `\x1 x2 ... xn. body`.
    pub fn abs_many<S: AsRef<str>>(binders: &[S], body: Term) -> Term {
        binders
            .iter()
            .rev()
            .fold(body, |acc, b| Term::abs(b.as_ref(), acc))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application spine `head a1 ... an`.
    pub fn apply_all(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn exists(binder: impl Into<String>, body: Term) -> Term {
        Term::Exists(binder.into(), Box::new(body))
    }

    pub fn conj(left: Term, right: Term) -> Term {
        Term::Conj(Box::new(left), Box::new(right))
    }

    /// Right-nested conjunction of all items; `T` when empty.
    pub fn conj_all(items: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Term::Top;
        };
        while let Some(item) = items.pop() {
            acc = Term::conj(item, acc);
        }
        acc
    }

    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Atom(pred.into(), args)
    }

    pub fn eq(left: Term, right: Term) -> Term {
        Term::Eq(Box::new(left), Box::new(right))
    }

    /// `\x. x`
    pub fn identity() -> Term {
        Term::abs("x", Term::var("x"))
    }

    pub fn is_abs(&self) -> bool {
        matches!(self, Term::Abs(..))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Term::Const(_) | Term::Top => {}
            Term::Abs(x, body) | Term::Exists(x, body) => {
                bound.push(x);
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::App(a, b) | Term::Conj(a, b) | Term::Eq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Atom(_, args) => {
                for arg in args {
                    arg.collect_free(bound, out);
                }
            }
        }
    }

    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Term::Var(x) => x == name,
            Term::Const(_) | Term::Top => false,
            Term::Abs(x, body) | Term::Exists(x, body) => x != name && body.has_free(name),
            Term::App(a, b) | Term::Conj(a, b) | Term::Eq(a, b) => {
                a.has_free(name) || b.has_free(name)
            }
            Term::Atom(_, args) => args.iter().any(|a| a.has_free(name)),
        }
    }

    /// Every name used anywhere in the term (variables, binders, constants).
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_names(&mut |n| {
            out.insert(n.to_string());
        });
        out
    }

    fn visit_names(&self, f: &mut impl FnMut(&str)) {
        match self {
            Term::Var(x) | Term::Const(x) => f(x),
            Term::Top => {}
            Term::Abs(x, body) | Term::Exists(x, body) => {
                f(x);
                body.visit_names(f);
            }
            Term::App(a, b) | Term::Conj(a, b) | Term::Eq(a, b) => {
                a.visit_names(f);
                b.visit_names(f);
            }
            Term::Atom(p, args) => {
                f(p);
                for arg in args {
                    arg.visit_names(f);
                }
            }
        }
    }

    /// Capture-avoiding substitution of `value` for the free occurrences of `var`.
    pub fn substitute(&self, var: &str, value: &Term) -> Term {
        let value_free = value.free_vars();
        self.subst(var, value, &value_free)
    }

    fn subst(&self, var: &str, value: &Term, value_free: &BTreeSet<String>) -> Term {
        match self {
            Term::Var(x) if x == var => value.clone(),
            Term::Var(_) | Term::Const(_) | Term::Top => self.clone(),
            Term::Abs(x, body) | Term::Exists(x, body) => {
                if x == var || !body.has_free(var) {
                    return self.clone();
                }
                let (binder, body) = if value_free.contains(x) {
                    let mut avoid = value_free.clone();
                    avoid.extend(body.free_vars());
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(x, &avoid);
                    let renamed = body.subst(x, &Term::Var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                    (fresh, renamed)
                } else {
                    (x.clone(), (**body).clone())
                };
                let body = Box::new(body.subst(var, value, value_free));
                match self {
                    Term::Abs(..) => Term::Abs(binder, body),
                    _ => Term::Exists(binder, body),
                }
            }
            Term::App(a, b) => Term::app(a.subst(var, value, value_free), b.subst(var, value, value_free)),
            Term::Conj(a, b) => Term::conj(a.subst(var, value, value_free), b.subst(var, value, value_free)),
            Term::Eq(a, b) => Term::eq(a.subst(var, value, value_free), b.subst(var, value, value_free)),
            Term::Atom(p, args) => Term::Atom(
                p.clone(),
                args.iter().map(|a| a.subst(var, value, value_free)).collect(),
            ),
        }
    }

    /// Equality up to consistent renaming of bound variables. Conjunction
    /// order is significant.
    pub fn alpha_equal(&self, other: &Term) -> bool {
        alpha_eq(self, other, &mut Vec::new(), &mut Vec::new())
    }

    /// Rewrites every constant-headed application spine `c a1 .. an` as the
    /// atom `c(a1,..,an)`, and extends atoms applied to further arguments.
    pub(crate) fn atomize(self) -> Term {
        match self {
            Term::App(f, a) => {
                let f = f.atomize();
                let a = a.atomize();
                match f {
                    Term::Const(c) => Term::Atom(c, vec![a]),
                    Term::Atom(c, mut args) => {
                        args.push(a);
                        Term::Atom(c, args)
                    }
                    f => Term::app(f, a),
                }
            }
            Term::Abs(x, b) => Term::Abs(x, Box::new(b.atomize())),
            Term::Exists(x, b) => Term::Exists(x, Box::new(b.atomize())),
            Term::Conj(a, b) => Term::conj(a.atomize(), b.atomize()),
            Term::Eq(a, b) => Term::eq(a.atomize(), b.atomize()),
            Term::Atom(p, args) => Term::Atom(p, args.into_iter().map(Term::atomize).collect()),
            t => t,
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Top => 1,
            Term::Abs(_, b) | Term::Exists(_, b) => 1 + b.size(),
            Term::App(a, b) | Term::Conj(a, b) | Term::Eq(a, b) => 1 + a.size() + b.size(),
            Term::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self, SemSyntax::Dts))
    }
}

/// Appends primes to `base` until it avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

fn alpha_eq<'a>(a: &'a Term, b: &'a Term, env_a: &mut Vec<&'a str>, env_b: &mut Vec<&'a str>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let ix = env_a.iter().rposition(|n| *n == x.as_str());
            let iy = env_b.iter().rposition(|n| *n == y.as_str());
            match (ix, iy) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::Top, Term::Top) => true,
        (Term::Abs(x, p), Term::Abs(y, q)) | (Term::Exists(x, p), Term::Exists(y, q)) => {
            env_a.push(x);
            env_b.push(y);
            let r = alpha_eq(p, q, env_a, env_b);
            env_a.pop();
            env_b.pop();
            r
        }
        (Term::App(p1, p2), Term::App(q1, q2))
        | (Term::Conj(p1, p2), Term::Conj(q1, q2))
        | (Term::Eq(p1, p2), Term::Eq(q1, q2)) => {
            alpha_eq(p1, q1, env_a, env_b) && alpha_eq(p2, q2, env_a, env_b)
        }
        (Term::Atom(p, xs), Term::Atom(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq(x, y, env_a, env_b))
        }
        _ => false,
    }
}
