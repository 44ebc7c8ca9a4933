use super::{Term, TermError};

pub const DEFAULT_FUEL: usize = 10_000;

/// Redex selection order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Normal order: always contract the leftmost outermost redex.
    LeftmostOutermost,
    /// Contract a redex only once its subterms are normal, scanning right to left.
    RightmostInnermost,
}

/// Beta-normalizes `term` in normal order, then folds constant-headed
/// application spines into atoms.
pub fn beta_normalize(term: &Term, fuel: usize) -> Result<Term, TermError> {
    normalize_with(term, fuel, Strategy::LeftmostOutermost).map(|(t, _)| t)
}

/// Normalizes with an explicit strategy and reports the number of beta steps taken.
pub fn normalize_with(term: &Term, fuel: usize, strategy: Strategy) -> Result<(Term, usize), TermError> {
    let mut t = term.clone();
    let mut steps = 0;
    loop {
        let reduced = match strategy {
            Strategy::LeftmostOutermost => step_outermost(&mut t),
            Strategy::RightmostInnermost => step_innermost(&mut t),
        };
        if !reduced {
            return Ok((t.atomize(), steps));
        }
        steps += 1;
        if steps > fuel {
            return Err(TermError::FuelExhausted { fuel });
        }
    }
}

fn contract(t: &mut Term) {
    let Term::App(f, a) = std::mem::replace(t, Term::Top) else {
        unreachable!("contract called on a non-redex");
    };
    let Term::Abs(x, body) = *f else {
        unreachable!("contract called on a non-redex");
    };
    *t = body.substitute(&x, &a);
}

fn is_redex(t: &Term) -> bool {
    matches!(t, Term::App(f, _) if f.is_abs())
}

fn step_outermost(t: &mut Term) -> bool {
    if is_redex(t) {
        contract(t);
        return true;
    }
    match t {
        Term::Var(_) | Term::Const(_) | Term::Top => false,
        Term::Abs(_, b) | Term::Exists(_, b) => step_outermost(b),
        Term::App(a, b) | Term::Conj(a, b) | Term::Eq(a, b) => step_outermost(a) || step_outermost(b),
        Term::Atom(_, args) => args.iter_mut().any(step_outermost),
    }
}

fn step_innermost(t: &mut Term) -> bool {
    let inner = match t {
        Term::Var(_) | Term::Const(_) | Term::Top => false,
        Term::Abs(_, b) | Term::Exists(_, b) => step_innermost(b),
        Term::App(a, b) | Term::Conj(a, b) | Term::Eq(a, b) => step_innermost(b) || step_innermost(a),
        Term::Atom(_, args) => args.iter_mut().rev().any(step_innermost),
    };
    if inner {
        return true;
    }
    if is_redex(t) {
        contract(t);
        return true;
    }
    false
}
