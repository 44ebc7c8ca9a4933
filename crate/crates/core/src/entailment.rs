//! Conjunctive normal forms of closed logical forms, and entailment as
//! atom-set containment under a mapping of existential event variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lexicon::Lexicon;
use crate::parser::{parse, sentence_semantics, DerivationNode, ParseError};
use crate::terms::{fresh_name, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EntailmentError {
    #[error("logical form outside the conjunctive fragment: {0}")]
    UnsupportedShape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arg {
    Var(String),
    Const(String),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(x) | Arg::Const(x) => f.write_str(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NfAtom {
    Pred { name: String, args: Vec<Arg> },
    /// `role(event)=value`
    RoleEq { role: String, event: Arg, value: Arg },
}

impl NfAtom {
    fn args(&self) -> Vec<&Arg> {
        match self {
            NfAtom::Pred { args, .. } => args.iter().collect(),
            NfAtom::RoleEq { event, value, .. } => vec![event, value],
        }
    }

    fn vars(&self) -> impl Iterator<Item = &str> {
        self.args().into_iter().filter_map(|a| match a {
            Arg::Var(v) => Some(v.as_str()),
            Arg::Const(_) => None,
        })
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> NfAtom {
        let r = |a: &Arg| match a {
            Arg::Var(v) => Arg::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            c => c.clone(),
        };
        match self {
            NfAtom::Pred { name, args } => NfAtom::Pred { name: name.clone(), args: args.iter().map(r).collect() },
            NfAtom::RoleEq { role, event, value } => NfAtom::RoleEq { role: role.clone(), event: r(event), value: r(value) },
        }
    }
}

impl fmt::Display for NfAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NfAtom::Pred { name, args } => {
                let args: Vec<String> = args.iter().map(Arg::to_string).collect();
                write!(f, "{name}({})", args.join(","))
            }
            NfAtom::RoleEq { role, event, value } => write!(f, "{role}({event})={value}"),
        }
    }
}

/// A flattened logical form: existential variables and a set of atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub ex_vars: BTreeSet<String>,
    pub atoms: BTreeSet<NfAtom>,
}

impl NormalForm {
    pub fn new(ex_vars: impl IntoIterator<Item = String>, atoms: impl IntoIterator<Item = NfAtom>) -> NormalForm {
        NormalForm { ex_vars: ex_vars.into_iter().collect(), atoms: atoms.into_iter().collect() }
    }

    fn style(&self) -> Option<Style> {
        let role = self.atoms.iter().any(|a| matches!(a, NfAtom::RoleEq { .. }));
        let relational = self.atoms.iter().any(|a| matches!(a, NfAtom::Pred { args, .. } if args.len() > 1));
        match (role, relational) {
            (true, false) => Some(Style::Roles),
            (false, true) => Some(Style::Relations),
            _ => None,
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<&str> = self.ex_vars.iter().map(String::as_str).collect();
        let atoms: Vec<String> = self.atoms.iter().map(NfAtom::to_string).collect();
        write!(f, "exists {{{}}}. {{{}}}", vars.join(","), atoms.join(", "))
    }
}

/// Which framework a normal form's vocabulary belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    /// Event predicates with role equalities.
    Roles,
    /// Predicates taking their participants as arguments.
    Relations,
}

/// Flattens quantifiers and conjunctions, drops `T`, and reads
/// `role(e)=x` equalities as role atoms.
pub fn normalize_lf(term: &Term) -> Result<NormalForm, EntailmentError> {
    let mut nf = NormalForm::default();
    let mut scope = Vec::new();
    flatten(term, &mut scope, &mut nf)?;
    let used: BTreeSet<String> = nf.atoms.iter().flat_map(|a| a.vars().map(str::to_string).collect::<Vec<_>>()).collect();
    nf.ex_vars.retain(|v| used.contains(v));
    Ok(nf)
}

fn unsupported(what: &str, t: &Term) -> EntailmentError {
    EntailmentError::UnsupportedShape(format!("{what}: {t}"))
}

fn to_arg(t: &Term, scope: &[(String, String)]) -> Result<Arg, EntailmentError> {
    match t {
        Term::Var(x) => scope
            .iter()
            .rev()
            .find(|(src, _)| src == x)
            .map(|(_, canon)| Arg::Var(canon.clone()))
            .ok_or_else(|| unsupported("free variable", t)),
        Term::Const(c) => Ok(Arg::Const(c.clone())),
        _ => Err(unsupported("complex argument", t)),
    }
}

fn flatten(t: &Term, scope: &mut Vec<(String, String)>, nf: &mut NormalForm) -> Result<(), EntailmentError> {
    match t {
        Term::Top => Ok(()),
        Term::Exists(x, body) => {
            let canon = if nf.ex_vars.contains(x) { fresh_name(x, &nf.ex_vars) } else { x.clone() };
            nf.ex_vars.insert(canon.clone());
            scope.push((x.clone(), canon));
            let r = flatten(body, scope, nf);
            scope.pop();
            r
        }
        Term::Conj(a, b) => {
            flatten(a, scope, nf)?;
            flatten(b, scope, nf)
        }
        Term::Atom(name, args) => {
            let args = args.iter().map(|a| to_arg(a, scope)).collect::<Result<_, _>>()?;
            nf.atoms.insert(NfAtom::Pred { name: name.clone(), args });
            Ok(())
        }
        Term::Eq(l, r) => {
            let atom = match (&**l, &**r) {
                (Term::Atom(role, args), other) | (other, Term::Atom(role, args)) if args.len() == 1 => NfAtom::RoleEq {
                    role: role.clone(),
                    event: to_arg(&args[0], scope)?,
                    value: to_arg(other, scope)?,
                },
                _ => return Err(unsupported("equality", t)),
            };
            nf.atoms.insert(atom);
            Ok(())
        }
        Term::Abs(..) => Err(unsupported("abstraction", t)),
        Term::App(..) => Err(unsupported("unreduced application", t)),
        Term::Var(_) | Term::Const(_) => Err(unsupported("bare term", t)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    /// Conclusion variable to premise variable, when `holds`.
    pub witness: Option<BTreeMap<String, String>>,
    pub premise: NormalForm,
    pub conclusion: NormalForm,
    pub diagnostic: Option<String>,
}

/// Searches for a mapping of the conclusion's existential variables into the
/// premise's that makes every conclusion atom a premise atom. Mappings need
/// not be injective.
pub fn entails(premise: &NormalForm, conclusion: &NormalForm) -> Verdict {
    let mut verdict = Verdict {
        holds: false,
        witness: None,
        premise: premise.clone(),
        conclusion: conclusion.clone(),
        diagnostic: None,
    };
    if let (Some(p), Some(c)) = (premise.style(), conclusion.style()) {
        if p != c {
            verdict.diagnostic = Some("premise and conclusion come from different frameworks".to_string());
            return verdict;
        }
    }
    let order: Vec<&String> = conclusion.ex_vars.iter().collect();
    // atoms become checkable once their last variable (in `order`) is assigned
    let mut ready: Vec<Vec<&NfAtom>> = vec![Vec::new(); order.len() + 1];
    for atom in &conclusion.atoms {
        let last = atom
            .vars()
            .filter_map(|v| order.iter().position(|o| o.as_str() == v))
            .max()
            .map_or(0, |i| i + 1);
        ready[last].push(atom);
    }
    let candidates: Vec<&String> = premise.ex_vars.iter().collect();
    let mut map = BTreeMap::new();
    if search(0, &order, &candidates, &ready, &premise.atoms, &mut map) {
        verdict.holds = true;
        verdict.witness = Some(map);
    }
    verdict
}

fn search(
    depth: usize,
    order: &[&String],
    candidates: &[&String],
    ready: &[Vec<&NfAtom>],
    premise: &BTreeSet<NfAtom>,
    map: &mut BTreeMap<String, String>,
) -> bool {
    if !ready[depth].iter().all(|a| premise.contains(&a.rename(map))) {
        return false;
    }
    if depth == order.len() {
        return true;
    }
    for c in candidates {
        map.insert(order[depth].clone(), (*c).clone());
        if search(depth + 1, order, candidates, ready, premise, map) {
            return true;
        }
    }
    map.remove(order[depth]);
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Premise,
    Conclusion,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Premise => "premise",
            Side::Conclusion => "conclusion",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error("{side}: {source}")]
    Parse {
        side: Side,
        #[source]
        source: ParseError,
    },
    #[error("{side}: no parse")]
    NoParse { side: Side },
    #[error("{side}: {source}")]
    Shape {
        side: Side,
        #[source]
        source: EntailmentError,
    },
}

impl InferenceError {
    pub fn side(&self) -> Side {
        match self {
            InferenceError::Parse { side, .. } | InferenceError::NoParse { side } | InferenceError::Shape { side, .. } => *side,
        }
    }
}

/// One sentence parsed and closed under a lexicon.
#[derive(Debug, Clone)]
pub struct SentenceAnalysis {
    pub tokens: Vec<String>,
    pub derivations: Vec<Arc<DerivationNode>>,
    /// Closed logical form of the first derivation.
    pub lf: Term,
    pub nf: NormalForm,
    /// Set when some derivation closes to a logical form that is not
    /// alpha-equal to the first one.
    pub ambiguity_warning: Option<String>,
}

pub fn analyze_sentence(tokens: &[String], lexicon: &Lexicon, side: Side) -> Result<SentenceAnalysis, InferenceError> {
    let parsed = parse(tokens, lexicon).map_err(|source| InferenceError::Parse { side, source })?;
    let Some(first) = parsed.derivations.first() else {
        return Err(InferenceError::NoParse { side });
    };
    let lf = sentence_semantics(first, lexicon).map_err(|source| InferenceError::Parse { side, source })?;
    let nf = normalize_lf(&lf).map_err(|source| InferenceError::Shape { side, source })?;
    let mut ambiguity_warning = None;
    for (i, d) in parsed.derivations.iter().enumerate().skip(1) {
        let other = sentence_semantics(d, lexicon).map_err(|source| InferenceError::Parse { side, source })?;
        if !other.alpha_equal(&lf) {
            ambiguity_warning = Some(format!("derivation {} closes to {other}, derivation 1 to {lf}", i + 1));
            break;
        }
    }
    Ok(SentenceAnalysis { tokens: tokens.to_vec(), derivations: parsed.derivations, lf, nf, ambiguity_warning })
}

#[derive(Debug, Clone)]
pub struct Inference {
    pub premise: SentenceAnalysis,
    pub conclusion: SentenceAnalysis,
    pub verdict: Verdict,
}

/// Parses and closes both sentences, then decides entailment.
pub fn check_inference(lexicon: &Lexicon, premise: &[String], conclusion: &[String]) -> Result<Inference, InferenceError> {
    let premise = analyze_sentence(premise, lexicon, Side::Premise)?;
    let conclusion = analyze_sentence(conclusion, lexicon, Side::Conclusion)?;
    let verdict = entails(&premise.nf, &conclusion.nf);
    Ok(Inference { premise, conclusion, verdict })
}
