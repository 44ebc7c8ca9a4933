//! CKY chart parsing with forward/backward application, generalized backward
//! composition, and template overwrite for flagged suffixes.
//!
//! Semantics are composed alongside categories and kept beta-normal at every
//! node. Template suffixes only attach to a predicate phrase: a verb, or a
//! verb already extended by suffixes, that has not yet consumed any of its
//! arguments.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::categories::{display_var_name, unify, Bindings, Category};
use crate::lexicon::{compose_templates, instantiate_template, ClosureKind, LexEntry, Lexicon, LexiconError};
use crate::terms::{beta_normalize, parse_term, SemSyntax, Term, TermError, DEFAULT_FUEL};

/// Highest composition degree tried.
pub const MAX_DEGREE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("unknown token: {0}")]
    UnknownToken(String),
    #[error("empty input")]
    EmptyInput,
    #[error("sentence closure needs category S, found {0}")]
    WrongCategory(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Lex,
    /// `>`
    Forward,
    /// `<`
    Backward,
    /// `<B` (degree 1) or `<B2` (degree 2).
    BackwardCompose(u8),
    /// Template overwrite at the given composition degree; 0 is application.
    Template(u8),
}

impl Rule {
    pub fn label(self) -> &'static str {
        match self {
            Rule::Lex => "LEX",
            Rule::Forward => ">",
            Rule::Backward => "<",
            Rule::BackwardCompose(1) => "<B",
            Rule::BackwardCompose(_) => "<B2",
            Rule::Template(0) => "<*",
            Rule::Template(1) => "<B*",
            Rule::Template(_) => "<B2*",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DerivationNode {
    /// Half-open token span.
    pub span: (usize, usize),
    pub category: Category,
    pub semantics: Term,
    pub rule: Rule,
    pub children: Vec<Arc<DerivationNode>>,
    pub entry: Option<Arc<LexEntry>>,
    /// Unifier of the combination that built this node.
    pub bindings: Option<Bindings>,
    /// The semantics still abstracts over the template variable.
    pub is_template: bool,
    /// Built from predicates and suffixes only, with no argument consumed.
    pub predicate_phrase: bool,
    signature: String,
}

impl DerivationNode {
    /// Lexical node for the `index`-th token. Category variables are renamed
    /// apart per token and entry.
    pub fn lexical(entry: &LexEntry, index: usize, variant: usize) -> DerivationNode {
        let category = entry.category.map_vars(&|v| format!("{v}@{index}.{variant}"));
        let predicate_phrase = entry.category.target().is_s();
        let signature = format!("(LEX {} {})", entry.category, entry.surface);
        DerivationNode {
            span: (index, index + 1),
            category,
            semantics: entry.semantics.clone(),
            rule: Rule::Lex,
            children: Vec::new(),
            entry: Some(Arc::new(entry.clone())),
            bindings: None,
            is_template: entry.is_template,
            predicate_phrase,
            signature,
        }
    }

    fn binary(
        rule: Rule,
        left: &Arc<DerivationNode>,
        right: &Arc<DerivationNode>,
        category: Category,
        semantics: Term,
        bindings: Option<Bindings>,
        is_template: bool,
    ) -> DerivationNode {
        let signature = format!("({} {} {} {})", rule.label(), category, left.signature, right.signature);
        DerivationNode {
            span: (left.span.0, right.span.1),
            category,
            semantics,
            rule,
            children: vec![left.clone(), right.clone()],
            entry: None,
            bindings,
            is_template,
            predicate_phrase: left.predicate_phrase && right.predicate_phrase,
            signature,
        }
    }

    pub fn left(&self) -> Option<&Arc<DerivationNode>> {
        self.children.first()
    }

    pub fn right(&self) -> Option<&Arc<DerivationNode>> {
        self.children.get(1)
    }

    /// Rule tree with surface forms at the leaves, e.g. `(> Taro-ga (< homera re))`.
    pub fn rule_tree(&self) -> String {
        match (&self.entry, self.left(), self.right()) {
            (Some(e), _, _) => e.surface.clone(),
            (None, Some(l), Some(r)) => format!("({} {} {})", self.rule.label(), l.rule_tree(), r.rule_tree()),
            _ => unreachable!("binary node without two children"),
        }
    }

    /// Rule tree together with every node's category; distinct derivations
    /// have distinct signatures.
    pub fn signature(&self) -> &str {
        &self.signature
    }

    /// Surface forms under this node.
    pub fn surfaces(&self) -> Vec<&str> {
        match &self.entry {
            Some(e) => vec![e.surface.as_str()],
            None => self.children.iter().flat_map(|c| c.surfaces()).collect(),
        }
    }

    /// Nodes in pre-order.
    pub fn nodes(&self) -> Vec<&DerivationNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }
}

fn normalize(t: Term) -> Result<Term, ParseError> {
    Ok(beta_normalize(&t, DEFAULT_FUEL)?)
}

fn fresh_binder(base: &str, terms: &[&Term]) -> String {
    let mut name = base.to_string();
    while terms.iter().any(|t| t.all_names().contains(&name)) {
        name.push('\'');
    }
    name
}

/// `f a` for `f : X/Y` and `a : Y`.
pub fn forward_apply(f: &Arc<DerivationNode>, a: &Arc<DerivationNode>) -> Result<Option<DerivationNode>, ParseError> {
    if f.is_template || a.is_template {
        return Ok(None);
    }
    let Category::Fwd(result, arg) = &f.category else {
        return Ok(None);
    };
    let Some(b) = unify(arg, &a.category) else {
        return Ok(None);
    };
    let category = b.resolve_vars(result);
    let semantics = normalize(Term::app(f.semantics.clone(), a.semantics.clone()))?;
    Ok(Some(DerivationNode::binary(Rule::Forward, f, a, category, semantics, Some(b), false)))
}

/// `a f` for `a : Y` and `f : X\Y`. Template suffixes are handed to
/// [`combine_template`].
pub fn backward_apply(a: &Arc<DerivationNode>, f: &Arc<DerivationNode>) -> Result<Option<DerivationNode>, ParseError> {
    if f.is_template {
        return combine_template(a, f, 0);
    }
    if a.is_template {
        return Ok(None);
    }
    let Category::Bwd(result, arg) = &f.category else {
        return Ok(None);
    };
    let Some(b) = unify(arg, &a.category) else {
        return Ok(None);
    };
    let category = b.resolve_vars(result);
    let semantics = normalize(Term::app(f.semantics.clone(), a.semantics.clone()))?;
    Ok(Some(DerivationNode::binary(Rule::Backward, a, f, category, semantics, Some(b), false)))
}

/// Category side shared by composition and template overwrite: peels
/// `degree` backward arguments off `g`, unifies the remainder with the
/// argument of `f : X\Y`, and re-attaches the peeled arguments to `X`.
fn compose_category(g: &Category, f: &Category, degree: u8) -> Option<(Category, Bindings)> {
    let Category::Bwd(result, arg) = f else {
        return None;
    };
    let mut core = g;
    let mut peeled = Vec::new();
    for _ in 0..degree {
        let Category::Bwd(r, z) = core else {
            return None;
        };
        peeled.push(&**z);
        core = r;
    }
    let b = unify(arg, core)?;
    let category = peeled
        .iter()
        .rev()
        .fold(b.resolve_vars(result), |acc, z| Category::bwd(acc, b.resolve_vars(z)));
    Some((category, b))
}

/// Generalized backward composition `g f` with `f : X\Y` and
/// `g : Y\Z1..\Zn`, giving `X\Z1..\Zn` with meaning `\zn..z1. f (g zn .. z1)`.
pub fn backward_compose(
    g: &Arc<DerivationNode>,
    f: &Arc<DerivationNode>,
    degree: u8,
) -> Result<Option<DerivationNode>, ParseError> {
    if f.is_template {
        return combine_template(g, f, degree);
    }
    if g.is_template || degree == 0 || degree > MAX_DEGREE {
        return Ok(None);
    }
    let Some((category, b)) = compose_category(&g.category, &f.category, degree) else {
        return Ok(None);
    };
    let mut binders = Vec::new();
    for i in (1..=degree).rev() {
        let name = fresh_binder(&format!("z{i}"), &[&f.semantics, &g.semantics]);
        binders.push(name);
    }
    let inner = Term::apply_all(g.semantics.clone(), binders.iter().map(Term::var));
    let semantics = normalize(Term::abs_many(&binders, Term::app(f.semantics.clone(), inner)))?;
    Ok(Some(DerivationNode::binary(Rule::BackwardCompose(degree), g, f, category, semantics, Some(b), false)))
}

/// Overwrite combination for a template suffix. The category is computed as
/// for composition (application at degree 0); the meaning is the template
/// with its variable filled by the predicate's meaning. A template meeting
/// another template yields a stacked template.
pub fn combine_template(
    predicate: &Arc<DerivationNode>,
    suffix: &Arc<DerivationNode>,
    degree: u8,
) -> Result<Option<DerivationNode>, ParseError> {
    if !suffix.is_template || degree > MAX_DEGREE {
        return Ok(None);
    }
    if !predicate.is_template && !predicate.predicate_phrase {
        return Ok(None);
    }
    let Some((category, b)) = compose_category(&predicate.category, &suffix.category, degree) else {
        return Ok(None);
    };
    let (semantics, is_template) = if predicate.is_template {
        (compose_templates(&suffix.semantics, &predicate.semantics)?, true)
    } else {
        (instantiate_template(&suffix.semantics, &predicate.semantics)?, false)
    };
    Ok(Some(DerivationNode::binary(Rule::Template(degree), predicate, suffix, category, semantics, Some(b), is_template)))
}

/// Every way of combining two adjacent constituents.
pub fn combine_all(left: &Arc<DerivationNode>, right: &Arc<DerivationNode>) -> Result<Vec<DerivationNode>, ParseError> {
    let mut out = Vec::new();
    out.extend(forward_apply(left, right)?);
    out.extend(backward_apply(left, right)?);
    for degree in 1..=MAX_DEGREE {
        out.extend(backward_compose(left, right, degree)?);
    }
    Ok(out)
}

/// Rebuilds a binary node from its children with its recorded rule.
pub fn recombine(node: &DerivationNode) -> Result<Option<DerivationNode>, ParseError> {
    let (Some(l), Some(r)) = (node.left(), node.right()) else {
        return Ok(None);
    };
    match node.rule {
        Rule::Lex => Ok(None),
        Rule::Forward => forward_apply(l, r),
        Rule::Backward => backward_apply(l, r),
        Rule::BackwardCompose(d) => backward_compose(l, r, d),
        Rule::Template(d) => combine_template(l, r, d),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChartStats {
    pub cells: usize,
    pub items: usize,
}

#[derive(Debug, Clone)]
pub struct ParseResult {
    /// Distinct full-span derivations of category `S`, sorted by rule tree.
    pub derivations: Vec<Arc<DerivationNode>>,
    pub stats: ChartStats,
}

impl ParseResult {
    pub fn is_empty(&self) -> bool {
        self.derivations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Shuffles split points and candidate pairs; the result must not change.
    pub agenda_seed: Option<u64>,
}

pub fn parse(tokens: &[String], lexicon: &Lexicon) -> Result<ParseResult, ParseError> {
    parse_with(tokens, lexicon, ParseOptions::default())
}

pub fn parse_with(tokens: &[String], lexicon: &Lexicon, options: ParseOptions) -> Result<ParseResult, ParseError> {
    let n = tokens.len();
    if n == 0 {
        return Err(ParseError::EmptyInput);
    }
    let mut rng = options.agenda_seed.map(rand::rngs::StdRng::seed_from_u64);
    // chart[start][len - 1]
    let mut chart: Vec<Vec<Vec<Arc<DerivationNode>>>> = vec![vec![Vec::new(); n]; n];
    for (i, tok) in tokens.iter().enumerate() {
        let entries = lexicon.lookup(tok);
        if entries.is_empty() {
            return Err(ParseError::UnknownToken(tok.clone()));
        }
        chart[i][0] = entries
            .iter()
            .enumerate()
            .map(|(k, e)| Arc::new(DerivationNode::lexical(e, i, k)))
            .collect();
    }
    let mut stats = ChartStats { cells: n, items: chart.iter().map(|row| row[0].len()).sum() };
    for len in 2..=n {
        for start in 0..=n - len {
            let mut splits: Vec<usize> = (1..len).collect();
            if let Some(rng) = rng.as_mut() {
                splits.shuffle(rng);
            }
            let mut seen = HashSet::new();
            let mut cell = Vec::new();
            for split in splits {
                let mut pairs: Vec<(&Arc<DerivationNode>, &Arc<DerivationNode>)> = Vec::new();
                for l in &chart[start][split - 1] {
                    for r in &chart[start + split][len - split - 1] {
                        pairs.push((l, r));
                    }
                }
                if let Some(rng) = rng.as_mut() {
                    pairs.shuffle(rng);
                }
                for (l, r) in pairs {
                    for node in combine_all(l, r)? {
                        if seen.insert(node.signature.clone()) {
                            cell.push(Arc::new(node));
                        }
                    }
                }
            }
            stats.cells += 1;
            stats.items += cell.len();
            chart[start][len - 1] = cell;
        }
    }
    let mut derivations: Vec<Arc<DerivationNode>> = std::mem::take(&mut chart[0][n - 1])
        .into_iter()
        .filter(|d| d.category.is_s() && !d.is_template)
        .collect();
    derivations.sort_by(|a, b| a.rule_tree().cmp(&b.rule_tree()).then_with(|| a.signature.cmp(&b.signature)));
    Ok(ParseResult { derivations, stats })
}

/// Splits pre-segmented text on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

fn dts_closure() -> &'static Term {
    static T: OnceLock<Term> = OnceLock::new();
    T.get_or_init(|| parse_term(r"\e. T", SemSyntax::Dts).expect("closure term parses"))
}

fn role_relation() -> &'static Term {
    static T: OnceLock<Term> = OnceLock::new();
    T.get_or_init(|| parse_term(r"\x e T. T(e)=x", SemSyntax::Fol).expect("closure term parses"))
}

fn event_predicate() -> &'static Term {
    static T: OnceLock<Term> = OnceLock::new();
    T.get_or_init(|| parse_term(r"\p e. p(e)", SemSyntax::Fol).expect("closure term parses"))
}

/// Closes a sentence meaning under the given framework.
pub fn close_sentence(sem: &Term, closure: ClosureKind) -> Result<Term, ParseError> {
    let applied = match closure {
        ClosureKind::Dts => Term::app(sem.clone(), dts_closure().clone()),
        ClosureKind::Ccg2lambda => Term::apply_all(
            sem.clone(),
            [role_relation().clone(), role_relation().clone(), event_predicate().clone()],
        ),
    };
    normalize(applied)
}

/// The closed logical form of a complete derivation.
pub fn sentence_semantics(root: &DerivationNode, lexicon: &Lexicon) -> Result<Term, ParseError> {
    if !root.category.is_s() {
        return Err(ParseError::WrongCategory(root.category.to_string()));
    }
    close_sentence(&root.semantics, lexicon.closure)
}

fn describe_bindings(b: &Bindings) -> String {
    let mut parts: Vec<String> = b
        .vars
        .keys()
        .map(|v| format!("{}:={}", display_var_name(v), b.resolve_vars(&Category::var(v.clone()))))
        .collect();
    for n in b.strict_narrowings() {
        parts.push(format!("np_{}~np_{}=>np_{}", n.expected, n.actual, n.result));
    }
    parts.join(", ")
}

/// Indented tree: one line per node, children below their parent.
///
/// ```text
/// >  S  [Taro-ga Jiro-ni homera re ta]
///   Taro-ga  Taro-NOM  T/(T\np_ga)
///   >  S\np_ga  {T:=S\np_ga}  [Jiro-ni homera re ta]
/// ```
pub fn render_derivation(root: &DerivationNode) -> String {
    let mut out = String::new();
    render_into(root, 0, &mut out);
    out
}

fn render_into(node: &DerivationNode, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    match &node.entry {
        Some(e) => {
            let _ = writeln!(out, "{indent}{}  {}  {}", e.surface, e.gloss, e.category);
        }
        None => {
            let _ = write!(out, "{indent}{}  {}", node.rule.label(), node.category);
            if let Some(b) = node.bindings.as_ref().filter(|b| !b.vars.is_empty() || b.strict_narrowings().next().is_some()) {
                let _ = write!(out, "  {{{}}}", describe_bindings(b));
            }
            let _ = writeln!(out, "  [{}]", node.surfaces().join(" "));
            for c in &node.children {
                render_into(c, depth + 1, out);
            }
        }
    }
}
