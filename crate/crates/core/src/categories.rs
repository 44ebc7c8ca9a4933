//! CCG syntactic categories with case features, and their unification.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("category syntax error at byte {pos}: {msg}")]
pub struct CategoryError {
    pub pos: usize,
    pub msg: String,
}

/// A non-empty set of case markers drawn from `ga`, `o` and `ni`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CaseFeature(u8);

impl CaseFeature {
    pub const GA: CaseFeature = CaseFeature(0b001);
    pub const NI: CaseFeature = CaseFeature(0b010);
    pub const O: CaseFeature = CaseFeature(0b100);
    pub const NI_O: CaseFeature = CaseFeature(0b110);

    const NAMES: [(CaseFeature, &'static str); 3] =
        [(CaseFeature::GA, "ga"), (CaseFeature::NI, "ni"), (CaseFeature::O, "o")];

    /// Builds a feature from raw bits; `None` for the empty set.
    pub fn from_bits(bits: u8) -> Option<CaseFeature> {
        let bits = bits & 0b111;
        (bits != 0).then_some(CaseFeature(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn meet(self, other: CaseFeature) -> Option<CaseFeature> {
        CaseFeature::from_bits(self.0 & other.0)
    }

    pub fn is_subset(self, other: CaseFeature) -> bool {
        self.0 & !other.0 == 0
    }

    fn parse(text: &str) -> Option<CaseFeature> {
        let mut bits = 0;
        for part in text.split('|') {
            let (f, _) = CaseFeature::NAMES.iter().find(|(_, n)| *n == part)?;
            bits |= f.0;
        }
        CaseFeature::from_bits(bits)
    }
}

impl fmt::Display for CaseFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = CaseFeature::NAMES
            .iter()
            .filter(|(c, _)| self.0 & c.0 != 0)
            .map(|(_, n)| *n)
            .collect();
        f.write_str(&names.join("|"))
    }
}

impl fmt::Debug for CaseFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Attribute-value bundle carried by `S`. Empty throughout the built-in
/// grammars; unification requires equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureBundle(pub BTreeMap<String, String>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    S(FeatureBundle),
    Np(CaseFeature),
    /// `result/argument`
    Fwd(Box<Category>, Box<Category>),
    /// `result\argument`
    Bwd(Box<Category>, Box<Category>),
    /// Polymorphic variable of type-raised entries.
    Var(String),
}

impl Category {
    pub fn s() -> Category {
        Category::S(FeatureBundle::default())
    }

    pub fn np(f: CaseFeature) -> Category {
        Category::Np(f)
    }

    pub fn fwd(result: Category, arg: Category) -> Category {
        Category::Fwd(Box::new(result), Box::new(arg))
    }

    pub fn bwd(result: Category, arg: Category) -> Category {
        Category::Bwd(Box::new(result), Box::new(arg))
    }

    pub fn var(name: impl Into<String>) -> Category {
        Category::Var(name.into())
    }

    pub fn is_s(&self) -> bool {
        matches!(self, Category::S(_))
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Category::Var(_) => true,
            Category::S(_) | Category::Np(_) => false,
            Category::Fwd(r, a) | Category::Bwd(r, a) => r.has_vars() || a.has_vars(),
        }
    }

    fn occurs(&self, name: &str) -> bool {
        match self {
            Category::Var(v) => v == name,
            Category::S(_) | Category::Np(_) => false,
            Category::Fwd(r, a) | Category::Bwd(r, a) => r.occurs(name) || a.occurs(name),
        }
    }

    /// Renames every variable through `f`.
    pub fn map_vars(&self, f: &impl Fn(&str) -> String) -> Category {
        match self {
            Category::Var(v) => Category::Var(f(v)),
            Category::S(_) | Category::Np(_) => self.clone(),
            Category::Fwd(r, a) => Category::fwd(r.map_vars(f), a.map_vars(f)),
            Category::Bwd(r, a) => Category::bwd(r.map_vars(f), a.map_vars(f)),
        }
    }

    /// The innermost result after stripping every slash.
    pub fn target(&self) -> &Category {
        match self {
            Category::Fwd(r, _) | Category::Bwd(r, _) => r.target(),
            c => c,
        }
    }
}

/// Variables are displayed without the `@...` suffix added when a lexical
/// entry is instantiated.
pub fn display_var_name(name: &str) -> &str {
    name.split('@').next().unwrap_or(name)
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::S(b) if b.0.is_empty() => f.write_str("S"),
            Category::S(b) => {
                let kv: Vec<String> = b.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "S[{}]", kv.join(","))
            }
            Category::Np(c) => write!(f, "np_{c}"),
            Category::Var(v) => f.write_str(display_var_name(v)),
            Category::Fwd(r, a) | Category::Bwd(r, a) => {
                let slash = if matches!(self, Category::Fwd(..)) { '/' } else { '\\' };
                write!(f, "{r}{slash}")?;
                match **a {
                    Category::Fwd(..) | Category::Bwd(..) => write!(f, "({a})"),
                    _ => write!(f, "{a}"),
                }
            }
        }
    }
}

pub fn print_category(cat: &Category) -> String {
    cat.to_string()
}

/// Parses the slash notation, e.g. `S\np_ga\np_ni|o\(S\np_ga)` or `T/(T\np_o)`.
/// Slashes associate to the left.
pub fn parse_category(text: &str) -> Result<Category, CategoryError> {
    let mut p = CatParser { text, pos: 0 };
    let cat = p.functor()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(cat)
}

struct CatParser<'a> {
    text: &'a str,
    pos: usize,
}

impl CatParser<'_> {
    fn err(&self, msg: &str) -> CategoryError {
        CategoryError { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn functor(&mut self) -> Result<Category, CategoryError> {
        let mut cat = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('/') => {
                    self.pos += 1;
                    cat = Category::fwd(cat, self.atom()?);
                }
                Some(c @ ('\\' | '∖' | '＼')) => {
                    self.pos += c.len_utf8();
                    cat = Category::bwd(cat, self.atom()?);
                }
                _ => return Ok(cat),
            }
        }
    }

    fn word(&mut self) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !(c.is_ascii_alphanumeric() || c == '_' || c == '|') {
                break;
            }
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn atom(&mut self) -> Result<Category, CategoryError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let cat = self.functor()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(cat)
            }
            Some(_) => {
                let word = self.word().to_string();
                if word.is_empty() {
                    return Err(self.err("expected a category"));
                }
                if word == "S" {
                    return self.s_bundle();
                }
                if let Some(features) = word.strip_prefix("np_") {
                    return CaseFeature::parse(features)
                        .map(Category::Np)
                        .ok_or(CategoryError { pos: start, msg: format!("bad case feature {features:?}") });
                }
                let mut chars = word.chars();
                let var_like = matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
                    && chars.all(|c| c.is_ascii_alphanumeric());
                if var_like {
                    Ok(Category::Var(word))
                } else {
                    Err(CategoryError { pos: start, msg: format!("unknown category {word:?}") })
                }
            }
            None => Err(self.err("expected a category")),
        }
    }

    fn s_bundle(&mut self) -> Result<Category, CategoryError> {
        let mut bundle = FeatureBundle::default();
        if self.peek() != Some('[') {
            return Ok(Category::S(bundle));
        }
        self.pos += 1;
        loop {
            let key = self.word().to_string();
            if self.peek() != Some('=') || key.is_empty() {
                return Err(self.err("expected key=value"));
            }
            self.pos += 1;
            let value = self.word().to_string();
            if value.is_empty() {
                return Err(self.err("expected a feature value"));
            }
            bundle.0.insert(key, value);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    return Ok(Category::S(bundle));
                }
                _ => return Err(self.err("expected ',' or ']'")),
            }
        }
    }
}

/// A step from a functor to one of its parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathStep {
    Result,
    Argument,
}

/// Where two NP slots met and what their case sets narrowed to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Narrowing {
    pub path: Vec<PathStep>,
    pub expected: CaseFeature,
    pub actual: CaseFeature,
    pub result: CaseFeature,
}

/// The outcome of a successful unification.
///
/// Variable bindings are kept fully narrowed. Feature slots are addressed by
/// their path in the unified category, which both inputs share once their
/// variables are resolved.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    pub vars: BTreeMap<String, Category>,
    pub features: BTreeMap<Vec<PathStep>, CaseFeature>,
    pub narrowings: Vec<Narrowing>,
}

impl Bindings {
    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.features.is_empty()
    }

    /// Replaces bound variables, transitively.
    pub fn resolve_vars(&self, cat: &Category) -> Category {
        match cat {
            Category::Var(v) => match self.vars.get(v) {
                Some(bound) => self.resolve_vars(bound),
                None => cat.clone(),
            },
            Category::S(_) | Category::Np(_) => cat.clone(),
            Category::Fwd(r, a) => Category::fwd(self.resolve_vars(r), self.resolve_vars(a)),
            Category::Bwd(r, a) => Category::bwd(self.resolve_vars(r), self.resolve_vars(a)),
        }
    }

    /// Feature narrowings that actually shrank a case set.
    pub fn strict_narrowings(&self) -> impl Iterator<Item = &Narrowing> {
        self.narrowings.iter().filter(|n| n.result != n.expected || n.result != n.actual)
    }
}

/// Resolves variables and then narrows every recorded feature slot.
///
/// Meaningful for the two categories the bindings were computed from.
pub fn apply_bindings(cat: &Category, b: &Bindings) -> Category {
    let resolved = b.resolve_vars(cat);
    let mut path = Vec::new();
    narrow(&resolved, b, &mut path)
}

fn narrow(cat: &Category, b: &Bindings, path: &mut Vec<PathStep>) -> Category {
    match cat {
        Category::Np(f) => match b.features.get(path.as_slice()).and_then(|n| f.meet(*n)) {
            Some(g) => Category::Np(g),
            None => cat.clone(),
        },
        Category::S(_) | Category::Var(_) => cat.clone(),
        Category::Fwd(r, a) | Category::Bwd(r, a) => {
            path.push(PathStep::Result);
            let r = narrow(r, b, path);
            path.pop();
            path.push(PathStep::Argument);
            let a = narrow(a, b, path);
            path.pop();
            match cat {
                Category::Fwd(..) => Category::fwd(r, a),
                _ => Category::bwd(r, a),
            }
        }
    }
}

/// Unifies `expected` (a functor's argument) with `actual` (the constituent
/// offered). Case sets meet by intersection; variables bind on either side
/// under an occurs check.
pub fn unify(expected: &Category, actual: &Category) -> Option<Bindings> {
    let mut b = Bindings::default();
    let mut path = Vec::new();
    let unified = unify_into(expected, actual, &mut b, &mut path)?;
    let unified = b.resolve_vars(&unified);
    record_features(&unified, &mut Vec::new(), &mut b.features);
    Some(b)
}

fn record_features(cat: &Category, path: &mut Vec<PathStep>, out: &mut BTreeMap<Vec<PathStep>, CaseFeature>) {
    match cat {
        Category::Np(f) => {
            out.insert(path.clone(), *f);
        }
        Category::S(_) | Category::Var(_) => {}
        Category::Fwd(r, a) | Category::Bwd(r, a) => {
            path.push(PathStep::Result);
            record_features(r, path, out);
            path.pop();
            path.push(PathStep::Argument);
            record_features(a, path, out);
            path.pop();
        }
    }
}

/// Returns the unified category, keeping variable nodes in place so that
/// later narrowing of a binding is visible through every occurrence.
fn unify_into(a: &Category, b: &Category, s: &mut Bindings, path: &mut Vec<PathStep>) -> Option<Category> {
    match (a, b) {
        (Category::Var(x), Category::Var(y)) if x == y => Some(a.clone()),
        (Category::Var(x), other) | (other, Category::Var(x)) => bind_var(x, other, s, path),
        (Category::Np(f), Category::Np(g)) => {
            let result = f.meet(*g)?;
            s.narrowings.push(Narrowing { path: path.clone(), expected: *f, actual: *g, result });
            Some(Category::Np(result))
        }
        (Category::S(f), Category::S(g)) => (f == g).then(|| a.clone()),
        (Category::Fwd(r1, a1), Category::Fwd(r2, a2)) | (Category::Bwd(r1, a1), Category::Bwd(r2, a2)) => {
            path.push(PathStep::Result);
            let r = unify_into(r1, r2, s, path);
            path.pop();
            let r = r?;
            path.push(PathStep::Argument);
            let arg = unify_into(a1, a2, s, path);
            path.pop();
            let arg = arg?;
            Some(match a {
                Category::Fwd(..) => Category::fwd(r, arg),
                _ => Category::bwd(r, arg),
            })
        }
        _ => None,
    }
}

/// Whether following variable-to-variable bindings from `cat` arrives at `x`.
fn chain_reaches(s: &Bindings, cat: &Category, x: &str) -> bool {
    let mut cur = cat;
    let mut steps = 0;
    while let Category::Var(y) = cur {
        if y == x {
            return true;
        }
        match s.vars.get(y) {
            Some(next) if steps <= s.vars.len() => {
                cur = next;
                steps += 1;
            }
            _ => return false,
        }
    }
    false
}

fn bind_var(x: &str, other: &Category, s: &mut Bindings, path: &mut Vec<PathStep>) -> Option<Category> {
    if let Some(bound) = s.vars.get(x).cloned() {
        let merged = unify_into(&bound, other, s, path)?;
        // a variable chain back to `x` means `x` was already updated in place
        if chain_reaches(s, &merged, x) {
            return Some(Category::Var(x.to_string()));
        }
        if s.resolve_vars(&merged).occurs(x) {
            return None;
        }
        s.vars.insert(x.to_string(), merged);
        return Some(Category::Var(x.to_string()));
    }
    if chain_reaches(s, other, x) {
        return Some(Category::Var(x.to_string()));
    }
    if s.resolve_vars(other).occurs(x) {
        return None;
    }
    s.vars.insert(x.to_string(), other.clone());
    Some(Category::Var(x.to_string()))
}
