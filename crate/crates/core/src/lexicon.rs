//! Lexical entries, the two built-in grammars, and semantic templates.
//!
//! Lexicon files are line oriented, with the four fields of an entry
//! separated by tabs (shown here as `<TAB>`):
//!
//! ```text
//! %lexicon ccgbank
//! %closure ccg2lambda
//! # surface<TAB>gloss<TAB>category<TAB>semantics
//! re<TAB>passive<TAB>S\S<TAB>template: \Q2 Q1 C1 C2 K. V(Q2,Q1,...)
//! ```
//!
//! A semantics field prefixed with `template:` is a template over the free
//! variable `V`; every other semantics must be closed.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use crate::categories::{parse_category, Category};
use crate::terms::{beta_normalize, parse_term, print_term, SemSyntax, Term, TermError, DEFAULT_FUEL};

/// The variable a template abstracts over.
pub const TEMPLATE_VAR: &str = "V";

const TEMPLATE_PREFIX: &str = "template:";

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    TemplateFlag { line: usize, msg: String },
    #[error("lexicon has no entries")]
    EmptyLexicon,
    #[error("term is not a template: `{TEMPLATE_VAR}` does not occur free")]
    NotATemplate,
    #[error("predicate meaning has free variables: {0:?}")]
    OpenPredicate(Vec<String>),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// How a sentence meaning is closed into a logical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureKind {
    /// Apply the event continuation `\e. T`.
    Dts,
    /// Supply the two role relations and the event-predicate builder.
    Ccg2lambda,
}

impl ClosureKind {
    pub fn syntax(self) -> SemSyntax {
        match self {
            ClosureKind::Dts => SemSyntax::Dts,
            ClosureKind::Ccg2lambda => SemSyntax::Fol,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClosureKind::Dts => "dts",
            ClosureKind::Ccg2lambda => "ccg2lambda",
        }
    }

    fn parse(s: &str) -> Option<ClosureKind> {
        match s {
            "dts" => Some(ClosureKind::Dts),
            "ccg2lambda" => Some(ClosureKind::Ccg2lambda),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexEntry {
    pub surface: String,
    pub gloss: String,
    pub category: Category,
    pub semantics: Term,
    pub is_template: bool,
}

impl LexEntry {
    /// Checks the template flag against the free variables of the semantics.
    pub fn validate(&self) -> Result<(), String> {
        let free = self.semantics.free_vars();
        if self.is_template {
            if !free.contains(TEMPLATE_VAR) {
                return Err(format!("template for {:?} does not mention {TEMPLATE_VAR}", self.surface));
            }
            if free.len() > 1 {
                return Err(format!("template for {:?} has stray free variables {free:?}", self.surface));
            }
        } else if !free.is_empty() {
            return Err(format!("semantics of {:?} is not closed: free {free:?}", self.surface));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub name: String,
    pub closure: ClosureKind,
    entries: Vec<LexEntry>,
    by_surface: BTreeMap<String, Vec<usize>>,
}

impl Lexicon {
    pub fn new(name: impl Into<String>, closure: ClosureKind) -> Lexicon {
        Lexicon { name: name.into(), closure, entries: Vec::new(), by_surface: BTreeMap::new() }
    }

    pub fn push(&mut self, entry: LexEntry) {
        self.by_surface.entry(entry.surface.clone()).or_default().push(self.entries.len());
        self.entries.push(entry);
    }

    pub fn lookup(&self, surface: &str) -> Vec<&LexEntry> {
        self.by_surface
            .get(surface)
            .map(|ix| ix.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.by_surface.contains_key(surface)
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses lexicon text. `default_name` is used when no `%lexicon`
    /// directive is present.
    pub fn from_text(text: &str, default_name: &str) -> Result<Lexicon, LexiconError> {
        let mut name = default_name.to_string();
        let mut closure = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(directive) = trimmed.strip_prefix('%') {
                let mut parts = directive.split_whitespace();
                match (parts.next(), parts.next(), parts.next()) {
                    (Some("lexicon"), Some(n), None) => name = n.to_string(),
                    (Some("closure"), Some(k), None) => {
                        closure = Some(ClosureKind::parse(k).ok_or_else(|| LexiconError::Parse {
                            line,
                            msg: format!("unknown closure kind {k:?}"),
                        })?)
                    }
                    _ => return Err(LexiconError::Parse { line, msg: format!("bad directive {trimmed:?}") }),
                }
                continue;
            }
            rows.push((line, raw));
        }
        let closure = closure.unwrap_or(ClosureKind::Dts);
        let mut lex = Lexicon::new(name, closure);
        for (line, raw) in rows {
            lex.push(parse_row(raw, line, closure.syntax())?);
        }
        if lex.is_empty() {
            return Err(LexiconError::EmptyLexicon);
        }
        Ok(lex)
    }

    /// Serializes in the file format; `from_text` reads it back.
    pub fn to_text(&self) -> String {
        let syntax = self.closure.syntax();
        let mut out = format!("%lexicon {}\n%closure {}\n", self.name, self.closure.name());
        for e in &self.entries {
            let sem = print_term(&e.semantics, syntax);
            let prefix = if e.is_template { "template: " } else { "" };
            out.push_str(&format!("{}\t{}\t{}\t{prefix}{sem}\n", e.surface, e.gloss, e.category));
        }
        out
    }
}

fn parse_row(raw: &str, line: usize, syntax: SemSyntax) -> Result<LexEntry, LexiconError> {
    let fields: Vec<&str> = raw.trim_end_matches(['\r', '\n']).split('\t').collect();
    let [surface, gloss, category, semantics] = fields.as_slice() else {
        return Err(LexiconError::Parse {
            line,
            msg: format!("expected 4 tab-separated fields, found {}", fields.len()),
        });
    };
    let surface = surface.trim();
    if surface.is_empty() || surface.contains(char::is_whitespace) {
        return Err(LexiconError::Parse { line, msg: format!("bad surface form {surface:?}") });
    }
    let category = parse_category(category.trim())
        .map_err(|e| LexiconError::Parse { line, msg: format!("category: {e}") })?;
    let semantics = semantics.trim();
    let (is_template, sem_text) = match semantics.strip_prefix(TEMPLATE_PREFIX) {
        Some(rest) => (true, rest.trim()),
        None => (false, semantics),
    };
    let semantics = parse_term(sem_text, syntax).map_err(|e| LexiconError::Parse { line, msg: format!("semantics: {e}") })?;
    let entry = LexEntry {
        surface: surface.to_string(),
        gloss: gloss.trim().to_string(),
        category,
        semantics,
        is_template,
    };
    entry.validate().map_err(|msg| LexiconError::TemplateFlag { line, msg })?;
    Ok(entry)
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon, LexiconError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LexiconError::Io { path: path.display().to_string(), source })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("user");
    Lexicon::from_text(&text, stem)
}

const BEKKI_TEXT: &str = include_str!("../lexicons/bekki.lex");
const CCGBANK_TEXT: &str = include_str!("../lexicons/ccgbank.lex");

/// Argument-structure-aware suffixes with type-raised nouns.
pub fn builtin_bekki() -> Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| Lexicon::from_text(BEKKI_TEXT, "bekki").expect("built-in bekki lexicon is valid"))
        .clone()
}

/// `S\S` suffixes with semantic templates over bare case-marked nouns.
pub fn builtin_ccgbank() -> Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| Lexicon::from_text(CCGBANK_TEXT, "ccgbank").expect("built-in ccgbank lexicon is valid"))
        .clone()
}

/// Looks up a built-in lexicon by name.
pub fn builtin(name: &str) -> Option<Lexicon> {
    match name {
        "bekki" => Some(builtin_bekki()),
        "ccgbank" => Some(builtin_ccgbank()),
        _ => None,
    }
}

/// Fills the template's `V` with a closed predicate meaning and normalizes.
pub fn instantiate_template(template: &Term, predicate: &Term) -> Result<Term, LexiconError> {
    if !template.has_free(TEMPLATE_VAR) {
        return Err(LexiconError::NotATemplate);
    }
    let free = predicate.free_vars();
    if !free.is_empty() {
        return Err(LexiconError::OpenPredicate(free.into_iter().collect()));
    }
    Ok(beta_normalize(&template.substitute(TEMPLATE_VAR, predicate), DEFAULT_FUEL)?)
}

/// Stacks two templates: the result is a template whose instantiation with
/// `p` equals `outer` instantiated with `inner` instantiated with `p`.
pub fn compose_templates(outer: &Term, inner: &Term) -> Result<Term, LexiconError> {
    if !outer.has_free(TEMPLATE_VAR) || !inner.has_free(TEMPLATE_VAR) {
        return Err(LexiconError::NotATemplate);
    }
    Ok(beta_normalize(&outer.substitute(TEMPLATE_VAR, inner), DEFAULT_FUEL)?)
}
