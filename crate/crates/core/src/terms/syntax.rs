//! Concrete syntax for terms.
//!
//! ```text
//! \x y. body            abstraction (also λ)
//! f a b                 application by juxtaposition
//! f(a,b)                call syntax: an atom when `f` is a constant,
//!                       a curried application when `f` is a variable
//! Sig e:ev. body        event quantifier (also Σ), exists e (body) (also ∃)
//! a * b, a & b          conjunction (also ×, ∧)
//! Ag(e)=x               equality
//! T                     unit truth (also ⊤)
//! # ...                 comment to end of line
//! ```
//!
//! An unbound identifier is a free variable when it is a single capital
//! letter optionally followed by digits (`V`, `K`, `C1`); every other
//! unbound identifier is a constant. `?x` forces a variable and `@x` forces
//! a constant.

use std::collections::BTreeSet;

use super::{fresh_name, Term, TermError};

/// Which framework's notation to print with. Parsing accepts both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemSyntax {
    Dts,
    Fol,
}

const KEYWORDS: [&str; 3] = ["Sig", "exists", "T"];

fn looks_like_var(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.as_str().trim_end_matches('\'').chars().all(|c| c.is_ascii_digit())
}

fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && name.trim_end_matches('\'').chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lambda,
    Sig,
    Exists,
    Top,
    Dot,
    Comma,
    Colon,
    /// `adjacent` is true when no whitespace separates it from the previous token.
    LParen { adjacent: bool },
    RParen,
    And,
    Equals,
    Ident(String),
    ForcedVar(String),
    ForcedConst(String),
}

struct Lexed {
    tok: Tok,
    pos: usize,
}

fn syntax_err(pos: usize, msg: impl Into<String>) -> TermError {
    TermError::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Lexed>, TermError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut last_end = usize::MAX;
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let single = match c {
            '\\' | 'λ' => Some(Tok::Lambda),
            'Σ' => Some(Tok::Sig),
            '∃' => Some(Tok::Exists),
            '⊤' => Some(Tok::Top),
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '(' => Some(Tok::LParen { adjacent: last_end == pos }),
            ')' => Some(Tok::RParen),
            '*' | '&' | '×' | '∧' => Some(Tok::And),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            last_end = pos + c.len_utf8();
            out.push(Lexed { tok, pos });
            continue;
        }
        let (prefix, start) = match c {
            '?' | '@' => {
                chars.next();
                (Some(c), pos + 1)
            }
            _ => (None, pos),
        };
        let mut end = start;
        while let Some(&(i, c)) = chars.peek() {
            let ok = if i == start {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_' || c == '\''
            };
            if !ok {
                break;
            }
            chars.next();
            end = i + c.len_utf8();
        }
        if end == start {
            return Err(syntax_err(pos, format!("unexpected character {c:?}")));
        }
        let name = text[start..end].to_string();
        if name.trim_end_matches('\'').contains('\'') {
            return Err(syntax_err(start, "primes may only end an identifier"));
        }
        let tok = match (prefix, name.as_str()) {
            (Some('?'), _) => Tok::ForcedVar(name),
            (Some(_), _) => Tok::ForcedConst(name),
            (None, "Sig") => Tok::Sig,
            (None, "exists") => Tok::Exists,
            (None, _) => Tok::Ident(name),
        };
        last_end = end;
        out.push(Lexed { tok, pos });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    at: usize,
    end: usize,
    /// (source name, internal name), innermost last.
    scope: Vec<(String, String)>,
    /// Names that fresh binders must avoid.
    taken: BTreeSet<String>,
}

/// Parses a term. Bound variables are renamed apart so that every binder in
/// the result carries a distinct name.
pub fn parse_term(text: &str, _syntax: SemSyntax) -> Result<Term, TermError> {
    let toks = lex(text)?;
    let mut taken = BTreeSet::new();
    for t in &toks {
        if let Tok::Ident(n) | Tok::ForcedVar(n) | Tok::ForcedConst(n) = &t.tok {
            taken.insert(n.clone());
        }
    }
    let mut p = Parser { toks, at: 0, end: text.len(), scope: Vec::new(), taken: BTreeSet::new() };
    // Source names are all available for their first binding; only repeats get primed.
    let source_names = taken;
    let term = p.term(&source_names)?;
    if p.at < p.toks.len() {
        return Err(syntax_err(p.toks[p.at].pos, "unexpected trailing input"));
    }
    Ok(term)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.tok.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), TermError> {
        let pos = self.pos();
        match self.bump() {
            Some(ref t) if std::mem::discriminant(t) == std::mem::discriminant(want) => Ok(()),
            _ => Err(syntax_err(pos, format!("expected {what}"))),
        }
    }

    fn binder_name(&mut self) -> Result<String, TermError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(n)) => Ok(n),
            _ => Err(syntax_err(pos, "expected a variable name")),
        }
    }

    fn bind(&mut self, source: String, source_names: &BTreeSet<String>) -> String {
        let internal = if self.taken.contains(&source) {
            let mut avoid = self.taken.clone();
            avoid.extend(source_names.iter().cloned());
            fresh_name(&source, &avoid)
        } else {
            source.clone()
        };
        self.taken.insert(internal.clone());
        self.scope.push((source, internal.clone()));
        internal
    }

    fn starts_binder(&self) -> bool {
        matches!(self.peek(), Some(Tok::Lambda | Tok::Sig))
    }

    fn term(&mut self, names: &BTreeSet<String>) -> Result<Term, TermError> {
        if self.starts_binder() {
            self.binder_term(names)
        } else {
            self.conj(names)
        }
    }

    fn binder_term(&mut self, names: &BTreeSet<String>) -> Result<Term, TermError> {
        match self.bump() {
            Some(Tok::Lambda) => {
                let mut sources = vec![self.binder_name()?];
                while let Some(Tok::Ident(_)) = self.peek() {
                    sources.push(self.binder_name()?);
                }
                self.expect(&Tok::Dot, "'.' after binders")?;
                let n = sources.len();
                let internals: Vec<String> = sources.into_iter().map(|s| self.bind(s, names)).collect();
                let body = self.term(names);
                self.scope.truncate(self.scope.len() - n);
                Ok(Term::abs_many(&internals, body?))
            }
            Some(Tok::Sig) => {
                let source = self.binder_name()?;
                self.expect(&Tok::Colon, "':' after event variable")?;
                let pos = self.pos();
                match self.bump() {
                    Some(Tok::Ident(ty)) if ty == "ev" => {}
                    _ => return Err(syntax_err(pos, "expected type 'ev'")),
                }
                self.expect(&Tok::Dot, "'.' after 'ev'")?;
                let internal = self.bind(source, names);
                let body = self.term(names);
                self.scope.pop();
                Ok(Term::exists(internal, body?))
            }
            _ => unreachable!("binder_term called without a binder"),
        }
    }

    fn conj(&mut self, names: &BTreeSet<String>) -> Result<Term, TermError> {
        let left = self.equality(names)?;
        if let Some(Tok::And) = self.peek() {
            self.bump();
            let right = if self.starts_binder() { self.binder_term(names)? } else { self.conj(names)? };
            return Ok(Term::conj(left, right));
        }
        Ok(left)
    }

    fn equality(&mut self, names: &BTreeSet<String>) -> Result<Term, TermError> {
        let start = self.pos();
        let left = self.application(names)?;
        if let Some(Tok::Equals) = self.peek() {
            self.bump();
            let rpos = self.pos();
            let right = self.application(names)?;
            if left.is_abs() {
                return Err(syntax_err(start, "equality side may not be an abstraction"));
            }
            if right.is_abs() {
                return Err(syntax_err(rpos, "equality side may not be an abstraction"));
            }
            return Ok(Term::eq(left, right));
        }
        Ok(left)
    }

    fn starts_primary(&self) -> bool {
        matches!(
            self.peek(),
            Some(
                Tok::Ident(_)
                    | Tok::ForcedVar(_)
                    | Tok::ForcedConst(_)
                    | Tok::Top
                    | Tok::Exists
                    | Tok::LParen { .. }
            )
        )
    }

    fn application(&mut self, names: &BTreeSet<String>) -> Result<Term, TermError> {
        if !self.starts_primary() {
            return Err(syntax_err(self.pos(), "expected a term"));
        }
        let mut t = self.primary(names)?;
        loop {
            if self.starts_primary() {
                let arg = self.primary(names)?;
                t = Term::app(t, arg);
            } else if self.starts_binder() {
                let arg = self.binder_term(names)?;
                return Ok(Term::app(t, arg));
            } else {
                return Ok(t);
            }
        }
    }

    fn resolve(&self, name: &str) -> Term {
        if let Some((_, internal)) = self.scope.iter().rev().find(|(s, _)| s == name) {
            return Term::Var(internal.clone());
        }
        if name == "T" {
            Term::Top
        } else if looks_like_var(name) {
            Term::Var(name.to_string())
        } else {
            Term::Const(name.to_string())
        }
    }

    fn primary(&mut self, names: &BTreeSet<String>) -> Result<Term, TermError> {
        let pos = self.pos();
        let head = match self.bump() {
            Some(Tok::LParen { .. }) => {
                let t = self.term(names)?;
                self.expect(&Tok::RParen, "')'")?;
                return Ok(t);
            }
            Some(Tok::Top) => return Ok(Term::Top),
            Some(Tok::Exists) => {
                let source = self.binder_name()?;
                match self.peek() {
                    Some(Tok::LParen { .. }) => {}
                    _ => return Err(syntax_err(self.pos(), "expected '(' after exists binder")),
                }
                self.bump();
                let internal = self.bind(source, names);
                let body = self.term(names);
                self.scope.pop();
                let body = body?;
                self.expect(&Tok::RParen, "')' closing exists")?;
                return Ok(Term::exists(internal, body));
            }
            Some(Tok::Ident(n)) => self.resolve(&n),
            Some(Tok::ForcedVar(n)) => Term::Var(n),
            Some(Tok::ForcedConst(n)) => Term::Const(n),
            _ => return Err(syntax_err(pos, "expected a term")),
        };
        if let Some(Tok::LParen { adjacent: true }) = self.peek() {
            self.bump();
            let mut args = vec![self.term(names)?];
            while let Some(Tok::Comma) = self.peek() {
                self.bump();
                args.push(self.term(names)?);
            }
            self.expect(&Tok::RParen, "')' closing argument list")?;
            return match head {
                Term::Const(c) => Ok(Term::Atom(c, args)),
                Term::Var(_) => Ok(Term::apply_all(head, args)),
                _ => Err(syntax_err(pos, "T cannot take arguments")),
            };
        }
        Ok(head)
    }
}

/// Renders a term. Binders that would otherwise capture a keyword on
/// re-reading are renamed; the printed text always re-parses to an
/// alpha-equal term.
pub fn print_term(term: &Term, syntax: SemSyntax) -> String {
    let mut out = String::new();
    let mut scope = Vec::new();
    Printer { syntax, out: &mut out }.term(term, &mut scope);
    out
}

struct Printer<'o> {
    syntax: SemSyntax,
    out: &'o mut String,
}

fn contains_top(t: &Term) -> bool {
    match t {
        Term::Top => true,
        Term::Var(_) | Term::Const(_) => false,
        Term::Abs(_, b) | Term::Exists(_, b) => contains_top(b),
        Term::App(a, b) | Term::Conj(a, b) | Term::Eq(a, b) => contains_top(a) || contains_top(b),
        Term::Atom(_, args) => args.iter().any(contains_top),
    }
}

/// Binder name to print: the original unless it is not an identifier, is a
/// keyword, or is `T` with a `T` (truth) inside its scope.
fn printable_binder(x: &str, body: &Term) -> Option<String> {
    let clash = !is_ident(x) || x == "Sig" || x == "exists" || (x == "T" && contains_top(body));
    if !clash {
        return None;
    }
    let base = if is_ident(x) { x.to_string() } else { "v".to_string() };
    let mut avoid = body.all_names();
    avoid.extend(KEYWORDS.iter().map(|k| k.to_string()));
    let mut fresh = fresh_name(&base, &avoid);
    // a prime-only suffix cannot rescue a keyword, e.g. T' is fine but keep it an identifier
    if !is_ident(&fresh) {
        fresh = fresh_name("v", &avoid);
    }
    Some(fresh)
}

/// Splits `h a1 .. an` into the head and its arguments.
fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut head = t;
    while let Term::App(f, a) = head {
        args.push(&**a);
        head = f;
    }
    args.reverse();
    (head, args)
}

impl Printer<'_> {
    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn name_of_var(&self, x: &str, scope: &[(String, String)]) -> String {
        match scope.iter().rev().find(|(internal, _)| internal == x) {
            Some((_, shown)) => shown.clone(),
            None if looks_like_var(x) && x != "T" => x.to_string(),
            None => format!("?{x}"),
        }
    }

    fn name_of_const(&self, c: &str, scope: &[(String, String)]) -> String {
        let shadowed = scope.iter().any(|(_, shown)| shown == c);
        if shadowed || looks_like_var(c) || KEYWORDS.contains(&c) || !is_ident(c) {
            format!("@{c}")
        } else {
            c.to_string()
        }
    }

    /// Prints at the loosest precedence: binders extend to the end.
    fn term(&mut self, t: &Term, scope: &mut Vec<(String, String)>) {
        match t {
            Term::Abs(..) => {
                self.push("\\");
                let mut cur = t;
                let mut pushed = 0;
                let mut first = true;
                while let Term::Abs(x, body) = cur {
                    let shown = printable_binder(x, body).unwrap_or_else(|| x.clone());
                    if !first {
                        self.push(" ");
                    }
                    first = false;
                    self.push(&shown);
                    scope.push((x.clone(), shown));
                    pushed += 1;
                    cur = body;
                }
                self.push(". ");
                self.term(cur, scope);
                scope.truncate(scope.len() - pushed);
            }
            Term::Exists(x, body) if self.syntax == SemSyntax::Dts => {
                let shown = printable_binder(x, body).unwrap_or_else(|| x.clone());
                self.push("Sig ");
                self.push(&shown);
                self.push(":ev. ");
                scope.push((x.clone(), shown));
                self.term(body, scope);
                scope.pop();
            }
            Term::Conj(a, b) => {
                self.conj_operand(a, scope);
                self.push(if self.syntax == SemSyntax::Dts { " * " } else { " & " });
                self.term(b, scope);
            }
            _ => self.equality(t, scope),
        }
    }

    fn conj_operand(&mut self, t: &Term, scope: &mut Vec<(String, String)>) {
        match t {
            Term::Abs(..) | Term::Conj(..) => self.parens(t, scope),
            Term::Exists(..) if self.syntax == SemSyntax::Dts => self.parens(t, scope),
            _ => self.equality(t, scope),
        }
    }

    fn equality(&mut self, t: &Term, scope: &mut Vec<(String, String)>) {
        match t {
            Term::Eq(a, b) => {
                self.eq_side(a, scope);
                self.push("=");
                self.eq_side(b, scope);
            }
            _ => self.application(t, scope),
        }
    }

    fn eq_side(&mut self, t: &Term, scope: &mut Vec<(String, String)>) {
        match t {
            Term::App(..) => self.application(t, scope),
            _ => self.primary(t, scope),
        }
    }

    fn application(&mut self, t: &Term, scope: &mut Vec<(String, String)>) {
        if let Term::App(..) = t {
            let (head, args) = spine(t);
            if let Term::Var(_) = head {
                self.call(head, &args, scope);
                return;
            }
            self.primary(head, scope);
            for arg in args {
                self.push(" ");
                self.primary(arg, scope);
            }
        } else {
            self.primary(t, scope);
        }
    }

    fn call(&mut self, head: &Term, args: &[&Term], scope: &mut Vec<(String, String)>) {
        self.primary(head, scope);
        self.push("(");
        for (i, arg) in args.iter().enumerate() {
            if i > 0 {
                self.push(",");
            }
            self.term(arg, scope);
        }
        self.push(")");
    }

    fn parens(&mut self, t: &Term, scope: &mut Vec<(String, String)>) {
        self.push("(");
        self.term(t, scope);
        self.push(")");
    }

    /// Prints a self-delimiting form, parenthesizing anything else.
    fn primary(&mut self, t: &Term, scope: &mut Vec<(String, String)>) {
        match t {
            Term::Var(x) => {
                let s = self.name_of_var(x, scope);
                self.push(&s);
            }
            Term::Const(c) => {
                let s = self.name_of_const(c, scope);
                self.push(&s);
            }
            Term::Top => self.push("T"),
            Term::Atom(p, args) => {
                let s = self.name_of_const(p, scope);
                self.push(&s);
                self.push("(");
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        self.push(",");
                    }
                    self.term(arg, scope);
                }
                self.push(")");
            }
            Term::App(..) => {
                let (head, args) = spine(t);
                if let Term::Var(_) = head {
                    self.call(head, &args, scope);
                } else {
                    self.parens(t, scope);
                }
            }
            Term::Exists(x, body) if self.syntax == SemSyntax::Fol => {
                let shown = printable_binder(x, body).unwrap_or_else(|| x.clone());
                self.push("exists ");
                self.push(&shown);
                self.push(" (");
                scope.push((x.clone(), shown));
                self.term(body, scope);
                scope.pop();
                self.push(")");
            }
            _ => self.parens(t, scope),
        }
    }
}
