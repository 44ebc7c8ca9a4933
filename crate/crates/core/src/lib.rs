//! A CCG derivation engine with compositional semantics for Japanese
//! passive and causative suffixes.
//!
//! Two lexicons are built in. `bekki` treats the suffixes as functors over
//! verb categories and closes sentences in dependent type theory syntax.
//! `ccgbank` treats them as `S\S` with semantic templates and closes
//! sentences in first-order event syntax. Closed logical forms are flattened
//! into [`entailment::NormalForm`]s and compared by atom containment.

pub mod categories;
pub mod entailment;
pub mod exec;
pub mod lexicon;
pub mod parser;
pub mod suite;
pub mod terms;

pub use entailment::{check_inference, entails, normalize_lf, NormalForm, Verdict};
pub use exec::{parse_batch, Execution};
pub use lexicon::{builtin, builtin_bekki, builtin_ccgbank, load_lexicon, ClosureKind, Lexicon};
pub use parser::{parse, render_derivation, sentence_semantics, tokenize, ParseError};
pub use suite::{run_suite, suite_cases, Report};
pub use terms::{parse_term, print_term, SemSyntax, Term};
