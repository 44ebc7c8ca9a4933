//! Data-parallel helpers. Work is split across independent sentences or
//! suite runs; a single chart is always filled sequentially.

use crate::lexicon::Lexicon;
use crate::parser::{parse, ParseError, ParseResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually runs on several threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Applies `f` to every item, keeping input order in the output.
pub fn map_ordered<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Parses each token line independently.
pub fn parse_batch(sentences: &[Vec<String>], lexicon: &Lexicon, exec: Execution) -> Vec<Result<ParseResult, ParseError>> {
    map_ordered(sentences, exec, |tokens| parse(tokens, lexicon))
}
