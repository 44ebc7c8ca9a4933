mod common;

use casealt::lexicon::{builtin_bekki, builtin_ccgbank, Lexicon};
use casealt::parser::{parse, parse_with, sentence_semantics, ParseOptions};
use common::{check_homomorphism, sentence};
use proptest::prelude::*;

fn lexicons() -> [Lexicon; 2] {
    [builtin_bekki(), builtin_ccgbank()]
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn meanings_are_recomputed_from_children(tokens in sentence()) {
        for lex in lexicons() {
            for d in parse(&tokens, &lex).unwrap().derivations {
                check_homomorphism(&d)?;
                prop_assert!(sentence_semantics(&d, &lex).is_ok());
            }
        }
    }

    #[test]
    fn agenda_order_does_not_matter(tokens in sentence(), seed in any::<u64>()) {
        for lex in lexicons() {
            let plain = parse(&tokens, &lex).unwrap();
            let shuffled = parse_with(&tokens, &lex, ParseOptions { agenda_seed: Some(seed) }).unwrap();
            let sigs = |r: &casealt::parser::ParseResult| r.derivations.iter().map(|d| d.signature().to_string()).collect::<Vec<_>>();
            prop_assert_eq!(sigs(&plain), sigs(&shuffled));
            prop_assert_eq!(plain.stats, shuffled.stats);
        }
    }

    #[test]
    fn roots_span_the_input(tokens in sentence()) {
        for lex in lexicons() {
            for d in parse(&tokens, &lex).unwrap().derivations {
                prop_assert!(d.category.is_s());
                let surfaces: Vec<String> = d.surfaces().into_iter().map(str::to_string).collect();
                prop_assert_eq!(&surfaces, &tokens);
            }
        }
    }
}

#[test]
fn generated_sentences_parse_sometimes() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = sentence();
    let lex = builtin_bekki();
    let parsed = (0..500)
        .filter(|_| {
            let tokens = strategy.new_tree(&mut runner).unwrap().current();
            !parse(&tokens, &lex).unwrap().is_empty()
        })
        .count();
    assert!(parsed > 10, "{parsed}");
}

#[test]
fn lexicons_round_trip_through_text() {
    for lex in lexicons() {
        let back = Lexicon::from_text(&lex.to_text(), "unused").unwrap();
        assert_eq!(back.name, lex.name);
        assert_eq!(back.closure, lex.closure);
        assert_eq!(back.len(), lex.len());
        for (a, b) in lex.entries().iter().zip(back.entries()) {
            assert_eq!((&a.surface, &a.gloss, &a.category, a.is_template), (&b.surface, &b.gloss, &b.category, b.is_template));
            assert!(a.semantics.alpha_equal(&b.semantics), "{}", a.surface);
        }
    }
}

#[test]
fn completed_derivations_have_no_open_variables() {
    for lex in lexicons() {
        for case in casealt::suite::suite_cases() {
            for tokens in [case.premise_tokens(), case.conclusion_tokens()] {
                for d in parse(&tokens, &lex).unwrap().derivations {
                    for node in d.nodes().into_iter().filter(|n| !n.children.is_empty()) {
                        assert!(!node.category.has_vars(), "{} in {}", node.category, d.rule_tree());
                    }
                }
            }
        }
    }
}

#[test]
fn nested_passive_causative_closes_like_the_passive() {
    let lex = builtin_ccgbank();
    let closed = |s: &str| {
        let d = parse(&casealt::parser::tokenize(s), &lex).unwrap().derivations.remove(0);
        sentence_semantics(&d, &lex).unwrap()
    };
    let nested = closed("Jiro-ga Taro-ni hasira sera re ta");
    assert!(nested.alpha_equal(&closed("Jiro-ga Taro-ni hasira re ta")), "{nested}");
    assert!(!nested.alpha_equal(&closed("Taro-ga Jiro-o hasira se ta")));
}
