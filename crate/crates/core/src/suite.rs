//! The built-in inference suite and its report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::entailment::check_inference;
use crate::exec::{map_ordered, Execution};
use crate::lexicon::Lexicon;
use crate::parser::tokenize;
use crate::terms::print_term;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteCase {
    pub id: &'static str,
    pub premise: &'static str,
    pub conclusion: &'static str,
    /// Expected verdict per lexicon name.
    pub expected: BTreeMap<&'static str, bool>,
}

impl SuiteCase {
    pub fn premise_tokens(&self) -> Vec<String> {
        tokenize(self.premise)
    }

    pub fn conclusion_tokens(&self) -> Vec<String> {
        tokenize(self.conclusion)
    }
}

const N1_LEFT: &str = "Jiro-ga Taro-ni hasira sera re ta";
const C1_RIGHT: &str = "Jiro-ga hasit ta";

/// The five cases, in report order.
pub fn suite_cases() -> Vec<SuiteCase> {
    let case = |id, premise, conclusion, ccgbank| SuiteCase {
        id,
        premise,
        conclusion,
        expected: BTreeMap::from([("bekki", true), ("ccgbank", ccgbank)]),
    };
    vec![
        case("P1", "Taro-ga Jiro-ni homera re ta", "Jiro-ga Taro-o home ta", true),
        case("C1-ni", "Taro-ga Jiro-ni hasira se ta", C1_RIGHT, true),
        case("C1-o", "Taro-ga Jiro-o hasira se ta", C1_RIGHT, true),
        case("N1", N1_LEFT, "Taro-ga Jiro-o hasira se ta", false),
        case("N1-chain", N1_LEFT, C1_RIGHT, false),
    ]
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTrees {
    pub premise: Option<String>,
    pub conclusion: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub lexicon: String,
    pub holds: bool,
    pub expected: Option<bool>,
    pub pass: bool,
    pub premise_lf: Option<String>,
    pub conclusion_lf: Option<String>,
    pub rules: RuleTrees,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(cases: Vec<CaseReport>) -> Report {
        let mut report = Report { cases, summary: Summary::default() };
        report.summary = report.recompute_summary();
        report
    }

    pub fn recompute_summary(&self) -> Summary {
        Summary { total: self.cases.len(), passed: self.cases.iter().filter(|c| c.pass).count() }
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let yes_no = |b: bool| if b { "YES" } else { "NO" };
        let mut out = String::new();
        for c in &self.cases {
            let expected = c.expected.map_or("-", yes_no);
            let status = if c.pass { "pass" } else { "FAIL" };
            let _ = writeln!(out, "{:<9} {:<8} {:<3}  expected {:<3}  {status}", c.id, c.lexicon, yes_no(c.holds), expected);
            if let Some(e) = &c.error {
                let _ = writeln!(out, "    error: {e}");
            }
            for w in &c.warnings {
                let _ = writeln!(out, "    warning: {w}");
            }
        }
        let _ = writeln!(out, "summary: {}/{} passed", self.summary.passed, self.summary.total);
        out
    }
}

/// Runs one case under one lexicon.
pub fn run_case(case: &SuiteCase, lexicon: &Lexicon) -> CaseReport {
    let expected = case.expected.get(lexicon.name.as_str()).copied();
    let mut report = CaseReport {
        id: case.id.to_string(),
        lexicon: lexicon.name.clone(),
        holds: false,
        expected,
        pass: false,
        premise_lf: None,
        conclusion_lf: None,
        rules: RuleTrees::default(),
        error: None,
        warnings: Vec::new(),
    };
    match check_inference(lexicon, &case.premise_tokens(), &case.conclusion_tokens()) {
        Ok(inf) => {
            let syntax = lexicon.closure.syntax();
            report.holds = inf.verdict.holds;
            report.premise_lf = Some(print_term(&inf.premise.lf, syntax));
            report.conclusion_lf = Some(print_term(&inf.conclusion.lf, syntax));
            report.rules = RuleTrees {
                premise: inf.premise.derivations.first().map(|d| d.rule_tree()),
                conclusion: inf.conclusion.derivations.first().map(|d| d.rule_tree()),
            };
            report.warnings.extend(inf.premise.ambiguity_warning.map(|w| format!("premise: {w}")));
            report.warnings.extend(inf.conclusion.ambiguity_warning.map(|w| format!("conclusion: {w}")));
            report.warnings.extend(inf.verdict.diagnostic);
            match expected {
                Some(e) => report.pass = e == report.holds,
                None => report.error = Some(format!("no expectation recorded for lexicon {}", lexicon.name)),
            }
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

/// Runs every case under every lexicon. Output is ordered by case, then by
/// lexicon, regardless of execution mode.
pub fn run_suite(cases: &[SuiteCase], lexicons: &[Lexicon], exec: Execution) -> Report {
    let jobs: Vec<(&SuiteCase, &Lexicon)> = cases.iter().flat_map(|c| lexicons.iter().map(move |l| (c, l))).collect();
    Report::new(map_ordered(&jobs, exec, |(c, l)| run_case(c, l)))
}
