//! The `.sqc` proof script format.
//!
//! ```text
//! p -> p
//!
//! AlphaImp
//!   ~p
//!   p
//! Ext
//!   p
//!   ~p
//! Basic
//! ```
//!
//! The goal formula comes first and runs until a blank line. Each step is an
//! unindented rule name followed by its result sequents, one indented formula
//! per line; the two results of a branching rule are separated by a line
//! holding only `+`. `#` starts a comment.

pub mod formula;
pub mod print;

use crate::calculus::{Rule, RuleApplication, Sequent};
use crate::diag::{Code, Diagnostic, LineIndex, Span};
use crate::syntax::Formula;

pub use formula::ArityTable;
pub use print::{print_formula, print_script, print_sequent, print_term};

#[derive(Clone, Debug)]
pub struct ProofScript {
    pub goal: Formula,
    pub steps: Vec<RuleApplication>,
    /// Text of a final step that could not be parsed.
    pub trailing: Option<String>,
}

impl ProofScript {
    pub fn new(goal: Formula, steps: Vec<RuleApplication>) -> Self {
        ProofScript { goal, steps, trailing: None }
    }
}

/// Structural equality: spans and binder display names are ignored.
impl PartialEq for ProofScript {
    fn eq(&self, other: &Self) -> bool {
        self.goal == other.goal
            && self.trailing == other.trailing
            && self.steps.len() == other.steps.len()
            && self
                .steps
                .iter()
                .zip(&other.steps)
                .all(|(a, b)| a.rule == b.rule && a.claimed == b.claimed)
    }
}

#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub script: Option<ProofScript>,
    pub diagnostics: Vec<Diagnostic>,
    /// Some error was skipped over to keep parsing.
    pub recovered: bool,
    /// Number of leading steps that precede the first error.
    pub clean_prefix: usize,
}

impl ParseOutcome {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

/// Parses a single formula. Free names become constants.
pub fn parse_formula(text: &str) -> Result<Formula, Vec<Diagnostic>> {
    let index = LineIndex::new(text);
    let mut arities = ArityTable::default();
    formula::Parser::parse_range(text, &index, 0, text.len(), &mut arities).map_err(|d| vec![d])
}

#[derive(Clone, Copy, Debug)]
struct Line<'a> {
    start: usize,
    /// Content without the comment and trailing whitespace.
    body: &'a str,
}

impl<'a> Line<'a> {
    fn is_blank(&self) -> bool {
        self.body.trim().is_empty()
    }

    fn is_indented(&self) -> bool {
        self.body.starts_with([' ', '\t'])
    }

    fn is_separator(&self) -> bool {
        self.body.trim() == "+"
    }

    fn end(&self) -> usize {
        self.start + self.body.len()
    }

    /// Belongs to the block under a rule-name line.
    fn continues_block(&self) -> bool {
        self.is_blank() || self.is_indented() || self.is_separator()
    }
}

fn split_lines(text: &str, from: usize) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    let mut start = from;
    for raw in text[from..].split_inclusive('\n') {
        let content = raw.strip_suffix('\n').unwrap_or(raw);
        let content = content.strip_suffix('\r').unwrap_or(content);
        let content = match content.find('#') {
            Some(i) => &content[..i],
            None => content,
        };
        lines.push(Line { start, body: content.trim_end() });
        start += raw.len();
    }
    lines
}

fn nearest_rule(name: &str) -> Rule {
    let lower = name.to_lowercase();
    Rule::ALL
        .into_iter()
        .min_by_key(|r| strsim::levenshtein(&lower, &r.name().to_lowercase()))
        .expect("rule table is not empty")
}

pub fn parse_script(text: &str) -> ParseOutcome {
    let from = if text.starts_with('\u{feff}') { '\u{feff}'.len_utf8() } else { 0 };
    let index = LineIndex::new(text);
    let lines = split_lines(text, from);
    let mut arities = ArityTable::default();
    let mut diagnostics = Vec::new();

    let Some(goal_start) = lines.iter().position(|l| !l.is_blank()) else {
        let at = index.span(from, from);
        diagnostics.push(Diagnostic::error(Code::MissingGoal, at, "the script is empty; it must start with the goal formula"));
        return ParseOutcome { script: None, diagnostics, recovered: false, clean_prefix: 0 };
    };
    let mut i = goal_start + 1;
    while i < lines.len() && !lines[i].is_blank() && !is_rule_line(&lines[i]) {
        i += 1;
    }
    let goal_end = lines[i - 1].end();
    let goal = match formula::Parser::parse_range(text, &index, lines[goal_start].start, goal_end, &mut arities) {
        Ok(g) => g,
        Err(d) => {
            diagnostics.push(d);
            return ParseOutcome { script: None, diagnostics, recovered: false, clean_prefix: 0 };
        }
    };

    let mut steps = Vec::new();
    let mut recovered = false;
    let mut clean_prefix = None;
    let mut trailing = None;
    while i < lines.len() {
        let line = lines[i];
        if line.is_blank() {
            i += 1;
            continue;
        }
        let block_end = (i + 1..lines.len()).find(|&j| !lines[j].continues_block()).unwrap_or(lines.len());
        match parse_step(text, &index, &lines[i..block_end], &mut arities, &mut diagnostics) {
            Ok(step) => steps.push(step),
            Err(d) => {
                diagnostics.push(d);
                recovered = true;
                clean_prefix.get_or_insert(steps.len());
                if block_end == lines.len() {
                    trailing = Some(text[line.start..].to_string());
                }
            }
        }
        i = block_end;
    }

    let clean_prefix = clean_prefix.unwrap_or(steps.len());
    ParseOutcome {
        script: Some(ProofScript { goal, steps, trailing }),
        diagnostics,
        recovered,
        clean_prefix,
    }
}

fn is_rule_line(line: &Line<'_>) -> bool {
    !line.is_indented() && line.body.trim().parse::<Rule>().is_ok()
}

/// Parses one step: `block[0]` is the rule-name line, the rest its results.
fn parse_step(
    text: &str,
    index: &LineIndex<'_>,
    block: &[Line<'_>],
    arities: &mut ArityTable,
    warnings: &mut Vec<Diagnostic>,
) -> Result<RuleApplication, Diagnostic> {
    let head = block[0];
    let span = index.span(head.start, head.end());
    if head.is_indented() {
        return Err(Diagnostic::error(
            Code::Layout,
            span,
            "indented formula outside of a step; a rule name must come first",
        ));
    }
    let name = head.body.trim();
    let rule: Rule = match name.parse() {
        Ok(r) => r,
        Err(_) if head.is_separator() => {
            return Err(Diagnostic::error(Code::Layout, span, "`+` must follow the first result of a rule"))
        }
        Err(_) => {
            let suggestion = nearest_rule(name);
            return Err(Diagnostic::error(
                Code::UnknownRule,
                span,
                format!("unknown rule `{name}`; did you mean `{suggestion}`?"),
            ));
        }
    };

    let mut claimed = Vec::new();
    let mut current: Vec<Formula> = Vec::new();
    let mut after_separator = false;
    for line in &block[1..] {
        if line.is_blank() {
            continue;
        }
        let line_span = index.span(line.start, line.end());
        if line.is_separator() {
            if current.is_empty() {
                return Err(Diagnostic::error(Code::Layout, line_span, "`+` must separate two non-empty result sequents"));
            }
            claimed.push(Sequent(std::mem::take(&mut current)));
            after_separator = true;
            continue;
        }
        let indent = line.body.len() - line.body.trim_start().len();
        if indent < 2 && !line.body.starts_with('\t') {
            warnings.push(Diagnostic::warning(Code::Indentation, line_span, "result formulas should be indented by two spaces"));
        }
        let f = formula::Parser::parse_range(text, index, line.start + indent, line.end(), arities)?;
        current.push(f);
    }
    if current.is_empty() {
        if after_separator {
            let last = block.last().expect("non-empty block");
            return Err(Diagnostic::error(
                Code::Layout,
                index.span(last.start, last.end()),
                "the second result sequent after `+` is missing",
            ));
        }
    } else {
        claimed.push(Sequent(current));
    }
    let last = block.iter().rev().find(|l| !l.is_blank()).expect("rule line");
    Ok(RuleApplication { rule, claimed, span: Span { end: last.end().max(span.end), ..span } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    const CANONICAL: &str = "p -> p\n\nAlphaImp\n  ~p\n  p\nExt\n  p\n  ~p\nBasic\n";

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn parse_formula_examples() {
        let p = Formula::atom("p");
        let nnp = Formula::neg(Formula::neg(p.clone()));
        assert_eq!(
            parse_formula("p <-> ~~p").unwrap(),
            Formula::con(Formula::imp(p.clone(), nnp.clone()), Formula::imp(nnp, p.clone()))
        );
        let r = |a, b| Formula::pred("r", vec![Term::Var(a), Term::Var(b)]);
        assert_eq!(
            parse_formula("(exists x. forall y. r(x, y)) -> (forall y. exists x. r(x, y))").unwrap(),
            Formula::imp(Formula::exi(Formula::uni(r(1, 0))), Formula::uni(Formula::exi(r(0, 1))))
        );
        let q = Formula::atom("q");
        assert_eq!(parse_formula("p -> q -> p").unwrap(), Formula::imp(p.clone(), Formula::imp(q, p)));
    }

    #[test]
    fn unicode_spellings() {
        assert_eq!(
            parse_formula("(∃x. ∀y. r(x, y)) → (∀y. ∃x. r(x, y))").unwrap(),
            parse_formula("(exists x. forall y. r(x, y)) -> (forall y. exists x. r(x, y))").unwrap()
        );
        assert_eq!(parse_formula("p ↔ ¬¬p").unwrap(), parse_formula("p <-> ~~p").unwrap());
        assert_eq!(parse_formula("p ∨ q ∧ r").unwrap(), parse_formula("p | (q & r)").unwrap());
    }

    #[test]
    fn free_names_are_constants_and_binders_shadow() {
        assert_eq!(parse_formula("p(x)").unwrap(), Formula::pred("p", vec![c("x")]));
        assert_eq!(
            parse_formula("forall x. p(x) & exists x. q(x, y)").unwrap(),
            Formula::uni(Formula::con(
                Formula::pred("p", vec![Term::Var(0)]),
                Formula::exi(Formula::pred("q", vec![Term::Var(0), c("y")]))
            ))
        );
    }

    #[test]
    fn syntax_errors_are_located() {
        let d = &parse_formula("p &\n (q | )").unwrap_err()[0];
        assert_eq!(d.code, Code::SyntaxError);
        assert_eq!((d.span.line, d.span.col), (2, 7));
        assert!(d.message.contains("expected a formula"));
        assert_eq!(parse_formula("p <-> q <-> r").unwrap_err()[0].code, Code::SyntaxError);
        assert_eq!(parse_formula("p $ q").unwrap_err()[0].code, Code::SyntaxError);
        assert_eq!(parse_formula("forall . p").unwrap_err()[0].code, Code::SyntaxError);
    }

    #[test]
    fn arity_is_fixed_at_first_use() {
        let d = &parse_formula("p(f(a)) | p(f(a, b))").unwrap_err()[0];
        assert_eq!(d.code, Code::ArityMismatch);
        assert!(d.message.contains("`f`"));
        assert_eq!(parse_formula("p(a) | p").unwrap_err()[0].code, Code::ArityMismatch);
        // Predicates and functions live in separate namespaces.
        assert!(parse_formula("p(p)").is_ok());
    }

    #[test]
    fn canonical_script() {
        let out = parse_script(CANONICAL);
        assert!(!out.recovered);
        assert!(out.diagnostics.is_empty());
        let script = out.script.unwrap();
        assert_eq!(script.steps.len(), 3);
        assert_eq!(script.steps[0].rule, Rule::AlphaImp);
        assert_eq!(script.steps[2].claimed, Vec::<Sequent>::new());
        assert_eq!(print_script(&script), CANONICAL);
    }

    #[test]
    fn unknown_rule_suggests_and_recovers() {
        let text = "p -> p\n\nAlphImp\n  ~p\n  p\nExt\n  p\n  ~p\nBasic\n";
        let out = parse_script(text);
        assert!(out.recovered);
        assert_eq!(out.clean_prefix, 0);
        let d = &out.diagnostics[0];
        assert_eq!(d.code, Code::UnknownRule);
        assert!(d.message.contains("`AlphaImp`"));
        assert_eq!((d.span.line, d.span.col), (3, 1));
        let steps = out.script.unwrap().steps;
        assert_eq!(steps.iter().map(|s| s.rule).collect::<Vec<_>>(), vec![Rule::Ext, Rule::Basic]);
    }

    #[test]
    fn truncated_file_keeps_earlier_steps() {
        let text = "p & q\n\nExt\n  p & q\nBetaCon\n  p\n+\n";
        let out = parse_script(text);
        assert!(out.recovered);
        let script = out.script.unwrap();
        assert_eq!(script.steps.len(), 1);
        assert_eq!(script.trailing.as_deref(), Some("BetaCon\n  p\n+\n"));
        assert_eq!(out.clean_prefix, 1);
    }

    #[test]
    fn beta_blocks_and_comments() {
        let text = "\u{feff}# exercise 3\np & q -> q & p  # goal\n\nAlphaImp\n  ~(p & q)\n  q & p\n\nExt\n  q & p\n  ~(p & q)\nBetaCon\n  q\n  ~(p & q)\n+\n  p\n  ~(p & q)\n";
        let out = parse_script(text);
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        let script = out.script.unwrap();
        assert_eq!(script.steps[2].claimed.len(), 2);
        assert_eq!(script.steps[2].span.line, 11);
    }

    #[test]
    fn goal_may_span_lines() {
        let out = parse_script("(p ->\n  q) ->\n p -> q\n\nAlphaImp\n  ~(p -> q)\n  p -> q\n");
        assert!(out.diagnostics.is_empty());
        assert_eq!(out.script.unwrap().steps.len(), 1);
    }

    #[test]
    fn arity_is_enforced_across_the_script() {
        let out = parse_script("p(a) -> p(a)\n\nAlphaImp\n  ~p(a, a)\n  p(a)\n");
        assert_eq!(out.diagnostics[0].code, Code::ArityMismatch);
        assert!(out.recovered);
    }

    #[test]
    fn layout_errors() {
        assert_eq!(parse_script("").diagnostics[0].code, Code::MissingGoal);
        assert_eq!(parse_script("p\n\n  q\n").diagnostics[0].code, Code::Layout);
        assert_eq!(parse_script("p\n\nBetaCon\n+\n  q\n").diagnostics[0].code, Code::Layout);
        let out = parse_script("p -> p\n\nAlphaImp\n ~p\n p\n");
        assert_eq!(out.diagnostics.len(), 2);
        assert!(out.diagnostics.iter().all(|d| d.code == Code::Indentation && !d.is_error()));
        assert!(!out.recovered);
    }
}
