//! One-sided sequent calculus: the rule table, validation of user-written
//! rule results, and whole-script checking.
//!
//! Every rule acts on the first formula of the first open goal. `Ext` is the
//! only structural rule; it reorders, duplicates and drops formulas.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{Code, Diagnostic, Span};
use crate::script::print::{print_formula, print_sequent, print_term};
use crate::syntax::{constants_of, instantiate, shift, Formula, Term};

/// An ordered list of closed formulas, read disjunctively.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sequent(pub Vec<Formula>);

impl Sequent {
    pub fn new(formulas: Vec<Formula>) -> Self {
        Sequent(formulas)
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.0
    }

    pub fn first(&self) -> Option<&Formula> {
        self.0.first()
    }

    pub fn tail(&self) -> &[Formula] {
        self.0.get(1..).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains(f)
    }

    /// `head` followed by the tail of `self`.
    fn with_head(&self, head: Vec<Formula>) -> Sequent {
        let mut v = head;
        v.extend(self.tail().iter().cloned());
        Sequent(v)
    }
}

impl From<Vec<Formula>> for Sequent {
    fn from(v: Vec<Formula>) -> Self {
        Sequent(v)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sequent(self))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Basic,
    AlphaDis,
    AlphaImp,
    AlphaCon,
    BetaCon,
    BetaImp,
    BetaDis,
    GammaExi,
    GammaUni,
    DeltaUni,
    DeltaExi,
    NegNeg,
    Ext,
}

impl Rule {
    pub const ALL: [Rule; 13] = [
        Rule::Basic,
        Rule::AlphaDis,
        Rule::AlphaImp,
        Rule::AlphaCon,
        Rule::BetaCon,
        Rule::BetaImp,
        Rule::BetaDis,
        Rule::GammaExi,
        Rule::GammaUni,
        Rule::DeltaUni,
        Rule::DeltaExi,
        Rule::NegNeg,
        Rule::Ext,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Basic => "Basic",
            Rule::AlphaDis => "AlphaDis",
            Rule::AlphaImp => "AlphaImp",
            Rule::AlphaCon => "AlphaCon",
            Rule::BetaCon => "BetaCon",
            Rule::BetaImp => "BetaImp",
            Rule::BetaDis => "BetaDis",
            Rule::GammaExi => "GammaExi",
            Rule::GammaUni => "GammaUni",
            Rule::DeltaUni => "DeltaUni",
            Rule::DeltaExi => "DeltaExi",
            Rule::NegNeg => "NegNeg",
            Rule::Ext => "Ext",
        }
    }

    /// Number of result sequents the rule produces.
    pub fn premises(self) -> usize {
        match self {
            Rule::Basic => 0,
            Rule::BetaCon | Rule::BetaImp | Rule::BetaDis => 2,
            _ => 1,
        }
    }

    pub fn is_beta(self) -> bool {
        self.premises() == 2
    }

    /// Whether the rule's head pattern matches `head`. Says nothing about
    /// `Basic` or `Ext`, which do not inspect the head's shape.
    fn matches_head(self, head: &Formula) -> bool {
        use Formula::*;
        match (self, head) {
            (Rule::AlphaDis, Dis(..)) => true,
            (Rule::AlphaImp, Imp(..)) => true,
            (Rule::BetaCon, Con(..)) => true,
            (Rule::GammaExi, Exi(..)) => true,
            (Rule::DeltaUni, Uni(..)) => true,
            (_, Neg(inner)) => matches!(
                (self, inner.as_ref()),
                (Rule::AlphaCon, Con(..))
                    | (Rule::BetaImp, Imp(..))
                    | (Rule::BetaDis, Dis(..))
                    | (Rule::GammaUni, Uni(..))
                    | (Rule::DeltaExi, Exi(..))
                    | (Rule::NegNeg, Neg(..))
            ),
            _ => false,
        }
    }

    fn expected_head(self) -> &'static str {
        match self {
            Rule::Basic => "a formula whose negation occurs later in the sequent",
            Rule::AlphaDis => "a disjunction p | q",
            Rule::AlphaImp => "an implication p -> q",
            Rule::AlphaCon => "a negated conjunction ~(p & q)",
            Rule::BetaCon => "a conjunction p & q",
            Rule::BetaImp => "a negated implication ~(p -> q)",
            Rule::BetaDis => "a negated disjunction ~(p | q)",
            Rule::GammaExi => "an existential exists x. p",
            Rule::GammaUni => "a negated universal ~(forall x. p)",
            Rule::DeltaUni => "a universal forall x. p",
            Rule::DeltaExi => "a negated existential ~(exists x. p)",
            Rule::NegNeg => "a double negation ~~p",
            Rule::Ext => "any formula",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for Rule {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// One proof step: the rule and the result sequents the user wrote out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: Rule,
    pub claimed: Vec<Sequent>,
    pub span: Span,
}

impl RuleApplication {
    pub fn new(rule: Rule, claimed: Vec<Sequent>) -> Self {
        RuleApplication { rule, claimed, span: Span::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub branch_id: usize,
    pub sequent: Sequent,
}

/// Open goals in depth-first order, plus bookkeeping for partial credit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofState {
    pub open_goals: VecDeque<Goal>,
    pub next_branch_id: usize,
    pub steps_consumed: usize,
    /// Branches ended by `Basic` so far.
    pub closed: usize,
}

impl ProofState {
    pub fn new(goal: Formula) -> Self {
        let mut open_goals = VecDeque::new();
        open_goals.push_back(Goal { branch_id: 0, sequent: Sequent(vec![goal]) });
        ProofState { open_goals, next_branch_id: 1, steps_consumed: 0, closed: 0 }
    }

    pub fn is_complete(&self) -> bool {
        self.open_goals.is_empty()
    }

    pub fn open_sequents(&self) -> Vec<Sequent> {
        self.open_goals.iter().map(|g| g.sequent.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Complete,
    Incomplete(Vec<Sequent>),
    Invalid { step_index: usize, diagnostics: Vec<Diagnostic> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("the sequent is empty")]
pub struct EmptySequent;

/// Rules that can be applied to `s` as it stands. `Ext` is always present.
pub fn applicable_rules(s: &Sequent) -> Result<BTreeSet<Rule>, EmptySequent> {
    let head = s.first().ok_or(EmptySequent)?;
    let mut rules: BTreeSet<Rule> =
        Rule::ALL.into_iter().filter(|r| r.matches_head(head)).collect();
    if basic_applies(s) {
        rules.insert(Rule::Basic);
    }
    rules.insert(Rule::Ext);
    Ok(rules)
}

fn basic_applies(s: &Sequent) -> bool {
    match s.first() {
        Some(head) => {
            let negated = Formula::neg(head.clone());
            s.tail().contains(&negated)
        }
        None => false,
    }
}

/// Validates one step against the first open goal and returns the successor
/// state, or the diagnostics explaining why the step is wrong.
pub fn validate_step(state: &ProofState, app: &RuleApplication) -> Result<ProofState, Vec<Diagnostic>> {
    let Some(goal) = state.open_goals.front() else {
        return Err(vec![Diagnostic::error(
            Code::NoOpenGoal,
            app.span,
            format!("{} applied but every branch is already closed", app.rule),
        )]);
    };
    let results = rule_results(&goal.sequent, app).map_err(|d| vec![d])?;

    let mut next = state.clone();
    let parent = next.open_goals.pop_front().expect("checked above");
    next.steps_consumed += 1;
    match results.len() {
        0 => next.closed += 1,
        1 => {
            let sequent = results.into_iter().next().expect("one result");
            next.open_goals.push_front(Goal { branch_id: parent.branch_id, sequent });
        }
        n => {
            let first_id = next.next_branch_id;
            next.next_branch_id += n;
            for (k, sequent) in results.into_iter().enumerate().rev() {
                next.open_goals.push_front(Goal { branch_id: first_id + k, sequent });
            }
        }
    }
    Ok(next)
}

fn rule_results(goal: &Sequent, app: &RuleApplication) -> Result<Vec<Sequent>, Diagnostic> {
    let span = app.span;
    let rule = app.rule;
    let Some(head) = goal.first() else {
        return Err(Diagnostic::error(Code::NotApplicable, span, format!("{rule} applied to an empty sequent")));
    };

    if rule == Rule::Basic {
        if !basic_applies(goal) {
            return Err(Diagnostic::error(
                Code::BasicNoMatch,
                span,
                format!(
                    "Basic needs `{}` later in the sequent; move the complementary pair to the front with Ext",
                    print_formula(&Formula::neg(head.clone()))
                ),
            ));
        }
    } else if rule != Rule::Ext && !rule.matches_head(head) {
        return Err(Diagnostic::error(
            Code::NotApplicable,
            span,
            format!("{rule} needs {} first, found `{}`", rule.expected_head(), print_formula(head)),
        ));
    }

    if app.claimed.len() != rule.premises() {
        return Err(Diagnostic::error(
            Code::WrongBranchCount,
            span,
            format!(
                "{rule} produces {} result sequent{}, {} written",
                rule.premises(),
                if rule.premises() == 1 { "" } else { "s" },
                app.claimed.len()
            ),
        ));
    }

    use Formula::*;
    let expected: Vec<Sequent> = match (rule, head) {
        (Rule::Basic, _) => return Ok(Vec::new()),
        (Rule::Ext, _) => return ext_result(goal, &app.claimed[0], span),
        (Rule::AlphaDis, Dis(p, q)) => vec![goal.with_head(vec![(**p).clone(), (**q).clone()])],
        (Rule::AlphaImp, Imp(p, q)) => {
            vec![goal.with_head(vec![Formula::neg((**p).clone()), (**q).clone()])]
        }
        (Rule::BetaCon, Con(p, q)) => {
            vec![goal.with_head(vec![(**p).clone()]), goal.with_head(vec![(**q).clone()])]
        }
        (Rule::GammaExi, Exi(_, body)) => {
            return quantifier_result(goal, body, app, false, false).map(|s| vec![s])
        }
        (Rule::DeltaUni, Uni(_, body)) => {
            return quantifier_result(goal, body, app, false, true).map(|s| vec![s])
        }
        (_, Neg(inner)) => match (rule, inner.as_ref()) {
            (Rule::AlphaCon, Con(p, q)) => vec![goal.with_head(vec![
                Formula::neg((**p).clone()),
                Formula::neg((**q).clone()),
            ])],
            (Rule::BetaImp, Imp(p, q)) => vec![
                goal.with_head(vec![(**p).clone()]),
                goal.with_head(vec![Formula::neg((**q).clone())]),
            ],
            (Rule::BetaDis, Dis(p, q)) => vec![
                goal.with_head(vec![Formula::neg((**p).clone())]),
                goal.with_head(vec![Formula::neg((**q).clone())]),
            ],
            (Rule::NegNeg, Neg(p)) => vec![goal.with_head(vec![(**p).clone()])],
            (Rule::GammaUni, Uni(_, body)) => {
                return quantifier_result(goal, body, app, true, false).map(|s| vec![s])
            }
            (Rule::DeltaExi, Exi(_, body)) => {
                return quantifier_result(goal, body, app, true, true).map(|s| vec![s])
            }
            _ => unreachable!("head checked by matches_head"),
        },
        _ => unreachable!("head checked by matches_head"),
    };

    if app.claimed != expected {
        return Err(mismatch(rule, span, &expected, &app.claimed));
    }
    Ok(expected)
}

fn mismatch(rule: Rule, span: Span, expected: &[Sequent], got: &[Sequent]) -> Diagnostic {
    let mut msg = format!("the result written for {rule} is not what the rule produces");
    if expected.len() == 2 && got.len() == 2 && expected[0] == got[1] && expected[1] == got[0] {
        msg.push_str("; the two branches are in the wrong order");
    } else if let Some(i) = (0..expected.len()).find(|&i| expected[i] != got[i]) {
        if expected.len() == 2 {
            msg.push_str(if i == 0 { " (first branch)" } else { " (second branch)" });
        }
    }
    Diagnostic::error(Code::ResultMismatch, span, msg)
        .with_diff(print_sequents(expected), print_sequents(got))
}

fn print_sequents(s: &[Sequent]) -> String {
    s.iter().map(print_sequent).collect::<Vec<_>>().join("  +  ")
}

fn ext_result(goal: &Sequent, claimed: &Sequent, span: Span) -> Result<Vec<Sequent>, Diagnostic> {
    let offending: Vec<&Formula> = claimed.formulas().iter().filter(|f| !goal.contains(f)).collect();
    if !offending.is_empty() {
        let listed = offending.iter().map(|f| format!("`{}`", print_formula(f))).collect::<Vec<_>>();
        return Err(Diagnostic::error(
            Code::ExtNotSubset,
            span,
            format!("Ext may only reorder, duplicate or drop formulas; not in the goal: {}", listed.join(", ")),
        )
        .with_diff(print_sequent(goal), print_sequent(claimed)));
    }
    Ok(vec![claimed.clone()])
}

/// Outcome of matching a claimed formula against a quantifier body.
#[derive(Debug, Default)]
struct TermMatch {
    candidates: Vec<Term>,
    captured: bool,
}

impl TermMatch {
    fn formula(&mut self, pattern: &Formula, target: &Formula, depth: usize) {
        use Formula::*;
        match (pattern, target) {
            (Pred(p, xs), Pred(q, ys)) if p == q && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.term(x, y, depth);
                }
            }
            (Imp(a, b), Imp(c, d)) | (Dis(a, b), Dis(c, d)) | (Con(a, b), Con(c, d)) => {
                self.formula(a, c, depth);
                self.formula(b, d, depth);
            }
            (Neg(a), Neg(b)) => self.formula(a, b, depth),
            (Uni(_, a), Uni(_, b)) | (Exi(_, a), Exi(_, b)) => self.formula(a, b, depth + 1),
            _ => {}
        }
    }

    fn term(&mut self, pattern: &Term, target: &Term, depth: usize) {
        match (pattern, target) {
            (Term::Var(i), _) if *i == depth => match shift(target, -(depth as isize), 0) {
                Ok(t) => {
                    if !self.candidates.contains(&t) {
                        self.candidates.push(t);
                    }
                }
                Err(_) => self.captured = true,
            },
            (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.term(x, y, depth);
                }
            }
            _ => {}
        }
    }
}

/// Gamma and delta rules: recover the instantiation term from the claimed
/// first formula, then compare the full result.
fn quantifier_result(
    goal: &Sequent,
    body: &Formula,
    app: &RuleApplication,
    negated: bool,
    fresh: bool,
) -> Result<Sequent, Diagnostic> {
    let rule = app.rule;
    let span = app.span;
    let claimed = &app.claimed[0];
    let wrap = |f: Formula| if negated { Formula::neg(f) } else { f };

    let target = claimed.first().map(|f| match (negated, f) {
        (true, Formula::Neg(inner)) => Some(inner.as_ref()),
        (true, _) => None,
        (false, f) => Some(f),
    });
    let mut m = TermMatch::default();
    if let Some(Some(target)) = target {
        m.formula(body, target, 0);
    }

    if m.captured {
        return Err(Diagnostic::error(
            Code::CapturedTerm,
            span,
            format!("{rule}: the term substituted for the quantified variable refers to a variable bound inside the formula"),
        ));
    }
    if m.candidates.len() > 1 {
        let listed = m.candidates.iter().map(|t| format!("`{}`", print_term(t))).collect::<Vec<_>>();
        return Err(Diagnostic::error(
            Code::MatchInconsistent,
            span,
            format!(
                "{rule}: the quantified variable must be replaced by the same term everywhere, found {}",
                listed.join(" and ")
            ),
        ));
    }

    let mentions = body.mentions_outer();
    let witness = match m.candidates.pop() {
        Some(t) => Some(t),
        None if !mentions => Some(Term::constant("_")),
        None => None,
    };
    let shown = witness.clone().unwrap_or_else(|| Term::constant("?"));
    let expected = goal.with_head(vec![wrap(instantiate(body, &shown))]);

    let Some(witness) = witness else {
        return Err(mismatch(rule, span, &[expected], std::slice::from_ref(claimed)));
    };
    if fresh && mentions && !matches!(&witness, Term::App(_, args) if args.is_empty()) {
        return Err(Diagnostic::error(
            Code::ResultMismatch,
            span,
            format!("{rule}: the witness must be a new constant, found `{}`", print_term(&witness)),
        )
        .with_diff(print_sequent(&expected), print_sequent(claimed)));
    }
    if &expected != claimed {
        return Err(mismatch(rule, span, &[expected], std::slice::from_ref(claimed)));
    }
    if fresh && mentions {
        let Term::App(name, _) = &witness else { unreachable!() };
        if constants_of(goal.formulas()).has_function_named(name) {
            return Err(Diagnostic::error(
                Code::FreshnessViolation,
                span,
                format!("{rule}: `{name}` already occurs in the goal; choose a constant that does not"),
            ));
        }
    }
    Ok(expected)
}

/// Result of folding a script through [`validate_step`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub verdict: Verdict,
    /// State after the last valid step.
    pub state: ProofState,
    pub beta_steps: usize,
    /// Number of Beta splits above each closed branch.
    pub closed_depths: Vec<usize>,
}

impl Trace {
    /// Share of the proof tree that is closed: every Beta split halves a
    /// branch's share. Unlike a count of closed branches this never drops
    /// when a valid step is added, and it is 1 exactly when complete.
    pub fn closed_share(&self) -> f64 {
        self.closed_depths.iter().map(|&d| 0.5f64.powi(d.min(1024) as i32)).sum()
    }
}

/// Checks `steps` from the single goal `[goal]`, stopping at the first error.
pub fn check_script(goal: &Formula, steps: &[RuleApplication]) -> Verdict {
    run_script(goal, steps).verdict
}

pub fn run_script(goal: &Formula, steps: &[RuleApplication]) -> Trace {
    let mut state = ProofState::new(goal.clone());
    let mut beta_steps = 0;
    let mut depth_of: HashMap<usize, usize> = HashMap::from([(0, 0)]);
    let mut closed_depths = Vec::new();
    for (i, step) in steps.iter().enumerate() {
        let focus = state.open_goals.front().map(|g| g.branch_id);
        match validate_step(&state, step) {
            Ok(next) => {
                let focus = focus.expect("a valid step has a goal");
                let depth = depth_of[&focus];
                if step.rule.is_beta() {
                    beta_steps += 1;
                    depth_of.remove(&focus);
                    for id in state.next_branch_id..next.next_branch_id {
                        depth_of.insert(id, depth + 1);
                    }
                } else if next.closed > state.closed {
                    closed_depths.push(depth);
                }
                state = next;
            }
            Err(diagnostics) => {
                let verdict = Verdict::Invalid { step_index: i, diagnostics };
                return Trace { verdict, state, beta_steps, closed_depths };
            }
        }
    }
    let verdict = if state.is_complete() {
        Verdict::Complete
    } else {
        Verdict::Incomplete(state.open_sequents())
    };
    Trace { verdict, state, beta_steps, closed_depths }
}
