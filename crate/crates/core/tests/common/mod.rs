//! Shared fixtures, generators and a reference evaluator for the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};
use std::path::PathBuf;

use rand::{Rng, RngCore};
use sqc_core::calculus::{validate_step, Goal, ProofState, RuleApplication, Sequent};
use sqc_core::{parse_formula, Code, Formula, Interpretation, Rule, Symbol, Term};

pub fn fixture(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(path)
}

/// Non-empty, non-comment lines of a corpus file.
pub fn corpus(name: &str) -> Vec<String> {
    std::fs::read_to_string(fixture(name))
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|d| panic!("{s}: {d:?}"))
}

// Random syntax over a fixed signature, so arities always agree.
pub const PROPS: [&str; 2] = ["p", "q"];
pub const UNARY: [&str; 2] = ["u", "v"];
pub const BINARY: &str = "r";
pub const CONSTS: [&str; 2] = ["a", "b"];

pub fn signature_symbols() -> (Vec<Symbol>, Vec<Symbol>) {
    let functions = vec![Symbol::new("a", 0), Symbol::new("b", 0), Symbol::new("f", 1), Symbol::new("g", 2)];
    let mut preds: Vec<Symbol> = PROPS.iter().map(|p| Symbol::new(*p, 0)).collect();
    preds.extend(UNARY.iter().map(|p| Symbol::new(*p, 1)));
    preds.push(Symbol::new(BINARY, 2));
    (functions, preds)
}

/// A term whose variables are all below `bound`.
pub fn gen_term(rng: &mut impl RngCore, bound: usize, depth: usize) -> Term {
    let choice = rng.random_range(0..if depth == 0 { 2 } else { 4 });
    match choice {
        0 if bound > 0 => Term::Var(rng.random_range(0..bound)),
        0 | 1 => Term::constant(CONSTS[rng.random_range(0..2)]),
        2 => Term::app("f", vec![gen_term(rng, bound, depth - 1)]),
        _ => Term::app("g", vec![gen_term(rng, bound, depth - 1), gen_term(rng, bound, depth - 1)]),
    }
}

/// A formula whose free variables are all below `bound`.
pub fn gen_formula(rng: &mut impl RngCore, bound: usize, size: usize) -> Formula {
    if size == 0 {
        return match rng.random_range(0..3) {
            0 => Formula::atom(PROPS[rng.random_range(0..2)]),
            1 => Formula::pred(UNARY[rng.random_range(0..2)], vec![gen_term(rng, bound, 1)]),
            _ => Formula::pred(BINARY, vec![gen_term(rng, bound, 1), gen_term(rng, bound, 1)]),
        };
    }
    let s = size - 1;
    match rng.random_range(0..7) {
        0 => Formula::neg(gen_formula(rng, bound, s)),
        1 => Formula::imp(gen_formula(rng, bound, s / 2), gen_formula(rng, bound, s - s / 2)),
        2 => Formula::dis(gen_formula(rng, bound, s / 2), gen_formula(rng, bound, s - s / 2)),
        3 => Formula::con(gen_formula(rng, bound, s / 2), gen_formula(rng, bound, s - s / 2)),
        4 => Formula::uni(gen_formula(rng, bound + 1, s)),
        5 => Formula::exi(gen_formula(rng, bound + 1, s)),
        _ => gen_formula(rng, bound, 0),
    }
}

/// A random interpretation covering the fixed signature.
pub fn gen_interpretation(rng: &mut impl RngCore, domain_size: usize) -> Interpretation {
    let (functions, preds) = signature_symbols();
    let mut i = Interpretation::new(domain_size);
    for s in functions {
        let table = (0..domain_size.pow(s.arity as u32)).map(|_| rng.random_range(0..domain_size)).collect();
        i.functions.insert(s, table);
    }
    for s in preds {
        let table = (0..domain_size.pow(s.arity as u32)).map(|_| rng.random_bool(0.5)).collect();
        i.predicates.insert(s, table);
    }
    i
}

/// Straightforward evaluator used as an oracle: looks tables up by
/// explicit tuple encoding and handles quantifiers by prepending to a
/// cons-style environment (index 0 first).
pub struct Reference<'a> {
    pub domain: usize,
    pub functions: BTreeMap<(&'a str, usize), &'a [usize]>,
    pub predicates: BTreeMap<(&'a str, usize), &'a [bool]>,
}

impl<'a> Reference<'a> {
    pub fn new(i: &'a Interpretation) -> Self {
        Reference {
            domain: i.domain_size,
            functions: i.functions.iter().map(|(s, t)| ((s.name.as_str(), s.arity), t.as_slice())).collect(),
            predicates: i.predicates.iter().map(|(s, t)| ((s.name.as_str(), s.arity), t.as_slice())).collect(),
        }
    }

    fn index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, a| acc * self.domain + a)
    }

    pub fn term(&self, t: &Term, env: &VecDeque<usize>) -> usize {
        match t {
            Term::Var(i) => env[*i],
            Term::App(name, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect();
                self.functions[&(name.as_str(), args.len())][self.index(&vals)]
            }
        }
    }

    pub fn formula(&self, f: &Formula, env: &mut VecDeque<usize>) -> bool {
        match f {
            Formula::Pred(name, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect();
                self.predicates[&(name.as_str(), args.len())][self.index(&vals)]
            }
            Formula::Imp(a, b) => !self.formula(a, env) || self.formula(b, env),
            Formula::Dis(a, b) => self.formula(a, env) || self.formula(b, env),
            Formula::Con(a, b) => self.formula(a, env) && self.formula(b, env),
            Formula::Neg(a) => !self.formula(a, env),
            Formula::Uni(_, body) | Formula::Exi(_, body) => {
                let universal = matches!(f, Formula::Uni(..));
                for d in 0..self.domain {
                    env.push_front(d);
                    let v = self.formula(body, env);
                    env.pop_front();
                    if v != universal {
                        return !universal;
                    }
                }
                universal
            }
        }
    }
}

/// The library's environment convention: last element is variable 0.
pub fn library_env(env_front_first: &VecDeque<usize>) -> Vec<usize> {
    env_front_first.iter().rev().copied().collect()
}

pub fn random_env(rng: &mut impl RngCore, len: usize, domain: usize) -> VecDeque<usize> {
    (0..len).map(|_| rng.random_range(0..domain)).collect()
}

/// One row of the rule table: a goal, a step and what should happen.
pub struct RuleCase {
    pub rule: Rule,
    pub goal: &'static [&'static str],
    pub claimed: &'static [&'static [&'static str]],
    pub expect: Option<Code>,
}

const fn case(
    rule: Rule,
    goal: &'static [&'static str],
    claimed: &'static [&'static [&'static str]],
    expect: Option<Code>,
) -> RuleCase {
    RuleCase { rule, goal, claimed, expect }
}

use Code::*;
use Rule::*;

/// Every rule with a success case and each error it can report.
pub const RULE_TABLE: &[RuleCase] = &[
    case(Basic, &["p", "~p"], &[], None),
    case(Basic, &["~p", "p"], &[], Some(BasicNoMatch)),
    case(Basic, &["p", "q", "~p"], &[&["p"]], Some(WrongBranchCount)),
    case(AlphaDis, &["p | q", "r"], &[&["p", "q", "r"]], None),
    case(AlphaDis, &["p & q"], &[&["p", "q"]], Some(NotApplicable)),
    case(AlphaDis, &["p | q"], &[&["q", "p"]], Some(ResultMismatch)),
    case(AlphaDis, &["p | q"], &[&["p", "q"], &["p", "q"]], Some(WrongBranchCount)),
    case(AlphaImp, &["p -> q"], &[&["~p", "q"]], None),
    case(AlphaImp, &["p | q"], &[&["~p", "q"]], Some(NotApplicable)),
    case(AlphaImp, &["p -> q"], &[&["p", "q"]], Some(ResultMismatch)),
    case(AlphaImp, &["p -> q"], &[], Some(WrongBranchCount)),
    case(AlphaCon, &["~(p & q)", "r"], &[&["~p", "~q", "r"]], None),
    case(AlphaCon, &["p & q"], &[&["~p", "~q"]], Some(NotApplicable)),
    case(AlphaCon, &["~(p & q)"], &[&["~p"]], Some(ResultMismatch)),
    case(AlphaCon, &["~(p & q)"], &[&["~p"], &["~q"]], Some(WrongBranchCount)),
    case(BetaCon, &["p & q", "r"], &[&["p", "r"], &["q", "r"]], None),
    case(BetaCon, &["p | q"], &[&["p"], &["q"]], Some(NotApplicable)),
    case(BetaCon, &["p & q", "r"], &[&["q", "r"], &["p", "r"]], Some(ResultMismatch)),
    case(BetaCon, &["p & q"], &[&["p", "q"]], Some(WrongBranchCount)),
    case(BetaImp, &["~(p -> q)", "r"], &[&["p", "r"], &["~q", "r"]], None),
    case(BetaImp, &["p -> q"], &[&["p"], &["~q"]], Some(NotApplicable)),
    case(BetaImp, &["~(p -> q)"], &[&["~p"], &["~q"]], Some(ResultMismatch)),
    case(BetaImp, &["~(p -> q)"], &[&["p", "~q"]], Some(WrongBranchCount)),
    case(BetaDis, &["~(p | q)"], &[&["~p"], &["~q"]], None),
    case(BetaDis, &["~(p & q)"], &[&["~p"], &["~q"]], Some(NotApplicable)),
    case(BetaDis, &["~(p | q)"], &[&["~p"], &["q"]], Some(ResultMismatch)),
    case(BetaDis, &["~(p | q)"], &[&["~p", "~q"]], Some(WrongBranchCount)),
    case(GammaExi, &["exists x. u(x)", "q"], &[&["u(f(a))", "q"]], None),
    case(GammaExi, &["forall x. u(x)"], &[&["u(a)"]], Some(NotApplicable)),
    case(GammaExi, &["exists x. u(x)"], &[&["v(a)"]], Some(ResultMismatch)),
    case(GammaExi, &["exists x. r(x, x)"], &[&["r(a, b)"]], Some(MatchInconsistent)),
    case(GammaExi, &["exists x. forall y. r(x, y)"], &[&["forall y. r(y, y)"]], Some(CapturedTerm)),
    case(GammaExi, &["exists x. u(x)"], &[&["u(a)"], &["u(a)"]], Some(WrongBranchCount)),
    case(GammaUni, &["~(forall x. u(x))", "q"], &[&["~u(a)", "q"]], None),
    case(GammaUni, &["forall x. u(x)"], &[&["~u(a)"]], Some(NotApplicable)),
    case(GammaUni, &["~(forall x. u(x))"], &[&["u(a)"]], Some(ResultMismatch)),
    case(GammaUni, &["~(forall x. r(x, x))"], &[&["~r(a, b)"]], Some(MatchInconsistent)),
    case(GammaUni, &["~(forall x. exists y. r(x, y))"], &[&["~(exists y. r(y, y))"]], Some(CapturedTerm)),
    case(GammaUni, &["~(forall x. u(x))"], &[], Some(WrongBranchCount)),
    case(DeltaUni, &["forall x. u(x)", "q"], &[&["u(c)", "q"]], None),
    case(DeltaUni, &["exists x. u(x)"], &[&["u(c)"]], Some(NotApplicable)),
    case(DeltaUni, &["forall x. u(x)"], &[&["u(f(c))"]], Some(ResultMismatch)),
    case(DeltaUni, &["forall x. r(x, x)"], &[&["r(c, d)"]], Some(MatchInconsistent)),
    case(DeltaUni, &["forall x. exists y. r(x, y)"], &[&["exists y. r(y, y)"]], Some(CapturedTerm)),
    case(DeltaUni, &["forall x. u(x)", "v(a)"], &[&["u(a)", "v(a)"]], Some(FreshnessViolation)),
    case(DeltaUni, &["forall x. u(x)"], &[&["u(c)"], &["u(d)"]], Some(WrongBranchCount)),
    case(DeltaExi, &["~(exists x. u(x))"], &[&["~u(c)"]], None),
    case(DeltaExi, &["exists x. u(x)"], &[&["~u(c)"]], Some(NotApplicable)),
    case(DeltaExi, &["~(exists x. u(x))"], &[&["u(c)"]], Some(ResultMismatch)),
    case(DeltaExi, &["~(exists x. r(x, x))"], &[&["~r(c, d)"]], Some(MatchInconsistent)),
    case(DeltaExi, &["~(exists x. forall y. r(x, y))"], &[&["~(forall y. r(y, y))"]], Some(CapturedTerm)),
    case(DeltaExi, &["~(exists x. u(x))", "u(a)"], &[&["~u(a)", "u(a)"]], Some(FreshnessViolation)),
    case(DeltaExi, &["~(exists x. u(x))"], &[], Some(WrongBranchCount)),
    case(NegNeg, &["~~p", "q"], &[&["p", "q"]], None),
    case(NegNeg, &["~p"], &[&["p"]], Some(NotApplicable)),
    case(NegNeg, &["~~p", "q"], &[&["~p", "q"]], Some(ResultMismatch)),
    case(NegNeg, &["~~p"], &[&["p"], &["p"]], Some(WrongBranchCount)),
    case(Ext, &["p", "q", "r"], &[&["r", "p", "r"]], None),
    case(Ext, &["p", "q"], &[&["p", "s"]], Some(ExtNotSubset)),
    case(Ext, &["p"], &[&["p"], &["p"]], Some(WrongBranchCount)),
];

fn sequent(items: &[&str]) -> Sequent {
    Sequent::new(items.iter().map(|s| f(s)).collect())
}

/// Runs one table row; `Err` describes a disagreement.
pub fn run_case(c: &RuleCase) -> Result<(), String> {
    let state = ProofState {
        open_goals: VecDeque::from([Goal { branch_id: 0, sequent: sequent(c.goal) }]),
        next_branch_id: 1,
        steps_consumed: 0,
        closed: 0,
    };
    let app = RuleApplication::new(c.rule, c.claimed.iter().map(|s| sequent(s)).collect());
    let got = validate_step(&state, &app).map(|_| ()).map_err(|ds| ds[0].code);
    let label = format!("{} on [{}]", c.rule, c.goal.join(", "));
    match (c.expect, got) {
        (None, Ok(())) => Ok(()),
        (Some(want), Err(code)) if want == code => Ok(()),
        (want, got) => Err(format!("{label}: expected {want:?}, got {got:?}")),
    }
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

pub fn coin(rng: &mut impl RngCore) -> bool {
    rng.random_bool(0.5)
}
