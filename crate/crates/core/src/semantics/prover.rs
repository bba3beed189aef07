//! Bounded tableau prover that emits checkable `.sqc` scripts.
//!
//! Each branch is expanded in a fixed priority: close with `Basic` if a
//! complementary pair exists, then alpha, double-negation and delta rules,
//! then beta rules, then gamma rules. Gamma formulas stay on the branch
//! (duplicated with `Ext`) and are instantiated round-robin with terms from
//! the branch's Herbrand universe. The search is repeated with term nesting
//! bounds `0..=gamma_depth`; a step budget caps each attempt.
//!
//! Delta witnesses are counted like Skolem terms: a witness for a formula
//! that mentions instantiated terms is one level deeper than the deepest of
//! them. That keeps every bounded attempt finite.
//!
//! Failing to find a proof does not mean the formula is invalid.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::Limits;
use crate::calculus::{Rule, RuleApplication, Sequent};
use crate::script::ProofScript;
use crate::syntax::{constants_of, instantiate, Formula, Symbol, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaveUp {
    /// Every branch attempt saturated without closing at the largest bound.
    NoProofWithinBounds { gamma_depth: usize },
    /// Some attempt ran out of steps.
    StepLimit { max_steps: usize },
    Cancelled,
    NotClosed,
}

impl fmt::Display for GaveUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaveUp::NoProofWithinBounds { gamma_depth } => {
                write!(f, "no-proof-within-bounds (gamma depth {gamma_depth} exhausted)")
            }
            GaveUp::StepLimit { max_steps } => write!(f, "max-steps exhausted ({max_steps} steps)"),
            GaveUp::Cancelled => f.write_str("cancelled"),
            GaveUp::NotClosed => f.write_str("the formula has free variables"),
        }
    }
}

pub fn prove_bounded(goal: &Formula, limits: &Limits) -> Result<ProofScript, GaveUp> {
    if !goal.is_closed() {
        return Err(GaveUp::NotClosed);
    }
    let mut hit_budget = false;
    for depth in 0..=limits.gamma_depth {
        let mut search = Search::new(goal, limits, depth);
        match search.branch(vec![goal.clone()], HashMap::new()) {
            Ok(()) => return Ok(ProofScript::new(goal.clone(), search.steps)),
            Err(Stop::Saturated) => {}
            Err(Stop::Budget) => hit_budget = true,
            Err(Stop::Cancelled) => return Err(GaveUp::Cancelled),
        }
    }
    Err(if hit_budget {
        GaveUp::StepLimit { max_steps: limits.max_steps }
    } else {
        GaveUp::NoProofWithinBounds { gamma_depth: limits.gamma_depth }
    })
}

enum Stop {
    Saturated,
    Budget,
    Cancelled,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Priority {
    Linear,
    Branching,
    Instantiation,
}

fn classify(f: &Formula) -> Option<(Priority, Rule)> {
    use Formula::*;
    Some(match f {
        Dis(..) => (Priority::Linear, Rule::AlphaDis),
        Imp(..) => (Priority::Linear, Rule::AlphaImp),
        Uni(..) => (Priority::Linear, Rule::DeltaUni),
        Con(..) => (Priority::Branching, Rule::BetaCon),
        Exi(..) => (Priority::Instantiation, Rule::GammaExi),
        Neg(inner) => match inner.as_ref() {
            Con(..) => (Priority::Linear, Rule::AlphaCon),
            Neg(..) => (Priority::Linear, Rule::NegNeg),
            Exi(..) => (Priority::Linear, Rule::DeltaExi),
            Imp(..) => (Priority::Branching, Rule::BetaImp),
            Dis(..) => (Priority::Branching, Rule::BetaDis),
            Uni(..) => (Priority::Instantiation, Rule::GammaUni),
            Pred(..) => return None,
        },
        Pred(..) => return None,
    })
}

/// Terms already used to instantiate each gamma formula on a branch.
type Used = HashMap<Formula, HashSet<Term>>;

struct Search<'a> {
    limits: &'a Limits,
    depth: usize,
    steps: Vec<RuleApplication>,
    /// Function symbols of the goal, which every branch may use.
    base: BTreeSet<Symbol>,
    /// Names never to hand out as fresh constants.
    taken: HashSet<String>,
    fresh_counter: usize,
    /// Stand-in constant for goals without any.
    filler: Option<String>,
    /// Closed terms written in the goal itself.
    goal_terms: HashSet<Term>,
    /// Skolem depth of each delta witness.
    witness_depth: HashMap<String, usize>,
}

impl<'a> Search<'a> {
    fn new(goal: &Formula, limits: &'a Limits, depth: usize) -> Self {
        let sig = constants_of([goal]);
        let taken: HashSet<String> = sig.functions.iter().map(|s| s.name.clone()).collect();
        let needs_filler = !sig.functions.iter().any(|s| s.arity == 0);
        let mut search = Search {
            limits,
            depth,
            steps: Vec::new(),
            base: sig.functions,
            taken,
            fresh_counter: 0,
            filler: None,
            goal_terms: HashSet::new(),
            witness_depth: HashMap::new(),
        };
        each_term(goal, &mut |t| {
            if t.is_closed() {
                search.goal_terms.insert(t.clone());
            }
        });
        if needs_filler {
            search.filler = Some(search.fresh_name());
        }
        search
    }

    fn fresh_name(&mut self) -> String {
        loop {
            self.fresh_counter += 1;
            let name = format!("c{}", self.fresh_counter);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    fn emit(&mut self, rule: Rule, claimed: Vec<Vec<Formula>>) -> Result<(), Stop> {
        if self.limits.cancel.is_cancelled() {
            return Err(Stop::Cancelled);
        }
        if self.steps.len() >= self.limits.max_steps {
            return Err(Stop::Budget);
        }
        self.steps.push(RuleApplication::new(rule, claimed.into_iter().map(Sequent::new).collect()));
        Ok(())
    }

    /// Moves `seq[idx]` to the front, dropping duplicates, with an `Ext` step
    /// when that changes anything.
    fn focus(&mut self, seq: Vec<Formula>, idx: usize) -> Result<Vec<Formula>, Stop> {
        let mut out = vec![seq[idx].clone()];
        for f in &seq {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        if out != seq {
            self.emit(Rule::Ext, vec![out.clone()])?;
        }
        Ok(out)
    }

    fn branch(&mut self, mut seq: Vec<Formula>, mut used: Used) -> Result<(), Stop> {
        loop {
            if let Some(phi) = complementary(&seq) {
                let neg = Formula::neg(phi.clone());
                self.emit(Rule::Ext, vec![vec![phi, neg]])?;
                return self.emit(Rule::Basic, Vec::new());
            }

            let pick = |p: Priority| seq.iter().position(|f| classify(f).is_some_and(|(q, _)| q == p));
            if let Some(idx) = pick(Priority::Linear) {
                seq = self.focus(seq, idx)?;
                let (_, rule) = classify(&seq[0]).expect("classified above");
                let head = self.linear_result(rule, &seq[0]);
                let next: Vec<Formula> = head.into_iter().chain(seq[1..].iter().cloned()).collect();
                self.emit(rule, vec![next.clone()])?;
                seq = next;
                continue;
            }

            if let Some(idx) = pick(Priority::Branching) {
                seq = self.focus(seq, idx)?;
                let (_, rule) = classify(&seq[0]).expect("classified above");
                let (l, r) = beta_parts(&seq[0]);
                let rest = &seq[1..];
                let left: Vec<Formula> = std::iter::once(l).chain(rest.iter().cloned()).collect();
                let right: Vec<Formula> = std::iter::once(r).chain(rest.iter().cloned()).collect();
                self.emit(rule, vec![left.clone(), right.clone()])?;
                self.branch(left, used.clone())?;
                return self.branch(right, used);
            }

            let Some((idx, term)) = self.next_instance(&seq, &used) else {
                return Err(Stop::Saturated);
            };
            let gamma = seq[idx].clone();
            let instance = gamma_instance(&gamma, &term);
            used.entry(gamma.clone()).or_default().insert(term);
            if seq.contains(&instance) {
                continue;
            }
            let mut rest: Vec<Formula> = Vec::new();
            for (i, f) in seq.iter().enumerate() {
                if i != idx && !rest.contains(f) && *f != gamma {
                    rest.push(f.clone());
                }
            }
            let dup: Vec<Formula> =
                std::iter::once(gamma.clone()).chain(rest.iter().cloned()).chain(std::iter::once(gamma.clone())).collect();
            self.emit(Rule::Ext, vec![dup])?;
            let rule = classify(&gamma).expect("gamma formula").1;
            let next: Vec<Formula> =
                std::iter::once(instance).chain(rest).chain(std::iter::once(gamma)).collect();
            self.emit(rule, vec![next.clone()])?;
            seq = next;
        }
    }

    fn linear_result(&mut self, rule: Rule, head: &Formula) -> Vec<Formula> {
        use Formula::*;
        match (rule, head) {
            (Rule::AlphaDis, Dis(p, q)) => vec![(**p).clone(), (**q).clone()],
            (Rule::AlphaImp, Imp(p, q)) => vec![Formula::neg((**p).clone()), (**q).clone()],
            (Rule::DeltaUni, Uni(_, body)) => {
                let c = self.witness(head);
                vec![instantiate(body, &c)]
            }
            (_, Neg(inner)) => match (rule, inner.as_ref()) {
                (Rule::AlphaCon, Con(p, q)) => vec![Formula::neg((**p).clone()), Formula::neg((**q).clone())],
                (Rule::NegNeg, Neg(p)) => vec![(**p).clone()],
                (Rule::DeltaExi, Exi(_, body)) => {
                    let c = self.witness(head);
                    vec![Formula::neg(instantiate(body, &c))]
                }
                _ => unreachable!("not a linear rule"),
            },
            _ => unreachable!("not a linear rule"),
        }
    }

    fn witness(&mut self, delta: &Formula) -> Term {
        let mut depth = 0;
        each_term(delta, &mut |t| {
            if let Some(w) = self.weight(t) {
                depth = depth.max(w + 1);
            }
        });
        let name = self.fresh_name();
        self.witness_depth.insert(name.clone(), depth);
        Term::constant(name)
    }

    /// How deep `t` is in terms not written in the goal; `None` if it
    /// mentions none.
    fn weight(&self, t: &Term) -> Option<usize> {
        if self.goal_terms.contains(t) {
            return None;
        }
        match t {
            Term::Var(_) => None,
            Term::App(name, args) if args.is_empty() => Some(self.witness_depth.get(name).copied().unwrap_or(0)),
            Term::App(_, args) => args.iter().filter_map(|a| self.weight(a)).max().map(|m| m + 1),
        }
    }

    fn depth_of(&self, t: &Term) -> usize {
        match t {
            Term::Var(_) => 0,
            Term::App(name, args) if args.is_empty() => self.witness_depth.get(name).copied().unwrap_or(0),
            Term::App(_, args) => 1 + args.iter().map(|a| self.depth_of(a)).max().unwrap_or(0),
        }
    }

    /// The gamma formula with the fewest instances so far that still has an
    /// unused term, and that term.
    fn next_instance(&self, seq: &[Formula], used: &Used) -> Option<(usize, Term)> {
        let universe = self.universe(seq);
        let mut best: Option<(usize, usize, Term)> = None;
        for (idx, f) in seq.iter().enumerate() {
            if !matches!(classify(f), Some((Priority::Instantiation, _))) {
                continue;
            }
            let done = used.get(f);
            let count = done.map_or(0, HashSet::len);
            if best.as_ref().is_some_and(|(c, ..)| *c <= count) {
                continue;
            }
            if let Some(t) = universe.iter().find(|t| !done.is_some_and(|d| d.contains(*t))) {
                best = Some((count, idx, t.clone()));
            }
        }
        best.map(|(_, idx, t)| (idx, t))
    }

    /// Closed terms over the branch's function symbols, nested at most
    /// `depth` deep, in order of nesting then symbol.
    fn universe(&self, seq: &[Formula]) -> Vec<Term> {
        let mut symbols = self.base.clone();
        symbols.extend(constants_of(seq).functions);
        let mut terms: Vec<Term> = symbols
            .iter()
            .filter(|s| s.arity == 0)
            .map(|s| Term::constant(s.name.clone()))
            .filter(|t| self.depth_of(t) <= self.depth)
            .collect();
        if terms.is_empty() {
            let filler = self.filler.clone().expect("goals without constants get a filler");
            terms.push(Term::constant(filler));
        }
        let cap = self.limits.max_steps.max(1);
        let mut previous = terms.clone();
        for _ in 0..self.depth {
            let mut layer = Vec::new();
            for f in symbols.iter().filter(|s| s.arity > 0) {
                for args in tuples(&terms, f.arity) {
                    if args.iter().any(|a| previous.contains(a)) {
                        let t = Term::app(f.name.clone(), args);
                        if self.depth_of(&t) <= self.depth {
                            layer.push(t);
                        }
                    }
                    if terms.len() + layer.len() >= cap {
                        break;
                    }
                }
            }
            if layer.is_empty() {
                break;
            }
            terms.extend(layer.iter().cloned());
            previous = layer;
            if terms.len() >= cap {
                break;
            }
        }
        terms
    }
}

/// Calls `f` on every term and subterm of `formula`.
fn each_term(formula: &Formula, f: &mut impl FnMut(&Term)) {
    fn walk(t: &Term, f: &mut impl FnMut(&Term)) {
        f(t);
        if let Term::App(_, args) = t {
            args.iter().for_each(|a| walk(a, f));
        }
    }
    match formula {
        Formula::Pred(_, args) => args.iter().for_each(|a| walk(a, f)),
        Formula::Imp(a, b) | Formula::Dis(a, b) | Formula::Con(a, b) => {
            each_term(a, f);
            each_term(b, f);
        }
        Formula::Neg(a) | Formula::Uni(_, a) | Formula::Exi(_, a) => each_term(a, f),
    }
}

fn tuples(terms: &[Term], arity: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                terms.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn complementary(seq: &[Formula]) -> Option<Formula> {
    seq.iter().find(|f| seq.contains(&Formula::neg((*f).clone()))).cloned()
}

fn beta_parts(f: &Formula) -> (Formula, Formula) {
    use Formula::*;
    match f {
        Con(p, q) => ((**p).clone(), (**q).clone()),
        Neg(inner) => match inner.as_ref() {
            Imp(p, q) => ((**p).clone(), Formula::neg((**q).clone())),
            Dis(p, q) => (Formula::neg((**p).clone()), Formula::neg((**q).clone())),
            _ => unreachable!("not a beta formula"),
        },
        _ => unreachable!("not a beta formula"),
    }
}

fn gamma_instance(f: &Formula, t: &Term) -> Formula {
    match f {
        Formula::Exi(_, body) => instantiate(body, t),
        Formula::Neg(inner) => match inner.as_ref() {
            Formula::Uni(_, body) => Formula::neg(instantiate(body, t)),
            _ => unreachable!("not a gamma formula"),
        },
        _ => unreachable!("not a gamma formula"),
    }
}
