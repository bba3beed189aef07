//! Finite-model semantics: evaluation, bounded countermodel search and a
//! bounded prover used as a test oracle.

mod models;
mod prover;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Formula, Symbol, Term};

pub use models::{check_validity, enumeration_count, Validity, ValidityError};
pub use prover::{prove_bounded, GaveUp};

/// Domain elements are `0..domain_size`. Function tables are indexed by the
/// argument tuple read as a base-`domain_size` number, first argument most
/// significant; predicate tables likewise hold one truth value per tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub domain_size: usize,
    pub functions: BTreeMap<Symbol, Vec<usize>>,
    pub predicates: BTreeMap<Symbol, Vec<bool>>,
}

impl Interpretation {
    pub fn new(domain_size: usize) -> Self {
        Interpretation { domain_size, functions: BTreeMap::new(), predicates: BTreeMap::new() }
    }

    /// Builder: a predicate holding exactly on `tuples`.
    pub fn with_relation(mut self, name: &str, arity: usize, tuples: &[&[usize]]) -> Self {
        let mut table = vec![false; self.domain_size.pow(arity as u32)];
        for t in tuples {
            table[tuple_index(t, self.domain_size)] = true;
        }
        self.predicates.insert(Symbol::new(name, arity), table);
        self
    }

    /// Builder: a function given by its full table.
    pub fn with_function(mut self, name: &str, arity: usize, table: Vec<usize>) -> Self {
        assert_eq!(table.len(), self.domain_size.pow(arity as u32), "function table must be total");
        self.functions.insert(Symbol::new(name, arity), table);
        self
    }

    /// The tuples on which predicate `sym` holds, in lexicographic order.
    pub fn relation(&self, sym: &Symbol) -> Option<BTreeSet<Vec<usize>>> {
        let table = self.predicates.get(sym)?;
        Some(
            table
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| index_tuple(i, sym.arity, self.domain_size))
                .collect(),
        )
    }

    pub fn eval_term(&self, t: &Term, env: &[usize]) -> Result<usize, EvalError> {
        match t {
            Term::Var(k) => env
                .len()
                .checked_sub(k + 1)
                .map(|i| env[i])
                .ok_or(EvalError::UnboundVariable(*k)),
            Term::App(f, args) => {
                let sym = Symbol::new(f.clone(), args.len());
                let table = self.functions.get(&sym).ok_or_else(|| EvalError::UncoveredSymbol(sym.clone()))?;
                let vals = args.iter().map(|a| self.eval_term(a, env)).collect::<Result<Vec<_>, _>>()?;
                Ok(table[tuple_index(&vals, self.domain_size)])
            }
        }
    }
}

pub(crate) fn tuple_index(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * n + x)
}

pub(crate) fn index_tuple(mut i: usize, arity: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = i % n;
        i /= n;
    }
    t
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let elems: Vec<String> = (0..self.domain_size).map(|e| e.to_string()).collect();
        writeln!(f, "domain = {{{}}}", elems.join(", "))?;
        let tuple = |t: &[usize]| {
            let s: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            if t.len() == 1 { s[0].clone() } else { format!("({})", s.join(", ")) }
        };
        for (sym, table) in &self.functions {
            if sym.arity == 0 {
                writeln!(f, "{} = {}", sym.name, table[0])?;
            } else {
                let entries: Vec<String> = table
                    .iter()
                    .enumerate()
                    .map(|(i, v)| format!("{} -> {v}", tuple(&index_tuple(i, sym.arity, self.domain_size))))
                    .collect();
                writeln!(f, "{} = {{{}}}", sym.name, entries.join(", "))?;
            }
        }
        for sym in self.predicates.keys() {
            if sym.arity == 0 {
                writeln!(f, "{} = {}", sym.name, self.predicates[sym][0])?;
            } else {
                let rel = self.relation(sym).unwrap_or_default();
                let entries: Vec<String> = rel.iter().map(|t| tuple(t)).collect();
                writeln!(f, "{} = {{{}}}", sym.name, entries.join(", "))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol {0} has no interpretation")]
    UncoveredSymbol(Symbol),
    #[error("bound variable {0} has no value")]
    UnboundVariable(usize),
}

/// Classical satisfaction. `env` is a stack whose last element is the value
/// of bound variable 0.
pub fn eval(f: &Formula, i: &Interpretation, env: &[usize]) -> Result<bool, EvalError> {
    let mut env = env.to_vec();
    eval_in(f, i, &mut env)
}

fn eval_in(f: &Formula, i: &Interpretation, env: &mut Vec<usize>) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Pred(p, args) => {
            let sym = Symbol::new(p.clone(), args.len());
            let vals = args.iter().map(|a| i.eval_term(a, env)).collect::<Result<Vec<_>, _>>()?;
            let table = i.predicates.get(&sym).ok_or(EvalError::UncoveredSymbol(sym))?;
            table[tuple_index(&vals, i.domain_size)]
        }
        Formula::Imp(a, b) => !eval_in(a, i, env)? || eval_in(b, i, env)?,
        Formula::Dis(a, b) => eval_in(a, i, env)? || eval_in(b, i, env)?,
        Formula::Con(a, b) => eval_in(a, i, env)? && eval_in(b, i, env)?,
        Formula::Neg(a) => !eval_in(a, i, env)?,
        Formula::Uni(_, body) | Formula::Exi(_, body) => {
            let universal = matches!(f, Formula::Uni(..));
            for d in 0..i.domain_size {
                env.push(d);
                let v = eval_in(body, i, env);
                env.pop();
                if v? != universal {
                    return Ok(!universal);
                }
            }
            universal
        }
    })
}

/// Cooperative cancellation flag shared between a caller and a long search.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// Bounds for countermodel search and proof search.
#[derive(Clone, Debug)]
pub struct Limits {
    pub max_domain: usize,
    /// Maximum nesting of function applications in gamma instances.
    pub gamma_depth: usize,
    pub max_steps: usize,
    /// Refuse countermodel searches that would visit more interpretations.
    pub enumeration_ceiling: u128,
    pub cancel: CancelToken,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_domain: 2,
            gamma_depth: 1,
            max_steps: 500,
            enumeration_ceiling: 10_000_000,
            cancel: CancelToken::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid limits: {0}")]
pub struct LimitsError(pub &'static str);

impl Limits {
    pub fn validate(&self) -> Result<(), LimitsError> {
        if self.max_domain == 0 {
            return Err(LimitsError("max_domain must be at least 1"));
        }
        if self.gamma_depth == 0 {
            return Err(LimitsError("gamma_depth must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        let swap = f("exists x. forall y. r(x, y)");
        let one = Interpretation::new(1).with_relation("r", 2, &[&[0, 0]]);
        assert!(eval(&swap, &one, &[]).unwrap());

        let two = Interpretation::new(2).with_relation("r", 2, &[&[0, 0], &[1, 1]]);
        assert!(!eval(&swap, &two, &[]).unwrap());

        let i = Interpretation::new(3).with_relation("p", 0, &[]);
        assert!(eval(&f("p -> p"), &i, &[]).unwrap());
    }

    #[test]
    fn eval_brute_force_agrees_on_two_elements() {
        // exists x. forall y. r(x, y) over every relation on {0, 1}, checked
        // against a direct search over rows.
        let swap = f("exists x. forall y. r(x, y)");
        for bits in 0u32..16 {
            let tuples: Vec<Vec<usize>> =
                (0..4).filter(|k| bits & (1 << k) != 0).map(|k| vec![k / 2, k % 2]).collect();
            let refs: Vec<&[usize]> = tuples.iter().map(Vec::as_slice).collect();
            let i = Interpretation::new(2).with_relation("r", 2, &refs);
            let full_row = (0..2).any(|x| (0..2).all(|y| tuples.contains(&vec![x, y])));
            assert_eq!(eval(&swap, &i, &[]).unwrap(), full_row, "bits {bits:04b}");
        }
    }

    #[test]
    fn eval_functions_and_env() {
        let i = Interpretation::new(2)
            .with_function("s", 1, vec![1, 0])
            .with_function("z", 0, vec![0])
            .with_relation("e", 1, &[&[0]]);
        assert!(eval(&f("e(s(s(z)))"), &i, &[]).unwrap());
        assert!(!eval(&f("e(s(z))"), &i, &[]).unwrap());
        assert!(eval(&f("forall x. e(x) | e(s(x))"), &i, &[]).unwrap());
        let open = Formula::pred("e", vec![Term::Var(0)]);
        assert!(eval(&open, &i, &[1, 0]).unwrap());
        assert_eq!(eval(&open, &i, &[]), Err(EvalError::UnboundVariable(0)));
    }

    #[test]
    fn uncovered_symbol() {
        let err = eval(&f("q"), &Interpretation::new(1), &[]).unwrap_err();
        assert_eq!(err, EvalError::UncoveredSymbol(Symbol::new("q", 0)));
    }

    #[test]
    fn display_lists_tables() {
        let i = Interpretation::new(2).with_relation("r", 2, &[&[0, 0], &[1, 1]]).with_function("c", 0, vec![1]);
        assert_eq!(i.to_string(), "domain = {0, 1}\nc = 1\nr = {(0, 0), (1, 1)}\n");
    }
}
