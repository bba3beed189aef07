//! Exhaustive countermodel search over small domains.
//!
//! Interpretations are visited by domain size, then function tables in
//! lexicographic order, then predicate tables. A predicate table is treated
//! as the sorted list of tuples it holds on, and those lists are visited in
//! lexicographic order, so the empty relation comes first.

use thiserror::Error;

use super::{eval, Interpretation, Limits};
use crate::syntax::{constants_of, Formula, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    /// True in every interpretation with at most this many elements.
    ValidUpTo(usize),
    Countermodel(Interpretation),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidityError {
    #[error("refusing to enumerate {count} interpretations (ceiling {ceiling})")]
    EnumerationTooLarge { count: u128, ceiling: u128 },
    #[error("the formula has free variables")]
    NotClosed,
    #[error("search cancelled")]
    Cancelled,
    #[error("invalid limits: {0}")]
    Limits(&'static str),
}

/// Number of interpretations of `sig` over domains of size `1..=max_domain`,
/// saturating at `u128::MAX`.
pub fn enumeration_count(sig: &Signature, max_domain: usize) -> u128 {
    let mut total: u128 = 0;
    for n in 1..=max_domain as u128 {
        let mut count: u128 = 1;
        let tables = sig
            .functions
            .iter()
            .map(|s| (n, s.arity))
            .chain(sig.predicates.iter().map(|s| (2, s.arity)));
        for (base, arity) in tables {
            let entries = checked_pow(n, arity as u32);
            count = entries
                .and_then(|e| u32::try_from(e).ok())
                .and_then(|e| checked_pow(base, e))
                .and_then(|c| count.checked_mul(c))
                .unwrap_or(u128::MAX);
        }
        total = total.saturating_add(count);
    }
    total
}

fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

pub fn check_validity(f: &Formula, limits: &Limits) -> Result<Validity, ValidityError> {
    limits.validate().map_err(|e| ValidityError::Limits(e.0))?;
    if !f.is_closed() {
        return Err(ValidityError::NotClosed);
    }
    let sig = constants_of([f]);
    let count = enumeration_count(&sig, limits.max_domain);
    if count > limits.enumeration_ceiling {
        return Err(ValidityError::EnumerationTooLarge { count, ceiling: limits.enumeration_ceiling });
    }
    for n in 1..=limits.max_domain {
        let mut odo = Odometer::new(&sig, n);
        loop {
            if limits.cancel.is_cancelled() {
                return Err(ValidityError::Cancelled);
            }
            let interp = odo.interpretation();
            if !eval(f, &interp, &[]).expect("every symbol of the formula is interpreted") {
                return Ok(Validity::Countermodel(interp));
            }
            if !odo.advance() {
                break;
            }
        }
    }
    Ok(Validity::ValidUpTo(limits.max_domain))
}

enum Table {
    /// Output value per argument tuple; the last entry varies fastest.
    Function(Vec<usize>),
    /// Sorted indices of the tuples in the relation.
    Relation(Vec<usize>),
}

struct Odometer<'s> {
    sig: &'s Signature,
    n: usize,
    tables: Vec<Table>,
}

impl<'s> Odometer<'s> {
    fn new(sig: &'s Signature, n: usize) -> Self {
        let tables = sig
            .functions
            .iter()
            .map(|s| Table::Function(vec![0; n.pow(s.arity as u32)]))
            .chain(sig.predicates.iter().map(|_| Table::Relation(Vec::new())))
            .collect();
        Odometer { sig, n, tables }
    }

    fn interpretation(&self) -> Interpretation {
        let mut interp = Interpretation::new(self.n);
        let syms = self.sig.functions.iter().chain(self.sig.predicates.iter());
        for (sym, table) in syms.zip(&self.tables) {
            match table {
                Table::Function(values) => {
                    interp.functions.insert(sym.clone(), values.clone());
                }
                Table::Relation(members) => {
                    let mut bits = vec![false; self.n.pow(sym.arity as u32)];
                    for &m in members {
                        bits[m] = true;
                    }
                    interp.predicates.insert(sym.clone(), bits);
                }
            }
        }
        interp
    }

    /// Steps to the next interpretation; false once every one was visited.
    fn advance(&mut self) -> bool {
        let n = self.n;
        let arities: Vec<usize> = self.sig.functions.iter().chain(self.sig.predicates.iter()).map(|s| s.arity).collect();
        for (table, arity) in self.tables.iter_mut().zip(arities).rev() {
            let carried = match table {
                Table::Function(values) => next_function(values, n),
                Table::Relation(members) => next_subset(members, n.pow(arity as u32)),
            };
            if !carried {
                return true;
            }
        }
        false
    }
}

/// Lexicographic increment; returns true when it wrapped to all zeros.
fn next_function(values: &mut [usize], n: usize) -> bool {
    for v in values.iter_mut().rev() {
        *v += 1;
        if *v < n {
            return false;
        }
        *v = 0;
    }
    true
}

/// Successor of a sorted subset of `0..universe` in lexicographic order of
/// sorted lists; returns true when it wrapped back to the empty set.
fn next_subset(members: &mut Vec<usize>, universe: usize) -> bool {
    match members.last().copied() {
        None => {
            members.push(0);
            false
        }
        Some(last) if last + 1 < universe => {
            members.push(last + 1);
            false
        }
        Some(_) => {
            members.pop();
            match members.pop() {
                None => true,
                Some(prev) => {
                    members.push(prev + 1);
                    false
                }
            }
        }
    }
}
