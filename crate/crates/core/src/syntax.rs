//! First-order terms and formulas in de Bruijn form.
//!
//! Bound variables are indices counting enclosing binders outward from the
//! occurrence. Binder display names travel with `Uni`/`Exi` nodes for
//! printing only; equality and hashing ignore them, so alpha-equivalent
//! formulas compare equal.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// A term: a de Bruijn variable or a function application.
/// Constants are 0-ary applications.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    /// True when no variable index reaches `depth` or beyond.
    pub fn is_closed_at(&self, depth: usize) -> bool {
        match self {
            Term::Var(i) => *i < depth,
            Term::App(_, args) => args.iter().all(|a| a.is_closed_at(depth)),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.is_closed_at(0)
    }

    /// Nesting depth of applications; constants and variables are 0.
    pub fn nesting(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.nesting() + 1).max().unwrap_or(0),
        }
    }

    fn mentions(&self, index: usize) -> bool {
        match self {
            Term::Var(i) => *i == index,
            Term::App(_, args) => args.iter().any(|a| a.mentions(index)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unshifting by {amount} at cutoff {cutoff} would capture bound variable {index}")]
    NegativeShiftCapture { index: usize, amount: isize, cutoff: usize },
}

/// Lifts every variable index `>= cutoff` by `amount`.
///
/// A negative `amount` lowers indices instead; it fails when some variable in
/// `[cutoff, cutoff - amount)` would be pushed below the cutoff.
pub fn shift(t: &Term, amount: isize, cutoff: usize) -> Result<Term, SyntaxError> {
    match t {
        Term::Var(i) if *i < cutoff => Ok(Term::Var(*i)),
        Term::Var(i) => {
            let moved = *i as isize + amount;
            if moved < cutoff as isize {
                Err(SyntaxError::NegativeShiftCapture { index: *i, amount, cutoff })
            } else {
                Ok(Term::Var(moved as usize))
            }
        }
        Term::App(f, args) => Ok(Term::App(
            f.clone(),
            args.iter().map(|a| shift(a, amount, cutoff)).collect::<Result<_, _>>()?,
        )),
    }
}

/// A first-order formula. `Uni` and `Exi` carry an optional display name for
/// their bound variable.
#[derive(Clone, Debug)]
pub enum Formula {
    Pred(String, Vec<Term>),
    Imp(Box<Formula>, Box<Formula>),
    Dis(Box<Formula>, Box<Formula>),
    Con(Box<Formula>, Box<Formula>),
    Neg(Box<Formula>),
    Uni(Option<String>, Box<Formula>),
    Exi(Option<String>, Box<Formula>),
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        use Formula::*;
        match (self, other) {
            (Pred(p, a), Pred(q, b)) => p == q && a == b,
            (Imp(a, b), Imp(c, d)) | (Dis(a, b), Dis(c, d)) | (Con(a, b), Con(c, d)) => {
                a == c && b == d
            }
            (Neg(a), Neg(b)) => a == b,
            (Uni(_, a), Uni(_, b)) | (Exi(_, a), Exi(_, b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Formula::Pred(p, args) => {
                p.hash(state);
                args.hash(state);
            }
            Formula::Imp(a, b) | Formula::Dis(a, b) | Formula::Con(a, b) => {
                a.hash(state);
                b.hash(state);
            }
            Formula::Neg(a) | Formula::Uni(_, a) | Formula::Exi(_, a) => a.hash(state),
        }
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Pred(name.into(), Vec::new())
    }

    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Pred(name.into(), args)
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn dis(a: Formula, b: Formula) -> Formula {
        Formula::Dis(Box::new(a), Box::new(b))
    }

    pub fn con(a: Formula, b: Formula) -> Formula {
        Formula::Con(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Formula {
        Formula::Neg(Box::new(a))
    }

    pub fn uni(body: Formula) -> Formula {
        Formula::Uni(None, Box::new(body))
    }

    pub fn exi(body: Formula) -> Formula {
        Formula::Exi(None, Box::new(body))
    }

    /// `a <-> b`, desugared to `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::con(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn is_closed_at(&self, depth: usize) -> bool {
        match self {
            Formula::Pred(_, args) => args.iter().all(|t| t.is_closed_at(depth)),
            Formula::Imp(a, b) | Formula::Dis(a, b) | Formula::Con(a, b) => {
                a.is_closed_at(depth) && b.is_closed_at(depth)
            }
            Formula::Neg(a) => a.is_closed_at(depth),
            Formula::Uni(_, a) | Formula::Exi(_, a) => a.is_closed_at(depth + 1),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.is_closed_at(0)
    }

    /// Whether the variable bound directly outside this formula (index 0 at
    /// the top) occurs in it.
    pub fn mentions_outer(&self) -> bool {
        self.mentions_at(0)
    }

    fn mentions_at(&self, depth: usize) -> bool {
        match self {
            Formula::Pred(_, args) => args.iter().any(|t| t.mentions(depth)),
            Formula::Imp(a, b) | Formula::Dis(a, b) | Formula::Con(a, b) => {
                a.mentions_at(depth) || b.mentions_at(depth)
            }
            Formula::Neg(a) => a.mentions_at(depth),
            Formula::Uni(_, a) | Formula::Exi(_, a) => a.mentions_at(depth + 1),
        }
    }

    /// Number of connectives and atoms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Pred(..) => 1,
            Formula::Imp(a, b) | Formula::Dis(a, b) | Formula::Con(a, b) => 1 + a.size() + b.size(),
            Formula::Neg(a) | Formula::Uni(_, a) | Formula::Exi(_, a) => 1 + a.size(),
        }
    }
}

/// Substitutes `t` for the variable bound by the quantifier whose body is
/// `body`, removing that binder level.
///
/// Under `d` inner binders the variable appears as index `d` and is replaced
/// by `t` lifted by `d`; indices above `d` drop by one.
pub fn instantiate(body: &Formula, t: &Term) -> Formula {
    subst_formula(body, t, 0)
}

fn subst_formula(f: &Formula, t: &Term, depth: usize) -> Formula {
    match f {
        Formula::Pred(p, args) => {
            Formula::Pred(p.clone(), args.iter().map(|a| subst_term(a, t, depth)).collect())
        }
        Formula::Imp(a, b) => Formula::imp(subst_formula(a, t, depth), subst_formula(b, t, depth)),
        Formula::Dis(a, b) => Formula::dis(subst_formula(a, t, depth), subst_formula(b, t, depth)),
        Formula::Con(a, b) => Formula::con(subst_formula(a, t, depth), subst_formula(b, t, depth)),
        Formula::Neg(a) => Formula::neg(subst_formula(a, t, depth)),
        Formula::Uni(n, a) => Formula::Uni(n.clone(), Box::new(subst_formula(a, t, depth + 1))),
        Formula::Exi(n, a) => Formula::Exi(n.clone(), Box::new(subst_formula(a, t, depth + 1))),
    }
}

fn subst_term(s: &Term, t: &Term, depth: usize) -> Term {
    match s {
        Term::Var(i) if *i == depth => {
            shift(t, depth as isize, 0).expect("non-negative shift cannot fail")
        }
        Term::Var(i) if *i > depth => Term::Var(i - 1),
        Term::Var(i) => Term::Var(*i),
        Term::App(f, args) => {
            Term::App(f.clone(), args.iter().map(|a| subst_term(a, t, depth)).collect())
        }
    }
}

/// A symbol together with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Symbol {
        Symbol { name: name.into(), arity }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Function and predicate symbols occurring in some formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub functions: BTreeSet<Symbol>,
    pub predicates: BTreeSet<Symbol>,
}

impl Signature {
    pub fn is_empty(&self) -> bool {
        self.functions.is_empty() && self.predicates.is_empty()
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.functions.iter().filter(|s| s.arity == 0).map(|s| s.name.as_str())
    }

    /// Whether `name` is used as a function symbol of any arity.
    pub fn has_function_named(&self, name: &str) -> bool {
        self.functions.iter().any(|s| s.name == name)
    }

    pub fn add_formula(&mut self, f: &Formula) {
        match f {
            Formula::Pred(p, args) => {
                self.predicates.insert(Symbol::new(p.clone(), args.len()));
                args.iter().for_each(|t| self.add_term(t));
            }
            Formula::Imp(a, b) | Formula::Dis(a, b) | Formula::Con(a, b) => {
                self.add_formula(a);
                self.add_formula(b);
            }
            Formula::Neg(a) | Formula::Uni(_, a) | Formula::Exi(_, a) => self.add_formula(a),
        }
    }

    pub fn add_term(&mut self, t: &Term) {
        if let Term::App(f, args) = t {
            self.functions.insert(Symbol::new(f.clone(), args.len()));
            args.iter().for_each(|a| self.add_term(a));
        }
    }
}

/// Every function and predicate symbol, with arity, occurring in `formulas`.
pub fn constants_of<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Signature {
    let mut sig = Signature::default();
    for f in formulas {
        sig.add_formula(f);
    }
    sig
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(name: &str) -> Term {
        Term::constant(name)
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(&c("c"), 1, 0).unwrap(), c("c"));
        assert_eq!(shift(&Term::Var(0), 1, 0).unwrap(), Term::Var(1));
        assert_eq!(shift(&Term::Var(0), 1, 1).unwrap(), Term::Var(0));
    }

    #[test]
    fn negative_shift_detects_capture() {
        assert_eq!(shift(&Term::Var(3), -2, 1).unwrap(), Term::Var(1));
        let err = shift(&Term::app("f", vec![Term::Var(1)]), -1, 1).unwrap_err();
        assert!(matches!(err, SyntaxError::NegativeShiftCapture { index: 1, .. }));
        assert!(shift(&Term::Var(0), -1, 0).is_err());
    }

    #[test]
    fn instantiate_examples() {
        assert_eq!(instantiate(&Formula::atom("p"), &c("c")), Formula::atom("p"));
        let body = Formula::pred("r", vec![Term::Var(0), Term::Var(0)]);
        assert_eq!(instantiate(&body, &c("a")), Formula::pred("r", vec![c("a"), c("a")]));
        let body = Formula::uni(Formula::pred("r", vec![Term::Var(1), Term::Var(0)]));
        assert_eq!(
            instantiate(&body, &c("a")),
            Formula::uni(Formula::pred("r", vec![c("a"), Term::Var(0)]))
        );
    }

    #[test]
    fn instantiate_lifts_under_binders() {
        // An open term is lifted past inner binders so it keeps pointing outward.
        let body = Formula::exi(Formula::pred("p", vec![Term::Var(1)]));
        assert_eq!(
            instantiate(&body, &Term::Var(4)),
            Formula::exi(Formula::pred("p", vec![Term::Var(5)]))
        );
    }

    #[test]
    fn display_names_do_not_affect_equality() {
        let a = Formula::Uni(Some("x".into()), Box::new(Formula::pred("p", vec![Term::Var(0)])));
        let b = Formula::Uni(Some("y".into()), Box::new(Formula::pred("p", vec![Term::Var(0)])));
        assert_eq!(a, b);
        use std::collections::hash_map::DefaultHasher;
        let h = |f: &Formula| {
            let mut s = DefaultHasher::new();
            f.hash(&mut s);
            s.finish()
        };
        assert_eq!(h(&a), h(&b));
        assert_ne!(a, Formula::exi(Formula::pred("p", vec![Term::Var(0)])));
    }

    #[test]
    fn constants_of_examples() {
        let sig = constants_of([&Formula::atom("p")]);
        assert_eq!(sig.predicates, BTreeSet::from([Symbol::new("p", 0)]));
        assert!(sig.functions.is_empty());

        let f = Formula::pred("r", vec![c("c"), Term::app("f", vec![c("c")])]);
        let sig = constants_of([&f]);
        assert_eq!(sig.predicates, BTreeSet::from([Symbol::new("r", 2)]));
        assert_eq!(sig.functions, BTreeSet::from([Symbol::new("c", 0), Symbol::new("f", 1)]));

        assert!(constants_of(std::iter::empty()).is_empty());
    }

    #[test]
    fn closedness() {
        assert!(Formula::uni(Formula::pred("p", vec![Term::Var(0)])).is_closed());
        assert!(!Formula::uni(Formula::pred("p", vec![Term::Var(1)])).is_closed());
        assert!(Formula::pred("p", vec![Term::Var(0)]).mentions_outer());
        assert!(!Formula::uni(Formula::pred("p", vec![Term::Var(0)])).mentions_outer());
    }
}
