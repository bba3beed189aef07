//! A step-by-step proof checker for a one-sided sequent calculus over
//! classical first-order logic with function symbols.
//!
//! The user writes each rule application together with the sequents it
//! produces; [`calculus::check_script`] confirms every step. Around the
//! checker sit a finite-model evaluator and countermodel finder
//! ([`semantics`]), a bounded prover that emits checkable scripts, an exam
//! grader ([`grader`]) and a JSON check service ([`service`]).

pub mod calculus;
pub mod diag;
pub mod grader;
pub mod script;
pub mod semantics;
pub mod service;
pub mod syntax;

pub use calculus::{
    applicable_rules, check_script, run_script, validate_step, ProofState, Rule, RuleApplication, Sequent, Verdict,
};
pub use diag::{Code, Diagnostic, Severity, Span};
pub use script::{parse_formula, parse_script, print_formula, print_script, ParseOutcome, ProofScript};
pub use semantics::{check_validity, eval, prove_bounded, GaveUp, Interpretation, Limits, Validity};
pub use syntax::{constants_of, instantiate, shift, Formula, Signature, Symbol, Term};
