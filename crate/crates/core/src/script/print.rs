//! Canonical ASCII printer. Output reparses to the same de Bruijn structure.

use std::collections::BTreeSet;

use crate::calculus::Sequent;
use crate::syntax::{Formula, Term};

use super::ProofScript;

const IMP: u8 = 0;
const DIS: u8 = 1;
const CON: u8 = 2;
const NEG: u8 = 3;

pub fn print_formula(f: &Formula) -> String {
    let mut reserved = BTreeSet::new();
    collect_constants(f, &mut reserved);
    let mut p = Printer { out: String::new(), scope: Vec::new(), reserved };
    p.formula(f, IMP, true);
    p.out
}

/// Formulas joined by `, `.
pub fn print_sequent(s: &Sequent) -> String {
    s.formulas().iter().map(print_formula).collect::<Vec<_>>().join(", ")
}

/// Prints a term. Variables outside any binder show as `?i`.
pub fn print_term(t: &Term) -> String {
    let mut p = Printer { out: String::new(), scope: Vec::new(), reserved: BTreeSet::new() };
    p.term(t);
    p.out
}

pub fn print_script(script: &ProofScript) -> String {
    let mut out = print_formula(&script.goal);
    out.push_str("\n\n");
    for step in &script.steps {
        out.push_str(step.rule.name());
        out.push('\n');
        for (i, sequent) in step.claimed.iter().enumerate() {
            if i > 0 {
                out.push_str("+\n");
            }
            for f in sequent.formulas() {
                out.push_str("  ");
                out.push_str(&print_formula(f));
                out.push('\n');
            }
        }
    }
    out
}

fn collect_constants(f: &Formula, out: &mut BTreeSet<String>) {
    fn term(t: &Term, out: &mut BTreeSet<String>) {
        if let Term::App(name, args) = t {
            if args.is_empty() {
                out.insert(name.clone());
            }
            args.iter().for_each(|a| term(a, out));
        }
    }
    match f {
        Formula::Pred(_, args) => args.iter().for_each(|a| term(a, out)),
        Formula::Imp(a, b) | Formula::Dis(a, b) | Formula::Con(a, b) => {
            collect_constants(a, out);
            collect_constants(b, out);
        }
        Formula::Neg(a) | Formula::Uni(_, a) | Formula::Exi(_, a) => collect_constants(a, out),
    }
}

struct Printer {
    out: String,
    scope: Vec<String>,
    /// Names a binder must not take: constants of the formula.
    reserved: BTreeSet<String>,
}

impl Printer {
    /// `ctx` is the loosest connective allowed unparenthesized here;
    /// `rightmost` says nothing follows this subformula, so a quantifier
    /// body may extend to the end.
    fn formula(&mut self, f: &Formula, ctx: u8, rightmost: bool) {
        let prec = match f {
            Formula::Imp(..) => IMP,
            Formula::Dis(..) => DIS,
            Formula::Con(..) => CON,
            _ => NEG,
        };
        let quant = matches!(f, Formula::Uni(..) | Formula::Exi(..));
        let parens = if quant { !rightmost } else { prec < ctx };
        let rightmost = rightmost || parens;
        if parens {
            self.out.push('(');
        }
        match f {
            Formula::Pred(p, args) => {
                self.out.push_str(p);
                self.args(args);
            }
            Formula::Imp(a, b) => {
                self.formula(a, DIS, false);
                self.out.push_str(" -> ");
                self.formula(b, IMP, rightmost);
            }
            Formula::Dis(a, b) => {
                self.formula(a, DIS, false);
                self.out.push_str(" | ");
                self.formula(b, CON, rightmost);
            }
            Formula::Con(a, b) => {
                self.formula(a, CON, false);
                self.out.push_str(" & ");
                self.formula(b, NEG, rightmost);
            }
            Formula::Neg(a) => {
                self.out.push('~');
                self.formula(a, NEG, rightmost);
            }
            Formula::Uni(name, body) | Formula::Exi(name, body) => {
                let keyword = if matches!(f, Formula::Uni(..)) { "forall " } else { "exists " };
                let name = self.binder_name(name.as_deref());
                self.out.push_str(keyword);
                self.out.push_str(&name);
                self.out.push_str(". ");
                self.scope.push(name);
                self.formula(body, IMP, true);
                self.scope.pop();
            }
        }
        if parens {
            self.out.push(')');
        }
    }

    fn binder_name(&self, preferred: Option<&str>) -> String {
        let base = preferred.map(str::to_string).unwrap_or_else(|| format!("x{}", self.scope.len()));
        let taken = |n: &str| self.reserved.contains(n) || self.scope.iter().any(|s| s == n) || is_keyword(n);
        if !taken(&base) {
            return base;
        }
        (1..).map(|k| format!("{base}{k}")).find(|n| !taken(n)).expect("unbounded")
    }

    fn args(&mut self, args: &[Term]) {
        if args.is_empty() {
            return;
        }
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.term(a);
        }
        self.out.push(')');
    }

    fn term(&mut self, t: &Term) {
        match t {
            Term::Var(i) => match self.scope.len().checked_sub(i + 1) {
                Some(k) => {
                    let name = self.scope[k].clone();
                    self.out.push_str(&name);
                }
                None => self.out.push_str(&format!("?{i}")),
            },
            Term::App(f, args) => {
                self.out.push_str(f);
                self.args(args);
            }
        }
    }
}

fn is_keyword(n: &str) -> bool {
    n == "forall" || n == "exists"
}
