//! Batch exam grading with milestone scores.
//!
//! Each question earns points on a 0..100 scale, later scaled to its
//! `max_points`: a parse milestone for a script without syntax errors, a
//! branch milestone proportional to the closed share of the proof tree
//! (each Beta split halves a branch's share, so with a single split this is
//! closed / (closed + open)), and a completion milestone. Complete proofs that are much longer than the
//! reference lose a style deduction. Anything that needs a human look is
//! flagged.

mod batch;
mod manifest;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::calculus::{run_script, Verdict};
use crate::diag::{Code, Diagnostic, Span};
use crate::script::{parse_script, print_formula};

pub use batch::{grade_batch, report_json, summary_csv, BatchError};
pub use manifest::{ManifestError, ProblemEntry, ProblemManifest, QuestionEntry, QuestionSpec, Scoring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flag {
    Review,
    ManifestMismatch,
    Missing,
    DuplicateSection,
    UnknownSection,
    Unreadable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Breakdown {
    pub parse: f64,
    pub branches: f64,
    pub complete: f64,
    pub style_deduction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuestionReport {
    pub key: String,
    pub points: f64,
    pub max_points: u32,
    pub breakdown: Breakdown,
    pub closed_branches: usize,
    pub open_branches: usize,
    pub steps_validated: usize,
    pub flags: BTreeSet<Flag>,
    pub diagnostics: Vec<Diagnostic>,
}

impl QuestionReport {
    fn zero(spec: &QuestionSpec) -> Self {
        QuestionReport {
            key: spec.key.clone(),
            points: 0.0,
            max_points: spec.entry.max_points,
            breakdown: Breakdown::default(),
            closed_branches: 0,
            open_branches: 0,
            steps_validated: 0,
            flags: BTreeSet::new(),
            diagnostics: Vec::new(),
        }
    }

    fn flag(&mut self, flag: Flag, code: Code, message: impl Into<String>) {
        self.flags.insert(flag);
        self.diagnostics.push(Diagnostic::warning(code, Span::default(), message));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradeReport {
    pub student_id: String,
    pub exam_id: String,
    /// Weighted score on a 0..100 scale.
    pub total: f64,
    pub review_required: bool,
    /// Flags about the file as a whole.
    pub flags: BTreeSet<Flag>,
    pub diagnostics: Vec<Diagnostic>,
    pub questions: Vec<QuestionReport>,
}

/// Scores one question's section text.
pub fn grade_question(spec: &QuestionSpec, text: &str) -> QuestionReport {
    let scoring = &spec.scoring;
    let scale = f64::from(spec.entry.max_points) / 100.0;
    let mut row = QuestionReport::zero(spec);

    let outcome = parse_script(text);
    row.diagnostics.extend(outcome.diagnostics.iter().cloned());
    let Some(script) = outcome.script.as_ref() else {
        row.flag(Flag::Review, Code::Review, "the goal formula could not be read; needs manual review");
        return row;
    };
    if script.goal != spec.goal {
        let mut d = Diagnostic::error(
            Code::ManifestMismatch,
            Span::default(),
            "the goal formula differs from the exam's formula",
        );
        d = d.with_diff(print_formula(&spec.goal), print_formula(&script.goal));
        row.flags.insert(Flag::ManifestMismatch);
        row.diagnostics.push(d);
        return row;
    }

    let prefix = &script.steps[..outcome.clean_prefix];
    let trace = run_script(&script.goal, prefix);
    let closed = trace.state.closed;
    let open = trace.state.open_goals.len();
    let fraction = trace.closed_share();
    let complete = trace.verdict == Verdict::Complete;
    let steps = trace.state.steps_consumed;
    row.closed_branches = closed;
    row.open_branches = open;
    row.steps_validated = steps;

    let mut b = Breakdown {
        parse: if outcome.has_errors() { 0.0 } else { scoring.parse },
        branches: scoring.branches * fraction,
        complete: if complete { scoring.complete } else { 0.0 },
        style_deduction: 0.0,
    };
    let style_limit = scoring.style_ratio * spec.entry.reference_steps as f64;
    if complete && steps as f64 > style_limit {
        b.style_deduction = scoring.style_deduction;
        row.flag(
            Flag::Review,
            Code::StyleDeduction,
            format!("complete, but {steps} steps is more than {style_limit} (reference length times {})", scoring.style_ratio),
        );
    }
    if outcome.recovered {
        row.flag(Flag::Review, Code::Review, "the script has syntax errors; graded up to the first one");
    }
    if let Verdict::Invalid { diagnostics, .. } = &trace.verdict {
        row.diagnostics.extend(diagnostics.iter().cloned());
        if fraction >= 0.5 {
            row.flag(
                Flag::Review,
                Code::Review,
                format!("invalid step after {closed} of {} branches were closed", closed + open),
            );
        }
    }

    let raw = (b.parse + b.branches + b.complete - b.style_deduction).clamp(0.0, 100.0);
    row.breakdown = Breakdown {
        parse: b.parse * scale,
        branches: b.branches * scale,
        complete: b.complete * scale,
        style_deduction: b.style_deduction * scale,
    };
    row.points = raw * scale;
    row
}

/// One question's text inside a submission file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub text: String,
    /// Byte offset of `text` in the file.
    pub offset: usize,
    /// 1-based file line of the first line of `text`.
    pub first_line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Submission {
    pub student_id: String,
    pub sections: BTreeMap<String, Section>,
    /// Keys that appeared more than once; the last copy is kept.
    pub duplicates: BTreeSet<String>,
    /// Text before the first delimiter.
    pub unmatched: String,
}

const DELIMITER: &str = "-- problem ";

fn delimiter_key(line: &str) -> Option<&str> {
    let key = line.trim().strip_prefix(DELIMITER)?.trim();
    (!key.is_empty()).then_some(key)
}

impl Submission {
    /// Splits a file on `-- problem <pid>.<qid>` lines.
    pub fn split(student_id: &str, text: &str) -> Self {
        let mut sub = Submission { student_id: student_id.to_string(), ..Default::default() };
        let mut current: Option<(String, usize, usize)> = None;
        let mut offset = 0;
        let close = |sub: &mut Submission, cur: Option<(String, usize, usize)>, end: usize| match cur {
            Some((key, start, first_line)) => {
                let section = Section { text: text[start..end].to_string(), offset: start, first_line };
                if sub.sections.insert(key.clone(), section).is_some() {
                    sub.duplicates.insert(key);
                }
            }
            None => sub.unmatched = text[..end].to_string(),
        };
        for (lineno, line) in text.split_inclusive('\n').enumerate() {
            if let Some(key) = delimiter_key(line) {
                close(&mut sub, current.take(), offset);
                current = Some((key.to_string(), offset + line.len(), lineno + 2));
            }
            offset += line.len();
        }
        close(&mut sub, current, text.len());
        sub
    }
}

/// Moves a section-relative span to file coordinates.
fn relocate(d: &mut Diagnostic, section: &Section) {
    if !d.span.is_synthetic() {
        d.span.start += section.offset;
        d.span.end += section.offset;
        d.span.line += section.first_line - 1;
    }
}

/// Grades a whole submission file.
pub fn grade_submission(manifest: &ProblemManifest, student_id: &str, bytes: &[u8]) -> GradeReport {
    let specs = manifest.questions().expect("manifest validated on load");
    let mut report = GradeReport {
        student_id: student_id.to_string(),
        exam_id: manifest.exam_id.clone(),
        total: 0.0,
        review_required: false,
        flags: BTreeSet::new(),
        diagnostics: Vec::new(),
        questions: Vec::new(),
    };

    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => {
            report.flags.insert(Flag::Unreadable);
            report.diagnostics.push(Diagnostic::error(
                Code::Unreadable,
                Span::default(),
                format!("the file is not valid UTF-8 (byte {})", e.valid_up_to()),
            ));
            report.questions = specs.iter().map(QuestionReport::zero).collect();
            report.review_required = true;
            return report;
        }
    };

    let sub = Submission::split(student_id, text);
    let known: BTreeSet<&str> = specs.iter().map(|s| s.key.as_str()).collect();
    for key in sub.sections.keys().filter(|k| !known.contains(k.as_str())) {
        report.flags.insert(Flag::UnknownSection);
        report.diagnostics.push(Diagnostic::error(
            Code::UnknownSection,
            Span::default(),
            format!("section `{DELIMITER}{key}` does not match any question of the exam"),
        ));
    }

    for spec in &specs {
        let mut row = match sub.sections.get(&spec.key) {
            Some(section) => {
                let mut row = grade_question(spec, &section.text);
                row.diagnostics.iter_mut().for_each(|d| relocate(d, section));
                row
            }
            None => {
                let mut row = QuestionReport::zero(spec);
                row.flag(Flag::Missing, Code::Missing, format!("no `{DELIMITER}{}` section", spec.key));
                row
            }
        };
        if sub.duplicates.contains(&spec.key) {
            row.flag(
                Flag::DuplicateSection,
                Code::DuplicateSection,
                format!("`{DELIMITER}{}` appears more than once; the last copy was graded", spec.key),
            );
        }
        report.questions.push(row);
    }

    report.total = specs
        .iter()
        .zip(&report.questions)
        .map(|(spec, row)| spec.problem_weight * spec.entry.weight * 100.0 * row.points / f64::from(row.max_points))
        .sum();
    // An unanswered question is simply worth nothing; every other flag
    // asks for a human look.
    let needs_review = |flags: &BTreeSet<Flag>| flags.iter().any(|f| *f != Flag::Missing);
    report.review_required = needs_review(&report.flags) || report.questions.iter().any(|q| needs_review(&q.flags));
    report
}
