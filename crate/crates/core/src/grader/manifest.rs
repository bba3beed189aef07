//! Exam manifests: problems, questions, weights and scoring parameters.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::script::parse_formula;
use crate::syntax::Formula;

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Milestone points on a 0..100 scale, plus the style threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scoring {
    pub parse: f64,
    pub branches: f64,
    pub complete: f64,
    pub style_deduction: f64,
    /// A complete proof longer than `style_ratio * reference_steps` loses
    /// `style_deduction`.
    pub style_ratio: f64,
}

impl Default for Scoring {
    fn default() -> Self {
        Scoring { parse: 10.0, branches: 60.0, complete: 30.0, style_deduction: 10.0, style_ratio: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuestionEntry {
    pub id: String,
    pub weight: f64,
    pub formula: String,
    pub reference_steps: usize,
    pub max_points: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scoring: Option<Scoring>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemEntry {
    pub id: String,
    pub weight: f64,
    pub questions: Vec<QuestionEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemManifest {
    pub exam_id: String,
    pub problems: Vec<ProblemEntry>,
    #[serde(default)]
    pub scoring: Scoring,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("problem weights sum to {0}, not 1")]
    ProblemWeights(f64),
    #[error("question weights of problem {problem} sum to {sum}, not 1")]
    QuestionWeights { problem: String, sum: f64 },
    #[error("question {0} has a formula that does not parse: {1}")]
    Formula(String, String),
    #[error("question {0} must have reference_steps >= 1")]
    ReferenceSteps(String),
    #[error("question {0} must have max_points >= 1")]
    MaxPoints(String),
    #[error("duplicate question key {0}")]
    DuplicateKey(String),
    #[error("negative weight in {0}")]
    NegativeWeight(String),
}

/// A question ready for grading: manifest entry plus parsed goal.
#[derive(Clone, Debug)]
pub struct QuestionSpec {
    /// `problem.question`, as used in submission delimiters.
    pub key: String,
    pub problem_weight: f64,
    pub entry: QuestionEntry,
    pub goal: Formula,
    pub scoring: Scoring,
}

impl ProblemManifest {
    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let manifest: ProblemManifest = serde_json::from_str(text)?;
        manifest.questions()?;
        Ok(manifest)
    }

    /// Validates the manifest and returns its questions in manifest order.
    pub fn questions(&self) -> Result<Vec<QuestionSpec>, ManifestError> {
        let total: f64 = self.problems.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(ManifestError::ProblemWeights(total));
        }
        let mut keys = HashSet::new();
        let mut out = Vec::new();
        for p in &self.problems {
            if p.weight < 0.0 {
                return Err(ManifestError::NegativeWeight(p.id.clone()));
            }
            let sum: f64 = p.questions.iter().map(|q| q.weight).sum();
            if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
                return Err(ManifestError::QuestionWeights { problem: p.id.clone(), sum });
            }
            for q in &p.questions {
                let key = format!("{}.{}", p.id, q.id);
                if q.weight < 0.0 {
                    return Err(ManifestError::NegativeWeight(key));
                }
                if !keys.insert(key.clone()) {
                    return Err(ManifestError::DuplicateKey(key));
                }
                if q.reference_steps == 0 {
                    return Err(ManifestError::ReferenceSteps(key));
                }
                if q.max_points == 0 {
                    return Err(ManifestError::MaxPoints(key));
                }
                let goal = parse_formula(&q.formula).map_err(|d| {
                    let msg = d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
                    ManifestError::Formula(key.clone(), msg)
                })?;
                out.push(QuestionSpec {
                    key,
                    problem_weight: p.weight,
                    entry: q.clone(),
                    goal,
                    scoring: q.scoring.unwrap_or(self.scoring),
                });
            }
        }
        Ok(out)
    }
}
