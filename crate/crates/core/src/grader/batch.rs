use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use super::{grade_submission, GradeReport, ProblemManifest};

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("cannot read submissions directory {path}: {source}")]
    ReadDir { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("invalid manifest: {0}")]
    Manifest(#[from] super::ManifestError),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Grades every `.sqc` file in `submissions`, writing
/// `out/reports/<student_id>.json` and `out/summary.csv`.
///
/// Reports are sorted by student id, so the output does not depend on
/// directory order or on `jobs`.
pub fn grade_batch(
    manifest: &ProblemManifest,
    submissions: &Path,
    out: &Path,
    jobs: usize,
) -> Result<Vec<GradeReport>, BatchError> {
    manifest.questions()?;
    let read_dir = |e| BatchError::ReadDir { path: submissions.to_path_buf(), source: e };
    let mut files: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(submissions).map_err(read_dir)? {
        let path = entry.map_err(read_dir)?.path();
        if path.extension().is_some_and(|e| e == "sqc") && path.is_file() {
            if let Some(stem) = path.file_stem() {
                files.push((stem.to_string_lossy().into_owned(), path));
            }
        }
    }
    files.sort();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let mut reports: Vec<GradeReport> = pool.install(|| {
        files
            .par_iter()
            .map(|(id, path)| {
                // An unreadable file grades like undecodable content.
                let bytes = fs::read(path).unwrap_or_else(|_| vec![0xff]);
                grade_submission(manifest, id, &bytes)
            })
            .collect()
    });
    reports.sort_by(|a, b| a.student_id.cmp(&b.student_id));

    let reports_dir = out.join("reports");
    let write_err = |path: &Path| {
        let path = path.to_path_buf();
        move |e| BatchError::Write { path, source: e }
    };
    fs::create_dir_all(&reports_dir).map_err(write_err(&reports_dir))?;
    for r in &reports {
        let path = reports_dir.join(format!("{}.json", r.student_id));
        fs::write(&path, report_json(r)).map_err(write_err(&path))?;
    }
    let summary = out.join("summary.csv");
    fs::write(&summary, summary_csv(manifest, &reports)).map_err(write_err(&summary))?;
    Ok(reports)
}

/// Pretty JSON with a trailing newline.
pub fn report_json(report: &GradeReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// `student_id,<question keys...>,total,review_required`, one row per
/// report, LF line endings, numbers with two decimals.
pub fn summary_csv(manifest: &ProblemManifest, reports: &[GradeReport]) -> String {
    let mut header = vec!["student_id".to_string()];
    for p in &manifest.problems {
        header.extend(p.questions.iter().map(|q| format!("{}.{}", p.id, q.id)));
    }
    header.extend(["total".to_string(), "review_required".to_string()]);

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&header).expect("writing to memory");
    for r in reports {
        let mut row = vec![r.student_id.clone()];
        row.extend(r.questions.iter().map(|q| format!("{:.2}", q.points)));
        row.push(format!("{:.2}", r.total));
        row.push(r.review_required.to_string());
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("fields are UTF-8")
}
