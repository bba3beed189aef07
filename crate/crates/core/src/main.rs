use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use sqc_core::grader::{grade_batch, ProblemManifest};
use sqc_core::service::{self, CheckRequest, Mode, Status};
use sqc_core::{check_validity, parse_formula, print_script, prove_bounded, Limits, Validity};

// Exit codes beyond the check verdicts.
const EXIT_USAGE: u8 = 64;
const EXIT_FAILURE: u8 = 4;

#[derive(Parser)]
#[command(name = "sqc", version, about = "Sequent calculus proof checker, prover and grader")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one proof script. Exit 0 complete, 1 incomplete, 2 invalid, 3 parse error.
    Check { file: PathBuf },
    /// Search for a proof and print it as a script.
    Prove {
        formula: String,
        #[arg(long, default_value_t = 1)]
        gamma_depth: usize,
        #[arg(long, default_value_t = 500)]
        max_steps: usize,
    },
    /// Search finite models for a countermodel.
    Countermodel {
        formula: String,
        #[arg(long, default_value_t = 2)]
        max_domain: usize,
    },
    /// Grade a directory of submissions.
    Grade {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        submissions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Serve the JSON check API.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        addr: IpAddr,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Check { file } => check(file),
        Command::Prove { formula, gamma_depth, max_steps } => {
            prove(&formula, Limits { gamma_depth, max_steps, ..Limits::default() })
        }
        Command::Countermodel { formula, max_domain } => {
            countermodel(&formula, Limits { max_domain, ..Limits::default() })
        }
        Command::Grade { manifest, submissions, out, jobs } => grade(manifest, submissions, out, jobs),
        Command::Serve { port, addr } => serve(SocketAddr::new(addr, port)),
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_FAILURE)
}

fn check(file: PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", file.display())),
    };
    let resp = service::handle_check(&CheckRequest { script_text: text, mode: Mode::Full });
    for d in &resp.diagnostics {
        let sev = serde_json::to_value(d.severity).expect("severity serializes");
        let sev = sev.as_str().unwrap_or("error");
        if d.line == 0 {
            println!("{}: {sev}[{}]: {}", file.display(), d.code, d.message);
        } else {
            println!("{}:{}:{}: {sev}[{}]: {}", file.display(), d.line, d.col, d.code, d.message);
        }
        if let Some(e) = &d.expected {
            println!("  expected: {e}");
        }
        if let Some(g) = &d.got {
            println!("       got: {g}");
        }
    }
    let (label, code) = match resp.status {
        Status::Complete => ("complete", 0),
        Status::Incomplete => ("incomplete", 1),
        Status::Invalid => ("invalid", 2),
        Status::ParseError => ("parse error", 3),
    };
    println!("{label}: {} step(s) validated", resp.steps_validated);
    for (id, g) in resp.branch_ids.iter().zip(&resp.open_goals) {
        println!("  open [{id}] {g}");
    }
    ExitCode::from(code)
}

fn parse_goal(text: &str) -> Result<sqc_core::Formula, ExitCode> {
    parse_formula(text).map_err(|ds| {
        for d in &ds {
            eprintln!("{d}");
        }
        ExitCode::from(3)
    })
}

fn prove(formula: &str, limits: Limits) -> ExitCode {
    let goal = match parse_goal(formula) {
        Ok(g) => g,
        Err(code) => return code,
    };
    if let Err(e) = limits.validate() {
        return fail(e);
    }
    let start = Instant::now();
    let result = prove_bounded(&goal, &limits);
    eprintln!("search took {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(script) => {
            print!("{}", print_script(&script));
            ExitCode::SUCCESS
        }
        Err(gave_up) => {
            println!("{gave_up}");
            ExitCode::from(1)
        }
    }
}

fn countermodel(formula: &str, limits: Limits) -> ExitCode {
    let goal = match parse_goal(formula) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let start = Instant::now();
    let result = check_validity(&goal, &limits);
    eprintln!("search took {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(Validity::Countermodel(m)) => {
            println!("countermodel:");
            print!("{m}");
            ExitCode::SUCCESS
        }
        Ok(Validity::ValidUpTo(n)) => {
            println!("no countermodel with domain size up to {n}");
            ExitCode::from(1)
        }
        Err(e) => fail(e),
    }
}

fn grade(manifest: PathBuf, submissions: PathBuf, out: PathBuf, jobs: usize) -> ExitCode {
    let text = match std::fs::read_to_string(&manifest) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", manifest.display())),
    };
    let manifest = match ProblemManifest::from_json(&text) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let start = Instant::now();
    match grade_batch(&manifest, &submissions, &out, jobs) {
        Ok(reports) => {
            eprintln!("graded {} submission(s) in {:.3}s", reports.len(), start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn serve(addr: SocketAddr) -> ExitCode {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    eprintln!("listening on http://{addr}");
    match runtime.block_on(service::serve(addr)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
