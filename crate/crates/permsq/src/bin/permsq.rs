//! Command-line driver: enumeration runs, table emission, golden-fixture
//! comparison, certificate production/verification, and cross-engine
//! validation.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use permsq::cruciality::{self, CrucialityError, PositionSpec};
use permsq::csp;
use permsq::dfs::{self, SearchOptions, SymmetryMode};
use permsq::golden::{self, Cell};
use permsq::layered;
use permsq::naive;
use permsq::perm::parse_permutation;

#[derive(Parser)]
#[command(name = "permsq", about = "Square-free and crucial permutation toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count one class at one length and compare against the golden table.
    Enumerate {
        /// "square-free" or a position spec such as "0,n" (aliases:
        /// right-crucial, left-crucial, bicrucial, s-crucial).
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Emit a TSV table for n = 1..=n_max and compare against goldens.
    Table {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether a permutation is P-crucial; write a certificate.
    Check {
        /// The permutation, compact ("2136547") or space-separated.
        perm: String,
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate file from scratch.
    VerifyCert { path: PathBuf },
    /// Run every engine on every supported (class, n) pair and compare.
    Crossvalidate {
        #[arg(long)]
        n_max: usize,
    },
    /// Build the layered level files up to n_max.
    LayeredBuild {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        store: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = EngineArg::Dfs)]
    engine: EngineArg,
    #[arg(long, value_enum, default_value_t = ModeArg::All)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = HeuristicArg::Static)]
    heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value_t = PreprocessArg::None)]
    preprocess: PreprocessArg,
    /// Per-(class, n) wall-clock budget in seconds; on expiry the row is
    /// reported as a lower bound with solutions found so far.
    #[arg(long)]
    timeout: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the TSV document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Level-file directory for the layered engine (default: temporary).
    #[arg(long)]
    store: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Dfs,
    Csp,
    Layered,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    All,
    Sym,
    Rc,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Static,
    Wdeg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PreprocessArg {
    None,
    Singleton,
}

impl ModeArg {
    fn to_mode(self) -> SymmetryMode {
        match self {
            ModeArg::All => SymmetryMode::None,
            ModeArg::Sym => SymmetryMode::UpToSymmetry,
            ModeArg::Rc => SymmetryMode::RcInvariantOnly,
        }
    }
}

impl HeuristicArg {
    fn to_heuristic(self) -> csp::Heuristic {
        match self {
            HeuristicArg::Static => csp::Heuristic::Static,
            HeuristicArg::Wdeg => csp::Heuristic::Wdeg,
        }
    }
}

impl PreprocessArg {
    fn to_preprocess(self) -> csp::Preprocess {
        match self {
            PreprocessArg::None => csp::Preprocess::None,
            PreprocessArg::Singleton => csp::Preprocess::Singleton,
        }
    }
}

/// `None` means the square-free class.
fn parse_class(text: &str) -> Result<Option<PositionSpec>, String> {
    let canonical = match text {
        "square-free" | "sf" => return Ok(None),
        "right-crucial" => "n",
        "left-crucial" => "0",
        "bicrucial" => "0,n",
        "s-crucial" => "0,1,n-1,n",
        other => other,
    };
    PositionSpec::parse(canonical)
        .map(Some)
        .map_err(|e| format!("unknown class {text:?}: {e}"))
}

fn class_key(spec: Option<&PositionSpec>) -> String {
    match spec {
        None => "square-free".to_string(),
        Some(s) => s.to_string().replace(' ', ""),
    }
}

/// The golden table matching this class, trying the mirror image too.
fn golden_for(spec: Option<&PositionSpec>) -> Option<golden::GoldenTable> {
    golden::table_for(&class_key(spec)).or_else(|| {
        spec.and_then(|s| golden::table_for(&class_key(Some(&s.mirror()))))
    })
}

/// One engine run for one (class, n, mode).
struct RunCell {
    count: u64,
    nodes: Option<u64>,
    lower_bound: bool,
}

impl RunCell {
    fn count_text(&self) -> String {
        if self.lower_bound {
            format!("≥{}", self.count)
        } else {
            self.count.to_string()
        }
    }
}

fn mode_counter(r: &dfs::CountResult, mode: SymmetryMode) -> u64 {
    match mode {
        SymmetryMode::None => r.total,
        SymmetryMode::UpToSymmetry => r.up_to_symmetry,
        SymmetryMode::RcInvariantOnly => r.rc_invariant,
    }
}

fn check_rc_applicable(spec: Option<&PositionSpec>, mode: SymmetryMode) -> Result<(), String> {
    if mode == SymmetryMode::RcInvariantOnly {
        if let Some(s) = spec {
            if !s.is_mirror_symmetric() {
                return Err(format!(
                    "rc-invariant counting needs a mirror-symmetric spec, got {s}"
                ));
            }
        }
    }
    Ok(())
}

/// Runs `work` on a worker thread with a wall-clock budget. `work` bumps the
/// shared counter per solution and finally returns the exact result; on
/// expiry the count so far is reported as a lower bound.
fn with_timeout<F>(timeout: Option<u64>, work: F) -> RunCell
where
    F: FnOnce(Arc<AtomicU64>) -> RunCell + Send + 'static,
{
    let Some(secs) = timeout else {
        return work(Arc::new(AtomicU64::new(0)));
    };
    let counter = Arc::new(AtomicU64::new(0));
    let seen = counter.clone();
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(work(counter));
    });
    match rx.recv_timeout(Duration::from_secs(secs)) {
        Ok(cell) => cell,
        Err(_) => RunCell {
            count: seen.load(Ordering::Relaxed),
            nodes: None,
            lower_bound: true,
        },
    }
}

fn run_dfs(
    n: usize,
    spec: Option<&PositionSpec>,
    mode: SymmetryMode,
    workers: usize,
    timeout: Option<u64>,
) -> Result<RunCell, String> {
    check_rc_applicable(spec, mode)?;
    let spec = spec.cloned();
    Ok(with_timeout(timeout, move |counter| {
        let opts = SearchOptions {
            workers,
            ..SearchOptions::default()
        };
        let mut sink = |_: &permsq::perm::Permutation| {
            counter.fetch_add(1, Ordering::Relaxed);
        };
        // The parallel path has no sink; count progress only when serial.
        let sink_opt: Option<&mut dyn FnMut(&permsq::perm::Permutation)> =
            if workers > 1 { None } else { Some(&mut sink) };
        let r = dfs::enumerate(n, spec.as_ref(), mode, sink_opt, opts);
        RunCell {
            count: mode_counter(&r, mode),
            nodes: Some(r.nodes),
            lower_bound: false,
        }
    }))
}

fn run_csp(
    n: usize,
    spec: Option<&PositionSpec>,
    mode: SymmetryMode,
    heuristic: csp::Heuristic,
    preprocess: csp::Preprocess,
    timeout: Option<u64>,
) -> Result<RunCell, String> {
    check_rc_applicable(spec, mode)?;
    let spec = spec.cloned();
    Ok(with_timeout(timeout, move |counter| {
        let mut m = csp::build_model(n, spec.as_ref(), mode);
        match mode {
            SymmetryMode::None => {}
            SymmetryMode::UpToSymmetry => {
                m = csp::add_lex_leader(m, dfs::class_group(spec.as_ref()))
                    .expect("applicability checked");
            }
            SymmetryMode::RcInvariantOnly => {
                m = csp::add_lex_leader(m, permsq::perm::SymmetryGroup::COMPLEMENT_ONLY)
                    .expect("complement is always applicable");
            }
        }
        let opts = csp::SolveOptions {
            heuristic,
            preprocess,
            propagation: true,
        };
        let stats = csp::solve_with_sink(&m, opts, &mut |_| {
            counter.fetch_add(1, Ordering::Relaxed);
        });
        RunCell {
            count: stats.solutions,
            nodes: Some(stats.nodes),
            lower_bound: false,
        }
    }))
}

fn layered_store(common_store: Option<&PathBuf>) -> Result<layered::Store, String> {
    let dir = match common_store {
        Some(dir) => dir.clone(),
        None => std::env::temp_dir().join(format!("permsq-levels-{}", std::process::id())),
    };
    layered::Store::new(dir).map_err(|e| e.to_string())
}

fn run_layered(
    n: usize,
    spec: Option<&PositionSpec>,
    mode: SymmetryMode,
    store: &layered::Store,
) -> Result<RunCell, String> {
    check_rc_applicable(spec, mode)?;
    let need = if spec.is_some() { n + 1 } else { n };
    layered::build_up_to(need, store).map_err(|e| e.to_string())?;
    let members = match spec {
        None => store.read_level(n).map_err(|e| e.to_string())?.members,
        Some(s) => layered::read_off_crucial(store, n + 1, s).map_err(|e| {
            format!("layered engine supports only square-free, 0, n, and 0,n classes: {e}")
        })?,
    };
    let group = dfs::class_group(spec);
    let count = match mode {
        SymmetryMode::None => members.len() as u64,
        SymmetryMode::UpToSymmetry => members
            .iter()
            .filter(|p| dfs::is_lex_leader(p, group))
            .count() as u64,
        SymmetryMode::RcInvariantOnly => members
            .iter()
            .filter(|p| **p == p.reverse_complement() && **p <= p.complement())
            .count() as u64,
    };
    Ok(RunCell {
        count,
        nodes: None,
        lower_bound: false,
    })
}

fn run_engine(
    common: &Common,
    store: &layered::Store,
    n: usize,
    spec: Option<&PositionSpec>,
    mode: SymmetryMode,
) -> Result<RunCell, String> {
    match common.engine {
        EngineArg::Dfs => run_dfs(n, spec, mode, common.workers, common.timeout),
        EngineArg::Csp => run_csp(
            n,
            spec,
            mode,
            common.heuristic.to_heuristic(),
            common.preprocess.to_preprocess(),
            common.timeout,
        ),
        EngineArg::Layered => run_layered(n, spec, mode, store),
    }
}

/// Compares an observed cell against the golden cell, if any; returns a
/// mismatch description on disagreement.
fn compare_golden(
    class: &str,
    n: usize,
    column: &str,
    observed: &RunCell,
    expected: Option<Cell>,
) -> Option<String> {
    let expected = expected?;
    if observed.lower_bound {
        // A timed-out run can only invalidate an exact golden from above.
        if let Cell::Exact(v) = expected {
            if observed.count > v {
                return Some(format!(
                    "{class} n={n} {column}: found ≥{} but golden says {v}",
                    observed.count
                ));
            }
        }
        return None;
    }
    if !expected.matches(observed.count) {
        return Some(format!(
            "{class} n={n} {column}: got {} expected {expected}",
            observed.count
        ));
    }
    None
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
    }
}

const HEADER: &str = "n\ttotal\tnodes\tup_to_symmetry\tnodes_sym\trc_invariant\tnodes_rc";

fn opt_u64(v: Option<u64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// One table row across all applicable modes.
fn table_row(
    common: &Common,
    store: &layered::Store,
    spec: Option<&PositionSpec>,
    n: usize,
    mismatches: &mut Vec<String>,
) -> Result<String, String> {
    let class = class_key(spec);
    let gold = golden_for(spec);
    let grow = gold.as_ref().and_then(|t| t.row(n).copied());
    let rc_ok = spec.is_none_or(|s| s.is_mirror_symmetric());

    let all = run_engine(common, store, n, spec, SymmetryMode::None)?;
    if let Some(m) = compare_golden(&class, n, "total", &all, grow.and_then(|r| r.total)) {
        mismatches.push(m);
    }
    let sym = run_engine(common, store, n, spec, SymmetryMode::UpToSymmetry)?;
    if let Some(m) = compare_golden(
        &class,
        n,
        "up_to_symmetry",
        &sym,
        grow.and_then(|r| r.up_to_symmetry),
    ) {
        mismatches.push(m);
    }
    let rc = if rc_ok {
        let rc = run_engine(common, store, n, spec, SymmetryMode::RcInvariantOnly)?;
        if let Some(m) = compare_golden(
            &class,
            n,
            "rc_invariant",
            &rc,
            grow.and_then(|r| r.rc_invariant),
        ) {
            mismatches.push(m);
        }
        Some(rc)
    } else {
        None
    };
    Ok(format!(
        "{n}\t{}\t{}\t{}\t{}\t{}\t{}",
        all.count_text(),
        opt_u64(all.nodes),
        sym.count_text(),
        opt_u64(sym.nodes),
        rc.as_ref().map_or_else(|| "-".to_string(), RunCell::count_text),
        opt_u64(rc.and_then(|r| r.nodes)),
    ))
}

fn cmd_enumerate(class: &str, n: usize, common: &Common) -> Result<ExitCode, String> {
    let spec = parse_class(class)?;
    let store = layered_store(common.store.as_ref())?;
    let start = Instant::now();
    let mode = common.mode.to_mode();
    let cell = run_engine(common, &store, n, spec.as_ref(), mode)?;
    let column = match common.mode {
        ModeArg::All => "total",
        ModeArg::Sym => "up_to_symmetry",
        ModeArg::Rc => "rc_invariant",
    };
    let gold = golden_for(spec.as_ref()).and_then(|t| {
        t.row(n).and_then(|r| match common.mode {
            ModeArg::All => r.total,
            ModeArg::Sym => r.up_to_symmetry,
            ModeArg::Rc => r.rc_invariant,
        })
    });
    let mismatch = compare_golden(&class_key(spec.as_ref()), n, column, &cell, gold);
    let verdict = match (&mismatch, gold) {
        (Some(_), _) => "mismatch",
        (None, Some(_)) => "match",
        (None, None) => "unknown",
    };
    let text = format!(
        "class\tn\tmode\tcount\tnodes\tgolden\twall_s\n{}\t{n}\t{column}\t{}\t{}\t{verdict}\t{:.3}\n",
        class_key(spec.as_ref()),
        cell.count_text(),
        opt_u64(cell.nodes),
        start.elapsed().as_secs_f64(),
    );
    write_out(common.out.as_ref(), &text)?;
    if let Some(m) = mismatch {
        eprintln!("mismatch: {m}");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(class: &str, n_max: usize, common: &Common) -> Result<ExitCode, String> {
    let spec = parse_class(class)?;
    let store = layered_store(common.store.as_ref())?;
    let mut mismatches = Vec::new();
    let mut text = String::from(HEADER);
    text.push('\n');
    let n_min = if spec.is_some() { 3.min(n_max) } else { 1 };
    for n in n_min..=n_max {
        let row = table_row(common, &store, spec.as_ref(), n, &mut mismatches)?;
        text.push_str(&row);
        text.push('\n');
    }
    write_out(common.out.as_ref(), &text)?;
    for m in &mismatches {
        eprintln!("mismatch: {m}");
    }
    if mismatches.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_check(perm: &str, spec_text: &str, out: Option<&PathBuf>) -> Result<ExitCode, String> {
    let p = parse_permutation(perm).map_err(|e| e.to_string())?;
    let spec = parse_class(spec_text)?
        .ok_or_else(|| "check needs a position spec, not square-free".to_string())?;
    match cruciality::certificate(&p, &spec) {
        Ok(cert) => {
            println!("P-crucial with respect to {{{spec}}}: true");
            let json = serde_json::to_string_pretty(&cert).map_err(|e| e.to_string())?;
            match out {
                Some(path) => {
                    fs::write(path, json).map_err(|e| e.to_string())?;
                    println!("certificate written to {}", path.display());
                }
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(CrucialityError::NotSquareFree(start, half)) => {
            println!("P-crucial with respect to {{{spec}}}: false");
            println!("subject contains a square at start {start}, half length {half}");
            Ok(ExitCode::FAILURE)
        }
        Err(CrucialityError::Extendable { pos, x }) => {
            println!("P-crucial with respect to {{{spec}}}: false");
            println!("extension at position {pos} by {x} is square-free");
            Ok(ExitCode::FAILURE)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_verify_cert(path: &PathBuf) -> Result<ExitCode, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let cert: cruciality::Certificate =
        serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let (ok, problems) = cruciality::verify_certificate(&cert);
    if ok {
        println!(
            "certificate valid: {} is {{{}}}-crucial ({} witnesses)",
            cert.subject(),
            cert.spec(),
            cert.entries().len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        for p in problems {
            eprintln!("invalid: {p}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_crossvalidate(n_max: usize) -> Result<ExitCode, String> {
    const CEILING: usize = 12;
    if n_max > CEILING {
        return Err(format!("n_max {n_max} exceeds the configured ceiling {CEILING}"));
    }
    let classes: Vec<Option<PositionSpec>> = std::iter::once(None)
        .chain(
            ["0", "n", "1", "0,1", "0,n-1", "0,n", "1,n-1", "0,1,n-1", "0,1,n", "0,1,n-1,n"]
                .iter()
                .map(|t| Some(PositionSpec::parse(t).unwrap())),
        )
        .collect();
    let store = layered_store(None)?;
    layered::build_up_to((n_max + 1).min(CEILING), &store).map_err(|e| e.to_string())?;
    let mut disagreements = Vec::new();
    for spec in &classes {
        let n_min = if spec.is_some() { 3 } else { 1 };
        for n in n_min..=n_max {
            let d = dfs::count(n, spec.as_ref());
            let c = csp::solve_count(
                &csp::build_model(n, spec.as_ref(), SymmetryMode::None),
                csp::Heuristic::Static,
                csp::Preprocess::None,
            )
            .solutions;
            let mut line = format!("{}\tn={n}\tdfs={d}\tcsp={c}", class_key(spec.as_ref()));
            let mut agree = d == c;
            if n <= 8 {
                let v = naive::enumerate(n, spec.as_ref()).len() as u64;
                line.push_str(&format!("\tnaive={v}"));
                agree &= d == v;
            }
            let layered_ok = match spec {
                None => true,
                Some(s) => {
                    let r = s.resolve(n);
                    r.iter().all(|&p| p == 0 || p == n)
                }
            };
            if layered_ok {
                let l = run_layered(n, spec.as_ref(), SymmetryMode::None, &store)?.count;
                line.push_str(&format!("\tlayered={l}"));
                agree &= d == l;
            }
            line.push_str(if agree { "\tok" } else { "\tMISMATCH" });
            println!("{line}");
            if !agree {
                disagreements.push(line);
            }
        }
    }
    if disagreements.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} disagreement(s):", disagreements.len());
        for d in &disagreements {
            eprintln!("{d}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_layered_build(n_max: usize, store_dir: &PathBuf) -> Result<ExitCode, String> {
    let store = layered::Store::new(store_dir).map_err(|e| e.to_string())?;
    layered::build_up_to(n_max, &store).map_err(|e| e.to_string())?;
    println!("n\tcount\tfile");
    for n in 1..=n_max {
        let level = store.read_level(n).map_err(|e| e.to_string())?;
        println!("{n}\t{}\t{}", level.members.len(), store.path(n).display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Enumerate { class, n, common } => cmd_enumerate(class, *n, common),
        Cmd::Table { class, n_max, common } => cmd_table(class, *n_max, common),
        Cmd::Check { perm, spec, out } => cmd_check(perm, spec, out.as_ref()),
        Cmd::VerifyCert { path } => cmd_verify_cert(path),
        Cmd::Crossvalidate { n_max } => cmd_crossvalidate(*n_max),
        Cmd::LayeredBuild { n_max, store } => cmd_layered_build(*n_max, store),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
