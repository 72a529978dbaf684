//! Command-line front end. `run` is the whole program minus process exit, so
//! it can be driven in-process.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::blockgraph;
use crate::characterize::{verify_against, MismatchReport, Oracle, PreparedOracle, ZeroVerdict};
use crate::engine::{build_table, Boundary, GameSpec};
use crate::error::{Error, Result};
use crate::export;
use crate::holding::{holding_profile, verify_persistence};
use crate::reductions::{build_dfao, kernel_report, reduce_to_base, verify_rules};

/// Environment variable naming the directory relative `--out` paths go to.
pub const OUT_DIR_ENV: &str = "SUBDIV_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "subdiv", version, about = "Sprague-Grundy values of subtraction-division games")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GameArgs {
    #[arg(long, default_value_t = 1)]
    a: u64,
    #[arg(long)]
    b: u64,
    /// `virtual:V` (phantom child of value V) or `disallowed`.
    #[arg(long, default_value = "virtual:1")]
    boundary: String,
    /// File of `index,value` lines fixing SG(1), SG(2), ...
    #[arg(long, alias = "prefix-file")]
    overrides: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Values on one comma-separated line.
    List,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute SG(1..=max).
    Compute {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        max: u64,
        #[arg(long, value_enum, default_value_t = Format::List)]
        format: Format,
    },
    /// Verdict of one oracle at one index.
    Characterize {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        n: u64,
        /// residue, theorem1, perturbed or zeroes; chosen from the game when
        /// omitted.
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long)]
        threshold_scale: Option<f64>,
    },
    /// Compare an oracle with the computed table for every n <= max.
    Verify {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        threshold_scale: Option<f64>,
        /// Repeat with this many random prefixes (perturbed oracle only).
        #[arg(long)]
        random_prefixes: Option<u32>,
        /// Random prefixes fix SG(1..N-1) with N drawn from 2..=this.
        #[arg(long, default_value_t = 32)]
        prefix_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Holding profile and persistence of constant blocks.
    Holding {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        max: u64,
    },
    /// The digraph of value triples.
    Blockgraph {
        /// Print the digraph in DOT format.
        #[arg(long, conflicts_with = "verify")]
        dot: bool,
        /// Run the structural checks.
        #[arg(long)]
        verify: bool,
        /// Escape caps are checked for d = 1..=max-d.
        #[arg(long, default_value_t = 3)]
        max_d: u64,
    },
    /// Reduction chain of n in G_{1,b}.
    Reduce {
        #[arg(long)]
        b: u64,
        #[arg(long)]
        n: u64,
    },
    /// Check every reduction rule for n <= max.
    VerifyRules {
        #[arg(long)]
        b: u64,
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Kernel counts of n -> SG(a n) in base b.
    Kernel {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = 512)]
        prefix: u64,
    },
    /// Automaton computing SG(a n) from the base-b digits of n.
    Dfao {
        #[command(flatten)]
        game: GameArgs,
        /// Check the automaton for 1 <= n <= bound.
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[arg(long, default_value_t = 512)]
        prefix: u64,
    },
}

/// Parses `virtual:V`, `virtual` or `disallowed`.
pub fn parse_boundary(s: &str) -> Result<Boundary> {
    match s.split_once(':') {
        None if s == "disallowed" => Ok(Boundary::SubtractDisallowed),
        None if s == "virtual" => Ok(Boundary::VirtualValue(1)),
        Some(("virtual", v)) => v
            .trim()
            .parse::<u8>()
            .ok()
            .filter(|&v| v <= 2)
            .map(Boundary::VirtualValue)
            .ok_or_else(|| Error::Config(format!("boundary value {v:?} is not 0, 1 or 2"))),
        _ => Err(Error::Config(format!("unknown boundary {s:?} (expected virtual:V or disallowed)"))),
    }
}

/// Parses `index,value` lines. Indices must run 1, 2, 3, ... without gaps and
/// values must be 0, 1 or 2. Blank lines and `#` comments are skipped.
pub fn parse_overrides(text: &str) -> Result<BTreeMap<u64, u8>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Config(format!("line {}: expected index,value, got {line:?}", lineno + 1));
        let (i, v) = line.split_once(',').ok_or_else(bad)?;
        let i: u64 = i.trim().parse().map_err(|_| bad())?;
        let v: u8 = v.trim().parse().map_err(|_| bad())?;
        if v > 2 {
            return Err(Error::Config(format!("line {}: value {v} is not 0, 1 or 2", lineno + 1)));
        }
        let expected = map.len() as u64 + 1;
        if i != expected {
            return Err(Error::Config(format!("line {}: index {i}, expected {expected}", lineno + 1)));
        }
        map.insert(i, v);
    }
    Ok(map)
}

pub fn load_overrides(path: &Path) -> Result<BTreeMap<u64, u8>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_overrides(&text)
}

impl GameArgs {
    fn spec(&self) -> Result<GameSpec> {
        let mut spec = GameSpec::new(self.a, self.b)?.with_boundary(parse_boundary(&self.boundary)?);
        if let Some(p) = &self.overrides {
            spec = spec.with_overrides(load_overrides(p)?)?;
        }
        Ok(spec)
    }
}

fn half_of_even(b: u64) -> Result<u64> {
    if b < 2 || !b.is_multiple_of(2) {
        return Err(Error::Config(format!("b must be even and at least 2, got {b}")));
    }
    Ok(b / 2)
}

/// What a subcommand produced: text for the output and its exit code.
struct Report {
    text: String,
    code: i32,
}

impl Report {
    fn json(value: Value, passed: bool) -> Report {
        let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
        text.push('\n');
        Report { text, code: if passed { EXIT_OK } else { EXIT_FAILED } }
    }
}

/// Serializes `body` as an object with the schema version first.
fn with_schema<T: Serialize>(body: &T) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("schema".into(), json!(export::SCHEMA));
    match serde_json::to_value(body).expect("report serializes") {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("value".into(), other);
        }
    }
    Value::Object(obj)
}

fn default_oracle(spec: &GameSpec) -> Oracle {
    if spec.a > 1 {
        Oracle::Zeroes { scale: None }
    } else if spec.overrides.is_empty() {
        Oracle::Theorem1
    } else {
        Oracle::Perturbed { scale: None }
    }
}

#[derive(Serialize)]
struct CharacterizeOut<'a> {
    a: u64,
    b: u64,
    n: u64,
    oracle: &'static str,
    #[serde(flatten)]
    verdict: &'a ZeroVerdict,
}

#[derive(Serialize)]
struct RandomRun {
    prefix: Vec<u8>,
    report: MismatchReport,
}

fn random_prefix_runs(
    b: u64,
    max: u64,
    count: u32,
    prefix_max: u64,
    seed: u64,
    scale: Option<f64>,
    workers: usize,
) -> Result<Report> {
    if prefix_max < 2 {
        return Err(Error::Config("prefix-max must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::with_capacity(count as usize);
    let mut mismatches = 0;
    for _ in 0..count {
        let big_n = rng.random_range(2..=prefix_max);
        let prefix: Vec<u8> = (1..big_n).map(|_| rng.random_range(0..3u8)).collect();
        let overrides = prefix.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v)).collect();
        let spec = GameSpec::new(1, b)?.with_overrides(overrides)?;
        let table = build_table(&spec, max)?;
        let report = verify_against(&table, &Oracle::Perturbed { scale }, workers)?;
        mismatches += report.mismatch_count;
        runs.push(RandomRun { prefix, report });
    }
    let body = json!({
        "schema": export::SCHEMA,
        "seed": seed,
        "b": b,
        "max": max,
        "mismatch_count": mismatches,
        "runs": runs,
    });
    Ok(Report::json(body, mismatches == 0))
}

fn execute(command: Command) -> Result<Report> {
    match command {
        Command::Compute { game, max, format } => {
            let table = build_table(&game.spec()?, max)?;
            let text = match format {
                Format::List => export::to_list(&table),
                Format::Csv => export::to_csv(&table),
                Format::Json => export::to_json(&table) + "\n",
            };
            Ok(Report { text, code: EXIT_OK })
        }
        Command::Characterize { game, n, oracle, threshold_scale } => {
            let spec = game.spec()?;
            let oracle = match oracle {
                Some(name) => Oracle::parse(&name, threshold_scale)?,
                None => match default_oracle(&spec) {
                    Oracle::Perturbed { .. } => Oracle::Perturbed { scale: threshold_scale },
                    Oracle::Zeroes { .. } => Oracle::Zeroes { scale: threshold_scale },
                    o => o,
                },
            };
            let v = PreparedOracle::new(&spec, &oracle)?.verdict(n)?;
            let out = CharacterizeOut { a: spec.a, b: spec.b, n, oracle: oracle.name(), verdict: &v };
            Ok(Report::json(with_schema(&out), true))
        }
        Command::Verify { game, max, oracle, workers, threshold_scale, random_prefixes, prefix_max, seed } => {
            let oracle = Oracle::parse(&oracle, threshold_scale)?;
            if let Some(count) = random_prefixes {
                if !matches!(oracle, Oracle::Perturbed { .. }) || game.a != 1 || game.overrides.is_some() {
                    return Err(Error::Config(
                        "random prefixes need --oracle perturbed, a = 1 and no override file".into(),
                    ));
                }
                return random_prefix_runs(game.b, max, count, prefix_max, seed, threshold_scale, workers);
            }
            let table = build_table(&game.spec()?, max)?;
            let report = verify_against(&table, &oracle, workers)?;
            let passed = report.mismatch_count == 0;
            Ok(Report::json(with_schema(&report), passed))
        }
        Command::Holding { game, max } => {
            let table = build_table(&game.spec()?, max)?;
            let profile = holding_profile(&table)?;
            // Constant blocks of the first gcd length carry over to the next
            // block; with a coprime to b that length is 1 and the check is
            // trivial.
            let g1 = profile.g_sequence.first().copied().unwrap_or(1);
            let persistence = verify_persistence(&table, g1)?;
            let passed = persistence.holds;
            let mut body = with_schema(&profile);
            body["persistence_block"] = json!(g1);
            body["persistence"] = serde_json::to_value(&persistence).expect("report serializes");
            Ok(Report::json(body, passed))
        }
        Command::Blockgraph { dot, verify, max_d } => {
            if dot {
                return Ok(Report { text: blockgraph::to_dot(&blockgraph::build()), code: EXIT_OK });
            }
            if !verify {
                return Err(Error::Config("blockgraph needs --dot or --verify".into()));
            }
            let report = blockgraph::verify(max_d);
            let passed = report.passed;
            Ok(Report::json(with_schema(&report), passed))
        }
        Command::Reduce { b, n } => {
            let chain = reduce_to_base(n, half_of_even(b)?)?;
            Ok(Report::json(with_schema(&chain), true))
        }
        Command::VerifyRules { b, max, workers } => {
            let report = verify_rules(half_of_even(b)?, max, workers)?;
            let passed = report.passed;
            Ok(Report::json(with_schema(&report), passed))
        }
        Command::Kernel { game, depth, prefix } => {
            let report = kernel_report(&game.spec()?, depth, prefix)?;
            let passed = report.stabilized;
            Ok(Report::json(with_schema(&report), passed))
        }
        Command::Dfao { game, bound, prefix } => {
            let spec = game.spec()?;
            let mut dfao = build_dfao(&spec, 0, prefix)?;
            let mismatch = dfao.first_mismatch(&spec, bound)?;
            dfao.validated_to = if mismatch.is_some() { 0 } else { bound };
            let mut body = with_schema(&dfao);
            body["first_mismatch"] = json!(mismatch);
            Ok(Report::json(body, mismatch.is_none()))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        // A rule set or sweep that broke down is a failed check, not bad input.
        Error::Internal(_) => EXIT_FAILED,
        _ => EXIT_CONFIG,
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Runs the program on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                EXIT_CONFIG
            } else {
                let _ = out.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    let report = match execute(cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(p) => {
            let p = resolve_out(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                let _ = std::fs::create_dir_all(parent);
            }
            std::fs::write(&p, report.text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => out.write_all(report.text.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_CONFIG;
    }
    report.code
}
