//! The `semrep` command line.
//!
//! Documents go to stdout in canonical serialization, reports go to stdout
//! one finding per line, diagnostics go to stderr. Exit codes: 0 success,
//! 1 validation errors or fusion conflicts, 2 usage or input errors.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use semrep::fusion::{merge, Correspondence, FusionSession, HistoryEntry};
use semrep::registry::{load_registry, map_categories, registry_diff, validate, CategoryMapping, ValidateOptions};
use semrep::underspec::{best_reading, bind, enumerate_readings, prune, reading_count, Reading, DEFAULT_CAP};
use semrep::xml::{parse_bytes, serialize, FormatProfile};
use semrep::{Id, NodeKind, Registry, SemRep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Failure,
    Usage,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Failure => 1,
            ExitStatus::Usage => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "semrep", version, about = "Validate, resolve, and merge semantic representation documents")]
struct Cli {
    /// Data category registry (defaults to the bundled one)
    #[arg(long, global = true, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Format profile in TOML
    #[arg(long, global = true, value_name = "FILE")]
    profile: Option<PathBuf>,
    /// Treat unknown categories as errors
    #[arg(long, global = true)]
    strict: bool,
    /// Maximum number of readings to enumerate
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check documents against the registry
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the canonical serialization
    Canon { file: PathBuf },
    /// List readings with their scores
    Readings { file: PathBuf },
    /// Print the highest-scoring reading
    Best { file: PathBuf },
    /// Keep one alternative of a group
    Prune {
        file: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long)]
        keep: usize,
    },
    /// Fix a label variable to one node of its domain
    Bind {
        file: PathBuf,
        #[arg(long)]
        var: String,
        #[arg(long)]
        node: String,
    },
    /// Merge two documents
    Merge {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        corr: CorrArgs,
    },
    /// Merge a document into a session directory
    Assimilate {
        #[arg(long, value_name = "DIR")]
        session: PathBuf,
        file: PathBuf,
        #[command(flatten)]
        corr: CorrArgs,
    },
    /// Rename categories through a mapping file
    Map {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        mapping: PathBuf,
    },
    /// Compare two registries
    Regdiff { a: PathBuf, b: PathBuf },
    /// Print element counts and the number of readings
    Stats { file: PathBuf },
}

#[derive(clap::Args, Debug)]
struct CorrArgs {
    /// Co-referring nodes as left=right; repeatable
    #[arg(long = "corr", value_name = "LEFT=RIGHT")]
    pairs: Vec<String>,
    /// File with one whitespace-separated pair per line
    #[arg(long = "corr-file", value_name = "FILE")]
    corr_file: Option<PathBuf>,
}

/// A failure that ends the command with the given status.
struct Fail(ExitStatus, String);

impl Fail {
    fn usage(msg: impl Into<String>) -> Self {
        Fail(ExitStatus::Usage, msg.into())
    }
}

struct Env<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    profile: FormatProfile,
    registry: Registry,
    options: ValidateOptions,
    cap: usize,
}

pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = stdout.write_all(rendered.as_bytes());
                ExitStatus::Success
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
                ExitStatus::Usage
            };
        }
    };
    match setup(&cli, stdin, stdout, stderr) {
        Ok(mut env) => match dispatch(&cli.command, &mut env) {
            Ok(status) => status,
            Err(Fail(status, msg)) => {
                let _ = writeln!(env.err, "semrep: {msg}");
                status
            }
        },
        Err((Fail(status, msg), err)) => {
            let _ = writeln!(err, "semrep: {msg}");
            status
        }
    }
}

#[allow(clippy::type_complexity)]
fn setup<'a>(
    cli: &Cli,
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
) -> Result<Env<'a>, (Fail, &'a mut dyn Write)> {
    let profile = match &cli.profile {
        None => Ok(FormatProfile::default()),
        Some(p) => read_text(p)
            .and_then(|t| FormatProfile::from_toml(&t).map_err(|e| Fail::usage(format!("{}: {e}", p.display())))),
    };
    let registry = match &cli.registry {
        None => Ok(Registry::default_registry()),
        Some(p) => load_registry_file(p),
    };
    match (profile, registry) {
        (Ok(profile), Ok(registry)) => Ok(Env {
            stdin,
            out,
            err,
            profile,
            registry,
            options: ValidateOptions { strict: cli.strict },
            cap: cli.cap.max(1),
        }),
        (Err(f), _) | (_, Err(f)) => Err((f, err)),
    }
}

fn read_text(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn load_registry_file(path: &Path) -> Result<Registry, Fail> {
    let text = read_text(path)?;
    load_registry(&text).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

impl Env<'_> {
    fn read_bytes(&mut self, path: &Path) -> Result<Vec<u8>, Fail> {
        if path == Path::new("-") {
            let mut buf = Vec::new();
            self.stdin.read_to_end(&mut buf).map_err(|e| Fail::usage(format!("stdin: {e}")))?;
            return Ok(buf);
        }
        fs::read(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
    }

    /// Parses a document; diagnostics go to stderr prefixed with the path.
    fn load(&mut self, path: &Path) -> Result<SemRep, Fail> {
        let bytes = self.read_bytes(path)?;
        let outcome = parse_bytes(&bytes, &self.profile);
        for d in &outcome.diagnostics.items {
            let _ = writeln!(self.err, "{}:{d}", path.display());
        }
        outcome.doc.ok_or_else(|| Fail::usage(format!("{}: not a well-formed document", path.display())))
    }

    fn emit_doc(&mut self, doc: &SemRep) -> Result<(), Fail> {
        let text = serialize(doc, &self.profile).map_err(|e| Fail(ExitStatus::Failure, e.to_string()))?;
        self.write(&text)
    }

    fn write(&mut self, s: &str) -> Result<(), Fail> {
        self.out.write_all(s.as_bytes()).map_err(|e| Fail::usage(format!("stdout: {e}")))
    }

    fn line(&mut self, s: &str) -> Result<(), Fail> {
        self.write(s)?;
        self.write("\n")
    }

    fn correspondence(&mut self, args: &CorrArgs) -> Result<Correspondence, Fail> {
        let mut pairs = Vec::new();
        if let Some(f) = &args.corr_file {
            let text = read_text(f)?;
            let parsed = Correspondence::parse(&text).map_err(|e| Fail::usage(format!("{}: {e}", f.display())))?;
            pairs.extend(parsed.pairs().iter().cloned());
        }
        for p in &args.pairs {
            let (l, r) =
                p.split_once('=').ok_or_else(|| Fail::usage(format!("--corr expects LEFT=RIGHT, got `{p}`")))?;
            pairs.push((Id::new_unchecked(l.trim()), Id::new_unchecked(r.trim())));
        }
        Correspondence::new(pairs).map_err(|e| Fail::usage(e.to_string()))
    }
}

fn dispatch(cmd: &Command, env: &mut Env) -> Result<ExitStatus, Fail> {
    match cmd {
        Command::Validate { files } => cmd_validate(env, files),
        Command::Canon { file } => {
            let doc = env.load(file)?;
            env.emit_doc(&doc)?;
            Ok(ExitStatus::Success)
        }
        Command::Readings { file } => cmd_readings(env, file),
        Command::Best { file } => {
            let doc = env.load(file)?;
            let best = best_reading(&doc, env.cap).map_err(|e| Fail(ExitStatus::Failure, e.to_string()))?;
            env.emit_doc(&best.ground.rep)?;
            let _ = writeln!(env.err, "score: {} ({})", best.score(), describe(&doc, &best));
            Ok(ExitStatus::Success)
        }
        Command::Prune { file, group, keep } => {
            let doc = env.load(file)?;
            let out = prune(&doc, group, *keep).map_err(|e| Fail::usage(e.to_string()))?;
            env.emit_doc(&out)?;
            Ok(ExitStatus::Success)
        }
        Command::Bind { file, var, node } => {
            let doc = env.load(file)?;
            let out = bind(&doc, var, node).map_err(|e| Fail::usage(e.to_string()))?;
            env.emit_doc(&out)?;
            Ok(ExitStatus::Success)
        }
        Command::Merge { left, right, corr } => {
            let a = env.load(left)?;
            let b = env.load(right)?;
            let c = env.correspondence(corr)?;
            match merge(&a, &b, &c, &env.registry).map_err(|e| Fail::usage(e.to_string()))? {
                Ok(m) => {
                    for w in &m.warnings {
                        let _ = writeln!(env.err, "warning: {w}");
                    }
                    env.emit_doc(&m.doc)?;
                    Ok(ExitStatus::Success)
                }
                Err(report) => {
                    env.write(&report.to_string())?;
                    Ok(ExitStatus::Failure)
                }
            }
        }
        Command::Assimilate { session, file, corr } => cmd_assimilate(env, session, file, corr),
        Command::Map { file, mapping } => {
            let doc = env.load(file)?;
            let text = read_text(mapping)?;
            let m = CategoryMapping::parse(&text).map_err(|e| Fail::usage(format!("{}: {e}", mapping.display())))?;
            let out = map_categories(&doc, &m).map_err(|e| Fail(ExitStatus::Failure, e.to_string()))?;
            env.emit_doc(&out)?;
            Ok(ExitStatus::Success)
        }
        Command::Regdiff { a, b } => {
            let ra = load_registry_file(a)?;
            let rb = load_registry_file(b)?;
            env.write(&registry_diff(&ra, &rb).to_string())?;
            Ok(ExitStatus::Success)
        }
        Command::Stats { file } => cmd_stats(env, file),
    }
}

fn cmd_validate(env: &mut Env, files: &[PathBuf]) -> Result<ExitStatus, Fail> {
    let mut status = ExitStatus::Success;
    let many = files.len() > 1;
    for file in files {
        let doc = match env.load(file) {
            Ok(d) => d,
            Err(Fail(s, msg)) => {
                let _ = writeln!(env.err, "semrep: {msg}");
                status = s;
                continue;
            }
        };
        let report = validate(&doc, &env.registry, env.options);
        let prefix = if many { format!("{}: ", file.display()) } else { String::new() };
        for f in &report.findings {
            env.line(&format!("{prefix}{}: {} [{}] {}", f.severity.as_str(), f.location, f.rule, f.message))?;
        }
        env.line(&format!("{prefix}{}", report.summary()))?;
        if !report.is_valid() && status == ExitStatus::Success {
            status = ExitStatus::Failure;
        }
    }
    Ok(status)
}

/// The distinguishing part of a reading: chosen alternative values, then
/// variable bindings.
fn describe(doc: &SemRep, r: &Reading) -> String {
    let mut parts = Vec::new();
    for (gid, i) in &r.selection.alternatives {
        let g = doc.alt_group(gid.as_str()).expect("selection names a group");
        parts.extend(g.alternatives[*i].restrictions.iter().map(|x| x.value.lexical()));
    }
    for (v, n) in &r.selection.bindings {
        parts.push(format!("{v}={n}"));
    }
    parts.join(" ")
}

fn cmd_readings(env: &mut Env, file: &Path) -> Result<ExitStatus, Fail> {
    let doc = env.load(file)?;
    let set = enumerate_readings(&doc, env.cap).map_err(|e| Fail(ExitStatus::Failure, e.to_string()))?;
    for r in &set.readings {
        let d = describe(&doc, r);
        let line = if d.is_empty() { r.score().to_string() } else { format!("{} {d}", r.score()) };
        env.line(&line)?;
    }
    if !set.exhaustive {
        let total = reading_count(&doc).map(|n| n.to_string()).unwrap_or_else(|_| "too many".into());
        let _ = writeln!(env.err, "note: showing {} of {total} readings", set.readings.len());
    }
    Ok(ExitStatus::Success)
}

fn cmd_stats(env: &mut Env, file: &Path) -> Result<ExitStatus, Fail> {
    let doc = env.load(file)?;
    let count = |k| doc.nodes.iter().filter(|n| n.kind == k).count();
    let readings = reading_count(&doc).map(|n| n.to_string()).map_err(|e| Fail(ExitStatus::Failure, e.to_string()))?;
    let lines = [
        ("nodes", doc.nodes.len().to_string()),
        ("events", count(NodeKind::Event).to_string()),
        ("participants", count(NodeKind::Participant).to_string()),
        ("relations", doc.relations.len().to_string()),
        ("groups", doc.alt_groups.len().to_string()),
        ("alternatives", doc.alt_groups.iter().map(|g| g.alternatives.len()).sum::<usize>().to_string()),
        ("variables", doc.variables.len().to_string()),
        ("readings", readings),
    ];
    for (k, v) in lines {
        env.line(&format!("{k}: {v}"))?;
    }
    Ok(ExitStatus::Success)
}

const CURRENT: &str = "current.xml";
const HISTORY: &str = "history.log";

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

fn cmd_assimilate(env: &mut Env, dir: &Path, file: &Path, corr: &CorrArgs) -> Result<ExitStatus, Fail> {
    let doc = env.load(file)?;
    let c = env.correspondence(corr)?;
    fs::create_dir_all(dir).map_err(|e| Fail::usage(format!("{}: {e}", dir.display())))?;
    let current_path = dir.join(CURRENT);
    let history_path = dir.join(HISTORY);

    let log = if history_path.exists() { read_text(&history_path)? } else { String::new() };
    let mut history = Vec::new();
    for (i, line) in log.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [id, ts, outcome] = fields[..] else {
            return Err(Fail::usage(format!("{}:{}: expected `id timestamp outcome`", history_path.display(), i + 1)));
        };
        let ts: u64 =
            ts.parse().map_err(|_| Fail::usage(format!("{}:{}: bad timestamp", history_path.display(), i + 1)))?;
        if outcome == "merged" {
            history.push(HistoryEntry { doc_id: Id::new_unchecked(id), timestamp: ts });
        }
    }
    let mut session = if current_path.exists() {
        let current = env.load(&current_path)?;
        FusionSession::resume(current, history).map_err(|e| Fail::usage(e.to_string()))?
    } else {
        FusionSession::new(Id::new_unchecked("session"))
    };
    // Steps count every logged attempt so renaming suffixes never repeat.
    session.step = log.lines().count() as u64;

    let now = now_ms();
    let timestamp = doc.meta.environment.as_ref().and_then(|e| e.timestamp).unwrap_or(now);
    let outcome = session.assimilate(&doc, &c, &env.registry, now).map_err(|e| Fail::usage(e.to_string()))?;
    let (status, word) = match outcome {
        Ok(warnings) => {
            for w in &warnings {
                let _ = writeln!(env.err, "warning: {w}");
            }
            let text =
                serialize(&session.current, &env.profile).map_err(|e| Fail(ExitStatus::Failure, e.to_string()))?;
            fs::write(&current_path, text).map_err(|e| Fail::usage(format!("{}: {e}", current_path.display())))?;
            (ExitStatus::Success, "merged")
        }
        Err(report) => {
            env.write(&report.to_string())?;
            (ExitStatus::Failure, "conflict")
        }
    };
    let mut log = log;
    log.push_str(&format!("{} {timestamp} {word}\n", doc.id));
    fs::write(&history_path, log).map_err(|e| Fail::usage(format!("{}: {e}", history_path.display())))?;
    Ok(status)
}
