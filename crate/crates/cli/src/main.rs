use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use opetope_core::coding::{to_named_derivation, to_preopetope, Namer};
use opetope_core::complex::{materialize, Complex};
use opetope_core::counting::{count, count_oracle};
use opetope_core::named::alpha_equivalent;
use opetope_core::nset::os_repr;
use opetope_core::preopetope::Preopetope;
use opetope_core::textio::{
    complex_to_json, named_script, parse_preopetope, parse_script, preopetope_to_json, sequent_to_json,
    serialize_address, value_to_json, TextError, Value,
};
use opetope_core::unnamed::{derive, target_of};
use opetope_core::uset::u_materialize;

#[derive(Parser)]
#[command(name = "opetope", version, about = "Check opetope and opetopic-set derivations")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Calculus {
    Named,
    Unnamed,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run derivation scripts and print their conclusions. Directories are scanned for `.drv` files.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Check this many files at once.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Decide whether a preopetope is an opetope.
    Decide {
        input: String,
        /// Print the deconstruction step that fails.
        #[arg(long)]
        explain: bool,
    },
    /// Print the target of an opetope and its leaf-to-node readdressing.
    Target { input: String },
    /// Count the cells of the representable opetopic set of an opetope.
    Count {
        input: String,
        /// Cross-check against the size of the materialized representable.
        #[arg(long)]
        oracle: bool,
    },
    /// Translate between the named and unnamed presentations.
    Convert {
        input: String,
        #[arg(long, value_enum)]
        to: Calculus,
        /// Translate back and compare with the input.
        #[arg(long)]
        verify: bool,
    },
    /// Print the cell complex of an opetopic set together with the face-identity report.
    Materialize { input: String },
}

/// A failure with its exit code: 1 for rule violations, 2 for unreadable input.
#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Failure {}

fn rule(msg: impl fmt::Display) -> anyhow::Error {
    Failure { code: 1, msg: msg.to_string() }.into()
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(f) = e.downcast_ref::<Failure>() {
        return f.code;
    }
    if let Some(t) = e.downcast_ref::<TextError>() {
        return if t.is_parse() { 2 } else { 1 };
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    1
}

/// A file path if one exists, otherwise the argument itself.
fn read_input(input: &str) -> Result<String> {
    let p = Path::new(input);
    if p.is_file() {
        return fs::read_to_string(p).with_context(|| format!("reading {input}"));
    }
    Ok(input.to_string())
}

fn is_script(text: &str) -> bool {
    text.lines().map(str::trim).find(|l| !l.is_empty()).is_some_and(|l| l.starts_with("#dialect"))
}

fn load(input: &str) -> Result<Value> {
    let text = read_input(input)?;
    if is_script(&text) {
        return Ok(parse_script(&text)?.run()?);
    }
    Ok(Value::Preopetope(parse_preopetope(&text)?))
}

fn load_preopetope(input: &str) -> Result<Preopetope> {
    match load(input)? {
        Value::Preopetope(p) => Ok(p),
        Value::Unnamed(s) => Ok(s.src),
        Value::Named(s) => Ok(to_preopetope(&s).map_err(rule)?),
        v => Err(rule(format!("expected an opetope, found {}", kind(&v)))),
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Preopetope(_) => "a preopetope",
        Value::Unnamed(_) => "an unnamed sequent",
        Value::Named(_) => "a named sequent",
        Value::Set(_) => "an OCMT",
        Value::Context(_) => "a context",
    }
}

fn check_one(path: &Path, format: Format) -> (Result<String>, PathBuf) {
    let run = || -> Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let v = parse_script(&text)?.run()?;
        Ok(match format {
            Format::Text => v.to_string(),
            Format::Json => value_to_json(&v).to_string(),
        })
    };
    (run(), path.to_path_buf())
}

fn collect(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.extension().is_some_and(|x| x == "drv"))
                .collect();
            entries.sort();
            out.extend(entries);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn cmd_check(paths: &[PathBuf], jobs: usize, format: Format, out: &mut dyn Write) -> Result<()> {
    let files = collect(paths)?;
    let jobs = jobs.max(1).min(files.len().max(1));
    let chunk = files.len().div_ceil(jobs).max(1);
    let results: Vec<(Result<String>, PathBuf)> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|p| check_one(p, format)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("checker thread panicked")).collect()
    });
    let single = results.len() == 1;
    let mut worst: Option<anyhow::Error> = None;
    for (r, path) in results {
        match r {
            Ok(s) if single => writeln!(out, "{s}")?,
            Ok(s) => writeln!(out, "{}: {s}", path.display())?,
            Err(e) => {
                eprintln!("{}: {e:#}", path.display());
                if worst.as_ref().is_none_or(|w| exit_code(&e) > exit_code(w)) {
                    worst = Some(e);
                }
            }
        }
    }
    match worst {
        Some(e) => Err(Failure { code: exit_code(&e), msg: "some scripts failed".into() }.into()),
        None => Ok(()),
    }
}

fn cmd_decide(input: &str, explain: bool, format: Format, out: &mut dyn Write) -> Result<()> {
    let p = load_preopetope(input)?;
    let verdict = derive(&p);
    match format {
        Format::Json => {
            let reason = verdict.as_ref().err().map(ToString::to_string);
            writeln!(out, "{}", json!({ "opetope": verdict.is_ok(), "reason": reason }))?;
        }
        Format::Text => {
            writeln!(out, "{}", verdict.is_ok())?;
            if let (true, Err(r)) = (explain, &verdict) {
                writeln!(out, "{r}")?;
            }
        }
    }
    match verdict {
        Ok(_) => Ok(()),
        Err(_) => Err(Failure { code: 1, msg: "not an opetope".into() }.into()),
    }
}

fn cmd_target(input: &str, format: Format, out: &mut dyn Write) -> Result<()> {
    let p = load_preopetope(input)?;
    derive(&p).map_err(|r| rule(format!("not an opetope: {r}")))?;
    let (t, readdr) = target_of(&p).map_err(rule)?;
    match format {
        Format::Json => {
            let table: Vec<_> =
                readdr.iter().map(|(l, n)| json!([serialize_address(l), serialize_address(n)])).collect();
            let t = t.as_ref().map_or(serde_json::Value::Null, preopetope_to_json);
            writeln!(out, "{}", json!({ "target": t, "readdressing": table }))?;
        }
        Format::Text => {
            writeln!(out, "{}", t.map_or("0".to_string(), |t| t.to_string()))?;
            for (l, n) in &readdr {
                writeln!(out, "{} -> {}", serialize_address(l), serialize_address(n))?;
            }
        }
    }
    Ok(())
}

fn cmd_count(input: &str, oracle: bool, format: Format, out: &mut dyn Write) -> Result<()> {
    let p = load_preopetope(input)?;
    let n = count(&p).map_err(rule)?;
    let o = if oracle { Some(count_oracle(&p).map_err(rule)?) } else { None };
    match format {
        Format::Json => writeln!(out, "{}", json!({ "count": n, "oracle": o }))?,
        Format::Text => match o {
            Some(o) => writeln!(out, "{n} (oracle {o})")?,
            None => writeln!(out, "{n}")?,
        },
    }
    if o.is_some_and(|o| o != n) {
        return Err(rule(format!("count {n} differs from the oracle {}", o.unwrap_or_default())));
    }
    Ok(())
}

fn cmd_convert(input: &str, to: Calculus, verify: bool, format: Format, out: &mut dyn Write) -> Result<()> {
    match (to, load(input)?) {
        (Calculus::Unnamed, Value::Named(s)) => {
            let p = to_preopetope(&s).map_err(rule)?;
            if verify {
                let (back, _) = to_named_derivation(&p, &mut Namer::default()).map_err(rule)?;
                if !alpha_equivalent(&back, &s) {
                    return Err(rule(format!("round trip changed the sequent: {back}")));
                }
            }
            match format {
                Format::Json => writeln!(out, "{}", preopetope_to_json(&p))?,
                Format::Text => writeln!(out, "{p}")?,
            }
        }
        (Calculus::Unnamed, v) => return Err(rule(format!("expected a named sequent, found {}", kind(&v)))),
        (Calculus::Named, v) => {
            let p = match v {
                Value::Preopetope(p) => p,
                Value::Unnamed(s) => s.src,
                v => return Err(rule(format!("expected an opetope, found {}", kind(&v)))),
            };
            let (s, d) = to_named_derivation(&p, &mut Namer::default()).map_err(rule)?;
            if verify {
                let back = to_preopetope(&s).map_err(rule)?;
                if back != p {
                    return Err(rule(format!("round trip changed the preopetope: {back}")));
                }
            }
            match format {
                Format::Json => writeln!(out, "{}", json!({ "sequent": sequent_to_json(&s), "script": named_script(&d) }))?,
                Format::Text => write!(out, "{s}\n\n{}", named_script(&d))?,
            }
        }
    }
    Ok(())
}

fn complex_of(v: Value) -> Result<Complex> {
    let named = |s| os_repr(&s).map_err(rule);
    let set = match v {
        Value::Context(c) => return Ok(u_materialize(&c)),
        Value::Set(o) => o,
        Value::Named(s) => named(s)?,
        Value::Preopetope(p) => named(to_named_derivation(&p, &mut Namer::default()).map_err(rule)?.0)?,
        Value::Unnamed(s) => named(to_named_derivation(&s.src, &mut Namer::default()).map_err(rule)?.0)?,
    };
    materialize(&set).map_err(rule)
}

fn cmd_materialize(input: &str, format: Format, out: &mut dyn Write) -> Result<()> {
    let c = complex_of(load(input)?)?;
    let j = complex_to_json(&c);
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?,
        Format::Text => {
            write!(out, "{c}")?;
            match &j["identities"]["error"] {
                serde_json::Value::String(e) => writeln!(out, "identities: FAILED: {e}")?,
                _ => writeln!(out, "identities: ok")?,
            }
        }
    }
    if j["identities"]["ok"] != json!(true) {
        return Err(rule("face identities do not hold"));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let f = cli.format;
    match cli.cmd {
        Cmd::Check { paths, jobs } => cmd_check(&paths, jobs, f, &mut out),
        Cmd::Decide { input, explain } => cmd_decide(&input, explain, f, &mut out),
        Cmd::Target { input } => cmd_target(&input, f, &mut out),
        Cmd::Count { input, oracle } => cmd_count(&input, oracle, f, &mut out),
        Cmd::Convert { input, to, verify } => cmd_convert(&input, to, verify, f, &mut out),
        Cmd::Materialize { input } => cmd_materialize(&input, f, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            if !e.downcast_ref::<Failure>().is_some_and(|f| f.msg == "not an opetope" || f.msg == "some scripts failed") {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
