use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use padic_modelset::catalog::{self, Entry};
use padic_modelset::chair::{self, chair_json, chair_svg, SvgStyle, WindowMode};
use padic_modelset::cutproject::{model_set_points, CutProjectScheme, ModelSetQuery, QueryRange};
use padic_modelset::diffraction::{
    chair_patch, chair_spectrum, fourier_bohr_rational, fourier_module, spectrum_compare, ChairSpectrumEntry,
    TypedPatch1D, CSV_HEADER,
};
use padic_modelset::exactnum::{QuadRational, Rational};
use padic_modelset::limitperiodic;
use padic_modelset::limitquasi;
use padic_modelset::output::{fmt17, to_json_string, F17, SCHEMA_VERSION};
use padic_modelset::substitution::{
    fixed_point_patch, geometric_points, pf_data, recode_pairs, Anchor, SubstitutionSystem,
};

/// Exit status for a failed verification.
const EXIT_VERIFY: u8 = 3;
const EXIT_ERROR: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "padic-modelset", version, about = "Model sets with p-adic and mixed internal spaces")]
struct Cli {
    /// Worker threads for data-parallel work.
    #[arg(long, global = true, env = "PADIC_MODELSET_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a fixed-point patch and its tile endpoints.
    Seqgen(SeqgenArgs),
    /// Check windows against the substitution oracle.
    Verify(VerifyArgs),
    /// Print the windows of a system.
    Windows(WindowsArgs),
    /// Model-set points inside a physical range.
    Modelset(ModelsetArgs),
    /// Chair tiling.
    #[command(subcommand)]
    Chair(ChairCommand),
    /// The Z[√2] limit-quasiperiodic sequence.
    #[command(subcommand)]
    Limitquasi(LimitquasiCommand),
    /// The 3-adic limit-periodic sequence.
    #[command(subcommand)]
    Limitperiodic(LimitperiodicCommand),
    /// Analytic and numeric diffraction.
    Diffract(DiffractArgs),
    /// Render a patch as SVG.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct SystemArg {
    /// Named system or `custom` with `--rules`.
    #[arg(long, default_value = "limitperiodic3")]
    system: String,
    /// Rule file for `--system custom`.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Seed `l|r` for custom systems.
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Args, Debug)]
struct SeqgenArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long, default_value_t = -26, allow_negative_numbers = true)]
    lo: i64,
    #[arg(long, default_value_t = 19, allow_negative_numbers = true)]
    hi: i64,
    /// Record left ends instead of right ends.
    #[arg(long)]
    left: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "limitperiodic3")]
    system: String,
    /// Truncation level of the 3-adic windows.
    #[arg(long = "K", default_value_t = 8)]
    k: u32,
    /// Physical radius.
    #[arg(long = "R", default_value_t = 100)]
    r: i64,
    /// Chair window level.
    #[arg(long, default_value_t = 6)]
    levels: u32,
    /// Sequence steps for limitquasi.
    #[arg(long, default_value_t = 6)]
    steps: u32,
    /// IFS depth for limitquasi.
    #[arg(long, default_value_t = 10)]
    depth: u32,
    /// Run the Dekking coincidence test instead of the window check.
    #[arg(long)]
    dekking: bool,
    /// Diff artifact written on failure.
    #[arg(long, default_value = "verify-diff.json")]
    diff: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct WindowsArgs {
    #[arg(long, default_value = "limitperiodic3")]
    system: String,
    #[arg(long = "K", default_value_t = 8)]
    k: u32,
    #[arg(long, default_value_t = 6)]
    levels: u32,
    #[arg(long, default_value_t = 10)]
    depth: u32,
    /// Use literal cosets for the chair windows.
    #[arg(long)]
    literal: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ModelsetArgs {
    #[arg(long, default_value = "limitperiodic3")]
    system: String,
    #[arg(long = "K", default_value_t = 8)]
    k: u32,
    #[arg(long, default_value_t = 6)]
    levels: u32,
    #[arg(long, default_value_t = 10)]
    depth: u32,
    #[arg(long, default_value_t = -30, allow_negative_numbers = true)]
    lo: i64,
    #[arg(long, default_value_t = 30, allow_negative_numbers = true)]
    hi: i64,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum ChairCommand {
    /// Generate the orientation point sets of T^i(C).
    Gen(ChairGenArgs),
}

#[derive(Args, Debug)]
struct ChairGenArgs {
    #[arg(long, default_value_t = 6)]
    levels: u32,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Point-set JSON; stdout when no path is given.
    #[arg(long, num_args = 0..=1)]
    json: Option<Option<PathBuf>>,
}

#[derive(Subcommand, Debug)]
enum LimitquasiCommand {
    /// Exact checks, frequencies, IFS windows and the sandwich test.
    Run(LimitquasiRunArgs),
}

#[derive(Args, Debug)]
struct LimitquasiRunArgs {
    #[arg(long, default_value_t = 8)]
    steps: u32,
    #[arg(long, default_value_t = 12)]
    depth: u32,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "verify-diff.json")]
    diff: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum LimitperiodicCommand {
    /// Window equivalence on [−R, R].
    Verify(LimitperiodicVerifyArgs),
    /// Exact window measures.
    Measures(LimitperiodicMeasuresArgs),
}

#[derive(Args, Debug)]
struct LimitperiodicVerifyArgs {
    #[arg(long = "K", default_value_t = 8)]
    k: u32,
    #[arg(long = "R", default_value_t = 100)]
    r: i64,
    #[arg(long, default_value = "verify-diff.json")]
    diff: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct LimitperiodicMeasuresArgs {
    #[arg(long = "K", default_value_t = 8)]
    k: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct DiffractArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Patch radius.
    #[arg(long, default_value_t = 6561)]
    r: i64,
    /// Largest power of the denominator.
    #[arg(long, default_value_t = 5)]
    nmax: u32,
    /// Largest wave number.
    #[arg(long, default_value_t = 10)]
    kmax: i64,
    /// Comma-separated weights per tile type.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    weights: Option<Vec<f64>>,
    /// Chair level for `--system chair`.
    #[arg(long, default_value_t = 6)]
    levels: u32,
    /// Strongest peaks used for the tolerance check.
    #[arg(long, default_value_t = 20)]
    strongest: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value = "verify-diff.json")]
    diff: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long, default_value = "chair")]
    system: String,
    #[arg(long, default_value_t = 4)]
    levels: u32,
    #[arg(long, default_value_t = 20)]
    unit: u32,
    #[arg(long)]
    no_arrows: bool,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Outcome of a subcommand.
enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(EXIT_VERIFY),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Seqgen(a) => seqgen(a),
        Command::Verify(a) => verify(a),
        Command::Windows(a) => windows(a),
        Command::Modelset(a) => modelset(a),
        Command::Chair(ChairCommand::Gen(a)) => chair_gen(a),
        Command::Limitquasi(LimitquasiCommand::Run(a)) => limitquasi_run(a),
        Command::Limitperiodic(LimitperiodicCommand::Verify(a)) => limitperiodic_verify(a.k, a.r, &a.diff, a.json),
        Command::Limitperiodic(LimitperiodicCommand::Measures(a)) => limitperiodic_measures(a),
        Command::Diffract(a) => diffract(a),
        Command::Render(a) => render(a),
    }
}

fn with_schema<T: Serialize>(kind: &str, body: &T) -> Result<Value> {
    let mut v = serde_json::to_value(body)?;
    let obj = v.as_object_mut().ok_or_else(|| anyhow!("report is not an object"))?;
    obj.insert("schema".into(), json!(SCHEMA_VERSION));
    obj.insert("kind".into(), json!(kind));
    Ok(v)
}

fn json_text(v: &Value) -> Result<String> {
    Ok(to_json_string(v)?)
}

fn print_json(v: &Value) -> Result<()> {
    print!("{}", json_text(v)?);
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_diff(path: &Path, v: &Value) -> Result<()> {
    write_file(path, &json_text(v)?)?;
    eprintln!("verification failed; diff written to {}", path.display());
    Ok(())
}

fn parse_seed(s: &str) -> Result<(char, char)> {
    let mut it = s.split('|').map(str::trim);
    let (l, r) = (it.next(), it.next());
    match (l, r, it.next()) {
        (Some(l), Some(r), None) if l.chars().count() == 1 && r.chars().count() == 1 => {
            Ok((l.chars().next().unwrap(), r.chars().next().unwrap()))
        }
        _ => bail!("seed must look like `l|r`, got {s:?}"),
    }
}

fn resolve_system(a: &SystemArg) -> Result<Entry> {
    if a.system == "custom" {
        let path = a.rules.as_ref().ok_or_else(|| anyhow!("--system custom needs --rules FILE"))?;
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let system = SubstitutionSystem::parse(&text)?;
        let seed = match &a.seed {
            Some(s) => parse_seed(s)?,
            None => bail!("--system custom needs --seed l|r"),
        };
        return Ok(Entry { name: "custom", system, seed, negative_control: false });
    }
    let mut e = catalog::lookup(&a.system)?;
    if let Some(s) = &a.seed {
        e.seed = parse_seed(s)?;
    }
    Ok(e)
}

fn warn_negative_control(e: &Entry) {
    if e.negative_control {
        eprintln!("warning: {} is a negative control; it is not a model set and has no analytic spectrum", e.name);
    }
}

fn seqgen(a: SeqgenArgs) -> Result<Outcome> {
    if a.lo > a.hi {
        bail!("--lo must not exceed --hi");
    }
    let entry = resolve_system(&a.system)?;
    let lengths =
        catalog::integer_lengths(&entry.system).ok_or_else(|| anyhow!("{} has no integer tile lengths", entry.name))?;
    let anchor = if a.left { Anchor::LeftEnd } else { Anchor::RightEnd };
    let mut n = 0;
    let g = loop {
        let patch = fixed_point_patch(&entry.system, entry.seed, n)?;
        let g = geometric_points(&entry.system, &patch, &lengths, anchor)?;
        if g.lo <= a.lo && g.hi >= a.hi {
            break (g, patch.iterations);
        }
        n += 1;
    };
    let (g, iterations) = g;
    let mut labeled: Vec<(i64, char)> = g.labeled().into_iter().filter(|(x, _)| (a.lo..=a.hi).contains(x)).collect();
    labeled.sort();
    let mut notes = Vec::new();
    if entry.name == "limitperiodic3" && !a.left && a.lo <= -23 && a.hi >= -23 {
        notes.push(
            "the printed left list -26,-24,-21,-18,... omits -23; laying out the left word puts a right end at -23 (tile a on [-24,-23])"
                .to_string(),
        );
    }
    if a.json {
        let points: serde_json::Map<String, Value> = g
            .letters
            .iter()
            .map(|&c| {
                let v: Vec<i64> = labeled.iter().filter(|p| p.1 == c).map(|p| p.0).collect();
                (c.to_string(), json!(v))
            })
            .collect();
        print_json(&json!({
            "schema": SCHEMA_VERSION,
            "kind": "seqgen",
            "system": entry.name,
            "seed": format!("{}|{}", entry.seed.0, entry.seed.1),
            "iterations": iterations,
            "anchor": if a.left { "left" } else { "right" },
            "range": [a.lo, a.hi],
            "endpoints": labeled.iter().map(|p| p.0).collect::<Vec<_>>(),
            "points": points,
            "notes": notes,
        }))?;
    } else {
        for (x, c) in &labeled {
            println!("{x}\t{c}");
        }
        for n in notes {
            eprintln!("note: {n}");
        }
    }
    Ok(Outcome::Ok)
}

fn limitperiodic_verify(k: u32, r: i64, diff: &Path, as_json: bool) -> Result<Outcome> {
    let rep = limitperiodic::verify_against_substitution(k, r)?;
    let v = with_schema("limitperiodic-verify", &rep)?;
    report(&v, as_json, rep.ok, diff, || {
        format!(
            "K={} R={} safe_radius={} mismatches={} ok={}",
            rep.truncation, rep.radius, rep.safe_radius, rep.mismatches, rep.ok
        )
    })
}

fn report(v: &Value, as_json: bool, ok: bool, diff: &Path, summary: impl FnOnce() -> String) -> Result<Outcome> {
    if as_json {
        print_json(v)?;
    } else {
        println!("{}", summary());
    }
    if ok {
        Ok(Outcome::Ok)
    } else {
        write_diff(diff, v)?;
        Ok(Outcome::Failed)
    }
}

fn limitperiodic_measures(a: LimitperiodicMeasuresArgs) -> Result<Outcome> {
    let rep = limitperiodic::measure_report(a.k)?;
    let v = with_schema("limitperiodic-measures", &rep)?;
    if a.json {
        print_json(&v)?;
    } else {
        println!("{}", serde_json::to_string_pretty(&v)?);
    }
    Ok(Outcome::Ok)
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    match a.system.as_str() {
        "limitperiodic3" if !a.dekking => limitperiodic_verify(a.k, a.r, &a.diff, a.json),
        "chair" => {
            let state = chair::chair_recursion(a.levels)?;
            state.check_invariants()?;
            let w = chair::chair_windows(&state)?;
            let check = a.levels.min(3);
            let (lo, side) = chair::square(check)?;
            let hi = (lo.0 + side - 1, lo.1 + side - 1);
            let lab = chair::chair_model_set(&w, lo, hi)?;
            let grid = state.level(check);
            let mut mismatches = Vec::new();
            for (p, k) in grid.iter() {
                if lab.label_of(p) != Some(k) {
                    mismatches.push(json!({"point": [p.0, p.1], "recursion": k, "model_set": lab.label_of(p)}));
                }
            }
            let ok = mismatches.is_empty() && lab.undecided.is_empty();
            let deficit = w.deficit()?;
            let v = json!({
                "schema": SCHEMA_VERSION,
                "kind": "chair-verify",
                "window_level": a.levels,
                "checked_level": check,
                "points": grid.len(),
                "undecided": lab.undecided.len(),
                "mismatches": mismatches,
                "deficit": deficit.to_string(),
                "ok": ok,
            });
            report(&v, a.json, ok, &a.diff, || {
                format!(
                    "chair levels={} checked={} mismatches={} deficit={} ok={ok}",
                    a.levels,
                    check,
                    mismatches.len(),
                    deficit
                )
            })
        }
        "limitquasi" => {
            let rep = limitquasi::sandwich_check(a.steps, a.depth)?;
            let v = with_schema("limitquasi-sandwich", &rep)?;
            report(&v, a.json, rep.ok, &a.diff, || {
                format!(
                    "steps={} depth={} inner_violations={} outer_violations={} ok={}",
                    rep.steps,
                    rep.depth,
                    rep.inner_violations.len(),
                    rep.outer_violations.len(),
                    rep.ok
                )
            })
        }
        name => {
            let entry = catalog::lookup(name)?;
            let (system, recoded) = constant_length_form(&entry)?;
            let coincidence = system.dekking_coincidence(8)?;
            let expected = !entry.negative_control;
            let ok = coincidence.is_some() == expected;
            let v = json!({
                "schema": SCHEMA_VERSION,
                "kind": "dekking",
                "system": entry.name,
                "recoded": recoded,
                "rules": system.rules().map(|(c, w)| format!("{c} -> {w}")).collect::<Vec<_>>(),
                "max_depth": 8,
                "coincidence": coincidence.map(|(d, p)| json!({"depth": d, "position": p})),
                "expected_coincidence": expected,
                "ok": ok,
            });
            report(&v, a.json, ok, &a.diff, || {
                format!("{} coincidence={:?} expected={expected} ok={ok}", entry.name, coincidence)
            })
        }
    }
}

/// The system itself when of constant length, else the recoding `ab -> A`.
fn constant_length_form(entry: &Entry) -> Result<(SubstitutionSystem, bool)> {
    if entry.system.constant_length().is_some() {
        return Ok((entry.system.clone(), false));
    }
    let patch = fixed_point_patch(&entry.system, entry.seed, 3)?;
    let r = recode_pairs(&entry.system, &patch, "ab", 'A')?;
    if r.merge.is_none() || r.system.constant_length().is_none() {
        bail!("{} has no constant-length recoding", entry.name);
    }
    Ok((r.system, true))
}

fn windows(a: WindowsArgs) -> Result<Outcome> {
    match a.system.as_str() {
        "limitperiodic3" => {
            let fam = limitperiodic::windows_abc(a.k)?;
            let mut sets = serde_json::Map::new();
            for &c in limitperiodic::LETTERS.iter() {
                let u = fam.get(c);
                if !a.json {
                    println!("{c}: measure {} {}", u.measure()?, u);
                }
                sets.insert(c.to_string(), json!({"measure": u.measure()?.to_string(), "window": u.to_json()}));
            }
            if a.json {
                print_json(
                    &json!({"schema": SCHEMA_VERSION, "kind": "windows", "system": "limitperiodic3", "truncation": a.k, "windows": sets}),
                )?;
            }
        }
        "chair" => {
            let state = chair::chair_recursion(a.levels)?;
            let mode = if a.literal { WindowMode::Literal } else { WindowMode::Coarsest };
            let w = chair::chair_windows_with(&state, mode)?;
            let ms = w.measures()?;
            let mut sets = serde_json::Map::new();
            for (k, u) in w.omega.iter().enumerate() {
                if !a.json {
                    println!("{k}: measure {} {}", ms[k], u);
                }
                sets.insert(k.to_string(), json!({"measure": ms[k].to_string(), "window": u.to_json()}));
            }
            let deficit = w.deficit()?;
            if a.json {
                print_json(
                    &json!({"schema": SCHEMA_VERSION, "kind": "windows", "system": "chair", "level": a.levels, "mode": mode, "deficit": deficit.to_string(), "windows": sets}),
                )?;
            } else {
                println!("deficit {deficit}");
            }
        }
        "limitquasi" => {
            let q = limitquasi::ifs_windows(a.depth)?;
            let mut out = serde_json::Map::new();
            for (i, c) in ['a', 'b'].iter().enumerate() {
                let proj: Vec<[String; 2]> =
                    q.outer_projection(i).iter().map(|(l, h)| [l.to_string(), h.to_string()]).collect();
                if !a.json {
                    println!("{c}: outer cells {} inner cells {}", count(&q.outer, i), count(&q.inner, i));
                    for [l, h] in &proj {
                        println!("  [{l}, {h}]");
                    }
                }
                out.insert(
                    c.to_string(),
                    json!({"outer_cells": count(&q.outer, i), "inner_cells": count(&q.inner, i), "outer_projection": proj}),
                );
            }
            if a.json {
                print_json(
                    &json!({"schema": SCHEMA_VERSION, "kind": "windows", "system": "limitquasi", "depth": a.depth, "coordinate": "a - b*sqrt2", "windows": out}),
                )?;
            }
        }
        other => bail!("no windows for system {other:?}"),
    }
    Ok(Outcome::Ok)
}

fn count(cells: &[limitquasi::QCell], letter: usize) -> usize {
    cells.iter().filter(|c| c.letter == letter).count()
}

fn modelset(a: ModelsetArgs) -> Result<Outcome> {
    if a.lo > a.hi {
        bail!("--lo must not exceed --hi");
    }
    let (scheme, ws, names, range): (CutProjectScheme, Vec<_>, Vec<String>, QueryRange) = match a.system.as_str() {
        "limitperiodic3" => {
            let fam = limitperiodic::windows_abc(a.k)?;
            let names = limitperiodic::LETTERS.iter().map(|c| c.to_string()).collect();
            (
                CutProjectScheme::from_name("diagonal-Z-3adic")?,
                fam.windows(),
                names,
                QueryRange::Box { lo: vec![a.lo], hi: vec![a.hi] },
            )
        }
        "limitquasi" => {
            let scheme = CutProjectScheme::from_name("sqrt2-phi")?;
            let (outer, _) = limitquasi::ifs_windows(a.depth)?.to_windows(&scheme)?;
            let r = |x: i64| QuadRational::from_rational(Rational::from_integer(x.into()));
            (scheme, outer.to_vec(), vec!["a".into(), "b".into()], QueryRange::Line { lo: r(a.lo), hi: r(a.hi) })
        }
        "chair" => {
            let state = chair::chair_recursion(a.levels)?;
            let w = chair::chair_windows(&state)?;
            let lab = chair::chair_model_set(&w, (a.lo, a.lo), (a.hi, a.hi))?;
            let sets: serde_json::Map<String, Value> = lab
                .sets
                .iter()
                .enumerate()
                .map(|(k, s)| (k.to_string(), json!(s.iter().map(|p| [p.0, p.1]).collect::<Vec<_>>())))
                .collect();
            if a.json {
                print_json(
                    &json!({"schema": SCHEMA_VERSION, "kind": "modelset", "system": "chair", "level": a.levels, "range": [a.lo, a.hi], "sets": sets, "undecided": lab.undecided.len()}),
                )?;
            } else {
                for (k, s) in lab.sets.iter().enumerate() {
                    for p in s {
                        println!("{}\t{}\t{k}", p.0, p.1);
                    }
                }
            }
            return Ok(Outcome::Ok);
        }
        other => bail!("no model set for system {other:?}"),
    };
    let query = ModelSetQuery { range, truncation: a.k };
    let pts = model_set_points(&scheme, &ws, &query)?;
    let rows: Vec<Value> = pts
        .iter()
        .map(|p| {
            json!({
                "x": p.physical.to_string(),
                "lattice": p.lattice,
                "types": p.labels.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    if a.json {
        print_json(
            &json!({"schema": SCHEMA_VERSION, "kind": "modelset", "system": a.system, "range": [a.lo, a.hi], "points": rows}),
        )?;
    } else {
        for p in &pts {
            let t: Vec<&str> = p.labels.iter().map(|&i| names[i].as_str()).collect();
            println!("{}\t{}", p.physical, t.join(","));
        }
    }
    Ok(Outcome::Ok)
}

fn chair_gen(a: ChairGenArgs) -> Result<Outcome> {
    let state = chair::chair_recursion(a.levels)?;
    state.check_invariants()?;
    let top = state.top();
    if let Some(path) = &a.svg {
        let pts: Vec<((i64, i64), usize)> = top.iter().collect();
        write_file(path, &chair_svg(&pts, &SvgStyle::default()))?;
    }
    match &a.json {
        Some(Some(path)) => write_file(path, &json_text(&chair_json(top))?)?,
        Some(None) => print_json(&chair_json(top))?,
        None => {
            let c = top.counts();
            println!("level {} points {} counts {} {} {} {}", a.levels, top.len(), c[0], c[1], c[2], c[3]);
        }
    }
    Ok(Outcome::Ok)
}

fn limitquasi_run(a: LimitquasiRunArgs) -> Result<Outcome> {
    let pf = pf_data(&catalog::limitquasi().system)?;
    let seq = limitquasi::generate_sequence_exact(a.steps)?;
    let conn = limitquasi::inner_strip_connectivity(a.steps.min(12))?;
    let freq = limitquasi::frequency_report(a.steps)?;
    let sandwich = limitquasi::sandwich_check(a.steps.min(8), a.depth)?;
    let (hd, bound) = limitquasi::outer_hausdorff(a.depth.min(limitquasi::MAX_DEPTH - 1))?;
    let q = limitquasi::ifs_windows(a.depth)?;
    let lambda_ok = limitquasi::lambda_image_in_a(&seq);
    let lift_ok = limitquasi::lift_commutes(&seq);
    let ok = sandwich.ok && conn.lifts_in_full_strip && lambda_ok && lift_ok && hd <= bound;
    let v = json!({
        "schema": SCHEMA_VERSION,
        "kind": "limitquasi-run",
        "steps": a.steps,
        "depth": a.depth,
        "pf": pf,
        "counts": {
            "a": seq.of('a').len(),
            "b": seq.of('b').len(),
            "outer_cells": [count(&q.outer, 0), count(&q.outer, 1)],
            "inner_cells": [count(&q.inner, 0), count(&q.inner, 1)],
        },
        "strips": {
            "full": limitquasi::Strip::full().describe(),
            "inner_printed": limitquasi::Strip::inner_printed().describe(),
            "inner": limitquasi::Strip::inner().describe(),
        },
        "lambda_image_in_a": lambda_ok,
        "lift_commutes": lift_ok,
        "connectivity": conn,
        "frequencies": freq,
        "hausdorff": {"depth": a.depth.min(limitquasi::MAX_DEPTH - 1), "distance": F17(hd), "bound": F17(bound)},
        "sandwich": sandwich,
        "ok": ok,
    });
    if let Some(path) = &a.report {
        write_file(path, &json_text(&v)?)?;
    }
    report(&v, a.json, ok, &a.diff, || {
        format!(
            "steps={} depth={} points={} sandwich_ok={} lifts_in_full_strip={} ok={ok}",
            a.steps,
            a.depth,
            seq.all().len(),
            sandwich.ok,
            conn.lifts_in_full_strip
        )
    })
}

fn csv_numeric_only(rows: &[(i64, u32, String, f64)]) -> String {
    let mut s = CSV_HEADER.join(",");
    s.push('\n');
    for (m, n, k, abs2) in rows {
        s.push_str(&format!("{m},{n},{k},,,{},\n", fmt17(*abs2)));
    }
    s
}

fn diffract(a: DiffractArgs) -> Result<Outcome> {
    if a.r <= 0 || a.kmax < 0 {
        bail!("--r must be positive and --kmax non-negative");
    }
    if a.system.system == "chair" {
        let h: [f64; 4] = match a.weights.as_deref() {
            None => [1.0; 4],
            Some(w) => w.try_into().map_err(|_| anyhow!("chair needs 4 weights"))?,
        };
        let patch = chair_patch(a.levels, &h)?;
        let entries = chair_spectrum(&patch, a.nmax);
        if let Some(path) = &a.csv {
            write_file(path, &ChairSpectrumEntry::csv(&entries)?)?;
        }
        if a.json {
            print_json(
                &json!({"schema": SCHEMA_VERSION, "kind": "diffract", "system": "chair", "level": a.levels, "analytic": false, "entries": entries}),
            )?;
        } else {
            println!("chair level {} grid points {}", a.levels, entries.len());
        }
        return Ok(Outcome::Ok);
    }
    let entry = resolve_system(&a.system)?;
    warn_negative_control(&entry);
    let size = entry.system.size();
    let h = a.weights.clone().unwrap_or_else(|| vec![1.0; size]);
    if h.len() != size {
        bail!("{} has {size} tile types but {} weights were given", entry.name, h.len());
    }
    let tp = TypedPatch1D::from_entry(&entry, a.r)?;
    let (lo, hi) = (Rational::from_integer(0.into()), Rational::from_integer(a.kmax.into()));
    if entry.name == "limitperiodic3" {
        let h3: [f64; 3] = h.as_slice().try_into().expect("three weights");
        let elements = fourier_module(a.nmax, &lo, &hi)?;
        let rep = spectrum_compare(&tp, &h3, &elements, a.strongest)?;
        if let Some(path) = &a.csv {
            write_file(path, &rep.to_csv()?)?;
        }
        let v = with_schema("diffract", &rep)?;
        return report(&v, a.json, rep.pass, &a.diff, || {
            format!(
                "r={} elements={} max_rel_err_strongest={} pass={}",
                rep.radius,
                rep.entries.len(),
                fmt17(rep.max_rel_err_strongest.0),
                rep.pass
            )
        });
    }
    let patch = tp.weighted(&h)?;
    let q = 1i64 << a.nmax;
    let rows: Vec<(i64, u32, String, f64)> = (0..=q * a.kmax)
        .map(|m| -> Result<_> {
            let k = Rational::new(m.into(), q.into());
            let (mm, nn) = (k.numer().try_into()?, k.denom().trailing_zeros().unwrap_or(0) as u32);
            let f = fourier_bohr_rational(&patch, m, q)?;
            Ok((mm, nn, padic_modelset::exactnum::fmt_rational(&k), f.norm_sqr()))
        })
        .collect::<Result<_>>()?;
    if let Some(path) = &a.csv {
        write_file(path, &csv_numeric_only(&rows))?;
    }
    if a.json {
        let entries: Vec<Value> =
            rows.iter().map(|(m, n, k, x)| json!({"m": m, "n": n, "k": k, "numeric_abs2": F17(*x)})).collect();
        print_json(&json!({
            "schema": SCHEMA_VERSION,
            "kind": "diffract",
            "system": entry.name,
            "radius": a.r,
            "analytic": false,
            "negative_control": entry.negative_control,
            "denominator": format!("2^{}", a.nmax),
            "entries": entries,
        }))?;
    } else {
        let best = rows.iter().skip(1).map(|r| r.3).fold(0.0, f64::max);
        println!("{} r={} grid points {} max intensity off k=0 {}", entry.name, a.r, rows.len(), fmt17(best));
    }
    Ok(Outcome::Ok)
}

fn render(a: RenderArgs) -> Result<Outcome> {
    if a.system != "chair" {
        bail!("render supports the chair tiling only");
    }
    let state = chair::chair_recursion(a.levels)?;
    let pts: Vec<((i64, i64), usize)> = state.top().iter().collect();
    let style = SvgStyle { unit_px: a.unit, arrows: !a.no_arrows, ..SvgStyle::default() };
    let svg = chair_svg(&pts, &style);
    match &a.svg {
        Some(p) => write_file(p, &svg)?,
        None if !a.json => print!("{svg}"),
        None => {}
    }
    if a.json {
        print_json(
            &json!({"schema": SCHEMA_VERSION, "kind": "render", "system": "chair", "level": a.levels, "points": pts.len(), "svg": a.svg}),
        )?;
    }
    Ok(Outcome::Ok)
}
