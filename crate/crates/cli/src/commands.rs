use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fleas::algebra::{count_normal_forms, free_check, verify_relations, word_matrix};
use fleas::lattice::{
    parity_profile, primitivity_index, quadruple_of, rescale_primitive, side_squares, ParityProfile,
};
use fleas::obstruction::{audit_orbit, AUDIT_RESIDUE_BUDGET};
use fleas::orbit::{brute_orbit, is_reduced, scan as run_scan, search_quadruple, ScanOptions};
use fleas::{fixtures, reduce, ComponentLabel, PointTriple, Quadruple, SearchOptions, SideSquares, Word};
use serde_json::json;

use crate::config::{Config, Format, Overrides};
use crate::{CheckFailed, Input, UsageError};

const SCHEMA_VERSION: u32 = 1;

fn resolve_input(input: &Input) -> Result<PointTriple> {
    if let Some(name) = &input.fixture {
        return fixtures::by_name(name).ok_or_else(|| {
            UsageError(format!("unknown fixture `{name}` (known: {})", fixtures::NAMES.join(", "))).into()
        });
    }
    if input.points.is_empty() {
        return Err(UsageError("give three points `x1,y1 x2,y2 x3,y3` or --fixture".into()).into());
    }
    let tokens: Vec<&str> = input.points.iter().flat_map(|p| p.split_whitespace()).collect();
    Ok(PointTriple::parse_list(&tokens)?)
}

fn parse_word(text: &str) -> Result<Word> {
    Ok(text.parse::<Word>()?)
}

/// Writes `text` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            log::info!("wrote {}", p.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn analysis(t: &PointTriple) -> Result<serde_json::Value> {
    let q = quadruple_of(t)?;
    let SideSquares([a2, b2, c2]) = side_squares(t)?;
    let reduction = reduce(q)?;
    Ok(json!({
        "points": t,
        "side_squares": { "A": a2, "B": b2, "C": c2 },
        "quadruple": q,
        "parity_profile": parity_profile(&SideSquares([a2, b2, c2])),
        "is_reduced": is_reduced(q),
        "reduction": reduction,
    }))
}

pub fn analyze(input: &Input) -> Result<()> {
    let t = resolve_input(input)?;
    let index = primitivity_index(&t)?;
    let mut doc = analysis(&t)?;
    doc["schema_version"] = json!(SCHEMA_VERSION);
    doc["primitivity_index"] = json!(index.0);
    doc["primitive"] = json!(index.is_primitive());
    if !index.is_primitive() {
        let (prim, _) = rescale_primitive(&t)?;
        log::info!("index {} triple; analysis repeated on the primitive lattice", index.0);
        doc["rescaled"] = analysis(&prim)?;
    }
    if doc["parity_profile"] == json!(ParityProfile::Other) && index.is_primitive() {
        log::warn!("primitive triple without the usual side-square parity pattern");
    }
    emit(None, &serde_json::to_string_pretty(&doc)?)
}

fn parse_components(names: Option<Vec<String>>) -> Result<Option<Vec<ComponentLabel>>> {
    names
        .map(|v| {
            v.iter()
                .map(|n| n.parse::<ComponentLabel>().map_err(|e| UsageError(e.to_string()).into()))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()
}

pub fn search(
    input: &Input,
    config: Option<&Path>,
    flags: &Overrides,
    resume: bool,
    components: Option<Vec<String>>,
    pause_after: Option<u64>,
) -> Result<()> {
    let cfg = Config::resolve(config, flags)?;
    let t = resolve_input(input)?;
    if (resume || pause_after.is_some()) && cfg.checkpoint.is_none() {
        return Err(UsageError("--resume and --pause-after need --checkpoint".into()).into());
    }
    let opts = SearchOptions {
        workers: cfg.workers,
        memory_budget: cfg.memory_budget,
        checkpoint_dir: cfg.checkpoint.clone(),
        resume,
        components: parse_components(components)?,
        pause_after,
    };
    log::info!("searching {t} up to s = {} with {} worker(s)", cfg.bound, cfg.workers);
    let report = fleas::search(&t, cfg.bound, &opts)?;
    if report.input.primitivity_index > 1 {
        log::warn!(
            "input has sublattice index {}; searched the primitive triple {}",
            report.input.primitivity_index,
            report.input.search_points.expect("rescaled triple is echoed")
        );
    }
    log::info!(
        "{} states, {} values reached, {} integer and {} half-integer misses",
        report.stats.states_visited,
        report.combined_reached,
        report.missed_integers.len(),
        report.missed_half_integers.len()
    );
    let text = match cfg.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(cfg.output.as_deref(), &text)
}

pub fn normalize(text: &str) -> Result<()> {
    let w = parse_word(text)?;
    let nf = fleas::normalize(&w);
    let equal = nf.matrix()? == word_matrix(&w)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "word": w,
        "body": nf.body,
        "tail": nf.tail.to_string(),
        "matrix_equal": equal,
    });
    emit(None, &serde_json::to_string_pretty(&doc)?)?;
    if !equal {
        return Err(CheckFailed(format!("normal form of `{w}` has a different matrix")).into());
    }
    Ok(())
}

pub fn simulate(input: &Input, text: &str, output: Option<PathBuf>) -> Result<()> {
    let t = resolve_input(input)?;
    let w = parse_word(text)?;
    let trace = fleas::simulate(&t, &w)?;
    let mut buf = Vec::new();
    trace.write_lines(&mut buf)?;
    emit(output.as_deref(), &String::from_utf8(buf)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Relations,
    Free,
    Counts,
    Oracle,
}

/// Brute-force orbit at depth 6 against the decomposition search.
fn oracle_check(name: &str, t: &PointTriple) -> Result<(bool, String)> {
    let q: Quadruple = reduce(quadruple_of(t)?)?.reduced;
    let brute = brute_orbit(q, 6)?;
    let bound = *brute.iter().max().expect("brute orbit contains the start");
    let r = search_quadruple(q, bound, &SearchOptions::default())?;
    let outside: Vec<u64> = brute.iter().copied().filter(|&s| !r.combined.contains(s)).collect();
    Ok((
        outside.is_empty(),
        format!("{name}: {} brute values up to {bound}, {} outside the decomposition", brute.len(), outside.len()),
    ))
}

pub fn verify(suite: Suite) -> Result<()> {
    let mut checks: Vec<(String, bool)> = Vec::new();
    match suite {
        Suite::Relations => {
            checks.extend(verify_relations().checks.into_iter().map(|c| (c.name, c.passed)));
        }
        Suite::Free => {
            let f = free_check(7)?;
            checks.push((
                format!("positive words of length <= 7: {} of {} distinct", f.distinct_positive, f.words_per_sign),
                f.distinct_positive == f.words_per_sign,
            ));
            checks.push((
                format!("negative words of length <= 7: {} of {} distinct", f.distinct_negative, f.words_per_sign),
                f.distinct_negative == f.words_per_sign,
            ));
        }
        Suite::Counts => {
            for n in 0..=6u32 {
                let got = count_normal_forms(n as usize)?;
                let expected = 3usize.pow(n + 1) - 2;
                checks.push((format!("n = {n}: {got} matrices, expected {expected}"), got == expected));
            }
        }
        Suite::Oracle => {
            for (name, t) in [("G", fixtures::g()), ("H", fixtures::h())] {
                let (ok, detail) = oracle_check(name, &t)?;
                checks.push((detail, ok));
            }
        }
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "suite": format!("{suite:?}").to_lowercase(),
        "passed": failed.is_empty(),
        "checks": checks.iter().map(|(n, p)| json!({ "name": n, "passed": p })).collect::<Vec<_>>(),
    });
    emit(None, &serde_json::to_string_pretty(&doc)?)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CheckFailed(format!("failed: {}", failed.join("; "))).into())
    }
}

pub fn audit(input: &Input, config: Option<&Path>, flags: &Overrides, strict: bool) -> Result<()> {
    let cfg = Config::resolve(config, flags)?;
    let t = resolve_input(input)?;
    let (prim, index) = rescale_primitive(&t)?;
    if !index.is_primitive() {
        log::warn!("input has sublattice index {}; auditing the primitive triple {prim}", index.0);
    }
    let opts = SearchOptions { workers: cfg.workers, ..Default::default() };
    let report = audit_orbit(quadruple_of(&prim)?, cfg.bound, &opts, AUDIT_RESIDUE_BUDGET)?;
    log::info!(
        "{} states, {} residue violations, {} nonconforming valuation pairs",
        report.states,
        report.total_violations,
        report.valuation.nonconforming.len()
    );
    emit(cfg.output.as_deref(), &report.to_json())?;
    if strict && !report.passed() {
        return Err(CheckFailed(format!(
            "{} residue violations, nonconforming valuation pairs {:?}",
            report.total_violations, report.valuation.nonconforming
        ))
        .into());
    }
    Ok(())
}

pub fn scan(max_coord: i64, config: Option<&Path>, flags: &Overrides, max_rows: Option<usize>) -> Result<()> {
    let cfg = Config::resolve(config, flags)?;
    if !(1..=fleas::orbit::MAX_SCAN_COORD).contains(&max_coord) {
        return Err(UsageError(format!(
            "--max-coord {max_coord} outside the budget [1, {}]",
            fleas::orbit::MAX_SCAN_COORD
        ))
        .into());
    }
    let table = run_scan(&ScanOptions { max_coord, bound: cfg.bound, workers: cfg.workers, max_rows })?;
    if table.truncated {
        log::warn!("row limit reached: {} of {} orbits tabulated", table.rows.len(), table.orbits);
    }
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&table)?,
        Format::Csv => {
            let mut out = format!(
                "# max_coord={} bound={} orbits={} truncated={}\n",
                table.max_coord, table.bound, table.orbits, table.truncated
            );
            out.push_str("points,fixture,members,max_missed_non_square,missed_half_count,max_missed_half\n");
            let opt = |v: Option<u64>| v.map_or(String::new(), |v| v.to_string());
            for r in &table.rows {
                let p = r.points.points();
                out.push_str(&format!(
                    "\"{} {} {}\",{},{},{},{},{}\n",
                    p[0],
                    p[1],
                    p[2],
                    r.fixture.as_deref().unwrap_or(""),
                    r.members,
                    opt(r.max_missed_non_square),
                    r.missed_half_count,
                    opt(r.max_missed_half)
                ));
            }
            out
        }
    };
    emit(cfg.output.as_deref(), &text)
}
