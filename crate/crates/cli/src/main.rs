use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qmatrank::boardspec::BoardSpec;
use qmatrank::counter::{CountQuery, Counter, CounterConfig, ReductionTrace, ResultKind, DEFAULT_BUDGET};
use qmatrank::diagram::Board;
use qmatrank::fields::prime_power_parts;
use qmatrank::perms::{Permutation, HULL_PATTERNS, SV_PATTERNS};
use qmatrank::qpoly::LaurentPoly;
use qmatrank::rooks::{qrook, Convention};
use qmatrank::series::{i_from_v, sv_from_v, vexillary_prefix, MAX_SCAN_N};
use qmatrank::verify::{run_claim, CLAIMS};

/// Exit code when a count is only known at sample points.
const EXIT_SAMPLES: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "qmatrank",
    version,
    about = "Count matrices over F_q with given rank and forced zeros"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// JSON-lines file of previously computed polynomials (read and appended).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Largest estimated number of oracle states per row.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    /// Comma-separated prime powers to sample instead of the default ones.
    #[arg(long, global = true, value_delimiter = ',')]
    q_list: Option<Vec<u64>>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "QMATRANK_THREADS")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count matrices of a given rank avoiding a board.
    Count {
        /// Board, e.g. `rothe:21534` or `coords:2,2:(1,1)`.
        board: String,
        #[arg(long)]
        rank: usize,
        /// Print as (q-1)^e * q^k * (rest).
        #[arg(long)]
        factor: bool,
        /// Evaluate exactly at one prime power with the oracle.
        #[arg(long)]
        at_q: Option<u64>,
        /// Include the top-level recursion in JSON output.
        #[arg(long)]
        trace: bool,
    },
    /// q-rook number of a board.
    Rook {
        board: String,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value = "SE")]
        convention: Convention,
    },
    /// Properties and diagrams of a permutation.
    Perm {
        word: String,
        /// Print the left hull.
        #[arg(long)]
        hull: bool,
        /// Print the Rothe diagram.
        #[arg(long)]
        rothe: bool,
        /// Print the skew shape and the permutation v built from it.
        #[arg(long)]
        skew: bool,
    },
    /// Strong Bruhat order queries.
    Bruhat {
        word: String,
        /// Rank generating function of the interval above the permutation.
        #[arg(long)]
        poincare: bool,
        /// Permutations covering this one.
        #[arg(long)]
        covers: bool,
        /// Compare with another permutation.
        #[arg(long)]
        leq: Option<String>,
    },
    /// Vexillary, indecomposable vexillary and skew-vexillary counts.
    Series {
        /// Largest length.
        n: usize,
    },
    /// Run a verification sweep.
    Verify {
        /// One of: rothe, poinrothe, rookrothe, rook-equinumerosity, rank1-t, numzeroes.
        claim: String,
        /// Largest permutation length.
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn parse_board(spec: &str) -> Result<(BoardSpec, Board)> {
    let parsed: BoardSpec = spec.parse()?;
    let board = parsed.build()?;
    Ok((parsed, board))
}

fn emit(format: Format, text: &str, query: Value, result: Value, provenance: &str) {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => {
            let out = json!({ "query": query, "result": result, "provenance": provenance });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
    }
}

fn trace_text(trace: Option<&ReductionTrace>) -> String {
    let Some(t) = trace else {
        return "\nno reduction applied".to_string();
    };
    let line = if t.target.transposed { "column" } else { "row" };
    let mut out = format!(
        "\n{:?} reduction at {line} {} ({} special cells):",
        t.target.kind, t.target.index, t.target.cells
    );
    for term in &t.terms {
        out.push_str(&format!(
            "\n  ({}) * count({}, r={})",
            term.coeff,
            term.query.board.to_coords_spec(),
            term.query.r
        ));
    }
    out
}

fn poly_json(p: &LaurentPoly) -> Value {
    json!({ "poly": p.to_string(), "factored": p.factored_string() })
}

fn counter(cli: &Cli) -> Result<Counter> {
    if cli.budget == 0 {
        bail!("--budget must be positive");
    }
    if let Some(qs) = &cli.q_list {
        if let Some(bad) = qs.iter().find(|&&q| prime_power_parts(q).is_none()) {
            bail!("--q-list entry {bad} is not a prime power");
        }
    }
    let config = CounterConfig {
        budget: cli.budget,
        sample_qs: cli.q_list.clone(),
        validate: true,
    };
    Ok(match &cli.cache {
        Some(path) => {
            let (c, report) = Counter::with_cache(config, path)?;
            if report.rejected > 0 {
                eprintln!("warning: ignored {} unusable cache records", report.rejected);
            }
            c
        }
        None => Counter::new(config),
    })
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let format = cli.format;
    match &cli.command {
        Command::Count {
            board,
            rank,
            factor,
            at_q,
            trace,
        } => {
            let (spec, b) = parse_board(board)?;
            let c = counter(&cli)?;
            let query = json!({ "command": "count", "board": spec.to_string(), "rank": rank });
            if let Some(q) = at_q {
                let value = c.count_at(&b, *rank, *q)?;
                let result = json!({ "kind": "value", "q": q, "value": value.to_string() });
                emit(format, &value.to_string(), query, result, "oracle");
                return Ok(0);
            }
            let res = c.count_auto(&CountQuery::new(b, *rank))?;
            match (res.kind, &res.poly) {
                (ResultKind::Polynomial, Some(p)) => {
                    let mut text = if *factor { p.factored_string() } else { p.to_string() };
                    if *trace && format == Format::Text {
                        text.push_str(&trace_text(res.trace.as_ref()));
                    }
                    let mut result = poly_json(p);
                    result["kind"] = json!("polynomial");
                    result["validated_at"] = json!(res.validated_at);
                    if *trace {
                        result["trace"] = serde_json::to_value(&res.trace)?;
                    }
                    let prov = res.provenance.map(|p| p.to_string()).unwrap_or_default();
                    emit(format, &text, query, result, &prov);
                    Ok(0)
                }
                _ => {
                    let samples = res.samples.unwrap_or_default();
                    let text: Vec<String> = samples.rows.iter().map(|(q, v)| format!("q={q}: {v}")).collect();
                    let rows: Vec<Value> = samples.rows.iter().map(|(q, v)| json!([q, v.to_string()])).collect();
                    let quasi = res.quasi.as_ref().map(|f| {
                        let classes: serde_json::Map<String, Value> = f
                            .class_polys
                            .iter()
                            .map(|(k, p)| (format!("{k:?}").to_lowercase(), json!(p.to_string())))
                            .collect();
                        json!({ "classes": classes, "consistent": f.consistent })
                    });
                    let result = json!({ "kind": "samples", "samples": rows, "quasi": quasi });
                    emit(format, &text.join("\n"), query, result, "oracle+interpolation");
                    Ok(EXIT_SAMPLES)
                }
            }
        }
        Command::Rook {
            board,
            rank,
            convention,
        } => {
            let (spec, b) = parse_board(board)?;
            let p = qrook(&b, *rank, *convention)?;
            let query = json!({ "command": "rook", "board": spec.to_string(), "rank": rank, "convention": convention.to_string() });
            emit(format, &p.to_string(), query, poly_json(&p), "formula");
            Ok(0)
        }
        Command::Perm {
            word,
            hull,
            rothe,
            skew,
        } => {
            let w: Permutation = word.parse()?;
            let mut lines = vec![
                format!("word: {w}"),
                format!("inversions: {}", w.inversions()),
                format!("vexillary: {}", w.is_vexillary()),
                format!("skew-vexillary: {}", w.avoids_all(&SV_PATTERNS)),
                format!("avoids 1324, 24153, 31524, 426153: {}", w.avoids_all(&HULL_PATTERNS)),
            ];
            let mut result = json!({
                "inversions": w.inversions(),
                "vexillary": w.is_vexillary(),
                "skew_vexillary": w.avoids_all(&SV_PATTERNS),
                "avoids_hull_patterns": w.avoids_all(&HULL_PATTERNS),
            });
            let board_block = |name: &str, b: &Board, lines: &mut Vec<String>, result: &mut Value| {
                lines.push(format!("{name} ({} cells): {}", b.len(), b.to_coords_spec()));
                lines.push(b.ascii().trim_end().to_string());
                result[name] = json!({ "cells": b.len(), "spec": b.to_coords_spec() });
            };
            if *rothe {
                board_block("rothe", &w.rothe(), &mut lines, &mut result);
            }
            if *hull {
                board_block("hull", &w.left_hull(), &mut lines, &mut result);
                lines.push(format!("hull shape: {}", w.hull_shape()));
                result["hull_shape"] = json!(w.hull_shape().to_string());
            }
            if *skew {
                match w.lambda_mu() {
                    Some(shape) => {
                        let v = w.construct_v()?;
                        lines.push(format!("skew shape: {shape}"));
                        lines.push(format!("v: {v}"));
                        result["skew_shape"] = json!(shape.to_string());
                        result["v"] = json!(v.to_string());
                    }
                    None => {
                        lines.push("skew shape: none (not skew-vexillary)".into());
                        result["skew_shape"] = Value::Null;
                    }
                }
            }
            emit(
                format,
                &lines.join("\n"),
                json!({ "command": "perm", "word": w.to_string() }),
                result,
                "formula",
            );
            Ok(0)
        }
        Command::Bruhat {
            word,
            poincare,
            covers,
            leq,
        } => {
            let w: Permutation = word.parse()?;
            let mut lines = Vec::new();
            let mut result = json!({});
            if *poincare || (!*covers && leq.is_none()) {
                let p = w.poincare()?;
                lines.push(p.to_string());
                result["poincare"] = json!(p.to_string());
            }
            if *covers {
                let up: Vec<String> = w.bruhat_up_covers().iter().map(|u| u.to_string()).collect();
                lines.push(format!("covers: {}", up.join(" ")));
                result["covers"] = json!(up);
            }
            if let Some(other) = leq {
                let v: Permutation = other.parse()?;
                let le = w.bruhat_leq(&v)?;
                lines.push(format!("{w} <= {v}: {le}"));
                result["leq"] = json!(le);
            }
            emit(
                format,
                &lines.join("\n"),
                json!({ "command": "bruhat", "word": w.to_string() }),
                result,
                "formula",
            );
            Ok(0)
        }
        Command::Series { n } => {
            if *n > MAX_SCAN_N {
                bail!("series length limited to {MAX_SCAN_N}");
            }
            let v = vexillary_prefix(*n)?;
            let i = i_from_v(&v);
            let sv = sv_from_v(&v);
            let text = format!("V: {v}\nI: {i}\nSV: {sv}");
            let list = |s: &qmatrank::series::SeriesPrefix| -> Vec<String> {
                s.coeffs.iter().map(|c| c.to_string()).collect()
            };
            let result = json!({ "V": list(&v), "I": list(&i), "SV": list(&sv) });
            emit(format, &text, json!({ "command": "series", "n": n }), result, "formula");
            Ok(0)
        }
        Command::Verify { claim, n } => {
            let c = counter(&cli)?;
            let Some(report) = run_claim(&c, claim, *n)? else {
                bail!("unknown claim {claim:?}; expected one of {}", CLAIMS.join(", "));
            };
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => {
                    let status = if report.passed() { "PASS" } else { "FAIL" };
                    println!(
                        "{status} {} n={}..{}: {} instances, {} skipped by symmetry, {} failures ({:.2?})",
                        report.claim,
                        report.n_min,
                        report.n_max,
                        report.instances,
                        report.orbit_skipped,
                        report.failures.len(),
                        report.elapsed
                    );
                    for f in &report.failures {
                        println!("  {}: expected {}, got {}", f.witness, f.expected, f.actual);
                    }
                }
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}
