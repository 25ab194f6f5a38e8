//! `lexeu`: command-line front end for lexicographic expected utility models.
//!
//! Exit codes: 0 success or holds, 1 violation or strict negative, 2 input
//! error, 3 cap exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lexeu_core::axioms::{check_table_suite, CheckOptions, Suite};
use lexeu_core::conditioning::{observability_check, savage_conditional, strong_conditional_strict, ObservabilityClass};
use lexeu_core::engine::{class_partition, indexed_prefer, is_null_at, lex_prefer, qual_prob_compare, IndexedComparison, DEFAULT_EVENT_CAP};
use lexeu_core::family::{derive_table, PreferenceTable};
use lexeu_core::io;
use lexeu_core::lottery::{induced_lottery, lottery_compare, Lottery};
use lexeu_core::rational::format_with_decimal;
use lexeu_core::synthesis::{synthesize, SynthesisOptions};
use lexeu_core::{top_event_chain, Act, Error, Event, GsleuModel, DEFAULT_ACT_CAP};

#[derive(Parser)]
#[command(name = "lexeu", version, about = "Lexicographic expected utility toolkit")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file.
    Validate { model: PathBuf },
    /// Unconditional comparison of two acts.
    Compare {
        model: PathBuf,
        f: PathBuf,
        g: PathBuf,
        /// Exit 0 only when f is strictly preferred.
        #[arg(long)]
        strict_only: bool,
    },
    /// Conditional comparison at an event (comma-joined state labels).
    Condition {
        model: PathBuf,
        event: String,
        f: PathBuf,
        g: PathBuf,
        /// Indexed preference only.
        #[arg(long, conflicts_with = "strong")]
        naive: bool,
        /// Perturbation-based strong test.
        #[arg(long)]
        strong: bool,
        /// Maximum number of cells in a witness partition.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Top-event chain and, optionally, every event class.
    Classes {
        model: PathBuf,
        #[arg(long)]
        enumerate: bool,
    },
    /// Whether B is null at A.
    Nullity { model: PathBuf, b: String, a: String },
    /// Compare P_A(B) with P_A(C).
    Qualprob { model: PathBuf, a: String, b: String, c: String },
    /// Lottery induced by an act at an event, compared with a second act's if given.
    Lottery {
        model: PathBuf,
        event: String,
        f: PathBuf,
        g: Option<PathBuf>,
    },
    /// Check the axioms on a model or a preference table.
    Axioms {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "core")]
        suite: SuiteArg,
    },
    /// Write the preference table of a model.
    DeriveTable {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a model from a preference table.
    Synthesize {
        table: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare indexed and strong conditional strictness over all instances.
    Observability {
        model: PathBuf,
        /// Restrict to these act files instead of all acts.
        #[arg(long, num_args = 1..)]
        acts: Vec<PathBuf>,
        /// Number of non-equivalent instances to print.
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Core,
    All,
}

/// Printed output plus exit code.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn new(text: impl Into<String>, json: Value, code: u8) -> Self {
        Report { text: text.into(), json, code }
    }
}

fn act_cap() -> u128 {
    std::env::var("LEXEU_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ACT_CAP)
}

fn check_options() -> CheckOptions {
    CheckOptions { act_cap: act_cap(), ..CheckOptions::default() }
}

fn load_named_act(path: &Path, model: &GsleuModel) -> lexeu_core::Result<(String, Act)> {
    let value = io::parse_json(&io::read_text(path)?)?;
    let (name, act) = io::act_from_json(model.space(), model.outcomes(), &value)?;
    let name = if name.is_empty() {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "act".into())
    } else {
        name
    };
    Ok((name, act))
}

fn event(model: &GsleuModel, text: &str) -> lexeu_core::Result<Event> {
    Event::parse_key(model.space(), text)
}

/// A model file has `levels`; anything else is read as a table.
fn load_table_or_model(path: &Path) -> lexeu_core::Result<PreferenceTable> {
    let value = io::parse_json(&io::read_text(path)?)?;
    if value.get("levels").is_some() {
        derive_table(&io::model_from_json(&value)?, act_cap())
    } else {
        io::table_from_json(&value)
    }
}

fn lottery_text(l: &Lottery) -> String {
    l.weights()
        .map(|(o, w)| format!("{}: {}", l.outcome_space().label(o), format_with_decimal(w)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_json(path: &Path, value: &Value) -> lexeu_core::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn run(command: Command) -> lexeu_core::Result<Report> {
    match command {
        Command::Validate { model } => match io::load_model(&model) {
            Ok(m) => Ok(Report::new(
                format!("valid: {} states, {} outcomes, {} levels", m.space().len(), m.outcomes().len(), m.depth()),
                json!({"valid": true, "states": m.space().len(), "outcomes": m.outcomes().len(), "levels": m.depth()}),
                0,
            )),
            Err(Error::Validation(violations)) => {
                let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                Ok(Report::new(
                    format!("invalid:\n  {}", lines.join("\n  ")),
                    json!({"valid": false, "violations": lines}),
                    1,
                ))
            }
            Err(e) => Err(e),
        },
        Command::Compare { model, f, g, strict_only } => {
            let m = io::load_model(&model)?;
            let (fname, fa) = load_named_act(&f, &m)?;
            let (gname, ga) = load_named_act(&g, &m)?;
            let v = lex_prefer(&m, &fa, &ga)?;
            let text = match v.deciding_level {
                Some(k) => format!("{fname} {} {gname} (deciding level {k})", v.ordering.symbol()),
                None => format!("{fname} {} {gname} (equal at every level)", v.ordering.symbol()),
            };
            let ok = if strict_only { v.ordering.is_strict() } else { v.ordering.is_weak() };
            Ok(Report::new(
                text,
                json!({"f": fname, "g": gname, "ordering": v.ordering.name(), "deciding_level": v.deciding_level}),
                u8::from(!ok),
            ))
        }
        Command::Condition { model, event: ev, f, g, naive, strong, budget } => {
            let m = io::load_model(&model)?;
            let a = event(&m, &ev)?;
            let (fname, fa) = load_named_act(&f, &m)?;
            let (gname, ga) = load_named_act(&g, &m)?;
            let indexed = indexed_prefer(&m, &a, &fa, &ga)?;
            let indexed_name = match indexed {
                IndexedComparison::Degenerate => "Degenerate",
                IndexedComparison::Decided(c) => c.name(),
            };
            let mut lines = vec![format!(
                "indexed at {a}: {fname} {} {gname}",
                indexed.comparison().symbol()
            )];
            let mut out = json!({"event": a.labels(), "f": fname, "g": gname, "indexed": indexed_name});
            if naive {
                return Ok(Report::new(lines.join("\n"), out, u8::from(!indexed.is_weak())));
            }
            let savage = savage_conditional(&m, &a, &fa, &ga)?;
            lines.push(format!("savage at {a}: {fname} {} {gname}", savage.symbol()));
            out["savage"] = json!(savage.name());
            if !strong {
                return Ok(Report::new(lines.join("\n"), out, u8::from(!indexed.is_weak())));
            }
            let v = strong_conditional_strict(&m, &a, &fa, &ga, budget.unwrap_or(a.len()))?;
            lines.push(format!("strong strict: {}", v.strong_strict));
            if let Some(c) = &v.failing_constant {
                lines.push(format!("no good partition for constant {c}"));
            }
            let partitions: Vec<Value> = v
                .witness_partitions
                .iter()
                .map(|(c, p)| json!({"constant": c, "cells": p.iter().map(|e| e.labels()).collect::<Vec<_>>()}))
                .collect();
            for (c, p) in &v.witness_partitions {
                let cells: Vec<String> = p.iter().map(|e| e.to_string()).collect();
                lines.push(format!("  {c}: {}", cells.join(" ")));
            }
            out["savage_strict"] = json!(v.savage_strict);
            out["strong_strict"] = json!(v.strong_strict);
            out["failing_constant"] = json!(v.failing_constant);
            out["witness_partitions"] = json!(partitions);
            out["coarser_only"] = json!(v.coarser_only);
            Ok(Report::new(lines.join("\n"), out, u8::from(!v.strong_strict)))
        }
        Command::Classes { model, enumerate } => {
            let m = io::load_model(&model)?;
            let chain = top_event_chain(&m);
            let mut lines: Vec<String> = chain
                .events
                .iter()
                .enumerate()
                .map(|(k, e)| format!("E{} = {e}", k + 1))
                .collect();
            let mut out = json!({"chain": chain.events.iter().map(|e| e.labels()).collect::<Vec<_>>()});
            if enumerate {
                let part = class_partition(&m, DEFAULT_EVENT_CAP)?;
                for (k, class) in part.classes.iter().enumerate() {
                    let events: Vec<String> = class.iter().map(|e| e.to_string()).collect();
                    lines.push(format!("class {} ({} events): {}", k + 1, class.len(), events.join(" ")));
                }
                lines.push("trivial: {}".into());
                out["classes"] = json!(part
                    .classes
                    .iter()
                    .map(|c| c.iter().map(|e| e.labels()).collect::<Vec<_>>())
                    .collect::<Vec<_>>());
            }
            Ok(Report::new(lines.join("\n"), out, 0))
        }
        Command::Nullity { model, b, a } => {
            let m = io::load_model(&model)?;
            let (be, ae) = (event(&m, &b)?, event(&m, &a)?);
            let null = is_null_at(&m, &be, &ae)?;
            Ok(Report::new(null.to_string(), json!({"b": be.labels(), "a": ae.labels(), "null": null}), 0))
        }
        Command::Qualprob { model, a, b, c } => {
            let m = io::load_model(&model)?;
            let (ae, be, ce) = (event(&m, &a)?, event(&m, &b)?, event(&m, &c)?);
            let ord = qual_prob_compare(&m, &ae, &be, &ce)?;
            Ok(Report::new(
                format!("P({be} | {ae}) {} P({ce} | {ae})", ord.symbol()),
                json!({"ordering": ord.name()}),
                0,
            ))
        }
        Command::Lottery { model, event: ev, f, g } => {
            let m = io::load_model(&model)?;
            let a = event(&m, &ev)?;
            let (fname, fa) = load_named_act(&f, &m)?;
            let lf = induced_lottery(&m, &a, &fa)?;
            let mut lines = vec![format!("{fname} at {a}: {}", lottery_text(&lf))];
            let mut out = json!({"event": a.labels(), "f": io::lottery_to_json(&lf)});
            if let Some(g) = g {
                let (gname, ga) = load_named_act(&g, &m)?;
                let lg = induced_lottery(&m, &a, &ga)?;
                let ord = lottery_compare(&m, &a, &lf, &lg)?;
                lines.push(format!("{gname} at {a}: {}", lottery_text(&lg)));
                lines.push(format!("{fname} {} {gname}", ord.symbol()));
                out["g"] = io::lottery_to_json(&lg);
                out["ordering"] = json!(ord.name());
            }
            Ok(Report::new(lines.join("\n"), out, 0))
        }
        Command::Axioms { input, suite } => {
            let table = load_table_or_model(&input)?;
            let suite = match suite {
                SuiteArg::Core => Suite::Core,
                SuiteArg::All => Suite::All,
            };
            let summary = check_table_suite(&table, suite, &check_options());
            let mut lines = Vec::new();
            let mut reports = Vec::new();
            for r in &summary.reports {
                lines.push(format!(
                    "{:<10} {:<13} {} instances, {} failures ({})",
                    r.id.name(),
                    r.status.name(),
                    r.instances,
                    r.failures,
                    r.regime
                ));
                for w in &r.witnesses {
                    let events: Vec<String> = w.events.iter().map(|e| e.to_string()).collect();
                    let acts: Vec<String> = w.acts.iter().map(|a| a.to_string()).collect();
                    lines.push(format!("    {}: events {} acts {}", w.clause, events.join(" "), acts.join(" ")));
                }
                for n in &r.notes {
                    lines.push(format!("    note: {n}"));
                }
                reports.push(json!({
                    "axiom": r.id.name(),
                    "status": r.status.name(),
                    "instances": r.instances.to_string(),
                    "failures": r.failures.to_string(),
                    "regime": r.regime,
                    "notes": r.notes,
                    "witnesses": r.witnesses.iter().map(|w| json!({
                        "clause": w.clause,
                        "events": w.events.iter().map(|e| e.labels()).collect::<Vec<_>>(),
                        "acts": w.acts.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                }));
            }
            lines.push(if summary.pass { "all hold".into() } else { "violations found".into() });
            Ok(Report::new(
                lines.join("\n"),
                json!({"pass": summary.pass, "reports": reports}),
                u8::from(!summary.pass),
            ))
        }
        Command::DeriveTable { model, output } => {
            let m = io::load_model(&model)?;
            let table = io::table_to_json(&derive_table(&m, act_cap())?);
            match output {
                Some(path) => {
                    write_json(&path, &table)?;
                    Ok(Report::new(
                        format!("wrote {}", path.display()),
                        json!({"written": path.display().to_string()}),
                        0,
                    ))
                }
                None => Ok(Report::new(
                    serde_json::to_string_pretty(&table).expect("json values serialize"),
                    table,
                    0,
                )),
            }
        }
        Command::Synthesize { table, output } => {
            let t = io::load_table(&table)?;
            let opts = SynthesisOptions { check: check_options(), ..SynthesisOptions::default() };
            let res = synthesize(&t, &opts)?;
            let model = io::model_to_json(&res.model);
            let diag = json!({
                "verified": res.verified,
                "lp_solves": res.diagnostics.lp_solves,
                "classes": res.diagnostics.classes.iter().map(|c| json!({
                    "level": c.level,
                    "events": c.events,
                    "atoms": c.atoms,
                    "measure_constraints": c.measure_constraints,
                    "utility_constraints": c.utility_constraints,
                    "retries": c.retries,
                })).collect::<Vec<_>>(),
            });
            match output {
                Some(path) => {
                    write_json(&path, &model)?;
                    let mut lines = vec![format!("wrote {} ({} levels, verified {})", path.display(), res.model.depth(), res.verified)];
                    for c in &res.diagnostics.classes {
                        lines.push(format!(
                            "  level {}: {} events, atoms {}, {} measure and {} utility constraints, {} retries",
                            c.level,
                            c.events,
                            c.atoms.join(","),
                            c.measure_constraints,
                            c.utility_constraints,
                            c.retries
                        ));
                    }
                    Ok(Report::new(lines.join("\n"), diag, 0))
                }
                None => Ok(Report::new(
                    serde_json::to_string_pretty(&model).expect("json values serialize"),
                    json!({"model": model, "diagnostics": diag}),
                    0,
                )),
            }
        }
        Command::Observability { model, acts, samples } => {
            let m = io::load_model(&model)?;
            let scope: Vec<Act> = acts
                .iter()
                .map(|p| load_named_act(p, &m).map(|(_, a)| a))
                .collect::<lexeu_core::Result<_>>()?;
            let scope = if acts.is_empty() { None } else { Some(scope.as_slice()) };
            let r = observability_check(&m, scope, act_cap(), samples)?;
            let mut lines = vec![
                format!("instances: {}", r.instances),
                format!("indexed strict: {}, strong strict: {}", r.indexed_strict, r.strong_strict),
                format!("equivalent: {}", r.equivalent),
                format!("fineness failures: {}", r.fineness_failures),
                format!("anomalies: {}", r.anomalies),
                format!("implication failures: {}", r.implication_failures),
                format!("fine instances: {} ({} equivalent)", r.fine_instances, r.fine_equivalent),
            ];
            for s in &r.samples {
                let class = match s.class {
                    ObservabilityClass::Equivalent => "equivalent",
                    ObservabilityClass::FinenessFailure => "fineness failure",
                    ObservabilityClass::Anomaly => "anomaly",
                };
                lines.push(format!("  {class}: A={} f={} g={}", s.event, s.f, s.g));
            }
            let ok = r.anomalies == 0 && r.implication_failures == 0;
            Ok(Report::new(
                lines.join("\n"),
                json!({
                    "instances": r.instances,
                    "equivalent": r.equivalent,
                    "fineness_failures": r.fineness_failures,
                    "anomalies": r.anomalies,
                    "implication_failures": r.implication_failures,
                    "indexed_strict": r.indexed_strict,
                    "strong_strict": r.strong_strict,
                    "fine_instances": r.fine_instances,
                    "fine_equivalent": r.fine_equivalent,
                }),
                u8::from(!ok),
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&report.json).expect("json values serialize")
            } else {
                report.text
            };
            // A closed pipe (`lexeu ... | head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(report.code)
        }
        Err(e) => {
            let code = if matches!(e, Error::CapExceeded { .. }) { 3 } else { 2 };
            if cli.json {
                println!("{}", json!({"error": e.to_string()}));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
