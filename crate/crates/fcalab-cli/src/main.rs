//! `fcalab`: run, analyze, transform, compile and verify freezing cellular
//! automata from rule and configuration files.
//!
//! Exit codes: 0 for success and true verdicts, 1 for a false verdict with
//! a witness, 2 for usage or parse errors.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use fcalab::analysis::{
    check_freezing, check_monotone, infer_order, kchange_empirical, order_depth, CheckOutcome,
    StateOrder,
};
use fcalab::core::{fixture, fixture_names, iterate, Configuration, Limits, RuleTable};
use fcalab::energy::{
    energy_from_nilpotent, energy_from_order, energy_from_simulation, normalize_simulation,
    simulator_from_energy,
};
use fcalab::format::{
    emit_config, emit_encoding, emit_energy, emit_layout_grid, emit_rule, emit_target,
    parse_config, parse_encoding, parse_energy, parse_rule, parse_target, render_wire_config,
    EncodingSpecKind, ParsedEncoding,
};
use fcalab::simcheck::{is_context_free, verify_simulation, Encoding, Sampler};
use fcalab::transform::{reduce_to_vn, to_unary};
use fcalab::universal::{compile_pipeline, settling_time, target_encoding};

#[derive(Parser)]
#[command(name = "fcalab", about = "freezing cellular automata laboratory", version)]
struct Cli {
    /// Fixed seed for every sampled operation.
    #[arg(long, global = true, default_value_t = 0xFCA1AB)]
    seed: u64,
    /// Exhaustiveness budget (pattern count) for checks; the environment
    /// variable FCALAB_BUDGET overrides the default.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Machine-readable key=value output.
    #[arg(long, global = true)]
    format_kv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a rule on a configuration for a number of steps.
    Run {
        rule: PathBuf,
        config: PathBuf,
        #[arg(long)]
        steps: u64,
        /// Print the configuration every k steps.
        #[arg(long)]
        dump_every: Option<u64>,
        /// Write the final configuration here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Static analyzers.
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    /// Explicit local energies.
    Energy {
        #[command(subcommand)]
        what: EnergyCmd,
    },
    /// Rule transformations.
    Transform {
        #[command(subcommand)]
        what: TransformCmd,
    },
    /// Compile a freezing rule onto the 5-state universal wire rule.
    Compile {
        #[command(subcommand)]
        what: CompileCmd,
    },
    /// Verify a simulation relation on sampled configurations.
    VerifySim {
        rule_f: PathBuf,
        rule_g: PathBuf,
        encoding: PathBuf,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        /// Box extent per axis for the sampled configurations.
        #[arg(long, default_value_t = 6)]
        extent: i64,
    },
    /// The shipped fixture rules.
    Fixtures {
        #[command(subcommand)]
        what: FixturesCmd,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Is every transition weakly decreasing for the order?
    Freezing {
        rule: PathBuf,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Is the local rule monotone for the order?
    Monotone {
        rule: PathBuf,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Empirical change bound over random orbits.
    Kchange {
        rule: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 16)]
        extent: i64,
        #[arg(long, default_value_t = 64)]
        horizon: u64,
    },
}

#[derive(Args)]
struct OrderArg {
    /// Cover pairs `a>b`, comma separated; defaults to the order embedded
    /// in the rule file, else an inferred one.
    #[arg(long)]
    order: Option<String>,
}

#[derive(Subcommand)]
enum EnergyCmd {
    /// Check both energy conditions over the joint window.
    Verify { rule: PathBuf, energy: PathBuf },
    /// Rank energy of a freezing rule.
    FromOrder {
        rule: PathBuf,
        #[command(flatten)]
        order: OrderArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Change-count energy of a nilpotent rule.
    FromNilpotent {
        rule: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Freezing simulator tracking a rule with its energy.
    Simulator {
        rule: PathBuf,
        energy: PathBuf,
        /// Output prefix: writes <prefix>.rule and <prefix>.enc.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Extract an energy from a freezing simulation.
    Extract {
        rule_f: PathBuf,
        rule_g: PathBuf,
        encoding: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TransformCmd {
    /// Conjugate by the unary representation.
    Unary {
        rule: PathBuf,
        #[command(flatten)]
        order: OrderArg,
        /// Output prefix: writes <prefix>.rule and <prefix>.enc.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Wrap into a symmetric von Neumann neighborhood.
    ReduceVn {
        rule: PathBuf,
        #[command(flatten)]
        order: OrderArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CompileCmd {
    /// Compile to the 5-state universal rule; writes <out>.layout,
    /// <out>.tile and <out>.enc.
    U5 {
        rule: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Pad scaling factor; 2 doubles the settled period.
        #[arg(long, default_value_t = 1)]
        factor: u32,
    },
}

#[derive(Subcommand)]
enum FixturesCmd {
    /// List the shipped fixture names.
    List,
    /// Write a fixture's rule (and energy, when it has one) to files.
    Emit {
        name: String,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn limits(cli: &Cli) -> Limits {
    let mut l = Limits { seed: cli.seed, ..Limits::default() };
    if let Some(b) = cli.budget {
        l.max_exhaustive = b;
    } else if let Ok(v) = std::env::var("FCALAB_BUDGET") {
        if let Ok(b) = v.parse() {
            l.max_exhaustive = b;
        }
    }
    l
}

fn read(path: &Path) -> Result<String, AnyError> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_rule(path: &Path) -> Result<(RuleTable, Option<StateOrder>), AnyError> {
    let parsed = parse_rule(&read(path)?)?;
    Ok((parsed.rule, parsed.order))
}

/// Resolves the order: the explicit flag, the rule file, or inference.
fn resolve_order(
    rule: &RuleTable,
    embedded: Option<StateOrder>,
    arg: &OrderArg,
    lim: &Limits,
) -> Result<StateOrder, AnyError> {
    if let Some(spec) = &arg.order {
        let covers = spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|pair| {
                let (hi, lo) = pair.split_once('>').ok_or_else(|| format!("bad cover `{pair}`"))?;
                Ok::<_, AnyError>((rule.state_of(hi.trim())?, rule.state_of(lo.trim())?))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(StateOrder::from_covers(rule.state_count() as usize, &covers)?);
    }
    if let Some(o) = embedded {
        return Ok(o);
    }
    infer_order(rule, lim)?
        .ok_or_else(|| "rule is not freezing for any order; pass --order".into())
}

fn kv_or(cli: &Cli, kv: &[(&str, &dyn Display)], plain: &str) {
    if cli.format_kv {
        for (k, v) in kv {
            println!("{k}={v}");
        }
    } else {
        println!("{plain}");
    }
}

fn outcome_exit(cli: &Cli, what: &str, outcome: &CheckOutcome, rule: &RuleTable) -> ExitCode {
    match outcome {
        CheckOutcome::Ok { mode } => {
            kv_or(
                cli,
                &[(&"check", &what), (&"verdict", &"ok"), (&"mode", mode)],
                &format!("{what}: ok ({mode})"),
            );
            ExitCode::SUCCESS
        }
        CheckOutcome::Violation { witness, mode } => {
            kv_or(
                cli,
                &[(&"check", &what), (&"verdict", &"violation"), (&"mode", mode)],
                &format!("{what}: violation ({mode})"),
            );
            eprintln!("witness: {} [{}]", witness.detail, witness.kind);
            for pat in &witness.patterns {
                let toks: Vec<String> = pat.iter().map(|&s| rule.label(s)).collect();
                eprintln!("  pattern: {}", toks.join(" "));
            }
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, AnyError> {
    let lim = limits(cli);
    match &cli.command {
        Command::Run { rule, config, steps, dump_every, output } => {
            let (r, _) = load_rule(rule)?;
            let mut c = parse_config(&read(config)?, &r)?;
            if let Some(k) = dump_every {
                let k = (*k).max(1);
                let mut done = 0;
                while done < *steps {
                    let chunk = k.min(*steps - done);
                    c = iterate(&r, &c, chunk)?;
                    done += chunk;
                    println!("# t={done}");
                    print!("{}", emit_config(&c, &r));
                }
            } else {
                c = iterate(&r, &c, *steps)?;
            }
            match output {
                Some(path) => fs::write(path, emit_config(&c, &r))?,
                None if dump_every.is_none() => print!("{}", emit_config(&c, &r)),
                None => {}
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { what } => check(cli, &lim, what),
        Command::Energy { what } => energy(cli, &lim, what),
        Command::Transform { what } => transform(cli, &lim, what),
        Command::Compile { what } => compile(cli, what),
        Command::VerifySim { rule_f, rule_g, encoding, samples, extent } => {
            let (rf, _) = load_rule(rule_f)?;
            let (rg, _) = load_rule(rule_g)?;
            let enc = load_encoding(encoding, &rf, Some(&rg))?;
            let sampler =
                Sampler::new(cli.seed, *samples, vec![*extent; rf.dim()]);
            let report = verify_simulation(&rf, &rg, &enc, &sampler)?;
            kv_or(
                cli,
                &[
                    (&"samples", &report.samples),
                    (&"failures", &report.failures.len()),
                    (&"injectivity_pairs", &report.injectivity_pairs),
                    (&"injectivity_failures", &report.injectivity_failures),
                ],
                &format!(
                    "simulation: {} ({} samples, {} failures, {} injectivity pairs)",
                    if report.ok() { "ok" } else { "failed" },
                    report.samples,
                    report.failures.len(),
                    report.injectivity_pairs
                ),
            );
            if report.ok() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in report.failures.iter().take(3) {
                    eprintln!("mismatch in sample {} at block {:?} after step {}", f.sample, f.block, f.step);
                    eprint!("{}", emit_config(&f.config, &rf));
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Fixtures { what } => fixtures(cli, what),
    }
}

fn check(cli: &Cli, lim: &Limits, what: &CheckCmd) -> Result<ExitCode, AnyError> {
    match what {
        CheckCmd::Freezing { rule, order } => {
            let (r, embedded) = load_rule(rule)?;
            let o = resolve_order(&r, embedded, order, lim)?;
            let outcome = check_freezing(&r, &o, lim)?;
            Ok(outcome_exit(cli, "freezing", &outcome, &r))
        }
        CheckCmd::Monotone { rule, order } => {
            let (r, embedded) = load_rule(rule)?;
            let o = resolve_order(&r, embedded, order, lim)?;
            let outcome = check_monotone(&r, &o, lim)?;
            Ok(outcome_exit(cli, "monotone", &outcome, &r))
        }
        CheckCmd::Kchange { rule, samples, extent, horizon } => {
            let (r, embedded) = load_rule(rule)?;
            let k = kchange_empirical(&r, *samples, &vec![*extent; r.dim()], *horizon, cli.seed)?;
            let bound: Box<dyn Display> = match embedded {
                Some(o) => Box::new(order_depth(&o)),
                None => Box::new("unknown"),
            };
            kv_or(
                cli,
                &[(&"kchange_empirical", &k), (&"order_depth", &*bound)],
                &format!("kchange: observed at most {k} changes (order depth {bound})"),
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn energy(cli: &Cli, lim: &Limits, what: &EnergyCmd) -> Result<ExitCode, AnyError> {
    match what {
        EnergyCmd::Verify { rule, energy } => {
            let (r, _) = load_rule(rule)?;
            let e = parse_energy(&read(energy)?, &r)?;
            let outcome = fcalab::energy::verify_energy(&r, &e, lim)?;
            Ok(outcome_exit(cli, "energy", &outcome, &r))
        }
        EnergyCmd::FromOrder { rule, order, output } => {
            let (r, embedded) = load_rule(rule)?;
            let o = resolve_order(&r, embedded, order, lim)?;
            let e = energy_from_order(&r, &o, lim)?;
            emit_or_print(output.as_deref(), emit_energy(&e, &r))?;
            Ok(ExitCode::SUCCESS)
        }
        EnergyCmd::FromNilpotent { rule, n, output } => {
            let (r, _) = load_rule(rule)?;
            let e = energy_from_nilpotent(&r, *n, lim)?;
            emit_or_print(output.as_deref(), emit_energy(&e, &r))?;
            Ok(ExitCode::SUCCESS)
        }
        EnergyCmd::Simulator { rule, energy, output } => {
            let (r, _) = load_rule(rule)?;
            let e = parse_energy(&read(energy)?, &r)?;
            let (g, order_g, enc) = simulator_from_energy(&r, &e, lim)?;
            fs::write(
                output.with_extension("rule"),
                emit_rule(&g, Some(&order_g))?,
            )?;
            let g_label = |s| g.label(s);
            fs::write(
                output.with_extension("enc"),
                emit_encoding(&enc, &r, g_label, EncodingSpecKind::Table)?,
            )?;
            println!(
                "simulator: {} states, wrote {}.rule and {}.enc",
                g.state_count(),
                output.display(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        EnergyCmd::Extract { rule_f, rule_g, encoding, output } => {
            let (rf, _) = load_rule(rule_f)?;
            let (rg, order_g) = load_rule(rule_g)?;
            let order_g = order_g.ok_or("simulator rule file must embed its freezing order")?;
            let enc = load_encoding(encoding, &rf, Some(&rg))?;
            let (rf2, rg2, enc2) = normalize_simulation(&rf, &rg, &enc, lim)?;
            let psi = energy_from_simulation(&rf2, &rg2, &order_g, &enc2, lim)?;
            emit_or_print(output.as_deref(), emit_energy(&psi, &rf))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn transform(cli: &Cli, lim: &Limits, what: &TransformCmd) -> Result<ExitCode, AnyError> {
    let _ = cli;
    match what {
        TransformCmd::Unary { rule, order, output } => {
            let (r, embedded) = load_rule(rule)?;
            let o = resolve_order(&r, embedded, order, lim)?;
            let (unary, recode) = to_unary(&r, &o)?;
            let chain = StateOrder::chain(unary.state_count());
            let enc = recode.as_encoding(r.dim(), recode.forward(r.background()));
            match output {
                Some(prefix) => {
                    fs::write(prefix.with_extension("rule"), emit_rule(&unary, Some(&chain))?)?;
                    let label = |s| unary.label(s);
                    fs::write(
                        prefix.with_extension("enc"),
                        emit_encoding(&enc, &r, label, EncodingSpecKind::Table)?,
                    )?;
                }
                None => print!("{}", emit_rule(&unary, Some(&chain))?),
            }
            Ok(ExitCode::SUCCESS)
        }
        TransformCmd::ReduceVn { rule, order, output } => {
            let (r, embedded) = load_rule(rule)?;
            let o = resolve_order(&r, embedded, order, lim)?;
            let red = reduce_to_vn(&r, Some(&o), lim)?;
            println!(
                "reduced: {} product states, slowdown {}",
                red.rule.state_count(),
                red.encoding.slowdown
            );
            if let Some(prefix) = output {
                // product rules serialize as their base rule under a
                // vn-reduction header and are rebuilt on parse
                let mut text = String::from("[vn-reduction]\n");
                text.push_str(&emit_rule(&r, Some(&o))?);
                fs::write(prefix.with_extension("rule"), &text)?;
                let label = |s| red.rule.label(s);
                fs::write(
                    prefix.with_extension("enc"),
                    emit_encoding(
                        &red.encoding,
                        &r,
                        label,
                        EncodingSpecKind::VnReduction { base: &r, base_order: Some(&o) },
                    )?,
                )?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn compile(cli: &Cli, what: &CompileCmd) -> Result<ExitCode, AnyError> {
    let _ = cli;
    match what {
        CompileCmd::U5 { rule, output, factor } => {
            let (r, embedded) = load_rule(rule)?;
            let comp = compile_pipeline(&r, embedded.as_ref())?;
            let target = if *factor > 1 {
                Arc::new(fcalab::universal::compile_u5_with_factor(&comp.unary, *factor)?)
            } else {
                comp.target.clone()
            };
            fs::write(output.with_extension("layout"), emit_layout_grid(&target))?;
            fs::write(output.with_extension("tile"), emit_target(&target)?)?;
            let enc = target_encoding(&target);
            let tile_ref = output.with_extension("tile");
            let label = |s: fcalab::State| {
                fcalab::universal::U5::ALL[s.idx()].label().to_string()
            };
            fs::write(
                output.with_extension("enc"),
                emit_encoding(
                    &enc,
                    &comp.unary,
                    label,
                    EncodingSpecKind::Compiled { layout_path: &tile_ref.display().to_string() },
                )?,
            )?;
            println!(
                "compiled: block {:?}, period {}, context-free: {}",
                target.block(),
                settling_time(&target),
                is_context_free(&enc)
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn fixtures(cli: &Cli, what: &FixturesCmd) -> Result<ExitCode, AnyError> {
    match what {
        FixturesCmd::List => {
            for name in fixture_names() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        FixturesCmd::Emit { name, output } => {
            let f = fixture(name)?;
            let base = name.replace(['(', ')'], "_");
            let rule_path = output.join(format!("{base}.rule"));
            fs::write(&rule_path, emit_rule(&f.rule, f.order.as_ref())?)?;
            let mut wrote = format!("wrote {}", rule_path.display());
            if let Some(e) = &f.energy {
                let energy_path = output.join(format!("{base}.energy"));
                fs::write(&energy_path, emit_energy(e, &f.rule))?;
                wrote.push_str(&format!(" and {}", energy_path.display()));
            }
            kv_or(cli, &[(&"rule", &rule_path.display())], &wrote);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit_or_print(path: Option<&Path>, text: String) -> Result<(), AnyError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_encoding(
    path: &Path,
    src: &RuleTable,
    tgt: Option<&RuleTable>,
) -> Result<Encoding, AnyError> {
    match parse_encoding(&read(path)?, src, tgt)? {
        ParsedEncoding::Ready(enc) => Ok(enc),
        ParsedEncoding::CompiledReference { layout_path } => {
            let base = path.parent().unwrap_or(Path::new("."));
            let resolved = if Path::new(&layout_path).is_absolute() {
                PathBuf::from(&layout_path)
            } else {
                base.join(&layout_path)
            };
            let target = parse_target(&read(&resolved)?)?;
            Ok(target_encoding(&Arc::new(target)))
        }
    }
}

/// Renders a wire configuration; kept for ad-hoc debugging via `run`.
#[allow(dead_code)]
fn show_wires(c: &Configuration) -> String {
    render_wire_config(c)
}
