use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde::Serialize;

use xyent::entanglement::ConcurrenceTrace;
use xyent::propagate::{StepControl, TimeGrid};
use xyent::router::{multipartite_target_state_labeled, pairwise_concurrence_table, run_split_experiment};
use xyent::rwa::{predict_resonances_for, ResonancePrediction, REFERENCE_FIELD_RATIO};
use xyent::sweep::{
    emit_results, fmt_num, line_plot_svg, parse_config, preset, run_decoherence_sweep, run_evolve,
    run_frequency_sweep, write_all, Curve, Format, Scenario, SweepConfig, SweepResult,
};
use xyent::{Error, Result};

#[derive(Parser)]
#[command(name = "xyent", version, about = "Driven XY spin-network entanglement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal end-pair concurrence versus drive frequency (default preset fig1a)
    SweepFreq(Common),
    /// Frequency or λ sweep with pure dephasing (default preset fig5a)
    SweepDecoherence(Common),
    /// Single concurrence trace at the configured drive frequency (default preset fig1a)
    Evolve(Common),
    /// Entanglement splitting through a branched network (default preset router)
    Router(Common),
    /// Table of predicted field-drive resonances (default preset resonances)
    Resonances(Common),
    /// Pairwise concurrences of a single-excitation target state (default preset multipartite)
    Multipartite(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset name
    #[arg(long)]
    preset: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweep points
    #[arg(long)]
    workers: Option<usize>,
    /// Time samples per observation window
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated output formats (csv, json, svg)
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
}

impl Common {
    fn load(&self, default_preset: &str) -> Result<SweepConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
                parse_config(&text)?
            }
            (None, Some(name)) => preset(name)?,
            (None, None) => preset(default_preset)?,
        };
        if let Some(s) = self.samples {
            if s == 0 {
                return Err(Error::Argument("--samples must be at least 1".into()));
            }
            cfg.integration.samples = s;
        }
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        if let Some(names) = &self.format {
            cfg.output.formats = names.iter().map(|n| n.parse()).collect::<Result<_>>()?;
        }
        Ok(cfg)
    }
}

fn expect_scenario(cfg: &SweepConfig, allowed: &[Scenario], command: &str) -> Result<()> {
    if allowed.contains(&cfg.scenario) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("`{command}` cannot run scenario `{}`", cfg.scenario.name())))
    }
}

fn print_sweep(res: &SweepResult) {
    println!("{:<16} {:>12} {:>12} {:>12}", "series", res.axis.name(), "c_max", "t_max");
    for s in &res.series {
        if let Some(best) = s.points.iter().max_by(|a, b| a.c_max.total_cmp(&b.c_max)) {
            println!("{:<16} {:>12.6} {:>12.6} {:>12.4}", s.label, best.swept_value, best.c_max, best.t_max);
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    serde_json::to_vec_pretty(value).map_err(|e| Error::Numeric(format!("json encoding failed: {e}")))
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn finish(written: Vec<PathBuf>) {
    for p in written {
        println!("wrote {}", p.display());
    }
}

fn sweep(c: &Common, default: &str, decoherence: bool) -> Result<()> {
    let cfg = c.load(default)?;
    expect_scenario(&cfg, &[Scenario::CouplingDrive, Scenario::FieldDrive], "sweep")?;
    let res = if decoherence { run_decoherence_sweep(&cfg, c.workers)? } else { run_frequency_sweep(&cfg, c.workers)? };
    print_sweep(&res);
    let stem = if decoherence { "sweep-decoherence" } else { "sweep-freq" };
    finish(emit_results(&res, &cfg.output.dir, stem, &cfg.output.formats)?);
    Ok(())
}

#[derive(Serialize)]
struct TraceManifest<'a> {
    code_version: &'static str,
    config: &'a SweepConfig,
    #[serde(flatten)]
    payload: serde_json::Value,
}

fn trace_curve(label: String, tr: &ConcurrenceTrace) -> Curve {
    Curve { label, points: tr.times.iter().copied().zip(tr.values.iter().copied()).collect() }
}

fn emit_other(
    cfg: &SweepConfig,
    stem: &str,
    csv: Vec<u8>,
    payload: serde_json::Value,
    svg: Option<String>,
) -> Result<()> {
    let mut files = Vec::new();
    for f in &cfg.output.formats {
        let name = format!("{stem}.{}", f.extension());
        match f {
            Format::Csv => files.push((name, csv.clone())),
            Format::Json => {
                let m = TraceManifest { code_version: env!("CARGO_PKG_VERSION"), config: cfg, payload: payload.clone() };
                files.push((name, json_bytes(&m)?));
            }
            Format::Svg => match &svg {
                Some(s) => files.push((name, s.clone().into_bytes())),
                None => log::info!("no plot for `{stem}`; skipping svg"),
            },
        }
    }
    finish(write_all(&cfg.output.dir, &files)?);
    Ok(())
}

fn evolve(c: &Common) -> Result<()> {
    let cfg = c.load("fig1a")?;
    let r = run_evolve(&cfg)?;
    println!(
        "pair {:?}: c_max = {:.6} at t = {:.4} (omega_d = {}, gamma = {}, lambda = {})",
        r.trace.site_pair, r.trace.c_max, r.trace.t_max, r.drive.omega_d, r.gamma, r.lambda
    );
    let rows = r.trace.times.iter().zip(&r.trace.values).map(|(t, v)| vec![fmt_num(*t), fmt_num(*v)]);
    let csv = csv_text(&["t", "concurrence"], rows);
    let svg = line_plot_svg("time t", "concurrence", &[trace_curve(format!("{:?}", r.trace.site_pair), &r.trace)]);
    let payload = serde_json::json!({ "result": serde_json::to_value(&r).map_err(|e| Error::Numeric(e.to_string()))? });
    emit_other(&cfg, "evolve", csv, payload, Some(svg))
}

fn router(c: &Common) -> Result<()> {
    let cfg = c.load("router")?;
    expect_scenario(&cfg, &[Scenario::Router], "router")?;
    let spec = cfg.router.as_ref().expect("router scenario carries a router section");
    let window = cfg.drive.window(spec.n_sites())?;
    let grid = TimeGrid::new(0.0, window, cfg.integration.samples)?;
    let step = StepControl { steps_per_period: cfg.integration.steps_per_period };
    let rep = run_split_experiment(spec, &cfg.drive, &grid, &step)?;
    let label = |site: usize| -> String {
        (0..spec.arms.len())
            .find(|&i| spec.arm_end(i) == site)
            .map_or_else(|| format!("site{site}"), |i| spec.arms[i].end_label.clone())
    };
    println!("{:<10} {:>5} {:>10} {:>10}", "site", "arm", "c_max", "t_max");
    for a in &rep.arrivals {
        println!("{:<10} {:>5} {:>10.6} {:>10.4}", label(a.site), a.arm, a.c_max, a.t_max);
    }
    println!("excitation drift {:.3e}", rep.excitation_drift);
    let mut header = vec!["t".to_string()];
    header.extend(rep.traces.iter().map(|t| label(t.site_pair.1)));
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..grid.samples + 1).map(|i| {
        let mut row = vec![fmt_num(grid.time(i))];
        row.extend(rep.traces.iter().map(|t| fmt_num(t.values[i])));
        row
    });
    let csv = csv_text(&header_ref, rows);
    let ends: Vec<Curve> = (0..spec.arms.len())
        .filter_map(|i| rep.trace_for(spec.arm_end(i)).map(|t| trace_curve(spec.arms[i].end_label.clone(), t)))
        .collect();
    let svg = line_plot_svg("time t", "concurrence with Alice", &ends);
    let payload = serde_json::json!({
        "arrivals": serde_json::to_value(&rep.arrivals).map_err(|e| Error::Numeric(e.to_string()))?,
        "excitation_drift": rep.excitation_drift,
        "anisotropy_warning": rep.anisotropy_warning,
        "window": window,
    });
    emit_other(&cfg, "router", csv, payload, Some(svg))
}

fn resonances(c: &Common) -> Result<()> {
    let cfg = c.load("resonances")?;
    let h0 = cfg.drive.h0;
    let h1 = if cfg.drive.h1 != 0.0 { cfg.drive.h1 } else { REFERENCE_FIELD_RATIO * h0 };
    let table: Vec<ResonancePrediction> = predict_resonances_for(h0, h1, cfg.max_order)?;
    println!("{:>6} {:>4} {:>12} {:>14}", "order", "k", "omega", "weight");
    for r in &table {
        println!("{:>6} {:>4} {:>12.6} {:>14.6e}", r.order, r.k, r.omega, r.weight);
    }
    let rows = table.iter().map(|r| {
        vec![r.order.to_string(), r.k.to_string(), fmt_num(r.omega), fmt_num(r.weight), fmt_num(r.residual(h0))]
    });
    let csv = csv_text(&["order", "k", "omega", "weight", "residual"], rows);
    let payload = serde_json::json!({ "h0": h0, "h1": h1, "resonances": table });
    emit_other(&cfg, "resonances", csv, payload, None)
}

fn multipartite(c: &Common) -> Result<()> {
    let cfg = c.load("multipartite")?;
    expect_scenario(&cfg, &[Scenario::Multipartite], "multipartite")?;
    let m = cfg.multipartite.as_ref().expect("multipartite scenario carries amplitudes");
    let amps: Vec<C64> = m.amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect();
    let target = multipartite_target_state_labeled(&amps, m.labels.clone())?;
    let table = pairwise_concurrence_table(&target.state)?;
    let mut rows = Vec::new();
    for j in 0..table.len() {
        for k in j + 1..table.len() {
            println!("{:<10} {:<10} {:.8}", m.labels[j], m.labels[k], table[j][k]);
            rows.push(vec![m.labels[j].clone(), m.labels[k].clone(), fmt_num(table[j][k])]);
        }
    }
    let csv = csv_text(&["party_a", "party_b", "concurrence"], rows);
    let payload = serde_json::json!({ "labels": m.labels, "concurrence": table });
    emit_other(&cfg, "multipartite", csv, payload, None)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) => 2,
        Error::Config(_) => 3,
        Error::Io { .. } => 4,
        Error::Resource(_) => 5,
        Error::Numeric(_) => 6,
        Error::Unsupported(_) => 7,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error[argument]: {}", e.to_string().trim_start_matches("error: ").trim_end());
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::SweepFreq(c) => sweep(c, "fig1a", false),
        Command::SweepDecoherence(c) => sweep(c, "fig5a", true),
        Command::Evolve(c) => evolve(c),
        Command::Router(c) => router(c),
        Command::Resonances(c) => resonances(c),
        Command::Multipartite(c) => multipartite(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}
