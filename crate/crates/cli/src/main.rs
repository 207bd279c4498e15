mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail};
use clap::Parser;
use rootscan::dataset::write_structured_log;
use rootscan::pipeline::{
    benchmark, load, prepare, run_analysis, sweep, write_bench_table, write_curve, RunConfig,
};
use rootscan::synth::{self, LABEL_COLUMN, TARGET_VALUE};
use rootscan::StructuredLog;

use crate::args::{AnalysisArgs, Cli, Command, OutputFormat};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| anyhow!("cannot create {}: {e}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_config(analysis: &AnalysisArgs, record_timings: bool) -> anyhow::Result<RunConfig> {
    let Some(input) = analysis.input.clone() else {
        bail!("--input is required");
    };
    let (Some(label), Some(target)) = (&analysis.label_column, &analysis.target_value) else {
        bail!("--label-column and --target-value are required");
    };
    Ok(RunConfig {
        input,
        format: analysis.format.into(),
        analysis: analysis.analysis_config(label, target),
        record_timings,
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analyze(a) => {
            let config = run_config(&a.analysis, !a.omit_timings)?;
            let report = run_analysis(&config)?;
            let mut out = open_output(a.out.output.as_deref())?;
            match a.output_format {
                OutputFormat::Json => out.write_all(report.to_json()?.as_bytes())?,
                OutputFormat::Csv => report.write_csv(&mut out)?,
            }
            out.flush()?;
        }
        Command::Sweep(s) => {
            let config = run_config(&s.analysis, false)?;
            let prepared = prepare(load(&config)?, &config.analysis)?;
            let curve = sweep(&prepared, &config.analysis, s.axis.into(), &s.values)?;
            write_curve(&curve, open_output(s.out.output.as_deref())?)?;
        }
        Command::Benchmark(b) => {
            let (log, analysis) = match &b.analysis.input {
                Some(_) => {
                    let config = run_config(&b.analysis, false)?;
                    (load(&config)?, config.analysis)
                }
                None => {
                    let start = Instant::now();
                    let log = synth::generate(&b.synthetic.config())?.log;
                    eprintln!(
                        "generated {} synthetic rows in {:.1} ms",
                        log.row_count(),
                        start.elapsed().as_secs_f64() * 1e3
                    );
                    (log, b.analysis.analysis_config(LABEL_COLUMN, TARGET_VALUE))
                }
            };
            let prepared = prepare(log, &analysis)?;
            let algorithms: Vec<_> = b.algorithms.iter().map(|&a| a.into()).collect();
            let rows = benchmark(
                &prepared,
                &analysis,
                &algorithms,
                &b.thread_counts,
                b.min_groups,
            )?;
            write_bench_table(&rows, open_output(b.out.output.as_deref())?)?;
        }
        Command::Generate(g) => {
            let data = synth::generate(&g.synthetic.config())?;
            write_log(&data.log, g.format.into(), g.out.output.as_deref())?;
            for pattern in &data.planted {
                let items: Vec<String> = pattern.iter().map(|(c, v)| format!("{c}={v}")).collect();
                eprintln!("planted: {}", items.join(";"));
            }
        }
    }
    Ok(())
}

fn write_log(
    log: &StructuredLog,
    format: rootscan::InputFormat,
    path: Option<&Path>,
) -> anyhow::Result<()> {
    write_structured_log(log, format, open_output(path)?)?;
    Ok(())
}
