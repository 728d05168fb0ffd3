use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wsn_compress::energy::{energy_ratio, CpuProfile, RadioProfile};

use wsn_bench::dataset::{run_dataset_file, write_fit_points};
use wsn_bench::fit::{default_numerator_degree, refit_results, FitInput};
use wsn_bench::sweep::write_rows;
use wsn_bench::tradeoff::{default_eta_grid, tradeoff_table, write_tradeoff};
use wsn_bench::{run_sweep, ExperimentConfig, Method};

#[derive(Parser)]
#[command(name = "wsn-bench", version, about = "Lossy compression vs. radio energy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthetic sweep over methods, correlation lengths, tolerances and hardware.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Run the methods over N-sample blocks of one CSV column.
    Dataset {
        path: PathBuf,
        #[arg(long)]
        column: String,
        /// Also write (eta, xi, N_c) points here.
        #[arg(long)]
        fit_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compress-or-not verdicts for the built-in cost models on a ratio grid.
    Tradeoff {
        #[command(flatten)]
        common: Common,
    },
    /// Refit the tolerance and cost formulas from a results CSV.
    Fit {
        results: PathBuf,
        #[arg(long)]
        method: Method,
        /// Numerator degree of the rational tolerance fit.
        #[arg(long)]
        degree: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in CPU and radio profiles.
    Profiles,
}

#[derive(Args)]
struct Common {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Comma-separated method names.
    #[arg(long)]
    methods: Option<String>,
    /// Comma-separated radio profile names.
    #[arg(long)]
    hardware: Option<String>,
    /// Any configuration key, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    no_header_timestamp: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let mut apply = |key: &str, value: &str| cfg.set(key, value).map_err(|e| anyhow::anyhow!("--{key}: {e}"));
        for kv in &self.set {
            let Some((k, v)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got {kv:?}");
            };
            apply(k.trim(), v)?;
        }
        if let Some(s) = self.seed {
            apply("seed", &s.to_string())?;
        }
        if let Some(r) = self.runs {
            apply("runs", &r.to_string())?;
        }
        if let Some(m) = &self.methods {
            apply("methods", m)?;
        }
        if let Some(h) = &self.hardware {
            apply("hardware", h)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn timestamp(&self) -> Option<u64> {
        if self.no_header_timestamp {
            return None;
        }
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        open_output(self.out.as_deref())
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sweep { common } => {
            let cfg = common.config()?;
            let rows = run_sweep(&cfg)?;
            write_rows(common.output()?, &rows, common.timestamp())?;
        }
        Command::Dataset {
            path,
            column,
            fit_out,
            common,
        } => {
            let cfg = common.config()?;
            let run = run_dataset_file(&path, &column, &cfg)?;
            for d in &run.diagnostics {
                eprintln!("warning: {d}");
            }
            let mut out = common.output()?;
            writeln!(out, "# measured n_star {}", run.n_star)?;
            write_rows(out, &run.rows, common.timestamp())?;
            if let Some(p) = fit_out {
                write_fit_points(open_output(Some(&p))?, run.n_star, &run.fit_points)?;
            }
        }
        Command::Tradeoff { common } => {
            let cfg = common.config()?;
            let radios: Vec<RadioProfile> = cfg.hardware_profiles()?.into_iter().map(|h| h.radio).collect();
            let rows = tradeoff_table(&cfg.cpu_profile()?, &radios, &default_eta_grid())?;
            write_tradeoff(common.output()?, &rows)?;
        }
        Command::Fit {
            results,
            method,
            degree,
            common,
        } => {
            let cfg = common.config()?;
            let input = FitInput {
                method,
                sigma_noise: cfg.sigma_noise,
                n: cfg.n,
                bits_per_value: cfg.policy.bits_per_value,
                numerator_degree: degree.unwrap_or_else(|| default_numerator_degree(method)),
            };
            let file = File::open(&results).with_context(|| format!("cannot open {}", results.display()))?;
            let fit = refit_results(file, &input, &cfg.cpu_profile()?)?;
            common.output()?.write_all(fit.to_csv().as_bytes())?;
        }
        Command::Profiles => {
            let cpu = CpuProfile::msp430();
            let mut out = open_output(None)?;
            writeln!(out, "kind,name,detail")?;
            writeln!(
                out,
                "cpu,{},add={} sub={} mul={} div={} cmp={} cycles; {:e} J/cycle",
                cpu.name, cpu.cycles_add, cpu.cycles_sub, cpu.cycles_mul, cpu.cycles_div, cpu.cycles_cmp, cpu.energy_per_cycle
            )?;
            for radio in [RadioProfile::cc2420(), RadioProfile::aquamodem()] {
                writeln!(
                    out,
                    "radio,{},tx {:e} J/bit; rx {:e} J/bit; {} bit/s; {:.1} cycles/bit on {}",
                    radio.name,
                    radio.tx_energy_per_bit,
                    radio.rx_energy_per_bit,
                    radio.data_rate,
                    energy_ratio(&cpu, &radio),
                    cpu.name
                )?;
            }
            out.flush()?;
        }
    }
    Ok(())
}
