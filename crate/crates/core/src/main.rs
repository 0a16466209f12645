use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use casimir_neq::config_file::{ConfigFile, Overrides, RunConfig};
use casimir_neq::scan::{self, OutputField, ScanAxis, ScanRequest, ScanTable};
use casimir_neq::units::{format_length, parse_length};
use casimir_neq::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "casimir-neq", version, about = "Nonequilibrium Casimir pressure between similar metallic plates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the full pressure breakdown at one configuration.
    Point(Common),
    /// Run the scan described in the config file.
    Scan(Common),
    /// Find the plate thickness where the nonequilibrium term changes sign.
    FindZero {
        #[command(flatten)]
        common: Common,
        /// Lower end of the thickness bracket.
        #[arg(long)]
        d_lo: Option<String>,
        /// Upper end of the thickness bracket.
        #[arg(long)]
        d_hi: Option<String>,
        /// Stop when the bracket is narrower than this.
        #[arg(long)]
        tol_d: Option<String>,
    },
    /// Material tables.
    Materials {
        #[command(subcommand)]
        action: MaterialsAction,
    },
}

#[derive(Subcommand, Debug)]
enum MaterialsAction {
    /// List built-in and config-defined materials.
    List {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    material: Option<String>,
    /// drude, drude-fixed:<T> or plasma.
    #[arg(long)]
    model: Option<String>,
    /// Plate separation, e.g. 1um.
    #[arg(long)]
    a: Option<String>,
    /// Plate thickness, e.g. 20nm.
    #[arg(long)]
    d: Option<String>,
    /// Upper plate temperature in K.
    #[arg(long)]
    t1: Option<String>,
    /// Lower plate temperature in K.
    #[arg(long)]
    t2: Option<String>,
    /// Relative tolerance on each pressure.
    #[arg(long)]
    tol: Option<f64>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for scans (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl Common {
    fn load(&self) -> Result<(ConfigFile, RunConfig)> {
        let mut file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        file.apply(&Overrides {
            material: self.material.clone(),
            model: self.model.clone(),
            a: self.a.clone(),
            d: self.d.clone(),
            t1: self.t1.clone(),
            t2: self.t2.clone(),
            tol: self.tol,
        });
        let run = file.resolve()?;
        Ok((file, run))
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn metadata(file: &ConfigFile, run: &RunConfig, command: &str) -> Vec<String> {
    vec![
        format!("casimir-neq {} {command}", env!("CARGO_PKG_VERSION")),
        format!("tol = {:e}", run.tol),
        file.to_toml(),
    ]
}

fn write_table(common: &Common, table: &ScanTable, meta: &[String]) -> Result<()> {
    let mut out = common.output()?;
    scan::write_csv(table, meta, &mut out)?;
    out.flush()?;
    Ok(())
}

fn point(common: &Common) -> Result<()> {
    let (file, run) = common.load()?;
    let req = ScanRequest {
        base: run.base.clone(),
        axis: ScanAxis::Separation,
        grid: vec![run.base.separation],
        series: run.series.clone(),
        outputs: OutputField::ALL.to_vec(),
    };
    let table = scan::scan(&req, run.tol, common.workers)?;
    if common.out.is_some() {
        return write_table(common, &table, &metadata(&file, &run, "point"));
    }
    let mut out = common.output()?;
    writeln!(
        out,
        "{} {}  a = {}  d = {}  T1 = {} K  T2 = {} K",
        run.base.plate_upper.material.name(),
        run.models.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
        format_length(run.base.separation),
        format_length(run.base.plate_upper.thickness),
        run.base.t1(),
        run.base.t2(),
    )?;
    let width = table.columns.iter().map(|c| c.len()).max().unwrap_or(0);
    for (name, value) in table.columns.iter().zip(&table.records[0].values) {
        writeln!(out, "{name:<width$}  {}", scan::format_value(*value))?;
    }
    out.flush()?;
    Ok(())
}

fn run_scan(common: &Common) -> Result<()> {
    let (file, run) = common.load()?;
    let req = run
        .scan
        .clone()
        .ok_or_else(|| Error::Config("scan needs a [scan] section in the config file".into()))?;
    let table = scan::scan(&req, run.tol, common.workers)?;
    let mut meta = metadata(&file, &run, "scan");
    meta.insert(1, format!("axis = {} (m)", req.axis.name()));
    write_table(common, &table, &meta)
}

fn find_zero(common: &Common, d_lo: Option<&str>, d_hi: Option<&str>, tol_d: Option<&str>) -> Result<()> {
    let (_, run) = common.load()?;
    let (mut lo, mut hi) = run.zero_bracket.unwrap_or((20e-9, 1e-6));
    if let Some(s) = d_lo {
        lo = parse_length(s)?;
    }
    if let Some(s) = d_hi {
        hi = parse_length(s)?;
    }
    let tol_d = match tol_d {
        Some(s) => parse_length(s)?,
        None => run.tol_d,
    };
    let mut out = common.output()?;
    for model in &run.models {
        let config = run.base.with_model(*model);
        let d = scan::find_zero_thickness(&config, lo, hi, tol_d, run.tol)?;
        writeln!(
            out,
            "{} {model} a = {}: zero crossing at d = {} ({})",
            config.plate_upper.material.name(),
            format_length(config.separation),
            format_length(d),
            scan::format_value(d),
        )?;
    }
    out.flush()?;
    Ok(())
}

fn materials(config: Option<&PathBuf>) -> Result<()> {
    let file = match config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let run = file.resolve()?;
    let mut out = io::stdout().lock();
    writeln!(out, "{:<8} {:>10} {:>12}  gamma table (K: meV)", "name", "hw_p (eV)", "c/w_p (nm)")?;
    for m in run.db.iter() {
        let table: Vec<String> = m
            .gamma_table()
            .iter()
            .map(|g| format!("{}: {}", g.temperature, g.gamma_ev * 1e3))
            .collect();
        writeln!(
            out,
            "{:<8} {:>10} {:>12.1}  {}",
            m.name(),
            m.plasma_energy_ev(),
            m.penetration_depth() * 1e9,
            table.join(", ")
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Point(c) => point(c),
        Command::Scan(c) => run_scan(c),
        Command::FindZero {
            common,
            d_lo,
            d_hi,
            tol_d,
        } => find_zero(common, d_lo.as_deref(), d_hi.as_deref(), tol_d.as_deref()),
        Command::Materials {
            action: MaterialsAction::List { config },
        } => materials(config.as_ref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
