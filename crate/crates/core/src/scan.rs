//! Single-point evaluation, parameter scans, zero-crossing search and
//! CSV output.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::equilibrium::{pressure_eq_mean, pressure_eq_tilde};
use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::noneq::{assemble, delta_pneq, pressure_neq, NoneqSectors, PressureBreakdown};
use crate::permittivity::PermittivityModel;
use crate::system::SystemConfig;
use crate::units::format_length;

/// Default bracket width for the thickness root search, in metres.
pub const DEFAULT_TOL_D: f64 = 0.05e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    Separation,
    Thickness,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::Separation => "separation",
            ScanAxis::Thickness => "thickness",
        }
    }

    fn apply(self, config: &SystemConfig, value: f64) -> SystemConfig {
        match self {
            ScanAxis::Separation => config.with_separation(value),
            ScanAxis::Thickness => config.with_thickness(value),
        }
    }
}

impl FromStr for ScanAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "separation" | "a" => Ok(ScanAxis::Separation),
            "thickness" | "d" => Ok(ScanAxis::Thickness),
            other => Err(Error::config(format!("unknown scan axis '{other}' (separation or thickness)"))),
        }
    }
}

/// A column that can be requested from a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputField {
    PNeq,
    PEqTilde,
    DeltaPNeq,
    DeltaProp,
    DeltaEvan,
    PEqMean,
    DeltaEqRel,
    BlackbodyOffset,
    PNeqUpper,
    PIdeal,
    RatioDeltaOverTotal,
    /// P_neq / P₀
    PNeqOverP0,
    /// P_neq in μPa
    PNeqMicroPa,
    /// ΔP_neq in μPa
    DeltaPNeqMicroPa,
}

impl OutputField {
    pub const ALL: [OutputField; 14] = [
        OutputField::PNeq,
        OutputField::PEqTilde,
        OutputField::DeltaPNeq,
        OutputField::DeltaProp,
        OutputField::DeltaEvan,
        OutputField::PEqMean,
        OutputField::DeltaEqRel,
        OutputField::BlackbodyOffset,
        OutputField::PNeqUpper,
        OutputField::PIdeal,
        OutputField::RatioDeltaOverTotal,
        OutputField::PNeqOverP0,
        OutputField::PNeqMicroPa,
        OutputField::DeltaPNeqMicroPa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutputField::PNeq => "p_neq",
            OutputField::PEqTilde => "p_eq_tilde",
            OutputField::DeltaPNeq => "delta_p_neq",
            OutputField::DeltaProp => "delta_prop",
            OutputField::DeltaEvan => "delta_evan",
            OutputField::PEqMean => "p_eq_mean",
            OutputField::DeltaEqRel => "delta_eq_rel",
            OutputField::BlackbodyOffset => "blackbody_offset",
            OutputField::PNeqUpper => "p_neq_upper",
            OutputField::PIdeal => "p_ideal",
            OutputField::RatioDeltaOverTotal => "ratio_delta_over_total",
            OutputField::PNeqOverP0 => "p_neq_over_p0",
            OutputField::PNeqMicroPa => "p_neq_upa",
            OutputField::DeltaPNeqMicroPa => "delta_p_neq_upa",
        }
    }

    pub fn extract(self, b: &PressureBreakdown) -> f64 {
        match self {
            OutputField::PNeq => b.p_neq,
            OutputField::PEqTilde => b.p_eq_tilde,
            OutputField::DeltaPNeq => b.delta_p_neq,
            OutputField::DeltaProp => b.delta_prop,
            OutputField::DeltaEvan => b.delta_evan,
            OutputField::PEqMean => b.p_eq_mean,
            OutputField::DeltaEqRel => b.delta_eq_rel,
            OutputField::BlackbodyOffset => b.blackbody_offset,
            OutputField::PNeqUpper => b.p_neq_upper,
            OutputField::PIdeal => b.p_ideal,
            OutputField::RatioDeltaOverTotal => b.ratio_delta_over_total,
            OutputField::PNeqOverP0 => b.p_neq_over_p0(),
            OutputField::PNeqMicroPa => b.p_neq * 1e6,
            OutputField::DeltaPNeqMicroPa => b.delta_p_neq * 1e6,
        }
    }

    fn needs(self) -> Needs {
        use OutputField::*;
        match self {
            PNeq | PNeqUpper | RatioDeltaOverTotal | PNeqOverP0 | PNeqMicroPa => Needs {
                tilde: true,
                noneq: true,
                mean: false,
            },
            PEqTilde => Needs {
                tilde: true,
                ..Needs::NONE
            },
            DeltaPNeq | DeltaProp | DeltaEvan | DeltaPNeqMicroPa => Needs {
                noneq: true,
                ..Needs::NONE
            },
            PEqMean => Needs {
                mean: true,
                ..Needs::NONE
            },
            DeltaEqRel => Needs {
                tilde: true,
                mean: true,
                noneq: false,
            },
            BlackbodyOffset | PIdeal => Needs::NONE,
        }
    }
}

impl fmt::Display for OutputField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutputField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        OutputField::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| {
                let names: Vec<&str> = OutputField::ALL.iter().map(|f| f.name()).collect();
                Error::config(format!("unknown output '{s}', expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Needs {
    tilde: bool,
    noneq: bool,
    mean: bool,
}

impl Needs {
    const NONE: Needs = Needs {
        tilde: false,
        noneq: false,
        mean: false,
    };

    fn union(self, o: Needs) -> Needs {
        Needs {
            tilde: self.tilde || o.tilde,
            noneq: self.noneq || o.noneq,
            mean: self.mean || o.mean,
        }
    }
}

/// One curve of a scan: a model plus optional overrides of the base
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub model: PermittivityModel,
    pub material: Option<MaterialParams>,
    pub thickness: Option<f64>,
    pub separation: Option<f64>,
}

impl SeriesSpec {
    pub fn model(model: PermittivityModel) -> Self {
        SeriesSpec {
            model,
            material: None,
            thickness: None,
            separation: None,
        }
    }

    /// `model`, followed by `/material`, `/d=..`, `/a=..` for each override.
    pub fn label(&self) -> String {
        let mut s = self.model.to_string();
        if let Some(m) = &self.material {
            s.push('/');
            s.push_str(m.name());
        }
        if let Some(d) = self.thickness {
            s.push_str("/d=");
            s.push_str(&format_length(d));
        }
        if let Some(a) = self.separation {
            s.push_str("/a=");
            s.push_str(&format_length(a));
        }
        s
    }

    pub fn apply(&self, base: &SystemConfig) -> SystemConfig {
        let mut c = base.with_model(self.model);
        if let Some(m) = &self.material {
            c = c.with_material(m.clone());
        }
        if let Some(d) = self.thickness {
            c = c.with_thickness(d);
        }
        if let Some(a) = self.separation {
            c = c.with_separation(a);
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRequest {
    pub base: SystemConfig,
    pub axis: ScanAxis,
    pub grid: Vec<f64>,
    pub series: Vec<SeriesSpec>,
    pub outputs: Vec<OutputField>,
}

impl ScanRequest {
    /// One series per model, no other overrides.
    pub fn with_models(
        base: SystemConfig,
        axis: ScanAxis,
        grid: Vec<f64>,
        models: &[PermittivityModel],
        outputs: Vec<OutputField>,
    ) -> Self {
        ScanRequest {
            base,
            axis,
            grid,
            series: models.iter().copied().map(SeriesSpec::model).collect(),
            outputs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("scan grid is empty"));
        }
        if !self.grid.iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(Error::config("scan grid values must be positive"));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config("scan grid must be strictly increasing"));
        }
        if self.series.is_empty() {
            return Err(Error::config("scan needs at least one model"));
        }
        if self.outputs.is_empty() {
            return Err(Error::config("scan needs at least one output field"));
        }
        self.base.validate()?;
        for s in &self.series {
            s.apply(&self.base).validate()?;
        }
        Ok(())
    }

    /// Column names after `axis_value`, output-major.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = Vec::with_capacity(self.outputs.len() * self.series.len());
        for out in &self.outputs {
            for s in &self.series {
                cols.push(format!("{}@{}", out.name(), s.label()));
            }
        }
        cols
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub axis_value: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub columns: Vec<String>,
    pub records: Vec<ScanRecord>,
}

impl ScanTable {
    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of one column, in grid order.
    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(self.records.iter().map(|r| r.values[i]).collect())
    }

    /// Copy with every value rounded to the precision written to CSV.
    pub fn quantized(&self) -> ScanTable {
        let q = |x: f64| format_value(x).parse::<f64>().unwrap_or(x);
        ScanTable {
            columns: self.columns.clone(),
            records: self
                .records
                .iter()
                .map(|r| ScanRecord {
                    axis_value: q(r.axis_value),
                    values: r.values.iter().map(|&v| q(v)).collect(),
                })
                .collect(),
        }
    }
}

/// Full pressure breakdown for one configuration.
pub fn run_point(config: &SystemConfig, tol: f64) -> Result<PressureBreakdown> {
    pressure_neq(config, tol)
}

fn evaluate(config: &SystemConfig, tol: f64, needs: Needs) -> Result<PressureBreakdown> {
    if needs == (Needs { tilde: true, noneq: true, mean: true }) {
        return pressure_neq(config, tol);
    }
    config.validate()?;
    let tilde = if needs.tilde { pressure_eq_tilde(config, tol)? } else { f64::NAN };
    let sectors = if needs.noneq {
        delta_pneq(config, tol)?
    } else {
        NoneqSectors {
            propagating: f64::NAN,
            evanescent: f64::NAN,
        }
    };
    let mean = if needs.mean {
        pressure_eq_mean(config.separation, config.t1(), config.t2(), &config.plate_upper, tol)?
    } else {
        f64::NAN
    };
    Ok(assemble(config, tilde, sectors, mean))
}

/// Evaluates every grid point for every series. Points run concurrently on
/// `workers` threads (0 means one per core); rows come back in grid order
/// and each cell is computed independently, so the result does not depend
/// on scheduling.
pub fn scan(request: &ScanRequest, tol: f64, workers: usize) -> Result<ScanTable> {
    request.validate()?;
    let needs = request.outputs.iter().fold(Needs::NONE, |n, o| n.union(o.needs()));
    let jobs: Vec<(usize, usize)> = (0..request.grid.len())
        .flat_map(|i| (0..request.series.len()).map(move |j| (i, j)))
        .collect();
    let run = |&(i, j): &(usize, usize)| {
        let config = request.axis.apply(&request.series[j].apply(&request.base), request.grid[i]);
        evaluate(&config, tol, needs)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<PressureBreakdown>> = pool.install(|| jobs.par_iter().map(run).collect());

    let n_series = request.series.len();
    let mut breakdowns = Vec::with_capacity(results.len());
    for r in results {
        breakdowns.push(r?);
    }
    let records = request
        .grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let row = &breakdowns[i * n_series..(i + 1) * n_series];
            let mut values = Vec::with_capacity(request.outputs.len() * n_series);
            for out in &request.outputs {
                values.extend(row.iter().map(|b| out.extract(b)));
            }
            ScanRecord { axis_value: x, values }
        })
        .collect();
    Ok(ScanTable {
        columns: request.columns(),
        records,
    })
}

/// Relative difference (P_plasma − P_drude)/P_plasma of the total lower-plate
/// pressure between the plasma model and the model of `config`.
pub fn model_relative_difference(config: &SystemConfig, tol: f64) -> Result<f64> {
    let plasma = pressure_neq(&config.with_model(PermittivityModel::Plasma), tol)?.p_neq;
    let other = pressure_neq(config, tol)?.p_neq;
    Ok((plasma - other) / plasma)
}

/// Plate thickness in [d_lo, d_hi] at which ΔP_neq changes sign, by
/// bisection down to a bracket narrower than `tol_d`.
pub fn find_zero_thickness(config: &SystemConfig, d_lo: f64, d_hi: f64, tol_d: f64, tol: f64) -> Result<f64> {
    if !(d_lo > 0.0 && d_lo < d_hi) {
        return Err(Error::config(format!("invalid thickness bracket [{d_lo:e}, {d_hi:e}]")));
    }
    if !(tol_d > 0.0) {
        return Err(Error::config("thickness tolerance must be positive"));
    }
    let f = |d: f64| -> Result<f64> { Ok(delta_pneq(&config.with_thickness(d), tol)?.total()) };
    let (mut lo, mut hi) = (d_lo, d_hi);
    let (mut f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoZeroCrossing {
            d_lo,
            d_hi,
            f_lo,
            f_hi,
        });
    }
    while hi - lo > tol_d {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Twelve significant digits in scientific notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes `#`-prefixed metadata lines, the header and one row per record.
pub fn write_csv<W: Write>(table: &ScanTable, metadata: &[String], mut out: W) -> Result<()> {
    for line in metadata {
        for l in line.lines() {
            writeln!(out, "# {l}")?;
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["axis_value".to_string()];
    header.extend(table.columns.iter().cloned());
    w.write_record(&header)?;
    for r in &table.records {
        let mut row = Vec::with_capacity(r.values.len() + 1);
        row.push(format_value(r.axis_value));
        row.extend(r.values.iter().map(|&v| format_value(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a file produced by [`write_csv`], skipping metadata lines.
pub fn read_csv<R: Read>(input: R) -> Result<ScanTable> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("axis_value") {
        return Err(Error::config("csv header must start with axis_value"));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut records = Vec::new();
    for row in r.records() {
        let row = row?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad number '{s}' in csv")))
        };
        let axis_value = parse(&row[0])?;
        let values = row.iter().skip(1).map(parse).collect::<Result<Vec<f64>>>()?;
        if values.len() != columns.len() {
            return Err(Error::config("csv row length does not match header"));
        }
        records.push(ScanRecord { axis_value, values });
    }
    Ok(ScanTable { columns, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SystemConfig {
        SystemConfig::similar(MaterialParams::gold(), PermittivityModel::DrudeT, 2e-8, 1e-6, 300.0, 500.0).unwrap()
    }

    #[test]
    fn field_names_round_trip() {
        for f in OutputField::ALL {
            assert_eq!(f.name().parse::<OutputField>().unwrap(), f);
        }
        assert!("pressure".parse::<OutputField>().is_err());
        assert_eq!("thickness".parse::<ScanAxis>().unwrap(), ScanAxis::Thickness);
    }

    #[test]
    fn column_labels() {
        let mut req = ScanRequest::with_models(
            base(),
            ScanAxis::Separation,
            vec![5e-7, 1e-6],
            &[PermittivityModel::DrudeT, PermittivityModel::Plasma],
            vec![OutputField::PNeq],
        );
        assert_eq!(req.columns(), vec!["p_neq@drude", "p_neq@plasma"]);
        req.series[1].thickness = Some(1e-6);
        req.series[1].material = Some(MaterialParams::titanium());
        assert_eq!(req.columns()[1], "p_neq@plasma/Ti/d=1um");
    }

    #[test]
    fn invalid_grids_rejected() {
        let mk = |grid: Vec<f64>| {
            ScanRequest::with_models(base(), ScanAxis::Separation, grid, &[PermittivityModel::Plasma], vec![OutputField::PNeq])
        };
        assert!(mk(vec![]).validate().is_err());
        assert!(mk(vec![1e-6, 5e-7]).validate().is_err());
        assert!(mk(vec![1e-6, 1e-6]).validate().is_err());
        assert!(mk(vec![-1e-6]).validate().is_err());
        assert!(mk(vec![5e-7, 1e-6]).validate().is_ok());
    }

    #[test]
    fn csv_round_trip_is_exact_after_quantization() {
        let table = ScanTable {
            columns: vec!["p_neq@drude".into(), "delta_p_neq@drude/d=20nm".into()],
            records: vec![
                ScanRecord {
                    axis_value: 5e-7,
                    values: vec![-1.234567890123456e-3, 8.2e-5],
                },
                ScanRecord {
                    axis_value: 1e-6,
                    values: vec![std::f64::consts::PI * -1e-4, -0.0],
                },
            ],
        };
        let mut buf = Vec::new();
        write_csv(&table, &["casimir-neq test".into(), "a = 1\nb = 2".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("# casimir-neq test\n# a = 1\n# b = 2\naxis_value,"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, table.quantized());
        assert_eq!(back.quantized(), back);
    }

    #[test]
    fn plasma_point_has_exact_zero_nonequilibrium() {
        let c = base().with_model(PermittivityModel::Plasma);
        let b = run_point(&c, 1e-6).unwrap();
        assert_eq!(b.delta_p_neq, 0.0);
        assert_eq!(b.delta_eq_rel, 0.0);
    }

    #[test]
    fn partial_scan_matches_full_breakdown() {
        let req = ScanRequest::with_models(
            base(),
            ScanAxis::Separation,
            vec![1e-6],
            &[PermittivityModel::DrudeT],
            vec![OutputField::DeltaEqRel, OutputField::PIdeal],
        );
        let t = scan(&req, 1e-6, 1).unwrap();
        let full = run_point(&base(), 1e-6).unwrap();
        assert_eq!(t.records[0].values, vec![full.delta_eq_rel, full.p_ideal]);
    }

    #[test]
    fn bad_bracket_is_config_error() {
        let e = find_zero_thickness(&base(), 3e-8, 2e-8, 1e-11, 1e-6).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
