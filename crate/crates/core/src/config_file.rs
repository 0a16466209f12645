//! TOML run configuration shared by all subcommands.
//!
//! ```toml
//! [[material]]            # optional additions to the built-in table
//! name = "Cu"
//! plasma_energy_ev = 8.9
//! gamma_mev = [[300.0, 30.0], [500.0, 50.0]]
//!
//! [plates]
//! material = "Au"
//! thickness = "20nm"
//! t1 = 300                # upper plate, K
//! t2 = 500                # lower plate, K
//!
//! [geometry]
//! separation = "1um"
//!
//! [models]
//! list = ["drude", "plasma"]
//!
//! [tolerance]
//! rel = 1e-6
//! zero_d = "0.05nm"
//!
//! [scan]
//! axis = "separation"
//! from = "0.5um"
//! to = "2um"
//! points = 16             # or: values = ["0.5um", "1um"]
//! spacing = "linear"      # or "log"
//! outputs = ["p_neq"]
//!
//! [[series]]              # optional; each entry is crossed with every model
//! thickness = "1um"
//!
//! [find_zero]
//! d_lo = "20nm"
//! d_hi = "30nm"
//! ```
//!
//! Command-line flags override the corresponding file values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{MaterialDb, MaterialParams};
use crate::permittivity::PermittivityModel;
use crate::scan::{OutputField, ScanAxis, ScanRequest, SeriesSpec, DEFAULT_TOL_D};
use crate::system::SystemConfig;
use crate::units::{parse_length, parse_temperature};
use crate::DEFAULT_TOL;

/// A number or a string such as `"300K"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Temperature {
    Kelvin(f64),
    Text(String),
}

impl Temperature {
    fn resolve(&self) -> Result<f64> {
        match self {
            Temperature::Kelvin(v) => parse_temperature(&v.to_string()),
            Temperature::Text(s) => parse_temperature(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialEntry {
    pub name: String,
    pub plasma_energy_ev: f64,
    /// (temperature in K, γ in meV) pairs.
    pub gamma_mev: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatesSection {
    pub material: Option<String>,
    pub thickness: Option<String>,
    pub t1: Option<Temperature>,
    pub t2: Option<Temperature>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub separation: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelsSection {
    pub list: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    pub rel: Option<f64>,
    pub zero_d: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub axis: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub points: Option<usize>,
    pub spacing: Option<String>,
    pub values: Option<Vec<String>>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub model: Option<String>,
    pub material: Option<String>,
    pub thickness: Option<String>,
    pub separation: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FindZeroSection {
    pub d_lo: Option<String>,
    pub d_hi: Option<String>,
}

/// The file as written. Kept in this form so it can be echoed verbatim
/// into CSV metadata after command-line overrides are applied.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub material: Vec<MaterialEntry>,
    #[serde(default)]
    pub plates: PlatesSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub models: ModelsSection,
    #[serde(default)]
    pub tolerance: ToleranceSection,
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesEntry>,
    pub find_zero: Option<FindZeroSection>,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub material: Option<String>,
    pub model: Option<String>,
    pub a: Option<String>,
    pub d: Option<String>,
    pub t1: Option<String>,
    pub t2: Option<String>,
    pub tol: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(m) = &o.material {
            self.plates.material = Some(m.clone());
        }
        if let Some(m) = &o.model {
            self.models.list = vec![m.clone()];
            for s in &mut self.series {
                s.model = None;
            }
        }
        if let Some(a) = &o.a {
            self.geometry.separation = Some(a.clone());
        }
        if let Some(d) = &o.d {
            self.plates.thickness = Some(d.clone());
        }
        if let Some(t) = &o.t1 {
            self.plates.t1 = Some(Temperature::Text(t.clone()));
        }
        if let Some(t) = &o.t2 {
            self.plates.t2 = Some(Temperature::Text(t.clone()));
        }
        if let Some(t) = o.tol {
            self.tolerance.rel = Some(t);
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let mut db = MaterialDb::builtin();
        for m in &self.material {
            let table: Vec<(f64, f64)> = m.gamma_mev.iter().map(|&(t, g)| (t, g * 1e-3)).collect();
            db.insert(MaterialParams::new(&m.name, m.plasma_energy_ev, &table)?);
        }
        let material = db.get(self.plates.material.as_deref().unwrap_or("Au"))?.clone();
        let thickness = parse_length(self.plates.thickness.as_deref().unwrap_or("20nm"))?;
        let separation = parse_length(self.geometry.separation.as_deref().unwrap_or("1um"))?;
        let t1 = self.plates.t1.as_ref().map(Temperature::resolve).transpose()?.unwrap_or(300.0);
        let t2 = self.plates.t2.as_ref().map(Temperature::resolve).transpose()?.unwrap_or(500.0);
        let models: Vec<PermittivityModel> = if self.models.list.is_empty() {
            vec![PermittivityModel::DrudeT]
        } else {
            self.models.list.iter().map(|s| s.parse()).collect::<Result<_>>()?
        };
        let base = SystemConfig::similar(material, models[0], thickness, separation, t1, t2)?;
        let tol = self.tolerance.rel.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(Error::config(format!("tolerance must lie in (0, 1e-2], got {tol}")));
        }
        let tol_d = self.tolerance.zero_d.as_deref().map(parse_length).transpose()?.unwrap_or(DEFAULT_TOL_D);

        let mut series = Vec::new();
        let entries: Vec<SeriesEntry> = if self.series.is_empty() {
            vec![SeriesEntry::default()]
        } else {
            self.series.clone()
        };
        for e in &entries {
            let entry_models = match &e.model {
                Some(m) => vec![m.parse()?],
                None => models.clone(),
            };
            let material = e.material.as_deref().map(|n| db.get(n).cloned()).transpose()?;
            let thickness = e.thickness.as_deref().map(parse_length).transpose()?;
            let separation = e.separation.as_deref().map(parse_length).transpose()?;
            for model in entry_models {
                series.push(SeriesSpec {
                    model,
                    material: material.clone(),
                    thickness,
                    separation,
                });
            }
        }

        let scan = self.scan.as_ref().map(|s| resolve_scan(s, &base, &series)).transpose()?;
        let zero_bracket = match &self.find_zero {
            Some(z) => Some((
                parse_length(z.d_lo.as_deref().ok_or_else(|| Error::config("find_zero.d_lo missing"))?)?,
                parse_length(z.d_hi.as_deref().ok_or_else(|| Error::config("find_zero.d_hi missing"))?)?,
            )),
            None => None,
        };
        Ok(RunConfig {
            db,
            base,
            models,
            series,
            tol,
            tol_d,
            scan,
            zero_bracket,
        })
    }
}

fn resolve_scan(s: &ScanSection, base: &SystemConfig, series: &[SeriesSpec]) -> Result<ScanRequest> {
    let axis: ScanAxis = s.axis.as_deref().unwrap_or("separation").parse()?;
    let grid = match &s.values {
        Some(v) => v.iter().map(|x| parse_length(x)).collect::<Result<Vec<f64>>>()?,
        None => {
            let from = parse_length(s.from.as_deref().ok_or_else(|| Error::config("scan.from missing"))?)?;
            let to = parse_length(s.to.as_deref().ok_or_else(|| Error::config("scan.to missing"))?)?;
            let n = s.points.ok_or_else(|| Error::config("scan.points missing"))?;
            let log = match s.spacing.as_deref().unwrap_or("linear") {
                "linear" => false,
                "log" => true,
                other => return Err(Error::config(format!("unknown spacing '{other}' (linear or log)"))),
            };
            grid_points(from, to, n, log)?
        }
    };
    let outputs = if s.outputs.is_empty() {
        vec![OutputField::PNeq]
    } else {
        s.outputs.iter().map(|o| o.parse()).collect::<Result<Vec<_>>>()?
    };
    let req = ScanRequest {
        base: base.clone(),
        axis,
        grid,
        series: series.to_vec(),
        outputs,
    };
    req.validate()?;
    Ok(req)
}

/// `n` points from `from` to `to` inclusive, linearly or geometrically spaced.
pub fn grid_points(from: f64, to: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::config("scan.points must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![from]);
    }
    if !(from < to) {
        return Err(Error::config("scan.from must be below scan.to"));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let s = i as f64 / last;
            if i == n - 1 {
                to
            } else if log {
                from * (to / from).powf(s)
            } else {
                from + (to - from) * s
            }
        })
        .collect())
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub db: MaterialDb,
    /// Base system using the first model.
    pub base: SystemConfig,
    pub models: Vec<PermittivityModel>,
    pub series: Vec<SeriesSpec>,
    pub tol: f64,
    pub tol_d: f64,
    pub scan: Option<ScanRequest>,
    pub zero_bracket: Option<(f64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[[material]]
name = "Cu"
plasma_energy_ev = 8.9
gamma_mev = [[300.0, 30.0], [500.0, 50.0]]

[plates]
material = "Ti"
thickness = "20nm"
t1 = 300
t2 = "500K"

[geometry]
separation = "0.5um"

[models]
list = ["drude", "plasma"]

[tolerance]
rel = 1e-5

[scan]
axis = "separation"
from = "0.5um"
to = "2um"
points = 4
outputs = ["p_neq", "p_neq_over_p0"]

[[series]]
thickness = "20nm"

[[series]]
thickness = "1um"
"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ConfigFile::parse(SAMPLE).unwrap();
        let run = cfg.resolve().unwrap();
        assert_eq!(run.base.plate_upper.material.name(), "Ti");
        assert_eq!(run.base.separation, 5e-7);
        assert_eq!(run.tol, 1e-5);
        assert_eq!(run.series.len(), 4);
        assert!(run.db.get("Cu").is_ok());
        let scan = run.scan.unwrap();
        assert_eq!(scan.grid, vec![5e-7, 1e-6, 1.5e-6, 2e-6]);
        assert_eq!(scan.columns().len(), 8);
        assert_eq!(scan.columns()[1], "p_neq@plasma/d=20nm");
    }

    #[test]
    fn overrides_win() {
        let mut cfg = ConfigFile::parse(SAMPLE).unwrap();
        cfg.apply(&Overrides {
            material: Some("Au".into()),
            model: Some("drude-fixed:300".into()),
            a: Some("1um".into()),
            t2: Some("400".into()),
            tol: Some(1e-4),
            ..Overrides::default()
        });
        let run = cfg.resolve().unwrap();
        assert_eq!(run.base.plate_upper.material.name(), "Au");
        assert_eq!(run.models, vec![PermittivityModel::DrudeFixed(300.0)]);
        assert_eq!(run.base.separation, 1e-6);
        assert_eq!(run.base.t2(), 400.0);
        assert_eq!(run.tol, 1e-4);
        assert_eq!(run.series.len(), 2);
    }

    #[test]
    fn echo_reparses_identically() {
        let cfg = ConfigFile::parse(SAMPLE).unwrap();
        assert_eq!(ConfigFile::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn errors_are_config_errors() {
        for bad in [
            "[plates]\nthickness = \"20\"",
            "[plates]\nmaterial = \"Unobtainium\"",
            "[models]\nlist = [\"lorentz\"]",
            "[tolerance]\nrel = 0.5",
            "[geometry]\nseparations = \"1um\"",
            "[scan]\naxis = \"separation\"\nvalues = [\"2um\", \"1um\"]",
            "not toml at all [",
        ] {
            let err = ConfigFile::parse(bad).and_then(|c| c.resolve()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(grid_points(1.0, 3.0, 3, false).unwrap(), vec![1.0, 2.0, 3.0]);
        let g = grid_points(1.0, 100.0, 3, true).unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert_eq!(g[2], 100.0);
        assert!(grid_points(2.0, 1.0, 3, false).is_err());
    }

    #[test]
    fn defaults_without_file() {
        let run = ConfigFile::default().resolve().unwrap();
        assert_eq!(run.base.plate_upper.material.name(), "Au");
        assert_eq!((run.base.t1(), run.base.t2()), (300.0, 500.0));
        assert_eq!(run.tol, DEFAULT_TOL);
        assert!(run.scan.is_none());
    }
}
