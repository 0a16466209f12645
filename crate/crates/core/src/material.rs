//! Drude parameters of metals and the temperature dependence of the
//! relaxation parameter.

use std::collections::BTreeMap;

use crate::constants::ev_to_rad_per_s;
use crate::error::{Error, Result};

/// One tabulated relaxation parameter: ħγ (eV) at a temperature (K).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPoint {
    pub temperature: f64,
    pub gamma_ev: f64,
}

/// Plasma frequency and tabulated relaxation parameter of a metal.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams {
    name: String,
    plasma_energy_ev: f64,
    gamma_table: Vec<GammaPoint>,
}

impl MaterialParams {
    /// `gamma_table` holds `(temperature K, ħγ eV)` pairs.
    pub fn new(
        name: impl Into<String>,
        plasma_energy_ev: f64,
        gamma_table: &[(f64, f64)],
    ) -> Result<Self> {
        let name = name.into();
        if !(plasma_energy_ev > 0.0 && plasma_energy_ev.is_finite()) {
            return Err(Error::config(format!(
                "material {name}: plasma energy must be positive, got {plasma_energy_ev}"
            )));
        }
        if gamma_table.is_empty() {
            return Err(Error::config(format!("material {name}: empty relaxation table")));
        }
        for w in gamma_table.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::config(format!(
                    "material {name}: relaxation table temperatures must be strictly increasing"
                )));
            }
        }
        for &(t, g) in gamma_table {
            if !(t > 0.0 && t.is_finite()) || !(g >= 0.0 && g.is_finite()) {
                return Err(Error::config(format!(
                    "material {name}: invalid relaxation entry ({t} K, {g} eV)"
                )));
            }
        }
        Ok(MaterialParams {
            name,
            plasma_energy_ev,
            gamma_table: gamma_table
                .iter()
                .map(|&(temperature, gamma_ev)| GammaPoint { temperature, gamma_ev })
                .collect(),
        })
    }

    /// Gold: ħω_p = 9.0 eV, ħγ = 35 meV at 300 K and 58 meV at 500 K.
    pub fn gold() -> Self {
        Self::new("Au", 9.0, &[(300.0, 0.035), (500.0, 0.058)]).expect("built-in table")
    }

    /// Titanium: ħω_p = 2.51 eV, ħγ = 47 meV at 300 K and 78 meV at 500 K.
    pub fn titanium() -> Self {
        Self::new("Ti", 2.51, &[(300.0, 0.047), (500.0, 0.078)]).expect("built-in table")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn plasma_energy_ev(&self) -> f64 {
        self.plasma_energy_ev
    }

    pub fn gamma_table(&self) -> &[GammaPoint] {
        &self.gamma_table
    }

    /// Plasma frequency ω_p in rad/s.
    pub fn omega_p(&self) -> f64 {
        ev_to_rad_per_s(self.plasma_energy_ev)
    }

    /// Penetration depth c/ω_p in metres.
    pub fn penetration_depth(&self) -> f64 {
        crate::constants::C / self.omega_p()
    }

    /// ħγ(T) in eV: piecewise linear through the table, linearly
    /// extrapolated beyond it and clamped at zero.
    pub fn gamma_ev_at(&self, temperature: f64) -> Result<f64> {
        if !(temperature > 0.0) {
            return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
        }
        let table = &self.gamma_table;
        if let Some(p) = table.iter().find(|p| p.temperature == temperature) {
            return Ok(p.gamma_ev);
        }
        let (lo, hi) = match table.len() {
            0 => return Err(Error::config(format!("material {}: empty relaxation table", self.name))),
            1 => return Ok(table[0].gamma_ev),
            n => {
                let idx = table
                    .iter()
                    .position(|p| p.temperature > temperature)
                    .unwrap_or(n)
                    .clamp(1, n - 1);
                (table[idx - 1], table[idx])
            }
        };
        let w = (temperature - lo.temperature) / (hi.temperature - lo.temperature);
        Ok(((1.0 - w) * lo.gamma_ev + w * hi.gamma_ev).max(0.0))
    }

    /// Relaxation parameter γ(T) in rad/s.
    pub fn gamma_at(&self, temperature: f64) -> Result<f64> {
        self.gamma_ev_at(temperature).map(ev_to_rad_per_s)
    }

    /// Copy with every tabulated γ multiplied by `factor`.
    pub fn with_gamma_scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.gamma_table {
            p.gamma_ev *= factor;
        }
        out
    }
}

/// Named collection of materials, pre-populated with Au and Ti.
#[derive(Debug, Clone)]
pub struct MaterialDb {
    entries: BTreeMap<String, MaterialParams>,
}

impl Default for MaterialDb {
    fn default() -> Self {
        Self::builtin()
    }
}

impl MaterialDb {
    pub fn builtin() -> Self {
        let mut entries = BTreeMap::new();
        for m in [MaterialParams::gold(), MaterialParams::titanium()] {
            entries.insert(m.name.clone(), m);
        }
        MaterialDb { entries }
    }

    /// Adds or replaces an entry.
    pub fn insert(&mut self, material: MaterialParams) {
        self.entries.insert(material.name.clone(), material);
    }

    pub fn get(&self, name: &str) -> Result<&MaterialParams> {
        self.entries
            .get(name)
            .or_else(|| {
                self.entries
                    .values()
                    .find(|m| m.name.eq_ignore_ascii_case(name))
            })
            .ok_or_else(|| Error::config(format!("unknown material '{name}'")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &MaterialParams> {
        self.entries.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values_are_bit_exact() {
        let au = MaterialParams::gold();
        assert_eq!(au.gamma_ev_at(300.0).unwrap(), 0.035);
        assert_eq!(au.gamma_ev_at(500.0).unwrap(), 0.058);
        let ti = MaterialParams::titanium();
        assert_eq!(ti.gamma_ev_at(300.0).unwrap(), 0.047);
        assert_eq!(ti.gamma_ev_at(500.0).unwrap(), 0.078);
    }

    #[test]
    fn gold_gamma_in_rad_per_s() {
        let g = MaterialParams::gold().gamma_at(300.0).unwrap();
        assert!((g - 5.317e13).abs() / 5.317e13 < 1e-3, "{g}");
    }

    #[test]
    fn titanium_midpoint_and_extrapolation() {
        let ti = MaterialParams::titanium();
        assert!((ti.gamma_ev_at(400.0).unwrap() - 0.0625).abs() < 1e-15);
        // slope 0.031 eV / 200 K
        assert!((ti.gamma_ev_at(600.0).unwrap() - 0.0935).abs() < 1e-15);
        assert!((ti.gamma_ev_at(200.0).unwrap() - 0.0315).abs() < 1e-15);
    }

    #[test]
    fn penetration_depths() {
        assert!((MaterialParams::gold().penetration_depth() * 1e9 - 21.9).abs() < 0.1);
        assert!((MaterialParams::titanium().penetration_depth() * 1e9 - 78.6).abs() < 0.1);
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(MaterialParams::new("X", 1.0, &[]).is_err());
        assert!(MaterialParams::new("X", 0.0, &[(300.0, 0.01)]).is_err());
        assert!(MaterialParams::new("X", 1.0, &[(500.0, 0.01), (300.0, 0.02)]).is_err());
        assert!(MaterialParams::new("X", 1.0, &[(300.0, -0.01)]).is_err());
    }

    #[test]
    fn nonpositive_temperature_is_domain_error() {
        assert!(matches!(
            MaterialParams::gold().gamma_at(0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn db_lookup() {
        let db = MaterialDb::builtin();
        assert_eq!(db.get("Au").unwrap().plasma_energy_ev(), 9.0);
        assert_eq!(db.get("ti").unwrap().plasma_energy_ev(), 2.51);
        assert!(db.get("Cu").is_err());
    }
}
