//! Plate and two-plate system descriptions.

use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::permittivity::{Dielectric, PermittivityModel};

/// One plate of finite thickness at a fixed temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateSpec {
    pub material: MaterialParams,
    pub model: PermittivityModel,
    /// Thickness in metres.
    pub thickness: f64,
    /// Temperature in kelvin.
    pub temperature: f64,
}

impl PlateSpec {
    pub fn new(
        material: MaterialParams,
        model: PermittivityModel,
        thickness: f64,
        temperature: f64,
    ) -> Result<Self> {
        let plate = PlateSpec {
            material,
            model,
            thickness,
            temperature,
        };
        plate.validate()?;
        Ok(plate)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness > 0.0 && self.thickness.is_finite()) {
            return Err(Error::config(format!("plate thickness must be positive, got {}", self.thickness)));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::config(format!(
                "plate temperature must be positive, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Same plate at a different temperature.
    pub fn at_temperature(&self, temperature: f64) -> Self {
        PlateSpec {
            temperature,
            ..self.clone()
        }
    }

    pub fn with_thickness(&self, thickness: f64) -> Self {
        PlateSpec {
            thickness,
            ..self.clone()
        }
    }

    pub fn dielectric(&self) -> Result<Dielectric> {
        Dielectric::resolve(self.model, &self.material, self.temperature)
    }
}

/// Two similar plates at separation `a`. The upper plate sits at the
/// environment temperature T₁, the lower plate at T₂.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub plate_upper: PlateSpec,
    pub plate_lower: PlateSpec,
    /// Separation in metres.
    pub separation: f64,
}

impl SystemConfig {
    pub fn new(plate_upper: PlateSpec, plate_lower: PlateSpec, separation: f64) -> Result<Self> {
        let cfg = SystemConfig {
            plate_upper,
            plate_lower,
            separation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Two identical plates of thickness `d` at temperatures `t1` (upper) and `t2` (lower).
    pub fn similar(
        material: MaterialParams,
        model: PermittivityModel,
        thickness: f64,
        separation: f64,
        t1: f64,
        t2: f64,
    ) -> Result<Self> {
        let upper = PlateSpec::new(material, model, thickness, t1)?;
        let lower = upper.at_temperature(t2);
        Self::new(upper, lower, separation)
    }

    pub fn validate(&self) -> Result<()> {
        self.plate_upper.validate()?;
        self.plate_lower.validate()?;
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::config(format!("separation must be positive, got {}", self.separation)));
        }
        if self.plate_upper.material != self.plate_lower.material
            || self.plate_upper.model != self.plate_lower.model
        {
            return Err(Error::config("both plates must share material and permittivity model"));
        }
        Ok(())
    }

    pub fn t1(&self) -> f64 {
        self.plate_upper.temperature
    }

    pub fn t2(&self) -> f64 {
        self.plate_lower.temperature
    }

    /// Configuration with the two plate temperatures exchanged.
    pub fn swapped(&self) -> Self {
        SystemConfig {
            plate_upper: self.plate_upper.at_temperature(self.t2()),
            plate_lower: self.plate_lower.at_temperature(self.t1()),
            separation: self.separation,
        }
    }

    pub fn with_separation(&self, separation: f64) -> Self {
        SystemConfig {
            separation,
            ..self.clone()
        }
    }

    pub fn with_thickness(&self, thickness: f64) -> Self {
        SystemConfig {
            plate_upper: self.plate_upper.with_thickness(thickness),
            plate_lower: self.plate_lower.with_thickness(thickness),
            separation: self.separation,
        }
    }

    pub fn with_model(&self, model: PermittivityModel) -> Self {
        let mut out = self.clone();
        out.plate_upper.model = model;
        out.plate_lower.model = model;
        out
    }

    pub fn with_material(&self, material: MaterialParams) -> Self {
        let mut out = self.clone();
        out.plate_upper.material = material.clone();
        out.plate_lower.material = material;
        out
    }

    pub fn with_temperatures(&self, t1: f64, t2: f64) -> Self {
        SystemConfig {
            plate_upper: self.plate_upper.at_temperature(t1),
            plate_lower: self.plate_lower.at_temperature(t2),
            separation: self.separation,
        }
    }
}
