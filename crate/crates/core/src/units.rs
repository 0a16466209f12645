//! Unit conversion at the user-facing boundary. Internally everything is SI.

use crate::error::{Error, Result};

/// Parses a length such as `20nm`, `0.5um`, `0.5μm`, `1e-6m` or `2 mm`
/// into metres. A bare number is rejected so that units are always explicit.
pub fn parse_length(s: &str) -> Result<f64> {
    let t = s.trim();
    const UNITS: [(&str, f64); 6] = [
        ("micron", 1e-6),
        ("nm", 1e-9),
        ("um", 1e-6),
        ("μm", 1e-6),
        ("µm", 1e-6),
        ("mm", 1e-3),
    ];
    let (num, factor) = UNITS
        .iter()
        .find_map(|&(u, f)| t.strip_suffix(u).map(|n| (n, f)))
        .or_else(|| t.strip_suffix('m').map(|n| (n, 1.0)))
        .ok_or_else(|| Error::config(format!("length '{s}' needs a unit suffix (nm, um, mm, m)")))?;
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("cannot parse length '{s}'")))?;
    let metres = value * factor;
    if !(metres > 0.0 && metres.is_finite()) {
        return Err(Error::config(format!("length must be positive, got '{s}'")));
    }
    Ok(metres)
}

/// Parses a temperature in kelvin, with or without a trailing `K`.
pub fn parse_temperature(s: &str) -> Result<f64> {
    let t = s.trim().trim_end_matches('K').trim();
    let v: f64 = t
        .parse()
        .map_err(|_| Error::config(format!("cannot parse temperature '{s}'")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::config(format!("temperature must be positive, got '{s}'")));
    }
    Ok(v)
}

/// Compact label for a length: `20nm`, `1um`, `0.5um`.
pub fn format_length(metres: f64) -> String {
    let nm = metres * 1e9;
    if nm < 1000.0 {
        format!("{}nm", trim_float(nm))
    } else {
        format!("{}um", trim_float(nm / 1000.0))
    }
}

fn trim_float(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert!((parse_length("20nm").unwrap() - 2e-8).abs() < 1e-24);
        assert!((parse_length("0.5um").unwrap() - 5e-7).abs() < 1e-22);
        assert!((parse_length("0.5 μm").unwrap() - 5e-7).abs() < 1e-22);
        assert_eq!(parse_length("1e-6m").unwrap(), 1e-6);
        assert!(parse_length("20").is_err());
        assert!(parse_length("20 parsecs").is_err());
        assert!(parse_length("-3nm").is_err());
    }

    #[test]
    fn temperatures() {
        assert_eq!(parse_temperature("300").unwrap(), 300.0);
        assert_eq!(parse_temperature("500K").unwrap(), 500.0);
        assert!(parse_temperature("0").is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(format_length(2e-8), "20nm");
        assert_eq!(format_length(1e-6), "1um");
        assert_eq!(format_length(5e-7), "500nm");
        assert_eq!(format_length(2.21e-8), "22.1nm");
    }
}
