//! Named inputs and θ choices shared by the subcommands.

use moyal_core::atlas::AnalyticFunction;
use moyal_core::grid::GridSpec;
use moyal_core::theta::{make_theta, ThetaMatrix};
use moyal_core::{Error, Result};

pub const PRESETS: &[&str] = &["gauss1", "gauss2", "bump", "hermite01", "appendix-beta2"];

/// Pinned inputs: `gauss1`/`gauss2` are centered Gaussians e^{−γ|x|²} with γ = 1, 2;
/// `bump` is the tensor square of the band-limited bump with support radius 2;
/// `hermite01` is x₂e^{−|x|²}; `appendix-beta2` is the 1-D witness ĝ at β = 2.
pub fn preset(name: &str) -> Result<AnalyticFunction> {
    match name {
        "gauss1" => AnalyticFunction::gaussian_centered(1.0, 2),
        "gauss2" => AnalyticFunction::gaussian_centered(2.0, 2),
        "bump" => {
            let b = AnalyticFunction::bump(2.0, 1.0)?;
            AnalyticFunction::tensor(vec![b.clone(), b])
        }
        "hermite01" => AnalyticFunction::hermite_gaussian(1.0, vec![0, 1]),
        "appendix-beta2" => AnalyticFunction::appendix_g(2.0),
        other => Err(Error::InvalidParameter(format!(
            "unknown preset `{other}` (expected one of {})",
            PRESETS.join(", ")
        ))),
    }
}

/// A preset name, an inline JSON descriptor, or a path to a JSON descriptor file.
pub fn function(spec: &str) -> Result<AnalyticFunction> {
    if PRESETS.contains(&spec) {
        return preset(spec);
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)
            .map_err(|e| Error::InvalidParameter(format!("`{spec}` is neither a preset nor a readable file: {e}")))?
    };
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("bad function JSON: {e}")))?;
    AnalyticFunction::from_json(&v)
}

/// Default grid per preset: wide enough that the boundary tails are negligible.
pub fn default_grid(name: &str) -> (usize, f64) {
    match name {
        "bump" => (32, 4.0),
        "gauss2" => (64, 6.0),
        _ => (64, 10.0),
    }
}

pub fn parse_grid(s: &str) -> Result<(usize, f64)> {
    let bad = || Error::InvalidParameter(format!("--grid expects N,L (got `{s}`)"));
    let (n, l) = s.split_once(',').ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?))
}

pub fn grid(d: usize, s: Option<&str>, fallback: (usize, f64)) -> Result<GridSpec> {
    let (n, l) = match s {
        Some(s) => parse_grid(s)?,
        None => fallback,
    };
    GridSpec::new(d, n, l)
}

/// `symplectic2` (t·J), `zero`, `degenerate` (the zero matrix, which is singular) or a JSON file
/// holding a row-major matrix. `scale` multiplies the file matrix and sets t for `symplectic2`.
pub fn theta(spec: &str, scale: f64) -> Result<ThetaMatrix> {
    match spec {
        "symplectic2" => Ok(ThetaMatrix::symplectic2(scale)),
        "zero" | "degenerate" => Ok(ThetaMatrix::zero(2)),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read theta file `{path}`: {e}")))?;
            let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidParameter(format!("theta file must be a JSON matrix: {e}")))?;
            Ok(make_theta(rows.len(), &rows)?.scaled(scale))
        }
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{flag}: cannot parse `{v}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for p in PRESETS {
            preset(p).unwrap();
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn grid_and_lists() {
        assert_eq!(parse_grid("128,10").unwrap(), (128, 10.0));
        assert!(parse_grid("128").is_err());
        assert_eq!(parse_list::<f64>("1e-1, 3e-2", "--thetas").unwrap(), vec![0.1, 0.03]);
    }

    #[test]
    fn inline_json_function() {
        let f = function(r#"{"family":"gaussian","params":{"gamma":1.0,"center":[0.0,0.0]},"d":2}"#).unwrap();
        assert_eq!(f.dim(), 2);
    }
}
