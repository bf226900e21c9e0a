//! `{family, params, d}` descriptors for [`AnalyticFunction`].
//!
//! | family              | params                                   |
//! |---------------------|------------------------------------------|
//! | `gaussian`          | `gamma`, `center` (array, length d)       |
//! | `hermite_gaussian`  | `gamma`, `m` (array of orders, length d)  |
//! | `bump_fourier`      | `radius`, `exponent` (d = 1)              |
//! | `appendix_g_hat`    | `beta` (d = 1)                            |
//! | `tensor_product`    | `factors` (array of descriptors)          |
//! | `scaled`            | `re`, `im`, `inner`                       |
//! | `translated`        | `shift`, `inner`                          |
//! | `sum`               | `terms` (two descriptors)                 |
//! | `pointwise_product` | `factors` (two descriptors)               |

use super::AnalyticFunction;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

pub fn to_json(f: &AnalyticFunction) -> Value {
    use AnalyticFunction::*;
    let (family, params) = match f {
        Gaussian { gamma, center } => ("gaussian", json!({"gamma": gamma, "center": center})),
        HermiteGaussian { gamma, m } => ("hermite_gaussian", json!({"gamma": gamma, "m": m})),
        BumpFourier { radius, exponent } => {
            ("bump_fourier", json!({"radius": radius, "exponent": exponent}))
        }
        AppendixGHat { beta } => ("appendix_g_hat", json!({"beta": beta})),
        TensorProduct(fs) => (
            "tensor_product",
            json!({"factors": fs.iter().map(to_json).collect::<Vec<_>>()}),
        ),
        Scaled { factor, inner } => (
            "scaled",
            json!({"re": factor.re, "im": factor.im, "inner": to_json(inner)}),
        ),
        Translated { shift, inner } => {
            ("translated", json!({"shift": shift, "inner": to_json(inner)}))
        }
        Sum(a, b) => ("sum", json!({"terms": [to_json(a), to_json(b)]})),
        PointwiseProduct(a, b) => (
            "pointwise_product",
            json!({"factors": [to_json(a), to_json(b)]}),
        ),
    };
    json!({"family": family, "params": params, "d": f.dim()})
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn num(p: &Value, key: &str) -> Result<f64> {
    p.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| bad(format!("missing numeric param `{key}`")))
}

fn num_vec(p: &Value, key: &str) -> Result<Vec<f64>> {
    p.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("missing array param `{key}`")))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| bad(format!("non-numeric entry in `{key}`"))))
        .collect()
}

fn list(p: &Value, key: &str) -> Result<Vec<AnalyticFunction>> {
    p.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("missing array param `{key}`")))?
        .iter()
        .map(from_json)
        .collect()
}

fn pair(p: &Value, key: &str) -> Result<(AnalyticFunction, AnalyticFunction)> {
    let mut v = list(p, key)?;
    if v.len() != 2 {
        return Err(bad(format!("`{key}` must hold exactly two descriptors")));
    }
    let b = v.pop().unwrap();
    Ok((v.pop().unwrap(), b))
}

fn inner(p: &Value) -> Result<AnalyticFunction> {
    from_json(p.get("inner").ok_or_else(|| bad("missing `inner`"))?)
}

pub fn from_json(v: &Value) -> Result<AnalyticFunction> {
    let family = v
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("descriptor needs a string `family`"))?;
    let p = v.get("params").cloned().unwrap_or(Value::Null);
    let f = match family {
        "gaussian" => AnalyticFunction::gaussian(num(&p, "gamma")?, num_vec(&p, "center")?)?,
        "hermite_gaussian" => {
            let m = num_vec(&p, "m")?
                .into_iter()
                .map(|x| {
                    if x >= 0.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(bad("hermite orders must be nonnegative integers"))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            AnalyticFunction::hermite_gaussian(num(&p, "gamma")?, m)?
        }
        "bump_fourier" => AnalyticFunction::bump(num(&p, "radius")?, num(&p, "exponent")?)?,
        "appendix_g_hat" => AnalyticFunction::appendix_g(num(&p, "beta")?)?,
        "tensor_product" => AnalyticFunction::tensor(list(&p, "factors")?)?,
        "scaled" => inner(&p)?.scaled(Complex64::new(num(&p, "re")?, num(&p, "im").unwrap_or(0.0))),
        "translated" => inner(&p)?.translated(num_vec(&p, "shift")?)?,
        "sum" => {
            let (a, b) = pair(&p, "terms")?;
            a.plus(b)?
        }
        "pointwise_product" => {
            let (a, b) = pair(&p, "factors")?;
            a.times(b)?
        }
        other => return Err(bad(format!("unknown family `{other}`"))),
    };
    if let Some(d) = v.get("d").and_then(Value::as_u64) {
        if d as usize != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: d as usize,
                got: f.dim(),
            });
        }
    }
    Ok(f)
}
