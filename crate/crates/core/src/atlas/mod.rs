//! Closed-form test functions with values, Fourier transforms and derivatives.
//!
//! Fourier convention: f̂(p) = ∫ f(x) e^{−i⟨p,x⟩} dx.
//!
//! `BumpFourier` is one-dimensional: its transform is the bump
//! b̂(p) = exp(1 − (1 − (p/R)²)^{−s}) on |p| < R (peak 1, zero outside), and
//! position-space values and derivatives come from a cached Fourier-side quadrature.
//! Multi-dimensional bump inputs are built as tensor products.
//! `AppendixGHat` is likewise 1-D: the function whose transform is the witness ĝ_β.

mod hermite;
mod json;
mod spectral;

pub use hermite::{gaussian_jet, hermite_gaussian_jet, hermite_values};
pub use spectral::CosineTable;

use crate::error::{Error, Result};
use crate::logmag::{binomial, multi_indices_le, SignedLog};
use crate::theta::ThetaMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

pub const DEFAULT_K_CAP: usize = 40;

/// Trapezoid nodes on [0, R] for bump position values.
const BUMP_NODES: usize = 320;

#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticFunction {
    Gaussian { gamma: f64, center: Vec<f64> },
    /// Π_i H_{m_i}(√(2γ) x_i) e^{−γ x_i²}.
    HermiteGaussian { gamma: f64, m: Vec<usize> },
    BumpFourier { radius: f64, exponent: f64 },
    AppendixGHat { beta: f64 },
    TensorProduct(Vec<AnalyticFunction>),
    Scaled { factor: Complex64, inner: Box<AnalyticFunction> },
    Translated { shift: Vec<f64>, inner: Box<AnalyticFunction> },
    Sum(Box<AnalyticFunction>, Box<AnalyticFunction>),
    PointwiseProduct(Box<AnalyticFunction>, Box<AnalyticFunction>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivMethod {
    /// Closed form.
    Exact,
    /// Fourier-side quadrature of (ip)^κ f̂(p).
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivative {
    pub value: Complex64,
    pub method: DerivMethod,
}

pub fn eval(f: &AnalyticFunction, x: &[f64]) -> Result<Complex64> {
    f.eval(x)
}

pub fn eval_fourier(f: &AnalyticFunction, p: &[f64]) -> Result<Complex64> {
    f.eval_fourier(p)
}

pub fn eval_derivative(f: &AnalyticFunction, kappa: &[usize], x: &[f64]) -> Result<Derivative> {
    f.eval_derivative(kappa, x)
}

/// {f,g}(x) = θ^{μν} ∂_μ f ∂_ν g, so that the first Moyal term is (i/2){f,g}.
pub fn poisson_bracket(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    x: &[f64],
) -> Result<Complex64> {
    let d = theta.d();
    for h in [f, g] {
        if h.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: h.dim(),
            });
        }
    }
    let mut df = Vec::with_capacity(d);
    let mut dg = Vec::with_capacity(d);
    for mu in 0..d {
        let mut k = vec![0; d];
        k[mu] = 1;
        df.push(f.eval_derivative(&k, x)?.value);
        dg.push(g.eval_derivative(&k, x)?.value);
    }
    let mut s = Complex64::new(0.0, 0.0);
    for mu in 0..d {
        for nu in 0..d {
            let t = theta.entry(mu, nu);
            if t != 0.0 {
                s += t * df[mu] * dg[nu];
            }
        }
    }
    Ok(s)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn bump_hat(radius: f64, exponent: f64, p: f64) -> f64 {
    let t = p / radius;
    let u = 1.0 - t * t;
    if u <= 0.0 {
        0.0
    } else {
        (1.0 - u.powf(-exponent)).exp()
    }
}

type TableCache = RwLock<HashMap<(u8, u64, u64), Arc<CosineTable>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached_table(key: (u8, u64, u64), build: impl FnOnce() -> CosineTable) -> Arc<CosineTable> {
    if let Some(t) = table_cache().read().unwrap().get(&key) {
        return t.clone();
    }
    let mut w = table_cache().write().unwrap();
    w.entry(key).or_insert_with(|| Arc::new(build())).clone()
}

fn bump_table(radius: f64, exponent: f64) -> Arc<CosineTable> {
    cached_table((0, radius.to_bits(), exponent.to_bits()), || {
        CosineTable::new(radius, BUMP_NODES, |p| bump_hat(radius, exponent, p))
    })
}

fn appendix_table(beta: f64) -> Arc<CosineTable> {
    cached_table((1, beta.to_bits(), 0), || {
        let g = crate::witness::GHat::new(beta);
        let extent = appendix_extent(beta);
        let nodes = (extent / 0.01).ceil() as usize;
        CosineTable::new(extent, nodes, |s| g.eval(s))
    })
}

fn appendix_extent(beta: f64) -> f64 {
    // ĝ(s) ≤ C′ e^{−|s|^{1/β}} with C′ of order e; cut where the envelope is below 1e-16.
    (1.0 + 16.0 * std::f64::consts::LN_10).powf(beta) + 1.0
}

impl AnalyticFunction {
    pub fn gaussian(gamma: f64, center: Vec<f64>) -> Result<Self> {
        positive("gamma", gamma)?;
        if center.is_empty() {
            return Err(Error::InvalidParameter("gaussian needs d >= 1".into()));
        }
        Ok(AnalyticFunction::Gaussian { gamma, center })
    }

    pub fn gaussian_centered(gamma: f64, d: usize) -> Result<Self> {
        Self::gaussian(gamma, vec![0.0; d])
    }

    pub fn hermite_gaussian(gamma: f64, m: Vec<usize>) -> Result<Self> {
        positive("gamma", gamma)?;
        if m.is_empty() {
            return Err(Error::InvalidParameter("hermite-gaussian needs d >= 1".into()));
        }
        Ok(AnalyticFunction::HermiteGaussian { gamma, m })
    }

    pub fn bump(radius: f64, exponent: f64) -> Result<Self> {
        positive("radius", radius)?;
        positive("exponent", exponent)?;
        Ok(AnalyticFunction::BumpFourier { radius, exponent })
    }

    pub fn appendix_g(beta: f64) -> Result<Self> {
        positive("beta", beta)?;
        Ok(AnalyticFunction::AppendixGHat { beta })
    }

    pub fn tensor(factors: Vec<AnalyticFunction>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty tensor product".into()));
        }
        Ok(AnalyticFunction::TensorProduct(factors))
    }

    pub fn scaled(self, factor: Complex64) -> Self {
        AnalyticFunction::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn translated(self, shift: Vec<f64>) -> Result<Self> {
        check_len(self.dim(), shift.len())?;
        Ok(AnalyticFunction::Translated {
            shift,
            inner: Box::new(self),
        })
    }

    pub fn plus(self, other: AnalyticFunction) -> Result<Self> {
        check_len(self.dim(), other.dim())?;
        Ok(AnalyticFunction::Sum(Box::new(self), Box::new(other)))
    }

    pub fn times(self, other: AnalyticFunction) -> Result<Self> {
        check_len(self.dim(), other.dim())?;
        Ok(AnalyticFunction::PointwiseProduct(Box::new(self), Box::new(other)))
    }

    pub fn dim(&self) -> usize {
        use AnalyticFunction::*;
        match self {
            Gaussian { center, .. } => center.len(),
            HermiteGaussian { m, .. } => m.len(),
            BumpFourier { .. } | AppendixGHat { .. } => 1,
            TensorProduct(fs) => fs.iter().map(|f| f.dim()).sum(),
            Scaled { inner, .. } | Translated { inner, .. } => inner.dim(),
            Sum(a, _) | PointwiseProduct(a, _) => a.dim(),
        }
    }

    pub fn has_fourier(&self) -> bool {
        use AnalyticFunction::*;
        match self {
            PointwiseProduct(..) => false,
            TensorProduct(fs) => fs.iter().all(|f| f.has_fourier()),
            Scaled { inner, .. } | Translated { inner, .. } => inner.has_fourier(),
            Sum(a, b) => a.has_fourier() && b.has_fourier(),
            _ => true,
        }
    }

    pub fn derivative_method(&self) -> DerivMethod {
        use AnalyticFunction::*;
        let spectral = match self {
            BumpFourier { .. } | AppendixGHat { .. } => true,
            Gaussian { .. } | HermiteGaussian { .. } => false,
            TensorProduct(fs) => fs.iter().any(|f| f.derivative_method() == DerivMethod::Spectral),
            Scaled { inner, .. } | Translated { inner, .. } => {
                inner.derivative_method() == DerivMethod::Spectral
            }
            Sum(a, b) | PointwiseProduct(a, b) => {
                a.derivative_method() == DerivMethod::Spectral
                    || b.derivative_method() == DerivMethod::Spectral
            }
        };
        if spectral {
            DerivMethod::Spectral
        } else {
            DerivMethod::Exact
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        check_len(self.dim(), x.len())?;
        Ok(self.value_raw(x))
    }

    fn value_raw(&self, x: &[f64]) -> Complex64 {
        use AnalyticFunction::*;
        match self {
            Gaussian { gamma, center } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                Complex64::new((-gamma * r2).exp(), 0.0)
            }
            HermiteGaussian { .. } | BumpFourier { .. } | AppendixGHat { .. } => {
                self.deriv_raw(&vec![0; x.len()], x)
            }
            TensorProduct(fs) => {
                let mut off = 0;
                let mut v = Complex64::new(1.0, 0.0);
                for f in fs {
                    let k = f.dim();
                    v *= f.value_raw(&x[off..off + k]);
                    off += k;
                }
                v
            }
            Scaled { factor, inner } => factor * inner.value_raw(x),
            Translated { shift, inner } => {
                let y: Vec<f64> = x.iter().zip(shift).map(|(a, s)| a - s).collect();
                inner.value_raw(&y)
            }
            Sum(a, b) => a.value_raw(x) + b.value_raw(x),
            PointwiseProduct(a, b) => a.value_raw(x) * b.value_raw(x),
        }
    }

    pub fn eval_fourier(&self, p: &[f64]) -> Result<Complex64> {
        check_len(self.dim(), p.len())?;
        self.fourier_raw(p)
    }

    fn fourier_raw(&self, p: &[f64]) -> Result<Complex64> {
        use AnalyticFunction::*;
        Ok(match self {
            Gaussian { gamma, center } => {
                let d = center.len() as f64;
                let p2: f64 = p.iter().map(|v| v * v).sum();
                let pc: f64 = p.iter().zip(center).map(|(a, c)| a * c).sum();
                let amp = (std::f64::consts::PI / gamma).powf(d / 2.0) * (-p2 / (4.0 * gamma)).exp();
                Complex64::from_polar(amp, -pc)
            }
            HermiteGaussian { gamma, m } => {
                let a = (2.0 * gamma).sqrt();
                let mut v = Complex64::new(1.0, 0.0);
                for (&mi, &pi) in m.iter().zip(p) {
                    let h = hermite_values(pi / a, mi)[mi].to_f64();
                    let amp = (std::f64::consts::PI / gamma).sqrt()
                        * h
                        * (-pi * pi / (4.0 * gamma)).exp();
                    v *= Complex64::new(0.0, -1.0).powu(mi as u32) * amp;
                }
                v
            }
            BumpFourier { radius, exponent } => {
                Complex64::new(bump_hat(*radius, *exponent, p[0]), 0.0)
            }
            AppendixGHat { beta } => {
                Complex64::new(crate::witness::GHat::new(*beta).eval(p[0]), 0.0)
            }
            TensorProduct(fs) => {
                let mut off = 0;
                let mut v = Complex64::new(1.0, 0.0);
                for f in fs {
                    let k = f.dim();
                    v *= f.fourier_raw(&p[off..off + k])?;
                    off += k;
                }
                v
            }
            Scaled { factor, inner } => factor * inner.fourier_raw(p)?,
            Translated { shift, inner } => {
                let ps: f64 = p.iter().zip(shift).map(|(a, s)| a * s).sum();
                Complex64::from_polar(1.0, -ps) * inner.fourier_raw(p)?
            }
            Sum(a, b) => a.fourier_raw(p)? + b.fourier_raw(p)?,
            PointwiseProduct(..) => {
                return Err(Error::TransformUnavailable("pointwise product".into()))
            }
        })
    }

    pub fn eval_derivative(&self, kappa: &[usize], x: &[f64]) -> Result<Derivative> {
        self.eval_derivative_capped(kappa, x, DEFAULT_K_CAP)
    }

    pub fn eval_derivative_capped(
        &self,
        kappa: &[usize],
        x: &[f64],
        cap: usize,
    ) -> Result<Derivative> {
        check_len(self.dim(), x.len())?;
        check_len(self.dim(), kappa.len())?;
        let order: usize = kappa.iter().sum();
        if order > cap {
            return Err(Error::DerivativeUnavailable { order, cap });
        }
        Ok(Derivative {
            value: self.deriv_raw(kappa, x),
            method: self.derivative_method(),
        })
    }

    pub(crate) fn deriv_raw(&self, kappa: &[usize], x: &[f64]) -> Complex64 {
        use AnalyticFunction::*;
        match self {
            Gaussian { gamma, center } => {
                let mut v = SignedLog::from_f64(1.0);
                for i in 0..x.len() {
                    v = v.mul(gaussian_jet(*gamma, x[i] - center[i], kappa[i])[kappa[i]]);
                }
                Complex64::new(v.to_f64(), 0.0)
            }
            HermiteGaussian { gamma, m } => {
                let mut v = SignedLog::from_f64(1.0);
                for i in 0..x.len() {
                    v = v.mul(hermite_gaussian_jet(*gamma, m[i], x[i], kappa[i])[kappa[i]]);
                }
                Complex64::new(v.to_f64(), 0.0)
            }
            BumpFourier { radius, exponent } => {
                let k = kappa[0];
                Complex64::new(bump_table(*radius, *exponent).jet(x[0], k)[k], 0.0)
            }
            AppendixGHat { beta } => {
                let k = kappa[0];
                Complex64::new(appendix_table(*beta).jet(x[0], k)[k], 0.0)
            }
            TensorProduct(fs) => {
                let mut off = 0;
                let mut v = Complex64::new(1.0, 0.0);
                for f in fs {
                    let k = f.dim();
                    v *= f.deriv_raw(&kappa[off..off + k], &x[off..off + k]);
                    off += k;
                }
                v
            }
            Scaled { factor, inner } => factor * inner.deriv_raw(kappa, x),
            Translated { shift, inner } => {
                let y: Vec<f64> = x.iter().zip(shift).map(|(a, s)| a - s).collect();
                inner.deriv_raw(kappa, &y)
            }
            Sum(a, b) => a.deriv_raw(kappa, x) + b.deriv_raw(kappa, x),
            PointwiseProduct(a, b) => {
                let mut s = Complex64::new(0.0, 0.0);
                for lam in multi_indices_le(kappa) {
                    let rest: Vec<usize> = kappa.iter().zip(&lam).map(|(k, l)| k - l).collect();
                    let c: f64 = kappa.iter().zip(&lam).map(|(&k, &l)| binomial(k, l)).product();
                    s += c * a.deriv_raw(&lam, x) * b.deriv_raw(&rest, x);
                }
                s
            }
        }
    }

    /// All derivatives f^{(k)}(x), k = 0..=kmax, of a 1-D function.
    pub fn jet_1d(&self, x: f64, kmax: usize) -> Result<Vec<Complex64>> {
        use AnalyticFunction::*;
        check_len(1, self.dim())?;
        let re = |v: Vec<f64>| v.into_iter().map(|a| Complex64::new(a, 0.0)).collect();
        Ok(match self {
            Gaussian { gamma, center } => {
                re(gaussian_jet(*gamma, x - center[0], kmax).iter().map(|s| s.to_f64()).collect())
            }
            HermiteGaussian { gamma, m } => re(hermite_gaussian_jet(*gamma, m[0], x, kmax)
                .iter()
                .map(|s| s.to_f64())
                .collect()),
            BumpFourier { radius, exponent } => re(bump_table(*radius, *exponent).jet(x, kmax)),
            AppendixGHat { beta } => re(appendix_table(*beta).jet(x, kmax)),
            TensorProduct(fs) => fs[0].jet_1d(x, kmax)?,
            Scaled { factor, inner } => {
                inner.jet_1d(x, kmax)?.into_iter().map(|v| factor * v).collect()
            }
            Translated { shift, inner } => inner.jet_1d(x - shift[0], kmax)?,
            Sum(a, b) => {
                let (ja, jb) = (a.jet_1d(x, kmax)?, b.jet_1d(x, kmax)?);
                ja.iter().zip(&jb).map(|(u, v)| u + v).collect()
            }
            PointwiseProduct(a, b) => {
                let (ja, jb) = (a.jet_1d(x, kmax)?, b.jet_1d(x, kmax)?);
                (0..=kmax)
                    .map(|k| (0..=k).map(|j| binomial(k, j) * ja[j] * jb[k - j]).sum())
                    .collect()
            }
        })
    }

    /// Splits f into a scalar times a product of 1-D factors f(x) = c Π_i f_i(x_i).
    pub fn factors(&self) -> Option<(Complex64, Vec<AnalyticFunction>)> {
        use AnalyticFunction::*;
        let one = Complex64::new(1.0, 0.0);
        match self {
            Gaussian { gamma, center } => Some((
                one,
                center
                    .iter()
                    .map(|&c| Gaussian {
                        gamma: *gamma,
                        center: vec![c],
                    })
                    .collect(),
            )),
            HermiteGaussian { gamma, m } => Some((
                one,
                m.iter()
                    .map(|&k| HermiteGaussian {
                        gamma: *gamma,
                        m: vec![k],
                    })
                    .collect(),
            )),
            BumpFourier { .. } | AppendixGHat { .. } => Some((one, vec![self.clone()])),
            TensorProduct(fs) => {
                let mut c = one;
                let mut out = Vec::new();
                for f in fs {
                    let (s, mut v) = f.factors()?;
                    c *= s;
                    out.append(&mut v);
                }
                Some((c, out))
            }
            Scaled { factor, inner } => {
                let (s, v) = inner.factors()?;
                Some((factor * s, v))
            }
            Translated { shift, inner } => {
                let (s, v) = inner.factors()?;
                let v = v
                    .into_iter()
                    .zip(shift)
                    .map(|(f, &a)| Translated {
                        shift: vec![a],
                        inner: Box::new(f),
                    })
                    .collect();
                Some((s, v))
            }
            Sum(..) => (self.dim() == 1).then(|| (one, vec![self.clone()])),
            PointwiseProduct(a, b) => {
                if self.dim() == 1 {
                    return Some((one, vec![self.clone()]));
                }
                let (sa, va) = a.factors()?;
                let (sb, vb) = b.factors()?;
                let v = va
                    .into_iter()
                    .zip(vb)
                    .map(|(x, y)| PointwiseProduct(Box::new(x), Box::new(y)))
                    .collect();
                Some((sa * sb, v))
            }
        }
    }

    /// Per-axis radius beyond which |f̂| is below `tol` times its scale.
    pub fn fourier_radius(&self, tol: f64) -> Result<Vec<f64>> {
        use AnalyticFunction::*;
        let lt = (1.0 / tol).ln();
        Ok(match self {
            Gaussian { gamma, center } => vec![(4.0 * gamma * lt).sqrt(); center.len()],
            HermiteGaussian { gamma, m } => m
                .iter()
                .map(|&k| {
                    let a = (2.0 * gamma).sqrt();
                    let f = |p: f64| {
                        hermite_values(p / a, k)[k].ln_mag - p * p / (4.0 * gamma)
                    };
                    let peak = (0..200)
                        .map(|i| f(i as f64 * 0.05 * a))
                        .fold(f64::NEG_INFINITY, f64::max);
                    let mut r = (4.0 * gamma * lt).sqrt();
                    while f(r) > peak - lt {
                        r *= 1.05;
                    }
                    r
                })
                .collect(),
            BumpFourier { radius, .. } => vec![*radius],
            AppendixGHat { beta } => vec![(lt + 1.0).powf(*beta) + 1.0],
            TensorProduct(fs) => {
                let mut v = Vec::new();
                for f in fs {
                    v.extend(f.fourier_radius(tol)?);
                }
                v
            }
            Scaled { inner, .. } | Translated { inner, .. } => inner.fourier_radius(tol)?,
            Sum(a, b) => {
                let (ra, rb) = (a.fourier_radius(tol)?, b.fourier_radius(tol)?);
                ra.iter().zip(&rb).map(|(x, y)| x.max(*y)).collect()
            }
            PointwiseProduct(..) => {
                return Err(Error::TransformUnavailable("pointwise product".into()))
            }
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json::to_json(self)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        json::from_json(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gaussian_values() {
        let g = AnalyticFunction::gaussian_centered(2.0, 2).unwrap();
        assert_eq!(g.eval(&[0.0, 0.0]).unwrap(), c(1.0));
        let g1 = AnalyticFunction::gaussian_centered(1.0, 2).unwrap();
        let v = g1.eval(&[0.6, 0.8]).unwrap();
        assert!((v.re - (-1.0f64).exp()).abs() < 1e-15);
        assert!(g1.eval(&[1.0]).is_err());
        assert!(AnalyticFunction::gaussian(0.0, vec![0.0]).is_err());
    }

    #[test]
    fn cancellation_sum_is_zero() {
        let f = AnalyticFunction::gaussian(1.3, vec![0.2, -0.1]).unwrap();
        let z = f.clone().plus(f.clone().scaled(c(-1.0))).unwrap();
        for x in [[0.0, 0.0], [1.0, -2.0], [0.3, 0.7]] {
            assert_eq!(z.eval(&x).unwrap(), c(0.0));
        }
    }

    #[test]
    fn gaussian_transform_closed_form() {
        let g = AnalyticFunction::gaussian_centered(2.0, 2).unwrap();
        let p = [1.0, -0.5];
        let want = (PI / 2.0) * (-(1.25) / 8.0f64).exp();
        assert!((g.eval_fourier(&p).unwrap().re - want).abs() < 1e-15);
    }

    #[test]
    fn pointwise_product_has_no_transform() {
        let g = AnalyticFunction::gaussian_centered(1.0, 1).unwrap();
        let p = g.clone().times(g).unwrap();
        assert!(matches!(
            p.eval_fourier(&[0.0]),
            Err(Error::TransformUnavailable(_))
        ));
    }

    #[test]
    fn gaussian_derivative_examples() {
        let g = AnalyticFunction::gaussian_centered(1.0, 1).unwrap();
        assert_eq!(g.eval_derivative(&[1], &[0.0]).unwrap().value, c(0.0));
        let d2 = g.eval_derivative(&[2], &[0.0]).unwrap();
        assert!((d2.value.re + 2.0).abs() < 1e-15);
        assert_eq!(d2.method, DerivMethod::Exact);
        assert!(matches!(
            g.eval_derivative(&[41], &[0.0]),
            Err(Error::DerivativeUnavailable { order: 41, cap: 40 })
        ));
        assert!(g.eval_derivative(&[40], &[0.5]).unwrap().value.re.is_finite());
    }

    #[test]
    fn bump_transform_support_and_peak() {
        let b = AnalyticFunction::bump(2.0, 1.0).unwrap();
        assert_eq!(b.eval_fourier(&[0.0]).unwrap(), c(1.0));
        assert_eq!(b.eval_fourier(&[2.0]).unwrap(), c(0.0));
        assert_eq!(b.eval_fourier(&[-2.5]).unwrap(), c(0.0));
        assert!(b.eval_fourier(&[1.9]).unwrap().re > 0.0);
        assert_eq!(b.eval_derivative(&[1], &[0.3]).unwrap().method, DerivMethod::Spectral);
    }

    #[test]
    fn bump_values_converge_under_refinement() {
        // Independent fine-grid oracle for the cached table.
        let fine = CosineTable::new(2.0, 8 * BUMP_NODES, |p| bump_hat(2.0, 1.0, p));
        let b = AnalyticFunction::bump(2.0, 1.0).unwrap();
        for &x in &[0.0, 0.7, 3.0, 9.5] {
            let j = b.jet_1d(x, 20).unwrap();
            let jf = fine.jet(x, 20);
            for k in 0..=20 {
                assert!((j[k].re - jf[k]).abs() < 1e-13 * 2f64.powi(k as i32), "x={x} k={k}");
            }
        }
    }

    #[test]
    fn factors_of_tensor_and_gaussian() {
        let g = AnalyticFunction::gaussian(1.0, vec![0.5, -1.0]).unwrap();
        let (s, v) = g.factors().unwrap();
        assert_eq!(s, c(1.0));
        assert_eq!(v.len(), 2);
        let x = [0.3, 0.4];
        let prod = v[0].eval(&[x[0]]).unwrap() * v[1].eval(&[x[1]]).unwrap();
        assert!((prod - g.eval(&x).unwrap()).norm() < 1e-15);
        let b = AnalyticFunction::bump(2.0, 1.0).unwrap();
        let t = AnalyticFunction::tensor(vec![b.clone(), b]).unwrap().scaled(c(3.0));
        let (s, v) = t.factors().unwrap();
        assert_eq!((s, v.len()), (c(3.0), 2));
        let sum2 = g.clone().plus(g).unwrap();
        assert!(sum2.factors().is_none());
    }

    #[test]
    fn bracket_vanishes_for_equal_inputs_and_zero_theta() {
        let f = AnalyticFunction::gaussian(1.0, vec![0.3, -0.2]).unwrap();
        let g = AnalyticFunction::gaussian(0.7, vec![-0.5, 0.4]).unwrap();
        let th = ThetaMatrix::symplectic2(1.0);
        let x = [0.1, 0.25];
        assert_eq!(poisson_bracket(&f, &f, &th, &x).unwrap(), c(0.0));
        assert_eq!(poisson_bracket(&f, &g, &ThetaMatrix::zero(2), &x).unwrap(), c(0.0));
        assert!(poisson_bracket(&f, &g, &th, &x).unwrap().norm() > 0.0);
    }

    #[test]
    fn hermite_transform_matches_quadrature() {
        let h = AnalyticFunction::hermite_gaussian(1.0, vec![2]).unwrap();
        for &p in &[0.0, 0.7, -1.9] {
            let q = crate::quad::gl_composite(-12.0, 12.0, 96, |x| {
                (h.eval(&[x]).unwrap() * Complex64::from_polar(1.0, -p * x)).re
            });
            let qi = crate::quad::gl_composite(-12.0, 12.0, 96, |x| {
                (h.eval(&[x]).unwrap() * Complex64::from_polar(1.0, -p * x)).im
            });
            let want = h.eval_fourier(&[p]).unwrap();
            assert!((Complex64::new(q, qi) - want).norm() < 1e-10 * want.norm().max(1.0));
        }
    }
}
