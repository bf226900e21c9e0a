//! Twisted product of tensor products on the line x₂ = 0.
//!
//! For θ = t·(0 1; −1 0), c = t/2, f = f₁⊗f₂ and g = g₁⊗g₂:
//! (f×g)(x₁, 0) = (2π)^{−2} [∫ f̂₁(z) g₂(−cz) e^{ix₁z} dz] · [∫ f₂(cy) ĝ₁(y) e^{ix₁y} dy].
//! With g₁ = f₁ and g₂(ξ) = f₂(−ξ) both brackets equal 2π·h_c(x₁), h_c = F⁻¹(f̂₁ · f₂(c·)),
//! so the slice is h_c². At t = 2 (c = 1) this is h = F⁻¹(f̂₁f₂) exactly.

use crate::atlas::AnalyticFunction;
use crate::error::{Error, Result};
use crate::quad::gl_composite_c;
use num_complex::Complex64;
use std::f64::consts::PI;

const RADIUS_TOL: f64 = 1e-17;

fn one_d(fs: [&AnalyticFunction; 4]) -> Result<()> {
    for f in fs {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: f.dim(),
            });
        }
    }
    Ok(())
}

fn panels(radius: f64, x1: f64) -> usize {
    ((4.0 * radius * (1.0 + x1.abs())).ceil() as usize).max(64)
}

/// Standard θ (t = 1).
pub fn separable_slice(
    f1: &AnalyticFunction,
    f2: &AnalyticFunction,
    g1: &AnalyticFunction,
    g2: &AnalyticFunction,
    x1: f64,
) -> Result<Complex64> {
    separable_slice_scaled(1.0, f1, f2, g1, g2, x1)
}

pub fn separable_slice_scaled(
    t: f64,
    f1: &AnalyticFunction,
    f2: &AnalyticFunction,
    g1: &AnalyticFunction,
    g2: &AnalyticFunction,
    x1: f64,
) -> Result<Complex64> {
    one_d([f1, f2, g1, g2])?;
    if !f1.has_fourier() || !g1.has_fourier() {
        return Err(Error::TransformUnavailable("slice needs f̂₁ and ĝ₁".into()));
    }
    let c = t / 2.0;
    let zr = f1.fourier_radius(RADIUS_TOL)?[0];
    let yr = g1.fourier_radius(RADIUS_TOL)?[0];
    let mut err = None;
    let mut guard = |r: Result<Complex64>| {
        r.unwrap_or_else(|e| {
            err.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        })
    };
    let first = gl_composite_c(-zr, zr, panels(zr, x1), |z| {
        guard(f1.eval_fourier(&[z]).and_then(|a| Ok(a * g2.eval(&[-c * z])?)))
            * Complex64::from_polar(1.0, x1 * z)
    });
    let second = gl_composite_c(-yr, yr, panels(yr, x1), |y| {
        guard(g1.eval_fourier(&[y]).and_then(|a| Ok(a * f2.eval(&[c * y])?)))
            * Complex64::from_polar(1.0, x1 * y)
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(first * second / (2.0 * PI).powi(2))
}
