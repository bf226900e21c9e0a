//! Algorithm C, the position-space kernel for invertible T:
//! (f×g)(x) = (2π)^{−d}/|det T| ∫ f(y) e^{−i x·T⁻¹y} ĝ(T⁻¹(x − y)) dy,
//! with ĝ itself a Riemann sum over the samples of g. Here |det θ| in the kernel's
//! normalization is the determinant of the scaled operator T = θ/2; matching algorithms A
//! and B on a Gaussian pair fixes that choice.
//!
//! Output nodes are a subset of the quadrature nodes, so x − y runs over the difference
//! lattice kΔ and ĝ(T⁻¹kΔ) is tabulated once.

use super::{chunks, Operand};
use crate::atlas::AnalyticFunction;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField, Space};
use crate::parallel::ordered_map;
use crate::quad::gauss_legendre16;
use crate::theta::ThetaMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

const SKIP_REL: f64 = 1e-18;

fn monomial(m: &[f64], d: usize) -> Option<Vec<Option<(usize, f64)>>> {
    (0..d)
        .map(|r| {
            let nz: Vec<usize> = (0..d).filter(|&c| m[r * d + c] != 0.0).collect();
            match nz.len() {
                0 => Some(None),
                1 => Some(Some((nz[0], m[r * d + nz[0]]))),
                _ => None,
            }
        })
        .collect()
}

/// ĝ on the lattice T⁻¹kΔ, k ∈ [−(N−1), N−1]^d, stored row-major over k + N − 1.
fn g_hat_lattice(g: &SampledField, tinv: &[f64]) -> Vec<Complex64> {
    let spec = g.spec;
    let (n, d) = (spec.n(), spec.d());
    let m = 2 * n - 1;
    let dx = spec.dx();
    let zs: Vec<f64> = (0..n).map(|j| spec.x(j)).collect();
    let ks: Vec<f64> = (0..m).map(|k| (k as f64 - (n - 1) as f64) * dx).collect();
    let cell = dx.powi(d as i32);
    if let Some(rows) = monomial(tinv, d) {
        // Contract axis μ of g against e^{−i w_μ z_μ}, w_μ = c_μ k_{σ(μ)} Δ.
        let mut cur = g.data.clone();
        let mut shape = vec![n; d];
        for mu in 0..d {
            let ws: Vec<f64> = match rows[mu] {
                Some((_, c)) => ks.iter().map(|&k| c * k).collect(),
                None => vec![0.0],
            };
            let before: usize = shape[..mu].iter().product();
            let after: usize = shape[mu + 1..].iter().product();
            let mut next = vec![Complex64::new(0.0, 0.0); before * ws.len() * after];
            let e: Vec<Vec<Complex64>> = ws
                .iter()
                .map(|&w| zs.iter().map(|&z| Complex64::from_polar(1.0, -w * z)).collect())
                .collect();
            for b in 0..before {
                for (wi, ew) in e.iter().enumerate() {
                    for a in 0..after {
                        let mut s = Complex64::new(0.0, 0.0);
                        for (zi, ez) in ew.iter().enumerate() {
                            s += ez * cur[(b * n + zi) * after + a];
                        }
                        next[(b * ws.len() + wi) * after + a] = s;
                    }
                }
            }
            cur = next;
            shape[mu] = ws.len();
        }
        // Re-index from (w_0..w_{d−1}) to k.
        let total = m.pow(d as u32);
        (0..total)
            .map(|i| {
                let mut r = i;
                let mut k = vec![0usize; d];
                for a in (0..d).rev() {
                    k[a] = r % m;
                    r /= m;
                }
                let idx = (0..d).fold(0, |acc, mu| {
                    let j = match rows[mu] {
                        Some((col, _)) => k[col],
                        None => 0,
                    };
                    acc * shape[mu] + j
                });
                cur[idx] * cell
            })
            .collect()
    } else {
        let total = m.pow(d as u32);
        let gmax = g.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let support: Vec<(Vec<f64>, Complex64)> = (0..spec.len())
            .filter(|&i| g.data[i].norm() > SKIP_REL * gmax)
            .map(|i| (spec.point(Space::Position, i), g.data[i]))
            .collect();
        ordered_map(total, |i| {
            let mut r = i;
            let mut kv = vec![0.0; d];
            for a in (0..d).rev() {
                kv[a] = ks[r % m];
                r /= m;
            }
            let w: Vec<f64> = (0..d)
                .map(|mu| (0..d).map(|nu| tinv[mu * d + nu] * kv[nu]).sum())
                .collect();
            let mut s = Complex64::new(0.0, 0.0);
            for (z, v) in &support {
                let ph: f64 = w.iter().zip(z).map(|(a, b)| a * b).sum();
                s += v * Complex64::from_polar(1.0, -ph);
            }
            s * cell
        })
    }
}

pub(super) fn direct_kernel(
    f: Operand,
    g: Operand,
    theta: &ThetaMatrix,
    out: GridSpec,
    quadrature_n: usize,
) -> Result<SampledField> {
    let tinv = theta.operator_inverse()?;
    let det = theta.operator_det_abs();
    let d = out.d();
    if quadrature_n < out.n() || quadrature_n % out.n() != 0 {
        return Err(Error::GridMismatch(format!(
            "quadrature grid n={quadrature_n} must be a multiple of the output n={}",
            out.n()
        )));
    }
    let qspec = GridSpec::new(d, quadrature_n, out.half_extent())?;
    let fq = f.position_on(qspec)?;
    let gq = g.position_on(qspec)?;
    let n = quadrature_n;
    let m = 2 * n - 1;
    let step = n / out.n();
    let ghat = g_hat_lattice(&gq, &tinv);
    let fmax = fq.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let ys: Vec<(Vec<usize>, Complex64)> = (0..qspec.len())
        .filter(|&i| fq.data[i].norm() > SKIP_REL * fmax)
        .map(|i| (qspec.unflatten(i), fq.data[i]))
        .collect();
    let xs: Vec<f64> = (0..n).map(|j| qspec.x(j)).collect();
    let cell = qspec.dx().powi(d as i32);
    let scale = cell / ((2.0 * PI).powi(d as i32) * det);
    let ranges = chunks(out.len(), 64);
    let parts = ordered_map(ranges.len(), |c| {
        let mut res = Vec::with_capacity(ranges[c].len());
        for i in ranges[c].clone() {
            let kx: Vec<usize> = out.unflatten(i).into_iter().map(|j| j * step).collect();
            let x: Vec<f64> = kx.iter().map(|&j| xs[j]).collect();
            // x·T⁻¹y = (T⁻ᵀx)·y
            let u: Vec<f64> = (0..d)
                .map(|nu| (0..d).map(|mu| x[mu] * tinv[mu * d + nu]).sum())
                .collect();
            let waves: Vec<Vec<Complex64>> = u
                .iter()
                .map(|&ua| xs.iter().map(|&y| Complex64::from_polar(1.0, -ua * y)).collect())
                .collect();
            let mut s = Complex64::new(0.0, 0.0);
            for &(ref ky, fv) in &ys {
                let mut ph = fv;
                let mut li = 0usize;
                for a in 0..d {
                    ph *= waves[a][ky[a]];
                    li = li * m + (kx[a] + n - 1 - ky[a]);
                }
                s += ph * ghat[li];
            }
            res.push(s * scale);
        }
        res
    });
    SampledField::new(out, Space::Position, parts.into_iter().flatten().collect())
}

/// (f×g)(0) = (2π)^{−d}/|det T| ∫ f(y) ĝ(−T⁻¹y) dy by tensor Gauss-Legendre on
/// [−half_width, half_width]^d, independent of any grid.
pub fn value_at_origin_quadrature(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    half_width: f64,
    panels: usize,
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
    let tinv = theta.operator_inverse()?;
    let det = theta.operator_det_abs();
    let h = 2.0 * half_width / panels as f64;
    let rule = gauss_legendre16();
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|k| {
            let mid = -half_width + (k as f64 + 0.5) * h;
            rule.iter().map(move |&(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
        .collect();
    let count = nodes.len().pow(d as u32);
    let mut total = Complex64::new(0.0, 0.0);
    let mut y = vec![0.0; d];
    let mut w = vec![0.0; d];
    for i in 0..count {
        let mut r = i;
        let mut weight = 1.0;
        for a in (0..d).rev() {
            let (yy, ww) = nodes[r % nodes.len()];
            y[a] = yy;
            weight *= ww;
            r /= nodes.len();
        }
        for mu in 0..d {
            w[mu] = -(0..d).map(|nu| tinv[mu * d + nu] * y[nu]).sum::<f64>();
        }
        total += weight * f.eval(&y)? * g.eval_fourier(&w)?;
    }
    Ok(total / ((2.0 * PI).powi(d as i32) * det))
}
