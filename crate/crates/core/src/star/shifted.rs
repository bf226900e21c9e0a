//! Algorithm B: h(x) = (2π)^{−d} ∫ f̂(q) e^{iq·x} g(x + Tq) dq by the trapezoid rule.
//!
//! When f and g are tensor products and every row of T has at most one nonzero entry,
//! (Tq)_μ = c_μ q_{σ(μ)} and the integral splits into 1-D sums:
//! h(x) = (2π)^{−d} Π_ν [Δq Σ_q f̂_ν(q) e^{iqx_ν} Π_{σ(μ)=ν} g_μ(x_μ + c_μ q)] · Π_{zero rows} g_μ(x_μ).

use super::{chunks, Operand};
use crate::atlas::AnalyticFunction;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField, Space};
use crate::parallel::ordered_map;
use crate::theta::ThetaMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

const RADIUS_TOL: f64 = 1e-17;
const SKIP_REL: f64 = 1e-18;

pub(super) fn shifted(
    f: Operand,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    spec: GridSpec,
    q_points: usize,
) -> Result<SampledField> {
    if q_points < 8 {
        return Err(Error::InvalidParameter(format!(
            "q_points must be at least 8, got {q_points}"
        )));
    }
    match f {
        Operand::Analytic(fa) => {
            if let (Some(ff), Some(gf), Some(rows)) = (fa.factors(), g.factors(), theta.monomial_rows())
            {
                return separable(ff, gf, &rows, spec, q_points, &fa.fourier_radius(RADIUS_TOL)?);
            }
            let radius = fa.fourier_radius(RADIUS_TOL)?;
            let axes: Vec<Vec<f64>> = radius.iter().map(|&r| q_nodes(r, q_points)).collect();
            let dq: Vec<f64> = radius.iter().map(|&r| 2.0 * r / q_points as f64).collect();
            let mut nodes = Vec::new();
            let mut idx = vec![0usize; axes.len()];
            'outer: loop {
                let q: Vec<f64> = idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
                let v = fa.eval_fourier(&q)?;
                nodes.push((q, v));
                for a in (0..idx.len()).rev() {
                    idx[a] += 1;
                    if idx[a] < axes[a].len() {
                        continue 'outer;
                    }
                    idx[a] = 0;
                }
                break;
            }
            generic(nodes, dq.iter().product(), g, theta, spec)
        }
        Operand::Sampled(_) => {
            let fh = f.momentum_on(spec)?;
            let nodes = (0..spec.len())
                .map(|i| (spec.point(Space::Momentum, i), fh.data[i]))
                .collect();
            generic(nodes, spec.dp().powi(spec.d() as i32), g, theta, spec)
        }
    }
}

/// Symmetric nodes jΔq, |j| ≤ q_points/2, with Δq = 2r/q_points.
fn q_nodes(r: f64, q_points: usize) -> Vec<f64> {
    let h = 2.0 * r / q_points as f64;
    let m = (q_points / 2) as i64;
    (-m..=m).map(|j| j as f64 * h).collect()
}

fn generic(
    nodes: Vec<(Vec<f64>, Complex64)>,
    weight: f64,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    spec: GridSpec,
) -> Result<SampledField> {
    let d = spec.d();
    let fmax = nodes.iter().map(|n| n.1.norm()).fold(0.0, f64::max);
    let active: Vec<(Vec<f64>, Complex64, Vec<f64>)> = nodes
        .into_iter()
        .filter(|n| n.1.norm() > SKIP_REL * fmax)
        .map(|(q, v)| {
            let mut tq = vec![0.0; d];
            theta.apply_into(&q, &mut tq);
            (q, v, tq)
        })
        .collect();
    let ranges = chunks(spec.len(), 64);
    let parts = ordered_map(ranges.len(), |c| {
        let mut out = Vec::with_capacity(ranges[c].len());
        let mut y = vec![0.0; d];
        for i in ranges[c].clone() {
            let x = spec.point(Space::Position, i);
            let mut s = Complex64::new(0.0, 0.0);
            for (q, v, tq) in &active {
                for a in 0..d {
                    y[a] = x[a] + tq[a];
                }
                let ph: f64 = q.iter().zip(&x).map(|(a, b)| a * b).sum();
                s += v * Complex64::from_polar(1.0, ph) * g.eval(&y)?;
            }
            out.push(s);
        }
        Ok::<_, Error>(out)
    });
    let scale = weight / (2.0 * PI).powi(d as i32);
    let mut data = Vec::with_capacity(spec.len());
    for p in parts {
        data.extend(p?.into_iter().map(|v| v * scale));
    }
    SampledField::new(spec, Space::Position, data)
}

fn separable(
    (cf, ff): (Complex64, Vec<AnalyticFunction>),
    (cg, gf): (Complex64, Vec<AnalyticFunction>),
    rows: &[Option<(usize, f64)>],
    spec: GridSpec,
    q_points: usize,
    radius: &[f64],
) -> Result<SampledField> {
    let (n, d) = (spec.n(), spec.d());
    let xs: Vec<f64> = (0..n).map(|j| spec.x(j)).collect();
    let qs: Vec<Vec<f64>> = radius.iter().map(|&r| q_nodes(r, q_points)).collect();
    // F[ν][j] = Δq f̂_ν(q_j)
    let fw: Vec<Vec<Complex64>> = (0..d)
        .map(|nu| {
            let h = 2.0 * radius[nu] / q_points as f64;
            qs[nu]
                .iter()
                .map(|&q| Ok(h * ff[nu].eval_fourier(&[q])?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // Shifted g tables: G[μ][i][j] = g_μ(x_i + c_μ q_j) on the q grid of axis σ(μ).
    let mut shifted: Vec<Option<(usize, Vec<Vec<Complex64>>)>> = Vec::with_capacity(d);
    let mut plain: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(d);
    for mu in 0..d {
        match rows[mu] {
            Some((nu, c)) => {
                let t = xs
                    .iter()
                    .map(|&x| qs[nu].iter().map(|&q| gf[mu].eval(&[x + c * q])).collect())
                    .collect::<Result<Vec<Vec<_>>>>()?;
                shifted.push(Some((nu, t)));
                plain.push(None);
            }
            None => {
                shifted.push(None);
                plain.push(Some(xs.iter().map(|&x| gf[mu].eval(&[x])).collect::<Result<_>>()?));
            }
        }
    }
    let waves: Vec<Vec<Vec<Complex64>>> = qs
        .iter()
        .map(|qv| {
            xs.iter()
                .map(|&x| qv.iter().map(|&q| Complex64::from_polar(1.0, q * x)).collect())
                .collect()
        })
        .collect();
    let users: Vec<Vec<usize>> = (0..d)
        .map(|nu| {
            (0..d)
                .filter(|&mu| matches!(shifted[mu], Some((v, _)) if v == nu))
                .collect()
        })
        .collect();
    let scale = cf * cg / (2.0 * PI).powi(d as i32);
    let data = ordered_map(spec.len(), |i| {
        let m = spec.unflatten(i);
        let mut v = scale;
        for nu in 0..d {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..qs[nu].len() {
                let mut t = fw[nu][j] * waves[nu][m[nu]][j];
                for &mu in &users[nu] {
                    if let Some((_, tab)) = &shifted[mu] {
                        t *= tab[m[mu]][j];
                    }
                }
                s += t;
            }
            v *= s;
        }
        for mu in 0..d {
            if let Some(p) = &plain[mu] {
                v *= p[m[mu]];
            }
        }
        v
    });
    SampledField::new(spec, Space::Position, data)
}
