//! Centered DFT per axis:
//! f̂_k = Δx (−1)^k Σ_j (−1)^j f_j e^{−2πijk/n},
//! f_j = (Δp/2π) (−1)^j Σ_k (−1)^k f̂_k e^{+2πijk/n}.
//! The sign factors are exact because n is a multiple of 4.

use super::{GridSpec, SampledField, Space};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::Forward => p.plan_fft_forward(n),
            Direction::Inverse => p.plan_fft_inverse(n),
        }
    })
}

/// Applies the centered transform along every axis of a row-major n^d array.
/// `h` is Δx for the forward leg and Δp/2π for the inverse leg.
pub fn transform_in_place(data: &mut [Complex64], n: usize, d: usize, dir: Direction, h: f64) {
    let fft = plan(n, dir);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = data.len();
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for j in 0..n {
                    let v = data[start + j * stride];
                    line[j] = if j % 2 == 0 { v } else { -v };
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for k in 0..n {
                    let v = line[k] * h;
                    data[start + k * stride] = if k % 2 == 0 { v } else { -v };
                }
            }
        }
    }
}

pub fn dft_forward(field: &SampledField) -> Result<SampledField> {
    if field.space != Space::Position {
        return Err(Error::SpaceMismatch {
            expected: "position",
            got: field.space.name(),
        });
    }
    let mut data = field.data.clone();
    let s = field.spec;
    transform_in_place(&mut data, s.n(), s.d(), Direction::Forward, s.dx());
    Ok(SampledField {
        spec: s,
        space: Space::Momentum,
        data,
    })
}

pub fn dft_inverse(field: &SampledField) -> Result<SampledField> {
    if field.space != Space::Momentum {
        return Err(Error::SpaceMismatch {
            expected: "momentum",
            got: field.space.name(),
        });
    }
    let mut data = field.data.clone();
    let s = field.spec;
    transform_in_place(&mut data, s.n(), s.d(), Direction::Inverse, s.dp() / (2.0 * PI));
    Ok(SampledField {
        spec: s,
        space: Space::Position,
        data,
    })
}

/// Relative L1 mass of momentum nodes with some |p_i| ≥ 3P/4.
pub fn momentum_tail_fraction(fh: &SampledField) -> f64 {
    let s: GridSpec = fh.spec;
    let n = s.n();
    let band = |k: usize| (k as isize - (n / 2) as isize).unsigned_abs() >= 3 * n / 8;
    let (mut tail, mut total) = (0.0, 0.0);
    for (i, v) in fh.data.iter().enumerate() {
        let a = v.norm();
        total += a;
        if s.unflatten(i).into_iter().any(band) {
            tail += a;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

pub const ALIAS_TAIL_LIMIT: f64 = 1e-8;

/// ∂^κ f by multiplication with (ip)^κ on the momentum grid. The Nyquist mode is
/// dropped for odd orders so real fields stay real.
pub fn spectral_derivative(field: &SampledField, kappa: &[usize]) -> Result<SampledField> {
    let s = field.spec;
    if kappa.len() != s.d() {
        return Err(Error::DimensionMismatch {
            expected: s.d(),
            got: kappa.len(),
        });
    }
    if field.space != Space::Position {
        return Err(Error::SpaceMismatch {
            expected: "position",
            got: field.space.name(),
        });
    }
    if kappa.iter().all(|&k| k == 0) {
        return Ok(field.clone());
    }
    let mut fh = dft_forward(field)?;
    let tail = momentum_tail_fraction(&fh);
    if tail >= ALIAS_TAIL_LIMIT {
        return Err(Error::AliasRisk(tail));
    }
    let factors: Vec<Vec<Complex64>> = kappa
        .iter()
        .map(|&k| {
            (0..s.n())
                .map(|j| {
                    if j == 0 && k % 2 == 1 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, s.p(j)).powu(k as u32)
                    }
                })
                .collect()
        })
        .collect();
    for (i, v) in fh.data.iter_mut().enumerate() {
        for (a, j) in s.unflatten(i).into_iter().enumerate() {
            *v *= factors[a][j];
        }
    }
    dft_inverse(&fh)
}
