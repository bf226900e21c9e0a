//! Twisted product, twisted convolution and Moyal series terms.
//!
//! With T = θ/2 the twisted product is
//! (f×g)(x) = (2π)^{−2d} ∫∫ f̂(q) ĝ(p) e^{i(q+p)·x} e^{−i⟨q,θp⟩} dq dp
//!          = (2π)^{−d} ∫ f̂(q) e^{iq·x} g(x + Tq) dq,
//! since e^{−i⟨q,θp⟩} = e^{i(Tq)·p}. Three independent algorithms evaluate it.

mod convolution;
mod direct;
mod moyal;
mod shifted;
mod slice;
mod tensor;

pub use convolution::twisted_convolution;
pub use direct::value_at_origin_quadrature;
pub use moyal::{
    moyal_expansion, moyal_partial_sum, moyal_term, moyal_term_derivative, moyal_term_derivatives,
    moyal_terms, DerivGrid, ExpansionTerm,
};
pub use slice::{separable_slice, separable_slice_scaled};

use crate::atlas::AnalyticFunction;
use crate::error::{Error, Result};
use crate::grid::{dft_forward, dft_inverse, sample, GridSpec, SampledField, Space};
use crate::theta::ThetaMatrix;
use serde::{Deserialize, Serialize};

pub const DEFAULT_Q_POINTS: usize = 256;
pub const DEFAULT_SERIES_CAP: usize = 20;
/// Largest 2d-dimensional tensor algorithm A will represent: 64⁴ nodes.
pub const TENSOR_NODE_CAP: usize = 64 * 64 * 64 * 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarAlgorithm {
    /// Phase-twisted momentum tensor, inverse DFT, diagonal restriction.
    TensorPhaseIFFT,
    /// Trapezoid rule over q of f̂(q) e^{iq·x} g(x + Tq) on `q_points` intervals per axis.
    ShiftedQuadrature { q_points: usize },
    /// Double quadrature of the position-space kernel on a grid with `quadrature_n` points
    /// per axis and the same half-extent as the output grid.
    DirectKernel { quadrature_n: usize },
}

impl StarAlgorithm {
    pub fn name(&self) -> &'static str {
        match self {
            StarAlgorithm::TensorPhaseIFFT => "tensor",
            StarAlgorithm::ShiftedQuadrature { .. } => "shift",
            StarAlgorithm::DirectKernel { .. } => "direct",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarConfig {
    pub algorithm: StarAlgorithm,
    pub spec: GridSpec,
    pub n_max: usize,
}

impl StarConfig {
    pub fn new(algorithm: StarAlgorithm, spec: GridSpec) -> Self {
        StarConfig {
            algorithm,
            spec,
            n_max: DEFAULT_SERIES_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Operand<'a> {
    Analytic(&'a AnalyticFunction),
    Sampled(&'a SampledField),
}

impl<'a> From<&'a AnalyticFunction> for Operand<'a> {
    fn from(f: &'a AnalyticFunction) -> Self {
        Operand::Analytic(f)
    }
}

impl<'a> From<&'a SampledField> for Operand<'a> {
    fn from(f: &'a SampledField) -> Self {
        Operand::Sampled(f)
    }
}

impl Operand<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Operand::Analytic(f) => f.dim(),
            Operand::Sampled(s) => s.spec.d(),
        }
    }

    fn check_spec(s: &SampledField, spec: GridSpec) -> Result<()> {
        if s.spec != spec {
            return Err(Error::GridMismatch(format!(
                "operand on {:?}, expected {:?}",
                s.spec, spec
            )));
        }
        Ok(())
    }

    pub fn momentum_on(&self, spec: GridSpec) -> Result<SampledField> {
        match self {
            Operand::Analytic(f) => sample(f, spec, Space::Momentum),
            Operand::Sampled(s) => {
                Self::check_spec(s, spec)?;
                match s.space {
                    Space::Momentum => Ok((*s).clone()),
                    Space::Position => dft_forward(s),
                }
            }
        }
    }

    pub fn position_on(&self, spec: GridSpec) -> Result<SampledField> {
        match self {
            Operand::Analytic(f) => sample(f, spec, Space::Position),
            Operand::Sampled(s) => {
                Self::check_spec(s, spec)?;
                match s.space {
                    Space::Position => Ok((*s).clone()),
                    Space::Momentum => dft_inverse(s),
                }
            }
        }
    }
}

fn check_dims(f: &Operand, g: &Operand, theta: &ThetaMatrix, spec: GridSpec) -> Result<()> {
    for d in [f.dim(), g.dim(), spec.d()] {
        if d != theta.d() {
            return Err(Error::DimensionMismatch {
                expected: theta.d(),
                got: d,
            });
        }
    }
    Ok(())
}

pub fn twisted_product(
    f: Operand,
    g: Operand,
    theta: &ThetaMatrix,
    cfg: &StarConfig,
) -> Result<SampledField> {
    check_dims(&f, &g, theta, cfg.spec)?;
    match cfg.algorithm {
        StarAlgorithm::TensorPhaseIFFT => {
            let spec = cfg.spec;
            let nodes = spec.n().checked_pow(2 * spec.d() as u32);
            if nodes.is_none_or(|v| v > TENSOR_NODE_CAP) {
                return Err(Error::MemoryGuard {
                    n: spec.n(),
                    d: spec.d(),
                    cap: TENSOR_NODE_CAP,
                });
            }
            let fh = f.momentum_on(spec)?;
            let gh = g.momentum_on(spec)?;
            tensor::tensor_phase(&fh, &gh, theta)
        }
        StarAlgorithm::ShiftedQuadrature { q_points } => {
            let g = match g {
                Operand::Analytic(g) => g,
                Operand::Sampled(_) => {
                    return Err(Error::Unsupported(
                        "shifted quadrature evaluates g at shifted points and needs an analytic g"
                            .into(),
                    ))
                }
            };
            shifted::shifted(f, g, theta, cfg.spec, q_points)
        }
        StarAlgorithm::DirectKernel { quadrature_n } => {
            direct::direct_kernel(f, g, theta, cfg.spec, quadrature_n)
        }
    }
}

/// Fixed chunking of `0..count` for ordered parallel reductions.
pub(crate) fn chunks(count: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let parts = parts.max(1).min(count.max(1));
    let size = count.div_ceil(parts);
    (0..parts)
        .map(|k| (k * size).min(count)..((k + 1) * size).min(count))
        .filter(|r| !r.is_empty())
        .collect()
}

/// Row-major outer product of per-axis vectors.
pub(crate) fn outer<T>(axes: &[Vec<T>]) -> Vec<T>
where
    T: Copy + std::ops::Mul<Output = T>,
{
    let mut out: Vec<T> = Vec::new();
    for (a, v) in axes.iter().enumerate() {
        if a == 0 {
            out = v.clone();
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * v.len());
        for &o in &out {
            for &x in v {
                next.push(o * x);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests;
