//! Uniform centered grids and sampled fields.
//!
//! Position nodes x_j = −L + jΔx (j = 0..n), so x = 0 is node n/2; momentum nodes
//! p_k = −P + kΔp with Δp = π/L and P = π/Δx. Data are row-major, last axis fastest.

mod dft;
mod io;

pub use dft::{
    dft_forward, dft_inverse, momentum_tail_fraction, spectral_derivative, transform_in_place,
    Direction, ALIAS_TAIL_LIMIT,
};
pub use io::{read_field, write_field, write_field_csv, field_to_csv};

use crate::atlas::AnalyticFunction;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    d: usize,
    n: usize,
    l: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Position,
    Momentum,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Position => "position",
            Space::Momentum => "momentum",
        }
    }
}

impl GridSpec {
    pub fn new(d: usize, n: usize, l: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n must be a power of two >= 8, got {n}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidGrid(format!("L must be positive, got {l}")));
        }
        if n.checked_pow(d as u32).is_none() {
            return Err(Error::InvalidGrid("n^d overflows".into()));
        }
        Ok(GridSpec { d, n, l })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> f64 {
        self.l
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn dp(&self) -> f64 {
        PI / self.l
    }

    pub fn p_max(&self) -> f64 {
        PI / self.dx()
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.dx()
    }

    pub fn p(&self, k: usize) -> f64 {
        -self.p_max() + k as f64 * self.dp()
    }

    pub fn coord(&self, space: Space, j: usize) -> f64 {
        match space {
            Space::Position => self.x(j),
            Space::Momentum => self.p(j),
        }
    }

    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    /// Multi-index of a flat row-major index.
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for a in (0..self.d).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Coordinates of flat node `idx`.
    pub fn point(&self, space: Space, idx: usize) -> Vec<f64> {
        self.unflatten(idx)
            .into_iter()
            .map(|j| self.coord(space, j))
            .collect()
    }

    pub fn cell_volume(&self, space: Space) -> f64 {
        match space {
            Space::Position => self.dx(),
            Space::Momentum => self.dp(),
        }
        .powi(self.d as i32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub spec: GridSpec,
    pub space: Space,
    pub data: Vec<Complex64>,
}

impl SampledField {
    pub fn new(spec: GridSpec, space: Space, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.len(),
                got: data.len(),
            });
        }
        Ok(SampledField { spec, space, data })
    }

    pub fn zeros(spec: GridSpec, space: Space) -> Self {
        SampledField {
            spec,
            space,
            data: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    pub fn from_fn<F: FnMut(&[f64]) -> Result<Complex64>>(
        spec: GridSpec,
        space: Space,
        mut f: F,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(spec.len());
        let mut pt = vec![0.0; spec.d];
        for idx in 0..spec.len() {
            let mut r = idx;
            for a in (0..spec.d).rev() {
                pt[a] = spec.coord(space, r % spec.n);
                r /= spec.n;
            }
            data.push(f(&pt)?);
        }
        Ok(SampledField { spec, space, data })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SampledField {
            spec: self.spec,
            space: self.space,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_same(&self, other: &SampledField) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.spec, other.spec
            )));
        }
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                expected: self.space.name(),
                got: other.space.name(),
            });
        }
        Ok(())
    }

    pub fn zip_with(
        &self,
        other: &SampledField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_same(other)?;
        Ok(SampledField {
            spec: self.spec,
            space: self.space,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &SampledField) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn value_at(&self, multi: &[usize]) -> Complex64 {
        self.data[self.spec.flatten(multi)]
    }

    /// Sub-sample a position field onto a coarser grid with the same L.
    pub fn restrict_to(&self, target: GridSpec) -> Result<Self> {
        if target.d != self.spec.d
            || target.l != self.spec.l
            || target.n > self.spec.n
            || self.spec.n % target.n != 0
        {
            return Err(Error::GridMismatch(format!(
                "cannot restrict {:?} to {:?}",
                self.spec, target
            )));
        }
        if self.space != Space::Position {
            return Err(Error::SpaceMismatch {
                expected: "position",
                got: self.space.name(),
            });
        }
        let step = self.spec.n / target.n;
        let data = (0..target.len())
            .map(|i| {
                let m: Vec<usize> = target.unflatten(i).into_iter().map(|j| j * step).collect();
                self.value_at(&m)
            })
            .collect();
        Ok(SampledField {
            spec: target,
            space: Space::Position,
            data,
        })
    }

    /// Indices of nodes whose Euclidean distance from the origin is at most r.
    pub fn ball_indices(&self, r: f64) -> Vec<usize> {
        (0..self.spec.len())
            .filter(|&i| {
                let p = self.spec.point(self.space, i);
                p.iter().map(|v| v * v).sum::<f64>() <= r * r
            })
            .collect()
    }
}

pub fn sample(f: &AnalyticFunction, spec: GridSpec, space: Space) -> Result<SampledField> {
    if f.dim() != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            got: f.dim(),
        });
    }
    match space {
        Space::Position => SampledField::from_fn(spec, space, |x| f.eval(x)),
        Space::Momentum => SampledField::from_fn(spec, space, |p| f.eval_fourier(p)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    Sup,
    L2,
    L1,
}

/// Pairwise summation, giving a fixed reduction order independent of threading.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn field_norm(field: &SampledField, kind: NormKind) -> f64 {
    let w = field.spec.cell_volume(field.space);
    match kind {
        NormKind::Sup => field.data.iter().map(|v| v.norm()).fold(0.0, f64::max),
        NormKind::L1 => {
            let a: Vec<f64> = field.data.iter().map(|v| v.norm()).collect();
            w * pairwise_sum(&a)
        }
        NormKind::L2 => {
            let a: Vec<f64> = field.data.iter().map(|v| v.norm_sqr()).collect();
            (w * pairwise_sum(&a)).sqrt()
        }
    }
}

/// ‖a − b‖₂ / ‖b‖₂ on a common grid.
pub fn relative_l2(a: &SampledField, b: &SampledField) -> Result<f64> {
    let diff = a.sub(b)?;
    Ok(field_norm(&diff, NormKind::L2) / field_norm(b, NormKind::L2))
}

/// max |a − b| over the given node indices (all nodes when `None`).
pub fn sup_diff(a: &SampledField, b: &SampledField, nodes: Option<&[usize]>) -> Result<f64> {
    a.check_same(b)?;
    let it: Box<dyn Iterator<Item = usize>> = match nodes {
        Some(ix) => Box::new(ix.iter().copied()),
        None => Box::new(0..a.data.len()),
    };
    Ok(it.map(|i| (a.data[i] - b.data[i]).norm()).fold(0.0, f64::max))
}
