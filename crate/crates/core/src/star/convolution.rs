//! Twisted convolution (f̂⊛ĝ)(p) = ∫ f̂(q) ĝ(p − q) e^{i⟨p,θq⟩} dq on the momentum grid.

use crate::error::{Error, Result};
use crate::grid::{momentum_tail_fraction, SampledField, Space, ALIAS_TAIL_LIMIT};
use crate::parallel::ordered_map;
use crate::theta::ThetaMatrix;
use num_complex::Complex64;

/// Δq^d Σ_j f̂(q_j) ĝ(p_k − q_j) e^{i⟨p_k,θq_j⟩}; p − q falling off the grid contributes 0,
/// which requires both inputs to have negligible mass near the momentum boundary.
pub fn twisted_convolution(
    fh: &SampledField,
    gh: &SampledField,
    theta: &ThetaMatrix,
) -> Result<SampledField> {
    if fh.spec != gh.spec {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", fh.spec, gh.spec)));
    }
    for s in [fh, gh] {
        if s.space != Space::Momentum {
            return Err(Error::SpaceMismatch {
                expected: "momentum",
                got: s.space.name(),
            });
        }
    }
    let spec = fh.spec;
    let d = spec.d();
    if theta.d() != d {
        return Err(Error::DimensionMismatch {
            expected: theta.d(),
            got: d,
        });
    }
    for s in [fh, gh] {
        let t = momentum_tail_fraction(s);
        if t >= ALIAS_TAIL_LIMIT {
            return Err(Error::TailMass(t));
        }
    }
    let n = spec.n() as isize;
    let half = n / 2;
    let qs: Vec<(Vec<usize>, Vec<f64>, Complex64)> = (0..spec.len())
        .filter(|&j| fh.data[j] != Complex64::new(0.0, 0.0))
        .map(|j| (spec.unflatten(j), spec.point(Space::Momentum, j), fh.data[j]))
        .collect();
    let cell = spec.cell_volume(Space::Momentum);
    let data = ordered_map(spec.len(), |k| {
        let mk = spec.unflatten(k);
        let p = spec.point(Space::Momentum, k);
        let mut s = Complex64::new(0.0, 0.0);
        'q: for (mq, q, fv) in &qs {
            let mut idx = 0usize;
            for a in 0..d {
                let r = mk[a] as isize - mq[a] as isize + half;
                if r < 0 || r >= n {
                    continue 'q;
                }
                idx = idx * n as usize + r as usize;
            }
            let ph = theta.pair_unchecked(&p, q);
            s += fv * gh.data[idx] * Complex64::from_polar(1.0, ph);
        }
        s * cell
    });
    SampledField::new(spec, Space::Momentum, data)
}
