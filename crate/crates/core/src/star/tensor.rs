//! Algorithm A. The momentum tensor f̂(q)ĝ(p)e^{−i⟨q,θp⟩} is inverse-transformed over
//! both variable blocks and restricted to the diagonal. Slab form: for each q node,
//! G_q = IDFT_p[ĝ(p) e^{i(Tq)·p}], then h(x) = (2π)^{−d} Δp^d Σ_q f̂(q) e^{iq·x} G_q(x),
//! which is the same double sum without materializing the 2d-dimensional array.

use super::{chunks, outer};
use crate::error::Result;
use crate::grid::{transform_in_place, Direction, SampledField, Space};
use crate::parallel::ordered_map;
use crate::theta::ThetaMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

const SKIP_REL: f64 = 1e-18;
const CHUNKS: usize = 64;

pub(super) fn tensor_phase(
    fh: &SampledField,
    gh: &SampledField,
    theta: &ThetaMatrix,
) -> Result<SampledField> {
    let spec = fh.spec;
    let (n, d) = (spec.n(), spec.d());
    let ps: Vec<f64> = (0..n).map(|k| spec.p(k)).collect();
    let xs: Vec<f64> = (0..n).map(|j| spec.x(j)).collect();
    let fmax = fh.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let active: Vec<usize> = (0..spec.len())
        .filter(|&i| fh.data[i].norm() > SKIP_REL * fmax)
        .collect();
    let ranges = chunks(active.len(), CHUNKS);
    let partials = ordered_map(ranges.len(), |c| {
        let mut acc = vec![Complex64::new(0.0, 0.0); spec.len()];
        let mut tq = vec![0.0; d];
        for &qi in &active[ranges[c].clone()] {
            let q = spec.point(Space::Momentum, qi);
            theta.apply_into(&q, &mut tq);
            let shift: Vec<Vec<Complex64>> = (0..d)
                .map(|a| ps.iter().map(|&p| Complex64::from_polar(1.0, tq[a] * p)).collect())
                .collect();
            let mut buf: Vec<Complex64> = outer(&shift)
                .into_iter()
                .zip(&gh.data)
                .map(|(e, &g)| e * g)
                .collect();
            transform_in_place(&mut buf, n, d, Direction::Inverse, spec.dp() / (2.0 * PI));
            let wave: Vec<Vec<Complex64>> = (0..d)
                .map(|a| xs.iter().map(|&x| Complex64::from_polar(1.0, q[a] * x)).collect())
                .collect();
            let fq = fh.data[qi];
            for ((a, w), b) in acc.iter_mut().zip(outer(&wave)).zip(&buf) {
                *a += fq * w * b;
            }
        }
        acc
    });
    let scale = spec.dp().powi(d as i32) / (2.0 * PI).powi(d as i32);
    let mut data = vec![Complex64::new(0.0, 0.0); spec.len()];
    for part in partials {
        for (o, v) in data.iter_mut().zip(part) {
            *o += v;
        }
    }
    for v in &mut data {
        *v *= scale;
    }
    SampledField::new(spec, Space::Position, data)
}
