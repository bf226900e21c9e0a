//! The noncommutativity matrix θ and its bilinear form.
//!
//! The factor 1/2 lives here and nowhere else: `pair(p, q) = ½ Σ θ^{μν} p_μ q_ν` and
//! `apply(q)_μ = ½ Σ_ν θ^{μν} q_ν`. Every other module goes through these two.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaMatrix {
    d: usize,
    /// Row-major θ^{μν}.
    entries: Vec<f64>,
}

/// Validates and builds θ. Antisymmetry is checked exactly on the supplied values.
pub fn make_theta(d: usize, entries: &[Vec<f64>]) -> Result<ThetaMatrix> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if entries.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: entries.len(),
        });
    }
    let mut flat = Vec::with_capacity(d * d);
    for row in entries {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        flat.extend_from_slice(row);
    }
    ThetaMatrix::from_flat(d, flat)
}

pub fn pair(theta: &ThetaMatrix, p: &[f64], q: &[f64]) -> Result<f64> {
    theta.check(p)?;
    theta.check(q)?;
    Ok(theta.pair_unchecked(p, q))
}

pub fn theta_abs(theta: &ThetaMatrix) -> f64 {
    theta.entries.iter().map(|v| v.abs()).sum()
}

pub fn apply_theta(theta: &ThetaMatrix, q: &[f64]) -> Result<Vec<f64>> {
    theta.check(q)?;
    let mut out = vec![0.0; theta.d];
    theta.apply_into(q, &mut out);
    Ok(out)
}

impl ThetaMatrix {
    pub fn from_flat(d: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("theta entries must be finite".into()));
        }
        let mut worst = 0.0f64;
        for mu in 0..d {
            for nu in 0..d {
                worst = worst.max((entries[mu * d + nu] + entries[nu * d + mu]).abs());
            }
        }
        if worst > 0.0 {
            return Err(Error::AntisymmetryViolation(worst));
        }
        Ok(ThetaMatrix { d, entries })
    }

    pub fn zero(d: usize) -> Self {
        ThetaMatrix {
            d,
            entries: vec![0.0; d * d],
        }
    }

    /// t · (0 1; −1 0).
    pub fn symplectic2(t: f64) -> Self {
        ThetaMatrix {
            d: 2,
            entries: vec![0.0, t, -t, 0.0],
        }
    }

    /// Block-diagonal t · (0 1; −1 0) ⊕ … for even d.
    pub fn block_symplectic(d: usize, t: f64) -> Result<Self> {
        if d == 0 || d % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "block symplectic theta needs even d, got {d}"
            )));
        }
        let mut e = vec![0.0; d * d];
        for b in (0..d).step_by(2) {
            e[b * d + b + 1] = t;
            e[(b + 1) * d + b] = -t;
        }
        Ok(ThetaMatrix { d, entries: e })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entry(&self, mu: usize, nu: usize) -> f64 {
        self.entries[mu * self.d + nu]
    }

    pub fn entries(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.d).map(|r| r.to_vec()).collect()
    }

    pub fn scaled(&self, t: f64) -> Self {
        ThetaMatrix {
            d: self.d,
            entries: self.entries.iter().map(|v| v * t).collect(),
        }
    }

    pub fn abs_sum(&self) -> f64 {
        theta_abs(self)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn pair_unchecked(&self, p: &[f64], q: &[f64]) -> f64 {
        let d = self.d;
        let mut s = 0.0;
        for mu in 0..d {
            let mut row = 0.0;
            for nu in 0..d {
                row += self.entries[mu * d + nu] * q[nu];
            }
            s += p[mu] * row;
        }
        0.5 * s
    }

    pub fn apply_into(&self, q: &[f64], out: &mut [f64]) {
        let d = self.d;
        for mu in 0..d {
            let mut s = 0.0;
            for nu in 0..d {
                s += self.entries[mu * d + nu] * q[nu];
            }
            out[mu] = 0.5 * s;
        }
    }

    /// The operator T = θ/2 as a row-major matrix.
    pub fn operator(&self) -> Vec<f64> {
        self.entries.iter().map(|v| 0.5 * v).collect()
    }

    /// |det T| of the scaled operator T = θ/2.
    pub fn operator_det_abs(&self) -> f64 {
        lu_det(self.d, self.operator()).abs()
    }

    /// T^{-1}, or `ThetaSingular` when T is not invertible.
    pub fn operator_inverse(&self) -> Result<Vec<f64>> {
        let t = self.operator();
        let scale = t.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let det = lu_det(self.d, t.clone()).abs();
        if scale == 0.0 || det <= 1e-13 * scale.powi(self.d as i32) {
            return Err(Error::ThetaSingular(det));
        }
        Ok(invert(self.d, t))
    }

    /// For every row μ of T, the unique column carrying a nonzero entry and its value,
    /// or `None` for an all-zero row. Returns `None` overall if some row has two or
    /// more nonzero entries.
    pub fn monomial_rows(&self) -> Option<Vec<Option<(usize, f64)>>> {
        let t = self.operator();
        let d = self.d;
        let mut rows = Vec::with_capacity(d);
        for mu in 0..d {
            let nz: Vec<usize> = (0..d).filter(|&nu| t[mu * d + nu] != 0.0).collect();
            match nz.len() {
                0 => rows.push(None),
                1 => rows.push(Some((nz[0], t[mu * d + nz[0]]))),
                _ => return None,
            }
        }
        Some(rows)
    }

    /// θ^{12} when θ = t·(0 1; −1 0), which covers every antisymmetric 2×2 matrix.
    pub fn symplectic2_scale(&self) -> Option<f64> {
        (self.d == 2).then(|| self.entries[1])
    }
}

fn lu_det(d: usize, mut a: Vec<f64>) -> f64 {
    let mut det = 1.0;
    for c in 0..d {
        let piv = (c..d)
            .max_by(|&i, &j| a[i * d + c].abs().total_cmp(&a[j * d + c].abs()))
            .unwrap();
        if a[piv * d + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..d {
                a.swap(piv * d + k, c * d + k);
            }
            det = -det;
        }
        let p = a[c * d + c];
        det *= p;
        for r in c + 1..d {
            let f = a[r * d + c] / p;
            for k in c..d {
                a[r * d + k] -= f * a[c * d + k];
            }
        }
    }
    det
}

fn invert(d: usize, mut a: Vec<f64>) -> Vec<f64> {
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    for c in 0..d {
        let piv = (c..d)
            .max_by(|&i, &j| a[i * d + c].abs().total_cmp(&a[j * d + c].abs()))
            .unwrap();
        for k in 0..d {
            a.swap(piv * d + k, c * d + k);
            inv.swap(piv * d + k, c * d + k);
        }
        let p = a[c * d + c];
        for k in 0..d {
            a[c * d + k] /= p;
            inv[c * d + k] /= p;
        }
        for r in 0..d {
            if r != c {
                let f = a[r * d + c];
                if f != 0.0 {
                    for k in 0..d {
                        a[r * d + k] -= f * a[c * d + k];
                        inv[r * d + k] -= f * inv[c * d + k];
                    }
                }
            }
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> ThetaMatrix {
        make_theta(2, &[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn construction() {
        assert_eq!(standard(), ThetaMatrix::symplectic2(1.0));
        let z = make_theta(2, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(z.is_zero());
        assert!(matches!(
            make_theta(2, &[vec![0.0, 1.0], vec![1.0, 0.0]]),
            Err(Error::AntisymmetryViolation(_))
        ));
        assert!(matches!(
            make_theta(1, &[vec![1.0]]),
            Err(Error::AntisymmetryViolation(_))
        ));
        assert!(make_theta(1, &[vec![0.0]]).unwrap().is_zero());
    }

    #[test]
    fn pair_closed_form() {
        let t = standard();
        let (p, q) = ([0.3, -1.7], [2.5, 0.4]);
        let want = (p[0] * q[1] - p[1] * q[0]) / 2.0;
        assert!((pair(&t, &p, &q).unwrap() - want).abs() < 1e-15);
        assert_eq!(pair(&t, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(pair(&t, &p, &p).unwrap(), 0.0);
        assert!(matches!(
            pair(&t, &[1.0], &[1.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn abs_and_apply() {
        assert_eq!(theta_abs(&standard()), 2.0);
        assert_eq!(theta_abs(&ThetaMatrix::zero(3)), 0.0);
        assert_eq!(theta_abs(&standard().scaled(0.25)), 0.5);
        assert_eq!(apply_theta(&standard(), &[1.0, 0.0]).unwrap(), vec![0.0, -0.5]);
        assert_eq!(
            apply_theta(&ThetaMatrix::zero(2), &[3.0, 4.0]).unwrap(),
            vec![0.0, 0.0]
        );
        assert!(apply_theta(&standard(), &[1.0]).is_err());
    }

    #[test]
    fn operator_determinant_and_inverse() {
        let t = standard();
        assert!((t.operator_det_abs() - 0.25).abs() < 1e-15);
        let inv = t.operator_inverse().unwrap();
        // T = J/2, T^{-1} = -2J
        assert_eq!(inv, vec![0.0, -2.0, 2.0, 0.0]);
        assert!(matches!(
            ThetaMatrix::zero(2).operator_inverse(),
            Err(Error::ThetaSingular(_))
        ));
        let b = ThetaMatrix::block_symplectic(4, 1.0).unwrap();
        assert!((b.operator_det_abs() - 1.0 / 16.0).abs() < 1e-15);
        let deg = ThetaMatrix::from_flat(
            4,
            vec![
                0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        assert!(deg.operator_inverse().is_err());
    }

    #[test]
    fn monomial_structure() {
        let rows = standard().monomial_rows().unwrap();
        assert_eq!(rows, vec![Some((1, 0.5)), Some((0, -0.5))]);
        let full = ThetaMatrix::from_flat(
            3,
            vec![0.0, 1.0, 2.0, -1.0, 0.0, 3.0, -2.0, -3.0, 0.0],
        )
        .unwrap();
        assert!(full.monomial_rows().is_none());
    }
}
