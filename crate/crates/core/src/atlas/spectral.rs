//! Position-space values of 1-D functions defined by an even, real Fourier transform.
//!
//! f(x) = (1/π) ∫_0^S F(p) cos(px) dp, and
//! ∂^k f(x) = (1/π) i^k ∫_0^S p^k F(p) cos(px) dp for even k,
//! ∂^k f(x) = (1/π) i^{k+1} ∫_0^S p^k F(p) sin(px) dp for odd k,
//! all evaluated by the trapezoid rule on p_j = j h. For F vanishing with all its
//! derivatives at S the rule converges faster than any power of h.

use num_complex::Complex64;

#[derive(Debug)]
pub struct CosineTable {
    h: f64,
    /// Trapezoid weight times F(p_j).
    weights: Vec<f64>,
}

impl CosineTable {
    pub fn new<F: Fn(f64) -> f64>(extent: f64, nodes: usize, transform: F) -> Self {
        let h = extent / nodes as f64;
        let weights = (0..=nodes)
            .map(|j| {
                let w = if j == 0 || j == nodes { 0.5 * h } else { h };
                w * transform(j as f64 * h)
            })
            .collect();
        CosineTable { h, weights }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x, 0)[0]
    }

    /// ∂^k f(x) for k = 0..=kmax.
    pub fn jet(&self, x: f64, kmax: usize) -> Vec<f64> {
        let mut c = vec![0.0; kmax + 1];
        let mut s = vec![0.0; kmax + 1];
        let step = Complex64::from_polar(1.0, self.h * x);
        let mut z = Complex64::new(1.0, 0.0);
        for (j, &w) in self.weights.iter().enumerate() {
            if j % 32 == 0 {
                z = Complex64::from_polar(1.0, j as f64 * self.h * x);
            }
            if w != 0.0 {
                let p = j as f64 * self.h;
                let mut pk = w;
                for k in 0..=kmax {
                    c[k] += pk * z.re;
                    s[k] += pk * z.im;
                    pk *= p;
                }
            }
            z *= step;
        }
        (0..=kmax)
            .map(|k| {
                let v = if k % 2 == 0 {
                    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * c[k]
                } else {
                    let sign = if ((k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * s[k]
                };
                v / std::f64::consts::PI
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform_recovers_gaussian_and_derivatives() {
        // F(p) = sqrt(pi) e^{-p^2/4} is the transform of e^{-x^2}.
        let t = CosineTable::new(14.0, 1400, |p| std::f64::consts::PI.sqrt() * (-p * p / 4.0).exp());
        let x = 0.8;
        let j = t.jet(x, 3);
        let g = (-x * x).exp();
        assert!((j[0] - g).abs() < 1e-13);
        assert!((j[1] + 2.0 * x * g).abs() < 1e-13);
        assert!((j[2] - (4.0 * x * x - 2.0) * g).abs() < 1e-12);
        assert!((j[3] - (-8.0 * x.powi(3) + 12.0 * x) * g).abs() < 1e-12);
    }
}
