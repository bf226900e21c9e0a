//! Polynomial prefactors of derivatives of e^{φ(s)} with φ bilinear.
//!
//! ∂^κ e^{φ} = P_κ(s) e^{φ}, and ∂_j(P e^{φ}) = (∂_j P + P ∂_jφ) e^{φ}. Since ∂_jφ is linear,
//! P_κ is a polynomial of degree ≤ |κ| kept as exponent → coefficient.

use num_complex::Complex64;
use std::collections::BTreeMap;

/// ∂_jφ = Σ_l c_l s_l for each variable j.
pub type LinearForms = Vec<Vec<(usize, Complex64)>>;

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl PhasePoly {
    pub fn one(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; vars], Complex64::new(1.0, 0.0));
        PhasePoly { vars, terms }
    }

    pub fn differentiate(&self, j: usize, grad: &LinearForms) -> Self {
        let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (e, &c) in &self.terms {
            if e[j] > 0 {
                let mut e2 = e.clone();
                e2[j] -= 1;
                *out.entry(e2).or_default() += c * e[j] as f64;
            }
            for &(l, a) in &grad[j] {
                let mut e2 = e.clone();
                e2[l] += 1;
                *out.entry(e2).or_default() += c * a;
            }
        }
        out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        PhasePoly {
            vars: self.vars,
            terms: out,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, s: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, &c)| c * e.iter().zip(s).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Σ|c| ρ^{deg}: bounds |P(s)| whenever every |s_j| ≤ ρ.
    pub fn envelope(&self, rho: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.norm() * rho.powi(e.iter().sum::<u32>() as i32))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_phase_kills_derivatives() {
        assert!(PhasePoly::one(1).differentiate(0, &vec![vec![]]).is_zero());
    }

    #[test]
    fn quadratic_exponent() {
        // φ = a s²/2: ∂e^{φ} = a s e^{φ}, ∂²e^{φ} = (a + a² s²) e^{φ}.
        let a = Complex64::new(0.0, -0.5);
        let grad: LinearForms = vec![vec![(0, a)]];
        let p1 = PhasePoly::one(1).differentiate(0, &grad);
        assert_eq!(p1.eval(&[2.0]), a * 2.0);
        let p2 = p1.differentiate(0, &grad);
        assert_eq!(p2.eval(&[2.0]), a + a * a * 4.0);
        assert_eq!(p2.envelope(2.0), 0.5 + 0.25 * 4.0);
    }
}
