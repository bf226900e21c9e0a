//! Gaussian and Hermite-Gaussian derivatives in signed-log form.
//!
//! ∂^k e^{−γy²} = (−√γ)^k H_k(√γ y) e^{−γy²}, with the physicists' recursion
//! H_{k+1}(u) = 2u H_k(u) − 2k H_{k−1}(u) run under a floating log scale.

use crate::logmag::{ln_factorial, SignedLog};

const RESCALE: f64 = 1e150;

/// H_0(u) … H_kmax(u) as signed logs.
pub fn hermite_values(u: f64, kmax: usize) -> Vec<SignedLog> {
    let mut out = Vec::with_capacity(kmax + 1);
    let ln_rescale = RESCALE.ln();
    let mut scale = 0.0;
    let (mut prev, mut cur) = (1.0f64, 2.0 * u);
    out.push(SignedLog::from_f64(1.0));
    if kmax == 0 {
        return out;
    }
    let push = |v: f64, scale: f64, out: &mut Vec<SignedLog>| {
        let mut s = SignedLog::from_f64(v);
        if !s.is_zero() {
            s.ln_mag += scale;
        }
        out.push(s);
    };
    push(cur, scale, &mut out);
    for k in 1..kmax {
        let next = 2.0 * u * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE || prev.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            scale += ln_rescale;
        }
        push(cur, scale, &mut out);
    }
    out
}

/// ∂^k e^{−γy²} at y for k = 0..=kmax.
pub fn gaussian_jet(gamma: f64, y: f64, kmax: usize) -> Vec<SignedLog> {
    let sg = gamma.sqrt();
    let u = sg * y;
    let base = -gamma * y * y;
    hermite_values(u, kmax)
        .into_iter()
        .enumerate()
        .map(|(k, h)| {
            let sign = if k % 2 == 1 { -h.sign } else { h.sign };
            SignedLog::new(sign, h.ln_mag + k as f64 * sg.ln() + base)
        })
        .collect()
}

/// ∂^k [H_m(√(2γ) y) e^{−γy²}] for k = 0..=kmax, via Leibniz with
/// d^j/dy^j H_m(a y) = a^j 2^j m!/(m−j)! H_{m−j}(a y).
pub fn hermite_gaussian_jet(gamma: f64, m: usize, y: f64, kmax: usize) -> Vec<SignedLog> {
    let a = (2.0 * gamma).sqrt();
    let h = hermite_values(a * y, m);
    let g = gaussian_jet(gamma, y, kmax);
    (0..=kmax)
        .map(|k| {
            let terms = (0..=k.min(m)).map(|j| {
                let ln_c = ln_factorial(k) - ln_factorial(j) - ln_factorial(k - j)
                    + j as f64 * (a.ln() + std::f64::consts::LN_2)
                    + ln_factorial(m)
                    - ln_factorial(m - j);
                SignedLog::new(1, ln_c).mul(h[m - j]).mul(g[k - j])
            });
            SignedLog::sum(terms)
        })
        .collect()
}
