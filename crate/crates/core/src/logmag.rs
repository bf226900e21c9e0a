//! Signed log-magnitude numbers and log-domain combinatorics.
//!
//! Factorials, double factorials and series terms overflow doubles long before the
//! experiments stop, so every such quantity is carried as `(sign, ln|value|)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    /// -1, 0 or +1. Zero means an exact zero and `ln_mag` is `-inf`.
    pub sign: i8,
    pub ln_mag: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_mag: f64::NEG_INFINITY,
    };

    pub fn new(sign: i8, ln_mag: f64) -> Self {
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                ln_mag,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_mag: x.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.ln_mag.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn log10_mag(self) -> f64 {
        self.ln_mag / std::f64::consts::LN_10
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        SignedLog::new(self.sign * other.sign, self.ln_mag + other.ln_mag)
    }

    pub fn neg(self) -> SignedLog {
        SignedLog::new(-self.sign, self.ln_mag)
    }

    pub fn add(self, other: SignedLog) -> SignedLog {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_mag >= other.ln_mag {
            (self, other)
        } else {
            (other, self)
        };
        let r = (small.ln_mag - big.ln_mag).exp();
        let factor = if big.sign == small.sign { 1.0 + r } else { 1.0 - r };
        if factor <= 0.0 {
            return SignedLog::ZERO;
        }
        SignedLog::new(big.sign, big.ln_mag + factor.ln())
    }

    pub fn sum<I: IntoIterator<Item = SignedLog>>(items: I) -> SignedLog {
        // Pairwise summation in log space loses precision on cancellation; sum
        // relative to the largest magnitude instead.
        let v: Vec<SignedLog> = items.into_iter().filter(|x| !x.is_zero()).collect();
        let Some(m) = v.iter().map(|x| x.ln_mag).fold(None, |a: Option<f64>, b| {
            Some(a.map_or(b, |a| a.max(b)))
        }) else {
            return SignedLog::ZERO;
        };
        let s: f64 = v.iter().map(|x| x.sign as f64 * (x.ln_mag - m).exp()).sum();
        let mut out = SignedLog::from_f64(s);
        if !out.is_zero() {
            out.ln_mag += m;
        }
        out
    }
}

/// Complex number whose real and imaginary parts are kept as signed logs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub re: SignedLog,
    pub im: SignedLog,
}

impl LogComplex {
    pub fn from_complex(z: Complex64) -> Self {
        LogComplex {
            re: SignedLog::from_f64(z.re),
            im: SignedLog::from_f64(z.im),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// ln|z|, `-inf` for an exact zero.
    pub fn ln_abs(self) -> f64 {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => f64::NEG_INFINITY,
            (false, true) => self.re.ln_mag,
            (true, false) => self.im.ln_mag,
            (false, false) => {
                let m = self.re.ln_mag.max(self.im.ln_mag);
                let a = (self.re.ln_mag - m).exp();
                let b = (self.im.ln_mag - m).exp();
                m + 0.5 * (a * a + b * b).ln()
            }
        }
    }

    pub fn mul(self, other: LogComplex) -> Self {
        LogComplex {
            re: self.re.mul(other.re).add(self.im.mul(other.im).neg()),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    /// Multiply by e^{ln_factor}.
    pub fn scale_ln(self, ln_factor: f64) -> Self {
        let s = |x: SignedLog| SignedLog::new(x.sign, x.ln_mag + ln_factor);
        LogComplex {
            re: s(self.re),
            im: s(self.im),
        }
    }

    /// Multiply by i^k.
    pub fn times_i_pow(self, k: usize) -> Self {
        match k % 4 {
            0 => self,
            1 => LogComplex {
                re: self.im.neg(),
                im: self.re,
            },
            2 => LogComplex {
                re: self.re.neg(),
                im: self.im.neg(),
            },
            _ => LogComplex {
                re: self.im,
                im: self.re.neg(),
            },
        }
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// ln(n!!) with the conventions 0!! = (-1)!! = 1.
pub fn ln_double_factorial(n: i64) -> f64 {
    let mut s = 0.0;
    let mut k = n;
    while k > 1 {
        s += (k as f64).ln();
        k -= 2;
    }
    s
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0f64;
    for j in 0..k {
        b = b * (n - j) as f64 / (j + 1) as f64;
    }
    b.round()
}

/// ln of Σ exp(a_i), ignoring `-inf` entries.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// κ^{βκ} in log form with 0^0 = 1 per component.
pub fn ln_kappa_pow(kappa: &[usize], beta: f64) -> f64 {
    kappa
        .iter()
        .filter(|&&k| k > 0)
        .map(|&k| beta * k as f64 * (k as f64).ln())
        .sum()
}

/// All multi-indices λ ≤ κ componentwise, in lexicographic order.
pub fn multi_indices_le(kappa: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &k in kappa {
        let mut next = Vec::with_capacity(out.len() * (k + 1));
        for v in &out {
            for j in 0..=k {
                let mut w = v.clone();
                w.push(j);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// All d-dimensional multi-indices with |κ| = k.
pub fn multi_indices_of_order(d: usize, k: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in multi_indices_of_order(d - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
