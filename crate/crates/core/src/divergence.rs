//! The functional u(f) = ∫ f(0, x₂) dx₂ evaluated on Moyal series terms.
//!
//! For θ = (0 1; −1 0) and f = c_f f₁⊗f₂, g = c_g g₁⊗g₂ the term value factorizes:
//! u(h_n) = iⁿ c_f c_g / ((2π)³ n! 2ⁿ) · [Σ_k C(n,k) m_k(f̂₁) m_{n−k}(ĝ₁)] · ∫ f̂₂(q) ĝ₂(−q) qⁿ dq,
//! with m_k(φ) = ∫ φ(q) q^k dq. For f = g = e^{−γ|x|²} this is
//! iⁿ √(π/(2γ)) γⁿ [(n−1)!!]² / n! for even n and 0 for odd n.

use crate::atlas::AnalyticFunction;
use crate::error::{Error, Result};
use crate::grid::{SampledField, Space};
use crate::logmag::{binomial, ln_double_factorial, ln_factorial, LogComplex, SignedLog};
use crate::quad::gauss_legendre16;
use crate::theta::ThetaMatrix;
use crate::witness::{prop2_dominator, GHat};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const RADIUS_TOL: f64 = 1e-17;
const TAIL_REL: f64 = 1e-20;
/// Relative slack when comparing a term with a lower bound it can meet with equality (n = 2).
pub const LOWER_BOUND_RTOL: f64 = 1e-9;

/// Δx Σ_j field(0, x₂_j) on a 2-D position grid (x₁ = 0 is node n/2).
pub fn u_functional(field: &SampledField) -> Result<Complex64> {
    if field.spec.d() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: field.spec.d(),
        });
    }
    if field.space != Space::Position {
        return Err(Error::SpaceMismatch {
            expected: "position",
            got: field.space.name(),
        });
    }
    let s = field.spec;
    let o = s.origin_index();
    let sum: Complex64 = (0..s.n()).map(|j| field.value_at(&[o, j])).sum();
    Ok(sum * s.dx())
}

fn require_standard(theta: &ThetaMatrix) -> Result<()> {
    if theta.symplectic2_scale() != Some(1.0) {
        return Err(Error::UnsupportedTheta(
            "u(h_n) is defined for the standard symplectic 2x2 theta".into(),
        ));
    }
    Ok(())
}

/// Radius beyond which |q|^k |φ(q)| is negligible relative to its peak.
fn moment_radius(phi: &impl Fn(f64) -> Result<Complex64>, r0: f64, kmax: usize) -> Result<f64> {
    let weighted = |q: f64| -> Result<f64> { Ok(phi(q)?.norm() * q.abs().powi(kmax as i32)) };
    let mut r = r0.max(1.0);
    for _ in 0..60 {
        let peak = (1..=256)
            .map(|j| {
                let q = r * j as f64 / 256.0;
                Ok(weighted(q)?.max(weighted(-q)?))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let edge = weighted(r)?.max(weighted(-r)?);
        if edge <= TAIL_REL * peak || peak == 0.0 {
            return Ok(r);
        }
        r *= 1.25;
    }
    Err(Error::DomainError("moment integrand does not decay".into()))
}

/// m_0..=m_kmax of φ on [−r, r] by composite 16-point Gauss-Legendre.
fn moment_table(
    phi: impl Fn(f64) -> Result<Complex64>,
    r0: f64,
    kmax: usize,
) -> Result<Vec<Complex64>> {
    let r = moment_radius(&phi, r0, kmax)?;
    let panels = ((8.0 * r).ceil() as usize).max(64).next_multiple_of(2);
    let h = 2.0 * r / panels as f64;
    let mut m = vec![Complex64::new(0.0, 0.0); kmax + 1];
    // Symmetric node pairs keep odd moments of even integrands at rounding level.
    for p in 0..panels / 2 {
        let a = -r + p as f64 * h;
        for &(x, w) in gauss_legendre16() {
            let q = a + 0.5 * h * (x + 1.0);
            let (lo, hi) = (phi(q)?, phi(-q)?);
            let (even, odd) = (lo + hi, lo - hi);
            let mut qk = 0.5 * h * w;
            for (k, mk) in m.iter_mut().enumerate() {
                *mk += qk * if k % 2 == 0 { even } else { odd };
                qk *= q;
            }
        }
    }
    Ok(m)
}

/// Moment tables for u(h_n), n ≤ n_max, of a factorizable pair.
pub struct UTables {
    coef: Complex64,
    mf1: Vec<Complex64>,
    mg1: Vec<Complex64>,
    m2: Vec<Complex64>,
}

fn two_factors(f: &AnalyticFunction) -> Result<(Complex64, AnalyticFunction, AnalyticFunction)> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.dim(),
        });
    }
    let (c, fs) = f
        .factors()
        .ok_or_else(|| Error::Unsupported("u(h_n) needs tensor-product inputs".into()))?;
    let [a, b]: [AnalyticFunction; 2] = fs
        .try_into()
        .map_err(|_| Error::Unsupported("expected two factors".into()))?;
    Ok((c, a, b))
}

impl UTables {
    pub fn new(
        f: &AnalyticFunction,
        g: &AnalyticFunction,
        theta: &ThetaMatrix,
        n_max: usize,
    ) -> Result<Self> {
        require_standard(theta)?;
        let (cf, f1, f2) = two_factors(f)?;
        let (cg, g1, g2) = two_factors(g)?;
        for h in [&f1, &f2, &g1, &g2] {
            if !h.has_fourier() {
                return Err(Error::TransformUnavailable("u(h_n) needs factor transforms".into()));
            }
        }
        let r = |h: &AnalyticFunction| -> Result<f64> { Ok(h.fourier_radius(RADIUS_TOL)?[0]) };
        let mf1 = moment_table(|q| f1.eval_fourier(&[q]), r(&f1)?, n_max)?;
        let mg1 = moment_table(|q| g1.eval_fourier(&[q]), r(&g1)?, n_max)?;
        let m2 = moment_table(
            |q| Ok(f2.eval_fourier(&[q])? * g2.eval_fourier(&[-q])?),
            r(&f2)?.min(r(&g2)?),
            n_max,
        )?;
        Ok(UTables {
            coef: cf * cg,
            mf1,
            mg1,
            m2,
        })
    }

    pub fn n_max(&self) -> usize {
        self.m2.len() - 1
    }

    pub fn term(&self, n: usize) -> Result<LogComplex> {
        if n > self.n_max() {
            return Err(Error::InvalidParameter(format!(
                "n = {n} beyond the table size {}",
                self.n_max()
            )));
        }
        let s1: Complex64 = (0..=n)
            .map(|k| binomial(n, k) * self.mf1[k] * self.mg1[n - k])
            .sum();
        let z = s1 * self.m2[n];
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::DomainError(format!("moment product overflows at n = {n}")));
        }
        let ln_scale = -3.0 * (2.0 * PI).ln() - ln_factorial(n) - n as f64 * 2f64.ln();
        Ok(LogComplex::from_complex(z)
            .mul(LogComplex::from_complex(self.coef))
            .scale_ln(ln_scale)
            .times_i_pow(n))
    }
}

/// u(h_n) for analytic tensor-product inputs by factorized 1-D quadratures.
pub fn u_term(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    n: usize,
) -> Result<LogComplex> {
    UTables::new(f, g, theta, n)?.term(n)
}

/// u(h_n) = (1/2π) ∫ ĥ_n(p₁, 0) dp₁ from momentum samples, with
/// ĥ_n(p) = iⁿ/((2π)² n!) Σ_q Δq² f̂(q) ĝ(p − q) ⟨p,θq⟩ⁿ and off-grid p − q dropped.
pub fn u_term_sampled(fh: &SampledField, gh: &SampledField, theta: &ThetaMatrix, n: usize) -> Result<Complex64> {
    require_standard(theta)?;
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
        if s.spec.d() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: s.spec.d(),
            });
        }
    }
    let spec = fh.spec;
    let nn = spec.n() as isize;
    let o = spec.origin_index() as isize;
    let dp = spec.dp();
    let mut total = Complex64::new(0.0, 0.0);
    for k1 in 0..nn {
        let p = [spec.p(k1 as usize), 0.0];
        let mut s = Complex64::new(0.0, 0.0);
        for j1 in 0..nn {
            let r1 = k1 - j1 + o;
            if r1 < 0 || r1 >= nn {
                continue;
            }
            for j2 in 0..nn {
                let r2 = o - j2 + o;
                if r2 < 0 || r2 >= nn {
                    continue;
                }
                let q = [spec.p(j1 as usize), spec.p(j2 as usize)];
                let ph = theta.pair_unchecked(&p, &q);
                s += fh.value_at(&[j1 as usize, j2 as usize])
                    * gh.value_at(&[r1 as usize, r2 as usize])
                    * ph.powi(n as i32);
            }
        }
        total += s * dp * dp;
    }
    let pre = Complex64::new(0.0, 1.0).powu(n as u32)
        / ((2.0 * PI).powi(3) * ln_factorial(n).exp());
    Ok(total * dp * pre)
}

/// |u(h_n)| as printed for Gaussian inputs: √(π/(2γ)) (γⁿ/n!) [(2n−1)!!]², zero for odd n.
pub fn prop1_closed_form(gamma: f64, n: usize) -> SignedLog {
    if n % 2 == 1 {
        return SignedLog::ZERO;
    }
    SignedLog::new(
        1,
        0.5 * (PI / (2.0 * gamma)).ln() + n as f64 * gamma.ln() - ln_factorial(n)
            + 2.0 * ln_double_factorial(2 * n as i64 - 1),
    )
}

/// |u(h_n)| for Gaussian inputs from the Gaussian moments: √(π/(2γ)) (γⁿ/n!) [(n−1)!!]².
pub fn prop1_exact(gamma: f64, n: usize) -> SignedLog {
    if n % 2 == 1 {
        return SignedLog::ZERO;
    }
    SignedLog::new(
        1,
        0.5 * (PI / (2.0 * gamma)).ln() + n as f64 * gamma.ln() - ln_factorial(n)
            + 2.0 * ln_double_factorial(n as i64 - 1),
    )
}

/// ln[√(π/(2γ)) γⁿ / n] for n ≥ 1.
pub fn prop1_lower_bound(gamma: f64, n: usize) -> Option<f64> {
    (n >= 1).then(|| 0.5 * (PI / (2.0 * gamma)).ln() + n as f64 * gamma.ln() - (n as f64).ln())
}

/// a_{n+2}/a_n of the printed closed form: γ²(2n+1)²(2n+3)²/((n+1)(n+2)).
pub fn closed_form_ratio(gamma: f64, n: usize) -> f64 {
    let n = n as f64;
    gamma * gamma * (2.0 * n + 1.0).powi(2) * (2.0 * n + 3.0).powi(2) / ((n + 1.0) * (n + 2.0))
}

/// a_{n+2}/a_n of the exact Gaussian values: γ²(n+1)/(n+2).
pub fn exact_ratio(gamma: f64, n: usize) -> f64 {
    let n = n as f64;
    gamma * gamma * (n + 1.0) / (n + 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub n: usize,
    /// u(h_n)/iⁿ, which is real for the Gaussian pair.
    pub u_quadrature: SignedLog,
    pub u_closed_form: SignedLog,
    pub u_exact: SignedLog,
    /// ln of √(π/(2γ)) γⁿ/n, absent at n = 0.
    pub lower_bound: Option<f64>,
}

impl DivergenceRow {
    fn relative(a: SignedLog, b: SignedLog) -> Option<f64> {
        (!b.is_zero()).then(|| (a.to_f64() - b.to_f64()).abs() / b.to_f64().abs())
    }

    /// |u_quadrature − u_closed_form| / |u_closed_form| for even n.
    pub fn rel_err(&self) -> Option<f64> {
        Self::relative(self.u_quadrature, self.u_closed_form)
    }

    pub fn rel_err_exact(&self) -> Option<f64> {
        Self::relative(self.u_quadrature, self.u_exact)
    }

    pub fn meets_lower_bound(&self) -> bool {
        match self.lower_bound {
            Some(lb) if self.n % 2 == 0 => {
                self.u_quadrature.sign > 0
                    && self.u_quadrature.ln_mag >= lb + (1.0 - LOWER_BOUND_RTOL).ln()
            }
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DivergenceVerdict {
    Diverges,
    HypothesisNotMet,
    Inconclusive,
}

impl DivergenceVerdict {
    pub fn name(self) -> &'static str {
        match self {
            DivergenceVerdict::Diverges => "Diverges",
            DivergenceVerdict::HypothesisNotMet => "HypothesisNotMet",
            DivergenceVerdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceReport {
    pub gamma: f64,
    pub rows: Vec<DivergenceRow>,
    pub verdict: DivergenceVerdict,
}

fn fmt_log10(v: SignedLog) -> String {
    if v.is_zero() {
        "-inf".into()
    } else {
        format!("{:.12e}", v.log10_mag())
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.6e}"))
}

impl DivergenceReport {
    /// Columns n, u_sign, u_log10, closed_sign, closed_log10, lower_log10, rel_err, followed by
    /// exact_sign, exact_log10, rel_err_exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,u_sign,u_log10,closed_sign,closed_log10,lower_log10,rel_err,exact_sign,exact_log10,rel_err_exact\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.u_quadrature.sign,
                fmt_log10(r.u_quadrature),
                r.u_closed_form.sign,
                fmt_log10(r.u_closed_form),
                fmt_opt(r.lower_bound.map(|v| v / std::f64::consts::LN_10)),
                fmt_opt(r.rel_err()),
                r.u_exact.sign,
                fmt_log10(r.u_exact),
                fmt_opt(r.rel_err_exact()),
            ));
        }
        out
    }

    pub fn even_rows(&self) -> impl Iterator<Item = &DivergenceRow> {
        self.rows.iter().filter(|r| r.n % 2 == 0)
    }
}

/// Gaussian pair f = g = e^{−γ|x|²} under the standard θ.
pub fn divergence_report(gamma: f64, n_max: usize) -> Result<DivergenceReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let f = AnalyticFunction::gaussian_centered(gamma, 2)?;
    let theta = ThetaMatrix::symplectic2(1.0);
    let tables = UTables::new(&f, &f, &theta, n_max)?;
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        // Undo the iⁿ so the row carries a real number.
        let u = tables.term(n)?.times_i_pow((4 - n % 4) % 4);
        rows.push(DivergenceRow {
            n,
            u_quadrature: u.re,
            u_closed_form: prop1_closed_form(gamma, n),
            u_exact: prop1_exact(gamma, n),
            lower_bound: prop1_lower_bound(gamma, n),
        });
    }
    let verdict = if gamma <= 1.0 {
        DivergenceVerdict::HypothesisNotMet
    } else {
        let even: Vec<&DivergenceRow> = rows.iter().filter(|r| r.n % 2 == 0).collect();
        let tail = &even[even.len() / 2..];
        let increasing = tail.len() >= 2
            && tail
                .windows(2)
                .all(|w| w[1].u_quadrature.to_f64().abs() > w[0].u_quadrature.to_f64().abs());
        if increasing && rows.iter().all(DivergenceRow::meets_lower_bound) {
            DivergenceVerdict::Diverges
        } else {
            DivergenceVerdict::Inconclusive
        }
    };
    Ok(DivergenceReport {
        gamma,
        rows,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop2Row {
    pub n: usize,
    /// ln|u(h_n)| with f̂ the tensor square of the dominator.
    pub u_dominator_ln: f64,
    /// ln of the same expression with the Gaussian e^{−q²/(4γ)} in place of the dominator.
    pub u_gaussian_ln: f64,
}

impl Prop2Row {
    pub fn passes(&self) -> bool {
        self.u_dominator_ln >= self.u_gaussian_ln
    }
}

/// ln of ∫ e^{−q²/(4γ)·a} q^k dq for even k.
fn gaussian_moment_ln(gamma: f64, a: f64, k: usize) -> f64 {
    let s2 = 2.0 * gamma / a;
    0.5 * (2.0 * PI * s2).ln() + 0.5 * k as f64 * s2.ln() + ln_double_factorial(k as i64 - 1)
}

/// Even-n comparison of u(h_n) for the dominator tensor square against the Gaussian it dominates.
pub fn prop2_check(beta: f64, gamma: f64, n_max: usize) -> Result<Vec<Prop2Row>> {
    let dom = prop2_dominator(beta, gamma)?;
    let g = GHat::new(beta);
    let (c, lambda) = (dom.c, dom.lambda);
    let d = move |q: f64| Ok(Complex64::new(c * g.eval(q / lambda), 0.0));
    let r0 = lambda * crate::witness::default_domain(beta, 0).min(8.0);
    let m1 = moment_table(d, r0, n_max)?;
    let m2 = moment_table(move |q| Ok(Complex64::new((c * g.eval(q / lambda)).powi(2), 0.0)), r0, n_max)?;
    let mut rows = Vec::new();
    for n in (0..=n_max).step_by(2) {
        let ln_scale = -3.0 * (2.0 * PI).ln() - ln_factorial(n) - n as f64 * 2f64.ln();
        let s1: f64 = (0..=n).map(|k| binomial(n, k) * m1[k].re * m1[n - k].re).sum();
        let u_dom = s1.ln() + m2[n].re.ln() + ln_scale;
        let gs: Vec<f64> = (0..=n)
            .step_by(2)
            .map(|k| binomial(n, k).ln() + gaussian_moment_ln(gamma, 1.0, k) + gaussian_moment_ln(gamma, 1.0, n - k))
            .collect();
        let u_gauss =
            crate::logmag::log_sum_exp(&gs) + gaussian_moment_ln(gamma, 2.0, n) + ln_scale;
        rows.push(Prop2Row {
            n,
            u_dominator_ln: u_dom,
            u_gaussian_ln: u_gauss,
        });
    }
    Ok(rows)
}
