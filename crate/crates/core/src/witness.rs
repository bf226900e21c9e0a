//! Witness functions for the derivative-growth and domination lemma.
//!
//! ω(σ) = c·exp(−1/(1−σ²)) on (−1, 1), normalized to ∫ω = e, and
//! ĝ(s) = ∫ e^{−|s−σ|^{1/β}} ω(σ) dσ. For β ≥ 1 subadditivity gives ĝ(s) ≥ e^{−|s|^{1/β}}.

use crate::error::{Error, Result};
use crate::logmag::{ln_factorial, log_sum_exp};
use crate::quad::{gl_composite, gl_graded_left, gl_graded_right};
use serde::Serialize;
use std::f64::consts::{E, PI};
use std::sync::OnceLock;

fn raw_bump(s: f64) -> f64 {
    let u = 1.0 - s * s;
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

fn raw_bump_integral() -> f64 {
    static I: OnceLock<f64> = OnceLock::new();
    *I.get_or_init(|| gl_composite(-1.0, 1.0, 256, raw_bump))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Omega {
    scale: f64,
}

/// ω is the same profile for every β; β only enters through ĝ.
pub fn build_omega(beta: f64) -> Result<Omega> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(Omega::new())
}

impl Default for Omega {
    fn default() -> Self {
        Self::new()
    }
}

impl Omega {
    pub fn new() -> Self {
        Omega {
            scale: E / raw_bump_integral(),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.scale * raw_bump(s)
    }

    pub fn sample(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&s| self.eval(s)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GHat {
    beta: f64,
    omega: Omega,
}

pub fn build_g_hat(beta: f64, omega: Omega) -> Result<GHat> {
    build_omega(beta)?;
    Ok(GHat { beta, omega })
}

impl GHat {
    pub fn new(beta: f64) -> Self {
        GHat {
            beta,
            omega: Omega::new(),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        let k = 1.0 / self.beta;
        let f = |sig: f64| (-(s - sig).abs().powf(k)).exp() * self.omega.eval(sig);
        if s >= 1.0 {
            return gl_composite(-1.0, 1.0, 64, f);
        }
        let near = 0.125;
        let mut v = 0.0;
        let lo = (s - near).max(-1.0);
        v += gl_graded_right(lo, s, 40, f);
        v += gl_composite(-1.0, lo, 32, f);
        let hi = (s + near).min(1.0);
        v += gl_graded_left(s, hi, 40, f);
        v += gl_composite(hi, 1.0, 32, f);
        v
    }

    pub fn sample(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&s| self.eval(s)).collect()
    }

    /// Exponent factor k of the upper envelope C′e^{−k|s|^{1/β}}.
    pub fn envelope_factor(&self) -> f64 {
        if self.beta >= 1.0 {
            1.0
        } else {
            2f64.powf(-1.0 / self.beta)
        }
    }
}

/// The moment peak s_n = (βn)^β.
pub fn moment_peak(beta: f64, n: usize) -> f64 {
    (beta * n as f64).powf(beta)
}

pub fn default_domain(beta: f64, n_max: usize) -> f64 {
    50f64.max(4.0 * moment_peak(beta, n_max))
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentRow {
    pub n: usize,
    /// ln M_n with M_n = (1/2π)∫ sⁿ ĝ(s) ds; −∞ for odd n.
    pub moment_log: f64,
    /// ln[(βn)^{βn} e^{−βn−1}].
    pub required_log: f64,
    /// ln of (1/2π)∫ sⁿ e^{−|s|^{1/β}} ds over the same domain.
    pub envelope_log: f64,
    /// ln[n^{βn}], the clean growth after dilation.
    pub target_log: f64,
}

impl MomentRow {
    pub fn odd(&self) -> bool {
        self.n % 2 == 1
    }

    pub fn passes(&self) -> bool {
        if self.odd() {
            self.moment_log == f64::NEG_INFINITY
        } else {
            self.moment_log >= self.required_log && self.moment_log >= self.envelope_log
        }
    }
}

/// ln of (1/2π)∫_{−S}^{S} sⁿ F(s) ds for even n (F even), given ln F.
fn ln_even_moment(n: usize, s_max: f64, ln_f: &dyn Fn(f64) -> f64) -> f64 {
    let panels = ((s_max / 0.5).ceil() as usize).max(64);
    let h = s_max / panels as f64;
    let rule = crate::quad::gauss_legendre16();
    let mut terms = Vec::with_capacity(panels * rule.len());
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for &(x, w) in rule {
            let s = mid + 0.5 * h * x;
            let lf = ln_f(s);
            if lf.is_finite() {
                terms.push((0.5 * h * w).ln() + n as f64 * s.ln() + lf);
            }
        }
    }
    if terms.is_empty() {
        return f64::NEG_INFINITY;
    }
    // Symmetric pairing: ∫_{−S}^{S} = 2∫_0^S.
    log_sum_exp(&terms) + 2f64.ln() - (2.0 * PI).ln()
}

pub fn moment_lower_bound_check(
    g: &GHat,
    n_list: &[usize],
    s_max: Option<f64>,
) -> Result<Vec<MomentRow>> {
    let beta = g.beta;
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let s_max = s_max.unwrap_or_else(|| default_domain(beta, n_max));
    for &n in n_list {
        let needed = 2.0 * moment_peak(beta, n);
        if s_max < needed {
            return Err(Error::DomainTooSmall { s_max, needed });
        }
    }
    let k = 1.0 / beta;
    let ln_g = |s: f64| g.eval(s).ln();
    let ln_env = |s: f64| -s.powf(k);
    Ok(n_list
        .iter()
        .map(|&n| {
            let bn = beta * n as f64;
            let required_log = if n == 0 { -1.0 } else { bn * bn.ln() - bn - 1.0 };
            let target_log = if n == 0 { 0.0 } else { bn * (n as f64).ln() };
            if n % 2 == 1 {
                return MomentRow {
                    n,
                    moment_log: f64::NEG_INFINITY,
                    required_log,
                    envelope_log: f64::NEG_INFINITY,
                    target_log,
                };
            }
            MomentRow {
                n,
                moment_log: ln_even_moment(n, s_max, &ln_g),
                required_log,
                envelope_log: ln_even_moment(n, s_max, &ln_env),
                target_log,
            }
        })
        .collect())
}

/// ln of the exact full-line envelope moment (1/2π)∫|s|ⁿ e^{−|s|^{1/β}} ds = 2βΓ(β(n+1))/(2π).
pub fn envelope_moment_exact_log(beta: f64, n: usize) -> f64 {
    let a = beta * (n as f64 + 1.0);
    (2.0 * beta).ln() + ln_gamma(a) - (2.0 * PI).ln()
}

/// ln Γ(a) for a > 0 (Lanczos, g = 7).
pub fn ln_gamma(a: f64) -> f64 {
    if a.fract() == 0.0 && a >= 1.0 && a < 171.0 {
        return ln_factorial(a as usize - 1);
    }
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if a < 0.5 {
        return (PI / (PI * a).sin()).ln() - ln_gamma(1.0 - a);
    }
    let x = a - 1.0;
    let mut s = C[0];
    for (i, c) in C.iter().enumerate().skip(1) {
        s += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

/// Dilation λ with λⁿ M_n ≥ n^{βn} for every even row, so that g(λt) meets the clean bound.
pub fn scaling_factor(rows: &[MomentRow]) -> f64 {
    rows.iter()
        .filter(|r| !r.odd() && r.n > 0)
        .map(|r| ((r.target_log - r.moment_log) / r.n as f64).exp())
        .fold(1.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub beta: f64,
    pub domination_s_max: f64,
    pub domination_nodes: usize,
    /// min over nodes of ln[ĝ(s) e^{|s|^{1/β}}]; (A2) holds on the grid iff ≥ 0.
    pub domination_min_log: f64,
    pub domination_worst_s: f64,
    /// max over nodes of ĝ(s) e^{k|s|^{1/β}}, k = `envelope_factor`.
    pub envelope_c_prime: f64,
    pub envelope_factor: f64,
    pub moment_s_max: f64,
    pub rows: Vec<MomentRow>,
    pub scaling_lambda: f64,
}

impl WitnessReport {
    pub fn domination_passes(&self) -> bool {
        self.domination_min_log >= 0.0
    }

    pub fn moments_pass(&self) -> bool {
        self.rows.iter().all(MomentRow::passes)
    }
}

pub fn witness_report(
    beta: f64,
    domination_s_max: f64,
    domination_nodes: usize,
    n_list: &[usize],
    moment_s_max: Option<f64>,
) -> Result<WitnessReport> {
    let g = build_g_hat(beta, build_omega(beta)?)?;
    if domination_nodes < 2 || !(domination_s_max > 0.0) {
        return Err(Error::InvalidParameter("domination grid needs >= 2 nodes and s_max > 0".into()));
    }
    let k = 1.0 / beta;
    let ef = g.envelope_factor();
    let (mut worst, mut worst_s, mut cmax) = (f64::INFINITY, 0.0, 0.0f64);
    for j in 0..domination_nodes {
        let s = -domination_s_max + 2.0 * domination_s_max * j as f64 / (domination_nodes - 1) as f64;
        let v = g.eval(s);
        let a = s.abs().powf(k);
        let l = v.ln() + a;
        if l < worst {
            worst = l;
            worst_s = s;
        }
        cmax = cmax.max((v.ln() + ef * a).exp());
    }
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let s_max = moment_s_max.unwrap_or_else(|| default_domain(beta, n_max));
    let rows = moment_lower_bound_check(&g, n_list, Some(s_max))?;
    Ok(WitnessReport {
        beta,
        domination_s_max,
        domination_nodes,
        domination_min_log: worst,
        domination_worst_s: worst_s,
        envelope_c_prime: cmax,
        envelope_factor: ef,
        moment_s_max: s_max,
        scaling_lambda: scaling_factor(&rows),
        rows,
    })
}

/// c·ĝ(s/λ), an even positive function dominating e^{−s²/(4γ)}.
#[derive(Clone, Debug, Serialize)]
pub struct Prop2Dominator {
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub c: f64,
    #[serde(skip)]
    g: Option<GHat>,
}

const PROP2_VERIFY_S: f64 = 40.0;
const PROP2_VERIFY_NODES: usize = 10_000;

/// Builds the dominator with λ = 2√(2γ) (from (a+b)² ≤ 2a² + 2b²) and the smallest grid
/// constant c (plus a 0.1% margin), then checks domination on 10⁴ nodes of |s| ≤ 40.
pub fn prop2_dominator(beta: f64, gamma: f64) -> Result<Prop2Dominator> {
    if !(beta >= 0.5) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("prop2 dominator needs beta >= 1/2, got {beta}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let g = GHat::new(beta);
    let lambda = 2.0 * (2.0 * gamma).sqrt();
    let target = |s: f64| (-s * s / (4.0 * gamma)).exp();
    let fine = 4 * PROP2_VERIFY_NODES;
    let mut ratio = 0.0f64;
    for j in 0..=fine {
        let s = PROP2_VERIFY_S * j as f64 / fine as f64;
        ratio = ratio.max(target(s) / g.eval(s / lambda));
    }
    let dom = Prop2Dominator {
        beta,
        gamma,
        lambda,
        c: 1.001 * ratio,
        g: Some(g),
    };
    for j in 0..PROP2_VERIFY_NODES {
        let s = -PROP2_VERIFY_S + 2.0 * PROP2_VERIFY_S * j as f64 / (PROP2_VERIFY_NODES - 1) as f64;
        let (v, t) = (dom.eval(s), target(s));
        if !(v >= t) {
            return Err(Error::DominationFailed { s, value: v, target: t });
        }
    }
    Ok(dom)
}

impl Prop2Dominator {
    pub fn eval(&self, s: f64) -> f64 {
        let g = self.g.unwrap_or_else(|| GHat::new(self.beta));
        self.c * g.eval(s / self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_normalization_and_symmetry() {
        let w = Omega::new();
        let i = gl_composite(-1.0, 1.0, 512, |s| w.eval(s));
        assert!((i - E).abs() < 1e-10);
        for s in [0.1, 0.5, 0.93, 1.2] {
            assert_eq!(w.eval(s), w.eval(-s));
            assert!(w.eval(s) >= 0.0);
        }
        assert_eq!(w.eval(1.0), 0.0);
    }

    #[test]
    fn g_hat_even_and_dominating_at_origin() {
        let g = GHat::new(2.0);
        assert!(g.eval(0.0) >= 1.0);
        for s in [0.3, 0.999, 1.0, 7.5, 300.0] {
            assert_eq!(g.eval(s), g.eval(-s));
            assert!(g.eval(s).ln() + s.sqrt() >= 0.0, "s={s}");
        }
    }

    #[test]
    fn g_hat_cusp_quadrature_is_resolved() {
        // Independent oracle: σ = s ± t² removes the √ kink, then a plain composite rule.
        let g = GHat::new(2.0);
        let w = Omega::new();
        for s in [0.0f64, 0.4, -0.77] {
            let f = |t: f64, sig: f64| (-t).exp() * w.eval(sig) * 2.0 * t;
            let oracle = gl_composite(0.0, (1.0 + s).sqrt(), 400, |t| f(t, s - t * t))
                + gl_composite(0.0, (1.0 - s).sqrt(), 400, |t| f(t, s + t * t));
            assert!((g.eval(s) - oracle).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn envelope_moment_n2() {
        // ∫ s² e^{−√|s|} ds = 2·2·5! = 480
        assert!((envelope_moment_exact_log(2.0, 2) - (480.0 / (2.0 * PI)).ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(4.5) - (11.631_728_396_567_45f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn moment_rows_beta2() {
        let g = GHat::new(2.0);
        let rows = moment_lower_bound_check(&g, &[1, 2, 4, 6], None).unwrap();
        assert!(rows.iter().all(|r| r.passes()));
        let r2 = &rows[1];
        assert!((r2.required_log.exp() - 1.725).abs() < 1e-3);
        assert!(r2.envelope_log.exp() > 76.0);
        assert_eq!(rows[0].moment_log, f64::NEG_INFINITY);
        assert!(matches!(
            moment_lower_bound_check(&g, &[6], Some(100.0)),
            Err(Error::DomainTooSmall { .. })
        ));
        let lam = scaling_factor(&rows);
        for r in rows.iter().filter(|r| !r.odd()) {
            assert!(r.n as f64 * lam.ln() + r.moment_log >= r.target_log - 1e-12);
        }
    }

    #[test]
    fn prop2_dominator_beta_half() {
        let d = prop2_dominator(0.5, 4.0).unwrap();
        assert!(d.eval(0.0) >= 1.0);
        assert!(d.c <= E * 1.001);
        assert!(prop2_dominator(0.4, 4.0).is_err());
    }
}
