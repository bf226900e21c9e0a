//! Derivatives of the twist phase e_θ(s) = e^{−i⟨q,θp⟩}, Cauchy-type bounds, sampled
//! multiplier certificates and the θ → 0 continuity experiment.
//!
//! s = (p, q) ∈ R^{2d} with |s| = |p| + |q|; the phase is φ(s) = −i q·Tp with T = θ/2.

mod poly;

pub use poly::{LinearForms, PhasePoly};

use crate::atlas::AnalyticFunction;
use crate::error::{Error, Result};
use crate::grid::{field_norm, sample, NormKind, Space};
use crate::logmag::{ln_factorial, ln_kappa_pow, multi_indices_of_order};
use crate::star::{twisted_product, StarConfig};
use crate::theta::ThetaMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

pub const ORDER_CAP: usize = 8;
/// Radius of the sampled region |s| ≤ S_MAX.
pub const S_MAX: f64 = 50.0;
const ENVELOPE_INTERVALS: usize = 5000;
const MARGIN_TOL_LN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl PhasePoint {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                got: q.len(),
            });
        }
        Ok(PhasePoint { p, q })
    }

    pub fn d(&self) -> usize {
        self.p.len()
    }

    /// |s| = |p| + |q|.
    pub fn norm(&self) -> f64 {
        let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        n(&self.p) + n(&self.q)
    }

    /// (p₁, …, p_d, q₁, …, q_d).
    pub fn coords(&self) -> Vec<f64> {
        self.p.iter().chain(&self.q).copied().collect()
    }
}

/// e_θ(s) = exp(−i q·Tp).
pub fn phase(theta: &ThetaMatrix, s: &PhasePoint) -> Complex64 {
    Complex64::from_polar(1.0, -theta.pair_unchecked(&s.q, &s.p))
}

/// ∂φ/∂p_ν = −i Σ_μ T_{μν} q_μ and ∂φ/∂q_μ = −i Σ_ν T_{μν} p_ν.
fn gradient(theta: &ThetaMatrix) -> LinearForms {
    let d = theta.d();
    let t = theta.operator();
    let mi = Complex64::new(0.0, -1.0);
    let mut g = vec![Vec::new(); 2 * d];
    for mu in 0..d {
        for nu in 0..d {
            let v = t[mu * d + nu];
            if v != 0.0 {
                g[nu].push((d + mu, mi * v));
                g[d + mu].push((nu, mi * v));
            }
        }
    }
    g
}

/// Prefactor polynomials P_κ for a fixed θ, built incrementally and cached.
pub struct PhaseDerivatives {
    grad: LinearForms,
    vars: usize,
    cache: HashMap<Vec<usize>, PhasePoly>,
}

impl PhaseDerivatives {
    pub fn new(theta: &ThetaMatrix) -> Self {
        PhaseDerivatives {
            grad: gradient(theta),
            vars: 2 * theta.d(),
            cache: HashMap::new(),
        }
    }

    pub fn poly(&mut self, kappa: &[usize]) -> Result<&PhasePoly> {
        if kappa.len() != self.vars {
            return Err(Error::DimensionMismatch {
                expected: self.vars,
                got: kappa.len(),
            });
        }
        let order: usize = kappa.iter().sum();
        if order > ORDER_CAP {
            return Err(Error::OrderCap {
                order,
                cap: ORDER_CAP,
            });
        }
        if !self.cache.contains_key(kappa) {
            let p = match kappa.iter().position(|&k| k > 0) {
                None => PhasePoly::one(self.vars),
                Some(j) => {
                    let mut lower = kappa.to_vec();
                    lower[j] -= 1;
                    self.poly(&lower)?;
                    self.cache[&lower].differentiate(j, &self.grad)
                }
            };
            self.cache.insert(kappa.to_vec(), p);
        }
        Ok(&self.cache[kappa])
    }
}

/// ∂^κ e_θ(s) with κ over (p, q), exact up to the final floating-point evaluation.
pub fn phase_derivative_exact(theta: &ThetaMatrix, kappa: &[usize], s: &PhasePoint) -> Result<Complex64> {
    if s.d() != theta.d() {
        return Err(Error::DimensionMismatch {
            expected: theta.d(),
            got: s.d(),
        });
    }
    let mut pd = PhaseDerivatives::new(theta);
    Ok(pd.poly(kappa)?.eval(&s.coords()) * phase(theta, s))
}

fn ln_multi_factorial(kappa: &[usize]) -> f64 {
    kappa.iter().map(|&k| ln_factorial(k)).sum()
}

/// ln[κ! r^{−|κ|} exp{r θ_abs (|s| + 2r)}].
pub fn cauchy_bound(theta: &ThetaMatrix, kappa: &[usize], s: &PhasePoint, r: f64) -> f64 {
    let k: usize = kappa.iter().sum();
    ln_multi_factorial(kappa) - k as f64 * r.ln() + r * theta.abs_sum() * (s.norm() + 2.0 * r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RBranch {
    /// β > 1: r = |εs|^{1/β}/(θ_abs |s|).
    Decaying,
    /// 1/2 ≤ β < 1: r = |κ|^{1−β}.
    PowerOneMinusBeta,
    /// 0 < β < 1/2: r = |κ|^β.
    PowerBeta,
    /// β ∈ {0, 1} or θ = 0: any fixed radius works.
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RChoice {
    pub r: f64,
    pub branch: RBranch,
}

pub const CONSTANT_R: f64 = 1.0;

pub fn optimal_r(theta: &ThetaMatrix, kappa: &[usize], s: &PhasePoint, beta: f64, eps: f64) -> Result<RChoice> {
    if !(eps > 0.0) || !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::DomainError(format!(
            "need eps > 0 and beta >= 0, got eps = {eps}, beta = {beta}"
        )));
    }
    let k = (kappa.iter().sum::<usize>() as f64).max(1.0);
    let choice = |r, branch| Ok(RChoice { r, branch });
    if beta == 0.0 || beta == 1.0 || theta.is_zero() {
        return choice(CONSTANT_R, RBranch::Constant);
    }
    if beta > 1.0 {
        let n = s.norm();
        if n == 0.0 {
            return Err(Error::DomainError("the decaying radius needs s != 0".into()));
        }
        return choice((eps * n).powf(1.0 / beta) / (theta.abs_sum() * n), RBranch::Decaying);
    }
    if beta >= 0.5 {
        choice(k.powf(1.0 - beta), RBranch::PowerOneMinusBeta)
    } else {
        choice(k.powf(beta), RBranch::PowerBeta)
    }
}

/// Points with |s| uniform in [0, S_MAX] and |p|/|s| uniform in [0, 1].
pub fn sample_points(d: usize, count: usize, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = |rng: &mut ChaCha8Rng| loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect::<Vec<f64>>();
        }
    };
    (0..count)
        .map(|_| {
            let rho = rng.random_range(0.0..=S_MAX);
            let u: f64 = rng.random_range(0.0..=1.0);
            let p = dir(&mut rng).into_iter().map(|x| x * u * rho).collect();
            let q = dir(&mut rng).into_iter().map(|x| x * (1.0 - u) * rho).collect();
            PhasePoint { p, q }
        })
        .collect()
}

fn all_kappas(vars: usize, kappa_max: usize) -> Vec<Vec<usize>> {
    (0..=kappa_max).flat_map(|k| multi_indices_of_order(vars, k)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstPoint {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub kappa: Vec<usize>,
    /// ln(bound) − ln|∂^κ e_θ(s)|; negative means a violation.
    pub margin_ln: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub kappa_max: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(rename = "C_eps")]
    pub c_eps: f64,
    #[serde(rename = "A_eps")]
    pub a_eps: f64,
    pub s_max: f64,
    pub theta: Vec<Vec<f64>>,
    pub worst_point: WorstPoint,
}

impl Certificate {
    /// ln of C_ε A_ε^{|κ|} κ^{ακ} e^{|εs|^{1/β}}.
    pub fn ln_bound(&self, kappa: &[usize], s_norm: f64) -> f64 {
        let k: usize = kappa.iter().sum();
        self.c_eps.ln()
            + k as f64 * self.a_eps.ln()
            + ln_kappa_pow(kappa, self.alpha)
            + growth(self.epsilon, self.beta, s_norm)
    }
}

/// |εs|^{1/β}; β = 0 is the limit where the growth factor is unbounded off the origin.
fn growth(eps: f64, beta: f64, rho: f64) -> f64 {
    if beta == 0.0 {
        if eps * rho < 1.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (eps * rho).powf(1.0 / beta)
    }
}

/// sup over ρ ∈ [0, S_MAX] of ln Q(ρ) − |ερ|^{1/β}, bracketed on a uniform partition:
/// Q increases and the growth term increases in ρ, so each cell is bounded by its endpoints.
fn envelope_sup(poly: &PhasePoly, eps: f64, beta: f64) -> f64 {
    let h = S_MAX / ENVELOPE_INTERVALS as f64;
    (0..ENVELOPE_INTERVALS)
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let q = poly.envelope(b);
            if q == 0.0 {
                f64::NEG_INFINITY
            } else {
                q.ln() - growth(eps, beta, a)
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub checked: usize,
    pub violations: usize,
    pub worst: WorstPoint,
}

pub fn verify_certificate(cert: &Certificate, theta: &ThetaMatrix, samples: usize, seed: u64) -> Result<Verification> {
    let pts = sample_points(theta.d(), samples, seed);
    let mut pd = PhaseDerivatives::new(theta);
    let kappas = all_kappas(2 * theta.d(), cert.kappa_max);
    let mut worst: Option<WorstPoint> = None;
    let (mut checked, mut violations) = (0, 0);
    for s in &pts {
        let c = s.coords();
        let e = phase(theta, s);
        let n = s.norm();
        for kappa in &kappas {
            let v = (pd.poly(kappa)?.eval(&c) * e).norm();
            let margin = cert.ln_bound(kappa, n) - if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
            checked += 1;
            if margin < -MARGIN_TOL_LN {
                violations += 1;
            }
            if worst.as_ref().is_none_or(|w| margin < w.margin_ln) {
                worst = Some(WorstPoint {
                    p: s.p.clone(),
                    q: s.q.clone(),
                    kappa: kappa.clone(),
                    margin_ln: margin,
                });
            }
        }
    }
    Ok(Verification {
        checked,
        violations,
        worst: worst.ok_or_else(|| Error::InvalidParameter("no samples".into()))?,
    })
}

/// Constants (C_ε, A_ε) for |∂^κ e_θ(s)| ≤ C_ε A_ε^{|κ|} κ^{ακ} e^{|εs|^{1/β}} on |s| ≤ S_MAX,
/// |κ| ≤ κ_max. C_ε covers κ = 0 and A_ε the worst per-order growth relative to it; both come
/// from the radial envelope Σ|c| ρ^{deg} of each prefactor, and the seeded sample confirms them.
pub fn multiplier_certificate(
    theta: &ThetaMatrix,
    alpha: f64,
    beta: f64,
    eps: f64,
    kappa_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Certificate> {
    if alpha < beta {
        return Err(Error::DomainError(format!(
            "certificates need alpha >= beta, got alpha = {alpha}, beta = {beta}"
        )));
    }
    if !(eps > 0.0) || beta < 0.0 || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::DomainError(format!("need eps > 0, beta >= 0 (eps = {eps}, beta = {beta})")));
    }
    if kappa_max > ORDER_CAP {
        return Err(Error::OrderCap {
            order: kappa_max,
            cap: ORDER_CAP,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let vars = 2 * theta.d();
    let mut pd = PhaseDerivatives::new(theta);
    let mut per_order = vec![f64::NEG_INFINITY; kappa_max + 1];
    for kappa in all_kappas(vars, kappa_max) {
        let k: usize = kappa.iter().sum();
        let e = envelope_sup(pd.poly(&kappa)?, eps, beta) - ln_kappa_pow(&kappa, alpha);
        per_order[k] = per_order[k].max(e);
    }
    let ln_c = per_order[0];
    let ln_a = (1..=kappa_max)
        .filter(|&k| per_order[k] > f64::NEG_INFINITY)
        .map(|k| (per_order[k] - ln_c) / k as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_a = if ln_a == f64::NEG_INFINITY { 0.0 } else { ln_a };
    if !ln_c.is_finite() || !ln_a.is_finite() {
        return Err(Error::CertificateNotFound(format!(
            "no finite constants (ln C = {ln_c}, ln A = {ln_a})"
        )));
    }
    let mut cert = Certificate {
        alpha,
        beta,
        epsilon: eps,
        kappa_max,
        samples,
        seed,
        c_eps: ln_c.exp(),
        a_eps: ln_a.exp(),
        s_max: S_MAX,
        theta: theta.entries(),
        worst_point: WorstPoint {
            p: vec![],
            q: vec![],
            kappa: vec![],
            margin_ln: f64::INFINITY,
        },
    };
    let v = verify_certificate(&cert, theta, samples, seed)?;
    if v.violations > 0 {
        return Err(Error::CertificateNotFound(format!(
            "{} of {} sampled (s, κ) pairs exceed the constants",
            v.violations, v.checked
        )));
    }
    cert.worst_point = v.worst;
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyCheck {
    pub tested: usize,
    pub violations: usize,
    pub worst_margin_ln: f64,
}

/// r_i = 10^{−3 + 4i/(count−1)}: `count` log-spaced radii in [1e−3, 1e1].
pub fn default_r_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(-3.0 + 4.0 * i as f64 / (count.max(2) - 1) as f64))
        .collect()
}

/// |∂^κ e_θ(s)| ≤ exp(cauchy_bound) for every sampled s, |κ| ≤ κ_max and r in `radii`.
pub fn cauchy_domination(
    theta: &ThetaMatrix,
    kappa_max: usize,
    samples: usize,
    seed: u64,
    radii: &[f64],
) -> Result<CauchyCheck> {
    let mut pd = PhaseDerivatives::new(theta);
    let kappas = all_kappas(2 * theta.d(), kappa_max);
    let (mut tested, mut violations, mut worst) = (0, 0, f64::INFINITY);
    for s in sample_points(theta.d(), samples, seed) {
        let c = s.coords();
        for kappa in &kappas {
            let v = pd.poly(kappa)?.eval(&c).norm();
            let lv = if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
            for &r in radii {
                let m = cauchy_bound(theta, kappa, &s, r) - lv;
                tested += 1;
                if m < -MARGIN_TOL_LN {
                    violations += 1;
                }
                worst = worst.min(m);
            }
        }
    }
    Ok(CauchyCheck {
        tested,
        violations,
        worst_margin_ln: worst,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub theta_abs: f64,
    pub eps_sup: f64,
    pub eps_l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityTable {
    pub rows: Vec<ContinuityRow>,
    /// Least-squares slope of ln ε_sup against ln θ_abs over rows with θ_abs > 0.
    pub slope: Option<f64>,
    /// ε_sup is non-decreasing in θ_abs across the rows.
    pub monotone: bool,
}

impl ContinuityTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_abs,eps_sup,eps_l2\n");
        for r in &self.rows {
            out.push_str(&format!("{:.6e},{:.12e},{:.12e}\n", r.theta_abs, r.eps_sup, r.eps_l2));
        }
        out
    }
}

pub fn loglog_slope(xy: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xy
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// ε(θ) = twisted_product(f, g, θ) − f·g on the configured grid, for each θ (θ_abs ≤ 1).
pub fn continuity_experiment(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    thetas: &[ThetaMatrix],
    cfg: &StarConfig,
) -> Result<ContinuityTable> {
    let fg = sample(f, cfg.spec, Space::Position)?.mul(&sample(g, cfg.spec, Space::Position)?)?;
    let mut rows = Vec::with_capacity(thetas.len());
    for th in thetas {
        let a = th.abs_sum();
        if a > 1.0 {
            return Err(Error::InvalidParameter(format!("theta_abs = {a} exceeds 1")));
        }
        let h = twisted_product(f.into(), g.into(), th, cfg)?;
        let diff = h.sub(&fg)?;
        rows.push(ContinuityRow {
            theta_abs: a,
            eps_sup: field_norm(&diff, NormKind::Sup),
            eps_l2: field_norm(&diff, NormKind::L2),
        });
    }
    let xy: Vec<(f64, f64)> = rows.iter().map(|r| (r.theta_abs, r.eps_sup)).collect();
    let mut sorted = xy.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ContinuityTable {
        slope: loglog_slope(&xy),
        monotone: sorted.windows(2).all(|w| w[1].1 >= w[0].1),
        rows,
    })
}
