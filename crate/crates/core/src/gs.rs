//! Gelfand-Shilov norm estimates, the Moyal term bound and series diagnostics.
//!
//! ‖f‖_{A,B} = sup_{x,κ} e^{|x/A|^{1/α}} |∂^κ f(x)| / (B^{|κ|} κ^{βκ}). On a grid with a
//! finite K_max the sup is taken over nodes and |κ| ≤ K_max only, so every estimate is a
//! lower bound of the true norm. All values are natural logs.

use crate::atlas::AnalyticFunction;
use crate::divergence::u_term;
use crate::error::{Error, Result};
use crate::grid::{spectral_derivative, GridSpec, SampledField, Space};
use crate::logmag::{ln_factorial, ln_kappa_pow, log_sum_exp, multi_indices_of_order, LogComplex};
use crate::star::{moyal_term_derivatives, Operand};
use crate::theta::ThetaMatrix;
use serde::{Deserialize, Serialize};

/// Allowed floating-point excess of a measured term norm over its bound, in log units.
pub const BOUND_SLACK_LN: f64 = 1e-9;
/// Terms more than this far (in ln) below the largest term count as numerical zeros.
const NOISE_FLOOR_LN: f64 = 27.6;
const RATIO_TOL_LN: f64 = 1e-2;
const LATTICE_STEPS: [i32; 5] = [-2, -1, 0, 1, 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSParams {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub k_max: usize,
}

/// α + β ≥ 1 with α, β > 0; α = 0 needs β > 1 and β = 0 needs α > 1.
pub fn is_nontrivial(alpha: f64, beta: f64) -> bool {
    if alpha == 0.0 {
        beta > 1.0
    } else if beta == 0.0 {
        alpha > 1.0
    } else {
        alpha + beta >= 1.0
    }
}

impl GSParams {
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64, k_max: usize) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha, beta must be finite and nonnegative, got {alpha}, {beta}"
            )));
        }
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("A, B must be positive, got {a}, {b}")));
        }
        if !is_nontrivial(alpha, beta) {
            return Err(Error::NontrivialSpace { alpha, beta });
        }
        Ok(GSParams { alpha, beta, a, b, k_max })
    }

    pub fn with_ab(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, a, b, self.k_max)
    }

    /// ln of the decay weight at radius r; α = 0 uses the indicator of r ≤ A.
    pub fn ln_weight(&self, r: f64) -> f64 {
        ln_weight(self.alpha, self.a, r)
    }
}

fn ln_weight(alpha: f64, a: f64, r: f64) -> f64 {
    if alpha == 0.0 {
        if r <= a {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (r / a).powf(1.0 / alpha)
    }
}

/// max_{|κ| = k} ln(|∂^κ f(x)| / κ^{βκ}) at every node, for k = 0..=k_max. This is the part
/// of the norm that does not depend on (A, B), so lattices over (A, B) reuse it.
#[derive(Clone, Debug)]
pub struct DerivProfile {
    radii: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl DerivProfile {
    fn build(
        spec: GridSpec,
        beta: f64,
        k_max: usize,
        mut field: impl FnMut(&[usize]) -> Result<Vec<num_complex::Complex64>>,
    ) -> Result<Self> {
        let radii = (0..spec.len())
            .map(|i| {
                spec.point(Space::Position, i)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let mut rows = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let mut row = vec![f64::NEG_INFINITY; spec.len()];
            for kappa in multi_indices_of_order(spec.d(), k) {
                let lk = ln_kappa_pow(&kappa, beta);
                for (r, v) in row.iter_mut().zip(field(&kappa)?) {
                    let m = v.norm();
                    if m > 0.0 {
                        *r = r.max(m.ln() - lk);
                    }
                }
            }
            rows.push(row);
        }
        Ok(DerivProfile { radii, rows })
    }

    pub fn analytic(f: &AnalyticFunction, spec: GridSpec, beta: f64, k_max: usize) -> Result<Self> {
        let mut dg = crate::star::DerivGrid::new(f, spec, k_max)?;
        Self::build(spec, beta, k_max, |kappa| Ok(dg.grid(kappa)?.to_vec()))
    }

    /// Spectral derivatives of a position-space field.
    pub fn sampled(field: &SampledField, beta: f64, k_max: usize) -> Result<Self> {
        if field.space != Space::Position {
            return Err(Error::SpaceMismatch {
                expected: "position",
                got: field.space.name(),
            });
        }
        Self::build(field.spec, beta, k_max, |kappa| {
            Ok(spectral_derivative(field, kappa)?.data)
        })
    }

    fn from_fields(spec: GridSpec, beta: f64, fields: &[(Vec<usize>, &SampledField)]) -> Self {
        let k_max = fields.iter().map(|(k, _)| k.iter().sum::<usize>()).max().unwrap_or(0);
        let mut rows = vec![vec![f64::NEG_INFINITY; spec.len()]; k_max + 1];
        for (kappa, f) in fields {
            let k: usize = kappa.iter().sum();
            let lk = ln_kappa_pow(kappa, beta);
            for (r, v) in rows[k].iter_mut().zip(&f.data) {
                let m = v.norm();
                if m > 0.0 {
                    *r = r.max(m.ln() - lk);
                }
            }
        }
        let radii = (0..spec.len())
            .map(|i| {
                spec.point(Space::Position, i)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        DerivProfile { radii, rows }
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// ln ‖f‖_{A,B} restricted to |κ| ≤ k_max; `-inf` for the zero function.
    pub fn norm_log(&self, alpha: f64, a: f64, b: f64, k_max: usize) -> f64 {
        let lb = b.ln();
        let mut best = f64::NEG_INFINITY;
        for (k, row) in self.rows.iter().enumerate().take(k_max + 1) {
            for (&v, &r) in row.iter().zip(&self.radii) {
                if v == f64::NEG_INFINITY {
                    continue;
                }
                best = best.max(v + ln_weight(alpha, a, r) - k as f64 * lb);
            }
        }
        best
    }
}

pub fn gs_norm_estimate(f: Operand, p: &GSParams, spec: GridSpec) -> Result<f64> {
    let profile = match f {
        Operand::Analytic(f) => DerivProfile::analytic(f, spec, p.beta, p.k_max)?,
        Operand::Sampled(s) => {
            if s.spec != spec {
                return Err(Error::GridMismatch(format!("{:?} vs {:?}", s.spec, spec)));
            }
            DerivProfile::sampled(s, p.beta, p.k_max)?
        }
    };
    Ok(profile.norm_log(p.alpha, p.a, p.b, p.k_max))
}

/// ln[C (B₁B₂e^{2β}θ_abs)ⁿ n^{2βn} / n!] with 0⁰ = 1, for C given as ln C.
pub fn term_norm_bound_ln(n: usize, beta: f64, b1: f64, b2: f64, theta_abs: f64, ln_c: f64) -> f64 {
    if n == 0 {
        return ln_c;
    }
    if theta_abs == 0.0 {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    ln_c + nf * (b1.ln() + b2.ln() + 2.0 * beta + theta_abs.ln()) + 2.0 * beta * nf * nf.ln()
        - ln_factorial(n)
}

pub fn term_norm_bound(n: usize, beta: f64, b1: f64, b2: f64, theta_abs: f64, c: f64) -> f64 {
    term_norm_bound_ln(n, beta, b1, b2, theta_abs, c.ln())
}

/// Ratio test on the closed-form bound: n^{2βn}/n! ~ (e n^{2β−1})ⁿ/√(2πn).
pub fn term_bound_summable(beta: f64, b1: f64, b2: f64, theta_abs: f64) -> bool {
    if theta_abs == 0.0 || beta < 0.5 {
        return true;
    }
    if beta > 0.5 {
        return false;
    }
    b1 * b2 * theta_abs * std::f64::consts::E.powi(2) < 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    RatioConverging,
    RatioDiverging,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::RatioConverging => "RatioConverging",
            Verdict::RatioDiverging => "RatioDiverging",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

/// Tail verdict from ln-magnitudes indexed by n. Terms below the noise floor count as zero;
/// among the rest, the least-squares slope of ln|a_n| over the last half decides.
pub fn ratio_verdict(ln_terms: &[f64]) -> Verdict {
    let top = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Verdict::RatioConverging;
    }
    let live: Vec<(f64, f64)> = ln_terms
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > top - NOISE_FLOOR_LN)
        .map(|(n, &v)| (n as f64, v))
        .collect();
    let last_live = live.last().map_or(0.0, |p| p.0);
    let n_last = (ln_terms.len() - 1) as f64;
    if live.len() < 3 {
        // Everything after the first few terms vanished.
        return if last_live < n_last {
            Verdict::RatioConverging
        } else {
            Verdict::Inconclusive
        };
    }
    let tail = &live[live.len() / 2..];
    let slope = if tail.len() >= 2 {
        let m = tail.len() as f64;
        let mx = tail.iter().map(|p| p.0).sum::<f64>() / m;
        let my = tail.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    if slope < -RATIO_TOL_LN || (last_live < n_last && slope <= 0.0) {
        Verdict::RatioConverging
    } else if slope > RATIO_TOL_LN {
        Verdict::RatioDiverging
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub n: usize,
    /// u(h_n) = ∫ h_n(0, x₂) dx₂, when the inputs and θ admit it.
    pub u_value: Option<LogComplex>,
    pub norm_estimate: f64,
    pub bound29: f64,
    /// ‖h_n‖ / ‖h_{n−1}‖ when both are nonzero.
    pub ratio: Option<f64>,
}

impl TermReport {
    pub fn within_bound(&self) -> bool {
        self.norm_estimate <= self.bound29 + BOUND_SLACK_LN
    }
}

/// Input membership constants picked from the (A, B) lattice, and the output (A, B) built from
/// them by A^{−1/α} = A₁^{−1/α} + A₂^{−1/α} and B = e^β(B₁ + B₂).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputConstants {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub ln_norm_f: f64,
    pub ln_norm_g: f64,
    pub a: f64,
    pub b: f64,
}

impl InputConstants {
    pub fn ln_c(&self) -> f64 {
        self.ln_norm_f + self.ln_norm_g
    }
}

pub fn merged_a(alpha: f64, a1: f64, a2: f64) -> f64 {
    if alpha == 0.0 {
        return a1.min(a2);
    }
    (a1.powf(-1.0 / alpha) + a2.powf(-1.0 / alpha)).powf(-alpha)
}

pub fn merged_b(beta: f64, b1: f64, b2: f64) -> f64 {
    beta.exp() * (b1 + b2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub alpha: f64,
    pub beta: f64,
    pub k_max: usize,
    pub n_max: usize,
    pub theta_abs: f64,
    pub constants: InputConstants,
    pub terms: Vec<TermReport>,
    pub verdict: Verdict,
    /// Verdict on |u(h_n)|, when the functional is available.
    pub u_verdict: Option<Verdict>,
    pub bound_summable: bool,
}

fn fmt_ln(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.12e}")
    }
}

impl ConvergenceReport {
    pub fn all_within_bound(&self) -> bool {
        self.terms.iter().all(TermReport::within_bound)
    }

    /// Columns n, u_re_log, u_sign, norm_log, bound29_log, ratio, verdict.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,u_re_log,u_sign,norm_log,bound29_log,ratio,verdict\n");
        for t in &self.terms {
            // u(h_n) is real up to the factor iⁿ; report the component that carries it.
            let (u_log, u_sign) = match t.u_value {
                Some(u) => {
                    let part = if t.n % 2 == 0 { u.re } else { u.im };
                    (fmt_ln(part.ln_mag), part.sign.to_string())
                }
                None => ("".into(), "".into()),
            };
            let ratio = t.ratio.map_or(String::new(), |r| format!("{r:.12e}"));
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t.n,
                u_log,
                u_sign,
                fmt_ln(t.norm_estimate),
                fmt_ln(t.bound29),
                ratio,
                self.verdict.name()
            ));
        }
        out
    }
}

/// Chooses (A₁,B₁,A₂,B₂) on a factor-2 lattice around (p.a, p.b) minimizing ln Σₙ bound29(n).
pub fn choose_constants(
    pf: &DerivProfile,
    pg: &DerivProfile,
    p: &GSParams,
    theta_abs: f64,
    n_max: usize,
) -> Result<InputConstants> {
    let k_in = pf.k_max().min(pg.k_max());
    let lattice: Vec<(f64, f64)> = LATTICE_STEPS
        .iter()
        .flat_map(|&i| LATTICE_STEPS.iter().map(move |&j| (p.a * 2f64.powi(i), p.b * 2f64.powi(j))))
        .collect();
    let nf: Vec<f64> = lattice.iter().map(|&(a, b)| pf.norm_log(p.alpha, a, b, k_in)).collect();
    let ng: Vec<f64> = lattice.iter().map(|&(a, b)| pg.norm_log(p.alpha, a, b, k_in)).collect();
    let mut best: Option<(f64, InputConstants)> = None;
    for (i, &(a1, b1)) in lattice.iter().enumerate() {
        for (j, &(a2, b2)) in lattice.iter().enumerate() {
            let ln_c = nf[i] + ng[j];
            if !ln_c.is_finite() {
                continue;
            }
            let terms: Vec<f64> = (0..=n_max)
                .map(|n| term_norm_bound_ln(n, p.beta, b1, b2, theta_abs, ln_c))
                .collect();
            let score = log_sum_exp(&terms);
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                best = Some((
                    score,
                    InputConstants {
                        a1,
                        b1,
                        a2,
                        b2,
                        ln_norm_f: nf[i],
                        ln_norm_g: ng[j],
                        a: merged_a(p.alpha, a1, a2),
                        b: merged_b(p.beta, b1, b2),
                    },
                ));
            }
        }
    }
    best.map(|(_, c)| c).ok_or_else(|| {
        Error::InvalidParameter("inputs have zero or infinite norm on every lattice point".into())
    })
}

pub fn convergence_report(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    p: &GSParams,
    spec: GridSpec,
    n_max: usize,
) -> Result<ConvergenceReport> {
    let theta_abs = theta.abs_sum();
    let k_in = n_max + p.k_max;
    let pf = DerivProfile::analytic(f, spec, p.beta, k_in)?;
    let pg = DerivProfile::analytic(g, spec, p.beta, k_in)?;
    let constants = choose_constants(&pf, &pg, p, theta_abs, n_max)?;
    let kappas: Vec<Vec<usize>> = (0..=p.k_max)
        .flat_map(|k| multi_indices_of_order(spec.d(), k))
        .collect();
    let derivs = moyal_term_derivatives(f, g, theta, n_max, &kappas, spec)?;
    let mut terms = Vec::with_capacity(n_max + 1);
    let mut prev = f64::NEG_INFINITY;
    for (n, row) in derivs.iter().enumerate() {
        let fields: Vec<(Vec<usize>, &SampledField)> =
            kappas.iter().cloned().zip(row.iter()).collect();
        let norm = DerivProfile::from_fields(spec, p.beta, &fields).norm_log(
            p.alpha,
            constants.a,
            constants.b,
            p.k_max,
        );
        let u_value = match u_term(f, g, theta, n) {
            Ok(u) => Some(u),
            Err(Error::UnsupportedTheta(_) | Error::TransformUnavailable(_)) => None,
            Err(Error::DimensionMismatch { .. } | Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        let ratio = (norm.is_finite() && prev.is_finite()).then(|| (norm - prev).exp());
        terms.push(TermReport {
            n,
            u_value,
            norm_estimate: norm,
            bound29: term_norm_bound_ln(
                n,
                p.beta,
                constants.b1,
                constants.b2,
                theta_abs,
                constants.ln_c(),
            ),
            ratio,
        });
        prev = norm;
    }
    let norms: Vec<f64> = terms.iter().map(|t| t.norm_estimate).collect();
    let verdict = ratio_verdict(&norms);
    let u_verdict = terms.iter().all(|t| t.u_value.is_some()).then(|| {
        let us: Vec<f64> = terms.iter().map(|t| t.u_value.unwrap().ln_abs()).collect();
        ratio_verdict(&us)
    });
    Ok(ConvergenceReport {
        alpha: p.alpha,
        beta: p.beta,
        k_max: p.k_max,
        n_max,
        theta_abs,
        constants,
        terms,
        verdict,
        u_verdict,
        bound_summable: term_bound_summable(p.beta, constants.b1, constants.b2, theta_abs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nontriviality_rules() {
        assert!(GSParams::new(0.5, 0.5, 1.0, 1.0, 4).is_ok());
        assert!(GSParams::new(2.0, 0.0, 1.0, 1.0, 4).is_ok());
        assert!(GSParams::new(0.0, 1.5, 1.0, 1.0, 4).is_ok());
        for (a, b) in [(0.3, 0.3), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)] {
            assert!(matches!(
                GSParams::new(a, b, 1.0, 1.0, 4),
                Err(Error::NontrivialSpace { .. })
            ));
        }
        assert!(GSParams::new(1.0, 1.0, 0.0, 1.0, 4).is_err());
    }

    #[test]
    fn zero_function_has_minus_infinite_norm() {
        let spec = GridSpec::new(1, 32, 4.0).unwrap();
        let z = SampledField::zeros(spec, Space::Position);
        let p = GSParams::new(0.5, 0.5, 2.0, 4.0, 4).unwrap();
        assert_eq!(gs_norm_estimate((&z).into(), &p, spec).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn bound_closed_form() {
        assert_eq!(term_norm_bound(0, 0.4, 3.0, 5.0, 2.0, 7.0), 7f64.ln());
        // β = 0: C (B₁B₂θ)ⁿ/n!
        let v = term_norm_bound(3, 0.0, 1.5, 2.0, 0.5, 2.0);
        assert!((v - (2.0f64 * 1.5f64.powi(3) / 6.0).ln()).abs() < 1e-14);
        // direct evaluation at β = 0.4, n = 5
        let v = term_norm_bound(5, 0.4, 1.0, 1.0, 2.0, 1.0);
        let direct = (0.8f64.exp() * 2.0).powi(5) * 5f64.powf(4.0) / 120.0;
        assert!((v - direct.ln()).abs() < 1e-12);
    }

    #[test]
    fn summability_regimes() {
        assert!(term_bound_summable(0.4, 10.0, 10.0, 2.0));
        assert!(!term_bound_summable(0.5, 1.0, 1.0, 1.0));
        assert!(term_bound_summable(0.5, 0.1, 0.1, 1.0));
        assert!(!term_bound_summable(0.7, 0.01, 0.01, 1.0));
        assert!(term_bound_summable(0.7, 1.0, 1.0, 0.0));
    }

    #[test]
    fn verdicts() {
        let down: Vec<f64> = (0..20).map(|n| -(n as f64)).collect();
        assert_eq!(ratio_verdict(&down), Verdict::RatioConverging);
        let up: Vec<f64> = (0..20).map(|n| n as f64 * 0.5).collect();
        assert_eq!(ratio_verdict(&up), Verdict::RatioDiverging);
        let mut zeros = vec![f64::NEG_INFINITY; 10];
        zeros[0] = 0.0;
        assert_eq!(ratio_verdict(&zeros), Verdict::RatioConverging);
        assert_eq!(ratio_verdict(&[0.0; 12]), Verdict::Inconclusive);
    }

    #[test]
    fn merge_rules() {
        let a = merged_a(2.0, 4.0, 9.0);
        assert!((a.powf(-0.5) - (0.5 + 1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(merged_b(0.0, 1.0, 2.0), 3.0);
    }
}
