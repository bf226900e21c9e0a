//! Moyal series terms h_n = (i/2)ⁿ/n! θ^{μ₁ν₁}⋯θ^{μₙνₙ} ∂_{μ₁…μₙ}f ∂_{ν₁…νₙ}g.
//!
//! For θ = t·(0 1; −1 0):
//! (∂₁⊗∂₂ − ∂₂⊗∂₁)ⁿ = Σ_k C(n,k)(−1)^{n−k} ∂₁^k∂₂^{n−k} ⊗ ∂₁^{n−k}∂₂^k.
//! Other θ go through the general contraction (polynomial powers of Σ θ^{μν} X_μ Y_ν).

use crate::atlas::{AnalyticFunction, DEFAULT_K_CAP};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField, Space};
use crate::logmag::{binomial, ln_factorial};
use crate::theta::ThetaMatrix;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};

/// c · ∂^a f · ∂^b g, with c excluding the (i/2)ⁿ/n! prefactor.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    pub coef: f64,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

fn contraction(theta: &ThetaMatrix, n: usize) -> Vec<ExpansionTerm> {
    let d = theta.d();
    let mut poly: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    poly.insert((vec![0; d], vec![0; d]), 1.0);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for ((a, b), c) in &poly {
            for mu in 0..d {
                for nu in 0..d {
                    let t = theta.entry(mu, nu);
                    if t == 0.0 {
                        continue;
                    }
                    let (mut a2, mut b2) = (a.clone(), b.clone());
                    a2[mu] += 1;
                    b2[nu] += 1;
                    *next.entry((a2, b2)).or_insert(0.0) += c * t;
                }
            }
        }
        poly = next;
    }
    poly.into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|((a, b), coef)| ExpansionTerm { coef, a, b })
        .collect()
}

fn binomial_d2(t: f64, n: usize) -> Vec<ExpansionTerm> {
    if t == 0.0 && n > 0 {
        return Vec::new();
    }
    let tn = t.powi(n as i32);
    (0..=n)
        .map(|k| ExpansionTerm {
            coef: binomial(n, k) * if (n - k) % 2 == 0 { tn } else { -tn },
            a: vec![k, n - k],
            b: vec![n - k, k],
        })
        .collect()
}

/// Terms of (θ^{μν} ∂_μ⊗∂_ν)ⁿ; the binomial form for d = 2.
pub fn moyal_expansion(theta: &ThetaMatrix, n: usize) -> Vec<ExpansionTerm> {
    match theta.symplectic2_scale() {
        Some(t) => binomial_d2(t, n),
        None => contraction(theta, n),
    }
}

/// (i/2)ⁿ/n!
fn prefactor(n: usize) -> Complex64 {
    let mag = (-(n as f64) * 2f64.ln() - ln_factorial(n)).exp();
    Complex64::new(0.0, 1.0).powu(n as u32) * mag
}

/// Derivative grids ∂^a f on a position grid, from 1-D jets for tensor-product inputs
/// and pointwise evaluation otherwise.
pub struct DerivGrid<'a> {
    f: &'a AnalyticFunction,
    spec: GridSpec,
    cap: usize,
    jets: Option<(Complex64, Vec<Vec<Vec<Complex64>>>)>,
    cache: HashMap<Vec<usize>, Vec<Complex64>>,
}

impl<'a> DerivGrid<'a> {
    /// Prepares derivatives up to total order `kmax` (rejects orders past the derivative cap).
    pub fn new(f: &'a AnalyticFunction, spec: GridSpec, kmax: usize) -> Result<Self> {
        Self::with_cap(f, spec, kmax, DEFAULT_K_CAP)
    }

    pub fn with_cap(f: &'a AnalyticFunction, spec: GridSpec, kmax: usize, cap: usize) -> Result<Self> {
        if f.dim() != spec.d() {
            return Err(Error::DimensionMismatch {
                expected: spec.d(),
                got: f.dim(),
            });
        }
        if kmax > cap {
            return Err(Error::DerivativeUnavailable { order: kmax, cap });
        }
        let jets = match f.factors() {
            Some((c, fs)) => {
                let xs: Vec<f64> = (0..spec.n()).map(|j| spec.x(j)).collect();
                let per_axis = fs
                    .iter()
                    .map(|g| xs.iter().map(|&x| g.jet_1d(x, kmax)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Some((c, per_axis))
            }
            None => None,
        };
        Ok(DerivGrid {
            f,
            spec,
            cap: kmax,
            jets,
            cache: HashMap::new(),
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn grid(&mut self, a: &[usize]) -> Result<&[Complex64]> {
        let order: usize = a.iter().sum();
        if order > self.cap {
            return Err(Error::DerivativeUnavailable {
                order,
                cap: self.cap,
            });
        }
        if !self.cache.contains_key(a) {
            let v = match &self.jets {
                Some((c, per_axis)) => {
                    let axes: Vec<Vec<Complex64>> = per_axis
                        .iter()
                        .zip(a)
                        .map(|(col, &k)| col.iter().map(|j| j[k]).collect())
                        .collect();
                    super::outer(&axes).into_iter().map(|v| c * v).collect()
                }
                None => {
                    let spec = self.spec;
                    (0..spec.len())
                        .map(|i| self.f.deriv_raw(a, &spec.point(Space::Position, i)))
                        .collect()
                }
            };
            self.cache.insert(a.to_vec(), v);
        }
        Ok(&self.cache[a])
    }
}

fn check(f: &AnalyticFunction, g: &AnalyticFunction, theta: &ThetaMatrix, spec: GridSpec) -> Result<()> {
    for d in [f.dim(), g.dim(), spec.d()] {
        if d != theta.d() {
            return Err(Error::DimensionMismatch {
                expected: theta.d(),
                got: d,
            });
        }
    }
    Ok(())
}

fn assemble(
    fd: &mut DerivGrid,
    gd: &mut DerivGrid,
    theta: &ThetaMatrix,
    n: usize,
    kappa: &[usize],
) -> Result<SampledField> {
    let spec = fd.spec();
    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    let pre = prefactor(n);
    let lams = crate::logmag::multi_indices_le(kappa);
    for term in moyal_expansion(theta, n) {
        for lam in &lams {
            let c: f64 = kappa.iter().zip(lam).map(|(&k, &l)| binomial(k, l)).product();
            let a: Vec<usize> = term.a.iter().zip(lam).map(|(x, l)| x + l).collect();
            let b: Vec<usize> = term.b.iter().zip(kappa).zip(lam).map(|((x, k), l)| x + k - l).collect();
            let w = pre * term.coef * c;
            let fa = fd.grid(&a)?.to_vec();
            let gb = gd.grid(&b)?;
            for ((o, x), y) in out.iter_mut().zip(&fa).zip(gb) {
                *o += w * x * y;
            }
        }
    }
    SampledField::new(spec, Space::Position, out)
}

pub fn moyal_term(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    n: usize,
    spec: GridSpec,
) -> Result<SampledField> {
    moyal_term_derivative(f, g, theta, n, &vec![0; theta.d()], spec)
}

/// ∂^κ h_n by Leibniz: ∂^κ(∂^a f ∂^b g) = Σ_{λ≤κ} C(κ,λ) ∂^{a+λ}f ∂^{b+κ−λ}g.
pub fn moyal_term_derivative(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    n: usize,
    kappa: &[usize],
    spec: GridSpec,
) -> Result<SampledField> {
    check(f, g, theta, spec)?;
    let k: usize = kappa.iter().sum();
    let mut fd = DerivGrid::new(f, spec, n + k)?;
    let mut gd = DerivGrid::new(g, spec, n + k)?;
    assemble(&mut fd, &mut gd, theta, n, kappa)
}

/// h_0 … h_{n_max}, sharing derivative tables.
pub fn moyal_terms(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    n_max: usize,
    spec: GridSpec,
) -> Result<Vec<SampledField>> {
    check(f, g, theta, spec)?;
    let mut fd = DerivGrid::new(f, spec, n_max)?;
    let mut gd = DerivGrid::new(g, spec, n_max)?;
    let zero = vec![0; theta.d()];
    (0..=n_max)
        .map(|n| assemble(&mut fd, &mut gd, theta, n, &zero))
        .collect()
}

/// ∂^κ h_n for every n ≤ n_max and every κ in `kappas`, indexed `[n][κ]`.
pub fn moyal_term_derivatives(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    n_max: usize,
    kappas: &[Vec<usize>],
    spec: GridSpec,
) -> Result<Vec<Vec<SampledField>>> {
    check(f, g, theta, spec)?;
    let k = kappas.iter().map(|k| k.iter().sum::<usize>()).max().unwrap_or(0);
    let mut fd = DerivGrid::new(f, spec, n_max + k)?;
    let mut gd = DerivGrid::new(g, spec, n_max + k)?;
    (0..=n_max)
        .map(|n| {
            kappas
                .iter()
                .map(|kappa| assemble(&mut fd, &mut gd, theta, n, kappa))
                .collect()
        })
        .collect()
}

pub fn moyal_partial_sum(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    theta: &ThetaMatrix,
    n: usize,
    spec: GridSpec,
) -> Result<SampledField> {
    let terms = moyal_terms(f, g, theta, n, spec)?;
    let mut acc = SampledField::zeros(spec, Space::Position);
    for t in terms {
        for (a, v) in acc.data.iter_mut().zip(t.data) {
            *a += v;
        }
    }
    Ok(acc)
}
