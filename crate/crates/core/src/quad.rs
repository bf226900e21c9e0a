//! Small quadrature helpers: Gauss-Legendre panels and uniform trapezoid sums.

use num_complex::Complex64;
use std::sync::OnceLock;

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre16() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| gauss_legendre(16))
}

/// Nodes and weights of the n-point Gauss-Legendre rule (Newton on P_n).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite 16-point Gauss-Legendre on [a, b] with `panels` equal panels.
pub fn gl_composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let rule = gauss_legendre16();
    let mut s = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * s
}

/// Complex-valued [`gl_composite`].
pub fn gl_composite_c<F: FnMut(f64) -> Complex64>(a: f64, b: f64, panels: usize, mut f: F) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let h = (b - a) / panels as f64;
    let rule = gauss_legendre16();
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for &(x, w) in rule {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * s
}

/// Gauss-Legendre on [a, b] with panels graded geometrically toward the endpoint `a`,
/// for integrands with an algebraic kink at `a`.
pub fn gl_graded_left<F: FnMut(f64) -> f64>(a: f64, b: f64, levels: usize, mut f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut s = 0.0;
    let mut hi = b;
    let len = b - a;
    for l in 0..levels {
        let lo = if l + 1 == levels {
            a
        } else {
            a + len * 0.5f64.powi(l as i32 + 1)
        };
        s += gl_composite(lo, hi, 1, &mut f);
        hi = lo;
    }
    s
}

/// Same as [`gl_graded_left`] but graded toward `b`.
pub fn gl_graded_right<F: FnMut(f64) -> f64>(a: f64, b: f64, levels: usize, mut f: F) -> f64 {
    gl_graded_left(-b, -a, levels, |t| f(-t))
}
