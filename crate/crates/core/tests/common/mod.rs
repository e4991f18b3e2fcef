//! Reference values computed without the library's Bessel or quadrature code.
//!
//! Integrals over `(0, ∞)` are taken in `t = ln x`, where the integrands are
//! smooth and decay at least exponentially; the trapezoid rule then converges
//! geometrically in the step size.

#![allow(dead_code)]

pub mod limits;

/// `ln ∫ exp(g(t)) dt` over the real line.
///
/// `peak` should be near the maximum of `g` and `scale` near its width. Each
/// side is extended until `g` falls 60 below its peak value.
pub fn log_integral(g: impl Fn(f64) -> f64, peak: f64, scale: f64) -> f64 {
    let top = g(peak);
    let mut lo = peak;
    while g(lo) > top - 60.0 {
        lo -= scale;
    }
    let mut hi = peak;
    while g(hi) > top - 60.0 {
        hi += scale;
    }
    let h = scale / 64.0;
    let n = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * (g(lo + i as f64 * h) - top).exp();
    }
    top + (acc * h).ln()
}

/// `ln ∫_{-∞}^{b} exp(g(t)) dt` by composite Simpson on a fine grid.
pub fn log_integral_upto(g: impl Fn(f64) -> f64, peak: f64, scale: f64, b: f64) -> f64 {
    let top = g(peak.min(b));
    let mut lo = peak.min(b);
    while g(lo) > top - 60.0 {
        lo -= scale;
    }
    let h0 = scale / 400.0;
    let mut n = ((b - lo) / h0).ceil() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let n = n.max(2);
    let h = (b - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * (g(lo + i as f64 * h) - top).exp();
    }
    top + (acc * h / 3.0).ln()
}

/// `ln K_ν(z)` from `K_ν(z) = ½ ∫ exp(νt − z cosh t) dt` over the real line.
pub fn log_bessel_k(nu: f64, z: f64) -> f64 {
    let peak = (nu / z).asinh();
    let scale = 1.0 / (z * peak.cosh()).sqrt();
    0.5f64.ln() + log_integral(|t| nu * t - z * t.cosh(), peak, scale.min(1.0))
}

/// Peak and width in `t = ln x` of `x^{a} e^{−ωx−φ/x}·x` for `a = ν + r`.
fn gig_peak(nu: f64, omega: f64, phi: f64, r: f64) -> (f64, f64) {
    let a = nu + r + 1.0;
    let root = (a * a + 4.0 * omega * phi).sqrt();
    let x = if omega == 0.0 {
        phi / -a
    } else if a >= 0.0 {
        (a + root) / (2.0 * omega)
    } else {
        2.0 * phi / (root - a)
    };
    let curv = omega * x + phi / x;
    let scale = if curv > 0.0 { 1.0 / curv.sqrt() } else { 1.0 };
    (x.ln(), scale.min(1.0))
}

/// `ln ∫ x^{ν+r} e^{−ωx−φ/x} dx`.
pub fn log_gig_kernel_moment(nu: f64, omega: f64, phi: f64, r: f64) -> f64 {
    let (peak, scale) = gig_peak(nu, omega, phi, r);
    let a = nu + r + 1.0;
    log_integral(|t| a * t - omega * t.exp() - phi * (-t).exp(), peak, scale)
}

/// `E[X^r]` under `GIG(ν, ω, φ)`.
pub fn gig_moment(nu: f64, omega: f64, phi: f64, r: f64) -> f64 {
    (log_gig_kernel_moment(nu, omega, phi, r) - log_gig_kernel_moment(nu, omega, phi, 0.0)).exp()
}

/// `P[X ≤ x]` under `GIG(ν, ω, φ)`.
pub fn gig_cdf(nu: f64, omega: f64, phi: f64, x: f64) -> f64 {
    let (peak, scale) = gig_peak(nu, omega, phi, 0.0);
    let a = nu + 1.0;
    let g = |t: f64| a * t - omega * t.exp() - phi * (-t).exp();
    let lower = log_integral_upto(g, peak, scale, x.ln());
    (lower - log_integral(g, peak, scale)).exp()
}

/// Argmax of a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    while (hi - lo).abs() > 1e-13 * (lo.abs() + hi.abs()) {
        if f(c) > f(d) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - r * (hi - lo);
        d = lo + r * (hi - lo);
    }
    0.5 * (lo + hi)
}

/// Kolmogorov–Smirnov statistic of sorted data against CDF values at the data.
pub fn ks_statistic(cdf_at_sorted: &[f64]) -> f64 {
    let n = cdf_at_sorted.len() as f64;
    cdf_at_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).max((i + 1) as f64 / n - f))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Sample mean of `x^r`.
pub fn raw_moment(xs: &[f64], r: i32) -> f64 {
    xs.iter().map(|x| x.powi(r)).sum::<f64>() / xs.len() as f64
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
