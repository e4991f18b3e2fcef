//! Generalized inverse Gaussian distribution `GIG(ν, ω, φ)` with density
//! proportional to `x^ν e^{-ωx - φ/x}` on `x > 0`.
//!
//! Field order is always `(ν, ω, φ)`. Two boundary cases are valid and handled
//! exactly rather than as numerical limits:
//!
//! * `φ = 0`: a Gamma law with shape `ν + 1` and rate `ω` (needs `ν > -1`);
//! * `ω = 0`: an inverse-Gamma law with shape `-ν - 1` and scale `φ`
//!   (needs `ν < -1`).
//!
//! A frequency or tail-index posterior without expert opinions lands on the
//! Gamma branch, so that branch must be exact.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01};

use crate::error::{domain, invalid, Error, Result};
use crate::quadrature::{integrate, integrate_from_zero_singular};
use crate::special_fn::{bessel_ratio, ln_gamma, log_bessel_k};

/// Absolute tolerance used by the quadrature behind [`GigParams::cdf`].
pub const CDF_ABS_TOL: f64 = 1e-12;

/// Shape/scale parameterization of a Gamma law, mean `shape · scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    shape: f64,
    scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(invalid(format!(
                "Gamma shape must be positive, got {shape}"
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!(
                "Gamma scale must be positive, got {scale}"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// Coefficient of variation, `1/√shape`.
    pub fn vco(&self) -> f64 {
        self.shape.sqrt().recip()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        (self.shape - 1.0) * x.ln()
            - x / self.scale
            - ln_gamma(self.shape)
            - self.shape * self.scale.ln()
    }

    /// The same law written as `GIG(shape − 1, 1/scale, 0)`.
    pub fn to_gig(&self) -> GigParams {
        GigParams {
            nu: self.shape - 1.0,
            omega: self.scale.recip(),
            phi: 0.0,
        }
    }
}

/// Which of the three valid parameter regions a [`GigParams`] lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GigBranch {
    Proper,
    Gamma,
    InverseGamma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    nu: f64,
    omega: f64,
    phi: f64,
}

impl GigParams {
    pub fn new(nu: f64, omega: f64, phi: f64) -> Result<Self> {
        if !(nu.is_finite() && omega.is_finite() && phi.is_finite()) {
            return Err(invalid(format!(
                "GIG parameters must be finite, got ({nu}, {omega}, {phi})"
            )));
        }
        if omega < 0.0 || phi < 0.0 {
            return Err(invalid(format!(
                "GIG requires ω ≥ 0 and φ ≥ 0, got ω={omega}, φ={phi}"
            )));
        }
        let ok = match (omega > 0.0, phi > 0.0) {
            (true, true) => true,
            (true, false) => nu > -1.0,
            (false, true) => nu < -1.0,
            (false, false) => false,
        };
        if !ok {
            return Err(invalid(format!(
                "(ν, ω, φ) = ({nu}, {omega}, {phi}) is neither a proper GIG nor a Gamma (φ=0, ν>−1) \
                 nor an inverse-Gamma (ω=0, ν<−1) law"
            )));
        }
        Ok(Self { nu, omega, phi })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn branch(&self) -> GigBranch {
        if self.phi == 0.0 {
            GigBranch::Gamma
        } else if self.omega == 0.0 {
            GigBranch::InverseGamma
        } else {
            GigBranch::Proper
        }
    }

    /// `2√(ωφ)`, the Bessel argument shared by all moment formulas.
    fn bessel_argument(&self) -> f64 {
        2.0 * (self.omega * self.phi).sqrt()
    }

    /// Log of the constant `C` in `pdf(x) = C x^ν e^{-ωx-φ/x}`.
    pub fn log_normalizer(&self) -> Result<f64> {
        let (nu, omega, phi) = (self.nu, self.omega, self.phi);
        Ok(match self.branch() {
            GigBranch::Proper => {
                0.5 * (nu + 1.0) * (omega / phi).ln()
                    - std::f64::consts::LN_2
                    - log_bessel_k(nu + 1.0, self.bessel_argument())?
            }
            GigBranch::Gamma => (nu + 1.0) * omega.ln() - ln_gamma(nu + 1.0),
            GigBranch::InverseGamma => {
                let shape = -nu - 1.0;
                shape * phi.ln() - ln_gamma(shape)
            }
        })
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(domain(format!("GIG density needs finite x > 0, got {x}")));
        }
        Ok(self.log_normalizer()? + self.log_kernel(x))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    fn log_kernel(&self, x: f64) -> f64 {
        let mut s = self.nu * x.ln();
        if self.omega != 0.0 {
            s -= self.omega * x;
        }
        if self.phi != 0.0 {
            s -= self.phi / x;
        }
        s
    }

    /// `E[X^order]` for integer `order ≥ 1`.
    ///
    /// Proper branch: `(φ/ω)^{order/2} ∏_{k=1}^{order} R_{ν+k}(2√(ωφ))`, which
    /// equals `(φ/ω)^{order/2} K_{ν+1+order}/K_{ν+1}` without dividing two
    /// Bessel values.
    pub fn moment(&self, order: u32) -> Result<f64> {
        if order == 0 {
            return Err(domain("moment order must be at least 1"));
        }
        let k = order as f64;
        match self.branch() {
            GigBranch::Proper => {
                let z = self.bessel_argument();
                let mut prod = (self.phi / self.omega).powf(0.5 * k);
                for j in 1..=order {
                    prod *= bessel_ratio(self.nu + j as f64, z)?;
                }
                Ok(prod)
            }
            GigBranch::Gamma => {
                Ok((1..=order).fold(1.0, |acc, j| acc * (self.nu + j as f64) / self.omega))
            }
            GigBranch::InverseGamma => {
                let shape = -self.nu - 1.0;
                if shape <= k {
                    return Err(Error::MomentDoesNotExist {
                        order,
                        reason: format!("inverse-Gamma shape {shape} must exceed the order"),
                    });
                }
                Ok((1..=order).fold(1.0, |acc, j| acc * self.phi / (shape - j as f64)))
            }
        }
    }

    /// Posterior mean, `√(φ/ω) R_{ν+1}(2√(ωφ))` on the proper branch.
    pub fn mean(&self) -> Result<f64> {
        match self.branch() {
            GigBranch::Proper => Ok((self.phi / self.omega).sqrt()
                * bessel_ratio(self.nu + 1.0, self.bessel_argument())?),
            GigBranch::Gamma => Ok((self.nu + 1.0) / self.omega),
            GigBranch::InverseGamma => {
                if self.nu >= -2.0 {
                    return Err(Error::MomentDoesNotExist {
                        order: 1,
                        reason: format!("inverse-Gamma mean needs ν < −2, got ν = {}", self.nu),
                    });
                }
                Ok(self.phi / (-self.nu - 2.0))
            }
        }
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        Ok((self.moment(2)? - m * m).max(0.0))
    }

    /// Exact mode `(ν + √(ν² + 4ωφ)) / (2ω)`.
    ///
    /// Evaluated as `2φ / (√(ν² + 4ωφ) − ν)` for negative `ν` to avoid
    /// cancellation. A Gamma branch with `ν ≤ 0` has its mode at 0.
    pub fn mode(&self) -> Result<f64> {
        if self.omega == 0.0 {
            return Err(domain("GIG mode formula needs ω > 0"));
        }
        let root = self.nu.hypot(2.0 * (self.omega * self.phi).sqrt());
        if self.nu >= 0.0 {
            Ok((self.nu + root) / (2.0 * self.omega))
        } else {
            Ok(2.0 * self.phi / (root - self.nu))
        }
    }

    /// First-order approximation `ν/ω · 1{ν ≥ 0} + φ/|ν|` of the mode, accurate
    /// when `4ωφ/ν²` is small.
    pub fn mode_approx(&self) -> Result<f64> {
        if self.nu == 0.0 {
            return Err(domain("mode approximation is undefined at ν = 0"));
        }
        let lead = if self.nu > 0.0 {
            self.nu / self.omega
        } else {
            0.0
        };
        Ok(lead + self.phi / self.nu.abs())
    }

    /// Point around which the CDF switches from the left integral to the
    /// complement of the right tail.
    fn pivot(&self) -> f64 {
        let root = self.nu.hypot(2.0 * (self.omega * self.phi).sqrt());
        if self.nu >= 0.0 {
            (self.nu + root) / (2.0 * self.omega)
        } else {
            2.0 * self.phi / (root - self.nu)
        }
    }

    /// `P[X ≤ x]` by adaptive quadrature of the density.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(domain(format!("CDF argument must be ≥ 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        let density = Density::new(*self)?;
        let p = if x <= density.pivot {
            density.lower(x)?
        } else {
            1.0 - density.upper(x)?
        };
        Ok(p.clamp(0.0, 1.0))
    }

    /// CDF at every point of an ascending slice, integrating only between
    /// neighbouring points.
    pub fn cdf_sorted(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if xs.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(domain("cdf_sorted needs ascending input"));
        }
        if let Some(&x) = xs.first() {
            if !(x > 0.0) || !x.is_finite() {
                return Err(domain(format!(
                    "CDF points must be finite and > 0, got {x}"
                )));
            }
        }
        if let Some(&x) = xs.last() {
            if !x.is_finite() {
                return Err(domain("CDF points must be finite"));
            }
        }
        let density = Density::new(*self)?;
        let split = xs.partition_point(|&x| x <= density.pivot);
        let mut out = vec![0.0; xs.len()];

        let mut acc = 0.0;
        let mut prev = None;
        for (i, &x) in xs[..split].iter().enumerate() {
            acc += match prev {
                None => density.lower(x)?,
                Some(p) => density.between(p, x)?,
            };
            prev = Some(x);
            out[i] = acc.clamp(0.0, 1.0);
        }

        let mut tail = 0.0;
        let mut next: Option<f64> = None;
        for i in (split..xs.len()).rev() {
            let x = xs[i];
            tail += match next {
                None => density.upper(x)?,
                Some(n) => density.between(x, n)?,
            };
            next = Some(x);
            out[i] = (1.0 - tail).clamp(0.0, 1.0);
        }
        Ok(out)
    }

    /// One exact draw on the proper branch; see [`GigSampler`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        GigSampler::new(*self)?.sample(rng)
    }
}

/// Density with its normalizer computed once, used by the CDF routines.
struct Density {
    params: GigParams,
    log_norm: f64,
    pivot: f64,
}

impl Density {
    fn new(params: GigParams) -> Result<Self> {
        Ok(Self {
            params,
            log_norm: params.log_normalizer()?,
            pivot: params.pivot(),
        })
    }

    fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || !x.is_finite() {
            return 0.0;
        }
        let v = (self.log_norm + self.params.log_kernel(x)).exp();
        if v.is_nan() {
            0.0
        } else {
            v
        }
    }

    /// `∫_0^x pdf`.
    fn lower(&self, x: f64) -> Result<f64> {
        let nu = self.params.nu;
        let f = |t: f64| self.pdf(t);
        let r = if self.params.phi == 0.0 && nu < 0.0 {
            integrate_from_zero_singular(f, x, nu, CDF_ABS_TOL)?
        } else {
            integrate(f, 0.0, x, CDF_ABS_TOL, 0.0)?
        };
        Ok(r.value)
    }

    /// `∫_x^∞ pdf`, computed as `∫_0^{1/x} pdf(1/u)/u² du`.
    fn upper(&self, x: f64) -> Result<f64> {
        let power = -self.params.nu - 2.0;
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            self.pdf(u.recip()) / (u * u)
        };
        let b = x.recip();
        let r = if self.params.omega == 0.0 && power < 0.0 {
            integrate_from_zero_singular(f, b, power, CDF_ABS_TOL)?
        } else {
            integrate(f, 0.0, b, CDF_ABS_TOL, 0.0)?
        };
        Ok(r.value)
    }

    fn between(&self, a: f64, b: f64) -> Result<f64> {
        Ok(integrate(|t| self.pdf(t), a, b, CDF_ABS_TOL * 1e-2, 0.0)?.value)
    }
}

/// Precomputed ratio-of-uniforms sampler for a proper GIG.
///
/// With `α = √(ω/φ)` and `β = 2√(ωφ)`, `Y = αX` has density proportional to
/// `h(y) = y^ν e^{-β(y + 1/y)/2}`. The sampler draws `(U, V)` uniform over the
/// mode-shifted bounding rectangle of `{(u, v): 0 < u ≤ √(h(m + v/u)/h(m))}`,
/// whose `v` extent comes from the two roots of the cubic `g`.
#[derive(Debug, Clone, Copy)]
pub struct GigSampler {
    alpha: f64,
    half_nu: f64,
    quarter_beta: f64,
    mode: f64,
    a: f64,
    b: f64,
    c: f64,
}

/// Bound on rejection trials for a single draw.
pub const MAX_TRIALS: u64 = 1_000_000;
const ROOT_TOL: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 2_000;

impl GigSampler {
    pub fn new(params: GigParams) -> Result<Self> {
        if params.branch() != GigBranch::Proper {
            return Err(invalid(format!(
                "ratio-of-uniforms GIG sampler needs ω > 0 and φ > 0, got ({}, {}, {})",
                params.nu, params.omega, params.phi
            )));
        }
        let nu = params.nu;
        let alpha = (params.omega / params.phi).sqrt();
        let beta = 2.0 * (params.omega * params.phi).sqrt();
        let root = nu.hypot(beta);
        let m = if nu >= 0.0 {
            (nu + root) / beta
        } else {
            beta / (root - nu)
        };
        let g = |y: f64| {
            0.5 * beta * y * y * y - y * y * (0.5 * beta * m + nu + 2.0)
                + y * (nu * m - 0.5 * beta)
                + 0.5 * beta * m
        };
        let dg = |y: f64| {
            1.5 * beta * y * y - 2.0 * y * (0.5 * beta * m + nu + 2.0) + (nu * m - 0.5 * beta)
        };

        let mut y0 = m;
        let mut doublings = 0;
        while g(y0) <= 0.0 {
            y0 *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS || !y0.is_finite() {
                return Err(Error::Numerical(format!(
                    "GIG sampler: no upper bracket for the cubic at ν={nu}, β={beta}"
                )));
            }
        }
        let y_plus = bracketed_root(&g, &dg, m, y0)?;
        let y_minus = bracketed_root(&g, &dg, 0.0, m)?;

        let log_h_rel =
            |y: f64| 0.5 * nu * (y / m).ln() - 0.25 * beta * (y + 1.0 / y - m - 1.0 / m);
        let a = (y_plus - m) * log_h_rel(y_plus).exp();
        let b = (y_minus - m) * log_h_rel(y_minus).exp();
        let c = -0.25 * beta * (m + 1.0 / m) + 0.5 * nu * m.ln();
        Ok(Self {
            alpha,
            half_nu: 0.5 * nu,
            quarter_beta: 0.25 * beta,
            mode: m,
            a,
            b,
            c,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.sample_counted(rng).map(|(x, _)| x)
    }

    /// A draw together with the number of rejection trials it took.
    pub fn sample_counted<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, u64)> {
        for trial in 1..=MAX_TRIALS {
            let u: f64 = Open01.sample(rng);
            let v: f64 = Open01.sample(rng);
            let y = self.mode + (self.a * v + self.b * (1.0 - v)) / u;
            if y <= 0.0 {
                continue;
            }
            let bound = -self.half_nu * y.ln() + self.quarter_beta * (y + 1.0 / y) + self.c;
            if -u.ln() >= bound {
                return Ok((y / self.alpha, trial));
            }
        }
        Err(Error::Numerical(format!(
            "GIG sampler exceeded {MAX_TRIALS} rejection trials"
        )))
    }
}

/// Root of `g` in `(lo, hi)` where `g(lo)` and `g(hi)` have opposite signs.
/// Newton steps are taken when they stay inside the bracket, bisection otherwise.
fn bracketed_root<G, D>(g: &G, dg: &D, mut lo: f64, mut hi: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let g_lo = g(lo);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    let lo_positive = g_lo > 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..1_000 {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if (gx > 0.0) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let step = gx / dg(x);
        let newton = x - step;
        if newton > lo && newton < hi {
            if step.abs() <= ROOT_TOL * newton.abs() {
                return Ok(newton);
            }
            x = newton;
        } else {
            x = 0.5 * (lo + hi);
        }
        if hi - lo <= ROOT_TOL * hi.abs() {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Numerical(format!(
        "root bracketing failed on ({lo}, {hi})"
    )))
}

/// Sampler for any valid branch, set up once and reused across draws.
#[derive(Debug, Clone, Copy)]
pub enum BranchSampler {
    Proper(GigSampler),
    Gamma(Gamma<f64>),
    InverseGamma(Gamma<f64>),
}

impl BranchSampler {
    pub fn new(params: GigParams) -> Result<Self> {
        Ok(match params.branch() {
            GigBranch::Proper => BranchSampler::Proper(GigSampler::new(params)?),
            GigBranch::Gamma => BranchSampler::Gamma(
                Gamma::new(params.nu + 1.0, params.omega.recip())
                    .map_err(|e| invalid(e.to_string()))?,
            ),
            GigBranch::InverseGamma => BranchSampler::InverseGamma(
                Gamma::new(-params.nu - 1.0, params.phi.recip())
                    .map_err(|e| invalid(e.to_string()))?,
            ),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self {
            BranchSampler::Proper(s) => s.sample(rng),
            BranchSampler::Gamma(g) => Ok(g.sample(rng)),
            BranchSampler::InverseGamma(g) => Ok(g.sample(rng).recip()),
        }
    }
}

/// One draw from any valid branch: the ratio-of-uniforms sampler on the
/// proper branch, Gamma and inverse-Gamma draws on the boundaries.
pub fn sample_any<R: Rng + ?Sized>(params: &GigParams, rng: &mut R) -> Result<f64> {
    BranchSampler::new(*params)?.sample(rng)
}
