//! Closed-form breathers of the fifth-order Gardner equation.
//!
//! ```text
//! B = 2 ∂x arctan(G/F) = 2M/N,   M = G_x F − G F_x,   N = F² + G²
//! G = β√(α²+β²)/(α√Δ) sin(αy₁) − 2μβ e^{βy₂}/Δ
//! F = cosh(βy₂) − 2μβ(α cos(αy₁) − β sin(αy₁)) / (α√(α²+β²)√Δ)
//! Δ = α² + β² − 4μ²
//! ```
//!
//! Two evaluation routes are kept independent: [`Breather::eval_rational`] works
//! from the closed-form quotient `2M/N`; [`Breather::sample_arctan_derivative`]
//! samples `2 arctan(G/F)` and differentiates it spectrally.
//!
//! `e^{βy₂}` overflows long before the breather stops being evaluated (the
//! experiment places windows at `|x| ~ 10⁹`), so every hyperbolic quantity is
//! carried divided by `e^{|βy₂|}` and `M`, `N` by `e^{2|βy₂|}`. The `e^{2βy₂}`
//! terms of `M` cancel identically and are removed analytically, leaving
//! `M = O(e^{|βy₂|})` with no catastrophic cancellation in the tails.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::fourier::{self, Grid, SampledField};

/// Edge value of the sech envelope required before the arctan route is trusted.
pub const EDGE_DECAY_TOL: f64 = 1e-14;

/// Hyperbolic arguments beyond this are returned rescaled by [`Breather::eval_gf`].
pub const RAW_HYPERBOLIC_LIMIT: f64 = 700.0;

const DENOM_TOL: f64 = f64::EPSILON;

/// Breather parameters `(α, β, μ)` and phase shifts `(x₁, x₂)`.
///
/// `β` is called the amplitude although the peak of the large-`α` profile is `2β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BreatherParams {
    alpha: f64,
    beta: f64,
    mu: f64,
    x1: f64,
    x2: f64,
    #[serde(skip)]
    discriminant: f64,
}

impl BreatherParams {
    /// Validates `α > 0`, `β > 0`, `μ ≥ 0` and `Δ = α²+β²−4μ² > 0`.
    ///
    /// `μ = 0` is the fifth-order mKdV breather. Negative `μ` is refused: the
    /// closed form is only known to solve the equation for `μ ≥ 0`.
    pub fn new(alpha: f64, beta: f64, mu: f64, x1: f64, x2: f64) -> Result<Self> {
        finite("alpha", alpha)?;
        finite("beta", beta)?;
        finite("mu", mu)?;
        finite("x1", x1)?;
        finite("x2", x2)?;
        if alpha <= 0.0 {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        if beta <= 0.0 {
            return Err(Error::NonPositiveBeta(beta));
        }
        if mu < 0.0 {
            return Err(Error::NegativeMu(mu));
        }
        let discriminant = alpha * alpha + beta * beta - 4.0 * mu * mu;
        if discriminant <= 0.0 {
            return Err(Error::NonPositiveDiscriminant(discriminant));
        }
        Ok(Self { alpha, beta, mu, x1, x2, discriminant })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn discriminant(&self) -> f64 {
        self.discriminant
    }

    pub fn with_shifts(&self, x1: f64, x2: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.mu, x1, x2)
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, mu, self.x1, self.x2)
    }

    pub fn velocities(&self) -> Velocities {
        velocities(self)
    }

    /// `∫ B dx = 2 atan(−4μβ/Δ)`: the net change of `2 arctan(G/F)` across the
    /// line. Zero only at `μ = 0`.
    pub fn mass(&self) -> f64 {
        2.0 * (-4.0 * self.mu * self.beta / self.discriminant).atan()
    }
}

impl<'de> Deserialize<'de> for BreatherParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            alpha: f64,
            beta: f64,
            mu: f64,
            #[serde(default)]
            x1: f64,
            #[serde(default)]
            x2: f64,
        }
        let r = Raw::deserialize(d)?;
        BreatherParams::new(r.alpha, r.beta, r.mu, r.x1, r.x2).map_err(serde::de::Error::custom)
    }
}

pub fn validate_params(alpha: f64, beta: f64, mu: f64, x1: f64, x2: f64) -> Result<BreatherParams> {
    BreatherParams::new(alpha, beta, mu, x1, x2)
}

/// Polynomial velocities `δ₅`, `γ₅` and the frame drift `30μ⁴`.
///
/// `δ₅` and `γ₅` include a `−30μ⁴` term that belongs to the equation with the
/// transport term `30μ⁴ v_x` still present. The equation solved here has that
/// term removed by a moving frame, so the phases advance with
/// `δ₅ + 30μ⁴` and `γ₅ + 30μ⁴`:
///
/// ```text
/// y₁ = x + (δ₅ + 30μ⁴) t + x₁,   y₂ = x + (γ₅ + 30μ⁴) t + x₂
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Velocities {
    pub delta5: f64,
    pub gamma5: f64,
    pub frame_drift: f64,
}

impl Velocities {
    /// Coefficient of `t` in the carrier phase `y₁`.
    pub fn carrier_speed(&self) -> f64 {
        self.delta5 + self.frame_drift
    }

    /// Coefficient of `t` in the envelope phase `y₂`.
    pub fn envelope_speed(&self) -> f64 {
        self.gamma5 + self.frame_drift
    }

    pub fn max_speed(&self) -> f64 {
        self.carrier_speed().abs().max(self.envelope_speed().abs())
    }
}

pub fn velocities(p: &BreatherParams) -> Velocities {
    let (a2, b2, m2) = (p.alpha * p.alpha, p.beta * p.beta, p.mu * p.mu);
    let m4 = m2 * m2;
    Velocities {
        delta5: -a2 * a2 + 10.0 * a2 * b2 - 5.0 * b2 * b2 + 10.0 * (a2 - 3.0 * b2) * m2 - 30.0 * m4,
        gamma5: -b2 * b2 + 10.0 * a2 * b2 - 5.0 * a2 * a2 + 10.0 * (3.0 * a2 - b2) * m2 - 30.0 * m4,
        frame_drift: 30.0 * m4,
    }
}

/// Root of `y₂ = 0`: where the sech envelope is centered at time `t`.
pub fn envelope_center(p: &BreatherParams, t: f64) -> f64 {
    -velocities(p).envelope_speed() * t - p.x2
}

/// `G` and `F` at a point, possibly rescaled: the true values are
/// `g·e^{log_scale}` and `f·e^{log_scale}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GfValue {
    pub g: f64,
    pub f: f64,
    pub log_scale: f64,
}

impl GfValue {
    /// `G/F`, finite whenever `F ≠ 0`, regardless of scaling.
    pub fn ratio(&self) -> f64 {
        self.g / self.f
    }
}

/// Quantities divided by `S = e^{|z|}` (`g`, `f`) or `S²` (`m`, `n`).
#[derive(Clone, Copy, Debug)]
struct Scaled {
    g: f64,
    f: f64,
    m: f64,
    n: f64,
}

/// A breather with its velocities and formula constants resolved.
#[derive(Clone, Copy, Debug)]
pub struct Breather {
    params: BreatherParams,
    vel: Velocities,
    c1: f64,
    c2: f64,
    c3: f64,
    k1: f64,
    k2: f64,
}

impl Breather {
    pub fn new(params: BreatherParams) -> Self {
        let BreatherParams { alpha: a, beta: b, mu, discriminant: d, .. } = params;
        let r = (a * a + b * b).sqrt();
        let sd = d.sqrt();
        Self {
            params,
            vel: velocities(&params),
            c1: b * r / (a * sd),
            c2: 2.0 * mu * b / d,
            c3: 2.0 * mu * b / (a * r * sd),
            k1: b * r / sd,
            k2: 2.0 * mu * b / (r * sd),
        }
    }

    pub fn params(&self) -> &BreatherParams {
        &self.params
    }

    pub fn velocities(&self) -> &Velocities {
        &self.vel
    }

    /// `(y₁, y₂)` at `(t, x)`.
    pub fn phases(&self, t: f64, x: f64) -> (f64, f64) {
        (x + self.vel.carrier_speed() * t + self.params.x1, x + self.vel.envelope_speed() * t + self.params.x2)
    }

    fn scaled(&self, theta: f64, z: f64) -> Scaled {
        let (a, b) = (self.params.alpha, self.params.beta);
        let (s, c) = theta.sin_cos();
        let w = (-z.abs()).exp();
        let w2 = w * w;
        // cosh, sinh and e^z divided by e^{|z|}
        let ch = 0.5 * (1.0 + w2);
        let sh = 0.5 * (1.0 - w2) * z.signum();
        let ex = if z >= 0.0 { 1.0 } else { w2 };
        let p = a * c - b * s;
        let r = a * s + b * c;
        let g = self.c1 * s * w - self.c2 * ex;
        let f = ch - self.c3 * p * w;
        let m = self.k1 * c * ch * w - b * self.c1 * s * sh * w + ex * w * self.c2 * (b * self.c3 * p + self.k2 * r)
            - self.c2 * b * w2
            - (self.k1 * self.c3 * c * p + self.k2 * self.c1 * r * s) * w2;
        Scaled { g, f, m, n: f * f + g * g }
    }

    fn quotient(&self, q: Scaled) -> Result<f64> {
        if !(q.n > DENOM_TOL) {
            return Err(Error::DegenerateDenominator(q.n));
        }
        Ok(2.0 * q.m / q.n)
    }

    pub fn eval_gf(&self, t: f64, x: f64) -> GfValue {
        let (y1, y2) = self.phases(t, x);
        let z = self.params.beta * y2;
        let q = self.scaled(self.params.alpha * y1, z);
        if z.abs() <= RAW_HYPERBOLIC_LIMIT {
            let scale = z.abs().exp();
            GfValue { g: q.g * scale, f: q.f * scale, log_scale: 0.0 }
        } else {
            GfValue { g: q.g, f: q.f, log_scale: z.abs() }
        }
    }

    /// `B = 2M/N` at a point.
    pub fn eval_rational(&self, t: f64, x: f64) -> Result<f64> {
        let (y1, y2) = self.phases(t, x);
        self.quotient(self.scaled(self.params.alpha * y1, self.params.beta * y2))
    }

    /// `2β cos(αy₁) sech(βy₂)`, the large-`α` approximation.
    pub fn eval_approx(&self, t: f64, x: f64) -> f64 {
        let (y1, y2) = self.phases(t, x);
        2.0 * self.params.beta * (self.params.alpha * y1).cos() * sech(self.params.beta * y2)
    }

    /// Carrier phase at the grid center (reduced mod 2π) and envelope argument there.
    fn grid_phases(&self, t: f64, grid: &Grid) -> (f64, f64) {
        let (y1, y2) = self.phases(t, grid.center());
        ((self.params.alpha * y1).rem_euclid(2.0 * PI), self.params.beta * y2)
    }

    fn sample_with<T>(&self, t: f64, grid: &Grid, f: impl Fn(f64, f64) -> T) -> Vec<T> {
        let (theta0, z0) = self.grid_phases(t, grid);
        let (a, b) = (self.params.alpha, self.params.beta);
        (0..grid.points())
            .map(|j| {
                let off = grid.offset(j);
                f(theta0 + a * off, z0 + b * off)
            })
            .collect()
    }

    pub fn sample_rational(&self, t: f64, grid: &Grid) -> Result<SampledField> {
        let values = self
            .sample_with(t, grid, |theta, z| self.quotient(self.scaled(theta, z)))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        SampledField::new(*grid, values)
    }

    pub fn sample_approx(&self, t: f64, grid: &Grid) -> Result<SampledField> {
        let two_beta = 2.0 * self.params.beta;
        SampledField::new(*grid, self.sample_with(t, grid, |theta, z| two_beta * theta.cos() * sech(z)))
    }

    /// Larger of the two envelope values `sech(βy₂)` at the window edges.
    pub fn edge_decay(&self, t: f64, grid: &Grid) -> f64 {
        let (_, z0) = self.grid_phases(t, grid);
        let b = self.params.beta;
        let zl = z0 + b * grid.offset(0);
        let zr = z0 + b * grid.offset(grid.points() - 1);
        sech(zl).max(sech(zr))
    }

    /// Samples `2 arctan(G/F)` and differentiates it spectrally.
    ///
    /// The antiderivative is not periodic for `μ > 0`: it climbs from 0 to the
    /// mass `2 atan(−4μβ/Δ)`. The unwrapped phase has its end-to-end ramp removed
    /// before the transform and the ramp slope added back afterwards.
    pub fn sample_arctan_derivative(&self, t: f64, grid: &Grid) -> Result<SampledField> {
        let decay = self.edge_decay(t, grid);
        if decay > EDGE_DECAY_TOL {
            return Err(Error::GridTooNarrow { edge_decay: decay, required: EDGE_DECAY_TOL });
        }
        let raw = self.sample_with(t, grid, |theta, z| {
            let q = self.scaled(theta, z);
            q.g.atan2(q.f)
        });
        let mut phase = Vec::with_capacity(raw.len());
        let mut turns = 0.0;
        let mut prev = raw[0];
        for &p in &raw {
            let d = p - prev;
            turns -= (d / (2.0 * PI)).round() * 2.0 * PI;
            prev = p;
            phase.push(2.0 * (p + turns));
        }
        let n = phase.len();
        let jump = phase[n - 1] - phase[0];
        for (j, v) in phase.iter_mut().enumerate() {
            *v -= jump * j as f64 / n as f64;
        }
        let periodic = SampledField::new(*grid, phase)?;
        let slope = jump / grid.length();
        Ok(fourier::derivative(&periodic, 1)?.map(|v| v + slope))
    }
}

#[inline]
fn sech(z: f64) -> f64 {
    let w = (-z.abs()).exp();
    2.0 * w / (1.0 + w * w)
}

pub fn eval_gf(p: &BreatherParams, t: f64, x: f64) -> GfValue {
    Breather::new(*p).eval_gf(t, x)
}

pub fn eval_rational(p: &BreatherParams, t: f64, x: f64) -> Result<f64> {
    Breather::new(*p).eval_rational(t, x)
}

pub fn eval_arctan_derivative(p: &BreatherParams, t: f64, grid: &Grid) -> Result<SampledField> {
    Breather::new(*p).sample_arctan_derivative(t, grid)
}

pub fn eval_approx(p: &BreatherParams, t: f64, x: f64) -> f64 {
    Breather::new(*p).eval_approx(t, x)
}

/// `Q_β(ξ) = β√2 sech(βξ)`, the scaled ground state of `Q'' − Q + Q³ = 0`.
pub fn sech_profile(beta: f64, xi: f64) -> f64 {
    beta * SQRT_2 * sech(beta * xi)
}

/// Window centered on the envelope at time `t`, `widths/β` long, with spacing
/// small enough for `points_per_period` samples per carrier period and per
/// envelope width.
pub fn envelope_window(p: &BreatherParams, t: f64, widths: f64, points_per_period: f64) -> Result<Grid> {
    let length = widths / p.beta();
    let h = (2.0 * PI / (points_per_period * p.alpha())).min(1.0 / (points_per_period * p.beta()));
    Grid::with_max_spacing(envelope_center(p, t), length, h)
}
