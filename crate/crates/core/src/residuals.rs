//! Residual checks for sampled breathers.
//!
//! Relative residuals are taken against the sup-norm of the largest single term
//! of the equation: the terms cancel to roundoff, so an absolute residual says
//! nothing on its own across parameter scales.

use serde::{Deserialize, Serialize};

use crate::breather::{Breather, BreatherParams};
use crate::error::{Error, Result};
use crate::fourier::{l2_norm, Grid, SampledField, Spectrum};

/// Ratio `‖D(h)−D(h/2)‖ / ‖D(h/2)−D(h/4)‖` below which the time-difference step
/// is rejected (fourth order predicts 16).
const MIN_RICHARDSON_RATIO: f64 = 1.6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub sup_abs: f64,
    pub l2_abs: f64,
    pub sup_rel: f64,
    pub terms_scale: f64,
}

impl ResidualReport {
    pub fn new(residual: &SampledField, terms: &[&SampledField]) -> Self {
        let sup_abs = residual.max_abs();
        let terms_scale = terms.iter().map(|t| t.max_abs()).fold(0.0, f64::max);
        let sup_rel = if terms_scale > 0.0 { sup_abs / terms_scale } else { sup_abs };
        Self { sup_abs, l2_abs: l2_norm(residual), sup_rel, terms_scale }
    }
}

/// `v`, `v_x`, ..., `v_5x` from one transform.
struct Derivs {
    v: SampledField,
    d: [SampledField; 5],
}

impl Derivs {
    fn of(field: &SampledField) -> Result<Self> {
        let spec = Spectrum::periodic(field)?;
        Ok(Self {
            v: field.clone(),
            d: [
                spec.derivative(1)?,
                spec.derivative(2)?,
                spec.derivative(3)?,
                spec.derivative(4)?,
                spec.derivative(5)?,
            ],
        })
    }

    fn x(&self, order: usize) -> &SampledField {
        &self.d[order - 1]
    }
}

fn combine(grid: &Grid, len: usize, f: impl Fn(usize) -> f64) -> SampledField {
    SampledField::new(*grid, (0..len).map(f).collect()).expect("finite combination")
}

fn k_mu_from(v: &[f64], vx: &[f64], vxx: &[f64], mu: f64) -> Vec<f64> {
    let (m2, m3) = (mu * mu, mu * mu * mu);
    v.iter()
        .zip(vx)
        .zip(vxx)
        .map(|((&v, &vx), &vxx)| {
            let v2 = v * v;
            10.0 * (mu + v) * vx * vx
                + 20.0 * mu * v * vxx
                + 10.0 * v2 * vxx
                + 60.0 * m3 * v2
                + 60.0 * m2 * v2 * v
                + 30.0 * mu * v2 * v2
                + 6.0 * v2 * v2 * v
        })
        .collect()
}

/// `K_μ(v) = 10(μ+v)v_x² + 20μ v v_xx + 10v² v_xx + 60μ³v² + 60μ²v³ + 30μv⁴ + 6v⁵`.
pub fn k_mu(field: &SampledField, mu: f64) -> Result<SampledField> {
    let spec = Spectrum::periodic(field)?;
    let (vx, vxx) = (spec.derivative(1)?, spec.derivative(2)?);
    SampledField::new(*field.grid(), k_mu_from(field.values(), vx.values(), vxx.values(), mu))
}

/// The `v_t` implied by the equation: `−(10μ² v_xxx + v_5x + ∂x K_μ(v))`.
pub fn gardner5_rhs(field: &SampledField, mu: f64) -> Result<SampledField> {
    let d = Derivs::of(field)?;
    let k = SampledField::new(*field.grid(), k_mu_from(d.v.values(), d.x(1).values(), d.x(2).values(), mu))?;
    let kx = Spectrum::periodic(&k)?.derivative(1)?;
    let n = field.values().len();
    let (v3, v5, kx) = (d.x(3).values(), d.x(5).values(), kx.values());
    Ok(combine(field.grid(), n, |j| -(10.0 * mu * mu * v3[j] + v5[j] + kx[j])))
}

/// Fourth-order central difference `(−B(t+2h) + 8B(t+h) − 8B(t−h) + B(t−2h)) / 12h`.
pub fn central_time_derivative(b: &Breather, t: f64, grid: &Grid, step: f64) -> Result<SampledField> {
    let s = |dt: f64| b.sample_rational(t + dt, grid);
    let (p2, p1, m1, m2) = (s(2.0 * step)?, s(step)?, s(-step)?, s(-2.0 * step)?);
    let n = grid.points();
    let (p2, p1, m1, m2) = (p2.values(), p1.values(), m1.values(), m2.values());
    Ok(combine(grid, n, |j| (-p2[j] + 8.0 * p1[j] - 8.0 * m1[j] + m2[j]) / (12.0 * step)))
}

/// Default time-difference step: phase motion of about `10⁻⁴` per step.
pub fn default_time_step(p: &BreatherParams) -> f64 {
    1e-4 / p.velocities().max_speed().max(1.0)
}

/// `∂t B` by Richardson extrapolation of [`central_time_derivative`] at `h` and `h/2`.
///
/// A third evaluation at `h/4` guards the step: above the roundoff floor the
/// successive differences must shrink at close to fourth order.
pub fn time_derivative(b: &Breather, t: f64, grid: &Grid, step: f64) -> Result<SampledField> {
    let d1 = central_time_derivative(b, t, grid, step)?;
    let d2 = central_time_derivative(b, t, grid, 0.5 * step)?;
    let d4 = central_time_derivative(b, t, grid, 0.25 * step)?;
    let e12 = d1.sub(&d2)?.max_abs();
    let e24 = d2.sub(&d4)?.max_abs();
    // roundoff of a difference quotient at step h/4, with a safety factor
    let b_max = b.sample_rational(t, grid)?.max_abs();
    let floor = 100.0 * f64::EPSILON * b_max / (0.25 * step);
    if e24 > floor && e12 < MIN_RICHARDSON_RATIO * e24 {
        return Err(Error::TimeStep { step, ratio: e12 / e24 });
    }
    let (v1, v2) = (d1.values(), d2.values());
    Ok(combine(grid, v1.len(), |j| (16.0 * v2[j] - v1[j]) / 15.0))
}

/// Options for [`pde_residual_with`].
#[derive(Clone, Debug, Default)]
pub struct ResidualOptions {
    /// Time-difference step; [`default_time_step`] when `None`.
    pub time_step: Option<f64>,
    /// Time-independent field added to the breather before the spatial terms are
    /// formed, for sensitivity checks.
    pub perturbation: Option<SampledField>,
}

/// Pointwise residual `v_t + 10μ² v_xxx + v_5x + ∂x K_μ(v)` and its report.
pub fn pde_residual_of(
    field: &SampledField,
    field_t: &SampledField,
    mu: f64,
) -> Result<(SampledField, ResidualReport)> {
    let d = Derivs::of(field)?;
    let k = SampledField::new(*field.grid(), k_mu_from(d.v.values(), d.x(1).values(), d.x(2).values(), mu))?;
    let kx = Spectrum::periodic(&k)?.derivative(1)?;
    let grid = field.grid();
    let n = field.values().len();
    let lin3 = d.x(3).scaled(10.0 * mu * mu);
    let (vt, l3, v5, kxv) = (field_t.values(), lin3.values(), d.x(5).values(), kx.values());
    if field_t.grid() != grid {
        return Err(Error::GridMismatch("time derivative on a different grid".into()));
    }
    let residual = combine(grid, n, |j| vt[j] + l3[j] + v5[j] + kxv[j]);
    let report = ResidualReport::new(&residual, &[field_t, &lin3, d.x(5), &kx]);
    Ok((residual, report))
}

pub fn pde_residual(p: &BreatherParams, t: f64, grid: &Grid) -> Result<ResidualReport> {
    pde_residual_with(p, t, grid, &ResidualOptions::default())
}

pub fn pde_residual_with(p: &BreatherParams, t: f64, grid: &Grid, opts: &ResidualOptions) -> Result<ResidualReport> {
    Ok(pde_residual_field(p, t, grid, opts)?.1)
}

pub fn pde_residual_field(
    p: &BreatherParams,
    t: f64,
    grid: &Grid,
    opts: &ResidualOptions,
) -> Result<(SampledField, ResidualReport)> {
    let b = Breather::new(*p);
    let mut field = b.sample_rational(t, grid)?;
    if let Some(extra) = &opts.perturbation {
        field = field.add(extra)?;
    }
    let step = opts.time_step.unwrap_or_else(|| default_time_step(p));
    let field_t = time_derivative(&b, t, grid, step)?;
    pde_residual_of(&field, &field_t, p.mu())
}

/// Residual of the fourth-order elliptic identity satisfied by every breather:
///
/// ```text
/// B_4x + 2(α²−β²)(B_xx + 6μB² + 2B³) + (α²+β²)² B + 10B² B_xx + 10B B_x²
///      + 6B⁵ + 10μ B_x² + 20μ B B_xx + 40μ² B³ + 30μ B⁴ = 0
/// ```
pub fn elliptic_residual_of(field: &SampledField, p: &BreatherParams) -> Result<(SampledField, ResidualReport)> {
    let (a2, b2, mu) = (p.alpha() * p.alpha(), p.beta() * p.beta(), p.mu());
    let d = Derivs::of(field)?;
    let grid = field.grid();
    let n = field.values().len();
    let (v, vx, vxx, v4) = (d.v.values(), d.x(1).values(), d.x(2).values(), d.x(4).values());
    let term = |f: &dyn Fn(usize) -> f64| combine(grid, n, f);
    let c = 2.0 * (a2 - b2);
    let terms = [
        term(&|j| v4[j]),
        term(&|j| c * vxx[j]),
        term(&|j| c * 6.0 * mu * v[j] * v[j]),
        term(&|j| c * 2.0 * v[j] * v[j] * v[j]),
        term(&|j| (a2 + b2) * (a2 + b2) * v[j]),
        term(&|j| 10.0 * v[j] * v[j] * vxx[j]),
        term(&|j| 10.0 * v[j] * vx[j] * vx[j]),
        term(&|j| 6.0 * v[j].powi(5)),
        term(&|j| 10.0 * mu * vx[j] * vx[j]),
        term(&|j| 20.0 * mu * v[j] * vxx[j]),
        term(&|j| 40.0 * mu * mu * v[j].powi(3)),
        term(&|j| 30.0 * mu * v[j].powi(4)),
    ];
    let residual = combine(grid, n, |j| terms.iter().map(|t| t.values()[j]).sum());
    let refs: Vec<&SampledField> = terms.iter().collect();
    let report = ResidualReport::new(&residual, &refs);
    Ok((residual, report))
}

pub fn elliptic_residual(p: &BreatherParams, t: f64, grid: &Grid) -> Result<ResidualReport> {
    let field = Breather::new(*p).sample_rational(t, grid)?;
    Ok(elliptic_residual_of(&field, p)?.1)
}

/// Residual of `u_t + (u_4x + 10u u_x² + 10u² u_xx + 6u⁵)_x` for samples of `u`
/// and `u_t` on one grid.
pub fn mkdv5_residual_of(u: &SampledField, u_t: &SampledField) -> Result<(SampledField, ResidualReport)> {
    if u.grid() != u_t.grid() {
        return Err(Error::GridMismatch("time derivative on a different grid".into()));
    }
    let d = Derivs::of(u)?;
    let grid = u.grid();
    let n = u.values().len();
    let (v, vx, vxx) = (u.values(), d.x(1).values(), d.x(2).values());
    let flux = combine(grid, n, |j| {
        let v2 = v[j] * v[j];
        10.0 * v[j] * vx[j] * vx[j] + 10.0 * v2 * vxx[j] + 6.0 * v2 * v2 * v[j]
    });
    let fx = Spectrum::periodic(&flux)?.derivative(1)?;
    let (ut, v5, fxv) = (u_t.values(), d.x(5).values(), fx.values());
    let residual = combine(grid, n, |j| ut[j] + v5[j] + fxv[j]);
    let report = ResidualReport::new(&residual, &[u_t, d.x(5), &fx]);
    Ok((residual, report))
}

/// [`mkdv5_residual_of`] for the `μ = 0` breather.
pub fn mkdv5_residual(p: &BreatherParams, t: f64, grid: &Grid) -> Result<(SampledField, ResidualReport)> {
    let p0 = p.with_mu(0.0)?;
    let b = Breather::new(p0);
    let u = b.sample_rational(t, grid)?;
    let u_t = time_derivative(&b, t, grid, default_time_step(&p0))?;
    mkdv5_residual_of(&u, &u_t)
}
