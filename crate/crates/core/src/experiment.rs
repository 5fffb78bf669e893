//! Breather-pair experiment for the loss of uniform continuity in `H^s`, `s < 3/4`.
//!
//! For each base frequency `α` two breathers share the amplitude `β = α^{−2s}` and
//! have frequencies `α₁,₂ = α ± δ/(2α^{2s})`, so their data are `O(δ)` apart in
//! `H^s` while each has `H^s` norm of order one. Their envelopes travel at speeds
//! `≈ 5α_j⁴` and, by time `T = margin·α^{4s−3}/δ`, are `margin` envelope widths
//! (in the scaled sense of [`separation_ratio`]) apart, so the solutions are
//! `O(1)` apart no matter how small `δ` is. Below `s = 3/4` the required `T`
//! shrinks as `α` grows.
//!
//! Time-`T` states come from the closed form, not from the solver: the envelopes
//! sit at `|x| ~ 10⁹` by then.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::breather::{envelope_center, Breather, BreatherParams};
use crate::error::{Error, Result};
use crate::fourier::{
    band_leakage, inner_product, l2_norm, mean, sobolev_norm, window_union_distance, Grid, SampledField, SobolevIndex,
};
use crate::output::fmt_float;

/// Exact CSV header of the scan table.
pub const CSV_HEADER: &str = "alpha,alpha1,alpha2,beta,T,norm0_1,norm0_2,dist0,distT,cross_T,separation_ratio";

/// Smallest separation ratio for which a row counts toward the verdict.
pub const MIN_SEPARATION_RATIO: f64 = 10.0;

/// Largest `β/α` treated as the approximation regime.
pub const APPROX_REGIME: f64 = 1.0 / 16.0;

/// Upper bound on points for the overlapping-window fallback grid.
const MAX_FALLBACK_POINTS: usize = 1 << 26;

fn default_s() -> SobolevIndex {
    SobolevIndex::new(0.5).unwrap()
}
fn default_delta() -> f64 {
    0.1
}
fn default_mu() -> f64 {
    0.05
}
fn default_alphas() -> Vec<f64> {
    vec![8.0, 16.0, 32.0, 64.0]
}
fn default_margin() -> f64 {
    100.0
}
fn default_widths() -> f64 {
    80.0
}
fn default_ppp() -> f64 {
    10.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_s")]
    pub s: SobolevIndex,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Multiplier of the lower bound `α^{4s−3}/δ` on `T`.
    #[serde(default = "default_margin", rename = "T_margin", alias = "t_margin")]
    pub t_margin: f64,
    /// Window length in envelope widths `1/β`.
    #[serde(default = "default_widths")]
    pub window_widths: f64,
    /// Grid points per carrier period (and per envelope width).
    #[serde(default = "default_ppp")]
    pub points_per_period: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            s: default_s(),
            delta: default_delta(),
            mu: default_mu(),
            alphas: default_alphas(),
            t_margin: default_margin(),
            window_widths: default_widths(),
            points_per_period: default_ppp(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ExperimentConfig(m));
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be > 0, got {}", self.delta));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be >= 0, got {}", self.mu));
        }
        if self.alphas.is_empty() {
            return bad("alphas is empty".into());
        }
        if self.alphas.iter().any(|&a| !(a >= 8.0 && a.is_finite())) {
            return bad(format!("every alpha must be >= 8, got {:?}", self.alphas));
        }
        if self.alphas.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("alphas must be strictly increasing, got {:?}", self.alphas));
        }
        if !(self.t_margin >= 10.0 && self.t_margin.is_finite()) {
            return bad(format!("T_margin must be >= 10, got {}", self.t_margin));
        }
        if !(self.window_widths >= 40.0 && self.window_widths.is_finite()) {
            return bad(format!("window_widths must be >= 40, got {}", self.window_widths));
        }
        if !(self.points_per_period >= 10.0 && self.points_per_period.is_finite()) {
            return bad(format!("points_per_period must be >= 10, got {}", self.points_per_period));
        }
        Ok(())
    }
}

/// `β = α^{−2s}`.
pub fn choose_beta(alpha: f64, s: f64) -> f64 {
    alpha.powf(-2.0 * s)
}

/// Ulps searched on each side of the nominal frequencies.
const FREQUENCY_ULPS: i64 = 4;

/// `α₁,₂ = α ± δ/(2α^{2s})`, so that `α^{2s}(α₁ − α₂) = δ`.
///
/// Of the pairs within a few ulps of the nominal values, the one whose
/// floating-point `α^{2s}(α₁ − α₂)` lands closest to `δ` is returned.
pub fn choose_frequencies(alpha: f64, s: f64, delta: f64) -> Result<(f64, f64)> {
    let scale = alpha.powf(2.0 * s);
    let half = 0.5 * delta / scale;
    let alpha2 = alpha - half;
    if !(alpha2 > 0.0) {
        return Err(Error::NonPositiveAlpha2(alpha2));
    }
    let alpha1 = alpha + half;
    let shift = |x: f64, k: i64| f64::from_bits((x.to_bits() as i64 + k) as u64);
    let miss = |a1: f64, a2: f64| (scale * (a1 - a2) - delta).abs();
    let mut best = (alpha1, alpha2);
    for i in -FREQUENCY_ULPS..=FREQUENCY_ULPS {
        for j in -FREQUENCY_ULPS..=FREQUENCY_ULPS {
            let cand = (shift(alpha1, i), shift(alpha2, j));
            if miss(cand.0, cand.1) < miss(best.0, best.1) {
                best = cand;
            }
        }
    }
    Ok(best)
}

/// `T = margin · α^{4s−3} / δ`.
pub fn choose_t(alpha: f64, s: f64, delta: f64, margin: f64) -> f64 {
    margin * alpha.powf(4.0 * s - 3.0) / delta
}

/// `α³(α₁ − α₂) T / β⁻¹`; the envelopes are separated when this is large.
pub fn separation_ratio(alpha: f64, alpha1: f64, alpha2: f64, t: f64, beta: f64) -> f64 {
    alpha.powi(3) * (alpha1 - alpha2) * t * beta
}

fn spacing(alpha: f64, beta: f64, ppp: f64) -> f64 {
    (2.0 * PI / (ppp * alpha)).min(1.0 / (ppp * beta))
}

/// Exact breather data at `t = 0` with its large-`α` approximation alongside.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub params: BreatherParams,
    pub field: SampledField,
    pub approx: SampledField,
    /// `β/α ≤ 1/16`.
    pub in_regime: bool,
    /// sup |exact − approximation|.
    pub approx_gap: f64,
    /// Fraction of `L²` mass farther than `10β` from `|ξ| = α`.
    pub leakage: f64,
    pub mass: f64,
    /// `2 atan(−4μβ/Δ)`.
    pub expected_mass: f64,
}

pub fn build_initial(
    alpha: f64,
    beta: f64,
    mu: f64,
    window_widths: f64,
    points_per_period: f64,
) -> Result<InitialData> {
    let params = BreatherParams::new(alpha, beta, mu, 0.0, 0.0)?;
    let grid = Grid::with_max_spacing(
        envelope_center(&params, 0.0),
        window_widths / beta,
        spacing(alpha, beta, points_per_period),
    )?;
    let b = Breather::new(params);
    let field = b.sample_rational(0.0, &grid)?;
    let approx = b.sample_approx(0.0, &grid)?;
    let approx_gap = field.sub(&approx)?.max_abs();
    Ok(InitialData {
        params,
        in_regime: beta / alpha <= APPROX_REGIME,
        approx_gap,
        leakage: band_leakage(&field, alpha, 10.0 * beta),
        mass: mean(&field),
        expected_mass: params.mass(),
        field,
        approx,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub norm0_1: f64,
    pub norm0_2: f64,
    pub dist0: f64,
    #[serde(rename = "distT")]
    pub dist_t: f64,
    #[serde(rename = "cross_T")]
    pub cross_t: f64,
    pub separation_ratio: f64,
    #[serde(rename = "normT_1")]
    pub norm_t_1: f64,
    #[serde(rename = "normT_2")]
    pub norm_t_2: f64,
    /// `L²` norms of both breathers at `t = 0` and `t = T`.
    pub l2_0: [f64; 2],
    #[serde(rename = "l2_T")]
    pub l2_t: [f64; 2],
    /// Envelope centers at `T`.
    #[serde(rename = "centers_T")]
    pub centers_t: [f64; 2],
    /// sup |exact − approximation| at `t = 0` for the `α₁` breather, over `2β`.
    pub approx_gap0: f64,
    pub separation_ok: bool,
    /// The time-`T` windows overlapped and both states were resampled on one grid.
    pub overlap_fallback: bool,
    pub points: usize,
}

impl ExperimentRow {
    pub fn csv_line(&self) -> String {
        [
            self.alpha,
            self.alpha1,
            self.alpha2,
            self.beta,
            self.t,
            self.norm0_1,
            self.norm0_2,
            self.dist0,
            self.dist_t,
            self.cross_t,
            self.separation_ratio,
        ]
        .iter()
        .map(|&v| fmt_float(v))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Envelope-model bound on `|∫ v₁ v₂|` from the parts of the two breathers outside
/// their windows: `|v_j| ≤ 2A_j e^{−β|x−c_j|}` gives
/// `4A₁A₂ e^{−βD}(D + 1/β)` for centers `D` apart.
fn tail_bound(a1: f64, a2: f64, beta: f64, distance: f64) -> f64 {
    4.0 * a1 * a2 * (-beta * distance).exp() * (distance + 1.0 / beta)
}

pub fn measure_pair(config: &ExperimentConfig, alpha: f64) -> Result<ExperimentRow> {
    let s = config.s.value();
    let beta = choose_beta(alpha, s);
    let (alpha1, alpha2) = choose_frequencies(alpha, s, config.delta)?;
    let t = choose_t(alpha, s, config.delta, config.t_margin);
    let ratio = separation_ratio(alpha, alpha1, alpha2, t, beta);
    let p1 = BreatherParams::new(alpha1, beta, config.mu, 0.0, 0.0)?;
    let p2 = BreatherParams::new(alpha2, beta, config.mu, 0.0, 0.0)?;
    let (b1, b2) = (Breather::new(p1), Breather::new(p2));

    let length = config.window_widths / beta;
    let h = spacing(alpha1, beta, config.points_per_period);
    let shared = Grid::with_max_spacing(envelope_center(&p1, 0.0), length, h)?;
    let v1 = b1.sample_rational(0.0, &shared)?;
    let v2 = b2.sample_rational(0.0, &shared)?;
    let approx_gap0 = v1.sub(&b1.sample_approx(0.0, &shared)?)?.max_abs() / (2.0 * beta);
    let norm0_1 = sobolev_norm(&v1, s);
    let norm0_2 = sobolev_norm(&v2, s);
    let dist0 = sobolev_norm(&v1.sub(&v2)?, s);
    let l2_0 = [l2_norm(&v1), l2_norm(&v2)];
    drop((v1, v2));

    // time-T windows on one lattice, so zero-extension stays available
    let c1 = envelope_center(&p1, t);
    let c2 = envelope_center(&p2, t);
    let step = shared.spacing();
    let g1 = Grid::new(c1, length, shared.points())?;
    let g2 = Grid::new(c1 + ((c2 - c1) / step).round() * step, length, shared.points())?;
    let w1 = b1.sample_rational(t, &g1)?;
    let w2 = b2.sample_rational(t, &g2)?;
    let norm_t_1 = sobolev_norm(&w1, s);
    let norm_t_2 = sobolev_norm(&w2, s);
    let l2_t = [l2_norm(&w1), l2_norm(&w2)];
    let tails = tail_bound(w1.max_abs(), w2.max_abs(), beta, (c1 - c2).abs());

    let (dist_t, cross_window, overlap_fallback) = match window_union_distance(&w1, &w2, s) {
        Ok(d) => {
            let cross = if g1.gap(&g2) > 0.0 {
                0.0
            } else {
                let (e1, e2) = crate::fourier::zero_extend_pair(&w1, &w2)?;
                inner_product(&e1, &e2)?.abs()
            };
            (d, cross, false)
        }
        Err(Error::WindowOverlap(_)) => {
            let lo = g1.left().min(g2.left());
            let hi = g1.right().max(g2.right());
            let points = (((hi - lo) / step).ceil() as usize).next_power_of_two();
            if points > MAX_FALLBACK_POINTS {
                return Err(Error::InvalidGrid(format!("fallback grid of {points} points")));
            }
            let common = Grid::new(0.5 * (lo + hi), points as f64 * step, points)?;
            let u1 = b1.sample_rational(t, &common)?;
            let u2 = b2.sample_rational(t, &common)?;
            (sobolev_norm(&u1.sub(&u2)?, s), inner_product(&u1, &u2)?.abs(), true)
        }
        Err(e) => return Err(e),
    };

    Ok(ExperimentRow {
        alpha,
        alpha1,
        alpha2,
        beta,
        t,
        norm0_1,
        norm0_2,
        dist0,
        dist_t,
        cross_t: cross_window + tails,
        separation_ratio: ratio,
        norm_t_1,
        norm_t_2,
        l2_0,
        l2_t,
        centers_t: [c1, c2],
        approx_gap0,
        separation_ok: ratio >= MIN_SEPARATION_RATIO,
        overlap_fallback,
        points: shared.points(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Data stay `O(δ)` apart while solutions stay `O(1)` apart across the scan.
    IllPosedSignature,
    NoSignature,
    /// `s ≥ 3/4`: the construction makes no claim, rows are descriptive only.
    NoVerdict,
}

/// Bands derived from the scan, against which the verdict is taken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    /// Smallest and largest `‖v_j(0)‖_{H^s}` over all rows.
    pub norm_floor: f64,
    pub norm_ceiling: f64,
    /// `C = norm_ceiling`, the common `H^s` size of the data.
    pub band_constant: f64,
    /// `2Cδ`.
    pub dist0_bound: f64,
    /// `norm_floor / 2`.
    #[serde(rename = "distT_floor")]
    pub dist_t_floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub verdict: Verdict,
    pub bands: Bands,
    pub norm_band_ok: bool,
    pub dist0_ok: bool,
    #[serde(rename = "distT_ok")]
    pub dist_t_ok: bool,
    pub separation_ok: bool,
}

pub fn assess(config: &ExperimentConfig, rows: &[ExperimentRow]) -> Assessment {
    let norms = rows.iter().flat_map(|r| [r.norm0_1, r.norm0_2]);
    let norm_floor = norms.clone().fold(f64::INFINITY, f64::min);
    let norm_ceiling = norms.fold(0.0, f64::max);
    let band_constant = norm_ceiling;
    let bands = Bands {
        norm_floor,
        norm_ceiling,
        band_constant,
        dist0_bound: 2.0 * band_constant * config.delta,
        dist_t_floor: 0.5 * norm_floor,
    };
    let norm_band_ok = norm_ceiling <= 2.0 * norm_floor;
    let dist0_ok = rows.iter().all(|r| r.dist0 <= bands.dist0_bound);
    let dist_t_ok = rows.iter().all(|r| r.dist_t >= bands.dist_t_floor);
    let separation_ok = rows.iter().all(|r| r.separation_ok);
    let verdict = if !config.s.is_subcritical() {
        Verdict::NoVerdict
    } else if norm_band_ok && dist0_ok && dist_t_ok && separation_ok && !rows.is_empty() {
        Verdict::IllPosedSignature
    } else {
        Verdict::NoSignature
    };
    Assessment { verdict, bands, norm_band_ok, dist0_ok, dist_t_ok, separation_ok }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
    pub verdict: Verdict,
    pub assessment: Assessment,
}

/// One row per `α`, computed in parallel and returned in `α` order.
pub fn run_scan(config: &ExperimentConfig) -> Result<ScanReport> {
    config.validate()?;
    let rows = config.alphas.par_iter().map(|&a| measure_pair(config, a)).collect::<Result<Vec<_>>>()?;
    let assessment = assess(config, &rows);
    Ok(ScanReport { config: config.clone(), verdict: assessment.verdict, rows, assessment })
}

pub fn write_scan_csv<W: Write>(mut out: W, rows: &[ExperimentRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}
