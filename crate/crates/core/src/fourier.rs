//! Uniform periodic grids, FFT calculus and continuum-normalized norms.
//!
//! A [`Grid`] stands in for the real line: it is a window of length `L` sampled at
//! `N` points, wide enough that the fields living on it have decayed to roundoff
//! at the edges. All norms carry the `h` and `2π/L` factors, so they approximate
//! the real-line quantities rather than dimensionless discrete sums:
//!
//! ```text
//! ‖v‖²_{L²}  ≈ h Σ v_j²
//! ‖v‖²_{H^s} ≈ (h/N) Σ_k (1 + ξ_k²)^s |V_k|²     V = DFT(v), ξ_k = 2πk/L
//! ```
//!
//! The transform convention is the unitary one, so `‖v‖_{H⁰} = ‖v‖_{L²}`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};

/// Relative spectral magnitude allowed in the top quarter of the band before a
/// field is declared non-periodic (or unresolved) on its window.
pub const PERIODIC_TAIL_TOL: f64 = 1e-8;

/// Imaginary residue tolerated after an inverse transform, relative to the peak.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Separation beyond which the `H^s` cross term of two disjoint supports is
/// below `e^{-40}` and dropped.
pub const KERNEL_GAP: f64 = 40.0;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// In-place unnormalized forward DFT.
pub fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// In-place inverse DFT, normalized by `1/N`.
pub fn fft_inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, false).process(buf);
    let scale = 1.0 / n as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
}

pub(crate) fn forward_real(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    buf
}

/// Signed integer wavenumber index of FFT slot `k` for an `n`-point transform.
#[inline]
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Uniform periodic sampling window `[center - L/2, center + L/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    center: f64,
    length: f64,
    points: usize,
}

impl Grid {
    pub fn new(center: f64, length: f64, points: usize) -> Result<Self> {
        finite("center", center)?;
        finite("length", length)?;
        if length <= 0.0 {
            return Err(Error::InvalidGrid(format!("length must be > 0, got {length}")));
        }
        if points < 16 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("points must be even and >= 16, got {points}")));
        }
        Ok(Self { center, length, points })
    }

    /// Window of the given length whose spacing is at most `max_spacing`, with a
    /// power-of-two point count.
    pub fn with_max_spacing(center: f64, length: f64, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be > 0, got {max_spacing}")));
        }
        let needed = (length / max_spacing).ceil().max(16.0);
        if needed > (1u64 << 40) as f64 {
            return Err(Error::InvalidGrid(format!("{needed:e} points requested")));
        }
        Self::new(center, length, (needed as usize).next_power_of_two())
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn left(&self) -> f64 {
        self.center - 0.5 * self.length
    }

    /// One past the last node.
    pub fn right(&self) -> f64 {
        self.center + 0.5 * self.length
    }

    /// Position of node `j` relative to the center. Large-coordinate windows
    /// evaluate phases as `center + offset` to keep the offsets exact.
    #[inline]
    pub fn offset(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.center + self.offset(j)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |j| self.node(j))
    }

    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Angular wavenumber of FFT slot `k`.
    #[inline]
    pub fn wavenumber(&self, k: usize) -> f64 {
        signed_index(k, self.points) as f64 * self.frequency_spacing()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.wavenumber(k)).collect()
    }

    /// Nyquist wavenumber `π/h`.
    pub fn max_wavenumber(&self) -> f64 {
        PI / self.spacing()
    }

    /// Length of the intersection of two windows divided by the shorter one.
    pub fn overlap_fraction(&self, other: &Grid) -> f64 {
        let lo = self.left().max(other.left());
        let hi = self.right().min(other.right());
        ((hi - lo).max(0.0)) / self.length.min(other.length)
    }

    /// Distance between the windows, zero when they intersect.
    pub fn gap(&self, other: &Grid) -> f64 {
        (other.left() - self.right()).max(self.left() - other.right()).max(0.0)
    }
}

/// Real samples of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::LengthMismatch { expected: grid.points(), got: values.len() });
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(j));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.points(), values.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.points()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }

    pub fn zip_with(&self, other: &SampledField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() })
    }

    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &SampledField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn check_same_grid(&self, other: &SampledField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }
}

/// A field together with its DFT, for taking several derivatives off one transform.
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(field: &SampledField) -> Self {
        let mut coeffs = forward_real(field.values());
        hermitian_project(&mut coeffs);
        Self { grid: *field.grid(), coeffs }
    }

    /// Like [`Spectrum::of`], rejecting fields whose spectrum does not decay
    /// into the top quarter of the band.
    pub fn periodic(field: &SampledField) -> Result<Self> {
        let spec = Self::of(field);
        let tail = spec.tail_ratio();
        if tail > PERIODIC_TAIL_TOL {
            return Err(Error::NotPeriodic { tail });
        }
        Ok(spec)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Largest coefficient with `|k| >= 3N/8` relative to the largest overall.
    pub fn tail_ratio(&self) -> f64 {
        let n = self.coeffs.len();
        let peak = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if peak == 0.0 {
            return 0.0;
        }
        let cut = (3 * n / 8) as i64;
        let tail = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| signed_index(*k, n).abs() >= cut)
            .fold(0.0f64, |m, (_, c)| m.max(c.norm()));
        tail / peak
    }

    pub fn derivative(&self, order: u32) -> Result<SampledField> {
        if !(1..=5).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        let n = self.coeffs.len();
        let mut buf = self.coeffs.clone();
        for (k, c) in buf.iter_mut().enumerate() {
            // the Nyquist mode has no real odd derivative
            if order % 2 == 1 && k == n / 2 {
                *c = Complex64::new(0.0, 0.0);
                continue;
            }
            let ik = Complex64::new(0.0, self.grid.wavenumber(k));
            *c *= ik.powu(order);
        }
        fft_inverse(&mut buf);
        real_part(self.grid, buf)
    }
}

/// Enforces `C_{−k} = conj(C_k)` so that every multiplier odd in `k` maps back to a real field.
pub(crate) fn hermitian_project(coeffs: &mut [Complex64]) {
    let n = coeffs.len();
    if n == 0 {
        return;
    }
    coeffs[0].im = 0.0;
    for k in 1..n.div_ceil(2) {
        let a = 0.5 * (coeffs[k] + coeffs[n - k].conj());
        coeffs[k] = a;
        coeffs[n - k] = a.conj();
    }
    if n.is_multiple_of(2) {
        coeffs[n / 2].im = 0.0;
    }
}

fn real_part(grid: Grid, buf: Vec<Complex64>) -> Result<SampledField> {
    let peak = buf.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
    let imag = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if imag > IMAG_RESIDUE_TOL * peak.max(f64::MIN_POSITIVE) && imag > 1e-300 {
        return Err(Error::ImaginaryResidue(imag / peak.max(f64::MIN_POSITIVE)));
    }
    Ok(SampledField::from_parts(grid, buf.into_iter().map(|c| c.re).collect()))
}

/// Spectral derivative of order 1 through 5.
pub fn derivative(field: &SampledField, order: u32) -> Result<SampledField> {
    if !(1..=5).contains(&order) {
        return Err(Error::DerivativeOrder(order));
    }
    Spectrum::periodic(field)?.derivative(order)
}

/// Continuum `H^s` norm, `(∫ (1+ξ²)^s |v̂(ξ)|² dξ)^{1/2}` with the unitary transform.
pub fn sobolev_norm(field: &SampledField, s: f64) -> f64 {
    let grid = field.grid();
    let coeffs = forward_real(field.values());
    let n = grid.points();
    let sum: f64 = coeffs.iter().enumerate().map(|(k, c)| weight(grid.wavenumber(k), s) * c.norm_sqr()).sum();
    (grid.spacing() / n as f64 * sum).sqrt()
}

#[inline]
fn weight(xi: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + xi * xi).powf(s)
    }
}

pub fn l2_norm(field: &SampledField) -> f64 {
    let h = field.grid().spacing();
    (h * field.values().iter().map(|v| v * v).sum::<f64>()).sqrt()
}

pub fn inner_product(a: &SampledField, b: &SampledField) -> Result<f64> {
    a.check_same_grid(b)?;
    let h = a.grid().spacing();
    Ok(h * a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum::<f64>())
}

/// Integral `h Σ v_j` over the window; "mean" in the zero-mean sense.
pub fn mean(field: &SampledField) -> f64 {
    field.grid().spacing() * field.values().iter().sum::<f64>()
}

/// Fraction of the `L²` mass lying outside `| |ξ| - center | < half_width`.
pub fn band_leakage(field: &SampledField, center: f64, half_width: f64) -> f64 {
    let grid = field.grid();
    let coeffs = forward_real(field.values());
    let (mut inside, mut total) = (0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if (grid.wavenumber(k).abs() - center).abs() < half_width {
            inside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (total - inside) / total
    }
}

/// `H^s` distance between fields living on different windows.
///
/// Each field is taken as zero outside its own window. Identical grids are
/// differenced directly. Windows more than [`KERNEL_GAP`] apart are treated as
/// disjoint supports and the squared norms add. Otherwise both fields are placed
/// on a covering grid, which needs equal spacing and aligned nodes; overlap beyond
/// 50% is refused with [`Error::WindowOverlap`] so the caller can resample both
/// functions on a shared grid instead.
pub fn window_union_distance(a: &SampledField, b: &SampledField, s: f64) -> Result<f64> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga == gb {
        return Ok(sobolev_norm(&a.sub(b)?, s));
    }
    if ga.gap(gb) >= KERNEL_GAP {
        let (na, nb) = (sobolev_norm(a, s), sobolev_norm(b, s));
        return Ok((na * na + nb * nb).sqrt());
    }
    let overlap = ga.overlap_fraction(gb);
    if overlap > 0.5 {
        return Err(Error::WindowOverlap(100.0 * overlap));
    }
    let (ea, eb) = zero_extend_pair(a, b)?;
    Ok(sobolev_norm(&ea.sub(&eb)?, s))
}

/// Places two fields with equal, aligned spacing on one covering grid.
pub fn zero_extend_pair(a: &SampledField, b: &SampledField) -> Result<(SampledField, SampledField)> {
    let (ga, gb) = (a.grid(), b.grid());
    let h = ga.spacing();
    if ((gb.spacing() - h) / h).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!("spacings differ: {} vs {}", h, gb.spacing())));
    }
    let shift = (gb.left() - ga.left()) / h;
    if (shift - shift.round()).abs() > 1e-6 {
        return Err(Error::GridMismatch(format!("nodes not aligned (offset {shift} cells)")));
    }
    let shift = shift.round() as i64;
    let start = shift.min(0);
    let end = (ga.points() as i64).max(shift + gb.points() as i64);
    let mut points = (end - start) as usize;
    points = points.max(16);
    points += points % 2;
    let left = ga.left() + start as f64 * h;
    let union = Grid::new(left + 0.5 * points as f64 * h, points as f64 * h, points)?;
    let place = |field: &SampledField, at: i64| {
        let mut v = vec![0.0; points];
        let at = (at - start) as usize;
        v[at..at + field.values().len()].copy_from_slice(field.values());
        SampledField::from_parts(union, v)
    };
    Ok((place(a, 0), place(b, shift)))
}

/// Regularity index `s` of `H^s`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    /// Critical index below which the breather-pair construction applies.
    pub const CRITICAL: f64 = 0.75;

    pub fn new(s: f64) -> Result<Self> {
        finite("s", s)?;
        if s < -2.0 {
            return Err(Error::ExperimentConfig(format!("Sobolev index {s} below -2")));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_subcritical(self) -> bool {
        self.0 < Self::CRITICAL
    }
}

impl TryFrom<f64> for SobolevIndex {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<SobolevIndex> for f64 {
    fn from(s: SobolevIndex) -> f64 {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn grid_nodes() {
        let g = Grid::new(0.0, 2.0 * PI, 16).unwrap();
        assert_relative_eq!(g.node(0), -PI);
        assert_relative_eq!(g.node(1), -PI + PI / 8.0);
        assert_relative_eq!(g.spacing(), PI / 8.0);
        let wide = Grid::new(1e7, 5120.0, 1 << 20).unwrap();
        assert_eq!(wide.points(), 1 << 20);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(Grid::new(0.0, -1.0, 64), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(0.0, 1.0, 17), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(0.0, 1.0, 8), Err(Error::InvalidGrid(_))));
        assert!(Grid::new(f64::NAN, 1.0, 16).is_err());
    }

    #[test]
    fn derivative_of_sine() {
        let g = Grid::new(PI, 2.0 * PI, 16).unwrap();
        let f = SampledField::from_fn(g, f64::sin).unwrap();
        let d1 = derivative(&f, 1).unwrap();
        let d5 = derivative(&f, 5).unwrap();
        for (j, x) in g.nodes().enumerate() {
            assert!((d1.values()[j] - x.cos()).abs() < 1e-12);
            assert!((d5.values()[j] - x.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_order_checked() {
        let g = Grid::new(PI, 2.0 * PI, 16).unwrap();
        let f = SampledField::from_fn(g, f64::sin).unwrap();
        assert_eq!(derivative(&f, 0), Err(Error::DerivativeOrder(0)));
        assert_eq!(derivative(&f, 6), Err(Error::DerivativeOrder(6)));
    }

    #[test]
    fn truncated_bump_is_not_periodic() {
        // sech on [-3, 3) is cut at 0.1 of its peak
        let g = Grid::new(0.0, 6.0, 256).unwrap();
        let f = SampledField::from_fn(g, sech).unwrap();
        assert!(matches!(derivative(&f, 1), Err(Error::NotPeriodic { .. })));
    }

    #[test]
    fn derivative_matches_richardson_differences() {
        let g = Grid::new(0.0, 80.0, 1024).unwrap();
        let f = |x: f64| 2.0 * (3.0 * x).cos() * sech(x);
        let field = SampledField::from_fn(g, f).unwrap();
        let d = derivative(&field, 1).unwrap();
        let fd = |x: f64, h: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
        for j in (0..g.points()).step_by(37) {
            let x = g.node(j);
            let oracle = (64.0 * fd(x, 5e-4) - fd(x, 1e-3)) / 63.0;
            assert!((d.values()[j] - oracle).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn sobolev_zero_is_l2() {
        let g = Grid::new(0.0, 60.0, 512).unwrap();
        let f = SampledField::from_fn(g, |x| sech(x) * (2.0 * x).sin()).unwrap();
        assert_relative_eq!(sobolev_norm(&f, 0.0), l2_norm(&f), max_relative = 1e-12);
    }

    #[test]
    fn sobolev_one_of_gaussian() {
        let g = Grid::new(0.0, 40.0, 512).unwrap();
        let f = SampledField::from_fn(g, |x| (-0.5 * x * x).exp()).unwrap();
        // f' computed by hand, not by the spectral route under test
        let df = SampledField::from_fn(g, |x| -x * (-0.5 * x * x).exp()).unwrap();
        let lhs = sobolev_norm(&f, 1.0).powi(2);
        let rhs = l2_norm(&f).powi(2) + l2_norm(&df).powi(2);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        // ∫ e^{-x²} = √π, ∫ x² e^{-x²} = √π / 2
        assert_relative_eq!(lhs, 1.5 * PI.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn sech_squared_integral() {
        let g = Grid::new(0.0, 80.0, 2048).unwrap();
        let f = SampledField::from_fn(g, sech).unwrap();
        assert_relative_eq!(l2_norm(&f).powi(2), 2.0, max_relative = 1e-10);
        assert_relative_eq!(inner_product(&f, &f).unwrap(), l2_norm(&f).powi(2), max_relative = 1e-14);
    }

    #[test]
    fn separated_bumps_are_orthogonal() {
        let g = Grid::new(0.0, 200.0, 4096).unwrap();
        let a = SampledField::from_fn(g, |x| sech(x + 40.0)).unwrap();
        let b = SampledField::from_fn(g, sech).unwrap();
        // ∫ sech(x+40) sech(x) dx <= 4·40·e^{-40}·(1 + 1/40) ~ 7e-16
        assert!(inner_product(&a, &b).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn inner_product_grid_mismatch() {
        let a = SampledField::zeros(Grid::new(0.0, 10.0, 16).unwrap());
        let b = SampledField::zeros(Grid::new(1.0, 10.0, 16).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn mean_cases() {
        let g = Grid::new(3.0, 7.0, 64).unwrap();
        let c = SampledField::from_fn(g, |_| 2.5).unwrap();
        assert_relative_eq!(mean(&c), 2.5 * 7.0, max_relative = 1e-14);
        // an odd function on a window symmetric about 0; node 0 is the unpaired -L/2
        let s = Grid::new(0.0, 40.0, 256).unwrap();
        let odd = SampledField::from_fn(s, |x| x * (-x * x).exp()).unwrap();
        assert!(mean(&odd).abs() < 1e-14);
    }

    #[test]
    fn union_distance_cases() {
        let g = Grid::new(0.0, 80.0, 1024).unwrap();
        let a = SampledField::from_fn(g, |x| sech(x) * (4.0 * x).cos()).unwrap();
        assert_eq!(window_union_distance(&a, &a, 0.5).unwrap(), 0.0);

        let b = SampledField::from_fn(g, |x| 0.5 * sech(x)).unwrap();
        let direct = l2_norm(&a.sub(&b).unwrap());
        assert_relative_eq!(window_union_distance(&a, &b, 0.0).unwrap(), direct, max_relative = 1e-12);

        let far = Grid::new(1000.0, 80.0, 1024).unwrap();
        let c = SampledField::from_fn(far, |x| sech(x - 1000.0) * (3.0 * x).sin()).unwrap();
        let d2 = window_union_distance(&a, &c, 0.5).unwrap().powi(2);
        let oracle = sobolev_norm(&a, 0.5).powi(2) + sobolev_norm(&c, 0.5).powi(2);
        assert_relative_eq!(d2, oracle, max_relative = 1e-8);
    }

    #[test]
    fn union_distance_zero_extension_matches_direct() {
        // two bumps on half-overlapping aligned windows vs a single covering grid
        let h = 80.0 / 1024.0;
        let wide = Grid::new(20.0, 160.0, 2048).unwrap();
        let ga = Grid::new(0.0, 80.0, 1024).unwrap();
        let gb = Grid::new(60.0, 80.0, 1024).unwrap();
        assert_relative_eq!(gb.spacing(), h);
        let fa = |x: f64| sech(x) * (2.0 * x).cos();
        let fb = |x: f64| sech(x - 60.0) * (2.0 * x).sin();
        let a = SampledField::from_fn(ga, fa).unwrap();
        let b = SampledField::from_fn(gb, fb).unwrap();
        let direct = SampledField::from_fn(wide, |x| fa(x) - fb(x)).unwrap();
        assert_relative_eq!(
            window_union_distance(&a, &b, 0.5).unwrap(),
            sobolev_norm(&direct, 0.5),
            max_relative = 1e-10
        );
        let gc = Grid::new(10.0, 80.0, 1024).unwrap();
        let c = SampledField::from_fn(gc, fb).unwrap();
        assert!(matches!(window_union_distance(&a, &c, 0.5), Err(Error::WindowOverlap(_))));
    }

    #[test]
    fn band_leakage_of_modulated_sech() {
        let g = Grid::new(0.0, 200.0, 4096).unwrap();
        let f = SampledField::from_fn(g, |x| sech(x) * (10.0 * x).cos()).unwrap();
        assert!(band_leakage(&f, 10.0, 10.0) < 1e-8);
        assert!(band_leakage(&f, 10.0, 0.5) > 1e-3);
    }

    #[test]
    fn sobolev_index_bounds() {
        assert!(SobolevIndex::new(0.5).unwrap().is_subcritical());
        assert!(!SobolevIndex::new(0.75).unwrap().is_subcritical());
        assert!(SobolevIndex::new(-3.0).is_err());
        assert!(SobolevIndex::new(f64::NAN).is_err());
    }
}
