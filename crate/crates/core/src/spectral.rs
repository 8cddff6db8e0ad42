//! Periodic 2D grid, discrete Fourier transforms, spectral differentiation,
//! and dealiased pointwise products.
//!
//! Fields are stored as Fourier-series amplitudes: the forward transform
//! divides by `n^2`, so a field `c * cos(2*pi*x/L)` has two coefficients of
//! magnitude `c/2`. All nonlinear operations go through physical space and
//! are dealiased with the 2/3 rule (coefficients with max-norm integer
//! frequency above `n/3` are zeroed exactly).

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::io::{Read, Write};
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A Lebesgue or summation exponent in `[1, inf]`, with infinity explicit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// 1/p, with 1/inf = 0.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }
}

/// Uniform periodic grid on `[0, L)^2` with `n` points per axis.
pub struct Grid {
    n: usize,
    box_length: f64,
    /// Signed integer frequency per storage index, with Nyquist included.
    modes: Vec<i64>,
    /// Physical wavenumbers `2*pi*m/L`; the Nyquist entry is zeroed so
    /// derivative operators preserve real-valuedness.
    deriv_wavenumbers: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("box_length", &self.box_length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.box_length == other.box_length
    }
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Arc<Grid>> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(box_length > 0.0) {
            return Err(Error::Config(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft(n, FftDirection::Forward);
        let fft_inv = planner.plan_fft(n, FftDirection::Inverse);
        let modes: Vec<i64> = (0..n)
            .map(|m| if m <= n / 2 { m as i64 } else { m as i64 - n as i64 })
            .collect();
        let scale = 2.0 * std::f64::consts::PI / box_length;
        let deriv_wavenumbers: Vec<f64> = modes
            .iter()
            .enumerate()
            .map(|(i, &m)| if i == n / 2 { 0.0 } else { m as f64 * scale })
            .collect();
        Ok(Arc::new(Grid {
            n,
            box_length,
            modes,
            deriv_wavenumbers,
            fft_fwd,
            fft_inv,
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn num_points(&self) -> usize {
        self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Wavenumber unit `2*pi/L`.
    pub fn wavenumber_unit(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_length
    }

    /// Signed integer frequency at storage index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        self.modes[i]
    }

    /// Storage index of a signed integer frequency.
    pub fn index_of_mode(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    /// Largest integer frequency kept by the 2/3 rule.
    pub fn dealias_mode_limit(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Max-norm radius (physical wavenumber) of the dealiased band.
    pub fn dealias_radius(&self) -> f64 {
        self.dealias_mode_limit() as f64 * self.wavenumber_unit()
    }

    /// Euclidean radius of the dealiased band's corner modes.
    pub fn corner_radius(&self) -> f64 {
        self.dealias_radius() * std::f64::consts::SQRT_2
    }

    /// Euclidean wavenumber magnitude at storage indices `(i, j)`.
    pub fn wavenumber_mag(&self, i: usize, j: usize) -> f64 {
        let u = self.wavenumber_unit();
        let kx = self.modes[i] as f64 * u;
        let ky = self.modes[j] as f64 * u;
        (kx * kx + ky * ky).sqrt()
    }

    fn fft2_inplace(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        // rows
        for row in data.chunks_exact_mut(n) {
            fft.process(row);
        }
        // columns via transpose
        let mut t = vec![Complex64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = data[i * n + j];
            }
        }
        for row in t.chunks_exact_mut(n) {
            fft.process(row);
        }
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = t[j * n + i];
            }
        }
    }

    /// Forward transform (normalized by `n^2`).
    pub fn forward(&self, physical: &[Complex64]) -> Vec<Complex64> {
        let mut data = physical.to_vec();
        self.fft2_inplace(&mut data, &self.fft_fwd);
        let scale = 1.0 / (self.n * self.n) as f64;
        for c in &mut data {
            *c *= scale;
        }
        data
    }

    /// Inverse transform (unnormalized, exact inverse of `forward`).
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut data = coeffs.to_vec();
        self.fft2_inplace(&mut data, &self.fft_inv);
        data
    }
}

/// A scalar or vector field on a periodic grid, stored as complex Fourier
/// coefficients per component (row-major, component-major).
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Vec<Complex64>>,
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("components", &self.coeffs.len())
            .finish()
    }
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>, components: usize) -> SpectralField {
        SpectralField {
            grid: Arc::clone(grid),
            coeffs: vec![vec![Complex64::default(); grid.num_points()]; components],
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Vec<Complex64>>) -> Result<SpectralField> {
        for c in &coeffs {
            if c.len() != grid.num_points() {
                return Err(Error::Dimension {
                    expected: grid.num_points(),
                    got: c.len(),
                });
            }
        }
        Ok(SpectralField {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Transform physical samples (one slice per component) to coefficients.
    pub fn from_physical(grid: &Arc<Grid>, samples: &[Vec<f64>]) -> Result<SpectralField> {
        let mut coeffs = Vec::with_capacity(samples.len());
        for comp in samples {
            if comp.len() != grid.num_points() {
                return Err(Error::Dimension {
                    expected: grid.num_points(),
                    got: comp.len(),
                });
            }
            let phys: Vec<Complex64> = comp.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            coeffs.push(grid.forward(&phys));
        }
        Ok(SpectralField {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self, component: usize) -> &[Complex64] {
        &self.coeffs[component]
    }

    pub fn coeffs_mut(&mut self, component: usize) -> &mut [Complex64] {
        &mut self.coeffs[component]
    }

    /// Coefficient at signed integer frequencies `(mx, my)`.
    pub fn coeff_at(&self, component: usize, mx: i64, my: i64) -> Complex64 {
        let i = self.grid.index_of_mode(mx);
        let j = self.grid.index_of_mode(my);
        self.coeffs[component][i * self.grid.n() + j]
    }

    pub fn set_coeff(&mut self, component: usize, mx: i64, my: i64, value: Complex64) {
        let i = self.grid.index_of_mode(mx);
        let j = self.grid.index_of_mode(my);
        let n = self.grid.n();
        self.coeffs[component][i * n + j] = value;
    }

    /// Real part of the inverse transform, per component.
    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| self.grid.inverse(c).iter().map(|z| z.re).collect())
            .collect()
    }

    /// Maximum imaginary magnitude of the physical samples relative to the
    /// field's physical scale; zero for exactly real fields.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let mut max_im: f64 = 0.0;
        let mut max_abs: f64 = 0.0;
        for c in &self.coeffs {
            for z in self.grid.inverse(c) {
                max_im = max_im.max(z.im.abs());
                max_abs = max_abs.max(z.norm());
            }
        }
        if max_abs == 0.0 {
            0.0
        } else {
            max_im / max_abs
        }
    }

    pub fn same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Apply a frequency multiplier `m(kx, ky)` componentwise.
    pub fn apply_multiplier(&self, m: impl Fn(f64, f64) -> f64) -> SpectralField {
        let n = self.grid.n();
        let u = self.grid.wavenumber_unit();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut out = c.clone();
                for i in 0..n {
                    let kx = self.grid.mode(i) as f64 * u;
                    for j in 0..n {
                        let ky = self.grid.mode(j) as f64 * u;
                        out[i * n + j] *= m(kx, ky);
                    }
                }
                out
            })
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    /// Partial derivative along `axis` (0 or 1), componentwise.
    pub fn partial(&self, axis: usize) -> SpectralField {
        let n = self.grid.n();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut out = c.clone();
                for i in 0..n {
                    for j in 0..n {
                        let k = if axis == 0 {
                            self.grid.deriv_wavenumbers[i]
                        } else {
                            self.grid.deriv_wavenumbers[j]
                        };
                        out[i * n + j] *= Complex64::new(0.0, k);
                    }
                }
                out
            })
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    /// Gradient of a scalar field.
    pub fn gradient(&self) -> Result<SpectralField> {
        if self.components() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                got: self.components(),
            });
        }
        let dx = self.partial(0);
        let dy = self.partial(1);
        Ok(SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs: vec![dx.coeffs[0].clone(), dy.coeffs[0].clone()],
        })
    }

    /// Divergence of a 2-component field.
    pub fn divergence(&self) -> Result<SpectralField> {
        if self.components() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: self.components(),
            });
        }
        let n = self.grid.n();
        let mut out = vec![Complex64::default(); n * n];
        for i in 0..n {
            let kx = self.grid.deriv_wavenumbers[i];
            for j in 0..n {
                let ky = self.grid.deriv_wavenumbers[j];
                out[i * n + j] = Complex64::new(0.0, kx) * self.coeffs[0][i * n + j]
                    + Complex64::new(0.0, ky) * self.coeffs[1][i * n + j];
            }
        }
        Ok(SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs: vec![out],
        })
    }

    /// Laplacian, componentwise.
    pub fn laplacian(&self) -> SpectralField {
        self.apply_multiplier(|kx, ky| -(kx * kx + ky * ky))
    }

    /// Extract one component as a scalar field.
    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs: vec![self.coeffs[c].clone()],
        }
    }

    pub fn from_components(parts: &[SpectralField]) -> Result<SpectralField> {
        let grid = Arc::clone(parts[0].grid());
        let mut coeffs = Vec::new();
        for p in parts {
            parts[0].same_grid(p)?;
            for c in &p.coeffs {
                coeffs.push(c.clone());
            }
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Zero all coefficients with max-norm integer frequency above `n/3`.
    pub fn dealias(&mut self) {
        let n = self.grid.n();
        let lim = self.grid.dealias_mode_limit();
        for c in &mut self.coeffs {
            for i in 0..n {
                let mi = self.grid.modes[i].abs();
                for j in 0..n {
                    let mj = self.grid.modes[j].abs();
                    if mi > lim || mj > lim {
                        c[i * n + j] = Complex64::default();
                    }
                }
            }
        }
    }

    pub fn dealiased(mut self) -> SpectralField {
        self.dealias();
        self
    }

    /// Dealiased pointwise product. Scalar operands broadcast over the other
    /// operand's components; equal component counts multiply componentwise.
    pub fn pointwise_product(&self, other: &SpectralField) -> Result<SpectralField> {
        self.same_grid(other)?;
        let (a, b) = (self, other);
        let pairs: Vec<(usize, usize)> = if a.components() == b.components() {
            (0..a.components()).map(|c| (c, c)).collect()
        } else if a.components() == 1 {
            (0..b.components()).map(|c| (0, c)).collect()
        } else if b.components() == 1 {
            (0..a.components()).map(|c| (c, 0)).collect()
        } else {
            return Err(Error::Dimension {
                expected: a.components(),
                got: b.components(),
            });
        };
        let mut coeffs = Vec::with_capacity(pairs.len());
        for (ca, cb) in pairs {
            let pa = self.grid.inverse(&a.coeffs[ca]);
            let pb = self.grid.inverse(&b.coeffs[cb]);
            let prod: Vec<Complex64> = pa.iter().zip(&pb).map(|(&x, &y)| x * y).collect();
            coeffs.push(self.grid.forward(&prod));
        }
        let mut out = SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        };
        out.dealias();
        Ok(out)
    }

    /// Dealiased dot product of two vector fields (scalar result).
    pub fn dot_product(&self, other: &SpectralField) -> Result<SpectralField> {
        self.same_grid(other)?;
        if self.components() != other.components() {
            return Err(Error::Dimension {
                expected: self.components(),
                got: other.components(),
            });
        }
        let npts = self.grid.num_points();
        let mut acc = vec![Complex64::default(); npts];
        for c in 0..self.components() {
            let pa = self.grid.inverse(&self.coeffs[c]);
            let pb = self.grid.inverse(&other.coeffs[c]);
            for ((s, &x), &y) in acc.iter_mut().zip(&pa).zip(&pb) {
                *s += x * y;
            }
        }
        let mut out = SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs: vec![self.grid.forward(&acc)],
        };
        out.dealias();
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.iter().map(|&z| z * factor).collect())
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    pub fn axpy(&mut self, alpha: f64, other: &SpectralField) {
        for (c, oc) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (z, &w) in c.iter_mut().zip(oc) {
                *z += alpha * w;
            }
        }
    }

    /// Mean value per component (zero-frequency coefficient).
    pub fn mean(&self, component: usize) -> f64 {
        self.coeffs[component][0].re
    }

    /// L2 norm over the box via Parseval, all components aggregated.
    pub fn l2_norm(&self) -> f64 {
        let vol = self.grid.box_length * self.grid.box_length;
        let sum: f64 = self
            .coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum();
        (vol * sum).sqrt()
    }

    /// Grid maximum of the pointwise Euclidean magnitude.
    pub fn linf_norm(&self) -> f64 {
        let phys: Vec<Vec<f64>> = self.to_physical();
        let mut max = 0.0f64;
        for idx in 0..self.grid.num_points() {
            let m: f64 = phys.iter().map(|c| c[idx] * c[idx]).sum::<f64>().sqrt();
            max = max.max(m);
        }
        max
    }

    /// L^p norm over the box. `p = 2` uses Parseval, `p = inf` the grid max,
    /// otherwise trapezoidal (uniform-weight) grid quadrature.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        match p {
            Exponent::Infinity => self.linf_norm(),
            Exponent::Finite(p) if p == 2.0 => self.l2_norm(),
            Exponent::Finite(p) => {
                let phys = self.to_physical();
                let dx2 = self.grid.spacing() * self.grid.spacing();
                let sum: f64 = (0..self.grid.num_points())
                    .map(|idx| {
                        let m: f64 = phys.iter().map(|c| c[idx] * c[idx]).sum::<f64>().sqrt();
                        m.powf(p)
                    })
                    .sum();
                (dx2 * sum).powf(1.0 / p)
            }
        }
    }

    /// Exact spectral Sobolev norm `(sum (1+|k|^2)^s |u^(k)|^2 * L^2)^(1/2)`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let n = self.grid.n();
        let u = self.grid.wavenumber_unit();
        let vol = self.grid.box_length * self.grid.box_length;
        let mut sum = 0.0;
        for c in &self.coeffs {
            for i in 0..n {
                let kx = self.grid.mode(i) as f64 * u;
                for j in 0..n {
                    let ky = self.grid.mode(j) as f64 * u;
                    let w = (1.0 + kx * kx + ky * ky).powf(s);
                    sum += w * c[i * n + j].norm_sqr();
                }
            }
        }
        (vol * sum).sqrt()
    }

    /// Checkpoint the field as physical samples: header `n: u64, L: f64,
    /// components: u64` then row-major f64 samples, all little-endian.
    pub fn write_checkpoint<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        w.write_all(&self.grid.box_length().to_le_bytes())?;
        w.write_all(&(self.components() as u64).to_le_bytes())?;
        for comp in self.to_physical() {
            for x in comp {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(r: &mut R) -> Result<SpectralField> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let box_length = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let ncomp = u64::from_le_bytes(b8) as usize;
        let grid = Grid::new(n, box_length)?;
        let mut samples = Vec::with_capacity(ncomp);
        for _ in 0..ncomp {
            let mut comp = Vec::with_capacity(n * n);
            for _ in 0..n * n {
                r.read_exact(&mut b8)?;
                comp.push(f64::from_le_bytes(b8));
            }
            samples.push(comp);
        }
        SpectralField::from_physical(&grid, &samples)
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x + y).collect())
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x - y).collect())
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> Arc<Grid> {
        Grid::new(n, 2.0 * std::f64::consts::PI).unwrap()
    }

    /// Random real band-limited scalar field with modes inside the dealias band.
    pub(crate) fn random_field(g: &Arc<Grid>, seed: u64, max_mode: i64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(g, 1);
        let lim = max_mode.min(g.dealias_mode_limit());
        for mx in -lim..=lim {
            for my in -lim..=lim {
                if mx == 0 && my == 0 {
                    continue;
                }
                let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                f.set_coeff(0, mx, my, a);
                let conj = f.coeff_at(0, -mx, -my);
                // enforce Hermitian symmetry pairwise
                f.set_coeff(0, mx, my, (a + conj.conj()) * 0.5);
                f.set_coeff(0, -mx, -my, ((a + conj.conj()) * 0.5).conj());
            }
        }
        f
    }

    #[test]
    fn constant_field_transforms_to_dc() {
        let g = grid(16);
        let samples = vec![vec![3.5; g.num_points()]];
        let f = SpectralField::from_physical(&g, &samples).unwrap();
        assert!((f.coeff_at(0, 0, 0) - Complex64::new(3.5, 0.0)).norm() < 1e-13);
        let rest: f64 = f.coeffs(0)[1..].iter().map(|z| z.norm()).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn single_cosine_mode() {
        let g = grid(32);
        let n = g.n();
        let dx = g.spacing();
        let samples: Vec<f64> = (0..n * n)
            .map(|idx| {
                let x = (idx / n) as f64 * dx;
                x.cos()
            })
            .collect();
        let f = SpectralField::from_physical(&g, &[samples]).unwrap();
        assert!((f.coeff_at(0, 1, 0).re - 0.5).abs() < 1e-12);
        assert!((f.coeff_at(0, -1, 0).re - 0.5).abs() < 1e-12);
        let others: f64 = (0..n * n)
            .filter(|&idx| idx != 1 * n && idx != (n - 1) * n)
            .map(|idx| f.coeffs(0)[idx].norm())
            .sum();
        assert!(others < 1e-11);
    }

    #[test]
    fn round_trip_random_field() {
        let g = grid(32);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..g.num_points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = SpectralField::from_physical(&g, &[samples.clone()]).unwrap();
        let back = f.to_physical();
        let max_err = samples
            .iter()
            .zip(&back[0])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-12, "round-trip error {max_err}");
    }

    #[test]
    fn spectral_derivative_single_mode() {
        let g = grid(32);
        let n = g.n();
        let dx = g.spacing();
        let samples: Vec<f64> = (0..n * n)
            .map(|idx| ((idx / n) as f64 * dx).sin())
            .collect();
        let f = SpectralField::from_physical(&g, &[samples]).unwrap();
        let grad = f.gradient().unwrap();
        let phys = grad.to_physical();
        for idx in 0..n * n {
            let x = (idx / n) as f64 * dx;
            assert!((phys[0][idx] - x.cos()).abs() < 1e-12);
            assert!(phys[1][idx].abs() < 1e-12);
        }
    }

    #[test]
    fn div_grad_equals_laplacian() {
        let g = grid(32);
        let f = random_field(&g, 3, 8);
        let lhs = f.gradient().unwrap().divergence().unwrap();
        let rhs = f.laplacian();
        let diff = (&lhs - &rhs).l2_norm();
        assert!(diff < 1e-12 * f.l2_norm().max(1.0));
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = grid(16);
        let samples = vec![vec![2.0; g.num_points()]];
        let f = SpectralField::from_physical(&g, &samples).unwrap();
        assert!(f.laplacian().l2_norm() < 1e-14);
    }

    #[test]
    fn mixed_partials_commute_exactly() {
        let g = grid(32);
        let f = random_field(&g, 11, 10);
        let a = f.partial(0).partial(1);
        let b = f.partial(1).partial(0);
        for (x, y) in a.coeffs(0).iter().zip(b.coeffs(0)) {
            // the two orders round the scalar products differently, so agree
            // only to the last ulp
            assert!((x - y).norm() <= 1e-15 * x.norm().max(1.0));
        }
    }

    #[test]
    fn product_identity_inside_band() {
        let g = grid(32);
        let f = random_field(&g, 5, 5).dealiased();
        let ones = {
            let samples = vec![vec![1.0; g.num_points()]];
            SpectralField::from_physical(&g, &samples).unwrap()
        };
        let p = f.pointwise_product(&ones).unwrap();
        let diff = (&p - &f).l2_norm();
        assert!(diff < 1e-12 * f.l2_norm());
    }

    #[test]
    fn product_to_sum_cosines() {
        let g = grid(32);
        let n = g.n();
        let dx = g.spacing();
        let samples: Vec<f64> = (0..n * n)
            .map(|idx| (2.0 * (idx / n) as f64 * dx).cos())
            .collect();
        let f = SpectralField::from_physical(&g, &[samples]).unwrap();
        let p = f.pointwise_product(&f).unwrap();
        // cos^2(2x) = 1/2 + cos(4x)/2, mode 4 inside the dealias band (n/3 = 10)
        assert!((p.coeff_at(0, 0, 0).re - 0.5).abs() < 1e-12);
        assert!((p.coeff_at(0, 4, 0).re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn product_matches_direct_convolution() {
        // direct double-sum convolution oracle on a small grid
        let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let f = random_field(&g, 21, 2);
        let h = random_field(&g, 22, 2);
        let p = f.pointwise_product(&h).unwrap();
        let lim = g.dealias_mode_limit();
        let half = (g.n() / 2) as i64;
        for mx in -lim..=lim {
            for my in -lim..=lim {
                let mut conv = Complex64::default();
                for ax in -half..half {
                    for ay in -half..half {
                        let bx = mx - ax;
                        let by = my - ay;
                        // wrap into the representable range; the fields only
                        // occupy |m| <= 2 so aliasing never contributes here
                        if bx.abs() > half || by.abs() > half {
                            continue;
                        }
                        conv += f.coeff_at(0, ax, ay) * h.coeff_at(0, bx, by);
                    }
                }
                let got = p.coeff_at(0, mx, my);
                assert!(
                    (got - conv).norm() < 1e-12,
                    "mode ({mx},{my}): got {got}, conv {conv}"
                );
            }
        }
    }

    #[test]
    fn dealias_zeroes_high_modes_exactly() {
        let g = grid(32);
        let f = random_field(&g, 9, 15);
        let p = f.pointwise_product(&f).unwrap();
        let lim = g.dealias_mode_limit();
        for i in 0..g.n() {
            for j in 0..g.n() {
                if g.mode(i).abs() > lim || g.mode(j).abs() > lim {
                    let z = p.coeffs(0)[i * g.n() + j];
                    assert_eq!(z, Complex64::default());
                }
            }
        }
    }

    #[test]
    fn parseval_matches_grid_quadrature() {
        let g = grid(32);
        let f = random_field(&g, 13, 9);
        let phys = f.to_physical();
        let dx2 = g.spacing() * g.spacing();
        let quad: f64 = phys[0].iter().map(|x| x * x).sum::<f64>() * dx2;
        let l2 = f.l2_norm();
        assert!((quad.sqrt() - l2).abs() < 1e-12 * l2);
    }

    #[test]
    fn product_symmetric_bitwise() {
        let g = grid(32);
        let f = random_field(&g, 17, 8);
        let h = random_field(&g, 18, 8);
        let a = f.pointwise_product(&h).unwrap();
        let b = h.pointwise_product(&f).unwrap();
        for (x, y) in a.coeffs(0).iter().zip(b.coeffs(0)) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let g = grid(16);
        let f = random_field(&g, 31, 4);
        let mut buf = Vec::new();
        f.write_checkpoint(&mut buf).unwrap();
        let back = SpectralField::read_checkpoint(&mut buf.as_slice()).unwrap();
        assert_eq!(back.components(), 1);
        let diff = (&back - &f).l2_norm();
        assert!(diff < 1e-12 * f.l2_norm().max(1.0));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let g = grid(16);
        let samples = vec![vec![0.0; 10]];
        assert!(SpectralField::from_physical(&g, &samples).is_err());
    }
}
