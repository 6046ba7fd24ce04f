use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{check_dim, lattice};

/// Fourier coefficients `h_n`, `n` in `[-cutoff, cutoff]^N`, in the value
/// convention `h(x) = sum_n h_n e^{i n.x}`. Stored densely in row-major
/// order with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    dim: usize,
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(dim: usize, cutoff: usize) -> Result<Self> {
        check_dim(dim)?;
        let side = 2 * cutoff + 1;
        Ok(Self { dim, cutoff, coeffs: vec![Complex64::new(0.0, 0.0); side.pow(dim as u32)] })
    }

    pub fn from_fn(dim: usize, cutoff: usize, mut f: impl FnMut(&[i64]) -> Complex64) -> Result<Self> {
        let mut field = Self::zeros(dim, cutoff)?;
        for (slot, n) in field.coeffs.iter_mut().zip(lattice(dim, cutoff)) {
            *slot = f(&n);
        }
        Ok(field)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Frequencies in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = Vec<i64>> {
        lattice(self.dim, self.cutoff)
    }

    fn index(&self, n: &[i64]) -> Option<usize> {
        if n.len() != self.dim {
            return None;
        }
        let c = self.cutoff as i64;
        let side = 2 * c + 1;
        let mut idx = 0i64;
        for &k in n {
            if k.abs() > c {
                return None;
            }
            idx = idx * side + (k + c);
        }
        Some(idx as usize)
    }

    /// `h_n`, zero outside the cutoff.
    pub fn get(&self, n: &[i64]) -> Complex64 {
        self.index(n).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set(&mut self, n: &[i64], value: Complex64) -> Result<()> {
        let i = self
            .index(n)
            .ok_or_else(|| Error::DimensionMismatch(format!("frequency {n:?} outside cutoff {}", self.cutoff)))?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// Projection onto (or zero extension to) another cutoff.
    pub fn truncate(&self, cutoff: usize) -> Self {
        Self::from_fn(self.dim, cutoff, |n| self.get(n)).expect("dimension already validated")
    }

    /// `max |h_{-n} - conj(h_n)|`; zero for real-valued functions.
    pub fn hermitian_defect(&self) -> f64 {
        self.frequencies()
            .zip(&self.coeffs)
            .map(|(n, h)| {
                let neg: Vec<i64> = n.iter().map(|k| -k).collect();
                (self.get(&neg) - h.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Coefficient-wise `self - other` on the larger of the two cutoffs.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("dimensions {} and {}", self.dim, other.dim)));
        }
        Self::from_fn(self.dim, self.cutoff.max(other.cutoff), |n| self.get(n) - other.get(n))
    }

    /// Plain coefficient `l2` norm.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(sum (1+|n|^2)^a |h_n|^2)^{1/2}` in the value convention.
    pub fn sobolev_norm(&self, a: f64) -> f64 {
        self.frequencies()
            .zip(&self.coeffs)
            .map(|(n, h)| {
                let r2: i64 = n.iter().map(|k| k * k).sum();
                (1.0 + r2 as f64).powf(a) * h.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// The same norm for coefficients against the orthonormal basis
    /// `(2 pi)^{-N/2} e^{i n.x}`, which are `(2 pi)^{N/2} h_n`.
    pub fn sobolev_norm_orthonormal(&self, a: f64) -> f64 {
        (2.0 * PI).powf(self.dim as f64 / 2.0) * self.sobolev_norm(a)
    }
}

/// Samples on the uniform grid `x_j = 2 pi j / points` along each axis,
/// row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    points: usize,
    values: Vec<Complex64>,
}

impl TorusGrid {
    pub fn new(dim: usize, points: usize, values: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if points == 0 || values.len() != points.pow(dim as u32) {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {points}^{dim} grid",
                values.len()
            )));
        }
        Ok(Self { dim, points, values })
    }

    pub fn from_real(dim: usize, points: usize, values: &[f64]) -> Result<Self> {
        Self::new(dim, points, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn sample(dim: usize, points: usize, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        check_dim(dim)?;
        let h = 2.0 * PI / points as f64;
        let values = grid_indices(dim, points)
            .map(|idx| {
                let x: Vec<f64> = idx.iter().map(|&j| h * j as f64).collect();
                Complex64::new(f(&x), 0.0)
            })
            .collect();
        Self::new(dim, points, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Grid coordinates in storage order.
    pub fn coordinates(&self) -> impl Iterator<Item = Vec<f64>> {
        let h = 2.0 * PI / self.points as f64;
        grid_indices(self.dim, self.points).map(move |idx| idx.iter().map(|&j| h * j as f64).collect())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Mean of `|v|^2` over the grid.
    pub fn mean_energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

fn grid_indices(dim: usize, points: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = points.pow(dim as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat % points;
            flat /= points;
        }
        idx
    })
}

fn fft_nd(data: &mut [Complex64], dim: usize, points: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(points) } else { planner.plan_fft_forward(points) };
    let mut line = vec![Complex64::new(0.0, 0.0); points];
    for axis in 0..dim {
        let stride = points.pow((dim - 1 - axis) as u32);
        let block = stride * points;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

fn check_resolution(points: usize, cutoff: usize) -> Result<()> {
    if points < 2 * cutoff + 1 {
        return Err(Error::AliasingRisk { points, cutoff });
    }
    Ok(())
}

/// Fourier coefficients of the grid samples up to `cutoff`, by hard
/// truncation of the discrete transform.
pub fn analyze(grid: &TorusGrid, cutoff: usize) -> Result<SpectralField> {
    check_resolution(grid.points, cutoff)?;
    let mut data = grid.values.clone();
    fft_nd(&mut data, grid.dim, grid.points, false);
    let p = grid.points as i64;
    let scale = 1.0 / data.len() as f64;
    SpectralField::from_fn(grid.dim, cutoff, |n| {
        let flat = n.iter().fold(0i64, |acc, &k| acc * p + k.rem_euclid(p));
        data[flat as usize] * scale
    })
}

/// Values of the trigonometric polynomial on the `points^N` grid.
pub fn synthesize(field: &SpectralField, points: usize) -> Result<TorusGrid> {
    check_resolution(points, field.cutoff)?;
    let mut data = vec![Complex64::new(0.0, 0.0); points.pow(field.dim as u32)];
    let p = points as i64;
    for (n, h) in field.frequencies().zip(&field.coeffs) {
        let flat = n.iter().fold(0i64, |acc, &k| acc * p + k.rem_euclid(p));
        data[flat as usize] = *h;
    }
    fft_nd(&mut data, field.dim, points, true);
    TorusGrid::new(field.dim, points, data)
}
