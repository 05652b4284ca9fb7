//! Uniform space-time grid and nodal fields on it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Uniform grid on `[0, Z] × [0, T]` with `nz` space nodes (boundaries
/// included) and `nt` time levels (`t = 0` included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub depth: f64,
    pub horizon: f64,
    pub nz: usize,
    pub nt: usize,
}

impl Grid1D {
    pub fn new(depth: f64, horizon: f64, nz: usize, nt: usize) -> Result<Self> {
        if nz < 3 || nt < 2 {
            return Err(Error::InvalidGrid(format!("need nz >= 3 and nt >= 2, got nz = {nz}, nt = {nt}")));
        }
        if !(depth > 0.0 && depth.is_finite() && horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidGrid(format!("need Z > 0 and T > 0, got Z = {depth}, T = {horizon}")));
        }
        Ok(Self { depth, horizon, nz, nt })
    }

    #[inline]
    pub fn dz(&self) -> f64 {
        self.depth / (self.nz - 1) as f64
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.horizon / (self.nt - 1) as f64
    }

    #[inline]
    pub fn z(&self, i: usize) -> f64 {
        self.depth * i as f64 / (self.nz - 1) as f64
    }

    #[inline]
    pub fn t(&self, n: usize) -> f64 {
        self.horizon * n as f64 / (self.nt - 1) as f64
    }

    /// Trapezoidal quadrature weights in depth.
    pub fn space_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.nz, self.dz())
    }

    /// Trapezoidal quadrature weights in time.
    pub fn time_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.nt, self.dt())
    }
}

fn trapezoid_weights(count: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; count];
    w[0] = 0.5 * step;
    w[count - 1] = 0.5 * step;
    w
}

/// Values at every node of a [`Grid1D`], stored time level by time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    nz: usize,
    nt: usize,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: &Grid1D) -> Self {
        Self { nz: grid.nz, nt: grid.nt, values: vec![0.0; grid.nz * grid.nt] }
    }

    /// Builds a field from `f(i, n)`.
    pub fn from_fn(grid: &Grid1D, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.nz * grid.nt);
        for n in 0..grid.nt {
            for i in 0..grid.nz {
                values.push(f(i, n));
            }
        }
        Self { nz: grid.nz, nt: grid.nt, values }
    }

    #[inline]
    pub fn at(&self, i: usize, n: usize) -> f64 {
        self.values[n * self.nz + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, n: usize, v: f64) {
        self.values[n * self.nz + i] = v;
    }

    #[inline]
    pub fn level(&self, n: usize) -> &[f64] {
        &self.values[n * self.nz..(n + 1) * self.nz]
    }

    #[inline]
    pub fn level_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.values[n * self.nz..(n + 1) * self.nz]
    }

    /// `(level n − 1, level n)`, the second mutable.
    pub(crate) fn split_level(&mut self, n: usize) -> (&[f64], &mut [f64]) {
        let nz = self.nz;
        let (head, tail) = self.values.split_at_mut(n * nz);
        (&head[(n - 1) * nz..], &mut tail[..nz])
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoidal depth average `(1/Z)∫ v(z, t_n) dz` for every level.
    pub fn depth_average(&self, grid: &Grid1D) -> Vec<f64> {
        let w = grid.space_weights();
        (0..self.nt)
            .map(|n| self.level(n).iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / grid.depth)
            .collect()
    }
}
