//! Points in 3N-dimensional electron-coordinate space.

use alloc::vec::Vec;

use crate::error::{NdaError, Result};

/// A configuration `R = (r_1, ..., r_N)` in Bohr, stored flat as
/// `[x_1, y_1, z_1, x_2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    coords: Vec<f64>,
    n_particles: usize,
}

impl Configuration {
    pub fn new(n_particles: usize, coords: Vec<f64>) -> Result<Self> {
        if n_particles == 0 {
            return Err(crate::error::invalid("a configuration needs at least one particle"));
        }
        check_coords(n_particles, &coords)?;
        Ok(Self { coords, n_particles })
    }

    pub fn from_positions(positions: &[[f64; 3]]) -> Result<Self> {
        let coords = positions.iter().flat_map(|p| p.iter().copied()).collect();
        Self::new(positions.len(), coords)
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn position(&self, i: usize) -> [f64; 3] {
        [self.coords[3 * i], self.coords[3 * i + 1], self.coords[3 * i + 2]]
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// Validates a raw coordinate slice against a particle count.
pub fn check_coords(n_particles: usize, coords: &[f64]) -> Result<()> {
    if coords.len() != 3 * n_particles {
        return Err(NdaError::DimensionMismatch {
            expected: 3 * n_particles,
            got: coords.len(),
        });
    }
    if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
        return Err(NdaError::NonFinite(i));
    }
    Ok(())
}

#[inline]
pub(crate) fn pos(coords: &[f64], i: usize) -> [f64; 3] {
    [coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]]
}

#[inline]
pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    #[allow(unused_imports)]
    use num_traits::Float;
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn distance(coords: &[f64], i: usize, j: usize) -> f64 {
    let a = pos(coords, i);
    let b = pos(coords, j);
    norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}
