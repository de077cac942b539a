//! Finite-difference magnetization grid.

use crate::scalar::Scalar;
use crate::vec3::Vec3;

use super::params::StripGeometry;
use super::MicromagError;

/// Per-cell unit magnetization on a regular grid.
///
/// Cells are stored row-major: x fastest, then y, then z. All
/// reductions iterate in storage order so results are bit-stable.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnetizationGrid<T> {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    /// Cell edge lengths (m).
    pub cell: Vec3<T>,
    m: Vec<Vec3<T>>,
}

impl<T: Scalar> MagnetizationGrid<T> {
    pub fn uniform(nx: usize, ny: usize, nz: usize, cell: Vec3<T>, dir: Vec3<T>) -> Self {
        let d = dir.normalized();
        Self {
            nx,
            ny,
            nz,
            cell,
            m: vec![d; nx * ny * nz],
        }
    }

    pub fn from_geometry(geom: &StripGeometry<T>, t_fm: T, dir: Vec3<T>) -> Self {
        let cell = Vec3::new(geom.cell_x, geom.cell_y, t_fm);
        Self::uniform(geom.nx(), geom.ny(), 1, cell, dir)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.m.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (iz * self.ny + iy) * self.nx + ix
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> Vec3<T> {
        self.m[self.index(ix, iy, iz)]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, iz: usize, v: Vec3<T>) {
        let i = self.index(ix, iy, iz);
        self.m[i] = v;
    }

    #[inline]
    pub fn cells(&self) -> &[Vec3<T>] {
        &self.m
    }

    #[inline]
    pub fn cells_mut(&mut self) -> &mut [Vec3<T>] {
        &mut self.m
    }

    /// FM length along x (m).
    pub fn length_x(&self) -> T {
        T::of(self.nx as f64) * self.cell.x
    }

    /// Cell center x coordinate (m), origin at the left FM edge.
    pub fn x_of(&self, ix: usize) -> T {
        (T::of(ix as f64) + T::of(0.5)) * self.cell.x
    }

    /// Mean m_z over all cells, accumulated in storage order.
    pub fn mean_mz(&self) -> T {
        let mut acc = T::zero();
        for c in &self.m {
            acc = acc + c.z;
        }
        acc / T::of(self.m.len() as f64)
    }

    /// m_z averaged over y and z for each x column.
    pub fn column_mz(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.nx];
        for iz in 0..self.nz {
            for iy in 0..self.ny {
                for ix in 0..self.nx {
                    out[ix] = out[ix] + self.get(ix, iy, iz).z;
                }
            }
        }
        let n = T::of((self.ny * self.nz) as f64);
        for v in &mut out {
            *v = *v / n;
        }
        out
    }

    /// Check the unit-norm invariant | |m| − 1 | ≤ tol on every cell.
    pub fn check_norms(&self, tol: T) -> Result<(), MicromagError> {
        for (i, c) in self.m.iter().enumerate() {
            if !c.is_finite() {
                return Err(MicromagError::NonFiniteMagnetization { cell: i });
            }
            if (c.norm() - T::one()).abs() > tol {
                return Err(MicromagError::NormDrift { cell: i });
            }
        }
        Ok(())
    }
}
