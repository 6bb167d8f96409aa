use alloc::vec;
use alloc::vec::Vec;

use crate::error::{require_positive, Error, Result};
use crate::math;

/// Uniform cell-centred grid. `origin` is the lower corner of cell (0, 0, 0);
/// `k = 0` is the bottom layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub origin: [f64; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::invalid(
                "grid dimensions",
                "every axis needs at least one cell",
            ));
        }
        for s in spacing {
            require_positive("grid spacing", s)?;
        }
        Ok(Self {
            nx: dims[0],
            ny: dims[1],
            nz: dims[2],
            dx: spacing[0],
            dy: spacing[1],
            dz: spacing[2],
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn column(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / (self.nx * self.ny);
        (i, j, k)
    }

    pub fn center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx,
            self.origin[1] + (j as f64 + 0.5) * self.dy,
            self.origin[2] + (k as f64 + 0.5) * self.dz,
        ]
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy * self.dz
    }

    /// Upper corner of the grid.
    pub fn extent(&self) -> [f64; 3] {
        [
            self.origin[0] + self.nx as f64 * self.dx,
            self.origin[1] + self.ny as f64 * self.dy,
            self.origin[2] + self.nz as f64 * self.dz,
        ]
    }

    /// Index of the cell containing `coordinate` along `axis`, if inside.
    pub fn locate(&self, axis: usize, coordinate: f64) -> Option<usize> {
        let (n, d) = match axis {
            0 => (self.nx, self.dx),
            1 => (self.ny, self.dy),
            _ => (self.nz, self.dz),
        };
        let f = (coordinate - self.origin[axis]) / d;
        if f < 0.0 {
            return None;
        }
        let i = math::floor(f) as usize;
        if i < n {
            Some(i)
        } else if f <= n as f64 {
            Some(n - 1)
        } else {
            None
        }
    }
}

/// What occupies a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellTag {
    Void,
    Workpiece,
    Backing,
}

impl CellTag {
    pub fn code(self) -> u8 {
        match self {
            CellTag::Void => 0,
            CellTag::Workpiece => 1,
            CellTag::Backing => 2,
        }
    }
}

/// Temperatures on the grid, the cell tags, the clock and the tool position.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalField {
    grid: Grid,
    temperature: Vec<f64>,
    tags: Vec<CellTag>,
    time: f64,
    tool: [f64; 2],
}

impl ThermalField {
    /// Every non-void cell starts at `initial` kelvin.
    pub fn new(grid: Grid, tags: Vec<CellTag>, initial: f64) -> Result<Self> {
        if tags.len() != grid.len() {
            return Err(Error::invalid(
                "cell tags",
                "length does not match the grid",
            ));
        }
        require_positive("initial temperature", initial)?;
        Ok(Self {
            grid,
            temperature: vec![initial; grid.len()],
            tags,
            time: 0.0,
            tool: [0.0, 0.0],
        })
    }

    pub fn uniform(grid: Grid, tag: CellTag, initial: f64) -> Result<Self> {
        Self::new(grid, vec![tag; grid.len()], initial)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperature
    }

    pub(crate) fn temperatures_mut(&mut self) -> &mut [f64] {
        &mut self.temperature
    }

    pub fn tags(&self) -> &[CellTag] {
        &self.tags
    }

    pub fn temperature(&self, i: usize, j: usize, k: usize) -> f64 {
        self.temperature[self.grid.index(i, j, k)]
    }

    /// Overwrite one cell's temperature; used to set up initial conditions.
    pub fn set_temperature(&mut self, idx: usize, value: f64) -> Result<()> {
        require_positive("temperature", value)?;
        self.temperature[idx] = value;
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    pub fn tool_position(&self) -> [f64; 2] {
        self.tool
    }

    pub(crate) fn set_tool_position(&mut self, position: [f64; 2]) {
        self.tool = position;
    }

    /// Highest temperature over cells with the given tag.
    pub fn max_temperature(&self, tag: CellTag) -> Option<(usize, f64)> {
        self.temperature
            .iter()
            .zip(&self.tags)
            .enumerate()
            .filter(|(_, (_, t))| **t == tag)
            .map(|(i, (v, _))| (i, *v))
            .fold(None, |best, (i, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((i, v)),
            })
    }

    /// Trilinear interpolation between cell centres, ignoring void cells.
    /// Points outside the grid return `None`; points between the outermost
    /// centre and the boundary take the nearest centre value along that axis.
    pub fn sample(&self, point: [f64; 3]) -> Option<f64> {
        let g = &self.grid;
        let ext = g.extent();
        let spacing = [g.dx, g.dy, g.dz];
        let mut point = point;
        for a in 0..3 {
            let tol = 1e-9 * spacing[a];
            if point[a] < g.origin[a] - tol || point[a] > ext[a] + tol {
                return None;
            }
            point[a] = point[a].clamp(g.origin[a], ext[a]);
        }
        let axis = |a: usize, n: usize, d: f64| -> (usize, usize, f64) {
            if n == 1 {
                return (0, 0, 0.0);
            }
            let f = (point[a] - g.origin[a]) / d - 0.5;
            let i0 = (math::floor(f).max(0.0) as usize).min(n - 2);
            let w = (f - i0 as f64).clamp(0.0, 1.0);
            (i0, i0 + 1, w)
        };
        let (i0, i1, wx) = axis(0, g.nx, g.dx);
        let (j0, j1, wy) = axis(1, g.ny, g.dy);
        let (k0, k1, wz) = axis(2, g.nz, g.dz);
        let mut acc = 0.0;
        let mut weight = 0.0;
        for (k, fz) in [(k0, 1.0 - wz), (k1, wz)] {
            for (j, fy) in [(j0, 1.0 - wy), (j1, wy)] {
                for (i, fx) in [(i0, 1.0 - wx), (i1, wx)] {
                    let w = fx * fy * fz;
                    let idx = g.index(i, j, k);
                    if w > 0.0 && self.tags[idx] != CellTag::Void {
                        acc += w * self.temperature[idx];
                        weight += w;
                    }
                }
            }
        }
        if weight > 0.0 {
            Some(acc / weight)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip_and_locate() {
        let g = Grid::new([4, 3, 2], [1.0, 2.0, 0.5], [0.0, -1.0, -0.5]).unwrap();
        for idx in 0..g.len() {
            let (i, j, k) = g.coords(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
        assert_eq!(g.locate(0, 3.5), Some(3));
        assert_eq!(g.locate(0, 4.0), Some(3));
        assert_eq!(g.locate(0, 4.1), None);
        assert_eq!(g.locate(1, -1.0), Some(0));
        assert_eq!(g.locate(2, -0.6), None);
        assert_eq!(g.extent(), [4.0, 5.0, 0.5]);
        assert!(Grid::new([0, 1, 1], [1.0; 3], [0.0; 3]).is_err());
    }

    #[test]
    fn sample_is_exact_for_linear_fields() {
        let g = Grid::new([5, 4, 3], [1.0, 1.0, 1.0], [0.0; 3]).unwrap();
        let mut f = ThermalField::uniform(g, CellTag::Workpiece, 300.0).unwrap();
        for idx in 0..g.len() {
            let (i, j, k) = g.coords(idx);
            let c = g.center(i, j, k);
            f.set_temperature(idx, 300.0 + 2.0 * c[0] + 3.0 * c[1] - c[2])
                .unwrap();
        }
        let p = [2.2, 1.7, 1.3];
        let v = f.sample(p).unwrap();
        assert!((v - (300.0 + 4.4 + 5.1 - 1.3)).abs() < 1e-10);
        assert!(f.sample([6.0, 1.0, 1.0]).is_none());
    }
}
