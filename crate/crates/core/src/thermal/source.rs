use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::heat::{HeatFractions, HeatPartition};
use crate::math;
use crate::thermal::field::{CellTag, ThermalField};
use crate::thermal::FluxProfile;
use crate::types::ToolGeometry;

const PROBE_SIDE_SAMPLES: usize = 720;

/// Where the tool deposits its heat for one tool position.
///
/// Every component holds `(cell, weight)` pairs whose weights sum to one, so
/// the discrete source reproduces the requested power exactly whatever the
/// rasterisation error of the footprint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SourceLayout {
    shoulder: Vec<(usize, f64)>,
    probe_side: Vec<(usize, f64)>,
    probe_tip: Vec<(usize, f64)>,
    volume: Vec<(usize, f64)>,
    cover: Vec<(usize, f64)>,
}

impl SourceLayout {
    /// Rasterise the tool centred at `position` (x, y) onto the top of the
    /// workpiece in `field`. The workpiece top is the top of the grid.
    pub fn build(
        field: &ThermalField,
        tool: &ToolGeometry,
        position: [f64; 2],
        profile: FluxProfile,
    ) -> Result<Self> {
        let g = field.grid();
        let tags = field.tags();
        let rs = tool.shoulder_radius();
        let rp = tool.probe_radius();
        let hp = tool.probe_height();
        let [x0, y0] = position;
        let ext = g.extent();
        if x0 - rs < g.origin[0] || x0 + rs > ext[0] || y0 - rs < g.origin[1] || y0 + rs > ext[1] {
            return Err(Error::FootprintOutsideGrid { x: x0, y: y0 });
        }
        let top = g.nz - 1;
        let z_top = ext[2];

        let (Some(i_lo), Some(i_hi), Some(j_lo), Some(j_hi)) = (
            g.locate(0, x0 - rs),
            g.locate(0, x0 + rs),
            g.locate(1, y0 - rs),
            g.locate(1, y0 + rs),
        ) else {
            return Err(Error::FootprintOutsideGrid { x: x0, y: y0 });
        };

        let density = |r: f64| match profile {
            FluxProfile::Uniform => 1.0,
            FluxProfile::LinearInR => r,
        };
        let n_sub = ((16.0 * g.dx.max(g.dy) / rp) as usize).clamp(8, 64);
        let sub_area = g.dx * g.dy / (n_sub * n_sub) as f64;

        let mut shoulder = Vec::new();
        let mut tip = Vec::new();
        let mut disk = Vec::new();
        let mut cover = Vec::new();
        for j in j_lo..=j_hi {
            for i in i_lo..=i_hi {
                let (mut ws, mut wt, mut wd, mut wc) = (0.0, 0.0, 0.0, 0.0);
                for sj in 0..n_sub {
                    let y = g.origin[1] + (j as f64 + (sj as f64 + 0.5) / n_sub as f64) * g.dy;
                    for si in 0..n_sub {
                        let x = g.origin[0] + (i as f64 + (si as f64 + 0.5) / n_sub as f64) * g.dx;
                        let r = math::hypot(x - x0, y - y0);
                        if r > rs {
                            continue;
                        }
                        wc += sub_area;
                        if r >= rp {
                            ws += density(r) * sub_area;
                        } else {
                            wt += density(r) * sub_area;
                            wd += sub_area;
                        }
                    }
                }
                let col = g.column(i, j);
                if wc > 0.0 {
                    cover.push((col, wc / (g.dx * g.dy)));
                }
                if ws > 0.0 {
                    shoulder.push((g.index(i, j, top), ws));
                }
                if wt > 0.0 {
                    tip.push((col, wt));
                }
                if wd > 0.0 {
                    disk.push((col, wd));
                }
            }
        }

        // Depth range of the probe, clipped to the workpiece of each column.
        let z_tip = z_top - hp;
        let workpiece_bottom = |col: usize| -> usize {
            let (i, j) = (col % g.nx, col / g.nx);
            (0..g.nz)
                .find(|&k| tags[g.index(i, j, k)] == CellTag::Workpiece)
                .unwrap_or(top)
        };
        let layer_overlap = |k: usize| -> f64 {
            let lo = g.origin[2] + k as f64 * g.dz;
            let hi = lo + g.dz;
            (hi.min(z_top) - lo.max(z_tip)).max(0.0)
        };

        let mut side: BTreeMap<usize, f64> = BTreeMap::new();
        for s in 0..PROBE_SIDE_SAMPLES {
            let theta = 2.0 * PI * (s as f64 + 0.5) / PROBE_SIDE_SAMPLES as f64;
            let x = x0 + rp * math::cos(theta);
            let y = y0 + rp * math::sin(theta);
            let (Some(i), Some(j)) = (g.locate(0, x), g.locate(1, y)) else {
                return Err(Error::FootprintOutsideGrid { x: x0, y: y0 });
            };
            let col = g.column(i, j);
            let k0 = workpiece_bottom(col);
            for k in k0..g.nz {
                let w = layer_overlap(k);
                if w > 0.0 {
                    *side.entry(g.index(i, j, k)).or_insert(0.0) += w;
                }
            }
            if k0 == top && layer_overlap(top) == 0.0 {
                *side.entry(g.index(i, j, top)).or_insert(0.0) += 1.0;
            }
        }
        let probe_side: Vec<(usize, f64)> = side.into_iter().collect();

        let tip_layer = |col: usize| -> usize {
            let k = g.locate(2, z_tip - 1e-9 * g.dz).unwrap_or(0);
            k.max(workpiece_bottom(col)).min(top)
        };
        let probe_tip: Vec<(usize, f64)> = tip
            .iter()
            .map(|&(col, w)| (g.index(col % g.nx, col / g.nx, tip_layer(col)), w))
            .collect();

        let mut volume = Vec::new();
        for &(col, w) in &disk {
            let (i, j) = (col % g.nx, col / g.nx);
            let k0 = workpiece_bottom(col);
            let mut placed = false;
            for k in k0..g.nz {
                let o = layer_overlap(k);
                if o > 0.0 {
                    volume.push((g.index(i, j, k), w * o));
                    placed = true;
                }
            }
            if !placed {
                volume.push((g.index(i, j, top), w));
            }
        }

        let mut layout = Self {
            shoulder,
            probe_side,
            probe_tip,
            volume,
            cover,
        };
        for part in [
            &mut layout.shoulder,
            &mut layout.probe_side,
            &mut layout.probe_tip,
            &mut layout.volume,
        ] {
            normalise(part);
        }
        Ok(layout)
    }

    /// `(column, fraction)` of the top face of each column covered by the shoulder.
    pub fn cover(&self) -> &[(usize, f64)] {
        &self.cover
    }

    pub fn shoulder_cells(&self) -> &[(usize, f64)] {
        &self.shoulder
    }

    pub fn probe_side_cells(&self) -> &[(usize, f64)] {
        &self.probe_side
    }

    pub fn probe_tip_cells(&self) -> &[(usize, f64)] {
        &self.probe_tip
    }

    pub fn volume_cells(&self) -> &[(usize, f64)] {
        &self.volume
    }

    /// Append `(cell, watts)` sources for the given heat split to `out`.
    pub fn deposit(
        &self,
        fractions: &HeatFractions,
        partition: &HeatPartition,
        out: &mut Vec<(usize, f64)>,
    ) {
        let qs = partition.surface;
        let qv = partition.volumetric;
        for (cells, power) in [
            (&self.shoulder, qs * fractions.shoulder),
            (&self.probe_side, qs * fractions.probe_side),
            (&self.probe_tip, qs * fractions.probe_tip),
            (&self.volume, qv),
        ] {
            if power == 0.0 {
                continue;
            }
            out.extend(cells.iter().map(|&(c, w)| (c, w * power)));
        }
    }
}

fn normalise(part: &mut [(usize, f64)]) {
    let total: f64 = part.iter().map(|(_, w)| w).sum();
    if total > 0.0 {
        part.iter_mut().for_each(|(_, w)| *w /= total);
    }
}

/// Heat sources of the tool at the field's current tool position.
pub fn apply_tool_source(
    field: &ThermalField,
    tool: &ToolGeometry,
    fractions: &HeatFractions,
    partition: &HeatPartition,
    profile: FluxProfile,
) -> Result<Vec<(usize, f64)>> {
    let layout = SourceLayout::build(field, tool, field.tool_position(), profile)?;
    let mut out = Vec::new();
    layout.deposit(fractions, partition, &mut out);
    Ok(out)
}
