//! Deterministic grids over feasible sets: uniform subdivisions of interval
//! boxes and barycentric lattices on simplex blocks, with axis-neighbor
//! arithmetic for the conservative basin certificates.

use crate::error::{GdlError, Result};
use crate::projection::FeasibleSet;
use std::collections::HashMap;

/// Grid over one block of the feasible set.
#[derive(Debug, Clone)]
pub enum BlockGrid {
    /// `n >= 2` equally spaced points on `[lo, hi]`.
    Interval { lo: f64, hi: f64, n: usize },
    /// Barycentric lattice `{k/m}` on the (d-1)-simplex: all compositions of
    /// `m` into `d` nonnegative parts.
    Simplex { d: usize, m: usize, compositions: Vec<Vec<usize>>, index: HashMap<Vec<usize>, usize> },
}

impl BlockGrid {
    pub fn interval(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(lo < hi) {
            return Err(GdlError::input("interval grid needs lo < hi and at least 2 points"));
        }
        Ok(BlockGrid::Interval { lo, hi, n })
    }

    pub fn simplex(d: usize, m: usize) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(GdlError::input("simplex grid needs d >= 1 and m >= 1"));
        }
        let mut compositions = Vec::new();
        let mut cur = vec![0usize; d];
        enumerate_compositions(d, m, 0, m, &mut cur, &mut compositions);
        let index: HashMap<Vec<usize>, usize> = compositions
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        Ok(BlockGrid::Simplex { d, m, compositions, index })
    }

    pub fn len(&self) -> usize {
        match self {
            BlockGrid::Interval { n, .. } => *n,
            BlockGrid::Simplex { compositions, .. } => compositions.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ambient coordinates of grid node `idx` within this block.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        match self {
            BlockGrid::Interval { lo, hi, n } => {
                let step = (hi - lo) / (*n as f64 - 1.0);
                vec![lo + idx as f64 * step]
            }
            BlockGrid::Simplex { m, compositions, .. } => compositions[idx]
                .iter()
                .map(|&k| k as f64 / *m as f64)
                .collect(),
        }
    }

    /// Block-local indices one lattice move away along each free dimension.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        match self {
            BlockGrid::Interval { n, .. } => {
                let mut out = Vec::with_capacity(2);
                if idx > 0 {
                    out.push(idx - 1);
                }
                if idx + 1 < *n {
                    out.push(idx + 1);
                }
                out
            }
            BlockGrid::Simplex { d, m, compositions, index } => {
                // Free coordinates are 0..d-1; the last coordinate absorbs
                // the move so the composition stays on the lattice.
                let c = &compositions[idx];
                let mut out = Vec::new();
                for i in 0..d - 1 {
                    for delta in [-1i64, 1] {
                        let ci = c[i] as i64 + delta;
                        let cl = c[d - 1] as i64 - delta;
                        if ci < 0 || cl < 0 || ci > *m as i64 || cl > *m as i64 {
                            continue;
                        }
                        let mut cc = c.clone();
                        cc[i] = ci as usize;
                        cc[d - 1] = cl as usize;
                        out.push(index[&cc]);
                    }
                }
                out
            }
        }
    }

    /// True when the node sits on the closure of the region's escape
    /// boundary. Only interval blocks have one: a simplex is the whole
    /// strategy space of its player, its faces cannot be escaped through.
    pub fn on_boundary(&self, idx: usize) -> bool {
        match self {
            BlockGrid::Interval { n, .. } => idx == 0 || idx + 1 == *n,
            BlockGrid::Simplex { .. } => false,
        }
    }
}

fn enumerate_compositions(
    d: usize,
    m: usize,
    pos: usize,
    remaining: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if pos == d - 1 {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for k in 0..=remaining {
        cur[pos] = k;
        enumerate_compositions(d, m, pos + 1, remaining - k, cur, out);
    }
}

/// Cartesian product of block grids covering a full feasible set.
#[derive(Debug, Clone)]
pub struct ProductGrid {
    blocks: Vec<BlockGrid>,
    sizes: Vec<usize>,
    total: usize,
}

impl ProductGrid {
    pub fn new(blocks: Vec<BlockGrid>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(GdlError::input("grid needs at least one block"));
        }
        let sizes: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
        let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
        let total = total.ok_or_else(|| GdlError::numerical("grid size overflows"))?;
        if total > 200_000_000 {
            return Err(GdlError::numerical(format!(
                "grid would have {total} nodes; lower the resolution"
            )));
        }
        Ok(ProductGrid { blocks, sizes, total })
    }

    /// Grid over `set` with `resolution` nodes per free dimension. The
    /// default resolution is 201 for up to two free dimensions, 61 beyond.
    pub fn over(set: &FeasibleSet, resolution: Option<usize>) -> Result<Self> {
        let res = match resolution {
            Some(r) => {
                if r < 2 {
                    return Err(GdlError::input("grid resolution must be at least 2"));
                }
                r
            }
            None => {
                if set.free_dims() <= 2 {
                    201
                } else {
                    61
                }
            }
        };
        let blocks = match set {
            FeasibleSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| BlockGrid::interval(l, h, res))
                .collect::<Result<Vec<_>>>()?,
            FeasibleSet::SimplexProduct { dims } => dims
                .iter()
                .map(|&d| BlockGrid::simplex(d, res - 1))
                .collect::<Result<Vec<_>>>()?,
        };
        ProductGrid::new(blocks)
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn blocks(&self) -> &[BlockGrid] {
        &self.blocks
    }

    fn decompose(&self, idx: usize) -> Vec<usize> {
        let mut rem = idx;
        let mut out = vec![0usize; self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            out[i] = rem % self.sizes[i];
            rem /= self.sizes[i];
        }
        out
    }

    fn compose(&self, parts: &[usize]) -> usize {
        let mut idx = 0usize;
        for (i, &p) in parts.iter().enumerate() {
            idx = idx * self.sizes[i] + p;
        }
        idx
    }

    /// Ambient coordinates of node `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        debug_assert!(idx < self.total);
        let parts = self.decompose(idx);
        let mut out = Vec::new();
        for (b, &p) in self.blocks.iter().zip(&parts) {
            out.extend(b.point(p));
        }
        out
    }

    /// Global indices of all axis neighbors (one lattice move in one block).
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let parts = self.decompose(idx);
        let mut out = Vec::new();
        for (bi, b) in self.blocks.iter().enumerate() {
            for nb in b.neighbors(parts[bi]) {
                let mut p = parts.clone();
                p[bi] = nb;
                out.push(self.compose(&p));
            }
        }
        out
    }

    /// True when the node lies on the escape boundary of the scanned region.
    pub fn on_boundary(&self, idx: usize) -> bool {
        let parts = self.decompose(idx);
        self.blocks
            .iter()
            .zip(&parts)
            .any(|(b, &p)| b.on_boundary(p))
    }
}
