//! Block-sparse matrices over cell-major coefficient vectors.
//!
//! Blocks are dense (bs x bs) and keyed by cell column inside a BTreeMap per
//! row, which keeps iteration order (and therefore floating-point sums)
//! deterministic. The assembled operators couple a cell to itself and to its
//! face neighbours, with wrap blocks in the corners on periodic meshes;
//! products of two such matrices reach second neighbours.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

/// Sparse block matrix with square blocks of size `bs`.
#[derive(Debug, Clone)]
pub struct BlockMat {
    n_cells: usize,
    bs: usize,
    rows: Vec<BTreeMap<usize, DMatrix<f64>>>,
}

impl BlockMat {
    pub fn new(n_cells: usize, bs: usize) -> Self {
        BlockMat {
            n_cells,
            bs,
            rows: vec![BTreeMap::new(); n_cells],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn block_size(&self) -> usize {
        self.bs
    }

    pub fn dim(&self) -> usize {
        self.n_cells * self.bs
    }

    /// Mutable access to block (r, c), inserting a zero block if absent.
    pub fn block_mut(&mut self, r: usize, c: usize) -> &mut DMatrix<f64> {
        self.rows[r]
            .entry(c)
            .or_insert_with(|| DMatrix::zeros(self.bs, self.bs))
    }

    pub fn add_entry(&mut self, r: usize, c: usize, i: usize, j: usize, v: f64) {
        self.block_mut(r, c)[(i, j)] += v;
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &DMatrix<f64>)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, b)| (r, c, b)))
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim());
        let mut y = vec![0.0; self.dim()];
        let bs = self.bs;
        for (r, row) in self.rows.iter().enumerate() {
            let out = &mut y[r * bs..(r + 1) * bs];
            for (&c, b) in row {
                let xs = &x[c * bs..(c + 1) * bs];
                for i in 0..bs {
                    let mut acc = 0.0;
                    for j in 0..bs {
                        acc += b[(i, j)] * xs[j];
                    }
                    out[i] += acc;
                }
            }
        }
        y
    }

    /// Premultiply by a diagonal matrix given entrywise: A <- D A.
    pub fn scale_rows(&mut self, d: &[f64]) {
        debug_assert_eq!(d.len(), self.dim());
        let bs = self.bs;
        for (r, row) in self.rows.iter_mut().enumerate() {
            for b in row.values_mut() {
                for i in 0..bs {
                    let s = d[r * bs + i];
                    for j in 0..bs {
                        b[(i, j)] *= s;
                    }
                }
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        for row in &mut self.rows {
            for b in row.values_mut() {
                *b *= a;
            }
        }
    }

    pub fn scaled(&self, a: f64) -> BlockMat {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// self += a * other.
    pub fn axpy(&mut self, a: f64, other: &BlockMat) {
        debug_assert_eq!(self.dim(), other.dim());
        for (r, c, b) in other.blocks() {
            let tgt = self.block_mut(r, c);
            *tgt += b * a;
        }
    }

    /// C = self * other.
    pub fn matmul(&self, other: &BlockMat) -> BlockMat {
        debug_assert_eq!(self.dim(), other.dim());
        let mut out = BlockMat::new(self.n_cells, self.bs);
        for (r, row) in self.rows.iter().enumerate() {
            for (&k, a) in row {
                for (&c, b) in &other.rows[k] {
                    let tgt = out.block_mut(r, c);
                    tgt.gemm(1.0, a, b, 1.0);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BlockMat {
        let mut out = BlockMat::new(self.n_cells, self.bs);
        for (r, c, b) in self.blocks() {
            *out.block_mut(c, r) = b.transpose();
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let bs = self.bs;
        let mut m = DMatrix::zeros(dim, dim);
        for (r, c, b) in self.blocks() {
            for i in 0..bs {
                for j in 0..bs {
                    m[(r * bs + i, c * bs + j)] = b[(i, j)];
                }
            }
        }
        m
    }

    /// Largest cell-index offset |r - c| over stored blocks, with wrap
    /// distance on periodic meshes when `periodic` is set.
    pub fn max_cell_offset(&self, periodic: bool) -> usize {
        let mut off = 0;
        for (r, c, _) in self.blocks() {
            let d = r.abs_diff(c);
            let d = if periodic { d.min(self.n_cells - d) } else { d };
            off = off.max(d);
        }
        off
    }
}
