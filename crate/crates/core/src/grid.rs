use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{Axis, ConservedState, GasModel, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Ghost cells replicate the nearest interior cell.
    ZeroGradient,
    Periodic,
}

/// Ghost width needed by the WENO stencil plus a CNN of half-width `k`.
pub fn required_ghost(k: usize) -> usize {
    3 + k.saturating_sub(1)
}

/// Uniform grid on the unit square with `nx * ny` left-aligned nodes
/// `x_i = i / nx`, `y_j = j / ny`, surrounded by `ghost` layers.
///
/// Storage is row-major with `x` fastest, ghosts included.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    nx: usize,
    ny: usize,
    ghost: usize,
    data: Vec<ConservedState>,
}

impl FieldGrid {
    pub fn new(nx: usize, ny: usize, ghost: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config(format!("grid {nx}x{ny} is empty")));
        }
        if ghost < 3 {
            return Err(Error::Config(format!("at least 3 ghost layers are needed, got {ghost}")));
        }
        if ghost > nx || ghost > ny {
            return Err(Error::Config(format!(
                "grid {nx}x{ny} is smaller than its {ghost} ghost layers"
            )));
        }
        let len = (nx + 2 * ghost) * (ny + 2 * ghost);
        Ok(Self {
            nx,
            ny,
            ghost,
            data: vec![ConservedState::default(); len],
        })
    }

    /// Sample a primitive-state function at the nodes.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        ghost: usize,
        gas: &GasModel,
        mut f: impl FnMut(f64, f64) -> PrimitiveState,
    ) -> Result<Self> {
        let mut grid = Self::new(nx, ny, ghost)?;
        let (dx, dy) = (grid.dx(), grid.dy());
        for j in 0..ny {
            for i in 0..nx {
                let w = f(i as f64 * dx, j as f64 * dy);
                w.check_physical()?;
                grid.set(i, j, w.to_conserved(gas));
            }
        }
        Ok(grid)
    }

    pub fn from_interior(field: &StateField, ghost: usize) -> Result<Self> {
        let mut grid = Self::new(field.nx, field.ny, ghost)?;
        for j in 0..field.ny {
            for i in 0..field.nx {
                grid.set(i, j, field.get(i, j));
            }
        }
        Ok(grid)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn ghost(&self) -> usize {
        self.ghost
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    /// Row length including ghosts.
    pub fn stride(&self) -> usize {
        self.nx + 2 * self.ghost
    }

    pub fn padded_rows(&self) -> usize {
        self.ny + 2 * self.ghost
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        (j + self.ghost) * self.stride() + i + self.ghost
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> ConservedState {
        self.data[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, q: ConservedState) {
        let k = self.index(i, j);
        self.data[k] = q;
    }

    /// All cells, ghosts included.
    pub fn raw(&self) -> &[ConservedState] {
        &self.data
    }

    pub fn raw_mut(&mut self) -> &mut [ConservedState] {
        &mut self.data
    }

    pub fn interior(&self) -> impl Iterator<Item = &ConservedState> + '_ {
        let (g, s) = (self.ghost, self.stride());
        (0..self.ny).flat_map(move |j| self.data[(j + g) * s + g..(j + g) * s + g + self.nx].iter())
    }

    /// Padded row `j` (interior row index), contiguous.
    pub fn row(&self, j: usize) -> &[ConservedState] {
        let s = self.stride();
        let start = (j + self.ghost) * s;
        &self.data[start..start + s]
    }

    /// Copy line `l` along `axis` (ghosts included) into `out`.
    ///
    /// Columns are returned transposed (momentum components swapped) so
    /// that every line can be treated as an x-direction problem.
    pub fn gather_line(&self, axis: Axis, l: usize, out: &mut Vec<ConservedState>) {
        out.clear();
        match axis {
            Axis::X => out.extend_from_slice(self.row(l)),
            Axis::Y => {
                let s = self.stride();
                let col = l + self.ghost;
                out.extend((0..self.padded_rows()).map(|r| self.data[r * s + col].transposed()));
            }
        }
    }

    pub fn fill_ghosts(&mut self, boundary: Boundary) {
        let (nx, ny, g, s) = (self.nx, self.ny, self.ghost, self.stride());
        // x-direction ghosts on interior rows
        for j in g..g + ny {
            let row = j * s;
            for k in 0..g {
                let (left, right) = match boundary {
                    Boundary::ZeroGradient => (row + g, row + g + nx - 1),
                    Boundary::Periodic => (row + g + nx - g + k, row + g + k),
                };
                self.data[row + k] = self.data[left];
                self.data[row + g + nx + k] = self.data[right];
            }
        }
        // y-direction ghosts on full padded rows (fills corners too)
        for k in 0..g {
            let (below, above) = match boundary {
                Boundary::ZeroGradient => (g, g + ny - 1),
                Boundary::Periodic => (g + ny - g + k, g + k),
            };
            for i in 0..s {
                self.data[k * s + i] = self.data[below * s + i];
                self.data[(g + ny + k) * s + i] = self.data[above * s + i];
            }
        }
    }

    pub fn to_state_field(&self) -> StateField {
        StateField {
            nx: self.nx,
            ny: self.ny,
            data: self.interior().copied().collect(),
        }
    }
}

/// Interior conserved states only, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<ConservedState>,
}

impl StateField {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> ConservedState {
        self.data[j * self.nx + i]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.data.iter().map(|q| q.0[c]).collect()
    }

    pub fn totals(&self) -> [f64; 4] {
        let mut t = [0.0; 4];
        for q in &self.data {
            for c in 0..4 {
                t[c] += q.0[c];
            }
        }
        t
    }

    /// Pointwise subsampling onto a coarser aligned grid.
    pub fn restrict(&self, nx: usize, ny: usize) -> Result<StateField> {
        restrict_nodes(&self.data, self.nx, self.ny, nx, ny).map(|data| StateField { nx, ny, data })
    }

    /// Copy each coarse node onto the aligned fine nodes (others untouched)
    /// by repeating the coarse value over its block.
    pub fn inject(&self, nx: usize, ny: usize) -> Result<StateField> {
        let (fx, fy) = ratio(nx, ny, self.nx, self.ny)?;
        let data = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i / fx, j / fy))
            .collect();
        Ok(StateField { nx, ny, data })
    }
}

fn ratio(fine_nx: usize, fine_ny: usize, nx: usize, ny: usize) -> Result<(usize, usize)> {
    if nx == 0 || ny == 0 || fine_nx % nx != 0 || fine_ny % ny != 0 {
        return Err(Error::Alignment(format!(
            "{fine_nx}x{fine_ny} is not an integer refinement of {nx}x{ny}"
        )));
    }
    Ok((fine_nx / nx, fine_ny / ny))
}

/// Subsample row-major `fine` (`fine_nx * fine_ny`) at every aligned node of
/// the `nx * ny` grid: coarse `(i, j)` takes fine `(r i, r j)`.
pub fn restrict_nodes<T: Copy>(
    fine: &[T],
    fine_nx: usize,
    fine_ny: usize,
    nx: usize,
    ny: usize,
) -> Result<Vec<T>> {
    let (fx, fy) = ratio(fine_nx, fine_ny, nx, ny)?;
    if fine.len() != fine_nx * fine_ny {
        return Err(Error::ShapeMismatch(format!(
            "field has {} values, expected {}",
            fine.len(),
            fine_nx * fine_ny
        )));
    }
    Ok((0..ny)
        .flat_map(|j| (0..nx).map(move |i| fine[(j * fy) * fine_nx + i * fx]))
        .collect())
}
