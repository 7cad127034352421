use super::{Grid, MeshError};
use crate::par::{self, Execution};
use crate::Vec3;

/// One 3-vector per cell of a [`Grid`], ghost layer included.
///
/// Ghost values are only meaningful right after [`fill_ghost_neumann`]; any
/// mutable access marks them stale again.
///
/// [`fill_ghost_neumann`]: VectorField::fill_ghost_neumann
#[derive(Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    data: Vec<Vec3>,
    ghosts_fresh: bool,
}

impl std::fmt::Debug for VectorField {
    // the data itself is far too long to be useful in error messages
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField")
            .field("cells", &self.grid.cells())
            .field("extent", &self.grid.extent())
            .field("ghosts_fresh", &self.ghosts_fresh)
            .finish_non_exhaustive()
    }
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            grid,
            data: vec![Vec3::ZERO; grid.storage_len()],
            ghosts_fresh: true,
        }
    }

    /// Every slot, ghosts included, set to `v`.
    pub fn uniform(grid: Grid, v: Vec3) -> Self {
        VectorField {
            grid,
            data: vec![v; grid.storage_len()],
            ghosts_fresh: true,
        }
    }

    /// Samples `f` at interior cell centers and Neumann-fills the ghosts.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(Vec3) -> Vec3) -> Self {
        let mut out = VectorField::zeros(grid);
        for idx in grid.interior_indices() {
            out.data[idx] = f(grid.center_of(idx));
        }
        out.fill_ghost_neumann();
        out
    }

    /// Builds a field from interior values listed in x-fastest order.
    pub fn from_interior(grid: Grid, values: &[Vec3]) -> Result<Self, MeshError> {
        if values.len() != grid.interior_len() {
            return Err(MeshError::InvalidArgument(format!(
                "expected {} interior values, got {}",
                grid.interior_len(),
                values.len()
            )));
        }
        let mut out = VectorField::zeros(grid);
        for (idx, &v) in grid.interior_indices().zip(values) {
            out.data[idx] = v;
        }
        out.fill_ghost_neumann();
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Full storage, ghosts included.
    pub fn as_slice(&self) -> &[Vec3] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Vec3] {
        self.ghosts_fresh = false;
        &mut self.data
    }

    pub fn ghosts_fresh(&self) -> bool {
        self.ghosts_fresh
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.data[self.grid.index(i, j, k)]
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Vec3 {
        self.data[idx]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Vec3) {
        let idx = self.grid.index(i, j, k);
        self.set_at(idx, v);
    }

    pub fn set_at(&mut self, idx: usize, v: Vec3) {
        self.ghosts_fresh = false;
        self.data[idx] = v;
    }

    /// Interior values in x-fastest order.
    pub fn interior(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.grid.interior_indices().map(move |i| self.data[i])
    }

    pub(crate) fn check_same_grid(&self, other: &VectorField) -> Result<(), MeshError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(MeshError::InvalidArgument(
                "fields live on different grids".into(),
            ))
        }
    }

    /// Homogeneous Neumann ghost fill: each ghost copies its interior neighbour.
    ///
    /// Axes are filled in order x, y, z, each sweep covering the full storage
    /// range of the other axes, so edge and corner ghosts end up equal to the
    /// nearest interior cell.
    pub fn fill_ghost_neumann(&mut self) {
        let g = self.grid;
        let shape = g.shape();
        for a in g.active_axes() {
            let n = g.cells()[a];
            let s = g.stride(a);
            let (b, c) = match a {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            for q in 0..shape[c] {
                for p in 0..shape[b] {
                    let mut coord = [0usize; 3];
                    coord[b] = p;
                    coord[c] = q;
                    let base = g.index(coord[0], coord[1], coord[2]);
                    self.data[base] = self.data[base + s];
                    self.data[base + (n + 1) * s] = self.data[base + n * s];
                }
            }
        }
        self.ghosts_fresh = true;
    }

    pub fn with_ghosts_filled(mut self) -> Self {
        self.fill_ghost_neumann();
        self
    }

    /// Pointwise map over every slot; ghost freshness carries over because
    /// the map is applied to the ghosts as well.
    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> VectorField {
        VectorField {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
            ghosts_fresh: self.ghosts_fresh,
        }
    }

    /// Pointwise combination of two fields over every slot.
    pub fn zip_map(
        &self,
        other: &VectorField,
        f: impl Fn(Vec3, Vec3) -> Vec3,
    ) -> Result<VectorField, MeshError> {
        self.check_same_grid(other)?;
        Ok(VectorField {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            ghosts_fresh: self.ghosts_fresh && other.ghosts_fresh,
        })
    }

    /// In-place `self[i] = f(a[i], b[i])` over every slot, without allocating.
    pub fn zip_assign(
        &mut self,
        a: &VectorField,
        b: &VectorField,
        f: impl Fn(Vec3, Vec3) -> Vec3,
    ) -> Result<(), MeshError> {
        self.check_same_grid(a)?;
        self.check_same_grid(b)?;
        for ((out, &x), &y) in self.data.iter_mut().zip(&a.data).zip(&b.data) {
            *out = f(x, y);
        }
        self.ghosts_fresh = a.ghosts_fresh && b.ghosts_fresh;
        Ok(())
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, MeshError> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, MeshError> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> VectorField {
        self.map(|v| v * s)
    }

    /// Pointwise cross product `self × other`.
    pub fn cross(&self, other: &VectorField) -> Result<VectorField, MeshError> {
        self.zip_map(other, Vec3::cross)
    }

    /// Pointwise projection back onto the unit sphere.
    pub fn normalized(&self) -> VectorField {
        self.map(Vec3::normalized)
    }

    /// Seven-point (three-point in 1-D) Laplacian on the interior. Ghost slots
    /// of the result are zero and must be refilled before any stencil reads them.
    pub fn laplacian(&self) -> VectorField {
        let mut out = VectorField::zeros(self.grid);
        self.laplacian_into(&mut out, Execution::default());
        out
    }

    pub fn laplacian_into(&self, out: &mut VectorField, exec: Execution) {
        debug_assert!(self.ghosts_fresh, "laplacian of a field with stale ghosts");
        let g = self.grid;
        let dims = g.dim().count();
        let mut inv_h2 = [0.0; 3];
        let mut strides = [0usize; 3];
        for a in 0..dims {
            inv_h2[a] = 1.0 / (g.spacing()[a] * g.spacing()[a]);
            strides[a] = g.stride(a);
        }
        let src = &self.data;
        out.fill_interior_with(exec, |c| {
            let centre = src[c];
            let mut acc = Vec3::ZERO;
            for a in 0..dims {
                let s = strides[a];
                acc += (src[c + s] - 2.0 * centre + src[c - s]) * inv_h2[a];
            }
            acc
        });
    }

    /// Overwrites every interior slot with `f(storage_index)`. Ghosts are left
    /// stale. Runs row-parallel when `exec` allows it and the grid is large.
    pub fn fill_interior_with<F>(&mut self, exec: Execution, f: F)
    where
        F: Fn(usize) -> Vec3 + Sync + Send,
    {
        let g = self.grid;
        let shape = g.shape();
        let nx = g.cells()[0];
        self.ghosts_fresh = false;
        par::for_each_row(exec, g.interior_len(), &mut self.data, shape[0], |r, row| {
            let (j, k) = (r % shape[1], r / shape[1]);
            if !g.interior_range(1).contains(&j) || !g.interior_range(2).contains(&k) {
                return;
            }
            let base = g.index(0, j, k);
            for i in 1..=nx {
                row[i] = f(base + i);
            }
        });
    }

    /// Forward link differences `(f[i+1] - f[i]) / h_a` on every axis.
    pub fn gradient(&self) -> Gradient {
        debug_assert!(self.ghosts_fresh, "gradient of a field with stale ghosts");
        let g = self.grid;
        let mut axes = Vec::with_capacity(g.dim().count());
        for a in g.active_axes() {
            let s = g.stride(a);
            let inv_h = 1.0 / g.spacing()[a];
            let mut links = Vec::new();
            let mut lo = [g.interior_range(0), g.interior_range(1), g.interior_range(2)];
            // links run from the low ghost to the last interior cell along `a`
            lo[a] = 0..=g.cells()[a];
            for k in lo[2].clone() {
                for j in lo[1].clone() {
                    for i in lo[0].clone() {
                        let idx = g.index(i, j, k);
                        links.push((self.data[idx + s] - self.data[idx]) * inv_h);
                    }
                }
            }
            axes.push(links);
        }
        Gradient {
            cell_volume: g.cell_volume(),
            axes,
        }
    }

    /// `⟨f, g⟩ = |cell| · Σ f·g` over interior cells.
    pub fn inner(&self, other: &VectorField) -> Result<f64, MeshError> {
        self.check_same_grid(other)?;
        let sum: f64 = self
            .grid
            .interior_indices()
            .map(|i| self.data[i].dot(other.data[i]))
            .sum();
        Ok(sum * self.grid.cell_volume())
    }

    pub fn norm_l2_sq(&self) -> f64 {
        let sum: f64 = self.interior().map(Vec3::norm_sq).sum();
        sum * self.grid.cell_volume()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_l2_sq().sqrt()
    }

    /// Largest absolute component over interior cells.
    pub fn norm_linf(&self) -> f64 {
        self.interior().map(Vec3::max_abs).fold(0.0, f64::max)
    }

    /// `sqrt(‖f‖₂² + ‖∇_h f‖₂²)`; needs fresh ghosts.
    pub fn norm_h1(&self) -> f64 {
        (self.norm_l2_sq() + self.gradient().norm_sq()).sqrt()
    }

    /// `sqrt(|cell| · Σ |self - other|²)` without allocating.
    pub fn distance_l2(&self, other: &VectorField) -> Result<f64, MeshError> {
        self.check_same_grid(other)?;
        let sum: f64 = self
            .grid
            .interior_indices()
            .map(|i| (self.data[i] - other.data[i]).norm_sq())
            .sum();
        Ok((sum * self.grid.cell_volume()).sqrt())
    }
}

/// Per-axis link differences of a field; only consumed through norms and inner products.
#[derive(Clone, Debug)]
pub struct Gradient {
    cell_volume: f64,
    axes: Vec<Vec<Vec3>>,
}

impl Gradient {
    /// Link differences along `axis`, ordered with the axis index fastest.
    pub fn axis(&self, axis: usize) -> &[Vec3] {
        &self.axes[axis]
    }

    pub fn axis_count(&self) -> usize {
        self.axes.len()
    }

    /// `‖∇_h f‖₂²`, summed over all links of all axes.
    pub fn norm_sq(&self) -> f64 {
        let sum: f64 = self
            .axes
            .iter()
            .flat_map(|links| links.iter())
            .map(|d| d.norm_sq())
            .sum();
        sum * self.cell_volume
    }

    pub fn inner(&self, other: &Gradient) -> f64 {
        let sum: f64 = self
            .axes
            .iter()
            .zip(&other.axes)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| x.dot(*y))
            .sum();
        sum * self.cell_volume
    }
}
