use super::MeshError;

/// Spatial dimension of a grid. Two-dimensional meshes are not supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Three,
}

impl Dim {
    pub fn count(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Three => 3,
        }
    }

    pub fn from_count(d: usize) -> Result<Self, MeshError> {
        match d {
            1 => Ok(Dim::One),
            3 => Ok(Dim::Three),
            _ => Err(MeshError::InvalidArgument(format!(
                "dimension must be 1 or 3, got {d}"
            ))),
        }
    }
}

/// Uniform cell-centered box mesh with a one-cell ghost layer on every active axis.
///
/// Interior cells along an active axis use 1-based indices `1..=n`; the ghost
/// cells sit at `0` and `n + 1`. Inactive axes (y and z of a 1-D grid) have a
/// single storage slot at index `0` and no ghosts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: Dim,
    cells: [usize; 3],
    extent: [f64; 3],
    spacing: [f64; 3],
    shape: [usize; 3],
}

impl Grid {
    pub fn new(dim: Dim, cells: &[usize], extent: &[f64]) -> Result<Self, MeshError> {
        let d = dim.count();
        if cells.len() != d || extent.len() != d {
            return Err(MeshError::InvalidArgument(format!(
                "expected {d} cell counts and extents, got {} and {}",
                cells.len(),
                extent.len()
            )));
        }
        let mut c = [1usize; 3];
        let mut e = [1.0f64; 3];
        let mut s = [1.0f64; 3];
        let mut shape = [1usize; 3];
        for a in 0..d {
            if cells[a] < 2 {
                return Err(MeshError::InvalidArgument(format!(
                    "axis {a}: need at least 2 cells, got {}",
                    cells[a]
                )));
            }
            if !(extent[a] > 0.0 && extent[a].is_finite()) {
                return Err(MeshError::InvalidArgument(format!(
                    "axis {a}: extent must be positive and finite, got {}",
                    extent[a]
                )));
            }
            c[a] = cells[a];
            e[a] = extent[a];
            s[a] = extent[a] / cells[a] as f64;
            shape[a] = cells[a] + 2;
        }
        Ok(Grid {
            dim,
            cells: c,
            extent: e,
            spacing: s,
            shape,
        })
    }

    /// 1-D grid on `[0, length]`.
    pub fn line(cells: usize, length: f64) -> Result<Self, MeshError> {
        Grid::new(Dim::One, &[cells], &[length])
    }

    /// 3-D grid on `[0, lx] × [0, ly] × [0, lz]`.
    pub fn boxed(cells: [usize; 3], extent: [f64; 3]) -> Result<Self, MeshError> {
        Grid::new(Dim::Three, &cells, &extent)
    }

    /// 3-D grid of `n³` cells on the unit cube.
    pub fn unit_cube(n: usize) -> Result<Self, MeshError> {
        Grid::boxed([n; 3], [1.0; 3])
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn active_axes(&self) -> std::ops::Range<usize> {
        0..self.dim.count()
    }

    /// Interior cell counts on the active axes.
    pub fn cells(&self) -> &[usize] {
        &self.cells[..self.dim.count()]
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent[..self.dim.count()]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim.count()]
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Volume of one cell, the weight of the discrete inner product.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.extent().iter().product()
    }

    pub fn interior_len(&self) -> usize {
        self.cells().iter().product()
    }

    /// Storage slots per axis, ghosts included.
    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn storage_len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.shape[0],
            _ => self.shape[0] * self.shape[1],
        }
    }

    /// Linear storage index of storage coordinates `(i, j, k)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.shape[0] * (j + self.shape[1] * k)
    }

    /// Storage coordinates of a linear index.
    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.shape[0];
        let r = idx / self.shape[0];
        [i, r % self.shape[1], r / self.shape[1]]
    }

    /// Range of interior storage indices along `axis`.
    #[inline]
    pub fn interior_range(&self, axis: usize) -> std::ops::RangeInclusive<usize> {
        if axis < self.dim.count() {
            1..=self.cells[axis]
        } else {
            0..=0
        }
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        let c = self.coords(idx);
        (0..3).all(|a| self.interior_range(a).contains(&c[a]))
    }

    /// Cell-center position of storage coordinates. Ghost cells get the
    /// mirrored positions `-h/2` and `L + h/2`.
    pub fn center(&self, i: usize, j: usize, k: usize) -> crate::Vec3 {
        let c = [i, j, k];
        let mut x = [0.0; 3];
        for a in self.active_axes() {
            x[a] = (c[a] as f64 - 0.5) * self.spacing[a];
        }
        crate::Vec3(x)
    }

    pub fn center_of(&self, idx: usize) -> crate::Vec3 {
        let [i, j, k] = self.coords(idx);
        self.center(i, j, k)
    }

    /// Interior storage indices in x-fastest order. This order fixes the
    /// summation order of every reduction in the crate.
    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let (ri, rj, rk) = (
            self.interior_range(0),
            self.interior_range(1),
            self.interior_range(2),
        );
        rk.flat_map(move |k| {
            let ri = ri.clone();
            rj.clone()
                .flat_map(move |j| ri.clone().map(move |i| self.index(i, j, k)))
        })
    }

    /// Interior storage indices in lexicographic `(i, j, k)` order, `k` fastest.
    pub fn lexicographic_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.interior_len());
        for i in self.interior_range(0) {
            for j in self.interior_range(1) {
                for k in self.interior_range(2) {
                    out.push(self.index(i, j, k));
                }
            }
        }
        out
    }
}
