//! Row-parallel dispatch for per-cell kernels.
//!
//! Kernels write whole x-rows of a field's storage, so every output slot is
//! produced by exactly one closure call and the result does not depend on the
//! thread count. Reductions are never split across threads; they run in the
//! fixed order of [`Grid::interior_indices`](crate::Grid::interior_indices).

use crate::Vec3;

/// Below this many interior cells the serial path is always taken.
pub const PARALLEL_MIN_CELLS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Execution {
    Serial,
    /// Rayon over x-rows when the crate is built with the `parallel` feature;
    /// identical to `Serial` otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Calls `kernel(row, slice)` for every x-row of `data`, where `row` is the
/// row number `j + shape_y * k` and `slice` is that row's storage.
pub(crate) fn for_each_row<F>(
    exec: Execution,
    interior_cells: usize,
    data: &mut [Vec3],
    row_len: usize,
    kernel: F,
) where
    F: Fn(usize, &mut [Vec3]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && interior_cells >= PARALLEL_MIN_CELLS {
        use rayon::prelude::*;
        data.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(r, row)| kernel(r, row));
        return;
    }
    let _ = (exec, interior_cells);
    data.chunks_mut(row_len)
        .enumerate()
        .for_each(|(r, row)| kernel(r, row));
}

/// Maps `f` over `items`, in parallel when allowed. Output order matches input order.
pub(crate) fn map_collect<T, U, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}
