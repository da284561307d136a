//! Grid sweeps. Points are evaluated independently (in parallel when the
//! `parallel` feature is on) and collected in row-major order, so every
//! reduction runs sequentially over the same sequence regardless of the
//! execution mode.

use crate::error::{GeomError, Result};
use crate::scalar::C64;

/// Cell-centred tensor grid over a box, row-major in `(u, v, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dims: Vec<usize>,
    pub rect: Vec<(f64, f64)>,
}

impl Grid {
    pub fn new(dims: Vec<usize>, rect: Vec<(f64, f64)>) -> Result<Grid> {
        if dims.len() != rect.len() || dims.is_empty() {
            return Err(GeomError::MalformedInput(format!(
                "grid has {} axes but the box has {}",
                dims.len(),
                rect.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(GeomError::MalformedInput(format!(
                "grid axes need at least 2 points, got {d}"
            )));
        }
        if let Some(&(a, b)) = rect.iter().find(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(GeomError::MalformedInput(format!("empty interval [{a}, {b}]")));
        }
        Ok(Grid { dims, rect })
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self, mut k: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = k % d;
            k /= d;
        }
        out
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.indices(k)
            .iter()
            .zip(&self.dims)
            .zip(&self.rect)
            .map(|((&i, &d), &(a, b))| a + (b - a) * (i as f64 + 0.5) / d as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Evaluates `f` at every grid point, in row-major order.
pub fn map_grid<T, F>(grid: &Grid, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &[f64]) -> T + Sync + Send,
{
    map_indices(grid.len(), exec, |k| f(k, &grid.point(k)))
}

#[cfg(feature = "parallel")]
pub fn map_indices<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<T, F>(n: usize, _exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Running `max |r|`, `mean |r|`, `min |r|` with the (first) extremal index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub max_abs: f64,
    pub argmax: Option<usize>,
    pub value_at_max: C64,
    pub min_abs: f64,
    pub argmin: Option<usize>,
    pub value_at_min: C64,
    sum_abs: f64,
}

impl Summary {
    pub fn push(&mut self, k: usize, value: C64) {
        let a = value.norm();
        if self.argmax.is_none() || a > self.max_abs || a.is_nan() && !self.max_abs.is_nan() {
            self.max_abs = a;
            self.argmax = Some(k);
            self.value_at_max = value;
        }
        if self.argmin.is_none() || a < self.min_abs {
            self.min_abs = a;
            self.argmin = Some(k);
            self.value_at_min = value;
        }
        self.sum_abs += a;
        self.count += 1;
    }

    pub fn mean_abs(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum_abs / self.count as f64
        }
    }

    /// Fraction of pushed values whose magnitude exceeds `level`; needs the
    /// values, so it is computed by the caller.
    pub fn fraction_above(values: &[C64], level: f64) -> f64 {
        if values.is_empty() {
            return 0.0;
        }
        values.iter().filter(|z| z.norm() > level).count() as f64 / values.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;
    use proptest::prelude::*;

    #[test]
    fn row_major_and_cell_centred() {
        let g = Grid::new(vec![2, 3], vec![(0.0, 1.0), (0.0, 3.0)]).unwrap();
        assert_eq!(g.indices(0), vec![0, 0]);
        assert_eq!(g.indices(1), vec![0, 1]);
        assert_eq!(g.indices(3), vec![1, 0]);
        assert_eq!(g.point(5), vec![0.75, 2.5]);
    }

    #[test]
    fn rejects_thin_axes() {
        assert!(Grid::new(vec![1, 4], vec![(0.0, 1.0); 2]).is_err());
        assert!(Grid::new(vec![4, 4], vec![(0.0, 1.0)]).is_err());
        assert!(Grid::new(vec![4], vec![(1.0, 1.0)]).is_err());
    }

    #[test]
    fn summary_tracks_first_extremum() {
        let mut s = Summary::default();
        for (k, x) in [1.0, -3.0, 3.0, 0.5].iter().enumerate() {
            s.push(k, re(*x));
        }
        assert_eq!((s.max_abs, s.argmax, s.value_at_max), (3.0, Some(1), re(-3.0)));
        assert_eq!((s.min_abs, s.argmin), (0.5, Some(3)));
        assert_eq!(s.mean_abs(), 7.5 / 4.0);
    }

    proptest! {
        #[test]
        fn execution_modes_agree(nu in 2usize..9, nv in 2usize..9) {
            let g = Grid::new(vec![nu, nv], vec![(-1.0, 2.0), (0.5, 1.5)]).unwrap();
            let f = |k: usize, p: &[f64]| (k, (p[0] * 3.1).sin() + p[1]);
            prop_assert_eq!(
                map_grid(&g, Execution::Sequential, f),
                map_grid(&g, Execution::Parallel, f)
            );
        }

        #[test]
        fn indices_round_trip(dims in proptest::collection::vec(2usize..6, 1..4), seed in 0usize..1000) {
            let g = Grid::new(dims.clone(), vec![(0.0, 1.0); dims.len()]).unwrap();
            let k = seed % g.len();
            let idx = g.indices(k);
            let back = idx.iter().zip(&dims).fold(0, |acc, (&i, &d)| acc * d + i);
            prop_assert_eq!(back, k);
        }
    }
}
