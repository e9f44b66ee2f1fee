//! Regular sample axes and row-major 2D grids.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid axis [{min}, {max}] with spacing {spacing}")]
    InvalidAxis { min: f64, max: f64, spacing: f64 },
    #[error("expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
}

/// Equally spaced samples `min, min + h, ..., max`.
///
/// An axis whose end points are mirror images of each other with an odd
/// sample count is *symmetric*: its coordinates are generated as `(i - c) * h`
/// around the centre index `c`, so `value(mirror(i)) == -value(i)` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    min: f64,
    spacing: f64,
    count: usize,
    symmetric: bool,
}

impl Axis {
    pub fn new(min: f64, max: f64, spacing: f64) -> Result<Axis, GridError> {
        let invalid = GridError::InvalidAxis { min, max, spacing };
        if !(min.is_finite() && max.is_finite() && spacing.is_finite() && spacing > 0.0 && min <= max) {
            return Err(invalid);
        }
        let steps = (max - min) / spacing;
        let rounded = libm::round(steps);
        if (steps - rounded).abs() > 1e-9 * f64::max(1.0, rounded) || rounded > (u32::MAX as f64) {
            return Err(invalid);
        }
        let count = rounded as usize + 1;
        let symmetric = count % 2 == 1 && (min + max).abs() <= 1e-12 * f64::max(1.0, max.abs());
        Ok(Axis {
            min,
            spacing,
            count,
            symmetric,
        })
    }

    /// Symmetric axis `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, spacing: f64) -> Result<Axis, GridError> {
        Axis::new(-half_width, half_width, spacing)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn min(&self) -> f64 {
        self.value(0)
    }

    pub fn max(&self) -> f64 {
        self.value(self.count - 1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.symmetric {
            let centre = (self.count - 1) / 2;
            (i as f64 - centre as f64) * self.spacing
        } else {
            self.min + i as f64 * self.spacing
        }
    }

    /// Index of `-value(i)`, available on symmetric axes only.
    pub fn mirror(&self, i: usize) -> Option<usize> {
        (self.symmetric && i < self.count).then(|| self.count - 1 - i)
    }

    /// Non-negative representative of `i` under mirroring (identity on
    /// asymmetric axes).
    pub fn canonical(&self, i: usize) -> usize {
        match self.mirror(i) {
            Some(m) if self.value(i) < 0.0 => m,
            _ => i,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.value(i))
    }

    /// Length `max - min`.
    pub fn span(&self) -> f64 {
        (self.count - 1) as f64 * self.spacing
    }
}

/// Real samples on `x_axis x y_axis`, stored row-major with `x` as the row.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    x_axis: Axis,
    y_axis: Axis,
    values: Vec<f64>,
}

impl Grid2D {
    pub fn new(x_axis: Axis, y_axis: Axis, values: Vec<f64>) -> Result<Grid2D, GridError> {
        let expected = x_axis.count() * y_axis.count();
        if values.len() != expected {
            return Err(GridError::ShapeMismatch {
                expected,
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Grid2D {
            x_axis,
            y_axis,
            values,
        })
    }

    pub fn x_axis(&self) -> &Axis {
        &self.x_axis
    }

    pub fn y_axis(&self) -> &Axis {
        &self.y_axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.y_axis.count() + j]
    }

    /// Samples along `y` at fixed `x` index.
    pub fn row(&self, i: usize) -> &[f64] {
        let ny = self.y_axis.count();
        &self.values[i * ny..(i + 1) * ny]
    }

    /// `(x, y, value)` triples in ascending `x`, then `y`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let ny = self.y_axis.count();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.x_axis.value(k / ny), self.y_axis.value(k % ny), v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn axis_counts_match_default_grids() {
        assert_eq!(Axis::symmetric(25.0, 1.0).unwrap().count(), 51);
        assert_eq!(Axis::symmetric(40.0, 0.25).unwrap().count(), 321);
        assert_eq!(Axis::new(0.0, 40.0, 1.0).unwrap().count(), 41);
    }

    #[test]
    fn symmetric_axis_mirrors_exactly() {
        let axis = Axis::symmetric(3.0, 0.1).unwrap();
        assert!(axis.is_symmetric());
        for i in 0..axis.count() {
            let m = axis.mirror(i).unwrap();
            assert_eq!(axis.value(m), -axis.value(i));
            assert!(axis.value(axis.canonical(i)) >= 0.0);
        }
        assert_eq!(axis.value(30), 0.0);
    }

    #[test]
    fn asymmetric_axis_has_no_mirror() {
        let axis = Axis::new(0.0, 40.0, 1.0).unwrap();
        assert!(!axis.is_symmetric());
        assert_eq!(axis.mirror(3), None);
        assert_eq!(axis.canonical(3), 3);
        assert_eq!(axis.max(), 40.0);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Axis::new(0.0, 1.0, 0.0).is_err());
        assert!(Axis::new(1.0, 0.0, 0.5).is_err());
        assert!(Axis::new(0.0, 1.0, 0.3).is_err());
        assert!(Axis::new(0.0, f64::NAN, 0.5).is_err());
    }

    #[test]
    fn grid_shape_and_finiteness() {
        let axis = Axis::new(0.0, 1.0, 1.0).unwrap();
        assert!(Grid2D::new(axis, axis, vec![1.0; 3]).is_err());
        assert_eq!(
            Grid2D::new(axis, axis, vec![1.0, f64::NAN, 0.0, 0.0]),
            Err(GridError::NonFinite { index: 1 })
        );
        let grid = Grid2D::new(axis, axis, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(grid.get(1, 0), 3.0);
        assert_eq!(grid.row(1), &[3.0, 4.0]);
        let rows: vec::Vec<_> = grid.iter().collect();
        assert_eq!(rows[1], (0.0, 1.0, 2.0));
    }
}
