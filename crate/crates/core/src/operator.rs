//! Dense storage for finite sections of banded operators.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde::Serialize;

/// Finite `N×N` section of a banded operator with a trusted leading window.
///
/// Rows and columns with index `< size − interior_margin` are free of
/// truncation effects.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator<T: nalgebra::Scalar> {
    pub entries: DMatrix<T>,
    pub bandwidth: usize,
    pub interior_margin: usize,
}

/// Row-major JSON dump `{ "n": N, "band": b, "entries": [[re, im], ...] }`.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDump {
    pub n: usize,
    pub band: usize,
    pub entries: Vec<[f64; 2]>,
}

impl<T: nalgebra::Scalar + ComplexField<RealField = f64>> BandedOperator<T> {
    pub fn new(entries: DMatrix<T>, bandwidth: usize, interior_margin: usize) -> Self {
        assert!(entries.is_square(), "banded operator must be square");
        BandedOperator {
            entries,
            bandwidth,
            interior_margin,
        }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of trusted leading indices.
    pub fn window(&self) -> usize {
        self.size().saturating_sub(self.interior_margin)
    }

    /// Largest modulus outside the declared band.
    pub fn max_outside_band(&self) -> f64 {
        let n = self.size();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > self.bandwidth {
                    m = m.max(self.entries[(i, j)].clone().modulus());
                }
            }
        }
        m
    }

    pub fn dump(&self) -> MatrixDump {
        let n = self.size();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = self.entries[(i, j)].clone();
                entries.push([v.clone().real(), v.imaginary()]);
            }
        }
        MatrixDump {
            n,
            band: self.bandwidth,
            entries,
        }
    }
}

/// Max modulus of `m` restricted to the leading `w×w` block.
pub fn max_abs_window<T: nalgebra::Scalar + ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
    w: usize,
) -> f64 {
    let w = w.min(m.nrows()).min(m.ncols());
    let mut best: f64 = 0.0;
    for i in 0..w {
        for j in 0..w {
            best = best.max(m[(i, j)].clone().modulus());
        }
    }
    best
}

/// Max modulus over all entries.
pub fn max_abs<T: nalgebra::Scalar + ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    max_abs_window(m, m.nrows().max(m.ncols()))
}

/// Entrywise moduli.
pub fn abs_entries<T: nalgebra::Scalar + ComplexField<RealField = f64>>(m: &DMatrix<T>) -> DMatrix<f64> {
    m.map(|x| x.modulus())
}

/// Componentwise residual `max_ij |d_ij| / max(1, s_ij)` on the leading `w×w`
/// block, where `s` bounds the magnitude of the terms summed into `d`
/// (e.g. `|A||B|` for a product `AB`). Unlike the plain max norm this is
/// unaffected by a diagonal similarity of the factors.
pub fn componentwise<T: nalgebra::Scalar + ComplexField<RealField = f64>>(
    d: &DMatrix<T>,
    scale: &DMatrix<f64>,
    w: usize,
) -> f64 {
    let w = w.min(d.nrows()).min(d.ncols());
    let mut best: f64 = 0.0;
    for i in 0..w {
        for j in 0..w {
            best = best.max(d[(i, j)].clone().modulus() / scale[(i, j)].max(1.0));
        }
    }
    best
}

/// Embeds a real matrix in the complex field.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_and_window() {
        let mut m = DMatrix::<f64>::identity(5, 5);
        m[(0, 1)] = 2.0;
        let op = BandedOperator::new(m.clone(), 1, 2);
        assert_eq!(op.window(), 3);
        assert_eq!(op.max_outside_band(), 0.0);
        m[(0, 3)] = -4.0;
        let op = BandedOperator::new(m, 1, 2);
        assert_eq!(op.max_outside_band(), 4.0);
        assert_eq!(max_abs_window(&op.entries, 2), 2.0);
    }

    #[test]
    fn dump_is_row_major() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let d = BandedOperator::new(m, 1, 0).dump();
        assert_eq!(d.entries, vec![[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0]]);
    }
}
