//! Matrices of multivariate series sharing one window.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::linalg::DMat;
use super::multi::{MultiSeries, VarSpec, UNBOUNDED};
use super::scalar::Scalar;
use crate::error::SeriesError;

type Res<T> = Result<T, SeriesError>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatSeries {
    rows: usize,
    cols: usize,
    entries: Vec<MultiSeries>,
}

impl MatSeries {
    /// Builds a matrix from row-major entries, cutting every entry to the
    /// common window (lowest `low`, lowest `prec`, lowest total bound).
    pub fn new(rows: usize, cols: usize, entries: Vec<MultiSeries>) -> Res<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(SeriesError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let first = &entries[0];
        for e in &entries[1..] {
            if !first.compatible(e) {
                return Err(SeriesError::VarMismatch("matrix entries differ in variables".into()));
            }
        }
        let n = first.nvars();
        let mut vars: Vec<VarSpec> = first.vars().to_vec();
        let mut total = first.total_prec();
        for e in &entries[1..] {
            for i in 0..n {
                vars[i].low = vars[i].low.min(e.vars()[i].low);
                vars[i].prec = vars[i].prec.min(e.vars()[i].prec);
            }
            total = match (total, e.total_prec()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, None) => a,
                (None, b) => b,
            };
        }
        let entries = entries
            .into_iter()
            .map(|e| MultiSeries::from_parts(vars.clone(), total, e.raw_terms().clone()))
            .collect::<Res<Vec<_>>>()?;
        Ok(MatSeries { rows, cols, entries })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> Res<MultiSeries>,
    ) -> Res<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j)?);
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize, vars: &[VarSpec]) -> Res<Self> {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                MultiSeries::one(vars.to_vec())
            } else {
                MultiSeries::new(vars.to_vec())
            }
        })
    }

    /// Constant matrix embedded as series on `vars`.
    pub fn from_constant(m: &DMat, vars: &[VarSpec]) -> Res<Self> {
        Self::from_fn(m.rows, m.cols, |i, j| MultiSeries::constant(vars.to_vec(), m[(i, j)].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[MultiSeries] {
        &self.entries
    }

    pub fn vars(&self) -> &[VarSpec] {
        self.entries[0].vars()
    }

    pub fn total_prec(&self) -> Option<i64> {
        self.entries[0].total_prec()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map(&self, f: impl Fn(usize, usize, &MultiSeries) -> Res<MultiSeries> + Sync) -> Res<Self> {
        let c = self.cols;
        let entries = self
            .entries
            .par_iter()
            .enumerate()
            .map(|(k, e)| f(k / c, k % c, e))
            .collect::<Res<Vec<_>>>()?;
        Self::new(self.rows, self.cols, entries)
    }

    pub fn add(&self, o: &MatSeries) -> Res<Self> {
        self.same_shape(o)?;
        self.map(|i, j, e| e.add(o.get(i, j)))
    }

    pub fn sub(&self, o: &MatSeries) -> Res<Self> {
        self.same_shape(o)?;
        self.map(|i, j, e| e.sub(o.get(i, j)))
    }

    pub fn scale(&self, k: &Scalar) -> Res<Self> {
        self.map(|_, _, e| Ok(e.scale(k)))
    }

    fn same_shape(&self, o: &MatSeries) -> Res<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(SeriesError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    /// Matrix product; entries are computed in parallel, each one by the
    /// same sequential sum, so results do not depend on thread count.
    pub fn mul(&self, o: &MatSeries) -> Res<Self> {
        if self.cols != o.rows {
            return Err(SeriesError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let (r, c, inner) = (self.rows, o.cols, self.cols);
        let entries = (0..r * c)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / c, k % c);
                let mut acc: Option<MultiSeries> = None;
                for l in 0..inner {
                    let p = self.get(i, l).mul(o.get(l, j))?;
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.add(&p)?,
                    });
                }
                Ok(acc.expect("inner dimension >= 1"))
            })
            .collect::<Res<Vec<_>>>()?;
        Self::new(r, c, entries)
    }

    /// Product with a constant matrix on the left.
    pub fn left_mul_const(&self, m: &DMat) -> Res<Self> {
        let c = MatSeries::from_constant(m, &exact_like(self.vars()))?;
        c.mul(self)
    }

    pub fn constant_term(&self) -> DMat {
        DMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).constant_term())
    }

    /// Inverse of a square matrix whose constant term is invertible.
    pub fn mat_invert(&self) -> Res<Self> {
        if !self.is_square() {
            return Err(SeriesError::Shape("inverse of non-square matrix".into()));
        }
        let reg = self.map(|_, _, e| e.regularized())?;
        let c0 = reg.constant_term();
        let c0inv = c0.inverse()?;
        let n = self.rows;
        // c0^{-1} M = I + Y with Y(0) = 0
        let normalized = reg.left_mul_const(&c0inv)?;
        let ident = MatSeries::identity(n, &exact_like(self.vars()))?;
        let y = normalized.sub(&ident)?;
        let my = y.scale(&Scalar::from_int(-1))?;
        let mut sum = ident.add(&y.scale(&Scalar::zero())?)?;
        let mut p = ident.clone();
        for _ in 0..1_000_000 {
            p = p.mul(&my)?;
            if p.entries.iter().all(MultiSeries::is_zero) {
                break;
            }
            sum = sum.add(&p)?;
        }
        let c0m = MatSeries::from_constant(&c0inv, &exact_like(self.vars()))?;
        sum.mul(&c0m)
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn mat_det(&self) -> Res<MultiSeries> {
        if !self.is_square() {
            return Err(SeriesError::Shape("det of non-square matrix".into()));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor_det(&idx, &idx)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Res<MultiSeries> {
        if rows.len() == 1 {
            return Ok(self.get(rows[0], cols[0]).clone());
        }
        let mut acc: Option<MultiSeries> = None;
        for (k, &c) in cols.iter().enumerate() {
            let e = self.get(rows[0], c);
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let m = self.minor_det(&rows[1..], &sub_cols)?;
            let mut t = e.mul(&m)?;
            if k % 2 == 1 {
                t = t.neg();
            }
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        Ok(acc.expect("nonempty"))
    }

    pub fn transpose(&self) -> Res<Self> {
        Self::from_fn(self.cols, self.rows, |i, j| Ok(self.get(j, i).clone()))
    }

    pub fn substitute(&self, subs: &[(&str, &MultiSeries)]) -> Res<Self> {
        self.map(|_, _, e| e.substitute(subs))
    }

    pub fn embed(&self, like: &[VarSpec]) -> Res<Self> {
        self.map(|_, _, e| e.embed(like))
    }

    pub fn restrict(&self, prec: &[i64], total: Option<i64>) -> Res<Self> {
        self.map(|_, _, e| e.restrict(prec, total))
    }

    pub fn truncate_total(&self, n: i64) -> Res<Self> {
        self.map(|_, _, e| e.truncate_total(n))
    }

    pub fn eval_numeric(&self, point: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).eval_numeric(point)).collect())
            .collect()
    }

    /// True when the matrix is the identity on its known window.
    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.len() == 1 && e.constant_term() == Scalar::one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// Entrywise equality on the intersection of both windows.
    pub fn agrees_with(&self, o: &MatSeries) -> Res<bool> {
        self.same_shape(o)?;
        let d = self.sub(o)?;
        Ok(d.entries.iter().all(MultiSeries::is_zero))
    }
}

/// Same variables with exact windows.
pub fn exact_like(vars: &[VarSpec]) -> Vec<VarSpec> {
    vars.iter()
        .map(|v| VarSpec::new(v.name.clone(), v.ramification, 0, UNBOUNDED))
        .collect()
}

impl From<&MatSeries> for DMat {
    fn from(m: &MatSeries) -> DMat {
        m.constant_term()
    }
}
