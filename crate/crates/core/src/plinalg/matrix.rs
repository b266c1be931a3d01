use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext};

/// Dense row-major matrix over Q_p.
///
/// Equality compares dimensions and entries; the context's default
/// precision is not part of the value.
#[derive(Clone, Debug)]
pub struct PMatrix {
    ctx: PrimeContext,
    rows: usize,
    cols: usize,
    entries: Vec<PadicScalar>,
}

impl PMatrix {
    pub fn zeros(ctx: PrimeContext, rows: usize, cols: usize) -> Self {
        Self {
            ctx,
            rows,
            cols,
            entries: vec![PadicScalar::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: PrimeContext, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = PadicScalar::one(ctx);
        }
        m
    }

    pub fn diagonal(ctx: PrimeContext, values: &[PadicScalar]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(ctx, n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_fn(ctx: PrimeContext, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> PadicScalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            ctx,
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(ctx: PrimeContext, rows: Vec<Vec<PadicScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries: Vec<PadicScalar> = rows.into_iter().flatten().collect();
        for e in &entries {
            ctx.check_same(&e.ctx())?;
        }
        Ok(Self {
            ctx,
            rows: r,
            cols: c,
            entries,
        })
    }

    /// Integer matrix, handy in tests and examples.
    pub fn from_ints(ctx: PrimeContext, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(ctx, r, c, |i, j| PadicScalar::from_int(ctx, rows[i][j]))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(ctx: PrimeContext, columns: &[Vec<PadicScalar>]) -> Self {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        Self::from_fn(ctx, r, c, |i, j| columns[j][i].clone())
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[PadicScalar] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[PadicScalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<PadicScalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ctx, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.ctx, self.rows, other.cols, |i, j| {
            let mut acc = PadicScalar::zero(self.ctx);
            for k in 0..self.cols {
                let a = &self[(i, k)];
                let b = &other[(k, j)];
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.add_lossy(&a.mul_scalar(b));
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[PadicScalar]) -> Result<Vec<PadicScalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(PadicScalar::zero(self.ctx), |acc, (a, b)| acc.add_lossy(&a.mul_scalar(b)))
            })
            .collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&PadicScalar, &PadicScalar) -> PadicScalar) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("entrywise operation".into()));
        }
        Ok(Self {
            ctx: self.ctx,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, PadicScalar::add_lossy)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, PadicScalar::sub_lossy)
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        self.map(|x| x.mul_scalar(c))
    }

    pub fn map(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> Self {
        Self {
            ctx: self.ctx,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Re-embeds every entry at `precision` digits (see
    /// [`PadicScalar::with_precision`]) and updates the context.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        let ctx = self.ctx.with_precision(precision)?;
        Ok(Self {
            ctx,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|x| x.with_precision(precision).in_context(ctx))
                .collect(),
        })
    }

    /// Minimum entry valuation; `None` for the zero matrix.
    pub fn min_valuation(&self) -> Option<i64> {
        self.entries.iter().filter_map(PadicScalar::valuation).min()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PadicScalar::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diagonal_entries(&self) -> Vec<PadicScalar> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += factor * row[source]`
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &PadicScalar) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = self[(source, j)].mul_scalar(factor);
            if !delta.is_zero() {
                self[(target, j)] = self[(target, j)].add_lossy(&delta);
            }
        }
    }

    /// `col[target] += factor * col[source]`
    pub fn add_col_multiple(&mut self, target: usize, source: usize, factor: &PadicScalar) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = self[(i, source)].mul_scalar(factor);
            if !delta.is_zero() {
                self[(i, target)] = self[(i, target)].add_lossy(&delta);
            }
        }
    }

    pub fn scale_col(&mut self, j: usize, factor: &PadicScalar) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].mul_scalar(factor);
        }
    }

    /// Digits of agreement between `self` and `reference`, measured
    /// relative to the scale (minimum valuation) of `reference`.
    ///
    /// For each entry the valuation of the difference is taken, or the
    /// absolute precision if every known digit agrees. The result is the
    /// worst entry minus the reference scale; `i64::MAX` when the matrices
    /// are exactly equal.
    pub fn agreement(&self, reference: &Self) -> Result<i64> {
        if self.rows != reference.rows || self.cols != reference.cols {
            return Err(Error::DimensionMismatch("agreement".into()));
        }
        let scale = reference.min_valuation().unwrap_or(0);
        let worst = self
            .entries
            .iter()
            .zip(&reference.entries)
            .filter_map(|(a, b)| a.difference_valuation(b))
            .min();
        Ok(worst.map_or(i64::MAX, |w| w - scale))
    }

    pub fn to_rows(&self) -> Vec<Vec<PadicScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl PartialEq for PMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p() == other.ctx.p()
            && self.rows == other.rows
            && self.cols == other.cols
            && self.entries == other.entries
    }
}

impl Eq for PMatrix {}

impl Index<(usize, usize)> for PMatrix {
    type Output = PadicScalar;
    fn index(&self, (i, j): (usize, usize)) -> &PadicScalar {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for PMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut PadicScalar {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<PadicScalar>,
}

impl Serialize for PMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.entries.len() != raw.rows * raw.cols {
            return Err(D::Error::custom("entry count does not match dimensions"));
        }
        let first = raw
            .entries
            .first()
            .ok_or_else(|| D::Error::custom("empty matrix"))?;
        let p = first.p();
        if raw.entries.iter().any(|e| e.p() != p) {
            return Err(D::Error::custom("entries over different primes"));
        }
        let precision = raw
            .entries
            .iter()
            .filter_map(PadicScalar::precision)
            .max()
            .unwrap_or(crate::padic::DEFAULT_PRECISION);
        let ctx = PrimeContext::new(p, precision).map_err(D::Error::custom)?;
        Ok(PMatrix {
            ctx,
            rows: raw.rows,
            cols: raw.cols,
            entries: raw.entries.into_iter().map(|e| e.in_context(ctx)).collect(),
        })
    }
}
