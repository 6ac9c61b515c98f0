//! Dense exact linear algebra over `F_q`.
//!
//! Row reduction works on [`Row`] storage: bit-packed words with XOR updates
//! over `F_2`, element arrays otherwise. Pivots are the first nonzero column.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::gf::{Elem, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
}

fn check_dim(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected == found {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, found })
    }
}

/// Row-major matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Matrix, LinalgError> {
        check_dim(rows * cols, data.len())?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Elem::ONE;
        }
        m
    }

    /// Builds from explicit rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<Elem>]) -> Result<Matrix, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    /// Convenience constructor from integer codes, all assumed valid in the target field.
    pub fn from_codes(codes: &[&[u32]]) -> Matrix {
        let cols = codes.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Elem>> = codes.iter().map(|r| r.iter().map(|&c| Elem::from_code(c)).collect()).collect();
        Matrix::from_rows(cols, &rows).expect("ragged rows")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Elem]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mat_mul(&self, field: &Field, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        check_dim(self.cols, rhs.rows)?;
        let mut out = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            out.extend(vec_mat_unchecked(field, self.row(i), rhs));
        }
        Ok(Matrix { rows: self.rows, cols: rhs.cols, data: out })
    }

    pub fn mat_vec(&self, field: &Field, v: &[Elem]) -> Result<Vec<Elem>, LinalgError> {
        check_dim(self.cols, v.len())?;
        Ok(self.row_iter().map(|r| field.dot(r, v)).collect())
    }

    /// Row vector times matrix, `v · self`.
    pub fn vec_mat(&self, field: &Field, v: &[Elem]) -> Result<Vec<Elem>, LinalgError> {
        check_dim(self.rows, v.len())?;
        Ok(vec_mat_unchecked(field, v, self))
    }

    pub fn pow(&self, field: &Field, mut e: u64) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut acc = Matrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mat_mul(field, &base)?;
            }
            base = base.mat_mul(field, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn add(&self, field: &Field, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        check_dim(self.rows, rhs.rows)?;
        check_dim(self.cols, rhs.cols)?;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| field.add(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, field: &Field, c: Elem) -> Matrix {
        let data = self.data.iter().map(|&a| field.mul(c, a)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Stacks `blocks` vertically; all must share a column count.
    pub fn vstack(cols: usize, blocks: &[Matrix]) -> Result<Matrix, LinalgError> {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            check_dim(cols, b.cols)?;
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(Matrix { rows, cols, data })
    }

    /// One line per row, entries as integer codes separated by single spaces.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.row_iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&render_vector(r, " "));
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn render_vector(v: &[Elem], sep: &str) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(sep)
}

fn vec_mat_unchecked(field: &Field, v: &[Elem], m: &Matrix) -> Vec<Elem> {
    let mut out = Row::zeros(field, m.cols);
    for (k, &c) in v.iter().enumerate() {
        if !c.is_zero() {
            out.axpy_slice(field, c, m.row(k));
        }
    }
    out.to_elems(m.cols)
}

impl Index<(usize, usize)> for Matrix {
    type Output = Elem;

    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Working storage for one vector during elimination.
#[derive(Debug, Clone)]
enum Row {
    Bits(Vec<u64>),
    Codes(Vec<Elem>),
}

impl Row {
    fn zeros(field: &Field, len: usize) -> Row {
        if field.is_binary() {
            Row::Bits(vec![0; len.div_ceil(64)])
        } else {
            Row::Codes(vec![Elem::ZERO; len])
        }
    }

    fn from_elems(field: &Field, v: &[Elem]) -> Row {
        let mut r = Row::zeros(field, v.len());
        match &mut r {
            Row::Bits(words) => {
                for (j, e) in v.iter().enumerate() {
                    if !e.is_zero() {
                        words[j / 64] |= 1 << (j % 64);
                    }
                }
            }
            Row::Codes(c) => c.copy_from_slice(v),
        }
        r
    }

    #[inline]
    fn get(&self, j: usize) -> Elem {
        match self {
            Row::Bits(w) => Elem::from_code(((w[j / 64] >> (j % 64)) & 1) as u32),
            Row::Codes(c) => c[j],
        }
    }

    #[inline]
    fn set(&mut self, j: usize, e: Elem) {
        match self {
            Row::Bits(w) => {
                let mask = 1u64 << (j % 64);
                if e.is_zero() {
                    w[j / 64] &= !mask;
                } else {
                    w[j / 64] |= mask;
                }
            }
            Row::Codes(c) => c[j] = e,
        }
    }

    fn first_nonzero(&self) -> Option<usize> {
        match self {
            Row::Bits(w) => w.iter().position(|&x| x != 0).map(|k| k * 64 + w[k].trailing_zeros() as usize),
            Row::Codes(c) => c.iter().position(|e| !e.is_zero()),
        }
    }

    /// `self += c · other` over the first `len` positions (rounded up to a word for bits).
    fn axpy(&mut self, field: &Field, c: Elem, other: &Row, len: usize) {
        if c.is_zero() {
            return;
        }
        match (self, other) {
            (Row::Bits(a), Row::Bits(b)) => {
                let words = len.div_ceil(64);
                for (x, y) in a[..words].iter_mut().zip(&b[..words]) {
                    *x ^= *y;
                }
            }
            (Row::Codes(a), Row::Codes(b)) => {
                for (x, &y) in a[..len].iter_mut().zip(&b[..len]) {
                    if !y.is_zero() {
                        *x = field.add(*x, field.mul(c, y));
                    }
                }
            }
            _ => unreachable!("mixed row representations"),
        }
    }

    fn axpy_slice(&mut self, field: &Field, c: Elem, other: &[Elem]) {
        match self {
            Row::Bits(a) => {
                for (j, y) in other.iter().enumerate() {
                    if !y.is_zero() {
                        a[j / 64] ^= 1 << (j % 64);
                    }
                }
            }
            Row::Codes(a) => {
                for (x, &y) in a.iter_mut().zip(other) {
                    if !y.is_zero() {
                        *x = field.add(*x, field.mul(c, y));
                    }
                }
            }
        }
    }

    fn scale(&mut self, field: &Field, c: Elem, len: usize) {
        match self {
            Row::Bits(_) => debug_assert_eq!(c, Elem::ONE),
            Row::Codes(a) => {
                for x in &mut a[..len] {
                    *x = field.mul(c, *x);
                }
            }
        }
    }

    fn to_elems(&self, len: usize) -> Vec<Elem> {
        (0..len).map(|j| self.get(j)).collect()
    }
}

/// Rank over `F_q` by Gaussian elimination.
pub fn rank(field: &Field, m: &Matrix) -> usize {
    let mut pivots: Vec<(usize, Row)> = Vec::new();
    for r in m.row_iter() {
        let mut work = Row::from_elems(field, r);
        for (piv, row) in &pivots {
            let c = work.get(*piv);
            work.axpy(field, field.neg(c), row, m.cols);
        }
        if let Some(lead) = work.first_nonzero() {
            let inv = field.inv(work.get(lead)).expect("nonzero pivot");
            work.scale(field, inv, m.cols);
            pivots.push((lead, work));
        }
    }
    pivots.len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Elem>),
    /// `particular + span(null_basis)`; the basis spans the kernel of the matrix.
    Affine {
        particular: Vec<Elem>,
        null_basis: Vec<Vec<Elem>>,
    },
    Inconsistent,
}

/// Solves `m · x = b` exactly, classifying the solution set.
pub fn solve(field: &Field, m: &Matrix, b: &[Elem]) -> Result<Solution, LinalgError> {
    check_dim(m.rows, b.len())?;
    let width = m.cols + 1;
    let mut rows: Vec<Row> = m
        .row_iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut v = r.to_vec();
            v.push(bi);
            Row::from_elems(field, &v)
        })
        .collect();

    // Gauss-Jordan to reduced row echelon form.
    let mut pivot_cols = Vec::new();
    let mut next = 0;
    for col in 0..m.cols {
        let Some(found) = (next..rows.len()).find(|&i| !rows[i].get(col).is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let inv = field.inv(rows[next].get(col)).expect("nonzero pivot");
        rows[next].scale(field, inv, width);
        let pivot_row = rows[next].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != next {
                let c = r.get(col);
                r.axpy(field, field.neg(c), &pivot_row, width);
            }
        }
        pivot_cols.push(col);
        next += 1;
    }
    if rows[next..].iter().any(|r| !r.get(m.cols).is_zero()) {
        return Ok(Solution::Inconsistent);
    }

    let mut particular = vec![Elem::ZERO; m.cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        particular[col] = rows[r].get(m.cols);
    }
    if pivot_cols.len() == m.cols {
        return Ok(Solution::Unique(particular));
    }
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let null_basis = (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Elem::ZERO; m.cols];
            v[f] = Elem::ONE;
            for (r, &col) in pivot_cols.iter().enumerate() {
                v[col] = field.neg(rows[r].get(f));
            }
            v
        })
        .collect();
    Ok(Solution::Affine { particular, null_basis })
}

/// Coefficients `α_1..α_N` with `det(X·I − A) = X^N − Σ α_i X^{N−i}`.
///
/// Reduces to upper Hessenberg form by similarity transforms, then expands
/// the determinant along the Hessenberg recurrence. Only field division is
/// used, so this is valid in every characteristic.
pub fn char_poly(field: &Field, a: &Matrix) -> Result<Vec<Elem>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let n = a.rows;
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !h[(i, m - 1)].is_zero()) else {
            continue;
        };
        if i != m {
            for j in 0..n {
                h.data.swap(i * n + j, m * n + j);
            }
            for j in 0..n {
                h.data.swap(j * n + i, j * n + m);
            }
        }
        let t_inv = field.inv(h[(m, m - 1)]).expect("nonzero pivot");
        for i in m + 1..n {
            let u = field.mul(h[(i, m - 1)], t_inv);
            if u.is_zero() {
                continue;
            }
            for j in 0..n {
                let v = field.sub(h[(i, j)], field.mul(u, h[(m, j)]));
                h[(i, j)] = v;
            }
            for j in 0..n {
                let v = field.add(h[(j, m)], field.mul(u, h[(j, i)]));
                h[(j, m)] = v;
            }
        }
    }

    // polys[k] = characteristic polynomial of the leading k×k block, ascending coefficients.
    let mut polys: Vec<Vec<Elem>> = vec![vec![Elem::ONE]];
    for k in 0..n {
        let prev = &polys[k];
        let mut next = vec![Elem::ZERO; k + 2];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = field.add(next[d + 1], c);
            next[d] = field.sub(next[d], field.mul(h[(k, k)], c));
        }
        let mut t = Elem::ONE;
        for i in (0..k).rev() {
            t = field.mul(t, h[(i + 1, i)]);
            let coef = field.mul(h[(i, k)], t);
            if coef.is_zero() {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = field.sub(next[d], field.mul(coef, c));
            }
        }
        polys.push(next);
    }
    let p = &polys[n];
    Ok((1..=n).map(|i| field.neg(p[n - i])).collect())
}

/// Outcome of [`BasisBuilder::insert`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insertion {
    Independent(usize),
    /// Coordinates in the accepted basis, in insertion order.
    Dependent(Vec<Elem>),
}

#[derive(Debug, Clone)]
struct Pivot {
    col: usize,
    row: Row,
    // This reduced row as a combination of accepted vectors.
    comb: Row,
}

/// Incremental span builder: accepts independent vectors and expresses
/// dependent ones in terms of those accepted so far.
#[derive(Debug, Clone)]
pub struct BasisBuilder {
    field: Field,
    dim: usize,
    basis: Vec<Vec<Elem>>,
    pivots: Vec<Pivot>,
}

impl BasisBuilder {
    pub fn new(field: &Field, ambient_dim: usize) -> BasisBuilder {
        BasisBuilder { field: field.clone(), dim: ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Number of accepted vectors.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    // Returns the residual of `v` after elimination and the accumulated coordinates.
    fn reduce(&self, v: &[Elem]) -> (Row, Row) {
        let f = &self.field;
        let count = self.basis.len();
        let mut work = Row::from_elems(f, v);
        let mut coords = Row::zeros(f, self.dim);
        for p in &self.pivots {
            let c = work.get(p.col);
            if !c.is_zero() {
                work.axpy(f, f.neg(c), &p.row, self.dim);
                coords.axpy(f, c, &p.comb, count);
            }
        }
        (work, coords)
    }

    /// Coordinates of `v` in the accepted basis, or `None` when `v` is outside the span.
    pub fn express(&self, v: &[Elem]) -> Result<Option<Vec<Elem>>, LinalgError> {
        check_dim(self.dim, v.len())?;
        let (work, coords) = self.reduce(v);
        Ok(work.first_nonzero().is_none().then(|| coords.to_elems(self.basis.len())))
    }

    pub fn contains(&self, v: &[Elem]) -> Result<bool, LinalgError> {
        Ok(self.express(v)?.is_some())
    }

    pub fn insert(&mut self, v: &[Elem]) -> Result<Insertion, LinalgError> {
        check_dim(self.dim, v.len())?;
        let (mut work, mut coords) = self.reduce(v);
        let count = self.basis.len();
        let Some(col) = work.first_nonzero() else {
            return Ok(Insertion::Dependent(coords.to_elems(count)));
        };
        let f = &self.field;
        let inv = f.inv(work.get(col)).expect("nonzero pivot");
        work.scale(f, inv, self.dim);
        // comb = (e_count - coords) / lead
        let mut comb = Row::zeros(f, self.dim);
        comb.axpy(f, f.neg(Elem::ONE), &coords, count);
        comb.set(count, Elem::ONE);
        comb.scale(f, inv, count + 1);
        coords = comb;
        self.pivots.push(Pivot { col, row: work, comb: coords });
        self.basis.push(v.to_vec());
        Ok(Insertion::Independent(count))
    }
}
