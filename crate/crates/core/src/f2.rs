//! Dense linear algebra over the two-element field.
//!
//! Vectors are packed into `u64` words. Subspaces are always stored in
//! reduced echelon form with the *highest* set bit of each basis vector as
//! its pivot, sorted by descending pivot. That form is unique for a given
//! subspace, so equality of [`Subspace`] values is equality of subspaces, and
//! the coset representatives produced by [`subquotient`] are deterministic.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("image is not contained in kernel: offending vector {0}")]
    NotContained(BitVec),
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with the listed positions set.
    pub fn from_ones(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Highest set bit, the pivot used throughout this module.
    pub fn lead(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            v.set(i, true);
        }
        for i in other.ones() {
            v.set(self.len + i, true);
        }
        v
    }

    /// The bits in `range` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut v = BitVec::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                v.set(i - start, true);
            }
        }
        v
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
            cols: n,
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self, F2Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(F2Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
        }
        Ok(Self { rows, cols })
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Result<Self, F2Error> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(F2Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn from_dense(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self {
            rows: rows
                .iter()
                .map(|r| BitVec::from_bits(r.iter().map(|&b| b != 0)))
                .collect(),
            cols,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_bits(self.rows.iter().map(|r| r.get(c)))
    }

    pub fn columns(&self) -> Vec<BitVec> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        BitVec::from_bits(self.rows.iter().map(|r| r.dot(v)))
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows(), "matrix product dimension mismatch");
        let cols: Vec<BitVec> = other.columns().iter().map(|c| self.mul_vec(c)).collect();
        BitMatrix::from_columns(self.rows(), &cols).expect("column lengths agree")
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_columns(self.cols, &self.rows).expect("row lengths agree")
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// A linear subspace of GF(2)^n in canonical reduced echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<BitVec>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::spanned_by(ambient_dim, (0..ambient_dim).map(|i| BitVec::unit(ambient_dim, i)))
    }

    pub fn spanned_by<I: IntoIterator<Item = BitVec>>(ambient_dim: usize, vectors: I) -> Self {
        let mut s = Self::zero(ambient_dim);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Basis vectors in reduced echelon form, descending pivots.
    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.basis.iter().map(|b| b.lead().expect("basis vectors are nonzero"))
    }

    /// Clears every pivot coordinate of `v`; the result is zero iff `v` lies in
    /// the subspace. This is a linear projection.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.ambient_dim, "vector outside ambient space");
        let mut r = v.clone();
        for b in &self.basis {
            let p = b.lead().expect("basis vectors are nonzero");
            if r.get(p) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns `true` if the dimension grew.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let r = self.reduce(&v);
        let Some(p) = r.lead() else {
            return false;
        };
        for b in &mut self.basis {
            if b.get(p) {
                b.xor_assign(&r);
            }
        }
        let pos = self
            .basis
            .iter()
            .position(|b| b.lead().expect("nonzero") < p)
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, r);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut s = self.clone();
        for b in &other.basis {
            s.insert(b.clone());
        }
        s
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Coordinates of `v` with respect to [`Self::basis`], if `v` is in the span.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        let mut coords = BitVec::zeros(self.dim());
        let mut r = v.clone();
        for (i, b) in self.basis.iter().enumerate() {
            let p = b.lead().expect("nonzero");
            if r.get(p) {
                r.xor_assign(b);
                coords.set(i, true);
            }
        }
        r.is_zero().then_some(coords)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient_dim, self.basis)
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    Subspace::spanned_by(m.cols(), m.rows.iter().cloned()).dim()
}

/// Basis of `{v : m v = 0}`.
pub fn kernel_basis(m: &BitMatrix) -> Subspace {
    // Gauss-Jordan on the rows, pivots at the lowest column index.
    let cols = m.cols();
    let mut rows: Vec<BitVec> = m.rows.clone();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, found);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let vectors = (0..cols).filter(|&c| !is_pivot[c]).map(|free| {
        let mut v = BitVec::unit(cols, free);
        for (row, &pc) in rows.iter().zip(&pivot_cols) {
            if row.get(free) {
                v.set(pc, true);
            }
        }
        v
    });
    Subspace::spanned_by(cols, vectors)
}

/// Some `x` with `m x = b`, if the system is consistent.
pub fn solve(m: &BitMatrix, b: &BitVec) -> Option<BitVec> {
    assert_eq!(b.len(), m.rows(), "right-hand side length");
    let cols = m.cols();
    // augmented rows [row | b_i], eliminated on the coefficient part
    let mut rows: Vec<(BitVec, bool)> = (0..m.rows()).map(|i| (m.row(i).clone(), b.get(i))).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i].0.get(c)) else {
            continue;
        };
        rows.swap(r, found);
        let (pr, pb) = rows[r].clone();
        for (i, (row, rb)) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pr);
                *rb ^= pb;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|(_, rb)| *rb) {
        return None;
    }
    let mut x = BitVec::zeros(cols);
    for (i, &c) in pivots.iter().enumerate() {
        if rows[i].1 {
            x.set(c, true);
        }
    }
    Some(x)
}

/// Column space of `m`.
pub fn image_basis(m: &BitMatrix) -> Subspace {
    Subspace::spanned_by(m.rows(), m.columns())
}

/// A quotient `num / den` of subspaces together with canonical coset
/// representatives. The representatives have no bits on the pivots of `den`
/// and are mutually in reduced echelon form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subquotient {
    num: Subspace,
    den: Subspace,
    reps: Vec<BitVec>,
}

impl Subquotient {
    pub fn new(num: Subspace, den: Subspace) -> Result<Self, F2Error> {
        let reps = subquotient(&num, &den)?;
        Ok(Self { num, den, reps })
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::new(Subspace::full(ambient_dim), Subspace::zero(ambient_dim))
            .expect("zero is contained in everything")
    }

    pub fn num(&self) -> &Subspace {
        &self.num
    }

    pub fn den(&self) -> &Subspace {
        &self.den
    }

    pub fn reps(&self) -> &[BitVec] {
        &self.reps
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.num.ambient_dim()
    }

    /// Coordinates of the class of `v` in the basis of representatives.
    /// `None` if `v` is not in `num`.
    pub fn coords(&self, v: &BitVec) -> Option<BitVec> {
        if !self.num.contains(v) {
            return None;
        }
        let r = self.den.reduce(v);
        let rs = Subspace::spanned_by(self.ambient_dim(), self.reps.iter().cloned());
        // reps are already echelonized, so rs.basis() is reps in the same order
        debug_assert_eq!(rs.basis(), self.reps.as_slice());
        rs.coordinates(&r)
    }

    /// The vector in E-coordinates represented by a coordinate vector.
    pub fn vector(&self, coords: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.ambient_dim());
        for i in coords.ones() {
            v.xor_assign(&self.reps[i]);
        }
        v
    }
}

/// Coset representatives of `kernel / image`, a basis of a complement of
/// `image` inside `kernel`.
pub fn subquotient(kernel: &Subspace, image: &Subspace) -> Result<Vec<BitVec>, F2Error> {
    if kernel.ambient_dim() != image.ambient_dim() {
        return Err(F2Error::DimensionMismatch {
            expected: kernel.ambient_dim(),
            found: image.ambient_dim(),
        });
    }
    if let Some(bad) = image.basis().iter().find(|b| !kernel.contains(b)) {
        return Err(F2Error::NotContained(bad.clone()));
    }
    let residues = kernel.basis().iter().map(|v| image.reduce(v));
    let complement = Subspace::spanned_by(kernel.ambient_dim(), residues);
    debug_assert_eq!(complement.dim(), kernel.dim() - image.dim());
    Ok(complement.basis().to_vec())
}
