//! Dense matrices over GF(2), stored as rows of bits.

use std::fmt;

use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitString>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { cols, rows: vec![BitString::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitString>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch { expected: cols, actual: bad.len() });
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Row-major hex, one row per element.
    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(BitString::to_hex).collect()
    }

    pub fn from_hex_rows<S: AsRef<str>>(rows: &[S], cols: usize) -> Result<Self> {
        let rows = rows.iter().map(|r| BitString::from_hex(r.as_ref(), cols)).collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows, cols)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitString {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.rows[r].set(c, bit);
    }

    pub fn column(&self, c: usize) -> BitString {
        self.rows.iter().map(|r| r.get(c)).collect()
    }

    pub fn mul_vec(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, actual: x.len() });
        }
        Ok(self.rows.iter().map(|r| r.dot(x)).collect())
    }

    /// `self` on top of `other`.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::LengthMismatch { expected: self.cols, actual: other.cols });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { cols: self.cols, rows })
    }

    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(self.cols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    pub fn inverse(&self) -> Result<BitMatrix> {
        let n = self.cols;
        if self.rows.len() != n {
            return Err(Error::NotFullRank);
        }
        let mut a = self.rows.clone();
        let mut inv = BitMatrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r].get(col)).ok_or(Error::NotFullRank)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && a[r].get(col) {
                    let (pa, pi) = (a[col].clone(), inv[col].clone());
                    a[r].xor_assign(&pa);
                    inv[r].xor_assign(&pi);
                }
            }
        }
        Ok(BitMatrix { cols: n, rows: inv })
    }
}

/// Incrementally maintained row-echelon basis, for rank tests.
pub(crate) struct EchelonBasis {
    rows: Vec<(usize, BitString)>,
    cols: usize,
}

impl EchelonBasis {
    pub(crate) fn new(cols: usize) -> Self {
        EchelonBasis { rows: Vec::new(), cols }
    }

    /// Adds `v` if it is independent of the rows so far; reports whether it was.
    pub(crate) fn insert(&mut self, v: &BitString) -> bool {
        debug_assert_eq!(v.len(), self.cols);
        let mut x = v.clone();
        for (pivot, row) in &self.rows {
            if x.get(*pivot) {
                x.xor_assign(row);
            }
        }
        match x.first_one() {
            Some(p) => {
                self.rows.push((p, x));
                true
            }
            None => false,
        }
    }
}

/// Rows extending a rank-`k` matrix to a basis of GF(2)^n, chosen greedily
/// from the unit vectors `e_1, e_2, ...` in order.
pub fn build_complement(s: &BitMatrix) -> Result<BitMatrix> {
    let n = s.ncols();
    let mut basis = EchelonBasis::new(n);
    for r in s.rows() {
        if !basis.insert(r) {
            return Err(Error::NotFullRank);
        }
    }
    let mut out = Vec::with_capacity(n - s.nrows());
    for j in 0..n {
        let mut e = BitString::zeros(n);
        e.set(j, true);
        if basis.insert(&e) {
            out.push(e);
        }
    }
    BitMatrix::from_rows(out, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_full_rank(k: usize, n: usize, rng: &mut ChaCha8Rng) -> BitMatrix {
        loop {
            let rows = (0..k).map(|_| BitString::random(n, rng)).collect();
            let m = BitMatrix::from_rows(rows, n).unwrap();
            if m.rank() == k {
                return m;
            }
        }
    }

    #[test]
    fn complement_of_unit_rows() {
        let n = 7;
        let s = BitMatrix::from_rows(BitMatrix::identity(n).rows()[..3].to_vec(), n).unwrap();
        let c = build_complement(&s).unwrap();
        assert_eq!(c.rows(), &BitMatrix::identity(n).rows()[3..]);
    }

    #[test]
    fn complement_completes_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = 4 + trial % 13;
            let k = 1 + trial % (n - 1);
            let s = random_full_rank(k, n, &mut rng);
            let c = build_complement(&s).unwrap();
            assert_eq!(c.nrows(), n - k);
            assert_eq!(s.stack(&c).unwrap().rank(), n);
            assert_eq!(build_complement(&s).unwrap(), c);
        }
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let r: BitString = "1100".parse().unwrap();
        let m = BitMatrix::from_rows(vec![r.clone(), r], 4).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(build_complement(&m), Err(Error::NotFullRank));
        assert_eq!(BitMatrix::zeros(3, 3).inverse(), Err(Error::NotFullRank));
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..20 {
            let m = random_full_rank(n, n, &mut rng);
            let inv = m.inverse().unwrap();
            for _ in 0..10 {
                let x = BitString::random(n, &mut rng);
                assert_eq!(inv.mul_vec(&m.mul_vec(&x).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn hex_rows_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_full_rank(5, 13, &mut rng);
        assert_eq!(BitMatrix::from_hex_rows(&m.to_hex_rows(), 13).unwrap(), m);
    }
}
