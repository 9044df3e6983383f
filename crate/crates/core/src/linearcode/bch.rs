//! Primitive narrow-sense binary BCH codes and their algebraic decoder.
//!
//! A word `w` of length `n = 2^m - 1` is read as `w(x) = sum w_j x^j` (bit
//! position `j` carries `x^j`). The sketch of `w` is `w(x) mod g(x)`, with
//! bit `r` of the sketch holding the coefficient of `x^r`.

use crate::bits::BitString;
use crate::error::{Error, Result};

use super::matrix::BitMatrix;

/// Primitive polynomials for GF(2^m), `m = 3..=16`.
const PRIMITIVE: [u32; 14] = [
    0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
];

/// Log/antilog tables for GF(2^m).
#[derive(Clone, Debug)]
pub(crate) struct LogTables {
    m: usize,
    order: usize,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl LogTables {
    pub(crate) fn new(m: usize) -> Result<Self> {
        if !(3..=16).contains(&m) {
            return Err(Error::Unsupported(format!("BCH field GF(2^{m}) outside 3..=16")));
        }
        let poly = PRIMITIVE[m - 3];
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut x: u32 = 1;
        for (e, slot) in exp.iter_mut().enumerate().take(order) {
            *slot = x as u16;
            assert!(e == 0 || x != 1, "polynomial {poly:#x} is not primitive");
            log[x as usize] = e as u16;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= poly;
            }
        }
        assert_eq!(x, 1, "polynomial {poly:#x} is not primitive");
        for e in order..2 * order {
            exp[e] = exp[e - order];
        }
        Ok(LogTables { m, order, exp, log })
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0);
        if a == 0 {
            return 0;
        }
        let e = self.log[a as usize] as usize + self.order - self.log[b as usize] as usize;
        self.exp[e % self.order]
    }

    fn alpha_pow(&self, e: usize) -> u16 {
        self.exp[e % self.order]
    }
}

#[derive(Clone, Debug)]
pub struct BchCode {
    n: usize,
    t: usize,
    tables: LogTables,
    /// Generator coefficients, index = exponent.
    generator: Vec<bool>,
}

/// Cyclotomic coset of `j` modulo `2^m - 1`.
pub(crate) fn cyclotomic_coset(j: usize, m: usize) -> Vec<usize> {
    let n = (1usize << m) - 1;
    let mut out = vec![j % n];
    let mut c = (2 * j) % n;
    while c != j % n {
        out.push(c);
        c = (2 * c) % n;
    }
    out
}

fn poly_mul_gf2(a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out = vec![false; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= y;
            }
        }
    }
    out
}

impl BchCode {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        let m = (n + 1).trailing_zeros() as usize;
        if n + 1 != 1 << m || !(3..=16).contains(&m) {
            return Err(Error::Unsupported(format!("BCH length {n} is not 2^m - 1 with 3 <= m <= 16")));
        }
        if t == 0 || 2 * t + 1 > n {
            return Err(Error::Unsupported(format!("BCH radius t = {t} out of range for n = {n}")));
        }
        let tables = LogTables::new(m)?;
        let mut seen = vec![false; n];
        let mut generator = vec![true];
        for j in 1..=2 * t {
            if seen[j % n] {
                continue;
            }
            let coset = cyclotomic_coset(j, m);
            // prod over the coset of (x - alpha^c), coefficients in GF(2^m)
            let mut minimal: Vec<u16> = vec![1];
            for &c in &coset {
                seen[c] = true;
                let root = tables.alpha_pow(c);
                let mut next = vec![0u16; minimal.len() + 1];
                for (i, &coef) in minimal.iter().enumerate() {
                    next[i + 1] ^= coef;
                    next[i] ^= tables.mul(coef, root);
                }
                minimal = next;
            }
            let binary: Vec<bool> = minimal
                .iter()
                .map(|&c| {
                    assert!(c <= 1, "minimal polynomial must be binary");
                    c == 1
                })
                .collect();
            generator = poly_mul_gf2(&generator, &binary);
        }
        if generator.len() - 1 >= n {
            return Err(Error::Unsupported(format!("BCH({n}, t = {t}) has dimension 0")));
        }
        Ok(BchCode { n, t, tables, generator })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Sketch length: the degree of the generator polynomial.
    pub fn redundancy(&self) -> usize {
        self.generator.len() - 1
    }

    pub fn field_degree(&self) -> usize {
        self.tables.m
    }

    /// The `redundancy x n` matrix whose column `j` is `x^j mod g(x)`.
    pub fn sketch_matrix(&self) -> BitMatrix {
        let r = self.redundancy();
        let mut mat = BitMatrix::zeros(r, self.n);
        let mut col = vec![false; r];
        col[0] = true;
        for j in 0..self.n {
            for (row, &bit) in col.iter().enumerate() {
                mat.set(row, j, bit);
            }
            // col <- col * x mod g
            let carry = col[r - 1];
            col.rotate_right(1);
            col[0] = false;
            if carry {
                for (c, &g) in col.iter_mut().zip(&self.generator[..r]) {
                    *c ^= g;
                }
            }
        }
        mat
    }

    /// Finds the error pattern of weight at most `t` whose remainder modulo
    /// `g` equals `remainder`, if any.
    pub fn decode_remainder(&self, remainder: &BitString) -> Option<BitString> {
        let (n, t) = (self.n, self.t);
        assert_eq!(remainder.len(), self.redundancy());
        if remainder.is_zero() {
            return Some(BitString::zeros(n));
        }
        let tb = &self.tables;
        // S_j = r(alpha^j), j = 1..=2t
        let syn: Vec<u16> = (1..=2 * t)
            .map(|j| remainder.ones_positions().fold(0u16, |acc, p| acc ^ tb.alpha_pow(j * p)))
            .collect();

        // Berlekamp-Massey
        let mut lambda = vec![0u16; 2 * t + 2];
        let mut prev = vec![0u16; 2 * t + 2];
        lambda[0] = 1;
        prev[0] = 1;
        let (mut len, mut shift, mut prev_disc) = (0usize, 1usize, 1u16);
        for step in 0..2 * t {
            let mut disc = syn[step];
            for i in 1..=len {
                disc ^= tb.mul(lambda[i], syn[step - i]);
            }
            if disc == 0 {
                shift += 1;
                continue;
            }
            let coef = tb.div(disc, prev_disc);
            let snapshot = lambda.clone();
            for i in 0..lambda.len() - shift {
                lambda[i + shift] ^= tb.mul(coef, prev[i]);
            }
            if 2 * len <= step {
                len = step + 1 - len;
                prev = snapshot;
                prev_disc = disc;
                shift = 1;
            } else {
                shift += 1;
            }
        }
        if len > t || lambda[len + 1..].iter().any(|&c| c != 0) {
            return None;
        }

        // Chien search: position p is in error iff Lambda(alpha^-p) = 0.
        let mut err = BitString::zeros(n);
        let mut found = 0;
        for p in 0..n {
            let inv = tb.alpha_pow(tb.order - p % tb.order);
            let mut acc = 0u16;
            let mut pow = 1u16;
            for &c in &lambda[..=len] {
                acc ^= tb.mul(c, pow);
                pow = tb.mul(pow, inv);
            }
            if acc == 0 {
                err.set(p, true);
                found += 1;
            }
        }
        if found != len {
            return None;
        }
        (self.remainder(&err) == *remainder).then_some(err)
    }

    /// `w(x) mod g(x)`.
    pub fn remainder(&self, w: &BitString) -> BitString {
        let r = self.redundancy();
        let mut rem = vec![false; r];
        for p in (0..w.len()).rev() {
            let carry = rem[r - 1];
            rem.rotate_right(1);
            rem[0] = w.get(p);
            if carry {
                for (c, &g) in rem.iter_mut().zip(&self.generator[..r]) {
                    *c ^= g;
                }
            }
        }
        BitString::from_bools(&rem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Dimension oracle: the redundancy is the total size of the distinct
    /// cyclotomic cosets that contain 1..=2t.
    fn redundancy_oracle(m: usize, t: usize) -> usize {
        let n = (1 << m) - 1;
        let mut covered = std::collections::BTreeSet::new();
        for j in 1..=2 * t {
            if !covered.contains(&(j % n)) {
                covered.extend(cyclotomic_coset(j, m));
            }
        }
        covered.len()
    }

    #[test]
    fn dimensions_match_the_coset_oracle() {
        assert_eq!(redundancy_oracle(4, 2), 8);
        assert_eq!(redundancy_oracle(8, 8), 64);
        for (m, t) in [(3, 1), (4, 1), (4, 2), (4, 3), (5, 3), (6, 4), (8, 8), (8, 12), (10, 5)] {
            let code = BchCode::new((1 << m) - 1, t).unwrap();
            assert_eq!(code.redundancy(), redundancy_oracle(m, t), "m = {m}, t = {t}");
        }
    }

    #[test]
    fn generator_divides_x_n_minus_1() {
        for (n, t) in [(15, 2), (31, 3), (255, 8)] {
            let code = BchCode::new(n, t).unwrap();
            let mut xn1 = BitString::zeros(n + 1);
            xn1.set(0, true);
            xn1.set(n, true);
            assert!(code.remainder(&xn1).is_zero());
            assert!(code.sketch_matrix().column(0).get(0));
        }
    }

    #[test]
    fn sketch_matrix_agrees_with_remainder() {
        let code = BchCode::new(31, 3).unwrap();
        let s = code.sketch_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let w = BitString::random(31, &mut rng);
            assert_eq!(s.mul_vec(&w).unwrap(), code.remainder(&w));
        }
    }

    #[test]
    fn decodes_every_pattern_up_to_t_bch15() {
        let code = BchCode::new(15, 2).unwrap();
        for a in 0..15 {
            for b in a..15 {
                let mut e = BitString::zeros(15);
                e.set(a, true);
                e.set(b, true);
                assert_eq!(code.decode_remainder(&code.remainder(&e)), Some(e));
            }
        }
        assert_eq!(code.decode_remainder(&BitString::zeros(8)), Some(BitString::zeros(15)));
    }

    #[test]
    fn random_errors_bch255_t8() {
        let code = BchCode::new(255, 8).unwrap();
        assert_eq!(code.redundancy(), 64);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..2_000 {
            let weight = trial % 9;
            let mut e = BitString::zeros(255);
            for p in sample(&mut rng, 255, weight) {
                e.set(p, true);
            }
            assert_eq!(code.decode_remainder(&code.remainder(&e)).as_ref(), Some(&e));
        }
    }

    #[test]
    fn heavy_errors_are_not_miscorrected_silently() {
        // Past the radius the decoder either fails or returns a valid
        // weight-<=t pattern with the same remainder.
        let code = BchCode::new(63, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let mut e = BitString::zeros(63);
            for p in sample(&mut rng, 63, 6) {
                e.set(p, true);
            }
            let r = code.remainder(&e);
            if let Some(found) = code.decode_remainder(&r) {
                assert!(found.weight() <= 3);
                assert_eq!(code.remainder(&found), r);
            }
        }
    }

    #[test]
    fn rejects_unsupported_shapes() {
        assert!(BchCode::new(16, 1).is_err());
        assert!(BchCode::new(7, 0).is_err());
        assert!(BchCode::new(7, 4).is_err());
        assert!(BchCode::new(1 << 17, 1).is_err());
    }
}
