//! Arithmetic in binary extension fields GF(2^k).
//!
//! Elements are stored internally as polynomial coefficients in the standard
//! basis (bit `j` of the limb vector is the coefficient of `x^j`). The basis of
//! a [`FieldSpec`] only governs how an element maps to and from its k-bit
//! string: addition is exclusive-or of bit strings in every basis, and every
//! basis change is a pure bit permutation.
//!
//! Two bases are supported:
//!
//! * standard, bit order `(x^{k-1}, ..., x, 1)`;
//! * parity-split (even `k` only), bit order
//!   `(x^{k-1}, x^{k-3}, ..., x, x^{k-2}, x^{k-4}, ..., 1)`.
//!
//! In the parity-split basis, for any `z` whose constant coefficient is zero,
//! the top half of the bits of `z` equals the bottom half of the bits of
//! `z / x`.

use std::fmt;
use std::ops::{Add, Mul};
use std::sync::Arc;

use rand::Rng;
use smallvec::{smallvec, SmallVec};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Little-endian 64-bit limbs of a GF(2)[x] polynomial.
pub type Limbs = SmallVec<[u64; 2]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Standard,
    ParitySplit,
}

impl Basis {
    pub fn tag(self) -> &'static str {
        match self {
            Basis::Standard => "standard",
            Basis::ParitySplit => "parity-split",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "standard" => Ok(Basis::Standard),
            "parity-split" | "split" => Ok(Basis::ParitySplit),
            other => Err(Error::Format(format!("unknown basis tag {other:?}"))),
        }
    }
}

/// Lowest-weight irreducible moduli pinned for common degrees, as
/// `(degree, exponents of the non-leading terms)`.
const MODULUS_TABLE: &[(usize, &[usize])] = &[
    (4, &[1, 0]),
    (8, &[4, 3, 1, 0]),
    (16, &[5, 3, 1, 0]),
    (32, &[7, 3, 2, 0]),
    (64, &[4, 3, 1, 0]),
    (128, &[7, 2, 1, 0]),
];

struct SpecInner {
    degree: usize,
    modulus: Limbs,
    basis: Basis,
    /// Exponent of the basis vector at each bit position.
    exponent_at: Vec<usize>,
}

/// A binary extension field GF(2^k) with a fixed modulus and basis.
///
/// Cheap to clone; all clones share the same description.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<SpecInner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.degree == other.inner.degree
                && self.inner.modulus == other.inner.modulus
                && self.inner.basis == other.inner.basis)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({})", self.descriptor())
    }
}

impl FieldSpec {
    /// Builds GF(2^degree) from a modulus given as a `degree + 1` bit string
    /// (most significant coefficient first).
    pub fn new(degree: usize, modulus: &BitString, basis: Basis) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("field degree must be positive".into()));
        }
        if modulus.len() != degree + 1 {
            return Err(Error::LengthMismatch { expected: degree + 1, actual: modulus.len() });
        }
        let mut limbs: Limbs = smallvec![0; (degree + 1).div_ceil(64)];
        for (p, bit) in modulus.iter().enumerate() {
            if bit {
                let e = degree - p;
                limbs[e / 64] |= 1 << (e % 64);
            }
        }
        Self::from_limbs(degree, limbs, basis)
    }

    /// GF(2^degree) in the standard basis with the pinned default modulus.
    pub fn standard(degree: usize) -> Result<Self> {
        Self::with_default_modulus(degree, Basis::Standard)
    }

    pub fn with_default_modulus(degree: usize, basis: Basis) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("field degree must be positive".into()));
        }
        Self::from_limbs(degree, default_modulus(degree), basis)
    }

    fn from_limbs(degree: usize, modulus: Limbs, basis: Basis) -> Result<Self> {
        if poly_degree(&modulus) != Some(degree) || !is_irreducible(&modulus) {
            return Err(Error::NotIrreducible(degree));
        }
        if modulus[0] & 1 == 0 {
            // Only reachable for degree 1 with modulus x, where x itself is zero.
            return Err(Error::Unsupported("modulus must have a nonzero constant term".into()));
        }
        if basis == Basis::ParitySplit && degree % 2 == 1 {
            return Err(Error::OddDegree(degree));
        }
        Ok(FieldSpec {
            inner: Arc::new(SpecInner { degree, modulus, basis, exponent_at: exponent_map(degree, basis) }),
        })
    }

    /// Same field, different basis.
    pub fn with_basis(&self, basis: Basis) -> Result<Self> {
        if basis == self.basis() {
            return Ok(self.clone());
        }
        Self::from_limbs(self.degree(), self.inner.modulus.clone(), basis)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    #[inline]
    pub fn basis(&self) -> Basis {
        self.inner.basis
    }

    /// The modulus as a `degree + 1` bit string.
    pub fn modulus_bits(&self) -> BitString {
        let k = self.degree();
        (0..=k).map(|p| limb_bit(&self.inner.modulus, k - p)).collect()
    }

    /// `degree:modulus-hex:basis`, e.g. `4:13:standard`.
    pub fn descriptor(&self) -> String {
        format!("{}:{}:{}", self.degree(), self.modulus_bits().to_hex(), self.basis().tag())
    }

    pub fn from_descriptor(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [deg, modulus, basis] = parts[..] else {
            return Err(Error::Format(format!("field descriptor {s:?} is not degree:modulus:basis")));
        };
        let degree: usize = deg.parse().map_err(|_| Error::Format(format!("bad degree {deg:?}")))?;
        let modulus = BitString::from_hex(modulus, degree + 1)?;
        Self::new(degree, &modulus, Basis::from_tag(basis)?)
    }

    fn limb_count(&self) -> usize {
        self.degree().div_ceil(64)
    }

    fn element(&self, coeffs: Limbs) -> FieldElement {
        FieldElement { coeffs, spec: self.clone() }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(smallvec![0; self.limb_count()])
    }

    pub fn one(&self) -> FieldElement {
        let mut c: Limbs = smallvec![0; self.limb_count()];
        c[0] = 1;
        self.element(c)
    }

    /// The element represented by the monomial `x`.
    pub fn x(&self) -> FieldElement {
        let mut c: Limbs = smallvec![0; self.limb_count()];
        set_limb_bit(&mut c, 1);
        self.element(self.reduce(c))
    }

    /// Interprets a k-bit string in this field's basis.
    pub fn from_bits(&self, bits: &BitString) -> Result<FieldElement> {
        if bits.len() != self.degree() {
            return Err(Error::LengthMismatch { expected: self.degree(), actual: bits.len() });
        }
        let mut c: Limbs = smallvec![0; self.limb_count()];
        for p in bits.ones_positions() {
            set_limb_bit(&mut c, self.inner.exponent_at[p]);
        }
        Ok(self.element(c))
    }

    pub fn from_hex(&self, hex: &str) -> Result<FieldElement> {
        self.from_bits(&BitString::from_hex(hex, self.degree())?)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.from_bits(&BitString::random(self.degree(), rng)).expect("length matches degree")
    }

    /// All field elements, ordered by their bit strings. Only for degree <= 24.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        assert!(self.degree() <= 24, "refusing to enumerate GF(2^{})", self.degree());
        (0..1u64 << self.degree()).map(move |v| self.from_basis_u64(v))
    }

    /// Element whose k-bit string has big-endian integer value `bits`
    /// (degree <= 64).
    pub fn from_basis_u64(&self, bits: u64) -> FieldElement {
        let coeffs = self.basis_to_coeffs_u64(bits);
        let mut c: Limbs = smallvec![0; self.limb_count()];
        c[0] = coeffs;
        self.element(c)
    }

    /// Maps the integer value of a k-bit string in this basis to standard
    /// coefficients (bit `j` = coefficient of `x^j`). Degree <= 64.
    pub fn basis_to_coeffs_u64(&self, bits: u64) -> u64 {
        let k = self.degree();
        assert!(k <= 64);
        if self.basis() == Basis::Standard {
            return bits;
        }
        let mut out = 0u64;
        for (p, &e) in self.inner.exponent_at.iter().enumerate() {
            out |= (bits >> (k - 1 - p) & 1) << e;
        }
        out
    }

    /// Inverse of [`basis_to_coeffs_u64`](Self::basis_to_coeffs_u64).
    pub fn coeffs_to_basis_u64(&self, coeffs: u64) -> u64 {
        let k = self.degree();
        assert!(k <= 64);
        if self.basis() == Basis::Standard {
            return coeffs;
        }
        let mut out = 0u64;
        for (p, &e) in self.inner.exponent_at.iter().enumerate() {
            out |= (coeffs >> e & 1) << (k - 1 - p);
        }
        out
    }

    /// Product of two standard-coefficient words (degree <= 64).
    pub fn mul_coeffs_u64(&self, a: u64, b: u64) -> u64 {
        let k = self.degree();
        assert!(k <= 64);
        let mut prod = clmul64(a, b);
        let m = self.inner.modulus[0] as u128 | if k == 64 { 1u128 << 64 } else { 0 };
        for bit in (k..2 * k - 1).rev() {
            if prod >> bit & 1 == 1 {
                prod ^= m << (bit - k);
            }
        }
        prod as u64
    }

    fn reduce(&self, mut p: Limbs) -> Limbs {
        let k = self.degree();
        let m = &self.inner.modulus;
        if let Some(mut d) = poly_degree(&p) {
            while d >= k {
                xor_shifted(&mut p, m, d - k);
                match poly_degree(&p) {
                    Some(nd) => d = nd,
                    None => break,
                }
            }
        }
        p.truncate(self.limb_count());
        p.resize(self.limb_count(), 0);
        p
    }

    fn mul_limbs(&self, a: &Limbs, b: &Limbs) -> Limbs {
        if self.degree() <= 64 {
            let mut c: Limbs = smallvec![0];
            c[0] = self.mul_coeffs_u64(a[0], b[0]);
            return c;
        }
        self.reduce(clmul(a, b))
    }
}

fn exponent_map(k: usize, basis: Basis) -> Vec<usize> {
    match basis {
        Basis::Standard => (0..k).map(|p| k - 1 - p).collect(),
        Basis::ParitySplit => {
            let h = k / 2;
            (0..k).map(|p| if p < h { k - 1 - 2 * p } else { k - 2 - 2 * (p - h) }).collect()
        }
    }
}

/// The pinned modulus for `degree`: the table entry when present, otherwise
/// the first irreducible trinomial `x^k + x^a + 1` (smallest `a`), otherwise
/// the first irreducible pentanomial in lexicographic order.
pub fn default_modulus_bits(degree: usize) -> BitString {
    let limbs = default_modulus(degree);
    (0..=degree).map(|p| limb_bit(&limbs, degree - p)).collect()
}

fn default_modulus(k: usize) -> Limbs {
    let build = |terms: &[usize]| -> Limbs {
        let mut l: Limbs = smallvec![0; (k + 1).div_ceil(64)];
        set_limb_bit(&mut l, k);
        for &e in terms {
            set_limb_bit(&mut l, e);
        }
        l
    };
    if let Some((_, terms)) = MODULUS_TABLE.iter().find(|(d, _)| *d == k) {
        return build(terms);
    }
    if k == 1 {
        return build(&[0]);
    }
    for a in 1..k {
        let cand = build(&[a, 0]);
        if is_irreducible(&cand) {
            return cand;
        }
    }
    for a in 3..k {
        for b in 2..a {
            for c in 1..b {
                let cand = build(&[a, b, c, 0]);
                if is_irreducible(&cand) {
                    return cand;
                }
            }
        }
    }
    unreachable!("every degree >= 2 has an irreducible trinomial or pentanomial below 10^4")
}

// ---------------------------------------------------------------------------
// GF(2)[x] polynomial helpers over little-endian limbs.

#[inline]
fn limb_bit(p: &[u64], e: usize) -> bool {
    p.get(e / 64).is_some_and(|w| w >> (e % 64) & 1 == 1)
}

#[inline]
fn set_limb_bit(p: &mut Limbs, e: usize) {
    if p.len() <= e / 64 {
        p.resize(e / 64 + 1, 0);
    }
    p[e / 64] |= 1 << (e % 64);
}

fn poly_degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&w| w != 0).map(|i| i * 64 + 63 - p[i].leading_zeros() as usize)
}

/// `p ^= q << shift`.
fn xor_shifted(p: &mut Limbs, q: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    let need = q.len() + ws + 1;
    if p.len() < need {
        p.resize(need, 0);
    }
    for (i, &w) in q.iter().enumerate() {
        p[i + ws] ^= w << bs;
        if bs != 0 {
            p[i + ws + 1] ^= w >> (64 - bs);
        }
    }
}

fn clmul64(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut a = a;
    while a != 0 {
        let i = a.trailing_zeros();
        acc ^= (b as u128) << i;
        a &= a - 1;
    }
    acc
}

fn clmul(a: &[u64], b: &[u64]) -> Limbs {
    let mut out: Limbs = smallvec![0; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let prod = clmul64(x, y);
            out[i + j] ^= prod as u64;
            out[i + j + 1] ^= (prod >> 64) as u64;
        }
    }
    out
}

fn poly_rem(a: &[u64], m: &[u64]) -> Limbs {
    let mut r: Limbs = a.iter().copied().collect();
    let dm = poly_degree(m).expect("nonzero modulus");
    while let Some(d) = poly_degree(&r) {
        if d < dm {
            break;
        }
        xor_shifted(&mut r, m, d - dm);
    }
    let used = poly_degree(&r).map_or(1, |d| d / 64 + 1);
    r.truncate(used);
    r
}

fn poly_gcd(a: &[u64], b: &[u64]) -> Limbs {
    let mut x: Limbs = a.iter().copied().collect();
    let mut y: Limbs = b.iter().copied().collect();
    while poly_degree(&y).is_some() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn mulmod(a: &[u64], b: &[u64], m: &[u64]) -> Limbs {
    poly_rem(&clmul(a, b), m)
}

/// Irreducibility of a binary polynomial: trial division up to degree 16,
/// Rabin's test above that.
fn is_irreducible(p: &[u64]) -> bool {
    let Some(k) = poly_degree(p) else { return false };
    if k == 0 {
        return false;
    }
    if k <= 16 {
        let p = p[0];
        for d in 1..=k / 2 {
            for q in 1u64 << d..1u64 << (d + 1) {
                let mut r: Limbs = smallvec![p];
                r = poly_rem(&r, &[q]);
                if poly_degree(&r).is_none() {
                    return false;
                }
            }
        }
        return true;
    }
    let x: Limbs = smallvec![2];
    // x^(2^j) mod p for j = 0..=k.
    let mut frob = Vec::with_capacity(k + 1);
    frob.push(poly_rem(&x, p));
    for j in 0..k {
        let prev = &frob[j];
        frob.push(mulmod(prev, prev, p));
    }
    let mut check = frob[k].clone();
    xor_shifted(&mut check, &x, 0);
    if poly_degree(&check).is_some() {
        return false;
    }
    for q in prime_factors(k) {
        let mut g = frob[k / q].clone();
        xor_shifted(&mut g, &x, 0);
        let g = poly_gcd(p, &g);
        if poly_degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------

/// An element of a [`FieldSpec`].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    coeffs: Limbs,
    spec: FieldSpec,
}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({} in GF(2^{}))", self.bits(), self.spec.degree())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// The k-bit string of this element in its field's basis.
    pub fn bits(&self) -> BitString {
        let k = self.spec.degree();
        let exps = &self.spec.inner.exponent_at;
        (0..k).map(|p| limb_bit(&self.coeffs, exps[p])).collect()
    }

    /// Integer value of [`bits`](Self::bits). Degree <= 64.
    pub fn to_basis_u64(&self) -> u64 {
        self.spec.coeffs_to_basis_u64(self.coeffs[0])
    }

    /// Standard-basis coefficients packed into a word. Degree <= 64.
    pub fn to_coeffs_u64(&self) -> u64 {
        assert!(self.spec.degree() <= 64);
        self.coeffs[0]
    }

    pub fn to_hex(&self) -> String {
        self.bits().to_hex()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&w| w == 0)
    }

    /// Coefficient of `x^0` in the standard basis.
    pub fn constant_coefficient(&self) -> bool {
        self.coeffs[0] & 1 == 1
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    fn with(&self, coeffs: Limbs) -> FieldElement {
        FieldElement { coeffs, spec: self.spec.clone() }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a ^ b).collect()))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.spec.mul_limbs(&self.coeffs, &other.coeffs)))
    }

    pub fn square(&self) -> FieldElement {
        self.with(self.spec.mul_limbs(&self.coeffs, &self.coeffs))
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.spec.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, as `self^(2^k - 2)`.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut acc = self.spec.one();
        let mut sq = self.clone();
        for _ in 1..self.spec.degree() {
            sq = sq.square();
            acc = &acc * &sq;
        }
        Ok(acc)
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        self.mul(&other.inv()?)
    }

    /// `self / x`: a shift when the constant coefficient is zero, otherwise a
    /// shift of `self + modulus`.
    pub fn div_by_x(&self) -> FieldElement {
        let mut c = self.coeffs.clone();
        if self.constant_coefficient() {
            c.resize(self.spec.inner.modulus.len(), 0);
            for (w, m) in c.iter_mut().zip(&self.spec.inner.modulus) {
                *w ^= m;
            }
        }
        for i in 0..c.len() {
            let carry = c.get(i + 1).map_or(0, |w| w << 63);
            c[i] = (c[i] >> 1) | carry;
        }
        c.truncate(self.spec.limb_count());
        self.with(c)
    }

    /// The same element expressed in another basis of the same field.
    pub fn change_basis(&self, target: Basis) -> Result<FieldElement> {
        let spec = self.spec.with_basis(target)?;
        Ok(FieldElement { coeffs: self.coeffs.clone(), spec })
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;

    /// Panics if the operands belong to different fields.
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::add(self, rhs).expect("field mismatch in +")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;

    /// Panics if the operands belong to different fields.
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::mul(self, rhs).expect("field mismatch in *")
    }
}

/// Horner evaluation of `coeffs` (highest degree first) at `point`.
pub fn eval_poly(coeffs: &[FieldElement], point: &FieldElement) -> Result<FieldElement> {
    let mut acc = point.spec.zero();
    for c in coeffs {
        acc = acc.mul(point)?.add(c)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Schoolbook oracle: polynomials as coefficient vectors (index = exponent),
    /// multiplied term by term and reduced by long division.
    fn schoolbook_mul(a: u64, b: u64, modulus: u64, k: usize) -> u64 {
        let mut prod = vec![false; 2 * k];
        for i in 0..k {
            for j in 0..k {
                if (a >> i) & 1 == 1 && (b >> j) & 1 == 1 {
                    prod[i + j] ^= true;
                }
            }
        }
        for d in (k..2 * k).rev() {
            if prod[d] {
                for e in 0..=k {
                    if (modulus >> e) & 1 == 1 {
                        prod[d - k + e] ^= true;
                    }
                }
            }
        }
        (0..k).filter(|&i| prod[i]).map(|i| 1u64 << i).sum()
    }

    fn gf16() -> FieldSpec {
        FieldSpec::new(4, &"10011".parse().unwrap(), Basis::Standard).unwrap()
    }

    fn el(spec: &FieldSpec, v: u64) -> FieldElement {
        spec.from_basis_u64(v)
    }

    #[test]
    fn add_is_xor() {
        let f = gf16();
        assert_eq!(el(&f, 0b0011).add(&el(&f, 0b0101)).unwrap(), el(&f, 0b0110));
        for x in f.elements() {
            assert!(x.add(&x).unwrap().is_zero());
            assert_eq!(x.add(&f.zero()).unwrap(), x);
        }
    }

    #[test]
    fn small_field_examples() {
        let f = gf16();
        assert_eq!(schoolbook_mul(0b0010, 0b0011, 0b10011, 4), 0b0110);
        assert_eq!(el(&f, 0b0010).mul(&el(&f, 0b0011)).unwrap(), el(&f, 0b0110));

        let inv2 = (1..16).find(|&y| schoolbook_mul(0b0010, y, 0b10011, 4) == 1).unwrap();
        assert_eq!(inv2, 0b1001);
        assert_eq!(el(&f, 0b0010).inv().unwrap(), el(&f, inv2));
        assert!(f.one().inv().unwrap().is_one());

        let by_x = schoolbook_mul(0b0011, inv2, 0b10011, 4);
        assert_eq!(by_x, 0b1000);
        assert_eq!(el(&f, 0b0011).div_by_x(), el(&f, by_x));
        assert!(f.x().div_by_x().is_one());

        let horner = eval_poly(&[f.one(), el(&f, 0b0010)], &el(&f, 0b0011)).unwrap();
        assert_eq!(horner, el(&f, schoolbook_mul(1, 0b0011, 0b10011, 4) ^ 0b0010));
        assert_eq!(horner, el(&f, 0b0001));
        assert!(eval_poly(&[], &el(&f, 7)).unwrap().is_zero());
        assert_eq!(eval_poly(&[el(&f, 9)], &el(&f, 7)).unwrap(), el(&f, 9));
    }

    #[test]
    fn mul_matches_schoolbook_exhaustively_for_small_degrees() {
        for (k, modulus) in [(4usize, 0b10011u64), (6, 0b1000011), (8, 0x11b), (8, 0x11d)] {
            let bits = BitString::from_u64(modulus, k + 1);
            let f = FieldSpec::new(k, &bits, Basis::Standard).unwrap();
            for a in 0..1u64 << k {
                for b in 0..1u64 << k {
                    assert_eq!(el(&f, a).mul(&el(&f, b)).unwrap().to_basis_u64(), schoolbook_mul(a, b, modulus, k));
                }
            }
        }
    }

    #[test]
    fn inverse_and_identities_exhaustive_gf256() {
        for f in [FieldSpec::standard(8).unwrap(), FieldSpec::new(8, &BitString::from_u64(0x11d, 9), Basis::Standard).unwrap()] {
            let one = f.one();
            for x in f.elements() {
                assert_eq!(x.mul(&one).unwrap(), x);
                assert!(x.mul(&f.zero()).unwrap().is_zero());
                assert_eq!(&x.div_by_x() * &f.x(), x);
                if !x.is_zero() {
                    assert!(x.mul(&x.inv().unwrap()).unwrap().is_one());
                    assert_eq!(x.div(&x).unwrap(), one);
                }
            }
            assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn field_axioms_exhaustive_gf16() {
        let f = gf16();
        let all: Vec<_> = f.elements().collect();
        for a in &all {
            for b in &all {
                assert_eq!(a * b, b * a);
                assert_eq!(a + b, b + a);
                for c in &all {
                    assert_eq!(&(a * b) * c, a * &(b * c));
                    assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                }
            }
        }
    }

    #[test]
    fn field_axioms_random_large_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [16usize, 32, 64, 95, 128, 130] {
            let f = FieldSpec::standard(k).unwrap();
            for _ in 0..2_000 {
                let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
                assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                assert_eq!(&a * &b, &b * &a);
                if !a.is_zero() {
                    assert!((&a * &a.inv().unwrap()).is_one());
                }
                assert_eq!(&a.div_by_x() * &f.x(), a);
            }
        }
    }

    #[test]
    fn pinned_moduli_are_irreducible() {
        for &(k, _) in MODULUS_TABLE {
            assert!(is_irreducible(&default_modulus(k)), "degree {k}");
        }
        assert_eq!(default_modulus_bits(4).to_u64(), 0b10011);
        assert_eq!(default_modulus_bits(8).to_u64(), 0x11b);
        assert_eq!(default_modulus_bits(2).to_u64(), 0b111);
        assert_eq!(default_modulus_bits(1).to_u64(), 0b11);
        // Degree 6 has trinomial x^6 + x + 1.
        assert_eq!(default_modulus_bits(6).to_u64(), 0b1000011);
        // Degree 40 and 95 fall back to the search.
        for k in [20, 40, 95, 256] {
            let f = FieldSpec::standard(k).unwrap();
            assert_eq!(f.degree(), k);
        }
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        // Reuse the two code paths on degree 17..=18 by forcing Rabin via limbs.
        for k in 2..=12usize {
            let mut count = 0;
            for tail in 0..1u64 << k {
                let p = (1u64 << k) | tail;
                let trial = is_irreducible(&[p]);
                let rabin = rabin_only(p, k);
                assert_eq!(trial, rabin, "p = {p:#b}");
                count += trial as usize;
            }
            // Number of irreducible polynomials of degree k (necklace formula).
            let expected = [0, 2, 1, 2, 3, 6, 9, 18, 30, 56, 99, 186, 335][k];
            assert_eq!(count, expected, "degree {k}");
        }
    }

    fn rabin_only(p: u64, k: usize) -> bool {
        let p: Limbs = smallvec![p];
        let x: Limbs = smallvec![2];
        let mut frob = vec![poly_rem(&x, &p)];
        for j in 0..k {
            let prev = frob[j].clone();
            frob.push(mulmod(&prev, &prev, &p));
        }
        let mut check = frob[k].clone();
        xor_shifted(&mut check, &x, 0);
        if poly_degree(&check).is_some() {
            return false;
        }
        prime_factors(k).into_iter().all(|q| {
            let mut g = frob[k / q].clone();
            xor_shifted(&mut g, &x, 0);
            poly_degree(&poly_gcd(&p, &g)) == Some(0)
        })
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        let bad: BitString = "10101".parse().unwrap(); // (x^2 + x + 1)^2
        assert_eq!(FieldSpec::new(4, &bad, Basis::Standard), Err(Error::NotIrreducible(4)));
        assert!(matches!(FieldSpec::new(4, &"1001".parse().unwrap(), Basis::Standard), Err(Error::LengthMismatch { .. })));
        assert_eq!(FieldSpec::with_default_modulus(5, Basis::ParitySplit), Err(Error::OddDegree(5)));
    }

    #[test]
    fn change_basis_is_a_permutation() {
        let f = gf16();
        // standard c3 c2 c1 c0 -> parity-split c3 c1 c2 c0
        let x = f.from_bits(&"1010".parse().unwrap()).unwrap();
        let split = x.change_basis(Basis::ParitySplit).unwrap();
        assert_eq!(split.bits().to_string(), "1100");
        assert_eq!(split.change_basis(Basis::Standard).unwrap(), x);
        assert!(f.zero().change_basis(Basis::ParitySplit).unwrap().bits().is_zero());
        let f5 = FieldSpec::standard(5).unwrap();
        assert_eq!(f5.one().change_basis(Basis::ParitySplit), Err(Error::OddDegree(5)));
    }

    #[test]
    fn mul_commutes_with_basis_change() {
        let f = FieldSpec::standard(8).unwrap();
        let s = f.with_basis(Basis::ParitySplit).unwrap();
        for a in (0..256).step_by(7) {
            for b in (0..256).step_by(5) {
                let (x, y) = (el(&f, a), el(&f, b));
                let lhs = (&x * &y).change_basis(Basis::ParitySplit).unwrap();
                let rhs = &x.change_basis(Basis::ParitySplit).unwrap() * &y.change_basis(Basis::ParitySplit).unwrap();
                assert_eq!(lhs, rhs);
                assert_eq!(lhs.spec(), &s);
                // add is xor of the bit strings in the split basis too
                let xs = x.change_basis(Basis::ParitySplit).unwrap();
                let ys = y.change_basis(Basis::ParitySplit).unwrap();
                assert_eq!((&xs + &ys).bits(), xs.bits().xor(&ys.bits()));
            }
        }
    }

    #[test]
    fn split_basis_half_swap() {
        for k in [4usize, 8] {
            let s = FieldSpec::with_default_modulus(k, Basis::ParitySplit).unwrap();
            let h = k / 2;
            for z in s.elements() {
                if z.constant_coefficient() {
                    continue;
                }
                let top = z.bits().slice(0, h);
                let bottom_of_quotient = z.div_by_x().bits().slice(h, k);
                assert_eq!(top, bottom_of_quotient, "k = {k}, z = {z:?}");
            }
        }
    }

    #[test]
    fn spec_mismatch_is_reported() {
        let a = gf16().one();
        let b = FieldSpec::standard(8).unwrap().one();
        assert_eq!(a.add(&b), Err(Error::SpecMismatch));
        assert_eq!(a.mul(&b), Err(Error::SpecMismatch));
        let split = a.change_basis(Basis::ParitySplit).unwrap();
        assert_eq!(a.mul(&split), Err(Error::SpecMismatch));
        assert_eq!(eval_poly(&[b], &a), Err(Error::SpecMismatch));
    }

    #[test]
    fn descriptor_and_hex_round_trip() {
        let f = FieldSpec::with_default_modulus(8, Basis::ParitySplit).unwrap();
        assert_eq!(f.descriptor(), "8:11b:parity-split");
        assert_eq!(FieldSpec::from_descriptor(&f.descriptor()).unwrap(), f);
        let x = f.from_hex("a7").unwrap();
        assert_eq!(x.to_hex(), "a7");
        assert_eq!(FieldSpec::standard(6).unwrap().from_hex("2d").unwrap().to_hex(), "2d");
    }
}
