//! Word-sized mirrors of the errorless constructions for exhaustive
//! enumeration. Secrets, seeds and field elements are integers whose binary
//! expansion (most significant bit first) is the bit string.

use crate::error::{Error, Result};
use crate::extractor::ExtractorParams;
use crate::gf2k::FieldSpec;

/// Field arithmetic on basis-order integers, degree <= 16.
#[derive(Clone, Debug)]
pub(crate) struct FastField {
    pub(crate) spec: FieldSpec,
    to_coeffs: Vec<u32>,
    /// Discrete logs and powers of a generator, on basis-order integers.
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl FastField {
    pub(crate) fn new(spec: &FieldSpec) -> Result<Self> {
        let k = spec.degree();
        if k > 16 {
            return Err(Error::InstanceTooLarge { cost: 1 << k.min(127), limit: 1 << 16 });
        }
        let size = 1u64 << k;
        let to_coeffs: Vec<u32> = (0..size).map(|b| spec.basis_to_coeffs_u64(b) as u32).collect();
        let order = size as usize - 1;
        for g in 1..size {
            let mut exp = Vec::with_capacity(2 * order);
            let mut x = 1u64;
            for _ in 0..order {
                exp.push(spec.coeffs_to_basis_u64(x) as u32);
                x = spec.mul_coeffs_u64(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() != order {
                continue;
            }
            let mut log = vec![0u32; size as usize];
            for (j, &e) in exp.iter().enumerate() {
                log[e as usize] = j as u32;
            }
            // Doubled so that log a + log b needs no reduction.
            exp.extend_from_within(..);
            return Ok(FastField { spec: spec.clone(), to_coeffs, log, exp });
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    pub(crate) fn degree(&self) -> usize {
        self.spec.degree()
    }

    pub(crate) fn size(&self) -> u64 {
        1 << self.degree()
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize] as u64
    }

    /// Whether the coefficient of `x^0` is one.
    #[inline]
    pub(crate) fn constant_coefficient(&self, a: u64) -> bool {
        self.to_coeffs[a as usize] & 1 == 1
    }

    pub(crate) fn div_by_x(&self, a: u64) -> u64 {
        self.spec.from_basis_u64(a).div_by_x().to_basis_u64()
    }
}

#[inline]
pub(crate) fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Errorless extractor on words, for `n <= 32`.
#[derive(Clone, Debug)]
pub(crate) struct RawExtractor {
    pub(crate) n: usize,
    pub(crate) v: usize,
    pub(crate) ell: usize,
    pub(crate) dkrs: bool,
    pub(crate) field: FastField,
}

impl RawExtractor {
    pub(crate) fn new(params: &ExtractorParams) -> Result<Self> {
        if params.n > 32 {
            return Err(Error::InstanceTooLarge { cost: 1 << params.n.min(127), limit: 1 << 32 });
        }
        let field = FastField::new(&params.field()?)?;
        Ok(RawExtractor { n: params.n, v: params.v, ell: params.ell, dkrs: params.variant.is_dkrs(), field })
    }

    pub(crate) fn degree(&self) -> usize {
        self.field.degree()
    }

    /// `(a, b)` halves of `w`.
    #[inline]
    pub(crate) fn split(&self, w: u64) -> (u64, u64) {
        let low = self.n - self.degree();
        (w >> low, w & mask(low))
    }

    /// `i*a`, the product whose bits feed the tag.
    #[inline]
    pub(crate) fn product(&self, w: u64, i: u64) -> u64 {
        self.field.mul(i, self.split(w).0)
    }

    /// `(sigma, key)` for secret `w` and seed `i`.
    #[inline]
    pub(crate) fn tag_key(&self, w: u64, i: u64) -> (u64, u64) {
        let d = self.degree();
        let (a, b) = self.split(w);
        let z = self.field.mul(i, a);
        if self.dkrs {
            ((z >> (d - self.v)) ^ b, (z >> (d - self.v - self.ell)) & mask(self.ell))
        } else {
            let y = z ^ b;
            (y >> (d - self.v), (y >> (d - self.v - self.ell)) & mask(self.ell))
        }
    }

    /// Tag only, as Rep recomputes it.
    #[inline]
    pub(crate) fn tag(&self, w: u64, i: u64) -> u64 {
        self.tag_key(w, i).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::extractor::{Extractor, Variant};
    use crate::gf2k::Basis;

    #[test]
    fn matches_the_bitstring_extractor() {
        let cases = [
            ExtractorParams::with_layout(Variant::New, 8, 8, 2, 2).unwrap(),
            ExtractorParams::with_layout(Variant::New, 10, 10, 3, 2).unwrap(),
            ExtractorParams::with_layout(Variant::DkrsPost, 12, 12, 4, 4).unwrap().with_basis(Basis::ParitySplit),
            ExtractorParams::with_layout(Variant::DkrsImprovedPre, 12, 12, 3, 4).unwrap(),
        ];
        for params in cases {
            let raw = RawExtractor::new(&params).unwrap();
            let ex = Extractor::new(params.clone()).unwrap();
            for w in (0..1u64 << params.n).step_by(7) {
                let wb = BitString::from_u64(w, params.n);
                for i in 0..raw.field.size() {
                    let (key, helper) = ex.gen_with_seed(&wb, &ex.field().from_basis_u64(i)).unwrap();
                    let (sigma, k) = raw.tag_key(w, i);
                    assert_eq!(helper.sigma.to_u64(), sigma);
                    assert_eq!(key.bits().to_u64(), k);
                }
            }
        }
    }

    #[test]
    fn fast_mul_matches_field() {
        for basis in [Basis::Standard, Basis::ParitySplit] {
            let small = FastField::new(&FieldSpec::standard(1).unwrap()).unwrap();
            assert_eq!((small.mul(1, 1), small.mul(1, 0)), (1, 0));
            let spec = FieldSpec::with_default_modulus(6, basis).unwrap();
            let f = FastField::new(&spec).unwrap();
            for a in 0..64 {
                for b in 0..64 {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    let expect = (&spec.from_basis_u64(a) * &spec.from_basis_u64(b)).to_basis_u64();
                    assert_eq!(f.mul(a, b), expect);
                }
                assert_eq!(f.constant_coefficient(a), spec.from_basis_u64(a).constant_coefficient());
            }
        }
    }
}
