//! Binary helper file.
//!
//! ```text
//! magic    "RFEXTv01"
//! tag      u8        variant (fuzzy = 0x10)
//! n k t v ell        u16 big-endian each
//! code     u16 length, then UTF-8 key (empty when errorless)
//! s        k bits, MSB-first, zero-padded to a byte (absent when errorless)
//! i        seed bits, packed likewise
//! sigma    v bits, packed likewise
//! ```
//!
//! The seed length is implied by the header: `n/2` for the new construction,
//! `n - v` for the baseline, and `n'/2` for the fuzzy construction, where
//! `n'` is `n - k` rounded down to even.

use std::sync::Arc;

use rfext_core::fuzzy::FUZZY_FILE_TAG;
use rfext_core::{
    code_from_key, BitString, Error, ExtractorParams, FieldSpec, FuzzyHelper, FuzzyParams, HelperString, Result,
    Variant,
};

pub const MAGIC: &[u8; 8] = b"RFEXTv01";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelperFile {
    pub tag: u8,
    pub n: u16,
    pub k: u16,
    pub t: u16,
    pub v: u16,
    pub ell: u16,
    pub code_key: String,
    pub s: BitString,
    pub i: BitString,
    pub sigma: BitString,
}

fn u16_of(x: usize, what: &str) -> Result<u16> {
    u16::try_from(x).map_err(|_| Error::Format(format!("{what} = {x} does not fit in 16 bits")))
}

/// Bits in the seed, from the header fields.
fn seed_len(tag: u8, n: usize, k: usize, v: usize) -> Result<usize> {
    if tag == FUZZY_FILE_TAG {
        let c = n.checked_sub(k).ok_or_else(|| Error::Format(format!("k = {k} exceeds n = {n}")))?;
        return Ok(c / 2);
    }
    match Variant::from_file_tag(tag) {
        Some(variant) if variant.is_dkrs() => n.checked_sub(v).ok_or_else(|| Error::Format("v exceeds n".into())),
        Some(_) => Ok(n / 2),
        None => Err(Error::Format(format!("unknown variant tag 0x{tag:02x}"))),
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() < len {
            return Err(Error::Format(format!("file ends inside {what}")));
        }
        let (head, rest) = self.bytes.split_at(len);
        self.bytes = rest;
        Ok(head)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    /// `len` bits packed MSB-first; padding bits must be zero.
    fn bits(&mut self, len: usize, what: &str) -> Result<BitString> {
        let bytes = self.take(len.div_ceil(8), what)?;
        let bits = BitString::from_bytes(bytes, len)?;
        if bits.to_bytes() != bytes {
            return Err(Error::Format(format!("nonzero padding after {what}")));
        }
        Ok(bits)
    }
}

impl HelperFile {
    pub fn errorless(params: &ExtractorParams, helper: &HelperString) -> Result<Self> {
        Ok(HelperFile {
            tag: params.variant.file_tag(),
            n: u16_of(params.n, "n")?,
            k: 0,
            t: 0,
            v: u16_of(params.v, "v")?,
            ell: u16_of(params.ell, "ell")?,
            code_key: String::new(),
            s: BitString::zeros(0),
            i: helper.i.bits(),
            sigma: helper.sigma.clone(),
        })
    }

    pub fn fuzzy(params: &FuzzyParams, helper: &FuzzyHelper) -> Result<Self> {
        Ok(HelperFile {
            tag: FUZZY_FILE_TAG,
            n: u16_of(params.n, "n")?,
            k: u16_of(params.k, "k")?,
            t: u16_of(params.t, "t")?,
            v: u16_of(params.v, "v")?,
            ell: u16_of(params.ell, "ell")?,
            code_key: params.code.key().to_string(),
            s: helper.s.clone(),
            i: helper.i.bits(),
            sigma: helper.sigma.clone(),
        })
    }

    pub fn is_fuzzy(&self) -> bool {
        self.tag == FUZZY_FILE_TAG
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(self.tag);
        for x in [self.n, self.k, self.t, self.v, self.ell] {
            out.extend_from_slice(&x.to_be_bytes());
        }
        out.extend_from_slice(&(self.code_key.len() as u16).to_be_bytes());
        out.extend_from_slice(self.code_key.as_bytes());
        for bits in [&self.s, &self.i, &self.sigma] {
            out.extend_from_slice(&bits.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes };
        if r.take(8, "magic")? != MAGIC {
            return Err(Error::Format("not a helper file (bad magic)".into()));
        }
        let tag = r.take(1, "variant tag")?[0];
        let [n, k, t, v, ell] = ["n", "k", "t", "v", "ell"].map(|w| r.u16(w));
        let (n, k, t, v, ell) = (n?, k?, t?, v?, ell?);
        let seed = seed_len(tag, n as usize, k as usize, v as usize)?;
        let key_len = r.u16("code key length")? as usize;
        let code_key = String::from_utf8(r.take(key_len, "code key")?.to_vec())
            .map_err(|_| Error::Format("code key is not UTF-8".into()))?;
        let fuzzy = tag == FUZZY_FILE_TAG;
        if fuzzy == code_key.is_empty() || (!fuzzy && (k != 0 || t != 0)) {
            return Err(Error::Format("code fields do not match the variant".into()));
        }
        let s = r.bits(k as usize, "s")?;
        let i = r.bits(seed, "i")?;
        let sigma = r.bits(v as usize, "sigma")?;
        if !r.bytes.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", r.bytes.len())));
        }
        Ok(HelperFile { tag, n, k, t, v, ell, code_key, s, i, sigma })
    }

    /// Parameters and helper for the errorless constructions, in the
    /// standard basis.
    pub fn to_errorless(&self) -> Result<(ExtractorParams, HelperString)> {
        let variant = Variant::from_file_tag(self.tag)
            .ok_or_else(|| Error::Format(format!("variant tag 0x{:02x} is not errorless", self.tag)))?;
        let n = self.n as usize;
        let params = ExtractorParams::with_layout(variant, n, n, self.v as usize, self.ell as usize)?;
        let field = params.field()?;
        let i = field.from_bits(&self.i)?;
        Ok((params, HelperString { i, sigma: self.sigma.clone() }))
    }

    pub fn to_fuzzy(&self) -> Result<(FuzzyParams, FuzzyHelper)> {
        if !self.is_fuzzy() {
            return Err(Error::Format("not a fuzzy helper file".into()));
        }
        let code = Arc::new(code_from_key(&self.code_key)?);
        if code.n() != self.n as usize || code.k() != self.k as usize || code.t() != self.t as usize {
            return Err(Error::Format(format!("header does not match code {}", self.code_key)));
        }
        let truncate = (code.n() - code.k()) % 2 == 1;
        let n = code.n();
        let params = FuzzyParams::with_layout(code, n, self.v as usize, self.ell as usize, truncate)?;
        let field: FieldSpec = params.field()?;
        let i = field.from_bits(&self.i)?;
        Ok((params, FuzzyHelper { s: self.s.clone(), i, sigma: self.sigma.clone() }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rfext_core::{Extractor, FuzzyExtractor};

    #[test]
    fn errorless_layout_is_byte_exact() {
        let params = ExtractorParams::with_layout(Variant::New, 8, 8, 2, 2).unwrap();
        let ex = Extractor::new(params.clone()).unwrap();
        let w: BitString = "00100011".parse().unwrap();
        let (_, helper) = ex.gen_with_seed(&w, &ex.field().from_basis_u64(0b0011)).unwrap();
        let bytes = HelperFile::errorless(&params, &helper).unwrap().to_bytes();
        let mut expect = b"RFEXTv01".to_vec();
        expect.push(1);
        expect.extend_from_slice(&[0, 8, 0, 0, 0, 0, 0, 2, 0, 2, 0, 0]);
        // i = 0011 and sigma = 01, each padded to a byte.
        expect.extend_from_slice(&[0b0011_0000, 0b0100_0000]);
        assert_eq!(bytes, expect);
    }

    #[test]
    fn round_trips_for_every_variant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for variant in Variant::ALL {
            let params = rfext_core::derive_params(
                64,
                60,
                rfext_core::extractor::parse_log2("3").unwrap(),
                rfext_core::extractor::parse_log2("1").unwrap(),
                variant,
            )
            .unwrap();
            let ex = Extractor::new(params.clone()).unwrap();
            let w = BitString::random(64, &mut rng);
            let (key, helper) = ex.gen(&w, &mut rng).unwrap();
            let file = HelperFile::errorless(&params, &helper).unwrap();
            let parsed = HelperFile::from_bytes(&file.to_bytes()).unwrap();
            assert_eq!(parsed, file);
            let (p2, h2) = parsed.to_errorless().unwrap();
            assert_eq!(h2, helper);
            assert_eq!(Extractor::new(p2).unwrap().rep(&w, &h2).unwrap(), Some(key));
        }
    }

    #[test]
    fn fuzzy_round_trip() {
        let code = Arc::new(code_from_key("bch-255-8").unwrap());
        let params = rfext_core::derive_fuzzy_params(
            code,
            255,
            rfext_core::extractor::parse_log2("8").unwrap(),
            rfext_core::extractor::parse_log2("2").unwrap(),
            true,
        )
        .unwrap();
        let fx = FuzzyExtractor::new(params.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = BitString::random(255, &mut rng);
        let (key, helper) = fx.gen(&w, &mut rng).unwrap();
        let file = HelperFile::fuzzy(&params, &helper).unwrap();
        let parsed = HelperFile::from_bytes(&file.to_bytes()).unwrap();
        assert_eq!(parsed, file);
        let (p2, h2) = parsed.to_fuzzy().unwrap();
        assert_eq!(h2, helper);
        assert_eq!(FuzzyExtractor::new(p2).unwrap().rep(&w, &h2).unwrap(), Some(key));
    }

    #[test]
    fn malformed_files_are_rejected() {
        let params = ExtractorParams::with_layout(Variant::New, 8, 8, 2, 2).unwrap();
        let ex = Extractor::new(params.clone()).unwrap();
        let (_, helper) = ex.gen_with_seed(&BitString::zeros(8), &ex.field().one()).unwrap();
        let good = HelperFile::errorless(&params, &helper).unwrap().to_bytes();

        let mut bad_tag = good.clone();
        bad_tag[8] = 0x42;
        assert!(HelperFile::from_bytes(&bad_tag).is_err());
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(HelperFile::from_bytes(&bad_magic).is_err());
        assert!(HelperFile::from_bytes(&good[..good.len() - 1]).is_err());
        let mut trailing = good.clone();
        trailing.push(0);
        assert!(HelperFile::from_bytes(&trailing).is_err());
        let mut padding = good.clone();
        *padding.last_mut().unwrap() |= 1;
        assert!(HelperFile::from_bytes(&padding).is_err());
    }
}
