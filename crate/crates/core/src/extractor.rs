//! Errorless robust extractors.
//!
//! Two families share one parameter type:
//!
//! * `new` / `new-short`: `w = a || b` with `|a| = |b| = n/2`,
//!   `y = i*a + b` in GF(2^{n/2}), tag `sigma = [y]_1^v`, key `R = [y]_{v+1}^{v+ell}`.
//! * `dkrs-*`: `a = [w]_1^{n-v}` in GF(2^{n-v}), `b` the last `v` bits,
//!   `sigma = [i*a]_1^v xor b`, key `R = [i*a]_{v+1}^{n-v-beta}`.
//!
//! Bit substrings follow the 1-indexed, most-significant-first convention;
//! in code they are half-open 0-indexed slices.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2k::{Basis, FieldElement, FieldSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    New,
    NewShort,
    DkrsPre,
    DkrsPost,
    DkrsImprovedPre,
    DkrsImprovedPost,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::New,
        Variant::NewShort,
        Variant::DkrsPre,
        Variant::DkrsPost,
        Variant::DkrsImprovedPre,
        Variant::DkrsImprovedPost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::New => "new",
            Variant::NewShort => "new-short",
            Variant::DkrsPre => "dkrs-pre",
            Variant::DkrsPost => "dkrs-post",
            Variant::DkrsImprovedPre => "dkrs-improved-pre",
            Variant::DkrsImprovedPost => "dkrs-improved-post",
        }
    }

    pub fn is_dkrs(self) -> bool {
        !matches!(self, Variant::New | Variant::NewShort)
    }

    /// One-byte tag used by the helper file format.
    pub fn file_tag(self) -> u8 {
        match self {
            Variant::New => 1,
            Variant::NewShort => 2,
            Variant::DkrsPre => 3,
            Variant::DkrsPost => 4,
            Variant::DkrsImprovedPre => 5,
            Variant::DkrsImprovedPost => 6,
        }
    }

    pub fn from_file_tag(tag: u8) -> Option<Self> {
        Variant::ALL.into_iter().find(|v| v.file_tag() == tag)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variant {s:?}")))
    }
}

/// Which requirement a parameter set fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// The key cannot be made close enough to uniform.
    Uniformity,
    /// The tag needed for the requested robustness does not fit.
    Robustness,
    /// Both constraints fit individually but leave no key bits.
    KeyLength,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Uniformity => "uniformity",
            Constraint::Robustness => "robustness",
            Constraint::KeyLength => "key length",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasibility {
    pub constraint: Constraint,
    pub detail: String,
}

impl Infeasibility {
    pub(crate) fn new(constraint: Constraint, detail: impl Into<String>) -> Self {
        Infeasibility { constraint, detail: detail.into() }
    }
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} constraint violated: {}", self.constraint, self.detail)
    }
}

pub(crate) fn infeasible(constraint: Constraint, detail: impl Into<String>) -> Error {
    Error::Infeasible(Infeasibility::new(constraint, detail))
}

/// Parses a log2 exponent: an integer, a fraction `p/q`, or a decimal.
pub fn parse_log2(s: &str) -> Result<Rational64> {
    let bad = || Error::InvalidInput(format!("cannot parse {s:?} as a rational"));
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let denom = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse().map_err(|_| bad())?;
        let mag = Rational64::from_integer(whole.abs()) + Rational64::new(num, denom);
        return Ok(if neg { -mag } else { mag });
    }
    Rational64::from_str(s).map_err(|_| bad())
}

pub(crate) fn ceil_i64(x: Rational64) -> i64 {
    x.ceil().to_integer()
}

pub(crate) fn floor_i64(x: Rational64) -> i64 {
    x.floor().to_integer()
}

fn int(x: usize) -> Rational64 {
    Rational64::from_integer(x as i64)
}

/// A fully solved parameter set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractorParams {
    pub n: usize,
    pub m: usize,
    /// log2(1/delta). Zero when the layout was supplied explicitly.
    pub log2_inv_delta: Rational64,
    /// log2(1/epsilon). Zero when the layout was supplied explicitly.
    pub log2_inv_eps: Rational64,
    pub variant: Variant,
    pub v: usize,
    pub ell: usize,
    pub beta: usize,
    /// Basis of the working field. The constructions are basis-agnostic; the
    /// attack on the `dkrs` family assumes the parity-split basis.
    pub basis: Basis,
}

/// Only the new construction splits `w` in halves, so only it needs even `n`.
fn check_shape(n: usize, m: usize, variant: Variant) -> Result<()> {
    if n < 2 || (n % 2 == 1 && !variant.is_dkrs()) {
        return Err(Error::InvalidInput(format!(
            "n must be even and at least 2 (got {n}); drop the last bit of w and decrement m"
        )));
    }
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 0 < m <= n, got m = {m}, n = {n}")));
    }
    if n > u16::MAX as usize {
        return Err(Error::Unsupported(format!("n = {n} exceeds 65535")));
    }
    Ok(())
}

/// Solves for `(v, ell, beta)` given the secret length, its min-entropy and
/// the robustness and uniformity exponents.
pub fn derive_params(
    n: usize,
    m: usize,
    log2_inv_delta: Rational64,
    log2_inv_eps: Rational64,
    variant: Variant,
) -> Result<ExtractorParams> {
    check_shape(n, m, variant)?;
    if !log2_inv_delta.is_positive() || !log2_inv_eps.is_positive() {
        return Err(Error::InvalidInput("log2(1/delta) and log2(1/eps) must be positive".into()));
    }
    let (d, e) = (log2_inv_delta, log2_inv_eps);
    let (nn, mm) = (int(n), int(m));
    let two_e = e * 2;
    let n_i = n as i64;

    let (v, ell, beta): (i64, i64, i64) = match variant {
        Variant::New => {
            let need = nn / 2 + two_e;
            if mm < need {
                return Err(infeasible(Constraint::Uniformity, format!("m = {m} < n/2 + 2log(1/eps) = {need}")));
            }
            let v = ceil_i64(nn - mm + d);
            (v, n_i / 2 - v, 0)
        }
        Variant::NewShort => {
            let v = ceil_i64(nn - mm + d);
            let cap = floor_i64(mm * 2 - nn - d - two_e);
            if cap < 1 {
                return Err(infeasible(
                    Constraint::Uniformity,
                    format!("2m - n - log(1/delta) - 2log(1/eps) = {} leaves no key bits", mm * 2 - nn - d - two_e),
                ));
            }
            let ell = (n_i / 2 - v).min(cap);
            (v, ell, n_i / 2 - v - ell)
        }
        Variant::DkrsPre => {
            let v = ceil_i64(nn - mm + d.max(two_e));
            (v, n_i - 2 * v, 0)
        }
        Variant::DkrsPost => {
            let robust = ceil_i64((nn * 2 - mm + d) / 3);
            let uniform = ceil_i64(nn - mm + two_e);
            let v = robust.max(uniform);
            (v, n_i - 2 * v, 0)
        }
        Variant::DkrsImprovedPre | Variant::DkrsImprovedPost => {
            let v = if variant == Variant::DkrsImprovedPre {
                ceil_i64(nn - mm + d)
            } else {
                ceil_i64((nn * 2 - mm + d) / 3)
            };
            // Leftover hash: |R| + |sigma| <= H(a) - 2log(1/eps) with H(a) >= m - v.
            let beta = ceil_i64(int(n) - Rational64::from_integer(v) - mm + two_e).max(0);
            (v, n_i - 2 * v - beta, beta)
        }
    };

    let room = if variant.is_dkrs() { n_i - v } else { n_i / 2 };
    if v < 0 || v > room || (variant.is_dkrs() && 2 * v > n_i) {
        return Err(infeasible(Constraint::Robustness, format!("tag length v = {v} does not fit")));
    }
    if ell < 1 {
        let c = if beta > 0 { Constraint::Uniformity } else { Constraint::KeyLength };
        return Err(infeasible(c, format!("key length {ell} < 1 (v = {v}, beta = {beta})")));
    }
    Ok(ExtractorParams {
        n,
        m,
        log2_inv_delta,
        log2_inv_eps,
        variant,
        v: v as usize,
        ell: ell as usize,
        beta: beta as usize,
        basis: Basis::Standard,
    })
}

impl ExtractorParams {
    /// A parameter set with a caller-chosen layout, bypassing the solver.
    /// `beta` is whatever remains after `v` and `ell`.
    pub fn with_layout(variant: Variant, n: usize, m: usize, v: usize, ell: usize) -> Result<Self> {
        check_shape(n, m, variant)?;
        if ell == 0 {
            return Err(infeasible(Constraint::KeyLength, "explicit layout has ell = 0"));
        }
        let used = if variant.is_dkrs() { 2 * v + ell } else { v + ell };
        let total = if variant.is_dkrs() { n } else { n / 2 };
        if used > total {
            return Err(Error::InvalidInput(format!("layout v = {v}, ell = {ell} exceeds {total} bits")));
        }
        let beta = total - used;
        if beta != 0 && matches!(variant, Variant::New | Variant::DkrsPre | Variant::DkrsPost) {
            return Err(Error::InvalidInput(format!("variant {variant} has no shortening, but the layout leaves {beta} bits")));
        }
        Ok(ExtractorParams {
            n,
            m,
            log2_inv_delta: Rational64::zero(),
            log2_inv_eps: Rational64::zero(),
            variant,
            v,
            ell,
            beta,
            basis: Basis::Standard,
        })
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    /// Degree of the working field: `n/2` or `n - v`.
    pub fn field_degree(&self) -> usize {
        if self.variant.is_dkrs() {
            self.n - self.v
        } else {
            self.n / 2
        }
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::with_default_modulus(self.field_degree(), self.basis)
    }

    /// Exponent `k` such that the robustness error bound is `2^-k` for the
    /// new construction: `v + m - n`.
    pub fn robustness_exponent(&self) -> i64 {
        self.v as i64 + self.m as i64 - self.n as i64
    }

    /// Value of `log2(1/delta)` as an `f64`, for reports.
    pub fn log2_inv_delta_f64(&self) -> f64 {
        self.log2_inv_delta.to_f64().unwrap_or(f64::NAN)
    }
}

/// Public helper data `(i, sigma)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelperString {
    pub i: FieldElement,
    pub sigma: BitString,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtractedKey(BitString);

impl ExtractedKey {
    pub fn new(bits: BitString) -> Self {
        ExtractedKey(bits)
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn into_bits(self) -> BitString {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }
}

impl fmt::Display for ExtractedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A parameter set bound to its working field.
#[derive(Clone, Debug)]
pub struct Extractor {
    params: ExtractorParams,
    field: FieldSpec,
}

impl Extractor {
    pub fn new(params: ExtractorParams) -> Result<Self> {
        let field = params.field()?;
        Ok(Extractor { params, field })
    }

    pub fn params(&self) -> &ExtractorParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    fn check_w(&self, w: &BitString) -> Result<()> {
        if w.len() != self.params.n {
            return Err(Error::LengthMismatch { expected: self.params.n, actual: w.len() });
        }
        Ok(())
    }

    fn check_seed(&self, i: &FieldElement) -> Result<()> {
        if i.spec() != &self.field {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    /// The field value whose prefix is the tag: `i*a + b` (new) or `i*a` (dkrs).
    fn tag_source(&self, w: &BitString, i: &FieldElement) -> Result<(BitString, Option<BitString>)> {
        let n = self.params.n;
        let deg = self.params.field_degree();
        let a = self.field.from_bits(&w.slice(0, deg))?;
        if self.params.variant.is_dkrs() {
            Ok(((i * &a).bits(), Some(w.slice(deg, n))))
        } else {
            let b = self.field.from_bits(&w.slice(deg, n))?;
            Ok(((&(i * &a) + &b).bits(), None))
        }
    }

    fn split(&self, y: &BitString, b: Option<&BitString>) -> (BitString, ExtractedKey) {
        let p = &self.params;
        let mut sigma = y.slice(0, p.v);
        if let Some(b) = b {
            sigma.xor_assign(b);
        }
        (sigma, ExtractedKey(y.slice(p.v, p.v + p.ell)))
    }

    /// Deterministic generation with a caller-supplied seed `i`.
    pub fn gen_with_seed(&self, w: &BitString, i: &FieldElement) -> Result<(ExtractedKey, HelperString)> {
        self.check_w(w)?;
        self.check_seed(i)?;
        let (y, b) = self.tag_source(w, i)?;
        let (sigma, key) = self.split(&y, b.as_ref());
        Ok((key, HelperString { i: i.clone(), sigma }))
    }

    pub fn gen<R: Rng + ?Sized>(&self, w: &BitString, rng: &mut R) -> Result<(ExtractedKey, HelperString)> {
        let i = self.field.random(rng);
        self.gen_with_seed(w, &i)
    }

    /// Reproduces the key, or returns `None` when the tag does not verify.
    pub fn rep(&self, w: &BitString, helper: &HelperString) -> Result<Option<ExtractedKey>> {
        self.check_w(w)?;
        self.check_seed(&helper.i)?;
        if helper.sigma.len() != self.params.v {
            return Err(Error::LengthMismatch { expected: self.params.v, actual: helper.sigma.len() });
        }
        let (y, b) = self.tag_source(w, &helper.i)?;
        let (sigma, key) = self.split(&y, b.as_ref());
        Ok((sigma == helper.sigma).then_some(key))
    }
}

fn require_family(params: &ExtractorParams, dkrs: bool) -> Result<()> {
    if params.variant.is_dkrs() != dkrs {
        return Err(Error::InvalidInput(format!("variant {} is not handled here", params.variant)));
    }
    Ok(())
}

/// Generation for the `new` family.
pub fn gen(w: &BitString, params: &ExtractorParams, i: &FieldElement) -> Result<(ExtractedKey, HelperString)> {
    require_family(params, false)?;
    Extractor::new(params.clone())?.gen_with_seed(w, i)
}

/// Reproduction for the `new` family.
pub fn rep(w: &BitString, helper: &HelperString, params: &ExtractorParams) -> Result<Option<ExtractedKey>> {
    require_family(params, false)?;
    Extractor::new(params.clone())?.rep(w, helper)
}

/// Generation for the `dkrs` family.
pub fn dkrs_gen(w: &BitString, params: &ExtractorParams, i: &FieldElement) -> Result<(ExtractedKey, HelperString)> {
    require_family(params, true)?;
    Extractor::new(params.clone())?.gen_with_seed(w, i)
}

/// Reproduction for the `dkrs` family.
pub fn dkrs_rep(w: &BitString, helper: &HelperString, params: &ExtractorParams) -> Result<Option<ExtractedKey>> {
    require_family(params, true)?;
    Extractor::new(params.clone())?.rep(w, helper)
}
