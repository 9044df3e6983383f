//! Robust fuzzy extractor for the Hamming metric.
//!
//! `s = S*w` is the syndrome sketch and `c = S_perp*w = a || b` carries the
//! remaining entropy. The tag and key come from `y = f_{s,i}(a) + b` in
//! GF(2^{n'/2}), where
//!
//! `f_{s,i}(x) = x^{L+3} + x^2 * (s_{L-1} x^{L-1} + ... + s_0) + i*x`
//!
//! and `s_{L-1} || ... || s_0` is the zero-padded sketch cut into `L` field
//! elements. `L` is even, which keeps the `x^{L+2}` coefficient of
//! `f_{s,i}(x) - f_{s',i'}(x + da)` equal to `da`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::extractor::{infeasible, Constraint, ExtractedKey};
use crate::gf2k::{eval_poly, FieldElement, FieldSpec};
use crate::linearcode::LinearSketchSpec;

/// Helper file tag for the fuzzy construction.
pub const FUZZY_FILE_TAG: u8 = 0x10;

/// Volume of a Hamming ball, kept as an exact integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallVolume {
    pub n: usize,
    pub t: usize,
    pub volume: BigUint,
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

/// `B = sum_{j <= t} C(n, j)`; callers use `log2 B`.
pub fn hamming_ball_log2(n: usize, t: usize) -> Result<BallVolume> {
    if t > n {
        return Err(Error::InvalidInput(format!("radius t = {t} exceeds n = {n}")));
    }
    let volume = (0..=t).map(|j| binomial(n, j)).sum();
    Ok(BallVolume { n, t, volume })
}

impl BallVolume {
    pub fn log2_f64(&self) -> f64 {
        let bits = self.volume.bits();
        if bits <= 64 {
            return self.volume.to_f64().unwrap_or(f64::INFINITY).log2();
        }
        let shifted: BigUint = &self.volume >> (bits - 64);
        shifted.to_f64().unwrap_or(f64::INFINITY).log2() + (bits - 64) as f64
    }

    /// `log2 B` when `B` is a power of two.
    pub fn exact_log2(&self) -> Option<u64> {
        let bits = self.volume.bits();
        (bits > 0 && self.volume == BigUint::one() << (bits - 1)).then(|| bits - 1)
    }

    /// `log B <= t log(n+1)`, i.e. `B <= (n+1)^t`.
    pub fn within_union_bound(&self) -> bool {
        self.volume <= BigUint::from(self.n + 1).pow(self.t as u32)
    }

    /// `log B <= n H2(t/n)`, i.e. `B t^t (n-t)^(n-t) <= n^n`. Holds for `t <= n/2`.
    pub fn within_entropy_bound(&self) -> bool {
        let (n, t) = (self.n, self.t);
        let lhs = &self.volume * BigUint::from(t).pow(t as u32) * BigUint::from(n - t).pow((n - t) as u32);
        lhs <= BigUint::from(n).pow(n as u32)
    }
}

/// `ceil(x + log2 p)`, exact.
pub(crate) fn ceil_plus_log2(x: Rational64, p: &BigUint) -> i64 {
    let (num, den) = (*x.numer(), *x.denom());
    let target = p.pow(den as u32);
    let mut v = x.ceil().to_integer();
    loop {
        let e = v * den - num;
        if e >= 0 && BigUint::one() << (e as u64) >= target {
            return v;
        }
        v += 1;
    }
}

#[derive(Clone, Debug)]
pub struct FuzzyParams {
    pub code: Arc<LinearSketchSpec>,
    pub n: usize,
    pub k: usize,
    /// Length of `c` actually used: `n - k`, less one when truncated.
    pub n_prime: usize,
    pub t: usize,
    /// Min-entropy claim after any truncation.
    pub m: usize,
    pub l: usize,
    pub ball: BallVolume,
    /// Zero when the layout was supplied explicitly.
    pub log2_inv_delta: Rational64,
    pub log2_inv_eps: Rational64,
    pub v: usize,
    pub ell: usize,
    /// Bits of `y` after the key that are discarded: `n'/2 - v - ell`.
    pub beta: usize,
    /// Whether the last bit of `c` is dropped to make `n'` even.
    pub truncated: bool,
}

impl PartialEq for FuzzyParams {
    fn eq(&self, other: &Self) -> bool {
        *self.code == *other.code
            && (self.m, self.v, self.ell, self.beta, self.truncated) == (other.m, other.v, other.ell, other.beta, other.truncated)
            && (self.log2_inv_delta, self.log2_inv_eps) == (other.log2_inv_delta, other.log2_inv_eps)
    }
}

impl Eq for FuzzyParams {}

struct Shape {
    n: usize,
    k: usize,
    n_prime: usize,
    m: usize,
    l: usize,
    truncated: bool,
}

fn shape(code: &LinearSketchSpec, m: usize, truncate: bool) -> Result<Shape> {
    let (n, k) = (code.n(), code.k());
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 0 < m <= n, got m = {m}, n = {n}")));
    }
    let mut n_prime = n - k;
    let mut m = m;
    let truncated = n_prime % 2 == 1;
    if truncated {
        if !truncate {
            return Err(Error::InvalidInput(format!(
                "n - k = {n_prime} is odd; drop the last bit of c (truncate) and decrement m"
            )));
        }
        n_prime -= 1;
        m -= 1;
    }
    if n_prime == 0 {
        return Err(Error::Unsupported("code leaves no bits for c".into()));
    }
    let l = 2 * k.div_ceil(n_prime);
    Ok(Shape { n, k, n_prime, m, l, truncated })
}

/// Solves `v`, `ell`, `beta` for a code, min-entropy and targets.
///
/// `v = ceil(n - m + log B + log(L+2) + log(1/delta))`. The key is the
/// smaller of what fits after shortening by
/// `max(0, ceil((n+k)/2 + 2log(1/eps) - m))` bits and the overall bound
/// `m - n/2 - k - log B - log(L+2) - log(1/delta)`.
pub fn derive_fuzzy_params(
    code: Arc<LinearSketchSpec>,
    m: usize,
    log2_inv_delta: Rational64,
    log2_inv_eps: Rational64,
    truncate: bool,
) -> Result<FuzzyParams> {
    if !log2_inv_delta.is_positive() || !log2_inv_eps.is_positive() {
        return Err(Error::InvalidInput("log2(1/delta) and log2(1/eps) must be positive".into()));
    }
    let sh = shape(&code, m, truncate)?;
    let ball = hamming_ball_log2(sh.n, code.t())?;
    let p = &ball.volume * BigUint::from(sh.l + 2);
    let int = |x: usize| Rational64::from_integer(x as i64);
    let (d, e) = (log2_inv_delta, log2_inv_eps);

    let v = ceil_plus_log2(int(sh.n) - int(sh.m) + d, &p);
    let half = (sh.n_prime / 2) as i64;
    if v >= half {
        return Err(infeasible(Constraint::Robustness, format!("tag length v = {v} leaves nothing of n'/2 = {half}")));
    }
    let shortening = ((int(sh.n + sh.k) / 2 + e * 2 - int(sh.m)).ceil().to_integer()).max(0);
    let layout = half - v - shortening;
    if layout < 1 {
        return Err(infeasible(
            Constraint::Uniformity,
            format!("shortening by {shortening} bits leaves key length {layout}"),
        ));
    }
    // floor(X - log2 p) = -ceil(-X + log2 p)
    let bound = -ceil_plus_log2(-(int(sh.m) - int(sh.n) / 2 - int(sh.k) - d), &p);
    let ell = layout.min(bound);
    if ell < 1 {
        return Err(infeasible(Constraint::KeyLength, format!("key length bound {bound} < 1")));
    }
    Ok(FuzzyParams {
        code,
        n: sh.n,
        k: sh.k,
        n_prime: sh.n_prime,
        t: ball.t,
        m: sh.m,
        l: sh.l,
        ball,
        log2_inv_delta,
        log2_inv_eps,
        v: v as usize,
        ell: ell as usize,
        beta: (half - v - ell) as usize,
        truncated: sh.truncated,
    })
}

impl FuzzyParams {
    /// A parameter set with a caller-chosen `(v, ell)`. Needed for codes too
    /// small for the solver, such as `[7,4,3]` where `n'/2 = 2`.
    pub fn with_layout(code: Arc<LinearSketchSpec>, m: usize, v: usize, ell: usize, truncate: bool) -> Result<Self> {
        let sh = shape(&code, m, truncate)?;
        if ell == 0 || v + ell > sh.n_prime / 2 {
            return Err(Error::InvalidInput(format!(
                "layout v = {v}, ell = {ell} does not fit n'/2 = {}",
                sh.n_prime / 2
            )));
        }
        let ball = hamming_ball_log2(sh.n, code.t())?;
        Ok(FuzzyParams {
            code,
            n: sh.n,
            k: sh.k,
            n_prime: sh.n_prime,
            t: ball.t,
            m: sh.m,
            l: sh.l,
            ball,
            log2_inv_delta: Rational64::zero(),
            log2_inv_eps: Rational64::zero(),
            v,
            ell,
            beta: sh.n_prime / 2 - v - ell,
            truncated: sh.truncated,
        })
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::standard(self.n_prime / 2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzyHelper {
    pub s: BitString,
    pub i: FieldElement,
    pub sigma: BitString,
}

/// The zero-padded sketch as `[s_{L-1}, ..., s_0]`, each `n'/2` bits.
pub fn pad_and_split_sketch(s: &BitString, field: &FieldSpec) -> Result<Vec<FieldElement>> {
    let half = field.degree();
    let l = 2 * s.len().div_ceil(2 * half);
    let padded = s.pad_to(l * half);
    (0..l).map(|j| field.from_bits(&padded.slice(j * half, (j + 1) * half))).collect()
}

/// Coefficients of `f_{s,i}`, highest degree first:
/// `[1, 0, s_{L-1}, ..., s_0, i, 0]`.
pub fn mac_coefficients(s_parts: &[FieldElement], i: &FieldElement) -> Vec<FieldElement> {
    let zero = i.spec().zero();
    let mut coeffs = Vec::with_capacity(s_parts.len() + 4);
    coeffs.push(i.spec().one());
    coeffs.push(zero.clone());
    coeffs.extend(s_parts.iter().cloned());
    coeffs.push(i.clone());
    coeffs.push(zero);
    coeffs
}

/// `f_{s,i}(a)`.
pub fn mac_poly_eval(s_parts: &[FieldElement], i: &FieldElement, a: &FieldElement) -> Result<FieldElement> {
    eval_poly(&mac_coefficients(s_parts, i), a)
}

#[derive(Clone, Debug)]
pub struct FuzzyExtractor {
    params: FuzzyParams,
    field: FieldSpec,
}

impl FuzzyExtractor {
    pub fn new(params: FuzzyParams) -> Result<Self> {
        let field = params.field()?;
        Ok(FuzzyExtractor { params, field })
    }

    pub fn params(&self) -> &FuzzyParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn code(&self) -> &LinearSketchSpec {
        &self.params.code
    }

    fn check_len(&self, w: &BitString) -> Result<()> {
        if w.len() != self.params.n {
            return Err(Error::LengthMismatch { expected: self.params.n, actual: w.len() });
        }
        Ok(())
    }

    /// `(a, b)` from the complement of `w`, after any truncation.
    pub fn split_complement(&self, w: &BitString) -> Result<(FieldElement, FieldElement)> {
        let c = self.code().ss_perp(w)?;
        self.split_c(&c)
    }

    fn split_c(&self, c: &BitString) -> Result<(FieldElement, FieldElement)> {
        let half = self.params.n_prime / 2;
        Ok((self.field.from_bits(&c.slice(0, half))?, self.field.from_bits(&c.slice(half, 2 * half))?))
    }

    fn tag_and_key(&self, s: &BitString, i: &FieldElement, a: &FieldElement, b: &FieldElement) -> Result<(BitString, ExtractedKey)> {
        let parts = pad_and_split_sketch(s, &self.field)?;
        let y = (&mac_poly_eval(&parts, i, a)? + b).bits();
        let p = &self.params;
        Ok((y.slice(0, p.v), ExtractedKey::new(y.slice(p.v, p.v + p.ell))))
    }

    pub fn gen_with_seed(&self, w: &BitString, i: &FieldElement) -> Result<(ExtractedKey, FuzzyHelper)> {
        self.check_len(w)?;
        if i.spec() != &self.field {
            return Err(Error::SpecMismatch);
        }
        let s = self.code().ss(w)?;
        let (a, b) = self.split_complement(w)?;
        let (sigma, key) = self.tag_and_key(&s, i, &a, &b)?;
        Ok((key, FuzzyHelper { s, i: i.clone(), sigma }))
    }

    pub fn gen<R: Rng + ?Sized>(&self, w: &BitString, rng: &mut R) -> Result<(ExtractedKey, FuzzyHelper)> {
        let i = self.field.random(rng);
        self.gen_with_seed(w, &i)
    }

    /// Recovers the key from a nearby reading, or `None` on rejection.
    pub fn rep(&self, w_prime: &BitString, helper: &FuzzyHelper) -> Result<Option<ExtractedKey>> {
        self.check_len(w_prime)?;
        let p = &self.params;
        if helper.s.len() != p.k {
            return Err(Error::LengthMismatch { expected: p.k, actual: helper.s.len() });
        }
        if helper.sigma.len() != p.v {
            return Err(Error::LengthMismatch { expected: p.v, actual: helper.sigma.len() });
        }
        if helper.i.spec() != &self.field {
            return Err(Error::SpecMismatch);
        }
        let Some(w_star) = self.code().srec(w_prime, &helper.s)? else {
            return Ok(None);
        };
        if w_star.distance(w_prime) > p.t || self.code().ss(&w_star)? != helper.s {
            return Ok(None);
        }
        let (a, b) = self.split_complement(&w_star)?;
        let (sigma, key) = self.tag_and_key(&helper.s, &helper.i, &a, &b)?;
        Ok((sigma == helper.sigma).then_some(key))
    }

    /// The offset `(a* - a, b* - b)` that `rep` would see on input
    /// `w xor delta` with sketch `s_prime`, given the honest sketch `s`.
    /// `None` predicts rejection before the tag check.
    ///
    /// By linearity the decoded error depends only on
    /// `s xor s_prime xor S*delta`, so no knowledge of `w` is needed.
    pub fn offsets_from_delta(
        &self,
        delta: &BitString,
        s: &BitString,
        s_prime: &BitString,
    ) -> Result<Option<(FieldElement, FieldElement)>> {
        self.check_len(delta)?;
        let code = self.code();
        let syn = code.ss(delta)?.xor(s).xor(s_prime);
        let Some(e) = code.decode_syndrome(&syn) else {
            return Ok(None);
        };
        if e.weight() > self.params.t {
            return Ok(None);
        }
        let shift = delta.xor(&e);
        let dc = code.ss_perp(&shift)?;
        self.split_c(&dc).map(Some)
    }
}

impl fmt::Display for FuzzyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "code={} n={} k={} n_prime={} t={} m={} L={} log2_B={:.4} v={} ell={} beta={}",
            self.code.key(),
            self.n,
            self.k,
            self.n_prime,
            self.t,
            self.m,
            self.l,
            self.ball.log2_f64(),
            self.v,
            self.ell,
            self.beta
        )
    }
}
