//! Robust extractors and robust fuzzy extractors over binary fields, the
//! baseline construction they are compared against, an attack on that
//! baseline, and exact small-scale oracles for the underlying bounds.

pub mod adversary;
pub mod bits;
pub mod error;
pub mod extractor;
pub mod fuzzy;
pub mod gf2k;
pub mod linearcode;
pub mod oracle;
pub(crate) mod raw;

pub use bits::BitString;
pub use error::{Error, Result};
pub use extractor::{derive_params, ExtractedKey, Extractor, ExtractorParams, HelperString, Variant};
pub use fuzzy::{derive_fuzzy_params, FuzzyExtractor, FuzzyHelper, FuzzyParams};
pub use gf2k::{Basis, FieldElement, FieldSpec};
pub use linearcode::{code_from_key, make_code, BitMatrix, Family, LinearSketchSpec};
