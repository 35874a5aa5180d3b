//! On-disk cache of spectral decompositions.
//!
//! File layout, all little-endian:
//!
//! | bytes          | content                                  |
//! |----------------|------------------------------------------|
//! | 4              | magic `KKED`                             |
//! | 4              | format version (`u32`, currently 1)      |
//! | 8              | dimension `d` (`u64`)                    |
//! | 8·d            | eigenvalues, ascending (`f64`)           |
//! | 8·d²           | eigenvectors, column-major (`f64`)       |
//!
//! Files are named `<sha256 of the canonical parameter bytes>.kked`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kkent_core::{FieldPattern, FieldSpec, Mat, ModelParams, SparseSymMatrix, SpectralDecomposition};
use sha2::{Digest, Sha256};

use crate::error::KkentError;

pub const MAGIC: [u8; 4] = *b"KKED";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

/// Bit pattern of `x` with `-0.0` folded onto `0.0`.
fn canonical_bits(x: f64) -> [u8; 8] {
    let x = if x == 0.0 { 0.0 } else { x };
    x.to_bits().to_le_bytes()
}

fn push_field(out: &mut Vec<u8>, field: &FieldSpec) {
    let (tag, magnitude) = match field.pattern {
        FieldPattern::Off => (0u8, 0.0),
        FieldPattern::Uniform => (1, field.magnitude),
        FieldPattern::Staggered => (2, field.magnitude),
    };
    out.push(tag);
    out.extend_from_slice(&canonical_bits(magnitude));
}

/// Byte string that identifies the Hamiltonian of `params`.
pub fn canonical_bytes(params: &ModelParams) -> Vec<u8> {
    let mut out = b"kkent-params/1".to_vec();
    out.extend_from_slice(&(params.n_sites as u64).to_le_bytes());
    for x in [params.j_spin, params.i_pseudo, params.k_coupling] {
        out.extend_from_slice(&canonical_bits(x));
    }
    push_field(&mut out, &params.field_spin);
    push_field(&mut out, &params.field_pseudo);
    out
}

/// Lowercase hex SHA-256 of [`canonical_bytes`].
pub fn cache_key(params: &ModelParams) -> String {
    hex::encode(Sha256::digest(canonical_bytes(params)))
}

pub fn encode(spectrum: &SpectralDecomposition) -> Vec<u8> {
    let d = spectrum.dimension();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * d * (d + 1));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u64).to_le_bytes());
    for e in spectrum.eigenvalues() {
        out.extend_from_slice(&e.to_le_bytes());
    }
    let v = spectrum.eigenvectors();
    for j in 0..d {
        for i in 0..d {
            out.extend_from_slice(&v[(i, j)].to_le_bytes());
        }
    }
    out
}

/// Parses a cache file. `expected_dimension` guards against reading a file
/// written for a different chain length.
pub fn decode(bytes: &[u8], expected_dimension: usize) -> Result<SpectralDecomposition, String> {
    if bytes.len() < HEADER_LEN {
        return Err("truncated header".into());
    }
    if bytes[0..4] != MAGIC {
        return Err("bad magic bytes".into());
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(format!("unsupported format version {version}"));
    }
    let d = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if d != expected_dimension as u64 {
        return Err(format!("dimension {d}, expected {expected_dimension}"));
    }
    let d = expected_dimension;
    let expected_len = HEADER_LEN + 8 * d * (d + 1);
    if bytes.len() != expected_len {
        return Err(format!("length {} bytes, expected {expected_len}", bytes.len()));
    }
    let mut floats = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let eigenvalues: Vec<f64> = floats.by_ref().take(d).collect();
    let mut vectors = Mat::<f64>::zeros(d, d);
    for j in 0..d {
        for (slot, x) in vectors.col_as_slice_mut(j).iter_mut().zip(floats.by_ref()) {
            *slot = x;
        }
    }
    SpectralDecomposition::from_parts(eigenvalues, vectors).map_err(|e| e.to_string())
}

/// A directory of `.kked` files.
#[derive(Debug, Clone)]
pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, KkentError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| KkentError::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, params: &ModelParams) -> PathBuf {
        self.dir.join(format!("{}.kked", cache_key(params)))
    }

    /// The cached decomposition of `h`, if a readable file exists and still
    /// satisfies the orthonormality and residual checks against `h`.
    /// Unreadable or stale files count as misses.
    pub fn load(&self, params: &ModelParams, h: &SparseSymMatrix) -> Option<SpectralDecomposition> {
        let bytes = fs::read(self.path_for(params)).ok()?;
        let spectrum = decode(&bytes, h.dimension()).ok()?;
        spectrum.validate_against(h).ok()?;
        Some(spectrum)
    }

    /// Writes through a temporary file and a rename, so concurrent readers
    /// never observe a partial file.
    pub fn store(&self, params: &ModelParams, spectrum: &SpectralDecomposition) -> Result<(), KkentError> {
        let target = self.path_for(params);
        let tmp = self.dir.join(format!(
            ".{}.{}.{:?}.tmp",
            cache_key(params),
            std::process::id(),
            std::thread::current().id()
        ));
        let write = || -> std::io::Result<()> {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(&encode(spectrum))?;
            file.sync_all()?;
            fs::rename(&tmp, &target)
        };
        write().map_err(|e| {
            let _ = fs::remove_file(&tmp);
            KkentError::io(&target, e)
        })
    }
}
