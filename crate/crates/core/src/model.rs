//! The SU(2)×SU(2) Kugel–Khomskii chain with open boundaries.
//!
//! Every site carries a spin-1/2 `S` and a pseudospin-1/2 `T`. The Hamiltonian
//!
//! ```text
//! H = J Σ S_i·S_{i+1} + I Σ T_i·T_{i+1} + K Σ (S_i·S_{i+1})(T_i·T_{i+1})
//!     - Σ h^s_i S^z_i - Σ h^t_i T^z_i
//! ```
//!
//! is assembled directly in the product basis `index = s * 2^N + t`, where `s`
//! packs the spin projections and `t` the pseudospin projections of all sites.
//! Site 0 is the most significant bit of each half, and a cleared bit means
//! "up" (`+1/2`). With this ordering the spin/pseudospin bipartition is a plain
//! block structure, and every operator used here is real.

use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::error::{Error, Result};

/// Default upper bound on the chain length.
pub const DEFAULT_MAX_SITES: usize = 7;

/// Largest cap accepted at all; `4^N` must stay well inside `usize`.
pub const ABSOLUTE_MAX_SITES: usize = 12;

/// Upper bound on the chain length accepted by the builders and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteCap(usize);

impl SiteCap {
    pub fn new(max_sites: usize) -> Result<Self> {
        if max_sites == 0 {
            return Err(Error::EmptyChain);
        }
        if max_sites > ABSOLUTE_MAX_SITES {
            return Err(Error::SiteCapExceeded {
                n_sites: max_sites,
                cap: ABSOLUTE_MAX_SITES,
            });
        }
        Ok(Self(max_sites))
    }

    pub fn max_sites(self) -> usize {
        self.0
    }

    /// Largest Hilbert-space dimension allowed under this cap.
    pub fn max_dimension(self) -> usize {
        hilbert_dimension(self.0)
    }
}

impl Default for SiteCap {
    fn default() -> Self {
        Self(DEFAULT_MAX_SITES)
    }
}

/// `4^n_sites`.
pub fn hilbert_dimension(n_sites: usize) -> usize {
    1usize << (2 * n_sites)
}

/// `2^n_sites`, the dimension of either the spin or the pseudospin factor.
pub fn sector_dimension(n_sites: usize) -> usize {
    1usize << n_sites
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldPattern {
    Uniform,
    /// `+m, -m, +m, ...` starting with site 0.
    Staggered,
    Off,
}

impl FieldPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldPattern::Uniform => "uniform",
            FieldPattern::Staggered => "staggered",
            FieldPattern::Off => "off",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(FieldPattern::Uniform),
            "staggered" => Some(FieldPattern::Staggered),
            "off" => Some(FieldPattern::Off),
            _ => None,
        }
    }
}

/// A longitudinal field acting on one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub magnitude: f64,
    pub pattern: FieldPattern,
}

impl FieldSpec {
    pub const OFF: FieldSpec = FieldSpec {
        magnitude: 0.0,
        pattern: FieldPattern::Off,
    };

    pub fn uniform(magnitude: f64) -> Self {
        Self {
            magnitude,
            pattern: FieldPattern::Uniform,
        }
    }

    pub fn staggered(magnitude: f64) -> Self {
        Self {
            magnitude,
            pattern: FieldPattern::Staggered,
        }
    }

    pub fn is_off(&self) -> bool {
        self.pattern == FieldPattern::Off
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self::OFF
    }
}

/// Per-site field values for a chain of `n_sites`.
pub fn field_profile(spec: &FieldSpec, n_sites: usize) -> Vec<f64> {
    match spec.pattern {
        FieldPattern::Off => vec![0.0; n_sites],
        FieldPattern::Uniform => vec![spec.magnitude; n_sites],
        FieldPattern::Staggered => (0..n_sites)
            .map(|i| if i % 2 == 0 { spec.magnitude } else { -spec.magnitude })
            .collect(),
    }
}

/// Full physical configuration of one chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n_sites: usize,
    /// Spin exchange `J`.
    pub j_spin: f64,
    /// Pseudospin exchange `I`.
    pub i_pseudo: f64,
    /// Biquadratic spin–pseudospin exchange `K`.
    pub k_coupling: f64,
    pub field_spin: FieldSpec,
    pub field_pseudo: FieldSpec,
}

impl ModelParams {
    /// Chain of `n_sites` with all couplings zero and fields off.
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            j_spin: 0.0,
            i_pseudo: 0.0,
            k_coupling: 0.0,
            field_spin: FieldSpec::OFF,
            field_pseudo: FieldSpec::OFF,
        }
    }

    pub fn with_couplings(mut self, j_spin: f64, i_pseudo: f64, k_coupling: f64) -> Self {
        self.j_spin = j_spin;
        self.i_pseudo = i_pseudo;
        self.k_coupling = k_coupling;
        self
    }

    pub fn with_fields(mut self, field_spin: FieldSpec, field_pseudo: FieldSpec) -> Self {
        self.field_spin = field_spin;
        self.field_pseudo = field_pseudo;
        self
    }

    pub fn dimension(&self) -> usize {
        hilbert_dimension(self.n_sites)
    }

    pub fn validate(&self, cap: SiteCap) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::EmptyChain);
        }
        if self.n_sites > cap.max_sites() {
            return Err(Error::SiteCapExceeded {
                n_sites: self.n_sites,
                cap: cap.max_sites(),
            });
        }
        let finite = [
            ("j_spin", self.j_spin),
            ("i_pseudo", self.i_pseudo),
            ("k_coupling", self.k_coupling),
            ("field_spin.magnitude", self.field_spin.magnitude),
            ("field_pseudo.magnitude", self.field_pseudo.magnitude),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::NonFiniteParameter { name, value });
            }
        }
        Ok(())
    }

    /// The same physics with the roles of spin and pseudospin exchanged.
    pub fn relabeled(&self) -> Self {
        Self {
            n_sites: self.n_sites,
            j_spin: self.i_pseudo,
            i_pseudo: self.j_spin,
            k_coupling: self.k_coupling,
            field_spin: self.field_pseudo,
            field_pseudo: self.field_spin,
        }
    }
}

/// Basis index of the state with spin and pseudospin halves swapped.
pub fn relabel_index(index: usize, n_sites: usize) -> usize {
    let d = sector_dimension(n_sites);
    let (s, t) = (index / d, index % d);
    t * d + s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Spin,
    Pseudospin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    /// `i·S^y`, the real antisymmetric form of `S^y`. `S^y_a S^y_b` equals
    /// minus the product of two of these.
    Y,
    Z,
    /// `S^+`, unit matrix element from down to up.
    Plus,
    /// `S^-`.
    Minus,
}

/// General real sparse matrix in coordinate form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dimension: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.dimension, self.dimension);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dimension);
        let mut y = vec![0.0; self.dimension];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }
}

/// Real symmetric sparse matrix storing the upper triangle, sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dimension: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSymMatrix {
    /// Builds from upper-triangle entries. Duplicates are summed.
    pub fn new(dimension: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        for &(row, col, v) in &entries {
            if row >= dimension || col >= dimension {
                return Err(Error::InvalidEntry {
                    row,
                    col,
                    reason: "index out of range",
                });
            }
            if row > col {
                return Err(Error::InvalidEntry {
                    row,
                    col,
                    reason: "below the diagonal",
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidEntry {
                    row,
                    col,
                    reason: "non-finite value",
                });
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        Ok(Self {
            dimension,
            entries: merged,
        })
    }

    /// Diagonal matrix.
    pub fn from_diagonal(diagonal: &[f64]) -> Result<Self> {
        let entries = diagonal
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| (i, i, v))
            .collect();
        Self::new(diagonal.len(), entries)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> f64 {
        self.entries.iter().filter(|(r, c, _)| r == c).map(|&(_, _, v)| v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &(_, _, v)| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.dimension, self.dimension);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dimension);
        let mut y = vec![0.0; self.dimension];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
        y
    }
}

/// Bit mask selecting `site` within one half of the basis index.
fn site_bit(n_sites: usize, site: usize) -> usize {
    1usize << (n_sites - 1 - site)
}

fn sz_of(bits: usize, mask: usize) -> f64 {
    if bits & mask == 0 {
        0.5
    } else {
        -0.5
    }
}

/// The single-site operator `axis` of `sector` on `site`, identity elsewhere.
pub fn site_operator(n_sites: usize, site: usize, axis: Axis, sector: Sector) -> Result<SparseMatrix> {
    if n_sites == 0 {
        return Err(Error::EmptyChain);
    }
    if n_sites > ABSOLUTE_MAX_SITES {
        return Err(Error::SiteCapExceeded {
            n_sites,
            cap: ABSOLUTE_MAX_SITES,
        });
    }
    if site >= n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    let dim = hilbert_dimension(n_sites);
    let mask = match sector {
        Sector::Spin => site_bit(n_sites, site) << n_sites,
        Sector::Pseudospin => site_bit(n_sites, site),
    };
    let mut entries = Vec::with_capacity(dim);
    for col in 0..dim {
        let up = col & mask == 0;
        let flipped = col ^ mask;
        match axis {
            Axis::Z => entries.push((col, col, if up { 0.5 } else { -0.5 })),
            Axis::X => entries.push((flipped, col, 0.5)),
            Axis::Y => entries.push((flipped, col, if up { -0.5 } else { 0.5 })),
            Axis::Plus if !up => entries.push((flipped, col, 1.0)),
            Axis::Minus if up => entries.push((flipped, col, 1.0)),
            Axis::Plus | Axis::Minus => {}
        }
    }
    Ok(SparseMatrix {
        dimension: dim,
        entries,
    })
}

/// One of the three nearest-neighbour interaction terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondTerm {
    /// `S_i·S_{i+1}`
    SpinExchange,
    /// `T_i·T_{i+1}`
    PseudospinExchange,
    /// `(S_i·S_{i+1})(T_i·T_{i+1})`
    Biquadratic,
}

#[derive(Debug, Clone, Copy)]
struct BondWeights {
    spin: f64,
    pseudo: f64,
    biquadratic: f64,
}

/// Assembles `Σ_b [w.spin S·S + w.pseudo T·T + w.biquadratic (S·S)(T·T)]_b
/// - Σ_i (h_s[i] S^z_i + h_t[i] T^z_i)` over the listed bonds `(b, b+1)`.
fn assemble(
    n_sites: usize,
    bonds: &[(usize, BondWeights)],
    field_spin: Option<&[f64]>,
    field_pseudo: Option<&[f64]>,
) -> SparseSymMatrix {
    let d = sector_dimension(n_sites);
    let dim = d * d;
    let mut entries = Vec::with_capacity(dim * (1 + bonds.len()));
    for index in 0..dim {
        let (s, t) = (index / d, index % d);
        let mut diagonal = 0.0;
        for &(bond, w) in bonds {
            let pair = site_bit(n_sites, bond) | site_bit(n_sites, bond + 1);
            let s_flip = (s & pair).count_ones() == 1;
            let t_flip = (t & pair).count_ones() == 1;
            let zz_s = if s_flip { -0.25 } else { 0.25 };
            let zz_t = if t_flip { -0.25 } else { 0.25 };
            diagonal += w.spin * zz_s + w.pseudo * zz_t + w.biquadratic * zz_s * zz_t;
            let s2 = s ^ pair;
            let t2 = t ^ pair;
            // (S+S- + S-S+)/2 moves the antiparallel pair with amplitude 1/2.
            let mut push = |target: usize, value: f64| {
                if target > index && value != 0.0 {
                    entries.push((index, target, value));
                }
            };
            if s_flip {
                push(s2 * d + t, 0.5 * w.spin + 0.5 * w.biquadratic * zz_t);
            }
            if t_flip {
                push(s * d + t2, 0.5 * w.pseudo + 0.5 * w.biquadratic * zz_s);
            }
            if s_flip && t_flip {
                push(s2 * d + t2, 0.25 * w.biquadratic);
            }
        }
        for site in 0..n_sites {
            let bit = site_bit(n_sites, site);
            if let Some(h) = field_spin {
                diagonal -= h[site] * sz_of(s, bit);
            }
            if let Some(h) = field_pseudo {
                diagonal -= h[site] * sz_of(t, bit);
            }
        }
        if diagonal != 0.0 {
            entries.push((index, index, diagonal));
        }
    }
    entries.sort_by_key(|&(r, c, _)| (r, c));
    SparseSymMatrix {
        dimension: dim,
        entries,
    }
}

/// The Kugel–Khomskii Hamiltonian for `params`.
pub fn build_hamiltonian(params: &ModelParams, cap: SiteCap) -> Result<SparseSymMatrix> {
    params.validate(cap)?;
    let n = params.n_sites;
    let weights = BondWeights {
        spin: params.j_spin,
        pseudo: params.i_pseudo,
        biquadratic: params.k_coupling,
    };
    let bonds: Vec<_> = (0..n - 1).map(|b| (b, weights)).collect();
    let h_s = (!params.field_spin.is_off()).then(|| field_profile(&params.field_spin, n));
    let h_t = (!params.field_pseudo.is_off()).then(|| field_profile(&params.field_pseudo, n));
    Ok(assemble(n, &bonds, h_s.as_deref(), h_t.as_deref()))
}

/// One interaction term on the bond `(bond, bond + 1)`, unit coefficient.
pub fn bond_operator(n_sites: usize, bond: usize, term: BondTerm) -> Result<SparseSymMatrix> {
    if n_sites == 0 {
        return Err(Error::EmptyChain);
    }
    if n_sites > ABSOLUTE_MAX_SITES {
        return Err(Error::SiteCapExceeded {
            n_sites,
            cap: ABSOLUTE_MAX_SITES,
        });
    }
    if bond + 1 >= n_sites {
        return Err(Error::SiteOutOfRange {
            site: bond + 1,
            n_sites,
        });
    }
    let (spin, pseudo, biquadratic) = match term {
        BondTerm::SpinExchange => (1.0, 0.0, 0.0),
        BondTerm::PseudospinExchange => (0.0, 1.0, 0.0),
        BondTerm::Biquadratic => (0.0, 0.0, 1.0),
    };
    let w = BondWeights {
        spin,
        pseudo,
        biquadratic,
    };
    Ok(assemble(n_sites, &[(bond, w)], None, None))
}

/// `Σ_i S^z_i` or `Σ_i T^z_i`, which is diagonal.
pub fn total_sz(n_sites: usize, sector: Sector) -> Result<SparseSymMatrix> {
    if n_sites == 0 {
        return Err(Error::EmptyChain);
    }
    if n_sites > ABSOLUTE_MAX_SITES {
        return Err(Error::SiteCapExceeded {
            n_sites,
            cap: ABSOLUTE_MAX_SITES,
        });
    }
    let d = sector_dimension(n_sites);
    let diagonal: Vec<f64> = (0..d * d)
        .map(|index| {
            let bits = match sector {
                Sector::Spin => index / d,
                Sector::Pseudospin => index % d,
            };
            0.5 * n_sites as f64 - bits.count_ones() as f64
        })
        .collect();
    SparseSymMatrix::from_diagonal(&diagonal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_product(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
        a * b
    }

    #[test]
    fn single_site_z_operators_follow_the_product_basis() {
        let sz = site_operator(1, 0, Axis::Z, Sector::Spin).unwrap().to_dense();
        let tz = site_operator(1, 0, Axis::Z, Sector::Pseudospin).unwrap().to_dense();
        let expect_s = [0.5, 0.5, -0.5, -0.5];
        let expect_t = [0.5, -0.5, 0.5, -0.5];
        for i in 0..4 {
            for j in 0..4 {
                let (es, et) = if i == j { (expect_s[i], expect_t[i]) } else { (0.0, 0.0) };
                assert_eq!(sz[(i, j)], es);
                assert_eq!(tz[(i, j)], et);
            }
        }
    }

    #[test]
    fn sx_squares_to_a_quarter() {
        let sx = site_operator(2, 1, Axis::X, Sector::Spin).unwrap().to_dense();
        let sq = dense_product(&sx, &sx);
        for i in 0..16 {
            for j in 0..16 {
                assert_eq!(sq[(i, j)], if i == j { 0.25 } else { 0.0 });
            }
        }
    }

    #[test]
    fn ladder_operators_compose_the_exchange() {
        // S+S- + S-S+ = 2 (SxSx + SySy), with SySy = -(iSy)(iSy).
        let n = 2;
        for sector in [Sector::Spin, Sector::Pseudospin] {
            let op = |site, axis| site_operator(n, site, axis, sector).unwrap().to_dense();
            let ladder = &op(0, Axis::Plus) * &op(1, Axis::Minus) + &op(0, Axis::Minus) * &op(1, Axis::Plus);
            let cartesian = (&op(0, Axis::X) * &op(1, Axis::X) - &op(0, Axis::Y) * &op(1, Axis::Y)) * faer::Scale(2.0);
            assert!((&ladder - &cartesian).norm_max() < 1e-15);
        }
    }

    #[test]
    fn site_out_of_range_is_rejected() {
        assert_eq!(
            site_operator(3, 3, Axis::Z, Sector::Spin).unwrap_err(),
            Error::SiteOutOfRange { site: 3, n_sites: 3 }
        );
        assert!(bond_operator(3, 2, BondTerm::SpinExchange).is_err());
    }

    #[test]
    fn field_profiles() {
        assert_eq!(field_profile(&FieldSpec::uniform(0.5), 3), vec![0.5, 0.5, 0.5]);
        assert_eq!(field_profile(&FieldSpec::staggered(1.0), 4), vec![1.0, -1.0, 1.0, -1.0]);
        let off = FieldSpec {
            magnitude: 7.0,
            pattern: FieldPattern::Off,
        };
        assert_eq!(field_profile(&off, 2), vec![0.0, 0.0]);
    }

    #[test]
    fn off_field_term_is_absent_even_with_magnitude() {
        let base = ModelParams::new(3).with_couplings(0.3, -0.2, 1.0);
        let ghost = base.with_fields(
            FieldSpec {
                magnitude: 5.0,
                pattern: FieldPattern::Off,
            },
            FieldSpec::OFF,
        );
        let cap = SiteCap::default();
        assert_eq!(
            build_hamiltonian(&base, cap).unwrap(),
            build_hamiltonian(&ghost, cap).unwrap()
        );
    }

    #[test]
    fn hamiltonian_is_traceless_without_fields() {
        let p = ModelParams::new(4).with_couplings(0.7, -1.3, 0.9);
        let h = build_hamiltonian(&p, SiteCap::default()).unwrap();
        assert!(h.trace().abs() < 1e-12);
        assert_eq!(h.dimension(), 256);
    }

    #[test]
    fn hamiltonian_commutes_with_both_magnetizations() {
        let cap = SiteCap::default();
        for fields in [
            (FieldSpec::OFF, FieldSpec::OFF),
            (FieldSpec::uniform(0.4), FieldSpec::uniform(-0.3)),
            (FieldSpec::staggered(1.0), FieldSpec::staggered(0.6)),
        ] {
            let p = ModelParams::new(3)
                .with_couplings(0.5, -0.8, 1.2)
                .with_fields(fields.0, fields.1);
            let h = build_hamiltonian(&p, cap).unwrap().to_dense();
            for sector in [Sector::Spin, Sector::Pseudospin] {
                let m = total_sz(3, sector).unwrap().to_dense();
                let comm = &h * &m - &m * &h;
                assert_eq!(comm.norm_max(), 0.0);
            }
        }
    }

    #[test]
    fn stored_entries_are_upper_triangle_and_finite() {
        let p = ModelParams::new(3)
            .with_couplings(1.0, 0.5, -1.0)
            .with_fields(FieldSpec::staggered(0.2), FieldSpec::uniform(0.1));
        let h = build_hamiltonian(&p, SiteCap::default()).unwrap();
        assert!(h.entries().iter().all(|&(r, c, v)| r <= c && v.is_finite()));
        let dense = h.to_dense();
        assert_eq!((&dense - dense.transpose()).norm_max(), 0.0);
    }

    #[test]
    fn relabeling_permutes_the_hamiltonian() {
        let cap = SiteCap::default();
        let p = ModelParams::new(3)
            .with_couplings(0.9, -0.4, 0.7)
            .with_fields(FieldSpec::uniform(0.3), FieldSpec::staggered(0.5));
        let h = build_hamiltonian(&p, cap).unwrap().to_dense();
        let g = build_hamiltonian(&p.relabeled(), cap).unwrap().to_dense();
        for r in 0..64 {
            for c in 0..64 {
                assert!((h[(r, c)] - g[(relabel_index(r, 3), relabel_index(c, 3))]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sparse_constructor_merges_and_validates() {
        let m = SparseSymMatrix::new(3, vec![(0, 1, 1.0), (0, 1, 2.0), (2, 2, -1.0)]).unwrap();
        assert_eq!(m.entries(), &[(0, 1, 3.0), (2, 2, -1.0)]);
        assert!(SparseSymMatrix::new(3, vec![(2, 1, 1.0)]).is_err());
        assert!(SparseSymMatrix::new(3, vec![(0, 3, 1.0)]).is_err());
        assert!(SparseSymMatrix::new(3, vec![(0, 0, f64::NAN)]).is_err());
        assert_eq!(m.apply(&[1.0, 1.0, 1.0]), vec![3.0, 3.0, -1.0]);
    }

    #[test]
    fn caps_and_validation() {
        let cap = SiteCap::default();
        assert_eq!(cap.max_sites(), 7);
        assert_eq!(
            ModelParams::new(8).validate(cap),
            Err(Error::SiteCapExceeded { n_sites: 8, cap: 7 })
        );
        assert_eq!(ModelParams::new(0).validate(cap), Err(Error::EmptyChain));
        let bad = ModelParams::new(2).with_couplings(f64::INFINITY, 0.0, 0.0);
        assert!(matches!(
            bad.validate(cap),
            Err(Error::NonFiniteParameter { name: "j_spin", .. })
        ));
        assert!(SiteCap::new(13).is_err());
        assert!(SiteCap::new(8).is_ok());
    }
}
