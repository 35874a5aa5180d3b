//! Slow, explicit reference implementation of the whole pipeline.
//!
//! Nothing here is shared with `kkent-core`: states are enumerated with their
//! own (site-interleaved) ordering, matrix elements come from products of
//! complex Pauli matrices, and eigenvalues come from `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;

/// Site-resolved product state: `spin[k]`, `pseudo[k]` are 0 for up, 1 for down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductState {
    pub spin: Vec<u8>,
    pub pseudo: Vec<u8>,
}

/// Interleaved enumeration `s0 t0 s1 t1 ...`, first listed bit most significant.
pub fn decode(index: usize, n: usize) -> ProductState {
    let mut spin = vec![0; n];
    let mut pseudo = vec![0; n];
    for k in 0..n {
        let shift = 2 * (n - 1 - k);
        spin[k] = ((index >> (shift + 1)) & 1) as u8;
        pseudo[k] = ((index >> shift) & 1) as u8;
    }
    ProductState { spin, pseudo }
}

pub fn encode(state: &ProductState) -> usize {
    let n = state.spin.len();
    (0..n).fold(0, |acc, k| {
        (acc << 2) | ((state.spin[k] as usize) << 1) | state.pseudo[k] as usize
    })
}

/// Spin-1/2 matrices `S^x, S^y, S^z`, row/column 0 = up.
fn pauli_half() -> [[[C; 2]; 2]; 3] {
    let z = C::new(0.0, 0.0);
    let h = C::new(0.5, 0.0);
    let ih = C::new(0.0, 0.5);
    [[[z, h], [h, z]], [[z, -ih], [ih, z]], [[h, z], [z, -h]]]
}

/// `⟨a|X_i·X_j|b⟩` for one factor, given that every other factor is diagonal.
fn dot_element(a: &[u8], b: &[u8], i: usize, j: usize) -> C {
    for k in 0..a.len() {
        if k != i && k != j && a[k] != b[k] {
            return C::new(0.0, 0.0);
        }
    }
    let s = pauli_half();
    (0..3)
        .map(|axis| s[axis][a[i] as usize][b[i] as usize] * s[axis][a[j] as usize][b[j] as usize])
        .sum()
}

fn identity_element(a: &[u8], b: &[u8]) -> C {
    if a == b {
        C::new(1.0, 0.0)
    } else {
        C::new(0.0, 0.0)
    }
}

/// Explicit dense Hamiltonian by looping over all pairs of product states.
pub fn hamiltonian(n: usize, j: f64, i: f64, k: f64, h_spin: &[f64], h_pseudo: &[f64]) -> DMatrix<f64> {
    let dim = 1usize << (2 * n);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for row in 0..dim {
        let a = decode(row, n);
        for col in 0..dim {
            let b = decode(col, n);
            let mut e = C::new(0.0, 0.0);
            for site in 0..n.saturating_sub(1) {
                let ss = dot_element(&a.spin, &b.spin, site, site + 1);
                let tt = dot_element(&a.pseudo, &b.pseudo, site, site + 1);
                e += ss * identity_element(&a.pseudo, &b.pseudo) * j;
                e += tt * identity_element(&a.spin, &b.spin) * i;
                e += ss * tt * k;
            }
            if a == b {
                for site in 0..n {
                    let sz = if a.spin[site] == 0 { 0.5 } else { -0.5 };
                    let tz = if a.pseudo[site] == 0 { 0.5 } else { -0.5 };
                    e -= C::new(h_spin[site] * sz + h_pseudo[site] * tz, 0.0);
                }
            }
            assert!(e.im.abs() < 1e-14, "imaginary matrix element {e}");
            h[(row, col)] = e.re;
        }
    }
    h
}

/// Ascending eigenvalues and matching eigenvectors.
pub fn eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    eigh(m).0
}

/// Gibbs state; at `t == 0` the uniform mixture over levels within
/// `1e-9 * max(1, range)` of the ground energy.
pub fn gibbs(h: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let (e, v) = eigh(h);
    let e0 = e[0];
    let range = e[e.len() - 1] - e0;
    let weights: Vec<f64> = if t == 0.0 {
        e.iter()
            .map(|x| if x - e0 <= 1e-9 * range.max(1.0) { 1.0 } else { 0.0 })
            .collect()
    } else {
        e.iter().map(|x| (-(x - e0) / t).exp()).collect()
    };
    let z: f64 = weights.iter().sum();
    let dim = h.nrows();
    let mut rho = DMatrix::<f64>::zeros(dim, dim);
    for (k, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let col = v.column(k);
        rho += (col * col.transpose()) * (w / z);
    }
    rho
}

/// Transposes the spin labels of row and column state, leaving pseudospins.
pub fn partial_transpose_spin(rho: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let dim = rho.nrows();
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            let a = decode(row, n);
            let b = decode(col, n);
            let a2 = ProductState {
                spin: b.spin.clone(),
                pseudo: a.pseudo.clone(),
            };
            let b2 = ProductState {
                spin: a.spin.clone(),
                pseudo: b.pseudo.clone(),
            };
            out[(row, col)] = rho[(encode(&a2), encode(&b2))];
        }
    }
    out
}

/// `ln Σ|λ|` of the spin partial transpose, unclamped.
pub fn log_negativity(rho: &DMatrix<f64>, n: usize) -> f64 {
    let pt = partial_transpose_spin(rho, n);
    eigenvalues(&pt).iter().map(|l| l.abs()).sum::<f64>().ln()
}

/// Field values site by site: uniform, staggered (+ on site 0) or absent.
pub fn field(n: usize, magnitude: f64, staggered: bool) -> Vec<f64> {
    (0..n)
        .map(|k| if staggered && k % 2 == 1 { -magnitude } else { magnitude })
        .collect()
}

/// Full pipeline: Hamiltonian → Gibbs state → logarithmic negativity.
pub fn pipeline_log_negativity(n: usize, j: f64, i: f64, k: f64, h_spin: &[f64], h_pseudo: &[f64], t: f64) -> f64 {
    let h = hamiltonian(n, j, i, k, h_spin, h_pseudo);
    log_negativity(&gibbs(&h, t), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_inverts_decode() {
        for idx in 0..256 {
            assert_eq!(encode(&decode(idx, 4)), idx);
        }
    }

    #[test]
    fn heisenberg_pair() {
        let h = hamiltonian(2, 1.0, 0.0, 0.0, &[0.0; 2], &[0.0; 2]);
        let e = eigenvalues(&h);
        assert!(e[..4].iter().all(|x| (x + 0.75).abs() < 1e-12));
        assert!(e[4..].iter().all(|x| (x - 0.25).abs() < 1e-12));
    }
}
