//! Brute-force oracles shared by the integration tests. Nothing here goes
//! through the library's block structure: spins are explicit 2^N product
//! states and modes are truncated Fock spaces.

#![allow(dead_code)]

use spinboson::{BasisState, ModelParams};

/// Product-state index with qubit 0 as the most significant bit; bit value 0
/// is spin up, so index 0 is |↑↑…⟩.
pub fn up_count(index: usize, n: usize) -> usize {
    n - index.count_ones() as usize
}

/// Symmetric state with `e` up spins as an explicit 2^N vector.
pub fn dicke_vector(n: usize, e: usize) -> Vec<f64> {
    let dim = 1 << n;
    let mut v: Vec<f64> = (0..dim).map(|i| if up_count(i, n) == e { 1.0 } else { 0.0 }).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// J₊ = Σᵢ σ₊⁽ⁱ⁾ on the 2^N product space, as a dense matrix.
pub fn collective_raising(n: usize) -> Vec<Vec<f64>> {
    let dim = 1 << n;
    let mut m = vec![vec![0.0; dim]; dim];
    for src in 0..dim {
        for q in 0..n {
            let bit = 1 << (n - 1 - q);
            // spin down (bit set) flips to up
            if src & bit != 0 {
                m[src & !bit][src] += 1.0;
            }
        }
    }
    m
}

/// ⟨D_f| J₊ |D_e⟩ from the explicit vectors.
pub fn dicke_raising_elements(n: usize) -> Vec<Vec<f64>> {
    let jp = collective_raising(n);
    let vecs: Vec<Vec<f64>> = (0..=n).map(|e| dicke_vector(n, e)).collect();
    let dim = 1 << n;
    let mut out = vec![vec![0.0; n + 1]; n + 1];
    for f in 0..=n {
        for e in 0..=n {
            let mut acc = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    acc += vecs[f][i] * jp[i][j] * vecs[e][j];
                }
            }
            out[f][e] = acc;
        }
    }
    out
}

/// Interaction Hamiltonian on (Dicke states) ⊗ (Fock spaces truncated at
/// `cutoff` photons per mode), with states labelled (e, photons).
pub struct FockOracle {
    pub n: usize,
    pub cutoff: u32,
    pub modes: usize,
    pub labels: Vec<(usize, Vec<u32>)>,
    pub h: Vec<Vec<f64>>,
}

impl FockOracle {
    pub fn new(params: &ModelParams, cutoff: u32) -> Self {
        let n = params.n_spins as usize;
        let jp = dicke_raising_elements(n);
        let (rates, couplings): (Vec<f64>, Vec<f64>) = match params.second_mode {
            None => (vec![params.detuning], vec![params.coupling]),
            Some(b) => (vec![params.detuning, b.detuning], vec![params.coupling, b.coupling]),
        };
        let modes = rates.len();
        let mut labels = Vec::new();
        for e in 0..=n {
            if modes == 1 {
                for na in 0..=cutoff {
                    labels.push((e, vec![na]));
                }
            } else {
                for na in 0..=cutoff {
                    for nb in 0..=cutoff {
                        labels.push((e, vec![na, nb]));
                    }
                }
            }
        }
        let dim = labels.len();
        let index = |e: usize, ph: &[u32]| labels.iter().position(|(f, p)| *f == e && p.as_slice() == ph);
        let mut h = vec![vec![0.0; dim]; dim];
        for (s, (e, ph)) in labels.iter().enumerate() {
            for k in 0..modes {
                h[s][s] += rates[k] * f64::from(ph[k]);
                // κ J₊ a: lower mode k by one, raise the spin
                if ph[k] > 0 && *e < n {
                    let mut p2 = ph.clone();
                    p2[k] -= 1;
                    let t = index(e + 1, &p2).unwrap();
                    let v = couplings[k] * jp[e + 1][*e] * f64::from(ph[k]).sqrt();
                    h[t][s] += v;
                    // Hermitian partner κ J₋ a†
                    h[s][t] += v;
                }
            }
        }
        FockOracle { n, cutoff, modes, labels, h }
    }

    pub fn label_of(&self, state: &BasisState) -> usize {
        let e = ((self.n as i32 + state.twice_m) / 2) as usize;
        self.labels
            .iter()
            .position(|(f, p)| *f == e && *p == state.photons)
            .expect("state inside the truncation")
    }
}

/// Two-qubit reduced state (qubits 0 and 1) of Σ p_e |D_e⟩⟨D_e| via an
/// explicit partial trace over qubits 2..N.
pub fn brute_force_pair_rdm(n: usize, populations: &[f64]) -> [[f64; 4]; 4] {
    let rest = n - 2;
    let mut out = [[0.0; 4]; 4];
    for (e, &p) in populations.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let v = dicke_vector(n, e);
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = 0.0;
                for env in 0..(1 << rest) {
                    let i = (a << rest) | env;
                    let j = (b << rest) | env;
                    acc += v[i] * v[j];
                }
                out[a][b] += p * acc;
            }
        }
    }
    out
}
