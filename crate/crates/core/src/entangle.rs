//! Spin reduced density matrices, Wootters concurrence and concurrence
//! profiles along a coupling scan.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::eig::{eigh_symmetric, Matrix};
use crate::error::{domain, Error, Result};
use crate::gsi::{
    block_ground_state, crossings_below, find_critical_coupling, ground_energy, ground_state_at,
    GroundStateSolution, ScanLimits,
};
use crate::model::{CouplingScan, Excitation};
use crate::par::Execution;

pub type C4 = [[Complex64; 4]; 4];

const HERMITIAN_TOL: f64 = 1e-12;
const WERNER_TOL: f64 = 1e-13;
/// Trace and positivity slack accepted by [`wootters_concurrence`].
pub const STATE_TOL: f64 = 1e-9;
const POPULATION_TOL: f64 = 1e-12;
/// Largest coherence between different m sectors tolerated after the photon trace.
const SECTOR_COHERENCE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// σ_y ⊗ σ_y in the basis |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ (real).
const SIGMA_YY: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
];

/// Two-qubit state in the product basis |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensityMatrix {
    rho: C4,
    is_werner_form: bool,
}

impl TwoQubitDensityMatrix {
    /// Wraps a Hermitian 4×4 matrix. Trace and positivity are not checked
    /// here; see [`TwoQubitDensityMatrix::validate`].
    pub fn new(rho: C4) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if (rho[i][j] - rho[j][i].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(TwoQubitDensityMatrix { rho, is_werner_form: detect_werner(&rho) })
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(rows.map(|row| row.map(|x| Complex64::new(x, 0.0))))
    }

    /// Werner-form state with ρ₂₂ = ρ₃₃ = ρ₂₃ = ρ₃₂ = `p22`.
    pub fn werner(p11: f64, p22: f64, p44: f64) -> Result<Self> {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = p11;
        m[1][1] = p22;
        m[2][2] = p22;
        m[1][2] = p22;
        m[2][1] = p22;
        m[3][3] = p44;
        Self::from_real(m)
    }

    /// Projector onto a normalized pure state.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = psi.map(|z| z / norm);
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &C4 {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[i][j]
    }

    pub fn is_werner_form(&self) -> bool {
        self.is_werner_form
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    /// Ascending spectrum, from the real 8×8 embedding of ρ (each value
    /// appears there twice).
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        let values = eigh_symmetric(&real_embedding(&self.rho))?.values;
        Ok([values[0], values[2], values[4], values[6]])
    }

    /// Checks unit trace and positivity to within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = self.eigenvalues()?[0];
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y).
    pub fn spin_flipped(&self) -> C4 {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    for l in 0..4 {
                        let s = SIGMA_YY[i][k] * SIGMA_YY[l][j];
                        if s != 0.0 {
                            acc += self.rho[k][l].conj() * s;
                        }
                    }
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

fn detect_werner(rho: &C4) -> bool {
    let allowed = |i: usize, j: usize| i == j || (i, j) == (1, 2) || (i, j) == (2, 1);
    for i in 0..4 {
        for j in 0..4 {
            let z = rho[i][j];
            if !allowed(i, j) && z.norm() > WERNER_TOL {
                return false;
            }
            if allowed(i, j) && z.im.abs() > WERNER_TOL {
                return false;
            }
        }
    }
    let p = rho[1][1].re;
    (rho[2][2].re - p).abs() <= WERNER_TOL && (rho[1][2].re - p).abs() <= WERNER_TOL
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
fn real_embedding<const N: usize>(h: &[[Complex64; N]; N]) -> Matrix {
    complex_embedding(N, |i, j| h[i][j])
}

fn complex_embedding(n: usize, h: impl Fn(usize, usize) -> Complex64) -> Matrix {
    Matrix::from_fn(2 * n, |a, b| {
        let z = h(a % n, b % n);
        match (a < n, b < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// 2·max(ρ₂₂ - √(ρ₁₁ ρ₄₄), 0), valid for Werner-form states only.
pub fn werner_concurrence_fast(rho: &TwoQubitDensityMatrix) -> Result<f64> {
    if !rho.is_werner_form() {
        return Err(Error::Contract("state is not of Werner form".into()));
    }
    let m = rho.matrix();
    let (p11, p22, p44) = (m[0][0].re, m[1][1].re, m[3][3].re);
    Ok(2.0 * (p22 - (p11 * p44).max(0.0).sqrt()).max(0.0))
}

/// Factor ρ = W W† by outer-product Cholesky with diagonal pivoting. Stops
/// once the remaining diagonal is non-positive, so rank-deficient states get
/// fewer columns.
fn psd_factor(rho: &C4) -> Vec<[Complex64; 4]> {
    let mut a = *rho;
    let mut cols = Vec::with_capacity(4);
    for _ in 0..4 {
        let (p, d) = (0..4)
            .map(|i| (i, a[i][i].re))
            .fold((0, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best });
        if d <= 0.0 {
            break;
        }
        let s = d.sqrt();
        let col: [Complex64; 4] = std::array::from_fn(|i| a[i][p] / s);
        for i in 0..4 {
            for j in 0..4 {
                a[i][j] -= col[i] * col[j].conj();
            }
        }
        cols.push(col);
    }
    cols
}

/// Wootters concurrence of an arbitrary two-qubit state.
///
/// The spin-flip values ξ are the singular values of τ = Wᵀ (σ_y⊗σ_y) W for
/// any factor ρ = W W†. They are read off the Hermitian matrix
/// [[0, τ], [τ†, 0]], whose eigenvalues are ±ξ, so no square root of a
/// near-zero eigenvalue is ever taken.
pub fn wootters_concurrence(rho: &TwoQubitDensityMatrix) -> Result<f64> {
    rho.validate(STATE_TOL)?;
    let w = psd_factor(rho.matrix());
    let k = w.len();
    if k == 0 {
        return Ok(0.0);
    }
    let mut tau = vec![vec![ZERO; k]; k];
    for a in 0..k {
        for b in 0..k {
            let mut acc = ZERO;
            for i in 0..4 {
                for j in 0..4 {
                    if SIGMA_YY[i][j] != 0.0 {
                        acc += w[a][i] * w[b][j] * SIGMA_YY[i][j];
                    }
                }
            }
            tau[a][b] = acc;
        }
    }
    let dilation = complex_embedding(2 * k, |i, j| match (i < k, j < k) {
        (true, false) => tau[i][j - k],
        (false, true) => tau[j][i - k].conj(),
        _ => ZERO,
    });
    let values = eigh_symmetric(&dilation)?.values;
    // top 2k entries are ξ₁, ξ₁, ξ₂, ξ₂, ... read from the end
    let n = values.len();
    let xi: Vec<f64> = (0..4).map(|i| if i < k { values[n - 1 - 2 * i].max(0.0) } else { 0.0 }).collect();
    Ok((xi[0] - xi[1] - xi[2] - xi[3]).clamp(0.0, 1.0))
}

/// Spin density matrix in the Dicke basis after tracing out the photons.
/// Row/column e = N/2 + m counts up spins.
pub fn photon_trace(solution: &GroundStateSolution) -> Matrix {
    let n = solution.params.n_spins as usize;
    let mut groups: HashMap<&[u32], Vec<(usize, f64)>> = HashMap::new();
    for (state, &amp) in solution.basis.iter().zip(&solution.amplitudes) {
        let e = ((n as i32 + state.twice_m) / 2) as usize;
        groups.entry(state.photons.as_slice()).or_default().push((e, amp));
    }
    let mut s = Matrix::zeros(n + 1);
    for members in groups.values() {
        for &(e, a) in members {
            for &(f, b) in members {
                s[(e, f)] += a * b;
            }
        }
    }
    s
}

/// Largest |⟨m|ρ|m'⟩| with m ≠ m'.
pub fn max_sector_coherence(spin: &Matrix) -> f64 {
    let n = spin.dim();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| spin[(i, j)].abs())
        .fold(0.0, f64::max)
}

/// Populations p_e of the Dicke states, e = N/2 + m up spins.
pub fn spin_populations(solution: &GroundStateSolution) -> Vec<f64> {
    let s = photon_trace(solution);
    (0..s.dim()).map(|e| s[(e, e)]).collect()
}

/// Two-spin state ρ_A of an N = 2 solution.
pub fn reduced_spin_rdm(solution: &GroundStateSolution) -> Result<TwoQubitDensityMatrix> {
    if solution.params.n_spins != 2 {
        return Err(domain(format!("reduced_spin_rdm needs N = 2, got N = {}", solution.params.n_spins)));
    }
    let s = photon_trace(solution);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // Dicke states |1, m⟩ for e = 0, 1, 2 in the product basis
    let dicke = [[0.0, 0.0, 0.0, 1.0], [0.0, h, h, 0.0], [1.0, 0.0, 0.0, 0.0]];
    let mut m = [[0.0; 4]; 4];
    for (e, de) in dicke.iter().enumerate() {
        for (f, df) in dicke.iter().enumerate() {
            let w = s[(e, f)];
            if w == 0.0 {
                continue;
            }
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] += w * de[i] * df[j];
                }
            }
        }
    }
    TwoQubitDensityMatrix::from_real(m)
}

/// Two-spin reduced state of a diagonal mixture of Dicke states,
/// `populations[e]` being the weight of the state with e up spins.
pub fn dicke_pairwise_rdm(n_spins: u32, populations: &[f64]) -> Result<TwoQubitDensityMatrix> {
    if n_spins < 2 {
        return Err(domain(format!("pairwise state needs N >= 2, got {n_spins}")));
    }
    let n = n_spins as usize;
    if populations.len() != n + 1 {
        return Err(domain(format!("expected {} populations, got {}", n + 1, populations.len())));
    }
    if let Some(p) = populations.iter().find(|p| !(**p >= -POPULATION_TOL)) {
        return Err(domain(format!("negative population {p}")));
    }
    let total: f64 = populations.iter().sum();
    if (total - 1.0).abs() > STATE_TOL {
        return Err(domain(format!("populations sum to {total}")));
    }
    let pairs = (n * (n - 1)) as f64;
    let (mut uu, mut ud, mut dd) = (0.0, 0.0, 0.0);
    for (e, &p) in populations.iter().enumerate() {
        let d = n - e;
        uu += p * (e * e.saturating_sub(1)) as f64 / pairs;
        dd += p * (d * d.saturating_sub(1)) as f64 / pairs;
        ud += p * (e * d) as f64 / pairs;
    }
    TwoQubitDensityMatrix::werner(uu, ud, dd)
}

/// Concurrence between two of the spins. For N = 2 this is the concurrence
/// of ρ_A; for larger N it uses the Dicke pair state.
pub fn pairwise_concurrence(solution: &GroundStateSolution) -> Result<f64> {
    match solution.params.n_spins {
        0 | 1 => Err(domain("pairwise concurrence needs at least two spins")),
        2 => wootters_concurrence(&reduced_spin_rdm(solution)?),
        n => {
            let s = photon_trace(solution);
            let c = max_sector_coherence(&s);
            if c > SECTOR_COHERENCE_TOL {
                return Err(Error::Contract(format!("photon trace left m-sector coherence {c:e}")));
            }
            let pops: Vec<f64> = (0..s.dim()).map(|e| s[(e, e)]).collect();
            wootters_concurrence(&dicke_pairwise_rdm(n, &pops)?)
        }
    }
}

/// Ground-state concurrence sampled along a coupling scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceProfile {
    pub kappa_samples: Vec<f64>,
    pub c_values: Vec<f64>,
    pub lambda_star: Vec<Excitation>,
    pub energies: Vec<f64>,
    /// Crossings κ̃ inside the sampled range.
    pub gsi_markers: Vec<f64>,
    /// Non-smooth points of C that are not crossings.
    pub kink_markers: Vec<f64>,
}

pub fn linspace(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => vec![],
        1 => vec![lo],
        _ => (0..samples)
            .map(|i| if i + 1 == samples { hi } else { lo + (hi - lo) * i as f64 / (samples - 1) as f64 })
            .collect(),
    }
}

pub fn concurrence_profile(scan: &CouplingScan, kappa_lo: f64, kappa_hi: f64, samples: usize) -> Result<ConcurrenceProfile> {
    concurrence_profile_with(Execution::default(), scan, kappa_lo, kappa_hi, samples)
}

pub fn concurrence_profile_with(
    exec: Execution,
    scan: &CouplingScan,
    kappa_lo: f64,
    kappa_hi: f64,
    samples: usize,
) -> Result<ConcurrenceProfile> {
    if !(kappa_lo >= 0.0 && kappa_hi >= kappa_lo && kappa_hi.is_finite()) {
        return Err(domain(format!("bad coupling range [{kappa_lo}, {kappa_hi}]")));
    }
    if samples < 2 {
        return Err(domain("a profile needs at least two samples"));
    }
    let kappas = linspace(kappa_lo, kappa_hi, samples);
    let points = exec.try_map(&kappas, |&k| -> Result<(f64, Excitation, f64)> {
        let g = ground_state_at(&scan.at(k))?;
        Ok((pairwise_concurrence(&g)?, g.lambda_star, g.energy))
    })?;
    let gsi_markers: Vec<f64> = crossings_below(scan, kappa_hi)?
        .into_iter()
        .map(|c| c.kappa_tilde)
        .filter(|&k| k >= kappa_lo)
        .collect();
    let mut profile = ConcurrenceProfile {
        kappa_samples: kappas,
        c_values: points.iter().map(|p| p.0).collect(),
        lambda_star: points.iter().map(|p| p.1).collect(),
        energies: points.iter().map(|p| p.2).collect(),
        gsi_markers,
        kink_markers: vec![],
    };
    profile.kink_markers = detect_concurrence_kinks(&profile, &profile.gsi_markers);
    Ok(profile)
}

/// Second-difference jumps beyond this multiple of the median flag a kink.
pub const KINK_FACTOR: f64 = 50.0;
/// Half-width, in samples, of the window for the local median.
pub const KINK_WINDOW: usize = 25;
/// Absolute floor on the kink threshold, for profiles whose median second
/// difference is zero (piecewise-constant C).
pub const KINK_FLOOR: f64 = 1e-8;

/// Sample points where C is non-smooth away from any crossing in `gsi`.
///
/// A point is a candidate when its second difference exceeds
/// max(KINK_FACTOR × median, KINK_FLOOR), the median taken over the
/// KINK_WINDOW neighbours on either side whose stencils are not exactly flat, or when C switches between exactly
/// zero and a positive value there. Points whose stencil contains a crossing
/// are skipped. Adjacent candidates are merged and reported once, at the
/// largest second difference.
pub fn detect_concurrence_kinks(profile: &ConcurrenceProfile, gsi: &[f64]) -> Vec<f64> {
    let k = &profile.kappa_samples;
    let c = &profile.c_values;
    let n = k.len().min(c.len());
    if n < 3 {
        return vec![];
    }
    let near_gsi = |a: usize, b: usize| gsi.iter().any(|&g| g >= k[a] && g <= k[b]);
    let mut d2 = vec![0.0; n];
    let mut usable = vec![false; n];
    for i in 1..n - 1 {
        d2[i] = (c[i + 1] - 2.0 * c[i] + c[i - 1]).abs();
        usable[i] = !near_gsi(i - 1, i + 1);
    }
    // exactly flat stretches (C clamped to zero) would drag the median to zero
    let flat = |i: usize| c[i - 1] == c[i] && c[i] == c[i + 1];
    let pooled: Vec<bool> = (0..n).map(|i| i > 0 && i + 1 < n && usable[i] && !flat(i)).collect();
    let threshold = |i: usize| {
        let lo = i.saturating_sub(KINK_WINDOW);
        let hi = (i + KINK_WINDOW).min(n - 1);
        let mut pool: Vec<f64> = (lo..=hi).filter(|&j| pooled[j]).map(|j| d2[j]).collect();
        let median = if pool.is_empty() {
            0.0
        } else {
            pool.sort_by(f64::total_cmp);
            pool[pool.len() / 2]
        };
        (KINK_FACTOR * median).max(KINK_FLOOR)
    };

    let mut candidates: Vec<usize> = (1..n - 1).filter(|&i| usable[i] && d2[i] > threshold(i)).collect();
    for i in 0..n - 1 {
        let switches = (c[i] == 0.0) != (c[i + 1] == 0.0);
        if switches && !near_gsi(i.saturating_sub(1), (i + 2).min(n - 1)) {
            candidates.push(i);
            candidates.push(i + 1);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    let mut kinks = Vec::new();
    let mut group: Vec<usize> = Vec::new();
    let flush = |group: &mut Vec<usize>, kinks: &mut Vec<f64>| {
        if let Some(&best) = group.iter().max_by(|&&a, &&b| d2[a].total_cmp(&d2[b]).then(b.cmp(&a))) {
            kinks.push(k[best]);
        }
        group.clear();
    };
    for i in candidates {
        if group.last().is_some_and(|&last| i > last + 2) {
            flush(&mut group, &mut kinks);
        }
        group.push(i);
    }
    flush(&mut group, &mut kinks);
    kinks
}

/// Largest concurrence of block λ's lowest state over the coupling interval
/// where that block holds the ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMaximum {
    pub lambda: Excitation,
    pub lo: f64,
    pub hi: f64,
    pub kappa: f64,
    pub value: f64,
}

const REGION_GRID: usize = 256;
const GOLDEN_TOL: f64 = 1e-8;

pub fn region_max_concurrence(scan: &CouplingScan, lambda: Excitation) -> Result<RegionMaximum> {
    region_max_concurrence_with(Execution::default(), scan, lambda)
}

pub fn region_max_concurrence_with(exec: Execution, scan: &CouplingScan, lambda: Excitation) -> Result<RegionMaximum> {
    let start = ground_energy(&scan.at(0.0), ScanLimits::for_model(&scan.base))?.0;
    if lambda < start {
        return Err(domain(format!("block {lambda} is never the ground state (sequence starts at {start})")));
    }
    let lo = if lambda == start { 0.0 } else { find_critical_coupling(scan, lambda.prev())?.kappa_tilde };
    let hi = find_critical_coupling(scan, lambda)?.kappa_tilde;
    if !(hi > lo) {
        return Err(domain(format!("empty region for λ = {lambda}: [{lo}, {hi}]")));
    }
    let c_at = |k: f64| pairwise_concurrence(&block_ground_state(&scan.at(k), lambda)?);

    let grid = linspace(lo, hi, REGION_GRID);
    let values = exec.try_map(&grid, |&k| c_at(k))?;
    let (i, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    let mut best = (grid[i], values[i]);
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(REGION_GRID - 1)];
    if b > a {
        let (k, v) = golden_max(&c_at, a, b)?;
        if v > best.1 {
            best = (k, v);
        }
    }
    Ok(RegionMaximum { lambda, lo, hi, kappa: best.0, value: best.1 })
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}
