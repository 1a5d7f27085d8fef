//! Conserved-excitation blocks of the spin-boson interaction Hamiltonian.
//!
//! N spins (restricted to the symmetric sector j = N/2) couple to one or two
//! boson modes. The excitation number λ = m + Σ n is conserved, so the
//! interaction Hamiltonian splits into finite real-symmetric blocks. All
//! energies are in units of the spin level spacing, and a state in block λ
//! with interaction eigenvalue h has total energy λ + h.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::eig::{self, Matrix};
use crate::error::{domain, Error, Result};

/// Excitation number λ, stored as 2λ so half-integers (odd N) are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Excitation(i32);

impl Excitation {
    pub const fn from_twice(twice: i32) -> Self {
        Excitation(twice)
    }

    pub const fn integer(lambda: i32) -> Self {
        Excitation(2 * lambda)
    }

    /// The lowest excitation number for N spins, λ = -N/2.
    pub fn lowest(n_spins: u32) -> Self {
        Excitation(-(n_spins as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn next(self) -> Self {
        Excitation(self.0 + 2)
    }

    pub const fn prev(self) -> Self {
        Excitation(self.0 - 2)
    }

    /// Shift by `k` whole excitations.
    pub const fn offset(self, k: i32) -> Self {
        Excitation(self.0 + 2 * k)
    }

    /// Number of whole steps above `-N/2`; `None` if below it or off-lattice.
    pub fn steps_above_lowest(self, n_spins: u32) -> Option<u32> {
        let nu2 = self.0 + n_spins as i32;
        (nu2 >= 0 && nu2 % 2 == 0).then_some((nu2 / 2) as u32)
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Excitation {
    type Err = Error;

    /// Accepts `3`, `-1`, `-3/2` or `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || domain(format!("cannot parse excitation number {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "2" => Ok(Excitation(num)),
                "1" => Ok(Excitation(2 * num)),
                _ => Err(bad()),
            };
        }
        if let Ok(k) = s.parse::<i32>() {
            return Ok(Excitation::integer(k));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let twice = 2.0 * x;
        if twice.fract() != 0.0 || twice.abs() > f64::from(i32::MAX) {
            return Err(bad());
        }
        Ok(Excitation(twice as i32))
    }
}

/// Detuning and coupling of the additional boson mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMode {
    pub detuning: f64,
    pub coupling: f64,
}

/// Model parameters in units of the spin level spacing.
///
/// `detuning` and `coupling` belong to the first (or only) mode: r and κ for
/// the single-mode model, r_a and κ_a when a second mode is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n_spins: u32,
    pub detuning: f64,
    pub coupling: f64,
    pub second_mode: Option<SecondMode>,
}

impl ModelParams {
    pub fn single_mode(n_spins: u32, detuning: f64, coupling: f64) -> Result<Self> {
        let p = ModelParams { n_spins, detuning, coupling, second_mode: None };
        p.validate()?;
        Ok(p)
    }

    pub fn two_mode(
        n_spins: u32,
        detuning_a: f64,
        coupling_a: f64,
        detuning_b: f64,
        coupling_b: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            n_spins,
            detuning: detuning_a,
            coupling: coupling_a,
            second_mode: Some(SecondMode { detuning: detuning_b, coupling: coupling_b }),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(domain("need at least one spin"));
        }
        let check_detuning = |r: f64, name: &str| {
            if !(r.is_finite() && r > -1.0) {
                return Err(domain(format!("{name} must be finite and > -1, got {r}")));
            }
            Ok(())
        };
        let check_coupling = |k: f64, name: &str| {
            if !(k.is_finite() && k >= 0.0) {
                return Err(domain(format!("{name} must be finite and >= 0, got {k}")));
            }
            Ok(())
        };
        check_detuning(self.detuning, "detuning")?;
        check_coupling(self.coupling, "coupling")?;
        if let Some(b) = self.second_mode {
            check_detuning(b.detuning, "second-mode detuning")?;
            check_coupling(b.coupling, "second-mode coupling")?;
        }
        Ok(())
    }

    pub fn lowest_excitation(&self) -> Excitation {
        Excitation::lowest(self.n_spins)
    }

    pub fn mode_count(&self) -> usize {
        if self.second_mode.is_some() {
            2
        } else {
            1
        }
    }

    fn check_lambda(&self, lambda: Excitation) -> Result<()> {
        if lambda.twice() < -(self.n_spins as i32) {
            return Err(domain(format!(
                "excitation number {lambda} below -N/2 for N = {}",
                self.n_spins
            )));
        }
        if lambda.steps_above_lowest(self.n_spins).is_none() {
            return Err(domain(format!(
                "excitation number {lambda} is not on the lattice -N/2 + integer for N = {}",
                self.n_spins
            )));
        }
        Ok(())
    }
}

/// Which coupling a κ scan drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingAxis {
    /// κ_a = κ_b = κ (or just κ for a single mode).
    #[default]
    Common,
    /// Only the first mode's coupling; the second stays at its base value.
    First,
    /// Only the second mode's coupling.
    Second,
}

/// A one-parameter family of models indexed by a coupling κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingScan {
    pub base: ModelParams,
    pub axis: CouplingAxis,
}

impl CouplingScan {
    pub fn new(base: ModelParams, axis: CouplingAxis) -> Result<Self> {
        base.validate()?;
        if axis == CouplingAxis::Second && base.second_mode.is_none() {
            return Err(domain("cannot scan the second-mode coupling of a single-mode model"));
        }
        Ok(CouplingScan { base, axis })
    }

    pub fn common(base: ModelParams) -> Self {
        CouplingScan { base, axis: CouplingAxis::Common }
    }

    pub fn at(&self, kappa: f64) -> ModelParams {
        let mut p = self.base;
        match self.axis {
            CouplingAxis::Common => {
                p.coupling = kappa;
                if let Some(b) = p.second_mode.as_mut() {
                    b.coupling = kappa;
                }
            }
            CouplingAxis::First => p.coupling = kappa,
            CouplingAxis::Second => {
                if let Some(b) = p.second_mode.as_mut() {
                    b.coupling = kappa;
                }
            }
        }
        p
    }
}

/// Basis state |j = N/2, m⟩ ⊗ |photon numbers⟩ of an excitation block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    /// 2m
    pub twice_m: i32,
    pub photons: Vec<u32>,
}

impl BasisState {
    pub fn m(&self) -> f64 {
        f64::from(self.twice_m) / 2.0
    }

    pub fn total_photons(&self) -> u32 {
        self.photons.iter().sum()
    }

    pub fn excitation(&self) -> Excitation {
        Excitation::from_twice(self.twice_m + 2 * self.total_photons() as i32)
    }
}

#[derive(Debug, Clone)]
pub struct ExcitationBlock {
    pub lambda: Excitation,
    pub basis: Vec<BasisState>,
    /// Interaction Hamiltonian restricted to the block.
    pub matrix: Matrix,
}

impl ExcitationBlock {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Lowest total energy λ + h in this block.
    pub fn ground_energy(&self) -> Result<f64> {
        Ok(self.lambda.value() + eig::lowest_eigenvalue(&self.matrix)?)
    }

    /// Lowest total energy and the matching normalized amplitudes.
    pub fn ground_state(&self) -> Result<(f64, Vec<f64>)> {
        let (h, v) = eig::lowest_eigenpair(&self.matrix)?;
        Ok((self.lambda.value() + h, v))
    }
}

/// R_x = x (N + 1 - x), zero for x <= 0.
fn r_factor(n_spins: u32, x: i64) -> f64 {
    if x <= 0 {
        0.0
    } else {
        (x * (i64::from(n_spins) + 1 - x)) as f64
    }
}

/// ⟨m + 1| J_+ |m⟩ for spin j = N/2, with m given as 2m.
fn raising_element(n_spins: u32, twice_m: i32) -> f64 {
    let n = i64::from(n_spins);
    let tm = i64::from(twice_m);
    // j(j+1) - m(m+1) = (N - 2m)(N + 2m + 2) / 4
    let v = (n - tm) * (n + tm + 2);
    if v <= 0 {
        0.0
    } else {
        (v as f64).sqrt() / 2.0
    }
}

/// Single-mode block, basis ordered by ascending photon number.
pub fn build_single_mode_block(params: &ModelParams, lambda: Excitation) -> Result<ExcitationBlock> {
    params.validate()?;
    if params.second_mode.is_some() {
        return Err(domain("single-mode builder called with a second mode present"));
    }
    params.check_lambda(lambda)?;
    let n = params.n_spins;
    let r = params.detuning;
    let kappa = params.coupling;
    let nu = i64::from(lambda.steps_above_lowest(n).expect("checked above"));
    let big_n = i64::from(n);

    // (photon count, off-diagonal to the next state)
    let (photon_start, dim) = if nu < big_n {
        (0, nu + 1)
    } else {
        (nu - big_n, big_n + 1)
    };
    let mut matrix = Matrix::zeros(dim as usize);
    let mut basis = Vec::with_capacity(dim as usize);
    for i in 0..dim {
        let photons = photon_start + i;
        basis.push(BasisState {
            twice_m: lambda.twice() - 2 * photons as i32,
            photons: vec![photons as u32],
        });
        matrix[(i as usize, i as usize)] = photons as f64 * r;
        if i + 1 < dim {
            let rx = if nu < big_n { nu - i } else { big_n - i };
            let off = kappa * ((photons + 1) as f64).sqrt() * r_factor(n, rx).sqrt();
            matrix.set_symmetric(i as usize, i as usize + 1, off);
        }
    }
    Ok(ExcitationBlock { lambda, basis, matrix })
}

/// Two-mode block over {|m⟩|n_a, n_b⟩ : m + n_a + n_b = λ}, ordered by
/// descending m then descending n_a (mode-a quanta first).
pub fn build_two_mode_block(params: &ModelParams, lambda: Excitation) -> Result<ExcitationBlock> {
    params.validate()?;
    let second = params
        .second_mode
        .ok_or_else(|| domain("two-mode builder called without a second mode"))?;
    params.check_lambda(lambda)?;
    let n = params.n_spins as i32;

    let mut basis = Vec::new();
    for twice_m in (-n..=n).rev().step_by(2) {
        let twice_total = lambda.twice() - twice_m;
        if twice_total < 0 {
            continue;
        }
        let total = (twice_total / 2) as u32;
        for na in (0..=total).rev() {
            basis.push(BasisState { twice_m, photons: vec![na, total - na] });
        }
    }
    let index: HashMap<&BasisState, usize> = basis.iter().enumerate().map(|(i, s)| (s, i)).collect();

    let mut matrix = Matrix::zeros(basis.len());
    let couplings = [params.coupling, second.coupling];
    let detunings = [params.detuning, second.detuning];
    for (i, s) in basis.iter().enumerate() {
        matrix[(i, i)] = detunings[0] * f64::from(s.photons[0]) + detunings[1] * f64::from(s.photons[1]);
        let jp = raising_element(params.n_spins, s.twice_m);
        if jp == 0.0 {
            continue;
        }
        // J_+ x_mode: (m, n_x) -> (m + 1, n_x - 1)
        for mode in 0..2 {
            if s.photons[mode] == 0 {
                continue;
            }
            let mut photons = s.photons.clone();
            photons[mode] -= 1;
            let target = BasisState { twice_m: s.twice_m + 2, photons };
            let t = index[&target];
            let el = couplings[mode] * f64::from(s.photons[mode]).sqrt() * jp;
            matrix.set_symmetric(t, i, el);
        }
    }
    Ok(ExcitationBlock { lambda, basis, matrix })
}

/// Builds the block for whichever model `params` describes.
pub fn build_block(params: &ModelParams, lambda: Excitation) -> Result<ExcitationBlock> {
    if params.second_mode.is_some() {
        build_two_mode_block(params, lambda)
    } else {
        build_single_mode_block(params, lambda)
    }
}

pub fn block_dimension(params: &ModelParams, lambda: Excitation) -> Result<usize> {
    params.validate()?;
    params.check_lambda(lambda)?;
    let n = i64::from(params.n_spins);
    let nu = i64::from(lambda.steps_above_lowest(params.n_spins).expect("checked above"));
    if params.second_mode.is_none() {
        return Ok(nu.min(n) as usize + 1);
    }
    // Σ over spin projections of the number of (n_a, n_b) splits
    let dim: i64 = (0..=n.min(nu)).map(|k| nu - k + 1).sum();
    Ok(dim as usize)
}

/// Lowest total energy of block λ.
pub fn block_ground_energy(params: &ModelParams, lambda: Excitation) -> Result<f64> {
    build_block(params, lambda)?.ground_energy()
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn single(n: u32, r: f64, k: f64) -> ModelParams {
        ModelParams::single_mode(n, r, k).unwrap()
    }

    #[test]
    fn excitation_parse_and_display() {
        assert_eq!("-3/2".parse::<Excitation>().unwrap(), Excitation::from_twice(-3));
        assert_eq!("1.5".parse::<Excitation>().unwrap(), Excitation::from_twice(3));
        assert_eq!("-1".parse::<Excitation>().unwrap(), Excitation::integer(-1));
        assert!("0.25".parse::<Excitation>().is_err());
        assert_eq!(Excitation::from_twice(-3).to_string(), "-3/2");
        assert_eq!(Excitation::integer(4).to_string(), "4");
    }

    #[test]
    fn zero_excitation_block_n2() {
        let b = build_single_mode_block(&single(2, 0.3, 0.7), Excitation::integer(-1)).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.matrix[(0, 0)], 0.0);
        assert_eq!(b.basis[0], BasisState { twice_m: -2, photons: vec![0] });
        assert_eq!(b.ground_energy().unwrap(), -1.0);
    }

    #[test]
    fn lambda_zero_block_n2() {
        let (r, k) = (0.4, 0.9);
        let b = build_single_mode_block(&single(2, r, k), Excitation::integer(0)).unwrap();
        let want = Matrix::from_rows(&[vec![0.0, S2 * k], vec![S2 * k, r]]).unwrap();
        assert_eq!(b.matrix, want);
        let e = b.ground_energy().unwrap();
        assert!((e - 0.5 * (r - (r * r + 8.0 * k * k).sqrt())).abs() < 1e-14);
    }

    #[test]
    fn lambda_one_block_n2() {
        let (r, k) = (1.0, 1.0);
        let b = build_single_mode_block(&single(2, r, k), Excitation::integer(1)).unwrap();
        let want = Matrix::from_rows(&[
            vec![0.0, S2 * k, 0.0],
            vec![S2 * k, r, 2.0 * k],
            vec![0.0, 2.0 * k, 2.0 * r],
        ])
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((b.matrix[(i, j)] - want[(i, j)]).abs() < 1e-15);
            }
        }
        assert!(b.matrix.is_tridiagonal());
    }

    #[test]
    fn large_lambda_pattern_terminates_with_r1() {
        // λ >= N/2: last off-diagonal is κ √(ν + N) √R_1
        let (n, r, k) = (3u32, 0.2, 0.5);
        let lambda = Excitation::from_twice(3 + 2 * 4); // ν = 4
        let b = build_single_mode_block(&single(n, r, k), lambda).unwrap();
        assert_eq!(b.dim(), 4);
        let last = b.matrix[(2, 3)];
        assert!((last - k * ((4 + 3) as f64).sqrt() * r_factor(3, 1).sqrt()).abs() < 1e-14);
        assert!((b.matrix[(0, 1)] - k * 5f64.sqrt() * r_factor(3, 3).sqrt()).abs() < 1e-14);
        assert_eq!(b.basis[0].photons, vec![4]);
    }

    #[test]
    fn small_lambda_pattern_uses_r_nu() {
        // λ < N/2: first off-diagonal κ √R_ν, last κ √ν √R_1
        let (n, k) = (4u32, 0.3);
        let lambda = Excitation::from_twice(-4 + 2 * 3); // ν = 3
        let b = build_single_mode_block(&single(n, 0.0, k), lambda).unwrap();
        assert_eq!(b.dim(), 4);
        assert!((b.matrix[(0, 1)] - k * r_factor(4, 3).sqrt()).abs() < 1e-14);
        assert!((b.matrix[(2, 3)] - k * 3f64.sqrt() * r_factor(4, 1).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn basis_states_sum_to_lambda() {
        for n in 1..=4u32 {
            for nu in 0..8 {
                let lambda = Excitation::lowest(n).offset(nu);
                let p1 = single(n, 0.1, 0.2);
                let p2 = ModelParams::two_mode(n, 0.0, 0.3, 0.5, 0.2).unwrap();
                for p in [p1, p2] {
                    let b = build_block(&p, lambda).unwrap();
                    assert_eq!(b.dim(), block_dimension(&p, lambda).unwrap());
                    assert!(b.basis.iter().all(|s| s.excitation() == lambda));
                    assert!(b.basis.iter().all(|s| s.twice_m.abs() <= n as i32));
                }
            }
        }
    }

    #[test]
    fn dimensions() {
        let p = single(2, 0.0, 1.0);
        assert_eq!(block_dimension(&p, Excitation::integer(5)).unwrap(), 3);
        let p3 = single(3, 0.0, 1.0);
        assert_eq!(block_dimension(&p3, Excitation::from_twice(-1)).unwrap(), 2);
        let p2 = ModelParams::two_mode(2, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(block_dimension(&p2, Excitation::integer(4)).unwrap(), 15);
        assert_eq!(block_dimension(&p2, Excitation::integer(-1)).unwrap(), 1);
        for l in 0..20 {
            assert_eq!(block_dimension(&p2, Excitation::integer(l)).unwrap(), 3 * (l as usize + 1));
        }
    }

    #[test]
    fn two_mode_lambda_zero_block() {
        let k = 1.0 / 3f64.sqrt();
        let p = ModelParams::two_mode(2, 0.0, k, 1.0, k).unwrap();
        let b = build_two_mode_block(&p, Excitation::integer(0)).unwrap();
        assert_eq!(
            b.basis,
            vec![
                BasisState { twice_m: 0, photons: vec![0, 0] },
                BasisState { twice_m: -2, photons: vec![1, 0] },
                BasisState { twice_m: -2, photons: vec![0, 1] },
            ]
        );
        let want = Matrix::from_rows(&[
            vec![0.0, S2 * k, S2 * k],
            vec![S2 * k, 0.0, 0.0],
            vec![S2 * k, 0.0, 1.0],
        ])
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((b.matrix[(i, j)] - want[(i, j)]).abs() < 1e-15);
            }
        }
        // crossing with the λ = -1 state sits at κ = 1/√3
        assert!((b.ground_energy().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_mode_reduces_to_single_mode() {
        for &(n, r_b) in &[(2u32, 1.0), (3, 0.5), (2, 4.0)] {
            for &k in &[0.1, 0.7, 1.9] {
                let single_p = single(n, 0.0, k);
                let two = ModelParams::two_mode(n, 0.0, k, r_b, 0.0).unwrap();
                for nu in 0..10 {
                    let lambda = Excitation::lowest(n).offset(nu);
                    let a = block_ground_energy(&single_p, lambda).unwrap();
                    let b = block_ground_energy(&two, lambda).unwrap();
                    assert!((a - b).abs() < 1e-12, "N={n} κ={k} λ={lambda}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        let p = single(2, 0.0, 1.0);
        assert!(matches!(build_single_mode_block(&p, Excitation::integer(-2)), Err(Error::Domain(_))));
        assert!(matches!(build_single_mode_block(&p, Excitation::from_twice(1)), Err(Error::Domain(_))));
        assert!(matches!(block_dimension(&p, Excitation::from_twice(-3)), Err(Error::Domain(_))));
        let p3 = single(3, 0.0, 1.0);
        assert!(matches!(build_block(&p3, Excitation::integer(0)), Err(Error::Domain(_))));
        assert!(ModelParams::single_mode(2, -1.0, 1.0).is_err());
        assert!(ModelParams::single_mode(2, 0.0, -0.1).is_err());
        assert!(ModelParams::single_mode(0, 0.0, 0.1).is_err());
        assert!(ModelParams::two_mode(2, 0.0, 0.1, -1.5, 0.1).is_err());
        let two = ModelParams::two_mode(2, 0.0, 0.1, 0.5, 0.1).unwrap();
        assert!(build_single_mode_block(&two, Excitation::integer(0)).is_err());
        assert!(build_two_mode_block(&p, Excitation::integer(0)).is_err());
    }

    #[test]
    fn coupling_scan_axes() {
        let base = ModelParams::two_mode(2, 0.0, 0.4, 1.0, 0.4).unwrap();
        let both = CouplingScan::common(base).at(1.5);
        assert_eq!((both.coupling, both.second_mode.unwrap().coupling), (1.5, 1.5));
        let a = CouplingScan::new(base, CouplingAxis::First).unwrap().at(1.5);
        assert_eq!((a.coupling, a.second_mode.unwrap().coupling), (1.5, 0.4));
        let b = CouplingScan::new(base, CouplingAxis::Second).unwrap().at(1.5);
        assert_eq!((b.coupling, b.second_mode.unwrap().coupling), (0.4, 1.5));
        let s = single(2, 0.0, 0.1);
        assert!(CouplingScan::new(s, CouplingAxis::Second).is_err());
    }
}
