//! Ground-state resolution across excitation blocks and the level crossings
//! (ground-state instabilities) between consecutive blocks.

use crate::error::{domain, Error, Result};
use crate::model::{block_ground_energy, build_block, BasisState, CouplingScan, Excitation, ModelParams};
use crate::par::Execution;

/// Ties between block minima closer than this go to the smaller λ.
const TIE_TOL: f64 = 1e-12;
/// Consecutive increases of the block minimum that end a λ scan ...
const UPTURN_RUN: usize = 3;
/// ... followed by this many extra blocks.
const SAFETY_MARGIN: usize = 5;
const MAX_BRACKET_EXPONENT: i32 = 16;

/// How far up in λ a ground-state search may go before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanLimits {
    pub max_blocks: usize,
}

impl ScanLimits {
    pub fn for_model(params: &ModelParams) -> Self {
        // two-mode blocks grow linearly with λ, so their cap is lower
        let max_blocks = if params.second_mode.is_some() { 160 } else { 4096 };
        ScanLimits { max_blocks }
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateSolution {
    pub params: ModelParams,
    pub lambda_star: Excitation,
    /// Total energy λ* + h.
    pub energy: f64,
    /// Unit-norm amplitudes over `basis`.
    pub amplitudes: Vec<f64>,
    pub basis: Vec<BasisState>,
}

/// Scans blocks upward from λ = -N/2 and returns the lowest block minimum
/// together with its λ, without computing eigenvectors.
pub fn ground_energy(params: &ModelParams, limits: ScanLimits) -> Result<(Excitation, f64)> {
    params.validate()?;
    let mut lambda = params.lowest_excitation();
    let mut best = (lambda, block_ground_energy(params, lambda)?);
    let mut prev = best.1;
    let mut run = 0;
    let mut margin: Option<usize> = None;
    for _ in 1..limits.max_blocks {
        lambda = lambda.next();
        let e = block_ground_energy(params, lambda)?;
        if e < best.1 - TIE_TOL {
            best = (lambda, e);
            margin = None;
        }
        run = if e > prev { run + 1 } else { 0 };
        prev = e;
        if let Some(left) = margin.as_mut() {
            *left -= 1;
            if *left == 0 {
                return Ok(best);
            }
        } else if run >= UPTURN_RUN {
            margin = Some(SAFETY_MARGIN);
        }
    }
    Err(Error::SearchFailed { max_blocks: limits.max_blocks })
}

pub fn ground_state_at(params: &ModelParams) -> Result<GroundStateSolution> {
    ground_state_with(params, ScanLimits::for_model(params))
}

pub fn ground_state_with(params: &ModelParams, limits: ScanLimits) -> Result<GroundStateSolution> {
    let (lambda_star, _) = ground_energy(params, limits)?;
    block_ground_state(params, lambda_star)
}

/// Lowest state of block `lambda`, whether or not it is the global ground state.
pub fn block_ground_state(params: &ModelParams, lambda: Excitation) -> Result<GroundStateSolution> {
    let block = build_block(params, lambda)?;
    let (energy, amplitudes) = block.ground_state()?;
    Ok(GroundStateSolution { params: *params, lambda_star: lambda, energy, amplitudes, basis: block.basis })
}

/// A level crossing E_λ = E_{λ+1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCoupling {
    pub lambda_from: Excitation,
    pub lambda_to: Excitation,
    pub kappa_tilde: f64,
    /// |E_{λ+1} - E_λ| at `kappa_tilde`.
    pub residual: f64,
}

/// Block-minimum gap f(κ) = E_{λ+1}(κ) - E_λ(κ).
pub fn crossing_gap(scan: &CouplingScan, lambda: Excitation, kappa: f64) -> Result<f64> {
    let p = scan.at(kappa);
    Ok(block_ground_energy(&p, lambda.next())? - block_ground_energy(&p, lambda)?)
}

/// Bisection for the coupling where block `lambda_from + 1` drops below
/// block `lambda_from`.
pub fn find_critical_coupling(scan: &CouplingScan, lambda_from: Excitation) -> Result<CriticalCoupling> {
    let no_crossing = |reason: String| Error::NoCrossing {
        from: lambda_from.to_string(),
        to: lambda_from.next().to_string(),
        reason,
    };
    let gap = |k: f64| crossing_gap(scan, lambda_from, k);

    let mut lo = 0.0;
    let f_lo = gap(lo)?;
    if f_lo <= 0.0 {
        return Err(no_crossing(format!("gap at zero coupling is {f_lo:e}, not positive")));
    }
    let mut hi = 1.0;
    let mut exponent = 0;
    while gap(hi)? >= 0.0 {
        exponent += 1;
        if exponent > MAX_BRACKET_EXPONENT {
            return Err(no_crossing(format!("no sign change below κ = 2^{MAX_BRACKET_EXPONENT}")));
        }
        lo = hi;
        hi *= 2.0;
    }
    // bisect to full precision; the κ tolerance is far below 1e-10
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = gap(mid)?;
        if f == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kappa_tilde = 0.5 * (lo + hi);
    Ok(CriticalCoupling {
        lambda_from,
        lambda_to: lambda_from.next(),
        kappa_tilde,
        residual: gap(kappa_tilde)?.abs(),
    })
}

/// Crossings of the ground state met while κ grows from 0 to `kappa_max`,
/// starting from the zero-coupling ground block.
pub fn crossings_below(scan: &CouplingScan, kappa_max: f64) -> Result<Vec<CriticalCoupling>> {
    let limits = ScanLimits::for_model(&scan.base);
    let mut lambda = ground_energy(&scan.at(0.0), limits)?.0;
    let mut out = Vec::new();
    for _ in 0..limits.max_blocks {
        let c = find_critical_coupling(scan, lambda)?;
        if c.kappa_tilde > kappa_max {
            return Ok(out);
        }
        out.push(c);
        lambda = lambda.next();
    }
    Err(Error::SearchFailed { max_blocks: limits.max_blocks })
}

/// First crossing for N spins, κ = √((1 + r)/N).
pub fn first_critical_analytic(n_spins: u32, r: f64) -> Result<f64> {
    if n_spins == 0 {
        return Err(domain("need at least one spin"));
    }
    if !(r > -1.0 && r.is_finite()) {
        return Err(domain(format!("detuning must be > -1, got {r}")));
    }
    Ok(((1.0 + r) / f64::from(n_spins)).sqrt())
}

/// Successive crossings from the zero-coupling ground block up to and
/// including `lambda_max`, checked to be strictly increasing.
///
/// The sequence starts at the ground block of `scan.at(0)`, which need not be
/// λ = -N/2 when a second coupling is held fixed.
pub fn gsi_sequence(scan: &CouplingScan, lambda_max: Excitation) -> Result<Vec<CriticalCoupling>> {
    let start = ground_energy(&scan.at(0.0), ScanLimits::for_model(&scan.base))?.0;
    let mut out: Vec<CriticalCoupling> = Vec::new();
    let mut lambda = start;
    while lambda <= lambda_max {
        let c = find_critical_coupling(scan, lambda)?;
        if let Some(prev) = out.last() {
            if c.kappa_tilde <= prev.kappa_tilde {
                return Err(Error::NotIncreasing {
                    first_lambda: prev.lambda_from.to_string(),
                    first: prev.kappa_tilde,
                    second_lambda: c.lambda_from.to_string(),
                    second: c.kappa_tilde,
                });
            }
        }
        out.push(c);
        lambda = lambda.next();
    }
    Ok(out)
}

/// Crossing sequence of the single-mode model for one detuning.
#[derive(Debug, Clone)]
pub struct PhaseColumn {
    pub detuning: f64,
    pub crossings: Vec<CriticalCoupling>,
}

/// Region boundaries κ̃_λ(r) of the single-mode model over a detuning grid.
/// Columns come back in grid order.
pub fn phase_diagram(n_spins: u32, r_grid: &[f64], lambda_max: Excitation) -> Result<Vec<PhaseColumn>> {
    phase_diagram_with(Execution::default(), n_spins, r_grid, lambda_max)
}

pub fn phase_diagram_with(
    exec: Execution,
    n_spins: u32,
    r_grid: &[f64],
    lambda_max: Excitation,
) -> Result<Vec<PhaseColumn>> {
    exec.try_map(r_grid, |&r| {
        let scan = CouplingScan::common(ModelParams::single_mode(n_spins, r, 0.0)?);
        Ok(PhaseColumn { detuning: r, crossings: gsi_sequence(&scan, lambda_max)? })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    /// E_λ non-increasing in κ (λ >= 0).
    MonotoneEnergy,
    /// f = E_{λ+1} - E_λ non-increasing with a single sign change.
    SingleCrossing,
    /// E_{λ+2} > E_{λ+1} at κ̃_λ.
    NextBlockAbove,
    /// κ̃_λ < κ̃_{λ+1}.
    IncreasingCrossings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationEntry {
    pub condition: Condition,
    pub lambda: i32,
    pub passed: bool,
    /// Condition-specific witness: largest energy increase, number of sign
    /// changes, the gap E_{λ+2} - E_{λ+1}, or κ̃_{λ+1} - κ̃_λ.
    pub witness: f64,
}

#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub detuning: f64,
    pub lambda_max: i32,
    pub entries: Vec<CertificationEntry>,
}

impl CertificationReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CertificationEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

const CERT_GRID: usize = 2001;
const CERT_TOL: f64 = 1e-12;

/// Numerically checks, for two spins and one mode at detuning `r`, the three
/// conditions that together force the crossings to occur in sequence, for
/// λ = -1 ..= `lambda_max`.
pub fn certify_sequential_gsi(r: f64, lambda_max: i32) -> Result<CertificationReport> {
    if lambda_max < -1 {
        return Err(domain(format!("lambda_max must be >= -1, got {lambda_max}")));
    }
    let scan = CouplingScan::common(ModelParams::single_mode(2, r, 0.0)?);
    let mut entries = Vec::new();

    let mut crossings = Vec::new();
    for l in -1..=lambda_max + 1 {
        crossings.push(find_critical_coupling(&scan, Excitation::integer(l)).ok());
    }
    let top = crossings.iter().flatten().map(|c| c.kappa_tilde).fold(0.0, f64::max);
    let kappa_max = 1.5 * top + 0.5;
    let grid: Vec<f64> = (0..CERT_GRID).map(|i| kappa_max * i as f64 / (CERT_GRID - 1) as f64).collect();
    let energies = |l: i32| -> Result<Vec<f64>> {
        grid.iter()
            .map(|&k| block_ground_energy(&scan.at(k), Excitation::integer(l)))
            .collect()
    };
    let curves: Vec<Vec<f64>> = (-1..=lambda_max + 2).map(energies).collect::<Result<_>>()?;
    let curve = |l: i32| &curves[(l + 1) as usize];

    for l in 0..=lambda_max + 2 {
        let worst = curve(l).windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        entries.push(CertificationEntry {
            condition: Condition::MonotoneEnergy,
            lambda: l,
            passed: worst <= CERT_TOL,
            witness: worst,
        });
    }

    for l in -1..=lambda_max {
        let f: Vec<f64> = curve(l + 1).iter().zip(curve(l)).map(|(a, b)| a - b).collect();
        let monotone = f.windows(2).all(|w| w[1] <= w[0] + CERT_TOL);
        let changes = f.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
        let ends = f[0] > 0.0 && f[f.len() - 1] < 0.0;
        entries.push(CertificationEntry {
            condition: Condition::SingleCrossing,
            lambda: l,
            passed: monotone && changes == 1 && ends && crossings[(l + 1) as usize].is_some(),
            witness: changes as f64,
        });
    }

    for l in -1..=lambda_max {
        let (passed, witness) = match crossings[(l + 1) as usize] {
            Some(c) => {
                let p = scan.at(c.kappa_tilde);
                let gap = block_ground_energy(&p, Excitation::integer(l + 2))?
                    - block_ground_energy(&p, Excitation::integer(l + 1))?;
                (gap > 0.0, gap)
            }
            None => (false, f64::NAN),
        };
        entries.push(CertificationEntry { condition: Condition::NextBlockAbove, lambda: l, passed, witness });
    }

    for l in -1..lambda_max {
        let (a, b) = (crossings[(l + 1) as usize], crossings[(l + 2) as usize]);
        let witness = match (a, b) {
            (Some(a), Some(b)) => b.kappa_tilde - a.kappa_tilde,
            _ => f64::NAN,
        };
        entries.push(CertificationEntry {
            condition: Condition::IncreasingCrossings,
            lambda: l,
            passed: witness > 0.0,
            witness,
        });
    }

    Ok(CertificationReport { detuning: r, lambda_max, entries })
}

/// i-th critical coupling (1-based) at a red, zero and blue detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingReport {
    pub index: u32,
    pub below: f64,
    pub resonant: f64,
    pub above: f64,
}

impl OrderingReport {
    pub fn below_resonant(&self) -> bool {
        self.below < self.resonant
    }

    pub fn resonant_below_above(&self) -> bool {
        self.resonant < self.above
    }

    pub fn holds(&self) -> bool {
        self.below_resonant() && self.resonant_below_above()
    }
}

/// Compares the `index`-th crossing (1 = first) of the single-mode model at
/// `r_neg < 0`, `0` and `r_pos > 0`.
pub fn verify_detuning_ordering(n_spins: u32, index: u32, r_neg: f64, r_pos: f64) -> Result<OrderingReport> {
    if index == 0 {
        return Err(domain("crossing index is 1-based"));
    }
    if !(r_neg < 0.0 && r_pos > 0.0) {
        return Err(domain(format!("need r_neg < 0 < r_pos, got {r_neg}, {r_pos}")));
    }
    let lambda = Excitation::lowest(n_spins).offset(index as i32 - 1);
    let at = |r: f64| -> Result<f64> {
        let scan = CouplingScan::common(ModelParams::single_mode(n_spins, r, 0.0)?);
        Ok(find_critical_coupling(&scan, lambda)?.kappa_tilde)
    };
    Ok(OrderingReport { index, below: at(r_neg)?, resonant: at(0.0)?, above: at(r_pos)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::energy_closed;
    use crate::model::CouplingAxis;

    fn single(n: u32, r: f64) -> CouplingScan {
        CouplingScan::common(ModelParams::single_mode(n, r, 0.0).unwrap())
    }

    #[test]
    fn ground_state_examples() {
        // closed-form check: E_0 > -1 at κ = 0.5, E_0 < -1 < E_1 at κ = 0.8
        assert!(energy_closed(0, 0.0, 0.5).unwrap() > -1.0);
        let g = ground_state_at(&ModelParams::single_mode(2, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!(g.lambda_star, Excitation::integer(-1));
        assert_eq!(g.energy, -1.0);
        let e0 = energy_closed(0, 0.0, 0.8).unwrap();
        assert!(e0 < -1.0 && e0 < energy_closed(1, 0.0, 0.8).unwrap());
        let g = ground_state_at(&ModelParams::single_mode(2, 0.0, 0.8).unwrap()).unwrap();
        assert_eq!(g.lambda_star, Excitation::integer(0));
        assert!((g.energy - e0).abs() < 1e-14);
        let norm: f64 = g.amplitudes.iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_is_global_minimum() {
        for &(r, k) in &[(0.0, 2.3), (1.0, 3.1), (-0.5, 1.2), (5.0, 4.0)] {
            let p = ModelParams::single_mode(2, r, k).unwrap();
            let g = ground_state_at(&p).unwrap();
            for l in -1..60 {
                let e = energy_closed(l, r, k).unwrap();
                assert!(g.energy <= e + 1e-12, "r={r} κ={k} λ={l}");
            }
        }
    }

    #[test]
    fn two_mode_sequence_can_start_above_lowest_block() {
        // κ_b fixed at 1.1 with r_b = 1: λ = 0 already wins at κ_a = 0
        let base = ModelParams::two_mode(2, 0.0, 0.0, 1.0, 1.1).unwrap();
        let scan = CouplingScan::new(base, CouplingAxis::First).unwrap();
        let g = ground_state_at(&scan.at(0.0)).unwrap();
        assert_eq!(g.lambda_star, Excitation::integer(0));
        let seq = gsi_sequence(&scan, Excitation::integer(2)).unwrap();
        assert_eq!(seq[0].lambda_from, Excitation::integer(0));
        // with κ_b = 0.4 the sequence starts at λ = -1
        let base = ModelParams::two_mode(2, 0.0, 0.0, 1.0, 0.4).unwrap();
        let scan = CouplingScan::new(base, CouplingAxis::First).unwrap();
        let seq = gsi_sequence(&scan, Excitation::integer(2)).unwrap();
        assert_eq!(seq[0].lambda_from, Excitation::integer(-1));
    }

    #[test]
    fn resonant_crossings() {
        let scan = single(2, 0.0);
        let want = [0.7071, 0.9660, 1.4029, 1.7260];
        let seq = gsi_sequence(&scan, Excitation::integer(2)).unwrap();
        assert_eq!(seq.len(), 4);
        for (c, w) in seq.iter().zip(want) {
            assert!((c.kappa_tilde - w).abs() < 1e-4, "{} vs {w}", c.kappa_tilde);
            assert!(c.residual < 1e-10);
        }
        assert!((seq[0].kappa_tilde - 0.5f64.sqrt()).abs() < 1e-12);
        let c = find_critical_coupling(&single(2, 1.0), Excitation::integer(-1)).unwrap();
        assert!((c.kappa_tilde - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossings_match_closed_form_energies() {
        for r in [-0.5, 0.0, 2.0] {
            let scan = single(2, r);
            for l in -1..6 {
                let c = find_critical_coupling(&scan, Excitation::integer(l)).unwrap();
                let k = c.kappa_tilde;
                let f = |k: f64| energy_closed(l + 1, r, k).unwrap() - energy_closed(l, r, k).unwrap();
                assert!(f(k - 1e-8) > 0.0 && f(k + 1e-8) < 0.0, "r={r} λ={l}");
            }
        }
    }

    #[test]
    fn ground_state_switches_at_crossings() {
        let scan = single(2, 0.7);
        for c in gsi_sequence(&scan, Excitation::integer(4)).unwrap() {
            let below = ground_state_at(&scan.at(c.kappa_tilde - 1e-6)).unwrap();
            let above = ground_state_at(&scan.at(c.kappa_tilde + 1e-6)).unwrap();
            assert_eq!(below.lambda_star, c.lambda_from);
            assert_eq!(above.lambda_star, c.lambda_to);
        }
    }

    #[test]
    fn analytic_first_crossing() {
        assert!((first_critical_analytic(2, 0.0).unwrap() - 0.70710678).abs() < 1e-8);
        assert_eq!(first_critical_analytic(2, 1.0).unwrap(), 1.0);
        assert!((first_critical_analytic(4, -0.5).unwrap() - 0.35355339).abs() < 1e-8);
        assert!(first_critical_analytic(0, 0.0).is_err());
        assert!(first_critical_analytic(2, -1.0).is_err());
        for n in 1..=6 {
            let c = find_critical_coupling(&single(n, 0.3), Excitation::lowest(n)).unwrap();
            assert!((c.kappa_tilde - first_critical_analytic(n, 0.3).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn no_crossing_when_already_past() {
        let base = ModelParams::two_mode(2, 0.0, 0.0, 1.0, 1.1).unwrap();
        let scan = CouplingScan::new(base, CouplingAxis::First).unwrap();
        assert!(matches!(
            find_critical_coupling(&scan, Excitation::integer(-1)),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn phase_diagram_lowest_curve() {
        let grid: Vec<f64> = (0..30).map(|i| -0.99 + 0.1 * f64::from(i)).collect();
        let cols = phase_diagram(2, &grid, Excitation::integer(3)).unwrap();
        for col in &cols {
            let want = ((1.0 + col.detuning) / 2.0).sqrt();
            assert!((col.crossings[0].kappa_tilde - want).abs() < 1e-8);
        }
        // each boundary nondecreasing in r
        for pair in cols.windows(2) {
            for (a, b) in pair[0].crossings.iter().zip(&pair[1].crossings) {
                assert!(b.kappa_tilde >= a.kappa_tilde);
            }
        }
        let near_edge = phase_diagram(2, &[-1.0 + 1e-9], Excitation::integer(-1)).unwrap();
        assert!(near_edge[0].crossings[0].kappa_tilde < 1e-4);
        let seq = phase_diagram_with(Execution::Sequential, 2, &grid, Excitation::integer(3)).unwrap();
        for (a, b) in seq.iter().zip(&cols) {
            assert_eq!(a.crossings, b.crossings);
        }
    }

    #[test]
    fn certification_passes() {
        for r in [0.0, 10.0, -0.9] {
            let rep = certify_sequential_gsi(r, 8).unwrap();
            assert!(rep.all_passed(), "r={r}: {:?}", rep.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn detuning_ordering() {
        let rep = verify_detuning_ordering(2, 1, -0.5, 1.0).unwrap();
        assert!((rep.below - 0.5).abs() < 1e-10);
        assert!((rep.resonant - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((rep.above - 1.0).abs() < 1e-10);
        assert!(rep.holds());
        assert!(verify_detuning_ordering(2, 2, -0.5, 1.0).unwrap().holds());
        assert!(verify_detuning_ordering(3, 1, -0.9, 2.0).unwrap().holds());
        assert!(verify_detuning_ordering(2, 0, -0.5, 1.0).is_err());
        assert!(verify_detuning_ordering(2, 1, 0.5, 1.0).is_err());
    }

    #[test]
    fn search_failure_is_reported() {
        let p = ModelParams::single_mode(2, -0.9, 3.0).unwrap();
        assert!(matches!(
            ground_energy(&p, ScanLimits { max_blocks: 5 }),
            Err(Error::SearchFailed { max_blocks: 5 })
        ));
    }
}
