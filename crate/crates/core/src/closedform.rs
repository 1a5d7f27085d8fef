//! Closed-form spectrum, eigenvectors and concurrences of the two-spin,
//! single-mode model.
//!
//! Every block with λ >= 1 is 3×3 and its lowest root follows from the
//! trigonometric solution of the depressed cubic. These formulas serve as an
//! independent check on the numeric pipeline and as a fast path.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Slack allowed on the arccos argument before clamping. Analytically the
/// argument never exceeds 1/(1 + 2λ) in magnitude.
const ARCCOS_SLACK: f64 = 1e-12;

/// Auxiliary quantities of the λ >= 1 cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormAuxiliaries {
    /// α_λ = (4λ + 2) κ² + r²
    pub alpha: f64,
    /// φ_λ = arccos(3√3 κ² r / α^{3/2}), principal branch
    pub phi: f64,
    /// θ_λ = (π - φ_λ) / 3
    pub theta: f64,
    /// ζ_λ = cos(π/3 - φ_λ/3) = cos θ_λ
    pub zeta: f64,
    /// τ_λ = 1 + 2λ
    pub tau: i32,
}

fn check_params(r: f64, kappa: f64) -> Result<()> {
    if !(r.is_finite() && r > -1.0) {
        return Err(domain(format!("detuning must be > -1, got {r}")));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(domain(format!("coupling must be >= 0, got {kappa}")));
    }
    Ok(())
}

fn check_positive_coupling(kappa: f64) -> Result<()> {
    if kappa <= 0.0 {
        return Err(Error::Degenerate(format!(
            "closed-form eigenvectors need a positive coupling, got {kappa}"
        )));
    }
    Ok(())
}

/// Auxiliaries for λ >= 1. Returns `None` at the fully degenerate point
/// κ = r = 0 where α vanishes and φ is undefined.
pub fn auxiliaries(lambda: i32, r: f64, kappa: f64) -> Result<Option<ClosedFormAuxiliaries>> {
    if lambda < 1 {
        return Err(domain(format!("cubic auxiliaries need λ >= 1, got {lambda}")));
    }
    check_params(r, kappa)?;
    let lam = f64::from(lambda);
    let alpha = (4.0 * lam + 2.0) * kappa * kappa + r * r;
    if alpha == 0.0 {
        return Ok(None);
    }
    let arg = 3.0 * 3f64.sqrt() * kappa * kappa * r / alpha.powf(1.5);
    assert!(
        arg.abs() <= 1.0 + ARCCOS_SLACK,
        "arccos argument {arg} out of range for λ={lambda}, r={r}, κ={kappa}"
    );
    let phi = arg.clamp(-1.0, 1.0).acos();
    let theta = (PI - phi) / 3.0;
    Ok(Some(ClosedFormAuxiliaries {
        alpha,
        phi,
        theta,
        zeta: theta.cos(),
        tau: 1 + 2 * lambda,
    }))
}

/// Lowest interaction eigenvalue shift w = (2/3)√(3α) ζ, so that
/// E_λ = λ + λ r - w.
fn cubic_shift(aux: &ClosedFormAuxiliaries) -> f64 {
    2.0 / 3.0 * (3.0 * aux.alpha).sqrt() * aux.zeta
}

/// Lowest total energy of block λ (λ >= -1) for two spins and one mode.
pub fn energy_closed(lambda: i32, r: f64, kappa: f64) -> Result<f64> {
    check_params(r, kappa)?;
    match lambda {
        l if l < -1 => Err(domain(format!("λ must be >= -1 for two spins, got {l}"))),
        -1 => Ok(-1.0),
        0 => Ok(0.5 * (r - (8.0 * kappa * kappa + r * r).sqrt())),
        l => {
            let lam = f64::from(l);
            Ok(match auxiliaries(l, r, kappa)? {
                Some(aux) => lam + lam * r - cubic_shift(&aux),
                None => lam,
            })
        }
    }
}

/// Unnormalized ground-state amplitudes of block λ >= 0.
///
/// Amplitudes are listed in ascending photon number (the block basis order):
/// `[a_0, 1]` for λ = 0 and `[a_λ, b_λ, 1]` for λ >= 1. They are written in
/// the phase convention where the coupling enters with opposite sign; use
/// [`ClosedFormEigenvector::in_block_convention`] to compare with vectors of
/// the blocks built in [`crate::model`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormEigenvector {
    pub lambda: i32,
    pub amplitudes: Vec<f64>,
    /// Euclidean norm of `amplitudes`.
    pub norm: f64,
}

impl ClosedFormEigenvector {
    pub fn normalized(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a / self.norm).collect()
    }

    /// Normalized, with the m = 0 amplitude negated (photon-parity gauge
    /// κ → -κ) and the largest component made positive.
    pub fn in_block_convention(&self) -> Vec<f64> {
        let mut v = self.normalized();
        let m0 = if self.lambda == 0 { 0 } else { 1 };
        v[m0] = -v[m0];
        let big = v.iter().copied().fold(0.0f64, |b, x| if x.abs() > b.abs() { x } else { b });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }

    /// Spin populations `(p_{m=1}, p_{m=0}, p_{m=-1})`.
    pub fn populations(&self) -> [f64; 3] {
        let v = self.normalized();
        match v.as_slice() {
            [a0, one] => [0.0, a0 * a0, one * one],
            [a, b, one] => [a * a, b * b, one * one],
            _ => unreachable!(),
        }
    }
}

pub fn eigenvector_closed(lambda: i32, r: f64, kappa: f64) -> Result<ClosedFormEigenvector> {
    check_params(r, kappa)?;
    check_positive_coupling(kappa)?;
    let amplitudes = match lambda {
        l if l < 0 => return Err(domain(format!("eigenvector formulas need λ >= 0, got {l}"))),
        0 => {
            let a0 = (r + (8.0 * kappa * kappa + r * r).sqrt()) / (2.0 * 2f64.sqrt() * kappa);
            vec![a0, 1.0]
        }
        l => {
            let aux = auxiliaries(l, r, kappa)?.expect("α > 0 when κ > 0");
            let lam = f64::from(l);
            let w = cubic_shift(&aux);
            let k2 = kappa * kappa;
            let a = -(1.0 + lam).sqrt() / lam.sqrt() + w * (r + w) / (2.0 * (lam * (1.0 + lam)).sqrt() * k2);
            let b = (r + w) / ((2.0 * (1.0 + lam)).sqrt() * kappa);
            vec![a, b, 1.0]
        }
    };
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(ClosedFormEigenvector { lambda, amplitudes, norm })
}

/// Concurrence of the λ = 0 ground state.
pub fn c0_closed(r: f64, kappa: f64) -> Result<f64> {
    check_params(r, kappa)?;
    check_positive_coupling(kappa)?;
    let s = (8.0 * kappa * kappa + r * r).sqrt();
    let num = (r + s) * (r + s);
    Ok(num / (2.0 * (8.0 * kappa * kappa + r * (r + s))))
}

/// Concurrence of the block-λ ground state for λ >= 1, clamped at zero.
pub fn clambda_closed(lambda: i32, r: f64, kappa: f64) -> Result<f64> {
    Ok(clambda_unclamped(lambda, r, kappa)?.max(0.0))
}

/// The rational expression behind [`clambda_closed`] before the clamp; it
/// goes negative where the concurrence vanishes.
pub fn clambda_unclamped(lambda: i32, r: f64, kappa: f64) -> Result<f64> {
    check_positive_coupling(kappa)?;
    let aux = auxiliaries(lambda, r, kappa)?.expect("α > 0 when κ > 0");
    let lam = f64::from(lambda);
    let (sl, sl1) = (lam.sqrt(), (1.0 + lam).sqrt());
    let a = aux.alpha;
    let z = aux.zeta;
    let s3a = (3.0 * a).sqrt();
    let k2 = kappa * kappa;
    let r2 = r * r;

    let num = 3.0
        * sl
        * k2
        * (3.0 * (4.0 * (1.0 + lam).powf(1.5) * k2 + sl * r2)
            - 4.0 * s3a * (sl1 - sl) * r * z
            - 4.0 * a * (2.0 * sl1 - sl) * z * z);
    let den = 9.0 * k2 * (2.0 * (1.0 + 2.0 * lam) * (1.0 + lam) * k2 + lam * r2)
        - 12.0 * s3a * k2 * r * z
        - 6.0 * a * (2.0 * (2.0 + lam) * k2 - r2) * z * z
        + 8.0 * a.powf(1.5) * z.powi(3) * (3f64.sqrt() * r + a.sqrt() * z);
    Ok(num / den)
}

/// Resonant (r = 0) concurrence of block λ >= 0; independent of κ.
pub fn clambda_resonant(lambda: i32) -> Result<f64> {
    if lambda < 0 {
        return Err(domain(format!("λ must be >= 0, got {lambda}")));
    }
    let lam = f64::from(lambda);
    let d = (1.0 + lam).sqrt() - lam.sqrt();
    Ok(d * d / (2.0 * (1.0 + 2.0 * lam)))
}

/// Concurrence of the block-λ ground state, any λ >= -1.
pub fn concurrence_closed(lambda: i32, r: f64, kappa: f64) -> Result<f64> {
    match lambda {
        -1 => {
            check_params(r, kappa)?;
            Ok(0.0)
        }
        0 => c0_closed(r, kappa),
        l => clambda_closed(l, r, kappa),
    }
}
