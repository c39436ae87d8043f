//! Physical momentum and energy carried by a travelling wave.
//!
//! For periodic-type waves the conserved quantities are integrals of the
//! momentum and energy densities over one wavelength; for solitary-type
//! waves the constant background contributes an infinite amount, so the
//! integrals are *regularized* by subtracting the background density
//! first. The regularized solitary set additionally carries the
//! energy–momentum combination `Ê = Ẽ − (T₄[g₀]/T₃[g₀])·P̃`, the unique
//! background-orthogonal linear combination.
//!
//! All integrals are evaluated in the dimensionless variables by the
//! change of variable from the wave coordinate to the amplitude `g`,
//! using the same singularity-removing substitutions as the profile
//! quadratures, then scaled by the closed prefactor
//! `3^{-1/2} σ^{(k+3)/(k−1)} |ν/c|^{4/(k−1)} ν R` (momentum) and `ν/2`
//! times that (energy). Values are per unit linear mass density of the
//! chain.

use serde::Serialize;
use thiserror::Error;

use crate::classify::{self, WaveClass, WaveKind};
use crate::model::{self, DimensionlessWave, PhysicalParams};
use crate::quad::{
    cusped_periodic_cofactor, integrate_pieces, nodal_cofactor, periodic_cofactor, piece_plain,
    piece_pow_origin, piece_sqrt_lower, piece_sqrt_lower_times, piece_sqrt_upper,
    piece_sqrt_upper_times, solitary_cofactor_quotient, LevelSet, Piece, QuadError,
};

/// Internal relative tolerance requested from the quadratures; two
/// decades tighter than the 1e−9 accuracy the results promise.
const CONSERVED_REL: f64 = 1e-11;

#[derive(Debug, Error)]
pub enum ConservedError {
    #[error("conserved {expected} integrals need a matching wave kind, classified {got:?}")]
    WrongKind { expected: &'static str, got: WaveKind },
    #[error("physical exponent k = {physical} disagrees with the dimensionless wave's k = {wave}")]
    ExponentMismatch { physical: f64, wave: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Audit record of the closed prefactor applied to the dimensionless
/// integrals.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrefactorBreakdown {
    /// `σ = √(k(k+1)/2)`.
    pub sigma: f64,
    /// Exponent `4/(k−1)` of the speed-ratio factor.
    pub nu_over_c_exponent: f64,
    /// `|ν/c|^{4/(k−1)}` itself.
    pub nu_over_c_power: f64,
    pub radius: f64,
    pub wave_speed: f64,
}

impl PrefactorBreakdown {
    pub(crate) fn new(p: &PhysicalParams) -> Self {
        let expo = 4.0 / (p.k - 1.0);
        PrefactorBreakdown {
            sigma: p.sigma(),
            nu_over_c_exponent: expo,
            nu_over_c_power: (p.wave_speed / p.c).abs().powf(expo),
            radius: p.radius,
            wave_speed: p.wave_speed,
        }
    }
}

/// Momentum and energy of one travelling wave, per unit linear mass
/// density.
///
/// Sign convention: the stored entries carry the sign the defining
/// integrals produce over an increasing-`g` domain, which for rightward
/// waves (`ν > 0`) makes them positive. The cusped solitary family's
/// regularized integrals run over `[0, g₀]` below the background and come
/// out globally negative; that overall minus is factored into
/// `orientation = −1`, so the physical value of each entry is always
/// `orientation × entry` (see [`ConservedSet::signed`]).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConservedSet {
    /// Momentum `P` (periodic-type) or regularized momentum `P̃`
    /// (solitary-type).
    pub momentum: f64,
    /// Energy `E` or regularized energy `Ẽ`.
    pub energy: f64,
    /// Energy–momentum combination `Ê`; present only for the solitary
    /// families, where the background singles it out.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_momentum: Option<f64>,
    /// `+1`, or `−1` for the cusped solitary family (the presentation
    /// factors the overall minus of the below-background integrals out of
    /// the entries).
    pub orientation: i8,
    /// True when the entries are background-subtracted (solitary-type).
    pub regularized: bool,
    pub prefactor_breakdown: PrefactorBreakdown,
}

impl ConservedSet {
    /// The physically signed `(momentum, energy)` pair,
    /// `orientation × entry`.
    pub fn signed(&self) -> (f64, f64) {
        let o = self.orientation as f64;
        (o * self.momentum, o * self.energy)
    }

    pub(crate) fn assemble(
        p: &PhysicalParams,
        momentum: f64,
        energy: f64,
        energy_momentum: Option<f64>,
        orientation: i8,
        regularized: bool,
    ) -> Self {
        ConservedSet {
            momentum,
            energy,
            energy_momentum,
            orientation,
            regularized,
            prefactor_breakdown: PrefactorBreakdown::new(p),
        }
    }
}

/// Closed momentum prefactor `3^{-1/2} σ^{(k+3)/(k−1)} |ν/c|^{4/(k−1)} ν R`
/// multiplying the dimensionless momentum integral. Odd in `ν`.
pub fn momentum_prefactor(p: &PhysicalParams) -> f64 {
    let b = PrefactorBreakdown::new(p);
    b.sigma.powf((p.k + 3.0) / (p.k - 1.0)) / 3f64.sqrt()
        * b.nu_over_c_power
        * p.wave_speed
        * p.radius
}

/// Closed energy prefactor: `ν/2` times the momentum prefactor. Even in
/// `ν`.
pub fn energy_prefactor(p: &PhysicalParams) -> f64 {
    momentum_prefactor(p) * p.wave_speed / 2.0
}

/// Ratio `T₄[g₀]/T₃[g₀]` of the energy and momentum densities on the
/// constant background `g ≡ g₀`: `ν(1 + g₀^{k−1})/2`. This is the
/// coefficient that makes `Ê = Ẽ − (T₄[g₀]/T₃[g₀])·P̃` background-free.
pub fn background_flux_ratio(p: &PhysicalParams, g0: f64) -> f64 {
    0.5 * p.wave_speed * (1.0 + g0.powf(p.k - 1.0))
}

fn check_exponent(w: &DimensionlessWave, p: &PhysicalParams) -> Result<(), ConservedError> {
    if p.k == w.k {
        Ok(())
    } else {
        Err(ConservedError::ExponentMismatch { physical: p.k, wave: w.k })
    }
}

/// Which square-root weight of the level set a periodic integrand
/// carries.
#[derive(Clone, Copy)]
enum Weight {
    /// `g^q / √(E−V)`.
    Inverse,
    /// `g^q · √(E−V)`.
    Direct,
}

/// Substitution pieces for `∫ g^{(k−1)/2+m} (E−V)^{∓1/2} dg` over the full
/// oscillation range of a periodic-type level set, with every endpoint
/// singularity removed analytically via the factored cofactor forms.
fn periodic_moment_pieces(ls: &LevelSet, m: f64, weight: Weight) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(2);
    match *ls {
        LevelSet::Periodic { k, g0, g1 } => {
            let q = 0.5 * (k - 1.0) + m;
            let gm = 0.5 * (g0 + g1);
            match weight {
                Weight::Inverse => {
                    out.push(piece_sqrt_lower(
                        move |g| g.powf(q) / ((g1 - g) * periodic_cofactor(k, g0, g1, g)).sqrt(),
                        g0,
                        g0,
                        gm,
                    ));
                    out.push(piece_sqrt_upper(
                        move |g| g.powf(q) / ((g - g0) * periodic_cofactor(k, g0, g1, g)).sqrt(),
                        g1,
                        gm,
                        g1,
                    ));
                }
                Weight::Direct => {
                    out.push(piece_sqrt_lower_times(
                        move |g| g.powf(q) * ((g1 - g) * periodic_cofactor(k, g0, g1, g)).sqrt(),
                        g0,
                        g0,
                        gm,
                    ));
                    out.push(piece_sqrt_upper_times(
                        move |g| g.powf(q) * ((g - g0) * periodic_cofactor(k, g0, g1, g)).sqrt(),
                        g1,
                        gm,
                        g1,
                    ));
                }
            }
        }
        LevelSet::CuspedPeriodic { k, g0, e } => {
            let q = 0.5 * (k - 1.0) + m;
            let gm = 0.5 * g0;
            match weight {
                Weight::Inverse => {
                    out.push(piece_pow_origin(
                        move |g| 1.0 / ((g0 - g) * cusped_periodic_cofactor(k, g0, e, g)).sqrt(),
                        q,
                        0.0,
                        gm,
                    ));
                    out.push(piece_sqrt_upper(
                        move |g| g.powf(q) / cusped_periodic_cofactor(k, g0, e, g).sqrt(),
                        g0,
                        gm,
                        g0,
                    ));
                }
                Weight::Direct => {
                    out.push(piece_pow_origin(
                        move |g| ((g0 - g) * cusped_periodic_cofactor(k, g0, e, g)).sqrt(),
                        q,
                        0.0,
                        gm,
                    ));
                    out.push(piece_sqrt_upper_times(
                        move |g| g.powf(q) * cusped_periodic_cofactor(k, g0, e, g).sqrt(),
                        g0,
                        gm,
                        g0,
                    ));
                }
            }
        }
        LevelSet::Nodal { k, g1, critical } => {
            let q = 0.5 * (k - 1.0) + m;
            let gm = 0.5 * g1;
            if critical {
                // E − V = (1−g)·g²·S_{k−1}(g, 1) exactly at the critical
                // node, so a full power of g cancels against the weight.
                match weight {
                    Weight::Inverse => {
                        out.push(piece_pow_origin(
                            move |g| 1.0 / ((1.0 - g) * model::s_n(k - 1.0, g, 1.0)).sqrt(),
                            q - 1.0,
                            0.0,
                            gm,
                        ));
                        out.push(piece_sqrt_upper(
                            move |g| g.powf(q - 1.0) / model::s_n(k - 1.0, g, 1.0).sqrt(),
                            g1,
                            gm,
                            g1,
                        ));
                    }
                    Weight::Direct => {
                        out.push(piece_pow_origin(
                            move |g| ((1.0 - g) * model::s_n(k - 1.0, g, 1.0)).sqrt(),
                            q + 1.0,
                            0.0,
                            gm,
                        ));
                        out.push(piece_sqrt_upper_times(
                            move |g| g.powf(q + 1.0) * model::s_n(k - 1.0, g, 1.0).sqrt(),
                            g1,
                            gm,
                            g1,
                        ));
                    }
                }
            } else {
                // E − V = (g1−g)·g·A with A = S_k(g,g1) − 1 ≥ g1^{k−1}−1 > 0.
                match weight {
                    Weight::Inverse => {
                        out.push(piece_pow_origin(
                            move |g| 1.0 / ((g1 - g) * nodal_cofactor(k, g1, g)).sqrt(),
                            q - 0.5,
                            0.0,
                            gm,
                        ));
                        out.push(piece_sqrt_upper(
                            move |g| g.powf(q - 0.5) / nodal_cofactor(k, g1, g).sqrt(),
                            g1,
                            gm,
                            g1,
                        ));
                    }
                    Weight::Direct => {
                        out.push(piece_pow_origin(
                            move |g| ((g1 - g) * nodal_cofactor(k, g1, g)).sqrt(),
                            q + 0.5,
                            0.0,
                            gm,
                        ));
                        out.push(piece_sqrt_upper_times(
                            move |g| g.powf(q + 0.5) * nodal_cofactor(k, g1, g).sqrt(),
                            g1,
                            gm,
                            g1,
                        ));
                    }
                }
            }
        }
        _ => unreachable!("periodic moments are only built for periodic kinds"),
    }
    out
}

/// Momentum and energy of a periodic, cusped periodic, or nodal wave.
pub fn conserved_periodic(
    w: &DimensionlessWave,
    wc: &WaveClass,
    p: &PhysicalParams,
) -> Result<ConservedSet, ConservedError> {
    check_exponent(w, p)?;
    if !wc.is_periodic() {
        return Err(ConservedError::WrongKind { expected: "periodic", got: wc.kind });
    }
    let ls = LevelSet::from_class(w, wc).map_err(ConservedError::from)?;
    let k = w.k;
    let j_minus_2 = integrate_pieces(periodic_moment_pieces(&ls, 2.0, Weight::Inverse), CONSERVED_REL)?;
    let j_minus_k1 =
        integrate_pieces(periodic_moment_pieces(&ls, k + 1.0, Weight::Inverse), CONSERVED_REL)?;
    let j_plus_0 = integrate_pieces(periodic_moment_pieces(&ls, 0.0, Weight::Direct), CONSERVED_REL)?;
    let momentum = momentum_prefactor(p) * j_minus_2;
    let energy = energy_prefactor(p) * (j_minus_2 + j_minus_k1 - j_plus_0);
    Ok(ConservedSet::assemble(p, momentum, energy, None, 1, false))
}

/// Which of the three regularized solitary integrands to build.
#[derive(Clone, Copy)]
enum Regularized {
    Momentum,
    Energy,
    EnergyMomentum,
}

/// The background-subtracted integrand with the `1/√A` weight split off:
/// `h(g)` such that the integral is `∫ h/√A dg`. All three are positive
/// on the open oscillation interval.
fn regularized_numerator(which: Regularized, k: f64, g0: f64, g: f64) -> f64 {
    let ex = 0.5 * (k - 1.0);
    let a = classify::solitary_cofactor(k, g0, g);
    match which {
        Regularized::Momentum => (g + g0) * g.powf(ex),
        Regularized::Energy => {
            g.powf(ex) * ((g + g0) + model::s_n(k + 1.0, g, g0) - (g - g0) * a)
        }
        Regularized::EnergyMomentum => {
            g.powf(ex) * (g * g * model::s_n(k - 1.0, g, g0) - (g - g0) * a)
        }
    }
}

fn solitary_moment_pieces(ls: &LevelSet, which: Regularized) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(2);
    match *ls {
        LevelSet::Solitary { k, g0, g1 } => {
            // The double root at g0 is already cancelled inside A, so the
            // lower half is regular; the upper end has the simple zero of
            // A at g1.
            let gm = 0.5 * (g0 + g1);
            let width = g1 - g0;
            out.push(piece_plain(
                move |g| {
                    regularized_numerator(which, k, g0, g)
                        / classify::solitary_cofactor(k, g0, g).sqrt()
                },
                g0,
                gm,
            ));
            out.push(piece_sqrt_upper(
                move |g| {
                    regularized_numerator(which, k, g0, g)
                        / solitary_cofactor_quotient(k, g0, g1, width, g).sqrt()
                },
                g1,
                gm,
                g1,
            ));
        }
        LevelSet::CuspedSolitary { k, g0, triple } => {
            let ex = 0.5 * (k - 1.0);
            let gm = 0.5 * g0;
            out.push(piece_pow_origin(
                move |g| {
                    regularized_numerator(which, k, g0, g)
                        / (g.powf(ex) * classify::solitary_cofactor(k, g0, g).sqrt())
                },
                ex,
                0.0,
                gm,
            ));
            if triple {
                // A itself vanishes simply at the degenerate amplitude.
                out.push(piece_sqrt_upper(
                    move |g| {
                        regularized_numerator(which, k, g0, g)
                            / solitary_cofactor_quotient(k, g0, g0, g0, g).sqrt()
                    },
                    g0,
                    gm,
                    g0,
                ));
            } else {
                out.push(piece_plain(
                    move |g| {
                        regularized_numerator(which, k, g0, g)
                            / classify::solitary_cofactor(k, g0, g).sqrt()
                    },
                    gm,
                    g0,
                ));
            }
        }
        _ => unreachable!("solitary moments are only built for solitary kinds"),
    }
    out
}

/// Regularized momentum, energy, and energy–momentum of a solitary or
/// cusped solitary wave. The cusped family integrates over `[0, g₀]`
/// below the background; its overall minus is reported through
/// `orientation = −1`.
pub fn conserved_solitary(
    w: &DimensionlessWave,
    wc: &WaveClass,
    p: &PhysicalParams,
) -> Result<ConservedSet, ConservedError> {
    check_exponent(w, p)?;
    if !wc.is_solitary() {
        return Err(ConservedError::WrongKind { expected: "solitary", got: wc.kind });
    }
    let ls = LevelSet::from_class(w, wc).map_err(ConservedError::from)?;
    let integral = |which| -> Result<f64, ConservedError> {
        Ok(integrate_pieces(solitary_moment_pieces(&ls, which), CONSERVED_REL)?)
    };
    let i_p = integral(Regularized::Momentum)?;
    let i_e = integral(Regularized::Energy)?;
    let i_em = integral(Regularized::EnergyMomentum)?;
    let momentum = momentum_prefactor(p) * i_p;
    let energy = energy_prefactor(p) * i_e;
    let energy_momentum = energy_prefactor(p) * i_em;
    let orientation = if wc.kind == WaveKind::CuspedSolitaryWave { -1 } else { 1 };
    Ok(ConservedSet::assemble(p, momentum, energy, Some(energy_momentum), orientation, true))
}
