//! Command-line front end: classification, profile generation, conserved
//! quantities, verification sweeps, parameter grids, and the closed-form
//! figure data bundles.
//!
//! Output conventions: JSON documents carry a top-level
//! `"schema": "hertzwave/1"` key; CSV is locale-independent with
//! 17-significant-digit scientific notation so every float round-trips
//! bit-identically through re-parsing. Exit codes: 0 success, 2 invalid
//! request, 3 inadmissible parameters (no wave exists, with the failed
//! inequality as the reason), 4 numerical gate failure.

use std::fs;
use std::io::{self, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use hertzwave::classify::{self, NodeBehaviour, WaveClass, WaveKind};
use hertzwave::closed::{self, ClosedFormError, ClosedFormSolution, Family, Form};
use hertzwave::conserved::{self, ConservedError, ConservedSet};
use hertzwave::conslaw::{self, ConsLawId, JetPoint};
use hertzwave::model::{self, DimensionlessWave, ModelError, PhysicalParams};
use hertzwave::quad::{self, Profile, QuadError};

const SCHEMA: &str = "hertzwave/1";
/// Default seed of the `verify` jet sweep ("hertzwav" in ASCII).
const DEFAULT_SEED: u64 = 0x6865_7274_7a77_6176;
/// Gate on the characteristic-identity residual, relative to the largest
/// of the three terms.
const RESIDUAL_GATE: f64 = 1e-12;
/// Gate on first-integral drift along an emitted profile.
const DRIFT_GATE: f64 = 1e-7;
/// Gate on agreement between the dual-number derivatives and an
/// independent finite-difference evaluation in the `verify` self-check.
const FD_GATE: f64 = 1e-6;
/// Pointwise gate on `figures` output against the closed forms.
const FIGURE_GATE: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "hertzwave",
    version,
    about = "Travelling waves of the strongly nonlinear Hertz-chain equation: \
             classification, profiles, conserved quantities, and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a wave and print its family, roots, and node behaviour as JSON.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        wave: WaveArgs,
    },
    /// Build a sampled profile: CSV columns xi,g,gprime plus a JSON sidecar
    /// (wavelength, tail law, truncation point, first-integral drift).
    Profile {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        wave: WaveArgs,
        /// Number of samples over the half profile.
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Solitary-tail cutoff: sampling stops where the gap to the
        /// asymptote falls below this fraction of the wave height.
        #[arg(long, default_value_t = 1e-4)]
        g_floor: f64,
        /// CSV output path; the sidecar replaces its extension with .json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Momentum and energy of the wave (JSON).
    Conserved {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        wave: WaveArgs,
    },
    /// Run the verification suite: conservation-law residuals on random
    /// jets, a dual-vs-finite-difference self-check, and first-integral
    /// drift along built profiles. Exits 4 on any gate failure.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Optional wave parameterization; without one, a representative
        /// battery of all five families at this exponent is checked.
        #[command(flatten)]
        wave: WaveArgs,
        /// Number of random jets per conservation law.
        #[arg(long, default_value_t = 1000)]
        jets: usize,
        /// RNG seed for reproducible sweeps.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Map a one-parameter grid to per-point classification, wavelength,
    /// and conserved quantities in a single CSV (grid points run in
    /// parallel; rows stay in grid order). Points where no wave exists
    /// become NoWave rows rather than failures.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Base wave parameterization; the swept flag is overridden per
        /// grid point.
        #[command(flatten)]
        wave: WaveArgs,
        /// Which parameter the grid varies.
        #[arg(long, value_enum)]
        over: SweepField,
        /// First grid value.
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        /// Last grid value.
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of grid points (endpoints included).
        #[arg(long, default_value_t = 33)]
        points: usize,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate the closed-form family data: profile CSVs for
    /// representative parameters of all nine elementary families
    /// (cross-checked against the closed forms row by row) and
    /// momentum/energy curves over each family's parameter range.
    Figures {
        /// Number of samples per profile.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Output directory for the CSV bundle and manifest.json.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args, Clone, Copy)]
struct ModelArgs {
    /// Contact exponent k (> 1; 3/2 is the classical Hertz law).
    #[arg(long, allow_negative_numbers = true)]
    k: f64,
    /// Sphere radius R.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    radius: f64,
    /// Sound-speed scale c of the material.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    c: f64,
    /// Travelling-wave speed (negative for left-moving waves).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    nu: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<PhysicalParams, CliError> {
        PhysicalParams::new(self.k, self.radius, self.c, self.nu).map_err(model_err)
    }
}

/// One wave parameterization, selected by which flags are present:
/// `--c1 --e` (level set), `--g0 --g1` (periodic roots), `--g0`
/// (solitary asymptote), `--g0 --cusped` (cusped solitary amplitude),
/// `--g0 --e` (cusped periodic), `--g1` (nodal peak), `--c1 --g1`
/// (peak on a momentum-flux level).
#[derive(Args, Clone, Copy, Default)]
struct WaveArgs {
    /// Momentum-flux level C1.
    #[arg(long, alias = "C1", allow_negative_numbers = true)]
    c1: Option<f64>,
    /// Energy level E.
    #[arg(long, alias = "E", allow_negative_numbers = true)]
    e: Option<f64>,
    /// Lower amplitude: solitary asymptote, cusped amplitude, or lower
    /// periodic root.
    #[arg(long, allow_negative_numbers = true)]
    g0: Option<f64>,
    /// Peak amplitude: nodal peak, upper periodic root, or peak on a C1
    /// level.
    #[arg(long, allow_negative_numbers = true)]
    g1: Option<f64>,
    /// Select the cusped solitary branch for --g0.
    #[arg(long)]
    cusped: bool,
}

impl WaveArgs {
    fn any(&self) -> bool {
        self.c1.is_some() || self.e.is_some() || self.g0.is_some() || self.g1.is_some()
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepField {
    G0,
    G1,
    C1,
    E,
}

// ---------------------------------------------------------------------------
// Error plumbing and exit codes.
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    /// Exit 2: structurally invalid request (clap reports its own parse
    /// errors with the same code).
    Usage(String),
    /// Exit 3: parameters outside the existence region, with the failed
    /// inequality as the reason.
    Inadmissible(String),
    /// Exit 4: a numerical gate failed (quadrature non-convergence,
    /// residual or drift above threshold, figures mismatch).
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Inadmissible(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Inadmissible(m) | CliError::Numerical(m) => m,
        }
    }
}

fn model_err(e: ModelError) -> CliError {
    match e {
        ModelError::Root(r) => CliError::Numerical(r.to_string()),
        other => CliError::Inadmissible(other.to_string()),
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            // Out-of-range sample counts or tail cutoffs are bad requests,
            // not numerical failures.
            QuadError::BadParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<ConservedError> for CliError {
    fn from(e: ConservedError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<ClosedFormError> for CliError {
    fn from(e: ClosedFormError) -> Self {
        match e {
            ClosedFormError::BadParameter { .. } => CliError::Inadmissible(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { model, wave } => cmd_classify(&model, &wave),
        Command::Profile { model, wave, samples, g_floor, out } => {
            cmd_profile(&model, &wave, samples, g_floor, &out)
        }
        Command::Conserved { model, wave } => cmd_conserved(&model, &wave),
        Command::Verify { model, wave, jets, seed } => cmd_verify(&model, &wave, jets, seed),
        Command::Sweep { model, wave, over, from, to, points, out } => {
            cmd_sweep(&model, &wave, over, from, to, points, &out)
        }
        Command::Figures { samples, out_dir } => cmd_figures(samples, &out_dir),
    }
}

// ---------------------------------------------------------------------------
// Wave resolution shared by the commands.
// ---------------------------------------------------------------------------

/// Maps the flag combination to a classification entry point and returns
/// the level data plus the classified wave (possibly `NoWave` with a
/// reason).
fn resolve_wave(k: f64, wave: &WaveArgs) -> Result<(DimensionlessWave, WaveClass), CliError> {
    let levels = |c1: f64, e: f64, wc: WaveClass| {
        Ok((DimensionlessWave::new(k, c1, e).map_err(model_err)?, wc))
    };
    match (wave.c1, wave.e, wave.g0, wave.g1, wave.cusped) {
        (Some(c1), Some(e), None, None, false) => {
            let wc = classify::classify_levels(k, c1, e).map_err(model_err)?;
            levels(c1, e, wc)
        }
        (None, None, Some(g0), Some(g1), false) => {
            let (wc, c1, e) = classify::periodic_from_roots(k, g0, g1).map_err(model_err)?;
            levels(c1, e, wc)
        }
        (None, None, Some(g0), None, false) => {
            let (wc, c1, e, _) = classify::solitary_from_asymptote(k, g0).map_err(model_err)?;
            levels(c1, e, wc)
        }
        (None, None, Some(g0), None, true) => {
            let (wc, c1, e) =
                classify::cusped_solitary_from_amplitude(k, g0).map_err(model_err)?;
            levels(c1, e, wc)
        }
        (None, Some(e), Some(g0), None, _) => {
            let (wc, c1, _aux) =
                classify::cusped_periodic_admissible(k, g0, e).map_err(model_err)?;
            levels(c1, e, wc)
        }
        (None, None, None, Some(g1), false) => {
            let (wc, c1) = classify::nodal_admissible(k, g1).map_err(model_err)?;
            levels(c1, 0.0, wc)
        }
        (Some(c1), None, None, Some(g1), false) => {
            // Peak on a C1 level: the energy is pinned by E = V(g1).
            let e = g1.powf(k + 1.0) - g1 * g1 - c1 * g1;
            let wc = classify::classify_levels(k, c1, e).map_err(model_err)?;
            levels(c1, e, wc)
        }
        _ => Err(CliError::Usage(
            "exactly one wave parameterization is required: --c1 --e | --g0 --g1 | \
             --g0 [--cusped] | --g0 --e (cusped periodic) | --g1 | --c1 --g1 (peak on a level)"
                .into(),
        )),
    }
}

fn no_wave_guard(wc: &WaveClass) -> Result<(), CliError> {
    if wc.kind == WaveKind::NoWave {
        return Err(CliError::Inadmissible(
            wc.reason
                .clone()
                .unwrap_or_else(|| "no wave exists for these parameters".into()),
        ));
    }
    Ok(())
}

fn build_profile(
    w: &DimensionlessWave,
    wc: &WaveClass,
    samples: usize,
    g_floor: f64,
) -> Result<Profile, CliError> {
    if wc.is_periodic() {
        Ok(quad::build_periodic_profile(w, wc, samples)?)
    } else {
        Ok(quad::build_solitary_profile(w, wc, g_floor, samples)?)
    }
}

// ---------------------------------------------------------------------------
// Output helpers.
// ---------------------------------------------------------------------------

/// 17-significant-digit scientific notation: enough digits to identify
/// every double uniquely, so re-parsing is bit-identical.
fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = String>,
{
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

fn node_str(n: NodeBehaviour) -> &'static str {
    match n {
        NodeBehaviour::None => "none",
        NodeBehaviour::Cusp => "cusp",
        NodeBehaviour::Corner => "corner",
        NodeBehaviour::SmoothMin => "smooth_min",
    }
}

// ---------------------------------------------------------------------------
// classify / conserved / profile.
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ClassifyReport<'a> {
    schema: &'static str,
    command: &'static str,
    k: f64,
    c1: f64,
    e: f64,
    g_star: f64,
    class: &'a WaveClass,
}

fn cmd_classify(model: &ModelArgs, wave: &WaveArgs) -> Result<(), CliError> {
    model.params()?;
    let (w, wc) = resolve_wave(model.k, wave)?;
    print_json(&ClassifyReport {
        schema: SCHEMA,
        command: "classify",
        k: w.k,
        c1: w.c1,
        e: w.e,
        g_star: model::g_star(w.k),
        class: &wc,
    });
    no_wave_guard(&wc)
}

#[derive(Serialize)]
struct ConservedReport {
    schema: &'static str,
    command: &'static str,
    k: f64,
    c1: f64,
    e: f64,
    kind: WaveKind,
    conserved: ConservedSet,
    signed_momentum: f64,
    signed_energy: f64,
}

fn cmd_conserved(model: &ModelArgs, wave: &WaveArgs) -> Result<(), CliError> {
    let p = model.params()?;
    let (w, wc) = resolve_wave(model.k, wave)?;
    no_wave_guard(&wc)?;
    let set = if wc.is_solitary() {
        conserved::conserved_solitary(&w, &wc, &p)?
    } else {
        conserved::conserved_periodic(&w, &wc, &p)?
    };
    let (signed_momentum, signed_energy) = set.signed();
    print_json(&ConservedReport {
        schema: SCHEMA,
        command: "conserved",
        k: w.k,
        c1: w.c1,
        e: w.e,
        kind: wc.kind,
        conserved: set,
        signed_momentum,
        signed_energy,
    });
    Ok(())
}

#[derive(Serialize)]
struct ProfileSidecar<'a> {
    schema: &'static str,
    command: &'static str,
    k: f64,
    c1: f64,
    e: f64,
    class: &'a WaveClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    wavelength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    physical_wavelength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<quad::Tail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation_xi: Option<f64>,
    samples: usize,
    drift_momentum_flux: f64,
    drift_energy_flux: f64,
    csv: String,
}

fn cmd_profile(
    model: &ModelArgs,
    wave: &WaveArgs,
    samples: usize,
    g_floor: f64,
    out: &Path,
) -> Result<(), CliError> {
    let p = model.params()?;
    let sidecar_path = out.with_extension("json");
    if sidecar_path == out {
        return Err(CliError::Usage(
            "profile output path must not end in .json: the sidecar would overwrite it".into(),
        ));
    }
    let (w, wc) = resolve_wave(model.k, wave)?;
    no_wave_guard(&wc)?;
    let profile = build_profile(&w, &wc, samples, g_floor)?;

    // Every emitted profile must satisfy the two first integrals of the
    // reduced equation to the drift gate.
    let (d1, d2) = conslaw::first_integrals_along(&profile, &w);
    if !(d1 <= DRIFT_GATE && d2 <= DRIFT_GATE) {
        return Err(CliError::Numerical(format!(
            "first-integral drift ({d1:.3e}, {d2:.3e}) exceeds the {DRIFT_GATE:.0e} gate"
        )));
    }

    write_csv(
        out,
        "xi,g,gprime",
        profile
            .samples
            .iter()
            .map(|s| format!("{},{},{}", fmt_f(s.xi), fmt_f(s.g), fmt_f(s.gprime))),
    )?;
    let sidecar = ProfileSidecar {
        schema: SCHEMA,
        command: "profile",
        k: w.k,
        c1: w.c1,
        e: w.e,
        class: &wc,
        wavelength: profile.wavelength,
        physical_wavelength: profile.wavelength.map(|l| p.physical_wavelength(l)),
        tail: profile.tail,
        truncation_xi: profile.truncation_xi,
        samples: profile.samples.len(),
        drift_momentum_flux: d1,
        drift_energy_flux: d2,
        csv: out.display().to_string(),
    };
    fs::write(
        &sidecar_path,
        serde_json::to_string_pretty(&sidecar).expect("report serialization cannot fail"),
    )?;
    print_json(&sidecar);
    Ok(())
}

// ---------------------------------------------------------------------------
// verify.
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LawResidual {
    law: u8,
    max_rel_residual: f64,
}

#[derive(Serialize)]
struct ProfileDrift {
    label: &'static str,
    kind: WaveKind,
    drift_momentum_flux: f64,
    drift_energy_flux: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    schema: &'static str,
    command: &'static str,
    k: f64,
    radius: f64,
    c: f64,
    nu: f64,
    seed: u64,
    jets: usize,
    residual_gate: f64,
    fd_gate: f64,
    drift_gate: f64,
    laws: Vec<LawResidual>,
    dual_vs_fd_max_rel: f64,
    profiles: Vec<ProfileDrift>,
    pass: bool,
}

/// Fourth-order Taylor extension of a jet to a nearby point: the unique
/// polynomial field carrying exactly the ten stored derivatives (all
/// higher and mixed slots beyond them identically zero). Gives the
/// finite-difference route an exact synthetic field to differentiate.
fn taylor_jet(j: &JetPoint, dt: f64, dx: f64) -> JetPoint {
    JetPoint {
        u: j.u
            + j.u_t * dt
            + j.u_x * dx
            + 0.5 * j.u_tt * dt * dt
            + j.u_tx * dt * dx
            + 0.5 * j.u_xx * dx * dx
            + j.u_xxx * dx * dx * dx / 6.0
            + 0.5 * j.u_txx * dt * dx * dx
            + j.u_xxxx * dx * dx * dx * dx / 24.0
            + j.u_txxx * dt * dx * dx * dx / 6.0,
        u_t: j.u_t + j.u_tt * dt + j.u_tx * dx + 0.5 * j.u_txx * dx * dx
            + j.u_txxx * dx * dx * dx / 6.0,
        u_x: j.u_x
            + j.u_tx * dt
            + j.u_xx * dx
            + 0.5 * j.u_xxx * dx * dx
            + j.u_txx * dt * dx
            + j.u_xxxx * dx * dx * dx / 6.0
            + 0.5 * j.u_txxx * dt * dx * dx,
        u_xx: j.u_xx + j.u_xxx * dx + j.u_txx * dt + 0.5 * j.u_xxxx * dx * dx
            + j.u_txxx * dt * dx,
        u_xxx: j.u_xxx + j.u_xxxx * dx + j.u_txxx * dt,
        u_xxxx: j.u_xxxx,
        u_tt: j.u_tt,
        u_tx: j.u_tx + j.u_txx * dx + 0.5 * j.u_txxx * dx * dx,
        u_txx: j.u_txx + j.u_txxx * dx,
        u_txxx: j.u_txxx,
    }
}

/// Cross-checks the dual-number total derivatives against central finite
/// differences on the Taylor extension, returning the worst relative
/// deviation over a handful of random jets.
fn fd_self_check(rng: &mut ChaCha12Rng, p: &PhysicalParams) -> f64 {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..8 {
        let jet = conslaw::random_jet(rng);
        let t = conslaw::random_time(rng);
        for id in ConsLawId::ALL {
            let (dt_dual, dx_dual, _) =
                conslaw::characteristic_terms(id, &jet, p.k, p.c, p.radius, t);
            let tp = conslaw::eval_T(id, &taylor_jet(&jet, h, 0.0), p.k, p.c, p.radius, t + h);
            let tm = conslaw::eval_T(id, &taylor_jet(&jet, -h, 0.0), p.k, p.c, p.radius, t - h);
            let fd_t = (tp - tm) / (2.0 * h);
            let xp = conslaw::eval_X(id, &taylor_jet(&jet, 0.0, h), p.k, p.c, p.radius, t);
            let xm = conslaw::eval_X(id, &taylor_jet(&jet, 0.0, -h), p.k, p.c, p.radius, t);
            let fd_x = (xp - xm) / (2.0 * h);
            worst = worst
                .max((fd_t - dt_dual).abs() / dt_dual.abs().max(1.0))
                .max((fd_x - dx_dual).abs() / dx_dual.abs().max(1.0));
        }
    }
    worst
}

/// Representative waves of all five families at the given exponent, used
/// when `verify` is not pointed at a specific parameterization.
fn default_battery(k: f64) -> Result<Vec<(&'static str, DimensionlessWave, WaveClass)>, CliError> {
    let gs = model::g_star(k);
    let mut out = Vec::new();
    let (wc, c1, e, _) = classify::solitary_from_asymptote(k, 0.6 * gs).map_err(model_err)?;
    out.push(("solitary", DimensionlessWave::new(k, c1, e).map_err(model_err)?, wc));
    let (wc, c1, e) = classify::cusped_solitary_from_amplitude(k, 0.5 * gs).map_err(model_err)?;
    out.push(("cusped_solitary", DimensionlessWave::new(k, c1, e).map_err(model_err)?, wc));
    // Periodic: peak halfway between the inflection point and g = 1 on
    // the C1 = 0 level, admissible for every exponent.
    let g1 = 0.5 * (1.0 + gs);
    let e = g1.powf(k + 1.0) - g1 * g1;
    let wc = classify::classify_levels(k, 0.0, e).map_err(model_err)?;
    out.push(("periodic", DimensionlessWave::new(k, 0.0, e).map_err(model_err)?, wc));
    let (wc, c1, _) = classify::cusped_periodic_admissible(k, 1.2, 0.5).map_err(model_err)?;
    out.push(("cusped_periodic", DimensionlessWave::new(k, c1, 0.5).map_err(model_err)?, wc));
    let (wc, c1) = classify::nodal_admissible(k, 1.25).map_err(model_err)?;
    out.push(("nodal", DimensionlessWave::new(k, c1, 0.0).map_err(model_err)?, wc));
    for (label, _, wc) in &out {
        if wc.kind == WaveKind::NoWave {
            return Err(CliError::Numerical(format!(
                "internal: default {label} battery wave is inadmissible at k = {k}"
            )));
        }
    }
    Ok(out)
}

fn cmd_verify(model: &ModelArgs, wave: &WaveArgs, jets: usize, seed: u64) -> Result<(), CliError> {
    let p = model.params()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut law_max = [0.0f64; 4];
    for _ in 0..jets {
        let jet = conslaw::random_jet(&mut rng);
        let t = conslaw::random_time(&mut rng);
        for (slot, id) in ConsLawId::ALL.into_iter().enumerate() {
            let (dt_t, dx_x, rhs) = conslaw::characteristic_terms(id, &jet, p.k, p.c, p.radius, t);
            let scale = dt_t.abs().max(dx_x.abs()).max(rhs.abs()).max(1e-300);
            law_max[slot] = law_max[slot].max((dt_t + dx_x - rhs).abs() / scale);
        }
    }
    let fd_max = fd_self_check(&mut rng, &p);

    let battery = if wave.any() {
        let (w, wc) = resolve_wave(model.k, wave)?;
        no_wave_guard(&wc)?;
        vec![("requested", w, wc)]
    } else {
        default_battery(model.k)?
    };
    let mut profiles = Vec::new();
    for (label, w, wc) in &battery {
        let profile = build_profile(w, wc, 160, 1e-4)?;
        let (d1, d2) = conslaw::first_integrals_along(&profile, w);
        profiles.push(ProfileDrift {
            label,
            kind: wc.kind,
            drift_momentum_flux: d1,
            drift_energy_flux: d2,
        });
    }

    let pass = law_max.iter().all(|&r| r < RESIDUAL_GATE)
        && fd_max < FD_GATE
        && profiles
            .iter()
            .all(|d| d.drift_momentum_flux < DRIFT_GATE && d.drift_energy_flux < DRIFT_GATE);
    print_json(&VerifyReport {
        schema: SCHEMA,
        command: "verify",
        k: p.k,
        radius: p.radius,
        c: p.c,
        nu: p.wave_speed,
        seed,
        jets,
        residual_gate: RESIDUAL_GATE,
        fd_gate: FD_GATE,
        drift_gate: DRIFT_GATE,
        laws: ConsLawId::ALL
            .into_iter()
            .zip(law_max)
            .map(|(id, max_rel_residual)| LawResidual { law: id.index(), max_rel_residual })
            .collect(),
        dual_vs_fd_max_rel: fd_max,
        profiles,
        pass,
    });
    if !pass {
        return Err(CliError::Numerical(
            "verification gates failed (see report on stdout)".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep.
// ---------------------------------------------------------------------------

fn sweep_row(p: &PhysicalParams, value: f64, wave: &WaveArgs) -> Result<String, CliError> {
    let (w, wc) = resolve_wave(p.k, wave)?;
    let nan = f64::NAN;
    if wc.kind == WaveKind::NoWave {
        return Ok(format!(
            "{},NoWave,{},{},{},0,{},{},{},0,{},{},{}",
            fmt_f(value),
            node_str(wc.node_behaviour),
            fmt_f(nan),
            fmt_f(nan),
            fmt_f(w.c1),
            fmt_f(w.e),
            fmt_f(nan),
            fmt_f(nan),
            fmt_f(nan),
            fmt_f(nan),
        ));
    }
    let half_wavelength = if wc.is_periodic() {
        quad::half_period_integral(&w, &wc)?
    } else {
        nan
    };
    let set = if wc.is_solitary() {
        conserved::conserved_solitary(&w, &wc, p)?
    } else {
        conserved::conserved_periodic(&w, &wc, p)?
    };
    Ok(format!(
        "{},{:?},{},{},{},{},{},{},{},{},{},{}",
        fmt_f(value),
        wc.kind,
        node_str(wc.node_behaviour),
        fmt_f(wc.g0),
        fmt_f(wc.g1.unwrap_or(nan)),
        wc.m0,
        fmt_f(w.c1),
        fmt_f(w.e),
        fmt_f(half_wavelength),
        set.orientation,
        fmt_f(set.momentum),
        fmt_f(set.energy),
    ) + &format!(",{}", fmt_f(set.energy_momentum.unwrap_or(nan))))
}

fn cmd_sweep(
    model: &ModelArgs,
    wave: &WaveArgs,
    over: SweepField,
    from: f64,
    to: f64,
    points: usize,
    out: &Path,
) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let p = model.params()?;
    let rows: Vec<Result<String, CliError>> = (0..points)
        .into_par_iter()
        .map(|i| {
            let value = from + (to - from) * i as f64 / (points - 1) as f64;
            let mut wargs = *wave;
            match over {
                SweepField::G0 => wargs.g0 = Some(value),
                SweepField::G1 => wargs.g1 = Some(value),
                SweepField::C1 => wargs.c1 = Some(value),
                SweepField::E => wargs.e = Some(value),
            }
            sweep_row(&p, value, &wargs)
        })
        .collect();
    let mut lines = Vec::with_capacity(points);
    for row in rows {
        lines.push(row?);
    }
    write_csv(
        out,
        "value,kind,node_behaviour,g0,g1,m0,c1,e,half_wavelength,orientation,momentum,energy,energy_momentum",
        lines,
    )
}

// ---------------------------------------------------------------------------
// figures.
// ---------------------------------------------------------------------------

fn family_slug(f: Family) -> &'static str {
    match f {
        Family::SolitaryK2 => "solitary_k2",
        Family::SolitaryK3 => "solitary_k3",
        Family::CuspedSolitaryK2 => "cusped_solitary_k2",
        Family::CuspedSolitaryK3 => "cusped_solitary_k3",
        Family::PeriodicK2E0 => "periodic_k2_e0",
        Family::PeriodicK3C10 => "periodic_k3_c10",
        Family::CuspedPeriodicK3C10 => "cusped_periodic_k3_c10",
        Family::NodalK2 => "nodal_k2",
        Family::NodalAnyKC10 => "nodal_anyk_c10",
    }
}

/// Representative profile parameters per family, spanning each figure's
/// spread of amplitudes.
fn figure_parameters(f: Family) -> &'static [f64] {
    match f {
        Family::SolitaryK2 | Family::CuspedSolitaryK2 => &[0.05, 0.15, 0.25],
        Family::SolitaryK3 | Family::CuspedSolitaryK3 => &[0.1, 0.2, 0.35],
        Family::PeriodicK2E0 => &[0.6, 0.75, 0.9],
        Family::PeriodicK3C10 => &[0.75, 0.85, 0.95],
        Family::CuspedPeriodicK3C10 => &[1.1, 1.3, 1.6],
        Family::NodalK2 => &[1.0, 1.3, 1.8],
        Family::NodalAnyKC10 => &[1.5, 2.0, 3.0, 5.0],
    }
}

/// Parameter range of the momentum/energy curves per family.
fn curve_range(f: Family) -> (f64, f64) {
    match f {
        Family::SolitaryK2 | Family::CuspedSolitaryK2 => (0.02, 0.32),
        Family::SolitaryK3 | Family::CuspedSolitaryK3 => (0.02, 0.40),
        Family::PeriodicK2E0 => (0.52, 0.98),
        Family::PeriodicK3C10 => (0.72, 0.99),
        Family::CuspedPeriodicK3C10 => (1.02, 2.0),
        Family::NodalK2 => (1.0, 2.0),
        Family::NodalAnyKC10 => (1.25, 5.0),
    }
}

/// Builds the classified wave behind a closed-form family member, going
/// through the generic machinery so the figures data exercises the same
/// code path as any other request.
fn construct_family_wave(
    family: Family,
    parameter: f64,
) -> Result<(DimensionlessWave, WaveClass), CliError> {
    let p = parameter;
    let (k, wc, c1, e) = match family {
        Family::SolitaryK2 | Family::SolitaryK3 => {
            let k = if family == Family::SolitaryK2 { 2.0 } else { 3.0 };
            let (wc, c1, e, _) = classify::solitary_from_asymptote(k, p).map_err(model_err)?;
            (k, wc, c1, e)
        }
        Family::CuspedSolitaryK2 | Family::CuspedSolitaryK3 => {
            let k = if family == Family::CuspedSolitaryK2 { 2.0 } else { 3.0 };
            let (wc, c1, e) = classify::cusped_solitary_from_amplitude(k, p).map_err(model_err)?;
            (k, wc, c1, e)
        }
        Family::PeriodicK2E0 => {
            let c1 = p * p - p;
            let wc = classify::classify_levels(2.0, c1, 0.0).map_err(model_err)?;
            (2.0, wc, c1, 0.0)
        }
        Family::PeriodicK3C10 => {
            let e = p * p * p * p - p * p;
            let wc = classify::classify_levels(3.0, 0.0, e).map_err(model_err)?;
            (3.0, wc, 0.0, e)
        }
        Family::CuspedPeriodicK3C10 => {
            let e = p * p * p * p - p * p;
            let (wc, c1, _) = classify::cusped_periodic_admissible(3.0, p, e).map_err(model_err)?;
            (3.0, wc, c1, e)
        }
        Family::NodalK2 => {
            let (wc, c1) = classify::nodal_admissible(2.0, p).map_err(model_err)?;
            (2.0, wc, c1, 0.0)
        }
        Family::NodalAnyKC10 => {
            let (wc, c1) = classify::nodal_admissible(p, 1.0).map_err(model_err)?;
            (p, wc, c1, 0.0)
        }
    };
    no_wave_guard(&wc)?;
    Ok((DimensionlessWave::new(k, c1, e).map_err(model_err)?, wc))
}

/// Checks every profile row against the closed form and returns the worst
/// normalized deviation. Comparisons are made in the well-conditioned
/// direction: amplitudes for explicit families (with the tolerance opened
/// by the local slope, which diverges at cusps), phases for implicit
/// ones (opened by `dξ/dg·ulp` at the peak, where the phase map is
/// vertical).
fn check_profile_against_closed(
    profile: &Profile,
    sol: &ClosedFormSolution,
) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    match sol.form() {
        Form::ExplicitGOfXi => {
            for s in &profile.samples {
                let (gc, gpc) = sol.eval_with_slope(s.xi)?;
                let tol = FIGURE_GATE * (1.0 + gpc.abs());
                let dev = (s.g - gc).abs();
                if dev > tol {
                    return Err(CliError::Numerical(format!(
                        "figures: {:?} row at ξ = {} deviates from the closed form by {dev:.3e}",
                        sol.family(),
                        s.xi
                    )));
                }
                worst = worst.max(dev / (1.0 + gpc.abs()));
            }
        }
        Form::ImplicitXiOfG => {
            let (_, hi) = sol.g_range();
            for s in &profile.samples {
                // The classifier's peak root can land an ulp past the
                // closed-form peak; clamp into the relation's domain.
                let g = s.g.min(hi);
                let tau = sol.implicit_residual(0.0, g)?;
                let slope = sol.implicit_slope(g)?;
                // The conditioning term admits a root-solver amplitude off
                // by up to ~16 ulp, magnified by the local phase slope
                // (vertical at the peak).
                let tol = FIGURE_GATE * (1.0 + s.xi.abs())
                    + 32.0 * slope.abs() * f64::EPSILON * g.max(sol.parameter());
                let dev = (tau - s.xi).abs();
                if dev > tol {
                    return Err(CliError::Numerical(format!(
                        "figures: {:?} row at g = {g} deviates from the closed form by {dev:.3e}",
                        sol.family()
                    )));
                }
                worst = worst.max(dev / (1.0 + s.xi.abs()));
            }
        }
    }
    Ok(worst)
}

#[derive(Serialize)]
struct FigureProfileEntry {
    file: String,
    family: Family,
    parameter: f64,
    k: f64,
    kind: WaveKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    wavelength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation_xi: Option<f64>,
    samples: usize,
    max_closed_form_deviation: f64,
}

#[derive(Serialize)]
struct FigureCurveEntry {
    file: String,
    family: Family,
    parameter_range: [f64; 2],
    points: usize,
}

#[derive(Serialize)]
struct FiguresManifest {
    schema: &'static str,
    command: &'static str,
    note: &'static str,
    profiles: Vec<FigureProfileEntry>,
    curves: Vec<FigureCurveEntry>,
}

fn cmd_figures(samples: usize, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    let mut profiles = Vec::new();
    for family in Family::ALL {
        for (i, &parameter) in figure_parameters(family).iter().enumerate() {
            let sol = ClosedFormSolution::new(family, parameter)?;
            let (w, wc) = construct_family_wave(family, parameter)?;
            let profile = build_profile(&w, &wc, samples, 1e-4)?;
            let max_dev = check_profile_against_closed(&profile, &sol)?;
            let file = format!("{}_{}.csv", family_slug(family), i);
            write_csv(
                &out_dir.join(&file),
                "xi,g,gprime",
                profile
                    .samples
                    .iter()
                    .map(|s| format!("{},{},{}", fmt_f(s.xi), fmt_f(s.g), fmt_f(s.gprime))),
            )?;
            profiles.push(FigureProfileEntry {
                file,
                family,
                parameter,
                k: w.k,
                kind: wc.kind,
                wavelength: profile.wavelength,
                truncation_xi: profile.truncation_xi,
                samples: profile.samples.len(),
                max_closed_form_deviation: max_dev,
            });
        }
    }

    let mut curves = Vec::new();
    const CURVE_POINTS: usize = 41;
    for family in Family::ALL {
        let (lo, hi) = curve_range(family);
        let mut rows = Vec::with_capacity(CURVE_POINTS);
        for i in 0..CURVE_POINTS {
            let v = lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64;
            let sol = ClosedFormSolution::new(family, v)?;
            let unit = PhysicalParams::new(sol.k(), 1.0, 1.0, 1.0).map_err(model_err)?;
            let set = closed::closed_conserved(&sol, &unit)?;
            rows.push(format!(
                "{},{},{},{},{}",
                fmt_f(v),
                set.orientation,
                fmt_f(set.momentum),
                fmt_f(set.energy),
                fmt_f(set.energy_momentum.unwrap_or(f64::NAN)),
            ));
        }
        let file = format!("{}_conserved.csv", family_slug(family));
        write_csv(
            &out_dir.join(&file),
            "parameter,orientation,momentum,energy,energy_momentum",
            rows,
        )?;
        curves.push(FigureCurveEntry {
            file,
            family,
            parameter_range: [lo, hi],
            points: CURVE_POINTS,
        });
    }

    let manifest = FiguresManifest {
        schema: SCHEMA,
        command: "figures",
        note: "dimensionless profiles; conserved curves at unit radius, sound speed, and wave speed",
        profiles,
        curves,
    };
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("report serialization cannot fail"),
    )?;
    print_json(&manifest);
    Ok(())
}
