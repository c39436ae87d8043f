//! Existence analysis: which travelling-wave family lives on a given level
//! set `(k, C₁, E)`.
//!
//! The reduced ODE `(g')² = g^{1-k}(E - V(g))` supports an orbit wherever
//! `E - V > 0`, so classification reduces to the intersection pattern of
//! the energy line `E` with the potential `V`:
//!
//! * two simple roots `0 < g₀ < g₁` bounding a well → smooth periodic wave;
//! * a double root `g₀` (at the local maximum of `V`) plus a simple upper
//!   root `g₁` → solitary wave with exponential tail;
//! * a single simple root `g₀` with `E > 0` met on a rising branch of `V`
//!   → cusped periodic wave oscillating over `[0, g₀]`;
//! * a double or triple root alone with `E > 0` → cusped solitary wave on
//!   `[0, g₀]` (triple degeneracy at `g₀ = g*` gives the power-law tail);
//! * `E = 0` with the only positive root `g₁ ≥ 1` → nodal periodic wave
//!   touching `g = 0`, with cusp/corner/smooth-minimum node behaviour set
//!   by `k` and by whether `C₁` vanishes.
//!
//! Besides the level-set classifier this module provides direct
//! constructors from the natural parameter of each family (root pair,
//! solitary asymptote, cusped-periodic amplitude, nodal amplitude), each
//! verifying the family's existence inequalities.

use serde::Serialize;

use crate::model::{self, DimensionlessWave, ModelError};
use crate::roots;

/// Roots of `E - V` with `|V'| < DOUBLE_SNAP · (1 + |V''|)` are treated as
/// degenerate (double); additionally `|V''| < TRIPLE_SNAP` upgrades the
/// degeneracy to triple. Near-degenerate inputs are snapped rather than
/// silently misclassified.
const DOUBLE_SNAP: f64 = 1e-8;
const TRIPLE_SNAP: f64 = 1e-8;

/// `|E - V(g_c)|` below this (relative) threshold counts the critical
/// point `g_c` as lying on the energy line. Tangency configurations are
/// produced by exact parameter construction, so the slack only needs to
/// absorb rounding in `V(g_c)`.
const LEVEL_SNAP: f64 = 1e-12;

/// `C₁` below this threshold counts as the critical nodal case `C₁ = 0`.
const C1_ZERO_SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WaveKind {
    SolitaryWave,
    CuspedSolitaryWave,
    PeriodicWave,
    CuspedPeriodicWave,
    NodalPeriodicWave,
    NoWave,
}

/// Behaviour of a nodal wave at its `g = 0` node, from the one-sided slope
/// `|g'(0⁺)|`: zero → smooth minimum, finite → corner, infinite → cusp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeBehaviour {
    None,
    Cusp,
    Corner,
    SmoothMin,
}

/// Result of classification: the family plus the root and degeneracy data
/// the profile builder needs.
#[derive(Clone, Debug, Serialize)]
pub struct WaveClass {
    pub kind: WaveKind,
    /// Lower root or solitary asymptote. For the cusped families this is
    /// the amplitude (upper end) of the `[0, g₀]` oscillation; for nodal
    /// waves it is the node itself, `0`.
    pub g0: f64,
    /// Upper root / peak; absent for the cusped solitary family, whose
    /// oscillation interval is `[0, g0]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    /// Multiplicity of the root that governs tail behaviour: 1 for finite
    /// turning points, 2 for exponential solitary tails, 3 for the
    /// power-law tail at `g₀ = g*`.
    pub m0: u8,
    pub node_behaviour: NodeBehaviour,
    /// Which existence inequality failed, for `NoWave` results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl WaveClass {
    fn no_wave(reason: impl Into<String>) -> Self {
        WaveClass {
            kind: WaveKind::NoWave,
            g0: 0.0,
            g1: None,
            m0: 1,
            node_behaviour: NodeBehaviour::None,
            reason: Some(reason.into()),
        }
    }

    /// Oscillation interval `[g_min, g_max]` of the wave.
    pub fn g_range(&self) -> (f64, f64) {
        match self.kind {
            WaveKind::PeriodicWave | WaveKind::SolitaryWave => (self.g0, self.g1.unwrap_or(self.g0)),
            WaveKind::CuspedPeriodicWave | WaveKind::CuspedSolitaryWave => (0.0, self.g0),
            WaveKind::NodalPeriodicWave => (0.0, self.g1.unwrap_or(0.0)),
            WaveKind::NoWave => (0.0, 0.0),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(
            self.kind,
            WaveKind::PeriodicWave | WaveKind::CuspedPeriodicWave | WaveKind::NodalPeriodicWave
        )
    }

    pub fn is_solitary(&self) -> bool {
        matches!(self.kind, WaveKind::SolitaryWave | WaveKind::CuspedSolitaryWave)
    }
}

/// Upper bracket bound for root searches: `V → +∞` dominates every level,
/// so doubling from this seed always finds a sign change.
fn g_big(k: f64, c1: f64, e: f64) -> f64 {
    2f64.max(2.0 * (1.0 + c1.abs() + e.abs()).powf(1.0 / (k - 1.0)))
}

/// A root of `E - V(g) = 0` on `g > 0` with its detected multiplicity.
#[derive(Clone, Copy, Debug)]
struct LevelRoot {
    g: f64,
    multiplicity: u8,
    /// Sign of `V'` at a simple root: negative means the energy line meets
    /// a falling branch of `V` (lower end of a well).
    dv: f64,
}

/// All roots of `V(g) = E` on `g > 0`, in increasing order, with
/// degeneracy detection at the critical points of `V`.
fn level_roots(w: &DimensionlessWave, cd: &model::CriticalData) -> Result<Vec<LevelRoot>, ModelError> {
    let f = |g: f64| w.energy_excess(g);
    let df = |g: f64| -w.potential_derivs(g).0;
    let mut out: Vec<LevelRoot> = Vec::new();

    // Critical points first: tangencies never produce a sign change, so
    // they must be detected by the level test |E - V(g_c)| ≈ 0.
    let mut degenerate: Vec<(f64, u8)> = Vec::new();
    for &(gc, _) in &cd.critical_points {
        let vc = w.potential(gc);
        if (w.e - vc).abs() <= LEVEL_SNAP * (1.0 + w.e.abs() + vc.abs()) {
            let (dv, ddv) = w.potential_derivs(gc);
            let (gc, mult) = if let Some(gi) = triple_at_inflection(w, gc) {
                (gi, 3)
            } else if dv.abs() < DOUBLE_SNAP * (1.0 + ddv.abs()) {
                (gc, if ddv.abs() < TRIPLE_SNAP { 3 } else { 2 })
            } else {
                (gc, 1)
            };
            degenerate.push((gc, mult));
        }
    }

    // Simple roots: scan the monotone segments of V delimited by its
    // critical points, from 0⁺ up to an upper bound where V dominates E
    // for good (V is increasing beyond its last critical point, so no
    // root can hide above such a bound).
    let mut hi = g_big(w.k, w.c1, w.e);
    while f(hi) >= 0.0 {
        hi *= 2.0;
    }
    let mut breaks = vec![0.0];
    breaks.extend(cd.critical_points.iter().map(|&(g, _)| g));
    breaks.push(hi);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        // Skip segments whose endpoint tangency already produced a root.
        let fa = f(a);
        let fb = f(b);
        // Exclusion zone around detected tangencies: rounding in E − V
        // displaces the sign change of a multiplicity-m root by
        // ~(ε·scale)^(1/m) — about 3e-6 for the triple — so the window
        // must sit well above that while staying far below the O(1)
        // spacing of distinct critical points. Simple roots this close to
        // a tangency only occur for wells already inside the snap regime.
        let near_tangency =
            |r: f64| degenerate.iter().any(|&(g, _)| (g - r).abs() <= 1e-4 * (1.0 + r));
        if fa == 0.0 && a > 0.0 && !near_tangency(a) {
            out.push(LevelRoot { g: a, multiplicity: 1, dv: w.potential_derivs(a).0 });
        }
        if fa.signum() * fb.signum() < 0.0 {
            let r = roots::solve(f, df, a, b, roots::X_TOL)?;
            if r > 0.0 && !near_tangency(r) {
                out.push(LevelRoot { g: r, multiplicity: 1, dv: w.potential_derivs(r).0 });
            }
        }
    }
    // Exactly at the triple-root level, rounding can push the
    // discriminant of V' past zero so the degenerate critical point never
    // reaches the candidate list; the scan then meets the level as an odd
    // sign change and labels it simple, with V'(r) reduced to a rounding
    // residue of arbitrary sign. Promote such roots by re-measuring the
    // degeneracy at the true critical structure instead of at the fuzzy
    // root location.
    for root in &mut out {
        if root.multiplicity > 1 {
            continue;
        }
        // Only when no tangency candidate exists at all; otherwise the
        // exclusion zone above already owns this neighbourhood.
        if degenerate.is_empty() {
            if let Some(gi) = triple_at_inflection(w, root.g) {
                root.g = gi;
                root.multiplicity = 3;
                root.dv = 0.0;
                continue;
            }
        }
        let (dv, ddv) = w.potential_derivs(root.g);
        if dv.abs() <= DOUBLE_SNAP * (1.0 + ddv.abs()) {
            root.multiplicity = if ddv.abs() < TRIPLE_SNAP { 3 } else { 2 };
            root.dv = 0.0;
        }
    }
    for &(g, m) in &degenerate {
        out.push(LevelRoot { g, multiplicity: m, dv: 0.0 });
    }
    out.sort_by(|a, b| a.g.partial_cmp(&b.g).unwrap());
    Ok(out)
}

/// Detects the triple-root configuration: the point under test lies
/// within root-finding fuzz of the inflection point of `V`, and the
/// inflection itself sits on the energy line with vanishing slope. The
/// direct `|V''|` test is unreliable here because a located root can be
/// displaced from the inflection by ~ε^(1/3), which inflates `V''` far
/// past any snap threshold; measuring at the inflection (known in closed
/// form) is exact. Returns the snapped root location.
fn triple_at_inflection(w: &DimensionlessWave, g: f64) -> Option<f64> {
    let gi = model::g_star(w.k);
    if (g - gi).abs() > 1e-4 * (1.0 + gi) {
        return None;
    }
    let (dvi, _) = w.potential_derivs(gi);
    let vi = w.potential(gi);
    if dvi.abs() <= DOUBLE_SNAP && (w.e - vi).abs() <= LEVEL_SNAP * (1.0 + w.e.abs() + vi.abs()) {
        Some(gi)
    } else {
        None
    }
}

/// Classifies the level set `(k, C₁, E)` into a wave family by the
/// energy-line intersection logic described in the module docs.
pub fn classify_levels(k: f64, c1: f64, e: f64) -> Result<WaveClass, ModelError> {
    let w = DimensionlessWave::new(k, c1, e)?;
    let cd = w.critical_data()?;
    let roots = level_roots(&w, &cd)?;

    // Smooth periodic: a simple-root pair bounding a well (V' < 0 at the
    // lower root, V' > 0 at the upper).
    for pair in roots.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if lo.multiplicity == 1 && hi.multiplicity == 1 && lo.dv < 0.0 && hi.dv > 0.0 {
            return Ok(WaveClass {
                kind: WaveKind::PeriodicWave,
                g0: lo.g,
                g1: Some(hi.g),
                m0: 1,
                node_behaviour: NodeBehaviour::None,
                reason: None,
            });
        }
    }

    // Solitary: double root at the potential maximum plus a simple upper
    // turning point.
    for pair in roots.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if lo.multiplicity == 2 && hi.multiplicity == 1 && hi.dv > 0.0 {
            return Ok(WaveClass {
                kind: WaveKind::SolitaryWave,
                g0: lo.g,
                g1: Some(hi.g),
                m0: 2,
                node_behaviour: NodeBehaviour::None,
                reason: None,
            });
        }
    }

    // Cusped periodic: the lowest root is simple on a rising branch with
    // E > 0, so the orbit oscillates over [0, g₀] with cusps at g = 0.
    if let Some(first) = roots.first() {
        if first.multiplicity == 1 && first.dv > 0.0 && e > 0.0 {
            return Ok(WaveClass {
                kind: WaveKind::CuspedPeriodicWave,
                g0: first.g,
                g1: None,
                m0: 1,
                node_behaviour: NodeBehaviour::Cusp,
                reason: None,
            });
        }
    }

    // Cusped solitary: a double or triple root alone with E > 0.
    if let [only] = roots.as_slice() {
        if only.multiplicity >= 2 && e > 0.0 {
            return Ok(WaveClass {
                kind: WaveKind::CuspedSolitaryWave,
                g0: only.g,
                g1: None,
                m0: only.multiplicity,
                node_behaviour: NodeBehaviour::Cusp,
                reason: None,
            });
        }
    }

    // Nodal periodic: E = 0 with the only positive root g₁ ≥ 1 met on a
    // rising branch (C₁ = g₁^k - g₁ ≥ 0).
    if e.abs() <= f64::MIN_POSITIVE.max(1e-15 * (1.0 + c1.abs())) {
        if let [only] = roots.as_slice() {
            if only.multiplicity == 1 && only.dv > 0.0 && only.g >= 1.0 - 1e-12 {
                return Ok(WaveClass {
                    kind: WaveKind::NodalPeriodicWave,
                    g0: 0.0,
                    g1: Some(only.g),
                    m0: 1,
                    node_behaviour: nodal_node_behaviour(k, c1),
                    reason: None,
                });
            }
        }
    }

    let reason = if roots.is_empty() {
        "energy line does not intersect the potential on g > 0".to_string()
    } else if roots.iter().all(|r| r.multiplicity >= 2) && e <= 0.0 {
        "only an equilibrium point (degenerate root with E <= 0)".to_string()
    } else {
        "no oscillation interval with positive energy excess".to_string()
    };
    Ok(WaveClass::no_wave(reason))
}

/// Node behaviour of a nodal wave from the one-sided slope laws: for the
/// critical node `C₁ = 0` the slope is 0 / 1 / ∞ as `k` is below / at /
/// above 3; for `C₁ > 0` it is 0 / √C₁ / ∞ as `k` is below / at / above 2.
fn nodal_node_behaviour(k: f64, c1: f64) -> NodeBehaviour {
    if c1.abs() <= C1_ZERO_SNAP {
        if k < 3.0 {
            NodeBehaviour::SmoothMin
        } else if k == 3.0 {
            NodeBehaviour::Corner
        } else {
            NodeBehaviour::Cusp
        }
    } else if k < 2.0 {
        NodeBehaviour::SmoothMin
    } else if k == 2.0 {
        NodeBehaviour::Corner
    } else {
        NodeBehaviour::Cusp
    }
}

/// Constructs the periodic wave with turning points `0 < g₀ < g₁`,
/// returning the level constants `C₁ = S_{k+1}(g₁,g₀) - (g₁+g₀)` and
/// `E = g₀g₁(1 - S_k(g₁,g₀))`, and verifying the existence inequalities.
pub fn periodic_from_roots(k: f64, g0: f64, g1: f64) -> Result<(WaveClass, f64, f64), ModelError> {
    if !(g0 > 0.0 && g1 > g0) {
        return Err(ModelError::NotPositive { name: "root ordering 0 < g0 < g1", value: g0.min(g1 - g0) });
    }
    if !(k > 1.0) {
        return Err(ModelError::BadExponent(k));
    }
    let c1 = model::s_n(k + 1.0, g1, g0) - (g1 + g0);
    let e = g0 * g1 * (1.0 - model::s_n(k, g1, g0));
    let gs = model::g_star(k);

    // Existence: the well between the roots must be genuine.
    let lhs = g1 * (model::s_n(k, g1, g0) - 1.0);
    let rhs = g0 * (k * g0.powf(k - 1.0) - 1.0);
    if !(lhs > rhs) {
        return Ok((
            WaveClass::no_wave(format!(
                "periodic existence inequality failed: g1(S_k(g1,g0) - 1) = {lhs} <= g0(k g0^(k-1) - 1) = {rhs}"
            )),
            c1,
            e,
        ));
    }
    if !(g1 > gs) {
        return Ok((
            WaveClass::no_wave(format!("upper root must exceed the inflection point: g1 = {g1} <= g* = {gs}")),
            c1,
            e,
        ));
    }
    Ok((
        WaveClass {
            kind: WaveKind::PeriodicWave,
            g0,
            g1: Some(g1),
            m0: 1,
            node_behaviour: NodeBehaviour::None,
            reason: None,
        },
        c1,
        e,
    ))
}

/// The solitary cofactor `A(g) = 1 - k·S_k(g,g₀) + g·∂S_k/∂g (g,g₀)`, so
/// that `E - V = (g - g₀)² A(g)` on the solitary level set of asymptote
/// `g₀`. Positive on `[g₀, g₁)`, with the simple zero `g₁` being the peak.
pub fn solitary_cofactor(k: f64, g0: f64, g: f64) -> f64 {
    1.0 - k * model::s_n(k, g, g0) + g * model::s_n_dg(k, g, g0)
}

/// `dA/dg` of [`solitary_cofactor`].
pub fn solitary_cofactor_d1(k: f64, g0: f64, g: f64) -> f64 {
    (1.0 - k) * model::s_n_dg(k, g, g0) + g * model::s_n_d2(k, g, g0)
}

/// `d²A/dg²` of [`solitary_cofactor`].
pub fn solitary_cofactor_d2(k: f64, g0: f64, g: f64) -> f64 {
    (2.0 - k) * model::s_n_d2(k, g, g0) + g * model::s_n_d3(k, g, g0)
}

/// Constructs the solitary wave with tail asymptote `g₀`, which exists iff
/// `0 < g₀ < g*`. Returns the level constants and the peak `g₁`, the
/// unique zero of the solitary cofactor above `g*`.
pub fn solitary_from_asymptote(k: f64, g0: f64) -> Result<(WaveClass, f64, f64, f64), ModelError> {
    if !(g0 > 0.0) {
        return Err(ModelError::NotPositive { name: "g0", value: g0 });
    }
    if !(k > 1.0) {
        return Err(ModelError::BadExponent(k));
    }
    let gs = model::g_star(k);
    let c1 = (k + 1.0) * g0.powf(k) - 2.0 * g0;
    let e = g0 * g0 * (1.0 - k * g0.powf(k - 1.0));
    if !(g0 < gs) {
        return Ok((
            WaveClass::no_wave(format!("solitary asymptote must satisfy 0 < g0 < g* = {gs}, got {g0}")),
            c1,
            e,
            f64::NAN,
        ));
    }

    // A(g*) > 0 (the orbit passes through the inflection) and A → -∞, so
    // the peak bracket starts at g* and doubles upward.
    let a = |g: f64| solitary_cofactor(k, g0, g);
    let da = |g: f64| solitary_cofactor_d1(k, g0, g);
    let hi = roots::expand_upper(a, gs, g_big(k, c1, e))?;
    let g1 = roots::solve(a, da, gs, hi, roots::X_TOL)?;

    Ok((
        WaveClass {
            kind: WaveKind::SolitaryWave,
            g0,
            g1: Some(g1),
            m0: 2,
            node_behaviour: NodeBehaviour::None,
            reason: None,
        },
        c1,
        e,
        g1,
    ))
}

/// Constructs the cusped solitary wave with double-root amplitude `g₀`,
/// which exists iff `0 < g₀ ≤ g*` (with the power-law tail exactly at
/// `g* = g₀`). Shares its level constants with the solitary family.
pub fn cusped_solitary_from_amplitude(k: f64, g0: f64) -> Result<(WaveClass, f64, f64), ModelError> {
    if !(g0 > 0.0) {
        return Err(ModelError::NotPositive { name: "g0", value: g0 });
    }
    if !(k > 1.0) {
        return Err(ModelError::BadExponent(k));
    }
    let gs = model::g_star(k);
    let c1 = (k + 1.0) * g0.powf(k) - 2.0 * g0;
    let e = g0 * g0 * (1.0 - k * g0.powf(k - 1.0));
    if g0 > gs * (1.0 + 1e-12) {
        return Ok((
            WaveClass::no_wave(format!("cusped solitary amplitude must satisfy 0 < g0 <= g* = {gs}, got {g0}")),
            c1,
            e,
        ));
    }
    let triple = (g0 - gs).abs() <= 1e-9 * gs;
    Ok((
        WaveClass {
            kind: WaveKind::CuspedSolitaryWave,
            g0: if triple { gs } else { g0 },
            g1: None,
            m0: if triple { 3 } else { 2 },
            node_behaviour: NodeBehaviour::Cusp,
            reason: None,
        },
        c1,
        e,
    ))
}

/// Admissibility of a cusped periodic wave of amplitude `g₀` at energy
/// level `E`, with `C₁ = g₀^k - g₀ - E/g₀`. The three branches of the
/// existence condition are: `g₀ ≥ 1` with `E > 0`; `g* < g₀ < 1` with `E`
/// at least the auxiliary minimum attained at `g₀_aux ∈ (0, g*]`; and
/// `0 < g₀ ≤ g*` with `E ≥ (1 - k g₀^{k-1}) g₀²`. Returns `g₀_aux` when
/// the middle branch applies.
pub fn cusped_periodic_admissible(
    k: f64,
    g0: f64,
    e: f64,
) -> Result<(WaveClass, f64, Option<f64>), ModelError> {
    if !(g0 > 0.0) {
        return Err(ModelError::NotPositive { name: "g0", value: g0 });
    }
    if !(k > 1.0) {
        return Err(ModelError::BadExponent(k));
    }
    let c1 = g0.powf(k) - g0 - e / g0;
    let gs = model::g_star(k);

    let admissible = |wave: WaveClass, aux: Option<f64>| Ok((wave, c1, aux));
    let wave = WaveClass {
        kind: WaveKind::CuspedPeriodicWave,
        g0,
        g1: None,
        m0: 1,
        node_behaviour: NodeBehaviour::Cusp,
        reason: None,
    };

    if g0 >= 1.0 {
        if e > 0.0 {
            return admissible(wave, None);
        }
        return Ok((
            WaveClass::no_wave(format!("branch (g0 >= 1) needs E > 0, got E = {e}")),
            c1,
            None,
        ));
    }
    if g0 > gs {
        // Auxiliary tangency point: ∂S_{k+1}/∂g (g, g₀) = 1 at g = g₀_aux
        // in (0, g*]; the minimum admissible E is the solitary level of
        // that auxiliary amplitude.
        let h = |x: f64| model::s_n_dg(k + 1.0, x, g0) - 1.0;
        let dh = |x: f64| model::s_n_d2(k + 1.0, x, g0);
        let lo = 1e-12 * gs;
        let g0_aux = roots::solve(h, dh, lo, gs, roots::X_TOL)?;
        let e_min = (1.0 - k * g0_aux.powf(k - 1.0)) * g0_aux * g0_aux;
        if e >= e_min {
            return admissible(wave, Some(g0_aux));
        }
        return Ok((
            WaveClass::no_wave(format!(
                "branch (g* < g0 < 1) needs E >= {e_min} (auxiliary amplitude {g0_aux}), got E = {e}"
            )),
            c1,
            Some(g0_aux),
        ));
    }
    let e_min = (1.0 - k * g0.powf(k - 1.0)) * g0 * g0;
    if e >= e_min {
        return admissible(wave, None);
    }
    Ok((
        WaveClass::no_wave(format!("branch (0 < g0 <= g*) needs E >= {e_min}, got E = {e}")),
        c1,
        None,
    ))
}

/// Admissibility of a nodal periodic wave of amplitude `g₁`: requires
/// `g₁ ≥ 1` so that `C₁ = g₁^k - g₁ ≥ 0`, with node behaviour from the
/// slope laws at the node.
pub fn nodal_admissible(k: f64, g1: f64) -> Result<(WaveClass, f64), ModelError> {
    if !(g1 > 0.0) {
        return Err(ModelError::NotPositive { name: "g1", value: g1 });
    }
    if !(k > 1.0) {
        return Err(ModelError::BadExponent(k));
    }
    let c1 = g1.powf(k) - g1;
    if g1 < 1.0 - 1e-12 {
        return Ok((
            WaveClass::no_wave(format!("nodal amplitude must satisfy g1 >= 1, got {g1}")),
            c1,
        ));
    }
    Ok((
        WaveClass {
            kind: WaveKind::NodalPeriodicWave,
            g0: 0.0,
            g1: Some(g1),
            m0: 1,
            node_behaviour: nodal_node_behaviour(k, c1),
            reason: None,
        },
        c1,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{c1_star, g_star};
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())), "{a} vs {b}");
    }

    #[test]
    fn solitary_reference_roots() {
        // k=2: g1 = 1 - 2 g0 exactly.
        let (wc, c1, e, g1) = solitary_from_asymptote(2.0, 0.1).unwrap();
        assert_eq!(wc.kind, WaveKind::SolitaryWave);
        assert_close(g1, 0.8, 1e-12);
        assert_close(c1, -0.17, 1e-14);
        assert_close(e, 0.008, 1e-14);
        assert_eq!(wc.m0, 2);

        // k=3: g1 = √(1 - 2g0²) - g0.
        let (_, c1, e, g1) = solitary_from_asymptote(3.0, 0.2).unwrap();
        assert_close(g1, (1.0f64 - 0.08).sqrt() - 0.2, 1e-12);
        assert_close(c1, -0.368, 1e-14);
        assert_close(e, 0.0352, 1e-14);

        // Non-integer k bracketed solve (oracle values).
        let (_, c1, e, g1) = solitary_from_asymptote(2.5, 0.15).unwrap();
        assert_close(c1, -0.26950025614861659, 1e-13);
        assert_close(e, 0.019232170301637492, 1e-13);
        assert_close(g1, 0.77710604246277407, 1e-12);
        let (_, _, _, g1) = solitary_from_asymptote(4.0, 0.1).unwrap();
        assert_close(g1, 0.92690808064282749, 1e-12);

        // Above g* the family is empty.
        let (wc, ..) = solitary_from_asymptote(2.0, 0.4).unwrap();
        assert_eq!(wc.kind, WaveKind::NoWave);
    }

    #[test]
    fn periodic_from_roots_reference() {
        // k=2 with g0 + g1 = 1 gives E = 0.
        let (wc, c1, e) = periodic_from_roots(2.0, 0.3, 0.7).unwrap();
        assert_eq!(wc.kind, WaveKind::PeriodicWave);
        assert!(e.abs() < 1e-15, "E = {e}");
        assert!(c1 < 0.0);

        // k=3 with g0² + g1² = 1 gives C₁ = 0.
        let (_, c1, _) = periodic_from_roots(3.0, 0.6, 0.8).unwrap();
        assert!(c1.abs() < 1e-15, "C1 = {c1}");

        // Non-integer exponent pair (oracle values).
        let (wc, c1, e) = periodic_from_roots(2.5, 0.3, 0.9).unwrap();
        assert_eq!(wc.kind, WaveKind::PeriodicWave);
        assert_close(c1, -0.071997307956358209, 1e-13);
        assert_close(e, -0.053612298560453052, 1e-13);

        // Violated existence inequality is reported, not an error.
        let (wc, ..) = periodic_from_roots(2.0, 0.05, 0.2).unwrap();
        assert_eq!(wc.kind, WaveKind::NoWave);
        assert!(wc.reason.unwrap().contains("existence inequality"));
    }

    #[test]
    fn classify_solitary_level() {
        // Level constants of the k=2, g0=0.1 solitary wave.
        let wc = classify_levels(2.0, -0.17, 0.008).unwrap();
        assert_eq!(wc.kind, WaveKind::SolitaryWave);
        assert_close(wc.g0, 0.1, 1e-9);
        assert_close(wc.g1.unwrap(), 0.8, 1e-9);
        assert_eq!(wc.m0, 2);
    }

    #[test]
    fn classify_periodic_level() {
        // k=3, C₁=0: energy lines between the well bottom -1/4 and 0 cut a
        // symmetric pair with g0² + g1² = 1.
        let wc = classify_levels(3.0, 0.0, -0.2).unwrap();
        assert_eq!(wc.kind, WaveKind::PeriodicWave);
        let (g0, g1) = (wc.g0, wc.g1.unwrap());
        assert_close(g0, 0.52573111211913361, 1e-12);
        assert_close(g1, 0.85065080835203993, 1e-12);
        assert_close(g0 * g0 + g1 * g1, 1.0, 1e-12);
    }

    #[test]
    fn classify_cusped_levels() {
        // Single simple root on a rising branch with E > 0.
        let wc = classify_levels(3.0, 0.0, 0.25).unwrap();
        assert_eq!(wc.kind, WaveKind::CuspedPeriodicWave);
        // Triple root at g* for C₁ = C₁*.
        let k = 2.0;
        let c1s = c1_star(k);
        let w = DimensionlessWave::new(k, c1s, 0.0).unwrap();
        let e = w.potential(g_star(k));
        let wc = classify_levels(k, c1s, e).unwrap();
        assert_eq!(wc.kind, WaveKind::CuspedSolitaryWave);
        assert_eq!(wc.m0, 3);
        assert_close(wc.g0, g_star(k), 1e-9);
    }

    #[test]
    fn classify_nodal_levels() {
        let wc = classify_levels(1.5, 0.5, 0.0).unwrap();
        assert_eq!(wc.kind, WaveKind::NodalPeriodicWave);
        assert_eq!(wc.node_behaviour, NodeBehaviour::SmoothMin);
        assert!(wc.g1.unwrap() > 1.0);

        let wc = classify_levels(2.0, 0.0, 0.0).unwrap();
        assert_eq!(wc.kind, WaveKind::NodalPeriodicWave);
        assert_eq!(wc.node_behaviour, NodeBehaviour::SmoothMin);
        assert_close(wc.g1.unwrap(), 1.0, 1e-9);
    }

    #[test]
    fn classify_no_wave() {
        // Monotone potential with E below V(0⁺): no intersection.
        let wc = classify_levels(2.0, -1.0, -10.0).unwrap();
        assert_eq!(wc.kind, WaveKind::NoWave);
        assert!(wc.reason.is_some());
    }

    #[test]
    fn cusped_periodic_branches() {
        // Branch one: amplitude above 1.
        let (wc, c1, aux) = cusped_periodic_admissible(2.0, 1.5, 0.1).unwrap();
        assert_eq!(wc.kind, WaveKind::CuspedPeriodicWave);
        assert!(aux.is_none());
        assert_close(c1, 2.25 - 1.5 - 0.1 / 1.5, 1e-14);

        // Branch two: auxiliary amplitude solves ∂S_{k+1}/∂g = 1; for k=2
        // that is (1 - g0)/2.
        let (_, _, aux) = cusped_periodic_admissible(2.0, 0.35, 0.5).unwrap();
        assert_close(aux.unwrap(), 0.325, 1e-12);
        let (_, _, aux) = cusped_periodic_admissible(2.0, 0.5, 0.5).unwrap();
        assert_close(aux.unwrap(), 0.25, 1e-12);
        let (_, _, aux) = cusped_periodic_admissible(3.0, 0.5, 0.5).unwrap();
        assert_close(aux.unwrap(), 0.36037961002806322, 1e-12);
        let (_, _, aux) = cusped_periodic_admissible(2.5, 0.6, 0.5).unwrap();
        assert_close(aux.unwrap(), 0.25412375746758712, 1e-12);

        // Branch-two minimum level (oracle): below it the family is empty.
        let e_min = 0.03696875;
        let (wc, ..) = cusped_periodic_admissible(2.0, 0.35, e_min * 1.0001).unwrap();
        assert_eq!(wc.kind, WaveKind::CuspedPeriodicWave);
        let (wc, ..) = cusped_periodic_admissible(2.0, 0.35, e_min * 0.9999).unwrap();
        assert_eq!(wc.kind, WaveKind::NoWave);

        // Branch three: just below the bound fails, at the bound passes.
        let k = 1.5;
        let g0: f64 = 0.2;
        let bound = (1.0 - k * g0.powf(k - 1.0)) * g0 * g0;
        let (wc, ..) = cusped_periodic_admissible(k, g0, 0.99 * bound).unwrap();
        assert_eq!(wc.kind, WaveKind::NoWave);
        let (wc, ..) = cusped_periodic_admissible(k, g0, bound).unwrap();
        assert_eq!(wc.kind, WaveKind::CuspedPeriodicWave);

        // Boundary case g0 = 1 admits any E > 0.
        let (wc, ..) = cusped_periodic_admissible(3.0, 1.0, 1e-9).unwrap();
        assert_eq!(wc.kind, WaveKind::CuspedPeriodicWave);
    }

    #[test]
    fn nodal_admissibility_and_node_behaviour() {
        let (wc, c1) = nodal_admissible(2.0, 1.0).unwrap();
        assert_eq!(wc.kind, WaveKind::NodalPeriodicWave);
        assert!(c1.abs() < 1e-15);
        assert_eq!(wc.node_behaviour, NodeBehaviour::SmoothMin);

        let (wc, c1) = nodal_admissible(3.0, 1.0).unwrap();
        assert!(c1.abs() < 1e-15);
        assert_eq!(wc.node_behaviour, NodeBehaviour::Corner);

        let (wc, c1) = nodal_admissible(4.0, 1.5).unwrap();
        assert_close(c1, 1.5f64.powi(4) - 1.5, 1e-14);
        assert_eq!(wc.node_behaviour, NodeBehaviour::Cusp);

        let (wc, _) = nodal_admissible(2.0, 0.9).unwrap();
        assert_eq!(wc.kind, WaveKind::NoWave);
    }

    #[test]
    fn solitary_cofactor_factorizes_energy_excess() {
        // E - V = (g - g0)² A(g) across the oscillation interval.
        for &(k, g0) in &[(2.0, 0.1), (3.0, 0.2), (2.5, 0.15), (4.0, 0.1)] {
            let (_, c1, e, g1) = solitary_from_asymptote(k, g0).unwrap();
            let w = DimensionlessWave::new(k, c1, e).unwrap();
            for i in 0..=100 {
                let g = g0 + (g1 - g0) * i as f64 / 100.0;
                let lhs = w.energy_excess(g);
                let rhs = (g - g0) * (g - g0) * solitary_cofactor(k, g0, g);
                assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs()), "k={k} g={g}");
            }
            // A(g0) has the closed evaluation 1 - k(k+1)/2 · g0^{k-1}.
            assert_close(
                solitary_cofactor(k, g0, g0),
                1.0 - 0.5 * k * (k + 1.0) * g0.powf(k - 1.0),
                1e-13,
            );
            // A > 0 strictly inside, zero at the peak.
            for i in 0..1000 {
                let g = g0 + (g1 - g0) * (i as f64 + 0.5) / 1001.0;
                assert!(solitary_cofactor(k, g0, g) > 0.0);
            }
            assert!(solitary_cofactor(k, g0, g1).abs() < 1e-10);
        }
    }

    #[test]
    fn tangency_continuity_towards_g_star() {
        // g1(g0) decreases continuously as g0 ↑ g*; no jumps bigger than
        // the local slope allows.
        let k = 2.7;
        let gs = g_star(k);
        let mut last: Option<(f64, f64)> = None;
        for i in 0..200 {
            let g0 = gs * (0.2 + 0.79 * i as f64 / 199.0);
            let (wc, _, _, g1) = solitary_from_asymptote(k, g0).unwrap();
            assert_eq!(wc.kind, WaveKind::SolitaryWave);
            if let Some((pg0, pg1)) = last {
                assert!(g1 < pg1, "g1 must decrease with g0");
                assert!((pg1 - g1) < 2.0 * (g0 - pg0) / (gs - pg0) * pg1 + 1e-3);
            }
            last = Some((g0, g1));
        }
    }

    proptest! {
        #[test]
        fn classify_round_trip_solitary(k in 1.2f64..4.5, t in 0.05f64..0.95) {
            let g0 = t * g_star(k);
            let (wc, c1, e, g1) = solitary_from_asymptote(k, g0).unwrap();
            prop_assert_eq!(wc.kind, WaveKind::SolitaryWave);
            let rt = classify_levels(k, c1, e).unwrap();
            prop_assert_eq!(rt.kind, WaveKind::SolitaryWave);
            prop_assert!((rt.g0 - g0).abs() <= 1e-10 * (1.0 + g0));
            prop_assert!((rt.g1.unwrap() - g1).abs() <= 1e-10 * (1.0 + g1));
        }

        #[test]
        fn classify_round_trip_periodic(k in 1.2f64..4.5, a in 0.05f64..0.9, b in 0.05f64..0.9) {
            let g0 = a.min(b);
            let g1 = (a.max(b) + 0.05).min(0.98);
            prop_assume!(g1 > g0 + 0.02);
            let (wc, c1, e) = periodic_from_roots(k, g0, g1).unwrap();
            prop_assume!(wc.kind == WaveKind::PeriodicWave);
            let rt = classify_levels(k, c1, e).unwrap();
            prop_assert_eq!(rt.kind, WaveKind::PeriodicWave);
            prop_assert!((rt.g0 - g0).abs() <= 1e-10 * (1.0 + g0));
            prop_assert!((rt.g1.unwrap() - g1).abs() <= 1e-10 * (1.0 + g1));
            // E - V > 0 strictly inside the well.
            let w = DimensionlessWave::new(k, c1, e).unwrap();
            for i in 0..1000 {
                let g = g0 + (g1 - g0) * (i as f64 + 0.5) / 1001.0;
                prop_assert!(w.energy_excess(g) > 0.0);
            }
            prop_assert!(w.energy_excess(g0).abs() <= 1e-10);
            prop_assert!(w.energy_excess(g1).abs() <= 1e-10);
        }

        #[test]
        fn classify_round_trip_nodal(k in 1.2f64..4.5, g1 in 1.0f64..2.0) {
            let (wc, c1) = nodal_admissible(k, g1).unwrap();
            prop_assert_eq!(wc.kind, WaveKind::NodalPeriodicWave);
            let rt = classify_levels(k, c1, 0.0).unwrap();
            prop_assert_eq!(rt.kind, WaveKind::NodalPeriodicWave);
            prop_assert!((rt.g1.unwrap() - g1).abs() <= 1e-9 * (1.0 + g1));
        }
    }
}
