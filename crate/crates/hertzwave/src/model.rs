//! The dimensionless travelling-wave reduction.
//!
//! A travelling wave `u = f(x - νt)` of the Hertz-chain continuum equation
//! is governed, after scaling strain by `λ` and the wave variable by `ω`,
//! by the planar Hamiltonian-like system
//!
//! ```text
//! (g')² = G(g) = g^{1-k} (E - V(g)),    V(g) = g^{k+1} - g² - C₁ g,
//! ```
//!
//! where `g > 0` is the scaled strain, `C₁` is the wave-frame momentum-flux
//! constant and `E` the wave-frame energy level. This module holds that
//! reduction: the cancellation-safe divided-difference kernel
//! `S_n(a,b) = (aⁿ - bⁿ)/(a - b)` that every root factorization in the
//! crate is built from, the potential `V` and its derivatives, the
//! critical-point geometry of `V`, and the scaling maps between physical
//! and dimensionless variables.

use serde::Serialize;
use thiserror::Error;

use crate::roots;

/// Relative gap below which the `S_n` derivative kernels switch from the
/// backward recurrences (which cancel like ε/gap near coincident
/// arguments) to the exact integral representation, where a fixed
/// 15-point panel is accurate to rounding.
const S_DERIV_SWITCH: f64 = 0.5;

/// Relative tolerance used to snap `C₁` onto the inflection value `C₁*`
/// when deciding the critical-point case split.
const C1_STAR_SNAP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("nonlinearity exponent must satisfy k > 1, got {0}")]
    BadExponent(f64),
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("travelling-wave speed must be nonzero")]
    ZeroWaveSpeed,
    #[error("root solve failed: {0}")]
    Root(#[from] roots::RootError),
}

/// Physical parameters of the chain and the travelling wave.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhysicalParams {
    /// Contact nonlinearity exponent, `k > 1` (`k = 3/2` is the classical
    /// Hertz law).
    pub k: f64,
    /// Particle radius `R > 0`.
    pub radius: f64,
    /// Wave-speed scale `c > 0` of the continuum equation.
    pub c: f64,
    /// Travelling-wave speed `ν ≠ 0`; both signs are admissible.
    pub wave_speed: f64,
}

impl PhysicalParams {
    pub fn new(k: f64, radius: f64, c: f64, wave_speed: f64) -> Result<Self, ModelError> {
        if !(k > 1.0) {
            return Err(ModelError::BadExponent(k));
        }
        if !(radius > 0.0) {
            return Err(ModelError::NotPositive { name: "radius", value: radius });
        }
        if !(c > 0.0) {
            return Err(ModelError::NotPositive { name: "c", value: c });
        }
        if wave_speed == 0.0 || !wave_speed.is_finite() {
            return Err(ModelError::ZeroWaveSpeed);
        }
        Ok(Self { k, radius, c, wave_speed })
    }

    /// `σ = √(k(k+1)/2)`, the combination entering every conserved-quantity
    /// prefactor.
    pub fn sigma(&self) -> f64 {
        (0.5 * self.k * (self.k + 1.0)).sqrt()
    }

    /// Strain amplitude scale `λ = (½ (ν/c)² k(k+1))^{1/(k-1)}`.
    pub fn lambda(&self) -> f64 {
        let r = self.wave_speed / self.c;
        (0.5 * r * r * self.k * (self.k + 1.0)).powf(1.0 / (self.k - 1.0))
    }

    /// Wave-variable scale `ω = √(k(k+1)/6) · R`.
    pub fn omega(&self) -> f64 {
        (self.k * (self.k + 1.0) / 6.0).sqrt() * self.radius
    }

    /// Maps a physical strain amplitude to the dimensionless `g`.
    pub fn to_dimensionless(&self, strain_amplitude: f64) -> f64 {
        strain_amplitude / self.lambda()
    }

    /// Maps dimensionless `(g, ξ)` to the physical `(strain, x-shift)` pair
    /// `(λ g, ω ξ)`.
    pub fn to_physical(&self, g: f64, xi: f64) -> (f64, f64) {
        (self.lambda() * g, self.omega() * xi)
    }

    /// Physical wavelength of a dimensionless period `L`: `𝓛 = ω · L`.
    pub fn physical_wavelength(&self, period: f64) -> f64 {
        self.omega() * period
    }
}

/// A dimensionless travelling wave level set: the exponent `k` together
/// with the two first-integral constants of the reduced ODE.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DimensionlessWave {
    /// Nonlinearity exponent, `k > 1`.
    pub k: f64,
    /// Momentum-flux constant `C₁`.
    pub c1: f64,
    /// Energy level `E` (the second reduction constant).
    pub e: f64,
}

impl DimensionlessWave {
    pub fn new(k: f64, c1: f64, e: f64) -> Result<Self, ModelError> {
        if !(k > 1.0) {
            return Err(ModelError::BadExponent(k));
        }
        Ok(Self { k, c1, e })
    }

    /// The potential `V(g) = g^{1+k} - g(g + C₁)`.
    pub fn potential(&self, g: f64) -> f64 {
        g.powf(1.0 + self.k) - g * (g + self.c1)
    }

    /// `(V'(g), V''(g)) = ((1+k)g^k - 2g - C₁, k(1+k)g^{k-1} - 2)`.
    pub fn potential_derivs(&self, g: f64) -> (f64, f64) {
        let k = self.k;
        let v1 = (1.0 + k) * g.powf(k) - 2.0 * g - self.c1;
        let v2 = k * (1.0 + k) * g.powf(k - 1.0) - 2.0;
        (v1, v2)
    }

    /// `E - V(g)`, positive on the oscillation interval of the wave.
    pub fn energy_excess(&self, g: f64) -> f64 {
        self.e - self.potential(g)
    }

    /// The squared-slope function `G(g) = g^{1-k} (E - V(g))` of the
    /// reduced ODE `(g')² = G(g)`.
    pub fn slope_sq(&self, g: f64) -> f64 {
        g.powf(1.0 - self.k) * self.energy_excess(g)
    }

    /// `G'(g) = (1-k) g^{-k} (E - V) - g^{1-k} V'(g)`; along solutions
    /// `2 g'' = G'(g)`.
    pub fn slope_sq_prime(&self, g: f64) -> f64 {
        let k = self.k;
        let excess = self.energy_excess(g);
        let (v1, _) = self.potential_derivs(g);
        (1.0 - k) * g.powf(-k) * excess - g.powf(1.0 - k) * v1
    }

    /// Critical-point geometry of this wave's potential.
    pub fn critical_data(&self) -> Result<CriticalData, ModelError> {
        critical_data(self.k, self.c1)
    }
}

/// The inflection point `g* = (2/(k(k+1)))^{1/(k-1)}` of `V`, where the
/// convexity of the potential changes.
pub fn g_star(k: f64) -> f64 {
    (2.0 / (k * (k + 1.0))).powf(1.0 / (k - 1.0))
}

/// `C₁* = -(2(k-1)/k) g* < 0`, the value of `C₁` at which the two critical
/// points of `V` merge into an inflection.
pub fn c1_star(k: f64) -> f64 {
    -(2.0 * (k - 1.0) / k) * g_star(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    LocalMin,
    LocalMax,
    Inflection,
}

/// Critical points of the potential for a given `(k, C₁)`.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalData {
    pub g_star: f64,
    pub c1_star: f64,
    /// Ordered by location; empty when `C₁ < C₁*`.
    pub critical_points: Vec<(f64, CriticalKind)>,
}

/// Locates the critical points of `V` for the four-way `C₁` case split:
/// one local minimum right of `g*` for `C₁ ≥ 0`; a local maximum left of
/// `g*` plus a local minimum right of it for `C₁* < C₁ < 0`; a single
/// inflection at `g*` for `C₁ = C₁*`; none for `C₁ < C₁*`.
pub fn critical_data(k: f64, c1: f64) -> Result<CriticalData, ModelError> {
    if !(k > 1.0) {
        return Err(ModelError::BadExponent(k));
    }
    let gs = g_star(k);
    let c1s = c1_star(k);
    let w = DimensionlessWave { k, c1, e: 0.0 };
    let dv = |g: f64| w.potential_derivs(g).0;
    let ddv = |g: f64| w.potential_derivs(g).1;

    let mut pts = Vec::new();
    let snap = C1_STAR_SNAP * (1.0 + c1s.abs());
    if (c1 - c1s).abs() <= snap {
        pts.push((gs, CriticalKind::Inflection));
    } else if c1 > c1s {
        if c1 < 0.0 {
            // V'(0) = -C₁ > 0 and V'(g*) = C₁* - C₁ < 0: a maximum below g*.
            let g_max = roots::solve(dv, ddv, 0.0, gs, roots::X_TOL)?;
            pts.push((g_max, CriticalKind::LocalMax));
        }
        // V'(g*) = C₁* - C₁ < 0 and V' → +∞: a minimum above g*.
        let hi = roots::expand_upper(dv, gs, 2.0 * gs.max(1.0))?;
        let g_min = roots::solve(dv, ddv, gs, hi, roots::X_TOL)?;
        pts.push((g_min, CriticalKind::LocalMin));
    }
    Ok(CriticalData { g_star: gs, c1_star: c1s, critical_points: pts })
}

/// The divided-difference kernel `S_n(a, b) = (aⁿ - bⁿ)/(a - b)`, extended
/// continuously to `S_n(a, a) = n a^{n-1}`. Symmetric in `(a, b)`; requires
/// `n > 0` and `a, b ≥ 0` with at least one argument positive.
///
/// The numerator is evaluated as `lo^n·expm1(n·ln1p(Δ/lo))`, which carries
/// full relative precision down to coincident arguments — the direct
/// quotient would lose ~ε·a/(n·Δ) to cancellation and poison every
/// integrand built on top of it near a turning point.
pub fn s_n(n: f64, a: f64, b: f64) -> f64 {
    debug_assert!(n > 0.0 && a >= 0.0 && b >= 0.0 && (a > 0.0 || b > 0.0));
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == 0.0 {
        return hi.powf(n - 1.0);
    }
    let delta = hi - lo;
    if delta == 0.0 {
        return n * hi.powf(n - 1.0);
    }
    if delta <= lo {
        lo.powf(n) * (n * (delta / lo).ln_1p()).exp_m1() / delta
    } else {
        // Arguments separated by more than a factor of two: the direct
        // difference no longer cancels.
        (hi.powf(n) - lo.powf(n)) / delta
    }
}

// 15-point Kronrod panel (positive abscissae and weights on [-1, 1]),
// used to evaluate the derivative kernels' integral representation. For
// those integrands the rule is accurate to rounding whenever the
// arguments are within a factor of two of each other.
const SK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const SK_W: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// `∫₀¹ f(t) dt` by one 15-point panel. Exact to rounding for integrands
/// that are analytic with singularities well away from `[0, 1]`.
pub(crate) fn panel_unit<F: Fn(f64) -> f64>(f: F) -> f64 {
    let mut acc = 0.0;
    for i in 0..8 {
        let (dx, w) = (0.5 * SK_X[i], 0.5 * SK_W[i]);
        acc += w * f(0.5 + dx);
        if i < 7 {
            acc += w * f(0.5 - dx);
        }
    }
    acc
}

/// `∫₀¹ t^j (b + tΔ)^{n-1-j} dt` by one 15-point panel.
fn s_deriv_panel(n: f64, b: f64, delta: f64, j: i32) -> f64 {
    let p = n - 1.0 - j as f64;
    panel_unit(|t| t.powi(j) * (b + t * delta).powf(p))
}

/// `∂S_n/∂g` of `S_n(g, b)` with respect to the first argument. Separated
/// arguments use the recurrence `(g - b) S' = n g^{n-1} - S`; close
/// arguments use the exact representation
/// `S' = n(n-1)∫₀¹ t(b + tΔ)^{n-2} dt`, which never cancels.
pub fn s_n_dg(n: f64, g: f64, b: f64) -> f64 {
    let delta = g - b;
    if b > 0.0 && delta.abs() < S_DERIV_SWITCH * g.max(b) {
        n * (n - 1.0) * s_deriv_panel(n, b, delta, 1)
    } else {
        (n * g.powf(n - 1.0) - s_n(n, g, b)) / delta
    }
}

/// `∂²S_n/∂g²`: recurrence `(g - b) S'' = n(n-1) g^{n-2} - 2 S'` when
/// separated, `n(n-1)(n-2)∫₀¹ t²(b + tΔ)^{n-3} dt` when close.
pub fn s_n_d2(n: f64, g: f64, b: f64) -> f64 {
    let delta = g - b;
    if b > 0.0 && delta.abs() < S_DERIV_SWITCH * g.max(b) {
        n * (n - 1.0) * (n - 2.0) * s_deriv_panel(n, b, delta, 2)
    } else {
        (n * (n - 1.0) * g.powf(n - 2.0) - 2.0 * s_n_dg(n, g, b)) / delta
    }
}

/// `∂³S_n/∂g³`: recurrence `(g - b) S''' = n(n-1)(n-2) g^{n-3} - 3 S''`
/// when separated, `n(n-1)(n-2)(n-3)∫₀¹ t³(b + tΔ)^{n-4} dt` when close.
pub fn s_n_d3(n: f64, g: f64, b: f64) -> f64 {
    let delta = g - b;
    if b > 0.0 && delta.abs() < S_DERIV_SWITCH * g.max(b) {
        n * (n - 1.0) * (n - 2.0) * (n - 3.0) * s_deriv_panel(n, b, delta, 3)
    } else {
        (n * (n - 1.0) * (n - 2.0) * g.powf(n - 3.0) - 3.0 * s_n_d2(n, g, b)) / delta
    }
}
