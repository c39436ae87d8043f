//! Travelling-wave machinery for the strongly nonlinear Hertz-chain
//! continuum equation
//!
//! ```text
//! c⁻² u_tt = u_x^{k-1} u_xx + α u_x^{k-3} u_xx³ + β u_x^{k-2} u_xx u_xxx + γ u_x^{k-1} u_xxxx
//! ```
//!
//! with `α = (k-1)(k-2)R²/6`, `β = 2(k-1)R²/3`, `γ = R²/3`, modelling a
//! weakly compressed granular chain of radius-`R` particles with contact
//! exponent `k > 1` and positive strain `u_x > 0`.
//!
//! Every travelling wave `u = f(x - νt)` reduces, after scaling the strain
//! amplitude by `λ` and the wave variable by `ω`, to the planar ODE
//!
//! ```text
//! (g')² = G(g) = g^{1-k} (E - V(g)),    V(g) = g^{k+1} - g² - C₁ g,
//! ```
//!
//! whose orbits split into five families: smooth solitary waves, cusped
//! solitary waves, smooth periodic waves, cusped periodic waves, and nodal
//! periodic waves that touch `g = 0`. The crate provides
//!
//! * [`model`] — the dimensionless reduction: the stable divided-difference
//!   kernel `S_n`, the potential `V` and its derivatives, critical-point
//!   geometry, and the physical↔dimensionless scaling maps;
//! * [`classify`] — existence analysis mapping `(k, C₁, E)` or root data to
//!   a wave family with admissibility diagnostics;
//! * [`quad`] — adaptive Gauss–Kronrod quadrature with singular-endpoint
//!   substitutions, wavelength integrals, and sampled profile construction;
//! * [`closed`] — the elementary closed-form solutions available at `k = 2`
//!   and `k = 3` (plus the any-`k` critical nodal family), used as exact
//!   oracles for the numerics;
//! * [`conserved`] — wave-frame momentum and energy integrals, including
//!   the regularized solitary-wave set;
//! * [`conslaw`] — off-shell verification of the four conservation laws of
//!   the full PDE by exact forward-mode (dual-number) differentiation, and
//!   first-integral drift checks along emitted profiles;
//! * [`dual`] — the small forward-mode dual-number type used by
//!   [`conslaw`];
//! * [`roots`] — safeguarded bracketed Newton scalar root solving.

pub mod classify;
pub mod closed;
pub mod conserved;
pub mod conslaw;
pub mod dual;
pub mod model;
pub mod quad;
pub mod roots;

pub use classify::{NodeBehaviour, WaveClass, WaveKind};
pub use closed::{ClosedFormSolution, Family};
pub use conserved::ConservedSet;
pub use conslaw::{ConsLawId, JetPoint};
pub use model::{CriticalData, DimensionlessWave, PhysicalParams};
pub use quad::Profile;
