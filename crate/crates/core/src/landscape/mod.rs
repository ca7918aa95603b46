//! Gaussian population landscape of the robust objective.
//!
//! For `a ~ N(0, I)` the population objective
//! `f_P(x) = E|⟨a, x⟩² − ⟨a, x̄⟩²|` depends on `x` only through the two
//! nonzero eigenvalues of `X = xxᵀ − x̄x̄ᵀ`: `f_P(x) = ζ(λ₁(X), λ_d(X))` with
//! `ζ(y₁, y₂) = E|v₁y₁ + v₂y₂|`, `v₁, v₂ ~ χ²₁` i.i.d. Its stationary points
//! are `0`, `±x̄` and the ring `{x ⟂ x̄ : ‖x‖ = c‖x̄‖}` where `c ≈ 0.4416`
//! solves `π/4 = c/(1 + c²) + arctan c`.

mod audit;
mod certify;
mod grid;
mod monte_carlo;
mod outer;
mod population;
mod spectrum;

pub use audit::{graph_closeness_audit, graph_closeness_audit_with, AuditConfig, AuditEntry};
pub use certify::{certify_stationary, certify_stationary_with, LandscapeCertificate, Verdict, DEFAULT_VERDICT_THRESHOLD};
pub use grid::{grid_local_minima, population_grid, GridCell};
pub use monte_carlo::{mc_corrupted_population_value, mc_population_value, mc_spectral_value, MonteCarloEstimate};
pub use outer::{critical_ratio, omega, ratio_band, zeta, zeta_grad};
pub use population::{
    population_gradient, population_value, stationary_set_distance, PopulationGradient,
};
pub use spectrum::{rank_two_spectrum, RankTwoSpectrum, COLLINEAR_TOL};
