//! Central tolerance table. Tests and production code read the same
//! constants so a threshold can never drift between the two.

/// Entrywise tolerance for structural identities: hermiticity, unit trace,
/// layout equality.
pub const STRUCTURAL: f64 = 1e-12;

/// Tolerance for spectral statements: PSD slack on eigenvalues, eigenvalue
/// sums against the trace.
pub const SPECTRAL: f64 = 1e-10;

/// Off-diagonal Frobenius norm at which the Jacobi eigensolver stops.
pub const JACOBI_OFF_DIAG: f64 = 1e-12;

/// Slack admitted on the Stokes unit ball so raw experimental estimates
/// sitting right on the boundary still validate.
pub const STOKES_BALL_SLACK: f64 = 1e-9;

/// Floor applied to Born probabilities inside log-likelihoods; keeps the
/// objective finite at pure-state boundaries.
pub const PROB_FLOOR: f64 = 1e-12;

/// Floor on the variance proxy in the least-squares objective.
pub const LS_VAR_FLOOR: f64 = 1e-9;

/// Default width of the seed-instability window. A form's closed-form seed
/// is abandoned for the arbitrary fallback start once its denominator drops
/// below this.
pub const DEFAULT_EPSILON_FALLBACK: f64 = 1e-3;

/// Default objective-spread threshold at which the simplex minimizer stops.
pub const DEFAULT_F_TOL: f64 = 1e-10;

/// Default iteration cap of the simplex minimizer, per parameter dimension.
pub const MAX_ITER_PER_PARAM: usize = 20_000;

/// Additive ridge floor used when regularizing a linear-inversion estimate
/// before triangular factorization.
pub const SEED_RIDGE_FLOOR: f64 = 1e-6;

/// Purity above which a state is treated as rank-1 when computing fidelity.
pub const PURITY_PURE: f64 = 1.0 - 1e-9;

/// Agreement required between a factorization-based seed and its target.
pub const MULTIQUBIT_SEED_ROUNDTRIP: f64 = 1e-8;
