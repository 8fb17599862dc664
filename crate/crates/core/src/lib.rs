//! # ils-core
//!
//! Construction and analysis of the 3D-ILS hyperchaotic map — an
//! instantiation of the 3D-CCC rule that cascades, crosses, and couples
//! the ICMIC, Logistic, and Sine maps without modulo-1 wrapping — plus a
//! one-round color-image cipher driven by it and a statistical security
//! evaluation suite.
//!
//! The crate is organized around four subsystems:
//!
//! - [`chaos`]: safeguarded primitive maps, the generic coupling
//!   combinator, the concrete 3D-ILS step, and orbit generation.
//! - [`dynamics`]: analytic and finite-difference Jacobians, Lyapunov
//!   spectra by QR iteration and per-step singular values, and
//!   bifurcation/sensitivity/phase scans with CSV/JSON export.
//! - [`cipher`]: plaintext-keyed key derivation (SHA-256), cross-channel
//!   nibble mixing, and the permutation/XOR-feedback diffusion passes.
//! - [`metrics`]: entropy, adjacent-pixel correlation, NPCR/UACI,
//!   histograms, and the one-pixel differential test protocol.

pub mod chaos;
pub mod cipher;
pub mod dynamics;
pub mod metrics;

pub use chaos::{
    ccc_step, den, generate_orbit, ils_step, map_f, map_g, map_h, sat, ChaosError, Guards, Orbit,
    SystemParams, SystemState, DEFAULT_TRANSIENT,
};
pub use cipher::{
    bit_mix, bit_unmix, decrypt, derive_keys, encrypt, make_keystream, CipherError, ImageBuffer,
    KeyMaterial, KeystreamBundle,
};
pub use dynamics::{
    bifurcation_scan, finite_time_exponents, jacobian_analytic, jacobian_fd, lyapunov_qr,
    phase_samples, sensitivity_pair, BifurcationScan, DynamicsError, Jacobian3, JacobianSource,
    LyapunovSpectrum, SensitivityTrace, SpectrumReport, SweptParameter,
};
pub use metrics::{
    adjacent_correlation, adjacent_correlation_full, diff_image, differential_test,
    enumerate_adjacent_pairs, histogram, npcr, sample_adjacent_pairs, shannon_entropy, uaci,
    CorrelationSample, Direction, MetricsError, MetricsReport,
};
