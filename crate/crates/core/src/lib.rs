//! Data-driven model order reduction from response samples.
//!
//! The library builds data quadruplets (Loewner matrices from transfer
//! function samples, impulse-response matrices, discrete-time Hankel
//! matrices) and compresses them into reduced-order models: non-intrusive
//! balanced truncation draws its balancing factors from quadrature weights
//! or closed-form shift Gramians, and data-driven IRKA distills the same
//! quadruplets toward H2-optimal models without ever requesting new
//! samples. Intrusive baselines (exact Gramians, balanced truncation, IRKA)
//! are included for validation, together with synthetic benchmark
//! generators and file formats for every artifact.

pub mod bt;
pub mod dense;
pub mod error;
pub mod io;
pub mod irka;
pub mod pork;
pub mod quadrature;
pub mod quadruplet;
pub mod sampling;
pub mod system;

pub use bt::{balance_compress, dd_adi_bt, dd_pork_dtbt, gramian_monitor, quadbt, BtReport,
    CompressOptions, GramianMode};
pub use dense::ComplexMatrix;
pub use error::{Error, Result};
pub use irka::{default_init, irka_run, track_h2, IrkaConfig, IrkaReport, ProjectorStrategy};
pub use pork::{ipork_ct, ipork_dt, light_gramians, opork_ct, opork_dt, PorkResult, PorkSide};
pub use quadrature::{exp_trapezoid, gauss_legendre, gen_shifts, map_domain, MapTarget,
    QuadratureRule, RuleDomain, ShiftSet, ShiftSide, WeightConvention};
pub use quadruplet::{build_hankel_dt, build_impulse_ct, build_loewner, estimate_from_trajectories,
    realify, DataQuadruplet, InterpolationData, LoewnerStructure, QuadrupletKind};
pub use sampling::{acquire_impulse_samples_ct, acquire_samples, SampleKind, SampleSet,
    SampleSource};
pub use system::{butterworth_dt, diffusion_chain, generate_benchmark, h2_error, h2_norm,
    hinf_grid, hsv, intrusive_bt, intrusive_irka, random_stable, sigma_grid, BenchmarkSpec,
    Domain, PoleResidueForm, StateSpace};
