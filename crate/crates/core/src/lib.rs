//! Freeman-Tukey double arcsine transform for proportions.
//!
//! * [`transform`]: the forward transform, its closed-form inverse with
//!   range clamping, the simple arcsine limit, and the maximum percent
//!   error of that limit together with the sample size it implies.
//! * [`oracle`]: bisection and grid-scan references that check the
//!   closed forms using only the forward map.
//! * [`pooling`]: CSV ingestion and pooling of studies on the θ scale.
//! * [`cli`]: the `ftmeta` command-line front end.

pub mod cli;
pub mod error;
pub mod oracle;
pub mod pooling;
pub mod transform;
pub mod types;

pub use error::{Error, Result};
pub use oracle::{bisect_inverse, mpe_grid_scan, GridScanResult};
pub use pooling::{back_transform, parse_studies, pool, PoolMethod, PooledResult, StudySet};
pub use transform::{
    asin_sqrt_limit, ft_inverse_clamped, ft_inverse_raw, ft_transform, ft_transform_counts,
    harmonic_n, limit_inverse, mpe, mpe_pointwise, sample_size_for_mpe, theta_domain, SampleSize,
};
pub use types::{AccuracyLevel, DomainInterval, EffectiveSampleSize, StudyRecord, Theta};
