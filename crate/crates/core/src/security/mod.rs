//! Gaussian-state security calculus: entropies, Holevo bounds, key rates and distance windows.

mod gaussian;
mod holevo;
mod report;
mod window;

pub use gaussian::{
    beam_splitter, condition_on_heterodyne, covariance_from_link, entropy_of, g_entropy, symplectic_eigenvalues,
    symplectic_form, TwoModeCovariance, CLAMP_WINDOW,
};
pub use holevo::{fold_untrusted, holevo_bound};
pub use report::{asymptotic_skr, skr_report, SecurityReport, CSV_HEADER};
pub use window::{find_distance_window, DistanceWindow, WindowSearch};
