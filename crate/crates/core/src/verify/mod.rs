//! Numerical checks of the one-way-to-hiding lemma, the finding-probability
//! bound and the opacity of shadow oracles.

mod bfp;
mod o2h;
mod query;
mod shadow;

pub use bfp::{check_bfp, BfpReport, QueryFamily};
pub use o2h::{check_o2h_single, estimate_o2h_expectation, Distinguisher, O2hReport, O2hSample};
pub use query::{enlarge_hidden_sets, query_layout, random_query_fixture, QueryFixture, QueryLayout};
pub use shadow::{shadow_indistinguishability_experiment, ShadowReport, ShadowRow};

/// Statistical allowance, in standard errors.
pub const SIGMA_ALLOWANCE: f64 = 3.0;

/// Sample mean and its standard error.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
