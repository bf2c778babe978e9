//! Tolerance constants shared across the crate.
//!
//! Every numerical threshold used by constructors and certifiers lives here.

/// Equality of two computed values that should agree analytically.
pub const EQUALITY: f64 = 1e-10;

/// Normalization slack for probability vectors after construction.
pub const NORMALIZATION: f64 = 1e-12;

/// Maximum row/column marginal gap accepted by [`crate::PairMeasure::new`].
pub const BALANCE: f64 = 1e-9;

/// Attainment residual and certification slack for the i.i.d. formulas.
pub const IID_CERTIFY: f64 = 1e-9;

/// Attainment residual and certification slack for the Markov rate formulas.
pub const MARKOV_CERTIFY: f64 = 1e-8;

/// Largest accepted |alpha|.
pub const ALPHA_CAP: f64 = 1e6;

/// Smallest accepted distance of alpha from 0 and from 1.
pub const ALPHA_GAP: f64 = 1e-12;

/// Relative spread of Collatz–Wielandt ratios at which a Perron vector is accepted.
pub const PERRON_SPREAD: f64 = 1e-13;

/// Relative tolerance under which two Perron roots count as tied.
pub const CLASS_TIE: f64 = 1e-12;

/// Upper bound on explicitly enumerated path-space sizes.
pub const PATH_SIZE_GUARD: u128 = 10_000_000;

/// Bundle of the tolerances a caller may override, e.g. from the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub equality: f64,
    pub normalization: f64,
    pub iid_certify: f64,
    pub markov_certify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: EQUALITY,
            normalization: NORMALIZATION,
            iid_certify: IID_CERTIFY,
            markov_certify: MARKOV_CERTIFY,
        }
    }
}
