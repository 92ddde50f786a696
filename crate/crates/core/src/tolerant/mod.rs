//! Distance estimation by binary search over a tolerant tester, and
//! PAC-verification from a distance estimator, instantiated for juntas.

mod estimator;
mod junta;
mod tester;
mod verifier;

pub use estimator::{binary_search, distance_estimate, search_steps, DistanceEstimate, EstimatorConfig, SearchStep};
pub use junta::{JuntaClass, DEFAULT_CLASS_BUDGET};
pub use tester::{tolerant_test, StubTester, TesterQueries, ToleranceWindow};
pub use verifier::{
    verify_junta_random_examples, verify_via_estimator, EstimatorOutcome, EstimatorTranscript, EstimatorVerifier,
    EstimatorVerifierBudget,
};
