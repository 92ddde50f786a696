//! Heavy Fourier coefficients: fourth-moment coset estimators, the top-t
//! value finder, and the interactive protocol for top-t characters.

mod glstar;
mod l4;
mod protocol;

pub use glstar::{basis_size, gl_star, gl_star_with, pool_size, CosetEstimates, GlStarBudget, GlStarOutput};
pub use l4::{coset_fourth_sums, estimate_coset_max, estimate_l4_sum, exact_coset_sums};
pub use protocol::{is_eps_top, verify_top_characters, Protocol2, Protocol2Budget, Protocol2Outcome, Protocol2Transcript, TopSet};
