//! Boolean functions as explicit truth tables, their exact Fourier spectra,
//! counted oracles, and brute-force distances to enumerable classes.

mod class;
mod oracle;
mod spec;
mod spectrum;
mod table;

pub use class::{opt_dist, opt_dist_under, EnumerableClass, ExplicitClass};
pub use oracle::{DistributionSpec, ExampleDistribution, MembershipOracle, RandomExampleOracle, UnlabeledSource};
pub use spec::{make_function, FunctionSpec};
pub use spectrum::{chi, fwht, walsh_hadamard, FourierSpectrum};
pub use table::{dist, dist_under, TruthTable};

use crate::error::{Error, Result};

/// Low `n` bits set.
#[inline]
pub fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Largest arity handled by the exact oracles.
pub const MAX_ARITY: usize = 24;

/// ceil(3/ε² · ln(2/δ)) samples give accuracy ε with confidence 1−δ.
pub fn q_cb(eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0,1], got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0,1), got {delta}")));
    }
    Ok(ceil_count(3.0 / (eps * eps) * (2.0 / delta).ln()))
}

/// Ceiling that ignores floating-point dust just above an integer.
pub(crate) fn ceil_count(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

/// Empirical mean of χ_γ(x)·f(x) over q_cb(ε, δ) random examples.
pub fn estimate_coeff(
    oracle: &mut RandomExampleOracle,
    gamma: u64,
    eps: f64,
    delta: f64,
) -> Result<f64> {
    let m = q_cb(eps, delta)?;
    let mut acc = 0i64;
    for _ in 0..m {
        let (x, y) = oracle.draw();
        acc += (chi(gamma, x) * y) as i64;
    }
    Ok(acc as f64 / m as f64)
}
