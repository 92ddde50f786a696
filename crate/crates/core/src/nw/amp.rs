use crate::boolfn::{MembershipOracle, TruthTable, MAX_ARITY};
use crate::error::{Error, Result};
use std::sync::Arc;

/// Amp^f_k(x_1..x_k, y_1..y_k) = Σ f(x_i)·y_i mod 2, with f(x) read as a bit
/// (1 iff f(x) = −1). Inputs pack x_i into bits [i·n, (i+1)·n) and y_i
/// into bit nk + i.
#[derive(Debug, Clone)]
pub struct AmpFunction {
    pub base: Arc<TruthTable>,
    pub k: usize,
}

impl AmpFunction {
    pub fn new(base: Arc<TruthTable>, k: usize) -> Result<Self> {
        if k == 0 || base.n() * k + k > 64 {
            return Err(Error::InvalidParameter(format!("amplified arity {} out of range", base.n() * k + k)));
        }
        Ok(AmpFunction { base, k })
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn arity(&self) -> usize {
        self.n() * self.k + self.k
    }

    pub fn pack(&self, bits: &[bool]) -> Result<u64> {
        if bits.len() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: bits.len() });
        }
        Ok(bits.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i))
    }

    /// Splits a packed input into (x_1..x_k, y).
    pub fn split(&self, input: u64) -> (Vec<u64>, u64) {
        let n = self.n();
        let xs = (0..self.k).map(|i| (input >> (i * n)) & crate::boolfn::mask(n)).collect();
        (xs, (input >> (n * self.k)) & crate::boolfn::mask(self.k))
    }

    /// Evaluates with k counted queries to f, one per block.
    pub fn eval_packed(&self, oracle: &mut MembershipOracle, input: u64) -> Result<bool> {
        if oracle.n() != self.n() {
            return Err(Error::ArityMismatch { expected: self.n(), got: oracle.n() });
        }
        let (xs, y) = self.split(input);
        let mut parity = false;
        for (i, x) in xs.into_iter().enumerate() {
            let fx = oracle.query(x) < 0;
            parity ^= fx && (y >> i) & 1 == 1;
        }
        Ok(parity)
    }

    /// Full table of the amplified function, for tiny n and k.
    pub fn truth_table(&self) -> Result<TruthTable> {
        if self.arity() > MAX_ARITY {
            return Err(Error::ArityTooLarge(self.arity()));
        }
        let f = &self.base;
        TruthTable::from_bits(self.arity(), |input| {
            let (xs, y) = self.split(input);
            xs.iter().enumerate().fold(false, |p, (i, &x)| p ^ (f.bit(x) && (y >> i) & 1 == 1))
        })
    }
}

/// Amp^f_k on an explicit bit vector of length nk + k.
pub fn amp_eval(a: &AmpFunction, oracle: &mut MembershipOracle, input: &[bool]) -> Result<bool> {
    let packed = a.pack(input)?;
    a.eval_packed(oracle, packed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_function, FunctionSpec};

    #[test]
    fn zero_selector_gives_zero_and_costs_k() {
        let f = Arc::new(make_function(4, &FunctionSpec::Random { seed: 1 }).unwrap());
        let a = AmpFunction::new(Arc::clone(&f), 3).unwrap();
        let mut mq = MembershipOracle::new(f);
        let mut bits = vec![true; 15];
        bits[12..].iter_mut().for_each(|b| *b = false);
        assert!(!amp_eval(&a, &mut mq, &bits).unwrap());
        assert_eq!(mq.query_count(), 3);
        assert!(amp_eval(&a, &mut mq, &bits[..14]).is_err());
    }
}
