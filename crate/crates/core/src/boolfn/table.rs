use super::{ExampleDistribution, MAX_ARITY};
use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// f: {0,1}^n → {−1,+1}, indexed by the little-endian integer value of x
/// (bit i of the index is coordinate x_{i+1}).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    values: Vec<i8>,
}

impl TruthTable {
    pub fn new(n: usize, values: Vec<i8>) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        if values.len() != 1usize << n {
            return Err(Error::InvalidParameter(format!(
                "table of arity {n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter("entries must be ±1".into()));
        }
        Ok(TruthTable { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> i8) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        let values = (0..1u64 << n).map(|x| if f(x) < 0 { -1 } else { 1 }).collect();
        Ok(TruthTable { n, values })
    }

    /// {0,1}-valued bits mapped through b ↦ 1−2b.
    pub fn from_bits(n: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        Self::from_fn(n, |x| if f(x) { -1 } else { 1 })
    }

    pub fn constant(n: usize, sign: i8) -> Result<Self> {
        Self::from_fn(n, |_| sign)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: u64) -> i8 {
        self.values[x as usize]
    }

    /// f(x) as a bit: true iff f(x) = −1.
    #[inline]
    pub fn bit(&self, x: u64) -> bool {
        self.values[x as usize] < 0
    }

    pub fn negate(&self) -> TruthTable {
        TruthTable { n: self.n, values: self.values.iter().map(|v| -v).collect() }
    }

    pub fn flip(&mut self, x: u64) {
        self.values[x as usize] = -self.values[x as usize];
    }

    pub fn to_hex(&self) -> String {
        let mut bytes = vec![0u8; self.values.len().div_ceil(8)];
        for (i, &v) in self.values.iter().enumerate() {
            if v < 0 {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        let len = 1usize << n;
        let nbytes = len.div_ceil(8);
        if hex.len() != 2 * nbytes {
            return Err(Error::Encoding(format!("expected {} hex digits, got {}", 2 * nbytes, hex.len())));
        }
        let mut values = Vec::with_capacity(len);
        for i in 0..nbytes {
            let byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16)
                .map_err(|e| Error::Encoding(e.to_string()))?;
            for b in 0..8 {
                let idx = i * 8 + b;
                let set = byte >> b & 1 == 1;
                if idx < len {
                    values.push(if set { -1 } else { 1 });
                } else if set {
                    return Err(Error::Encoding("padding bits must be zero".into()));
                }
            }
        }
        Ok(TruthTable { n, values })
    }
}

#[derive(Serialize, Deserialize)]
struct TableEnvelope {
    n: usize,
    bits: String,
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableEnvelope { n: self.n, bits: self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let env = TableEnvelope::deserialize(d)?;
        TruthTable::from_hex(env.n, &env.bits).map_err(serde::de::Error::custom)
    }
}

/// Fraction of inputs on which f and g disagree.
pub fn dist(f: &TruthTable, g: &TruthTable) -> Result<f64> {
    if f.n != g.n {
        return Err(Error::ArityMismatch { expected: f.n, got: g.n });
    }
    let diff = f.values.iter().zip(&g.values).filter(|(a, b)| a != b).count();
    Ok(diff as f64 / f.len() as f64)
}

/// Disagreement probability under an example distribution.
pub fn dist_under(f: &TruthTable, g: &TruthTable, d: &ExampleDistribution) -> Result<f64> {
    if f.n != g.n {
        return Err(Error::ArityMismatch { expected: f.n, got: g.n });
    }
    match d.weights() {
        None => dist(f, g),
        Some(w) => {
            if w.len() != f.len() {
                return Err(Error::ArityMismatch { expected: f.n, got: w.len().trailing_zeros() as usize });
            }
            let total: f64 = w.iter().sum();
            let bad: f64 = (0..f.len()).filter(|&i| f.values[i] != g.values[i]).map(|i| w[i]).sum();
            Ok(bad / total)
        }
    }
}
