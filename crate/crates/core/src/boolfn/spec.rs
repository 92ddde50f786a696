use super::{chi, TruthTable};
use crate::error::{Error, Result};
use crate::rng::seeded;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Descriptor of a generated truth table. The string form is
/// `constant[:-1]`, `character:<γ>`, `majority[:<bits>]`, `majority3pad`,
/// `parity`, `bent`, `junta:<v1,v2,..>:<table>`, `random:<seed>` and
/// `noisy:<rate>:<seed>:<base>`. Integers accept `0x`/`0b` prefixes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Constant { sign: i8 },
    Character { gamma: u64 },
    /// Majority of the first `bits` coordinates (all coordinates when `None`).
    Majority { bits: Option<usize> },
    Parity,
    /// Inner product x1x2 + x3x4 + … over the first 2⌊n/2⌋ coordinates.
    Bent,
    /// Junta on `vars` (0-based); bit c of `table` is the output bit on the
    /// local input c, with vars[0] the least significant local coordinate.
    Junta { vars: Vec<usize>, table: u64 },
    Random { seed: u64 },
    Noisy { base: Box<FunctionSpec>, rate: f64, seed: u64 },
}

fn parse_int(s: &str) -> Result<u64> {
    let s = s.trim();
    let r = if let Some(h) = s.strip_prefix("0x") {
        u64::from_str_radix(h, 16)
    } else if let Some(b) = s.strip_prefix("0b") {
        u64::from_str_radix(b, 2)
    } else {
        s.parse()
    };
    r.map_err(|_| Error::MalformedSpec(format!("bad integer '{s}'")))
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedSpec(s.to_string());
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        Ok(match (head, rest) {
            ("constant", None) => FunctionSpec::Constant { sign: 1 },
            ("constant", Some(r)) => match r {
                "1" | "+1" => FunctionSpec::Constant { sign: 1 },
                "-1" => FunctionSpec::Constant { sign: -1 },
                _ => return Err(bad()),
            },
            ("character", Some(r)) => FunctionSpec::Character { gamma: parse_int(r)? },
            ("majority", None) => FunctionSpec::Majority { bits: None },
            ("majority", Some(r)) => FunctionSpec::Majority { bits: Some(parse_int(r)? as usize) },
            ("majority3pad", None) => FunctionSpec::Majority { bits: Some(3) },
            ("parity", None) => FunctionSpec::Parity,
            ("bent", None) => FunctionSpec::Bent,
            ("junta", Some(r)) => {
                let (vars, table) = r.split_once(':').ok_or_else(bad)?;
                let vars = if vars.is_empty() {
                    Vec::new()
                } else {
                    vars.split(',').map(|v| parse_int(v).map(|v| v as usize)).collect::<Result<_>>()?
                };
                FunctionSpec::Junta { vars, table: parse_int(table)? }
            }
            ("random", Some(r)) => FunctionSpec::Random { seed: parse_int(r)? },
            ("noisy", Some(r)) => {
                let mut it = r.splitn(3, ':');
                let rate: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let seed = parse_int(it.next().ok_or_else(bad)?)?;
                let base: FunctionSpec = it.next().ok_or_else(bad)?.parse()?;
                FunctionSpec::Noisy { base: Box::new(base), rate, seed }
            }
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Constant { sign } => write!(f, "constant:{sign}"),
            FunctionSpec::Character { gamma } => write!(f, "character:{gamma:#x}"),
            FunctionSpec::Majority { bits: None } => write!(f, "majority"),
            FunctionSpec::Majority { bits: Some(b) } => write!(f, "majority:{b}"),
            FunctionSpec::Parity => write!(f, "parity"),
            FunctionSpec::Bent => write!(f, "bent"),
            FunctionSpec::Junta { vars, table } => {
                let v: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
                write!(f, "junta:{}:{table:#x}", v.join(","))
            }
            FunctionSpec::Random { seed } => write!(f, "random:{seed}"),
            FunctionSpec::Noisy { base, rate, seed } => write!(f, "noisy:{rate}:{seed}:{base}"),
        }
    }
}

pub fn make_function(n: usize, spec: &FunctionSpec) -> Result<TruthTable> {
    let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    match spec {
        FunctionSpec::Constant { sign } => {
            if *sign != 1 && *sign != -1 {
                return Err(Error::MalformedSpec(format!("constant sign {sign}")));
            }
            TruthTable::constant(n, *sign)
        }
        FunctionSpec::Character { gamma } => {
            if gamma & !full != 0 {
                return Err(Error::MalformedSpec(format!("character {gamma:#x} exceeds arity {n}")));
            }
            TruthTable::from_fn(n, |x| chi(*gamma, x))
        }
        FunctionSpec::Majority { bits } => {
            let b = bits.unwrap_or(n);
            if b == 0 || b % 2 == 0 || b > n {
                return Err(Error::MalformedSpec(format!("majority needs an odd bit count ≤ {n}, got {b}")));
            }
            let m = if b >= 64 { u64::MAX } else { (1u64 << b) - 1 };
            TruthTable::from_bits(n, |x| (x & m).count_ones() as usize * 2 > b)
        }
        FunctionSpec::Parity => TruthTable::from_fn(n, |x| chi(full, x)),
        FunctionSpec::Bent => TruthTable::from_bits(n, |x| {
            let mut acc = 0;
            for i in 0..n / 2 {
                acc ^= (x >> (2 * i)) & (x >> (2 * i + 1)) & 1;
            }
            acc == 1
        }),
        FunctionSpec::Junta { vars, table } => {
            let k = vars.len();
            if k > 6 || vars.iter().any(|&v| v >= n) {
                return Err(Error::MalformedSpec("junta variables out of range or k > 6".into()));
            }
            let mut sorted = vars.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != k {
                return Err(Error::MalformedSpec("junta variables must be distinct".into()));
            }
            if k < 6 && *table >> (1u64 << k) != 0 {
                return Err(Error::MalformedSpec("junta table too wide".into()));
            }
            TruthTable::from_bits(n, |x| {
                let local = vars.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | ((x >> v) & 1) << i);
                table >> local & 1 == 1
            })
        }
        FunctionSpec::Random { seed } => {
            let mut rng = seeded(*seed);
            let values = (0..1u64 << n).map(|_| if rng.gen::<bool>() { -1 } else { 1 }).collect();
            TruthTable::new(n, values)
        }
        FunctionSpec::Noisy { base, rate, seed } => {
            if !(0.0..=1.0).contains(rate) {
                return Err(Error::MalformedSpec(format!("flip rate {rate}")));
            }
            let mut t = make_function(n, base)?;
            let mut rng = seeded(*seed);
            for x in 0..1u64 << n {
                if rng.gen_bool(*rate) {
                    t.flip(x);
                }
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{dist, fwht};

    #[test]
    fn parse_round_trip() {
        for s in ["constant:-1", "character:0x5", "majority:3", "parity", "bent", "junta:1,3:0x6", "random:7", "noisy:0.1:3:character:0x5"] {
            let spec: FunctionSpec = s.parse().unwrap();
            let again: FunctionSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again, "{s}");
        }
        assert!("junta:1,1:0x6".parse::<FunctionSpec>().and_then(|s| make_function(4, &s)).is_err());
        assert!("wobble".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn character_zero_is_constant() {
        let c = make_function(5, &FunctionSpec::Character { gamma: 0 }).unwrap();
        assert_eq!(c, TruthTable::constant(5, 1).unwrap());
    }

    #[test]
    fn noiseless_noisy_is_base() {
        let base = FunctionSpec::Character { gamma: 0b1011 };
        let noisy = FunctionSpec::Noisy { base: Box::new(base.clone()), rate: 0.0, seed: 9 };
        assert_eq!(make_function(6, &noisy).unwrap(), make_function(6, &base).unwrap());
    }

    #[test]
    fn noisy_distance_is_flip_fraction() {
        let base = FunctionSpec::Character { gamma: 0x2f1 };
        let noisy = FunctionSpec::Noisy { base: Box::new(base.clone()), rate: 0.1, seed: 3 };
        let f = make_function(10, &noisy).unwrap();
        let g = make_function(10, &base).unwrap();
        let mut rng = seeded(3);
        let flips = (0..1024).filter(|_| rng.gen_bool(0.1)).count();
        assert_eq!(dist(&f, &g).unwrap(), flips as f64 / 1024.0);
    }

    #[test]
    fn bent_spectrum_is_flat() {
        let s = fwht(&make_function(4, &FunctionSpec::Bent).unwrap());
        assert!(s.coeffs.iter().all(|c| (c.abs() - 0.25).abs() < 1e-15));
    }
}
