use super::TruthTable;
use serde::{Deserialize, Serialize};

/// χ_γ(x) = (−1)^{⟨γ,x⟩}.
#[inline]
pub fn chi(gamma: u64, x: u64) -> i8 {
    1 - 2 * ((gamma & x).count_ones() & 1) as i8
}

/// Unnormalized in-place Walsh-Hadamard transform; `data.len()` must be a power of two.
pub fn walsh_hadamard(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSpectrum {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

/// f̂(γ) = 2^{−n} Σ_x χ_γ(x) f(x) for every γ.
pub fn fwht(f: &TruthTable) -> FourierSpectrum {
    let mut coeffs: Vec<f64> = f.values().iter().map(|&v| v as f64).collect();
    walsh_hadamard(&mut coeffs);
    let scale = 1.0 / f.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    FourierSpectrum { n: f.n(), coeffs }
}

impl FourierSpectrum {
    pub fn coeff(&self, gamma: u64) -> f64 {
        self.coeffs[gamma as usize]
    }

    pub fn parseval(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// f(x) = Σ_γ f̂(γ) χ_γ(x).
    pub fn inverse(&self) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        walsh_hadamard(&mut v);
        v
    }

    /// Characters ordered by |f̂| descending, ties by index.
    pub fn ranked(&self) -> Vec<u64> {
        let mut idx: Vec<u64> = (0..self.coeffs.len() as u64).collect();
        idx.sort_by(|&a, &b| {
            self.coeffs[b as usize]
                .abs()
                .partial_cmp(&self.coeffs[a as usize].abs())
                .unwrap()
                .then(a.cmp(&b))
        });
        idx
    }

    pub fn top(&self, t: usize) -> Vec<u64> {
        let mut r = self.ranked();
        r.truncate(t);
        r
    }

    /// Λ is ε-top iff every character outside Λ has |f̂| at most
    /// min_{β∈Λ} |f̂(β)| + ε.
    pub fn is_eps_top(&self, set: &[u64], eps: f64) -> bool {
        if set.is_empty() {
            return true;
        }
        let mut inside = vec![false; self.coeffs.len()];
        for &g in set {
            match inside.get_mut(g as usize) {
                Some(slot) => *slot = true,
                None => return false,
            }
        }
        let floor = set.iter().map(|&g| self.coeffs[g as usize].abs()).fold(f64::INFINITY, f64::min);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| !inside[*i])
            .all(|(_, c)| c.abs() <= floor + eps + 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maj3() -> TruthTable {
        TruthTable::from_bits(3, |x| x.count_ones() >= 2).unwrap()
    }

    #[test]
    fn maj3_spectrum() {
        let s = fwht(&maj3());
        for g in 0..8u64 {
            let expect = match g {
                1 | 2 | 4 => 0.5,
                7 => -0.5,
                _ => 0.0,
            };
            assert!((s.coeff(g) - expect).abs() < 1e-15, "gamma {g}");
        }
    }

    #[test]
    fn constant_and_character() {
        let s = fwht(&TruthTable::constant(3, 1).unwrap());
        assert_eq!(s.coeffs, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let c = TruthTable::from_fn(3, |x| chi(0b100, x)).unwrap();
        let s = fwht(&c);
        for g in 0..8 {
            assert_eq!(s.coeff(g), if g == 4 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn eps_top_checker() {
        let s = fwht(&maj3());
        assert!(s.is_eps_top(&[1, 2, 4, 7], 0.0));
        assert!(!s.is_eps_top(&[0, 2, 4, 7], 0.2));
        assert!(s.is_eps_top(&[0, 2, 4, 7], 0.5));
        assert_eq!(s.top(4), vec![1, 2, 4, 7]);
    }
}
