use crate::boolfn::{fwht, mask, q_cb, MembershipOracle, TruthTable};
use crate::error::Result;
use crate::f2::{sample_orthogonal_subset, CosetId, SubspaceBasis};
use crate::boolfn::walsh_hadamard;
use rand_xoshiro::Xoshiro256PlusPlus;
use rand::SeedableRng;
use rand::{Rng, RngCore};

/// Empirical mean over q_cb(ε², δ) draws of χ_h(w)·f(x)·f(y)·f(z)·f(x+y+z+w),
/// an unbiased estimate of Σ_{γ∈V_a} f̂(γ)⁴.
pub fn estimate_l4_sum<R: Rng + ?Sized>(
    oracle: &mut MembershipOracle,
    basis: &SubspaceBasis,
    a: CosetId,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<f64> {
    let samples = q_cb(eps * eps, delta)?;
    let h = basis.representative(a);
    let m = mask(basis.n);
    let mut acc = 0i64;
    for _ in 0..samples {
        let x = rng.gen::<u64>() & m;
        let y = rng.gen::<u64>() & m;
        let z = rng.gen::<u64>() & m;
        let (_, w) = sample_orthogonal_subset(basis, rng);
        let p = crate::boolfn::chi(h, w)
            * oracle.query(x)
            * oracle.query(y)
            * oracle.query(z)
            * oracle.query(x ^ y ^ z ^ w);
        acc += p as i64;
    }
    Ok(acc as f64 / samples as f64)
}

/// (max(0, Σ̂))^{1/4}: the heaviest |f̂| in the coset when the coset is rare.
pub fn estimate_coset_max<R: Rng + ?Sized>(
    oracle: &mut MembershipOracle,
    basis: &SubspaceBasis,
    a: CosetId,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<f64> {
    Ok(estimate_l4_sum(oracle, basis, a, eps, delta, rng)?.max(0.0).powf(0.25))
}

/// Estimates of Σ_{γ∈V_a} f̂(γ)⁴ for all 2^s cosets from one pool of
/// `samples` draws. Each draw (x, y, z, T) costs four queries; since
/// χ_{h_a}(Σ_{i∈T} r_i) = (−1)^{|a∧T|}, bucketing the products by T and
/// applying a Walsh-Hadamard transform yields every coset's mean at once.
pub fn coset_fourth_sums(
    oracle: &mut MembershipOracle,
    basis: &SubspaceBasis,
    samples: u64,
    rng: &mut dyn RngCore,
) -> Vec<f64> {
    let n = basis.n;
    let s = basis.s();
    let buckets = fourth_moment_buckets(oracle.values(), n, basis, samples, rng);
    oracle.charge(4 * samples);
    let mut sums: Vec<f64> = buckets.into_iter().map(|c| c as f64).collect();
    walsh_hadamard(&mut sums);
    let scale = if samples == 0 { 0.0 } else { 1.0 / samples as f64 };
    sums.iter_mut().for_each(|v| *v *= scale);
    debug_assert_eq!(sums.len(), 1 << s);
    sums
}

fn fourth_moment_buckets(vals: &[i8], n: usize, basis: &SubspaceBasis, samples: u64, rng: &mut dyn RngCore) -> Vec<i64> {
    // The pool can run to 10^9 draws; a xoshiro stream seeded from the
    // caller's generator keeps that affordable.
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(rng.next_u64());
    let s = basis.s();
    let m = mask(n);
    let ms = mask(s);
    let mut acc = vec![0i64; 1 << s];
    let span = if s <= 20 { Some(basis.span_table()) } else { None };
    let w_of = |t: u64| match &span {
        Some(table) => table[t as usize],
        None => basis.span_element(t),
    };
    if 3 * n + s <= 64 && s <= 20 {
        // Indices are masked by (len − 1) of power-of-two tables, which lets
        // the compiler drop bounds checks in this loop.
        let span = span.as_deref().expect("s <= 20");
        let vals: Vec<i64> = vals[..1 << n].iter().map(|&v| v as i64).collect();
        let (vm, sm) = (vals.len() - 1, span.len() - 1);
        debug_assert_eq!(acc.len(), span.len());
        let acc_s = &mut acc[..];
        let am = acc_s.len() - 1;
        for _ in 0..samples {
            let r = rng.next_u64();
            let x = r as usize & vm;
            let y = (r >> n) as usize & vm;
            let z = (r >> (2 * n)) as usize & vm;
            let t = (r >> (3 * n)) as usize & sm;
            let q = (x ^ y ^ z ^ span[t] as usize) & vm;
            let p = vals[x] * vals[y] * vals[z] * vals[q];
            acc_s[t & am] += p;
        }
    } else if 3 * n + s <= 64 {
        for _ in 0..samples {
            let r = rng.next_u64();
            let x = r & m;
            let y = (r >> n) & m;
            let z = (r >> (2 * n)) & m;
            let t = (r >> (3 * n)) & ms;
            let q = x ^ y ^ z ^ w_of(t);
            let p = vals[x as usize] * vals[y as usize] * vals[z as usize] * vals[q as usize];
            acc[t as usize] += p as i64;
        }
    } else {
        for _ in 0..samples {
            let x = rng.next_u64() & m;
            let y = rng.next_u64() & m;
            let z = rng.next_u64() & m;
            let t = rng.next_u64() & ms;
            let q = x ^ y ^ z ^ w_of(t);
            let p = vals[x as usize] * vals[y as usize] * vals[z as usize] * vals[q as usize];
            acc[t as usize] += p as i64;
        }
    }
    acc
}

/// Exact Σ_{γ∈V_a} f̂(γ)⁴ for every coset, from the full spectrum.
pub fn exact_coset_sums(f: &TruthTable, basis: &SubspaceBasis) -> Vec<f64> {
    let spec = fwht(f);
    let mut sums = vec![0.0; 1 << basis.s()];
    for (g, c) in spec.coeffs.iter().enumerate() {
        sums[basis.coset_of(g as u64).bits as usize] += c.powi(4);
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_function, FunctionSpec};
    use crate::f2::sample_basis;
    use crate::rng::seeded;
    use std::sync::Arc;

    #[test]
    fn pooled_sums_match_exact_on_character() {
        let f = Arc::new(make_function(8, &FunctionSpec::Character { gamma: 0x35 }).unwrap());
        let mut rng = seeded(2);
        let basis = sample_basis(8, 3, &mut rng).unwrap();
        let mut mq = MembershipOracle::new(Arc::clone(&f));
        let est = coset_fourth_sums(&mut mq, &basis, 20_000, &mut rng);
        let exact = exact_coset_sums(&f, &basis);
        assert_eq!(mq.query_count(), 80_000);
        let home = basis.coset_of(0x35).bits as usize;
        // on the home coset every product equals one
        assert!((est[home] - 1.0).abs() < 1e-12);
        for (e, x) in est.iter().zip(&exact) {
            assert!((e - x).abs() < 4.0 / (20_000f64).sqrt());
        }
    }

    #[test]
    fn exact_sums_partition_the_l4_mass() {
        let f = make_function(10, &FunctionSpec::Random { seed: 4 }).unwrap();
        let basis = sample_basis(10, 4, &mut seeded(1)).unwrap();
        let total: f64 = exact_coset_sums(&f, &basis).iter().sum();
        let direct: f64 = fwht(&f).coeffs.iter().map(|c| c.powi(4)).sum();
        assert!((total - direct).abs() < 1e-12);
    }
}
