use pacverify::boolfn::mask;
use pacverify::error::Error;
use pacverify::f2::*;
use pacverify::rng::seeded;
use pacverify::stats::{chi_square_gof, chi_square_uniform, two_sample_maps};
use proptest::prelude::*;
use rand::{Rng, RngCore};
use std::collections::HashMap;

fn key(points: &[u64], n: usize) -> u64 {
    points.iter().fold(0u64, |acc, &p| acc << n | p)
}

#[test]
fn basis_sampling() {
    let mut rng = seeded(1);
    for _ in 0..100 {
        let b = sample_basis(8, 1, &mut rng).unwrap();
        assert_ne!(b.vectors[0], 0);
    }
    let b = sample_basis(16, 4, &mut seeded(1)).unwrap();
    assert_eq!(rank(&b.vectors), 4);
    match sample_basis(4, 4, &mut seeded(2)) {
        Ok(b) => assert_eq!(rank(&b.vectors), 4),
        Err(e) => assert!(matches!(e, Error::BasisExhausted { .. })),
    }
    assert!(sample_basis(4, 5, &mut seeded(2)).is_err());
}

#[test]
fn coset_ids() {
    let b = sample_basis(10, 3, &mut seeded(4)).unwrap();
    assert_eq!(coset_of(0, &b).bits, 0);
    for gamma in 0..1024u64 {
        let a = coset_of(gamma, &b);
        for (i, &r) in b.vectors.iter().enumerate() {
            assert_eq!((a.bits >> i) & 1, dot(gamma, r) as u64);
        }
    }
    let std = SubspaceBasis::standard(10, 3).unwrap();
    assert_eq!(coset_of(0b1101101, &std).bits, 0b101);
}

#[test]
fn coset_representatives_round_trip() {
    let b = sample_basis(12, 4, &mut seeded(9)).unwrap();
    for bits in 0..16 {
        let a = CosetId { bits, s: 4 };
        assert_eq!(coset_of(coset_representative(&b, a), &b), a);
    }
    assert_eq!(coset_representative(&b, CosetId { bits: 0, s: 4 }), 0);
    let std = SubspaceBasis::standard(12, 4).unwrap();
    assert_eq!(coset_representative(&std, CosetId { bits: 0b1010, s: 4 }), 0b1010);
}

#[test]
fn orthogonal_samples() {
    let empty = SubspaceBasis::new(6, vec![]).unwrap();
    let mut rng = seeded(1);
    assert!((0..100).all(|_| sample_orthogonal(&empty, &mut rng) == 0));

    let one = sample_basis(8, 1, &mut seeded(3)).unwrap();
    let mut counts = [0u64; 2];
    for _ in 0..10_000 {
        let w = sample_orthogonal(&one, &mut rng);
        assert!(w == 0 || w == one.vectors[0]);
        counts[(w != 0) as usize] += 1;
    }
    assert!(chi_square_uniform(&counts).pass());

    let b = sample_basis(8, 3, &mut seeded(5)).unwrap();
    let span = b.span_table();
    let mut counts = vec![0u64; 8];
    for _ in 0..100_000 {
        let w = sample_orthogonal(&b, &mut rng);
        counts[span.iter().position(|&s| s == w).unwrap()] += 1;
    }
    assert!(chi_square_uniform(&counts).pass());
}

fn pattern_m4() -> LinearPattern {
    LinearPattern {
        n: 8,
        k: 2,
        b_columns: vec![0x0f],
        coeffs: vec![
            LinearCoeff { alpha: 0b01, beta: 0 },
            LinearCoeff { alpha: 0b10, beta: 1 },
            LinearCoeff { alpha: 0b11, beta: 0 },
            LinearCoeff { alpha: 0b11, beta: 1 },
        ],
    }
}

#[test]
fn linear_embedding_index_is_uniform() {
    let p = pattern_m4();
    let mut rng = seeded(11);
    let mut counts = vec![0u64; 4];
    for _ in 0..100_000 {
        let w = rng.next_u64() & 0xff;
        let q = embed_linear(w, &p, &mut rng).unwrap();
        let j = q.embedded_index.unwrap();
        assert_eq!(q.points[j], w);
        counts[j] += 1;
    }
    assert!(chi_square_uniform(&counts).pass(), "{counts:?}");
}

#[test]
fn nae_embedding_statistics() {
    let mut rng = seeded(5);
    let mut slots = vec![0u64; 3];
    let mut marginals = vec![vec![0u64; 16]; 3];
    for _ in 0..100_000 {
        let w = rng.next_u64() & 0xf;
        let q = embed_nae(w, 4, &mut rng);
        assert!(q.is_consistent());
        let j = q.embedded_index.unwrap();
        assert_eq!(q.points[j], w);
        slots[j] += 1;
        for (s, &p) in q.points.iter().enumerate() {
            marginals[s][p as usize] += 1;
        }
    }
    assert!(chi_square_uniform(&slots).pass());
    for m in &marginals {
        assert!(chi_square_uniform(m).pass());
    }
}

/// The recipe that fixes z = w and y uniform, then sets each x_i to 1 − y_i
/// or 1 − z_i with probability 1/2. Its coordinate triples are not uniform
/// over the six NAE triples: (1−b, b, b) has probability 1/4, the other four 1/8.
fn embed_nae_coin_flip(w: u64, n: usize, rng: &mut impl Rng) -> [u64; 3] {
    let z = w & mask(n);
    let y = rng.gen::<u64>() & mask(n);
    let mut x = 0;
    for i in 0..n {
        let pick = if rng.gen() { y } else { z };
        x |= (1 - ((pick >> i) & 1)) << i;
    }
    [x, y, z]
}

#[test]
fn coin_flip_nae_recipe_is_not_uniform_over_nae_triples() {
    let mut rng = seeded(8);
    let mut lit = vec![0u64; 8];
    let mut ours = vec![0u64; 8];
    for _ in 0..60_000 {
        let w = rng.gen::<u64>() & 1;
        let [x, y, z] = embed_nae_coin_flip(w, 1, &mut rng);
        lit[(x << 2 | y << 1 | z) as usize] += 1;
        let q = embed_nae(w, 1, &mut rng);
        let (x, y, z) = (q.points[0], q.points[1], q.points[2]);
        ours[(x << 2 | y << 1 | z) as usize] += 1;
    }
    let probs: Vec<f64> = (0..8).map(|c| if c == 0 || c == 7 { 0.0 } else { 1.0 / 6.0 }).collect();
    assert!(!chi_square_gof(&lit, &probs).pass());
    assert!(chi_square_gof(&ours, &probs).pass());
}

fn joint_two_sample(g: &dyn QueryGenerator, samples: u64, seed: u64) -> (bool, bool) {
    let mut rng = seeded(seed);
    let n = g.n();
    let (mut plain, mut planted) = (HashMap::new(), HashMap::new());
    let mut index = vec![0u64; g.query_count()];
    for _ in 0..samples {
        *plain.entry(key(&g.generate(&mut rng).points, n)).or_insert(0u64) += 1;
        let w = rng.next_u64() & mask(n);
        let q = g.embed(w, &mut rng);
        let j = q.embedded_index.unwrap();
        assert_eq!(q.points[j], w);
        assert!(q.is_consistent());
        index[j] += 1;
        *planted.entry(key(&q.points, n)).or_insert(0u64) += 1;
    }
    (two_sample_maps(&plain, &planted).pass(), chi_square_uniform(&index).pass())
}

#[test]
fn joint_distributions_match() {
    let triple = LinearPattern {
        n: 4,
        k: 2,
        b_columns: vec![],
        coeffs: vec![
            LinearCoeff { alpha: 1, beta: 0 },
            LinearCoeff { alpha: 2, beta: 0 },
            LinearCoeff { alpha: 3, beta: 0 },
        ],
    };
    let linear = LinearGenerator::new(triple).unwrap();
    assert_eq!(joint_two_sample(&linear, 100_000, 1), (true, true));
    assert_eq!(joint_two_sample(&NaeGenerator { n: 4 }, 100_000, 2), (true, true));
    let union = UnionGenerator::new(vec![Box::new(PlainGenerator { n: 3, count: 1 }), Box::new(NaeGenerator { n: 3 })]).unwrap();
    assert_eq!(joint_two_sample(&union, 100_000, 3), (true, true));
}

#[test]
fn union_side_frequencies() {
    let a = PlainGenerator { n: 6, count: 2 };
    let b = PlainGenerator { n: 6, count: 2 };
    let mut rng = seeded(4);
    let mut sides = vec![0u64; 2];
    for _ in 0..100_000 {
        let q = embed_union(7, &[&a, &b], &mut rng).unwrap();
        sides[(q.embedded_index.unwrap() >= 2) as usize] += 1;
    }
    assert!(chi_square_uniform(&sides).pass());

    let one = PlainGenerator { n: 6, count: 1 };
    let three = PlainGenerator { n: 6, count: 3 };
    let mut second = 0;
    for _ in 0..100_000 {
        let q = embed_union(7, &[&one, &three], &mut rng).unwrap();
        second += (q.embedded_index.unwrap() >= 1) as u64;
    }
    assert!((second as f64 / 1e5 - 0.75).abs() <= 0.02);
    assert!(embed_union(7, &[], &mut rng).is_err());
}

#[test]
fn single_generator_union_is_plain_embedding() {
    let p = LinearGenerator::new(pattern_m4()).unwrap();
    let q1 = embed_union(0x5a, &[&p], &mut seeded(6)).unwrap();
    assert_eq!(q1.points[q1.embedded_index.unwrap()], 0x5a);
    assert_eq!(q1.len(), 4);
    assert!(q1.is_consistent());
}

#[test]
fn zero_alpha_rejected() {
    let mut p = pattern_m4();
    p.coeffs[2].alpha = 0;
    assert_eq!(embed_linear(1, &p, &mut seeded(1)).unwrap_err(), Error::ZeroAlpha(2));
    assert!(LinearGenerator::new(p).is_err());
}

#[test]
fn query_set_json_round_trip() {
    let q = embed_nae(0b1010, 4, &mut seeded(1));
    let json = serde_json::to_string(&q).unwrap();
    assert_eq!(serde_json::from_str::<QuerySet>(&json).unwrap(), q);
    assert_eq!(q.prover_view().pattern, "nae");
}

proptest! {
    #[test]
    fn embedded_linear_sets_hold_w(w in 0u64..256, seed in any::<u64>()) {
        let q = embed_linear(w, &pattern_m4(), &mut seeded(seed)).unwrap();
        prop_assert_eq!(q.points[q.embedded_index.unwrap()], w);
        prop_assert!(q.is_consistent());
    }

    #[test]
    fn nae_never_all_equal(w in 0u64..1 << 12, seed in any::<u64>()) {
        let q = embed_nae(w, 12, &mut seeded(seed));
        let (x, y, z) = (q.points[0], q.points[1], q.points[2]);
        prop_assert_eq!((!(x ^ y) & !(y ^ z)) & mask(12), 0);
        prop_assert_eq!(q.points[q.embedded_index.unwrap()], w);
    }

    #[test]
    fn cosets_partition_by_inner_products(n in 2usize..14, s in 0usize..4, seed in any::<u64>(), gamma in any::<u64>()) {
        prop_assume!(s <= n);
        let b = sample_basis(n, s, &mut seeded(seed)).unwrap();
        let g = gamma & mask(n);
        let a = coset_of(g, &b);
        let h = coset_representative(&b, a);
        prop_assert_eq!(coset_of(h, &b), a);
        prop_assert_eq!(coset_of(g ^ h, &b).bits, 0);
    }
}
