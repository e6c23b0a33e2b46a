use scaffold_core::special::{biquad_report, ferton_free, weak_extremes, weak_report};
use scaffold_core::structure::{analyze, ScaffoldParams};

#[test]
fn ferton_matches_engine() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        for b in 1..p {
            let params = ScaffoldParams::new(p, 1, vec![b as i64]).unwrap();
            for h in 0..p as i64 {
                assert_eq!(
                    ferton_free(h, b, p).unwrap(),
                    analyze(h, &params).unwrap().free,
                    "p={p} b'={b} h={h}"
                );
            }
        }
    }
}

#[test]
fn biquad_matches_engine() {
    for b in [1u64, 3] {
        let params = ScaffoldParams::uniform(2, 2, b as i64).unwrap();
        for h in 0..4 {
            let s = biquad_report(b, h).unwrap();
            let r = analyze(h, &params).unwrap();
            assert_eq!(
                (s.free, s.min_generators, s.embedding_dimension),
                (r.free, r.min_generators, r.embedding_dimension)
            );
        }
    }
}

#[test]
fn weak_matches_engine() {
    for (p, n) in [
        (2u64, 1u32),
        (2, 2),
        (2, 3),
        (2, 4),
        (3, 1),
        (3, 2),
        (3, 3),
        (5, 1),
        (5, 2),
        (5, 3),
    ] {
        let params = ScaffoldParams::uniform(p, n, 1).unwrap();
        for h in 0..params.modulus() as i64 {
            let w = weak_report(p, n, h).unwrap();
            let r = analyze(h, &params).unwrap();
            assert_eq!(
                (w.free, w.min_generators, w.embedding_dimension),
                (r.free, r.min_generators, r.embedding_dimension),
                "p={p} n={n} h={h}"
            );
        }
        weak_extremes(p, n).unwrap();
    }
}
