use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rle_dtw::bench::{generate_instance, DistanceFamily, GenSpec, RunLengthDist};
use rle_dtw::dtw::{approx_dtw, approx_dtw_poly, build_graph, exact_dtw_dp};
use rle_dtw::snap::Point;
use rle_dtw::{build_block_grid, rle_decode, rle_encode, DistanceFn, Letter, MatrixDistance, RleString, Run};

type Cell = Option<BigRational>;

fn full_matrix_dtw(x: &[Letter], y: &[Letter], d: &DistanceFn) -> BigRational {
    let (m, n) = (x.len(), y.len());
    let mut t: Vec<Vec<Cell>> = vec![vec![None; n]; m];
    for i in 0..m {
        for j in 0..n {
            let c = d.distance(x[i], y[j]).unwrap();
            let best = [
                (i > 0).then(|| t[i - 1][j].clone()).flatten(),
                (j > 0).then(|| t[i][j - 1].clone()).flatten(),
                (i > 0 && j > 0).then(|| t[i - 1][j - 1].clone()).flatten(),
            ]
            .into_iter()
            .flatten()
            .min();
            t[i][j] = Some(best.map_or(c.clone(), |b| b + c));
        }
    }
    t[m - 1][n - 1].clone().unwrap()
}

fn rle_strategy(max_runs: usize, max_len: u64) -> impl Strategy<Value = RleString> {
    prop::collection::vec((0u32..5, 1..=max_len), 1..=max_runs).prop_map(|runs| {
        let letters = runs
            .into_iter()
            .flat_map(|(c, n)| std::iter::repeat_n(Letter('a' as u32 + c), n as usize));
        rle_encode(letters).unwrap()
    })
}

fn matrix_strategy() -> impl Strategy<Value = DistanceFn> {
    prop::collection::vec(1u64..20, 25).prop_map(|vals| {
        let letters: Vec<Letter> = (0..5).map(|c| Letter('a' as u32 + c)).collect();
        let rows = (0..5)
            .map(|r| (0..5).map(|c| if r == c { 0 } else { vals[r * 5 + c] }).collect())
            .collect();
        DistanceFn::Matrix(MatrixDistance::new(letters, rows).unwrap())
    })
}

fn delta_strategy() -> impl Strategy<Value = DistanceFn> {
    prop_oneof![Just(DistanceFn::AbsDiff), Just(DistanceFn::Hamming), matrix_strategy()]
}

fn eps_strategy() -> impl Strategy<Value = BigRational> {
    (1i64..=20, 1i64..=20).prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rle_round_trip(x in rle_strategy(12, 6)) {
        let decoded = rle_decode(&x);
        prop_assert_eq!(decoded.len() as u64, x.len());
        prop_assert_eq!(rle_encode(decoded).unwrap(), x.clone());
        for w in x.runs().windows(2) {
            prop_assert_ne!(w[0].letter, w[1].letter);
        }
    }

    #[test]
    fn exact_dp_matches_full_matrix(x in rle_strategy(6, 5), y in rle_strategy(6, 5), d in delta_strategy()) {
        let want = full_matrix_dtw(&rle_decode(&x), &rle_decode(&y), &d);
        prop_assert_eq!(exact_dtw_dp(&x, &y, &d).unwrap().value, want);
    }

    #[test]
    fn exact_dp_transposes(x in rle_strategy(6, 5), y in rle_strategy(6, 5), d in delta_strategy()) {
        let xy = exact_dtw_dp(&x, &y, &d).unwrap().value;
        let yx = exact_dtw_dp(&y, &x, &d.transposed()).unwrap().value;
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn direct_sandwich(x in rle_strategy(8, 8), y in rle_strategy(8, 8), d in delta_strategy(), eps in eps_strategy()) {
        let exact = exact_dtw_dp(&x, &y, &d).unwrap().value;
        let approx = approx_dtw(&x, &y, &d, &eps).unwrap().value;
        prop_assert!(exact <= approx, "approx {} below exact {}", approx, exact);
        prop_assert!(approx <= &exact * (BigRational::one() + &eps), "approx {} above bound, exact {}", approx, exact);
    }

    #[test]
    fn poly_sandwich(x in rle_strategy(6, 8), y in rle_strategy(6, 8), d in delta_strategy(), p in 1i64..10) {
        let eps = BigRational::new(BigInt::from(p), BigInt::from(10));
        let exact = exact_dtw_dp(&x, &y, &d).unwrap().value;
        let approx = approx_dtw_poly(&x, &y, &d, &eps).unwrap().value;
        prop_assert!(exact <= approx);
        prop_assert!(approx <= &exact * (BigRational::one() + &eps));
    }

    #[test]
    fn graph_is_on_block_boundaries(x in rle_strategy(8, 8), y in rle_strategy(8, 8), eps in eps_strategy()) {
        let grid = build_block_grid(&x, &y, &DistanceFn::AbsDiff).unwrap();
        let graph = build_graph(&grid, &eps).unwrap();
        let (xp, yp) = (x.prefix_sums(), y.prefix_sums());
        let on_edge = |p: &[u64], v: u64| p.iter().any(|&s| s == v || s + 1 == v);
        for v in graph.vertices() {
            prop_assert!(on_edge(xp, v.i) || on_edge(yp, v.j), "{} is interior", v);
        }
        prop_assert!(graph.vertex_id(Point::new(1, 1)).is_some());
        prop_assert!(graph.vertex_id(Point::new(x.len(), y.len())).is_some());
        for e in graph.edges() {
            prop_assert!(graph.point(e.from).strictly_precedes(graph.point(e.to)));
        }
    }

    #[test]
    fn generated_run_counts(k in 1usize..40, l in 1usize..40, alphabet in 2u32..10, seed in any::<u64>()) {
        let spec = GenSpec {
            k,
            l,
            run_length: RunLengthDist::Uniform { lo: 1, hi: 9 },
            alphabet_size: alphabet,
            family: DistanceFamily::AbsDiff,
            seed,
        };
        let (x, y) = generate_instance(&spec).unwrap();
        prop_assert_eq!((x.run_count(), y.run_count()), (k, l));
        prop_assert!(x.runs().iter().chain(y.runs()).all(|r| (1..=9).contains(&r.count)));
        prop_assert_eq!(generate_instance(&spec).unwrap(), (x, y));
    }
}

#[test]
fn single_runs_cost_the_longer_length() {
    let x = RleString::from_runs([Run::new('a', 7)]).unwrap();
    let y = RleString::from_runs([Run::new('c', 3)]).unwrap();
    let v = exact_dtw_dp(&x, &y, &DistanceFn::AbsDiff).unwrap().value;
    assert_eq!(v, BigRational::from_integer(BigInt::from(14)));
}
