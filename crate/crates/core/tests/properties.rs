//! Randomized invariant checks over the whole crate surface.

use proptest::prelude::*;

use trl_core::approx::{violations, VertexMap};
use trl_core::arith::space::FpnSpace;
use trl_core::arith::DensityFunction;
use trl_core::construct::is_ap_free;
use trl_core::entropy::{FiniteDistribution, JointDistribution};
use trl_core::graph::Graph;
use trl_core::io;
use trl_core::removal::g_schedule;
use trl_core::sumfree::{verify_tricolor, TricolorTriple};

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut g = Graph::new(n);
    let mut bit = 0;
    for u in 0..n {
        for v in (u + 1)..n {
            if mask >> bit & 1 == 1 {
                g.add_edge(u, v).unwrap();
            }
            bit += 1;
        }
    }
    g
}

fn small_space() -> impl Strategy<Value = FpnSpace> {
    (prop::sample::select(vec![2usize, 3, 5, 7]), 1..=3usize)
        .prop_map(|(p, n)| FpnSpace::new(p, n).unwrap())
}

proptest! {
    #[test]
    fn space_is_an_abelian_group(space in small_space(), seeds in prop::collection::vec(any::<u64>(), 3)) {
        let pick = |s: u64| (s % space.size() as u64) as usize;
        let (a, b, c) = (pick(seeds[0]), pick(seeds[1]), pick(seeds[2]));
        prop_assert_eq!(space.add(a, b), space.add(b, a));
        prop_assert_eq!(space.add(space.add(a, b), c), space.add(a, space.add(b, c)));
        prop_assert_eq!(space.add(a, 0), a);
        prop_assert_eq!(space.add(a, space.neg(a)), 0);
        prop_assert_eq!(space.sub(a, b), space.add(a, space.neg(b)));
        // digits round-trip and the dot pairing is symmetric and additive
        prop_assert_eq!(space.from_digits(&space.digits(a)).unwrap(), a);
        prop_assert_eq!(space.dot(a, b), space.dot(b, a));
        let lhs = space.dot(a, space.add(b, c));
        let rhs = (space.dot(a, b) + space.dot(a, c)) % space.p();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn violation_count_is_relabel_invariant(
        n in 1..=6usize,
        mask in any::<u64>(),
        fn_ in 1..=4usize,
        fmask in any::<u64>(),
        table_seed in any::<u64>(),
        perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let g = graph_from_mask(n, mask);
        let f = graph_from_mask(fn_, fmask);
        let table: Vec<usize> = (0..n)
            .map(|v| (table_seed.rotate_left(7 * v as u32) % fn_ as u64) as usize)
            .collect();
        let phi = VertexMap::new(n, fn_, table.clone()).unwrap();
        let base = violations(&g, &f, &phi).unwrap().violations;

        // relabel g's vertices by a permutation and push the map through it
        let perm: Vec<usize> = perm.into_iter().filter(|&v| v < n).collect();
        let mut h = Graph::new(n);
        for (u, v) in g.edges() {
            h.add_edge(perm[u], perm[v]).unwrap();
        }
        let mut rtable = vec![0usize; n];
        for v in 0..n {
            rtable[perm[v]] = table[v];
        }
        let psi = VertexMap::new(n, fn_, rtable).unwrap();
        prop_assert_eq!(violations(&h, &f, &psi).unwrap().violations, base);
    }

    #[test]
    fn graph_files_round_trip(n in 1..=9usize, mask in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        let text = io::write_graph(&g);
        let back = io::read_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(io::write_graph(&back), text);
    }

    #[test]
    fn density_files_round_trip(
        space in small_space(),
        seeds in prop::collection::vec(0.0f64..1.0, 8),
        as_indicator in any::<bool>(),
    ) {
        let values: Vec<f64> = (0..space.size())
            .map(|i| {
                let v = seeds[i % seeds.len()];
                if as_indicator { (v > 0.5) as u8 as f64 } else { v }
            })
            .collect();
        let f = DensityFunction::new(&space, values).unwrap();
        for text in [io::write_density(&f), io::write_density_table(&f)] {
            let back = io::read_density(&text).unwrap();
            prop_assert_eq!(back.space(), f.space());
            for x in space.points() {
                prop_assert_eq!(back.value(x).to_bits(), f.value(x).to_bits());
            }
        }
    }

    #[test]
    fn tricolor_files_round_trip(
        space in small_space(),
        l in 1..=4usize,
        seeds in prop::collection::vec(any::<u64>(), 12),
    ) {
        // diagonal sums forced to zero so the triple constructor accepts it
        let pick = |s: u64| (s % space.size() as u64) as usize;
        let x: Vec<usize> = (0..l).map(|i| pick(seeds[i])).collect();
        let y: Vec<usize> = (0..l).map(|i| pick(seeds[i + 4])).collect();
        let z: Vec<usize> = x.iter().zip(&y).map(|(&a, &b)| space.neg(space.add(a, b))).collect();
        let t = TricolorTriple::new(&space, x, y, z).unwrap();
        let text = io::write_tricolor(&t);
        let back = io::read_tricolor(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(io::write_tricolor(&back), text);
        // verification never panics on arbitrary zero-sum triples
        let _ = verify_tricolor(&t).unwrap();
    }

    #[test]
    fn ap_freeness_matches_triple_scan(els in prop::collection::btree_set(1..60usize, 0..12)) {
        let v: Vec<usize> = els.into_iter().collect();
        let mut brute = true;
        'outer: for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                for k in (j + 1)..v.len() {
                    if v[i] + v[k] == 2 * v[j] {
                        brute = false;
                        break 'outer;
                    }
                }
            }
        }
        prop_assert_eq!(is_ap_free(&v), brute);
    }

    #[test]
    fn entropy_and_information_bounds(counts in prop::collection::vec(0..50u64, 4..12)) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let dist = FiniteDistribution::from_counts(&counts).unwrap();
        let h = dist.entropy();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (counts.len() as f64).ln() + 1e-12);

        // reshape into a 2 x k joint table when the length is even
        if counts.len() % 2 == 0 && counts.iter().sum::<u64>() > 0 {
            let k = counts.len() / 2;
            let joint = JointDistribution::from_counts(2, k, &counts).unwrap();
            let mi = joint.mutual_information();
            let hr = FiniteDistribution::new(joint.row_marginal()).unwrap().entropy();
            let hc = FiniteDistribution::new(joint.col_marginal()).unwrap().entropy();
            prop_assert!(mi >= -1e-12);
            prop_assert!(mi <= hr.min(hc) + 1e-9, "mi {} exceeds min({}, {})", mi, hr, hc);
        }
    }

    #[test]
    fn deletion_threshold_schedule_is_decreasing(a in 1e-9f64..1.0, b in 1e-9f64..1.0) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(g_schedule(lo).unwrap() > g_schedule(hi).unwrap());
        prop_assert!(g_schedule(hi).unwrap() > 0.0);
    }

    #[test]
    fn trace_files_round_trip(n in 4..=10usize, eps in 1.0f64..2000.0) {
        let run = trl_core::removal::greedy_bounded_codegree(&Graph::complete(n), eps, None).unwrap();
        let text = io::write_trace(&run.trace);
        let back = io::read_trace(&text).unwrap();
        prop_assert_eq!(back.len(), run.trace.len());
        for (rec, step) in back.iter().zip(&run.trace) {
            prop_assert_eq!(rec.step, step.step);
            prop_assert_eq!(rec.edge, step.edge);
            prop_assert_eq!(rec.beta.to_bits(), step.beta.to_bits());
            prop_assert_eq!(rec.threshold.to_bits(), step.threshold.to_bits());
        }
    }
}
