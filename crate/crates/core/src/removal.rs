//! Triangle-removal machinery: the deletion-rate schedule, the greedy
//! bounded-codegree process with a replayable trace, random vertex sampling
//! that extracts edge-disjoint triangles, and exact/greedy removal distance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, TriangleIndex};
use crate::{Error, Result};

/// Deletion-rate schedule g(x) = 100 ln(100/x) (ln ln(100/x))² on (0, 1].
///
/// The two properties that matter downstream: g grows as x shrinks, and the
/// reciprocals at the dyadic points 2^-1, 2^-2, ... sum to less than 1/2, so
/// a process that deletes at least g(x)-driven batches per halving of the
/// triangle count never spends more than half its edge budget.
pub fn g_schedule(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain {
            what: "schedule argument",
            value: x,
            domain: "(0, 1]",
        });
    }
    let l = (100.0 / x).ln();
    Ok(100.0 * l * l.ln() * l.ln())
}

/// One deletion made by the bounded-codegree process.
#[derive(Clone, Debug, PartialEq)]
pub struct DeletionStep {
    pub step: usize,
    pub edge: (usize, usize),
    /// Triangle density tri/n³ at the moment of deletion.
    pub beta: f64,
    /// Codegree threshold in force at that moment.
    pub threshold: f64,
    /// Triangles through the deleted edge.
    pub codegree: usize,
}

/// Result of running the bounded-codegree process to quiescence.
#[derive(Clone, Debug)]
pub struct BoundedCodegreeRun {
    pub graph: Graph,
    pub trace: Vec<DeletionStep>,
    pub initial_triangles: u64,
    pub final_triangles: u64,
    /// Threshold in force when the process stopped (None if it stopped
    /// because no triangles were left).
    pub final_threshold: Option<f64>,
}

/// Repeatedly delete the edge lying in the most triangles while that count
/// is at least g(β/δ)·β·n/ε, where β = tri/n³ is the current triangle
/// density and δ the initial one (overridable). The threshold is recomputed
/// after every deletion; ties break to the lexicographically smallest edge.
/// Stops when the top codegree drops below the threshold, or no triangles
/// remain.
pub fn greedy_bounded_codegree(
    g: &Graph,
    eps: f64,
    delta: Option<f64>,
) -> Result<BoundedCodegreeRun> {
    if !(eps > 0.0) {
        return Err(Error::Domain {
            what: "epsilon",
            value: eps,
            domain: "(0, inf)",
        });
    }
    if let Some(d) = delta {
        if !(d > 0.0) {
            return Err(Error::Domain {
                what: "initial triangle density",
                value: d,
                domain: "(0, inf)",
            });
        }
    }
    let n = g.n();
    let n_cubed = (n as f64).powi(3);
    let mut cur = g.clone();
    let initial_triangles = cur.count_triangles();
    let mut trace = Vec::new();
    let final_threshold;

    loop {
        let index = TriangleIndex::build(&cur);
        let tri = index.triangles.len() as u64;
        if tri == 0 {
            final_threshold = None;
            break;
        }
        let beta = tri as f64 / n_cubed;
        // with the default δ the ratio is formed from exact counts, so the
        // first iteration sits exactly at 1
        let x = match delta {
            None => tri as f64 / initial_triangles as f64,
            Some(d) => beta / d,
        };
        let threshold = g_schedule(x)? * beta * n as f64 / eps;
        let (edge, codegree) = index.max_edge().expect("tri > 0");
        if (codegree as f64) < threshold {
            final_threshold = Some(threshold);
            break;
        }
        trace.push(DeletionStep {
            step: trace.len(),
            edge,
            beta,
            threshold,
            codegree,
        });
        cur.remove_edge(edge.0, edge.1);
    }

    let final_triangles = cur.count_triangles();
    Ok(BoundedCodegreeRun {
        graph: cur,
        trace,
        initial_triangles,
        final_triangles,
        final_threshold,
    })
}

/// A random vertex sample together with its triangles and the "good" ones —
/// those sharing no edge with any other triangle inside the sample.
#[derive(Clone, Debug)]
pub struct SampleOutcome {
    /// Sampled vertices, ascending, in the host's labelling.
    pub sample: Vec<usize>,
    /// All triangles with all three vertices in the sample.
    pub triangles_in_sample: Vec<[usize; 3]>,
    /// The edge-disjoint subset: triangles sharing no edge with another
    /// sampled triangle.
    pub good_triangles: Vec<[usize; 3]>,
    /// Whether t ≤ n/100, the regime where the expected-count lower bound
    /// (2/3)·αn³/(1000t³) applies.
    pub in_small_sample_regime: bool,
}

impl SampleOutcome {
    /// The graph on the sampled vertices (relabelled to 0..N in sample
    /// order) whose edges are exactly the good triangles' edges. Every edge
    /// of this graph lies in exactly one triangle: good triangles are
    /// pairwise edge-disjoint by construction, and any further triangle
    /// assembled from their edges would itself be an in-sample triangle
    /// sharing an edge with a good one — contradicting goodness.
    pub fn unique_triangle_graph(&self) -> Graph {
        let pos = |v: usize| self.sample.binary_search(&v).expect("vertex was sampled");
        let mut g = Graph::new(self.sample.len());
        for t in &self.good_triangles {
            let (a, b, c) = (pos(t[0]), pos(t[1]), pos(t[2]));
            g.add_edge(a, b).expect("triangle vertices are distinct");
            g.add_edge(b, c).expect("triangle vertices are distinct");
            g.add_edge(a, c).expect("triangle vertices are distinct");
        }
        g
    }
}

/// Sample ⌊n/(9t)⌋ distinct vertices with a seeded generator and classify
/// the triangles landing inside the sample.
pub fn sample_good_triangles(g: &Graph, t: u64, seed: u64) -> Result<SampleOutcome> {
    let n = g.n();
    if t == 0 {
        return Err(Error::Domain {
            what: "sampling parameter t",
            value: 0.0,
            domain: "positive integers",
        });
    }
    let size = n as u64 / (9 * t);
    if size == 0 {
        return Err(Error::SampleSizeZero { n, t: t as usize });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = rand::seq::index::sample(&mut rng, n, size as usize).into_vec();
    sample.sort_unstable();

    let mut triangles_in_sample = Vec::new();
    for (i, &a) in sample.iter().enumerate() {
        for (j, &b) in sample.iter().enumerate().skip(i + 1) {
            if !g.has_edge(a, b) {
                continue;
            }
            for &c in sample.iter().skip(j + 1) {
                if g.has_edge(a, c) && g.has_edge(b, c) {
                    triangles_in_sample.push([a, b, c]);
                }
            }
        }
    }

    let mut edge_use = std::collections::BTreeMap::new();
    for t in &triangles_in_sample {
        for (u, v) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            *edge_use.entry((u, v)).or_insert(0u32) += 1;
        }
    }
    let good_triangles = triangles_in_sample
        .iter()
        .filter(|t| {
            [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
                .iter()
                .all(|e| edge_use[e] == 1)
        })
        .copied()
        .collect();

    Ok(SampleOutcome {
        sample,
        triangles_in_sample,
        good_triangles,
        in_small_sample_regime: t as f64 <= n as f64 / 100.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemovalMode {
    /// Branch-and-bound over triangle hitting sets; only for graphs whose
    /// triangles touch at most 30 edges.
    Exact,
    /// Repeatedly delete the edge in the most triangles.
    Greedy,
}

#[derive(Clone, Debug)]
pub struct RemovalResult {
    pub deleted: Vec<(usize, usize)>,
    pub distance: usize,
    /// True when `distance` is provably minimal.
    pub exact: bool,
}

const MAX_EXACT_REMOVAL_EDGES: usize = 30;

/// Fewest edge deletions that leave the graph triangle-free (a minimum
/// hitting set of the triangles, each triangle hit through one of its three
/// edges). Greedy mode returns an upper bound instead.
pub fn removal_distance(g: &Graph, mode: RemovalMode) -> Result<RemovalResult> {
    match mode {
        RemovalMode::Greedy => {
            let mut cur = g.clone();
            let mut deleted = Vec::new();
            while let Some((edge, _)) = TriangleIndex::build(&cur).max_edge() {
                cur.remove_edge(edge.0, edge.1);
                deleted.push(edge);
            }
            let distance = deleted.len();
            Ok(RemovalResult {
                deleted,
                distance,
                exact: false,
            })
        }
        RemovalMode::Exact => {
            let index = TriangleIndex::build(g);
            let relevant = index.per_edge.len();
            if relevant > MAX_EXACT_REMOVAL_EDGES {
                return Err(Error::InstanceTooLarge {
                    what: "edges lying in triangles",
                    value: relevant,
                    max: MAX_EXACT_REMOVAL_EDGES,
                });
            }
            // greedy gives the starting upper bound
            let greedy = removal_distance(g, RemovalMode::Greedy)?;
            let mut best = greedy.deleted.clone();
            let mut chosen = Vec::new();
            hit_triangles(&index.triangles, &mut chosen, &mut best);
            best.sort_unstable();
            let distance = best.len();
            Ok(RemovalResult {
                deleted: best,
                distance,
                exact: true,
            })
        }
    }
}

fn edges_of(t: &[usize; 3]) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
}

/// Greedy packing of edge-disjoint unhit triangles; its size is a lower
/// bound on the deletions still required.
fn packing_bound(triangles: &[[usize; 3]], chosen: &[(usize, usize)]) -> usize {
    let mut used = std::collections::BTreeSet::new();
    let mut packed = 0;
    for t in triangles {
        let es = edges_of(t);
        if es.iter().any(|e| chosen.contains(e)) {
            continue;
        }
        if es.iter().all(|e| !used.contains(e)) {
            used.extend(es);
            packed += 1;
        }
    }
    packed
}

fn hit_triangles(
    triangles: &[[usize; 3]],
    chosen: &mut Vec<(usize, usize)>,
    best: &mut Vec<(usize, usize)>,
) {
    let unhit = triangles
        .iter()
        .find(|t| edges_of(t).iter().all(|e| !chosen.contains(e)));
    let Some(t) = unhit else {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    };
    if chosen.len() + packing_bound(triangles, chosen) >= best.len() {
        return;
    }
    for e in edges_of(t) {
        chosen.push(e);
        hit_triangles(triangles, chosen, best);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_ap_free_set, rs_graph, ApMethod};

    #[test]
    fn schedule_values_and_domain() {
        let g1 = g_schedule(1.0).unwrap();
        assert!((g1 - 1074.05).abs() < 0.01, "g(1) = {g1}");
        assert!(g_schedule(0.5).unwrap() > g1);
        assert!(g_schedule(0.0).is_err());
        assert!(g_schedule(-1.0).is_err());
        assert!(g_schedule(1.5).is_err());
        assert!(g_schedule(f64::NAN).is_err());
    }

    #[test]
    fn schedule_reciprocals_sum_below_half() {
        let sum: f64 = (1..=60)
            .map(|i| 1.0 / g_schedule(2f64.powi(-i)).unwrap())
            .sum();
        assert!(sum < 0.5, "sum = {sum}");
        assert!(sum > 0.0);
    }

    #[test]
    fn bounded_codegree_on_complete_graph() {
        let g = Graph::complete(20);
        let run = greedy_bounded_codegree(&g, 1000.0, None).unwrap();
        assert!(!run.trace.is_empty());
        assert_eq!(run.initial_triangles, 1140);
        // every recorded deletion was at or above its threshold
        for step in &run.trace {
            assert!(step.codegree as f64 >= step.threshold);
        }
        // the stop condition really held at the end
        match run.final_threshold {
            Some(th) => {
                let (_, top) = TriangleIndex::build(&run.graph).max_edge().unwrap();
                assert!((top as f64) < th);
            }
            None => assert_eq!(run.final_triangles, 0),
        }
        // densities decrease along the trace
        for w in run.trace.windows(2) {
            assert!(w[1].beta <= w[0].beta);
        }
    }

    #[test]
    fn bounded_codegree_trace_replays() {
        let g = Graph::complete(12);
        let run = greedy_bounded_codegree(&g, 500.0, None).unwrap();
        assert!(!run.trace.is_empty());
        // replaying the recorded deletions reproduces the recorded state
        let mut replay = g.clone();
        let n_cubed = (g.n() as f64).powi(3);
        for step in &run.trace {
            let index = TriangleIndex::build(&replay);
            let tri = index.triangles.len() as u64;
            let beta = tri as f64 / n_cubed;
            let x = tri as f64 / run.initial_triangles as f64;
            let threshold = g_schedule(x).unwrap() * beta * g.n() as f64 / 500.0;
            let (edge, codegree) = index.max_edge().unwrap();
            assert_eq!(edge, step.edge);
            assert_eq!(codegree, step.codegree);
            assert_eq!(beta, step.beta);
            assert_eq!(threshold, step.threshold);
            replay.remove_edge(edge.0, edge.1);
        }
        assert_eq!(replay.edges(), run.graph.edges());
        // determinism: a second run gives the identical trace
        let again = greedy_bounded_codegree(&g, 500.0, None).unwrap();
        assert_eq!(again.trace, run.trace);
    }

    #[test]
    fn bounded_codegree_immediate_stop_cases() {
        // triangle-free input: no trace, no final threshold
        let run = greedy_bounded_codegree(&Graph::cycle(5), 1.0, None).unwrap();
        assert!(run.trace.is_empty());
        assert_eq!(run.final_threshold, None);
        // tiny epsilon: threshold far above any codegree, nothing deleted
        let run = greedy_bounded_codegree(&Graph::complete(6), 1e-6, None).unwrap();
        assert!(run.trace.is_empty());
        assert_eq!(run.final_triangles, run.initial_triangles);
        assert!(greedy_bounded_codegree(&Graph::complete(4), 0.0, None).is_err());
        assert!(greedy_bounded_codegree(&Graph::complete(4), 1.0, Some(0.0)).is_err());
    }

    #[test]
    fn sampling_is_seeded_and_in_range() {
        let g = Graph::complete(50);
        let a = sample_good_triangles(&g, 1, 9).unwrap();
        let b = sample_good_triangles(&g, 1, 9).unwrap();
        assert_eq!(a.sample, b.sample);
        assert_eq!(a.sample.len(), 5); // ⌊50/9⌋
        assert!(a.sample.windows(2).all(|w| w[0] < w[1]));
        assert!(a.sample.iter().all(|&v| v < 50));
        let c = sample_good_triangles(&g, 1, 10).unwrap();
        assert_ne!(a.sample, c.sample, "different seeds should differ here");
        assert!(matches!(
            sample_good_triangles(&g, 6, 0),
            Err(Error::SampleSizeZero { .. })
        ));
        assert!(sample_good_triangles(&g, 0, 0).is_err());
    }

    #[test]
    fn good_triangles_are_edge_disjoint_and_unique() {
        let s = build_ap_free_set(20, ApMethod::Greedy);
        let g = rs_graph(20, &s).unwrap();
        for seed in 0..200 {
            let out = sample_good_triangles(&g, 1, seed).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for t in &out.good_triangles {
                for e in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                    assert!(seen.insert(e), "edge {e:?} reused");
                }
            }
            let sub = out.unique_triangle_graph();
            let idx = TriangleIndex::build(&sub);
            assert_eq!(idx.triangles.len(), out.good_triangles.len());
            for (_, &count) in &idx.per_edge {
                assert_eq!(count, 1);
            }
            assert_eq!(sub.edges().len(), 3 * out.good_triangles.len());
        }
    }

    #[test]
    fn sampled_good_triangle_rate_meets_lower_bound() {
        // host: 120 vertices, 160 edge-disjoint triangles; t = 1 keeps the
        // sample in the small-sample regime (1 ≤ 120/100)
        let s = build_ap_free_set(20, ApMethod::Greedy);
        let g = rs_graph(20, &s).unwrap();
        let tri = g.count_triangles() as f64;
        assert_eq!(tri, 160.0);
        let trials = 2000u64;
        let mut total = 0u64;
        let mut regime = true;
        for seed in 0..trials {
            let out = sample_good_triangles(&g, 1, seed).unwrap();
            total += out.good_triangles.len() as u64;
            regime &= out.in_small_sample_regime;
        }
        assert!(regime);
        let mean = total as f64 / trials as f64;
        // α n³ = tri, so the guarantee reads mean ≥ (2/3)·tri/(1000 t³)
        let bound = 2.0 / 3.0 * tri / 1000.0;
        assert!(mean >= bound, "mean = {mean}, bound = {bound}");
        assert!(mean < 0.3, "mean = {mean} looks implausibly high");
    }

    #[test]
    fn removal_distance_named_values() {
        let k4 = removal_distance(&Graph::complete(4), RemovalMode::Exact).unwrap();
        assert_eq!(k4.distance, 2);
        assert!(k4.exact);
        let bowtie = removal_distance(&Graph::bowtie(), RemovalMode::Exact).unwrap();
        assert_eq!(bowtie.distance, 2);
        let c5 = removal_distance(&Graph::cycle(5), RemovalMode::Exact).unwrap();
        assert_eq!(c5.distance, 0);
        assert!(c5.deleted.is_empty());
    }

    #[test]
    fn removal_deletions_leave_triangle_free() {
        for mode in [RemovalMode::Exact, RemovalMode::Greedy] {
            let g = Graph::complete(6);
            let res = removal_distance(&g, mode).unwrap();
            let mut pruned = g.clone();
            for &(u, v) in &res.deleted {
                pruned.remove_edge(u, v);
            }
            assert_eq!(pruned.count_triangles(), 0, "{mode:?}");
            assert_eq!(res.deleted.len(), res.distance);
        }
    }

    #[test]
    fn exact_removal_size_guard() {
        // K9 has 36 edges, all in triangles
        assert!(matches!(
            removal_distance(&Graph::complete(9), RemovalMode::Exact),
            Err(Error::InstanceTooLarge { .. })
        ));
        // K7 has 21 relevant edges and is in range
        let k7 = removal_distance(&Graph::complete(7), RemovalMode::Exact).unwrap();
        assert!(k7.exact);
    }

    /// Exhaustive oracle: try all subsets of triangle-touching edges in
    /// increasing size until one hits every triangle.
    fn brute_force_distance(g: &Graph) -> usize {
        let idx = TriangleIndex::build(g);
        let relevant: Vec<(usize, usize)> = idx.per_edge.keys().copied().collect();
        assert!(relevant.len() <= 20);
        let hits_all = |mask: u64| {
            idx.triangles.iter().all(|t| {
                edges_of(t).iter().any(|e| {
                    let i = relevant.binary_search(e).unwrap();
                    mask >> i & 1 == 1
                })
            })
        };
        (0u64..1 << relevant.len())
            .filter(|&m| hits_all(m))
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn exact_removal_matches_exhaustive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut tested = 0;
        while tested < 25 {
            let n = rng.gen_range(4..8);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.45) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            if TriangleIndex::build(&g).per_edge.len() > 16 {
                continue;
            }
            tested += 1;
            let exact = removal_distance(&g, RemovalMode::Exact).unwrap();
            assert_eq!(exact.distance, brute_force_distance(&g));
            let greedy = removal_distance(&g, RemovalMode::Greedy).unwrap();
            assert!(greedy.distance >= exact.distance);
        }
    }

    #[test]
    fn unique_triangle_graph_distance_is_triangle_count() {
        // on an edge-disjoint union of triangles both modes need exactly
        // one deletion per triangle
        let s = build_ap_free_set(5, ApMethod::Greedy);
        let g = rs_graph(5, &s).unwrap(); // 20 edge-disjoint triangles
        let greedy = removal_distance(&g, RemovalMode::Greedy).unwrap();
        assert_eq!(greedy.distance, 20);
    }
}
