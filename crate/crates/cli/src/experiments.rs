//! Named experiment presets. Each wires several library stages into one
//! inequality pipeline and returns a [`Report`] whose assertion list is
//! exactly the invariants of the stages it exercises. Reports are
//! deterministic functions of (preset, params, seed).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trl_core::approx::VertexMap;
use trl_core::arith::space::{DensityFunction, FpnSpace};
use trl_core::arith::{
    counting_lemma_gap, is_weakly_regular, lambda_direct, weak_regularity_subspace,
    weighted_removal_roundtrip,
};
use trl_core::construct::{build_ap_free_set, is_ap_free, partial_binary_blowup, rs_graph, ApMethod};
use trl_core::entropy::{cell_constant_map, chain_bound_audit, claim_dagger_audit};
use trl_core::graph::{is_hom_free, Graph, Pattern, TriangleIndex};
use trl_core::removal::{g_schedule, greedy_bounded_codegree, sample_good_triangles};
use trl_core::sumfree::{
    asymptotic_infimum, cp_constant, cp_constant_grid, digit_third, expand_construction,
    missed_mass_audit, tricolor_search, verify_expansion, LinearMap, TricolorSearchMode,
};
use trl_core::Error;

use crate::CliError;

use crate::report::Report;

pub const PRESETS: [&str; 6] = [
    "tfl-ingredients",
    "rs-pipeline",
    "deletion-schedule",
    "arith-roundtrip",
    "arith-expansion",
    "cp-table",
];

/// Optional knobs; each preset reads the ones it understands and fills in
/// documented defaults for the rest.
#[derive(Clone, Debug, Default)]
pub struct PresetParams {
    pub host: Option<String>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub m: Option<usize>,
    pub eps: Option<f64>,
    pub reps: Option<usize>,
    pub primes: Option<Vec<usize>>,
}

fn usage(reason: String) -> CliError {
    CliError::Usage(reason)
}

/// Named host shapes for graph-side presets: `bowtie`, `triangle`,
/// `complete:N`, `path:N`, `cycle:N`, `friendship:T`.
pub fn parse_host_graph(spec: &str) -> crate::Result<Graph> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    let num = |what: &str| -> crate::Result<usize> {
        arg.ok_or_else(|| usage(format!("host {what} needs a size, e.g. {what}:5")))?
            .parse::<usize>()
            .map_err(|e| usage(format!("host size: {e}")))
    };
    match kind {
        "bowtie" => Ok(Graph::bowtie()),
        "triangle" => Ok(Graph::complete(3)),
        "complete" => Ok(Graph::complete(num("complete")?)),
        "path" => Ok(Graph::path(num("path")?)),
        "cycle" => Ok(Graph::cycle(num("cycle")?)),
        "friendship" => {
            let t = num("friendship")?;
            let mut g = Graph::new(2 * t + 1);
            for i in 0..t {
                g.add_edge(0, 2 * i + 1)?;
                g.add_edge(0, 2 * i + 2)?;
                g.add_edge(2 * i + 1, 2 * i + 2)?;
            }
            Ok(g)
        }
        other => Err(usage(format!("unknown host shape {other:?}"))),
    }
}

pub fn run_experiment(preset: &str, params: &PresetParams, seed: u64) -> crate::Result<Report> {
    let start = Instant::now();
    let mut report = match preset {
        "tfl-ingredients" => tfl_ingredients(params, seed)?,
        "rs-pipeline" => rs_pipeline(params, seed)?,
        "deletion-schedule" => deletion_schedule(params, seed)?,
        "arith-roundtrip" => arith_roundtrip(params, seed)?,
        "arith-expansion" => arith_expansion(params, seed)?,
        "cp-table" => cp_table(params, seed)?,
        other => {
            return Err(usage(format!(
                "unknown preset {other:?} (known: {})",
                PRESETS.join(", ")
            )))
        }
    };
    report.wall_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Blow-up fidelity plus both entropy audits on the result.
fn tfl_ingredients(params: &PresetParams, seed: u64) -> crate::Result<Report> {
    let host = parse_host_graph(params.host.as_deref().unwrap_or("bowtie"))?;
    let reps = params.reps.unwrap_or(200);
    let mut r = Report::new("tfl-ingredients", seed);
    r.param("host", params.host.as_deref().unwrap_or("bowtie"));
    r.param("reps", reps);

    let k3 = Pattern::new(Graph::complete(3))?;
    let bu = partial_binary_blowup(&host, &k3, None)?;
    let m = bu.m();
    r.value("host-vertices", host.n());
    r.value("host-edges", host.edge_count());
    r.value("copies", m);
    r.value("blowup-vertices", bu.graph().n());
    r.value("blowup-edges", bu.graph().edge_count());
    r.check(
        "blowup-vertices",
        "|V| == n * 2^m",
        bu.graph().n() as f64,
        "==",
        (host.n() << m) as f64,
    );
    r.check(
        "blowup-triangles",
        "triangle count == 0",
        bu.graph().count_triangles() as f64,
        "==",
        0.0,
    );
    r.check_bool(
        "blowup-pattern-free",
        "no homomorphic copy of the pattern survives",
        is_hom_free(&k3, bu.graph()),
    );
    let lift = 1u64 << (2 * m - 2);
    let counts = bu.measured_lift_counts();
    let min = counts.values().min().copied().unwrap_or(0);
    let max = counts.values().max().copied().unwrap_or(0);
    r.value("lift-count", lift);
    r.check("lift-min", "min edge lift == 2^(2m-2)", min as f64, "==", lift as f64);
    r.check("lift-max", "max edge lift == 2^(2m-2)", max as f64, "==", lift as f64);

    // chain bound over seeded random vertex maps
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain_bad = 0u64;
    for i in 0..reps {
        let target_n = [2usize, 3, 5][i % 3];
        let table: Vec<usize> = (0..bu.graph().n())
            .map(|_| rng.gen_range(0..target_n))
            .collect();
        let phi = VertexMap::new(bu.graph().n(), target_n, table)?;
        chain_bad += chain_bound_audit(&bu, &phi)?
            .iter()
            .filter(|row| !row.ok)
            .count() as u64;
    }
    r.value("chain-rows-checked", reps * host.n());
    r.check(
        "chain-bound",
        "rows with sum_i I(i,v) > H(image) or H(image) > ln |target| == 0",
        chain_bad as f64,
        "==",
        0.0,
    );

    // low-information maps must violate many edges inside their copy
    let eta = 1.0 / (16.0 * k3.graph().edge_count() as f64);
    let threshold = 2f64.powi(2 * m as i32 - 3);
    let targets = [Graph::complete(2), Graph::path(3)];
    let mut held = 0u64;
    let mut dagger_bad = 0u64;
    for i in 0..reps {
        let target = &targets[i % targets.len()];
        let copy = i % m;
        let mut cells = BTreeMap::new();
        for b in 0..host.n() {
            for bit in 0..2u8 {
                cells.insert((b, bit), rng.gen_range(0..target.n()));
            }
        }
        let phi = cell_constant_map(&bu, copy, target.n(), &cells)?;
        let audit = claim_dagger_audit(&bu, target, &phi, copy, eta)?;
        if audit.hypothesis_holds {
            held += 1;
            if (audit.violated_edges as f64) < threshold {
                dagger_bad += 1;
            }
        }
    }
    r.value("dagger-eta", eta);
    r.value("dagger-threshold", threshold);
    r.value("dagger-hypothesis-held", held);
    r.check(
        "dagger-violations",
        "maps with all I(i,v) <= eta but < 2^(2m-3) violated edges == 0",
        dagger_bad as f64,
        "==",
        0.0,
    );
    Ok(r)
}

/// Progression-free set -> unique-triangle graph -> in-sample triangles.
fn rs_pipeline(params: &PresetParams, seed: u64) -> crate::Result<Report> {
    let n = params.n.unwrap_or(20);
    if n == 0 {
        return Err(usage("rs-pipeline needs n >= 1".into()));
    }
    let mut r = Report::new("rs-pipeline", seed);
    r.param("n", n);

    let s = build_ap_free_set(n, ApMethod::BehrendSpheres);
    r.value("set-size", s.len());
    let mut elements = String::new();
    for (i, e) in s.elements().iter().enumerate() {
        if i > 0 {
            elements.push(',');
        }
        let _ = write!(elements, "{e}");
    }
    r.value("set-elements", elements);
    r.check_bool(
        "set-ap-free",
        "no three elements satisfy a + c == 2b",
        is_ap_free(s.elements()),
    );

    let g = rs_graph(n, &s)?;
    let k = s.len() as u64;
    r.value("graph-vertices", g.n());
    r.value("graph-edges", g.edge_count());
    r.value("graph-triangles", g.count_triangles());
    r.check("edge-count", "|E| == 3 n |S|", g.edge_count() as f64, "==", (3 * n as u64 * k) as f64);
    r.check(
        "triangle-count",
        "triangles == n |S|",
        g.count_triangles() as f64,
        "==",
        (n as u64 * k) as f64,
    );
    let ti = TriangleIndex::build(&g);
    let max_per_edge = ti.per_edge.values().max().copied().unwrap_or(0);
    r.check(
        "edges-in-triangles",
        "every edge lies in a triangle",
        ti.per_edge.len() as f64,
        "==",
        g.edge_count() as f64,
    );
    r.check("unique-triangle", "max triangles through an edge == 1", max_per_edge as f64, "==", 1.0);

    let out = sample_good_triangles(&g, 1, seed)?;
    r.value("sample-size", out.sample.len());
    r.value("sample-triangles", out.triangles_in_sample.len());
    r.value("good-triangles", out.good_triangles.len());
    let utg = out.unique_triangle_graph();
    let uti = TriangleIndex::build(&utg);
    let umax = uti.per_edge.values().max().copied().unwrap_or(0);
    r.check(
        "sample-unique-triangle",
        "max triangles through a kept edge <= 1",
        umax as f64,
        "<=",
        1.0,
    );
    r.check(
        "sample-edges-covered",
        "every kept edge lies in a kept triangle",
        uti.per_edge.len() as f64,
        "==",
        utg.edge_count() as f64,
    );
    Ok(r)
}

/// Threshold-schedule arithmetic and a bit-exact greedy trace replay.
fn deletion_schedule(params: &PresetParams, seed: u64) -> crate::Result<Report> {
    let n = params.n.unwrap_or(12);
    let eps = params.eps.unwrap_or(500.0);
    let mut r = Report::new("deletion-schedule", seed);
    r.param("n", n);
    r.param("eps", eps);

    let sum: f64 = (1..=60)
        .map(|i| g_schedule(2f64.powi(-i)).map(|v| 1.0 / v))
        .sum::<Result<f64, Error>>()?;
    r.value("reciprocal-sum", sum);
    r.check("schedule-sum", "sum_{i<=60} 1/g(2^-i) < 1/2", sum, "<", 0.5);
    let mut non_monotone = 0u64;
    for i in 1..60 {
        if g_schedule(2f64.powi(-(i + 1)))? <= g_schedule(2f64.powi(-i))? {
            non_monotone += 1;
        }
    }
    r.check(
        "schedule-monotone",
        "dyadic points with g(x/2) <= g(x) == 0",
        non_monotone as f64,
        "==",
        0.0,
    );

    let g0 = Graph::complete(n);
    let run = greedy_bounded_codegree(&g0, eps, None)?;
    r.value("deletions", run.trace.len());
    r.value("initial-triangles", run.initial_triangles);
    r.value("final-triangles", run.final_triangles);
    let trace_text = trl_core::io::write_trace(&run.trace);
    r.input_digest("trace", trace_text.as_bytes());

    let mut mismatches = 0u64;
    let mut cur = g0.clone();
    let n_cubed = (g0.n() as f64).powi(3);
    let t0 = cur.count_triangles();
    for step in &run.trace {
        let index = TriangleIndex::build(&cur);
        let tri = index.triangles.len() as u64;
        let beta = tri as f64 / n_cubed;
        let x = tri as f64 / t0 as f64;
        let threshold = g_schedule(x)? * beta * g0.n() as f64 / eps;
        let (edge, codegree) = index.max_edge().expect("step implies a triangle");
        if edge != step.edge
            || beta.to_bits() != step.beta.to_bits()
            || threshold.to_bits() != step.threshold.to_bits()
            || codegree != step.codegree
        {
            mismatches += 1;
        }
        cur.remove_edge(step.edge.0, step.edge.1);
    }
    r.check(
        "trace-replay",
        "steps whose recomputation differs bitwise == 0",
        mismatches as f64,
        "==",
        0.0,
    );
    r.check_bool(
        "trace-endpoint",
        "replayed graph equals the recorded survivor",
        cur == run.graph,
    );
    Ok(r)
}

/// Regularity, counting, and the weighted deletion round-trip on shared
/// seeded instances.
fn arith_roundtrip(params: &PresetParams, seed: u64) -> crate::Result<Report> {
    let p = params.p.unwrap_or(2);
    let n = params.n.unwrap_or(2);
    let m = params.m.unwrap_or(3);
    let eps = params.eps.unwrap_or(1.0);
    let reps = params.reps.unwrap_or(50);
    let space = FpnSpace::new(p, n)?;
    let mut r = Report::new("arith-roundtrip", seed);
    r.param("p", p);
    r.param("n", n);
    r.param("m", m);
    r.param("eps", eps);
    r.param("reps", reps);

    let codim_cap = (3.0 / (eps * eps)).ceil();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codim_max = 0usize;
    let mut irregular = 0u64;
    let mut gap_max = 0f64;
    let mut ledger_bad = 0u64;
    let mut flag_bad = 0u64;
    let mut successes = 0u64;
    for rep in 0..reps {
        let mut draw = || {
            let values: Vec<f64> = (0..space.size()).map(|_| rng.gen::<f64>()).collect();
            DensityFunction::new(&space, values)
        };
        let (f, g, h) = (draw()?, draw()?, draw()?);
        let sub = weak_regularity_subspace(&[&f, &g, &h], eps)?;
        codim_max = codim_max.max(sub.codim());
        for func in [&f, &g, &h] {
            if !is_weakly_regular(func, &sub, eps)? {
                irregular += 1;
            }
        }
        let gap = counting_lemma_gap(&f, &g, &h, &sub)?;
        gap_max = gap_max.max(gap.gap.abs());

        let out = weighted_removal_roundtrip(&f, &g, &h, eps, m, seed.wrapping_add(rep as u64))?;
        if !out.l1_within_bounds {
            ledger_bad += 1;
        }
        let lam = lambda_direct(&out.f_new, &out.g_new, &out.h_new)?;
        if out.support_solution_free != (lam == 0.0) {
            flag_bad += 1;
        }
        if out.within_budget && out.support_solution_free {
            successes += 1;
        }
    }
    r.value("codim-max", codim_max);
    r.value("counting-gap-max", gap_max);
    r.value("roundtrip-successes", successes);
    r.value("roundtrip-failure-rate", 1.0 - successes as f64 / reps as f64);
    r.check("codim-cap", "codim <= ceil(3/eps^2)", codim_max as f64, "<=", codim_cap);
    r.check(
        "weak-regularity",
        "functions failing |(f - f_H)^|_inf <= eps after projection == 0",
        irregular as f64,
        "==",
        0.0,
    );
    r.check(
        "counting-gap",
        "max |Lambda(f,g,h) - Lambda(f_H,g_H,h_H)| <= 3 eps",
        gap_max,
        "<=",
        3.0 * eps + 1e-9,
    );
    r.check(
        "deletion-ledger",
        "runs where some l1 change exceeds 4 * deleted mass / p^(n+m) == 0",
        ledger_bad as f64,
        "==",
        0.0,
    );
    r.check(
        "solution-free-flag",
        "runs where the flag disagrees with Lambda(f',g',h') == 0 recomputed == 0",
        flag_bad as f64,
        "==",
        0.0,
    );
    Ok(r)
}

/// Coset expansion of a searched triple, then the missed-mass floor over
/// every rank-one compression and triangle-free target family.
fn arith_expansion(params: &PresetParams, seed: u64) -> crate::Result<Report> {
    let p = params.p.unwrap_or(3);
    let n = params.n.unwrap_or(1);
    let space = FpnSpace::new(p, n)?;
    let mut r = Report::new("arith-expansion", seed);
    r.param("p", p);
    r.param("n", n);

    let found = tricolor_search(&space, TricolorSearchMode::Exhaustive)?;
    let l = found.triple.len();
    r.value("triple-length", l);
    r.check_bool("search-optimal", "exhaustive search proves maximality", found.optimal);
    if l == 0 {
        return Err(usage(format!("no sum-free triple exists in F_{p}^{n}")));
    }

    let es = expand_construction(&found.triple)?;
    let q = digit_third(p);
    let want_block = ((q + 1) * p.pow(l as u32 - 1)) as f64;
    let mut block_min = usize::MAX;
    let mut block_max = 0usize;
    for blocks in [es.x_blocks(), es.y_blocks(), es.z_blocks()] {
        for b in blocks {
            block_min = block_min.min(b.len());
            block_max = block_max.max(b.len());
        }
    }
    r.value("lifted-points", es.lifted_space().size());
    r.value("block-size", block_max);
    r.check("block-min", "min block size == (q+1) p^(l-1)", block_min as f64, "==", want_block);
    r.check("block-max", "max block size == (q+1) p^(l-1)", block_max as f64, "==", want_block);
    r.check(
        "block-floor",
        "4 (q+1) p^(l-1) >= p^l",
        4.0 * want_block,
        ">=",
        (es.lifted_space().size() / space.size()) as f64,
    );
    r.check_bool(
        "expansion-free",
        "no cross-block solution of x + y + z == 0 exists",
        verify_expansion(&es)?,
    );

    // every rank-one linear compression against every triangle-free
    // target family: the floor must hold at the joint minimum
    let lifted = es.lifted_space().clone();
    let target = FpnSpace::new(p, 1)?;
    let scan = lifted.size() as u128 * (1u128 << (3 * target.size()));
    if scan > 5_000_000 {
        return Err(usage(format!(
            "missed-mass scan needs {scan} audits at p = {p}; use p <= 3"
        )));
    }
    let bound = (l as f64 - 1.0) * (p.pow(l as u32) as f64) / 4.0;
    let mut min_missed = u64::MAX;
    let mut audits = 0u64;
    for code in 0..lifted.size() {
        let row: Vec<u8> = lifted.digits(code);
        let phi = LinearMap::new(p, vec![row])?;
        for xm in 0u32..1 << target.size() {
            for ym in 0u32..1 << target.size() {
                for zm in 0u32..1 << target.size() {
                    let pick = |mask: u32| {
                        let els: Vec<usize> =
                            (0..target.size()).filter(|&e| mask >> e & 1 == 1).collect();
                        DensityFunction::indicator(&target, &els)
                    };
                    match missed_mass_audit(&es, &phi, &pick(xm)?, &pick(ym)?, &pick(zm)?) {
                        Ok(audit) => {
                            audits += 1;
                            min_missed = min_missed.min(audit.missed);
                        }
                        Err(Error::TargetNotTriangleFree) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
    }
    r.value("audits", audits);
    r.value("min-missed", min_missed);
    r.check(
        "missed-mass",
        "min over maps and triangle-free targets of missed mass >= (l-m) p^l / 4",
        min_missed as f64,
        ">=",
        bound,
    );
    let _ = seed; // fully exhaustive: nothing random to seed
    Ok(r)
}

/// The removal-exponent table and its asymptotic anchor.
fn cp_table(params: &PresetParams, seed: u64) -> crate::Result<Report> {
    let primes = params.primes.clone().unwrap_or_else(|| vec![2, 3, 5, 7]);
    if primes.is_empty() {
        return Err(usage("cp-table needs at least one prime".into()));
    }
    let mut r = Report::new("cp-table", seed);
    let mut plist = String::new();
    for (i, p) in primes.iter().enumerate() {
        if i > 0 {
            plist.push(',');
        }
        let _ = write!(plist, "{p}");
    }
    r.param("primes", plist);

    for &p in &primes {
        let out = cp_constant(p)?;
        let grid = cp_constant_grid(p, 200_000)?;
        r.value(&format!("c-{p}"), out.c);
        r.value(&format!("minimizer-{p}"), out.minimizer);
        r.value(&format!("min-value-{p}"), out.min_value);
        r.check(&format!("cp-lower-{p}"), "c_p > 0", out.c, ">", 0.0);
        r.check(&format!("cp-upper-{p}"), "c_p < 1", out.c, "<", 1.0);
        r.check(
            &format!("cp-grid-agree-{p}"),
            "|golden-section c_p - grid c_p| <= 1e-6",
            (out.c - grid.c).abs(),
            "<=",
            1e-6,
        );
    }
    let anchor = -asymptotic_infimum().ln();
    r.value("asymptote", anchor);
    r.check("asymptote-lower", "-ln inf >= 0.171", anchor, ">=", 0.171);
    r.check("asymptote-upper", "-ln inf <= 0.174", anchor, "<=", 0.174);
    Ok(r)
}
