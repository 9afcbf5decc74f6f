//! Graph constructions: 3-AP-free integer sets, the tripartite
//! difference-triangle graph built from them, and the partial binary
//! blow-up that turns a unique-copy host into a homomorphism-free one.

use std::collections::BTreeMap;

use crate::graph::{hom_copies, is_hom_free, Graph, HomCopy, Pattern};
use crate::{Error, Result};

/// Vertex-count guard for blow-ups: `n * 2^m` may not exceed this.
pub const MAX_BLOWUP_VERTICES: u64 = 1 << 20;

/// Brute-force scan for a 3-term arithmetic progression inside `elements`
/// (assumed strictly increasing).
pub fn is_ap_free(elements: &[usize]) -> bool {
    let max = match elements.last() {
        Some(&m) => m,
        None => return true,
    };
    let mut member = vec![false; max + 1];
    for &x in elements {
        member[x] = true;
    }
    for (i, &a) in elements.iter().enumerate() {
        for &b in &elements[i + 1..] {
            let c = 2 * b - a; // a < b < c equally spaced
            if c <= max && member[c] {
                return false;
            }
        }
    }
    true
}

/// A 3-AP-free subset of `{1, ..., bound}`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApFreeSet {
    bound: usize,
    elements: Vec<usize>,
}

impl ApFreeSet {
    pub fn new(bound: usize, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if let Some(&bad) = elements.iter().find(|&&x| x < 1 || x > bound) {
            return Err(Error::InvalidSet {
                reason: format!("element {bad} outside 1..={bound}"),
            });
        }
        if !is_ap_free(&elements) {
            return Err(Error::InvalidSet {
                reason: "set contains a 3-term arithmetic progression".into(),
            });
        }
        Ok(ApFreeSet { bound, elements })
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApMethod {
    /// Scan 1..=n, keep anything that does not close a progression.
    Greedy,
    /// Sphere slices of a digit lattice, greedily completed to a maximal set.
    BehrendSpheres,
}

/// Build a 3-AP-free subset of `{1, ..., n}` by the requested method.
/// The output is always re-verified by brute force.
pub fn build_ap_free_set(n: usize, method: ApMethod) -> ApFreeSet {
    let elements = match method {
        ApMethod::Greedy => greedy_ap_free(n, &[]),
        ApMethod::BehrendSpheres => {
            // Digits 0..=k in base q = 2k + 1: digitwise sums never carry, so
            // an integer 3-AP forces a vector 3-AP, impossible on a sphere.
            // At bench scales the best sphere is small, so we extend it to a
            // maximal AP-free set with the same greedy scan used above.
            let sphere = best_sphere_slice(n);
            greedy_ap_free(n, &sphere)
        }
    };
    ApFreeSet::new(n, elements).expect("constructed sets are AP-free by design")
}

/// Greedy scan seeded with `keep` (assumed AP-free): returns a maximal
/// AP-free superset of `keep` inside `{1, ..., n}`.
fn greedy_ap_free(n: usize, keep: &[usize]) -> Vec<usize> {
    let mut member = vec![false; n + 1];
    for &x in keep {
        member[x] = true;
    }
    for x in 1..=n {
        if member[x] {
            continue;
        }
        let mut ok = true;
        // x as the top of a progression
        for d in 1..=(x.saturating_sub(1)) / 2 {
            if member[x - d] && member[x - 2 * d] {
                ok = false;
                break;
            }
        }
        // x as the midpoint or bottom (only matters when seeded)
        if ok && !keep.is_empty() {
            for d in 1..=n {
                let mid = x + d <= n && x >= d && member[x + d] && member[x - d];
                let bottom = x + 2 * d <= n && member[x + d] && member[x + 2 * d];
                if mid || bottom {
                    ok = false;
                    break;
                }
                if x + d > n {
                    break;
                }
            }
        }
        if ok {
            member[x] = true;
        }
    }
    (1..=n).filter(|&x| member[x]).collect()
}

/// Largest single-radius slice over a sweep of lattice dimensions and digit
/// bases, projected to integers in `{1, ..., n}`.
fn best_sphere_slice(n: usize) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for dim in 2..=6usize {
        // Useful bases stop around (2n)^(1/(dim-1)): beyond that the top
        // digit is always zero and the slice degenerates to a lower
        // dimension. Two dimensions concentrate around q ~ sqrt(2n).
        let q_max = if dim == 2 {
            2 * (2 * n + 1).isqrt() + 3
        } else {
            ((2 * n + 1) as f64).powf(1.0 / (dim as f64 - 1.0)).ceil() as usize + 4
        };
        let mut q = 3usize;
        while q <= q_max {
            let k = (q - 1) / 2;
            let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            collect_sphere_points(n, q, k, dim, 0, 0, 0, &mut classes);
            for class in classes.values() {
                if class.len() > best.len() {
                    best = class.clone();
                }
            }
            q += 2;
        }
    }
    best.sort_unstable();
    best
}

#[allow(clippy::too_many_arguments)]
fn collect_sphere_points(
    n: usize,
    q: usize,
    k: usize,
    dim: usize,
    pos: usize,
    value: usize,
    norm: u64,
    classes: &mut BTreeMap<u64, Vec<usize>>,
) {
    if pos == dim {
        if value >= 1 {
            classes.entry(norm).or_default().push(value);
        }
        return;
    }
    let place = q.pow(pos as u32);
    for d in 0..=k {
        let v = value + d * place;
        if v > n {
            break;
        }
        collect_sphere_points(n, q, k, dim, pos + 1, v, norm + (d * d) as u64, classes);
    }
}

/// Tripartite graph on parts of size `n`, `2n`, `3n`: for each `a` in
/// `1..=n` and difference `d` in `s`, the triple `(a, a+d, a+2d)` spans a
/// triangle. With an AP-free difference set these are all the triangles and
/// they are edge-disjoint.
pub fn rs_graph(n: usize, s: &ApFreeSet) -> Result<Graph> {
    rs_graph_from_diffs(n, s.elements())
}

/// Same construction with an arbitrary difference list (range-checked but
/// not AP-checked), so experiments can demonstrate how a 3-AP breaks the
/// unique-triangle property.
pub fn rs_graph_from_diffs(n: usize, diffs: &[usize]) -> Result<Graph> {
    if let Some(&bad) = diffs.iter().find(|&&d| d < 1 || d > n) {
        return Err(Error::InvalidSet {
            reason: format!("difference {bad} outside 1..={n}"),
        });
    }
    let mut g = Graph::new(6 * n);
    let a_id = |a: usize| a - 1;
    let b_id = |b: usize| n + b - 1;
    let c_id = |c: usize| 3 * n + c - 1;
    for a in 1..=n {
        for &d in diffs {
            let (b, c) = (a + d, a + 2 * d);
            g.add_edge(a_id(a), b_id(b))?;
            g.add_edge(b_id(b), c_id(c))?;
            g.add_edge(a_id(a), c_id(c))?;
        }
    }
    Ok(g)
}

/// For each pattern copy, a two-sided split of its edge set; both sides
/// must be non-empty. Side values are 0 or 1.
#[derive(Clone, Debug)]
pub struct EdgeBipartition {
    sides: Vec<BTreeMap<(usize, usize), u8>>,
}

impl EdgeBipartition {
    pub fn new(copies: &[HomCopy], sides: Vec<BTreeMap<(usize, usize), u8>>) -> Result<Self> {
        if sides.len() != copies.len() {
            return Err(Error::BadBipartition {
                reason: format!("{} copies but {} side maps", copies.len(), sides.len()),
            });
        }
        for (i, (copy, map)) in copies.iter().zip(&sides).enumerate() {
            let keys: Vec<(usize, usize)> = map.keys().copied().collect();
            if keys != copy.edges {
                return Err(Error::BadBipartition {
                    reason: format!("side map of copy {i} does not cover exactly its edges"),
                });
            }
            if let Some((_, &s)) = map.iter().find(|(_, &s)| s > 1) {
                return Err(Error::BadBipartition {
                    reason: format!("side value {s} in copy {i}; sides are 0 or 1"),
                });
            }
            for side in [0u8, 1u8] {
                if !map.values().any(|&s| s == side) {
                    return Err(Error::EmptyPart { copy: i });
                }
            }
        }
        Ok(EdgeBipartition { sides })
    }

    /// Lexicographically smallest edge of each copy alone on side 1, the
    /// rest on side 0. Fails when some copy has fewer than two edges.
    pub fn default_for(copies: &[HomCopy]) -> Result<Self> {
        let sides = copies
            .iter()
            .map(|copy| {
                copy.edges
                    .iter()
                    .enumerate()
                    .map(|(j, &e)| (e, u8::from(j == 0)))
                    .collect::<BTreeMap<_, _>>()
            })
            .collect();
        EdgeBipartition::new(copies, sides)
    }

    pub fn side(&self, copy: usize, edge: (usize, usize)) -> Option<u8> {
        self.sides.get(copy)?.get(&edge).copied()
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }
}

/// A partial binary blow-up: the host graph, the copy structure it was
/// built from, and the lifted graph on `base.n() * 2^m` vertices.
///
/// Lifted vertex `(u, x)` (base vertex `u`, membership word `x` with one bit
/// per copy) gets id `u * 2^m + x`. Vertices `(u, x)` and `(v, y)` are
/// adjacent iff `uv` lies on side `s` of its unique copy `i` and
/// `x_i = y_i = s`, so each base edge lifts to exactly `2^(2m-2)` edges.
#[derive(Clone, Debug)]
pub struct Blowup {
    graph: Graph,
    base: Graph,
    copies: Vec<HomCopy>,
    parts: EdgeBipartition,
    m: usize,
}

impl Blowup {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn copies(&self) -> &[HomCopy] {
        &self.copies
    }

    pub fn parts(&self) -> &EdgeBipartition {
        &self.parts
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn vertex_id(&self, base: usize, bits: usize) -> usize {
        base << self.m | bits
    }

    /// `(base vertex, membership bits)` of a lifted vertex id.
    #[inline]
    pub fn label(&self, id: usize) -> (usize, usize) {
        (id >> self.m, id & ((1 << self.m) - 1))
    }

    /// How many lifted edges each base edge accounts for, measured from the
    /// lifted graph (not from the formula).
    pub fn measured_lift_counts(&self) -> BTreeMap<(usize, usize), u64> {
        let mut counts = BTreeMap::new();
        for (p, q) in self.graph.edges() {
            let (u, _) = self.label(p);
            let (v, _) = self.label(q);
            *counts.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
        counts
    }
}

/// Build the partial binary blow-up of `host` along the copies of
/// `pattern` (which must be its own core, connected, with at least two
/// edges). `parts` defaults to [`EdgeBipartition::default_for`].
pub fn partial_binary_blowup(
    host: &Graph,
    pattern: &Pattern,
    parts: Option<EdgeBipartition>,
) -> Result<Blowup> {
    if !pattern.is_core() {
        return Err(Error::PatternNotCore);
    }
    if !pattern.graph().is_connected() || pattern.graph().edge_count() < 2 {
        return Err(Error::PatternNotUsable);
    }
    let copies = hom_copies(pattern, host);
    let mut owner: BTreeMap<(usize, usize), (usize, u8)> = BTreeMap::new();
    for (i, copy) in copies.iter().enumerate() {
        for &e in &copy.edges {
            if owner.insert(e, (i, 0)).is_some() {
                return Err(Error::NotUniqueCopy);
            }
        }
    }
    if owner.len() != host.edge_count() {
        return Err(Error::NotUniqueCopy);
    }
    let m = copies.len();
    let lifted_n = (host.n() as u64).saturating_mul(1u64 << m.min(63));
    if m >= 63 || lifted_n > MAX_BLOWUP_VERTICES {
        return Err(Error::SizeGuard {
            what: "partial binary blow-up",
            value: lifted_n,
            unit: "vertices",
            max: MAX_BLOWUP_VERTICES,
        });
    }
    let parts = match parts {
        Some(p) => {
            // re-validate against the copies we just computed
            EdgeBipartition::new(&copies, p.sides.clone())?
        }
        None => EdgeBipartition::default_for(&copies)?,
    };
    for (e, slot) in owner.iter_mut() {
        slot.1 = parts.side(slot.0, *e).expect("validated above");
    }

    let mut graph = Graph::new(host.n() << m);
    for (&(u, v), &(i, s)) in &owner {
        for x in 0..1usize << m {
            if (x >> i) as u8 & 1 != s {
                continue;
            }
            for y in 0..1usize << m {
                if (y >> i) as u8 & 1 != s {
                    continue;
                }
                graph.add_edge(u << m | x, v << m | y)?;
            }
        }
    }
    debug_assert_eq!(
        graph.edge_count() as u64,
        host.edge_count() as u64 * (1u64 << (2 * m)) / 4,
        "each base edge lifts to 2^(2m-2) edges"
    );
    Ok(Blowup {
        graph,
        base: host.clone(),
        copies,
        parts,
        m,
    })
}

/// Unrestricted binary blow-up on the same vertex set: every base edge
/// lifts to all `2^(2m)` pairs. Used as a control; it is never
/// homomorphism-free for patterns with an edge.
pub fn full_binary_blowup(host: &Graph, m: usize) -> Result<Graph> {
    let lifted_n = (host.n() as u64).saturating_mul(1u64 << m.min(63));
    if m >= 63 || lifted_n > MAX_BLOWUP_VERTICES {
        return Err(Error::SizeGuard {
            what: "full binary blow-up",
            value: lifted_n,
            unit: "vertices",
            max: MAX_BLOWUP_VERTICES,
        });
    }
    let mut graph = Graph::new(host.n() << m);
    for (u, v) in host.edges() {
        for x in 0..1usize << m {
            for y in 0..1usize << m {
                graph.add_edge(u << m | x, v << m | y)?;
            }
        }
    }
    Ok(graph)
}

/// Exhaustive (early-exit) check that the lifted graph admits no
/// homomorphism from the pattern.
pub fn verify_blowup_hom_free(blowup: &Blowup, pattern: &Pattern) -> bool {
    is_hom_free(pattern, blowup.graph())
}
