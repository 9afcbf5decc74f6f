//! Simple undirected graphs with packed bit-row adjacency, and the
//! homomorphism machinery the rest of the workbench relies on: triangle
//! indexing, pattern homomorphism counting and enumeration, graph cores,
//! and the unique-copy check.
//!
//! Patterns (homomorphism sources) are deliberately capped at
//! [`MAX_PATTERN_VERTICES`] vertices so every search here can afford to be
//! exhaustive. Host graphs are only bounded by memory: adjacency is one bit
//! per vertex pair.

use std::collections::BTreeMap;

use crate::{Error, Result};

/// Hard cap on pattern size; all pattern searches are exhaustive.
pub const MAX_PATTERN_VERTICES: usize = 8;

/// Undirected simple graph; row `u` stores the neighbourhood of `u` as a
/// bitset, so edge tests and common-neighbour counts are word operations.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    m: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
            m: 0,
        }
    }

    pub fn with_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop { vertex: u });
        }
        if !self.has_edge(u, v) {
            self.rows[u * self.words + v / 64] |= 1 << (v % 64);
            self.rows[v * self.words + u / 64] |= 1 << (u % 64);
            self.m += 1;
        }
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.n && v < self.n && self.has_edge(u, v) {
            self.rows[u * self.words + v / 64] &= !(1 << (v % 64));
            self.rows[v * self.words + u / 64] &= !(1 << (u % 64));
            self.m -= 1;
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        debug_assert!(u < self.n && v < self.n);
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree(u));
        for (i, &w) in self.row(u).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    /// All edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.neighbors(u) {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Number of triangles, each counted once. For every edge `(u, v)` with
    /// `u < v`, common neighbours above `v` are counted by word intersection.
    pub fn count_triangles(&self) -> u64 {
        let mut total = 0u64;
        for (u, v) in self.edges() {
            let ru = self.row(u);
            let rv = self.row(v);
            let start = v / 64;
            for w in start..self.words {
                let mut both = ru[w] & rv[w];
                if w == start {
                    // keep only vertices strictly above v (double shift avoids UB at v%64 == 63)
                    both &= !0u64 << (v % 64) << 1;
                }
                total += both.count_ones() as u64;
            }
        }
        total
    }

    // ----- named graphs used throughout the tests and experiments -----

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least 3 vertices");
        let mut g = Graph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n).unwrap();
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n.saturating_sub(1) {
            g.add_edge(u, u + 1).unwrap();
        }
        g
    }

    /// Two triangles sharing vertex 0: `{0,1,2}` and `{0,3,4}`.
    pub fn bowtie() -> Self {
        Graph::with_edges(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap()
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// Triangle list plus per-edge participation counts.
#[derive(Debug, Clone)]
pub struct TriangleIndex {
    /// Triangles `[a, b, c]` with `a < b < c`, ascending.
    pub triangles: Vec<[usize; 3]>,
    /// Edges participating in at least one triangle, with their counts.
    pub per_edge: BTreeMap<(usize, usize), usize>,
}

impl TriangleIndex {
    pub fn build(g: &Graph) -> Self {
        let mut triangles = Vec::new();
        let mut per_edge = BTreeMap::new();
        for (u, v) in g.edges() {
            let ru = g.row(u);
            let rv = g.row(v);
            for wd in v / 64..g.words {
                let mut both = ru[wd] & rv[wd];
                if wd == v / 64 {
                    both &= !0u64 << (v % 64) << 1;
                }
                while both != 0 {
                    let w = wd * 64 + both.trailing_zeros() as usize;
                    both &= both - 1;
                    triangles.push([u, v, w]);
                    for e in [(u, v), (u, w), (v, w)] {
                        *per_edge.entry(e).or_insert(0) += 1;
                    }
                }
            }
        }
        TriangleIndex { triangles, per_edge }
    }

    /// Edge in the most triangles; ties broken by lexicographically smallest
    /// edge. `None` when the graph is triangle-free.
    pub fn max_edge(&self) -> Option<((usize, usize), usize)> {
        let mut best: Option<((usize, usize), usize)> = None;
        for (&e, &c) in &self.per_edge {
            match best {
                Some((_, bc)) if bc >= c => {}
                _ => best = Some((e, c)),
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Compact pattern-side adjacency. Everything below works on at most
// MAX_PATTERN_VERTICES vertices, so rows fit in a byte and edge sets in u32.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct SmallAdj {
    n: usize,
    rows: [u8; 8],
}

impl SmallAdj {
    fn from_graph(g: &Graph) -> Self {
        debug_assert!(g.n <= MAX_PATTERN_VERTICES);
        let mut rows = [0u8; 8];
        for (u, v) in g.edges() {
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
        SmallAdj { n: g.n, rows }
    }

    #[inline]
    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }
}

/// Triangular edge-bit id for `u < v < 8`.
#[inline]
fn edge_bit(u: usize, v: usize) -> u32 {
    debug_assert!(u < v && v < 8);
    1 << (v * (v - 1) / 2 + u)
}

fn decode_edge_mask(mask: u32) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for v in 1..8 {
        for u in 0..v {
            if mask & edge_bit(u, v) != 0 {
                out.push((u, v));
            }
        }
    }
    out
}

/// Visit order for pattern vertices: edge-bearing components first (BFS from
/// the highest-degree vertex of each), isolated vertices last. Keeping each
/// new vertex adjacent to an already-placed one makes the searches cheap.
fn pattern_order(adj: &SmallAdj) -> Vec<usize> {
    let n = adj.n;
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    loop {
        // next seed: unplaced vertex of max degree that has any edge
        let seed = (0..n)
            .filter(|&v| !placed[v] && adj.rows[v] != 0)
            .max_by_key(|&v| (adj.rows[v].count_ones(), std::cmp::Reverse(v)));
        let Some(seed) = seed else { break };
        let mut queue = std::collections::VecDeque::from([seed]);
        placed[seed] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for v in 0..n {
                if adj.adjacent(u, v) && !placed[v] {
                    placed[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    for v in 0..n {
        if !placed[v] {
            order.push(v);
        }
    }
    order
}

/// Positions (within `order`) of earlier-placed pattern neighbours, per position.
fn earlier_neighbors(adj: &SmallAdj, order: &[usize]) -> Vec<Vec<usize>> {
    order
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            (0..i)
                .filter(|&j| adj.adjacent(order[j], w))
                .collect::<Vec<_>>()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Core computation: branch-and-bound over endomorphisms, minimising
// (image edge count, image vertex count). The minimum image is the core.
// ---------------------------------------------------------------------------

struct CoreSearch {
    adj: SmallAdj,
    order: Vec<usize>,
    earlier: Vec<Vec<usize>>,
    imgs: [usize; 8],
    best: (u32, u32, u8, u32), // (edge count, vertex count, vertex mask, edge mask)
}

impl CoreSearch {
    fn run(adj: SmallAdj) -> (u8, u32) {
        let order = pattern_order(&adj);
        let earlier = earlier_neighbors(&adj, &order);
        let mut s = CoreSearch {
            adj,
            order,
            earlier,
            imgs: [0; 8],
            best: (u32::MAX, u32::MAX, 0, 0),
        };
        s.descend(0, 0, 0);
        (s.best.2, s.best.3)
    }

    fn descend(&mut self, depth: usize, vmask: u8, emask: u32) {
        let cur = (emask.count_ones(), vmask.count_ones());
        if cur >= (self.best.0, self.best.1) {
            return; // any completion is at least as large; first-found wins ties
        }
        if depth == self.order.len() {
            self.best = (cur.0, cur.1, vmask, emask);
            return;
        }
        let mut cand: u8 = if self.adj.n == 8 { 0xff } else { (1 << self.adj.n) - 1 };
        for &j in &self.earlier[depth] {
            cand &= self.adj.rows[self.imgs[j]];
        }
        while cand != 0 {
            let x = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let mut em = emask;
            for &j in &self.earlier[depth] {
                let y = self.imgs[j];
                debug_assert!(x != y, "images of adjacent vertices are adjacent");
                em |= edge_bit(x.min(y), x.max(y));
            }
            self.imgs[depth] = x;
            self.descend(depth + 1, vmask | 1 << x, em);
        }
    }
}

/// A homomorphism source: a graph on at most [`MAX_PATTERN_VERTICES`]
/// vertices together with its precomputed core.
///
/// The core is the smallest image of an endomorphism — unique up to
/// isomorphism. Cliques and odd cycles are their own cores; a bipartite
/// pattern with at least one edge has a single edge as its core.
#[derive(Clone, Debug)]
pub struct Pattern {
    graph: Graph,
    core: Graph,
}

impl Pattern {
    pub fn new(graph: Graph) -> Result<Self> {
        if graph.n > MAX_PATTERN_VERTICES {
            return Err(Error::PatternTooLarge {
                vertices: graph.n,
                max: MAX_PATTERN_VERTICES,
            });
        }
        let core = if graph.n == 0 {
            Graph::new(0)
        } else {
            let adj = SmallAdj::from_graph(&graph);
            let (vmask, emask) = CoreSearch::run(adj);
            let verts: Vec<usize> = (0..graph.n).filter(|&v| vmask >> v & 1 == 1).collect();
            let reindex: BTreeMap<usize, usize> =
                verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut core = Graph::new(verts.len());
            for (u, v) in decode_edge_mask(emask) {
                core.add_edge(reindex[&u], reindex[&v]).unwrap();
            }
            core
        };
        Ok(Pattern { graph, core })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn core(&self) -> &Graph {
        &self.core
    }

    /// Whether the pattern is its own core (every endomorphism is onto).
    pub fn is_core(&self) -> bool {
        self.core.n == self.graph.n && self.core.m == self.graph.m
    }

    /// The core as a pattern in its own right (a core is its own core).
    pub fn core_pattern(&self) -> Pattern {
        Pattern {
            graph: self.core.clone(),
            core: self.core.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Homomorphism enumeration into arbitrary hosts.
// ---------------------------------------------------------------------------

struct HomSearch<'a> {
    host: &'a Graph,
    order: Vec<usize>,
    earlier: Vec<Vec<usize>>,
    imgs: Vec<usize>,
    scratch: Vec<Vec<u64>>,
}

impl<'a> HomSearch<'a> {
    fn new(adj: &SmallAdj, order: Vec<usize>, host: &'a Graph) -> Self {
        let earlier = earlier_neighbors(adj, &order);
        let depth = order.len();
        HomSearch {
            host,
            order,
            earlier,
            imgs: vec![0; depth],
            scratch: vec![vec![0; host.words]; depth],
        }
    }

    /// Depth-first over all homomorphisms; `visit` returns false to stop.
    fn run(&mut self, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) -> bool {
        self.descend(0, visit)
    }

    fn descend(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.order, &self.imgs);
        }
        if self.earlier[depth].is_empty() {
            for x in 0..self.host.n {
                self.imgs[depth] = x;
                if !self.descend(depth + 1, visit) {
                    return false;
                }
            }
            return true;
        }
        let first = self.earlier[depth][0];
        let row0 = self.host.row(self.imgs[first]).to_vec();
        self.scratch[depth].copy_from_slice(&row0);
        for &j in &self.earlier[depth][1..] {
            let img = self.imgs[j];
            for (w, s) in self.scratch[depth].iter_mut().enumerate() {
                *s &= self.host.rows[img * self.host.words + w];
            }
        }
        for w in 0..self.host.words {
            let mut bits = self.scratch[depth][w];
            while bits != 0 {
                let x = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                self.imgs[depth] = x;
                if !self.descend(depth + 1, visit) {
                    return false;
                }
            }
        }
        true
    }
}

fn components(adj: &SmallAdj) -> Vec<Vec<usize>> {
    let mut comps = Vec::new();
    let mut placed = vec![false; adj.n];
    for s in 0..adj.n {
        if placed[s] {
            continue;
        }
        let mut comp = vec![s];
        placed[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            for v in 0..adj.n {
                if adj.adjacent(u, v) && !placed[v] {
                    placed[v] = true;
                    comp.push(v);
                }
            }
            i += 1;
        }
        comps.push(comp);
    }
    comps
}

/// Number of homomorphisms from `pattern` into `host` (maps sending every
/// pattern edge to a host edge). Counted per connected component and
/// multiplied; saturates at `u128::MAX`.
pub fn hom_count(pattern: &Pattern, host: &Graph) -> u128 {
    let adj = SmallAdj::from_graph(&pattern.graph);
    let mut total: u128 = 1;
    for comp in components(&adj) {
        let comp_count: u128 = if comp.len() == 1 && adj.rows[comp[0]] == 0 {
            host.n as u128
        } else {
            let order = order_within(&adj, &comp);
            let mut count: u128 = 0;
            HomSearch::new(&adj, order, host).run(&mut |_, _| {
                count = count.saturating_add(1);
                true
            });
            count
        };
        total = total.saturating_mul(comp_count);
        if total == 0 {
            return 0;
        }
    }
    total
}

/// BFS order restricted to one component, highest-degree seed first.
fn order_within(adj: &SmallAdj, comp: &[usize]) -> Vec<usize> {
    let in_comp: Vec<bool> = (0..adj.n).map(|v| comp.contains(&v)).collect();
    let seed = *comp
        .iter()
        .max_by_key(|&&v| (adj.rows[v].count_ones(), std::cmp::Reverse(v)))
        .unwrap();
    let mut order = Vec::with_capacity(comp.len());
    let mut placed = vec![false; adj.n];
    let mut queue = std::collections::VecDeque::from([seed]);
    placed[seed] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for v in 0..adj.n {
            if adj.adjacent(u, v) && in_comp[v] && !placed[v] {
                placed[v] = true;
                queue.push_back(v);
            }
        }
    }
    order
}

/// True when no homomorphism from `pattern` into `host` exists.
pub fn is_hom_free(pattern: &Pattern, host: &Graph) -> bool {
    let adj = SmallAdj::from_graph(&pattern.graph);
    if pattern.graph.n == 0 {
        return false; // the empty map always exists
    }
    for comp in components(&adj) {
        if comp.len() == 1 && adj.rows[comp[0]] == 0 {
            if host.n == 0 {
                return true;
            }
            continue;
        }
        let order = order_within(&adj, &comp);
        let mut found = false;
        HomSearch::new(&adj, order, host).run(&mut |_, _| {
            found = true;
            false
        });
        if !found {
            return true;
        }
    }
    false
}

/// A subgraph of a host arising as the image of a pattern homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCopy {
    /// Image vertices, ascending.
    pub vertices: Vec<usize>,
    /// Image edges `(u, v)` with `u < v`, ascending.
    pub edges: Vec<(usize, usize)>,
}

/// Distinct homomorphic images of `pattern` in `host`, deduplicated by edge
/// set and returned in ascending edge-set order.
pub fn hom_copies(pattern: &Pattern, host: &Graph) -> Vec<HomCopy> {
    let adj = SmallAdj::from_graph(&pattern.graph);
    if pattern.graph.n == 0 {
        return Vec::new();
    }
    let order = pattern_order(&adj);
    let pattern_edges = pattern.graph.edges();
    let mut seen: BTreeMap<Vec<(usize, usize)>, HomCopy> = BTreeMap::new();
    HomSearch::new(&adj, order, host).run(&mut |order, imgs| {
        let mut pos = [0usize; 8];
        for (i, &w) in order.iter().enumerate() {
            pos[w] = i;
        }
        let mut edges: Vec<(usize, usize)> = pattern_edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (imgs[pos[a]], imgs[pos[b]]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        seen.entry(edges.clone()).or_insert_with(|| {
            let mut vertices: Vec<usize> = imgs.to_vec();
            vertices.sort_unstable();
            vertices.dedup();
            HomCopy { vertices, edges }
        });
        true
    });
    seen.into_values().collect()
}

/// True iff every edge of `host` lies in exactly one homomorphic copy of the
/// pattern's core. This is the hypothesis the partial binary blow-up needs.
pub fn unique_copy_property(host: &Graph, pattern: &Pattern) -> bool {
    let copies = hom_copies(&pattern.core_pattern(), host);
    let mut coverage: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for copy in &copies {
        for &e in &copy.edges {
            *coverage.entry(e).or_insert(0) += 1;
        }
    }
    host.edges()
        .into_iter()
        .all(|e| coverage.get(&e) == Some(&1))
}

/// Isomorphism test for small graphs (both at most 8 vertices).
pub fn are_isomorphic(a: &Graph, b: &Graph) -> Result<bool> {
    for g in [a, b] {
        if g.n > MAX_PATTERN_VERTICES {
            return Err(Error::PatternTooLarge {
                vertices: g.n,
                max: MAX_PATTERN_VERTICES,
            });
        }
    }
    if a.n != b.n || a.m != b.m {
        return Ok(false);
    }
    let mut da: Vec<usize> = (0..a.n).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..b.n).map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(false);
    }
    let adj_a = SmallAdj::from_graph(a);
    let adj_b = SmallAdj::from_graph(b);
    let mut imgs = [usize::MAX; 8];
    let mut used: u8 = 0;
    Ok(extend_iso(&adj_a, &adj_b, 0, &mut imgs, &mut used))
}

fn extend_iso(a: &SmallAdj, b: &SmallAdj, v: usize, imgs: &mut [usize; 8], used: &mut u8) -> bool {
    if v == a.n {
        return true;
    }
    for x in 0..b.n {
        if *used >> x & 1 == 1 {
            continue;
        }
        if a.rows[v].count_ones() != b.rows[x].count_ones() {
            continue;
        }
        let consistent = (0..v).all(|u| a.adjacent(u, v) == b.adjacent(imgs[u], x));
        if consistent {
            imgs[v] = x;
            *used |= 1 << x;
            if extend_iso(a, b, v + 1, imgs, used) {
                return true;
            }
            *used &= !(1 << x);
        }
    }
    false
}
