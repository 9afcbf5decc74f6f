//! Entropy and mutual-information tooling, in natural log throughout (a
//! fair coin carries ln 2 nats). Counts stay exact integers until the last
//! step; the only floating-point subtlety is `ln 2 - H(Bernoulli(q))` near
//! q = 1/2, which is computed in KL form to dodge the cancellation.

use std::collections::BTreeMap;

use crate::approx::VertexMap;
use crate::construct::Blowup;
use crate::{Error, Result};

pub const LN_2: f64 = std::f64::consts::LN_2;

const WEIGHT_TOL: f64 = 1e-12;

fn entropy_of(ps: impl Iterator<Item = f64>) -> f64 {
    ps.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// A probability vector: non-negative weights summing to 1 within 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution {
    weights: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadDistribution {
                reason: "no outcomes".into(),
            });
        }
        if let Some((i, &w)) = weights.iter().enumerate().find(|(_, &w)| !(w >= 0.0)) {
            return Err(Error::BadDistribution {
                reason: format!("weight {w} at index {i} is negative or NaN"),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::BadDistribution {
                reason: format!("weights sum to {total}, not 1"),
            });
        }
        Ok(FiniteDistribution { weights })
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::BadDistribution {
                reason: "all counts are zero".into(),
            });
        }
        Ok(FiniteDistribution {
            weights: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Shannon entropy in nats; 0 ln 0 = 0.
    pub fn entropy(&self) -> f64 {
        entropy_of(self.weights.iter().copied())
    }
}

/// A joint distribution on a rows × cols grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || probs.len() != rows * cols {
            return Err(Error::BadDistribution {
                reason: format!("{rows}x{cols} grid with {} entries", probs.len()),
            });
        }
        FiniteDistribution::new(probs.clone())?; // same validity rules
        Ok(JointDistribution { rows, cols, probs })
    }

    pub fn from_counts(rows: usize, cols: usize, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::BadDistribution {
                reason: "all counts are zero".into(),
            });
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        JointDistribution::new(rows, cols, probs)
    }

    #[inline]
    pub fn prob(&self, r: usize, c: usize) -> f64 {
        self.probs[r * self.cols + c]
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.prob(r, c)).sum())
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.prob(r, c)).sum())
            .collect()
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(self.probs.iter().copied())
    }

    /// I(X;Y) = H(X) + H(Y) - H(X,Y).
    pub fn mutual_information(&self) -> f64 {
        entropy_of(self.row_marginal().into_iter()) + entropy_of(self.col_marginal().into_iter())
            - self.entropy()
    }
}

/// H(Bernoulli(q)) in nats.
pub fn bernoulli_entropy(q: f64) -> f64 {
    entropy_of([q, 1.0 - q].into_iter())
}

/// ln 2 - H(Bernoulli(q)), computed as KL(Bernoulli(q) || Bernoulli(1/2)) =
/// q ln 2q + (1-q) ln 2(1-q). The direct difference cancels catastrophically
/// near q = 1/2; this form stays accurate (and non-negative) everywhere.
pub fn ln2_minus_bernoulli_entropy(q: f64) -> f64 {
    let t = q - 0.5;
    let term = |p: f64, x: f64| if p == 0.0 { 0.0 } else { p * x.ln_1p() };
    (term(q, 2.0 * t) + term(1.0 - q, -2.0 * t)).max(0.0)
}

/// The two sides of the bisection inequality: |q - 1/2| on the left,
/// sqrt((ln 2 - H(Bernoulli(q))) / 2) on the right. The left side never
/// exceeds the right.
pub fn pinsker_gap(q: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain {
            what: "bernoulli parameter",
            value: q,
            domain: "[0, 1]",
        });
    }
    Ok(((q - 0.5).abs(), (ln2_minus_bernoulli_entropy(q) / 2.0).sqrt()))
}

/// A subset is η-nearly bisected by the P0/P1 split when the entropy of its
/// P0-share is at least ln 2 - η². Counts in, verdict out.
pub fn nearly_bisected(q_size: u64, q_in_p0: u64, eta: f64) -> Result<bool> {
    if q_size == 0 {
        return Err(Error::EmptySubset);
    }
    if q_in_p0 > q_size {
        return Err(Error::BadBisection {
            reason: format!("{q_in_p0} of {q_size} elements in P0"),
        });
    }
    if !(eta > 0.0) {
        return Err(Error::EtaOutOfRange {
            eta,
            range: "(0, inf)",
        });
    }
    Ok(ln2_minus_bernoulli_entropy(q_in_p0 as f64 / q_size as f64) <= eta * eta)
}

/// Ground set 0..n with a two-sided split (P0/P1) and a partition into
/// parts Q_0..Q_{k-1}.
#[derive(Clone, Debug)]
pub struct BisectionInstance {
    side: Vec<u8>,
    part: Vec<usize>,
    k: usize,
}

impl BisectionInstance {
    pub fn new(side: Vec<u8>, part: Vec<usize>) -> Result<Self> {
        if side.len() != part.len() || side.is_empty() {
            return Err(Error::BadBisection {
                reason: format!("{} side labels for {} part labels", side.len(), part.len()),
            });
        }
        if side.iter().any(|&s| s > 1) {
            return Err(Error::BadBisection {
                reason: "side labels must be 0 or 1".into(),
            });
        }
        let k = part.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; k];
        for &j in &part {
            seen[j] = true;
        }
        if let Some(j) = seen.iter().position(|&s| !s) {
            return Err(Error::BadBisection {
                reason: format!("part {j} is empty"),
            });
        }
        Ok(BisectionInstance { side, part, k })
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    pub fn parts(&self) -> usize {
        self.k
    }

    fn part_counts(&self) -> Vec<(u64, u64)> {
        // (size, in P0) per part
        let mut counts = vec![(0u64, 0u64); self.k];
        for (i, &j) in self.part.iter().enumerate() {
            counts[j].0 += 1;
            if self.side[i] == 0 {
                counts[j].1 += 1;
            }
        }
        counts
    }
}

/// Outcome of auditing one bisection instance at a given η.
#[derive(Clone, Debug)]
pub struct BisectionAudit {
    /// I(side; part) under a uniform element.
    pub mutual_info: f64,
    /// Indices of η-nearly-bisected parts.
    pub nb_parts: Vec<usize>,
    /// Fraction of the ground set inside nearly-bisected parts.
    pub nb_fraction: f64,
    /// P0 elements, ascending, indexing `mu`.
    pub p0_elements: Vec<usize>,
    /// Law of: draw a nearly-bisected part with probability ∝ its size,
    /// then a uniform element of its P0 half.
    pub mu: FiniteDistribution,
    /// Total variation distance from `mu` to uniform on P0.
    pub tv_to_uniform: f64,
}

/// Audit the two-stage sampling law of an evenly split ground set. When the
/// measured mutual information is at most η³, the nearly-bisected mass is at
/// least (1-η) of the ground set and `tv_to_uniform` is at most 4η; both
/// conclusions are recomputed here from exact counts so tests can check them.
pub fn bisection_audit(inst: &BisectionInstance, eta: f64) -> Result<BisectionAudit> {
    if !(eta > 0.0 && eta < 0.2) {
        return Err(Error::EtaOutOfRange {
            eta,
            range: "(0, 1/5)",
        });
    }
    let n = inst.len() as u64;
    let p0_total: u64 = inst.side.iter().filter(|&&s| s == 0).count() as u64;
    if 2 * p0_total != n {
        return Err(Error::BadBisection {
            reason: format!("|P0| = {p0_total} of {n}; the audit needs an even split"),
        });
    }
    let counts = inst.part_counts();
    let mut joint = vec![0u64; 2 * inst.k];
    for (j, &(size, in_p0)) in counts.iter().enumerate() {
        joint[j] = in_p0; // row 0 = P0
        joint[inst.k + j] = size - in_p0;
    }
    let mutual_info = JointDistribution::from_counts(2, inst.k, &joint)?.mutual_information();

    let mut nb_parts = Vec::new();
    let mut nb_mass = 0u64;
    for (j, &(size, in_p0)) in counts.iter().enumerate() {
        if nearly_bisected(size, in_p0, eta)? {
            nb_parts.push(j);
            nb_mass += size;
        }
    }
    if nb_parts.is_empty() {
        return Err(Error::NoNearlyBisectedPart);
    }

    let is_nb: Vec<bool> = (0..inst.k)
        .map(|j| nb_parts.binary_search(&j).is_ok())
        .collect();
    let p0_elements: Vec<usize> = (0..inst.len()).filter(|&i| inst.side[i] == 0).collect();
    let mut mu_weights = Vec::with_capacity(p0_elements.len());
    for &u in &p0_elements {
        let j = inst.part[u];
        let w = if is_nb[j] {
            counts[j].0 as f64 / (nb_mass as f64 * counts[j].1 as f64)
        } else {
            0.0
        };
        mu_weights.push(w);
    }
    // nearly-bisected parts always have a non-empty P0 half (share >= 1/2 - η/√2 > 0)
    let mu = FiniteDistribution::new(mu_weights)?;
    let uniform = 1.0 / p0_elements.len() as f64;
    let tv_to_uniform = 0.5 * mu.weights().iter().map(|w| (w - uniform).abs()).sum::<f64>();

    Ok(BisectionAudit {
        mutual_info,
        nb_parts,
        nb_fraction: nb_mass as f64 / n as f64,
        p0_elements,
        mu,
        tv_to_uniform,
    })
}

// ---------------------------------------------------------------------------
// Blow-up audits: mutual information between one membership bit and the
// image of a vertex map, over a single base vertex's fibre.
// ---------------------------------------------------------------------------

/// I(bit i ; φ) over the fibre of base vertex `v` in the lifted graph.
pub fn blowup_mutual_info(bu: &Blowup, phi: &VertexMap, v: usize, i: usize) -> Result<f64> {
    if phi.source_n() != bu.graph().n() {
        return Err(Error::MapMismatch {
            reason: format!(
                "map covers {} vertices, lifted graph has {}",
                phi.source_n(),
                bu.graph().n()
            ),
        });
    }
    if v >= bu.base().n() {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            n: bu.base().n(),
        });
    }
    if i >= bu.m() {
        return Err(Error::VertexOutOfRange {
            vertex: i,
            n: bu.m(),
        });
    }
    let cols = phi.target_n();
    let mut counts = vec![0u64; 2 * cols];
    for bits in 0..1usize << bu.m() {
        let bit = bits >> i & 1;
        let y = phi.get(bu.vertex_id(v, bits));
        counts[bit * cols + y] += 1;
    }
    Ok(JointDistribution::from_counts(2, cols, &counts)?.mutual_information())
}

/// Per-base-vertex chain inequality: the membership-bit informations sum to
/// at most the image entropy, which is at most ln of the target size.
#[derive(Clone, Debug)]
pub struct ChainAuditRow {
    pub base_vertex: usize,
    pub mi_sum: f64,
    pub h_image: f64,
    pub log_target: f64,
    pub ok: bool,
}

pub fn chain_bound_audit(bu: &Blowup, phi: &VertexMap) -> Result<Vec<ChainAuditRow>> {
    const TOL: f64 = 1e-9;
    let cols = phi.target_n();
    let mut rows = Vec::with_capacity(bu.base().n());
    for v in 0..bu.base().n() {
        let mut mi_sum = 0.0;
        for i in 0..bu.m() {
            mi_sum += blowup_mutual_info(bu, phi, v, i)?;
        }
        let mut counts = vec![0u64; cols];
        for bits in 0..1usize << bu.m() {
            counts[phi.get(bu.vertex_id(v, bits))] += 1;
        }
        let h_image = FiniteDistribution::from_counts(&counts)?.entropy();
        let log_target = (cols as f64).ln();
        rows.push(ChainAuditRow {
            base_vertex: v,
            mi_sum,
            h_image,
            log_target,
            ok: mi_sum <= h_image + TOL && h_image <= log_target + TOL,
        });
    }
    Ok(rows)
}

/// Outcome of the per-copy low-information audit.
#[derive(Clone, Debug)]
pub struct DaggerAudit {
    /// Whether every base vertex of the copy has I(bit ; φ) ≤ η.
    pub hypothesis_holds: bool,
    /// Largest per-vertex mutual information seen in the copy.
    pub max_mi: f64,
    /// Lifted edges of this copy whose endpoints do not map to a target edge.
    pub violated_edges: u64,
    /// 2^(2m-3); when the hypothesis holds, `violated_edges` reaches this.
    pub threshold: f64,
}

/// Audit one copy: if the map carries little information about this copy's
/// membership bit on every vertex of the copy, a quarter of the copy's
/// lifted edges must be violated.
pub fn claim_dagger_audit(
    bu: &Blowup,
    target: &crate::graph::Graph,
    phi: &VertexMap,
    copy: usize,
    eta: f64,
) -> Result<DaggerAudit> {
    if copy >= bu.copies().len() {
        return Err(Error::VertexOutOfRange {
            vertex: copy,
            n: bu.copies().len(),
        });
    }
    if phi.target_n() != target.n() {
        return Err(Error::MapMismatch {
            reason: format!(
                "map targets {} vertices, target graph has {}",
                phi.target_n(),
                target.n()
            ),
        });
    }
    if !(eta > 0.0) {
        return Err(Error::EtaOutOfRange {
            eta,
            range: "(0, inf)",
        });
    }
    let the_copy = &bu.copies()[copy];
    let mut max_mi: f64 = 0.0;
    for &a in &the_copy.vertices {
        max_mi = max_mi.max(blowup_mutual_info(bu, phi, a, copy)?);
    }
    let hypothesis_holds = max_mi <= eta;

    let m = bu.m();
    let mut violated_edges = 0u64;
    for &(a, b) in &the_copy.edges {
        let s = bu
            .parts()
            .side(copy, (a, b))
            .expect("copy edges are keyed in the bipartition");
        for x in 0..1usize << m {
            if (x >> copy) as u8 & 1 != s {
                continue;
            }
            for y in 0..1usize << m {
                if (y >> copy) as u8 & 1 != s {
                    continue;
                }
                let (p, q) = (phi.get(bu.vertex_id(a, x)), phi.get(bu.vertex_id(b, y)));
                if p == q || !target.has_edge(p, q) {
                    violated_edges += 1;
                }
            }
        }
    }
    Ok(DaggerAudit {
        hypothesis_holds,
        max_mi,
        violated_edges,
        threshold: 2f64.powi(2 * m as i32 - 3),
    })
}

/// Build a map that is constant on each membership cell of `copy` (the
/// pairs (base vertex, bit value)); handy for exhaustive audits.
pub fn cell_constant_map(
    bu: &Blowup,
    copy: usize,
    target_n: usize,
    cell_values: &BTreeMap<(usize, u8), usize>,
) -> Result<VertexMap> {
    let mut table = vec![0usize; bu.graph().n()];
    for id in 0..bu.graph().n() {
        let (base, bits) = bu.label(id);
        let bit = (bits >> copy & 1) as u8;
        let &value = cell_values.get(&(base, bit)).ok_or(Error::MapMismatch {
            reason: format!("no cell value for base {base}, bit {bit}"),
        })?;
        table[id] = value;
    }
    VertexMap::new(bu.graph().n(), target_n, table)
}
