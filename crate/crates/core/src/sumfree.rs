//! Sum-free constructions in F_p^n: tricolor triples (sequences x, y, z with
//! x_i + y_j + z_k = 0 exactly on the diagonal), their expansion into
//! solution-free set triples in a lifted space, the missed-mass audit for
//! linear compressions of the expansion, and the variational constant c_p.

use crate::arith::removal::count_solutions;
use crate::arith::space::{DensityFunction, FpnSpace};
use crate::arith::subspace::rref;
use crate::{Error, Result};

pub const MAX_VERIFY_TRIPLES: usize = 10_000_000;
pub const MAX_EXHAUSTIVE_POINTS: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TricolorTriple {
    space: FpnSpace,
    x: Vec<usize>,
    y: Vec<usize>,
    z: Vec<usize>,
}

impl TricolorTriple {
    pub fn new(space: &FpnSpace, x: Vec<usize>, y: Vec<usize>, z: Vec<usize>) -> Result<Self> {
        if x.len() != y.len() || x.len() != z.len() {
            return Err(Error::InvalidSet {
                reason: format!(
                    "sequence lengths differ: {}, {}, {}",
                    x.len(),
                    y.len(),
                    z.len()
                ),
            });
        }
        for &v in x.iter().chain(&y).chain(&z) {
            if v >= space.size() {
                return Err(Error::InvalidSet {
                    reason: format!("point {v} outside a space of {} points", space.size()),
                });
            }
        }
        Ok(TricolorTriple {
            space: space.clone(),
            x,
            y,
            z,
        })
    }

    pub fn space(&self) -> &FpnSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn z(&self) -> &[usize] {
        &self.z
    }
}

/// Exhaustively check both directions: every diagonal triple sums to zero
/// and no off-diagonal one does.
pub fn verify_tricolor(t: &TricolorTriple) -> Result<bool> {
    let l = t.len();
    if l.saturating_pow(3) > MAX_VERIFY_TRIPLES {
        return Err(Error::InstanceTooLarge {
            what: "triples to verify",
            value: l.saturating_pow(3),
            max: MAX_VERIFY_TRIPLES,
        });
    }
    let s = &t.space;
    for i in 0..l {
        for j in 0..l {
            let xy = s.add(t.x[i], t.y[j]);
            for k in 0..l {
                let zero = s.add(xy, t.z[k]) == 0;
                if zero != (i == j && j == k) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TricolorSearchMode {
    /// Full branch-and-bound; the returned length is the true optimum.
    /// Only for p^n ≤ 9.
    Exhaustive,
    /// Single lexicographic pass, adding every candidate pair that keeps
    /// the triple valid, spending at most `budget` feasibility checks.
    Greedy { budget: u64 },
}

#[derive(Clone, Debug)]
pub struct TricolorSearchOutcome {
    pub triple: TricolorTriple,
    /// True only for completed exhaustive searches.
    pub optimal: bool,
    /// True when the greedy budget ran out before the scan finished.
    pub budget_exhausted: bool,
}

/// Incremental state. A triple is determined by its (x_i, y_i) pairs since
/// z_i = -(x_i + y_i); validity says the diagonal sums are pairwise distinct
/// and every cross sum x_i + y_j (i ≠ j) avoids all diagonal sums.
struct PairSearch<'a> {
    space: &'a FpnSpace,
    chosen: Vec<(usize, usize)>,
    is_sum: Vec<bool>,
    cross_count: Vec<u32>,
}

impl<'a> PairSearch<'a> {
    fn new(space: &'a FpnSpace) -> Self {
        PairSearch {
            space,
            chosen: Vec::new(),
            is_sum: vec![false; space.size()],
            cross_count: vec![0; space.size()],
        }
    }

    fn try_add(&mut self, a: usize, b: usize) -> bool {
        let s = self.space.add(a, b);
        if self.is_sum[s] || self.cross_count[s] > 0 {
            return false;
        }
        for &(ai, bi) in &self.chosen {
            for c in [self.space.add(ai, b), self.space.add(a, bi)] {
                if self.is_sum[c] || c == s {
                    return false;
                }
            }
        }
        for i in 0..self.chosen.len() {
            let (ai, bi) = self.chosen[i];
            self.cross_count[self.space.add(ai, b)] += 1;
            self.cross_count[self.space.add(a, bi)] += 1;
        }
        self.is_sum[s] = true;
        self.chosen.push((a, b));
        true
    }

    fn remove_last(&mut self) {
        let (a, b) = self.chosen.pop().expect("remove matches a successful add");
        self.is_sum[self.space.add(a, b)] = false;
        for &(ai, bi) in &self.chosen {
            self.cross_count[self.space.add(ai, b)] -= 1;
            self.cross_count[self.space.add(a, bi)] -= 1;
        }
    }

    fn into_triple(self) -> TricolorTriple {
        let (x, y): (Vec<usize>, Vec<usize>) = self.chosen.iter().copied().unzip();
        let z = x
            .iter()
            .zip(&y)
            .map(|(&a, &b)| self.space.neg(self.space.add(a, b)))
            .collect();
        TricolorTriple::new(self.space, x, y, z).expect("points are in range")
    }
}

pub fn tricolor_search(
    space: &FpnSpace,
    mode: TricolorSearchMode,
) -> Result<TricolorSearchOutcome> {
    let size = space.size();
    let outcome = match mode {
        TricolorSearchMode::Exhaustive => {
            if size > MAX_EXHAUSTIVE_POINTS {
                return Err(Error::InstanceTooLarge {
                    what: "points for exhaustive tricolor search",
                    value: size,
                    max: MAX_EXHAUSTIVE_POINTS,
                });
            }
            let mut state = PairSearch::new(space);
            let mut best: Vec<(usize, usize)> = Vec::new();
            // any valid triple can be translated so that its first pair is
            // (0, 0), so the root choice is forced
            if size > 0 && state.try_add(0, 0) {
                dfs(&mut state, 1, &mut best);
                state.remove_last();
            }
            for &(a, b) in &best {
                let ok = state.try_add(a, b);
                debug_assert!(ok);
            }
            TricolorSearchOutcome {
                triple: state.into_triple(),
                optimal: true,
                budget_exhausted: false,
            }
        }
        TricolorSearchMode::Greedy { budget } => {
            let mut state = PairSearch::new(space);
            let mut spent = 0u64;
            let mut exhausted = false;
            'scan: for a in 0..size {
                for b in 0..size {
                    if spent >= budget {
                        exhausted = true;
                        break 'scan;
                    }
                    spent += 1;
                    state.try_add(a, b);
                }
            }
            TricolorSearchOutcome {
                triple: state.into_triple(),
                optimal: false,
                budget_exhausted: exhausted,
            }
        }
    };
    debug_assert!(verify_tricolor(&outcome.triple)?);
    Ok(outcome)
}

fn dfs(state: &mut PairSearch, next_pair: usize, best: &mut Vec<(usize, usize)>) {
    if state.chosen.len() > best.len() {
        *best = state.chosen.clone();
    }
    let size = state.space.size();
    let total_pairs = size * size;
    // diagonal sums are distinct, so a triple never exceeds `size`
    if state.chosen.len() == size {
        return;
    }
    for idx in next_pair..total_pairs {
        if state.chosen.len() + (total_pairs - idx) <= best.len() {
            return;
        }
        let (a, b) = (idx / size, idx % size);
        if state.try_add(a, b) {
            dfs(state, idx + 1, best);
            state.remove_last();
        }
    }
}

/// The expansion of a tricolor triple into F_p^(n+l): above each x_i sit all
/// points whose i-th appended coordinate stays in a third of the digit range,
/// offset for the Z side so that appended coordinates can never sum to zero.
#[derive(Clone, Debug)]
pub struct ExpandedSets {
    lifted: FpnSpace,
    base_n: usize,
    l: usize,
    x_blocks: Vec<Vec<usize>>,
    y_blocks: Vec<Vec<usize>>,
    z_blocks: Vec<Vec<usize>>,
}

impl ExpandedSets {
    pub fn lifted_space(&self) -> &FpnSpace {
        &self.lifted
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn x_blocks(&self) -> &[Vec<usize>] {
        &self.x_blocks
    }

    pub fn y_blocks(&self) -> &[Vec<usize>] {
        &self.y_blocks
    }

    pub fn z_blocks(&self) -> &[Vec<usize>] {
        &self.z_blocks
    }

    fn flat(blocks: &[Vec<usize>]) -> Vec<usize> {
        let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn x_all(&self) -> Vec<usize> {
        Self::flat(&self.x_blocks)
    }

    pub fn y_all(&self) -> Vec<usize> {
        Self::flat(&self.y_blocks)
    }

    pub fn z_all(&self) -> Vec<usize> {
        Self::flat(&self.z_blocks)
    }

    pub fn indicators(&self) -> (DensityFunction, DensityFunction, DensityFunction) {
        let mk = |els: Vec<usize>| {
            DensityFunction::indicator(&self.lifted, &els).expect("points are in range")
        };
        (mk(self.x_all()), mk(self.y_all()), mk(self.z_all()))
    }
}

/// Digit third used by the expansion: {0..⌊(p−2)/3⌋} for X and Y blocks,
/// shifted up by one for Z blocks.
pub fn digit_third(p: usize) -> usize {
    (p - 2) / 3
}

pub fn expand_construction(t: &TricolorTriple) -> Result<ExpandedSets> {
    // the blocks make sense (and the missed-mass bound holds) as soon as the
    // diagonal sums vanish; the full off-diagonal condition is what makes the
    // expansion triangle-free, and verify_expansion checks that separately
    for i in 0..t.len() {
        let s = t.space.add(t.space.add(t.x[i], t.y[i]), t.z[i]);
        if s != 0 {
            return Err(Error::InvalidSet {
                reason: format!("diagonal sum {i} is nonzero"),
            });
        }
    }
    let base = t.space();
    let (p, n, l) = (base.p(), base.n(), t.len());
    let lifted = FpnSpace::new(p, n + l)?;
    let block_size = lifted.size() / base.size(); // p^l
    let q = digit_third(p);

    let build = |points: &[usize], lo: usize, hi: usize| -> Vec<Vec<usize>> {
        points
            .iter()
            .enumerate()
            .map(|(i, &pt)| {
                // appended coordinate i has place value p^(l-1-i) within the block
                let place = block_size / p.pow(i as u32 + 1);
                (0..block_size)
                    .filter(|w| {
                        let d = w / place % p;
                        lo <= d && d <= hi
                    })
                    .map(|w| pt * block_size + w)
                    .collect()
            })
            .collect()
    };
    let x_blocks = build(&t.x, 0, q);
    let y_blocks = build(&t.y, 0, q);
    let z_blocks = build(&t.z, 1, q + 1);
    Ok(ExpandedSets {
        lifted,
        base_n: n,
        l,
        x_blocks,
        y_blocks,
        z_blocks,
    })
}

pub const MAX_EXPANSION_VERIFY_POINTS: usize = 1 << 12;

/// Exhaustive triangle-freeness scan of the expanded sets.
pub fn verify_expansion(es: &ExpandedSets) -> Result<bool> {
    let size = es.lifted.size();
    if size > MAX_EXPANSION_VERIFY_POINTS {
        return Err(Error::InstanceTooLarge {
            what: "points for exhaustive expansion verification",
            value: size,
            max: MAX_EXPANSION_VERIFY_POINTS,
        });
    }
    let mut in_z = vec![false; size];
    for w in es.z_all() {
        in_z[w] = true;
    }
    for a in es.x_all() {
        let na = es.lifted.neg(a);
        for &b in &es.y_all() {
            if in_z[es.lifted.sub(na, b)] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An m×k matrix over F_p acting on column vectors of digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    p: usize,
    entries: Vec<Vec<u8>>,
}

impl LinearMap {
    pub fn new(p: usize, entries: Vec<Vec<u8>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::BadLinearMap {
                reason: "no rows".into(),
            });
        }
        let cols = entries[0].len();
        if cols == 0 {
            return Err(Error::BadLinearMap {
                reason: "no columns".into(),
            });
        }
        for row in &entries {
            if row.len() != cols {
                return Err(Error::BadLinearMap {
                    reason: "ragged rows".into(),
                });
            }
            if row.iter().any(|&d| d as usize >= p) {
                return Err(Error::BadLinearMap {
                    reason: format!("entry not below p = {p}"),
                });
            }
        }
        Ok(LinearMap { p, entries })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn rank(&self) -> usize {
        rref(self.p, self.entries.clone()).0.len()
    }

    pub fn apply(&self, input: &FpnSpace, output: &FpnSpace, x: usize) -> Result<usize> {
        if input.p() != self.p || output.p() != self.p {
            return Err(Error::BadLinearMap {
                reason: format!("matrix over F_{} applied across other primes", self.p),
            });
        }
        if input.n() != self.cols() || output.n() != self.rows() {
            return Err(Error::BadLinearMap {
                reason: format!(
                    "{}x{} matrix applied to F_p^{} -> F_p^{}",
                    self.rows(),
                    self.cols(),
                    input.n(),
                    output.n()
                ),
            });
        }
        let xd = input.digits(x);
        let out: Vec<u8> = self
            .entries
            .iter()
            .map(|row| {
                (row.iter()
                    .zip(&xd)
                    .map(|(&a, &b)| a as usize * b as usize)
                    .sum::<usize>()
                    % self.p) as u8
            })
            .collect();
        output.from_digits(&out)
    }
}

#[derive(Clone, Debug)]
pub struct MissedMass {
    /// Elements of the expansion that φ fails to carry into the targets,
    /// summed over the three sides.
    pub missed: u64,
    /// (l − m)·p^l/4, negative when m ≥ l.
    pub bound: f64,
    pub per_side: [u64; 3],
}

impl MissedMass {
    pub fn satisfied(&self) -> bool {
        self.missed as f64 >= self.bound
    }
}

/// Count how much of the expansion any linear compression φ into F_p^m must
/// miss relative to triangle-free targets X'', Y'', Z''.
pub fn missed_mass_audit(
    es: &ExpandedSets,
    phi: &LinearMap,
    xpp: &DensityFunction,
    ypp: &DensityFunction,
    zpp: &DensityFunction,
) -> Result<MissedMass> {
    let target_space = xpp.space();
    target_space.check_same(ypp.space())?;
    target_space.check_same(zpp.space())?;
    if count_solutions(xpp, ypp, zpp)? != 0 {
        return Err(Error::TargetNotTriangleFree);
    }
    let lifted = es.lifted_space();
    if phi.cols() != lifted.n() || phi.rows() != target_space.n() {
        return Err(Error::BadLinearMap {
            reason: format!(
                "expected a {}x{} matrix, got {}x{}",
                target_space.n(),
                lifted.n(),
                phi.rows(),
                phi.cols()
            ),
        });
    }
    let miss_count = |points: Vec<usize>, target: &DensityFunction| -> Result<u64> {
        let mut missed = 0;
        for w in points {
            if target.value(phi.apply(lifted, target_space, w)?) == 0.0 {
                missed += 1;
            }
        }
        Ok(missed)
    };
    let per_side = [
        miss_count(es.x_all(), xpp)?,
        miss_count(es.y_all(), ypp)?,
        miss_count(es.z_all(), zpp)?,
    ];
    let l = es.l() as f64;
    let m = target_space.n() as f64;
    let bound = (l - m) * (lifted.p() as f64).powi(es.l() as i32) / 4.0;
    Ok(MissedMass {
        missed: per_side.iter().sum(),
        bound,
        per_side,
    })
}

// ---------------------------------------------------------------------------
// The variational constant c_p.
// ---------------------------------------------------------------------------

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub const MAX_CP_PRIME: usize = 199;

/// φ_p(t) = t^(−(p−1)/3)·(1 + t + ... + t^(p−1)) on (0,1), via the closed
/// form of the geometric sum.
pub fn cp_objective(p: usize, t: f64) -> f64 {
    debug_assert!(t > 0.0 && t < 1.0);
    t.powf(-((p as f64 - 1.0) / 3.0)) * (1.0 - t.powi(p as i32)) / (1.0 - t)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

#[derive(Clone, Copy, Debug)]
pub struct CpOutcome {
    pub c: f64,
    pub minimizer: f64,
    pub min_value: f64,
}

fn cp_from_min(p: usize, minimizer: f64, min_value: f64) -> CpOutcome {
    CpOutcome {
        c: 1.0 - min_value.ln() / (p as f64).ln(),
        minimizer,
        min_value,
    }
}

/// c_p = 1 − log_p(inf φ_p), by golden-section search to 1e−10.
pub fn cp_constant(p: usize) -> Result<CpOutcome> {
    if !is_prime(p) || p > MAX_CP_PRIME {
        return Err(Error::UnsupportedPrime {
            p: p as u64,
            reason: "c_p is tabulated for primes up to 199",
        });
    }
    let (t, v) = golden_min(|t| cp_objective(p, t), 1e-9, 1.0 - 1e-9, 1e-10);
    Ok(cp_from_min(p, t, v))
}

/// The same constant from a uniform grid over (0,1); an independent check
/// on the golden-section minimizer.
pub fn cp_constant_grid(p: usize, resolution: usize) -> Result<CpOutcome> {
    if !is_prime(p) || p > MAX_CP_PRIME {
        return Err(Error::UnsupportedPrime {
            p: p as u64,
            reason: "c_p is tabulated for primes up to 199",
        });
    }
    let mut best = (0.5, f64::INFINITY);
    for i in 1..resolution {
        let t = i as f64 / resolution as f64;
        let v = cp_objective(p, t);
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(cp_from_min(p, best.0, best.1))
}

/// inf over x > 0 of e^(x/3)·(1−e^(−x))/x, the large-p limit shape of φ_p
/// under t = 1 − x/p; its negative log sits just above 0.17.
pub fn asymptotic_infimum() -> f64 {
    golden_min(|x| (x / 3.0).exp() * (1.0 - (-x).exp()) / x, 1e-6, 60.0, 1e-12).1
}

pub fn primes_up_to(limit: usize) -> Vec<usize> {
    (2..=limit).filter(|&p| is_prime(p)).collect()
}
