//! Removal in F_p^n: given indicator sets X, Y, Z, the triangles are the
//! solutions of x + y + z = 0 with one coordinate in each set, and a removal
//! is a set of element deletions leaving no solution. Small instances get an
//! exact branch-and-bound; everything else a greedy max-participation pass.
//! On top sits the weighted round-trip: lift densities to F_p^(n+m) by
//! seeded sampling, destroy the lifted solutions, and round the deletions
//! back down to new densities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::space::{DensityFunction, FpnSpace};
use crate::{Error, Result};

pub const MAX_EXACT_POINTS: usize = 64;

fn indicator_support(f: &DensityFunction) -> Result<Vec<bool>> {
    if !f.is_indicator() {
        return Err(Error::InvalidSet {
            reason: "removal operates on indicator functions".into(),
        });
    }
    Ok(f.values().iter().map(|&v| v == 1.0).collect())
}

fn check_triple(
    x: &DensityFunction,
    y: &DensityFunction,
    z: &DensityFunction,
) -> Result<(Vec<bool>, Vec<bool>, Vec<bool>)> {
    x.space().check_same(y.space())?;
    x.space().check_same(z.space())?;
    Ok((
        indicator_support(x)?,
        indicator_support(y)?,
        indicator_support(z)?,
    ))
}

fn enumerate_solutions(space: &FpnSpace, x: &[bool], y: &[bool], z: &[bool]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in space.points().filter(|&a| x[a]) {
        let na = space.neg(a);
        for b in space.points().filter(|&b| y[b]) {
            let c = space.sub(na, b);
            if z[c] {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Number of solutions of a + b + c = 0 with a ∈ X, b ∈ Y, c ∈ Z.
pub fn count_solutions(
    x: &DensityFunction,
    y: &DensityFunction,
    z: &DensityFunction,
) -> Result<u64> {
    let (sx, sy, sz) = check_triple(x, y, z)?;
    Ok(enumerate_solutions(x.space(), &sx, &sy, &sz).len() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithRemovalMode {
    /// Branch-and-bound minimum; limited to p^n ≤ 64.
    Exact,
    /// Delete the highest-participation element until no solution remains.
    Greedy,
}

#[derive(Clone, Debug)]
pub struct ArithRemovalOutcome {
    /// (side, element) pairs; side 0 deletes from X, 1 from Y, 2 from Z.
    pub deletions: Vec<(usize, usize)>,
    /// True when the count is provably minimal.
    pub exact: bool,
}

impl ArithRemovalOutcome {
    pub fn total(&self) -> usize {
        self.deletions.len()
    }
}

fn greedy_deletions(space: &FpnSpace, sets: &mut [Vec<bool>; 3]) -> Vec<(usize, usize)> {
    let size = space.size();
    let mut deletions = Vec::new();
    loop {
        let mut counts = vec![[0u64; 3]; size];
        let mut any = false;
        for a in 0..size {
            if !sets[0][a] {
                continue;
            }
            let na = space.neg(a);
            for b in 0..size {
                if !sets[1][b] {
                    continue;
                }
                let c = space.sub(na, b);
                if sets[2][c] {
                    any = true;
                    counts[a][0] += 1;
                    counts[b][1] += 1;
                    counts[c][2] += 1;
                }
            }
        }
        if !any {
            return deletions;
        }
        let mut best = (0u64, 0usize, 0usize); // (count, side, element)
        for side in 0..3 {
            for e in 0..size {
                if counts[e][side] > best.0 {
                    best = (counts[e][side], side, e);
                }
            }
        }
        sets[best.1][best.2] = false;
        deletions.push((best.1, best.2));
    }
}

/// Greedy packing of solutions sharing no element; a lower bound on the
/// deletions still needed.
fn packing_bound(solutions: &[[usize; 3]], deleted: &[Vec<bool>; 3]) -> usize {
    let size = deleted[0].len();
    let mut used = vec![[false; 3]; size];
    let mut packed = 0;
    for s in solutions {
        if (0..3).any(|i| deleted[i][s[i]]) {
            continue;
        }
        if (0..3).all(|i| !used[s[i]][i]) {
            for i in 0..3 {
                used[s[i]][i] = true;
            }
            packed += 1;
        }
    }
    packed
}

fn branch(
    solutions: &[[usize; 3]],
    deleted: &mut [Vec<bool>; 3],
    chosen: &mut Vec<(usize, usize)>,
    best: &mut Vec<(usize, usize)>,
) {
    let unhit = solutions
        .iter()
        .find(|s| (0..3).all(|i| !deleted[i][s[i]]));
    let Some(s) = unhit else {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    };
    if chosen.len() + packing_bound(solutions, deleted) >= best.len() {
        return;
    }
    for side in 0..3 {
        deleted[side][s[side]] = true;
        chosen.push((side, s[side]));
        branch(solutions, deleted, chosen, best);
        chosen.pop();
        deleted[side][s[side]] = false;
    }
}

/// Fewest element deletions destroying every solution (or a greedy upper
/// bound). Deletions are reported per side; an element in two sets can be
/// deleted from one and kept in the other.
pub fn min_deletions(
    x: &DensityFunction,
    y: &DensityFunction,
    z: &DensityFunction,
    mode: ArithRemovalMode,
) -> Result<ArithRemovalOutcome> {
    let (sx, sy, sz) = check_triple(x, y, z)?;
    let space = x.space();
    match mode {
        ArithRemovalMode::Greedy => {
            let mut sets = [sx, sy, sz];
            Ok(ArithRemovalOutcome {
                deletions: greedy_deletions(space, &mut sets),
                exact: false,
            })
        }
        ArithRemovalMode::Exact => {
            if space.size() > MAX_EXACT_POINTS {
                return Err(Error::InstanceTooLarge {
                    what: "points for exact removal",
                    value: space.size(),
                    max: MAX_EXACT_POINTS,
                });
            }
            let solutions = enumerate_solutions(space, &sx, &sy, &sz);
            let mut sets = [sx.clone(), sy.clone(), sz.clone()];
            let mut best = greedy_deletions(space, &mut sets);
            let size = space.size();
            let mut deleted = [vec![false; size], vec![false; size], vec![false; size]];
            let mut chosen = Vec::new();
            branch(&solutions, &mut deleted, &mut chosen, &mut best);
            Ok(ArithRemovalOutcome {
                deletions: best,
                exact: true,
            })
        }
    }
}

/// Everything a round-trip run reports. The L¹ accounting is a theorem and
/// is re-checked per run; the solution-freeness of the rounded supports is
/// only a high-probability event at large m, so it is reported, never
/// asserted.
#[derive(Clone, Debug)]
pub struct RoundTripOutcome {
    pub f_new: DensityFunction,
    pub g_new: DensityFunction,
    pub h_new: DensityFunction,
    /// Lifted support sizes right after sampling, per side.
    pub lifted_kept: [usize; 3],
    /// Lifted deletions per side.
    pub deleted: [usize; 3],
    /// ‖f − f'‖₁ (and for g, h).
    pub l1: [f64; 3],
    /// 4·(deletions on that side)/p^(n+m).
    pub l1_bounds: [f64; 3],
    pub l1_within_bounds: bool,
    /// ε·p^(n+m)/4 and whether the total deletion count stayed under it.
    pub deletion_budget: f64,
    pub within_budget: bool,
    /// Whether the rounded supports admit no solution (Λ(f',g',h') = 0).
    pub support_solution_free: bool,
}

/// Lift f, g, h to F_p^(n+m) by keeping each point above x with probability
/// f(x) (one seeded stream, sides X then Y then Z, indices ascending),
/// destroy all lifted solutions greedily, then round back: f'(x) = 0 when at
/// least f(x)·p^m/4 lifted points above x were deleted from X, else f(x).
pub fn weighted_removal_roundtrip(
    f: &DensityFunction,
    g: &DensityFunction,
    h: &DensityFunction,
    eps: f64,
    m: usize,
    seed: u64,
) -> Result<RoundTripOutcome> {
    let base = f.space();
    base.check_same(g.space())?;
    base.check_same(h.space())?;
    if !(eps >= 0.0) {
        return Err(Error::Domain {
            what: "round-trip epsilon",
            value: eps,
            domain: "[0, inf)",
        });
    }
    let lifted = FpnSpace::new(base.p(), base.n() + m)?;
    let fibre = lifted.size() / base.size(); // p^m
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = |density: &DensityFunction| -> Vec<bool> {
        (0..lifted.size())
            .map(|w| rng.gen_bool(density.value(w / fibre)))
            .collect()
    };
    let lifted_x = sample(f);
    let lifted_y = sample(g);
    let lifted_z = sample(h);
    let lifted_kept = [
        lifted_x.iter().filter(|&&b| b).count(),
        lifted_y.iter().filter(|&&b| b).count(),
        lifted_z.iter().filter(|&&b| b).count(),
    ];

    let mut sets = [lifted_x, lifted_y, lifted_z];
    let deletions = greedy_deletions(&lifted, &mut sets);
    debug_assert!(enumerate_solutions(&lifted, &sets[0], &sets[1], &sets[2]).is_empty());

    let mut deleted_above = [
        vec![0u64; base.size()],
        vec![0u64; base.size()],
        vec![0u64; base.size()],
    ];
    let mut deleted = [0usize; 3];
    for &(side, w) in &deletions {
        deleted_above[side][w / fibre] += 1;
        deleted[side] += 1;
    }

    let round = |density: &DensityFunction, above: &[u64]| -> DensityFunction {
        let values = base
            .points()
            .map(|x| {
                if above[x] as f64 >= density.value(x) * fibre as f64 / 4.0 {
                    0.0
                } else {
                    density.value(x)
                }
            })
            .collect();
        DensityFunction::new(base, values).expect("values are a subset of the originals")
    };
    let f_new = round(f, &deleted_above[0]);
    let g_new = round(g, &deleted_above[1]);
    let h_new = round(h, &deleted_above[2]);

    let l1 = [
        f.l1_distance(&f_new)?,
        g.l1_distance(&g_new)?,
        h.l1_distance(&h_new)?,
    ];
    let l1_bounds = [
        4.0 * deleted[0] as f64 / lifted.size() as f64,
        4.0 * deleted[1] as f64 / lifted.size() as f64,
        4.0 * deleted[2] as f64 / lifted.size() as f64,
    ];
    let l1_within_bounds = (0..3).all(|i| l1[i] <= l1_bounds[i] + 1e-12);

    // Λ(f',g',h') = 0 ⟺ the supports admit no solution
    let mut support_solution_free = true;
    'outer: for x in f_new.support() {
        let nx = base.neg(x);
        for y in g_new.support() {
            if h_new.value(base.sub(nx, y)) > 0.0 {
                support_solution_free = false;
                break 'outer;
            }
        }
    }

    let deletion_budget = eps * lifted.size() as f64 / 4.0;
    let within_budget = (deletions.len() as f64) <= deletion_budget;
    Ok(RoundTripOutcome {
        f_new,
        g_new,
        h_new,
        lifted_kept,
        deleted,
        l1,
        l1_bounds,
        l1_within_bounds,
        deletion_budget,
        within_budget,
        support_solution_free,
    })
}
