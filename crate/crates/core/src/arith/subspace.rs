//! Subspaces of F_p^n with exact GF(p) linear algebra: row reduction,
//! nullspaces, orthogonal complements, and averaging a function over the
//! cosets of a subspace.

use std::collections::BTreeMap;

use super::space::{DensityFunction, FpnSpace};
use crate::{Error, Result};

fn inverse_mod(a: usize, p: usize) -> usize {
    debug_assert!(a % p != 0);
    (1..p).find(|&x| a * x % p == 1).expect("p is prime")
}

/// Row-reduce over F_p; returns the nonzero rows in echelon form together
/// with their pivot columns.
pub fn rref(p: usize, mut rows: Vec<Vec<u8>>) -> (Vec<Vec<u8>>, Vec<usize>) {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = inverse_mod(rows[rank][col] as usize, p);
        for v in rows[rank].iter_mut() {
            *v = (*v as usize * inv % p) as u8;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col] as usize;
                for c in 0..cols {
                    let sub = factor * rows[rank][c] as usize % p;
                    rows[r][c] = ((rows[r][c] as usize + p - sub) % p) as u8;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Basis of {x : Mx = 0} over F_p for an r×n matrix given as rows.
pub fn nullspace(p: usize, rows: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    let (reduced, pivots) = rref(p, rows.to_vec());
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![0u8; n];
        v[fc] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            // pivot entry is 1, so x_pc = -row[fc]
            v[pc] = ((p - reduced[r][fc] as usize) % p) as u8;
        }
        basis.push(v);
    }
    basis
}

/// A linear subspace, carried redundantly as a spanning basis and as the
/// normal vectors cutting it out; the two views are kept consistent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    p: usize,
    n: usize,
    basis: Vec<Vec<u8>>,
    normals: Vec<Vec<u8>>,
}

impl Subspace {
    fn check_vectors(space: &FpnSpace, vectors: &[Vec<u8>]) -> Result<()> {
        for v in vectors {
            if v.len() != space.n() {
                return Err(Error::BadSubspace {
                    reason: format!("vector of length {} in F_p^{}", v.len(), space.n()),
                });
            }
            if v.iter().any(|&d| d as usize >= space.p()) {
                return Err(Error::BadSubspace {
                    reason: format!("digit not below p = {}", space.p()),
                });
            }
        }
        Ok(())
    }

    pub fn from_spanning(space: &FpnSpace, vectors: &[Vec<u8>]) -> Result<Self> {
        Self::check_vectors(space, vectors)?;
        let (basis, _) = rref(space.p(), vectors.to_vec());
        let normals = nullspace(space.p(), &basis, space.n());
        Ok(Subspace {
            p: space.p(),
            n: space.n(),
            basis,
            normals,
        })
    }

    /// The subspace {x : y·x = 0 for every normal y}.
    pub fn from_normals(space: &FpnSpace, normals: &[Vec<u8>]) -> Result<Self> {
        Self::check_vectors(space, normals)?;
        let (normals, _) = rref(space.p(), normals.to_vec());
        let basis = nullspace(space.p(), &normals, space.n());
        Ok(Subspace {
            p: space.p(),
            n: space.n(),
            basis,
            normals,
        })
    }

    pub fn whole(space: &FpnSpace) -> Self {
        Subspace::from_normals(space, &[]).expect("no vectors to validate")
    }

    pub fn zero(space: &FpnSpace) -> Self {
        Subspace::from_spanning(space, &[]).expect("no vectors to validate")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.n - self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn normals(&self) -> &[Vec<u8>] {
        &self.normals
    }

    pub fn check_space(&self, space: &FpnSpace) -> Result<()> {
        if self.p != space.p() || self.n != space.n() {
            return Err(Error::SpaceMismatch {
                left: format!("subspace of F_{}^{}", self.p, self.n),
                right: format!("F_{}^{}", space.p(), space.n()),
            });
        }
        Ok(())
    }

    pub fn contains(&self, space: &FpnSpace, x: usize) -> Result<bool> {
        self.check_space(space)?;
        for normal in &self.normals {
            let y = space.from_digits(normal)?;
            if space.dot(x, y) != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All p^dim points of the subspace, ascending.
    pub fn points(&self, space: &FpnSpace) -> Result<Vec<usize>> {
        self.check_space(space)?;
        let mut pts = vec![0usize];
        for b in &self.basis {
            let bi = space.from_digits(b)?;
            let mut next = Vec::with_capacity(pts.len() * space.p());
            for &x in &pts {
                let mut shifted = x;
                for _ in 0..space.p() {
                    next.push(shifted);
                    shifted = space.add(shifted, bi);
                }
            }
            pts = next;
        }
        pts.sort_unstable();
        debug_assert!(pts.windows(2).all(|w| w[0] != w[1]));
        Ok(pts)
    }

    /// {y : y·h = 0 for all h in the subspace} — swaps the two views.
    pub fn orthogonal_complement(&self) -> Subspace {
        Subspace {
            p: self.p,
            n: self.n,
            basis: self.normals.clone(),
            normals: self.basis.clone(),
        }
    }
}

/// Replace f by its average over each coset x + H. Exactly mean-preserving
/// and idempotent; output entries clamped to [0,1] against rounding dust.
pub fn coset_average(f: &DensityFunction, h: &Subspace) -> Result<DensityFunction> {
    let space = f.space();
    h.check_space(space)?;
    // cosets are the fibres of the syndrome map x ↦ (y·x for normals y)
    let normal_idx: Vec<usize> = h
        .normals()
        .iter()
        .map(|v| space.from_digits(v))
        .collect::<Result<_>>()?;
    let syndrome = |x: usize| -> Vec<usize> {
        normal_idx.iter().map(|&y| space.dot(x, y)).collect()
    };
    let mut sums: BTreeMap<Vec<usize>, (f64, u64)> = BTreeMap::new();
    for x in space.points() {
        let e = sums.entry(syndrome(x)).or_insert((0.0, 0));
        e.0 += f.value(x);
        e.1 += 1;
    }
    let values = space
        .points()
        .map(|x| {
            let (sum, count) = sums[&syndrome(x)];
            (sum / count as f64).clamp(0.0, 1.0)
        })
        .collect();
    DensityFunction::new(space, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fourier::dft;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rref_and_nullspace_dimensions() {
        // rank-nullity over F_3, a 2x4 matrix of rank 2
        let rows = vec![vec![1, 2, 0, 1], vec![2, 1, 1, 0]];
        let (red, pivots) = rref(3, rows.clone());
        assert_eq!(red.len(), 2);
        // second row reduces to [0, 0, 1, 1], so the pivots sit at 0 and 2
        assert_eq!(pivots, vec![0, 2]);
        let ns = nullspace(3, &rows, 4);
        assert_eq!(ns.len(), 2);
        // every basis vector of the nullspace is killed by every row
        for v in &ns {
            for r in &rows {
                let s: usize = v
                    .iter()
                    .zip(r)
                    .map(|(&a, &b)| a as usize * b as usize)
                    .sum();
                assert_eq!(s % 3, 0);
            }
        }
    }

    #[test]
    fn membership_matches_enumeration() {
        let s = FpnSpace::new(3, 3).unwrap();
        let h = Subspace::from_spanning(&s, &[vec![1, 0, 2], vec![0, 1, 1]]).unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.codim(), 1);
        let pts = h.points(&s).unwrap();
        assert_eq!(pts.len(), 9);
        for x in s.points() {
            assert_eq!(h.contains(&s, x).unwrap(), pts.contains(&x));
        }
        // closure under addition
        for &a in &pts {
            for &b in &pts {
                assert!(pts.contains(&s.add(a, b)));
            }
        }
    }

    #[test]
    fn trivial_subspaces_and_complement() {
        let s = FpnSpace::new(5, 2).unwrap();
        let whole = Subspace::whole(&s);
        assert_eq!((whole.dim(), whole.codim()), (2, 0));
        assert_eq!(whole.points(&s).unwrap().len(), 25);
        let zero = Subspace::zero(&s);
        assert_eq!((zero.dim(), zero.codim()), (0, 2));
        assert_eq!(zero.points(&s).unwrap(), vec![0]);
        assert_eq!(whole.orthogonal_complement().dim(), 0);
        let h = Subspace::from_normals(&s, &[vec![1, 3]]).unwrap();
        assert_eq!(h.dim(), 1);
        let hc = h.orthogonal_complement();
        // complement of the complement recovers the original
        assert_eq!(hc.orthogonal_complement(), h);
        for x in h.points(&s).unwrap() {
            for y in hc.points(&s).unwrap() {
                assert_eq!(s.dot(x, y), 0);
            }
        }
        assert!(Subspace::from_normals(&s, &[vec![1, 2, 3]]).is_err());
        assert!(Subspace::from_spanning(&s, &[vec![5, 0]]).is_err());
    }

    #[test]
    fn coset_average_basics() {
        let s = FpnSpace::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = DensityFunction::new(&s, (0..9).map(|_| rng.gen()).collect::<Vec<f64>>()).unwrap();
        // whole space: constant at the mean
        let fw = coset_average(&f, &Subspace::whole(&s)).unwrap();
        for x in s.points() {
            assert!((fw.value(x) - f.mean()).abs() < 1e-12);
        }
        // zero subspace: unchanged
        let fz = coset_average(&f, &Subspace::zero(&s)).unwrap();
        assert_eq!(fz.values(), f.values());
        // a proper subspace: idempotent, mean-preserving, coset-constant
        let h = Subspace::from_normals(&s, &[vec![1, 2]]).unwrap();
        let fh = coset_average(&f, &h).unwrap();
        assert!((fh.mean() - f.mean()).abs() < 1e-12);
        let ffh = coset_average(&fh, &h).unwrap();
        for x in s.points() {
            assert!((ffh.value(x) - fh.value(x)).abs() < 1e-12);
        }
        for x in s.points() {
            for t in h.points(&s).unwrap() {
                assert!((fh.value(s.add(x, t)) - fh.value(x)).abs() < 1e-12);
            }
        }
        // mismatched space rejected
        let other = FpnSpace::new(3, 3).unwrap();
        assert!(coset_average(&f, &Subspace::whole(&other)).is_err());
    }

    #[test]
    fn averaging_zeroes_exactly_the_off_complement_spectrum() {
        // (f - f_H)^ vanishes on H-perp and equals f̂ elsewhere
        let s = FpnSpace::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let f =
            DensityFunction::new(&s, (0..27).map(|_| rng.gen()).collect::<Vec<f64>>()).unwrap();
        let h = Subspace::from_normals(&s, &[vec![1, 0, 1], vec![0, 1, 2]]).unwrap();
        let fh = coset_average(&f, &h).unwrap();
        let f_hat = dft(&f);
        let fh_hat = dft(&fh);
        let hperp = h.orthogonal_complement();
        for y in s.points() {
            let diff = f_hat[y] - fh_hat[y];
            if hperp.contains(&s, y).unwrap() {
                assert!(diff.norm() < 1e-12, "should vanish at {y}");
            } else {
                assert!(fh_hat[y].norm() < 1e-12, "f_H has no mass at {y}");
                assert!((diff - f_hat[y]).norm() < 1e-12);
            }
        }
    }
}
