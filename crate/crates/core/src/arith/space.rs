//! The ambient group F_p^n, with points packed into indices, and [0,1]-valued
//! functions on it. A point (x_1, ..., x_n) sits at index
//! x_1·p^(n-1) + ... + x_n, so in a lifted space F_p^(n+m) the points "above"
//! a base point x occupy the contiguous block [x·p^m, (x+1)·p^m).

use crate::{Error, Result};

pub const SUPPORTED_PRIMES: [usize; 4] = [2, 3, 5, 7];
pub const MAX_POINTS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpnSpace {
    p: usize,
    n: usize,
    size: usize,
}

impl FpnSpace {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(Error::UnsupportedPrime {
                p: p as u64,
                reason: "supported primes are 2, 3, 5, 7",
            });
        }
        let mut size = 1usize;
        for _ in 0..n {
            size = size
                .checked_mul(p)
                .filter(|&s| s <= MAX_POINTS)
                .ok_or(Error::SizeGuard {
                    what: "group size p^n",
                    value: MAX_POINTS as u64 + 1,
                    unit: "points",
                    max: MAX_POINTS as u64,
                })?;
        }
        Ok(FpnSpace { p, n, size })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Big-endian digits: digits[0] is the coefficient of p^(n-1).
    pub fn digits(&self, x: usize) -> Vec<u8> {
        debug_assert!(x < self.size);
        let mut out = vec![0u8; self.n];
        let mut x = x;
        for d in out.iter_mut().rev() {
            *d = (x % self.p) as u8;
            x /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u8]) -> Result<usize> {
        if digits.len() != self.n {
            return Err(Error::InvalidSet {
                reason: format!("{} digits for a {}-dimensional point", digits.len(), self.n),
            });
        }
        let mut x = 0usize;
        for &d in digits {
            if d as usize >= self.p {
                return Err(Error::InvalidSet {
                    reason: format!("digit {d} not below p = {}", self.p),
                });
            }
            x = x * self.p + d as usize;
        }
        Ok(x)
    }

    /// Componentwise addition mod p. Digit-place order is irrelevant here,
    /// so the loop runs little-endian.
    pub fn add(&self, mut a: usize, mut b: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, mut a: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += (self.p - a % self.p) % self.p * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Σ a_i b_i mod p — the pairing behind the characters.
    pub fn dot(&self, mut a: usize, mut b: usize) -> usize {
        let mut out = 0;
        for _ in 0..self.n {
            out = (out + a % self.p * (b % self.p)) % self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    fn describe(&self) -> String {
        format!("F_{}^{}", self.p, self.n)
    }

    pub fn check_same(&self, other: &FpnSpace) -> Result<()> {
        if self != other {
            return Err(Error::SpaceMismatch {
                left: self.describe(),
                right: other.describe(),
            });
        }
        Ok(())
    }
}

/// A function F_p^n → [0,1], the common currency of the density arguments;
/// sets travel as 0/1-valued instances.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityFunction {
    space: FpnSpace,
    values: Vec<f64>,
}

impl DensityFunction {
    pub fn new(space: &FpnSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::InvalidSet {
                reason: format!(
                    "{} values for a space of {} points",
                    values.len(),
                    space.size()
                ),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::BadDensity { index, value });
            }
        }
        Ok(DensityFunction {
            space: space.clone(),
            values,
        })
    }

    pub fn constant(space: &FpnSpace, c: f64) -> Result<Self> {
        DensityFunction::new(space, vec![c; space.size()])
    }

    pub fn indicator(space: &FpnSpace, elements: &[usize]) -> Result<Self> {
        let mut values = vec![0.0; space.size()];
        for &x in elements {
            if x >= space.size() {
                return Err(Error::InvalidSet {
                    reason: format!("element {x} outside a space of {} points", space.size()),
                });
            }
            values[x] = 1.0;
        }
        DensityFunction::new(space, values)
    }

    pub fn space(&self) -> &FpnSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.space.size() as f64
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&x| self.values[x] > 0.0)
            .collect()
    }

    pub fn is_indicator(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// E_x |f(x) − g(x)|, the normalized L¹ distance.
    pub fn l1_distance(&self, other: &DensityFunction) -> Result<f64> {
        self.space.check_same(&other.space)?;
        let total: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(total / self.space.size() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_construction_and_guards() {
        let s = FpnSpace::new(3, 4).unwrap();
        assert_eq!((s.p(), s.n(), s.size()), (3, 4, 81));
        assert_eq!(FpnSpace::new(2, 0).unwrap().size(), 1);
        assert!(matches!(
            FpnSpace::new(4, 2),
            Err(Error::UnsupportedPrime { .. })
        ));
        assert!(matches!(
            FpnSpace::new(11, 2),
            Err(Error::UnsupportedPrime { .. })
        ));
        assert!(FpnSpace::new(2, 20).is_ok()); // exactly 2^20
        assert!(matches!(FpnSpace::new(2, 21), Err(Error::SizeGuard { .. })));
        assert!(matches!(FpnSpace::new(7, 8), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn digit_round_trip_and_endianness() {
        let s = FpnSpace::new(3, 3).unwrap();
        // index 14 = 1·9 + 1·3 + 2
        assert_eq!(s.digits(14), vec![1, 1, 2]);
        for x in s.points() {
            assert_eq!(s.from_digits(&s.digits(x)).unwrap(), x);
        }
        assert!(s.from_digits(&[1, 2]).is_err());
        assert!(s.from_digits(&[3, 0, 0]).is_err());
    }

    #[test]
    fn group_operations() {
        let s = FpnSpace::new(5, 2).unwrap();
        for a in s.points() {
            assert_eq!(s.add(a, s.neg(a)), 0);
            assert_eq!(s.add(a, 0), a);
            for b in s.points() {
                assert_eq!(s.add(a, b), s.add(b, a));
                assert_eq!(s.sub(s.add(a, b), b), a);
                // dot agrees with an explicit digit computation
                let (da, db) = (s.digits(a), s.digits(b));
                let expect = da
                    .iter()
                    .zip(&db)
                    .map(|(&x, &y)| x as usize * y as usize)
                    .sum::<usize>()
                    % 5;
                assert_eq!(s.dot(a, b), expect);
            }
        }
    }

    #[test]
    fn density_validation() {
        let s = FpnSpace::new(2, 2).unwrap();
        assert!(DensityFunction::new(&s, vec![0.0, 0.5, 1.0, 0.25]).is_ok());
        assert!(matches!(
            DensityFunction::new(&s, vec![0.0, 1.5, 0.0, 0.0]),
            Err(Error::BadDensity { index: 1, .. })
        ));
        assert!(DensityFunction::new(&s, vec![0.1; 3]).is_err());
        let ind = DensityFunction::indicator(&s, &[0, 3]).unwrap();
        assert!(ind.is_indicator());
        assert_eq!(ind.support(), vec![0, 3]);
        assert_eq!(ind.mean(), 0.5);
        assert!(DensityFunction::indicator(&s, &[4]).is_err());
    }

    #[test]
    fn l1_distance_and_space_mismatch() {
        let s = FpnSpace::new(2, 2).unwrap();
        let f = DensityFunction::indicator(&s, &[0, 1]).unwrap();
        let g = DensityFunction::indicator(&s, &[1, 2]).unwrap();
        assert_eq!(f.l1_distance(&g).unwrap(), 0.5);
        assert_eq!(f.l1_distance(&f).unwrap(), 0.0);
        let other = FpnSpace::new(2, 3).unwrap();
        let h = DensityFunction::constant(&other, 0.5).unwrap();
        assert!(matches!(
            f.l1_distance(&h),
            Err(Error::SpaceMismatch { .. })
        ));
    }
}
