//! Discrete Fourier analysis on F_p^n: the normalized transform
//! f̂(y) = E_x f(x) e^(-2πi(x·y)/p), computed one coordinate at a time, and
//! the triangle density Λ(f,g,h) = E f(x)g(y)h(z) over solutions of
//! x + y + z = 0, available both by direct enumeration and through the
//! spectral identity Λ = Σ_y f̂(y)ĝ(y)ĥ(y). The two routes share no code and
//! serve as each other's oracle.

use num_complex::Complex64;

use super::space::{DensityFunction, FpnSpace};
use crate::{Error, Result};

/// ω^j for j in 0..p with ω = e^(-2πi/p).
fn root_table(p: usize, sign: f64) -> Vec<Complex64> {
    (0..p)
        .map(|j| Complex64::from_polar(1.0, sign * std::f64::consts::TAU * j as f64 / p as f64))
        .collect()
}

fn transform_axes(space: &FpnSpace, mut buf: Vec<Complex64>, sign: f64) -> Vec<Complex64> {
    let (p, size) = (space.p(), space.size());
    let omega = root_table(p, sign);
    let mut scratch = vec![Complex64::default(); p];
    let mut stride = 1;
    while stride < size {
        // one pass per coordinate: indices differing only in that digit sit
        // `stride` apart, p of them in a row
        let block = stride * p;
        for start in (0..size).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (d, slot) in scratch.iter_mut().enumerate() {
                    let mut acc = Complex64::default();
                    for j in 0..p {
                        acc += buf[base + j * stride] * omega[j * d % p];
                    }
                    *slot = acc;
                }
                for (j, &v) in scratch.iter().enumerate() {
                    buf[base + j * stride] = v;
                }
            }
        }
        stride = block;
    }
    buf
}

/// Normalized transform of a density function.
pub fn dft(f: &DensityFunction) -> Vec<Complex64> {
    let space = f.space();
    let buf = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut out = transform_axes(space, buf, -1.0);
    let scale = 1.0 / space.size() as f64;
    for v in &mut out {
        *v *= scale;
    }
    out
}

/// Inverse transform: f(x) = Σ_y f̂(y) e^(+2πi(x·y)/p), unnormalized.
pub fn idft(space: &FpnSpace, spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    if spectrum.len() != space.size() {
        return Err(Error::InvalidSet {
            reason: format!(
                "{} spectrum entries for a space of {} points",
                spectrum.len(),
                space.size()
            ),
        });
    }
    Ok(transform_axes(space, spectrum.to_vec(), 1.0))
}

/// (Σ_y |f̂(y)|², E_x f(x)²) — equal by Parseval; both sides returned so
/// callers can report the gap.
pub fn parseval_sides(f: &DensityFunction) -> (f64, f64) {
    let spectral: f64 = dft(f).iter().map(|c| c.norm_sqr()).sum();
    let direct =
        f.values().iter().map(|v| v * v).sum::<f64>() / f.space().size() as f64;
    (spectral, direct)
}

const MAX_DIRECT_PAIRS: usize = 1 << 22;

/// Λ by direct enumeration of the p^2n solutions (x, y, -x-y).
pub fn lambda_direct(f: &DensityFunction, g: &DensityFunction, h: &DensityFunction) -> Result<f64> {
    let space = f.space();
    space.check_same(g.space())?;
    space.check_same(h.space())?;
    let size = space.size();
    if size.saturating_mul(size) > MAX_DIRECT_PAIRS {
        return Err(Error::InstanceTooLarge {
            what: "solution pairs for direct triangle density",
            value: size,
            max: (MAX_DIRECT_PAIRS as f64).sqrt() as usize,
        });
    }
    let mut total = 0.0;
    for x in space.points() {
        let fx = f.value(x);
        if fx == 0.0 {
            continue;
        }
        let nx = space.neg(x);
        for y in space.points() {
            let gy = g.value(y);
            if gy == 0.0 {
                continue;
            }
            total += fx * gy * h.value(space.sub(nx, y));
        }
    }
    Ok(total / (size * size) as f64)
}

/// Λ through the spectral identity Σ_y f̂(y)ĝ(y)ĥ(y).
pub fn lambda_spectral(
    f: &DensityFunction,
    g: &DensityFunction,
    h: &DensityFunction,
) -> Result<f64> {
    let space = f.space();
    space.check_same(g.space())?;
    space.check_same(h.space())?;
    let (fh, gh, hh) = (dft(f), dft(g), dft(h));
    let sum: Complex64 = fh
        .iter()
        .zip(&gh)
        .zip(&hh)
        .map(|((a, b), c)| a * b * c)
        .sum();
    debug_assert!(sum.im.abs() < 1e-9);
    Ok(sum.re)
}

/// Λ by whichever route is feasible: direct enumeration up to the pair
/// guard, spectral beyond it.
pub fn lambda(f: &DensityFunction, g: &DensityFunction, h: &DensityFunction) -> Result<f64> {
    let size = f.space().size();
    if size.saturating_mul(size) <= MAX_DIRECT_PAIRS {
        lambda_direct(f, g, h)
    } else {
        lambda_spectral(f, g, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(rng: &mut ChaCha8Rng, space: &FpnSpace) -> DensityFunction {
        let values = (0..space.size()).map(|_| rng.gen::<f64>()).collect();
        DensityFunction::new(space, values).unwrap()
    }

    #[test]
    fn constant_and_point_mass_transforms() {
        let s = FpnSpace::new(3, 2).unwrap();
        let one = DensityFunction::constant(&s, 1.0).unwrap();
        let spec = dft(&one);
        assert!((spec[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for y in 1..s.size() {
            assert!(spec[y].norm() < 1e-12, "leak at {y}");
        }
        let delta = DensityFunction::indicator(&s, &[0]).unwrap();
        for c in dft(&delta) {
            assert!((c - Complex64::new(1.0 / 9.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn transform_matches_naive_double_sum() {
        let s = FpnSpace::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_density(&mut rng, &s);
        let spec = dft(&f);
        for y in s.points() {
            let mut naive = Complex64::default();
            for x in s.points() {
                let phase = -std::f64::consts::TAU * s.dot(x, y) as f64 / 3.0;
                naive += f.value(x) * Complex64::from_polar(1.0, phase);
            }
            naive /= s.size() as f64;
            assert!((spec[y] - naive).norm() < 1e-10, "mismatch at {y}");
        }
    }

    #[test]
    fn parseval_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (p, n) in [(2, 5), (3, 3), (5, 2), (7, 2)] {
            let s = FpnSpace::new(p, n).unwrap();
            for _ in 0..10 {
                let f = random_density(&mut rng, &s);
                let (lhs, rhs) = parseval_sides(&f);
                assert!((lhs - rhs).abs() < 1e-9, "p={p} n={n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn inverse_transform_round_trip() {
        let s = FpnSpace::new(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_density(&mut rng, &s);
        let back = idft(&s, &dft(&f)).unwrap();
        for (x, c) in back.iter().enumerate() {
            assert!((c.re - f.value(x)).abs() < 1e-10);
            assert!(c.im.abs() < 1e-10);
        }
        assert!(idft(&s, &[Complex64::default(); 3]).is_err());
    }

    #[test]
    fn lambda_named_values() {
        let s = FpnSpace::new(2, 2).unwrap();
        let one = DensityFunction::constant(&s, 1.0).unwrap();
        assert!((lambda_direct(&one, &one, &one).unwrap() - 1.0).abs() < 1e-12);
        // only the solution (0, 0, 0) contributes
        let delta = DensityFunction::indicator(&s, &[0]).unwrap();
        let expect = 1.0 / 16.0; // p^-2n
        assert!((lambda_direct(&delta, &delta, &delta).unwrap() - expect).abs() < 1e-12);
        // full indicators: every one of the p^2n = 16 pairs is a solution
        let full = DensityFunction::indicator(&s, &(0..4).collect::<Vec<_>>()).unwrap();
        assert_eq!(lambda_direct(&full, &full, &full).unwrap(), 1.0);
        assert_eq!(s.size() * s.size(), 16);
    }

    #[test]
    fn lambda_direct_equals_spectral() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for p in [2usize, 3, 5] {
            for n in 1..=4 {
                if p.pow(n as u32) > 625 {
                    continue;
                }
                let s = FpnSpace::new(p, n).unwrap();
                for _ in 0..8 {
                    let f = random_density(&mut rng, &s);
                    let g = random_density(&mut rng, &s);
                    let h = random_density(&mut rng, &s);
                    let d = lambda_direct(&f, &g, &h).unwrap();
                    let sp = lambda_spectral(&f, &g, &h).unwrap();
                    assert!((d - sp).abs() < 1e-9, "p={p} n={n}: {d} vs {sp}");
                }
            }
        }
    }

    #[test]
    fn lambda_counts_solutions_in_sparse_sets() {
        // X = {1}, Y = {2}, Z = {-3}: exactly one solution in F_7
        let s = FpnSpace::new(7, 1).unwrap();
        let x = DensityFunction::indicator(&s, &[1]).unwrap();
        let y = DensityFunction::indicator(&s, &[2]).unwrap();
        let z = DensityFunction::indicator(&s, &[s.neg(3)]).unwrap();
        assert!((lambda(&x, &y, &z).unwrap() - 1.0 / 49.0).abs() < 1e-12);
        // and zero when the sum can't vanish
        let z2 = DensityFunction::indicator(&s, &[0]).unwrap();
        assert_eq!(lambda_direct(&x, &y, &z2).unwrap(), 0.0);
    }
}
