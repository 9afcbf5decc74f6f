//! Weak regularity over F_p^n: a subspace H is ε-weakly-regular for f when
//! every Fourier coefficient of f − f_H is at most ε in magnitude. Taking H
//! orthogonal to all large nontrivial coefficients of up to three functions
//! costs codimension at most 3ε⁻² (Parseval caps each function's large
//! spectrum at ε⁻²), and coset-averaged replacements then shift the triangle
//! density by at most 3ε.

use super::fourier::{dft, lambda};
use super::space::DensityFunction;
use super::subspace::{coset_average, Subspace};
use crate::{Error, Result};

/// max_y |(f − f_H)^(y)| ≤ eps?
pub fn is_weakly_regular(f: &DensityFunction, h: &Subspace, eps: f64) -> Result<bool> {
    Ok(regularity_defect(f, h)? <= eps)
}

/// max_y |(f − f_H)^(y)| itself, for reporting.
pub fn regularity_defect(f: &DensityFunction, h: &Subspace) -> Result<f64> {
    let space = f.space();
    h.check_space(space)?;
    let fh = coset_average(f, h)?;
    // f − f_H can be negative, so it is not itself a density; by linearity
    // its transform is f̂ − f̂_H
    let f_hat = dft(f);
    let fh_hat = dft(&fh);
    Ok(f_hat
        .iter()
        .zip(&fh_hat)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

pub const MAX_REGULARIZED_FUNCTIONS: usize = 3;

/// The subspace orthogonal to every nontrivial character where some input
/// function has |f̂(y)| ≥ ε (collected with a hair of slack so the verified
/// defect stays strictly below ε despite rounding). Codimension ≤ 3ε⁻²; the
/// regularity of the result is re-verified before returning.
pub fn weak_regularity_subspace(fs: &[&DensityFunction], eps: f64) -> Result<Subspace> {
    if fs.is_empty() || fs.len() > MAX_REGULARIZED_FUNCTIONS {
        return Err(Error::InstanceTooLarge {
            what: "functions regularized together",
            value: fs.len(),
            max: MAX_REGULARIZED_FUNCTIONS,
        });
    }
    if !(eps > 0.0) {
        return Err(Error::Domain {
            what: "regularity epsilon",
            value: eps,
            domain: "(0, inf)",
        });
    }
    let space = fs[0].space();
    for f in &fs[1..] {
        space.check_same(f.space())?;
    }
    let threshold = eps * (1.0 - 1e-9);
    let per_function_cap = (1.0 / (eps * eps)).floor() as usize + 1;
    let mut normals = Vec::new();
    for f in fs {
        let spectrum = dft(f);
        let mut large = 0;
        for y in 1..space.size() {
            if spectrum[y].norm() >= threshold {
                normals.push(space.digits(y));
                large += 1;
            }
        }
        // Parseval: Σ|f̂|² ≤ E f² ≤ 1, so at most ε⁻² coefficients reach ε
        debug_assert!(large <= per_function_cap, "{large} large coefficients");
    }
    let h = Subspace::from_normals(space, &normals)?;
    let codim_cap = (3.0 / (eps * eps)).ceil() as usize;
    assert!(
        h.codim() <= codim_cap.min(space.n()),
        "codimension {} exceeds the 3/eps^2 contract",
        h.codim()
    );
    for f in fs {
        let defect = regularity_defect(f, &h)?;
        assert!(
            defect <= eps,
            "constructed subspace leaves a coefficient of {defect} > {eps}"
        );
    }
    Ok(h)
}

/// Both triangle densities and their gap: Λ on the inputs versus Λ on their
/// H-coset averages. When H is ε-weakly-regular for all three inputs the
/// gap is at most 3ε.
#[derive(Clone, Debug)]
pub struct CountingGap {
    pub lambda_raw: f64,
    pub lambda_structured: f64,
    pub gap: f64,
}

pub fn counting_lemma_gap(
    f: &DensityFunction,
    g: &DensityFunction,
    h: &DensityFunction,
    subspace: &Subspace,
) -> Result<CountingGap> {
    let lambda_raw = lambda(f, g, h)?;
    let fs = coset_average(f, subspace)?;
    let gs = coset_average(g, subspace)?;
    let hs = coset_average(h, subspace)?;
    let lambda_structured = lambda(&fs, &gs, &hs)?;
    Ok(CountingGap {
        lambda_raw,
        lambda_structured,
        gap: (lambda_raw - lambda_structured).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::space::FpnSpace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(rng: &mut ChaCha8Rng, space: &FpnSpace) -> DensityFunction {
        DensityFunction::new(space, (0..space.size()).map(|_| rng.gen()).collect::<Vec<f64>>())
            .unwrap()
    }

    fn random_indicator(rng: &mut ChaCha8Rng, space: &FpnSpace) -> DensityFunction {
        let values: Vec<f64> = (0..space.size())
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 })
            .collect();
        DensityFunction::new(space, values).unwrap()
    }

    #[test]
    fn zero_subspace_is_always_regular() {
        let s = FpnSpace::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = random_density(&mut rng, &s);
        // f_H = f, the difference vanishes identically
        assert!(is_weakly_regular(&f, &Subspace::zero(&s), 0.0).unwrap());
    }

    #[test]
    fn coset_indicator_is_its_own_average() {
        let s = FpnSpace::new(3, 2).unwrap();
        let h = Subspace::from_normals(&s, &[vec![1, 1]]).unwrap();
        // indicator of the coset through (0,1)
        let coset: Vec<usize> = h
            .points(&s)
            .unwrap()
            .into_iter()
            .map(|t| s.add(t, 1))
            .collect();
        let f = DensityFunction::indicator(&s, &coset).unwrap();
        assert!(is_weakly_regular(&f, &h, 0.0).unwrap());
    }

    #[test]
    fn hyperplane_indicator_needs_exactly_its_kernel() {
        // f = indicator of {x : x·(1,2) = 0} in F_3^2: one large nontrivial
        // coefficient pair along the normal direction
        let s = FpnSpace::new(3, 2).unwrap();
        let hyper = Subspace::from_normals(&s, &[vec![1, 2]]).unwrap();
        let f = DensityFunction::indicator(&s, &hyper.points(&s).unwrap()).unwrap();
        let h = weak_regularity_subspace(&[&f], 0.2).unwrap();
        assert_eq!(h.codim(), 1);
        assert_eq!(h, hyper);
        assert!(is_weakly_regular(&f, &h, 0.2).unwrap());
        // a constant needs nothing
        let c = DensityFunction::constant(&s, 0.7).unwrap();
        assert_eq!(weak_regularity_subspace(&[&c], 0.2).unwrap().codim(), 0);
    }

    #[test]
    fn subspace_arity_and_eps_guards() {
        let s = FpnSpace::new(2, 2).unwrap();
        let f = DensityFunction::constant(&s, 0.5).unwrap();
        assert!(weak_regularity_subspace(&[], 0.1).is_err());
        assert!(weak_regularity_subspace(&[&f, &f, &f, &f], 0.1).is_err());
        assert!(weak_regularity_subspace(&[&f], 0.0).is_err());
    }

    #[test]
    fn random_triples_meet_codim_and_gap_contracts() {
        let s = FpnSpace::new(3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for eps in [0.2f64, 0.3] {
            let codim_cap = (3.0 / (eps * eps)).ceil() as usize;
            for _ in 0..20 {
                let f = random_indicator(&mut rng, &s);
                let g = random_indicator(&mut rng, &s);
                let h = random_indicator(&mut rng, &s);
                let sub = weak_regularity_subspace(&[&f, &g, &h], eps).unwrap();
                assert!(sub.codim() <= codim_cap);
                for fun in [&f, &g, &h] {
                    assert!(is_weakly_regular(fun, &sub, eps).unwrap());
                }
                let cg = counting_lemma_gap(&f, &g, &h, &sub).unwrap();
                assert!(
                    cg.gap <= 3.0 * eps + 1e-9,
                    "gap {} > 3·{eps}",
                    cg.gap
                );
            }
        }
    }

    #[test]
    fn structured_inputs_have_zero_gap() {
        let s = FpnSpace::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let h = Subspace::from_normals(&s, &[vec![1, 0, 2]]).unwrap();
        let f = coset_average(&random_density(&mut rng, &s), &h).unwrap();
        let g = coset_average(&random_density(&mut rng, &s), &h).unwrap();
        let k = coset_average(&random_density(&mut rng, &s), &h).unwrap();
        let cg = counting_lemma_gap(&f, &g, &k, &h).unwrap();
        assert!(cg.gap < 1e-12);
        // and the zero subspace always gives gap 0 (averaging is identity)
        let cg0 = counting_lemma_gap(&f, &g, &k, &Subspace::zero(&s)).unwrap();
        assert!(cg0.gap < 1e-12);
    }
}
