//! Seeded mixed corpora for the theorem suites and the fuzzer.
//!
//! Item `i` of a corpus depends only on `(family, dims, seed, i)`, so any
//! failing item can be regenerated in isolation.

use std::ops::RangeInclusive;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{gaussian, generate, haar_unitary, stream_rng, ClassKind, ClassSpec, CouplingVariant};
use crate::linalg::{c64, spectral_norm, ComplexMatrix};

const CORPUS_TAG: u64 = 0xC0_4905 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Contractions drawn from every generator class plus normal and split constructions.
    Contractions,
    /// Arbitrary norms, Hermitian and clearly non-Hermitian matrices.
    Generic,
    /// Contractive m-quasi-isometries alternating with symmetry ⊕ 0.
    QuasiIsometries { m_min: usize, m_max: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub index: usize,
    /// Seed of the underlying generator call.
    pub seed: u64,
    pub label: String,
    /// Generator class, when the item came from a plain generator call.
    pub kind: Option<ClassKind>,
    pub t: ComplexMatrix,
}

pub fn corpus_item(family: Family, dims: &RangeInclusive<usize>, seed: u64, index: usize) -> Result<CorpusItem> {
    if dims.is_empty() || *dims.start() == 0 {
        return Err(Error::InvalidSpec(format!("dims {}..{} must be a nonempty range of positive sizes", dims.start(), dims.end())));
    }
    let mut rng = stream_rng(seed, CORPUS_TAG | index as u64);
    let n = rng.random_range(dims.clone());
    let item_seed: u64 = rng.random();
    let (label, kind, t) = match family {
        Family::Contractions => contraction(&mut rng, n, item_seed)?,
        Family::Generic => generic(&mut rng, n, item_seed)?,
        Family::QuasiIsometries { m_min, m_max } => {
            let m = rng.random_range(m_min..=m_max);
            let kind = if index.is_multiple_of(2) { ClassKind::MQuasiIsometry { m, contractive: true } } else { ClassKind::SymmetryPlusZero };
            from_spec(kind, n, item_seed)?
        }
    };
    Ok(CorpusItem { index, seed: item_seed, label, kind, t })
}

type Drawn = (String, Option<ClassKind>, ComplexMatrix);

fn from_spec(kind: ClassKind, n: usize, seed: u64) -> Result<Drawn> {
    let t = generate(&ClassSpec::new(kind, n, seed))?;
    Ok((format!("{} n={n}", kind.name()), Some(kind), t))
}

/// Normal matrix `U·diag(z)·U*` with `|z| ≤ 1`, some eigenvalues on the circle.
fn normal_contraction(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let u = haar_unitary(rng, n);
    let z: Vec<_> = (0..n)
        .map(|_| {
            let r = if rng.random::<f64>() < 0.3 { 1.0 } else { rng.random_range(0.0..1.0) };
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            c64(r * phase.cos(), r * phase.sin())
        })
        .collect();
    &(&u * &ComplexMatrix::from_diagonal(&z)) * &u.adjoint()
}

fn contraction(rng: &mut ChaCha8Rng, n: usize, seed: u64) -> Result<Drawn> {
    let pick = rng.random_range(0..13);
    let kind = match pick {
        0 => ClassKind::Contraction,
        1 => ClassKind::PureContraction,
        2 => ClassKind::PartialIsometry { rank: rng.random_range(0..=n) },
        3 => ClassKind::Nilpotent { order: rng.random_range(1..=n) },
        4 => ClassKind::MQuasiIsometry { m: rng.random_range(1..=3), contractive: true },
        5 => ClassKind::SymmetryPlusZero,
        6 => ClassKind::SelfAdjointContraction,
        7 => {
            let epsilon = [1e-3, 1e-2, 1e-1][rng.random_range(0..3)];
            let (label, kind, t) = from_spec(ClassKind::HermitianPlusPerturbation { epsilon }, n, seed)?;
            let norm = spectral_norm(&t);
            return Ok((label, kind, if norm > 1.0 { t.scale(1.0 / norm) } else { t }));
        }
        8 => ClassKind::Unitary,
        9 => ClassKind::Symmetry,
        10 if n >= 2 => {
            let variant =
                [CouplingVariant::Pure, CouplingVariant::SaturatedCoupled, CouplingVariant::SaturatedDecoupled][rng.random_range(0..3)];
            ClassKind::BlockTriangular { variant }
        }
        11 => return Ok((format!("normal_contraction n={n}"), None, normal_contraction(rng, n))),
        12 if n >= 2 => {
            // Symmetry on part of the space, a pure contraction on the rest.
            let k = rng.random_range(1..n);
            let s = generate(&ClassSpec::new(ClassKind::Symmetry, k, seed))?;
            let z = generate(&ClassSpec::new(ClassKind::PureContraction, n - k, seed))?;
            let u = haar_unitary(rng, n);
            return Ok((format!("symmetry_plus_pure n={n} k={k}"), None, &(&u * &s.direct_sum(&z)) * &u.adjoint()));
        }
        _ => ClassKind::Contraction,
    };
    from_spec(kind, n, seed)
}

fn generic(rng: &mut ChaCha8Rng, n: usize, seed: u64) -> Result<Drawn> {
    let magnitude = 10f64.powf(rng.random_range(-3.0..3.0));
    let (label, kind, t) = match rng.random_range(0..6) {
        0 => ("gaussian".to_string(), None, gaussian(rng, n, n)),
        1 => ("hermitian".to_string(), None, gaussian(rng, n, n).hermitian_part()),
        2 => {
            // Relative perturbation well above the resolution of the quadratic criterion.
            let h = gaussian(rng, n, n).hermitian_part();
            let g = gaussian(rng, n, n);
            let eps = 10f64.powf(rng.random_range(-2.0..0.0));
            ("hermitian_perturbed".to_string(), None, &h + &g.scale(eps * h.norm_fro() / g.norm_fro()))
        }
        3 => ("normal".to_string(), None, normal_contraction(rng, n)),
        _ => {
            let (label, _, t) = contraction(rng, n, seed)?;
            (label, None, t)
        }
    };
    Ok((format!("{label} n={n} scale={magnitude:.3e}"), kind, t.scale(magnitude)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::props::classify;
    use crate::linalg::Tolerances;

    #[test]
    fn items_are_reproducible() {
        let dims = 2..=6;
        for i in 0..20 {
            let a = corpus_item(Family::Contractions, &dims, 9, i).unwrap();
            let b = corpus_item(Family::Contractions, &dims, 9, i).unwrap();
            assert_eq!(a, b);
            assert!(dims.contains(&a.t.rows()));
        }
    }

    #[test]
    fn contraction_family_is_contractive() {
        let tol = Tolerances::default();
        for i in 0..60 {
            let item = corpus_item(Family::Contractions, &(1..=6), 4, i).unwrap();
            assert!(classify(&item.t, &[], &tol).unwrap().contraction.holds, "{}", item.label);
        }
    }

    #[test]
    fn quasi_family_alternates() {
        let tol = Tolerances::default();
        for i in 0..10 {
            let item = corpus_item(Family::QuasiIsometries { m_min: 3, m_max: 4 }, &(2..=6), 1, i).unwrap();
            let c = classify(&item.t, &[3, 4], &tol).unwrap();
            assert!(c.contraction.holds && c.quasi(4).unwrap().holds, "{}", item.label);
        }
    }

    #[test]
    fn rejects_empty_dims() {
        assert!(corpus_item(Family::Generic, &(0..=3), 0, 0).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=2;
        assert!(corpus_item(Family::Generic, &empty, 0, 0).is_err());
    }
}
