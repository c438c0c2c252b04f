//! Seeded operators from each class, verified by [`classify`] before they are returned.
//!
//! Every draw comes from a ChaCha8 stream keyed by the seed. The stream number
//! is `(kind_tag << 32) | attempt`, and entries are consumed in row-major
//! order, real part before imaginary part, each from a standard normal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, spectral_norm, ComplexMatrix, Tolerances};
use crate::props::classify;

pub const MAX_ATTEMPTS: usize = 100;

/// Variants of the block-triangular `[[W, R], [0, Q]]` corpus family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingVariant {
    /// `‖[R; Q]‖ < 1`, so `Q` is pure.
    Pure,
    /// A unit singular direction of `[R; Q]` that `R` does not kill.
    SaturatedCoupled,
    /// A unit singular direction carried by `Q` alone.
    SaturatedDecoupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassKind {
    Unitary,
    Symmetry,
    Contraction,
    PureContraction,
    PartialIsometry { rank: usize },
    Nilpotent { order: usize },
    /// `[[S, R], [0, Q]]` with `S` unitary and `Q^m = 0`; `R = 0` when contractive.
    MQuasiIsometry { m: usize, contractive: bool },
    /// Symmetry on a random subspace, zero on its complement.
    SymmetryPlusZero,
    SelfAdjointContraction,
    HermitianPlusPerturbation { epsilon: f64 },
    /// Contraction with a nontrivial largest partial-isometric invariant part.
    BlockTriangular { variant: CouplingVariant },
}

impl ClassKind {
    fn tag(&self) -> u64 {
        match self {
            ClassKind::Unitary => 1,
            ClassKind::Symmetry => 2,
            ClassKind::Contraction => 3,
            ClassKind::PureContraction => 4,
            ClassKind::PartialIsometry { .. } => 5,
            ClassKind::Nilpotent { .. } => 6,
            ClassKind::MQuasiIsometry { .. } => 7,
            ClassKind::SymmetryPlusZero => 8,
            ClassKind::SelfAdjointContraction => 9,
            ClassKind::HermitianPlusPerturbation { .. } => 10,
            ClassKind::BlockTriangular { .. } => 11,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ClassKind::Unitary => "unitary".into(),
            ClassKind::Symmetry => "symmetry".into(),
            ClassKind::Contraction => "contraction".into(),
            ClassKind::PureContraction => "pure_contraction".into(),
            ClassKind::PartialIsometry { rank } => format!("partial_isometry(rank={rank})"),
            ClassKind::Nilpotent { order } => format!("nilpotent(order={order})"),
            ClassKind::MQuasiIsometry { m, contractive } => format!("m_quasi_isometry(m={m}, contractive={contractive})"),
            ClassKind::SymmetryPlusZero => "symmetry_plus_zero".into(),
            ClassKind::SelfAdjointContraction => "self_adjoint_contraction".into(),
            ClassKind::HermitianPlusPerturbation { epsilon } => format!("hermitian_plus_perturbation(epsilon={epsilon})"),
            ClassKind::BlockTriangular { variant } => format!("block_triangular({variant:?})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub kind: ClassKind,
    pub dim: usize,
    pub seed: u64,
}

impl ClassSpec {
    pub fn new(kind: ClassKind, dim: usize, seed: u64) -> Self {
        Self { kind, dim, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        match self.kind {
            ClassKind::PartialIsometry { rank } if rank > self.dim => bad(format!("rank {rank} exceeds dim {}", self.dim)),
            ClassKind::Nilpotent { order } if order == 0 || order > self.dim => {
                bad(format!("order {order} must lie in 1..={}", self.dim))
            }
            ClassKind::MQuasiIsometry { m: 0, .. } => bad("m must be at least 1".into()),
            ClassKind::HermitianPlusPerturbation { epsilon } if !(epsilon >= 0.0 && epsilon.is_finite()) => {
                bad(format!("epsilon {epsilon} must be finite and nonnegative"))
            }
            ClassKind::BlockTriangular { .. } if self.dim < 2 => bad("block_triangular needs dim ≥ 2".into()),
            _ => Ok(()),
        }
    }
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex Gaussian entries `(x + iy)/√2`, row-major.
pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(c64(re, im) * std::f64::consts::FRAC_1_SQRT_2);
    }
    ComplexMatrix::from_row_major(rows, cols, data).expect("finite Gaussian draws")
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of `diag(R)` removed.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let qr = gaussian(rng, n, n).into_nalgebra().qr();
    let (q, r) = (qr.q(), qr.r());
    let q = ComplexMatrix::from_nalgebra(q);
    let phases: Vec<_> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                c64(1.0, 0.0)
            }
        })
        .collect();
    &q * &ComplexMatrix::from_diagonal(&phases)
}

fn conjugate(u: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    &(u * a) * &u.adjoint()
}

/// Weighted shift chains: the first of length `order`, the rest no longer.
fn shift_chains(rng: &mut impl Rng, n: usize, order: usize, max_weight: f64) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(n, n);
    let mut start = 0;
    let mut first = true;
    while start < n {
        let len = if first { order.min(n - start) } else { rng.random_range(1..=order.min(n - start)) };
        first = false;
        for i in start..start + len - 1 {
            let w = rng.random_range(0.3..=1.0) * max_weight;
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            t.set(i, i + 1, c64(w * phase.cos(), w * phase.sin()));
        }
        start += len;
    }
    t
}

/// Spectrum of a self-adjoint contraction: some exact ±1 and 0, the rest well inside.
fn hermitian_spectrum(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            if u < 0.2 {
                1.0
            } else if u < 0.4 {
                -1.0
            } else if u < 0.55 {
                0.0
            } else {
                let mag = rng.random_range(0.05..0.95);
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
        })
        .collect()
}

fn symmetry_signs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn draw(kind: ClassKind, n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    match kind {
        ClassKind::Unitary => haar_unitary(rng, n),
        ClassKind::Symmetry => {
            let u = haar_unitary(rng, n);
            conjugate(&u, &ComplexMatrix::from_real_diagonal(&symmetry_signs(rng, n)))
        }
        ClassKind::Contraction | ClassKind::PureContraction => {
            let g = gaussian(rng, n, n);
            let target = if kind == ClassKind::Contraction { 1.0 } else { 0.9 };
            g.scale(target / spectral_norm(&g))
        }
        ClassKind::PartialIsometry { rank } => {
            let u = haar_unitary(rng, n);
            let v = haar_unitary(rng, n);
            let d: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
            &(&u * &ComplexMatrix::from_real_diagonal(&d)) * &v.adjoint()
        }
        ClassKind::Nilpotent { order } => {
            let chains = shift_chains(rng, n, order, 1.0);
            conjugate(&haar_unitary(rng, n), &chains)
        }
        ClassKind::MQuasiIsometry { m, contractive } => {
            let k = if n == 1 { 1 } else { rng.random_range(1..n) };
            let s = haar_unitary(rng, k);
            let tail = n - k;
            let q = if tail == 0 { ComplexMatrix::zeros(0, 0) } else { shift_chains(rng, tail, m.min(tail), 1.0) };
            let r = if contractive || tail == 0 { ComplexMatrix::zeros(k, tail) } else { gaussian(rng, k, tail).scale(0.5) };
            let block = ComplexMatrix::from_blocks(&[vec![s, r], vec![ComplexMatrix::zeros(tail, k), q]]);
            conjugate(&haar_unitary(rng, n), &block)
        }
        ClassKind::SymmetryPlusZero => {
            let k = rng.random_range(1..=n);
            let mut d = symmetry_signs(rng, k);
            d.resize(n, 0.0);
            conjugate(&haar_unitary(rng, n), &ComplexMatrix::from_real_diagonal(&d))
        }
        ClassKind::SelfAdjointContraction => {
            let d = hermitian_spectrum(rng, n);
            conjugate(&haar_unitary(rng, n), &ComplexMatrix::from_real_diagonal(&d))
        }
        ClassKind::HermitianPlusPerturbation { epsilon } => {
            let d = hermitian_spectrum(rng, n);
            let h = conjugate(&haar_unitary(rng, n), &ComplexMatrix::from_real_diagonal(&d));
            let g = gaussian(rng, n, n);
            &h + &g.scale(epsilon / g.norm_fro())
        }
        ClassKind::BlockTriangular { variant } => block_triangular(rng, n, variant),
    }
}

/// `[[0, W₀, R₀], [0, W₁, R₁], [0, 0, Q]]` with `[W₀; W₁]` an isometry and `R = Y·C` for `Y ⊥ W`.
fn block_triangular(rng: &mut ChaCha8Rng, n: usize, variant: CouplingVariant) -> ComplexMatrix {
    let c = rng.random_range(1..n);
    let ab = n - c;
    let b = rng.random_range(0..=ab);
    let a = ab - b;
    let v = haar_unitary(rng, ab);
    let w = v.columns(a, b);
    let y = v.columns(0, a);
    let mut stack = gaussian(rng, a + c, c);
    let top = spectral_norm(&stack);
    stack = stack.scale(if top > 0.0 { 1.0 / top } else { 0.0 });
    match variant {
        CouplingVariant::Pure => stack = stack.scale(0.9),
        CouplingVariant::SaturatedCoupled => {}
        CouplingVariant::SaturatedDecoupled => {
            // M = (I − ee*)·A·(I − xx*) + e·x* with e supported on the Q rows, so
            // M*M = (rest) ⊕ xx* and C·x = 0.
            let x = haar_unitary(rng, c).column(0);
            let out = haar_unitary(rng, c).column(0);
            let e = ComplexMatrix::from_blocks(&[vec![ComplexMatrix::zeros(a, 1)], vec![out]]);
            let left = &ComplexMatrix::identity(a + c) - &e.co_gram();
            let right = &ComplexMatrix::identity(c) - &x.co_gram();
            let rest = &(&left * &stack.scale(0.8)) * &right;
            stack = &rest + &(&e * &x.adjoint());
        }
    }
    let cmat = stack.sub_block(0, 0, a, c);
    let q = stack.sub_block(a, 0, c, c);
    let r = &y * &cmat;
    let m_block = ComplexMatrix::hstack(&[&ComplexMatrix::zeros(ab, a), &w], ab);
    let t = ComplexMatrix::from_blocks(&[vec![m_block, r], vec![ComplexMatrix::zeros(c, ab), q]]);
    conjugate(&haar_unitary(rng, n), &t)
}

fn verify(kind: ClassKind, t: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    let ms: Vec<usize> = match kind {
        ClassKind::MQuasiIsometry { m, .. } => vec![m],
        _ => vec![],
    };
    let c = classify(t, &ms, tol)?;
    Ok(match kind {
        ClassKind::Unitary => c.unitary.holds,
        ClassKind::Symmetry => c.symmetry.holds,
        ClassKind::Contraction => c.contraction.holds,
        ClassKind::PureContraction => c.pure_contraction.holds,
        ClassKind::PartialIsometry { rank } => {
            c.partial_isometry.holds && crate::linalg::range_closure(t, tol)?.dim() == rank
        }
        ClassKind::Nilpotent { order } => c.nilpotent_order == Some(order) && c.contraction.holds,
        ClassKind::MQuasiIsometry { m, contractive } => {
            c.quasi(m).is_some_and(|q| q.holds) && (!contractive || c.contraction.holds)
        }
        ClassKind::SymmetryPlusZero => c.self_adjoint.holds && c.partial_isometry.holds,
        ClassKind::SelfAdjointContraction => c.self_adjoint.holds && c.contraction.holds,
        ClassKind::HermitianPlusPerturbation { epsilon } => epsilon == 0.0 || !c.self_adjoint.holds,
        ClassKind::BlockTriangular { .. } => c.contraction.holds,
    })
}

/// Deterministic in `(kind, dim, seed)`; resamples up to [`MAX_ATTEMPTS`] times.
pub fn generate(spec: &ClassSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let tol = Tolerances::default();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream_rng(spec.seed, (spec.kind.tag() << 32) | attempt as u64);
        let t = draw(spec.kind, spec.dim, &mut rng);
        if t.is_finite() && verify(spec.kind, &t, &tol)? {
            return Ok(t);
        }
    }
    Err(Error::GenerationFailed { kind: spec.kind.name(), attempts: MAX_ATTEMPTS })
}

/// `T + ε·G` with `G` a seeded Gaussian of unit Frobenius norm.
pub fn perturb(t: &ComplexMatrix, epsilon: f64, seed: u64) -> ComplexMatrix {
    if epsilon == 0.0 {
        return t.clone();
    }
    let mut rng = stream_rng(seed, u64::MAX);
    let g = gaussian(&mut rng, t.rows(), t.cols());
    t + &g.scale(epsilon / g.norm_fro())
}

/// `T = [[0, I], [0, 0]]` and `U = [[0, I], [I, 0]]` on `C^h ⊕ C^h`.
pub fn shift_symmetry_pair(half_dim: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if half_dim == 0 {
        return Err(Error::InvalidSpec("half_dim must be at least 1".into()));
    }
    let h = half_dim;
    let one = c64(1.0, 0.0);
    let zero = c64(0.0, 0.0);
    let t = ComplexMatrix::from_fn(2 * h, 2 * h, |i, j| if j == i + h { one } else { zero });
    let u = ComplexMatrix::from_fn(2 * h, 2 * h, |i, j| if j == i + h || i == j + h { one } else { zero });
    Ok((t, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_example() {
        let t = generate(&ClassSpec::new(ClassKind::Symmetry, 4, 1)).unwrap();
        assert!(t.asymmetry_fro() < 1e-12);
        assert!((&t * &t).dist_fro(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn partial_isometry_example() {
        let t = generate(&ClassSpec::new(ClassKind::PartialIsometry { rank: 2 }, 3, 7)).unwrap();
        let g = t.gram();
        assert!((&g * &g).dist_fro(&g) < 1e-12);
        assert!((g.trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_example() {
        let t = generate(&ClassSpec::new(ClassKind::Nilpotent { order: 3 }, 4, 2)).unwrap();
        assert!(t.pow(3).norm_fro() < 1e-12);
        assert!(t.pow(2).norm_fro() > 1e-3);
    }

    #[test]
    fn deterministic() {
        for kind in [ClassKind::Contraction, ClassKind::MQuasiIsometry { m: 3, contractive: true }] {
            let spec = ClassSpec::new(kind, 5, 99);
            assert_eq!(generate(&spec).unwrap().row_major(), generate(&spec).unwrap().row_major());
        }
        let a = generate(&ClassSpec::new(ClassKind::Unitary, 3, 1)).unwrap();
        let b = generate(&ClassSpec::new(ClassKind::Unitary, 3, 2)).unwrap();
        assert!(a.dist_fro(&b) > 1e-3);
    }

    #[test]
    fn every_kind_generates() {
        let kinds = [
            ClassKind::Unitary,
            ClassKind::Symmetry,
            ClassKind::Contraction,
            ClassKind::PureContraction,
            ClassKind::PartialIsometry { rank: 3 },
            ClassKind::Nilpotent { order: 5 },
            ClassKind::MQuasiIsometry { m: 2, contractive: false },
            ClassKind::MQuasiIsometry { m: 4, contractive: true },
            ClassKind::SymmetryPlusZero,
            ClassKind::SelfAdjointContraction,
            ClassKind::HermitianPlusPerturbation { epsilon: 1e-3 },
            ClassKind::BlockTriangular { variant: CouplingVariant::Pure },
            ClassKind::BlockTriangular { variant: CouplingVariant::SaturatedCoupled },
            ClassKind::BlockTriangular { variant: CouplingVariant::SaturatedDecoupled },
        ];
        for kind in kinds {
            for seed in 0..5 {
                let t = generate(&ClassSpec::new(kind, 6, seed)).unwrap_or_else(|e| panic!("{kind:?}: {e}"));
                assert_eq!(t.rows(), 6);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&ClassSpec::new(ClassKind::PartialIsometry { rank: 4 }, 3, 0)).is_err());
        assert!(generate(&ClassSpec::new(ClassKind::Nilpotent { order: 0 }, 3, 0)).is_err());
        assert!(generate(&ClassSpec::new(ClassKind::HermitianPlusPerturbation { epsilon: -1.0 }, 3, 0)).is_err());
        assert!(generate(&ClassSpec::new(ClassKind::Unitary, 0, 0)).is_err());
    }

    #[test]
    fn perturbation_norm() {
        let t = generate(&ClassSpec::new(ClassKind::Symmetry, 4, 3)).unwrap();
        assert_eq!(perturb(&t, 0.0, 5), t);
        assert!((perturb(&t, 0.25, 5).dist_fro(&t) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn example_41_identities() {
        for h in 1..=4 {
            let (t, u) = shift_symmetry_pair(h).unwrap();
            let left = ComplexMatrix::identity(h).direct_sum(&ComplexMatrix::zeros(h, h));
            let right = ComplexMatrix::zeros(h, h).direct_sum(&ComplexMatrix::identity(h));
            assert_eq!(&t * &u, left);
            assert_eq!(&u * &t, right);
            assert_eq!(u.adjoint(), u);
            assert_eq!(&u * &u, ComplexMatrix::identity(2 * h));
        }
        let (t, u) = shift_symmetry_pair(1).unwrap();
        assert_eq!(t, ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert_eq!(u, ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
    }
}
