use entanglab_core::ensembles::sample_gue;
use entanglab_core::linalg::{
    hermitian_eigen, hermitian_eigenvalues, partial_trace, partial_transpose, ComplexMatrix,
    HermitianOperator, ProductDims,
};
use entanglab_core::rng::SeededStream;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// Random Hermitian matrix of varied scale; every third case has a
/// degenerate spectrum (U·diag·U† with repeated entries).
fn random_hermitian(n: usize, seed: u64, log_scale: f64) -> HermitianOperator {
    let stream = SeededStream::new(seed, n as u64);
    let g = sample_gue(n, stream).unwrap().scale(10f64.powf(log_scale));
    if seed % 3 != 0 || n < 3 {
        return g;
    }
    let eig = hermitian_eigen(&g).unwrap();
    let diag: Vec<f64> = (0..n).map(|i| (i / 2) as f64 - 1.0).collect();
    HermitianOperator::from_real_diagonal(&diag)
        .conjugate_by(&eig.vectors)
        .unwrap()
}

fn residual(h: &HermitianOperator) -> f64 {
    let eig = hermitian_eigen(h).unwrap();
    let n = h.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let v = eig.vector(k);
        let hv = h.matrix().mat_vec(&v);
        let r: f64 = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * eig.values[k]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

fn orthonormality_defect(h: &HermitianOperator) -> f64 {
    let eig = hermitian_eigen(h).unwrap();
    let v = &eig.vectors;
    let gram = v.adjoint().matmul(v).unwrap();
    let id = ComplexMatrix::identity(h.dim());
    gram.sub(&id).unwrap().frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigensolver_is_backward_stable(n in 1usize..=64, seed in any::<u64>(), log_scale in -3.0f64..3.0) {
        let h = random_hermitian(n, seed, log_scale);
        let bound = 1e-10 * (1.0 + h.hs_norm());
        prop_assert!(residual(&h) <= bound);
        prop_assert!(orthonormality_defect(&h) <= 1e-10);
    }
}

fn to_nalgebra(h: &HermitianOperator) -> DMatrix<Complex64> {
    let n = h.dim();
    DMatrix::from_fn(n, n, |i, j| h.matrix()[(i, j)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalues_match_nalgebra(n in 1usize..=24, seed in any::<u64>()) {
        let h = random_hermitian(n, seed, 0.0);
        let ours = hermitian_eigenvalues(&h).unwrap();
        let mut theirs: Vec<f64> = to_nalgebra(&h).symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.as_slice().iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + h.hs_norm()), "{a} vs {b}");
        }
    }

    #[test]
    fn partial_trace_and_transpose_commute(seed in any::<u64>(), a in 2usize..=3, b in 2usize..=3, c in 2usize..=3) {
        let dims = ProductDims::new(&[a, b, c]).unwrap();
        let h = random_hermitian(dims.total(), seed, 0.0);
        let reduced_dims = ProductDims::new(&[b, c]).unwrap();
        let lhs = partial_trace(&partial_transpose(&h, &dims, 2).unwrap(), &dims, &[1, 2]).unwrap();
        let rhs = partial_transpose(&partial_trace(&h, &dims, &[1, 2]).unwrap(), &reduced_dims, 1).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().hs_norm() <= 1e-12 * (1.0 + h.hs_norm()));
    }

    #[test]
    fn hs_inner_product_is_real(n in 1usize..=16, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_hermitian(n, s1, 0.0);
        let b = random_hermitian(n, s2.wrapping_add(1), 0.0);
        let ip = a.hs_inner(&b);
        prop_assert!(ip.im.abs() <= 1e-12 * (1.0 + a.hs_norm() * b.hs_norm()));
        // ⟨A,B⟩ = tr(AB)
        let tr = a.matrix().matmul(b.matrix()).unwrap().trace();
        prop_assert!((ip - tr).norm() <= 1e-10 * (1.0 + a.hs_norm() * b.hs_norm()));
    }

    #[test]
    fn partial_transpose_is_an_involution_preserving_trace(seed in any::<u64>(), a in 2usize..=3, b in 2usize..=4) {
        let dims = ProductDims::bipartite(a, b).unwrap();
        let h = random_hermitian(dims.total(), seed, 0.0);
        let pt = partial_transpose(&h, &dims, 1).unwrap();
        prop_assert!((pt.trace() - h.trace()).abs() <= 1e-12 * (1.0 + h.hs_norm()));
        prop_assert!((pt.hs_norm() - h.hs_norm()).abs() <= 1e-12 * (1.0 + h.hs_norm()));
        let back = partial_transpose(&pt, &dims, 1).unwrap();
        prop_assert!(back.sub(&h).unwrap().hs_norm() == 0.0);
    }
}
