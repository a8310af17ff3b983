use entanglab_core::ensembles::sample_gue0;
use entanglab_core::linalg::{max_eigenvalue, HermitianOperator, ProductDims, TracelessHermitian};
use entanglab_core::rng::SeededStream;
use entanglab_core::separability::{
    gauge_d0, gauge_ppt0, gauge_s0, gauge_ssym, gue_gauge_samples, support_s0, AlternatingOptions,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn qubits() -> ProductDims {
    ProductDims::bipartite(2, 2).unwrap()
}

#[test]
fn gauge_chain_and_radius_sandwich_per_draw() {
    // D₀ ⊇ PPT₀ ⊇ S₀; S₀ sits between the balls of radius 1/√12 and √(3/4).
    let samples = gue_gauge_samples(2, 1000, SeededStream::new(2024, 0)).unwrap();
    for (i, g) in samples.iter().enumerate() {
        assert!(g.d0 <= g.ppt0 + 1e-12, "draw {i}: {g:?}");
        assert!(g.ppt0 <= g.s0 + 1e-7 * g.hs, "draw {i}: {g:?}");
        assert!(
            g.s0 <= 12f64.sqrt() * g.hs * (1.0 + 1e-7),
            "draw {i}: {g:?}"
        );
        assert!(
            g.s0 >= (4.0f64 / 3.0).sqrt() * g.hs * (1.0 - 1e-7),
            "draw {i}: {g:?}"
        );
    }
}

#[test]
fn symmetric_gauge_within_hs_bounds() {
    // 2|G| ≤ ‖G‖_{S_sym} ≤ 4|G| on C²⊗C².
    let dims = qubits();
    for i in 0..200 {
        let g = sample_gue0(4, SeededStream::new(77, i)).unwrap();
        let hs = g.hs_norm();
        let v = gauge_ssym(&g, &dims, 1e-10).unwrap().value;
        assert!(v >= 2.0 * hs * (1.0 - 1e-8), "draw {i}: {v} vs |G| = {hs}");
        assert!(v <= 4.0 * hs * (1.0 + 1e-8), "draw {i}: {v} vs |G| = {hs}");
    }
}

fn product_state(u: &[Complex64], v: &[Complex64]) -> TracelessHermitian {
    let psi = entanglab_core::linalg::kron_vectors(&[u.to_vec(), v.to_vec()]);
    TracelessHermitian::project(HermitianOperator::projector(&psi))
}

/// Unit vector of C² at Bloch angles (θ, φ).
fn bloch(theta: f64, phi: f64) -> Vec<Complex64> {
    vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// max over u on a 50×50 Bloch grid of λ_max(⟨u|A|u⟩ contracted on the
/// first qubit), exact in the second factor.
fn grid_support(a: &TracelessHermitian) -> f64 {
    let m = a.operator().matrix();
    let mut best = f64::NEG_INFINITY;
    for it in 0..50 {
        let theta = std::f64::consts::PI * it as f64 / 49.0;
        for ip in 0..50 {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / 50.0;
            let u = bloch(theta, phi);
            let mut b = entanglab_core::linalg::ComplexMatrix::zeros(2, 2);
            for i in 0..2 {
                for ip2 in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            b[(j, k)] += u[i].conj() * m[(2 * i + j, 2 * ip2 + k)] * u[ip2];
                        }
                    }
                }
            }
            let lambda = max_eigenvalue(&HermitianOperator::new(b).unwrap()).unwrap();
            best = best.max(lambda);
        }
    }
    best
}

#[test]
fn support_matches_bloch_grid_oracle() {
    let dims = qubits();
    for i in 0..50 {
        let a = sample_gue0(4, SeededStream::new(505, i)).unwrap();
        let a = a.scale(1.0 / a.hs_norm());
        let am = support_s0(
            &a,
            &dims,
            AlternatingOptions::default(),
            SeededStream::new(506, i),
        )
        .unwrap()
        .value;
        let grid = grid_support(&a);
        assert!(
            am >= grid - 1e-10,
            "draw {i}: alternating {am} below grid {grid}"
        );
        assert!(am - grid <= 1e-3, "draw {i}: gap {} too large", am - grid);
    }
}

#[test]
fn support_and_gauge_are_dual() {
    // ⟨A, B⟩ ≤ ‖A‖_{S₀}·h_{S₀}(B), with equality approached at B's maximizer.
    let dims = qubits();
    for i in 0..100 {
        let a = sample_gue0(4, SeededStream::new(31, i)).unwrap();
        let b = sample_gue0(4, SeededStream::new(32, i)).unwrap();
        let ga = gauge_s0(&a, &dims, 1e-10).unwrap().value;
        let hb = support_s0(
            &b,
            &dims,
            AlternatingOptions::default(),
            SeededStream::new(33, i),
        )
        .unwrap();
        let ip = a.operator().hs_inner(b.operator()).re;
        assert!(
            ip <= ga * hb.value + 1e-8,
            "draw {i}: {ip} > {ga}·{}",
            hb.value
        );
        // the maximizer's centred projector is in S₀ and attains h
        let p = product_state(&hb.maximizer[0], &hb.maximizer[1]);
        assert!(gauge_s0(&p, &dims, 1e-10).unwrap().value <= 1.0 + 1e-8);
        let attained = b.operator().hs_inner(p.operator()).re;
        assert!((attained - hb.value).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gauges_are_positively_homogeneous(seed in any::<u64>(), ci in 0usize..3) {
        let c = [0.5, 2.0, 10.0][ci];
        let dims = qubits();
        let a = sample_gue0(4, SeededStream::new(seed, 0)).unwrap();
        let ca = a.scale(c);
        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-7 * y.abs().max(1.0);
        prop_assert!(rel(gauge_d0(&ca).unwrap(), c * gauge_d0(&a).unwrap()));
        prop_assert!(rel(gauge_ppt0(&ca, &dims).unwrap(), c * gauge_ppt0(&a, &dims).unwrap()));
        let s = gauge_s0(&a, &dims, 1e-11).unwrap().value;
        let cs = gauge_s0(&ca, &dims, 1e-11 * c).unwrap().value;
        prop_assert!(rel(cs, c * s), "{cs} vs {}", c * s);
    }

    #[test]
    fn pure_product_states_have_unit_gauge(seed in any::<u64>()) {
        let mut g = SeededStream::new(seed, 1).gaussian();
        let p = product_state(&g.unit_complex_vector(2), &g.unit_complex_vector(2));
        let v = gauge_s0(&p, &qubits(), 1e-10).unwrap().value;
        // pure product states are extreme points, so the gauge is exactly 1
        prop_assert!((v - 1.0).abs() <= 1e-8, "{v}");
    }
}
