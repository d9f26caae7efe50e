//! `Σ_{k=n}^{n_ref-1} ‖B(x) e_k‖²_H ≤ (1 + ‖x‖²_V) tail_ratio_bound(n)` on
//! random states of the `V` ball: 10³ draws per family, radii spread over
//! `[0, 10]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spde_lab_core::coefficients::{
    tail_ratio_bound, DiffusionCoefficient, PointwiseFactor, TailBound,
};
use spde_lab_core::equations::{make_schrodinger, make_wave, FourierParams, SigmaRows, WaveParams};
use spde_lab_core::spectral::{Basis, DiagonalOperator, InterpolationSpaceNorm};
use spde_lab_core::state::{StateLayout, StateNorm};
use spde_lab_core::{make_diagonal, DiagonalParams, EquationSpec};

const DRAWS: usize = 1000;

/// Random direction scaled to `‖x‖_V = r`, `r` uniform on `[0, 10]`.
fn ball_state(rng: &mut ChaCha8Rng, v: &StateNorm, len: usize, decay: f64) -> Vec<f64> {
    let mut x: Vec<f64> = (0..len)
        .map(|i| rng.sample::<f64, _>(StandardNormal) * ((i / 2 + 1) as f64).powf(-decay))
        .collect();
    let r = 10.0 * rng.gen::<f64>();
    let norm = v.norm(&x);
    x.iter_mut().for_each(|c| *c *= r / norm);
    x
}

fn check_spec(spec: &EquationSpec, n_ref: usize, levels: &[usize], seed: u64, decay: f64) {
    let layout = spec.layout();
    let weights = spec.h_norm().weights_on(layout.target_range()).unwrap().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds: Vec<f64> = levels
        .iter()
        .map(|&n| spec.tail_bound(n).value().expect("bound available"))
        .collect();
    for _ in 0..DRAWS {
        let x = ball_state(&mut rng, spec.v_norm(), layout.len(), decay);
        let cols = spec
            .diffusion()
            .column_norms_sq(layout, spec.collocation(), &x, n_ref, &weights)
            .unwrap();
        let scale = 1.0 + spec.v_norm().norm_sq(&x);
        for (&n, &b) in levels.iter().zip(&bounds) {
            let lhs: f64 = cols[n..].iter().sum();
            assert!(lhs <= scale * b * (1.0 + 1e-12), "{}: n={n} lhs={lhs} rhs={}", spec.name(), scale * b);
        }
    }
}

#[test]
fn multiplicative_wave_bound_holds_on_samples() {
    let mut p = WaveParams::free(1.0, 32, 1.0);
    p.b0 = PointwiseFactor::Constant(1.0);
    p.b1 = PointwiseFactor::Constant(0.5);
    let spec = make_wave(&p).unwrap();
    check_spec(&spec, 32, &[4, 8, 16], 1, 0.0);
    check_spec(&spec, 32, &[4, 8, 16], 2, 1.5);
}

#[test]
fn additive_wave_bound_is_the_exact_tail() {
    let mut p = WaveParams::free(1.0, 32, 1.0);
    p.b0 = PointwiseFactor::Constant(1.0);
    check_spec(&make_wave(&p).unwrap(), 32, &[4, 8, 16], 3, 0.5);
}

#[test]
fn schrodinger_bound_holds_on_samples() {
    let mut p = FourierParams::free(3.0, 8, 0, 1.0);
    p.sigma = SigmaRows::Diagonal { scale: 1.0, decay: 1.0 };
    p.b0 = PointwiseFactor::Constant(0.5);
    p.b1 = 0.25;
    let spec = make_schrodinger(&p).unwrap();
    check_spec(&spec, 17, &[2, 5, 9], 4, 0.0);
    check_spec(&spec, 17, &[2, 5, 9], 5, 1.0);
}

#[test]
fn diagonal_bound_holds_on_samples() {
    let spec = make_diagonal(&DiagonalParams::power_law(1.0, 32, 1.0).unwrap()).unwrap();
    check_spec(&spec, 32, &[1, 8, 31], 6, 0.0);
}

#[test]
fn rank_one_bound_holds_on_samples() {
    let modes = 32;
    let layout = StateLayout::Real { basis: Basis::dirichlet_sine(modes) };
    let b = DiffusionCoefficient::rank_one_integral(modes);
    let v = InterpolationSpaceNorm::new(DiagonalOperator::dirichlet_laplacian(modes, 1.0).unwrap(), 0.2).unwrap();
    let v_norm = StateNorm::Weighted(v.weights());
    let weights = vec![1.0; modes];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1, 4, 10, 20] {
        let TailBound::Value(bound) = tail_ratio_bound(&b, Some(&v), n) else { panic!("rank-one bound") };
        for _ in 0..DRAWS {
            let x = ball_state(&mut rng, &v_norm, modes, 0.0);
            let cols = b.column_norms_sq(&layout, None, &x, modes + 1, &weights).unwrap();
            let lhs: f64 = cols[n..].iter().sum();
            assert!(lhs <= (1.0 + v_norm.norm_sq(&x)) * bound * (1.0 + 1e-12));
        }
    }
}
