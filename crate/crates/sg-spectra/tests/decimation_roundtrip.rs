//! Round-trips through the extension algorithm: random members of the
//! localized eigenspaces, pushed down random admissible branch words, must
//! restrict back to themselves exactly and satisfy the eigenvalue
//! equations at every finer level to near machine precision.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sg_core::{
    build_omega, dirichlet_matrix, eigensolve, extend_eigenfunction, phi, Branch, GraphApprox,
};

const SAMPLES: usize = 100;
const RESIDUAL_TOL: f64 = 1e-10;

/// Worst violation of (4-λ)u = Σ_neighbors u over the interior.
fn interior_residual(g: &GraphApprox, u: &[f64], lambda: f64) -> f64 {
    let mut worst = 0.0f64;
    for &i in &g.interior {
        let nbr: f64 = g.neighbors(i).iter().map(|&j| u[j]).sum();
        worst = worst.max(((4.0 - lambda) * u[i] - nbr).abs());
    }
    worst
}

fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Orthonormal basis of one localized eigenspace, padded to full vectors
/// with zeros on the Dirichlet boundary.
fn eigenspace_basis(g: &GraphApprox, seed_value: f64) -> Vec<Vec<f64>> {
    let matrix = dirichlet_matrix(g);
    let spec = eigensolve(&matrix, true).unwrap();
    let vectors = spec.vectors.as_ref().unwrap();
    let mut basis = Vec::new();
    for (i, &lambda) in spec.raw.iter().enumerate() {
        if (lambda - seed_value).abs() < 1e-7 {
            let mut u = vec![0.0; g.n()];
            for (row, &vertex) in matrix.index_map.iter().enumerate() {
                u[vertex] = vectors[i][row];
            }
            basis.push(u);
        }
    }
    assert!(!basis.is_empty(), "no eigenspace at {seed_value}");
    basis
}

#[test]
fn randomized_localized_eigenfunctions_survive_extension() {
    let mut rng = StdRng::seed_from_u64(0x5eed_2026);
    let omega = |m: u32| -> &'static GraphApprox {
        // levels 1..=5, built once and leaked for the lifetime of the test
        use std::sync::OnceLock;
        static GRAPHS: OnceLock<Vec<GraphApprox>> = OnceLock::new();
        &GRAPHS.get_or_init(|| (1..=5).map(|l| build_omega(l).unwrap()).collect())
            [(m - 1) as usize]
    };

    // Dirichlet localized eigenspaces first appear at level 3: the 5s and
    // 6s born there and at level 4 seed every sample
    let seeds: Vec<(u32, f64, Vec<Vec<f64>>)> = [(3u32, 5.0), (3, 6.0), (4, 5.0), (4, 6.0)]
        .into_iter()
        .map(|(level, value)| (level, value, eigenspace_basis(omega(level), value)))
        .collect();

    for sample in 0..SAMPLES {
        let (birth, seed_value, basis) = &seeds[rng.gen_range(0..seeds.len())];
        let target = rng.gen_range(birth + 1..=5);

        // random member of the eigenspace, sup-normalized
        let coeffs: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut u: Vec<f64> = vec![0.0; basis[0].len()];
        for (c, b) in coeffs.iter().zip(basis) {
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui += c * bi;
            }
        }
        let norm = sup_norm(&u);
        if norm < 1e-6 {
            continue; // vanishing combination, no content to test
        }
        for ui in u.iter_mut() {
            *ui /= norm;
        }

        let mut lambda = *seed_value;
        for level in birth + 1..=target {
            // 6 may only continue through φ_+, since φ_-(6)=2 is forbidden
            let branch = if lambda == 6.0 || rng.gen_bool(0.5) {
                Branch::Plus
            } else {
                Branch::Minus
            };
            lambda = phi(branch, lambda).unwrap();
            let g_prev = omega(level - 1);
            let g = omega(level);
            let extended = extend_eigenfunction(g, &u, lambda).unwrap();

            // extend-then-restrict is the identity, bit for bit
            for (i, c) in g_prev.vertices.iter().enumerate() {
                assert_eq!(
                    extended[g.index_of(c).unwrap()],
                    u[i],
                    "sample {sample}: restriction broke at level {level}"
                );
            }
            u = extended;

            let residual = interior_residual(g, &u, lambda);
            let bound = RESIDUAL_TOL * sup_norm(&u);
            assert!(
                residual < bound,
                "sample {sample}: residual {residual:.3e} over {bound:.3e} at level {level}"
            );
            for &b in &g.boundary {
                assert_eq!(u[b], 0.0, "sample {sample}: boundary leaked at level {level}");
            }
        }
    }
}
