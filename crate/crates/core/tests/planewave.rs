#![allow(clippy::needless_range_loop)]

use poroelastic_ader::material::assemble_jacobians;
use poroelastic_ader::mesh::build_periodic_cube_mesh;
use poroelastic_ader::planewave::{error_norms, plane_wave_modes, project, Norm, PlaneWaveSolution};
use poroelastic_ader::stp::random_instance;
use poroelastic_ader::{ExecMode, MaterialParameters, Quantity, NUM_QUANTITIES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Max-norm of `q_t + A q_x + B q_y + C q_z - E q` by central differences
/// with spatial step `h` and time step `h / v`, relative to `|q_t|`.
fn fd_residual(material: &MaterialParameters, wave: &PlaneWaveSolution, x: [f64; 3], t: f64, h: f64) -> f64 {
    let jac = assemble_jacobians(material).unwrap();
    let v = 4000.0;
    let ht = h / v;
    let q = wave.evaluate(x, t);
    let diff = |a: [f64; NUM_QUANTITIES], b: [f64; NUM_QUANTITIES], step: f64| -> [f64; NUM_QUANTITIES] {
        std::array::from_fn(|i| (a[i] - b[i]) / (2.0 * step))
    };
    let qt = diff(wave.evaluate(x, t + ht), wave.evaluate(x, t - ht), ht);
    let mut residual = qt;
    for i in 0..NUM_QUANTITIES {
        for j in 0..NUM_QUANTITIES {
            residual[i] -= jac.source[(i, j)] * q[j];
        }
    }
    for (d, flux) in jac.flux.iter().enumerate() {
        let (mut xp, mut xm) = (x, x);
        xp[d] += h;
        xm[d] -= h;
        let qd = diff(wave.evaluate(xp, t), wave.evaluate(xm, t), h);
        for i in 0..NUM_QUANTITIES {
            for j in 0..NUM_QUANTITIES {
                residual[i] += flux[(i, j)] * qd[j];
            }
        }
    }
    let scale = qt.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    residual.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
}

#[test]
fn plane_wave_satisfies_the_pde() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for material in [MaterialParameters::plane_wave_benchmark(), MaterialParameters::plane_wave_benchmark().inviscid()] {
        let wave = PlaneWaveSolution::benchmark(&material).unwrap();
        for _ in 0..20 {
            let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let t = rng.random_range(0.0..1e-4);
            let r: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&h| fd_residual(&material, &wave, x, t, h)).collect();
            assert!(r[2] < 1e-3, "residual {r:?}");
            for w in r.windows(2) {
                let ratio = w[0] / w[1];
                assert!((3.5..4.5).contains(&ratio), "not second order: {r:?}");
            }
        }
    }
}

#[test]
fn eigenpairs_for_random_materials() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let material = random_instance(1, &mut rng).unwrap().material;
        let k: [f64; 3] = std::array::from_fn(|_| rng.random_range(-4.0..4.0));
        let wave = plane_wave_modes(&material, k).unwrap();
        assert_eq!(wave.frequencies.len(), NUM_QUANTITIES);
        // Modes of a dissipative system never grow.
        assert!(wave.frequencies.iter().all(|w| w.im >= -1e-9 * w.norm().max(1.0)));
    }
}

#[test]
fn projection_is_linear_and_keeps_constants() {
    let mesh = build_periodic_cube_mesh(2).unwrap();
    let degree = 3;
    let f = |x: [f64; 3]| -> [f64; NUM_QUANTITIES] { std::array::from_fn(|i| (x[0] * (i + 1) as f64).sin() + x[1] * x[2]) };
    let g = |x: [f64; 3]| -> [f64; NUM_QUANTITIES] { std::array::from_fn(|i| (x[2] - i as f64).exp()) };
    let a = -1.7;
    let pf = project(&mesh, degree, ExecMode::Sequential, f).unwrap();
    let pg = project(&mesh, degree, ExecMode::Sequential, g).unwrap();
    let pc = project(&mesh, degree, ExecMode::Sequential, |x| {
        let (u, v) = (f(x), g(x));
        std::array::from_fn(|i| a * u[i] + v[i])
    })
    .unwrap();
    for ((c, u), v) in pc.iter().zip(&pf).zip(&pg) {
        assert!((c - (a * u + v)).abs() < 1e-13 * (1.0 + c.abs()));
    }

    let nb = pf.len() / (mesh.len() * NUM_QUANTITIES);
    let constant = project(&mesh, degree, ExecMode::Sequential, |_| std::array::from_fn(|i| i as f64 - 4.0)).unwrap();
    for (i, v) in constant.iter().enumerate() {
        let (q, k) = ((i / nb) % NUM_QUANTITIES, i % nb);
        let expected = if k == 0 { q as f64 - 4.0 } else { 0.0 };
        assert!((v - expected).abs() < 1e-13, "coefficient {i}: {v}");
    }
}

#[test]
fn projection_error_converges() {
    let field = |x: [f64; 3]| -> [f64; NUM_QUANTITIES] { [(0.5 * x[0] + x[1]).sin() * (0.7 * x[2]).cos(); NUM_QUANTITIES] };
    for degree in 1..=3 {
        let errors: Vec<f64> = [2, 4, 8]
            .iter()
            .map(|&n| {
                let mesh = build_periodic_cube_mesh(n).unwrap();
                let dofs = project(&mesh, degree, ExecMode::Parallel, field).unwrap();
                error_norms(&mesh, degree, &dofs, ExecMode::Parallel, field).unwrap().get(Norm::L2, Quantity::U)
            })
            .collect();
        let rate = (errors[1] / errors[2]).log2();
        assert!(rate > degree as f64 + 0.7, "degree {degree}: {errors:?}");
    }
}

#[test]
fn norms_are_ordered() {
    let material = MaterialParameters::plane_wave_benchmark();
    let wave = PlaneWaveSolution::benchmark(&material).unwrap();
    let mesh = build_periodic_cube_mesh(2).unwrap();
    let dofs = project(&mesh, 1, ExecMode::Parallel, |x| wave.evaluate(x, 0.0)).unwrap();
    let report = error_norms(&mesh, 1, &dofs, ExecMode::Parallel, |x| wave.evaluate(x, 0.0)).unwrap();
    let volume: f64 = 8.0;
    for q in Quantity::ALL {
        let (l1, l2, linf) = (report.get(Norm::L1, q), report.get(Norm::L2, q), report.get(Norm::LInf, q));
        assert!(l1 <= volume.sqrt() * l2 * (1.0 + 1e-12));
        assert!(l2 <= volume.sqrt() * linf * (1.0 + 1e-12));
    }
}
