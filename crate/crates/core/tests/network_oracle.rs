//! Loaded-network reduction against a brute-force linear-system oracle.
//!
//! The oracle assembles the full 2N-unknown system [V; I] with V = Z I,
//! V_p = -Z_load,p I_p, I_a = 1 and solves it with its own elimination code,
//! sharing nothing with the reduction path under test.

use num_complex::Complex64;
use rand::Rng;

use beamspace::grid::make_grid;
use beamspace::linalg::CMatrix;
use beamspace::network::{reduce_loaded, LoadState, NetworkEntry, PortNetwork};
use beamspace::pattern::VectorPattern;
use beamspace::rng::make_rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent dense complex solver (Gauss-Jordan with column-max pivoting),
/// deliberately separate from the crate's linalg.
fn oracle_solve(a: &mut [Vec<Complex64>], b: &mut [Complex64]) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .norm()
                    .partial_cmp(&a[j][col].norm())
                    .unwrap()
            })
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d.norm() > 0.0, "oracle system is singular");
        for j in 0..n {
            a[col][j] /= d;
        }
        b[col] /= d;
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..n {
                    let v = a[col][j];
                    a[i][j] -= f * v;
                }
                let v = b[col];
                b[i] -= f * v;
            }
        }
    }
    b.to_vec()
}

/// Full-system oracle: returns (V, I) for unit current at the active port.
fn brute_force(z: &CMatrix, loads: &[Complex64], active: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = z.n_rows();
    let dim = 2 * n;
    let mut a = vec![vec![Complex64::ZERO; dim]; dim];
    let mut b = vec![Complex64::ZERO; dim];
    // rows 0..n: V_i - sum_j Z_ij I_j = 0
    for i in 0..n {
        a[i][i] = Complex64::ONE;
        for j in 0..n {
            a[i][n + j] = -z[(i, j)];
        }
    }
    // rows n..: terminations and the drive
    let mut row = n;
    let mut li = 0;
    for p in 0..n {
        if p == active {
            a[row][n + p] = Complex64::ONE; // I_a = 1
            b[row] = Complex64::ONE;
        } else {
            a[row][p] = Complex64::ONE; // V_p + Z_load I_p = 0
            a[row][n + p] = loads[li];
            li += 1;
        }
        row += 1;
    }
    let x = oracle_solve(&mut a, &mut b);
    (x[..n].to_vec(), x[n..].to_vec())
}

fn random_passive_network(seed: u64, n: usize) -> (PortNetwork, CMatrix) {
    let mut rng = make_rng(seed);
    // Re(Z) = M M^T + eps I is symmetric positive definite, Im(Z) symmetric
    let mut m = vec![vec![0.0f64; n]; n];
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.random_range(-1.0..1.0) * 40.0;
        }
    }
    let mut z = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut re = 0.0;
            for k in 0..n {
                re += m[i][k] * m[j][k];
            }
            z[(i, j)] = c(re / n as f64 + if i == j { 5.0 } else { 0.0 }, 0.0);
        }
    }
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-80.0..80.0);
            z[(i, j)] += c(0.0, x);
            if j != i {
                z[(j, i)] += c(0.0, x);
            }
        }
    }
    let grid = make_grid(4, 8).unwrap();
    let pat = |amp: f64| {
        VectorPattern::from_fn(
            grid.clone(),
            1e9,
            move |_, _| c(amp, 0.0),
            |_, _| c(0.0, 0.0),
        )
        .unwrap()
    };
    let net = PortNetwork::new(
        50.0,
        vec![NetworkEntry {
            frequency: 1e9,
            z: z.clone(),
            port_patterns: (0..n).map(|k| pat(0.3 + 0.1 * k as f64)).collect(),
        }],
    )
    .unwrap();
    (net, z)
}

fn random_passive_loads(seed: u64, count: usize) -> LoadState {
    let mut rng = make_rng(seed);
    LoadState::new(
        (0..count)
            .map(|_| c(rng.random_range(0.0..30.0), rng.random_range(-400.0..400.0)))
            .collect(),
    )
    .unwrap()
}

#[test]
fn reduction_matches_brute_force_on_randomized_networks() {
    let mut worst_current = 0.0f64;
    let mut worst_zin = 0.0f64;
    for trial in 0..100 {
        let (net, z) = random_passive_network(1000 + trial, 3);
        let loads = random_passive_loads(5000 + trial, 2);
        let active = (trial % 3) as usize;
        let sol = reduce_loaded(&net, 1e9, &loads, active).unwrap();
        let (v, i) = brute_force(&z, loads.loads(), active);
        let z_in_oracle = v[active];
        let scale_i = i.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
        for p in 0..3 {
            let err = (sol.port_currents[p] - i[p]).norm() / scale_i;
            worst_current = worst_current.max(err);
        }
        worst_zin = worst_zin.max((sol.z_in - z_in_oracle).norm() / z_in_oracle.norm());
        assert!(
            sol.gamma.norm() <= 1.0 + 1e-12,
            "passivity violated: |gamma| = {}",
            sol.gamma.norm()
        );
    }
    assert!(
        worst_current < 1e-12,
        "worst relative current error {worst_current:.2e}"
    );
    assert!(worst_zin < 1e-12, "worst relative Z_in error {worst_zin:.2e}");
}

#[test]
fn four_port_reduction_also_matches() {
    for trial in 0..20 {
        let (net, z) = random_passive_network(7000 + trial, 4);
        let loads = random_passive_loads(9000 + trial, 3);
        let sol = reduce_loaded(&net, 1e9, &loads, 0).unwrap();
        let (v, i) = brute_force(&z, loads.loads(), 0);
        for p in 0..4 {
            assert!((sol.port_currents[p] - i[p]).norm() < 1e-10);
        }
        assert!((sol.z_in - v[0]).norm() / v[0].norm() < 1e-12);
    }
}

#[test]
fn purely_reactive_loads_keep_all_power_accounted() {
    // lossless loads on a lossy-free abstract net: p_load == 0 and |gamma| <= 1
    for trial in 0..25 {
        let (net, _) = random_passive_network(400 + trial, 3);
        let mut rng = make_rng(100 + trial);
        let loads = LoadState::reactive(
            rng.random_range(-400.0..400.0),
            rng.random_range(-400.0..400.0),
        );
        let sol = reduce_loaded(&net, 1e9, &loads, 0).unwrap();
        assert_eq!(sol.p_load, 0.0);
        assert!(sol.gamma.norm() <= 1.0 + 1e-12);
    }
}
