//! Spherical quadrature grids.
//!
//! Gauss-Legendre nodes in cos(theta) crossed with a uniform phi ring. The
//! phi ring has an even node count so the mirror map phi -> pi - phi is an
//! exact index permutation, and the quadrature weights sum to 4*pi.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    n_theta: usize,
    n_phi: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    /// Per-node solid-angle weight; constant along each theta row.
    row_weight: Vec<f64>,
}

/// Build an `n_theta x n_phi` quadrature grid.
///
/// `n_phi` must be even; odd counts cannot be closed under phi -> pi - phi.
pub fn make_grid(n_theta: usize, n_phi: usize) -> Result<Arc<SphericalGrid>> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::BadGridSize { n_theta, n_phi });
    }
    if n_phi % 2 != 0 {
        return Err(Error::OddPhiCount(n_phi));
    }
    let (x, w) = gauss_legendre(n_theta);
    let d_phi = 2.0 * PI / n_phi as f64;
    // x ascends in cos(theta), so theta descends; store theta ascending.
    let theta: Vec<f64> = x.iter().rev().map(|&c| c.acos()).collect();
    let row_weight: Vec<f64> = w.iter().rev().map(|&wi| wi * d_phi).collect();
    let phi: Vec<f64> = (0..n_phi).map(|j| -PI + j as f64 * d_phi).collect();
    Ok(Arc::new(SphericalGrid {
        n_theta,
        n_phi,
        theta,
        phi,
        row_weight,
    }))
}

impl SphericalGrid {
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self, i_theta: usize) -> f64 {
        self.theta[i_theta]
    }

    pub fn phi(&self, i_phi: usize) -> f64 {
        self.phi[i_phi]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    pub fn phis(&self) -> &[f64] {
        &self.phi
    }

    /// Solid-angle weight of every node in theta row `i_theta`.
    pub fn weight(&self, i_theta: usize) -> f64 {
        self.row_weight[i_theta]
    }

    /// Flat sample index, row-major theta-then-phi.
    pub fn node_index(&self, i_theta: usize, i_phi: usize) -> usize {
        i_theta * self.n_phi + i_phi
    }

    /// Index of the phi node mapped by phi -> pi - phi (wrapped to [-pi, pi)).
    ///
    /// With phi_j = -pi + j * dphi this is j -> (n/2 - j) mod n, an exact
    /// involution on the ring.
    pub fn mirror_phi_index(&self, i_phi: usize) -> usize {
        (self.n_phi + self.n_phi / 2 - i_phi) % self.n_phi
    }

    pub fn total_weight(&self) -> f64 {
        self.row_weight.iter().sum::<f64>() * self.n_phi as f64
    }

    /// Integrate a scalar function f(theta, phi) over the sphere.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = 0.0;
        for (i, &t) in self.theta.iter().enumerate() {
            let w = self.row_weight[i];
            for &p in &self.phi {
                acc += f(t, p) * w;
            }
        }
        acc
    }

    /// Nearest grid node to a requested direction (radians).
    pub fn nearest_node(&self, theta: f64, phi: f64) -> (usize, usize) {
        let it = self
            .theta
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - theta)
                    .abs()
                    .partial_cmp(&(b.1 - theta).abs())
                    .unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        // phi distance on the ring
        let wrap = |d: f64| {
            let mut d = d.rem_euclid(2.0 * PI);
            if d > PI {
                d = 2.0 * PI - d;
            }
            d
        };
        let ip = self
            .phi
            .iter()
            .enumerate()
            .min_by(|a, b| {
                wrap(a.1 - phi)
                    .partial_cmp(&wrap(b.1 - phi))
                    .unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        (it, ip)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_and_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
