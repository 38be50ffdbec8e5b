//! Complex vector far-field patterns and the mirrored-pair basis.
//!
//! A pattern stores (E_theta, E_phi) samples on a shared spherical grid.
//! Normalization is whatever the producer declares; the network reduction
//! emits fields scaled to unit incident power so that `power` reads as total
//! transmit efficiency.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SphericalGrid;

/// How a pattern reflects in the phi = +/-90 degree plane.
///
/// `ScalarRemap` permaps both components by phi -> pi - phi, the literal
/// scalar relation. `Physical` additionally flips the sign of the phi-hat
/// component, which is what the reflected E-field of a mirrored current
/// distribution does. Both preserve power exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MirrorConvention {
    #[default]
    Physical,
    ScalarRemap,
}

#[derive(Debug, Clone)]
pub struct VectorPattern {
    grid: Arc<SphericalGrid>,
    frequency: f64,
    e_theta: Vec<Complex64>,
    e_phi: Vec<Complex64>,
}

impl VectorPattern {
    pub fn new(
        grid: Arc<SphericalGrid>,
        frequency: f64,
        e_theta: Vec<Complex64>,
        e_phi: Vec<Complex64>,
    ) -> Result<Self> {
        let n = grid.len();
        if e_theta.len() != n {
            return Err(Error::SampleCountMismatch {
                expected: n,
                got: e_theta.len(),
            });
        }
        if e_phi.len() != n {
            return Err(Error::SampleCountMismatch {
                expected: n,
                got: e_phi.len(),
            });
        }
        for (i, z) in e_theta.iter().chain(e_phi.iter()).enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteSample { index: i % n });
            }
        }
        Ok(VectorPattern {
            grid,
            frequency,
            e_theta,
            e_phi,
        })
    }

    /// Sample a pattern from closed-form component functions of (theta, phi).
    pub fn from_fn<F, G>(
        grid: Arc<SphericalGrid>,
        frequency: f64,
        f_theta: F,
        f_phi: G,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
        G: Fn(f64, f64) -> Complex64,
    {
        let mut e_theta = Vec::with_capacity(grid.len());
        let mut e_phi = Vec::with_capacity(grid.len());
        for it in 0..grid.n_theta() {
            let t = grid.theta(it);
            for ip in 0..grid.n_phi() {
                let p = grid.phi(ip);
                e_theta.push(f_theta(t, p));
                e_phi.push(f_phi(t, p));
            }
        }
        VectorPattern::new(grid, frequency, e_theta, e_phi)
    }

    pub fn grid(&self) -> &Arc<SphericalGrid> {
        &self.grid
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn e_theta(&self) -> &[Complex64] {
        &self.e_theta
    }

    pub fn e_phi(&self) -> &[Complex64] {
        &self.e_phi
    }

    pub fn same_grid(&self, other: &VectorPattern) -> bool {
        (Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid)
            && self.frequency == other.frequency
    }

    /// Pattern value at a flat node index.
    pub fn sample(&self, index: usize) -> (Complex64, Complex64) {
        (self.e_theta[index], self.e_phi[index])
    }

    /// Linear combination a*self + b*other on a shared grid.
    pub fn combine(&self, a: Complex64, other: &VectorPattern, b: Complex64) -> Result<VectorPattern> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let e_theta = self
            .e_theta
            .iter()
            .zip(&other.e_theta)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let e_phi = self
            .e_phi
            .iter()
            .zip(&other.e_phi)
            .map(|(x, y)| a * x + b * y)
            .collect();
        VectorPattern::new(self.grid.clone(), self.frequency, e_theta, e_phi)
    }

    pub fn scale(&self, a: Complex64) -> VectorPattern {
        VectorPattern {
            grid: self.grid.clone(),
            frequency: self.frequency,
            e_theta: self.e_theta.iter().map(|z| a * z).collect(),
            e_phi: self.e_phi.iter().map(|z| a * z).collect(),
        }
    }
}

/// Spherical inner product sum_nodes (a_th * conj(b_th) + a_ph * conj(b_ph)) w.
///
/// Kahan-compensated so the value does not drift with grid size; this keeps
/// the energy identities near machine precision even on dense grids.
pub fn inner_product(a: &VectorPattern, b: &VectorPattern) -> Result<Complex64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid();
    let n_phi = grid.n_phi();
    let mut sum = Complex64::ZERO;
    let mut comp = Complex64::ZERO;
    for it in 0..grid.n_theta() {
        let w = grid.weight(it);
        for ip in 0..n_phi {
            let idx = it * n_phi + ip;
            let term = (a.e_theta[idx] * b.e_theta[idx].conj()
                + a.e_phi[idx] * b.e_phi[idx].conj())
                * w;
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    Ok(sum)
}

/// Total pattern power (the inner product of a pattern with itself).
pub fn power(p: &VectorPattern) -> f64 {
    inner_product(p, p).expect("pattern is congruent with itself").re
}

/// Mirror a pattern in the phi = +/-90 degree plane.
pub fn mirror(p: &VectorPattern, convention: MirrorConvention) -> Result<VectorPattern> {
    let grid = p.grid();
    if grid.n_phi() % 2 != 0 {
        return Err(Error::NotMirrorClosed);
    }
    let n_phi = grid.n_phi();
    let n = grid.len();
    let mut e_theta = vec![Complex64::ZERO; n];
    let mut e_phi = vec![Complex64::ZERO; n];
    let phi_sign = match convention {
        MirrorConvention::Physical => -1.0,
        MirrorConvention::ScalarRemap => 1.0,
    };
    for it in 0..grid.n_theta() {
        for ip in 0..n_phi {
            let src = it * n_phi + grid.mirror_phi_index(ip);
            let dst = it * n_phi + ip;
            e_theta[dst] = p.e_theta[src];
            e_phi[dst] = phi_sign * p.e_phi[src];
        }
    }
    VectorPattern::new(grid.clone(), p.frequency, e_theta, e_phi)
}

/// Orthogonal basis built from two mirrored instantaneous patterns.
#[derive(Debug, Clone)]
pub struct BasisPair {
    pub b1: VectorPattern,
    pub b2: VectorPattern,
    pub p_b1: f64,
    pub p_b2: f64,
    pub cross_corr: Complex64,
}

impl BasisPair {
    /// |cross_corr| / sqrt(p_b1 * p_b2), or 0 when a basis power vanishes.
    pub fn normalized_cross_corr(&self) -> f64 {
        let denom = (self.p_b1 * self.p_b2).sqrt();
        if denom == 0.0 {
            0.0
        } else {
            self.cross_corr.norm() / denom
        }
    }

    /// Absolute basis power imbalance in dB.
    pub fn imbalance_db(&self) -> Result<f64> {
        imbalance_db(self)
    }
}

/// Build the sum/difference basis from the two instantaneous patterns:
/// b1 = (g2 + g1)/sqrt(2), b2 = (g2 - g1)/sqrt(2).
pub fn basis_from_states(g1: &VectorPattern, g2: &VectorPattern) -> Result<BasisPair> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let b1 = g2.combine(inv_sqrt2, g1, inv_sqrt2)?;
    let b2 = g2.combine(inv_sqrt2, g1, -inv_sqrt2)?;
    let p_b1 = power(&b1);
    let p_b2 = power(&b2);
    let cross_corr = inner_product(&b1, &b2)?;
    Ok(BasisPair {
        b1,
        b2,
        p_b1,
        p_b2,
        cross_corr,
    })
}

/// Instantaneous total pattern (s1*b1 + s2*b2)/sqrt(2).
pub fn synthesize_total(basis: &BasisPair, s1: Complex64, s2: Complex64) -> VectorPattern {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    basis
        .b1
        .combine(s1 * inv_sqrt2, &basis.b2, s2 * inv_sqrt2)
        .expect("basis members share a grid")
}

/// Absolute power imbalance |10 log10(p_b1 / p_b2)| in dB.
///
/// A vanishing basis power is a degenerate basis and is signaled rather than
/// reported as an infinity.
pub fn imbalance_db(basis: &BasisPair) -> Result<f64> {
    if basis.p_b1 <= 0.0 || basis.p_b2 <= 0.0 {
        return Err(Error::DegenerateBasis);
    }
    Ok((10.0 * (basis.p_b1 / basis.p_b2).log10()).abs())
}
