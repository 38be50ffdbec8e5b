//! Loaded N-port reduction to a single driven port.
//!
//! The antenna is an N-port with one active port; the remaining ports carry
//! complex terminations. Loads enter the impedance matrix as a diagonal
//! addition, the passive block is eliminated, and the radiated pattern is the
//! current-weighted sum of the per-port embedded patterns rescaled to unit
//! incident power, so pattern power reads directly as total transmit
//! efficiency.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pattern::{power, VectorPattern};

/// Condition-number ceiling for the loaded passive block; beyond this the
/// reduction reports a resonant-load degeneracy instead of returning noise.
pub const COND_LIMIT: f64 = 1e12;

/// Relative tolerance for the reciprocity (symmetry) check at ingestion.
pub const RECIPROCITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct NetworkEntry {
    pub frequency: f64,
    pub z: CMatrix,
    /// Field radiated by unit current at each port (all other port currents
    /// zero), scaled so that `power(sum_k I_k * pattern_k)` is radiated watts.
    pub port_patterns: Vec<VectorPattern>,
}

#[derive(Debug, Clone)]
pub struct PortNetwork {
    z_ref: f64,
    n_ports: usize,
    entries: Vec<NetworkEntry>,
}

impl PortNetwork {
    pub fn new(z_ref: f64, mut entries: Vec<NetworkEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("port network needs at least one frequency"));
        }
        if !(z_ref > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reference impedance must be positive, got {z_ref}"
            )));
        }
        let n_ports = entries[0].z.n_rows();
        for e in &entries {
            if !e.z.is_square() || e.z.n_rows() != n_ports {
                return Err(Error::InvalidParameter(
                    "impedance matrices must be square with a consistent port count".into(),
                ));
            }
            if e.z.symmetry_defect() > RECIPROCITY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "impedance matrix at {} Hz violates reciprocity (defect {:.2e})",
                    e.frequency,
                    e.z.symmetry_defect()
                )));
            }
            if e.port_patterns.len() != n_ports {
                return Err(Error::InvalidParameter(format!(
                    "expected {} port patterns at {} Hz, got {}",
                    n_ports,
                    e.frequency,
                    e.port_patterns.len()
                )));
            }
            for p in &e.port_patterns {
                if !p.same_grid(&e.port_patterns[0]) {
                    return Err(Error::GridMismatch);
                }
            }
        }
        entries.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap());
        Ok(PortNetwork {
            z_ref,
            n_ports,
            entries,
        })
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.frequency).collect()
    }

    pub fn entries(&self) -> &[NetworkEntry] {
        &self.entries
    }

    /// Nearest stored frequency sample. There is no interpolation of Z or
    /// patterns between samples; requests further than 0.1% relative from
    /// any sample are rejected.
    pub fn entry_near(&self, f: f64) -> Result<&NetworkEntry> {
        let e = self
            .entries
            .iter()
            .min_by(|a, b| {
                (a.frequency - f)
                    .abs()
                    .partial_cmp(&(b.frequency - f).abs())
                    .unwrap()
            })
            .ok_or(Error::FrequencyNotFound(f))?;
        if (e.frequency - f).abs() > 1e-3 * f.abs().max(1.0) {
            return Err(Error::FrequencyNotFound(f));
        }
        Ok(e)
    }

    /// Largest relative asymmetry between the two passive ports of a 3-port
    /// under exchange; a mirror-symmetric radiator gives roundoff here.
    pub fn mirror_symmetry_defect(&self, f: f64, active_port: usize) -> Result<f64> {
        if self.n_ports != 3 {
            return Err(Error::InvalidParameter(
                "mirror symmetry check is defined for 3-port networks".into(),
            ));
        }
        if active_port >= 3 {
            return Err(Error::PortOutOfRange(active_port, 3));
        }
        let e = self.entry_near(f)?;
        let p: Vec<usize> = (0..3).filter(|&k| k != active_port).collect();
        let a = active_port;
        let scale = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| e.z[(i, j)].norm())
            .fold(0.0_f64, f64::max);
        let d1 = (e.z[(p[0], p[0])] - e.z[(p[1], p[1])]).norm();
        let d2 = (e.z[(a, p[0])] - e.z[(a, p[1])]).norm();
        Ok(d1.max(d2) / scale)
    }
}

/// Complex terminations at the passive ports, in port order with the active
/// port skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadState {
    loads: Vec<Complex64>,
}

impl LoadState {
    pub fn new(loads: Vec<Complex64>) -> Result<Self> {
        for (i, z) in loads.iter().enumerate() {
            if z.re < 0.0 {
                return Err(Error::NegativeLoadResistance(z.re, i));
            }
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "load at port {i} is not finite"
                )));
            }
        }
        Ok(LoadState { loads })
    }

    /// Purely reactive pair jx1, jx2 (the idealized switch states).
    pub fn reactive(x1: f64, x2: f64) -> Self {
        LoadState {
            loads: vec![Complex64::new(0.0, x1), Complex64::new(0.0, x2)],
        }
    }

    /// Reactive pair with a uniform series resistance, for realizable loads.
    pub fn reactive_with_series(x1: f64, x2: f64, r_series: f64) -> Result<Self> {
        LoadState::new(vec![
            Complex64::new(r_series, x1),
            Complex64::new(r_series, x2),
        ])
    }

    /// Measured p-i-n diode impedances at 1.95 GHz: forward 1.9 + j17 ohm,
    /// reverse 35.4 - j407 ohm.
    pub fn pin_diode_fixture() -> Self {
        LoadState {
            loads: vec![Complex64::new(1.9, 17.0), Complex64::new(35.4, -407.0)],
        }
    }

    pub fn loads(&self) -> &[Complex64] {
        &self.loads
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    /// The mirrored switch state: the two passive-port loads exchanged.
    pub fn swapped(&self) -> Self {
        let mut loads = self.loads.clone();
        loads.reverse();
        LoadState { loads }
    }
}

/// Result of reducing the loaded network to its single driven port.
#[derive(Debug, Clone)]
pub struct DrivenSolution {
    pub z_in: Complex64,
    pub gamma: Complex64,
    /// Port currents for unit active-port current, in port order.
    pub port_currents: Vec<Complex64>,
    /// Radiated field normalized to unit incident power.
    pub pattern: VectorPattern,
    /// Radiated fraction of incident power (spherical quadrature).
    pub p_rad: f64,
    /// Fraction dissipated in the load resistances.
    pub p_load: f64,
    /// Reflected fraction |gamma|^2.
    pub p_mismatch: f64,
}

/// Z to S: S = (Z - z_ref I)(Z + z_ref I)^-1.
pub fn z_to_s(z: &CMatrix, z_ref: f64) -> Result<CMatrix> {
    if !(z_ref > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "z_ref must be positive, got {z_ref}"
        )));
    }
    if !z.is_square() {
        return Err(Error::InvalidParameter("Z must be square".into()));
    }
    let n = z.n_rows();
    let mut plus = z.clone();
    let mut minus = z.clone();
    for i in 0..n {
        plus[(i, i)] += Complex64::new(z_ref, 0.0);
        minus[(i, i)] -= Complex64::new(z_ref, 0.0);
    }
    let inv = plus
        .inverse()
        .map_err(|_| Error::SingularMatrix("z_to_s: Z + z_ref I"))?;
    Ok(minus.mul(&inv))
}

/// S to Z: Z = z_ref (I + S)(I - S)^-1.
pub fn s_to_z(s: &CMatrix, z_ref: f64) -> Result<CMatrix> {
    if !(z_ref > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "z_ref must be positive, got {z_ref}"
        )));
    }
    if !s.is_square() {
        return Err(Error::InvalidParameter("S must be square".into()));
    }
    let n = s.n_rows();
    let mut plus = s.clone();
    let mut minus = CMatrix::identity(n);
    for i in 0..n {
        plus[(i, i)] += Complex64::ONE;
        for j in 0..n {
            minus[(i, j)] -= s[(i, j)];
        }
    }
    let inv = minus
        .inverse()
        .map_err(|_| Error::SingularMatrix("s_to_z: I - S"))?;
    let mut z = plus.mul(&inv);
    for i in 0..n {
        for j in 0..n {
            z[(i, j)] *= z_ref;
        }
    }
    Ok(z)
}

/// Reduce the loaded network at frequency `f` to the driven port.
pub fn reduce_loaded(
    net: &PortNetwork,
    f: f64,
    loads: &LoadState,
    active_port: usize,
) -> Result<DrivenSolution> {
    let n = net.n_ports();
    if active_port >= n {
        return Err(Error::PortOutOfRange(active_port, n));
    }
    if loads.len() != n - 1 {
        return Err(Error::LoadCountMismatch {
            expected: n - 1,
            got: loads.len(),
        });
    }
    let entry = net.entry_near(f)?;
    let passive: Vec<usize> = (0..n).filter(|&k| k != active_port).collect();
    let m = passive.len();

    // A = Z_pp + diag(loads)
    let mut a = CMatrix::zeros(m, m);
    for (r, &pr) in passive.iter().enumerate() {
        for (c, &pc) in passive.iter().enumerate() {
            a[(r, c)] = entry.z[(pr, pc)];
        }
        a[(r, r)] += loads.loads()[r];
    }
    let cond = a.cond_one();
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(Error::ResonantLoadDegeneracy { cond });
    }

    // I_p = -(Z_pp + D)^-1 Z_pa for unit active current.
    let rhs: Vec<Complex64> = passive
        .iter()
        .map(|&pr| -entry.z[(pr, active_port)])
        .collect();
    let i_p = a.solve(&rhs)?;

    // V_a = Z_aa + Z_ap I_p (I_a = 1); the coupling terms are summed before
    // the self term so that exchanging the passive ports commutes bitwise
    let mut coupling = Complex64::ZERO;
    for (c, &pc) in passive.iter().enumerate() {
        coupling += entry.z[(active_port, pc)] * i_p[c];
    }
    let z_in = entry.z[(active_port, active_port)] + coupling;
    let z0 = Complex64::new(net.z_ref(), 0.0);
    let gamma = (z_in - z0) / (z_in + z0);

    // Available source power for unit active current.
    let p_inc = (z_in + z0).norm_sqr() / (8.0 * net.z_ref());

    let mut port_currents = vec![Complex64::ZERO; n];
    port_currents[active_port] = Complex64::ONE;
    for (c, &pc) in passive.iter().enumerate() {
        port_currents[pc] = i_p[c];
    }

    let mut field = entry.port_patterns[active_port].clone();
    for (c, &pc) in passive.iter().enumerate() {
        field = field.combine(Complex64::ONE, &entry.port_patterns[pc], i_p[c])?;
    }
    let pattern = field.scale(Complex64::new(1.0 / p_inc.sqrt(), 0.0));

    let mut p_load_w = 0.0;
    for (c, z) in loads.loads().iter().enumerate() {
        p_load_w += 0.5 * i_p[c].norm_sqr() * z.re;
    }

    let p_rad = power(&pattern);
    Ok(DrivenSolution {
        z_in,
        gamma,
        port_currents,
        pattern,
        p_rad,
        p_load: p_load_w / p_inc,
        p_mismatch: gamma.norm_sqr(),
    })
}

/// Return loss in dB; a perfect match reports `f64::INFINITY` as a sentinel.
pub fn return_loss_db(sol: &DrivenSolution) -> f64 {
    let g = sol.gamma.norm();
    if g == 0.0 {
        f64::INFINITY
    } else {
        -20.0 * g.log10()
    }
}

/// Solve both mirrored switch states at once. `state_b` must be `state_a`
/// with the two passive-port loads exchanged.
pub fn state_pair(
    net: &PortNetwork,
    f: f64,
    state_a: &LoadState,
    state_b: &LoadState,
    active_port: usize,
) -> Result<(DrivenSolution, DrivenSolution)> {
    if *state_b != state_a.swapped() {
        return Err(Error::InvalidParameter(
            "state_b must be state_a with the passive-port loads exchanged".into(),
        ));
    }
    let sol_a = reduce_loaded(net, f, state_a, active_port)?;
    let sol_b = reduce_loaded(net, f, state_b, active_port)?;
    Ok((sol_a, sol_b))
}
