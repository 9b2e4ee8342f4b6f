//! Truncated Fock-space states and the ladder-operator algebra.
//!
//! A single mode keeps Fock levels `0..=cutoff` (`dim = cutoff + 1`). Two-mode
//! states live on the tensor basis `|m> (x) |n>` with mode 1 as the slow index,
//! i.e. basis index `m * dim + n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{laguerre_column, ln_factorials};

pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = -1e-10;
/// Largest probability mass a builder may drop by truncation.
pub const LEAKAGE_TOL: f64 = 1e-10;
/// Largest population tolerated in the headroom band below the cutoff.
pub const HEADROOM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Density operator of one or two bosonic modes in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    n_modes: usize,
    entries: DMatrix<Complex64>,
    leakage: f64,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape and all state invariants.
    pub fn from_matrix(entries: DMatrix<Complex64>, dim: usize, n_modes: usize) -> Result<Self> {
        let rho = Self::from_parts(entries, dim, n_modes, 0.0)?;
        rho.ensure_valid()?;
        Ok(rho)
    }

    pub(crate) fn from_parts(
        entries: DMatrix<Complex64>,
        dim: usize,
        n_modes: usize,
        leakage: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::CutoffTooSmall("dimension must be positive".into()));
        }
        if n_modes != 1 && n_modes != 2 {
            return Err(Error::DimensionMismatch(format!("unsupported mode count {n_modes}")));
        }
        let total = dim.pow(n_modes as u32);
        if entries.nrows() != total || entries.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "expected {total}x{total} entries, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { dim, n_modes, entries, leakage })
    }

    /// Projector onto a normalized pure state given by its amplitudes.
    pub fn from_pure(amplitudes: &[Complex64], dim: usize, n_modes: usize) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let scale = 1.0 / norm.sqrt();
        let n = amplitudes.len();
        let m = DMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() * scale * scale);
        Self::from_parts(m, dim, n_modes, 0.0)
    }

    /// The vacuum `|0><0|`.
    pub fn vacuum(cutoff: usize) -> Self {
        make_fock(0, cutoff).expect("vacuum fits any cutoff")
    }

    /// Per-mode dimension (`cutoff + 1`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.dim - 1
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Side length of the stored matrix, `dim^n_modes`.
    pub fn total_dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Probability mass dropped by truncation before renormalization.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    fn require_single_mode(&self, what: &str) -> Result<()> {
        if self.n_modes != 1 {
            return Err(Error::DimensionMismatch(format!("{what} needs a single-mode state")));
        }
        Ok(())
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidState(report.summary()))
        }
    }

    /// Tensor product `self (x) other` of two single-mode states.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        self.require_single_mode("tensor")?;
        other.require_single_mode("tensor")?;
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "tensor factors have dims {} and {}",
                self.dim, other.dim
            )));
        }
        let entries = self.entries.kronecker(&other.entries);
        Self::from_parts(entries, self.dim, 2, self.leakage + other.leakage)
    }

    /// Embeds the state in a larger truncation; new levels are empty.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<DensityMatrix> {
        let new_dim = cutoff + 1;
        if new_dim < self.dim {
            return Err(Error::CutoffTooSmall(format!(
                "cannot shrink dim {} to {new_dim}",
                self.dim
            )));
        }
        let total = new_dim.pow(self.n_modes as u32);
        let mut out = DMatrix::from_element(total, total, ZERO);
        let embed = |i: usize| -> usize {
            if self.n_modes == 1 {
                i
            } else {
                (i / self.dim) * new_dim + i % self.dim
            }
        };
        for i in 0..self.total_dim() {
            for j in 0..self.total_dim() {
                out[(embed(i), embed(j))] = self.entries[(i, j)];
            }
        }
        Self::from_parts(out, new_dim, self.n_modes, self.leakage)
    }

    /// Number of leading Fock levels that carry any nonzero entry.
    pub fn support_dim(&self) -> usize {
        let n = self.total_dim();
        let mut hi = 0;
        for i in 0..n {
            for j in 0..n {
                if self.entries[(i, j)] != ZERO {
                    let level = if self.n_modes == 1 { i.max(j) } else { (i / self.dim).max(i % self.dim).max(j / self.dim).max(j % self.dim) };
                    hi = hi.max(level + 1);
                }
            }
        }
        hi.max(1)
    }

    /// Photon-number distribution; for two modes indexed by total photon number.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let levels = if self.n_modes == 1 { self.dim } else { 2 * self.dim - 1 };
        let mut p = vec![0.0; levels];
        for i in 0..self.total_dim() {
            let level = if self.n_modes == 1 { i } else { i / self.dim + i % self.dim };
            p[level] += self.entries[(i, i)].re;
        }
        p
    }

    /// Mean photon number of `mode` (0 or 1).
    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        if mode >= self.n_modes {
            return Err(Error::DimensionMismatch(format!("no mode {mode}")));
        }
        let mut acc = 0.0;
        for i in 0..self.total_dim() {
            let level = match (self.n_modes, mode) {
                (1, _) => i,
                (_, 0) => i / self.dim,
                _ => i % self.dim,
            };
            acc += level as f64 * self.entries[(i, i)].re;
        }
        Ok(acc)
    }

    /// Enforces the headroom rule for an operation built from `ladder_ops`
    /// ladder operators: the levels (total photon number for two modes)
    /// above `cutoff - ladder_ops - 2` must be empty up to [`HEADROOM_TOL`].
    pub fn headroom_check(&self, ladder_ops: usize) -> Result<()> {
        let cutoff = self.cutoff();
        let needed = ladder_ops + 2;
        if cutoff < needed {
            return Err(Error::CutoffTooSmall(format!(
                "cutoff {cutoff} leaves no headroom for {ladder_ops} ladder operators"
            )));
        }
        let limit = cutoff - needed;
        let band: f64 = self
            .photon_distribution()
            .iter()
            .enumerate()
            .filter(|(level, _)| *level > limit)
            .map(|(_, p)| p.abs())
            .sum();
        if band > HEADROOM_TOL {
            return Err(Error::CutoffTooSmall(format!(
                "population {band:e} above level {limit} (cutoff {cutoff}, {ladder_ops} ladder operators)"
            )));
        }
        Ok(())
    }
}

/// Fock projector `|n><n|`.
pub fn make_fock(n: usize, cutoff: usize) -> Result<DensityMatrix> {
    if n > cutoff {
        return Err(Error::CutoffTooSmall(format!("Fock level {n} above cutoff {cutoff}")));
    }
    let dim = cutoff + 1;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    m[(n, n)] = ONE;
    DensityMatrix::from_parts(m, dim, 1, 0.0)
}

/// Exact coherent-state amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for `n < len`.
pub fn coherent_amplitudes(alpha: Complex64, len: usize) -> Vec<Complex64> {
    let lf = ln_factorials(len);
    let x = alpha.norm_sqr();
    if alpha == ZERO {
        let mut v = vec![ZERO; len];
        if len > 0 {
            v[0] = ONE;
        }
        return v;
    }
    let (r, phase) = alpha.to_polar();
    (0..len)
        .map(|n| {
            let mag = (-0.5 * x + n as f64 * r.ln() - 0.5 * lf[n]).exp();
            Complex64::from_polar(mag, phase * n as f64)
        })
        .collect()
}

/// Coherent state `|alpha>`, renormalized after truncation.
pub fn make_coherent(alpha: Complex64, cutoff: usize) -> Result<DensityMatrix> {
    let dim = cutoff + 1;
    let amps = coherent_amplitudes(alpha, dim);
    let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let leakage = (1.0 - kept).max(0.0);
    if leakage > LEAKAGE_TOL {
        return Err(Error::CutoffTooSmall(format!(
            "coherent amplitude |alpha| = {} leaks {leakage:e} beyond cutoff {cutoff}",
            alpha.norm()
        )));
    }
    let mut rho = DensityMatrix::from_pure(&amps, dim, 1)?;
    rho.leakage = leakage;
    Ok(rho)
}

/// Thermal state with mean photon number `nbar`, renormalized after truncation.
pub fn make_thermal(nbar: f64, cutoff: usize) -> Result<DensityMatrix> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidArgument(format!("mean photon number {nbar} must be >= 0")));
    }
    let dim = cutoff + 1;
    let ratio = nbar / (1.0 + nbar);
    let leakage = ratio.powi(dim as i32);
    if leakage > LEAKAGE_TOL {
        return Err(Error::CutoffTooSmall(format!(
            "thermal tail {leakage:e} beyond cutoff {cutoff} for nbar = {nbar}"
        )));
    }
    let weights: Vec<f64> = (0..dim).map(|n| (1.0 - ratio) * ratio.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for (n, w) in weights.iter().enumerate() {
        m[(n, n)] = Complex64::new(w / total, 0.0);
    }
    DensityMatrix::from_parts(m, dim, 1, leakage)
}

/// Convex combination of states.
pub fn mix(states: &[DensityMatrix], weights: &[f64]) -> Result<DensityMatrix> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} states with {} weights",
            states.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    let first = &states[0];
    if states.iter().any(|s| s.dim != first.dim || s.n_modes != first.n_modes) {
        return Err(Error::DimensionMismatch("mixture components differ in shape".into()));
    }
    let n = first.total_dim();
    let mut m = DMatrix::from_element(n, n, ZERO);
    let mut leakage = 0.0;
    for (s, w) in states.iter().zip(weights) {
        m += &s.entries * Complex64::new(*w, 0.0);
        leakage += w * s.leakage;
    }
    let rho = DensityMatrix::from_parts(m, first.dim, first.n_modes, leakage)?;
    rho.ensure_valid()?;
    Ok(rho)
}

/// Normally ordered moment `Tr(rho (a^dag)^m a^n)` of a single-mode state.
///
/// Requires `m + n <= cutoff - 2`.
pub fn normal_moment(rho: &DensityMatrix, m: usize, n: usize) -> Result<Complex64> {
    rho.require_single_mode("normal_moment")?;
    let cutoff = rho.cutoff();
    if cutoff < 2 || m + n > cutoff - 2 {
        return Err(Error::CutoffTooSmall(format!(
            "moment order {m}+{n} needs cutoff >= {}, have {cutoff}",
            m + n + 2
        )));
    }
    let lf = ln_factorials(rho.dim);
    let mut acc = ZERO;
    // Tr(a^n rho (a^dag)^m) = sum_p sqrt((p+n)!/p!) sqrt((p+m)!/p!) rho[p+n, p+m]
    for p in 0..rho.dim - m.max(n) {
        let w = (0.5 * (lf[p + n] - lf[p]) + 0.5 * (lf[p + m] - lf[p])).exp();
        acc += rho.entries[(p + n, p + m)] * w;
    }
    Ok(acc)
}

/// Matrix element `<m| D(beta) |n>` of the displacement operator
/// `D(beta) = exp(beta a^dag - beta^* a)`.
pub fn displacement_element(m: usize, n: usize, beta: Complex64) -> Complex64 {
    let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
    let d = hi - lo;
    if beta == ZERO {
        return if d == 0 { ONE } else { ZERO };
    }
    let x = beta.norm_sqr();
    let lf = ln_factorials(hi + 1);
    let lag = laguerre_column(lo + 1, d as f64, x)[lo];
    let base = if m >= n { beta } else { -beta.conj() };
    let (r, phase) = base.to_polar();
    let mag = (0.5 * (lf[lo] - lf[hi]) + d as f64 * r.ln() - 0.5 * x).exp();
    Complex64::from_polar(mag * lag, phase * d as f64)
}

/// Full `dim x dim` block of `D(beta)` in the truncated basis, built column
/// by column from Laguerre recurrences.
pub fn displacement_matrix(dim: usize, beta: Complex64) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    if beta == ZERO {
        for k in 0..dim {
            out[(k, k)] = ONE;
        }
        return out;
    }
    let x = beta.norm_sqr();
    let lf = ln_factorials(dim);
    let (r, phase_up) = beta.to_polar();
    let phase_down = (-beta.conj()).arg();
    let ln_r = r.ln();
    for d in 0..dim {
        let lag = laguerre_column(dim - d, d as f64, x);
        for (k, l) in lag.iter().enumerate() {
            let mag = (0.5 * (lf[k] - lf[k + d]) + d as f64 * ln_r - 0.5 * x).exp() * l;
            out[(k + d, k)] = Complex64::from_polar(mag, phase_up * d as f64);
            if d > 0 {
                out[(k, k + d)] = Complex64::from_polar(mag, phase_down * d as f64);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationFlag {
    Trace,
    Hermiticity,
    NotPositive,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub trace_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
    pub flags: Vec<ValidationFlag>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.flags.is_empty()
    }

    fn summary(&self) -> String {
        format!(
            "trace deviation {:e}, hermiticity deviation {:e}, min eigenvalue {:e}, flags {:?}",
            self.trace_deviation, self.hermiticity_deviation, self.min_eigenvalue, self.flags
        )
    }
}

/// Checks trace, Hermiticity and positivity against the module tolerances.
pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    let m = &rho.entries;
    let trace_deviation = (m.trace() - ONE).norm();
    let adjoint = m.adjoint();
    let hermiticity_deviation = m
        .iter()
        .zip(adjoint.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let hermitized = (m + &adjoint) * Complex64::new(0.5, 0.0);
    let min_eigenvalue = hermitized
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut flags = Vec::new();
    if !(trace_deviation <= TRACE_TOL) {
        flags.push(ValidationFlag::Trace);
    }
    if !(hermiticity_deviation <= HERMITIAN_TOL) {
        flags.push(ValidationFlag::Hermiticity);
    }
    if !(min_eigenvalue >= PSD_TOL) {
        flags.push(ValidationFlag::NotPositive);
    }
    ValidationReport { trace_deviation, hermiticity_deviation, min_eigenvalue, flags }
}

/// On-disk state representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub n_modes: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    pub leakage: f64,
}

impl From<&DensityMatrix> for StateFile {
    fn from(rho: &DensityMatrix) -> Self {
        let n = rho.total_dim();
        let row = |i: usize, f: fn(&Complex64) -> f64| (0..n).map(|j| f(&rho.entries[(i, j)])).collect();
        StateFile {
            dim: rho.dim,
            n_modes: rho.n_modes,
            re: (0..n).map(|i| row(i, |c| c.re)).collect(),
            im: (0..n).map(|i| row(i, |c| c.im)).collect(),
            leakage: rho.leakage,
        }
    }
}

impl TryFrom<StateFile> for DensityMatrix {
    type Error = Error;

    fn try_from(file: StateFile) -> Result<Self> {
        let n = file.re.len();
        if file.im.len() != n || file.re.iter().chain(file.im.iter()).any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch("state file matrices are not square and equal-sized".into()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(file.re[i][j], file.im[i][j]));
        let rho = DensityMatrix::from_parts(m, file.dim, file.n_modes, file.leakage)?;
        rho.ensure_valid()?;
        Ok(rho)
    }
}
