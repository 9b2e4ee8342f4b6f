//! Beam splitter and attenuator, both on Fock-space density matrices and on
//! characteristic functions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::classical::BeamSplitterParams;
use crate::error::{Error, Result};
use crate::filters::{vacuum_charfunc, two_mode_charfunc, CharacteristicFunction, FilterSpec, TRUST_RADIUS};
use crate::fock::DensityMatrix;
use crate::special::ln_factorials;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Ladder operators in a splitter's generator; the headroom rule applies
/// to this count.
const SPLITTER_LADDER_OPS: usize = 2;

/// One fixed-total-photon-number block of a two-mode unitary.
#[derive(Debug, Clone, PartialEq)]
struct Block {
    /// Tensor-basis indices, ordered by the mode-1 photon number.
    indices: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

/// Beam-splitter unitary on the truncated two-mode space, stored block-diagonally
/// by total photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitterUnitary {
    dim: usize,
    blocks: Vec<Block>,
}

impl BeamSplitterUnitary {
    /// Per-mode dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim * self.dim;
        let mut u = DMatrix::from_element(n, n, ZERO);
        for b in &self.blocks {
            for (a, &i) in b.indices.iter().enumerate() {
                for (c, &j) in b.indices.iter().enumerate() {
                    u[(i, j)] = b.matrix[(a, c)];
                }
            }
        }
        u
    }

    /// `U rho U^dag`, block pair by block pair.
    fn conjugate(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = rho.nrows();
        let mut out = DMatrix::from_element(n, n, ZERO);
        for bk in &self.blocks {
            for bl in &self.blocks {
                let sub = DMatrix::from_fn(bk.indices.len(), bl.indices.len(), |a, c| {
                    rho[(bk.indices[a], bl.indices[c])]
                });
                if sub.iter().all(|z| *z == ZERO) {
                    continue;
                }
                let res = &bk.matrix * sub * bl.matrix.adjoint();
                for (a, &i) in bk.indices.iter().enumerate() {
                    for (c, &j) in bl.indices.iter().enumerate() {
                        out[(i, j)] = res[(a, c)];
                    }
                }
            }
        }
        out
    }
}

/// Unitary realizing `a3 = t a1 + r a2`, `a4 = -r^* a1 + t^* a2` (times
/// `e^{i phi_u}`) on `dim`-level modes.
///
/// With `t = |t| e^{i chi}`, the splitter is the phase shifter
/// `exp(i (chi + phi_u) n1 + i (phi_u - chi) n2)` after
/// `exp(theta (e^{i phi} a1^dag a2 - e^{-i phi} a1 a2^dag))`, where
/// `|t| = cos(theta)` and `r e^{-i chi} = e^{i phi} sin(theta)`.
pub fn beamsplitter_unitary(dim: usize, bs: &BeamSplitterParams) -> Result<BeamSplitterUnitary> {
    bs.check()?;
    if dim < 2 {
        return Err(Error::CutoffTooSmall(format!("beam splitter needs dim >= 2, got {dim}")));
    }
    let chi = bs.t.arg();
    let theta = bs.r.norm().atan2(bs.t.norm());
    let phi = if bs.r.norm() > 0.0 { bs.r.arg() - chi } else { 0.0 };
    let up = Complex64::from_polar(theta, phi);
    let down = Complex64::from_polar(theta, -phi);
    let cutoff = dim - 1;
    let mut blocks = Vec::with_capacity(2 * cutoff + 1);
    for total in 0..=2 * cutoff {
        let lo = total.saturating_sub(cutoff);
        let hi = total.min(cutoff);
        let size = hi - lo + 1;
        let indices: Vec<usize> = (lo..=hi).map(|m| m * dim + (total - m)).collect();
        let mut gen = DMatrix::from_element(size, size, ZERO);
        for a in 0..size {
            let m = lo + a;
            let n = total - m;
            // a1^dag a2 |m, n> = sqrt((m+1) n) |m+1, n-1>
            if a + 1 < size {
                gen[(a + 1, a)] += up * (((m + 1) * n) as f64).sqrt();
            }
            // a1 a2^dag |m, n> = sqrt(m (n+1)) |m-1, n+1>
            if a > 0 {
                gen[(a - 1, a)] -= down * ((m * (n + 1)) as f64).sqrt();
            }
        }
        let mut matrix = gen.exp();
        for a in 0..size {
            let m = (lo + a) as f64;
            let n = (total - lo - a) as f64;
            let phase = Complex64::from_polar(1.0, (chi + bs.phi_u) * m + (bs.phi_u - chi) * n);
            for c in 0..size {
                matrix[(a, c)] *= phase;
            }
        }
        blocks.push(Block { indices, matrix });
    }
    Ok(BeamSplitterUnitary { dim, blocks })
}

/// `U rho12 U^dag` for the splitter `bs`.
pub fn apply_beamsplitter(rho12: &DensityMatrix, bs: &BeamSplitterParams) -> Result<DensityMatrix> {
    if rho12.n_modes() != 2 {
        return Err(Error::DimensionMismatch("beam splitter needs a two-mode state".into()));
    }
    let u = beamsplitter_unitary(rho12.dim(), bs)?;
    rho12.headroom_check(SPLITTER_LADDER_OPS)?;
    let out = u.conjugate(rho12.entries());
    let rho = DensityMatrix::from_parts(out, rho12.dim(), 2, rho12.leakage())?;
    rho.ensure_valid()?;
    Ok(rho)
}

/// Reduced state of mode `keep` (0 or 1).
pub fn partial_trace(rho12: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    if rho12.n_modes() != 2 {
        return Err(Error::DimensionMismatch("partial trace needs a two-mode state".into()));
    }
    if keep > 1 {
        return Err(Error::DimensionMismatch(format!("no mode {keep}")));
    }
    let dim = rho12.dim();
    let e = rho12.entries();
    let idx = |kept: usize, traced: usize| if keep == 0 { kept * dim + traced } else { traced * dim + kept };
    let out = DMatrix::from_fn(dim, dim, |i, j| (0..dim).map(|k| e[(idx(i, k), idx(j, k))]).sum());
    let rho = DensityMatrix::from_parts(out, dim, 1, rho12.leakage())?;
    rho.ensure_valid()?;
    Ok(rho)
}

fn check_efficiency(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidEfficiency(eta));
    }
    Ok(())
}

/// Pure loss to efficiency `eta`, applied through its Kraus operators
/// `E_k = sum_n sqrt(C(n, k) eta^{n-k} (1-eta)^k) |n-k><n|`.
pub fn attenuate(rho: &DensityMatrix, eta: f64) -> Result<DensityMatrix> {
    check_efficiency(eta)?;
    if rho.n_modes() != 1 {
        return Err(Error::DimensionMismatch("attenuate needs a single-mode state".into()));
    }
    rho.headroom_check(SPLITTER_LADDER_OPS)?;
    let dim = rho.dim();
    let lf = ln_factorials(dim);
    let ln_binom = |n: usize, k: usize| lf[n] - lf[k] - lf[n - k];
    let st = eta.sqrt();
    let loss = 1.0 - eta;
    let e = rho.entries();
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for m in 0..dim {
        for n in 0..dim {
            let v = e[(m, n)];
            if v == ZERO {
                continue;
            }
            for k in 0..=m.min(n) {
                let w = (0.5 * (ln_binom(m, k) + ln_binom(n, k))).exp()
                    * st.powi((m - k) as i32)
                    * st.powi((n - k) as i32)
                    * loss.powi(k as i32);
                out[(m - k, n - k)] += v * w;
            }
        }
    }
    let out = DensityMatrix::from_parts(out, dim, 1, rho.leakage())?;
    out.ensure_valid()?;
    Ok(out)
}

/// Attenuation by its dilation: mix with vacuum on a splitter with
/// `t = sqrt(eta)`, `r = sqrt(1 - eta)` and discard the second output.
pub fn attenuate_via_beamsplitter(rho: &DensityMatrix, eta: f64) -> Result<DensityMatrix> {
    check_efficiency(eta)?;
    let joint = rho.tensor(&DensityMatrix::vacuum(rho.cutoff()))?;
    let out = apply_beamsplitter(&joint, &BeamSplitterParams::attenuator(eta)?)?;
    partial_trace(&out, 0)
}

/// Two-mode characteristic function sampled at arbitrary `(beta3, beta4)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeCharFuncGrid {
    pub points: Vec<(Complex64, Complex64)>,
    pub values: Vec<Complex64>,
    pub filter: FilterSpec,
}

impl TwoModeCharFuncGrid {
    pub fn sample(rho12: &DensityMatrix, filter: &FilterSpec, points: &[(Complex64, Complex64)]) -> Result<Self> {
        let values = points
            .iter()
            .map(|&(b3, b4)| two_mode_charfunc(rho12, filter, b3, b4))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points: points.to_vec(), values, filter: filter.clone() })
    }

    pub fn max_abs_diff(&self, other: &TwoModeCharFuncGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn trust(beta: Complex64) -> Result<()> {
    let radius = beta.norm();
    if !(radius <= TRUST_RADIUS) {
        return Err(Error::TrustRadiusExceeded { radius, limit: TRUST_RADIUS });
    }
    Ok(())
}

/// Classical splitter rule on characteristic functions,
/// `Phi_34(beta3, beta4) = Phi_12(t^* beta3 - r beta4, r^* beta3 + t beta4)`,
/// evaluated from the input state at the pulled-back arguments.
pub fn pullback_charfunc(
    rho12: &DensityMatrix,
    filter: &FilterSpec,
    points: &[(Complex64, Complex64)],
    bs: &BeamSplitterParams,
) -> Result<TwoModeCharFuncGrid> {
    bs.check()?;
    let values = points
        .iter()
        .map(|&(b3, b4)| {
            let (b1, b2) = bs.apply_adjoint(b3, b4);
            trust(b1)?;
            trust(b2)?;
            two_mode_charfunc(rho12, filter, b1, b2)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TwoModeCharFuncGrid { points: points.to_vec(), values, filter: filter.clone() })
}

/// Output characteristic function of an attenuator with transmittance `t`
/// and vacuum ancilla: `Phi_1(t^* beta3) Phi_vac(r beta3)`, `r = sqrt(1 - |t|^2)`.
pub fn attenuate_charfunc(
    state_cf: &dyn CharacteristicFunction,
    f: &FilterSpec,
    t: Complex64,
    beta3: Complex64,
) -> Result<Complex64> {
    if t.norm() > 1.0 + crate::classical::UNITARITY_TOL {
        return Err(Error::GainNotAllowed(t.norm()));
    }
    let r = (1.0 - t.norm_sqr()).max(0.0).sqrt();
    let arg = t.conj() * beta3;
    trust(arg)?;
    trust(beta3 * r)?;
    Ok(state_cf.eval(arg)? * vacuum_charfunc(f, beta3 * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_beamsplit;
    use crate::filters::{filtered_charfunc, FilteredState};
    use crate::fock::{coherent_amplitudes, make_coherent, make_fock, make_thermal, mix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_entry_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        a.entries().iter().zip(b.entries().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_splitter_is_identity() {
        let u = beamsplitter_unitary(5, &BeamSplitterParams::identity()).unwrap().to_dense();
        assert!((u - DMatrix::<Complex64>::identity(25, 25)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn unitary_by_construction() {
        let bs = BeamSplitterParams::from_angles(0.7, 1.3).with_global_phase(0.4);
        let u = beamsplitter_unitary(6, &bs).unwrap().to_dense();
        let prod = u.adjoint() * &u;
        assert!((prod - DMatrix::<Complex64>::identity(36, 36)).iter().all(|z| z.norm() < 1e-12));
        assert!(matches!(beamsplitter_unitary(1, &bs), Err(Error::CutoffTooSmall(_))));
        let broken = BeamSplitterParams { t: c(0.9, 0.0), r: c(0.9, 0.0), phi_u: 0.0 };
        assert!(matches!(beamsplitter_unitary(4, &broken), Err(Error::NonUnitaryBeamSplitter(_))));
    }

    #[test]
    fn coherent_inputs_stay_coherent() {
        let cutoff = 25;
        let (a1, a2) = (c(0.8, -0.3), c(-0.4, 0.6));
        for bs in [
            BeamSplitterParams::balanced(),
            BeamSplitterParams::from_angles(0.3, 2.0),
            BeamSplitterParams::new(c(0.6, 0.48), c(0.0, 0.64)).unwrap(),
        ] {
            let joint = make_coherent(a1, cutoff).unwrap().tensor(&make_coherent(a2, cutoff).unwrap()).unwrap();
            let out = apply_beamsplitter(&joint, &bs).unwrap();
            let (a3, a4) = classical_beamsplit(a1, a2, &bs).unwrap();
            let v3 = coherent_amplitudes(a3, cutoff + 1);
            let v4 = coherent_amplitudes(a4, cutoff + 1);
            let target: Vec<Complex64> = v3.iter().flat_map(|x| v4.iter().map(move |y| x * y)).collect();
            let e = out.entries();
            let mut fidelity = c(0.0, 0.0);
            for i in 0..target.len() {
                for j in 0..target.len() {
                    fidelity += target[i].conj() * e[(i, j)] * target[j];
                }
            }
            assert!(fidelity.re >= 1.0 - 1e-8, "fidelity {fidelity} for {bs:?}");
        }
    }

    #[test]
    fn photon_number_is_conserved() {
        let joint = make_thermal(0.4, 24).unwrap().tensor(&make_fock(2, 24).unwrap()).unwrap();
        let out = apply_beamsplitter(&joint, &BeamSplitterParams::from_angles(0.9, 0.2)).unwrap();
        let before = joint.mean_photons(0).unwrap() + joint.mean_photons(1).unwrap();
        let after = out.mean_photons(0).unwrap() + out.mean_photons(1).unwrap();
        assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn splitter_requires_headroom() {
        let joint = make_fock(3, 4).unwrap().tensor(&make_fock(0, 4).unwrap()).unwrap();
        assert!(matches!(apply_beamsplitter(&joint, &BeamSplitterParams::balanced()), Err(Error::CutoffTooSmall(_))));
    }

    #[test]
    fn attenuate_examples() {
        let out = attenuate(&make_fock(1, 6).unwrap(), 0.5).unwrap();
        assert!((out.entries()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((out.entries()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(out.entries().iter().enumerate().all(|(k, z)| k == 0 || k == 8 || z.norm() == 0.0));
        let rho = mix(&[make_coherent(c(0.5, 0.1), 12).unwrap(), make_fock(2, 12).unwrap()], &[0.4, 0.6]).unwrap();
        let rho = DensityMatrix::from_matrix(rho.entries().clone(), rho.dim(), 1).unwrap();
        assert!(max_entry_diff(&attenuate(&rho, 1.0).unwrap(), &rho) < 1e-15);
        let gone = attenuate(&rho, 0.0).unwrap();
        assert!(max_entry_diff(&gone, &DensityMatrix::vacuum(12)) < 1e-15);
        assert!(matches!(attenuate(&rho, 1.5), Err(Error::InvalidEfficiency(_))));
    }

    #[test]
    fn partial_trace_examples() {
        let r1 = make_coherent(c(0.3, 0.2), 12).unwrap();
        let r2 = make_thermal(0.2, 12).unwrap();
        let joint = r1.tensor(&r2).unwrap();
        assert!(max_entry_diff(&partial_trace(&joint, 0).unwrap(), &r1) < 1e-12);
        assert!(max_entry_diff(&partial_trace(&joint, 1).unwrap(), &r2) < 1e-12);
        let dim = 3;
        let mut amps = vec![c(0.0, 0.0); dim * dim];
        amps[1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0); // |0,1>
        amps[dim] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0); // |1,0>
        let bell = DensityMatrix::from_pure(&amps, dim, 2).unwrap();
        let red = partial_trace(&bell, 0).unwrap();
        assert!((red.entries()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((red.entries()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(red.entries()[(0, 1)].norm() < 1e-15);
        assert!((red.trace() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(partial_trace(&r1, 0), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn pullback_examples() {
        let joint = make_coherent(c(0.3, -0.1), 10).unwrap().tensor(&make_fock(1, 10).unwrap()).unwrap();
        let pts = vec![(c(0.4, 0.2), c(-0.3, 0.5)), (c(1.0, 0.0), c(0.0, 0.0))];
        let f = FilterSpec::WIGNER;
        let same = pullback_charfunc(&joint, &f, &pts, &BeamSplitterParams::identity()).unwrap();
        let direct = TwoModeCharFuncGrid::sample(&joint, &f, &pts).unwrap();
        assert!(same.max_abs_diff(&direct) < 1e-15);
        let bs = BeamSplitterParams::from_angles(0.5, 0.8);
        let b3 = c(0.7, -0.2);
        let got = pullback_charfunc(&joint, &f, &[(b3, c(0.0, 0.0))], &bs).unwrap().values[0];
        let want = two_mode_charfunc(&joint, &f, bs.t.conj() * b3, bs.r.conj() * b3).unwrap();
        assert!((got - want).norm() < 1e-15);
        let far = pullback_charfunc(&joint, &f, &[(c(40.0, 0.0), c(0.0, 0.0))], &bs);
        assert!(matches!(far, Err(Error::TrustRadiusExceeded { .. })));
    }

    #[test]
    fn pullback_matches_fock_route_for_s_filters() {
        let joint = make_fock(1, 9).unwrap().tensor(&make_fock(2, 9).unwrap()).unwrap();
        let bs = BeamSplitterParams::from_angles(0.6, -0.9);
        let out = apply_beamsplitter(&joint, &bs).unwrap();
        let pts: Vec<_> = [(c(0.4, 0.1), c(-0.2, 0.7)), (c(1.2, -0.5), c(0.3, 0.3)), (c(0.0, 0.9), c(1.0, 0.0))].to_vec();
        for s in [-1.0, 0.0, 0.7] {
            let f = FilterSpec::SParam(s);
            let pulled = pullback_charfunc(&joint, &f, &pts, &bs).unwrap();
            let fock = TwoModeCharFuncGrid::sample(&out, &f, &pts).unwrap();
            assert!(pulled.max_abs_diff(&fock) < 1e-10, "s = {s}");
        }
        // a filter outside the s family breaks the classical rule
        let f = FilterSpec::single(2, 0, c(0.2, 0.0)).unwrap();
        let pulled = pullback_charfunc(&joint, &f, &pts, &bs).unwrap();
        let fock = TwoModeCharFuncGrid::sample(&out, &f, &pts).unwrap();
        assert!(pulled.max_abs_diff(&fock) > 1e-4);
    }

    #[test]
    fn attenuate_charfunc_examples() {
        let rho = make_thermal(0.6, 40).unwrap();
        let t = c(0.8, 0.0);
        let beta = c(0.9, -1.4);
        let state = FilteredState { rho: &rho, filter: &FilterSpec::P };
        let got = attenuate_charfunc(&state, &FilterSpec::P, t, beta).unwrap();
        assert_eq!(got, state.eval(t.conj() * beta).unwrap());
        let vac = DensityMatrix::vacuum(4);
        let w = FilteredState { rho: &vac, filter: &FilterSpec::WIGNER };
        let got = attenuate_charfunc(&w, &FilterSpec::WIGNER, t, beta).unwrap();
        assert!((got - c((-beta.norm_sqr() / 2.0).exp(), 0.0)).norm() < 1e-15);
        let f = FilterSpec::single(3, 1, c(0.1, 0.2)).unwrap();
        let any = FilteredState { rho: &rho, filter: &f };
        assert!((attenuate_charfunc(&any, &f, t, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(attenuate_charfunc(&any, &f, c(1.2, 0.0), beta), Err(Error::GainNotAllowed(_))));
    }

    #[test]
    fn attenuate_charfunc_matches_fock_channel() {
        let rho = mix(&[make_fock(2, 12).unwrap(), make_fock(0, 12).unwrap()], &[0.7, 0.3]).unwrap();
        let eta: f64 = 0.35;
        let out = attenuate(&rho, eta).unwrap();
        for s in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let f = FilterSpec::SParam(s);
            let state = FilteredState { rho: &rho, filter: &f };
            for beta in [c(0.3, 0.4), c(-1.1, 0.2), c(2.0, -1.0)] {
                let via_formula = attenuate_charfunc(&state, &f, c(eta.sqrt(), 0.0), beta).unwrap();
                let via_fock = filtered_charfunc(&out, &f, beta).unwrap();
                assert!((via_formula - via_fock).norm() < 1e-12 * via_fock.norm().max(1.0));
            }
        }
    }

    #[test]
    fn attenuation_routes_agree_on_small_case() {
        let rho = mix(&[make_fock(1, 8).unwrap(), make_fock(3, 8).unwrap()], &[0.5, 0.5]).unwrap();
        for eta in [0.1, 0.5, 0.9] {
            let a = attenuate(&rho, eta).unwrap();
            let b = attenuate_via_beamsplitter(&rho, eta).unwrap();
            assert!(max_entry_diff(&a, &b) < 1e-12);
        }
    }
}
