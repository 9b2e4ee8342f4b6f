//! Classical monochromatic fields: complex amplitudes, weighted ensembles
//! standing in for a classical phase-space density, and the beam-splitter and
//! attenuator maps they obey.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UNITARITY_TOL: f64 = 1e-12;
pub const WEIGHT_TOL: f64 = 1e-12;

/// Transmittance and reflectance of a lossless splitter,
/// `U = [[t, r], [-r^*, t^*]] e^{i phi_u}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterParams {
    pub t: Complex64,
    pub r: Complex64,
    #[serde(default)]
    pub phi_u: f64,
}

impl BeamSplitterParams {
    pub fn new(t: Complex64, r: Complex64) -> Result<Self> {
        let bs = Self { t, r, phi_u: 0.0 };
        bs.check()?;
        Ok(bs)
    }

    /// `t = cos(theta)`, `r = e^{i phi} sin(theta)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            t: Complex64::new(theta.cos(), 0.0),
            r: Complex64::from_polar(theta.sin(), phi),
            phi_u: 0.0,
        }
    }

    /// `t = r = 1/sqrt(2)`.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { t: Complex64::new(h, 0.0), r: Complex64::new(h, 0.0), phi_u: 0.0 }
    }

    pub fn identity() -> Self {
        Self { t: Complex64::new(1.0, 0.0), r: Complex64::new(0.0, 0.0), phi_u: 0.0 }
    }

    /// Attenuator splitter for efficiency `eta`: `t = sqrt(eta)`, `r = sqrt(1 - eta)`.
    pub fn attenuator(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidEfficiency(eta));
        }
        Ok(Self {
            t: Complex64::new(eta.sqrt(), 0.0),
            r: Complex64::new((1.0 - eta).sqrt(), 0.0),
            phi_u: 0.0,
        })
    }

    pub fn with_global_phase(mut self, phi_u: f64) -> Self {
        self.phi_u = phi_u;
        self
    }

    pub fn check(&self) -> Result<()> {
        let norm = self.t.norm_sqr() + self.r.norm_sqr();
        if !((norm - 1.0).abs() <= UNITARITY_TOL) || !self.phi_u.is_finite() {
            return Err(Error::NonUnitaryBeamSplitter(norm));
        }
        Ok(())
    }

    /// The 2x2 amplitude matrix including the global phase.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let g = Complex64::from_polar(1.0, self.phi_u);
        [[self.t * g, self.r * g], [-self.r.conj() * g, self.t.conj() * g]]
    }

    /// `U (a, b)`.
    pub fn apply(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        let u = self.matrix();
        (u[0][0] * a + u[0][1] * b, u[1][0] * a + u[1][1] * b)
    }

    /// `U^dag (a, b)`; for `phi_u = 0` this is `(t^* a - r b, r^* a + t b)`.
    pub fn apply_adjoint(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        let u = self.matrix();
        (
            u[0][0].conj() * a + u[1][0].conj() * b,
            u[0][1].conj() * a + u[1][1].conj() * b,
        )
    }
}

/// `E(tau) = alpha e^{i omega tau} + alpha^* e^{-i omega tau}`.
pub fn field_at_time(alpha: Complex64, omega: f64, tau: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, omega * tau);
    2.0 * (alpha * rot).re
}

/// Output amplitudes `(alpha3, alpha4) = U (alpha1, alpha2)`.
pub fn classical_beamsplit(
    alpha1: Complex64,
    alpha2: Complex64,
    bs: &BeamSplitterParams,
) -> Result<(Complex64, Complex64)> {
    bs.check()?;
    Ok(bs.apply(alpha1, alpha2))
}

/// Given `alpha1` and `alpha3`, returns `(alpha2, alpha4)` consistent with
/// [`classical_beamsplit`].
pub fn solve_missing_amplitudes(
    alpha1: Complex64,
    alpha3: Complex64,
    bs: &BeamSplitterParams,
) -> Result<(Complex64, Complex64)> {
    bs.check()?;
    if bs.r.norm() < UNITARITY_TOL {
        return Err(Error::DegenerateSplitter("reflectance r = 0 leaves alpha2 undetermined".into()));
    }
    let g = Complex64::from_polar(1.0, bs.phi_u);
    let alpha2 = (-bs.t * alpha1 + g.conj() * alpha3) / bs.r;
    let alpha4 = (-g * alpha1 + bs.t.conj() * alpha3) / bs.r;
    Ok((alpha2, alpha4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    #[serde(rename = "re")]
    pub re: f64,
    #[serde(rename = "im")]
    pub im: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

impl Sample {
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeSample {
    pub re1: f64,
    pub im1: f64,
    pub re2: f64,
    pub im2: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

impl TwoModeSample {
    pub fn new(alpha1: Complex64, alpha2: Complex64, weight: f64) -> Self {
        Self { re1: alpha1.re, im1: alpha1.im, re2: alpha2.re, im2: alpha2.im, weight }
    }

    pub fn alphas(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.re1, self.im1), Complex64::new(self.re2, self.im2))
    }
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for w in weights {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidWeights(format!("weight {w} is not a finite nonnegative number")));
        }
        sum += w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidWeights("ensemble has no samples".into()));
    }
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    Ok(())
}

/// A classical single-mode ensemble: a finite mixture of point amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnsemble<Sample>", into = "RawEnsemble<Sample>")]
pub struct ClassicalEnsemble {
    samples: Vec<Sample>,
}

/// A classical two-mode ensemble `P_12(alpha1, alpha2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnsemble<TwoModeSample>", into = "RawEnsemble<TwoModeSample>")]
pub struct TwoModeEnsemble {
    samples: Vec<TwoModeSample>,
}

#[derive(Serialize, Deserialize)]
struct RawEnsemble<S> {
    samples: Vec<S>,
}

impl TryFrom<RawEnsemble<Sample>> for ClassicalEnsemble {
    type Error = Error;
    fn try_from(raw: RawEnsemble<Sample>) -> Result<Self> {
        Self::new(raw.samples)
    }
}

impl From<ClassicalEnsemble> for RawEnsemble<Sample> {
    fn from(e: ClassicalEnsemble) -> Self {
        RawEnsemble { samples: e.samples }
    }
}

impl TryFrom<RawEnsemble<TwoModeSample>> for TwoModeEnsemble {
    type Error = Error;
    fn try_from(raw: RawEnsemble<TwoModeSample>) -> Result<Self> {
        Self::new(raw.samples)
    }
}

impl From<TwoModeEnsemble> for RawEnsemble<TwoModeSample> {
    fn from(e: TwoModeEnsemble) -> Self {
        RawEnsemble { samples: e.samples }
    }
}

impl ClassicalEnsemble {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        check_weights(samples.iter().map(|s| s.weight))?;
        Ok(Self { samples })
    }

    pub fn from_points(points: &[(Complex64, f64)]) -> Result<Self> {
        Self::new(points.iter().map(|(a, w)| Sample { re: a.re, im: a.im, weight: *w }).collect())
    }

    /// Point mass at `alpha`.
    pub fn point(alpha: Complex64) -> Self {
        Self { samples: vec![Sample { re: alpha.re, im: alpha.im, weight: 1.0 }] }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Joint ensemble of two independent modes.
    pub fn product(&self, other: &ClassicalEnsemble) -> TwoModeEnsemble {
        let samples = self
            .samples
            .iter()
            .flat_map(|a| {
                other
                    .samples
                    .iter()
                    .map(move |b| TwoModeSample::new(a.alpha(), b.alpha(), a.weight * b.weight))
            })
            .collect();
        TwoModeEnsemble { samples }
    }
}

impl TwoModeEnsemble {
    pub fn new(samples: Vec<TwoModeSample>) -> Result<Self> {
        check_weights(samples.iter().map(|s| s.weight))?;
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[TwoModeSample] {
        &self.samples
    }

    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    /// Marginal ensemble of `mode` (0 or 1).
    pub fn marginal(&self, mode: usize) -> Result<ClassicalEnsemble> {
        if mode > 1 {
            return Err(Error::DimensionMismatch(format!("no mode {mode}")));
        }
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let (a, b) = s.alphas();
                let x = if mode == 0 { a } else { b };
                Sample { re: x.re, im: x.im, weight: s.weight }
            })
            .collect();
        Ok(ClassicalEnsemble { samples })
    }
}

/// Pushes every sample of `P_12` through the splitter; weights are unchanged.
pub fn ensemble_beamsplit(ens12: &TwoModeEnsemble, bs: &BeamSplitterParams) -> Result<TwoModeEnsemble> {
    bs.check()?;
    let samples = ens12
        .samples
        .iter()
        .map(|s| {
            let (a1, a2) = s.alphas();
            let (a3, a4) = bs.apply(a1, a2);
            TwoModeSample::new(a3, a4, s.weight)
        })
        .collect();
    Ok(TwoModeEnsemble { samples })
}

/// Classical attenuation `alpha -> t alpha`.
pub fn classical_attenuate(ens: &ClassicalEnsemble, t: Complex64) -> Result<ClassicalEnsemble> {
    if t.norm() == 0.0 {
        return Err(Error::DegenerateSplitter("transmittance t = 0".into()));
    }
    if t.norm() > 1.0 + UNITARITY_TOL {
        return Err(Error::GainNotAllowed(t.norm()));
    }
    let samples = ens
        .samples
        .iter()
        .map(|s| {
            let a = s.alpha() * t;
            Sample { re: a.re, im: a.im, weight: s.weight }
        })
        .collect();
    Ok(ClassicalEnsemble { samples })
}

/// `G_cl^{(m,n)} = sum_i w_i (alpha_i^*)^m alpha_i^n`.
pub fn classical_moments(ens: &ClassicalEnsemble, m: u32, n: u32) -> Complex64 {
    ens.samples
        .iter()
        .map(|s| {
            let a = s.alpha();
            a.conj().powu(m) * a.powu(n) * s.weight
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn field_examples() {
        assert!((field_at_time(c(1.0, 0.0), 3.0, 0.0) - 2.0).abs() < 1e-15);
        assert!(field_at_time(c(0.0, 1.0), 1.0, 0.0).abs() < 1e-15);
        assert_eq!(field_at_time(c(0.0, 0.0), 2.0, 5.0), 0.0);
    }

    #[test]
    fn beamsplit_examples() {
        let bs = BeamSplitterParams::balanced();
        let (a3, a4) = classical_beamsplit(c(1.0, 0.0), c(0.0, 0.0), &bs).unwrap();
        assert!(close(a3, c(H, 0.0), 1e-15) && close(a4, c(-H, 0.0), 1e-15));
        let alpha = c(0.3, -1.2);
        let (a3, a4) = classical_beamsplit(alpha, c(0.0, 0.0), &BeamSplitterParams::identity()).unwrap();
        assert_eq!((a3, a4), (alpha, c(0.0, 0.0)));
        let (a3, a4) = classical_beamsplit(c(1.0, 0.0), c(1.0, 0.0), &bs).unwrap();
        assert!(close(a3, c(2f64.sqrt(), 0.0), 1e-15) && close(a4, c(0.0, 0.0), 1e-15));
        let broken = BeamSplitterParams { t: c(1.0, 0.0), r: c(0.5, 0.0), phi_u: 0.0 };
        assert!(matches!(classical_beamsplit(c(1.0, 0.0), c(0.0, 0.0), &broken), Err(Error::NonUnitaryBeamSplitter(_))));
    }

    #[test]
    fn missing_amplitude_examples() {
        let bs = BeamSplitterParams::balanced();
        let (a2, a4) = solve_missing_amplitudes(c(1.0, 0.0), c(H, 0.0), &bs).unwrap();
        assert!(close(a2, c(0.0, 0.0), 1e-15) && close(a4, c(-H, 0.0), 1e-15));
        let (a2, a4) = solve_missing_amplitudes(c(0.0, 0.0), c(0.0, 0.0), &BeamSplitterParams::from_angles(0.4, 1.0)).unwrap();
        assert_eq!((a2, a4), (c(0.0, 0.0), c(0.0, 0.0)));
        // alpha2 = 0, so alpha3 = t and alpha4 = -r^*
        let g = BeamSplitterParams::from_angles(0.7, -2.1);
        let (a2, a4) = solve_missing_amplitudes(c(1.0, 0.0), g.t, &g).unwrap();
        assert!(close(a2, c(0.0, 0.0), 1e-15) && close(a4, -g.r.conj(), 1e-15));
        assert!(matches!(
            solve_missing_amplitudes(c(1.0, 0.0), c(1.0, 0.0), &BeamSplitterParams::identity()),
            Err(Error::DegenerateSplitter(_))
        ));
    }

    #[test]
    fn ensemble_examples() {
        let bs = BeamSplitterParams::balanced();
        let one = ClassicalEnsemble::point(c(1.0, 0.0)).product(&ClassicalEnsemble::point(c(0.0, 0.0)));
        let out = ensemble_beamsplit(&one, &bs).unwrap();
        let (a3, a4) = out.samples()[0].alphas();
        assert!(close(a3, c(H, 0.0), 1e-15) && close(a4, c(-H, 0.0), 1e-15));
        assert_eq!(out.samples()[0].weight, 1.0);

        let two = TwoModeEnsemble::new(vec![
            TwoModeSample::new(c(1.0, 0.0), c(0.0, 1.0), 0.5),
            TwoModeSample::new(c(-0.5, 0.2), c(0.3, 0.0), 0.5),
        ])
        .unwrap();
        let out = ensemble_beamsplit(&two, &bs).unwrap();
        assert_eq!(out.samples().len(), 2);
        assert!(out.samples().iter().all(|s| s.weight == 0.5));
        assert_eq!(ensemble_beamsplit(&two, &BeamSplitterParams::identity()).unwrap(), two);
    }

    #[test]
    fn attenuation_examples() {
        let out = classical_attenuate(&ClassicalEnsemble::point(c(2.0, 0.0)), c(H, 0.0)).unwrap();
        assert!(close(out.samples()[0].alpha(), c(2f64.sqrt(), 0.0), 1e-15));
        let ens = ClassicalEnsemble::from_points(&[(c(1.0, 1.0), 0.25), (c(-0.5, 2.0), 0.75)]).unwrap();
        assert_eq!(classical_attenuate(&ens, c(1.0, 0.0)).unwrap(), ens);
        let half = classical_attenuate(&ens, c(0.5, 0.5)).unwrap();
        let before = classical_moments(&ens, 1, 1).re;
        assert!((classical_moments(&half, 1, 1).re - before / 2.0).abs() < 1e-14);
        assert!(matches!(classical_attenuate(&ens, c(0.0, 0.0)), Err(Error::DegenerateSplitter(_))));
        assert!(matches!(classical_attenuate(&ens, c(1.1, 0.0)), Err(Error::GainNotAllowed(_))));
    }

    #[test]
    fn moment_examples() {
        let alpha = c(0.6, -1.4);
        let point = ClassicalEnsemble::point(alpha);
        assert!((classical_moments(&point, 1, 1).re - alpha.norm_sqr()).abs() < 1e-15);
        assert_eq!(classical_moments(&point, 0, 0), c(1.0, 0.0));
    }

    #[test]
    fn ensemble_file_format() {
        let json = r#"{"samples": [{"re": 1.0, "im": -0.5, "w": 0.25}, {"re": 0.0, "im": 2.0, "w": 0.75}]}"#;
        let ens: ClassicalEnsemble = serde_json::from_str(json).unwrap();
        assert_eq!(ens.samples()[1].alpha(), c(0.0, 2.0));
        let back: serde_json::Value = serde_json::to_value(&ens).unwrap();
        assert_eq!(back["samples"][0]["w"], 0.25);
        let bad = r#"{"samples": [{"re": 1.0, "im": 0.0, "w": 0.5}]}"#;
        assert!(serde_json::from_str::<ClassicalEnsemble>(bad).is_err());
    }

    fn amplitude() -> impl Strategy<Value = Complex64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| Complex64::new(a, b))
    }

    fn splitter() -> impl Strategy<Value = BeamSplitterParams> {
        (0.0..std::f64::consts::FRAC_PI_2, 0.0..std::f64::consts::TAU, -3.0..3.0f64)
            .prop_map(|(th, ph, g)| BeamSplitterParams::from_angles(th, ph).with_global_phase(g))
    }

    fn ensemble() -> impl Strategy<Value = ClassicalEnsemble> {
        prop::collection::vec((amplitude(), 0.01..1.0f64), 1..8).prop_map(|pts| {
            let total: f64 = pts.iter().map(|p| p.1).sum();
            let mut samples: Vec<Sample> =
                pts.iter().map(|(a, w)| Sample { re: a.re, im: a.im, weight: w / total }).collect();
            let s: f64 = samples.iter().map(|s| s.weight).sum();
            samples[0].weight += 1.0 - s;
            ClassicalEnsemble::new(samples).unwrap()
        })
    }

    proptest! {
        #[test]
        fn splitter_conserves_energy(a1 in amplitude(), a2 in amplitude(), bs in splitter()) {
            let (a3, a4) = classical_beamsplit(a1, a2, &bs).unwrap();
            let before = a1.norm_sqr() + a2.norm_sqr();
            prop_assert!((a3.norm_sqr() + a4.norm_sqr() - before).abs() <= 1e-12 * before.max(1.0));
        }

        #[test]
        fn inverse_solve_round_trips(a1 in amplitude(), a2 in amplitude(), bs in splitter()) {
            prop_assume!(bs.r.norm() > 0.05);
            let (a3, a4) = classical_beamsplit(a1, a2, &bs).unwrap();
            let (b2, b4) = solve_missing_amplitudes(a1, a3, &bs).unwrap();
            let tol = 1e-12 / bs.r.norm();
            prop_assert!((b2 - a2).norm() <= tol * 10.0 && (b4 - a4).norm() <= tol * 10.0);
        }

        #[test]
        fn attenuation_scales_moments(ens in ensemble(), eta in 0.01..1.0f64, phase in 0.0..std::f64::consts::TAU, m in 0u32..5, n in 0u32..5) {
            prop_assume!(m + n <= 8);
            let t = Complex64::from_polar(eta.sqrt(), phase);
            let out = classical_attenuate(&ens, t).unwrap();
            // phase covariance: G^(m,n) picks up t^n (t^*)^m, whose modulus is eta^((m+n)/2)
            let want = classical_moments(&ens, m, n) * t.conj().powu(m) * t.powu(n);
            let got = classical_moments(&out, m, n);
            prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
            prop_assert!((got.norm() - eta.powf((m + n) as f64 / 2.0) * classical_moments(&ens, m, n).norm()).abs() <= 1e-12 * want.norm().max(1.0));
        }

        #[test]
        fn classical_inequality_holds(ens in ensemble()) {
            let g1 = classical_moments(&ens, 1, 1).re;
            let g2 = classical_moments(&ens, 2, 2).re;
            prop_assert!(g2 >= g1 * g1 - 1e-12 * g2.max(1.0));
        }

        #[test]
        fn beamsplit_preserves_total_weight(ens in ensemble(), other in ensemble(), bs in splitter()) {
            let joint = ens.product(&other);
            let out = ensemble_beamsplit(&joint, &bs).unwrap();
            prop_assert_eq!(out.total_weight(), joint.total_weight());
        }
    }
}
