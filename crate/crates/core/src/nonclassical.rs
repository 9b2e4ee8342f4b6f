//! Normally ordered correlation functions and the classical bounds they obey.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::{CharFuncGrid, FilterSpec};
use crate::fock::{make_fock, normal_moment, DensityMatrix};
use crate::grid::Lattice;
use crate::optics::attenuate;
use crate::quasiprob::{fmt15, quasiprob_transform};

/// Relative slack before an inequality counts as violated.
pub const VERDICT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl Verdict {
    /// Verdict on `lhs >= rhs`.
    pub fn of(lhs: f64, rhs: f64) -> Self {
        if lhs < rhs - VERDICT_TOL * rhs.abs().max(1.0) {
            Verdict::Violated
        } else {
            Verdict::Satisfied
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: String,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

/// Correlation functions of a single-mode state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    /// `<a^dag a>`
    pub g1: f64,
    /// `<(a^dag)^2 a^2>`
    pub g2: f64,
    #[serde(serialize_with = "serialize_table")]
    pub gmn_table: BTreeMap<(usize, usize), Complex64>,
    /// `G^(2) >= [G^(1)]^2`
    pub inequality: CriterionResult,
    /// Criteria evaluated as violated.
    pub violations: Vec<CriterionResult>,
}

fn serialize_table<S: serde::Serializer>(
    table: &BTreeMap<(usize, usize), Complex64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry {
        m: usize,
        n: usize,
        re: f64,
        im: f64,
    }
    s.collect_seq(table.iter().map(|(&(m, n), v)| Entry { m, n, re: v.re, im: v.im }))
}

/// Moments `G^(m,n)` for `m, n <= order`, the `G^(2) >= [G^(1)]^2` test and
/// the diagonal hierarchy for every `n <= order`.
pub fn correlation_report(rho: &DensityMatrix, order: usize) -> Result<CorrelationReport> {
    let order = order.max(2);
    let mut gmn_table = BTreeMap::new();
    for m in 0..=order {
        for n in 0..=order {
            gmn_table.insert((m, n), normal_moment(rho, m, n)?);
        }
    }
    let g1 = gmn_table[&(1, 1)].re;
    let g2 = gmn_table[&(2, 2)].re;
    let inequality = CriterionResult {
        criterion: "g2_ge_g1sq".into(),
        lhs: g2,
        rhs: g1 * g1,
        verdict: Verdict::of(g2, g1 * g1),
    };
    let mut violations = Vec::new();
    if inequality.verdict == Verdict::Violated {
        violations.push(inequality.clone());
    }
    for n in 2..=order {
        for m in 1..n {
            let lhs = gmn_table[&(n, n)].re;
            let rhs = gmn_table[&(m, m)].re * gmn_table[&(n - m, n - m)].re;
            // (2, 1) is the same statement as g2_ge_g1sq
            if (n, m) == (2, 1) || 2 * m > n {
                continue;
            }
            if Verdict::of(lhs, rhs) == Verdict::Violated {
                violations.push(CriterionResult {
                    criterion: format!("hierarchy_{n}_{m}"),
                    lhs,
                    rhs,
                    verdict: Verdict::Violated,
                });
            }
        }
    }
    Ok(CorrelationReport { g1, g2, gmn_table, inequality, violations })
}

/// `G^(n,n) >= G^(m,m) G^(n-m,n-m)` for `n >= m >= 0`.
pub fn hierarchy_check(rho: &DensityMatrix, n: usize, m: usize) -> Result<CriterionResult> {
    if m > n {
        return Err(Error::InvalidArgument(format!("hierarchy needs n >= m, got n = {n}, m = {m}")));
    }
    let lhs = normal_moment(rho, n, n)?.re;
    let rhs = normal_moment(rho, m, m)?.re * normal_moment(rho, n - m, n - m)?.re;
    Ok(CriterionResult { criterion: format!("hierarchy_{n}_{m}"), lhs, rhs, verdict: Verdict::of(lhs, rhs) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingInvarianceReport {
    pub etas: Vec<f64>,
    pub results: Vec<CriterionResult>,
    /// Whether every efficiency gives the same verdict.
    pub invariant: bool,
}

/// Hierarchy verdict on `attenuate(rho, eta)` for each efficiency.
pub fn scaling_invariance_check(
    rho: &DensityMatrix,
    n: usize,
    m: usize,
    etas: &[f64],
) -> Result<ScalingInvarianceReport> {
    if etas.is_empty() {
        return Err(Error::InvalidArgument("no efficiencies given".into()));
    }
    let mut results = Vec::with_capacity(etas.len());
    for &eta in etas {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidEfficiency(eta));
        }
        results.push(hierarchy_check(&attenuate(rho, eta)?, n, m)?);
    }
    let invariant = results.windows(2).all(|w| w[0].verdict == w[1].verdict);
    Ok(ScalingInvarianceReport { etas: etas.to_vec(), results, invariant })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure3Row {
    pub eta: f64,
    pub wigner_origin_numeric: f64,
    pub wigner_origin_analytic: f64,
    pub g2_minus_g1sq: f64,
}

/// Lattices and cutoff for the attenuated-photon pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure3Setup {
    pub cutoff: usize,
    pub betas: Lattice,
    pub alphas: Lattice,
}

impl Default for Figure3Setup {
    fn default() -> Self {
        Self { cutoff: 20, betas: Lattice::DEFAULT_BETA, alphas: Lattice::DEFAULT_ALPHA }
    }
}

impl Figure3Setup {
    /// Wigner function at the origin of the single photon attenuated to `eta`,
    /// through the Fock channel and the lattice transform.
    pub fn wigner_origin(&self, eta: f64) -> Result<f64> {
        let rho = attenuate(&make_fock(1, self.cutoff)?, eta)?;
        let cf = CharFuncGrid::sample(&rho, &FilterSpec::WIGNER, self.betas)?;
        let grid = quasiprob_transform(&cf, &self.alphas)?;
        grid.value_at_origin()
            .ok_or_else(|| Error::InvalidArgument("alpha lattice must contain the origin (odd point count)".into()))
    }

    pub fn row(&self, eta: f64) -> Result<Figure3Row> {
        let rho = attenuate(&make_fock(1, self.cutoff)?, eta)?;
        let report = correlation_report(&rho, 2)?;
        Ok(Figure3Row {
            eta,
            wigner_origin_numeric: self.wigner_origin(eta)?,
            wigner_origin_analytic: 2.0 / PI * (1.0 - 2.0 * eta),
            g2_minus_g1sq: report.g2 - report.g1 * report.g1,
        })
    }
}

/// Rows on the uniform efficiency grid `eta_k = k / (eta_steps - 1)`.
pub fn figure3_data(eta_steps: usize) -> Result<Vec<Figure3Row>> {
    figure3_data_with(eta_steps, &Figure3Setup::default())
}

pub fn figure3_data_with(eta_steps: usize, setup: &Figure3Setup) -> Result<Vec<Figure3Row>> {
    if eta_steps < 2 {
        return Err(Error::InvalidArgument(format!("eta_steps must be >= 2, got {eta_steps}")));
    }
    (0..eta_steps)
        .map(|k| setup.row(k as f64 / (eta_steps - 1) as f64))
        .collect()
}

pub fn write_figure3_csv<W: Write>(rows: &[Figure3Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(["eta", "wigner_origin_numeric", "wigner_origin_analytic", "g2_minus_g1sq"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            fmt15(r.eta),
            fmt15(r.wigner_origin_numeric),
            fmt15(r.wigner_origin_analytic),
            fmt15(r.g2_minus_g1sq),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_coherent, make_thermal, mix};

    #[test]
    fn photon_report() {
        let r = correlation_report(&make_fock(1, 10).unwrap(), 2).unwrap();
        assert_eq!((r.g1, r.g2), (1.0, 0.0));
        assert_eq!(r.inequality.verdict, Verdict::Violated);
        assert_eq!(r.gmn_table[&(0, 0)], Complex64::new(1.0, 0.0));
        let r = correlation_report(&attenuate(&make_fock(1, 10).unwrap(), 0.5).unwrap(), 2).unwrap();
        assert!((r.g1 - 0.5).abs() < 1e-12 && r.g2.abs() < 1e-12);
        assert_eq!(r.inequality.verdict, Verdict::Violated);
    }

    #[test]
    fn classical_states_have_no_violations() {
        let coh = make_coherent(Complex64::new(0.9, -0.4), 30).unwrap();
        let r = correlation_report(&coh, 3).unwrap();
        assert!((r.g2 - r.g1 * r.g1).abs() < 1e-10);
        assert_eq!(r.inequality.verdict, Verdict::Satisfied);
        assert!(r.violations.is_empty());
        for (&(m, n), v) in &r.gmn_table {
            assert!((v - r.gmn_table[&(n, m)].conj()).norm() < 1e-12);
        }
        let th = make_thermal(0.5, 60).unwrap();
        assert!(correlation_report(&th, 3).unwrap().violations.is_empty());
        let both = mix(&[make_thermal(0.5, 30).unwrap(), make_coherent(Complex64::new(0.5, 0.0), 30).unwrap()], &[0.5, 0.5]).unwrap();
        assert!(correlation_report(&both, 3).unwrap().violations.is_empty());
    }

    #[test]
    fn report_needs_headroom() {
        assert!(matches!(correlation_report(&make_fock(1, 4).unwrap(), 2), Err(Error::CutoffTooSmall(_))));
    }

    #[test]
    fn hierarchy_examples() {
        let nbar = 0.8;
        let th = make_thermal(nbar, 80).unwrap();
        let h = hierarchy_check(&th, 2, 1).unwrap();
        assert_eq!(h.verdict, Verdict::Satisfied);
        assert!((h.lhs - 2.0 * nbar * nbar).abs() < 1e-9 && (h.rhs - nbar * nbar).abs() < 1e-9);
        let h = hierarchy_check(&make_fock(1, 8).unwrap(), 2, 1).unwrap();
        assert_eq!((h.lhs, h.rhs, h.verdict), (0.0, 1.0, Verdict::Violated));
        let h = hierarchy_check(&make_fock(3, 10).unwrap(), 3, 0).unwrap();
        assert_eq!(h.lhs, h.rhs);
        assert_eq!(h.verdict, Verdict::Satisfied);
        assert!(hierarchy_check(&th, 1, 2).is_err());
    }

    #[test]
    fn scaling_invariance_examples() {
        let r = scaling_invariance_check(&make_fock(1, 10).unwrap(), 2, 1, &[0.1, 0.5, 1.0]).unwrap();
        assert!(r.invariant);
        assert!(r.results.iter().all(|c| c.verdict == Verdict::Violated));
        let coh = make_coherent(Complex64::new(0.7, 0.2), 30).unwrap();
        let r = scaling_invariance_check(&coh, 2, 1, &[0.3, 0.9]).unwrap();
        assert!(r.invariant && r.results.iter().all(|c| c.verdict == Verdict::Satisfied));
        let th = make_thermal(0.6, 60).unwrap();
        let r = scaling_invariance_check(&th, 3, 1, &[0.2, 0.8]).unwrap();
        assert!(r.invariant && r.results.iter().all(|c| c.verdict == Verdict::Satisfied));
        assert!(matches!(scaling_invariance_check(&th, 2, 1, &[0.0]), Err(Error::InvalidEfficiency(_))));
    }

    #[test]
    fn figure3_examples() {
        let setup = Figure3Setup::default();
        let half = setup.row(0.5).unwrap();
        assert!(half.wigner_origin_numeric.abs() < 1e-6);
        let full = setup.row(1.0).unwrap();
        assert!((full.wigner_origin_numeric + 2.0 / PI).abs() < 1e-6);
        let r = setup.row(0.3).unwrap();
        assert!((r.g2_minus_g1sq + 0.09).abs() < 1e-10);
        assert!(figure3_data(1).is_err());
        let rows = figure3_data(3).unwrap();
        assert_eq!(rows.iter().map(|r| r.eta).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        let mut buf = Vec::new();
        write_figure3_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eta,wigner_origin_numeric,wigner_origin_analytic,g2_minus_g1sq\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
