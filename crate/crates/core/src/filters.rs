//! Filter functions `Omega(beta)` and the filtered characteristic functions
//! `Phi_Omega(beta) = Tr(rho D(beta)) Omega(beta)` of one and two modes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::ClassicalEnsemble;
use crate::error::{Error, Result};
use crate::fock::{displacement_matrix, DensityMatrix};
use crate::grid::Lattice;

/// Largest `|beta|` at which characteristic functions are evaluated.
///
/// Displacement elements are evaluated in closed form, so the truncated
/// state is represented exactly at every `beta`; the bound keeps the Gaussian
/// factor `e^{-|beta|^2/2}` well inside the normal `f64` range.
pub const TRUST_RADIUS: f64 = 30.0;

/// Selects a quasiprobability family.
///
/// `GeneralExp` is `Omega(beta) = exp(sum c_kl beta^k (beta^*)^l)` with finitely
/// many coefficients and `c_00 = 0`, so `Omega(0) = 1` and `Omega` has no zeros.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterSpec {
    SParam(f64),
    GeneralExp(BTreeMap<(u32, u32), Complex64>),
}

impl FilterSpec {
    pub const P: FilterSpec = FilterSpec::SParam(1.0);
    pub const WIGNER: FilterSpec = FilterSpec::SParam(0.0);
    pub const Q: FilterSpec = FilterSpec::SParam(-1.0);

    /// Builds a coefficient filter; zero coefficients are dropped.
    pub fn general(coeffs: impl IntoIterator<Item = ((u32, u32), Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((k, l), c) in coeffs {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient c_{k}{l} is not finite")));
            }
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if (k, l) == (0, 0) {
                return Err(Error::InvalidArgument("c_00 must vanish so that Omega(0) = 1".into()));
            }
            *map.entry((k, l)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(FilterSpec::GeneralExp(map))
    }

    /// Filter with a single coefficient `c_kl`.
    pub fn single(k: u32, l: u32, c: Complex64) -> Result<Self> {
        Self::general([((k, l), c)])
    }

    /// `ln Omega(beta)`.
    pub fn exponent(&self, beta: Complex64) -> Complex64 {
        match self {
            FilterSpec::SParam(s) => Complex64::new(s * beta.norm_sqr() / 2.0, 0.0),
            FilterSpec::GeneralExp(coeffs) => {
                let bc = beta.conj();
                coeffs.iter().map(|(&(k, l), c)| c * beta.powu(k) * bc.powu(l)).sum()
            }
        }
    }

    /// The `s` of an s-parameterized filter, if this filter is one.
    pub fn as_s_param(&self) -> Option<f64> {
        match self {
            FilterSpec::SParam(s) => Some(*s),
            FilterSpec::GeneralExp(coeffs) => match coeffs.len() {
                0 => Some(0.0),
                1 => coeffs.get(&(1, 1)).filter(|c| c.im == 0.0).map(|c| 2.0 * c.re),
                _ => None,
            },
        }
    }

    /// The equivalent coefficient table (`SParam(s)` is `c_11 = s/2`).
    pub fn coefficients(&self) -> BTreeMap<(u32, u32), Complex64> {
        match self {
            FilterSpec::SParam(s) if *s == 0.0 => BTreeMap::new(),
            FilterSpec::SParam(s) => BTreeMap::from([((1, 1), Complex64::new(s / 2.0, 0.0))]),
            FilterSpec::GeneralExp(c) => c.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawFilter {
    S { s: f64 },
    Coeffs { coeffs: Vec<RawCoeff> },
}

#[derive(Serialize, Deserialize)]
struct RawCoeff {
    k: u32,
    l: u32,
    re: f64,
    im: f64,
}

impl Serialize for FilterSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self {
            FilterSpec::SParam(s) => RawFilter::S { s: *s },
            FilterSpec::GeneralExp(c) => RawFilter::Coeffs {
                coeffs: c.iter().map(|(&(k, l), v)| RawCoeff { k, l, re: v.re, im: v.im }).collect(),
            },
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FilterSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match RawFilter::deserialize(deserializer)? {
            RawFilter::S { s } => Ok(FilterSpec::SParam(s)),
            RawFilter::Coeffs { coeffs } => {
                FilterSpec::general(coeffs.into_iter().map(|c| ((c.k, c.l), Complex64::new(c.re, c.im))))
                    .map_err(serde::de::Error::custom)
            }
        }
    }
}

/// `Omega(beta)`.
pub fn eval_filter(f: &FilterSpec, beta: Complex64) -> Complex64 {
    f.exponent(beta).exp()
}

pub(crate) fn check_trust(beta: Complex64) -> Result<()> {
    let radius = beta.norm();
    if !(radius <= TRUST_RADIUS) {
        return Err(Error::CutoffTooSmall(format!(
            "|beta| = {radius} exceeds the trust radius {TRUST_RADIUS}"
        )));
    }
    Ok(())
}

/// `Tr(rho D(beta))`, the characteristic function of the Wigner function.
pub fn symmetric_charfunc(rho: &DensityMatrix, beta: Complex64) -> Result<Complex64> {
    if rho.n_modes() != 1 {
        return Err(Error::DimensionMismatch("symmetric_charfunc needs a single-mode state".into()));
    }
    check_trust(beta)?;
    let sd = rho.support_dim();
    let d = displacement_matrix(sd, beta);
    let e = rho.entries();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..sd {
        for m in 0..sd {
            acc += e[(n, m)] * d[(m, n)];
        }
    }
    Ok(acc)
}

/// `Tr(rho D(beta)) Omega(beta)`.
pub fn filtered_charfunc(rho: &DensityMatrix, f: &FilterSpec, beta: Complex64) -> Result<Complex64> {
    Ok(symmetric_charfunc(rho, beta)? * eval_filter(f, beta))
}

/// `Tr(rho D(beta3) (x) D(beta4)) Omega(beta3) Omega(beta4)`.
pub fn two_mode_charfunc(
    rho12: &DensityMatrix,
    f: &FilterSpec,
    beta3: Complex64,
    beta4: Complex64,
) -> Result<Complex64> {
    if rho12.n_modes() != 2 {
        return Err(Error::DimensionMismatch("two_mode_charfunc needs a two-mode state".into()));
    }
    check_trust(beta3)?;
    check_trust(beta4)?;
    let dim = rho12.dim();
    let sd = rho12.support_dim();
    let d3 = displacement_matrix(sd, beta3);
    let d4 = displacement_matrix(sd, beta4);
    let e = rho12.entries();
    let mut acc = Complex64::new(0.0, 0.0);
    // sum over rho[(m', n'), (m, n)] * D3[m, m'] * D4[n, n']
    for mp in 0..sd {
        for np in 0..sd {
            let row = mp * dim + np;
            for m in 0..sd {
                let d3v = d3[(m, mp)];
                for n in 0..sd {
                    acc += e[(row, m * dim + n)] * d3v * d4[(n, np)];
                }
            }
        }
    }
    Ok(acc * (f.exponent(beta3) + f.exponent(beta4)).exp())
}

/// Characteristic function of the vacuum, `e^{-|beta|^2/2} Omega(beta)`.
pub fn vacuum_charfunc(f: &FilterSpec, beta: Complex64) -> Complex64 {
    (Complex64::new(-beta.norm_sqr() / 2.0, 0.0) + f.exponent(beta)).exp()
}

/// Anything that can be evaluated as a single-mode characteristic function.
pub trait CharacteristicFunction {
    fn eval(&self, beta: Complex64) -> Result<Complex64>;
}

/// A quantum state paired with a filter.
#[derive(Debug, Clone, Copy)]
pub struct FilteredState<'a> {
    pub rho: &'a DensityMatrix,
    pub filter: &'a FilterSpec,
}

impl CharacteristicFunction for FilteredState<'_> {
    fn eval(&self, beta: Complex64) -> Result<Complex64> {
        filtered_charfunc(self.rho, self.filter, beta)
    }
}

/// Characteristic function of a classical density,
/// `sum_i w_i e^{beta alpha_i^* - beta^* alpha_i}`.
impl CharacteristicFunction for ClassicalEnsemble {
    fn eval(&self, beta: Complex64) -> Result<Complex64> {
        Ok(self
            .samples()
            .iter()
            .map(|s| {
                let a = s.alpha();
                (beta * a.conj() - beta.conj() * a).exp() * s.weight
            })
            .sum())
    }
}

/// Filtered characteristic function sampled on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFuncGrid {
    pub lattice: Lattice,
    pub values: Vec<Complex64>,
    pub filter: FilterSpec,
}

impl CharFuncGrid {
    pub fn sample(rho: &DensityMatrix, filter: &FilterSpec, lattice: Lattice) -> Result<Self> {
        let values = lattice
            .complex_points()
            .into_iter()
            .map(|beta| filtered_charfunc(rho, filter, beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lattice, values, filter: filter.clone() })
    }

    pub fn from_function(cf: &dyn CharacteristicFunction, filter: &FilterSpec, lattice: Lattice) -> Result<Self> {
        let values = lattice
            .complex_points()
            .into_iter()
            .map(|beta| cf.eval(beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lattice, values, filter: filter.clone() })
    }

    /// Largest `|Phi|` on the outermost lattice ring.
    pub fn boundary_max(&self) -> f64 {
        self.lattice
            .boundary_indices()
            .into_iter()
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }
}
