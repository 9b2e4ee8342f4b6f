//! Quasiprobabilities from characteristic functions.
//!
//! The transform uses the kernel `e^{beta^* alpha - beta alpha^*}` with a
//! `1/pi^2` prefactor, under which the vacuum Wigner function peaks at `2/pi`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filters::{CharFuncGrid, FilterSpec};
use crate::fock::{coherent_amplitudes, DensityMatrix};
use crate::grid::Lattice;
use crate::special::pairwise_sum;

/// Largest `|Phi|` tolerated on the lattice boundary for filters above `s = 0`.
pub const REGULAR_P_TOL: f64 = 1e-8;
/// Largest imaginary part tolerated before the transform is declared non-real.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;
/// Normalization slack for quadrature marginals.
pub const MARGINAL_NORM_TOL: f64 = 1e-3;

/// Real quasiprobability sampled on an `alpha` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProbGrid {
    pub lattice: Lattice,
    pub values: Vec<f64>,
    pub filter: FilterSpec,
    /// `sum P * d^2 alpha` over the lattice.
    pub volume_integral: f64,
    pub imaginary_residue: f64,
}

impl QuasiProbGrid {
    /// Value at lattice indices `(i, j)`, i.e. at `x_i + i x_j`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.lattice.points() + j]
    }

    pub fn value_at_origin(&self) -> Option<f64> {
        self.lattice.origin_index().map(|k| self.values[k])
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Writes `re_alpha,im_alpha,value` rows with 15 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
        w.write_record(["re_alpha", "im_alpha", "value"]).map_err(io)?;
        for (z, v) in self.lattice.complex_points().iter().zip(&self.values) {
            w.write_record([fmt15(z.re), fmt15(z.im), fmt15(*v)]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
        Ok(())
    }
}

/// A float with 15 significant digits.
pub fn fmt15(x: f64) -> String {
    format!("{x:.14e}")
}

fn needs_decay_check(f: &FilterSpec) -> bool {
    !matches!(f.as_s_param(), Some(s) if s <= 0.0)
}

/// Discrete Fourier transform of a sampled characteristic function onto the
/// `alphas` lattice.
pub fn quasiprob_transform(cf: &CharFuncGrid, alphas: &Lattice) -> Result<QuasiProbGrid> {
    let dbeta = cf.lattice.step();
    let limit = PI / (2.0 * alphas.extent());
    if dbeta > limit {
        return Err(Error::GridTooCoarse(format!(
            "beta step {dbeta} exceeds pi/(2A) = {limit} for alpha extent {}",
            alphas.extent()
        )));
    }
    if needs_decay_check(&cf.filter) {
        let edge = cf.boundary_max();
        if !(edge <= REGULAR_P_TOL) {
            return Err(Error::SingularPFunction(edge));
        }
    }

    let bx = cf.lattice.coords();
    let ax = alphas.coords();
    let nb = bx.len();
    let na = ax.len();
    // P(a + ib) = dbeta^2/pi^2 sum_{x,y} Phi(x + iy) e^{2i(x b - y a)}
    let kernel_y: Vec<Complex64> = ax
        .iter()
        .flat_map(|&a| bx.iter().map(move |&y| Complex64::from_polar(1.0, -2.0 * y * a)))
        .collect();
    let kernel_x: Vec<Complex64> = ax
        .iter()
        .flat_map(|&b| bx.iter().map(move |&x| Complex64::from_polar(1.0, 2.0 * x * b)))
        .collect();

    let mut partial = vec![Complex64::new(0.0, 0.0); nb * na];
    let mut scratch = vec![Complex64::new(0.0, 0.0); nb];
    for ix in 0..nb {
        let row = &cf.values[ix * nb..(ix + 1) * nb];
        for p in 0..na {
            let k = &kernel_y[p * nb..(p + 1) * nb];
            for iy in 0..nb {
                scratch[iy] = row[iy] * k[iy];
            }
            partial[p * nb + ix] = pairwise_sum(&scratch);
        }
    }

    let scale = dbeta * dbeta / (PI * PI);
    let mut values = Vec::with_capacity(na * na);
    let mut residue: f64 = 0.0;
    for p in 0..na {
        let t = &partial[p * nb..(p + 1) * nb];
        for q in 0..na {
            let k = &kernel_x[q * nb..(q + 1) * nb];
            for ix in 0..nb {
                scratch[ix] = t[ix] * k[ix];
            }
            let v = pairwise_sum(&scratch) * scale;
            residue = residue.max(v.im.abs());
            values.push(v.re);
        }
    }
    if residue > IMAG_RESIDUE_TOL {
        return Err(Error::NonRealTransform(residue));
    }
    let da = alphas.step();
    let volume_integral = values.iter().sum::<f64>() * da * da;
    Ok(QuasiProbGrid {
        lattice: *alphas,
        values,
        filter: cf.filter.clone(),
        volume_integral,
        imaginary_residue: residue,
    })
}

/// Samples `Phi_Omega` of `rho` on `betas` and transforms it onto `alphas`.
pub fn quasiprob_of_state(
    rho: &DensityMatrix,
    filter: &FilterSpec,
    betas: Lattice,
    alphas: &Lattice,
) -> Result<QuasiProbGrid> {
    let cf = CharFuncGrid::sample(rho, filter, betas)?;
    quasiprob_transform(&cf, alphas)
}

/// Husimi function `<alpha| rho |alpha> / pi`, evaluated in the Fock basis.
///
/// `rho` has no weight above its cutoff, so only the first `dim` exact
/// coherent amplitudes contribute.
pub fn q_function(rho: &DensityMatrix, alpha: Complex64) -> Result<f64> {
    if rho.n_modes() != 1 {
        return Err(Error::DimensionMismatch("q_function needs a single-mode state".into()));
    }
    let c = coherent_amplitudes(alpha, rho.dim());
    let e = rho.entries();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..rho.dim() {
        for n in 0..rho.dim() {
            acc += c[m].conj() * e[(m, n)] * c[n];
        }
    }
    Ok(acc.re / PI)
}

/// Wigner function of a single photon after attenuation to efficiency `eta`:
/// `(2/pi) (1 - 2 eta + 4 eta |alpha|^2) e^{-2|alpha|^2}`.
pub fn attenuated_photon_wigner(eta: f64, alpha: Complex64) -> f64 {
    let x = alpha.norm_sqr();
    2.0 / PI * (1.0 - 2.0 * eta + 4.0 * eta * x) * (-2.0 * x).exp()
}

/// Catmull-Rom cubic weights for fractional offset `t` in `[0, 1)`.
fn cubic_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Bicubic interpolation of the grid, zero outside the lattice.
fn interpolate(grid: &QuasiProbGrid, z: Complex64) -> f64 {
    let n = grid.lattice.points() as isize;
    let h = grid.lattice.step();
    let snap = |v: f64| if (v - v.round()).abs() < 1e-9 { v.round() } else { v };
    let fx = snap((z.re + grid.lattice.extent()) / h);
    let fy = snap((z.im + grid.lattice.extent()) / h);
    let (ix, iy) = (fx.floor(), fy.floor());
    let (tx, ty) = (fx - ix, fy - iy);
    // exact lattice points are returned without interpolation
    if tx == 0.0 && ty == 0.0 {
        let (i, j) = (ix as isize, iy as isize);
        return if (0..n).contains(&i) && (0..n).contains(&j) { grid.at(i as usize, j as usize) } else { 0.0 };
    }
    let (wx, wy) = (cubic_weights(tx), cubic_weights(ty));
    let mut acc = 0.0;
    for (a, wa) in wx.iter().enumerate() {
        let i = ix as isize - 1 + a as isize;
        if !(0..n).contains(&i) {
            continue;
        }
        for (b, wb) in wy.iter().enumerate() {
            let j = iy as isize - 1 + b as isize;
            if (0..n).contains(&j) {
                acc += wa * wb * grid.at(i as usize, j as usize);
            }
        }
    }
    acc
}

/// Distribution of the quadrature `x = Re(alpha e^{-i phase})`, the line
/// integral of the Wigner grid along the orthogonal direction.
///
/// The abscissae are the lattice axis coordinates.
pub fn quadrature_distribution(wigner: &QuasiProbGrid, phase: f64) -> Result<Vec<(f64, f64)>> {
    if wigner.filter.as_s_param() != Some(0.0) {
        return Err(Error::FilterMismatch("quadrature marginals need a Wigner (s = 0) grid".into()));
    }
    let xs = wigner.lattice.coords();
    let h = wigner.lattice.step();
    let rot = Complex64::from_polar(1.0, phase);
    let snap = |z: Complex64| -> Complex64 {
        // keep rotations by multiples of pi/2 exactly on the lattice
        let round = |v: f64| if (v - v.round()).abs() < 1e-12 { v.round() } else { v };
        Complex64::new(round(z.re), round(z.im))
    };
    let rot = snap(rot);
    let mut out = Vec::with_capacity(xs.len());
    for &x in &xs {
        let line: f64 = xs.iter().map(|&y| interpolate(wigner, rot * Complex64::new(x, y))).sum();
        out.push((x, line * h));
    }
    let norm: f64 = out.iter().map(|(_, p)| p).sum::<f64>() * h;
    if (norm - 1.0).abs() > MARGINAL_NORM_TOL {
        return Err(Error::GridTooCoarse(format!(
            "quadrature marginal integrates to {norm}, outside 1 +/- {MARGINAL_NORM_TOL}"
        )));
    }
    Ok(out)
}
