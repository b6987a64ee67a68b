//! Discretized d-torus configuration space and its phase space.
//!
//! Positions live on the uniform grid x_i = i L/N of [0,L)^d. The dual
//! frequency lattice is the integer set {n : -N/2 <= n_i < N/2} in standard
//! FFT bin order, with physical covector xi = h n (2 pi / L). Everything
//! downstream (symbols, operators, propagators, decompositions) is built on
//! the transforms and norms defined here.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// Grid and semiclassical parameters. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub l: f64,
    pub h: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, l: f64, h: f64) -> Result<GridSpec> {
        if d != 1 && d != 2 {
            return Err(Error::Grid(format!("d must be 1 or 2, got {d}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("N must be a power of two >= 8, got {n}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Grid(format!("period L must be positive, got {l}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Grid(format!("h must be positive, got {h}")));
        }
        // frequency window must cover the unit-scale energy shell: h N >= 4 L
        if h * (n as f64) < 4.0 * l {
            return Err(Error::Grid(format!(
                "h*N = {:.6} < 4*L = {:.6}: frequency window too small for the energy shell",
                h * n as f64,
                4.0 * l
            )));
        }
        Ok(GridSpec { d, n, l, h })
    }

    /// Default torus: L = 2 pi.
    pub fn new_2pi(d: usize, n: usize, h: f64) -> Result<GridSpec> {
        GridSpec::new(d, n, std::f64::consts::TAU, h)
    }

    pub fn total_points(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn volume(&self) -> f64 {
        self.l.powi(self.d as i32)
    }

    /// Cell weight for the discrete L^2 norm.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Base angular frequency 2 pi / L.
    pub fn sigma(&self) -> f64 {
        std::f64::consts::TAU / self.l
    }

    /// Physical covector of an integer frequency: xi = h sigma n.
    pub fn xi_of(&self, n: [i64; 2]) -> [f64; 2] {
        let s = self.h * self.sigma();
        [s * n[0] as f64, s * n[1] as f64]
    }

    /// Largest resolved |xi| along one axis.
    pub fn xi_max(&self) -> f64 {
        self.h * self.sigma() * (self.n as f64 / 2.0)
    }

    /// The energy shell {|xi|^2 in [mu1, mu2]} must sit inside the resolved
    /// window with margin factor 2.
    pub fn check_shell_resolved(&self, mu1: f64, mu2: f64) -> Result<()> {
        if !(0.0 < mu1 && mu1 < mu2) {
            return Err(Error::Grid(format!("need 0 < mu1 < mu2, got [{mu1}, {mu2}]")));
        }
        if 2.0 * mu2.sqrt() > self.xi_max() {
            return Err(Error::Aliasing(format!(
                "2*sqrt(mu2) = {:.4} exceeds resolved |xi| max = {:.4} (h={}, N={})",
                2.0 * mu2.sqrt(),
                self.xi_max(),
                self.h,
                self.n
            )));
        }
        Ok(())
    }

    /// Position of a flat grid index (row-major, axis 0 slow).
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let dx = self.spacing();
        match self.d {
            1 => [flat as f64 * dx, 0.0],
            _ => {
                let i = flat / self.n;
                let j = flat % self.n;
                [i as f64 * dx, j as f64 * dx]
            }
        }
    }

    pub fn flat_of(&self, idx: [usize; 2]) -> usize {
        match self.d {
            1 => idx[0],
            _ => idx[0] * self.n + idx[1],
        }
    }

    /// Integer frequency of a flat bin index (row-major over bins).
    pub fn freq_of_bin(&self, flat: usize) -> [i64; 2] {
        let un = |k: usize| -> i64 {
            let k = k as i64;
            let n = self.n as i64;
            if k < n / 2 {
                k
            } else {
                k - n
            }
        };
        match self.d {
            1 => [un(flat), 0],
            _ => [un(flat / self.n), un(flat % self.n)],
        }
    }

    /// Flat bin index of an integer frequency; None if outside the window.
    pub fn bin_of_freq(&self, f: [i64; 2]) -> Option<usize> {
        let n = self.n as i64;
        let to_bin = |v: i64| -> Option<i64> {
            if v < -n / 2 || v >= n / 2 {
                None
            } else {
                Some(if v < 0 { v + n } else { v })
            }
        };
        match self.d {
            1 => to_bin(f[0]).map(|b| b as usize),
            _ => {
                let b0 = to_bin(f[0])?;
                let b1 = to_bin(f[1])?;
                Some((b0 * n + b1) as usize)
            }
        }
    }

    /// Componentwise torus wrap into [0, L).
    pub fn wrap(&self, x: f64) -> f64 {
        x.rem_euclid(self.l)
    }

    /// Shortest signed difference a - b on the circle.
    pub fn circ_diff(&self, a: f64, b: f64) -> f64 {
        let mut v = (a - b).rem_euclid(self.l);
        if v > self.l / 2.0 {
            v -= self.l;
        }
        v
    }
}

/// Point of phase space [0,L)^d x R^d. Only the first d entries are used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: [f64; 2],
    pub xi: [f64; 2],
}

impl PhasePoint {
    pub fn new(grid: &GridSpec, x: [f64; 2], xi: [f64; 2]) -> PhasePoint {
        let mut xw = [0.0; 2];
        for k in 0..grid.d {
            xw[k] = grid.wrap(x[k]);
        }
        PhasePoint { x: xw, xi }
    }

    /// Flat product metric: torus distance in x, euclidean in xi.
    pub fn dist(&self, other: &PhasePoint, grid: &GridSpec) -> f64 {
        let mut s = 0.0;
        for k in 0..grid.d {
            let dx = grid.circ_diff(self.x[k], other.x[k]);
            let dxi = self.xi[k] - other.xi[k];
            s += dx * dx + dxi * dxi;
        }
        s.sqrt()
    }
}

/// L^2 and L^inf norms of a state.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
}

/// Complex state vector over the spatial grid.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

fn check_finite(values: &[Complex64], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(())
}

impl WaveFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<WaveFunction> {
        if values.len() != grid.total_points() {
            return Err(Error::Grid(format!(
                "value length {} does not match grid size {}",
                values.len(),
                grid.total_points()
            )));
        }
        check_finite(&values, "wavefunction values")?;
        Ok(WaveFunction { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> Complex64) -> WaveFunction {
        let values = (0..grid.total_points()).map(|i| f(grid.point(i))).collect();
        WaveFunction { grid, values }
    }

    /// e^{i sigma n.x} for an integer frequency n.
    pub fn plane_wave(grid: GridSpec, n: [i64; 2]) -> WaveFunction {
        let s = grid.sigma();
        WaveFunction::from_fn(grid, |x| {
            let phase = s * (n[0] as f64 * x[0] + n[1] as f64 * x[1]);
            Complex64::from_polar(1.0, phase)
        })
    }

    pub fn zeros(grid: GridSpec) -> WaveFunction {
        WaveFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.total_points()],
        }
    }

    pub fn norms(&self) -> Norms {
        let l2 = (self.grid.cell() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
        let linf = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Norms { l2, linf }
    }

    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        self.grid.cell()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
    }

    /// Forward transform to bin-ordered coefficients u_hat_n with
    /// u(x) = sum_n u_hat_n e^{i sigma n.x}.
    pub fn fft_forward(&self) -> Result<Vec<Complex64>> {
        check_finite(&self.values, "fft input")?;
        let mut data = self.values.clone();
        fft_nd(self.grid.d, self.grid.n, &mut data, true);
        let scale = 1.0 / self.grid.total_points() as f64;
        for v in &mut data {
            *v *= scale;
        }
        Ok(data)
    }

    /// Inverse of `fft_forward`.
    pub fn from_coefficients(grid: GridSpec, coeffs: &[Complex64]) -> Result<WaveFunction> {
        if coeffs.len() != grid.total_points() {
            return Err(Error::Grid("coefficient length mismatch".into()));
        }
        let mut data = coeffs.to_vec();
        fft_nd(grid.d, grid.n, &mut data, false);
        WaveFunction::new(grid, data)
    }

    /// Evaluate the trigonometric interpolant on a grid refined by `factor`
    /// (zero padding in frequency space).
    pub fn oversample(&self, factor: usize) -> Result<WaveFunction> {
        let coeffs = self.fft_forward()?;
        let fine = GridSpec {
            d: self.grid.d,
            n: self.grid.n * factor,
            l: self.grid.l,
            h: self.grid.h,
        };
        let mut fc = vec![Complex64::new(0.0, 0.0); fine.total_points()];
        for (bin, c) in coeffs.iter().enumerate() {
            let f = self.grid.freq_of_bin(bin);
            if let Some(fb) = fine.bin_of_freq(f) {
                fc[fb] = *c;
            }
        }
        WaveFunction::from_coefficients(fine, &fc)
    }

    /// Binary dump: magic, JSON header {d,N,L,h}, then per point two
    /// little-endian f64 (re, im).
    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        let header = serde_json::to_string(&self.grid)?;
        f.write_all(b"WFN1")?;
        f.write_all(&(header.len() as u32).to_le_bytes())?;
        f.write_all(header.as_bytes())?;
        for v in &self.values {
            f.write_all(&v.re.to_le_bytes())?;
            f.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load_binary(path: &Path) -> Result<WaveFunction> {
        let mut f = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != b"WFN1" {
            return Err(Error::Grid("bad magic in wavefunction file".into()));
        }
        let mut len4 = [0u8; 4];
        f.read_exact(&mut len4)?;
        let hlen = u32::from_le_bytes(len4) as usize;
        let mut hbuf = vec![0u8; hlen];
        f.read_exact(&mut hbuf)?;
        let grid: GridSpec = serde_json::from_slice(&hbuf)?;
        let mut values = Vec::with_capacity(grid.total_points());
        let mut buf = [0u8; 16];
        for _ in 0..grid.total_points() {
            f.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
            values.push(Complex64::new(re, im));
        }
        WaveFunction::new(grid, values)
    }

    /// CSV of |psi(x)| for plotting: x1[,x2],abs.
    pub fn save_csv_abs(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        if self.grid.d == 1 {
            out.push_str("x,abs\n");
        } else {
            out.push_str("x1,x2,abs\n");
        }
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            if self.grid.d == 1 {
                out.push_str(&format!("{},{}\n", p[0], v.norm()));
            } else {
                out.push_str(&format!("{},{},{}\n", p[0], p[1], v.norm()));
            }
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// In-place FFT over a row-major d-dimensional array of side n.
pub fn fft_nd(d: usize, n: usize, data: &mut [Complex64], forward: bool) {
    let mut planner = FftPlanner::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    match d {
        1 => fft.process(data),
        _ => {
            // rows (axis 1, contiguous)
            for row in data.chunks_exact_mut(n) {
                fft.process(row);
            }
            // columns (axis 0, strided)
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = data[i * n + j];
                }
                fft.process(&mut col);
                for i in 0..n {
                    data[i * n + j] = col[i];
                }
            }
        }
    }
}
