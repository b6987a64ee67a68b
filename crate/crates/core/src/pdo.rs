//! Symbols on discrete phase space, their quantization to dense operators,
//! non-stationary phase quadrature, and a local d=1 Fourier integral
//! operator kernel.
//!
//! Quantization is symmetrized Kohn-Nirenberg: Op(a) = (KN(a) + KN(conj a)*)/2.
//! That choice is self-adjoint for real symbols and agrees with Weyl exactly
//! on symbols affine in xi; the two differ at O(h^2) on smooth symbols.

use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LineFit};
use crate::phasegrid::{fft_nd, GridSpec, WaveFunction};
use faer::{c64, Mat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Symbol-class metadata: order k and exoticness eta in [0, 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolClass {
    pub order: f64,
    pub eta: f64,
}

impl SymbolClass {
    pub fn smooth() -> SymbolClass {
        SymbolClass { order: 0.0, eta: 0.0 }
    }

    pub fn mesoscopic(beta: f64) -> SymbolClass {
        SymbolClass { order: 0.0, eta: beta }
    }
}

/// Axis-aligned box of integer frequencies, inclusive bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqWindow {
    pub lo: [i64; 2],
    pub hi: [i64; 2],
    pub d: usize,
}

impl FreqWindow {
    pub fn full(grid: &GridSpec) -> FreqWindow {
        let half = grid.n as i64 / 2;
        let mut lo = [0i64; 2];
        let mut hi = [0i64; 2];
        for k in 0..grid.d {
            lo[k] = -half;
            hi[k] = half - 1;
        }
        FreqWindow { lo, hi, d: grid.d }
    }

    /// Smallest window containing {|xi_i| <= radius} on each axis.
    pub fn ball(grid: &GridSpec, xi_radius: f64) -> FreqWindow {
        let half = grid.n as i64 / 2;
        let r = (xi_radius / (grid.h * grid.sigma())).ceil() as i64;
        let r = r.min(half - 1);
        let mut lo = [0i64; 2];
        let mut hi = [0i64; 2];
        for k in 0..grid.d {
            lo[k] = -r;
            hi[k] = r;
        }
        FreqWindow { lo, hi, d: grid.d }
    }

    pub fn axis_len(&self, k: usize) -> usize {
        (self.hi[k] - self.lo[k] + 1) as usize
    }

    pub fn len(&self) -> usize {
        (0..self.d).map(|k| self.axis_len(k)).product()
    }

    pub fn is_empty(&self) -> bool {
        (0..self.d).any(|k| self.hi[k] < self.lo[k])
    }

    pub fn freq_of(&self, w: usize) -> [i64; 2] {
        match self.d {
            1 => [self.lo[0] + w as i64, 0],
            _ => {
                let c1 = self.axis_len(1);
                [
                    self.lo[0] + (w / c1) as i64,
                    self.lo[1] + (w % c1) as i64,
                ]
            }
        }
    }

    pub fn index_of(&self, f: [i64; 2]) -> Option<usize> {
        for k in 0..self.d {
            if f[k] < self.lo[k] || f[k] > self.hi[k] {
                return None;
            }
        }
        Some(match self.d {
            1 => (f[0] - self.lo[0]) as usize,
            _ => (f[0] - self.lo[0]) as usize * self.axis_len(1) + (f[1] - self.lo[1]) as usize,
        })
    }

    pub fn fits_in(&self, grid: &GridSpec) -> bool {
        let half = grid.n as i64 / 2;
        (0..self.d).all(|k| self.lo[k] >= -half && self.hi[k] <= half - 1)
    }

    /// Shrink by `m` lattice steps on every axis (for FD stencils).
    pub fn shrunk(&self, m: i64) -> FreqWindow {
        let mut w = *self;
        for k in 0..self.d {
            w.lo[k] += m;
            w.hi[k] -= m;
        }
        w
    }
}

/// Sample storage. `General` holds the full (x-grid) x (frequency window)
/// product; the other two are the degenerate cases constant along one factor.
#[derive(Debug, Clone)]
pub enum SymbolData {
    General {
        window: FreqWindow,
        /// x-major: samples[x_flat * window.len() + w]
        samples: Vec<Complex64>,
    },
    Position {
        samples: Vec<Complex64>,
    },
    Frequency {
        window: FreqWindow,
        samples: Vec<Complex64>,
    },
}

/// A function on discrete phase space with class metadata.
#[derive(Debug, Clone)]
pub struct Symbol {
    pub grid: GridSpec,
    pub data: SymbolData,
    pub real_valued: bool,
    pub class: SymbolClass,
}

impl Symbol {
    pub fn from_fn(
        grid: GridSpec,
        window: FreqWindow,
        class: SymbolClass,
        f: impl Fn([f64; 2], [f64; 2]) -> Complex64,
    ) -> Result<Symbol> {
        Self::check_class(&class)?;
        let wl = window.len();
        let mut samples = Vec::with_capacity(grid.total_points() * wl);
        for i in 0..grid.total_points() {
            let x = grid.point(i);
            for w in 0..wl {
                let xi = grid.xi_of(window.freq_of(w));
                samples.push(f(x, xi));
            }
        }
        Self::check_finite(&samples)?;
        let real_valued = samples.iter().all(|v| v.im == 0.0);
        Ok(Symbol {
            grid,
            data: SymbolData::General { window, samples },
            real_valued,
            class,
        })
    }

    pub fn from_fn_real(
        grid: GridSpec,
        window: FreqWindow,
        class: SymbolClass,
        f: impl Fn([f64; 2], [f64; 2]) -> f64,
    ) -> Result<Symbol> {
        Self::from_fn(grid, window, class, |x, xi| Complex64::new(f(x, xi), 0.0))
    }

    /// Symbol depending on position only (multiplication symbol).
    pub fn of_position(
        grid: GridSpec,
        class: SymbolClass,
        f: impl Fn([f64; 2]) -> Complex64,
    ) -> Result<Symbol> {
        Self::check_class(&class)?;
        let samples: Vec<Complex64> = (0..grid.total_points()).map(|i| f(grid.point(i))).collect();
        Self::check_finite(&samples)?;
        let real_valued = samples.iter().all(|v| v.im == 0.0);
        Ok(Symbol {
            grid,
            data: SymbolData::Position { samples },
            real_valued,
            class,
        })
    }

    /// Symbol depending on frequency only (Fourier multiplier symbol).
    pub fn of_frequency(
        grid: GridSpec,
        window: FreqWindow,
        class: SymbolClass,
        f: impl Fn([f64; 2]) -> Complex64,
    ) -> Result<Symbol> {
        Self::check_class(&class)?;
        let samples: Vec<Complex64> = (0..window.len())
            .map(|w| f(grid.xi_of(window.freq_of(w))))
            .collect();
        Self::check_finite(&samples)?;
        let real_valued = samples.iter().all(|v| v.im == 0.0);
        Ok(Symbol {
            grid,
            data: SymbolData::Frequency { window, samples },
            real_valued,
            class,
        })
    }

    pub fn constant(grid: GridSpec, c: Complex64) -> Symbol {
        Symbol {
            grid,
            data: SymbolData::Position {
                samples: vec![c; grid.total_points()],
            },
            real_valued: c.im == 0.0,
            class: SymbolClass::smooth(),
        }
    }

    fn check_class(class: &SymbolClass) -> Result<()> {
        if !(0.0..0.5).contains(&class.eta) {
            return Err(Error::Symbol(format!("eta must lie in [0, 1/2), got {}", class.eta)));
        }
        Ok(())
    }

    fn check_finite(samples: &[Complex64]) -> Result<()> {
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("symbol samples".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> FreqWindow {
        match &self.data {
            SymbolData::General { window, .. } | SymbolData::Frequency { window, .. } => *window,
            SymbolData::Position { .. } => FreqWindow::full(&self.grid),
        }
    }

    /// Sample value at (x grid index, window frequency index).
    pub fn value(&self, x_flat: usize, w: usize) -> Complex64 {
        match &self.data {
            SymbolData::General { window, samples } => samples[x_flat * window.len() + w],
            SymbolData::Position { samples } => samples[x_flat],
            SymbolData::Frequency { samples, .. } => samples[w],
        }
    }

    /// Materialize to the general layout (needed by derivative stencils).
    pub fn to_general(&self) -> Symbol {
        match &self.data {
            SymbolData::General { .. } => self.clone(),
            _ => {
                let window = self.window();
                let wl = window.len();
                let mut samples = Vec::with_capacity(self.grid.total_points() * wl);
                for i in 0..self.grid.total_points() {
                    for w in 0..wl {
                        samples.push(self.value(i, w));
                    }
                }
                Symbol {
                    grid: self.grid,
                    data: SymbolData::General { window, samples },
                    real_valued: self.real_valued,
                    class: self.class,
                }
            }
        }
    }

    pub fn sup_abs(&self) -> f64 {
        let wl = self.window().len();
        let mut m = 0.0f64;
        for i in 0..self.grid.total_points() {
            for w in 0..wl {
                m = m.max(self.value(i, w).norm());
            }
        }
        m
    }
}

/// Dense operator in the Fourier basis.
#[derive(Debug, Clone)]
pub struct PseudoOp {
    pub grid: GridSpec,
    pub matrix: Mat<c64>,
    pub hermitian: bool,
}

impl PseudoOp {
    pub fn identity(grid: GridSpec) -> PseudoOp {
        let m = grid.total_points();
        let mut matrix = Mat::<c64>::zeros(m, m);
        for i in 0..m {
            matrix[(i, i)] = c64::new(1.0, 0.0);
        }
        PseudoOp {
            grid,
            matrix,
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.total_points()
    }

    /// Apply to a state: transform, multiply, transform back.
    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        if psi.grid != self.grid {
            return Err(Error::Grid("operator/state grid mismatch".into()));
        }
        let coeffs = psi.fft_forward()?;
        let out = self.apply_coeffs(&coeffs);
        WaveFunction::from_coefficients(self.grid, &out)
    }

    /// Apply directly to bin-ordered coefficients.
    pub fn apply_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        for (j, &c) in coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for i in 0..m {
                out[i] += self.matrix[(i, j)] * c;
            }
        }
        out
    }

    /// Frobenius-normalized hermitian defect ||M - M*|| / ||M||.
    pub fn hermitian_defect(&self) -> f64 {
        let diff = &self.matrix - self.matrix.adjoint().to_owned();
        let base = self.matrix.norm_l2();
        if base == 0.0 {
            0.0
        } else {
            diff.norm_l2() / base
        }
    }

    /// Operator norm by power iteration on M*M (50 steps, tol 1e-8).
    pub fn op_norm(&self) -> f64 {
        op_norm_mat(&self.matrix)
    }

    pub fn compose(&self, other: &PseudoOp) -> Result<PseudoOp> {
        if self.grid != other.grid {
            return Err(Error::Grid("compose: grid mismatch".into()));
        }
        Ok(PseudoOp {
            grid: self.grid,
            matrix: &self.matrix * &other.matrix,
            hermitian: false,
        })
    }

    pub fn sub(&self, other: &PseudoOp) -> Result<PseudoOp> {
        if self.grid != other.grid {
            return Err(Error::Grid("sub: grid mismatch".into()));
        }
        Ok(PseudoOp {
            grid: self.grid,
            matrix: &self.matrix - &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scaled(&self, s: Complex64) -> PseudoOp {
        PseudoOp {
            grid: self.grid,
            matrix: &self.matrix * faer::Scale(s),
            hermitian: self.hermitian && s.im == 0.0,
        }
    }

    pub fn add(&self, other: &PseudoOp) -> Result<PseudoOp> {
        if self.grid != other.grid {
            return Err(Error::Grid("add: grid mismatch".into()));
        }
        Ok(PseudoOp {
            grid: self.grid,
            matrix: &self.matrix + &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }
}

pub fn op_norm_mat(m: &Mat<c64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = faer::Col::<c64>::zeros(n);
    for i in 0..n {
        let u = crate::rng::uniform01(0x9e2a7, 0, i as u64);
        v[i] = c64::new(u - 0.5, crate::rng::uniform01(0x9e2a7, 1, i as u64) - 0.5);
    }
    let nv = v.norm_l2();
    if nv == 0.0 {
        return 0.0;
    }
    let mut v = v * faer::Scale(c64::new(1.0 / nv, 0.0));
    let mh = m.adjoint();
    let mut est = 0.0f64;
    for _ in 0..50 {
        let w = m * &v;
        let new_est = w.norm_l2();
        let u = mh * &w;
        let nu = u.norm_l2();
        if nu == 0.0 {
            return 0.0;
        }
        v = u * faer::Scale(c64::new(1.0 / nu, 0.0));
        if (new_est - est).abs() <= 1e-8 * new_est.max(1e-300) {
            return new_est;
        }
        est = new_est;
    }
    est
}

/// Kohn-Nirenberg matrix: column n is the DFT of x -> a(x, xi_n) e^{i sigma n.x}.
fn kn_matrix(
    grid: &GridSpec,
    window: &FreqWindow,
    value: &dyn Fn(usize, usize) -> Complex64,
) -> Mat<c64> {
    let m = grid.total_points();
    let mut a = Mat::<c64>::zeros(m, m);
    let sigma = grid.sigma();
    let scale = 1.0 / m as f64;
    let mut g = vec![Complex64::new(0.0, 0.0); m];
    for w in 0..window.len() {
        let f = window.freq_of(w);
        let col = match grid.bin_of_freq(f) {
            Some(b) => b,
            None => continue,
        };
        for (i, gv) in g.iter_mut().enumerate() {
            let x = grid.point(i);
            let phase = sigma * (f[0] as f64 * x[0] + f[1] as f64 * x[1]);
            *gv = value(i, w) * Complex64::from_polar(1.0, phase);
        }
        fft_nd(grid.d, grid.n, &mut g, true);
        for i in 0..m {
            a[(i, col)] = g[i] * scale;
        }
    }
    a
}

/// Quantize a symbol to a dense operator (symmetrized Kohn-Nirenberg).
pub fn quantize(a: &Symbol) -> Result<PseudoOp> {
    let grid = a.grid;
    let window = a.window();
    if !window.fits_in(&grid) {
        return Err(Error::Aliasing(format!(
            "symbol window {:?}..{:?} exceeds grid frequency window +-{}",
            window.lo,
            window.hi,
            grid.n / 2
        )));
    }
    let m = grid.total_points();

    // exact fast paths
    match &a.data {
        SymbolData::Frequency { window, samples } => {
            let mut matrix = Mat::<c64>::zeros(m, m);
            for (w, &v) in samples.iter().enumerate() {
                if let Some(b) = grid.bin_of_freq(window.freq_of(w)) {
                    matrix[(b, b)] = if a.real_valued {
                        c64::new(v.re, 0.0)
                    } else {
                        v
                    };
                }
            }
            return Ok(PseudoOp {
                grid,
                matrix,
                hermitian: a.real_valued,
            });
        }
        SymbolData::Position { samples } => {
            // Toeplitz in the Fourier basis from a single transform
            let mut ahat = samples.clone();
            fft_nd(grid.d, grid.n, &mut ahat, true);
            let scale = 1.0 / m as f64;
            let n = grid.n;
            let mut matrix = Mat::<c64>::zeros(m, m);
            for row in 0..m {
                for col in 0..m {
                    let diff_bin = match grid.d {
                        1 => (row + n - col % n) % n,
                        _ => {
                            let (r0, r1) = (row / n, row % n);
                            let (c0, c1) = (col / n, col % n);
                            ((r0 + n - c0) % n) * n + ((r1 + n - c1) % n)
                        }
                    };
                    matrix[(row, col)] = ahat[diff_bin] * scale;
                }
            }
            let mut op = PseudoOp {
                grid,
                matrix,
                hermitian: false,
            };
            if a.real_valued {
                symmetrize_in_place(&mut op.matrix);
                op.hermitian = true;
            }
            return Ok(op);
        }
        SymbolData::General { .. } => {}
    }

    let mut matrix = kn_matrix(&grid, &window, &|i, w| a.value(i, w));
    let hermitian = if a.real_valued {
        symmetrize_in_place(&mut matrix);
        true
    } else {
        let b = kn_matrix(&grid, &window, &|i, w| a.value(i, w).conj());
        matrix = (&matrix + b.adjoint().to_owned()) * faer::Scale(c64::new(0.5, 0.0));
        false
    };
    let op = PseudoOp {
        grid,
        matrix,
        hermitian,
    };
    if hermitian {
        let defect = op.hermitian_defect();
        if defect > 1e-12 {
            return Err(Error::NotHermitian(format!(
                "symmetrized quantization defect {defect:.3e}"
            )));
        }
    }
    Ok(op)
}

fn symmetrize_in_place(m: &mut Mat<c64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = c64::new(m[(i, i)].re, 0.0);
        for j in 0..i {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

// ---------------------------------------------------------------------------
// symbol calculus: derivatives, products, Poisson bracket
// ---------------------------------------------------------------------------

/// Spectral derivative in x along `axis`.
pub fn symbol_dx(a: &Symbol, axis: usize) -> Result<Symbol> {
    let g = a.to_general();
    let grid = g.grid;
    let window = g.window();
    let wl = window.len();
    let m = grid.total_points();
    let (samples_in, _) = match &g.data {
        SymbolData::General { samples, window } => (samples, window),
        _ => unreachable!(),
    };
    let sigma = grid.sigma();
    let mut out = vec![Complex64::new(0.0, 0.0); m * wl];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for w in 0..wl {
        for i in 0..m {
            buf[i] = samples_in[i * wl + w];
        }
        fft_nd(grid.d, grid.n, &mut buf, true);
        for (bin, v) in buf.iter_mut().enumerate() {
            let f = grid.freq_of_bin(bin);
            *v *= Complex64::new(0.0, sigma * f[axis] as f64) / m as f64;
        }
        fft_nd(grid.d, grid.n, &mut buf, false);
        for i in 0..m {
            out[i * wl + w] = buf[i];
        }
    }
    Ok(Symbol {
        grid,
        data: SymbolData::General {
            window,
            samples: out,
        },
        real_valued: a.real_valued,
        class: a.class,
    })
}

/// 4th-order centered finite difference in xi along `axis`; the window
/// shrinks by two lattice steps on that axis.
pub fn symbol_dxi(a: &Symbol, axis: usize) -> Result<Symbol> {
    if let SymbolData::Position { samples } = &a.data {
        // xi-independent: derivative is exactly zero
        return Ok(Symbol {
            grid: a.grid,
            data: SymbolData::Position {
                samples: vec![Complex64::new(0.0, 0.0); samples.len()],
            },
            real_valued: true,
            class: a.class,
        });
    }
    let g = a.to_general();
    let grid = g.grid;
    let win = g.window();
    if win.axis_len(axis) < 5 {
        return Err(Error::Symbol(
            "xi-window too narrow for the 4th-order stencil".into(),
        ));
    }
    let mut newwin = win;
    newwin.lo[axis] += 2;
    newwin.hi[axis] -= 2;
    let dxi = grid.h * grid.sigma();
    let wl_new = newwin.len();
    let m = grid.total_points();
    let mut out = vec![Complex64::new(0.0, 0.0); m * wl_new];
    for i in 0..m {
        for w in 0..wl_new {
            let f = newwin.freq_of(w);
            let shifted = |s: i64| -> Complex64 {
                let mut fs = f;
                fs[axis] += s;
                g.value(i, win.index_of(fs).unwrap())
            };
            // (-f(+2) + 8 f(+1) - 8 f(-1) + f(-2)) / (12 dxi)
            let v = (-shifted(2) + shifted(1) * 8.0 - shifted(-1) * 8.0 + shifted(-2))
                / (12.0 * dxi);
            out[i * wl_new + w] = v;
        }
    }
    Ok(Symbol {
        grid,
        data: SymbolData::General {
            window: newwin,
            samples: out,
        },
        real_valued: a.real_valued,
        class: a.class,
    })
}

/// Pointwise product on the intersection window.
pub fn symbol_product(a: &Symbol, b: &Symbol) -> Result<Symbol> {
    if a.grid != b.grid {
        return Err(Error::Grid("symbol product: grid mismatch".into()));
    }
    let (wa, wb) = (a.window(), b.window());
    let mut win = wa;
    for k in 0..a.grid.d {
        win.lo[k] = wa.lo[k].max(wb.lo[k]);
        win.hi[k] = wa.hi[k].min(wb.hi[k]);
    }
    if win.is_empty() {
        return Err(Error::Symbol("symbol product: disjoint windows".into()));
    }
    let m = a.grid.total_points();
    let wl = win.len();
    let mut out = Vec::with_capacity(m * wl);
    for i in 0..m {
        for w in 0..wl {
            let f = win.freq_of(w);
            let va = a.value(i, wa.index_of(f).unwrap());
            let vb = b.value(i, wb.index_of(f).unwrap());
            out.push(va * vb);
        }
    }
    Ok(Symbol {
        grid: a.grid,
        data: SymbolData::General {
            window: win,
            samples: out,
        },
        real_valued: a.real_valued && b.real_valued,
        class: SymbolClass {
            order: a.class.order + b.class.order,
            eta: a.class.eta.max(b.class.eta),
        },
    })
}

/// Poisson bracket {a, b} = sum_k d_xi_k a d_x_k b - d_x_k a d_xi_k b.
pub fn poisson_bracket(a: &Symbol, b: &Symbol) -> Result<Symbol> {
    let mut acc: Option<Symbol> = None;
    for k in 0..a.grid.d {
        let t1 = symbol_product(&symbol_dxi(a, k)?, &symbol_dx(b, k)?)?;
        let t2 = symbol_product(&symbol_dx(a, k)?, &symbol_dxi(b, k)?)?;
        let term = symbol_sub(&t1, &t2)?;
        acc = Some(match acc {
            None => term,
            Some(s) => symbol_add(&s, &term)?,
        });
    }
    acc.ok_or_else(|| Error::Symbol("empty bracket".into()))
}

pub fn symbol_add(a: &Symbol, b: &Symbol) -> Result<Symbol> {
    symbol_lincomb(a, b, Complex64::new(1.0, 0.0))
}

pub fn symbol_sub(a: &Symbol, b: &Symbol) -> Result<Symbol> {
    symbol_lincomb(a, b, Complex64::new(-1.0, 0.0))
}

fn symbol_lincomb(a: &Symbol, b: &Symbol, s: Complex64) -> Result<Symbol> {
    if a.grid != b.grid {
        return Err(Error::Grid("symbol sum: grid mismatch".into()));
    }
    let (wa, wb) = (a.window(), b.window());
    let mut win = wa;
    for k in 0..a.grid.d {
        win.lo[k] = wa.lo[k].max(wb.lo[k]);
        win.hi[k] = wa.hi[k].min(wb.hi[k]);
    }
    if win.is_empty() {
        return Err(Error::Symbol("symbol sum: disjoint windows".into()));
    }
    let m = a.grid.total_points();
    let wl = win.len();
    let mut out = Vec::with_capacity(m * wl);
    for i in 0..m {
        for w in 0..wl {
            let f = win.freq_of(w);
            let va = a.value(i, wa.index_of(f).unwrap());
            let vb = b.value(i, wb.index_of(f).unwrap());
            out.push(va + s * vb);
        }
    }
    Ok(Symbol {
        grid: a.grid,
        data: SymbolData::General {
            window: win,
            samples: out,
        },
        real_valued: a.real_valued && b.real_valued && s.im == 0.0,
        class: a.class,
    })
}

/// Grid maximum of |d^alpha_x d^beta_xi a|; orders up to 4 total.
pub fn seminorm_probe(a: &Symbol, alpha: [usize; 2], beta: [usize; 2]) -> Result<f64> {
    let total = alpha[0] + alpha[1] + beta[0] + beta[1];
    if total > 4 {
        return Err(Error::Symbol(format!(
            "derivative order {total} beyond the spectral-differentiation noise floor (max 4)"
        )));
    }
    let mut cur = a.clone();
    for axis in 0..2 {
        for _ in 0..alpha[axis] {
            cur = symbol_dx(&cur, axis)?;
        }
    }
    for axis in 0..2 {
        for _ in 0..beta[axis] {
            cur = symbol_dxi(&cur, axis)?;
        }
    }
    Ok(cur.sup_abs())
}

// ---------------------------------------------------------------------------
// oscillatory integrals
// ---------------------------------------------------------------------------

const OSC_CAP_1D: usize = 1 << 14;
const OSC_CAP_2D: usize = 1 << 9;

/// Quadrature of (L/N)^d sum a(x) e^{i phi(x)/h} over [0,L)^d with a mesh
/// resolving the phase at 4x its Nyquist rate. Rejects phases that cannot be
/// resolved under the mesh cap.
pub fn oscillatory_integral(
    d: usize,
    l: f64,
    a: &dyn Fn([f64; 2]) -> Complex64,
    phi: &dyn Fn([f64; 2]) -> f64,
    h: f64,
) -> Result<Complex64> {
    if h <= 0.0 {
        return Err(Error::UnderResolved("h must be positive".into()));
    }
    // probe max |grad phi| where the amplitude is alive
    let probe_n = if d == 1 { 512 } else { 48 };
    let eps = l * 1e-6;
    let mut amax = 0.0f64;
    let mut probe_pts = Vec::new();
    let steps: Vec<f64> = (0..probe_n).map(|i| i as f64 * l / probe_n as f64).collect();
    if d == 1 {
        for &x in &steps {
            probe_pts.push([x, 0.0]);
        }
    } else {
        for &x in &steps {
            for &y in &steps {
                probe_pts.push([x, y]);
            }
        }
    }
    for p in &probe_pts {
        amax = amax.max(a(*p).norm());
    }
    let mut grad_max = 0.0f64;
    for p in &probe_pts {
        if a(*p).norm() <= 1e-13 * amax {
            continue;
        }
        let mut g2 = 0.0;
        for k in 0..d {
            let mut pp = *p;
            let mut pm = *p;
            pp[k] += eps;
            pm[k] -= eps;
            let gk = (phi(pp) - phi(pm)) / (2.0 * eps);
            g2 += gk * gk;
        }
        grad_max = grad_max.max(g2.sqrt());
    }
    // 4x oversampling of the phase Nyquist rate
    let needed = (4.0 * (grad_max / h) * l / std::f64::consts::PI).ceil() as usize;
    let cap = if d == 1 { OSC_CAP_1D } else { OSC_CAP_2D };
    let mut n = 256usize;
    while n < needed && n < cap {
        n *= 2;
    }
    if needed > cap {
        return Err(Error::UnderResolved(format!(
            "|grad phi|/h = {:.3e} requires {} mesh points/axis, cap is {}",
            grad_max / h,
            needed,
            cap
        )));
    }
    let dx = l / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    if d == 1 {
        for i in 0..n {
            let x = [i as f64 * dx, 0.0];
            acc += a(x) * Complex64::from_polar(1.0, phi(x) / h);
        }
        Ok(acc * dx)
    } else {
        for i in 0..n {
            for j in 0..n {
                let x = [i as f64 * dx, j as f64 * dx];
                acc += a(x) * Complex64::from_polar(1.0, phi(x) / h);
            }
        }
        Ok(acc * dx * dx)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub points: Vec<(f64, f64)>,
    pub fit: LineFit,
}

/// Run the oscillatory integral over a dyadic h-ladder and fit the decay
/// exponent of log |I| against log h.
pub fn decay_fit(
    d: usize,
    l: f64,
    a: &dyn Fn([f64; 2]) -> Complex64,
    phi: &dyn Fn([f64; 2]) -> f64,
    h_ladder: &[f64],
) -> Result<DecayFit> {
    let mut hs = Vec::new();
    let mut vals = Vec::new();
    for &h in h_ladder {
        let v = oscillatory_integral(d, l, a, phi, h)?.norm();
        hs.push(h);
        vals.push(v);
    }
    let fit = log_log_fit(&hs, &vals, 1e-250);
    Ok(DecayFit {
        points: hs.into_iter().zip(vals).collect(),
        fit,
    })
}

// ---------------------------------------------------------------------------
// local Fourier integral operator (d = 1)
// ---------------------------------------------------------------------------

/// Direct double quadrature of the FIO kernel
/// (2 pi h)^{-1} iint e^{i(psi(x1,xi0) - x0 xi0)/h} alpha(x1,xi0) u(x0) dx0 dxi0
/// with the xi0 quadrature at 4x the Nyquist rate of the x-extent.
pub fn apply_fio(
    u: &WaveFunction,
    psi_gen: &dyn Fn(f64, f64) -> f64,
    alpha: &dyn Fn(f64, f64) -> Complex64,
    h: f64,
    xi_window: (f64, f64),
) -> Result<WaveFunction> {
    let grid = u.grid;
    if grid.d != 1 {
        return Err(Error::Grid("apply_fio supports d = 1 only".into()));
    }
    let (xlo, xhi) = xi_window;
    if !(xhi > xlo) {
        return Err(Error::Grid("empty xi window".into()));
    }
    // graph condition: det d2 psi / dx dxi bounded away from zero
    let probe = 33;
    let epsx = grid.l * 1e-5;
    let epsxi = (xhi - xlo) * 1e-5;
    for i in 0..probe {
        for j in 0..probe {
            let x = i as f64 * grid.l / probe as f64;
            let xi = xlo + (j as f64 + 0.5) * (xhi - xlo) / probe as f64;
            let dd = (psi_gen(x + epsx, xi + epsxi) - psi_gen(x + epsx, xi - epsxi)
                - psi_gen(x - epsx, xi + epsxi)
                + psi_gen(x - epsx, xi - epsxi))
                / (4.0 * epsx * epsxi);
            if dd.abs() < 1e-6 {
                return Err(Error::GraphCondition(format!(
                    "|det d2psi/dxdxi| = {:.3e} < 1e-6 at (x, xi) = ({x:.4}, {xi:.4})",
                    dd.abs()
                )));
            }
        }
    }
    let dxi = std::f64::consts::TAU * h / (4.0 * grid.l);
    let k = ((xhi - xlo) / dxi).ceil() as usize;
    let n = grid.n;
    let dx = grid.spacing();
    // inner h-Fourier transform of u at the xi nodes
    let mut uhat = vec![Complex64::new(0.0, 0.0); k];
    for (ki, uh) in uhat.iter_mut().enumerate() {
        let xi = xlo + (ki as f64 + 0.5) * dxi;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            let x0 = m as f64 * dx;
            acc += u.values[m] * Complex64::from_polar(1.0, -x0 * xi / h);
        }
        *uh = acc * dx;
    }
    let scale = dxi / (std::f64::consts::TAU * h);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, o) in out.iter_mut().enumerate() {
        let x1 = m as f64 * dx;
        let mut acc = Complex64::new(0.0, 0.0);
        for (ki, uh) in uhat.iter_mut().enumerate() {
            let xi = xlo + (ki as f64 + 0.5) * dxi;
            acc += alpha(x1, xi) * Complex64::from_polar(1.0, psi_gen(x1, xi) / h) * *uh;
        }
        *o = acc * scale;
    }
    WaveFunction::new(grid, out)
}

/// Smooth plateau profile: 1 on [0,1], supported in [0,2].
pub fn plateau(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
        let up = f(2.0 - r);
        up / (up + f(r - 1.0))
    }
}

/// Derivative of `plateau` (analytic, used by oracles and flow fields).
pub fn plateau_deriv(r: f64) -> f64 {
    if !(1.0..2.0).contains(&r) {
        return 0.0;
    }
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let fp = |t: f64| {
        if t > 0.0 {
            (-1.0 / t).exp() / (t * t)
        } else {
            0.0
        }
    };
    let (u, v) = (f(2.0 - r), f(r - 1.0));
    let (du, dv) = (-fp(2.0 - r), fp(r - 1.0));
    (du * (u + v) - u * (du + dv)) / ((u + v) * (u + v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasegrid::GridSpec;

    fn g1(n: usize, h: f64) -> GridSpec {
        GridSpec::new_2pi(1, n, h).unwrap()
    }

    #[test]
    fn quantize_constant_is_identity() {
        let g = g1(64, 1.0);
        let a = Symbol::constant(g, Complex64::new(1.0, 0.0));
        let op = quantize(&a).unwrap();
        let id = PseudoOp::identity(g);
        let diff = (&op.matrix - &id.matrix).norm_max();
        assert!(diff < 1e-12, "identity defect {diff}");
        assert!(op.hermitian);
    }

    #[test]
    fn quantize_xi1_is_momentum_multiplier() {
        let g = g1(64, 0.5);
        let a = Symbol::of_frequency(g, FreqWindow::full(&g), SymbolClass::smooth(), |xi| {
            Complex64::new(xi[0], 0.0)
        })
        .unwrap();
        let op = quantize(&a).unwrap();
        for &n in &[0i64, 3, -5, 17] {
            let pw = WaveFunction::plane_wave(g, [n, 0]);
            let out = op.apply(&pw).unwrap();
            let want = g.h * g.sigma() * n as f64;
            let got = out.inner(&pw) / pw.inner(&pw);
            assert!(
                (got - Complex64::new(want, 0.0)).norm() < 1e-10,
                "eigenvalue mismatch n={n}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn quantize_position_symbol_multiplies() {
        let g = g1(64, 1.0);
        let a = Symbol::of_position(g, SymbolClass::smooth(), |x| {
            Complex64::new(x[0].cos() + 0.3 * (2.0 * x[0]).sin(), 0.0)
        })
        .unwrap();
        let op = quantize(&a).unwrap();
        assert!(op.hermitian);
        let psi = WaveFunction::from_fn(g, |x| Complex64::new((1.5 * x[0]).sin(), x[0].cos()));
        let out = op.apply(&psi).unwrap();
        for i in 0..g.total_points() {
            let x = g.point(i);
            let want = psi.values[i] * (x[0].cos() + 0.3 * (2.0 * x[0]).sin());
            assert!((out.values[i] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn real_symbol_gives_hermitian_operator() {
        let g = g1(32, 1.0);
        let win = FreqWindow::ball(&g, 8.0);
        let a = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
            (x[0].sin() + 1.0) * (-xi[0] * xi[0]).exp()
        })
        .unwrap();
        let op = quantize(&a).unwrap();
        assert!(op.hermitian);
        assert!(op.hermitian_defect() <= 1e-12);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g = g1(32, 1.0);
        let g2 = g1(64, 1.0);
        let a = Symbol::constant(g, Complex64::new(1.0, 0.0));
        let op = quantize(&a).unwrap();
        let psi = WaveFunction::plane_wave(g2, [1, 0]);
        assert!(op.apply(&psi).is_err());
    }

    #[test]
    fn window_escape_rejected() {
        let g = g1(32, 1.0);
        let win = FreqWindow {
            lo: [-40, 0],
            hi: [40, 0],
            d: 1,
        };
        let a = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |_, _| 1.0);
        // the sample constructor itself works; quantize must reject the window
        assert!(matches!(quantize(&a.unwrap()), Err(Error::Aliasing(_))));
    }

    #[test]
    fn seminorm_constant_and_sine() {
        let g = g1(64, 0.5);
        let one = Symbol::constant(g, Complex64::new(1.0, 0.0));
        assert!(seminorm_probe(&one, [1, 0], [0, 0]).unwrap() < 1e-8);
        assert!(seminorm_probe(&one, [2, 0], [0, 0]).unwrap() < 1e-8);
        let s = Symbol::of_position(g, SymbolClass::smooth(), |x| {
            Complex64::new(x[0].sin(), 0.0)
        })
        .unwrap();
        let v = seminorm_probe(&s, [1, 0], [0, 0]).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn seminorm_order_cap() {
        let g = g1(32, 1.0);
        let one = Symbol::constant(g, Complex64::new(1.0, 0.0));
        assert!(seminorm_probe(&one, [3, 0], [2, 0]).is_err());
    }

    #[test]
    fn seminorm_mesoscopic_scaling() {
        // bump at scale h^beta: |d^k a| ~ h^{-beta k}; dyadic ratio ~ 2^{beta k}
        let beta = 0.25;
        let hs = [0.8, 0.4, 0.2, 0.1];
        for (order, alpha) in [(1usize, [1usize, 0]), (2, [2, 0])] {
            let mut vals = Vec::new();
            for &h in &hs {
                let g = g1(256, h);
                let win = FreqWindow::ball(&g, 4.0);
                let scale = h.powf(beta);
                let a = Symbol::from_fn_real(g, win, SymbolClass::mesoscopic(beta), |x, xi| {
                    let dx = g.circ_diff(x[0], std::f64::consts::PI);
                    let dxi = xi[0] - 1.0;
                    plateau((dx * dx + dxi * dxi).sqrt() / scale)
                })
                .unwrap();
                vals.push(seminorm_probe(&a, alpha, [0, 0]).unwrap());
                // finite-difference oracle on the analytic bump at one h
                if h == 0.4 && order == 1 {
                    let eps = 1e-6;
                    let f = |x: f64| {
                        let dx = g.circ_diff(x, std::f64::consts::PI);
                        plateau((dx * dx).sqrt() / scale)
                    };
                    let mut oracle = 0.0f64;
                    for i in 0..2000 {
                        let x = i as f64 * g.l / 2000.0;
                        oracle = oracle.max(((f(x + eps) - f(x - eps)) / (2.0 * eps)).abs());
                    }
                    // seminorm (at xi = 1 slice through the bump center) matches
                    let v = vals.last().unwrap();
                    assert!(
                        (v - oracle).abs() / oracle < 0.05,
                        "probe {v} vs oracle {oracle}"
                    );
                }
            }
            let fit = log_log_fit(&hs, &vals, 1e-300);
            let want = -beta * order as f64;
            assert!(
                (fit.slope - want).abs() < 0.15,
                "order {order}: slope {} want {want}",
                fit.slope
            );
        }
    }

    #[test]
    fn oscillatory_zero_amplitude() {
        let v = oscillatory_integral(
            1,
            std::f64::consts::TAU,
            &|_| Complex64::new(0.0, 0.0),
            &|x| x[0],
            0.1,
        )
        .unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn nonstationary_phase_decays_fast() {
        let l = std::f64::consts::TAU;
        let a = |x: [f64; 2]| Complex64::new(plateau((x[0] - 3.0).abs() / 0.9), 0.0);
        let phi = |x: [f64; 2]| x[0];
        let ladder: Vec<f64> = (4..10).map(|k| 2f64.powi(-k)).collect();
        let fit = decay_fit(1, l, &a, &phi, &ladder).unwrap();
        assert!(
            fit.fit.slope >= 6.0,
            "non-stationary decay exponent {} < 6",
            fit.fit.slope
        );
    }

    #[test]
    fn stationary_phase_control_case() {
        let l = std::f64::consts::TAU;
        let a = |x: [f64; 2]| Complex64::new(plateau((x[0] - 3.0).abs() / 0.9), 0.0);
        // interior non-degenerate critical point at x = 3
        let phi = |x: [f64; 2]| 0.5 * (x[0] - 3.0) * (x[0] - 3.0);
        let ladder: Vec<f64> = (4..10).map(|k| 2f64.powi(-k)).collect();
        let fit = decay_fit(1, l, &a, &phi, &ladder).unwrap();
        assert!(
            (fit.fit.slope - 0.5).abs() < 0.1,
            "stationary exponent {} should be ~ d/2 = 0.5",
            fit.fit.slope
        );
    }

    #[test]
    fn under_resolved_phase_rejected() {
        let r = oscillatory_integral(
            1,
            std::f64::consts::TAU,
            &|_| Complex64::new(1.0, 0.0),
            &|x| 1e6 * x[0],
            1e-6,
        );
        assert!(matches!(r, Err(Error::UnderResolved(_))));
    }

    #[test]
    fn fio_identity_recovers_microlocalized_state() {
        let h = 0.05;
        let g = g1(512, h);
        // state with h-frequencies inside the window: e^{i xi0 x / h} * bump
        let xi0 = 1.0;
        let u = WaveFunction::from_fn(g, |x| {
            Complex64::from_polar(plateau((x[0] - 3.0).abs() / 0.8), xi0 * x[0] / h)
        });
        let id_psi = |x: f64, xi: f64| x * xi;
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        let out = apply_fio(&u, &id_psi, &one, h, (0.2, 1.8)).unwrap();
        let mut err = 0.0f64;
        for i in 0..g.total_points() {
            let x = g.point(i)[0];
            if (x - 3.0).abs() < 0.6 {
                err = err.max((out.values[i] - u.values[i]).norm());
            }
        }
        assert!(err < 10.0 * h, "identity FIO error {err} not O(h)");
    }

    #[test]
    fn fio_shear_on_plane_wave_matches_closed_form() {
        let h = 0.05;
        let t = 0.7;
        let g = g1(512, h);
        let xi0 = 1.0;
        let u = WaveFunction::from_fn(g, |x| {
            Complex64::from_polar(plateau((x[0] - 3.0).abs() / 0.8), xi0 * x[0] / h)
        });
        // psi = x xi + t xi^2/2 generates kappa(y, xi) = (y - t xi, xi): the
        // Lagrangian {xi = xi0} keeps its covector, the amplitude is pulled
        // back through y*(x) = x + t xi0, and the phase gains the critical
        // value t xi0^2 / 2 (Lemma-type transport oracle).
        let shear = |x: f64, xi: f64| x * xi + 0.5 * t * xi * xi;
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        let out = apply_fio(&u, &shear, &one, h, (0.2, 1.8)).unwrap();
        let oracle = WaveFunction::from_fn(g, |x| {
            Complex64::from_polar(
                plateau((x[0] - 3.0 + t * xi0).abs() / 0.8),
                (xi0 * x[0] + 0.5 * t * xi0 * xi0) / h,
            )
        });
        let mut err = 0.0f64;
        for i in 0..g.total_points() {
            let x = g.point(i)[0];
            if (x - 3.0 + t * xi0).abs() < 0.5 {
                err = err.max((out.values[i] - oracle.values[i]).norm());
            }
        }
        assert!(err < 10.0 * h, "shear FIO error {err} not O(h)");
    }

    #[test]
    fn fio_graph_condition_rejected() {
        let h = 0.05;
        let g = g1(512, h);
        let u = WaveFunction::plane_wave(g, [4, 0]);
        // psi independent of xi: d2 psi/dx dxi = 0 everywhere
        let bad = |x: f64, _xi: f64| x;
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        assert!(matches!(
            apply_fio(&u, &bad, &one, h, (0.2, 1.8)),
            Err(Error::GraphCondition(_))
        ));
    }

    #[test]
    fn fio_inverse_composition() {
        let h = 0.05;
        let t = 0.5;
        let g = g1(512, h);
        let xi0 = 1.0;
        let u = WaveFunction::from_fn(g, |x| {
            Complex64::from_polar(plateau((x[0] - 3.0).abs() / 0.7), xi0 * x[0] / h)
        });
        let shear = |x: f64, xi: f64| x * xi + 0.5 * t * xi * xi;
        let unshear = |x: f64, xi: f64| x * xi - 0.5 * t * xi * xi;
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        let mid = apply_fio(&u, &shear, &one, h, (0.2, 1.8)).unwrap();
        let back = apply_fio(&mid, &unshear, &one, h, (0.2, 1.8)).unwrap();
        let mut err = 0.0f64;
        for i in 0..g.total_points() {
            let x = g.point(i)[0];
            if (x - 3.0).abs() < 0.5 {
                err = err.max((back.values[i] - u.values[i]).norm());
            }
        }
        assert!(err < 10.0 * h, "inverse composition error {err} not O(h)");
    }

    #[test]
    fn composition_law_is_order_h() {
        // || Op(a)Op(b) - Op(ab) || = O(h), exponent fit >= 0.8
        let hs = [0.8, 0.4, 0.2, 0.1];
        let mut norms = Vec::new();
        for &h in &hs {
            let g = g1(256, h);
            let win = FreqWindow::ball(&g, 6.0);
            let a = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                x[0].sin() * (-0.5 * xi[0] * xi[0]).exp()
            })
            .unwrap();
            let b = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                (x[0].cos() + 2.0) * (-0.3 * (xi[0] - 0.5) * (xi[0] - 0.5)).exp()
            })
            .unwrap();
            let oa = quantize(&a).unwrap();
            let ob = quantize(&b).unwrap();
            let oab = quantize(&symbol_product(&a, &b).unwrap()).unwrap();
            let diff = oa.compose(&ob).unwrap().sub(&oab).unwrap();
            norms.push(diff.op_norm());
        }
        let fit = log_log_fit(&hs, &norms, 1e-300);
        assert!(fit.slope >= 0.8, "composition exponent {} < 0.8", fit.slope);
    }

    #[test]
    fn commutator_matches_poisson_bracket_at_order_h() {
        let hs = [0.8, 0.4, 0.2, 0.1];
        let mut norms = Vec::new();
        for &h in &hs {
            let g = g1(256, h);
            let win = FreqWindow::ball(&g, 6.0);
            let a = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                x[0].sin() * (-0.5 * xi[0] * xi[0]).exp()
            })
            .unwrap();
            let b = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                (2.0 * x[0]).cos() * (-0.3 * (xi[0] - 0.5) * (xi[0] - 0.5)).exp()
            })
            .unwrap();
            let oa = quantize(&a).unwrap();
            let ob = quantize(&b).unwrap();
            let comm = oa
                .compose(&ob)
                .unwrap()
                .sub(&ob.compose(&oa).unwrap())
                .unwrap()
                .scaled(Complex64::new(0.0, 1.0 / h));
            let pb = quantize(&poisson_bracket(&a, &b).unwrap()).unwrap();
            let diff = comm.sub(&pb).unwrap();
            norms.push(diff.op_norm());
        }
        let fit = log_log_fit(&hs, &norms, 1e-300);
        assert!(fit.slope >= 0.8, "commutator exponent {} < 0.8", fit.slope);
    }

    #[test]
    fn disjoint_supports_compose_to_nearly_zero() {
        // separation >= 8 grid cells in position
        for &h in &[0.8, 0.4, 0.2] {
            let g = g1(128, h);
            let win = FreqWindow::ball(&g, 6.0);
            let a = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                plateau((g.circ_diff(x[0], 1.2)).abs() / 0.35) * plateau((xi[0] - 1.0).abs() / 0.5)
            })
            .unwrap();
            let b = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                plateau((g.circ_diff(x[0], 4.5)).abs() / 0.35) * plateau((xi[0] - 1.0).abs() / 0.5)
            })
            .unwrap();
            let prod = quantize(&a).unwrap().compose(&quantize(&b).unwrap()).unwrap();
            let norm = prod.op_norm();
            assert!(
                norm <= h * h * h,
                "microsupport violation at h={h}: |AB| = {norm:.3e} > h^3 = {:.3e}",
                h * h * h
            );
        }
    }
}
