use num_complex::Complex64;
use semitorus::pdo::{plateau, quantize, FreqWindow, Symbol, SymbolClass};
use semitorus::phasegrid::GridSpec;

fn main() {
    for (xs, xis) in [(0.35, 0.5), (0.6, 0.8), (0.9, 1.2)] {
        for &h in &[0.8, 0.4, 0.2, 0.1] {
            let g = GridSpec::new_2pi(1, 256, h).unwrap();
            let win = FreqWindow::ball(&g, 8.0);
            let c1 = 1.2f64;
            let c2 = 1.2 + std::f64::consts::PI;
            let a = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                plateau((g.circ_diff(x[0], c1)).abs() / xs) * plateau((xi[0] - 1.0).abs() / xis)
            }).unwrap();
            let b = Symbol::from_fn_real(g, win, SymbolClass::smooth(), |x, xi| {
                plateau((g.circ_diff(x[0], c2)).abs() / xs) * plateau((xi[0] - 1.0).abs() / xis)
            }).unwrap();
            let prod = quantize(&a).unwrap().compose(&quantize(&b).unwrap()).unwrap();
            let n = prod.op_norm();
            println!("xs={xs} xis={xis} h={h}: |AB| = {:.3e} vs h^3 = {:.3e}  {}", n, h*h*h, if n <= h*h*h {"OK"} else {"FAIL"});
        }
    }
}
