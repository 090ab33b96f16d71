//! Browser bindings for three `ctp` operations. Each returns the same text
//! the command line prints, or the error message prefixed with `error:`.

use wasm_bindgen::prelude::*;

fn run(args: &[&str]) -> String {
    let argv = std::iter::once("ctp").chain(args.iter().copied());
    let (code, out, err) = ctp_core::cli::main_with_args(argv);
    if code == 0 {
        out
    } else {
        err
    }
}

/// Solves N(ξ) = b in Q(∛a) and returns the descent table and ξ.
#[wasm_bindgen]
pub fn solve_norm(a: &str, b: &str) -> String {
    run(&["solve-norm", a.trim(), b.trim()])
}

/// The cubic Hilbert symbol (x, y)_p; `zeta` may be empty.
#[wasm_bindgen]
pub fn hilbert_symbol(p: &str, x: &str, y: &str, zeta: &str) -> String {
    let zeta = zeta.trim();
    if zeta.is_empty() {
        run(&["symbol", p.trim(), x.trim(), y.trim()])
    } else {
        run(&["symbol", p.trim(), x.trim(), y.trim(), "--zeta", zeta])
    }
}

/// Reduces the binary cubic a·X³ + b·X²Y + c·XY² + d·Y³ and reports a small value.
#[wasm_bindgen]
pub fn reduce_form(a: &str, b: &str, c: &str, d: &str) -> String {
    run(&["reduce-form", "--", a.trim(), b.trim(), c.trim(), d.trim()])
}
