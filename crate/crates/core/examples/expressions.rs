//! The expression language used for kernels and forcings.

use nonlocal_fixpoint::expr::Variables;
use nonlocal_fixpoint::{parse_expr, Expr, Result};

fn main() -> Result<()> {
    for src in ["1 + 2*3^2", "-2^2", "exp(-x^2)*cos(3*x)", "abs(x) / (1 + x^2)", "pi"] {
        let e = parse_expr(src)?;
        println!("{src:<28} at x = 0.5 -> {}", e.eval(&[0.5, 0.0, 0.0])?);
    }
    let vars = Variables::new([("n", 0), ("p", 1)]);
    let e = Expr::parse_with("(n^2 + p^2 - 1)*exp(-(n^2 + p^2))", &vars)?;
    println!(
        "layer spectral kernel at (n, p) = (1, 0.5): {:.6}",
        e.eval(&[1.0, 0.5])?
    );
    for bad in ["cos(2*x", "2 +* x", "foo(x)"] {
        match parse_expr(bad) {
            Ok(_) => println!("{bad}: parsed"),
            Err(e) => println!("{bad}: {e}"),
        }
    }
    Ok(())
}
