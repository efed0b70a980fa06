//! Scalar expression language: parsing, printing and evaluation with exact derivative jets.

mod ast;
mod eval;
mod lexer;
mod parser;
mod scalar;
mod taylor;

pub use ast::{Expr, Func, Node};
pub use eval::{eval_jet2, Jet2};
pub(crate) use eval::log_derivative;
pub use parser::parse;
pub use scalar::{Dual, Scalar};
pub use taylor::{MonomialBasis, Taylor};


use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded random polynomial of total degree ≤ `degree` with `terms` monomials and
/// coefficients in [-1, 1].
pub fn random_polynomial(coords: &[String], degree: usize, terms: usize, seed: u64) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut src = String::new();
    for t in 0..terms {
        let c: f64 = rng.gen_range(-1.0..1.0);
        if t > 0 {
            src.push_str(" + ");
        }
        src.push_str(&format!("({c:?})"));
        let d = rng.gen_range(0..=degree);
        for _ in 0..d {
            if coords.is_empty() {
                break;
            }
            let v = rng.gen_range(0..coords.len());
            src.push('*');
            src.push_str(&coords[v]);
        }
    }
    parse(&src, coords).expect("generated polynomial parses")
}
