//! CPLEX LP text format, for cross-checking with external solvers.

use super::simplex::{LinearProgram, Sense};
use crate::rational;
use num_traits::Signed;
use std::fmt::Write as _;

fn term(out: &mut String, first: &mut bool, coeff: &rational::Rational, name: &str) {
    let mag = rational::to_f64(&coeff.abs());
    let sign = if coeff.is_negative() { "-" } else if *first { "" } else { "+" };
    if sign.is_empty() {
        let _ = write!(out, " {mag:?} {name}");
    } else {
        let _ = write!(out, " {sign} {mag:?} {name}");
    }
    *first = false;
}

pub fn to_lp_format(lp: &LinearProgram) -> String {
    let mut out = String::from("\\ Ck-FL relaxation\nMinimize\n obj:");
    let mut first = true;
    for (c, cost) in lp.objective.iter().enumerate() {
        if *cost != rational::zero() {
            term(&mut out, &mut first, cost, &lp.var_names[c]);
        }
    }
    if first {
        out.push_str(" 0 ");
        out.push_str(&lp.var_names[0]);
    }
    out.push_str("\nSubject To\n");
    for row in &lp.rows {
        let _ = write!(out, " {}:", row.name);
        let mut first = true;
        for (c, v) in &row.coeffs {
            term(&mut out, &mut first, v, &lp.var_names[*c]);
        }
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {:?}", rational::to_f64(&row.rhs));
    }
    out.push_str("End\n");
    out
}
