//! Printing. Output re-parses to the same tree: `parse(e.to_string()) == e`
//! for every tree the parser or the folding constructors can produce.

use std::fmt::{self, Write};

use super::Expr;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Const(c) if c.is_negative() => UNARY,
        Expr::Const(c) if !c.is_integer() => POWER,
        Expr::Pow(..) => POWER,
        Expr::Const(_) | Expr::Var(_) => ATOM,
    }
}

fn write_at(e: &Expr, min: u8, out: &mut String) {
    if level(e) < min {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => {
            let _ = write!(out, "{c}");
        }
        Expr::Var(v) => out.push_str(v.name()),
        Expr::Add(a, b) => {
            write_at(a, SUM, out);
            out.push_str(" + ");
            write_at(b, PRODUCT, out);
        }
        Expr::Sub(a, b) => {
            write_at(a, SUM, out);
            out.push_str(" - ");
            write_at(b, PRODUCT, out);
        }
        Expr::Mul(a, b) => {
            write_at(a, PRODUCT, out);
            out.push('*');
            write_at(b, UNARY, out);
        }
        Expr::Div(a, b) => {
            write_at(a, PRODUCT, out);
            out.push('/');
            // `p/q` directly after a slash would lex as a single literal.
            let mut rhs = String::new();
            write_at(b, UNARY, &mut rhs);
            if rhs.starts_with(|c: char| c.is_ascii_digit()) && !rhs.starts_with('(') {
                out.push('(');
                write_expr(b, out);
                out.push(')');
            } else {
                out.push_str(&rhs);
            }
        }
        Expr::Neg(a) => {
            out.push('-');
            if matches!(**a, Expr::Const(_)) {
                // `-3` would re-parse as the constant -3
                out.push('(');
                write_expr(a, out);
                out.push(')');
            } else {
                write_at(a, UNARY, out);
            }
        }
        Expr::Pow(a, n) => {
            write_at(a, ATOM, out);
            let _ = write!(out, "^{n}");
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(self, &mut s);
        f.write_str(&s)
    }
}
