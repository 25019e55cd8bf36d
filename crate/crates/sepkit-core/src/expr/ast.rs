//! Expression tree, evaluation and exact symbolic differentiation.

use std::fmt;

use num_complex::Complex64;

use super::EvalError;

/// Built-in entire (or principal-branch) functions of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Builtin {
    Cosh,
    Sinh,
    Cos,
    Sin,
    Exp,
    Log,
    Tan,
    Tanh,
}

impl Builtin {
    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "cosh" => Builtin::Cosh,
            "sinh" => Builtin::Sinh,
            "cos" => Builtin::Cos,
            "sin" => Builtin::Sin,
            "exp" => Builtin::Exp,
            "log" => Builtin::Log,
            "tan" => Builtin::Tan,
            "tanh" => Builtin::Tanh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Builtin::Cosh => "cosh",
            Builtin::Sinh => "sinh",
            Builtin::Cos => "cos",
            Builtin::Sin => "sin",
            Builtin::Exp => "exp",
            Builtin::Log => "log",
            Builtin::Tan => "tan",
            Builtin::Tanh => "tanh",
        }
    }

    fn apply(self, w: Complex64) -> Result<Complex64, EvalError> {
        if self == Builtin::Log && w == Complex64::ZERO {
            return Err(EvalError::Domain("log evaluated at zero"));
        }
        Ok(match self {
            Builtin::Cosh => w.cosh(),
            Builtin::Sinh => w.sinh(),
            Builtin::Cos => w.cos(),
            Builtin::Sin => w.sin(),
            Builtin::Exp => w.exp(),
            Builtin::Log => w.ln(),
            Builtin::Tan => w.tan(),
            Builtin::Tanh => w.tanh(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr {
    Num(f64),
    Z,
    ImaginaryUnit,
    Pi,
    EulerE,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Builtin, Box<Expr>),
}

impl Expr {
    /// Evaluates at `z` under principal-branch complex arithmetic.
    ///
    /// Every node result is checked for finiteness, so an intermediate
    /// overflow surfaces as an error instead of propagating inf/NaN.
    pub(crate) fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        let v = match self {
            Expr::Num(x) => Complex64::new(*x, 0.0),
            Expr::Z => z,
            Expr::ImaginaryUnit => Complex64::I,
            Expr::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            Expr::EulerE => Complex64::new(std::f64::consts::E, 0.0),
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => a.eval(z)? / b.eval(z)?,
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Pow(a, n) => a.eval(z)?.powu(*n),
            Expr::Call(g, a) => g.apply(a.eval(z)?)?,
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Overflow)
        }
    }

    /// Exact derivative tree. No simplification beyond dropping literal
    /// zero and one factors produced by the rules themselves.
    pub(crate) fn derivative(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::ImaginaryUnit | Expr::Pi | Expr::EulerE => Expr::Num(0.0),
            Expr::Z => Expr::Num(1.0),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                )),
                Box::new(Expr::Pow(Box::new((**b).clone()), 2)),
            ),
            Expr::Neg(a) => neg(a.derivative()),
            Expr::Pow(_, 0) => Expr::Num(0.0),
            Expr::Pow(a, 1) => a.derivative(),
            Expr::Pow(a, n) => mul(
                mul(Expr::Num(*n as f64), Expr::Pow(Box::new((**a).clone()), n - 1)),
                a.derivative(),
            ),
            Expr::Call(g, a) => {
                let inner = (**a).clone();
                let outer = match g {
                    Builtin::Cosh => Expr::Call(Builtin::Sinh, Box::new(inner)),
                    Builtin::Sinh => Expr::Call(Builtin::Cosh, Box::new(inner)),
                    Builtin::Cos => neg(Expr::Call(Builtin::Sin, Box::new(inner))),
                    Builtin::Sin => Expr::Call(Builtin::Cos, Box::new(inner)),
                    Builtin::Exp => Expr::Call(Builtin::Exp, Box::new(inner)),
                    Builtin::Log => Expr::Div(Box::new(Expr::Num(1.0)), Box::new(inner)),
                    // tan' = 1 + tan^2, tanh' = 1 - tanh^2; stays inside the grammar.
                    Builtin::Tan => add(
                        Expr::Num(1.0),
                        Expr::Pow(Box::new(Expr::Call(Builtin::Tan, Box::new(inner))), 2),
                    ),
                    Builtin::Tanh => sub(
                        Expr::Num(1.0),
                        Expr::Pow(Box::new(Expr::Call(Builtin::Tanh, Box::new(inner))), 2),
                    ),
                };
                mul(outer, a.derivative())
            }
        }
    }

    pub(crate) fn contains_log(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Z | Expr::ImaginaryUnit | Expr::Pi | Expr::EulerE => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_log() || b.contains_log()
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.contains_log(),
            Expr::Call(g, a) => *g == Builtin::Log || a.contains_log(),
        }
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Num(x) if *x == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Num(x) if *x == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::Add(Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        neg(b)
    } else {
        Expr::Sub(Box::new(a), Box::new(b))
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Num(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::Mul(Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    if is_zero(&a) {
        a
    } else {
        Expr::Neg(Box::new(a))
    }
}

/// Fully parenthesized form that re-parses to a tree with identical
/// evaluations. Numbers print in shortest round-trip notation.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => {
                if *x < 0.0 {
                    // The grammar has no negative literals; parses back as Neg.
                    write!(f, "(-{:?})", -x)
                } else {
                    write!(f, "{x:?}")
                }
            }
            Expr::Z => write!(f, "z"),
            Expr::ImaginaryUnit => write!(f, "i"),
            Expr::Pi => write!(f, "pi"),
            Expr::EulerE => write!(f, "e"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, n) => match **a {
                Expr::Num(_) | Expr::Z | Expr::ImaginaryUnit | Expr::Pi | Expr::EulerE
                | Expr::Call(..) => write!(f, "{a}^{n}"),
                _ => write!(f, "({a})^{n}"),
            },
            Expr::Call(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}
