//! Holomorphic function expressions: parsing, evaluation, exact symbolic
//! derivatives, and the Cauchy-Riemann structure check.

mod ast;
mod parser;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use ast::Expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("exponent at position {position} must be a nonnegative integer literal")]
    NonIntegerExponent { position: usize },
}

impl ParseError {
    /// Byte offset of the offending token.
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownIdentifier { position, .. }
            | ParseError::NonIntegerExponent { position } => *position,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("overflow: evaluation produced a non-finite value")]
    Overflow,
}

/// A parsed holomorphic function of one complex variable.
///
/// Immutable after construction; evaluation is deterministic (same input,
/// bit-identical output) and safe to call from many threads.
#[derive(Debug, Clone)]
pub struct HolomorphicFunction {
    source: String,
    ast: Expr,
    has_branch_cut: bool,
}

impl HolomorphicFunction {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let ast = parser::parse_expr(src)?;
        let has_branch_cut = ast.contains_log();
        Ok(Self {
            source: src.to_string(),
            ast,
            has_branch_cut,
        })
    }

    /// The text this function was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when the expression contains `log`: the function is then not
    /// entire and scans near the principal branch cut deserve a warning.
    pub fn has_branch_cut(&self) -> bool {
        self.has_branch_cut
    }

    /// f(z) under principal-branch complex arithmetic.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.ast.eval(z)
    }

    /// Exact symbolic derivative of the given order (1 or 2).
    ///
    /// Trees are produced by rule-based transforms and may be unreduced;
    /// `derivative(2)` equals `derivative(1).derivative(1)` pointwise.
    pub fn derivative(&self, order: u32) -> HolomorphicFunction {
        assert!(order == 1 || order == 2, "derivative order must be 1 or 2");
        let mut ast = self.ast.derivative();
        if order == 2 {
            ast = ast.derivative();
        }
        let has_branch_cut = ast.contains_log();
        HolomorphicFunction {
            source: ast.to_string(),
            ast,
            has_branch_cut,
        }
    }

    /// Acceleration z̈ = f'(z)·f(z) of the solution of ż = f(z) through `z`.
    pub fn flow_acceleration(&self, z: Complex64) -> Result<Complex64, EvalError> {
        let fp = self.derivative(1);
        Ok(fp.eval(z)? * self.eval(z)?)
    }

    /// Central-difference residuals (|u_x - v_y|, |u_y + v_x|) of the
    /// Cauchy-Riemann equations at `z` with step `h`.
    pub fn cauchy_riemann_residual(
        &self,
        z: Complex64,
        h: f64,
    ) -> Result<(f64, f64), EvalError> {
        assert!(h > 0.0, "finite-difference step must be positive");
        let fxp = self.eval(z + Complex64::new(h, 0.0))?;
        let fxm = self.eval(z - Complex64::new(h, 0.0))?;
        let fyp = self.eval(z + Complex64::new(0.0, h))?;
        let fym = self.eval(z - Complex64::new(0.0, h))?;
        let u_x = (fxp.re - fxm.re) / (2.0 * h);
        let v_x = (fxp.im - fxm.im) / (2.0 * h);
        let u_y = (fyp.re - fym.re) / (2.0 * h);
        let v_y = (fyp.im - fym.im) / (2.0 * h);
        Ok(((u_x - v_y).abs(), (u_y + v_x).abs()))
    }
}

impl FromStr for HolomorphicFunction {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Prints a fully parenthesized form that re-parses to a tree with
/// identical evaluations.
impl fmt::Display for HolomorphicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;

    fn func(src: &str) -> HolomorphicFunction {
        HolomorphicFunction::parse(src).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Taylor-series cosh, independent of the evaluator: sum w^{2k}/(2k)!.
    fn cosh_series(w: Complex64) -> Complex64 {
        let mut sum = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..40 {
            term = term * w * w / ((2 * k - 1) as f64 * (2 * k) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn parse_and_eval_cosh_fixture() {
        let f = func("cosh(z-0.5)");
        assert_eq!(f.eval(c(0.5, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn parse_identity() {
        let f = func("z");
        assert_eq!(f.eval(c(2.0, 3.0)).unwrap(), c(2.0, 3.0));
    }

    #[test]
    fn unbalanced_paren_position() {
        let err = HolomorphicFunction::parse("cosh(z-").unwrap_err();
        assert_eq!(err.position(), 7);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let err = HolomorphicFunction::parse("2z").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { position: 1, .. }));
    }

    #[test]
    fn unknown_identifier() {
        let err = HolomorphicFunction::parse("sec(z)").unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdentifier { .. }));
    }

    #[test]
    fn exponent_must_be_integer_literal() {
        assert!(matches!(
            HolomorphicFunction::parse("z^2.5").unwrap_err(),
            ParseError::NonIntegerExponent { .. }
        ));
        assert!(matches!(
            HolomorphicFunction::parse("z^-1").unwrap_err(),
            ParseError::NonIntegerExponent { .. }
        ));
        assert!(HolomorphicFunction::parse("z^0").is_ok());
    }

    #[test]
    fn eval_cosh_at_center_is_zero() {
        // cosh(i y) = cos(y) vanishes at y = pi/2; checked against the
        // series evaluation.
        let f = func("cosh(z-0.5)");
        let z = c(0.5, FRAC_PI_2);
        let v = f.eval(z).unwrap();
        assert!(v.norm() < 1e-12, "got {v}");
        let oracle = cosh_series(z - c(0.5, 0.0));
        assert!((v - oracle).norm() < 1e-12);
    }

    #[test]
    fn eval_square() {
        let f = func("z^2");
        assert_eq!(f.eval(c(1.0, 1.0)).unwrap(), c(0.0, 2.0));
    }

    #[test]
    fn eval_constants() {
        assert!((func("pi").eval(c(0.0, 0.0)).unwrap().re - PI).abs() < 1e-15);
        assert!((func("e").eval(c(0.0, 0.0)).unwrap().re - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(func("i*i").eval(c(0.0, 0.0)).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn log_at_zero_is_domain_error() {
        let f = func("log(z)");
        assert_eq!(
            f.eval(c(0.0, 0.0)).unwrap_err(),
            EvalError::Domain("log evaluated at zero")
        );
    }

    #[test]
    fn overflow_signals() {
        let f = func("exp(z)");
        assert_eq!(f.eval(c(1e4, 0.0)).unwrap_err(), EvalError::Overflow);
        let g = func("1/z");
        assert_eq!(g.eval(c(0.0, 0.0)).unwrap_err(), EvalError::Overflow);
    }

    #[test]
    fn branch_cut_flag() {
        assert!(func("log(z+1)").has_branch_cut());
        assert!(!func("cosh(z-0.5)").has_branch_cut());
        // The log rule introduces no log into the derivative tree.
        assert!(!func("log(z)").derivative(1).has_branch_cut());
    }

    #[test]
    fn derivative_of_fixture_vanishes_at_half() {
        let fp = func("cosh(z-0.5)").derivative(1);
        assert_eq!(fp.eval(c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn derivative_of_square() {
        let fp = func("z^2").derivative(1);
        assert_eq!(fp.eval(c(1.0, 1.0)).unwrap(), c(2.0, 2.0));
    }

    #[test]
    fn derivative_at_center_is_imaginary_unit() {
        // sinh(i pi/2) = i sin(pi/2) = i, cross-checked by central
        // differences.
        let f = func("cosh(z-0.5)");
        let fp = f.derivative(1);
        let z = c(0.5, FRAC_PI_2);
        let v = fp.eval(z).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-12, "got {v}");

        let h = 1e-6;
        let fd = (f.eval(z + c(h, 0.0)).unwrap() - f.eval(z - c(h, 0.0)).unwrap()) / (2.0 * h);
        assert!((v - fd).norm() / v.norm() < 1e-8);
    }

    #[test]
    fn second_derivative_matches_twice_first() {
        for src in ["cosh(z-0.5)", "z^3 - i*z", "exp(z)*sin(z)", "tan(z/4)"] {
            let f = func(src);
            let d2 = f.derivative(2);
            let d11 = f.derivative(1).derivative(1);
            for k in 0..20 {
                let z = c(0.3 * k as f64 - 2.0, 0.17 * k as f64 - 1.5);
                let a = d2.eval(z).unwrap();
                let b = d11.eval(z).unwrap();
                assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "{src} at {z}");
            }
        }
    }

    #[test]
    fn flow_acceleration_values() {
        let f = func("cosh(z-0.5)");
        let v = f.flow_acceleration(c(2.0, 0.0)).unwrap();
        // sinh(1.5) * cosh(1.5), real and positive.
        let expect = 1.5_f64.sinh() * 1.5_f64.cosh();
        assert!((v - c(expect, 0.0)).norm() < 1e-12, "got {v}");
        assert!(v.re > 0.0 && v.im == 0.0);

        let id = func("z");
        assert_eq!(id.flow_acceleration(c(3.0, 0.0)).unwrap(), c(3.0, 0.0));

        let at_center = f.flow_acceleration(c(0.5, FRAC_PI_2)).unwrap();
        assert!(at_center.norm() < 1e-12);
    }

    #[test]
    fn cauchy_riemann_examples() {
        let f = func("cosh(z-0.5)");
        let (a, b) = f.cauchy_riemann_residual(c(1.0, 1.0), 1e-5).unwrap();
        assert!(a < 1e-6 && b < 1e-6, "({a}, {b})");

        let id = func("z");
        let (a, b) = id.cauchy_riemann_residual(c(0.3, -0.7), 1e-5).unwrap();
        assert!(a < 1e-10 && b < 1e-10);

        let g = func("exp(z)");
        let (a, b) = g.cauchy_riemann_residual(c(0.0, 0.0), 1e-4).unwrap();
        assert!(a < 1e-7 && b < 1e-7);
    }

    #[test]
    fn display_round_trips_evaluations() {
        for src in [
            "cosh(z-0.5)",
            "-z^2 + 3.5*z - 1e-2",
            "(z+i)/(z-2)*sin(z)",
            "exp(-z)^3 - tanh(z)/2",
            "pi*e - log(z+10)",
        ] {
            let f = func(src);
            let printed = f.to_string();
            let g = HolomorphicFunction::parse(&printed).unwrap();
            for k in 0..100 {
                let z = c(0.11 * k as f64 - 5.0, 0.07 * k as f64 - 3.0);
                assert_eq!(f.eval(z), g.eval(z), "{src} vs {printed} at {z}");
            }
        }
    }

    #[test]
    fn eval_is_pure() {
        let f = func("cosh(z-0.5)*exp(z/3) - i*tan(z/5)");
        let z = c(1.2345, -0.6789);
        let a = f.eval(z).unwrap();
        let b = f.eval(z).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn unary_minus_binds_to_atom() {
        // Per the grammar, -z^2 is (-z)^2.
        let f = func("-z^2");
        assert_eq!(f.eval(c(2.0, 0.0)).unwrap(), c(4.0, 0.0));
    }
}
