//! Textual unitary pipelines such as `S Q1{0,2} R(pi/2)`.
//!
//! ```text
//! pipeline := token (ws token)*
//! token    := "S" | "R" angle? | ("Q1" | "Q2") markset angle?
//! markset  := "{" int ("," int)* "}"
//! angle    := "(" expr ")"
//! expr     := decimal | "pi" | decimal "*" "pi" | "pi/" decimal
//! ```
//!
//! Tokens read in operator order: the leftmost is applied last. Whitespace
//! is also accepted around the contents of `{}` and `()`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::TransitionMatrix;
use crate::operators::{
    build_psi_matrix, Operator, OracleOperator, PhaseMatrix, ReflectionOperator, UnitaryPipeline,
};
use crate::state::Register;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleExpr {
    Pi,
    Decimal(f64),
    TimesPi(f64),
    PiOver(f64),
}

impl AngleExpr {
    /// Radians. `pi`, `1*pi` and `pi/1` all give exactly [`PI`].
    pub fn value(self) -> f64 {
        match self {
            AngleExpr::Pi => PI,
            AngleExpr::Decimal(x) => x,
            AngleExpr::TimesPi(x) => x * PI,
            AngleExpr::PiOver(d) => PI / d,
        }
    }
}

impl fmt::Display for AngleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleExpr::Pi => write!(f, "pi"),
            AngleExpr::Decimal(x) => write!(f, "{x}"),
            AngleExpr::TimesPi(x) => write!(f, "{x}*pi"),
            AngleExpr::PiOver(d) => write!(f, "pi/{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Swap,
    Reflection {
        angle: Option<AngleExpr>,
    },
    Oracle {
        register: Register,
        marked: Vec<usize>,
        angle: Option<AngleExpr>,
    },
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let angle = match self {
            Token::Swap => return write!(f, "S"),
            Token::Reflection { angle } => {
                write!(f, "R")?;
                angle
            }
            Token::Oracle {
                register,
                marked,
                angle,
            } => {
                write!(f, "Q{}{{", register.index())?;
                for (k, m) in marked.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "}}")?;
                angle
            }
        };
        match angle {
            Some(a) => write!(f, "({a})"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineExpr {
    pub tokens: Vec<Token>,
}

impl PipelineExpr {
    /// Same tokens in the opposite order, for input written in execution
    /// order.
    pub fn reversed(&self) -> Self {
        PipelineExpr {
            tokens: self.tokens.iter().rev().cloned().collect(),
        }
    }
}

impl fmt::Display for PipelineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.tokens.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PipelineExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pipeline(s)
    }
}

pub fn format_pipeline(expr: &PipelineExpr) -> String {
    expr.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.error(self.pos, format!("expected `{lit}`"))
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn text(&self, start: usize) -> &'a str {
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice")
    }

    fn integer(&mut self) -> Result<usize> {
        let start = self.pos;
        if self.digits() == 0 {
            return self.error(start, "expected a node index");
        }
        self.text(start)
            .parse()
            .or_else(|_| self.error(start, "node index too large"))
    }

    fn decimal(&mut self) -> Result<f64> {
        let start = self.pos;
        self.eat("-");
        if self.digits() == 0 {
            return self.error(start, "expected a number");
        }
        if self.eat(".") && self.digits() == 0 {
            return self.error(self.pos, "expected digits after `.`");
        }
        Ok(self.text(start).parse().expect("validated decimal"))
    }

    fn angle_expr(&mut self) -> Result<AngleExpr> {
        let start = self.pos;
        let expr = if self.eat("pi") {
            if self.eat("/") {
                AngleExpr::PiOver(self.decimal()?)
            } else {
                AngleExpr::Pi
            }
        } else {
            let x = self.decimal()?;
            let before_star = self.pos;
            self.skip_ws();
            if self.eat("*") {
                self.skip_ws();
                self.expect("pi")?;
                AngleExpr::TimesPi(x)
            } else {
                self.pos = before_star;
                AngleExpr::Decimal(x)
            }
        };
        if !expr.value().is_finite() {
            return self.error(start, "angle is not finite");
        }
        Ok(expr)
    }

    fn angle(&mut self) -> Result<Option<AngleExpr>> {
        if !self.eat("(") {
            return Ok(None);
        }
        self.skip_ws();
        let a = self.angle_expr()?;
        self.skip_ws();
        self.expect(")")?;
        Ok(Some(a))
    }

    fn markset(&mut self) -> Result<Vec<usize>> {
        self.expect("{")?;
        let mut marked = Vec::new();
        loop {
            self.skip_ws();
            marked.push(self.integer()?);
            self.skip_ws();
            if self.eat("}") {
                return Ok(marked);
            }
            if !self.eat(",") {
                return self.error(self.pos, "expected `,` or `}`");
            }
        }
    }

    fn token(&mut self) -> Result<Token> {
        let start = self.pos;
        if self.eat("S") {
            Ok(Token::Swap)
        } else if self.eat("R") {
            Ok(Token::Reflection {
                angle: self.angle()?,
            })
        } else if self.eat("Q1") || self.eat("Q2") {
            let register = if self.src[start + 1] == b'1' {
                Register::First
            } else {
                Register::Second
            };
            let marked = self.markset()?;
            Ok(Token::Oracle {
                register,
                marked,
                angle: self.angle()?,
            })
        } else {
            self.error(start, "expected `S`, `R`, `Q1` or `Q2`")
        }
    }

    fn pipeline(&mut self) -> Result<PipelineExpr> {
        let mut tokens = Vec::new();
        self.skip_ws();
        while self.pos < self.src.len() {
            tokens.push(self.token()?);
            let end = self.pos;
            self.skip_ws();
            if self.pos == end && self.pos < self.src.len() {
                return self.error(self.pos, "expected whitespace between operators");
            }
        }
        if tokens.is_empty() {
            return self.error(self.pos, "empty pipeline");
        }
        Ok(PipelineExpr { tokens })
    }
}

pub fn parse_pipeline(text: &str) -> Result<PipelineExpr> {
    Parser {
        src: text.as_bytes(),
        pos: 0,
    }
    .pipeline()
}

/// A bare angle expression, as used by command-line flags.
pub fn parse_angle(text: &str) -> Result<AngleExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let a = p.angle_expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.error(p.pos, "trailing input");
    }
    Ok(a)
}

/// Turns an expression into operators on `g`. All reflections share one Psi.
pub fn bind_pipeline(
    expr: &PipelineExpr,
    g: &TransitionMatrix,
    theta: Option<&PhaseMatrix>,
) -> Result<UnitaryPipeline> {
    let n = g.n();
    let needs_psi = expr
        .tokens
        .iter()
        .any(|t| matches!(t, Token::Reflection { .. }));
    let psi = if needs_psi {
        Some(Arc::new(build_psi_matrix(g, theta)?))
    } else {
        None
    };
    let mut ops = Vec::with_capacity(expr.tokens.len());
    for t in &expr.tokens {
        ops.push(match t {
            Token::Swap => Operator::Swap,
            Token::Reflection { angle } => {
                let psi = psi.clone().expect("built above");
                let angle = angle.map_or(PI, AngleExpr::value);
                ReflectionOperator::with_angle(psi, angle).into()
            }
            Token::Oracle {
                register,
                marked,
                angle,
            } => {
                if let Some(&index) = marked.iter().find(|&&m| m >= n) {
                    return Err(Error::IndexOutOfRange { index, n });
                }
                let angle = angle.map_or(PI, AngleExpr::value);
                OracleOperator::with_angle(marked.iter().copied(), *register, angle).into()
            }
        });
    }
    UnitaryPipeline::new(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ValidationPolicy;
    use crate::operators::apply_pipeline;
    use crate::state::initial_superposition;
    use crate::state::MatrixState;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reflection(angle: Option<AngleExpr>) -> Token {
        Token::Reflection { angle }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_pipeline("S R").unwrap().tokens,
            vec![Token::Swap, reflection(None)]
        );
        assert_eq!(
            parse_pipeline("S Q1{0,2} R").unwrap().tokens,
            vec![
                Token::Swap,
                Token::Oracle {
                    register: Register::First,
                    marked: vec![0, 2],
                    angle: None
                },
                reflection(None)
            ]
        );
        let e = parse_pipeline("S R(pi/2) S R(0.3*pi)").unwrap();
        assert_eq!(
            e.tokens,
            vec![
                Token::Swap,
                reflection(Some(AngleExpr::PiOver(2.0))),
                Token::Swap,
                reflection(Some(AngleExpr::TimesPi(0.3)))
            ]
        );
        assert_eq!(AngleExpr::PiOver(2.0).value(), PI / 2.0);
        assert_eq!(AngleExpr::TimesPi(0.3).value(), 0.3 * PI);
        assert_eq!(
            parse_pipeline("  Q2{ 1 , 3 }( -0.25 )\tS\n").unwrap().to_string(),
            "Q2{1,3}(-0.25) S"
        );
    }

    #[test]
    fn exact_pi_spellings() {
        for s in ["pi", "1*pi", "pi/1", "1.0 * pi"] {
            assert_eq!(parse_angle(s).unwrap().value(), PI, "{s}");
        }
    }

    #[test]
    fn positioned_errors() {
        let cases = [
            ("", 0),
            ("   ", 3),
            ("S X", 2),
            ("SR", 1),
            ("R(pi)S", 5),
            ("Q1{}", 3),
            ("Q1{0,}", 5),
            ("Q1{0 1}", 5),
            ("Q3{0}", 0),
            ("R(", 2),
            ("R(pi", 4),
            ("R(1.)", 4),
            ("R(2*)", 4),
            ("R(pi/0)", 2),
            ("Q1{99999999999999999999999}", 3),
        ];
        for (s, offset) in cases {
            match parse_pipeline(s) {
                Err(Error::Syntax { offset: o, .. }) => assert_eq!(o, offset, "{s:?}"),
                other => panic!("{s:?} gave {other:?}"),
            }
        }
        assert!(matches!(parse_angle("pi pi"), Err(Error::Syntax { offset: 3, .. })));
    }

    fn swap2() -> TransitionMatrix {
        TransitionMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]], ValidationPolicy::Strict).unwrap()
    }

    #[test]
    fn bind_examples() {
        let g = swap2();
        let u = bind_pipeline(&parse_pipeline("S R").unwrap(), &g, None).unwrap();
        let phi = initial_superposition(&build_psi_matrix(&g, None).unwrap());
        let twice = apply_pipeline(apply_pipeline(phi.clone(), &u).unwrap(), &u).unwrap();
        assert!(twice.max_abs_diff(&phi) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let g = TransitionMatrix::random(5, &mut rng);
        let phi = MatrixState::random(5, &mut rng);
        let zeros = PhaseMatrix::zeros(5);
        let r = parse_pipeline("R").unwrap();
        let a = apply_pipeline(phi.clone(), &bind_pipeline(&r, &g, Some(&zeros)).unwrap()).unwrap();
        let b = apply_pipeline(phi.clone(), &bind_pipeline(&r, &g, None).unwrap()).unwrap();
        assert_eq!(a, b);

        let w = bind_pipeline(&parse_pipeline("S R S R").unwrap(), &g, None).unwrap();
        let u = bind_pipeline(&parse_pipeline("S R").unwrap(), &g, None).unwrap();
        let via_w = apply_pipeline(phi.clone(), &w).unwrap();
        let via_u = apply_pipeline(apply_pipeline(phi.clone(), &u).unwrap(), &u).unwrap();
        assert_eq!(via_w, via_u);

        let explicit = bind_pipeline(&parse_pipeline("S R(pi)").unwrap(), &g, None).unwrap();
        assert_eq!(
            apply_pipeline(phi.clone(), &explicit).unwrap(),
            apply_pipeline(phi, &u).unwrap()
        );
    }

    #[test]
    fn bind_errors() {
        let g = swap2();
        assert_eq!(
            bind_pipeline(&parse_pipeline("S Q1{0,2}").unwrap(), &g, None).unwrap_err(),
            Error::IndexOutOfRange { index: 2, n: 2 }
        );
        assert!(matches!(
            bind_pipeline(&parse_pipeline("R").unwrap(), &g, Some(&PhaseMatrix::zeros(3))),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn reversed_order() {
        let e = parse_pipeline("R S Q2{1}").unwrap();
        assert_eq!(e.reversed().to_string(), "Q2{1} S R");
    }

    fn arb_decimal() -> impl Strategy<Value = f64> {
        prop_oneof![
            (-1000i32..1000).prop_map(f64::from),
            (-1e6f64..1e6),
            (0.0f64..1e-6),
        ]
    }

    fn arb_angle() -> impl Strategy<Value = AngleExpr> {
        prop_oneof![
            Just(AngleExpr::Pi),
            arb_decimal().prop_map(AngleExpr::Decimal),
            arb_decimal().prop_map(AngleExpr::TimesPi),
            arb_decimal()
                .prop_filter("nonzero", |d| *d != 0.0)
                .prop_map(AngleExpr::PiOver),
        ]
    }

    fn arb_token() -> impl Strategy<Value = Token> {
        prop_oneof![
            Just(Token::Swap),
            proptest::option::of(arb_angle()).prop_map(|angle| Token::Reflection { angle }),
            (
                any::<bool>(),
                proptest::collection::vec(0usize..5000, 1..5),
                proptest::option::of(arb_angle())
            )
                .prop_map(|(first, marked, angle)| Token::Oracle {
                    register: if first { Register::First } else { Register::Second },
                    marked,
                    angle
                }),
        ]
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(tokens in proptest::collection::vec(arb_token(), 1..8)) {
            let expr = PipelineExpr { tokens };
            let text = expr.to_string();
            let back = parse_pipeline(&text).unwrap();
            prop_assert_eq!(&back, &expr);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn arbitrary_input_never_panics(s in "[SRQ12{},()pi/*.0-9 -]{0,24}") {
            if let Err(e) = parse_pipeline(&s) {
                let positioned = matches!(e, Error::Syntax { offset, .. } if offset <= s.len());
                prop_assert!(positioned);
            }
        }
    }
}
