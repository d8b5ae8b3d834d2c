//! Proposition AST, concrete syntax, and the canonical enumeration order.
//!
//! Propositions are full binary trees: leaves are atoms `p1..pN`, `True` or
//! `False`; internal nodes are `∧`, `∨`, `→`. The concrete syntax uses the
//! Unicode connectives (ASCII aliases `/\`, `\/`, `->` are accepted on input),
//! with precedence `∧` > `∨` > `→` and all connectives right-associative, as
//! in Lean. Rendering parenthesizes every compound subterm, so rendered text
//! is unambiguous regardless of precedence.

use alloc::boxed::Box;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

/// A proposition of intuitionistic propositional logic.
///
/// `Atom` indices are 1-based. The derived `Ord` is an arbitrary structural
/// order used for container keys; the domain order is [`Proposition::compare`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proposition {
    Atom(u32),
    Top,
    Bot,
    And(Box<Proposition>, Box<Proposition>),
    Or(Box<Proposition>, Box<Proposition>),
    Imp(Box<Proposition>, Box<Proposition>),
}

impl Proposition {
    pub fn and(left: Proposition, right: Proposition) -> Self {
        Proposition::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Proposition, right: Proposition) -> Self {
        Proposition::Or(Box::new(left), Box::new(right))
    }

    pub fn imp(left: Proposition, right: Proposition) -> Self {
        Proposition::Imp(Box::new(left), Box::new(right))
    }

    /// Left and right subtrees, or `None` for a leaf.
    pub fn children(&self) -> Option<(&Proposition, &Proposition)> {
        match self {
            Proposition::And(l, r) | Proposition::Or(l, r) | Proposition::Imp(l, r) => {
                Some((l, r))
            }
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children().is_none()
    }

    /// Number of connective (`∧`/`∨`/`→`) nodes.
    pub fn internal_nodes(&self) -> usize {
        match self.children() {
            None => 0,
            Some((l, r)) => 1 + l.internal_nodes() + r.internal_nodes(),
        }
    }

    /// Largest atom index occurring in the proposition (0 if none).
    pub fn max_atom(&self) -> u32 {
        match self {
            Proposition::Atom(i) => *i,
            Proposition::Top | Proposition::Bot => 0,
            Proposition::And(l, r) | Proposition::Or(l, r) | Proposition::Imp(l, r) => {
                l.max_atom().max(r.max_atom())
            }
        }
    }

    /// Renders the canonical text form: leaves bare, every compound subterm
    /// parenthesized. `parse(render(x)) == x`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        use core::fmt::Write;
        match self {
            Proposition::Atom(i) => {
                let _ = write!(out, "p{i}");
            }
            Proposition::Top => out.push_str("True"),
            Proposition::Bot => out.push_str("False"),
            Proposition::And(l, r) => Self::write_binary(out, l, "∧", r),
            Proposition::Or(l, r) => Self::write_binary(out, l, "∨", r),
            Proposition::Imp(l, r) => Self::write_binary(out, l, "→", r),
        }
    }

    fn write_binary(out: &mut String, l: &Proposition, op: &str, r: &Proposition) {
        out.push('(');
        l.write_to(out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        r.write_to(out);
        out.push(')');
    }

    /// Parses a proposition without an atom bound.
    pub fn parse(text: &str) -> Result<Proposition, ParseError> {
        Parser::new(text)?.parse_all(None)
    }

    /// Parses a proposition, rejecting atoms above `max_atom`.
    pub fn parse_bounded(text: &str, max_atom: u32) -> Result<Proposition, ParseError> {
        Parser::new(text)?.parse_all(Some(max_atom))
    }

    /// Total order used throughout the corpus: propositions sort first by
    /// internal-node count, and within a fixed node count exactly as their
    /// numeric ids sort under the ranking in [`crate::codec`] (tree shape
    /// with left-subtree size ascending, then node labels read left subtree
    /// first, `T < F < P_1 < … < P_p` for leaves and `∧ < ∨ < →` for
    /// connectives).
    pub fn compare(&self, other: &Proposition) -> Ordering {
        self.internal_nodes()
            .cmp(&other.internal_nodes())
            .then_with(|| self.cmp_shape(other))
            .then_with(|| self.cmp_assignment(other))
    }

    fn cmp_shape(&self, other: &Proposition) -> Ordering {
        match (self.children(), other.children()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some((al, ar)), Some((bl, br))) => al
                .internal_nodes()
                .cmp(&bl.internal_nodes())
                .then_with(|| al.cmp_shape(bl))
                .then_with(|| ar.cmp_shape(br)),
        }
    }

    fn cmp_assignment(&self, other: &Proposition) -> Ordering {
        match (self.children(), other.children()) {
            (None, None) => self.label_rank().cmp(&other.label_rank()),
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some((al, ar)), Some((bl, br))) => al
                .cmp_assignment(bl)
                .then_with(|| self.label_rank().cmp(&other.label_rank()))
                .then_with(|| ar.cmp_assignment(br)),
        }
    }

    /// Digit value of the root label: `∧`/`T` → 0, `∨`/`F` → 1, `→` → 2,
    /// `P_i` → i+1.
    pub(crate) fn label_rank(&self) -> u32 {
        match self {
            Proposition::And(..) | Proposition::Top => 0,
            Proposition::Or(..) | Proposition::Bot => 1,
            Proposition::Imp(..) => 2,
            Proposition::Atom(i) => i + 1,
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Syntax error with the byte offset of the offending input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken,
    UnexpectedEnd,
    UnbalancedParen,
    AtomIndexZero,
    AtomOutOfRange { index: u32, bound: u32 },
    TrailingInput,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character {c:?} at byte {}", self.offset)
            }
            ParseErrorKind::UnexpectedToken => {
                write!(f, "unexpected token at byte {}", self.offset)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of input at byte {}", self.offset)
            }
            ParseErrorKind::UnbalancedParen => {
                write!(f, "unbalanced parenthesis at byte {}", self.offset)
            }
            ParseErrorKind::AtomIndexZero => {
                write!(f, "atom indices start at 1 (byte {})", self.offset)
            }
            ParseErrorKind::AtomOutOfRange { index, bound } => write!(
                f,
                "atom p{index} exceeds the configured bound p{bound} (byte {})",
                self.offset
            ),
            ParseErrorKind::TrailingInput => {
                write!(f, "trailing input at byte {}", self.offset)
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    LParen,
    RParen,
    And,
    Or,
    Imp,
    Top,
    Bot,
    Atom(u32),
}

struct Parser {
    tokens: alloc::vec::Vec<(Token, usize)>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let mut tokens = alloc::vec::Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < text.len() {
            let rest = &text[i..];
            let c = rest.chars().next().unwrap();
            if c.is_whitespace() {
                i += c.len_utf8();
                continue;
            }
            let (tok, len) = if rest.starts_with('(') {
                (Token::LParen, 1)
            } else if rest.starts_with(')') {
                (Token::RParen, 1)
            } else if rest.starts_with('∧') {
                (Token::And, '∧'.len_utf8())
            } else if rest.starts_with('∨') {
                (Token::Or, '∨'.len_utf8())
            } else if rest.starts_with('→') {
                (Token::Imp, '→'.len_utf8())
            } else if rest.starts_with("/\\") {
                (Token::And, 2)
            } else if rest.starts_with("\\/") {
                (Token::Or, 2)
            } else if rest.starts_with("->") {
                (Token::Imp, 2)
            } else if rest.starts_with("True") {
                (Token::Top, 4)
            } else if rest.starts_with("False") {
                (Token::Bot, 5)
            } else if c == 'p' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                let digits = rest[1..]
                    .bytes()
                    .take_while(u8::is_ascii_digit)
                    .count();
                let index: u32 = rest[1..1 + digits].parse().map_err(|_| ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedToken,
                })?;
                if index == 0 {
                    return Err(ParseError {
                        offset: i,
                        kind: ParseErrorKind::AtomIndexZero,
                    });
                }
                (Token::Atom(index), 1 + digits)
            } else {
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(c),
                });
            };
            tokens.push((tok, i));
            i += len;
        }
        Ok(Parser {
            tokens,
            pos: 0,
            end_offset: text.len(),
        })
    }

    fn parse_all(mut self, bound: Option<u32>) -> Result<Proposition, ParseError> {
        let prop = self.parse_imp(bound)?;
        if let Some(&(_, offset)) = self.tokens.get(self.pos) {
            return Err(ParseError {
                offset,
                kind: ParseErrorKind::TrailingInput,
            });
        }
        Ok(prop)
    }

    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).map(|&(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_offset, |&(_, o)| o)
    }

    fn parse_imp(&mut self, bound: Option<u32>) -> Result<Proposition, ParseError> {
        let left = self.parse_or(bound)?;
        if self.peek() == Some(Token::Imp) {
            self.pos += 1;
            let right = self.parse_imp(bound)?;
            return Ok(Proposition::imp(left, right));
        }
        Ok(left)
    }

    fn parse_or(&mut self, bound: Option<u32>) -> Result<Proposition, ParseError> {
        let left = self.parse_and(bound)?;
        if self.peek() == Some(Token::Or) {
            self.pos += 1;
            let right = self.parse_or(bound)?;
            return Ok(Proposition::or(left, right));
        }
        Ok(left)
    }

    fn parse_and(&mut self, bound: Option<u32>) -> Result<Proposition, ParseError> {
        let left = self.parse_primary(bound)?;
        if self.peek() == Some(Token::And) {
            self.pos += 1;
            let right = self.parse_and(bound)?;
            return Ok(Proposition::and(left, right));
        }
        Ok(left)
    }

    fn parse_primary(&mut self, bound: Option<u32>) -> Result<Proposition, ParseError> {
        let offset = self.offset();
        let Some(tok) = self.peek() else {
            return Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedEnd,
            });
        };
        self.pos += 1;
        match tok {
            Token::Top => Ok(Proposition::Top),
            Token::Bot => Ok(Proposition::Bot),
            Token::Atom(i) => {
                if let Some(b) = bound {
                    if i > b {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::AtomOutOfRange { index: i, bound: b },
                        });
                    }
                }
                Ok(Proposition::Atom(i))
            }
            Token::LParen => {
                let inner = self.parse_imp(bound)?;
                if self.peek() != Some(Token::RParen) {
                    return Err(ParseError {
                        offset: self.offset(),
                        kind: ParseErrorKind::UnbalancedParen,
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedToken,
            }),
        }
    }
}
