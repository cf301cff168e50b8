//! Coalition-modal formula AST, concrete grammar, and canonical printer.
//!
//! Grammar (whitespace-insensitive, binary connectives fully parenthesized):
//!
//! ```text
//! phi  ::= atom | "~" phi | "(" phi op phi ")" | "<" coal ">" phi | "[" coal "]" phi
//! op   ::= "&" | "|" | "->" | "<->"
//! coal ::= "{" [ints comma-separated] "}"
//! atom ::= "o_<alt>" | "p_<i>_<x>_<y>" | "t_<i>_<x>" | letter
//! ```
//!
//! `<->` is surface syntax only; it desugars to a conjunction of the two
//! implications. Weak preference has no atom of its own: it is compiled away
//! at formula-build time.

use std::fmt;

use thiserror::Error;

use crate::coalition::Coalition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at byte offset {0}")]
    Syntax(usize),
    #[error("agent index {agent} out of range 1..={n} at byte offset {offset}")]
    OutOfRangeAgent { offset: usize, agent: usize, n: usize },
    #[error("unknown alternative `{name}` at byte offset {offset}")]
    UnknownAlternative { offset: usize, name: String },
}

/// Atomic propositions: the three social-choice readings plus plain letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `o_x`: the submitted reports select alternative `x`.
    Outcome(String),
    /// `p_i_x_y`: agent `i` truly ranks `x` above `y`.
    Pref(usize, String, String),
    /// `t_i_x`: `x` is agent `i`'s true top.
    Top(usize, String),
    /// A bare propositional letter.
    Letter(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Outcome(x) => write!(f, "o_{x}"),
            Atom::Pref(i, x, y) => write!(f, "p_{i}_{x}_{y}"),
            Atom::Top(i, x) => write!(f, "t_{i}_{x}"),
            Atom::Letter(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Diamond(Coalition, Box<Formula>),
    Box(Coalition, Box<Formula>),
}

impl Formula {
    pub fn letter(name: &str) -> Formula {
        Formula::Atom(Atom::Letter(name.to_string()))
    }

    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn diamond(c: Coalition, inner: Formula) -> Formula {
        Formula::Diamond(c, Box::new(inner))
    }

    pub fn necessity(c: Coalition, inner: Formula) -> Formula {
        Formula::Box(c, Box::new(inner))
    }

    /// Right-folded conjunction of a non-empty list.
    pub fn conjoin(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("conjoin needs at least one conjunct");
        it.fold(last, |acc, f| f.and(acc))
    }

    /// Right-folded disjunction of a non-empty list.
    pub fn disjoin(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("disjoin needs at least one disjunct");
        it.fold(last, |acc, f| f.or(acc))
    }

    /// Number of disjuncts along the right-folded `Or` spine.
    pub fn disjunct_count(&self) -> usize {
        match self {
            Formula::Or(_, rhs) => 1 + rhs.disjunct_count(),
            _ => 1,
        }
    }

    /// All coalition labels occurring under a modality.
    pub fn modal_labels(&self) -> Vec<Coalition> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Diamond(c, _) | Formula::Box(c, _) = f {
                out.push(*c);
            }
        });
        out.sort();
        out.dedup();
        out
    }

    /// All atoms occurring in the formula.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Atom(a) = f {
                out.push(a.clone());
            }
        });
        out.sort();
        out.dedup();
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Atom(_) => {}
            Formula::Not(f) | Formula::Diamond(_, f) | Formula::Box(_, f) => visit_rec(f, visit),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                visit_rec(l, visit);
                visit_rec(r, visit);
            }
        }
    }
}

fn visit_rec(f: &Formula, visit: &mut impl FnMut(&Formula)) {
    f.walk(visit)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(inner) => write!(f, "~{inner}"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Implies(l, r) => write!(f, "({l} -> {r})"),
            Formula::Diamond(c, inner) => write!(f, "<{c}>{inner}"),
            Formula::Box(c, inner) => write!(f, "[{c}]{inner}"),
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    n: usize,
    alternatives: &'a [String],
}

impl<'a> Parser<'a> {
    fn fail(&self) -> FormulaError {
        FormulaError::Syntax(self.pos.min(self.bytes.len().saturating_sub(1)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), FormulaError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail())
        }
    }

    fn parse_phi(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().ok_or_else(|| self.fail())? {
            b'~' => {
                self.pos += 1;
                Ok(self.parse_phi()?.not())
            }
            b'(' => {
                self.pos += 1;
                let lhs = self.parse_phi()?;
                let op = self.parse_op()?;
                let rhs = self.parse_phi()?;
                self.expect(b')')?;
                Ok(match op {
                    Op::And => lhs.and(rhs),
                    Op::Or => lhs.or(rhs),
                    Op::Implies => lhs.implies(rhs),
                    Op::Iff => {
                        let fwd = lhs.clone().implies(rhs.clone());
                        let bwd = rhs.implies(lhs);
                        fwd.and(bwd)
                    }
                })
            }
            b'<' => {
                self.pos += 1;
                let c = self.parse_coalition()?;
                self.expect(b'>')?;
                Ok(Formula::diamond(c, self.parse_phi()?))
            }
            b'[' => {
                self.pos += 1;
                let c = self.parse_coalition()?;
                self.expect(b']')?;
                Ok(Formula::necessity(c, self.parse_phi()?))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_op(&mut self) -> Result<Op, FormulaError> {
        match self.peek().ok_or_else(|| self.fail())? {
            b'&' => {
                self.pos += 1;
                Ok(Op::And)
            }
            b'|' => {
                self.pos += 1;
                Ok(Op::Or)
            }
            b'-' => {
                if self.bytes.get(self.pos + 1) == Some(&b'>') {
                    self.pos += 2;
                    Ok(Op::Implies)
                } else {
                    Err(self.fail())
                }
            }
            b'<' => {
                if self.bytes.get(self.pos + 1) == Some(&b'-')
                    && self.bytes.get(self.pos + 2) == Some(&b'>')
                {
                    self.pos += 3;
                    Ok(Op::Iff)
                } else {
                    Err(self.fail())
                }
            }
            _ => Err(self.fail()),
        }
    }

    fn parse_coalition(&mut self) -> Result<Coalition, FormulaError> {
        self.expect(b'{')?;
        let mut members = Vec::new();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(Coalition::EMPTY);
        }
        loop {
            let start = {
                self.skip_ws();
                self.pos
            };
            let agent = self.parse_uint()?;
            if agent == 0 || agent > self.n {
                return Err(FormulaError::OutOfRangeAgent { offset: start, agent, n: self.n });
            }
            members.push(agent);
            match self.peek().ok_or_else(|| self.fail())? {
                b',' => self.pos += 1,
                b'}' => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.fail()),
            }
        }
        Coalition::from_members(members, self.n).map_err(|_| self.fail())
    }

    fn parse_uint(&mut self) -> Result<usize, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail());
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| FormulaError::Syntax(start))
    }

    fn parse_atom(&mut self) -> Result<Formula, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail());
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(Formula::Atom(self.interpret_atom(name, start)?))
    }

    fn require_alt(&self, name: &str, offset: usize) -> Result<String, FormulaError> {
        if self.alternatives.iter().any(|a| a == name) {
            Ok(name.to_string())
        } else {
            Err(FormulaError::UnknownAlternative { offset, name: name.to_string() })
        }
    }

    fn interpret_atom(&self, name: &str, offset: usize) -> Result<Atom, FormulaError> {
        if let Some(rest) = name.strip_prefix("o_") {
            return Ok(Atom::Outcome(self.require_alt(rest, offset)?));
        }
        if let Some(rest) = name.strip_prefix("p_") {
            if let Some((digits, tail)) = rest.split_once('_') {
                if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                    let agent: usize =
                        digits.parse().map_err(|_| FormulaError::Syntax(offset))?;
                    if agent == 0 || agent > self.n {
                        return Err(FormulaError::OutOfRangeAgent { offset, agent, n: self.n });
                    }
                    // Split the remainder into two declared alternative names.
                    let mut found = Vec::new();
                    for (idx, _) in tail.match_indices('_') {
                        let (x, y) = (&tail[..idx], &tail[idx + 1..]);
                        if self.alternatives.iter().any(|a| a == x)
                            && self.alternatives.iter().any(|a| a == y)
                        {
                            found.push((x.to_string(), y.to_string()));
                        }
                    }
                    return match found.len() {
                        1 => {
                            let (x, y) = found.into_iter().next().unwrap();
                            Ok(Atom::Pref(agent, x, y))
                        }
                        0 => Err(FormulaError::UnknownAlternative {
                            offset,
                            name: tail.to_string(),
                        }),
                        _ => Err(FormulaError::Syntax(offset)),
                    };
                }
            }
        }
        if let Some(rest) = name.strip_prefix("t_") {
            if let Some((digits, tail)) = rest.split_once('_') {
                if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                    let agent: usize =
                        digits.parse().map_err(|_| FormulaError::Syntax(offset))?;
                    if agent == 0 || agent > self.n {
                        return Err(FormulaError::OutOfRangeAgent { offset, agent, n: self.n });
                    }
                    return Ok(Atom::Top(agent, self.require_alt(tail, offset)?));
                }
            }
        }
        Ok(Atom::Letter(name.to_string()))
    }
}

enum Op {
    And,
    Or,
    Implies,
    Iff,
}

/// Parses a formula against an ambient agent count and alternative list.
pub fn parse_formula(
    text: &str,
    n: usize,
    alternatives: &[String],
) -> Result<Formula, FormulaError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, n, alternatives };
    let phi = p.parse_phi()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.fail());
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Vec<String> {
        vec!["a".to_string(), "b".to_string(), "c".to_string()]
    }

    #[test]
    fn parses_the_plurality_failure_formula() {
        let phi = parse_formula("(o_a & <{3}>(o_b & p_3_b_a))", 3, &abc()).unwrap();
        assert_eq!(phi.to_string(), "(o_a & <{3}>(o_b & p_3_b_a))");
        match &phi {
            Formula::And(l, r) => {
                assert_eq!(**l, Formula::Atom(Atom::Outcome("a".into())));
                match &**r {
                    Formula::Diamond(c, _) => assert_eq!(c.members(), vec![3]),
                    other => panic!("expected diamond, got {other}"),
                }
            }
            other => panic!("expected conjunction, got {other}"),
        }
    }

    #[test]
    fn implication_over_plain_letter() {
        let phi = parse_formula("(p -> p)", 2, &[]).unwrap();
        assert_eq!(phi.to_string(), "(p -> p)");
    }

    #[test]
    fn unterminated_diamond_reports_offset_three() {
        assert_eq!(parse_formula("<{1}", 2, &[]), Err(FormulaError::Syntax(3)));
    }

    #[test]
    fn iff_desugars_to_two_implications() {
        let phi = parse_formula("(p <-> q)", 1, &[]).unwrap();
        assert_eq!(phi.to_string(), "((p -> q) & (q -> p))");
    }

    #[test]
    fn box_is_primitive_in_the_ast() {
        let phi = parse_formula("[{1,2}]~p", 2, &[]).unwrap();
        assert!(matches!(phi, Formula::Box(c, _) if c.members() == vec![1, 2]));
    }

    #[test]
    fn atom_validation_errors() {
        assert!(matches!(
            parse_formula("o_z", 2, &abc()),
            Err(FormulaError::UnknownAlternative { .. })
        ));
        assert!(matches!(
            parse_formula("p_9_a_b", 2, &abc()),
            Err(FormulaError::OutOfRangeAgent { agent: 9, .. })
        ));
        assert!(matches!(
            parse_formula("<{5}>p", 2, &[]),
            Err(FormulaError::OutOfRangeAgent { agent: 5, .. })
        ));
        // A name with a structured prefix but no digit falls back to a letter.
        assert_eq!(
            parse_formula("p_top", 2, &abc()).unwrap(),
            Formula::Atom(Atom::Letter("p_top".into()))
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_formula("( o_a &  < {1, 3} > t_2_b )", 3, &abc()).unwrap();
        let b = parse_formula("(o_a&<{1,3}>t_2_b)", 3, &abc()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(o_a & <{1,3}>t_2_b)");
    }

    #[test]
    fn print_then_parse_is_identity() {
        let texts = ["~~p", "(p & (q | ~r))", "<{}>((p -> q) & [{2}]p)", "t_1_a"];
        for t in texts {
            let phi = parse_formula(t, 2, &abc()).unwrap();
            let reparsed = parse_formula(&phi.to_string(), 2, &abc()).unwrap();
            assert_eq!(phi, reparsed);
        }
    }
}
