//! OpenQASM-2-like source programs.
//!
//! Supported subset: one `qreg`, at most one `creg`, the gate statements
//! `h x sx rz cx cz swap ccx ccz`, plus `measure`, `reset` and `barrier`,
//! one statement per `;`. `OPENQASM` version and `include` statements are
//! accepted and ignored so that conventional program headers parse.
//! Everything else is rejected.

use thiserror::Error;

use crate::circuit::{Circuit, Instruction, Kind};

#[derive(Debug, Error, PartialEq)]
pub enum SourceError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported feature: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Integer(usize),
    Symbol(char),
    Arrow,
    Str(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SourceError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut column = 1;
    let err = |line, column, message: &str| SourceError::Syntax {
        line,
        column,
        message: message.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        let (tok_line, tok_column) = (line, column);
        let advance = |i: &mut usize, line: &mut usize, column: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut column);
            continue;
        }
        if c == '/' && i + 1 < chars.len() && chars[i + 1] == '/' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut column);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                ident.push(chars[i]);
                advance(&mut i, &mut line, &mut column);
            }
            tokens.push(Spanned { token: Token::Ident(ident), line: tok_line, column: tok_column });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit()) {
            let mut text = String::new();
            let mut is_float = false;
            while i < chars.len() {
                let d = chars[i];
                if d.is_ascii_digit() {
                    text.push(d);
                } else if d == '.' || d == 'e' || d == 'E' {
                    is_float = true;
                    text.push(d);
                    if (d == 'e' || d == 'E')
                        && i + 1 < chars.len()
                        && (chars[i + 1] == '+' || chars[i + 1] == '-')
                    {
                        advance(&mut i, &mut line, &mut column);
                        text.push(chars[i]);
                    }
                } else {
                    break;
                }
                advance(&mut i, &mut line, &mut column);
            }
            let token = if is_float {
                Token::Number(
                    text.parse()
                        .map_err(|_| err(tok_line, tok_column, "malformed number"))?,
                )
            } else {
                Token::Integer(
                    text.parse()
                        .map_err(|_| err(tok_line, tok_column, "malformed integer"))?,
                )
            };
            tokens.push(Spanned { token, line: tok_line, column: tok_column });
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut column);
            let mut s = String::new();
            while i < chars.len() && chars[i] != '"' {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut column);
            }
            if i == chars.len() {
                return Err(err(tok_line, tok_column, "unterminated string"));
            }
            advance(&mut i, &mut line, &mut column);
            tokens.push(Spanned { token: Token::Str(s), line: tok_line, column: tok_column });
            continue;
        }
        if c == '-' && i + 1 < chars.len() && chars[i + 1] == '>' {
            advance(&mut i, &mut line, &mut column);
            advance(&mut i, &mut line, &mut column);
            tokens.push(Spanned { token: Token::Arrow, line: tok_line, column: tok_column });
            continue;
        }
        if "[](),;*/+-=".contains(c) {
            advance(&mut i, &mut line, &mut column);
            tokens.push(Spanned { token: Token::Symbol(c), line: tok_line, column: tok_column });
            continue;
        }
        return Err(err(line, column, &format!("unexpected character `{c}`")));
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> SourceError {
        let (line, column) = self
            .tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|t| (t.line, t.column))
            .unwrap_or((0, 0));
        SourceError::Syntax { line, column, message: message.to_string() }
    }

    fn expect_symbol(&mut self, want: char) -> Result<(), SourceError> {
        match self.next() {
            Some(Spanned { token: Token::Symbol(c), .. }) if c == want => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error(&format!("expected `{want}`")))
            }
        }
    }

    fn expect_integer(&mut self) -> Result<usize, SourceError> {
        match self.next() {
            Some(Spanned { token: Token::Integer(n), .. }) => Ok(n),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected an integer"))
            }
        }
    }

    fn expect_ident(&mut self) -> Result<String, SourceError> {
        match self.next() {
            Some(Spanned { token: Token::Ident(s), .. }) => Ok(s),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected an identifier"))
            }
        }
    }

    /// `name[index]` operand; the register name must match `expected`.
    fn operand(&mut self, expected: &str) -> Result<usize, SourceError> {
        let name = self.expect_ident()?;
        if name != expected {
            self.pos -= 1;
            return Err(self.error(&format!("unknown register `{name}`")));
        }
        self.expect_symbol('[')?;
        let index = self.expect_integer()?;
        self.expect_symbol(']')?;
        Ok(index)
    }

    // expr := mul { ('+'|'-') mul } ; mul := atom { ('*'|'/') atom }
    // atom := number | integer | 'pi' | '(' expr ')' | '-' atom
    fn angle_expr(&mut self) -> Result<f64, SourceError> {
        let mut value = self.angle_mul()?;
        loop {
            match self.peek().map(|t| t.token.clone()) {
                Some(Token::Symbol('+')) => {
                    self.next();
                    value += self.angle_mul()?;
                }
                Some(Token::Symbol('-')) => {
                    self.next();
                    value -= self.angle_mul()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn angle_mul(&mut self) -> Result<f64, SourceError> {
        let mut value = self.angle_atom()?;
        loop {
            match self.peek().map(|t| t.token.clone()) {
                Some(Token::Symbol('*')) => {
                    self.next();
                    value *= self.angle_atom()?;
                }
                Some(Token::Symbol('/')) => {
                    self.next();
                    value /= self.angle_atom()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn angle_atom(&mut self) -> Result<f64, SourceError> {
        match self.next() {
            Some(Spanned { token: Token::Number(v), .. }) => Ok(v),
            Some(Spanned { token: Token::Integer(n), .. }) => Ok(n as f64),
            Some(Spanned { token: Token::Ident(s), .. }) if s == "pi" => {
                Ok(std::f64::consts::PI)
            }
            Some(Spanned { token: Token::Symbol('-'), .. }) => Ok(-self.angle_atom()?),
            Some(Spanned { token: Token::Symbol('('), .. }) => {
                let v = self.angle_expr()?;
                self.expect_symbol(')')?;
                Ok(v)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected an angle expression"))
            }
        }
    }

    fn skip_statement(&mut self) {
        while let Some(t) = self.next() {
            if t.token == Token::Symbol(';') {
                break;
            }
        }
    }
}

/// Parses a source program into a virtual circuit.
pub fn parse_source(text: &str) -> Result<Circuit, SourceError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut qreg: Option<(String, usize)> = None;
    let mut creg: Option<(String, usize)> = None;
    let mut instructions: Vec<Instruction> = Vec::new();

    while let Some(spanned) = parser.next() {
        let ident = match spanned.token {
            Token::Ident(s) => s,
            Token::Symbol(';') => continue,
            _ => {
                parser.pos -= 1;
                return Err(parser.error("expected a statement"));
            }
        };
        match ident.as_str() {
            "OPENQASM" | "include" => parser.skip_statement(),
            "qreg" => {
                if qreg.is_some() {
                    return Err(SourceError::Unsupported(
                        "multiple quantum registers".to_string(),
                    ));
                }
                let name = parser.expect_ident()?;
                parser.expect_symbol('[')?;
                let size = parser.expect_integer()?;
                parser.expect_symbol(']')?;
                parser.expect_symbol(';')?;
                if size == 0 {
                    return Err(parser.error("quantum register must be non-empty"));
                }
                qreg = Some((name, size));
            }
            "creg" => {
                if creg.is_some() {
                    return Err(SourceError::Unsupported(
                        "multiple classical registers".to_string(),
                    ));
                }
                let name = parser.expect_ident()?;
                parser.expect_symbol('[')?;
                let size = parser.expect_integer()?;
                parser.expect_symbol(']')?;
                parser.expect_symbol(';')?;
                creg = Some((name, size));
            }
            "measure" => {
                let (qname, _) = qreg
                    .as_ref()
                    .ok_or_else(|| parser.error("measure before qreg declaration"))?;
                let qname = qname.clone();
                let q = parser.operand(&qname)?;
                match parser.next() {
                    Some(Spanned { token: Token::Arrow, .. }) => {}
                    _ => {
                        parser.pos = parser.pos.saturating_sub(1);
                        return Err(parser.error("expected `->`"));
                    }
                }
                let (cname, _) = creg
                    .as_ref()
                    .ok_or_else(|| parser.error("measure before creg declaration"))?;
                let cname = cname.clone();
                let c = parser.operand(&cname)?;
                parser.expect_symbol(';')?;
                instructions.push(Instruction::measure(q, c));
            }
            "if" => return Err(SourceError::Unsupported("if".to_string())),
            "delay" => return Err(SourceError::Unsupported("delay".to_string())),
            other => {
                let kind = match Kind::from_mnemonic(other) {
                    Some(Kind::Measure) | Some(Kind::Delay) | None => {
                        return Err(SourceError::Unsupported(other.to_string()));
                    }
                    Some(kind) => kind,
                };
                let params = if kind == Kind::Rz {
                    parser.expect_symbol('(')?;
                    let angle = parser.angle_expr()?;
                    parser.expect_symbol(')')?;
                    vec![angle]
                } else {
                    Vec::new()
                };
                let (qname, _) = qreg
                    .as_ref()
                    .ok_or_else(|| parser.error("gate before qreg declaration"))?;
                let qname = qname.clone();
                let mut qubits = vec![parser.operand(&qname)?];
                while parser.peek().map(|t| t.token.clone()) == Some(Token::Symbol(',')) {
                    parser.next();
                    qubits.push(parser.operand(&qname)?);
                }
                parser.expect_symbol(';')?;
                instructions.push(Instruction {
                    kind,
                    qubits,
                    params,
                    clbits: Vec::new(),
                    duration_dt: None,
                    start_dt: None,
                });
            }
        }
    }

    let (_, num_qubits) = qreg.ok_or(SourceError::Syntax {
        line: 1,
        column: 1,
        message: "program declares no quantum register".to_string(),
    })?;
    let num_clbits = creg.map(|(_, n)| n).unwrap_or(0);
    let mut circuit = Circuit::new("main", num_qubits, num_clbits);
    circuit.instructions = instructions;
    crate::circuit::validate_circuit(&circuit).map_err(|e| SourceError::Syntax {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    Ok(circuit)
}

/// Writes a virtual circuit back out as a source program.
///
/// Angles use shortest-roundtrip decimal formatting, which reparses to the
/// identical binary64 value.
pub fn write_source(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qreg q[{}];\n", circuit.num_qubits));
    if circuit.num_clbits > 0 {
        out.push_str(&format!("creg c[{}];\n", circuit.num_clbits));
    }
    for instr in &circuit.instructions {
        let operands: Vec<String> = instr.qubits.iter().map(|q| format!("q[{q}]")).collect();
        match instr.kind {
            Kind::Measure => out.push_str(&format!(
                "measure q[{}] -> c[{}];\n",
                instr.qubits[0], instr.clbits[0]
            )),
            Kind::Rz => out.push_str(&format!(
                "rz({}) q[{}];\n",
                instr.angle(),
                instr.qubits[0]
            )),
            _ => out.push_str(&format!(
                "{} {};\n",
                instr.kind.mnemonic(),
                operands.join(",")
            )),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let c = parse_source("qreg q[1]; creg c[1]; h q[0]; measure q[0] -> c[0];").unwrap();
        assert_eq!(c.num_qubits, 1);
        assert_eq!(c.num_clbits, 1);
        assert_eq!(c.instructions.len(), 2);
        assert_eq!(c.instructions[0].kind, Kind::H);
        assert_eq!(c.instructions[1].kind, Kind::Measure);
    }

    #[test]
    fn rz_literal_is_bit_exact() {
        let c = parse_source("qreg q[1]; rz(3.141592653589793) q[0];").unwrap();
        // Independent derivation of the nearest binary64 to pi.
        let reference: f64 = "3.141592653589793".parse().unwrap();
        assert_eq!(c.instructions[0].angle().to_bits(), reference.to_bits());
        assert_eq!(c.instructions[0].angle().to_bits(), std::f64::consts::PI.to_bits());
    }

    #[test]
    fn pi_expressions() {
        let c = parse_source("qreg q[1]; rz(pi/2) q[0]; rz(-pi) q[0]; rz(3*pi/4) q[0];").unwrap();
        assert_eq!(c.instructions[0].angle(), std::f64::consts::PI / 2.0);
        assert_eq!(c.instructions[1].angle(), -std::f64::consts::PI);
        assert_eq!(c.instructions[2].angle(), 3.0 * std::f64::consts::PI / 4.0);
    }

    #[test]
    fn conditionals_unsupported() {
        let err = parse_source("qreg q[1]; creg c[1]; if (c==1) x q[0];").unwrap_err();
        assert_eq!(err, SourceError::Unsupported("if".to_string()));
    }

    #[test]
    fn unknown_gate_unsupported() {
        let err = parse_source("qreg q[1]; u3(0,0,0) q[0];").unwrap_err();
        assert_eq!(err, SourceError::Unsupported("u3".to_string()));
    }

    #[test]
    fn header_and_comments_ignored() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// entangle\nqreg q[2];\ncx q[0],q[1];\n";
        let c = parse_source(text).unwrap();
        assert_eq!(c.instructions.len(), 1);
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_source("qreg q[1]; h q[;").unwrap_err();
        match err {
            SourceError::Syntax { line, column, .. } => {
                assert_eq!(line, 1);
                assert!(column > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn write_then_parse_roundtrip() {
        let text = "qreg q[3]; creg c[2]; h q[0]; rz(0.12345678901234566) q[1]; ccz q[0],q[1],q[2]; measure q[0] -> c[0]; barrier q[0],q[1];";
        let c = parse_source(text).unwrap();
        let rewritten = write_source(&c);
        let reparsed = parse_source(&rewritten).unwrap();
        assert!(c.same_structure(&reparsed));
    }
}
