use thiserror::Error;

use super::machine::{Instr, Line, Machine, MachineError, Reg};
use crate::strings::BitString;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unknown opcode {opcode:?}")]
    UnknownOpcode { line: usize, opcode: String },
    #[error("line {line}: bad register {token:?}")]
    BadRegister { line: usize, token: String },
    #[error("line {line}: bad operand {token:?}: {reason}")]
    BadOperand { line: usize, token: String, reason: &'static str },
    #[error("line {line}: {opcode} expects {expected} operand(s), found {found}")]
    Arity { line: usize, opcode: String, expected: &'static str, found: usize },
    #[error("line {line}: bad label {label:?}")]
    BadLabel { line: usize, label: String },
    #[error(transparent)]
    Assemble(#[from] MachineError),
}

fn reg(line: usize, tok: &str) -> Result<Reg, ParseError> {
    tok.strip_prefix('r')
        .and_then(|d| if d.chars().all(|c| c.is_ascii_digit()) { d.parse().ok() } else { None })
        .map(Reg)
        .ok_or_else(|| ParseError::BadRegister { line, token: tok.to_string() })
}

fn label(line: usize, tok: &str) -> Result<String, ParseError> {
    let ok =
        !tok.is_empty() && tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '$');
    if ok {
        Ok(tok.to_string())
    } else {
        Err(ParseError::BadLabel { line, label: tok.to_string() })
    }
}

fn parse_op(line: usize, toks: &[&str]) -> Result<Instr<String>, ParseError> {
    let opcode = toks[0].to_ascii_uppercase();
    let args = &toks[1..];
    let arity = |expected: &'static str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(ParseError::Arity { line, opcode: opcode.clone(), expected, found: args.len() })
        }
    };
    let r = |i: usize| reg(line, args[i]);
    let l = |i: usize| label(line, args[i]);
    use Instr::*;
    Ok(match opcode.as_str() {
        "CONST" => {
            arity("1 or 2", args.len() == 1 || args.len() == 2)?;
            let bits = match args.get(1) {
                None => BitString::empty(),
                Some(t) => t.parse().map_err(|_| ParseError::BadOperand {
                    line,
                    token: t.to_string(),
                    reason: "expected a bit literal",
                })?,
            };
            Const(r(0)?, bits)
        }
        "COPY" | "APPEND" | "TRUNC" | "LENU" | "PROJ1" | "PROJ2" | "QUERY" => {
            arity("2", args.len() == 2)?;
            let (a, b) = (r(0)?, r(1)?);
            match opcode.as_str() {
                "COPY" => Copy(a, b),
                "APPEND" => Append(a, b),
                "TRUNC" => Trunc(a, b),
                "LENU" => LenU(a, b),
                "PROJ1" => Proj1(a, b),
                "PROJ2" => Proj2(a, b),
                _ => Query(a, b),
            }
        }
        "APPENDBIT" => {
            arity("2", args.len() == 2)?;
            let bit = match args[0] {
                "0" => false,
                "1" => true,
                t => {
                    return Err(ParseError::BadOperand {
                        line,
                        token: t.to_string(),
                        reason: "expected 0 or 1",
                    })
                }
            };
            AppendBit(bit, r(1)?)
        }
        "DROPLAST" => {
            arity("1", args.len() == 1)?;
            DropLast(r(0)?)
        }
        "HALT" => {
            arity("1", args.len() == 1)?;
            Halt(r(0)?)
        }
        "PAIR" => {
            arity("3", args.len() == 3)?;
            Pair(r(0)?, r(1)?, r(2)?)
        }
        "JMP" => {
            arity("1", args.len() == 1)?;
            Jmp(l(0)?)
        }
        "JZ" => {
            arity("2", args.len() == 2)?;
            Jz(r(0)?, l(1)?)
        }
        "JLE" | "JEQ" | "JPREFIX" => {
            arity("3", args.len() == 3)?;
            let (a, b, t) = (r(0)?, r(1)?, l(2)?);
            match opcode.as_str() {
                "JLE" => Jle(a, b, t),
                "JEQ" => Jeq(a, b, t),
                _ => Jprefix(a, b, t),
            }
        }
        "FIRSTBIT" => {
            arity("3", args.len() == 3)?;
            FirstBit(r(0)?, l(1)?, l(2)?)
        }
        _ => return Err(ParseError::UnknownOpcode { line, opcode: toks[0].to_string() }),
    })
}

/// Parses machine text. A leading `; machine <name>` comment names the machine.
pub fn parse_machine_text(source: &str) -> Result<Machine, ParseError> {
    let mut name = String::from("anonymous");
    let mut lines = Vec::new();
    let mut numbers = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        if let Some(rest) = raw.trim_start().strip_prefix("; machine ") {
            if lines.is_empty() {
                name = rest.trim().to_string();
            }
        }
        let mut text = raw.split(';').next().unwrap_or("").trim();
        while let Some(colon) = text.find(':') {
            let (lab, rest) = text.split_at(colon);
            lines.push(Line::Label(label(line_no, lab.trim())?));
            numbers.push(line_no);
            text = rest[1..].trim();
        }
        if text.is_empty() {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        lines.push(Line::Op(parse_op(line_no, &toks)?));
        numbers.push(line_no);
    }
    Ok(Machine::assemble_with_lines(name, lines, Some(&numbers))?)
}
