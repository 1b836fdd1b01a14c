use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::strings::BitString;

/// A register index; `r0` holds the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg(pub u32);

impl Reg {
    pub const INPUT: Reg = Reg(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn offset(self, by: u32) -> Reg {
        Reg(self.0 + by)
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// One instruction; `L` is the jump-target type (label name or resolved pc).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instr<L> {
    /// `dst := bits`
    Const(Reg, BitString),
    /// `dst := src`
    Copy(Reg, Reg),
    /// `dst := dst · src`
    Append(Reg, Reg),
    /// `dst := dst · bit`
    AppendBit(bool, Reg),
    DropLast(Reg),
    /// `dst := dst^{≤|len|}`
    Trunc(Reg, Reg),
    /// `dst := 1^{|src|}`
    LenU(Reg, Reg),
    /// `dst := ⟨a, b⟩`
    Pair(Reg, Reg, Reg),
    Proj1(Reg, Reg),
    Proj2(Reg, Reg),
    /// `dst := φ(src)`
    Query(Reg, Reg),
    Jmp(L),
    /// jump if ε
    Jz(Reg, L),
    /// jump if `|a| ≤ |b|`
    Jle(Reg, Reg, L),
    Jeq(Reg, Reg, L),
    /// jump if `a ⊆ b`
    Jprefix(Reg, Reg, L),
    /// branch on the first bit; ε falls through
    FirstBit(Reg, L, L),
    Halt(Reg),
}

impl<L> Instr<L> {
    pub fn map_labels<M>(self, mut f: impl FnMut(L) -> M) -> Instr<M> {
        use Instr::*;
        match self {
            Const(r, b) => Const(r, b),
            Copy(a, b) => Copy(a, b),
            Append(a, b) => Append(a, b),
            AppendBit(x, r) => AppendBit(x, r),
            DropLast(r) => DropLast(r),
            Trunc(a, b) => Trunc(a, b),
            LenU(a, b) => LenU(a, b),
            Pair(a, b, c) => Pair(a, b, c),
            Proj1(a, b) => Proj1(a, b),
            Proj2(a, b) => Proj2(a, b),
            Query(a, b) => Query(a, b),
            Jmp(l) => Jmp(f(l)),
            Jz(r, l) => Jz(r, f(l)),
            Jle(a, b, l) => Jle(a, b, f(l)),
            Jeq(a, b, l) => Jeq(a, b, f(l)),
            Jprefix(a, b, l) => Jprefix(a, b, f(l)),
            FirstBit(r, l0, l1) => {
                let l0 = f(l0);
                FirstBit(r, l0, f(l1))
            }
            Halt(r) => Halt(r),
        }
    }

    pub fn map_regs(self, f: impl Fn(Reg) -> Reg) -> Instr<L> {
        use Instr::*;
        match self {
            Const(r, b) => Const(f(r), b),
            Copy(a, b) => Copy(f(a), f(b)),
            Append(a, b) => Append(f(a), f(b)),
            AppendBit(x, r) => AppendBit(x, f(r)),
            DropLast(r) => DropLast(f(r)),
            Trunc(a, b) => Trunc(f(a), f(b)),
            LenU(a, b) => LenU(f(a), f(b)),
            Pair(a, b, c) => Pair(f(a), f(b), f(c)),
            Proj1(a, b) => Proj1(f(a), f(b)),
            Proj2(a, b) => Proj2(f(a), f(b)),
            Query(a, b) => Query(f(a), f(b)),
            Jmp(l) => Jmp(l),
            Jz(r, l) => Jz(f(r), l),
            Jle(a, b, l) => Jle(f(a), f(b), l),
            Jeq(a, b, l) => Jeq(f(a), f(b), l),
            Jprefix(a, b, l) => Jprefix(f(a), f(b), l),
            FirstBit(r, l0, l1) => FirstBit(f(r), l0, l1),
            Halt(r) => Halt(f(r)),
        }
    }

    pub fn registers(&self) -> Vec<Reg> {
        use Instr::*;
        match self {
            Const(r, _) | AppendBit(_, r) | DropLast(r) | Jz(r, _) | FirstBit(r, _, _) | Halt(r) => {
                vec![*r]
            }
            Copy(a, b)
            | Append(a, b)
            | Trunc(a, b)
            | LenU(a, b)
            | Proj1(a, b)
            | Proj2(a, b)
            | Query(a, b)
            | Jle(a, b, _)
            | Jeq(a, b, _)
            | Jprefix(a, b, _) => vec![*a, *b],
            Pair(a, b, c) => vec![*a, *b, *c],
            Jmp(_) => vec![],
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        use Instr::*;
        match self {
            Const(..) => "CONST",
            Copy(..) => "COPY",
            Append(..) => "APPEND",
            AppendBit(..) => "APPENDBIT",
            DropLast(..) => "DROPLAST",
            Trunc(..) => "TRUNC",
            LenU(..) => "LENU",
            Pair(..) => "PAIR",
            Proj1(..) => "PROJ1",
            Proj2(..) => "PROJ2",
            Query(..) => "QUERY",
            Jmp(..) => "JMP",
            Jz(..) => "JZ",
            Jle(..) => "JLE",
            Jeq(..) => "JEQ",
            Jprefix(..) => "JPREFIX",
            FirstBit(..) => "FIRSTBIT",
            Halt(..) => "HALT",
        }
    }
}

impl<L: fmt::Display> fmt::Display for Instr<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Instr::*;
        let m = self.mnemonic();
        match self {
            Const(r, b) if b.is_empty() => write!(f, "{m} {r}"),
            Const(r, b) => write!(f, "{m} {r} {b}"),
            Copy(a, b)
            | Append(a, b)
            | Trunc(a, b)
            | LenU(a, b)
            | Proj1(a, b)
            | Proj2(a, b)
            | Query(a, b) => write!(f, "{m} {a} {b}"),
            AppendBit(x, r) => write!(f, "{m} {} {r}", u8::from(*x)),
            DropLast(r) | Halt(r) => write!(f, "{m} {r}"),
            Pair(a, b, c) => write!(f, "{m} {a} {b} {c}"),
            Jmp(l) => write!(f, "{m} {l}"),
            Jz(r, l) => write!(f, "{m} {r} {l}"),
            Jle(a, b, l) | Jeq(a, b, l) | Jprefix(a, b, l) => write!(f, "{m} {a} {b} {l}"),
            FirstBit(r, l0, l1) => write!(f, "{m} {r} {l0} {l1}"),
        }
    }
}

/// A line of symbolic machine text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Line {
    Label(String),
    Op(Instr<String>),
}

/// Symbolic program: labels are names until assembled.
pub type Program = Vec<Line>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("line {line}: undefined label {label:?}")]
    UndefinedLabel { line: usize, label: String },
    #[error("line {line}: duplicate label {label:?}")]
    DuplicateLabel { line: usize, label: String },
    #[error("program has no instructions")]
    Empty,
}

/// An assembled, closed program over the oracle-machine IR.
#[derive(Clone, PartialEq, Eq)]
pub struct Machine {
    name: String,
    instrs: Vec<Instr<usize>>,
    labels: BTreeMap<usize, Vec<String>>,
    registers: usize,
}

impl Machine {
    /// Resolves labels. `line_numbers[i]` (if given) is the source line of `lines[i]`.
    pub fn assemble_with_lines(
        name: impl Into<String>,
        lines: Program,
        line_numbers: Option<&[usize]>,
    ) -> Result<Machine, MachineError> {
        let line_of = |i: usize| line_numbers.map(|ln| ln[i]).unwrap_or(i + 1);
        let mut table: HashMap<String, usize> = HashMap::new();
        let mut labels: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        let mut pc = 0usize;
        for (i, line) in lines.iter().enumerate() {
            match line {
                Line::Label(l) => {
                    if table.insert(l.clone(), pc).is_some() {
                        return Err(MachineError::DuplicateLabel { line: line_of(i), label: l.clone() });
                    }
                    labels.entry(pc).or_default().push(l.clone());
                }
                Line::Op(_) => pc += 1,
            }
        }
        if pc == 0 {
            return Err(MachineError::Empty);
        }
        let mut instrs = Vec::with_capacity(pc);
        let mut registers = 1usize;
        for (i, line) in lines.into_iter().enumerate() {
            if let Line::Op(op) = line {
                for r in op.registers() {
                    registers = registers.max(r.index() + 1);
                }
                let mut missing = None;
                let resolved = op.map_labels(|l| match table.get(&l) {
                    Some(&t) => t,
                    None => {
                        missing.get_or_insert(l);
                        usize::MAX
                    }
                });
                if let Some(label) = missing {
                    return Err(MachineError::UndefinedLabel { line: line_of(i), label });
                }
                instrs.push(resolved);
            }
        }
        Ok(Machine { name: name.into(), instrs, labels, registers })
    }

    pub fn assemble(name: impl Into<String>, lines: Program) -> Result<Machine, MachineError> {
        Self::assemble_with_lines(name, lines, None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn instrs(&self) -> &[Instr<usize>] {
        &self.instrs
    }

    pub fn register_count(&self) -> usize {
        self.registers
    }

    /// Label names attached to `pc`.
    pub fn labels_at(&self, pc: usize) -> &[String] {
        self.labels.get(&pc).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_label_at(&self, pc: usize, label: &str) -> bool {
        self.labels_at(pc).iter().any(|l| l == label)
    }

    /// Symbolic form; every jump target carries a label (synthesized as `L<pc>` if unnamed).
    pub fn to_program(&self) -> Program {
        let mut names: BTreeMap<usize, Vec<String>> = self.labels.clone();
        let mut targets = Vec::new();
        for op in &self.instrs {
            op.clone().map_labels(|t| targets.push(t));
        }
        for t in targets {
            let entry = names.entry(t).or_default();
            if entry.is_empty() {
                entry.push(format!("L{t}"));
            }
        }
        let name_of = |t: usize| names[&t][0].clone();
        let mut out = Vec::new();
        for pc in 0..=self.instrs.len() {
            if let Some(ls) = names.get(&pc) {
                out.extend(ls.iter().cloned().map(Line::Label));
            }
            if let Some(op) = self.instrs.get(pc) {
                out.push(Line::Op(op.clone().map_labels(name_of)));
            }
        }
        out
    }

    /// Machine text, one instruction per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("; machine {}\n", self.name);
        for line in self.to_program() {
            match line {
                Line::Label(l) => s.push_str(&format!("{l}:\n")),
                Line::Op(op) => s.push_str(&format!("    {op}\n")),
            }
        }
        s
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Machine({}, {} instrs)", self.name, self.instrs.len())
    }
}
