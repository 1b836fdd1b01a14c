//! Program assembly helpers shared by the machine transformations.

use crate::otm::{Instr, Line, Machine, Program, Reg};
use crate::sopoly::UnaryPolynomial;
use crate::strings::BitString;

/// Label on the HALT reached when a declared budget turns out to be too small.
pub const BUDGET_VIOLATION_LABEL: &str = "budget_violation";

pub type Op = Instr<String>;

/// Incremental program builder with fresh labels and registers.
pub struct Builder {
    lines: Program,
    next_label: usize,
    next_reg: u32,
}

impl Default for Builder {
    fn default() -> Self {
        Self::new()
    }
}

impl Builder {
    /// `r0` is reserved for the input.
    pub fn new() -> Self {
        Builder { lines: Vec::new(), next_label: 0, next_reg: 1 }
    }

    pub fn reg(&mut self) -> Reg {
        let r = Reg(self.next_reg);
        self.next_reg += 1;
        r
    }

    /// Reserves `n` consecutive registers and returns the first index.
    pub fn block(&mut self, n: usize) -> u32 {
        let start = self.next_reg;
        self.next_reg += n as u32;
        start
    }

    pub fn fresh(&mut self, hint: &str) -> String {
        self.next_label += 1;
        format!("${}.{hint}", self.next_label)
    }

    pub fn place(&mut self, label: &str) {
        self.lines.push(Line::Label(label.to_string()));
    }

    pub fn op(&mut self, op: Op) {
        self.lines.push(Line::Op(op));
    }

    pub fn ops(&mut self, ops: impl IntoIterator<Item = Op>) {
        for op in ops {
            self.op(op);
        }
    }

    pub fn jmp(&mut self, label: &str) {
        self.op(Instr::Jmp(label.to_string()));
    }

    pub fn clear(&mut self, r: Reg) {
        self.op(Instr::Const(r, BitString::empty()));
    }

    pub fn finish(self, name: impl Into<String>) -> Machine {
        Machine::assemble(name, self.lines).expect("generated program is closed")
    }
}

/// Copies `m` into the builder, prefixing labels and shifting registers by
/// `offset`. Each instruction goes through `emit`, which may rewrite it.
pub fn embed(
    b: &mut Builder,
    m: &Machine,
    prefix: &str,
    offset: u32,
    mut emit: impl FnMut(&mut Builder, Op),
) {
    for line in m.to_program() {
        match line {
            Line::Label(l) => b.place(&format!("{prefix}.{l}")),
            Line::Op(op) => {
                let op = op.map_labels(|l| format!("{prefix}.{l}")).map_regs(|r| r.offset(offset));
                emit(b, op);
            }
        }
    }
}

/// `out := 1^{p(|x|)}` by Horner's rule with unary multiplication loops.
pub fn unary_poly(b: &mut Builder, p: &UnaryPolynomial, x: Reg, out: Reg) {
    let coeffs = p.coeffs();
    let Some((&lead, rest)) = coeffs.split_last() else {
        b.clear(out);
        return;
    };
    let (acc, prod, count) = (b.reg(), b.reg(), b.reg());
    b.op(Instr::Const(acc, BitString::ones(lead as usize)));
    for &c in rest.iter().rev() {
        let (top, done) = (b.fresh("mul"), b.fresh("mul_done"));
        b.clear(prod);
        b.op(Instr::Copy(acc, count));
        b.place(&top);
        b.op(Instr::Jz(count, done.clone()));
        b.op(Instr::Append(x, prod));
        b.op(Instr::DropLast(count));
        b.jmp(&top);
        b.place(&done);
        b.op(Instr::Copy(prod, acc));
        if c > 0 {
            b.op(Instr::Const(count, BitString::ones(c as usize)));
            b.op(Instr::Append(count, acc));
        }
    }
    b.op(Instr::Copy(acc, out));
}

/// `dst := (01)^{|src|}`, the two-symbol encoding of `1^{|src|}`.
pub fn encoded_ones(b: &mut Builder, src: Reg, dst: Reg) {
    let count = b.reg();
    let (top, done) = (b.fresh("ones"), b.fresh("ones_done"));
    b.clear(dst);
    b.op(Instr::Copy(src, count));
    b.place(&top);
    b.op(Instr::Jz(count, done.clone()));
    b.op(Instr::AppendBit(false, dst));
    b.op(Instr::AppendBit(true, dst));
    b.op(Instr::DropLast(count));
    b.jmp(&top);
    b.place(&done);
}

/// `dst := dbl(src)` (each bit doubled with a leading 0); `empty` must hold ε.
pub fn encode_bits(b: &mut Builder, src: Reg, empty: Reg, dst: Reg) {
    b.op(Instr::Pair(src, empty, dst));
    b.op(Instr::DropLast(dst));
    b.op(Instr::DropLast(dst));
}

/// If `src = dbl(v)` set `out := v`, otherwise jump to `fail`.
pub fn decode_bits(b: &mut Builder, src: Reg, empty: Reg, out: Reg, fail: &str) {
    let (x, check) = (b.reg(), b.reg());
    let ok = b.fresh("decoded");
    b.op(Instr::Copy(src, x));
    b.op(Instr::AppendBit(true, x));
    b.op(Instr::AppendBit(true, x));
    b.op(Instr::Proj1(x, out));
    b.op(Instr::Pair(out, empty, check));
    b.op(Instr::Jeq(check, x, ok.clone()));
    b.jmp(fail);
    b.place(&ok);
}

/// `n + 2p(n) + 1`: no register can outgrow `m + 2·steps`, so this bounds
/// every query of a machine with step-count `p` while its answers stay `≤ n`.
pub fn query_size_bound(p: &UnaryPolynomial) -> UnaryPolynomial {
    p.scale(2).add(&UnaryPolynomial::identity()).add(&UnaryPolynomial::constant(1))
}

/// Whether a run ended on the budget-violation HALT.
pub fn is_budget_violation(m: &Machine, t: &crate::otm::Trace) -> bool {
    t.halted_at_label(m, BUDGET_VIOLATION_LABEL)
}
