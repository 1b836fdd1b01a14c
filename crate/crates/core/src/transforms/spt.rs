use super::builder::{embed, query_size_bound, unary_poly, Builder, Op, BUDGET_VIOLATION_LABEL};
use crate::otm::{Instr, Machine, Reg};
use crate::sopoly::UnaryPolynomial;
use crate::strings::BitString;

/// Appends the cost of `op` (under the interpreter's cost model) to `used`, in unary.
pub(crate) fn charge(b: &mut Builder, op: &Op, used: Reg, t1: Reg, t2: Reg) {
    use Instr::*;
    match op {
        Const(_, bits) => {
            b.op(Const(t1, BitString::ones(bits.len() + 1)));
            b.op(Append(t1, used));
        }
        Copy(s, _) | Append(s, _) | LenU(s, _) | Proj1(s, _) | Proj2(s, _) => {
            b.op(LenU(*s, t1));
            b.op(AppendBit(true, t1));
            b.op(Append(t1, used));
        }
        Trunc(l, d) => {
            b.op(LenU(*d, t1));
            b.op(Trunc(*l, t1));
            b.op(AppendBit(true, t1));
            b.op(Append(t1, used));
        }
        Pair(x, y, _) => {
            b.op(LenU(*x, t1));
            b.op(LenU(*y, t2));
            b.op(Append(t2, t1));
            b.op(AppendBit(true, t1));
            b.op(Append(t1, used));
        }
        Jle(x, y, _) | Jeq(x, y, _) | Jprefix(x, y, _) => {
            let keep = b.fresh("max");
            b.op(LenU(*x, t1));
            b.op(LenU(*y, t2));
            b.op(Jle(t2, t1, keep.clone()));
            b.op(Copy(t2, t1));
            b.place(&keep);
            b.op(AppendBit(true, t1));
            b.op(Append(t1, used));
        }
        AppendBit(..) | DropLast(_) | Query(..) | Jmp(_) | Jz(..) | FirstBit(..) | Halt(_) => {
            b.op(AppendBit(true, used));
        }
    }
}

/// Phase simulation of a machine with step-count `p` and at most `r` length
/// revisions.
///
/// The wrapper keeps a watermark `W` (largest of `|a|` and all answers), a
/// step budget `B = p(W)` and the steps used so far `U`, all in unary. Every
/// phase opens with the priming query `1^{|W| + 2p(|W|) + 1}`, which no query
/// of the subject can exceed while `U ≤ B`. A new phase begins whenever an
/// answer raises `W`; the simulation continues where it was rather than
/// restarting. If `U` overtakes `B` (or a query outgrows the priming query)
/// the wrapper halts on [`BUDGET_VIOLATION_LABEL`] with output ε.
///
/// `r` is not needed by the construction; phases are `≤ r + 1` whenever the
/// subject really has at most `r` length revisions.
pub fn spt_to_mpt(m: &Machine, p: &UnaryPolynomial, _r: usize) -> Machine {
    let prime_size = query_size_bound(p);
    let mut b = Builder::new();
    let offset = b.block(m.register_count());
    let [w, budget, used, prime, sink, t1, t2, empty] = [(); 8].map(|_| b.reg());

    let new_phase = |b: &mut Builder| {
        unary_poly(b, p, w, budget);
        unary_poly(b, &prime_size, w, prime);
        b.op(Instr::Query(prime, sink));
    };

    b.clear(empty);
    b.op(Instr::LenU(Reg(0), w));
    b.clear(used);
    new_phase(&mut b);
    b.op(Instr::Copy(Reg(0), Reg(offset)));

    embed(&mut b, m, "m", offset, |b, op| {
        charge(b, &op, used, t1, t2);
        let ok = b.fresh("in_budget");
        b.op(Instr::Jle(used, budget, ok.clone()));
        b.jmp(BUDGET_VIOLATION_LABEL);
        b.place(&ok);
        match op {
            Instr::Query(s, d) => {
                let (fits, same) = (b.fresh("fits"), b.fresh("same_phase"));
                b.op(Instr::Jle(s, prime, fits.clone()));
                b.jmp(BUDGET_VIOLATION_LABEL);
                b.place(&fits);
                b.op(Instr::Query(s, d));
                b.op(Instr::Jle(d, w, same.clone()));
                b.op(Instr::LenU(d, w));
                new_phase(b);
                b.place(&same);
            }
            other => b.op(other),
        }
    });

    b.place(BUDGET_VIOLATION_LABEL);
    b.op(Instr::Halt(empty));
    b.finish(format!("{}_mpt", m.name()))
}
