use super::builder::{embed, query_size_bound, unary_poly, Builder, BUDGET_VIOLATION_LABEL};
use crate::otm::{Instr, Machine, Reg};
use crate::sopoly::UnaryPolynomial;

/// Replaces every QUERY of `outer` by a copy of `inner` that reads the query
/// and writes its output to the answer register. The copies share one
/// register block, cleared before each use; their own queries go to the real
/// oracle. Computes `F ∘ G` where `outer` computes `F` and `inner` `G`.
pub fn inline_compose(outer: &Machine, inner: &Machine) -> Machine {
    let mut b = Builder::new();
    let outer_base = b.block(outer.register_count());
    let inner_base = b.block(inner.register_count());
    b.op(Instr::Copy(Reg(0), Reg(outer_base)));
    let mut site = 0usize;
    embed(&mut b, outer, "outer", outer_base, |b, op| match op {
        Instr::Query(s, d) => {
            site += 1;
            let back = b.fresh("return");
            for i in 1..inner.register_count() as u32 {
                b.clear(Reg(inner_base + i));
            }
            b.op(Instr::Copy(s, Reg(inner_base)));
            embed(b, inner, &format!("inner{site}"), inner_base, |b, op| match op {
                Instr::Halt(r) => {
                    b.op(Instr::Copy(r, d));
                    b.jmp(&back);
                }
                other => b.op(other),
            });
            b.place(&back);
        }
        other => b.op(other),
    });
    b.finish(format!("{}_after_{}", outer.name(), inner.name()))
}

/// `M′`: runs `outer` but sends `⟨b, B⟩` for each query `b`, where
/// `B = 1^{q_p(W)}`, `q_p(x) = x + 2p(x) + 1` and `W` is the largest of the
/// input and the answers seen. `B` is recomputed when a query does not fit;
/// if it still does not fit, `p` was not a step-count and the machine halts
/// on [`BUDGET_VIOLATION_LABEL`].
pub fn tag_queries(outer: &Machine, p: &UnaryPolynomial) -> Machine {
    let bound = query_size_bound(p);
    let mut b = Builder::new();
    let base = b.block(outer.register_count());
    let [w, budget, tagged, empty] = [(); 4].map(|_| b.reg());
    b.clear(empty);
    b.op(Instr::LenU(Reg(0), w));
    unary_poly(&mut b, &bound, w, budget);
    b.op(Instr::Copy(Reg(0), Reg(base)));
    embed(&mut b, outer, "m", base, |b, op| match op {
        Instr::Query(s, d) => {
            let (fits, seen) = (b.fresh("fits"), b.fresh("seen"));
            let go = b.fresh("go");
            b.op(Instr::Jle(s, budget, fits.clone()));
            unary_poly(b, &bound, w, budget);
            b.op(Instr::Jle(s, budget, go.clone()));
            b.jmp(BUDGET_VIOLATION_LABEL);
            b.place(&fits);
            b.place(&go);
            b.op(Instr::Pair(s, budget, tagged));
            b.op(Instr::Query(tagged, d));
            b.op(Instr::Jle(d, w, seen.clone()));
            b.op(Instr::LenU(d, w));
            b.place(&seen);
        }
        other => b.op(other),
    });
    b.place(BUDGET_VIOLATION_LABEL);
    b.op(Instr::Halt(empty));
    b.finish(format!("{}_tagged", outer.name()))
}

/// `N′`: on `⟨b, B⟩` asks `1^{q_q(|B|)}` first, then runs `inner` on `b`.
/// Inputs that are not pairs yield ε.
pub fn primed_inner(inner: &Machine, q: &UnaryPolynomial) -> Machine {
    let bound = query_size_bound(q);
    let mut b = Builder::new();
    let base = b.block(inner.register_count());
    let [budget, check, prime, sink, empty] = [(); 5].map(|_| b.reg());
    b.clear(empty);
    b.op(Instr::Proj1(Reg(0), Reg(base)));
    b.op(Instr::Proj2(Reg(0), budget));
    b.op(Instr::Pair(Reg(base), budget, check));
    let ok = b.fresh("tagged");
    b.op(Instr::Jeq(check, Reg(0), ok.clone()));
    b.op(Instr::Halt(empty));
    b.place(&ok);
    unary_poly(&mut b, &bound, budget, prime);
    b.op(Instr::Query(prime, sink));
    embed(&mut b, inner, "m", base, |b, op| b.op(op));
    b.finish(format!("{}_primed", inner.name()))
}

/// `inline_compose(M′, N′)`: the same operator as `inline_compose(outer,
/// inner)` with a number of lookahead revisions bounded independently of the
/// oracle when `outer` has one lookahead revision.
pub fn budgeted_compose(
    outer: &Machine,
    p: &UnaryPolynomial,
    inner: &Machine,
    q: &UnaryPolynomial,
) -> Machine {
    inline_compose(&tag_queries(outer, p), &primed_inner(inner, q)).with_name(format!(
        "{}_budgeted_{}",
        outer.name(),
        inner.name()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::otm::{metrics, parse_machine_text, run, FiniteTable, Oracle};
    use crate::strings::bits;

    #[test]
    fn identity_query_composition() {
        let m = parse_machine_text("QUERY r0 r1\nHALT r1").unwrap();
        let c = inline_compose(&m, &m);
        let o = Oracle::Table(
            FiniteTable::new(bits("")).with(bits("1"), bits("00")).with(bits("00"), bits("111")),
        );
        let t = run(&c, &o, &bits("1"), 1000).unwrap();
        assert_eq!(t.output, bits("00"));
        assert_eq!(t.events.len(), 1);
        let twice = inline_compose(&parse_machine_text("QUERY r0 r1\nQUERY r1 r1\nHALT r1").unwrap(), &m);
        let t = run(&twice, &o, &bits("1"), 1000).unwrap();
        assert_eq!(t.output, bits("111"));
        assert_eq!(t.events.len(), 2);
        assert_eq!(metrics(&t).lookahead_revisions, 2);
    }

    #[test]
    fn budgeted_matches_inline() {
        let zm = crate::operators::build_zeromax_machine();
        let g = crate::operators::build_selfcomp_machine();
        let o = Oracle::Rule(crate::otm::BuiltinRule::Selfcomp { k: 4 });
        let plain = inline_compose(&zm, &g);
        let budgeted = budgeted_compose(&zm, &"5n^2+20n+20".parse().unwrap(), &g, &"3".parse().unwrap());
        for a in ["", "0", "00", "0000", "1111"] {
            let a = bits(a);
            let x = run(&plain, &o, &a, 1_000_000).unwrap();
            let y = run(&budgeted, &o, &a, 10_000_000).unwrap();
            assert_eq!(x.output, y.output);
        }
    }
}
