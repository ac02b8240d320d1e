//! Compiles a nondeterministic Turing machine with a polynomial step bound
//! into a cons-free program that accepts the same words.

mod kit;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

pub use kit::{gen_counting_order0, gen_counting_order1, CountingKit};

use crate::syntax::{parse_program, Program};
use crate::turing::{validate_machine, IndexedMachine, ACCEPT, BLANK, REJECT, START};

/// `h(n) = a * n^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepPolynomial {
    pub a: u64,
    pub b: u32,
}

impl StepPolynomial {
    pub fn new(a: u64, b: u32) -> Self {
        StepPolynomial { a, b }
    }

    pub fn eval(&self, n: u64) -> BigUint {
        BigUint::from(self.a) * BigUint::from(n).pow(self.b)
    }

    /// `h(n)`, saturated at `u64::MAX`.
    pub fn steps(&self, n: u64) -> u64 {
        u64::try_from(self.eval(n)).unwrap_or(u64::MAX)
    }
}

impl fmt::Display for StepPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

impl FromStr for StepPolynomial {
    type Err = String;

    /// Parses `a,b`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `a,b`, found `{s}`"))?;
        let a = a.trim().parse().map_err(|e| format!("bad coefficient `{a}`: {e}"))?;
        let b = b.trim().parse().map_err(|e| format!("bad exponent `{b}`: {e}"))?;
        if a == 0 {
            return Err("the coefficient must be positive".into());
        }
        Ok(StepPolynomial { a, b })
    }
}

/// The least `k` with `(n+1)^k > a * n^b` for every `n >= 1`.
///
/// For `k > b` the ratio `(n+1)^k / n^b` is smallest near `n = b / (k - b)`,
/// so checking `n <= b + 1` decides the inequality. For `k = b` it holds for
/// all `n` exactly when `a = 1`, and smaller `k` always fail for large `n`.
pub fn digit_width(a: u64, b: u32) -> usize {
    assert!(a >= 1, "the coefficient must be positive");
    if a == 1 && b >= 1 {
        return b as usize;
    }
    let h = StepPolynomial::new(a, b);
    let mut k = b + 1;
    loop {
        let fits = (1..=u64::from(b) + 1).all(|n| BigUint::from(n + 1).pow(k) > h.eval(n));
        if fits {
            return k as usize;
        }
        k += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("unsupported order {0}; expected 0 or 1")]
    UnsupportedOrder(usize),
}

fn symbol_name(s: &str) -> String {
    if s == BLANK {
        "B".into()
    } else {
        format!("sym_{s}")
    }
}

fn state_name(s: &str) -> String {
    format!("q_{s}")
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Source text of the program simulating `m` for `h(|cs|)` steps, with
/// step counters from the counting module of the given order.
pub fn compile_machine_source(m: &IndexedMachine, h: StepPolynomial, order: usize) -> Result<String, CompileError> {
    let report = validate_machine(&m.base);
    if let Some(v) = report.violations.first() {
        return Err(CompileError::InvalidMachine(v.reason.clone()));
    }
    for name in m.base.symbols.iter().chain(&m.base.states) {
        if name != BLANK && !valid_ident(name) {
            return Err(CompileError::InvalidMachine(format!("`{name}` cannot be used in a constructor name")));
        }
    }
    let k = digit_width(h.a, h.b);
    let kit = match order {
        0 => gen_counting_order0(k),
        1 => gen_counting_order1(k),
        other => return Err(CompileError::UnsupportedOrder(other)),
    };
    let n = &kit.num_type;
    let ht = format!("({n}) => option");
    let options: Vec<String> = (1..=m.c).map(|i| format!("x{i}")).collect();
    let mut out = String::new();
    let mut w = |text: String| {
        out.push_str(&text);
        out.push('\n');
    };

    w("# terminating".into());
    w(format!(
        "# Accepts the words on which the machine reaches accept within {} * n^{} steps.",
        h.a, h.b
    ));
    w(format!("# Step counters use the order-{order} counting module of width {k}."));
    for s in ["symbol", "direc", "mstate", "trans", "option"] {
        w(format!("sort {s}"));
    }
    for s in &m.base.symbols {
        w(format!("cons {} : symbol", symbol_name(s)));
    }
    w("cons L : direc".into());
    w("cons R : direc".into());
    for s in &m.base.states {
        w(format!("cons {} : mstate", state_name(s)));
    }
    w("cons action : symbol => direc => mstate => trans".into());
    w("cons end : mstate => trans".into());
    for x in &options {
        w(format!("cons {x} : option"));
    }

    let pre = if order == 0 { "" } else { "list => " };
    for decl in [
        "run : list => bool".to_string(),
        "test : mstate => bool".into(),
        format!("rndf : list => ({n}) => {ht}"),
        format!("rnf : list => option => ({n}) => {ht}"),
        format!("cst : option => {ht}"),
        format!("cmp : {pre}option => ({ht}) => ({n}) => {ht}"),
        "transition : mstate => symbol => option => trans".into(),
        format!("transat : list => ({ht}) => ({n}) => trans"),
        "get1 : trans => symbol".into(),
        "get2 : trans => direc".into(),
        "get3 : trans => mstate".into(),
        format!("state : list => ({ht}) => ({n}) => mstate"),
        format!("tapesymb : list => ({ht}) => ({n}) => symbol"),
        format!("pos : list => ({ht}) => ({n}) => {n}"),
        format!("adjust : list => ({n}) => direc => {n}"),
        format!("tape : list => ({ht}) => ({n}) => ({n}) => symbol"),
        format!("tapehelp : list => ({ht}) => ({n}) => ({n}) => ({n}) => symbol"),
        format!("inputtape : list => ({n}) => symbol"),
        format!("nth : list => list => ({n}) => symbol"),
        "bit : bool => symbol".into(),
        format!("hval : list => {n}"),
    ] {
        w(format!("fun {decl}"));
    }
    for j in 1..=h.b {
        w(format!("fun loop{j} : list => list => ({n}) => {n}"));
    }
    for d in &kit.declarations {
        w(d.clone());
    }

    let pn = kit.pred("n");
    w("# run: final state after h(|cs|) steps under a guessed choice function".into());
    w("run cs = test (state cs (rndf cs (hval cs)) (hval cs))".into());
    for s in &m.base.states {
        w(format!("test {} = {}", state_name(s), s == ACCEPT));
    }
    w("# rndf, rnf, cst, cmp: choice functions H mapping each step to an option".into());
    let pick = if options.len() == 1 {
        options[0].clone()
    } else {
        format!("choose({})", options.join(", "))
    };
    w(format!("rndf cs n = rnf cs {pick} n"));
    let cs_arg = if order == 0 { "" } else { "cs " };
    w(format!(
        "rnf cs x n = if {} then cst x else cmp {cs_arg}x (rndf cs ({pn})) n",
        kit.iszero("n")
    ));
    w("cst x i = x".into());
    w(format!("cmp {cs_arg}x H n i = if {} then x else H i", kit.eq("n", "i")));

    w("# transition: option k of the machine in state i reading r; halting states are absorbing".into());
    for s in &m.base.states {
        if s == ACCEPT || s == REJECT {
            w(format!("transition {0} s y = end {0}", state_name(s)));
            continue;
        }
        for r in &m.base.symbols {
            for kk in 1..=m.c {
                let rhs = match m.row(s, r, kk) {
                    Some(t) => format!("action {} {} {}", symbol_name(&t.write), t.dir, state_name(&t.to)),
                    None => format!("end {}", state_name(REJECT)),
                };
                w(format!("transition {} {} x{kk} = {rhs}", state_name(s), symbol_name(r)));
            }
        }
    }
    w("# transat, get1, get2, get3: the transition taken at step n and its parts".into());
    w("transat cs H n = transition (state cs H n) (tapesymb cs H n) (H n)".into());
    w("get1 (action s d q) = s".into());
    w("get1 (end q) = B".into());
    w("get2 (action s d q) = d".into());
    w("get2 (end q) = R".into());
    w("get3 (action s d q) = q".into());
    w("get3 (end q) = q".into());
    w("# state, pos, tape: machine configuration at step n".into());
    w(format!(
        "state cs H n = if {} then {} else get3 (transat cs H ({pn}))",
        kit.iszero("n"),
        state_name(START)
    ));
    w("tapesymb cs H n = tape cs H n (pos cs H n)".into());
    w(format!(
        "pos cs H n = if {} then {} else adjust cs (pos cs H ({pn})) (get2 (transat cs H ({pn})))",
        kit.iszero("n"),
        kit.zero()
    ));
    w(format!("adjust cs p L = {}", kit.pred("p")));
    w(format!("adjust cs p R = {}", kit.succ("p")));
    w(format!(
        "tape cs H n p = if {} then inputtape cs p else tapehelp cs H n p (pos cs H ({pn}))",
        kit.iszero("n")
    ));
    w(format!(
        "tapehelp cs H n p i = if {} then get1 (transat cs H ({pn})) else tape cs H ({pn}) p",
        kit.eq("p", "i")
    ));
    w("# inputtape, nth, bit: the initial tape, a blank followed by cs".into());
    w(format!(
        "inputtape cs p = if {} then B else nth cs cs ({})",
        kit.iszero("p"),
        kit.pred("p")
    ));
    w("nth cs nil p = B".into());
    w(format!(
        "nth cs (x :: xs) p = if {} then bit x else nth cs xs ({})",
        kit.iszero("p"),
        kit.pred("p")
    ));
    w(format!("bit true = {}", symbol_name("1")));
    w(format!("bit false = {}", symbol_name("0")));

    w("# hval: the step bound h(|cs|)".into());
    let bump = |start: String| (0..h.a).fold(start, |acc, _| kit.succ(&format!("({acc})")));
    if h.b == 0 {
        w(format!("hval cs = {}", bump(kit.zero())));
    } else {
        w(format!("hval cs = loop{} cs cs ({})", h.b, kit.zero()));
        for j in 1..=h.b {
            w(format!("loop{j} cs nil t = t"));
            let inner = if j == 1 { bump("t".into()) } else { format!("loop{} cs cs t", j - 1) };
            w(format!("loop{j} cs (y :: ys) t = loop{j} cs ys ({inner})"));
        }
    }
    w("# counting module".into());
    for c in &kit.clauses {
        w(c.clone());
    }
    Ok(out)
}

/// Parsed form of [`compile_machine_source`]. Its main function `run`
/// returns `true` on `cs` exactly when the machine accepts `cs` within
/// `h(|cs|)` steps.
pub fn compile_machine(m: &IndexedMachine, h: StepPolynomial, order: usize) -> Result<Program, CompileError> {
    let text = compile_machine_source(m, h, order)?;
    let mut p = parse_program(&text).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{text}"));
    p.terminating = true;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_cons_free, check_immutability, typecheck};
    use crate::interp::{enumerate_results, DEFAULT_FUEL};
    use crate::transform::verify_order_collapsed;
    use crate::turing::{index_options, parse_machine, run_machine};
    use crate::value::Value;

    const CONTAINS11: &str = "symbols: 0 1 _\nstates: start scan seen1 accept reject\n\
        start _ -> _ R scan\nscan 0 -> 0 R scan\nscan 1 -> 1 R scan\nscan 1 -> 1 R seen1\nseen1 1 -> 1 R accept\n";

    /// Reference for the width, checked over a range of `n`.
    fn brute_width(a: u64, b: u32) -> usize {
        (1..)
            .find(|&k: &u32| (1..=2000u128).all(|n| (n + 1).pow(k) > a as u128 * n.pow(b)))
            .unwrap() as usize
    }

    #[test]
    fn digit_widths() {
        assert_eq!(digit_width(1, 1), 1);
        assert_eq!(digit_width(4, 2), 3);
        assert_eq!(digit_width(1, 0), 1);
        assert_eq!(digit_width(2, 1), 2);
        for a in 1..=6 {
            for b in 0..=4 {
                assert_eq!(digit_width(a, b), brute_width(a, b), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn polynomial_parsing() {
        assert_eq!("2,1".parse::<StepPolynomial>(), Ok(StepPolynomial::new(2, 1)));
        assert!("0,1".parse::<StepPolynomial>().is_err());
        assert!("2".parse::<StepPolynomial>().is_err());
        assert_eq!(StepPolynomial::new(3, 2).steps(4), 48);
    }

    #[test]
    fn order0_program_is_well_formed() {
        let m = index_options(&parse_machine(CONTAINS11).unwrap());
        let p = compile_machine(&m, StepPolynomial::new(2, 1), 0).unwrap();
        let tp = typecheck(&p).unwrap();
        assert!(check_cons_free(&p).passed());
        assert!(check_immutability(&tp, 1).passed(), "{}", check_immutability(&tp, 1));
        assert!(verify_order_collapsed(&tp).passed());
    }

    #[test]
    fn order0_program_agrees_with_search() {
        let raw = parse_machine(CONTAINS11).unwrap();
        let m = index_options(&raw);
        let h = StepPolynomial::new(2, 1);
        let p = compile_machine(&m, h, 0).unwrap();
        for word in ["", "1", "11", "0110", "0100", "101"] {
            let bits = crate::turing::word_bits(word).unwrap();
            let expect = run_machine(&raw, &bits, h.steps(bits.len() as u64)).unwrap().accepted;
            let out = enumerate_results(&p, &[Value::bool_list(&bits)], DEFAULT_FUEL).unwrap();
            assert_eq!(out.results.contains(&Value::boolean(true)), expect, "word {word:?}");
        }
    }

    #[test]
    fn order1_program() {
        let raw = parse_machine(CONTAINS11).unwrap();
        let m = index_options(&raw);
        let p = compile_machine(&m, StepPolynomial::new(2, 1), 1).unwrap();
        let tp = typecheck(&p).unwrap();
        assert!(check_cons_free(&p).passed());
        assert!(check_immutability(&tp, 2).passed(), "{}", check_immutability(&tp, 2));
        for word in ["", "1", "0", "11"] {
            let bits = crate::turing::word_bits(word).unwrap();
            let out = enumerate_results(&p, &[Value::bool_list(&bits)], u64::MAX).unwrap();
            assert_eq!(out.results.contains(&Value::boolean(true)), word == "11", "{out:?}");
        }
    }
}
