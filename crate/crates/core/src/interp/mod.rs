//! Evaluation: a single nondeterministic run, the full result set, and the
//! finite data universe `B` of a program and its inputs.

mod eval;
mod memo;
pub(crate) mod runtime;

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{Expr, Pattern, Program};
use crate::value::Value;

pub use eval::{Chooser, RandomChooser, ScriptedChooser};
use eval::{Evaluator, Halt};
use memo::{MemoEvaluator, MemoHalt};
use runtime::{Compiled, Heap, Node, Vid};

/// Clause firings allowed when the caller does not say otherwise.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("evaluation is stuck: {0}")]
    Stuck(String),
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("bad input: {0}")]
    BadInput(String),
}

impl From<Halt> for EvalError {
    fn from(h: Halt) -> Self {
        match h {
            Halt::Stuck(m) => EvalError::Stuck(m),
            Halt::Fuel => EvalError::FuelExhausted,
        }
    }
}

/// How [`enumerate_with`] explores the nondeterministic choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Tabled set semantics for programs marked terminating, paths otherwise.
    Auto,
    /// Backtracking over every sequence of choices.
    Paths,
    /// Tabled set semantics; falls back to paths if a call depends on itself.
    Memo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub results: BTreeSet<Value>,
    /// No path ran out of fuel, so `results` is the complete result set.
    pub exhausted: bool,
    pub strategy: Strategy,
}

impl EvalOutcome {
    pub fn rendered(&self) -> Vec<String> {
        self.results.iter().map(Value::to_string).collect()
    }
}

const STACK_BYTES: usize = 1 << 30;

/// Runs `f` on a thread with a large stack; evaluation recurses deeply.
pub(crate) fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("spawn evaluation thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

fn entry(p: &Program, name: &str, inputs: &[Value]) -> Result<(Compiled, Heap, u32, Vec<Vid>), EvalError> {
    let ty = p
        .function_type(name)
        .ok_or_else(|| EvalError::BadInput(format!("unknown function `{name}`")))?;
    let params = ty.uncurry().0.len();
    if inputs.len() != params {
        return Err(EvalError::BadInput(format!(
            "`{name}` takes {params} arguments, got {}",
            inputs.len()
        )));
    }
    let prog = Compiled::new(p);
    let mut heap = Heap::default();
    let args = inputs
        .iter()
        .map(|v| prog.import(&mut heap, v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(EvalError::BadInput)?;
    let fid = prog.fun_index[name];
    Ok((prog, heap, fid, args))
}

/// Evaluates `main` on `inputs`, resolving each `choose` with `chooser`.
pub fn evaluate_one(
    p: &Program,
    inputs: &[Value],
    chooser: &mut (dyn Chooser + Send),
    fuel: u64,
) -> Result<Value, EvalError> {
    let (prog, mut heap, fid, args) = entry(p, &p.main, inputs)?;
    with_big_stack(|| {
        let mut ev = Evaluator {
            prog: &prog,
            heap: &mut heap,
            chooser,
            fuel,
        };
        let v = ev.apply_fun(fid, args)?;
        Ok(prog.export(&heap, v))
    })
}

/// All results of `main` on `inputs` reachable within `fuel` clause firings
/// per path.
pub fn enumerate_results(p: &Program, inputs: &[Value], fuel: u64) -> Result<EvalOutcome, EvalError> {
    enumerate_with(p, &p.main, inputs, fuel, Strategy::Auto)
}

/// Like [`enumerate_results`] for any function `name` and strategy.
pub fn enumerate_with(
    p: &Program,
    name: &str,
    inputs: &[Value],
    fuel: u64,
    strategy: Strategy,
) -> Result<EvalOutcome, EvalError> {
    let (prog, mut heap, fid, args) = entry(p, name, inputs)?;
    let (out, _) = with_big_stack(|| run(&prog, &mut heap, fid, args, fuel, strategy, p.terminating))?;
    Ok(out)
}

fn run(
    prog: &Compiled,
    heap: &mut Heap,
    fid: u32,
    args: Vec<Vid>,
    fuel: u64,
    strategy: Strategy,
    terminating: bool,
) -> Result<(EvalOutcome, Vec<Vid>), EvalError> {
    let memo = match strategy {
        Strategy::Auto => terminating,
        Strategy::Paths => false,
        Strategy::Memo => true,
    };
    if memo {
        let mut ev = MemoEvaluator::new(prog, heap);
        match ev.apply_fun(fid, args.clone()) {
            Ok(rs) => {
                let exhausted = rs.iter().all(|r| r.max <= fuel);
                let ids: Vec<Vid> = rs.iter().filter(|r| r.min <= fuel).map(|r| r.value).collect();
                let results = ids.iter().map(|&v| prog.export(heap, v)).collect();
                return Ok((
                    EvalOutcome {
                        results,
                        exhausted,
                        strategy: Strategy::Memo,
                    },
                    ids,
                ));
            }
            Err(MemoHalt::Stuck(m)) => return Err(EvalError::Stuck(m)),
            Err(MemoHalt::Cycle) => {}
        }
    }
    let mut trace: Vec<(usize, usize)> = Vec::new();
    let mut ids = BTreeSet::new();
    let mut exhausted = true;
    loop {
        let mut chooser = Replay {
            trace: &mut trace,
            pos: 0,
        };
        let mut ev = Evaluator {
            prog,
            heap,
            chooser: &mut chooser,
            fuel,
        };
        match ev.apply_fun(fid, args.clone()) {
            Ok(v) => {
                ids.insert(v);
            }
            Err(Halt::Fuel) => exhausted = false,
            Err(Halt::Stuck(m)) => return Err(EvalError::Stuck(m)),
        }
        loop {
            match trace.last_mut() {
                None => {
                    let results = ids.iter().map(|&v| prog.export(heap, v)).collect();
                    return Ok((
                        EvalOutcome {
                            results,
                            exhausted,
                            strategy: Strategy::Paths,
                        },
                        ids.into_iter().collect(),
                    ));
                }
                Some(last) if last.0 + 1 < last.1 => {
                    last.0 += 1;
                    break;
                }
                Some(_) => {
                    trace.pop();
                }
            }
        }
    }
}

/// Follows a recorded prefix of choices, extending it with first choices.
struct Replay<'a> {
    trace: &'a mut Vec<(usize, usize)>,
    pos: usize,
}

impl Chooser for Replay<'_> {
    fn choose(&mut self, alternatives: usize) -> usize {
        if self.pos == self.trace.len() {
            self.trace.push((0, alternatives));
        }
        let pick = self.trace[self.pos].0;
        self.pos += 1;
        pick
    }
}

/// Matches argument values against a clause's patterns.
pub fn match_clause(patterns: &[Pattern], args: &[Value]) -> Option<BTreeMap<String, Value>> {
    fn go(p: &Pattern, v: &Value, out: &mut BTreeMap<String, Value>) -> bool {
        match (p, v) {
            (Pattern::Var(x), _) => {
                out.insert(x.clone(), v.clone());
                true
            }
            (Pattern::Cons(c, ps), Value::Cons(d, vs)) => {
                c == d && ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| go(p, v, out))
            }
            (Pattern::Pair(pa, pb), Value::Pair(va, vb)) => go(pa, va, out) && go(pb, vb, out),
            _ => false,
        }
    }
    if patterns.len() != args.len() {
        return None;
    }
    let mut out = BTreeMap::new();
    patterns
        .iter()
        .zip(args)
        .all(|(p, v)| go(p, v, &mut out))
        .then_some(out)
}

/// The data universe `B`: data occurring in the inputs or as closed data in
/// a clause body, closed under subterms and grouped by sort. Pairs are
/// split into their components.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DataUniverse {
    pub by_sort: BTreeMap<String, BTreeSet<Value>>,
}

impl DataUniverse {
    pub fn sort(&self, name: &str) -> impl Iterator<Item = &Value> {
        self.by_sort.get(name).into_iter().flatten()
    }

    pub fn contains(&self, v: &Value) -> bool {
        match v {
            Value::Pair(a, b) => self.contains(a) && self.contains(b),
            _ => self.by_sort.values().any(|s| s.contains(v)),
        }
    }

    pub fn len(&self) -> usize {
        self.by_sort.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn closed_data(e: &Expr) -> Option<Value> {
    match e {
        Expr::ConsApp(c, args) => Some(Value::Cons(
            c.clone(),
            args.iter().map(closed_data).collect::<Option<_>>()?,
        )),
        Expr::Pair(a, b) => Some(Value::pair(closed_data(a)?, closed_data(b)?)),
        _ => None,
    }
}

/// Computes `B` for `p` run on `inputs`.
pub fn collect_data_universe(p: &Program, inputs: &[Value]) -> DataUniverse {
    let mut uni = DataUniverse::default();
    for s in &p.sorts {
        uni.by_sort.insert(s.clone(), BTreeSet::new());
    }
    let literals: Vec<Value> = p
        .clauses
        .iter()
        .flat_map(|c| c.body.subexpressions())
        .filter_map(|(_, e)| closed_data(e))
        .collect();
    for v in inputs.iter().chain(&literals) {
        for s in v.data_subterms() {
            if let Value::Cons(c, _) = s {
                if let Some(t) = p.constructor_type(c) {
                    let sort = t.uncurry().1.to_string();
                    uni.by_sort.entry(sort).or_default().insert(s.clone());
                }
            }
        }
    }
    uni
}

/// Every constructor-headed value built while enumerating the results of
/// `main` on `inputs`.
pub fn observed_data(p: &Program, inputs: &[Value], fuel: u64) -> Result<BTreeSet<Value>, EvalError> {
    let (prog, mut heap, fid, args) = entry(p, &p.main, inputs)?;
    with_big_stack(|| {
        run(&prog, &mut heap, fid, args, fuel, Strategy::Auto, p.terminating)?;
        Ok((0..heap.len() as Vid)
            .filter(|&v| matches!(heap.node(v), Node::Cons(..)) && heap.is_data(v))
            .map(|v| prog.export(&heap, v))
            .collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_input_bits, parse_program};

    const LAST: &str = "fun last : list => bool\nlast (x :: nil) = x\nlast (x :: y :: zs) = last (y :: zs)\n";

    fn bits(s: &str) -> Value {
        parse_input_bits(s).unwrap()
    }

    #[test]
    fn choose_yields_both_booleans() {
        let p = parse_program("fun main : list => bool\nmain xs = choose(true, false)\n").unwrap();
        for strategy in [Strategy::Paths, Strategy::Memo] {
            let out = enumerate_with(&p, "main", &[bits("")], 10, strategy).unwrap();
            assert_eq!(out.rendered(), vec!["false", "true"]);
            assert!(out.exhausted);
        }
    }

    #[test]
    fn last_of_input() {
        let p = parse_program(LAST).unwrap();
        let out = enumerate_results(&p, &[bits("10")], 100).unwrap();
        assert_eq!(out.rendered(), vec!["false"]);
        let v = evaluate_one(&p, &[bits("10")], &mut ScriptedChooser::default(), 100).unwrap();
        assert_eq!(v, Value::boolean(false));
    }

    #[test]
    fn fuel_is_counted_per_firing() {
        let p = parse_program(LAST).unwrap();
        assert!(evaluate_one(&p, &[bits("101")], &mut ScriptedChooser::default(), 3).is_ok());
        assert_eq!(
            evaluate_one(&p, &[bits("101")], &mut ScriptedChooser::default(), 2),
            Err(EvalError::FuelExhausted)
        );
        let out = enumerate_results(&p, &[bits("101")], 2).unwrap();
        assert!(out.results.is_empty());
        assert!(!out.exhausted);
    }

    #[test]
    fn stuck_when_no_clause_matches() {
        let p = parse_program(LAST).unwrap();
        let err = enumerate_results(&p, &[bits("")], 10).unwrap_err();
        assert!(matches!(err, EvalError::Stuck(m) if m.contains("no clause")));
    }

    #[test]
    fn partial_application_and_over_application() {
        let src = "fun main : list => bool\nfun k : bool => bool => bool\nfun ap : (bool => bool) => bool => bool\n\
                   main xs = ap (k false) true\nk a b = a\nap f x = f x\n";
        let p = parse_program(src).unwrap();
        let out = enumerate_results(&p, &[bits("1")], 10).unwrap();
        assert_eq!(out.rendered(), vec!["false"]);
    }

    #[test]
    fn memo_and_paths_agree_on_costs() {
        let src = "# terminating\nfun main : list => bool\nfun g : bool => bool\n\
                   main (x :: xs) = choose(g x, main xs)\nmain nil = choose(true, false)\ng b = b\n";
        let p = parse_program(src).unwrap();
        for fuel in 0..6 {
            let a = enumerate_with(&p, "main", &[bits("000")], fuel, Strategy::Paths).unwrap();
            let b = enumerate_with(&p, "main", &[bits("000")], fuel, Strategy::Memo).unwrap();
            assert_eq!(a.results, b.results, "fuel {fuel}");
            assert_eq!(a.exhausted, b.exhausted, "fuel {fuel}");
        }
    }

    #[test]
    fn memo_falls_back_on_cycles() {
        let src = "fun main : list => bool\nmain xs = choose(true, main xs)\n";
        let p = parse_program(src).unwrap();
        let out = enumerate_with(&p, "main", &[bits("")], 5, Strategy::Memo).unwrap();
        assert_eq!(out.strategy, Strategy::Paths);
        assert_eq!(out.rendered(), vec!["true"]);
        assert!(!out.exhausted);
    }

    #[test]
    fn clause_matching() {
        let p = parse_program(LAST).unwrap();
        let pats = &p.clauses[1].patterns;
        let sub = match_clause(pats, &[bits("10")]).unwrap();
        assert_eq!(sub["x"], Value::boolean(true));
        assert_eq!(sub["zs"], Value::nil());
        assert!(match_clause(pats, &[bits("1")]).is_none());
        assert!(match_clause(&p.clauses[0].patterns, &[bits("1")]).is_some());
    }

    #[test]
    fn universe_of_last() {
        let p = parse_program(LAST).unwrap();
        let b = collect_data_universe(&p, &[bits("10")]);
        let lists: Vec<String> = b.sort("list").map(Value::to_string).collect();
        assert_eq!(lists, vec!["false :: nil", "true :: false :: nil", "nil"]);
        assert_eq!(b.sort("bool").count(), 2);
        let seen = observed_data(&p, &[bits("10")], 100).unwrap();
        assert!(seen.iter().all(|v| b.contains(v)));
    }
}
