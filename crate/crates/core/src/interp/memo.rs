//! Set-semantics evaluation with a call table, for programs declared
//! terminating. Each result carries the least and greatest number of clause
//! firings among the paths producing it.

use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::runtime::{match_pattern, CExpr, Compiled, Heap, Node, Vid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Res {
    pub value: Vid,
    pub min: u64,
    pub max: u64,
}

pub(crate) enum MemoHalt {
    Stuck(String),
    /// A call depends on itself; the set semantics is not well founded here.
    Cycle,
}

type Results = Rc<Vec<Res>>;

pub(crate) struct MemoEvaluator<'a> {
    pub prog: &'a Compiled,
    pub heap: &'a mut Heap,
    table: FxHashMap<(u32, Box<[Vid]>), Results>,
    active: FxHashSet<(u32, Box<[Vid]>)>,
}

fn merge(out: &mut FxHashMap<Vid, (u64, u64)>, r: Res) {
    out.entry(r.value)
        .and_modify(|(lo, hi)| {
            *lo = (*lo).min(r.min);
            *hi = (*hi).max(r.max);
        })
        .or_insert((r.min, r.max));
}

fn finish(out: FxHashMap<Vid, (u64, u64)>) -> Vec<Res> {
    let mut v: Vec<Res> = out
        .into_iter()
        .map(|(value, (min, max))| Res { value, min, max })
        .collect();
    v.sort_by_key(|r| r.value);
    v
}

fn single(value: Vid) -> Vec<Res> {
    vec![Res {
        value,
        min: 0,
        max: 0,
    }]
}

/// Calls `f` for every combination drawn from `lists`, with summed costs.
fn for_each_combo(
    lists: &[Results],
    mut f: impl FnMut(&[Vid], u64, u64) -> Result<(), MemoHalt>,
) -> Result<(), MemoHalt> {
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; lists.len()];
    let mut vals = vec![0 as Vid; lists.len()];
    loop {
        let (mut lo, mut hi) = (0u64, 0u64);
        for (k, l) in lists.iter().enumerate() {
            let r = l[idx[k]];
            vals[k] = r.value;
            lo = lo.saturating_add(r.min);
            hi = hi.saturating_add(r.max);
        }
        f(&vals, lo, hi)?;
        let mut k = lists.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl<'a> MemoEvaluator<'a> {
    pub fn new(prog: &'a Compiled, heap: &'a mut Heap) -> Self {
        MemoEvaluator {
            prog,
            heap,
            table: FxHashMap::default(),
            active: FxHashSet::default(),
        }
    }

    fn eval_many(&mut self, es: &[CExpr], env: &[Vid]) -> Result<Vec<Results>, MemoHalt> {
        es.iter().map(|e| self.eval(e, env).map(Rc::new)).collect()
    }

    pub fn eval(&mut self, e: &CExpr, env: &[Vid]) -> Result<Vec<Res>, MemoHalt> {
        let mut out = FxHashMap::default();
        match e {
            CExpr::Var(slot) => return Ok(single(env[*slot])),
            CExpr::Cons(c, args) => {
                let lists = self.eval_many(args, env)?;
                for_each_combo(&lists, |vals, min, max| {
                    let value = self.heap.intern(Node::Cons(*c, vals.into()));
                    merge(&mut out, Res { value, min, max });
                    Ok(())
                })?;
            }
            CExpr::Pair(a, b) => {
                let lists = vec![Rc::new(self.eval(a, env)?), Rc::new(self.eval(b, env)?)];
                for_each_combo(&lists, |vals, min, max| {
                    let value = self.heap.intern(Node::Pair(vals[0], vals[1]));
                    merge(&mut out, Res { value, min, max });
                    Ok(())
                })?;
            }
            CExpr::Fun(f, args) => {
                let lists = self.eval_many(args, env)?;
                for_each_combo(&lists, |vals, min, max| {
                    for r in self.apply_fun(*f, vals.to_vec())?.iter() {
                        merge(&mut out, shift(*r, min, max));
                    }
                    Ok(())
                })?;
            }
            CExpr::App(head, args) => {
                let mut lists = vec![Rc::new(self.eval(head, env)?)];
                lists.extend(self.eval_many(args, env)?);
                for_each_combo(&lists, |vals, min, max| {
                    for r in self.apply(vals[0], vals[1..].to_vec())?.iter() {
                        merge(&mut out, shift(*r, min, max));
                    }
                    Ok(())
                })?;
            }
            CExpr::If(c, t, f) => {
                let conds = self.eval(c, env)?;
                let mut branch: [Option<Vec<Res>>; 2] = [None, None];
                for r in conds {
                    let pick = match self.prog.bool_of(self.heap, r.value) {
                        Some(true) => 0,
                        Some(false) => 1,
                        None => {
                            return Err(MemoHalt::Stuck(format!(
                                "if-condition evaluated to non-boolean `{}`",
                                self.prog.export(self.heap, r.value)
                            )))
                        }
                    };
                    if branch[pick].is_none() {
                        branch[pick] = Some(self.eval(if pick == 0 { t } else { f }, env)?);
                    }
                    for b in branch[pick].as_ref().unwrap() {
                        merge(&mut out, shift(*b, r.min, r.max));
                    }
                }
            }
            CExpr::Choose(alts) => {
                for a in alts {
                    for r in self.eval(a, env)? {
                        merge(&mut out, r);
                    }
                }
            }
        }
        Ok(finish(out))
    }

    pub fn apply(&mut self, head: Vid, args: Vec<Vid>) -> Result<Results, MemoHalt> {
        if args.is_empty() {
            return Ok(Rc::new(single(head)));
        }
        match self.heap.node(head).clone() {
            Node::Partial(f, pre) => {
                let mut all = pre.into_vec();
                all.extend(args);
                self.apply_fun(f, all)
            }
            _ => Err(MemoHalt::Stuck(format!(
                "`{}` is applied to arguments but is not a function",
                self.prog.export(self.heap, head)
            ))),
        }
    }

    pub fn apply_fun(&mut self, f: u32, mut args: Vec<Vid>) -> Result<Results, MemoHalt> {
        let arity = self.prog.funs[f as usize].arity;
        if args.len() < arity {
            return Ok(Rc::new(single(self.heap.intern(Node::Partial(f, args.into())))));
        }
        let rest = args.split_off(arity);
        let first = self.call(f, args)?;
        if rest.is_empty() {
            return Ok(first);
        }
        let mut out = FxHashMap::default();
        for r in first.iter() {
            for s in self.apply(r.value, rest.clone())?.iter() {
                merge(&mut out, shift(*s, r.min, r.max));
            }
        }
        Ok(Rc::new(finish(out)))
    }

    pub fn call(&mut self, f: u32, args: Vec<Vid>) -> Result<Results, MemoHalt> {
        let key = (f, args.into_boxed_slice());
        if let Some(r) = self.table.get(&key) {
            return Ok(r.clone());
        }
        if !self.active.insert(key.clone()) {
            return Err(MemoHalt::Cycle);
        }
        let prog = self.prog;
        let fun = &prog.funs[f as usize];
        let mut env = Vec::new();
        let mut fired = None;
        for clause in &fun.clauses {
            env.clear();
            env.resize(clause.slots, 0);
            let matched = clause
                .patterns
                .iter()
                .zip(key.1.iter())
                .all(|(p, &a)| match_pattern(self.heap, p, a, &mut env));
            if matched {
                fired = Some(clause);
                break;
            }
        }
        let Some(clause) = fired else {
            return Err(MemoHalt::Stuck(format!(
                "no clause matches `{}`",
                prog.describe_call(self.heap, f, &key.1)
            )));
        };
        let results: Vec<Res> = self
            .eval(&clause.body, &env)?
            .into_iter()
            .map(|r| shift(r, 1, 1))
            .collect();
        let results = Rc::new(results);
        self.active.remove(&key);
        self.table.insert(key, results.clone());
        Ok(results)
    }
}

fn shift(r: Res, min: u64, max: u64) -> Res {
    Res {
        value: r.value,
        min: r.min.saturating_add(min),
        max: r.max.saturating_add(max),
    }
}
