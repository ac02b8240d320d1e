//! Demand-driven fixpoint over call statements `f e1 .. ei ↦ o`.
//!
//! A call is keyed by the function and its semantic arguments (at least the
//! clause arity many); its value is the set of confirmed results. Clause
//! bodies are evaluated with the arguments beyond the arity pushed into
//! them, and calls that depend on each other are re-evaluated until stable.

use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::sem::{is_subset, SemId, SemNode, SemStore, Tuple};
use crate::analysis::TypedProgram;
use crate::interp::runtime::{CExpr, CPat, Compiled, Heap, Node};
use crate::interp::DataUniverse;
use crate::syntax::Type;

type Key = (u32, Box<[SemId]>);
type Set = Rc<Vec<SemId>>;

pub(crate) struct Solver<'a> {
    prog: &'a Compiled,
    pub heap: Heap,
    pub store: SemStore,
    fun_types: Vec<Type>,
    /// Per function, per clause, the type of each variable slot.
    slot_types: Vec<Vec<Vec<Type>>>,
    sorts: FxHashMap<String, Vec<SemId>>,
    base_cache: FxHashMap<Type, Rc<Vec<SemId>>>,
    sigma: FxHashMap<Key, Set>,
    stable: FxHashSet<Key>,
    called: FxHashSet<Key>,
    infl: FxHashMap<Key, Vec<Key>>,
    stack: Vec<Key>,
    /// Admissible graphs per functional type; `None` admits every graph.
    pub pools: Option<FxHashMap<Type, Vec<SemId>>>,
    pub iterations: u64,
}

fn union(a: &[SemId], b: &[SemId]) -> Vec<SemId> {
    let mut out: Vec<SemId> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn cartesian(sets: &[Vec<SemId>]) -> Vec<Vec<SemId>> {
    let mut out = vec![Vec::new()];
    for s in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                s.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

impl<'a> Solver<'a> {
    pub fn new(prog: &'a Compiled, tp: &TypedProgram, uni: &DataUniverse) -> Result<Self, String> {
        let p = &tp.program;
        let mut heap = Heap::default();
        let mut store = SemStore::default();
        let mut sorts = FxHashMap::default();
        for (sort, values) in &uni.by_sort {
            let mut ids = Vec::new();
            for v in values {
                let vid = prog.import(&mut heap, v)?;
                ids.push(store.base(vid));
            }
            sorts.insert(sort.clone(), ids);
        }
        let mut slot_types: Vec<Vec<Vec<Type>>> = vec![Vec::new(); prog.funs.len()];
        for (idx, clause) in p.clauses.iter().enumerate() {
            let fid = prog.fun_index[&clause.function] as usize;
            let k = slot_types[fid].len();
            let names = &prog.funs[fid].clauses[k].names;
            slot_types[fid].push(names.iter().map(|n| tp.clauses[idx].var_types[n].clone()).collect());
        }
        Ok(Solver {
            prog,
            heap,
            store,
            fun_types: p.functions.iter().map(|(_, t)| t.clone()).collect(),
            slot_types,
            sorts,
            base_cache: FxHashMap::default(),
            sigma: FxHashMap::default(),
            stable: FxHashSet::default(),
            called: FxHashSet::default(),
            infl: FxHashMap::default(),
            stack: Vec::new(),
            pools: None,
            iterations: 0,
        })
    }

    /// Number of call keys and of confirmed call statements.
    pub fn counts(&self) -> (usize, usize) {
        (self.sigma.len(), self.sigma.values().map(|s| s.len()).sum())
    }

    /// `⟦t⟧` for an order-0 type.
    pub fn base_universe(&mut self, t: &Type) -> Rc<Vec<SemId>> {
        if let Some(u) = self.base_cache.get(t) {
            return u.clone();
        }
        let u = match t {
            Type::Sort(s) => self.sorts.get(s).cloned().unwrap_or_default(),
            Type::Product(a, b) => {
                let (ua, ub) = (self.base_universe(a), self.base_universe(b));
                let mut out = Vec::new();
                for &x in ua.iter() {
                    for &y in ub.iter() {
                        out.push(self.store.pair(&mut self.heap, x, y));
                    }
                }
                out
            }
            Type::Arrow(..) => Vec::new(),
        };
        let u = Rc::new(u);
        self.base_cache.insert(t.clone(), u.clone());
        u
    }

    /// All argument tuples for the given order-0 argument types.
    pub fn tuple_space(&mut self, types: &[&Type]) -> Vec<Vec<SemId>> {
        let sets: Vec<Vec<SemId>> = types.iter().map(|t| self.base_universe(t).to_vec()).collect();
        cartesian(&sets)
    }

    pub fn import(&mut self, v: &crate::value::Value) -> Result<SemId, String> {
        let vid = self.prog.import(&mut self.heap, v)?;
        Ok(self.store.base(vid))
    }

    pub fn export(&self, id: SemId) -> super::SemValue {
        self.store.export(self.prog, &self.heap, id)
    }

    pub fn export_base(&self, v: crate::interp::runtime::Vid) -> crate::value::Value {
        self.prog.export(&self.heap, v)
    }

    pub fn pair(&mut self, a: SemId, b: SemId) -> SemId {
        self.store.pair(&mut self.heap, a, b)
    }

    pub fn query(&mut self, f: u32, args: Vec<SemId>) -> Set {
        let key: Key = (f, args.into());
        self.solve(&key);
        if let Some(top) = self.stack.last() {
            self.infl.entry(key.clone()).or_default().push(top.clone());
        }
        self.sigma.get(&key).cloned().unwrap_or_default()
    }

    fn solve(&mut self, key: &Key) {
        if self.stable.contains(key) || self.called.contains(key) {
            return;
        }
        self.called.insert(key.clone());
        loop {
            self.stable.insert(key.clone());
            self.stack.push(key.clone());
            let found = self.rhs(key);
            self.stack.pop();
            let old = self.sigma.get(key).cloned().unwrap_or_default();
            let merged = union(&old, &found);
            if merged.len() != old.len() {
                self.sigma.insert(key.clone(), Rc::new(merged));
                let waiting = self.infl.remove(key).unwrap_or_default();
                for y in &waiting {
                    self.stable.remove(y);
                }
                for y in &waiting {
                    self.solve(y);
                }
            }
            if self.stable.contains(key) {
                break;
            }
        }
        self.called.remove(key);
    }

    fn rhs(&mut self, key: &Key) -> Vec<SemId> {
        self.iterations += 1;
        let prog = self.prog;
        let fid = key.0 as usize;
        let fun = &prog.funs[fid];
        let (own, extra) = key.1.split_at(fun.arity);
        for (ci, clause) in fun.clauses.iter().enumerate() {
            let mut env = vec![0; clause.slots];
            if clause
                .patterns
                .iter()
                .zip(own)
                .all(|(p, &a)| self.match_sem(p, a, &mut env))
            {
                return self.eval(&clause.body, (fid, ci), &env, extra);
            }
        }
        Vec::new()
    }

    fn match_sem(&mut self, pat: &CPat, v: SemId, env: &mut [SemId]) -> bool {
        match pat {
            CPat::Var(slot) => {
                env[*slot] = v;
                true
            }
            CPat::Cons(c, ps) => {
                let Some(vid) = self.store.as_base(v) else { return false };
                match self.heap.node(vid).clone() {
                    Node::Cons(d, args) if d == *c && args.len() == ps.len() => ps.iter().zip(args.iter()).all(|(p, &a)| {
                        let s = self.store.base(a);
                        self.match_sem(p, s, env)
                    }),
                    _ => false,
                }
            }
            CPat::Pair(pa, pb) => match self.store.node(v).clone() {
                SemNode::Base(vid) => match *self.heap.node(vid) {
                    Node::Pair(a, b) => {
                        let (sa, sb) = (self.store.base(a), self.store.base(b));
                        self.match_sem(pa, sa, env) && self.match_sem(pb, sb, env)
                    }
                    _ => false,
                },
                SemNode::Pair(a, b) => self.match_sem(pa, a, env) && self.match_sem(pb, b, env),
                SemNode::Graph(_) => false,
            },
        }
    }

    /// Graph values denoted by a functional expression whose backed tuples
    /// are `tuples`.
    fn graphs(&mut self, mut tuples: Vec<Tuple>, ty: &Type) -> Vec<SemId> {
        tuples.sort();
        tuples.dedup();
        let Some(pools) = &self.pools else {
            return vec![self.store.graph(tuples)];
        };
        pools
            .get(ty)
            .map(|pool| {
                pool.iter()
                    .copied()
                    .filter(|&g| is_subset(self.store.tuples(g), &tuples))
                    .collect()
            })
            .unwrap_or_default()
    }

    fn eval_all(&mut self, es: &[CExpr], at: (usize, usize), env: &[SemId]) -> Vec<Vec<SemId>> {
        es.iter().map(|e| self.eval(e, at, env, &[])).collect()
    }

    /// Results of `e η x1 .. xn` for `extra = [x1, .., xn]`.
    fn eval(&mut self, e: &CExpr, at: (usize, usize), env: &[SemId], extra: &[SemId]) -> Vec<SemId> {
        let mut out = Vec::new();
        match e {
            CExpr::Var(slot) => {
                let v = env[*slot];
                if extra.is_empty() {
                    return vec![v];
                }
                let ty = self.slot_types[at.0][at.1][*slot].clone();
                let n = extra.len();
                let tuples = self.store.tuples(v).to_vec();
                if n == ty.uncurry().0.len() {
                    out = tuples.iter().filter(|(a, _)| a[..] == *extra).map(|(_, o)| *o).collect();
                } else {
                    let sub: Vec<Tuple> = tuples
                        .iter()
                        .filter(|(a, _)| a[..n] == *extra)
                        .map(|(a, o)| (a[n..].into(), *o))
                        .collect();
                    let rest = ty.after_args(n).expect("argument count within type").clone();
                    out = self.graphs(sub, &rest);
                }
            }
            CExpr::Cons(c, args) => {
                if !extra.is_empty() {
                    return out;
                }
                for combo in cartesian(&self.eval_all(args, at, env)) {
                    let Some(vids) = combo.iter().map(|&s| self.store.as_base(s)).collect::<Option<Vec<_>>>() else {
                        continue;
                    };
                    let v = self.heap.intern(Node::Cons(*c, vids.into()));
                    out.push(self.store.base(v));
                }
            }
            CExpr::Pair(a, b) => {
                if !extra.is_empty() {
                    return out;
                }
                let sets = vec![self.eval(a, at, env, &[]), self.eval(b, at, env, &[])];
                for combo in cartesian(&sets) {
                    out.push(self.store.pair(&mut self.heap, combo[0], combo[1]));
                }
            }
            CExpr::Fun(f, args) => {
                let arity = self.prog.funs[*f as usize].arity;
                for mut all in cartesian(&self.eval_all(args, at, env)) {
                    all.extend_from_slice(extra);
                    if all.len() >= arity {
                        out.extend(self.query(*f, all).iter());
                        continue;
                    }
                    let ty = self.fun_types[*f as usize]
                        .after_args(all.len())
                        .expect("argument count within type")
                        .clone();
                    let (rest, _) = ty.uncurry();
                    let space = self.tuple_space(&rest);
                    let mut tuples = Vec::new();
                    for t in space {
                        let mut full = all.clone();
                        full.extend_from_slice(&t);
                        for &o in self.query(*f, full).iter() {
                            tuples.push((t.clone().into_boxed_slice(), o));
                        }
                    }
                    out.extend(self.graphs(tuples, &ty));
                }
            }
            CExpr::App(head, args) => {
                for mut combo in cartesian(&self.eval_all(args, at, env)) {
                    combo.extend_from_slice(extra);
                    out.extend(self.eval(head, at, env, &combo));
                }
            }
            CExpr::If(c, t, f) => {
                for cv in self.eval(c, at, env, &[]) {
                    let branch = match self.store.as_base(cv).and_then(|v| self.prog.bool_of(&self.heap, v)) {
                        Some(true) => t,
                        Some(false) => f,
                        None => continue,
                    };
                    out.extend(self.eval(branch, at, env, extra));
                }
            }
            CExpr::Choose(alts) => {
                for a in alts {
                    out.extend(self.eval(a, at, env, extra));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
