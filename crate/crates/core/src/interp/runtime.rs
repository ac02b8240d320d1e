//! Interned runtime values and a name-resolved program form shared by the
//! evaluators and the saturation engine.

use rustc_hash::FxHashMap;

use crate::syntax::{Expr, Pattern, Program, FALSE, TRUE};
use crate::value::Value;

pub(crate) type Vid = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Cons(u32, Box<[Vid]>),
    Pair(Vid, Vid),
    Partial(u32, Box<[Vid]>),
}

/// Hash-consed value store: equal values share one id.
#[derive(Default)]
pub(crate) struct Heap {
    nodes: Vec<Node>,
    index: FxHashMap<Node, Vid>,
}

impl Heap {
    pub fn intern(&mut self, node: Node) -> Vid {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Vid;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn node(&self, id: Vid) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_data(&self, id: Vid) -> bool {
        match self.node(id) {
            Node::Cons(_, args) => args.iter().all(|&a| self.is_data(a)),
            Node::Pair(a, b) => self.is_data(*a) && self.is_data(*b),
            Node::Partial(..) => false,
        }
    }
}

pub(crate) enum CPat {
    Var(usize),
    Cons(u32, Vec<CPat>),
    Pair(Box<CPat>, Box<CPat>),
}

pub(crate) enum CExpr {
    Var(usize),
    Cons(u32, Vec<CExpr>),
    Fun(u32, Vec<CExpr>),
    App(Box<CExpr>, Vec<CExpr>),
    Pair(Box<CExpr>, Box<CExpr>),
    If(Box<CExpr>, Box<CExpr>, Box<CExpr>),
    Choose(Vec<CExpr>),
}

pub(crate) struct CClause {
    pub patterns: Vec<CPat>,
    pub body: CExpr,
    pub slots: usize,
    /// Pattern variable bound to each slot.
    pub names: Vec<String>,
}

pub(crate) struct CFun {
    pub name: String,
    /// Patterns per clause.
    pub arity: usize,
    pub clauses: Vec<CClause>,
}

pub(crate) struct Compiled {
    pub cons_names: Vec<String>,
    pub cons_index: FxHashMap<String, u32>,
    pub funs: Vec<CFun>,
    pub fun_index: FxHashMap<String, u32>,
    pub true_id: u32,
    pub false_id: u32,
}

impl Compiled {
    pub fn new(p: &Program) -> Compiled {
        let cons_names: Vec<String> = p.constructors.iter().map(|(c, _)| c.clone()).collect();
        let cons_index: FxHashMap<String, u32> = cons_names
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let fun_index: FxHashMap<String, u32> = p
            .functions
            .iter()
            .enumerate()
            .map(|(i, (f, _))| (f.clone(), i as u32))
            .collect();
        let mut funs: Vec<CFun> = p
            .functions
            .iter()
            .map(|(f, t)| {
                CFun {
                    name: f.clone(),
                    arity: p.arity(f).unwrap_or(t.uncurry().0.len()),
                    clauses: Vec::new(),
                }
            })
            .collect();
        let mut builder = Builder {
            cons_index: &cons_index,
            fun_index: &fun_index,
            slots: Vec::new(),
        };
        for clause in &p.clauses {
            builder.slots.clear();
            let patterns = clause.patterns.iter().map(|pt| builder.pattern(pt)).collect();
            let body = builder.expr(&clause.body);
            let fid = fun_index[&clause.function];
            funs[fid as usize].clauses.push(CClause {
                patterns,
                body,
                slots: builder.slots.len(),
                names: builder.slots.clone(),
            });
        }
        Compiled {
            true_id: cons_index[TRUE],
            false_id: cons_index[FALSE],
            cons_names,
            cons_index,
            funs,
            fun_index,
        }
    }

    pub fn import(&self, heap: &mut Heap, v: &Value) -> Result<Vid, String> {
        Ok(match v {
            Value::Cons(c, args) => {
                let id = *self
                    .cons_index
                    .get(c)
                    .ok_or_else(|| format!("unknown constructor `{c}` in input"))?;
                let args = args
                    .iter()
                    .map(|a| self.import(heap, a))
                    .collect::<Result<Vec<_>, _>>()?;
                heap.intern(Node::Cons(id, args.into()))
            }
            Value::Pair(a, b) => {
                let a = self.import(heap, a)?;
                let b = self.import(heap, b)?;
                heap.intern(Node::Pair(a, b))
            }
            Value::Partial(f, args) => {
                let id = *self
                    .fun_index
                    .get(f)
                    .ok_or_else(|| format!("unknown function `{f}` in input"))?;
                let args = args
                    .iter()
                    .map(|a| self.import(heap, a))
                    .collect::<Result<Vec<_>, _>>()?;
                heap.intern(Node::Partial(id, args.into()))
            }
        })
    }

    pub fn export(&self, heap: &Heap, id: Vid) -> Value {
        match heap.node(id) {
            Node::Cons(c, args) => Value::Cons(
                self.cons_names[*c as usize].clone(),
                args.iter().map(|&a| self.export(heap, a)).collect(),
            ),
            Node::Pair(a, b) => Value::pair(self.export(heap, *a), self.export(heap, *b)),
            Node::Partial(f, args) => Value::Partial(
                self.funs[*f as usize].name.clone(),
                args.iter().map(|&a| self.export(heap, a)).collect(),
            ),
        }
    }

    pub fn bool_of(&self, heap: &Heap, id: Vid) -> Option<bool> {
        match heap.node(id) {
            Node::Cons(c, args) if args.is_empty() && *c == self.true_id => Some(true),
            Node::Cons(c, args) if args.is_empty() && *c == self.false_id => Some(false),
            _ => None,
        }
    }

    pub fn describe_call(&self, heap: &Heap, fid: u32, args: &[Vid]) -> String {
        let mut s = self.funs[fid as usize].name.clone();
        for &a in args {
            s.push_str(&format!(" ({})", self.export(heap, a)));
        }
        s
    }
}

/// Matches `pat` against `v`, writing bindings into `env`.
pub(crate) fn match_pattern(heap: &Heap, pat: &CPat, v: Vid, env: &mut [Vid]) -> bool {
    match pat {
        CPat::Var(slot) => {
            env[*slot] = v;
            true
        }
        CPat::Cons(c, ps) => match heap.node(v) {
            Node::Cons(d, args) if d == c && args.len() == ps.len() => {
                let args = args.clone();
                ps.iter()
                    .zip(args.iter())
                    .all(|(p, &a)| match_pattern(heap, p, a, env))
            }
            _ => false,
        },
        CPat::Pair(pa, pb) => match *heap.node(v) {
            Node::Pair(a, b) => match_pattern(heap, pa, a, env) && match_pattern(heap, pb, b, env),
            _ => false,
        },
    }
}

struct Builder<'a> {
    cons_index: &'a FxHashMap<String, u32>,
    fun_index: &'a FxHashMap<String, u32>,
    slots: Vec<String>,
}

impl Builder<'_> {
    fn pattern(&mut self, p: &Pattern) -> CPat {
        match p {
            Pattern::Var(v) => {
                self.slots.push(v.clone());
                CPat::Var(self.slots.len() - 1)
            }
            Pattern::Cons(c, args) => {
                CPat::Cons(self.cons_index[c], args.iter().map(|a| self.pattern(a)).collect())
            }
            Pattern::Pair(a, b) => CPat::Pair(Box::new(self.pattern(a)), Box::new(self.pattern(b))),
        }
    }

    fn expr(&self, e: &Expr) -> CExpr {
        let many = |args: &[Expr]| args.iter().map(|a| self.expr(a)).collect::<Vec<_>>();
        match e {
            Expr::Var(v) => CExpr::Var(
                self.slots
                    .iter()
                    .position(|s| s == v)
                    .unwrap_or_else(|| panic!("unbound variable `{v}`")),
            ),
            Expr::ConsApp(c, args) => CExpr::Cons(self.cons_index[c], many(args)),
            Expr::FunApp(f, args) => CExpr::Fun(self.fun_index[f], many(args)),
            Expr::App(h, args) => CExpr::App(Box::new(self.expr(h)), many(args)),
            Expr::Pair(a, b) => CExpr::Pair(Box::new(self.expr(a)), Box::new(self.expr(b))),
            Expr::IfThenElse(c, t, f) => CExpr::If(
                Box::new(self.expr(c)),
                Box::new(self.expr(t)),
                Box::new(self.expr(f)),
            ),
            Expr::Choose(alts) => CExpr::Choose(many(alts)),
        }
    }
}
