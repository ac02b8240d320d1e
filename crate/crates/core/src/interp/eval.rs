//! Call-by-value evaluation along one nondeterministic path.

use super::runtime::{match_pattern, CExpr, Compiled, Heap, Node, Vid};

/// Picks an alternative for each `choose` reached during evaluation.
pub trait Chooser {
    /// Returns an index below `alternatives` (which is at least 1).
    fn choose(&mut self, alternatives: usize) -> usize;
}

impl<F: FnMut(usize) -> usize> Chooser for F {
    fn choose(&mut self, alternatives: usize) -> usize {
        self(alternatives)
    }
}

/// Replays a fixed list of branch indices, then always takes the first
/// alternative. Indices that are out of range wrap around.
#[derive(Clone, Debug, Default)]
pub struct ScriptedChooser {
    script: Vec<usize>,
    pos: usize,
}

impl ScriptedChooser {
    pub fn new(script: Vec<usize>) -> Self {
        ScriptedChooser { script, pos: 0 }
    }
}

impl Chooser for ScriptedChooser {
    fn choose(&mut self, alternatives: usize) -> usize {
        let pick = self.script.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        pick % alternatives
    }
}

/// Uniformly random choices from a seeded generator.
pub struct RandomChooser<R: rand::Rng>(pub R);

impl<R: rand::Rng> Chooser for RandomChooser<R> {
    fn choose(&mut self, alternatives: usize) -> usize {
        self.0.gen_range(0..alternatives)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Halt {
    Stuck(String),
    Fuel,
}

pub(crate) struct Evaluator<'a> {
    pub prog: &'a Compiled,
    pub heap: &'a mut Heap,
    pub chooser: &'a mut dyn Chooser,
    pub fuel: u64,
}

impl Evaluator<'_> {
    pub fn eval(&mut self, e: &CExpr, env: &[Vid]) -> Result<Vid, Halt> {
        match e {
            CExpr::Var(slot) => Ok(env[*slot]),
            CExpr::Cons(c, args) => {
                let vals = self.eval_all(args, env)?;
                Ok(self.heap.intern(Node::Cons(*c, vals.into())))
            }
            CExpr::Fun(f, args) => {
                let vals = self.eval_all(args, env)?;
                self.apply_fun(*f, vals)
            }
            CExpr::App(head, args) => {
                let h = self.eval(head, env)?;
                let vals = self.eval_all(args, env)?;
                self.apply(h, vals)
            }
            CExpr::Pair(a, b) => {
                let a = self.eval(a, env)?;
                let b = self.eval(b, env)?;
                Ok(self.heap.intern(Node::Pair(a, b)))
            }
            CExpr::If(c, t, f) => {
                let cv = self.eval(c, env)?;
                match self.prog.bool_of(self.heap, cv) {
                    Some(true) => self.eval(t, env),
                    Some(false) => self.eval(f, env),
                    None => Err(Halt::Stuck(format!(
                        "if-condition evaluated to non-boolean `{}`",
                        self.prog.export(self.heap, cv)
                    ))),
                }
            }
            CExpr::Choose(alts) => {
                let i = self.chooser.choose(alts.len());
                self.eval(&alts[i.min(alts.len() - 1)], env)
            }
        }
    }

    fn eval_all(&mut self, args: &[CExpr], env: &[Vid]) -> Result<Vec<Vid>, Halt> {
        args.iter().map(|a| self.eval(a, env)).collect()
    }

    pub fn apply(&mut self, head: Vid, args: Vec<Vid>) -> Result<Vid, Halt> {
        if args.is_empty() {
            return Ok(head);
        }
        match self.heap.node(head).clone() {
            Node::Partial(f, pre) => {
                let mut all = pre.into_vec();
                all.extend(args);
                self.apply_fun(f, all)
            }
            _ => Err(Halt::Stuck(format!(
                "`{}` is applied to arguments but is not a function",
                self.prog.export(self.heap, head)
            ))),
        }
    }

    pub fn apply_fun(&mut self, f: u32, mut args: Vec<Vid>) -> Result<Vid, Halt> {
        let arity = self.prog.funs[f as usize].arity;
        if args.len() < arity {
            return Ok(self.heap.intern(Node::Partial(f, args.into())));
        }
        let rest = args.split_off(arity);
        let v = self.call(f, &args)?;
        self.apply(v, rest)
    }

    /// Fires the first matching clause of `f` on exactly `arity` arguments.
    pub fn call(&mut self, f: u32, args: &[Vid]) -> Result<Vid, Halt> {
        let prog = self.prog;
        let fun = &prog.funs[f as usize];
        let mut env = Vec::new();
        for clause in &fun.clauses {
            env.clear();
            env.resize(clause.slots, 0);
            let matched = clause
                .patterns
                .iter()
                .zip(args)
                .all(|(p, &a)| match_pattern(self.heap, p, a, &mut env));
            if matched {
                if self.fuel == 0 {
                    return Err(Halt::Fuel);
                }
                self.fuel -= 1;
                return self.eval(&clause.body, &env);
            }
        }
        Err(Halt::Stuck(format!(
            "no clause matches `{}`",
            self.prog.describe_call(self.heap, f, args)
        )))
    }
}
