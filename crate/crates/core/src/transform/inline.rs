use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::TypedProgram;
use crate::syntax::{Expr, Pattern, Program, FALSE, TRUE};

use super::{pushdown, Rewrite, TransformError};

/// One clause `f l1 .. lk = x` with `x` functional.
struct Selector {
    /// Positions holding a boolean literal pattern.
    literals: Vec<(usize, bool)>,
    /// Position of the pattern variable returned by the clause.
    selected: usize,
}

struct Target {
    arity: usize,
    selectors: Vec<Selector>,
}

fn fail(function: &str, reason: impl Into<String>) -> TransformError {
    TransformError::InliningFailure {
        function: function.to_string(),
        reason: reason.into(),
    }
}

pub(super) fn is_fvar_clause(tp: &TypedProgram, idx: usize) -> bool {
    match &tp.program.clauses[idx].body {
        Expr::Var(x) => tp.clauses[idx].var_types.get(x).is_some_and(|t| t.is_arrow()),
        _ => false,
    }
}

fn targets(tp: &TypedProgram) -> Result<BTreeMap<String, Target>, TransformError> {
    let p = &tp.program;
    let names: BTreeSet<&str> = (0..p.clauses.len())
        .filter(|&i| is_fvar_clause(tp, i))
        .map(|i| p.clauses[i].function.as_str())
        .collect();
    let mut out = BTreeMap::new();
    for f in names {
        if f == p.main {
            return Err(fail(f, "the main function cannot be inlined"));
        }
        let mut selectors = Vec::new();
        for (i, clause) in p.clauses.iter().enumerate().filter(|(_, c)| c.function == f) {
            if !is_fvar_clause(tp, i) {
                return Err(fail(f, "some clauses return a functional variable and others do not"));
            }
            let Expr::Var(x) = &clause.body else { unreachable!() };
            let mut literals = Vec::new();
            let mut selected = None;
            for (pos, pat) in clause.patterns.iter().enumerate() {
                match pat {
                    Pattern::Var(v) if v == x => selected = Some(pos),
                    Pattern::Var(_) => {}
                    Pattern::Cons(c, args) if args.is_empty() && (c == TRUE || c == FALSE) => {
                        literals.push((pos, c == TRUE))
                    }
                    other => {
                        return Err(fail(f, format!("pattern `{other}` cannot be dispatched statically")))
                    }
                }
            }
            let selected =
                selected.ok_or_else(|| fail(f, format!("`{x}` is not a top-level pattern variable")))?;
            selectors.push(Selector { literals, selected });
        }
        let arity = tp.arity(f);
        out.insert(f.to_string(), Target { arity, selectors });
    }
    Ok(out)
}

struct Inliner<'a> {
    targets: &'a BTreeMap<String, Target>,
    arities: BTreeMap<&'a str, usize>,
    clause: usize,
    log: Vec<Rewrite>,
}

impl Inliner<'_> {
    /// No evaluation happens beyond building data and partial applications.
    fn is_inert(&self, e: &Expr) -> bool {
        match e {
            Expr::Var(_) => true,
            Expr::ConsApp(_, args) => args.iter().all(|a| self.is_inert(a)),
            Expr::Pair(a, b) => self.is_inert(a) && self.is_inert(b),
            Expr::FunApp(f, args) => {
                args.len() < self.arities.get(f.as_str()).copied().unwrap_or(0)
                    && args.iter().all(|a| self.is_inert(a))
            }
            _ => false,
        }
    }

    fn rewrite(&mut self, e: &Expr, path: &mut Vec<usize>) -> Result<Expr, TransformError> {
        let kids: Vec<Expr> = e
            .children()
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                path.push(i);
                let out = self.rewrite(c, path);
                path.pop();
                out
            })
            .collect::<Result<_, _>>()?;
        let rebuilt = rebuild(e, kids);
        match &rebuilt {
            Expr::FunApp(f, args) if self.targets.contains_key(f) => {
                self.log.push(Rewrite {
                    clause: self.clause,
                    path: path.clone(),
                    rule: format!("inline {f}"),
                });
                self.dispatch_call(f, args)
            }
            _ => Ok(rebuilt),
        }
    }

    fn dispatch_call(&mut self, f: &str, args: &[Expr]) -> Result<Expr, TransformError> {
        let target = &self.targets[f];
        let k = target.arity;
        if args.len() < k {
            return Err(fail(f, format!("occurs with {} of {k} arguments", args.len())));
        }
        let (own, rest) = args.split_at(k);
        let always = target.selectors[0].selected;
        for (pos, a) in own.iter().enumerate() {
            let everywhere = target.selectors.iter().all(|s| s.selected == always) && pos == always;
            if !everywhere && !self.is_inert(a) {
                return Err(fail(f, format!("argument `{a}` would not always be evaluated")));
            }
        }
        let mut known = BTreeMap::new();
        for (pos, a) in own.iter().enumerate() {
            if let Expr::ConsApp(c, xs) = a {
                if xs.is_empty() && (c == TRUE || c == FALSE) {
                    known.insert(pos, c == TRUE);
                }
            }
        }
        let chooser = Dispatch {
            function: f,
            target,
            own,
            rest,
        };
        chooser.clause(0, &mut known)
    }
}

struct Dispatch<'a> {
    function: &'a str,
    target: &'a Target,
    own: &'a [Expr],
    rest: &'a [Expr],
}

impl Dispatch<'_> {
    fn clause(&self, idx: usize, known: &mut BTreeMap<usize, bool>) -> Result<Expr, TransformError> {
        if idx == self.target.selectors.len() {
            return Err(fail(self.function, "the clauses are not exhaustive"));
        }
        self.test(idx, 0, known)
    }

    fn test(&self, idx: usize, lit: usize, known: &mut BTreeMap<usize, bool>) -> Result<Expr, TransformError> {
        let sel = &self.target.selectors[idx];
        let Some(&(pos, want)) = sel.literals.get(lit) else {
            let head = self.own[sel.selected].clone();
            return Ok(if self.rest.is_empty() {
                head
            } else {
                Expr::App(Box::new(head), self.rest.to_vec())
            });
        };
        match known.get(&pos) {
            Some(&v) if v == want => self.test(idx, lit + 1, known),
            Some(_) => self.clause(idx + 1, known),
            None => {
                let branch = |value: bool, known: &mut BTreeMap<usize, bool>| {
                    known.insert(pos, value);
                    let out = if value == want {
                        self.test(idx, lit + 1, known)
                    } else {
                        self.clause(idx + 1, known)
                    };
                    known.remove(&pos);
                    out
                };
                let yes = branch(true, known)?;
                let no = branch(false, known)?;
                Ok(Expr::ite(self.own[pos].clone(), yes, no))
            }
        }
    }
}

fn rebuild(e: &Expr, mut kids: Vec<Expr>) -> Expr {
    match e {
        Expr::Var(_) => e.clone(),
        Expr::ConsApp(c, _) => Expr::ConsApp(c.clone(), kids),
        Expr::FunApp(f, _) => Expr::FunApp(f.clone(), kids),
        Expr::Choose(_) => Expr::Choose(kids),
        Expr::App(..) => {
            let head = kids.remove(0);
            Expr::App(Box::new(head), kids)
        }
        Expr::Pair(..) => {
            let b = kids.pop().unwrap();
            Expr::pair(kids.pop().unwrap(), b)
        }
        Expr::IfThenElse(..) => {
            let f = kids.pop().unwrap();
            let t = kids.pop().unwrap();
            Expr::ite(kids.pop().unwrap(), t, f)
        }
    }
}

/// Inlines every function whose clauses all return a functional pattern
/// variable and drops those functions.
pub(super) fn inline(tp: &TypedProgram) -> Result<(Program, Vec<Rewrite>), TransformError> {
    let p = &tp.program;
    let targets = targets(tp)?;
    if targets.is_empty() {
        return Ok((p.clone(), Vec::new()));
    }
    let mut inliner = Inliner {
        targets: &targets,
        arities: p.functions.iter().map(|(f, _)| (f.as_str(), tp.arity(f))).collect(),
        clause: 0,
        log: Vec::new(),
    };
    let mut out = p.clone();
    out.functions.retain(|(f, _)| !targets.contains_key(f));
    out.clauses.clear();
    for (idx, clause) in p.clauses.iter().enumerate() {
        if targets.contains_key(&clause.function) {
            continue;
        }
        inliner.clause = idx;
        let body = inliner.rewrite(&clause.body, &mut Vec::new())?;
        let mut body = pushdown::normalise(&body, idx, &mut Vec::new(), &mut Vec::new());
        for _ in 0..targets.len() {
            if !mentions_any(&body, &targets) {
                break;
            }
            body = inliner.rewrite(&body, &mut Vec::new())?;
            body = pushdown::normalise(&body, idx, &mut Vec::new(), &mut Vec::new());
        }
        if mentions_any(&body, &targets) {
            return Err(fail(&clause.function, "inlining does not terminate"));
        }
        let mut clause = clause.clone();
        clause.body = body;
        out.clauses.push(clause);
    }
    Ok((out, inliner.log))
}

fn mentions_any(e: &Expr, targets: &BTreeMap<String, Target>) -> bool {
    e.subexpressions()
        .into_iter()
        .any(|(_, s)| matches!(s, Expr::FunApp(f, _) if targets.contains_key(f)))
}
