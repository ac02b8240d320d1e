//! Source-to-source rewriting: composition pushdown, inlining of clauses
//! that return a functional variable, and a check that a program's types
//! stay at order 1 or below.

mod inline;
mod pushdown;

use serde::Serialize;

use crate::analysis::{render_path, type_order, typecheck, AnalysisReport, TypedProgram};
use crate::syntax::{Expr, Program};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rewrite {
    pub clause: usize,
    pub path: Vec<usize>,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformTrace {
    pub before: Program,
    pub after: Program,
    pub rewrites: Vec<Rewrite>,
}

impl TransformTrace {
    /// One line per rewrite.
    pub fn log(&self) -> String {
        self.rewrites
            .iter()
            .map(|r| format!("clause {} at {}: {}\n", r.clause, render_path(&r.path), r.rule))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("program does not type-check: {0}")]
    IllTyped(String),
    #[error("cannot inline `{function}`: {reason}")]
    InliningFailure { function: String, reason: String },
}

/// Rewrites `(s t1..ti) t(i+1)..tn`, `(if ..) t..`, and `(choose ..) t..` in
/// every clause body until no application has such a head.
pub fn compose_pushdown(p: &Program) -> TransformTrace {
    let mut after = p.clone();
    let mut rewrites = Vec::new();
    for (idx, clause) in after.clauses.iter_mut().enumerate() {
        clause.body = pushdown::normalise(&clause.body, idx, &mut Vec::new(), &mut rewrites);
    }
    TransformTrace {
        before: p.clone(),
        after,
        rewrites,
    }
}

/// Removes every function whose clauses have the form `f l1..lk = x` with
/// `x` a functional pattern variable, dispatching at each call site to the
/// selected argument instead. The result is composition-normal.
pub fn eliminate_fvar_clauses(p: &Program) -> Result<TransformTrace, TransformError> {
    let tp = typecheck(p).map_err(|errs| {
        TransformError::IllTyped(errs.iter().map(|e| e.message.clone()).collect::<Vec<_>>().join("; "))
    })?;
    let (inlined, mut rewrites) = inline::inline(&tp)?;
    let pushed = compose_pushdown(&inlined);
    rewrites.extend(pushed.rewrites);
    Ok(TransformTrace {
        before: p.clone(),
        after: pushed.after,
        rewrites,
    })
}

/// Passes when every argument type and every body subexpression has type
/// order at most 1 and no clause body is a bare functional variable.
pub fn verify_order_collapsed(tp: &TypedProgram) -> AnalysisReport {
    let mut report = AnalysisReport::new("order collapsed");
    let p = &tp.program;
    for (f, ty) in &p.functions {
        let first = p.clauses.iter().position(|c| &c.function == f).unwrap_or(0);
        for arg in ty.uncurry().0 {
            if type_order(arg) > 1 {
                report.push(
                    first,
                    Vec::new(),
                    format!("`{f}` takes an argument of type {arg} with order {}", type_order(arg)),
                );
            }
        }
    }
    for idx in 0..p.clauses.len() {
        if inline::is_fvar_clause(tp, idx) {
            report.push(idx, Vec::new(), "the body is a bare functional variable");
        }
        for (path, node) in tp.clauses[idx].body.walk() {
            if type_order(&node.ty) > 1 {
                report.push(
                    idx,
                    path,
                    format!("`{}` has type {} of order {}", node.expr, node.ty, type_order(&node.ty)),
                );
            }
        }
    }
    report
}

/// True when no application in `e` has an `if`, `choose`, or application
/// as its head.
pub fn is_composition_normal(e: &Expr) -> bool {
    e.subexpressions().into_iter().all(|(_, s)| match s {
        Expr::App(head, _) => !matches!(
            head.as_ref(),
            Expr::IfThenElse(..) | Expr::Choose(_) | Expr::App(..) | Expr::FunApp(..) | Expr::ConsApp(..)
        ),
        _ => true,
    })
}
