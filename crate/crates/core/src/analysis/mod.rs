//! Type checking and the static classifications: type and data order,
//! cons-freeness, and order-n immutability.

mod typecheck;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::syntax::{Expr, Program, Type};

pub use typecheck::{typecheck, TypeError, TypedClause, TypedExpr, TypedProgram};

/// `0` for sorts; arrows raise the order of their argument by one.
pub fn type_order(t: &Type) -> usize {
    match t {
        Type::Sort(_) => 0,
        Type::Product(a, b) => type_order(a).max(type_order(b)),
        Type::Arrow(a, b) => (type_order(a) + 1).max(type_order(b)),
    }
}

/// Largest type order among the argument types of defined functions.
pub fn data_order(p: &Program) -> usize {
    p.functions
        .iter()
        .flat_map(|(_, t)| t.uncurry().0)
        .map(type_order)
        .max()
        .unwrap_or(0)
}

pub(crate) fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub clause: usize,
    /// Child indices from the clause body down to the offending node.
    pub path: Vec<usize>,
    pub reason: String,
}

/// Outcome of one static check. The verdict is `pass` exactly when there
/// are no violations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub subject: String,
    pub violations: Vec<Violation>,
}

impl AnalysisReport {
    pub fn new(subject: impl Into<String>) -> Self {
        AnalysisReport {
            subject: subject.into(),
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }

    pub(crate) fn push(&mut self, clause: usize, path: Vec<usize>, reason: impl Into<String>) {
        self.violations.push(Violation {
            clause,
            path,
            reason: reason.into(),
        });
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "subject": self.subject,
            "verdict": self.verdict(),
            "violations": self.violations,
        })
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.subject, self.verdict())?;
        for v in &self.violations {
            writeln!(
                f,
                "  clause {} at {}: {}",
                v.clause,
                render_path(&v.path),
                v.reason
            )?;
        }
        Ok(())
    }
}

/// Every constructor-headed subexpression of a clause body must be closed
/// data or occur inside one of the clause's patterns.
pub fn check_cons_free(p: &Program) -> AnalysisReport {
    let mut report = AnalysisReport::new("cons-free");
    for (idx, clause) in p.clauses.iter().enumerate() {
        let from_patterns: BTreeSet<Expr> = clause
            .patterns
            .iter()
            .flat_map(|pat| pat.subpatterns())
            .map(|sp| sp.to_expr())
            .collect();
        for (path, t) in clause.body.subexpressions() {
            if let Expr::ConsApp(..) = t {
                if !t.is_closed_data() && !from_patterns.contains(t) {
                    report.push(
                        idx,
                        path,
                        format!("`{t}` builds data that is neither closed nor taken from a pattern"),
                    );
                }
            }
        }
    }
    report
}

/// Order-`n` immutability: per clause, at most one variable of type order
/// at least `n` occurs in the body, and if one does, no other body
/// subexpression has type order at least `n`. Occurrences of that variable
/// are allowed.
pub fn check_immutability(tp: &TypedProgram, n: usize) -> AnalysisReport {
    assert!(n >= 1, "immutability threshold must be at least 1");
    let mut report = AnalysisReport::new(format!("immutable functions (order {n})"));
    for (idx, (clause, typed)) in tp.program.clauses.iter().zip(&tp.clauses).enumerate() {
        let high: Vec<&String> = typed
            .var_types
            .iter()
            .filter(|(v, t)| type_order(t) >= n && clause.body.mentions_var(v))
            .map(|(v, _)| v)
            .collect();
        if high.len() > 1 {
            let names: Vec<&str> = high.iter().map(|s| s.as_str()).collect();
            report.push(
                idx,
                Vec::new(),
                format!("uses {} variables of type order >= {n}: {}", high.len(), names.join(", ")),
            );
            continue;
        }
        if let Some(var) = high.first() {
            for (path, node) in typed.body.walk() {
                let own = matches!(&node.expr, Expr::Var(v) if v == *var);
                if !own && type_order(&node.ty) >= n {
                    report.push(
                        idx,
                        path,
                        format!(
                            "`{}` has type {} of order >= {n} next to higher-order variable `{var}`",
                            node.expr, node.ty
                        ),
                    );
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn typed(src: &str) -> TypedProgram {
        typecheck(&parse_program(src).unwrap()).unwrap()
    }

    const LAST: &str = "fun last : list => bool\nlast (x :: nil) = x\nlast (x :: y :: zs) = last (y :: zs)\n";
    const FLIP: &str = "fun flip : list => list\nflip nil = nil\nflip (true :: xs) = false :: (flip xs)\nflip (false :: xs) = true :: (flip xs)\n";

    #[test]
    fn orders() {
        let p = Program::with_builtins("m");
        let t = |s: &str| crate::syntax::parse_type(&p, s).unwrap();
        assert_eq!(type_order(&t("bool")), 0);
        assert_eq!(type_order(&t("(list * list * list) => bool")), 1);
        assert_eq!(type_order(&t("(list => bool) => bool")), 2);
        assert_eq!(type_order(&t("bool * (bool => bool)")), 1);
    }

    #[test]
    fn data_orders() {
        assert_eq!(data_order(&parse_program(LAST).unwrap()), 0);
        let p = parse_program("fun f : ((list => bool) => bool) => bool\nf g = true\n").unwrap();
        assert_eq!(data_order(&p), 2);
    }

    #[test]
    fn example_one_cons_freeness() {
        assert!(check_cons_free(&parse_program(LAST).unwrap()).passed());
        let r = check_cons_free(&parse_program(FLIP).unwrap());
        assert!(!r.passed());
        assert_eq!(r.violations.len(), 2);
        assert_eq!(r.violations[0].clause, 1);
        assert_eq!(r.violations[0].path, Vec::<usize>::new());
        assert!(r.violations[0].reason.contains("false :: flip xs"));
    }

    #[test]
    fn pairs_are_not_constructors() {
        let p = parse_program("fun f : bool => bool * bool\nf x = (x, true)\n").unwrap();
        assert!(check_cons_free(&p).passed());
    }

    #[test]
    fn first_order_programs_are_immutable() {
        let tp = typed(LAST);
        assert!(check_immutability(&tp, 1).passed());
    }

    #[test]
    fn two_functional_variables_violate() {
        let tp = typed(
            "fun m : bool => bool\nm b = b\n\
             fun app2 : (bool => bool) => (bool => bool) => bool => bool\napp2 f g x = f (g x)\n",
        );
        let r = check_immutability(&tp, 1);
        assert!(!r.passed());
        assert_eq!(r.violations[0].clause, 1);
        assert!(r.violations[0].reason.contains("2 variables"));
        assert!(check_immutability(&tp, 2).passed());
    }

    #[test]
    fn other_higher_order_subexpressions_violate() {
        let tp = typed(
            "fun m : bool => bool\nfun k : bool => bool => bool\nfun ap : (bool => bool) => bool => bool\n\
             m b = ap (k b) b\nk a b = a\nap f x = ap (k x) (f x)\n",
        );
        let r = check_immutability(&tp, 1);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].clause, 2);
        assert_eq!(r.violations[0].path, vec![0]);
    }

    #[test]
    fn unused_higher_order_variables_do_not_count() {
        let tp = typed(
            "fun m : bool => bool\nm b = b\n\
             fun f : (bool => bool) => (bool => bool) => bool => bool\nf g h x = g x\n",
        );
        assert!(check_immutability(&tp, 1).passed());
    }
}
