use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::type_order;
use crate::syntax::{Expr, Pattern, Program, Type, BOOL};

/// An expression node annotated with its type; `children` follow
/// [`Expr::children`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedExpr {
    pub ty: Type,
    pub expr: Expr,
    pub children: Vec<TypedExpr>,
}

impl TypedExpr {
    /// Pre-order walk with paths.
    pub fn walk(&self) -> Vec<(Vec<usize>, &TypedExpr)> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a TypedExpr, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a TypedExpr)>) {
            out.push((path.clone(), t));
            for (i, c) in t.children.iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedClause {
    pub var_types: BTreeMap<String, Type>,
    pub body: TypedExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedProgram {
    pub program: Program,
    /// Number of patterns per clause, per defined function.
    pub arities: BTreeMap<String, usize>,
    /// Parallel to `program.clauses`.
    pub clauses: Vec<TypedClause>,
}

impl TypedProgram {
    pub fn arity(&self, function: &str) -> usize {
        self.arities[function]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeError {
    pub clause: Option<usize>,
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.clause {
            Some(c) => write!(f, "clause {c} at {}: {}", super::render_path(&self.path), self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for TypeError {}

fn err(path: &[usize], message: String) -> TypeError {
    TypeError {
        clause: None,
        path: path.to_vec(),
        message,
    }
}

/// Checks declared types against every clause. All errors are collected,
/// at most one per clause.
pub fn typecheck(p: &Program) -> Result<TypedProgram, Vec<TypeError>> {
    let mut errors = Vec::new();
    let mut arities = BTreeMap::new();

    for (f, _) in &p.functions {
        match p.arity(f) {
            Some(k) => {
                arities.insert(f.clone(), k);
            }
            None => errors.push(err(&[], format!("function `{f}` has no clauses"))),
        }
    }
    match p.main_type() {
        None => errors.push(err(&[], format!("main function `{}` is not declared", p.main))),
        Some(t) => {
            let (args, result) = t.uncurry();
            if args.iter().any(|a| type_order(a) > 0) || type_order(result) > 0 {
                errors.push(err(
                    &[],
                    format!("main function `{}` must take and return order-0 values, has type {t}", p.main),
                ));
            }
        }
    }

    let mut clauses = Vec::new();
    for (idx, clause) in p.clauses.iter().enumerate() {
        match check_clause(p, clause) {
            Ok(tc) => clauses.push(tc),
            Err(mut e) => {
                e.clause = Some(idx);
                errors.push(e);
            }
        }
    }
    if errors.is_empty() {
        Ok(TypedProgram {
            program: p.clone(),
            arities,
            clauses,
        })
    } else {
        Err(errors)
    }
}

fn check_clause(p: &Program, clause: &crate::syntax::Clause) -> Result<TypedClause, TypeError> {
    let fty = p
        .function_type(&clause.function)
        .ok_or_else(|| err(&[], format!("unknown function `{}`", clause.function)))?;
    let (params, _) = fty.uncurry();
    if clause.patterns.len() > params.len() {
        return Err(err(
            &[],
            format!(
                "`{}` has {} parameters but the clause has {} patterns",
                clause.function,
                params.len(),
                clause.patterns.len()
            ),
        ));
    }
    let mut var_types = BTreeMap::new();
    for (pat, ty) in clause.patterns.iter().zip(&params) {
        type_pattern(p, pat, ty, &mut var_types)?;
    }
    let expected = fty.after_args(clause.patterns.len()).expect("checked above");
    let body = infer(p, &clause.body, &var_types, &mut Vec::new())?;
    if &body.ty != expected {
        return Err(err(
            &[],
            format!("body has type {} but {} is expected", body.ty, expected),
        ));
    }
    Ok(TypedClause { var_types, body })
}

fn type_pattern(
    p: &Program,
    pat: &Pattern,
    ty: &Type,
    vars: &mut BTreeMap<String, Type>,
) -> Result<(), TypeError> {
    match pat {
        Pattern::Var(v) => {
            vars.insert(v.clone(), ty.clone());
            Ok(())
        }
        Pattern::Cons(c, args) => {
            let cty = p
                .constructor_type(c)
                .ok_or_else(|| err(&[], format!("unknown constructor `{c}`")))?;
            let (params, result) = cty.uncurry();
            if result != ty {
                return Err(err(
                    &[],
                    format!("pattern `{pat}` has type {result} but {ty} is expected"),
                ));
            }
            if params.len() != args.len() {
                return Err(err(&[], format!("constructor `{c}` is not fully applied in a pattern")));
            }
            for (a, t) in args.iter().zip(params) {
                type_pattern(p, a, t, vars)?;
            }
            Ok(())
        }
        Pattern::Pair(a, b) => match ty {
            Type::Product(ta, tb) => {
                type_pattern(p, a, ta, vars)?;
                type_pattern(p, b, tb, vars)
            }
            _ => Err(err(&[], format!("pair pattern `{pat}` against non-product type {ty}"))),
        },
    }
}

fn expect_type(found: &TypedExpr, want: &Type, path: &[usize]) -> Result<(), TypeError> {
    if &found.ty == want {
        Ok(())
    } else {
        Err(err(
            path,
            format!("`{}` has type {} but {} is expected", found.expr, found.ty, want),
        ))
    }
}

fn infer(
    p: &Program,
    e: &Expr,
    vars: &BTreeMap<String, Type>,
    path: &mut Vec<usize>,
) -> Result<TypedExpr, TypeError> {
    let child = |i: usize, c: &Expr, path: &mut Vec<usize>| {
        path.push(i);
        let r = infer(p, c, vars, path);
        path.pop();
        r
    };
    let node = |ty: Type, children: Vec<TypedExpr>| TypedExpr {
        ty,
        expr: e.clone(),
        children,
    };
    match e {
        Expr::Var(v) => vars
            .get(v)
            .map(|t| node(t.clone(), Vec::new()))
            .ok_or_else(|| err(path, format!("unbound variable `{v}`"))),
        Expr::ConsApp(c, args) => {
            let cty = p
                .constructor_type(c)
                .ok_or_else(|| err(path, format!("unknown constructor `{c}`")))?;
            let (params, result) = cty.uncurry();
            if params.len() != args.len() {
                return Err(err(
                    path,
                    format!(
                        "constructor `{c}` expects {} arguments, given {}",
                        params.len(),
                        args.len()
                    ),
                ));
            }
            let mut children = Vec::new();
            for (i, (a, t)) in args.iter().zip(&params).enumerate() {
                let ta = child(i, a, path)?;
                path.push(i);
                expect_type(&ta, t, path)?;
                path.pop();
                children.push(ta);
            }
            Ok(node(result.clone(), children))
        }
        Expr::FunApp(f, args) => {
            let fty = p
                .function_type(f)
                .ok_or_else(|| err(path, format!("unknown function `{f}`")))?;
            let (params, _) = fty.uncurry();
            if args.len() > params.len() {
                return Err(err(
                    path,
                    format!("`{f}` takes at most {} arguments, given {}", params.len(), args.len()),
                ));
            }
            let mut children = Vec::new();
            for (i, (a, t)) in args.iter().zip(&params).enumerate() {
                let ta = child(i, a, path)?;
                path.push(i);
                expect_type(&ta, t, path)?;
                path.pop();
                children.push(ta);
            }
            Ok(node(fty.after_args(args.len()).unwrap().clone(), children))
        }
        Expr::App(head, args) => {
            let th = child(0, head, path)?;
            let (params, _) = th.ty.uncurry();
            if args.len() > params.len() {
                return Err(err(
                    path,
                    format!("`{head}` of type {} applied to {} arguments", th.ty, args.len()),
                ));
            }
            let params: Vec<Type> = params.into_iter().cloned().collect();
            let result = th.ty.after_args(args.len()).unwrap().clone();
            let mut children = vec![th];
            for (i, (a, t)) in args.iter().zip(&params).enumerate() {
                let ta = child(i + 1, a, path)?;
                path.push(i + 1);
                expect_type(&ta, t, path)?;
                path.pop();
                children.push(ta);
            }
            Ok(node(result, children))
        }
        Expr::Pair(a, b) => {
            let ta = child(0, a, path)?;
            let tb = child(1, b, path)?;
            Ok(node(Type::product(ta.ty.clone(), tb.ty.clone()), vec![ta, tb]))
        }
        Expr::IfThenElse(c, t, f) => {
            let tc = child(0, c, path)?;
            path.push(0);
            expect_type(&tc, &Type::sort(BOOL), path)?;
            path.pop();
            let tt = child(1, t, path)?;
            let tf = child(2, f, path)?;
            if tt.ty != tf.ty {
                return Err(err(
                    path,
                    format!("branches have different types: {} and {}", tt.ty, tf.ty),
                ));
            }
            Ok(node(tt.ty.clone(), vec![tc, tt, tf]))
        }
        Expr::Choose(alts) => {
            if alts.is_empty() {
                return Err(err(path, "choose needs at least one alternative".into()));
            }
            let mut children = Vec::new();
            for (i, a) in alts.iter().enumerate() {
                let ta = child(i, a, path)?;
                if let Some(first) = children.first() {
                    let first: &TypedExpr = first;
                    if first.ty != ta.ty {
                        return Err(err(
                            path,
                            format!("choose alternatives have different types: {} and {}", first.ty, ta.ty),
                        ));
                    }
                }
                children.push(ta);
            }
            Ok(node(children[0].ty.clone(), children))
        }
    }
}
