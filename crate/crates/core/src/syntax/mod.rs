//! Abstract syntax, concrete syntax and printer for cons-free programs.
//!
//! A program file is line oriented:
//!
//! ```text
//! # terminating
//! sort colour
//! cons red : colour
//! fun last : list => bool
//! last (x :: nil) = x
//! last (x :: y :: zs) = last (y :: zs)
//! ```
//!
//! The first `fun` declaration names the main function. Lines that start
//! with whitespace continue the previous line. `#` starts a comment; a
//! comment line reading exactly `# terminating` marks the program as
//! terminating.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::{parse_expr, parse_input_bits, parse_program, parse_type};
pub use printer::pretty_print;

pub const BOOL: &str = "bool";
pub const LIST: &str = "list";
pub const TRUE: &str = "true";
pub const FALSE: &str = "false";
pub const NIL: &str = "nil";
pub const CONS: &str = "::";

/// Simple types: sorts, products and arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Sort(String),
    Product(Box<Type>, Box<Type>),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn sort(name: &str) -> Type {
        Type::Sort(name.to_string())
    }

    pub fn product(left: Type, right: Type) -> Type {
        Type::Product(Box::new(left), Box::new(right))
    }

    pub fn arrow(argument: Type, result: Type) -> Type {
        Type::Arrow(Box::new(argument), Box::new(result))
    }

    /// Builds `a1 => a2 => ... => result`.
    pub fn arrows(arguments: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let arguments: Vec<Type> = arguments.into_iter().collect();
        arguments
            .into_iter()
            .rev()
            .fold(result, |acc, arg| Type::arrow(arg, acc))
    }

    /// Splits `s1 => ... => sm => k` (k not an arrow) into `([s1..sm], k)`.
    pub fn uncurry(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Arrow(a, r) = cur {
            args.push(a.as_ref());
            cur = r;
        }
        (args, cur)
    }

    /// The type left after applying `n` arguments, if there are that many.
    pub fn after_args(&self, n: usize) -> Option<&Type> {
        let mut cur = self;
        for _ in 0..n {
            match cur {
                Type::Arrow(_, r) => cur = r,
                _ => return None,
            }
        }
        Some(cur)
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Type::Arrow(..))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::type_to_string(self))
    }
}

/// Clause right-hand sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Expr {
    Var(String),
    /// Data constructor application, at most the declared argument count.
    ConsApp(String, Vec<Expr>),
    /// Defined-function application; fewer arguments than the arity is a
    /// partial application.
    FunApp(String, Vec<Expr>),
    /// Application of an arbitrary head (a variable, a parenthesised
    /// application, a conditional or a choice).
    App(Box<Expr>, Vec<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    IfThenElse(Box<Expr>, Box<Expr>, Box<Expr>),
    Choose(Vec<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn cons(name: &str, args: Vec<Expr>) -> Expr {
        Expr::ConsApp(name.to_string(), args)
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        Expr::FunApp(name.to_string(), args)
    }

    pub fn app(head: Expr, args: Vec<Expr>) -> Expr {
        Expr::App(Box::new(head), args)
    }

    pub fn pair(left: Expr, right: Expr) -> Expr {
        Expr::Pair(Box::new(left), Box::new(right))
    }

    pub fn ite(cond: Expr, then: Expr, otherwise: Expr) -> Expr {
        Expr::IfThenElse(Box::new(cond), Box::new(then), Box::new(otherwise))
    }

    pub fn list_cons(head: Expr, tail: Expr) -> Expr {
        Expr::ConsApp(CONS.to_string(), vec![head, tail])
    }

    /// Immediate subexpressions, in the order used for paths.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Var(_) => Vec::new(),
            Expr::ConsApp(_, args) | Expr::FunApp(_, args) | Expr::Choose(args) => {
                args.iter().collect()
            }
            Expr::App(head, args) => std::iter::once(head.as_ref()).chain(args).collect(),
            Expr::Pair(a, b) => vec![a, b],
            Expr::IfThenElse(c, t, e) => vec![c, t, e],
        }
    }

    /// Every subexpression with its path, in pre-order.
    pub fn subexpressions(&self) -> Vec<(Vec<usize>, &Expr)> {
        let mut out = Vec::new();
        fn go<'a>(e: &'a Expr, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Expr)>) {
            out.push((path.clone(), e));
            for (i, c) in e.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Maximum nesting depth; leaves have depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Expr::depth).max().unwrap_or(0)
    }

    pub fn mentions_var(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => v == name,
            _ => self.children().into_iter().any(|c| c.mentions_var(name)),
        }
    }

    /// Closed data: constructor applications and pairs without variables
    /// or function symbols.
    pub fn is_closed_data(&self) -> bool {
        match self {
            Expr::ConsApp(_, args) => args.iter().all(Expr::is_closed_data),
            Expr::Pair(a, b) => a.is_closed_data() && b.is_closed_data(),
            _ => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::expr_to_string(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    Var(String),
    Cons(String, Vec<Pattern>),
    Pair(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    pub fn var(name: &str) -> Pattern {
        Pattern::Var(name.to_string())
    }

    pub fn cons(name: &str, args: Vec<Pattern>) -> Pattern {
        Pattern::Cons(name.to_string(), args)
    }

    pub fn list_cons(head: Pattern, tail: Pattern) -> Pattern {
        Pattern::Cons(CONS.to_string(), vec![head, tail])
    }

    pub fn pair(left: Pattern, right: Pattern) -> Pattern {
        Pattern::Pair(Box::new(left), Box::new(right))
    }

    /// Variables in left-to-right order (with repeats, if any).
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Pattern, out: &mut Vec<&'a str>) {
            match p {
                Pattern::Var(v) => out.push(v),
                Pattern::Cons(_, args) => args.iter().for_each(|a| go(a, out)),
                Pattern::Pair(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// The pattern read as an expression.
    pub fn to_expr(&self) -> Expr {
        match self {
            Pattern::Var(v) => Expr::Var(v.clone()),
            Pattern::Cons(c, args) => {
                Expr::ConsApp(c.clone(), args.iter().map(Pattern::to_expr).collect())
            }
            Pattern::Pair(a, b) => Expr::pair(a.to_expr(), b.to_expr()),
        }
    }

    /// Every subpattern, in pre-order.
    pub fn subpatterns(&self) -> Vec<&Pattern> {
        let mut out = vec![self];
        match self {
            Pattern::Var(_) => {}
            Pattern::Cons(_, args) => args.iter().for_each(|a| out.extend(a.subpatterns())),
            Pattern::Pair(a, b) => {
                out.extend(a.subpatterns());
                out.extend(b.subpatterns());
            }
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::pattern_to_string(self, false))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub function: String,
    pub patterns: Vec<Pattern>,
    pub body: Expr,
}

impl Clause {
    pub fn new(function: &str, patterns: Vec<Pattern>, body: Expr) -> Clause {
        Clause {
            function: function.to_string(),
            patterns,
            body,
        }
    }

    /// Pattern variables in binding order.
    pub fn variables(&self) -> Vec<&str> {
        self.patterns.iter().flat_map(Pattern::variables).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::clause_to_string(self))
    }
}

/// A whole program. Built-in sorts and constructors are always present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub sorts: Vec<String>,
    pub constructors: Vec<(String, Type)>,
    pub functions: Vec<(String, Type)>,
    pub clauses: Vec<Clause>,
    pub main: String,
    /// Set by the `# terminating` pragma.
    pub terminating: bool,
}

impl Program {
    /// An empty program holding only the built-in declarations.
    pub fn with_builtins(main: &str) -> Program {
        let bool_t = Type::sort(BOOL);
        let list_t = Type::sort(LIST);
        Program {
            sorts: vec![BOOL.to_string(), LIST.to_string()],
            constructors: vec![
                (TRUE.to_string(), bool_t.clone()),
                (FALSE.to_string(), bool_t.clone()),
                (NIL.to_string(), list_t.clone()),
                (
                    CONS.to_string(),
                    Type::arrows([bool_t, list_t.clone()], list_t),
                ),
            ],
            functions: Vec::new(),
            clauses: Vec::new(),
            main: main.to_string(),
            terminating: false,
        }
    }

    pub fn is_builtin_sort(name: &str) -> bool {
        name == BOOL || name == LIST
    }

    pub fn is_builtin_constructor(name: &str) -> bool {
        matches!(name, TRUE | FALSE | NIL | CONS)
    }

    pub fn constructor_type(&self, name: &str) -> Option<&Type> {
        self.constructors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn function_type(&self, name: &str) -> Option<&Type> {
        self.functions.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn is_constructor(&self, name: &str) -> bool {
        self.constructor_type(name).is_some()
    }

    pub fn is_function(&self, name: &str) -> bool {
        self.function_type(name).is_some()
    }

    pub fn clauses_of<'a>(&'a self, function: &'a str) -> impl Iterator<Item = &'a Clause> + 'a {
        self.clauses.iter().filter(move |c| c.function == function)
    }

    /// Number of patterns used by the clauses of `function`.
    pub fn arity(&self, function: &str) -> Option<usize> {
        self.clauses_of(function).next().map(|c| c.patterns.len())
    }

    pub fn main_type(&self) -> Option<&Type> {
        self.function_type(&self.main)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_print(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: duplicate declaration of `{name}`")]
    DuplicateDeclaration {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}:{column}: unknown identifier `{name}`")]
    UnknownIdentifier {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}:{column}: variable `{name}` occurs more than once in the left-hand side")]
    NonLinearPattern {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("program declares no main function")]
    NoMain,
    #[error("input word may only contain 0 and 1, found {found:?} at offset {offset}")]
    BadInputWord { offset: usize, found: char },
}
