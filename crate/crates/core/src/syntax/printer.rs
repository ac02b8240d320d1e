use super::{Clause, Expr, Pattern, Program, Type, CONS};

pub(crate) fn type_to_string(t: &Type) -> String {
    match t {
        Type::Sort(s) => s.clone(),
        Type::Product(a, b) => {
            let left = match a.as_ref() {
                Type::Sort(_) => type_to_string(a),
                _ => format!("({})", type_to_string(a)),
            };
            let right = match b.as_ref() {
                Type::Arrow(..) => format!("({})", type_to_string(b)),
                _ => type_to_string(b),
            };
            format!("{left} * {right}")
        }
        Type::Arrow(a, b) => {
            let left = match a.as_ref() {
                Type::Arrow(..) => format!("({})", type_to_string(a)),
                _ => type_to_string(a),
            };
            format!("{left} => {}", type_to_string(b))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    ConsLeft,
    Arg,
    Head,
}

fn is_infix_cons(e: &Expr) -> bool {
    matches!(e, Expr::ConsApp(c, args) if c == CONS && args.len() == 2)
}

fn wrap(text: String, needs: bool) -> String {
    if needs {
        format!("({text})")
    } else {
        text
    }
}

fn expr_in(e: &Expr, ctx: Ctx) -> String {
    match e {
        Expr::Var(v) => v.clone(),
        Expr::IfThenElse(c, t, f) => wrap(
            format!(
                "if {} then {} else {}",
                expr_in(c, Ctx::Top),
                expr_in(t, Ctx::Top),
                expr_in(f, Ctx::Top)
            ),
            ctx != Ctx::Top,
        ),
        Expr::ConsApp(_, args) if is_infix_cons(e) => wrap(
            format!(
                "{} :: {}",
                expr_in(&args[0], Ctx::ConsLeft),
                expr_in(&args[1], Ctx::Top)
            ),
            ctx != Ctx::Top,
        ),
        Expr::ConsApp(name, args) | Expr::FunApp(name, args) => {
            if args.is_empty() {
                wrap(name.clone(), ctx == Ctx::Head)
            } else {
                let mut s = name.clone();
                for a in args {
                    s.push(' ');
                    s.push_str(&expr_in(a, Ctx::Arg));
                }
                wrap(s, matches!(ctx, Ctx::Arg | Ctx::Head))
            }
        }
        Expr::App(head, args) => {
            let mut s = expr_in(head, Ctx::Head);
            for a in args {
                s.push(' ');
                s.push_str(&expr_in(a, Ctx::Arg));
            }
            wrap(s, matches!(ctx, Ctx::Arg | Ctx::Head))
        }
        Expr::Pair(a, b) => format!("({}, {})", expr_in(a, Ctx::Top), expr_in(b, Ctx::Top)),
        Expr::Choose(alts) => {
            let parts: Vec<String> = alts.iter().map(|a| expr_in(a, Ctx::Top)).collect();
            format!("choose({})", parts.join(", "))
        }
    }
}

pub(crate) fn expr_to_string(e: &Expr) -> String {
    expr_in(e, Ctx::Top)
}

pub(crate) fn pattern_to_string(p: &Pattern, arg: bool) -> String {
    match p {
        Pattern::Var(v) => v.clone(),
        Pattern::Cons(c, args) if args.is_empty() => c.clone(),
        Pattern::Cons(c, args) if c == CONS && args.len() == 2 => {
            let head = match &args[0] {
                Pattern::Cons(h, a) if h == CONS && a.len() == 2 => {
                    format!("({})", pattern_to_string(&args[0], false))
                }
                other => pattern_to_string(other, false),
            };
            wrap(
                format!("{head} :: {}", pattern_to_string(&args[1], false)),
                arg,
            )
        }
        Pattern::Cons(c, args) => {
            let mut s = c.clone();
            for a in args {
                s.push(' ');
                s.push_str(&pattern_to_string(a, true));
            }
            wrap(s, arg)
        }
        Pattern::Pair(a, b) => format!(
            "({}, {})",
            pattern_to_string(a, false),
            pattern_to_string(b, false)
        ),
    }
}

pub(crate) fn clause_to_string(c: &Clause) -> String {
    let mut s = c.function.clone();
    for p in &c.patterns {
        s.push(' ');
        s.push_str(&pattern_to_string(p, true));
    }
    s.push_str(" = ");
    s.push_str(&expr_to_string(&c.body));
    s
}

/// Renders `p` in the `.cf` format. Built-in declarations are omitted and
/// the main function is declared first.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    if p.terminating {
        out.push_str("# terminating\n");
    }
    for s in p.sorts.iter().filter(|s| !Program::is_builtin_sort(s)) {
        out.push_str(&format!("sort {s}\n"));
    }
    for (c, t) in p
        .constructors
        .iter()
        .filter(|(c, _)| !Program::is_builtin_constructor(c))
    {
        out.push_str(&format!("cons {c} : {}\n", type_to_string(t)));
    }
    let main = p.functions.iter().filter(|(f, _)| *f == p.main);
    let rest = p.functions.iter().filter(|(f, _)| *f != p.main);
    for (f, t) in main.chain(rest) {
        out.push_str(&format!("fun {f} : {}\n", type_to_string(t)));
    }
    for c in &p.clauses {
        out.push_str(&clause_to_string(c));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn prints_example_last() {
        let src = "fun last : list => bool\nlast (x :: nil) = x\nlast (x :: y :: zs) = last (y :: zs)\n";
        let p = parse_program(src).unwrap();
        let text = pretty_print(&p);
        assert!(text.contains("last (x :: y :: zs) = last (y :: zs)"));
        assert_eq!(text, src);
    }

    #[test]
    fn single_clause_program() {
        let p = parse_program("fun main : list => bool\nmain xs = choose(true, false)\n").unwrap();
        let text = pretty_print(&p);
        assert_eq!(text.lines().filter(|l| l.starts_with("main ")).count(), 1);
    }

    #[test]
    fn awkward_heads_round_trip() {
        let src = "fun f : (bool => bool) => bool => bool\nfun g : bool => bool\n\
                   f h b = (g) ((if b then h else g) (choose(h, g) b :: nil :: nil))\n\
                   g b = b\n";
        // `::` of bool lists is ill-typed here but the printer only cares
        // about shape.
        let p = parse_program(src).unwrap();
        let again = parse_program(&pretty_print(&p)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn types_print_minimal_parens() {
        let t = Type::arrow(
            Type::arrow(Type::sort("a"), Type::sort("b")),
            Type::product(
                Type::product(Type::sort("a"), Type::sort("b")),
                Type::sort("c"),
            ),
        );
        assert_eq!(type_to_string(&t), "(a => b) => (a * b) * c");
    }
}
