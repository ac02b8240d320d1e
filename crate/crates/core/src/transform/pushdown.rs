use crate::syntax::Expr;

use super::Rewrite;

/// Normalises `e` bottom-up so that no application has an `if`, `choose`,
/// or another application as its head.
pub(super) fn normalise(e: &Expr, clause: usize, path: &mut Vec<usize>, log: &mut Vec<Rewrite>) -> Expr {
    let rebuilt = match e {
        Expr::Var(_) => e.clone(),
        Expr::ConsApp(c, args) => Expr::ConsApp(c.clone(), many(args, 0, clause, path, log)),
        Expr::FunApp(f, args) => Expr::FunApp(f.clone(), many(args, 0, clause, path, log)),
        Expr::Choose(args) => Expr::Choose(many(args, 0, clause, path, log)),
        Expr::App(head, args) => {
            path.push(0);
            let head = normalise(head, clause, path, log);
            path.pop();
            Expr::App(Box::new(head), many(args, 1, clause, path, log))
        }
        Expr::Pair(a, b) => {
            let mut kids = many(&[(**a).clone(), (**b).clone()], 0, clause, path, log);
            let b = kids.pop().unwrap();
            Expr::pair(kids.pop().unwrap(), b)
        }
        Expr::IfThenElse(c, t, f) => {
            let mut kids = many(&[(**c).clone(), (**t).clone(), (**f).clone()], 0, clause, path, log);
            let f = kids.pop().unwrap();
            let t = kids.pop().unwrap();
            Expr::ite(kids.pop().unwrap(), t, f)
        }
    };
    compose(rebuilt, clause, path, log)
}

fn many(args: &[Expr], offset: usize, clause: usize, path: &mut Vec<usize>, log: &mut Vec<Rewrite>) -> Vec<Expr> {
    args.iter()
        .enumerate()
        .map(|(i, a)| {
            path.push(i + offset);
            let out = normalise(a, clause, path, log);
            path.pop();
            out
        })
        .collect()
}

/// Applies one composition step at the root of `e`, whose children are
/// already normal.
fn compose(e: Expr, clause: usize, path: &mut Vec<usize>, log: &mut Vec<Rewrite>) -> Expr {
    let Expr::App(head, args) = e else {
        return e;
    };
    let note = |log: &mut Vec<Rewrite>, path: &[usize], rule: &str| {
        log.push(Rewrite {
            clause,
            path: path.to_vec(),
            rule: rule.to_string(),
        })
    };
    match *head {
        Expr::IfThenElse(c, t, f) => {
            note(log, path, "if-pushdown");
            let t = at(path, 1, |path| compose(Expr::App(t, args.clone()), clause, path, log));
            let f = at(path, 2, |path| compose(Expr::App(f, args), clause, path, log));
            Expr::ite(*c, t, f)
        }
        Expr::Choose(alts) => {
            note(log, path, "choose-pushdown");
            let alts = alts
                .into_iter()
                .enumerate()
                .map(|(i, a)| at(path, i, |path| compose(Expr::App(Box::new(a), args.clone()), clause, path, log)))
                .collect();
            Expr::Choose(alts)
        }
        Expr::FunApp(f, mut xs) => {
            note(log, path, "flatten");
            xs.extend(args);
            Expr::FunApp(f, xs)
        }
        Expr::ConsApp(c, mut xs) => {
            note(log, path, "flatten");
            xs.extend(args);
            Expr::ConsApp(c, xs)
        }
        Expr::App(h, mut xs) => {
            note(log, path, "flatten");
            xs.extend(args);
            Expr::App(h, xs)
        }
        head => Expr::App(Box::new(head), args),
    }
}

fn at<T>(path: &mut Vec<usize>, step: usize, f: impl FnOnce(&mut Vec<usize>) -> T) -> T {
    path.push(step);
    let out = f(path);
    path.pop();
    out
}
