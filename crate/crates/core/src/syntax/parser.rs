use std::collections::HashSet;

use super::lexer::{tokenize, Tok, Token};
use super::{Clause, Expr, Pattern, Program, SyntaxError, Type};
use crate::value::Data;

const KEYWORDS: &[&str] = &["sort", "cons", "fun", "if", "then", "else", "choose"];

/// A logical line: a physical line plus its indented continuations.
struct Line {
    number: usize,
    tokens: Vec<Token>,
}

fn logical_lines(text: &str) -> Result<(Vec<Line>, bool), SyntaxError> {
    let mut lines: Vec<Line> = Vec::new();
    let mut terminating = false;
    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        if raw.trim() == "# terminating" {
            terminating = true;
            continue;
        }
        let tokens = tokenize(raw, number)?;
        if tokens.is_empty() {
            continue;
        }
        let continues = raw.starts_with(char::is_whitespace);
        match lines.last_mut() {
            Some(prev) if continues => prev.tokens.extend(tokens),
            _ if continues => {
                return Err(SyntaxError::Parse {
                    line: number,
                    column: 1,
                    message: "continuation line without a preceding line".into(),
                })
            }
            _ => lines.push(Line { number, tokens }),
        }
    }
    Ok((lines, terminating))
}

fn keyword(tokens: &[Token]) -> Option<&str> {
    match tokens.first().map(|t| &t.tok) {
        Some(Tok::Ident(w)) if matches!(w.as_str(), "sort" | "cons" | "fun") => Some(w.as_str()),
        _ => None,
    }
}

/// Parses a `.cf` program. Declarations may appear in any order; clause
/// order is kept exactly as written.
pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    let (lines, terminating) = logical_lines(text)?;
    let mut program = Program::with_builtins("");
    program.terminating = terminating;

    // Sorts first so that types may mention sorts declared later.
    for line in lines.iter().filter(|l| keyword(&l.tokens) == Some("sort")) {
        let mut cur = Cursor::new(&line.tokens, line.number);
        cur.next();
        let (name, at) = cur.ident()?;
        cur.end()?;
        check_name(&name, at)?;
        if program.sorts.contains(&name) {
            return Err(duplicate(&name, at));
        }
        program.sorts.push(name);
    }

    for line in &lines {
        let kind = keyword(&line.tokens);
        if !matches!(kind, Some("cons") | Some("fun")) {
            continue;
        }
        let mut cur = Cursor::new(&line.tokens, line.number);
        cur.next();
        let (name, at) = cur.ident()?;
        check_name(&name, at)?;
        cur.expect(Tok::Colon, "`:`")?;
        let ty = cur.parse_type(&program)?;
        cur.end()?;
        if program.is_constructor(&name) || program.is_function(&name) {
            return Err(duplicate(&name, at));
        }
        if kind == Some("cons") {
            let (args, result) = ty.uncurry();
            if !matches!(result, Type::Sort(_)) {
                return Err(parse_error(at, "constructor result type must be a sort"));
            }
            if args.iter().any(|a| crate::analysis::type_order(a) > 0) {
                return Err(parse_error(
                    at,
                    "constructor argument types must have type order 0",
                ));
            }
            program.constructors.push((name, ty));
        } else {
            if program.functions.is_empty() {
                program.main = name.clone();
            }
            program.functions.push((name, ty));
        }
    }
    if program.functions.is_empty() {
        return Err(SyntaxError::NoMain);
    }

    for line in lines.iter().filter(|l| keyword(&l.tokens).is_none()) {
        let clause = parse_clause(&program, line)?;
        if let Some(k) = program.arity(&clause.function) {
            if k != clause.patterns.len() {
                return Err(parse_error(
                    (line.number, 1),
                    &format!(
                        "clause for `{}` has {} patterns but earlier clauses have {}",
                        clause.function,
                        clause.patterns.len(),
                        k
                    ),
                ));
            }
        }
        program.clauses.push(clause);
    }
    Ok(program)
}

fn parse_clause(program: &Program, line: &Line) -> Result<Clause, SyntaxError> {
    let mut cur = Cursor::new(&line.tokens, line.number);
    let (function, at) = cur.ident()?;
    if !program.is_function(&function) {
        if program.is_constructor(&function) {
            return Err(parse_error(at, &format!("`{function}` is a constructor, not a function")));
        }
        return Err(unknown(&function, at));
    }
    let mut patterns = Vec::new();
    while !cur.at(&Tok::Equals) {
        if cur.peek().is_none() {
            return Err(cur.error("expected `=`"));
        }
        patterns.push(cur.pattern_atom(program)?);
    }
    cur.next();
    let mut seen = HashSet::new();
    for p in &patterns {
        for v in p.variables() {
            if !seen.insert(v.to_string()) {
                return Err(SyntaxError::NonLinearPattern {
                    line: line.number,
                    column: 1,
                    name: v.to_string(),
                });
            }
        }
    }
    let scope: Vec<String> = seen.into_iter().collect();
    let body = cur.expr(program, &scope)?;
    cur.end()?;
    Ok(Clause {
        function,
        patterns,
        body,
    })
}

/// Parses a type in the context of `program`'s sorts.
pub fn parse_type(program: &Program, text: &str) -> Result<Type, SyntaxError> {
    let tokens = tokenize(text, 1)?;
    let mut cur = Cursor::new(&tokens, 1);
    let t = cur.parse_type(program)?;
    cur.end()?;
    Ok(t)
}

/// Parses an expression with the given variables in scope.
pub fn parse_expr(program: &Program, vars: &[&str], text: &str) -> Result<Expr, SyntaxError> {
    let tokens = tokenize(text, 1)?;
    let mut cur = Cursor::new(&tokens, 1);
    let scope: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    let e = cur.expr(program, &scope)?;
    cur.end()?;
    Ok(e)
}

/// Encodes a word over {0,1} as `b1 :: ... :: bn :: nil` with 1 as `true`.
pub fn parse_input_bits(text: &str) -> Result<Data, SyntaxError> {
    let mut bits = Vec::with_capacity(text.len());
    for (offset, c) in text.chars().enumerate() {
        match c {
            '0' => bits.push(false),
            '1' => bits.push(true),
            found => return Err(SyntaxError::BadInputWord { offset, found }),
        }
    }
    Ok(Data::bool_list(&bits))
}

fn check_name(name: &str, at: (usize, usize)) -> Result<(), SyntaxError> {
    if KEYWORDS.contains(&name) {
        return Err(parse_error(at, &format!("`{name}` is a keyword")));
    }
    Ok(())
}

fn parse_error(at: (usize, usize), message: &str) -> SyntaxError {
    SyntaxError::Parse {
        line: at.0,
        column: at.1,
        message: message.to_string(),
    }
}

fn duplicate(name: &str, at: (usize, usize)) -> SyntaxError {
    SyntaxError::DuplicateDeclaration {
        line: at.0,
        column: at.1,
        name: name.to_string(),
    }
}

fn unknown(name: &str, at: (usize, usize)) -> SyntaxError {
    SyntaxError::UnknownIdentifier {
        line: at.0,
        column: at.1,
        name: name.to_string(),
    }
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token], line: usize) -> Self {
        Cursor {
            tokens,
            pos: 0,
            line,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().map(|t| &t.tok == tok).unwrap_or(false)
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(w), .. }) if w == word)
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.column),
            None => match self.tokens.last() {
                Some(t) => (t.line, t.column + 1),
                None => (self.line, 1),
            },
        }
    }

    fn error(&self, message: &str) -> SyntaxError {
        let found = match self.peek() {
            Some(t) => format!("{:?}", t.tok),
            None => "end of line".to_string(),
        };
        parse_error(self.here(), &format!("{message}, found {found}"))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.at(&tok) {
            self.next();
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), SyntaxError> {
        if self.at_word(word) {
            self.next();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{word}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, (usize, usize)), SyntaxError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(w),
                line,
                column,
            }) => {
                self.pos += 1;
                Ok((w.clone(), (*line, *column)))
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn end(&self) -> Result<(), SyntaxError> {
        if self.peek().is_some() {
            Err(self.error("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    // type := prod ('=>' type)?     prod := atom ('*' prod)?
    fn parse_type(&mut self, program: &Program) -> Result<Type, SyntaxError> {
        let left = self.type_product(program)?;
        if self.at(&Tok::FatArrow) {
            self.next();
            let right = self.parse_type(program)?;
            return Ok(Type::arrow(left, right));
        }
        Ok(left)
    }

    fn type_product(&mut self, program: &Program) -> Result<Type, SyntaxError> {
        let left = self.type_atom(program)?;
        if self.at(&Tok::Star) {
            self.next();
            let right = self.type_product(program)?;
            return Ok(Type::product(left, right));
        }
        Ok(left)
    }

    fn type_atom(&mut self, program: &Program) -> Result<Type, SyntaxError> {
        if self.at(&Tok::LParen) {
            self.next();
            let t = self.parse_type(program)?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(t);
        }
        let (name, at) = self.ident()?;
        if !program.sorts.contains(&name) {
            return Err(unknown(&name, at));
        }
        Ok(Type::Sort(name))
    }

    // pattern := papp ('::' pattern)?
    fn pattern(&mut self, program: &Program) -> Result<Pattern, SyntaxError> {
        let head = self.pattern_app(program)?;
        if self.at(&Tok::ColonColon) {
            self.next();
            let tail = self.pattern(program)?;
            return Ok(Pattern::list_cons(head, tail));
        }
        Ok(head)
    }

    fn pattern_app(&mut self, program: &Program) -> Result<Pattern, SyntaxError> {
        if let Some(Token {
            tok: Tok::Ident(name),
            ..
        }) = self.peek()
        {
            if let Some(ty) = program.constructor_type(name) {
                let at = self.here();
                self.next();
                let want = ty.uncurry().0.len();
                let mut args = Vec::new();
                while args.len() < want && self.pattern_atom_start() {
                    args.push(self.pattern_atom(program)?);
                }
                if args.len() != want {
                    return Err(parse_error(
                        at,
                        &format!("constructor `{name}` in a pattern needs {want} arguments"),
                    ));
                }
                return Ok(Pattern::Cons(name.clone(), args));
            }
        }
        self.pattern_atom(program)
    }

    fn pattern_atom_start(&self) -> bool {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::LParen) => true,
            Some(Tok::Ident(w)) => !KEYWORDS.contains(&w.as_str()),
            _ => false,
        }
    }

    fn pattern_atom(&mut self, program: &Program) -> Result<Pattern, SyntaxError> {
        if self.at(&Tok::LParen) {
            self.next();
            let first = self.pattern(program)?;
            if self.at(&Tok::Comma) {
                self.next();
                let second = self.pattern(program)?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Pattern::pair(first, second));
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(first);
        }
        let (name, at) = self.ident()?;
        check_name(&name, at)?;
        if let Some(ty) = program.constructor_type(&name) {
            if !ty.uncurry().0.is_empty() {
                return Err(parse_error(
                    at,
                    &format!("constructor `{name}` must be applied inside parentheses"),
                ));
            }
            return Ok(Pattern::Cons(name, Vec::new()));
        }
        if program.is_function(&name) {
            return Err(parse_error(
                at,
                &format!("function `{name}` cannot be used as a pattern variable"),
            ));
        }
        Ok(Pattern::Var(name))
    }

    // expr := 'if' expr 'then' expr 'else' expr | cons
    fn expr(&mut self, program: &Program, scope: &[String]) -> Result<Expr, SyntaxError> {
        if self.at_word("if") {
            self.next();
            let c = self.expr(program, scope)?;
            self.expect_word("then")?;
            let t = self.expr(program, scope)?;
            self.expect_word("else")?;
            let e = self.expr(program, scope)?;
            return Ok(Expr::ite(c, t, e));
        }
        let head = self.application(program, scope)?;
        if self.at(&Tok::ColonColon) {
            self.next();
            let tail = self.expr(program, scope)?;
            return Ok(Expr::list_cons(head, tail));
        }
        Ok(head)
    }

    fn atom_start(&self) -> bool {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::LParen) => true,
            Some(Tok::Ident(w)) => {
                w == "choose" || !KEYWORDS.contains(&w.as_str())
            }
            _ => false,
        }
    }

    fn application(&mut self, program: &Program, scope: &[String]) -> Result<Expr, SyntaxError> {
        if !self.atom_start() {
            return Err(self.error("expected an expression"));
        }
        let bare = match self.peek() {
            Some(Token {
                tok: Tok::Ident(w),
                line,
                column,
            }) if w != "choose" => Some((w.clone(), (*line, *column))),
            _ => None,
        };
        let head = match &bare {
            Some(_) => {
                self.next();
                None
            }
            None => Some(self.atom(program, scope)?),
        };
        let mut args = Vec::new();
        while self.atom_start() {
            args.push(self.atom(program, scope)?);
        }
        match (head, bare) {
            (Some(h), _) if args.is_empty() => Ok(h),
            (Some(h), _) => Ok(Expr::app(h, args)),
            (None, Some((name, at))) => resolve(program, scope, name, at, args),
            (None, None) => unreachable!(),
        }
    }

    fn atom(&mut self, program: &Program, scope: &[String]) -> Result<Expr, SyntaxError> {
        if self.at(&Tok::LParen) {
            self.next();
            let first = self.expr(program, scope)?;
            if self.at(&Tok::Comma) {
                self.next();
                let second = self.expr(program, scope)?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Expr::pair(first, second));
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(first);
        }
        if self.at_word("choose") {
            self.next();
            self.expect(Tok::LParen, "`(` after choose")?;
            let mut alts = vec![self.expr(program, scope)?];
            while self.at(&Tok::Comma) {
                self.next();
                alts.push(self.expr(program, scope)?);
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Choose(alts));
        }
        let (name, at) = self.ident()?;
        resolve(program, scope, name, at, Vec::new())
    }
}

fn resolve(
    program: &Program,
    scope: &[String],
    name: String,
    at: (usize, usize),
    args: Vec<Expr>,
) -> Result<Expr, SyntaxError> {
    if scope.contains(&name) {
        return Ok(if args.is_empty() {
            Expr::Var(name)
        } else {
            Expr::app(Expr::Var(name), args)
        });
    }
    if let Some(ty) = program.constructor_type(&name) {
        let declared = ty.uncurry().0.len();
        if args.len() > declared {
            return Err(parse_error(
                at,
                &format!(
                    "constructor `{name}` takes {declared} arguments but is given {}",
                    args.len()
                ),
            ));
        }
        return Ok(Expr::ConsApp(name, args));
    }
    if program.is_function(&name) {
        return Ok(Expr::FunApp(name, args));
    }
    Err(unknown(&name, at))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAST: &str = "fun last : list => bool\nlast (x :: nil) = x\nlast (x :: y :: zs) = last (y :: zs)\n";

    #[test]
    fn parses_example_last() {
        let p = parse_program(LAST).unwrap();
        assert_eq!(p.main, "last");
        assert_eq!(p.clauses.len(), 2);
        assert_eq!(
            p.clauses[0].patterns,
            vec![Pattern::list_cons(Pattern::var("x"), Pattern::cons("nil", vec![]))]
        );
        assert_eq!(
            p.clauses[1].body,
            Expr::call(
                "last",
                vec![Expr::list_cons(Expr::var("y"), Expr::var("zs"))]
            )
        );
        assert!(!p.terminating);
    }

    #[test]
    fn empty_program_has_no_main() {
        assert_eq!(parse_program(""), Err(SyntaxError::NoMain));
        assert_eq!(parse_program("# only a comment\n"), Err(SyntaxError::NoMain));
    }

    #[test]
    fn input_words() {
        assert_eq!(parse_input_bits("").unwrap(), Data::nil());
        assert_eq!(
            parse_input_bits("10").unwrap(),
            Data::list_cons(
                Data::boolean(true),
                Data::list_cons(Data::boolean(false), Data::nil())
            )
        );
        assert_eq!(
            parse_input_bits("0110").unwrap(),
            Data::bool_list(&[false, true, true, false])
        );
        assert!(matches!(
            parse_input_bits("01a"),
            Err(SyntaxError::BadInputWord { offset: 2, found: 'a' })
        ));
    }

    #[test]
    fn types_associate_right_and_star_binds_tighter() {
        let p = Program::with_builtins("m");
        let t = parse_type(&p, "list * list * list => bool => bool").unwrap();
        let triple = Type::product(
            Type::sort("list"),
            Type::product(Type::sort("list"), Type::sort("list")),
        );
        assert_eq!(
            t,
            Type::arrow(triple, Type::arrow(Type::sort("bool"), Type::sort("bool")))
        );
    }

    #[test]
    fn rejects_nonlinear_patterns() {
        let src = "fun f : bool => bool => bool\nf x x = x\n";
        assert!(matches!(
            parse_program(src),
            Err(SyntaxError::NonLinearPattern { name, .. }) if name == "x"
        ));
    }

    #[test]
    fn rejects_duplicates_and_unknowns() {
        assert!(matches!(
            parse_program("fun f : bool => bool\nfun f : bool => bool\nf x = x\n"),
            Err(SyntaxError::DuplicateDeclaration { .. })
        ));
        assert!(matches!(
            parse_program("sort bool\nfun f : bool => bool\nf x = x\n"),
            Err(SyntaxError::DuplicateDeclaration { .. })
        ));
        assert!(matches!(
            parse_program("fun f : bool => bool\nf x = y\n"),
            Err(SyntaxError::UnknownIdentifier { name, line: 2, .. }) if name == "y"
        ));
        assert!(matches!(
            parse_program("fun f : colour => bool\nf x = x\n"),
            Err(SyntaxError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_program("fun f : bool => bool\ng x = x\n"),
            Err(SyntaxError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn reports_line_and_column() {
        match parse_program("fun f : bool => bool\nf x = (x\n") {
            Err(SyntaxError::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn continuation_lines_join() {
        let src = "fun f : bool => bool\nf x =\n  if x\n  then false else true\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.clauses.len(), 1);
        assert!(matches!(p.clauses[0].body, Expr::IfThenElse(..)));
    }

    #[test]
    fn application_heads() {
        let src = "# terminating\nfun f : (bool => bool) => bool => bool\nfun g : bool => bool\n\
                   f h b = (if b then h else g) (choose(b, h b))\ng b = b\n";
        let p = parse_program(src).unwrap();
        assert!(p.terminating);
        match &p.clauses[0].body {
            Expr::App(head, args) => {
                assert!(matches!(head.as_ref(), Expr::IfThenElse(..)));
                assert!(matches!(&args[0], Expr::Choose(alts) if alts.len() == 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constructor_overapplication_is_rejected() {
        let src = "fun f : bool => bool\nf x = true x\n";
        assert!(matches!(parse_program(src), Err(SyntaxError::Parse { .. })));
    }
}
