//! Runtime values: data (constructor trees and pairs) and partial
//! applications of defined functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{CONS, FALSE, NIL, TRUE};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    /// A fully applied data constructor.
    Cons(String, Vec<Value>),
    Pair(Box<Value>, Box<Value>),
    /// `f v1 .. vn` with `n` below the arity of `f`.
    Partial(String, Vec<Value>),
}

/// Data is a value without partial applications.
pub type Data = Value;

impl Value {
    pub fn constant(name: &str) -> Value {
        Value::Cons(name.to_string(), Vec::new())
    }

    pub fn boolean(b: bool) -> Value {
        Value::constant(if b { TRUE } else { FALSE })
    }

    pub fn nil() -> Value {
        Value::constant(NIL)
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn list_cons(head: Value, tail: Value) -> Value {
        Value::Cons(CONS.to_string(), vec![head, tail])
    }

    /// `b1 :: b2 :: ... :: nil`.
    pub fn bool_list(bits: &[bool]) -> Value {
        bits.iter()
            .rev()
            .fold(Value::nil(), |acc, &b| Value::list_cons(Value::boolean(b), acc))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Cons(c, args) if args.is_empty() && c == TRUE => Some(true),
            Value::Cons(c, args) if args.is_empty() && c == FALSE => Some(false),
            _ => None,
        }
    }

    /// Length of a `::`/`nil` list, if this is one.
    pub fn list_len(&self) -> Option<usize> {
        let mut cur = self;
        let mut n = 0;
        loop {
            match cur {
                Value::Cons(c, args) if c == NIL && args.is_empty() => return Some(n),
                Value::Cons(c, args) if c == CONS && args.len() == 2 => {
                    n += 1;
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }

    pub fn is_data(&self) -> bool {
        match self {
            Value::Cons(_, args) => args.iter().all(Value::is_data),
            Value::Pair(a, b) => a.is_data() && b.is_data(),
            Value::Partial(..) => false,
        }
    }

    /// All data subterms (including `self` when it is data).
    pub fn data_subterms(&self) -> Vec<&Value> {
        let mut out = Vec::new();
        fn go<'a>(v: &'a Value, out: &mut Vec<&'a Value>) {
            if v.is_data() {
                out.push(v);
            }
            match v {
                Value::Cons(_, args) | Value::Partial(_, args) => {
                    args.iter().for_each(|a| go(a, out))
                }
                Value::Pair(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    fn is_atomic(&self) -> bool {
        match self {
            Value::Cons(_, args) | Value::Partial(_, args) => args.is_empty(),
            Value::Pair(..) => true,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Cons(c, args) if c == CONS && args.len() == 2 => {
                args[0].write_operand(f, true)?;
                f.write_str(" :: ")?;
                args[1].write(f)
            }
            Value::Cons(name, args) | Value::Partial(name, args) => {
                f.write_str(name)?;
                for a in args {
                    f.write_str(" ")?;
                    a.write_operand(f, false)?;
                }
                Ok(())
            }
            Value::Pair(a, b) => {
                f.write_str("(")?;
                a.write(f)?;
                f.write_str(", ")?;
                b.write(f)?;
                f.write_str(")")
            }
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, cons_left: bool) -> fmt::Result {
        let infix = matches!(self, Value::Cons(c, a) if c == CONS && a.len() == 2);
        let bare = self.is_atomic() || (cons_left && !infix);
        if bare {
            self.write(f)
        } else {
            f.write_str("(")?;
            self.write(f)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f)
    }
}

/// Renders a set of values one per line, sorted by printed form.
pub fn render_sorted<'a>(values: impl IntoIterator<Item = &'a Value>) -> Vec<String> {
    let mut lines: Vec<String> = values.into_iter().map(Value::to_string).collect();
    lines.sort();
    lines.dedup();
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_print_infix() {
        let v = Value::bool_list(&[true, false]);
        assert_eq!(v.to_string(), "true :: false :: nil");
        assert_eq!(v.list_len(), Some(2));
    }

    #[test]
    fn nested_values_are_parenthesised() {
        let inner = Value::Partial("f".into(), vec![Value::boolean(true)]);
        let v = Value::Partial("g".into(), vec![inner, Value::nil()]);
        assert_eq!(v.to_string(), "g (f true) nil");
        let p = Value::pair(Value::nil(), Value::bool_list(&[true]));
        assert_eq!(p.to_string(), "(nil, true :: nil)");
        let l = Value::list_cons(Value::constant("c"), Value::nil());
        assert_eq!(l.to_string(), "c :: nil");
    }
}
