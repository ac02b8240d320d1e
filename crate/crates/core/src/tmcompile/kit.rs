//! Counting modules: arithmetic on numbers bounded by a polynomial (order 0)
//! or an exponential (order 1) in the length of the input list `cs`.

use crate::syntax::{parse_program, Program};
use crate::value::Value;

/// Generated source for a counting module plus the expressions that the
/// compiler splices into its clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingKit {
    pub order: usize,
    /// Digits per number (order 0) or per bit index (order 1).
    pub width: usize,
    /// Type of numbers.
    pub num_type: String,
    pub declarations: Vec<String>,
    pub clauses: Vec<String>,
}

impl CountingKit {
    pub fn zero(&self) -> String {
        match self.order {
            0 => zero_literal(self.width),
            _ => "nul".into(),
        }
    }

    pub fn iszero(&self, n: &str) -> String {
        match self.order {
            0 => format!("iszero{} {n}", self.width),
            _ => format!("iszerof cs {n}"),
        }
    }

    pub fn succ(&self, n: &str) -> String {
        match self.order {
            0 => format!("succ{} cs {n}", self.width),
            _ => format!("succf cs {n}"),
        }
    }

    pub fn pred(&self, n: &str) -> String {
        match self.order {
            0 => format!("pred{} cs {n}", self.width),
            _ => format!("predf cs {n}"),
        }
    }

    pub fn eq(&self, a: &str, b: &str) -> String {
        match self.order {
            0 => format!("eq{} {a} {b}", self.width),
            _ => format!("eqf cs {a} {b}"),
        }
    }

    pub fn source(&self) -> String {
        let mut out = String::new();
        for line in self.declarations.iter().chain(&self.clauses) {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// The module on its own, behind a trivial main function, so that its
    /// functions can be run directly.
    pub fn standalone(&self) -> Program {
        let text = format!("# terminating\nfun kit_main : list => bool\nkit_main cs = true\n{}", self.source());
        parse_program(&text).expect("counting module parses")
    }

    /// The order-0 representation of `i` relative to `cs`.
    pub fn encode(&self, cs: &Value, i: u128) -> Value {
        encode_digits(cs, i, self.width)
    }

    /// Inverse of [`CountingKit::encode`].
    pub fn decode(&self, cs: &Value, v: &Value) -> Option<u128> {
        decode_digits(cs, v, self.width)
    }
}

fn zero_literal(width: usize) -> String {
    match width {
        1 => "nil".into(),
        _ => format!("(nil, {})", zero_literal(width - 1)),
    }
}

fn tuple_type(width: usize) -> String {
    vec!["list"; width].join(" * ")
}

fn suffix(cs: &Value, len: usize) -> Value {
    let total = cs.list_len().unwrap_or(0);
    let mut cur = cs;
    for _ in len..total {
        match cur {
            Value::Cons(_, args) if args.len() == 2 => cur = &args[1],
            _ => break,
        }
    }
    cur.clone()
}

fn encode_digits(cs: &Value, mut i: u128, width: usize) -> Value {
    let base = cs.list_len().unwrap_or(0) as u128 + 1;
    let mut digits = Vec::with_capacity(width);
    for _ in 0..width {
        digits.push(suffix(cs, (i % base) as usize));
        i /= base;
    }
    let mut it = digits.into_iter();
    let mut acc = it.next().unwrap();
    for d in it {
        acc = Value::pair(d, acc);
    }
    acc
}

fn decode_digits(cs: &Value, v: &Value, width: usize) -> Option<u128> {
    let base = cs.list_len()? as u128 + 1;
    let mut cur = v;
    let mut acc = 0u128;
    for _ in 1..width {
        let Value::Pair(d, rest) = cur else { return None };
        acc = acc * base + d.list_len()? as u128;
        cur = rest;
    }
    Some(acc * base + cur.list_len()? as u128)
}

/// Numbers `0 ..= (n+1)^k - 1` as `k` digits, most significant first. A
/// digit is a suffix of `cs`, read as its length. Successor and
/// predecessor saturate at the ends of the range.
pub fn gen_counting_order0(k: usize) -> CountingKit {
    assert!(k >= 1, "at least one digit");
    let mut d = Vec::new();
    let mut c = Vec::new();
    d.push("fun dpred : list => list".into());
    c.push("dpred nil = nil".into());
    c.push("dpred (x :: xs) = xs".into());
    d.push("fun deq : list => list => bool".into());
    c.push("deq nil nil = true".into());
    c.push("deq nil (y :: ys) = false".into());
    c.push("deq (x :: xs) nil = false".into());
    c.push("deq (x :: xs) (y :: ys) = deq xs ys".into());
    d.push("fun dsucc : list => list => list".into());
    c.push("dsucc nil e = nil".into());
    c.push("dsucc (x :: xs) e = if deq xs e then x :: xs else dsucc xs e".into());
    for j in 1..=k {
        let t = tuple_type(j);
        d.push(format!("fun iszero{j} : {t} => bool"));
        d.push(format!("fun ismax{j} : list => {t} => bool"));
        d.push(format!("fun eq{j} : {t} => {t} => bool"));
        d.push(format!("fun succ{j} : list => {t} => {t}"));
        d.push(format!("fun pred{j} : list => {t} => {t}"));
        d.push(format!("fun top{j} : list => {t}"));
        if j == 1 {
            c.push("iszero1 nil = true".into());
            c.push("iszero1 (x :: xs) = false".into());
            c.push("ismax1 cs e = deq cs e".into());
            c.push("eq1 a b = deq a b".into());
            c.push("succ1 cs e = if deq cs e then e else dsucc cs e".into());
            c.push("pred1 cs e = dpred e".into());
            c.push("top1 cs = cs".into());
            continue;
        }
        let i = j - 1;
        let z = zero_literal(i);
        c.push(format!("iszero{j} (e, r) = if iszero1 e then iszero{i} r else false"));
        c.push(format!("ismax{j} cs (e, r) = if deq cs e then ismax{i} cs r else false"));
        c.push(format!("eq{j} (a, r) (b, s) = if deq a b then eq{i} r s else false"));
        c.push(format!(
            "succ{j} cs (e, r) = if ismax{i} cs r then (if deq cs e then (e, r) else (dsucc cs e, {z})) else (e, succ{i} cs r)"
        ));
        c.push(format!(
            "pred{j} cs (e, r) = if iszero{i} r then (if iszero1 e then (e, r) else (dpred e, top{i} cs)) else (e, pred{i} cs r)"
        ));
        c.push(format!("top{j} cs = (cs, top{i} cs)"));
    }
    CountingKit {
        order: 0,
        width: k,
        num_type: tuple_type(k),
        declarations: d,
        clauses: c,
    }
}

/// Numbers below `2^((n+1)^k)` as bit functions: a number is a value of
/// type `I => bool`, where `I` is the order-0 number type of width `k` and
/// index 0 holds the least significant bit. Arithmetic wraps around.
pub fn gen_counting_order1(k: usize) -> CountingKit {
    let base = gen_counting_order0(k);
    let i = tuple_type(k);
    let w = format!("(({i}) => bool)");
    let mut d = base.declarations;
    let mut c = base.clauses;
    let mut add = |decl: String, clauses: &[String]| {
        d.push(decl);
        c.extend_from_slice(clauses);
    };
    add(format!("fun nul : {i} => bool"), &["nul j = false".into()]);
    add(
        "fun negb : bool => bool".into(),
        &["negb true = false".into(), "negb false = true".into()],
    );
    add(
        "fun xor : bool => bool => bool".into(),
        &["xor true b = negb b".into(), "xor false b = b".into()],
    );
    for (name, below) in [("lowones", "lowones cs F (pred{k} cs j) else false"), ("lowzeros", "false else lowzeros cs F (pred{k} cs j)")] {
        let below = below.replace("{k}", &k.to_string());
        add(
            format!("fun {name} : list => {w} => {i} => bool"),
            &[format!(
                "{name} cs F j = if iszero{k} j then true else (if F (pred{k} cs j) then {below})"
            )],
        );
    }
    add(
        format!("fun succf : list => {w} => {i} => bool"),
        &["succf cs F j = xor (F j) (lowones cs F j)".into()],
    );
    add(
        format!("fun predf : list => {w} => {i} => bool"),
        &["predf cs F j = xor (F j) (lowzeros cs F j)".into()],
    );
    add(
        format!("fun zscan : list => {w} => {i} => bool"),
        &[format!(
            "zscan cs F j = if F j then false else (if iszero{k} j then true else zscan cs F (pred{k} cs j))"
        )],
    );
    add(
        format!("fun iszerof : list => {w} => bool"),
        &[format!("iszerof cs F = zscan cs F (top{k} cs)")],
    );
    add(
        format!("fun escan : list => {w} => {w} => {i} => bool"),
        &[format!(
            "escan cs F G j = if xor (F j) (G j) then false else (if iszero{k} j then true else escan cs F G (pred{k} cs j))"
        )],
    );
    add(
        format!("fun eqf : list => {w} => {w} => bool"),
        &[format!("eqf cs F G = escan cs F G (top{k} cs)")],
    );
    CountingKit {
        order: 1,
        width: k,
        num_type: w[1..w.len() - 1].to_string(),
        declarations: d,
        clauses: c,
    }
}
