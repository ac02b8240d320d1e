//! Counting with suffixes of the input: order-0 digit tuples and order-1
//! bit functions.

use consfree::interp::{enumerate_with, Strategy};
use consfree::tmcompile::{digit_width, gen_counting_order0, gen_counting_order1};
use consfree::Value;

fn main() {
    println!("digit width for 4 n^2: {}", digit_width(4, 2));
    let kit = gen_counting_order0(2);
    let p = kit.standalone();
    let cs = Value::bool_list(&[true, false]);
    let mut v = kit.encode(&cs, 0);
    for _ in 0..9 {
        print!("{} ", kit.decode(&cs, &v).unwrap());
        let out = enumerate_with(&p, "succ2", &[cs.clone(), v], 1000, Strategy::Memo).unwrap();
        v = out.results.into_iter().next().unwrap();
    }
    println!("(saturates at {})", kit.decode(&cs, &v).unwrap());

    let kit = gen_counting_order1(1);
    let p = kit.standalone();
    let cs = Value::bool_list(&[true]);
    let mut f = Value::Partial("nul".into(), Vec::new());
    for _ in 0..3 {
        f = Value::Partial("succf".into(), vec![cs.clone(), f]);
    }
    let bits: Vec<String> = (0..2)
        .map(|j| {
            let Value::Partial(name, args) = &f else { unreachable!() };
            let mut all = args.clone();
            all.push(kit.encode(&cs, j));
            enumerate_with(&p, name, &all, u64::MAX, Strategy::Memo).unwrap().rendered().join("")
        })
        .collect();
    println!("three as bits, least significant first: {}", bits.join(" "));
}
