//! Parses a program and runs the static checks on it.
//!
//! `cargo run --example parse_and_check [file.cf]`

use consfree::analysis::{check_cons_free, check_immutability, data_order, typecheck};
use consfree::{parse_program, pretty_print};

const FLIP: &str = "fun flip : list => list
flip nil = nil
flip (true :: xs) = false :: (flip xs)
flip (false :: xs) = true :: (flip xs)
";

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).expect("readable program"),
        None => FLIP.to_string(),
    };
    let p = parse_program(&text).expect("program parses");
    print!("{}", pretty_print(&p));
    let tp = typecheck(&p).expect("program type-checks");
    println!("data order: {}", data_order(&p));
    print!("{}", check_cons_free(&p));
    print!("{}", check_immutability(&tp, 1));
}
