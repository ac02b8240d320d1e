//! Compiles a machine into a cons-free program and checks both agree.
//!
//! `cargo run --example compile_machine [machine.tm]`

use consfree::interp::enumerate_results;
use consfree::tmcompile::{compile_machine, compile_machine_source, StepPolynomial};
use consfree::turing::{index_options, parse_machine, run_machine, word_bits};
use consfree::Value;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/machines/guess2.tm").into());
    let m = parse_machine(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let im = index_options(&m);
    let h = StepPolynomial::new(2, 1);
    let text = compile_machine_source(&im, h, 0).unwrap();
    println!("{} lines of program text", text.lines().count());
    let p = compile_machine(&im, h, 0).unwrap();
    for word in ["", "1", "10", "101", "0110"] {
        let bits = word_bits(word).unwrap();
        let machine = run_machine(&m, &bits, h.steps(bits.len() as u64)).unwrap().accepted;
        let out = enumerate_results(&p, &[Value::bool_list(&bits)], u64::MAX).unwrap();
        let program = out.results.contains(&Value::boolean(true));
        println!("{word:>5}: machine {machine}, program {program}");
    }
}
