//! Breadth-first search for accepting runs of a nondeterministic machine.

use consfree::turing::{index_options, parse_machine, replay_witness, run_machine, validate_machine, word_bits};

const CONTAINS11: &str = "symbols: 0 1 _
states: start scan seen1 accept reject
start _ -> _ R scan
scan 0 -> 0 R scan
scan 1 -> 1 R scan
scan 1 -> 1 R seen1
seen1 1 -> 1 R accept
";

fn main() {
    let m = parse_machine(CONTAINS11).unwrap();
    print!("{}", validate_machine(&m));
    let im = index_options(&m);
    println!("at most {} options per state and symbol", im.c);
    for row in &im.rows {
        println!("  option {}: {}", row.k, row.transition);
    }
    for word in ["0110", "0100", "11"] {
        let bits = word_bits(word).unwrap();
        let out = run_machine(&m, &bits, 2 * bits.len() as u64).unwrap();
        match out.witness {
            Some(w) => println!("{word}: accept via {w:?}, ends in {:?}", replay_witness(&m, &bits, &w)),
            None => println!("{word}: reject after {} configurations", out.configurations),
        }
    }
}
