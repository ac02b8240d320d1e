//! Evaluates a nondeterministic program once per chooser and then
//! enumerates its whole result set.

use consfree::interp::{enumerate_results, evaluate_one, ScriptedChooser, DEFAULT_FUEL};
use consfree::{parse_input_bits, parse_program};

const GUESS: &str = "# terminating
fun guess : list => bool
guess nil = false
guess (x :: xs) = choose(x, guess xs)
";

fn main() {
    let p = parse_program(GUESS).unwrap();
    let input = [parse_input_bits("0100").unwrap()];
    for script in [vec![0], vec![1, 0], vec![1, 1, 1, 1]] {
        let mut chooser = ScriptedChooser::new(script.clone());
        let v = evaluate_one(&p, &input, &mut chooser, DEFAULT_FUEL).unwrap();
        println!("choices {script:?}: {v}");
    }
    let all = enumerate_results(&p, &input, DEFAULT_FUEL).unwrap();
    println!("all results: {} (complete: {})", all.rendered().join(", "), all.exhausted);
}
