//! Removes a selector function that returns its functional arguments, then
//! pushes the resulting compositions down.

use consfree::interp::{enumerate_results, DEFAULT_FUEL};
use consfree::transform::eliminate_fvar_clauses;
use consfree::{parse_input_bits, parse_program, pretty_print};

const SELECT: &str = "# terminating
fun main : list => bool
fun sel : bool => (bool => bool) => (bool => bool) => bool => bool
fun neg : bool => bool
fun idb : bool => bool
main nil = true
main (x :: xs) = sel x neg idb (choose(x, true))
sel true f g = f
sel false f g = g
neg true = false
neg false = true
idb b = b
";

fn main() {
    let p = parse_program(SELECT).unwrap();
    let trace = eliminate_fvar_clauses(&p).unwrap();
    print!("{}", pretty_print(&trace.after));
    print!("{}", trace.log());
    for word in ["0", "1", "10"] {
        let input = [parse_input_bits(word).unwrap()];
        let before = enumerate_results(&p, &input, DEFAULT_FUEL).unwrap();
        let after = enumerate_results(&trace.after, &input, DEFAULT_FUEL).unwrap();
        println!("{word}: {:?} / {:?}", before.rendered(), after.rendered());
    }
}
