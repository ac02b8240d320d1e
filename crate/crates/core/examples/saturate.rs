//! Computes result sets by saturation and compares them with enumeration.

use consfree::interp::{enumerate_results, DEFAULT_FUEL};
use consfree::saturate::{saturate, semantic_universe};
use consfree::syntax::Type;
use consfree::{parse_input_bits, parse_program};

const ANY: &str = "# terminating
fun main : list => bool
fun any : (bool => bool) => list => bool
fun neg : bool => bool
fun idb : bool => bool
main xs = any choose(neg, idb) xs
any f nil = false
any f (x :: xs) = if f x then true else any f xs
neg true = false
neg false = true
idb b = b
";

fn main() {
    let p = parse_program(ANY).unwrap();
    for word in ["", "0", "11", "0101"] {
        let input = [parse_input_bits(word).unwrap()];
        let s = saturate(&p, &input).unwrap();
        let e = enumerate_results(&p, &input, DEFAULT_FUEL).unwrap();
        println!(
            "{word:>4}: saturation {:?}, enumeration {:?}, {} statements",
            s.results.iter().map(ToString::to_string).collect::<Vec<_>>(),
            e.rendered(),
            s.stats.statements
        );
    }
    let bb = Type::arrow(Type::sort("bool"), Type::sort("bool"));
    let graphs = semantic_universe(&p, &[parse_input_bits("1").unwrap()], &bb, 64).unwrap();
    println!("bool => bool has {} graphs, for example {}", graphs.len(), graphs[5]);
}
