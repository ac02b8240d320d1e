//! Saturation restricted to guessed pools of functional values: seeded
//! runs never exceed the full result set, and the exhaustive pool matches it.

use consfree::saturate::{compute_t_n, np_saturate, saturate, NpConfig, PoolMode};
use std::collections::BTreeSet;

use consfree::{parse_input_bits, parse_program, Value};

fn show(set: &BTreeSet<Value>) -> String {
    set.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

const ALL: &str = "# terminating
fun main : list => bool
fun all : (bool => bool) => list => bool
fun k : bool => bool => bool
main nil = all (k false) nil
main (x :: xs) = all (k choose(x, true)) xs
all f nil = true
all f (x :: xs) = if f x then all f xs else false
k a b = a
";

fn main() {
    let p = parse_program(ALL).unwrap();
    let input = [parse_input_bits("010").unwrap()];
    let (t, n) = compute_t_n(&p, &input).unwrap();
    println!("T = {t}, N = {n}");
    let full = saturate(&p, &input).unwrap().results;
    println!("full: {}", show(&full));
    for seed in 0..5 {
        let cfg = NpConfig {
            mode: PoolMode::Seeded { seed, trials: 1 },
            ..NpConfig::default()
        };
        let r = np_saturate(&p, &input, &cfg).unwrap();
        println!("seed {seed}: {} with pools {:?}", show(&r.results), r.pool_sizes);
    }
    let cfg = NpConfig {
        mode: PoolMode::Exhaustive,
        ..NpConfig::default()
    };
    println!("exhaustive: {}", show(&np_saturate(&p, &input, &cfg).unwrap().results));
}
