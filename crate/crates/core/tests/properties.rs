use std::path::PathBuf;

use consfree::analysis::{check_cons_free, check_immutability, typecheck};
use consfree::interp::{enumerate_results, evaluate_one, RandomChooser, DEFAULT_FUEL};
use consfree::tmcompile::{digit_width, StepPolynomial};
use consfree::transform::{compose_pushdown, eliminate_fvar_clauses};
use consfree::turing::{parse_machine, replay_witness, run_machine, Machine, ACCEPT};
use consfree::{parse_program, pretty_print, Program, Value};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn programs(dir: &str) -> Vec<Program> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(dir);
    let mut files: Vec<_> = std::fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .iter()
        .filter(|p| p.extension().is_some_and(|x| x == "cf"))
        .map(|p| parse_program(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect()
}

fn all_programs() -> Vec<Program> {
    let mut ps = programs("programs/corpus");
    ps.extend(programs("programs"));
    ps
}

fn machines() -> Vec<Machine> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("machines");
    let mut files: Vec<_> = std::fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .iter()
        .map(|p| parse_machine(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect()
}

#[test]
fn printing_round_trips() {
    for p in all_programs() {
        let text = pretty_print(&p);
        assert_eq!(parse_program(&text).unwrap(), p, "{text}");
    }
}

#[test]
fn immutability_is_monotone_in_the_threshold() {
    for p in all_programs() {
        let tp = typecheck(&p).unwrap();
        for n in 1..4 {
            if check_immutability(&tp, n).passed() {
                assert!(check_immutability(&tp, n + 1).passed());
            }
        }
    }
}

#[test]
fn transforms_keep_verdicts() {
    for p in programs("programs/corpus") {
        let tp = typecheck(&p).unwrap();
        let imm = check_immutability(&tp, 1).passed();
        for q in [compose_pushdown(&p).after, eliminate_fvar_clauses(&p).unwrap().after] {
            assert_eq!(check_cons_free(&q).passed(), check_cons_free(&p).passed());
            assert_eq!(check_immutability(&typecheck(&q).unwrap(), 1).passed(), imm);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_runs_are_among_all_results(
        idx in 0usize..22,
        bits in prop::collection::vec(any::<bool>(), 0..=6),
        seed in any::<u64>(),
    ) {
        let corpus = programs("programs/corpus");
        let p = &corpus[idx % corpus.len()];
        let input = [Value::bool_list(&bits)];
        let all = enumerate_results(p, &input, DEFAULT_FUEL).unwrap();
        let mut chooser = RandomChooser(ChaCha8Rng::seed_from_u64(seed));
        let one = evaluate_one(p, &input, &mut chooser, DEFAULT_FUEL).unwrap();
        prop_assert!(all.results.contains(&one));
    }

    #[test]
    fn machine_search_is_monotone_in_steps(
        idx in 0usize..4,
        bits in prop::collection::vec(any::<bool>(), 0..=6),
        steps in 0u64..16,
    ) {
        let ms = machines();
        let m = &ms[idx % ms.len()];
        let short = run_machine(m, &bits, steps).unwrap();
        let long = run_machine(m, &bits, steps + 1).unwrap();
        prop_assert!(!short.accepted || long.accepted);
        if let Some(w) = short.witness {
            prop_assert!(w.len() as u64 <= steps);
            let end = replay_witness(m, &bits, &w);
            prop_assert_eq!(end.as_deref(), Some(ACCEPT));
        }
    }

    #[test]
    fn digit_width_covers_the_bound(a in 1u64..20, b in 0u32..5, n in 1u64..5000) {
        let k = digit_width(a, b) as u32;
        let h = StepPolynomial::new(a, b).eval(n);
        prop_assert!(BigUint::from(n + 1).pow(k) > h);
    }
}
