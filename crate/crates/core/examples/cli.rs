//! Drives the command-line interface in-process.

use consfree::cli::run_cli;

fn main() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let last = format!("{dir}/programs/last.cf");
    let machine = format!("{dir}/machines/contains11.tm");
    for args in [
        vec!["check", last.as_str()],
        vec!["run", last.as_str(), "--input", "10", "--fuel", "1000"],
        vec!["saturate", last.as_str(), "--input", "0110"],
        vec!["pipeline", machine.as_str(), "--poly", "2,1", "--words", "0110,0100"],
    ] {
        let (code, out) = run_cli(std::iter::once("consfree").chain(args.iter().copied()));
        println!("$ consfree {} (exit {code})\n{out}", args.join(" "));
    }
}
