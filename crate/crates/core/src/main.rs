fn main() {
    let (code, out) = consfree::cli::run_cli(std::env::args_os());
    if code == consfree::cli::EXIT_USAGE || out.starts_with("error:") {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    std::process::exit(code);
}
