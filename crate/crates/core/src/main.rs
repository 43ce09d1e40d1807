fn main() {
    let code = loewner::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
