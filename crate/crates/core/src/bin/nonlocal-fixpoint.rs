fn main() {
    std::process::exit(nonlocal_fixpoint::cli::run_cli(std::env::args_os()));
}
