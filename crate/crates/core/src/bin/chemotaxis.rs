fn main() {
    std::process::exit(chemotaxis::harness::run_cli(std::env::args_os()));
}
