fn main() {
    std::process::exit(quantum_battery::cli::run(std::env::args_os()));
}
