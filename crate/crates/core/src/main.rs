fn main() {
    std::process::exit(finite_hilbert::cli::run(std::env::args_os()));
}
