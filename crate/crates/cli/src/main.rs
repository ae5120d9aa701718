fn main() {
    std::process::exit(exception_sieve::run(std::env::args_os()));
}
