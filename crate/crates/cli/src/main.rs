fn main() {
    std::process::exit(covering_sieve::main_with_args(std::env::args_os()));
}
