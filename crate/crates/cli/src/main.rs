fn main() {
    std::process::exit(rabi_a2::run(std::env::args_os()));
}
