fn main() {
    std::process::exit(anosov_zeta::run(std::env::args_os()));
}
