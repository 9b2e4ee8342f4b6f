fn main() {
    std::process::exit(phasespace::cli::run(std::env::args_os()));
}
