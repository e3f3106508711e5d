fn main() {
    std::process::exit(wavespeed::cli::run(std::env::args_os()));
}
