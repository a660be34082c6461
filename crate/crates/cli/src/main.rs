fn main() {
    std::process::exit(moodcycle::cli::run(std::env::args_os()));
}
