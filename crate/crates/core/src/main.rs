fn main() {
    std::process::exit(golden_frames::cli::run(std::env::args()));
}
