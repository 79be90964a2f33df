fn main() {
    std::process::exit(srbin::cli::run(std::env::args_os()));
}
