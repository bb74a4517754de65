fn main() {
    std::process::exit(harness::cli_main(std::env::args_os()));
}
