fn main() {
    std::process::exit(bssp::runner::cli_main(std::env::args_os()));
}
