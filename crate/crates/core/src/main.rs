fn main() {
    std::process::exit(nsdp::harness::run_cli(std::env::args_os()));
}
