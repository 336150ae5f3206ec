use std::process::exit;

fn main() {
    exit(fanbeam::cli::run(std::env::args_os()));
}
