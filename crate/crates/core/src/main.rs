use std::io::Write;

fn main() {
    let (code, text) = jacobi_lie::cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(text.as_bytes());
    std::process::exit(code);
}
