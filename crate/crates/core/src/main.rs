use std::io::Write;

fn main() {
    let (code, out, err) = ctp_core::cli::main_with_args(std::env::args_os());
    print!("{out}");
    eprint!("{err}");
    std::io::stdout().flush().ok();
    std::process::exit(code);
}
