use std::io::Write;

fn main() {
    sgl_core::cli::init_threads();
    let out = sgl_core::cli::run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
