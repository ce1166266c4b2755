use std::io::Write;

fn main() {
    let out = cantor_full::cli::run(std::env::args_os());
    // write errors (e.g. a closed pipe) are ignored; the exit code still reports the result
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.stdout.as_bytes());
    if !out.stdout.is_empty() && !out.stdout.ends_with('\n') {
        let _ = stdout.write_all(b"\n");
    }
    let _ = stdout.flush();
    let mut stderr = std::io::stderr().lock();
    let _ = stderr.write_all(out.stderr.as_bytes());
    if !out.stderr.is_empty() && !out.stderr.ends_with('\n') {
        let _ = stderr.write_all(b"\n");
    }
    std::process::exit(out.code);
}
