use std::io;

fn main() {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = dkp_sphere_cli::run_with(
        std::env::args_os(),
        std::env::vars_os()
            .filter_map(|(k, v)| Some((k.into_string().ok()?, v.into_string().ok()?)))
            .collect(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    std::process::exit(code);
}
