use clap::Parser;

use absneg::cli::{exit_code, run, RunConfig};

fn main() {
    // clap's own usage exit code is 2, which here means a validation failure
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = run(&cfg);
    match &result {
        Ok(rep) => {
            for f in &rep.failures {
                eprintln!("validation failure: {f}");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    std::process::exit(exit_code(&result));
}
