use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = switchq_cli::Args::parse();
    match switchq_cli::run(&args) {
        Ok(files) => {
            for f in files {
                log::info!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("switchq: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
