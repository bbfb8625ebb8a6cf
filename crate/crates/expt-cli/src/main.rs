fn main() {
    match expt_cli::run_cli(std::env::args_os()) {
        Ok(dir) => println!("{}", serde_json::json!({ "status": "ok", "output_dir": dir })),
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
