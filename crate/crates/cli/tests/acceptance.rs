use conical_cli::experiments::{run, Outcome, Params, IDS};

#[test]
fn acceptance() {
    let p = Params::default();
    let outcomes: Vec<(usize, Result<Outcome, String>)> = std::thread::scope(|s| {
        let handles: Vec<_> = IDS
            .iter()
            .enumerate()
            .map(|(i, id)| s.spawn(move || (i + 1, run(id, &p).map_err(|e| format!("{e:#}")))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("experiment panicked")).collect()
    });
    let mut failed = Vec::new();
    for (i, o) in &outcomes {
        match o {
            Ok(o) => {
                println!("A{i} {} | {}", if o.passed { "PASS" } else { "FAIL" }, o.line());
                if !o.passed {
                    failed.push(format!("A{i}"));
                }
            }
            Err(e) => {
                println!("A{i} FAIL | error: {e}");
                failed.push(format!("A{i}"));
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
