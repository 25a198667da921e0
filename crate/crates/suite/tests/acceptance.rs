//! Runs every acceptance criterion and prints one `PASS`/`FAIL` line each.
//! Built without the libtest harness so the lines always show; exits
//! nonzero when any criterion fails. Positional arguments select criteria
//! by number or by a substring of the name.

use std::panic::{catch_unwind, AssertUnwindSafe};

use kantorovich_suite::{criteria, Verdict};

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria().iter().enumerate() {
        let label = format!("criterion {:>2} ({name})", i + 1);
        let selected = |p: &String| p.parse::<usize>().map_or_else(|_| name.contains(p.as_str()), |k| k == i + 1);
        if !filter.is_empty() && !filter.iter().any(selected) {
            continue;
        }
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Verdict { ok: false, detail: format!("panicked: {}", msg.unwrap_or_default()) }
        });
        println!("{} {label}: {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
