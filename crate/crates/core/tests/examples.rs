use std::path::PathBuf;
use std::process::Command;

// `cargo test` builds examples next to the test binaries.
fn example(name: &str) -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let dir = exe.parent().unwrap().parent().unwrap().join("examples");
    dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

fn run(name: &str) -> String {
    let path = example(name);
    if !path.exists() {
        eprintln!("skipping {name}: not built");
        return String::new();
    }
    let o = Command::new(&path).output().unwrap();
    assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn examples_run_clean() {
    let checks = [
        ("padic_basics", "product rule holds: true"),
        ("jet_prolongation", "solution: true"),
        ("classical_euler", "L(eta) -> 0"),
        ("poisson_structures", "all zero: true"),
        ("classical_lax", "delta P_3 = 0"),
        ("arithmetic_euler_flow", "global residual after gauge: 0"),
        ("point_counting", "a_p ="),
        ("arithmetic_lax", "Teichmüller spectrum: true"),
    ];
    for (name, want) in checks {
        let out = run(name);
        assert!(out.is_empty() || out.contains(want), "{name}:\n{out}");
        assert!(!out.contains(": false"), "{name}:\n{out}");
    }
}
