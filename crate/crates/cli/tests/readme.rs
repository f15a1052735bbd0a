//! Runs every `$ moisil ...` line in the README and checks its exit code
//! (`# exits N` sets the expectation, otherwise 0).

use std::path::Path;
use std::process::Command;

#[test]
fn readme_examples_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let readme = std::fs::read_to_string(root.join("README.md")).unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let mut ran = 0;
    for line in readme.lines() {
        let Some(cmd) = line.strip_prefix("$ moisil ") else {
            continue;
        };
        let (cmd, comment) = cmd.split_once('#').unwrap_or((cmd, ""));
        let expected: i32 = comment
            .trim()
            .strip_prefix("exits ")
            .map(|rest| {
                rest.split(|c: char| !c.is_ascii_digit())
                    .next()
                    .unwrap()
                    .parse()
                    .unwrap()
            })
            .unwrap_or(0);
        let mut args = shlex::split(cmd).unwrap_or_else(|| panic!("cannot split `{cmd}`"));
        if let Some(i) = args.iter().position(|a| a == "-o") {
            args[i + 1] = out_dir.path().join(&args[i + 1]).to_string_lossy().into_owned();
        }
        let out = Command::new(env!("CARGO_BIN_EXE_moisil"))
            .args(&args)
            .current_dir(&root)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(expected),
            "`moisil {cmd}`\nstderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        ran += 1;
    }
    assert!(ran >= 12, "only {ran} examples found");
}
