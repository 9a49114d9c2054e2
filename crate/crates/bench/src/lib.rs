//! Synthetic Prolog sources for benchmarks.

use std::fmt::Write;
use std::path::Path;

/// A documented module with `preds` exported predicates, each calling the
/// previous one.
pub fn synthetic_module(name: &str, preds: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "/** <module> Synthetic module {name}\n\nGenerated for measurements.\n\n@author Bench\n*/\n");
    let exports: Vec<String> = (0..preds).map(|i| format!("p{i}/2")).collect();
    let _ = writeln!(s, ":- module({name}, [{}]).\n", exports.join(", "));
    for i in 0..preds {
        let _ = writeln!(
            s,
            "%!  p{i}(+In:list, -Out:list) is det.\n%\n%   Maps In to Out using *step {i}*; see p{}/2.\n%\n%   @see p0/2\n",
            i.saturating_sub(1)
        );
        if i == 0 {
            let _ = writeln!(s, "p0(In, Out) :- msort(In, Out).\n");
        } else {
            let _ = writeln!(
                s,
                "p{i}(In, Out) :-\n    p{}(In, Mid),\n    length(Mid, N),\n    Out = [N|Mid].\n",
                i - 1
            );
        }
    }
    s
}

/// Writes `files` synthetic modules into `dir`.
pub fn synthetic_tree(dir: &Path, files: usize, preds: usize) -> std::io::Result<()> {
    for f in 0..files {
        std::fs::write(
            dir.join(format!("m{f}.pl")),
            synthetic_module(&format!("m{f}"), preds),
        )?;
    }
    Ok(())
}
