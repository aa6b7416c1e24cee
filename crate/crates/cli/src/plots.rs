//! Matplotlib scripts written next to the tables. They are never run here.

use std::fmt::Write as _;

use crate::output::Table;

/// A script that reads `<table>.csv` from its own directory's parent and
/// writes `<table>.png` beside it.
pub fn script(table: &Table, title: &str) -> String {
    let x = &table.columns[0];
    let (curves, is_dephase) = if table.columns.iter().any(|c| c == "c0") {
        let analytic: Vec<&String> = table
            .columns
            .iter()
            .filter(|c| c.starts_with('c') && c[1..].chars().all(|d| d.is_ascii_digit()))
            .collect();
        (analytic, true)
    } else {
        (table.columns[1..table.columns.len() - 1].iter().collect(), false)
    };
    let mut s = String::new();
    writeln!(s, "# {title}").unwrap();
    writeln!(s, "import csv").unwrap();
    writeln!(s, "import pathlib\n").unwrap();
    writeln!(s, "import matplotlib\n\nmatplotlib.use(\"Agg\")").unwrap();
    writeln!(s, "import matplotlib.pyplot as plt\n").unwrap();
    writeln!(s, "here = pathlib.Path(__file__).resolve().parent").unwrap();
    writeln!(s, "src = here.parent / \"{}.csv\"", table.name).unwrap();
    writeln!(s, "with open(src) as fh:").unwrap();
    writeln!(s, "    rows = list(csv.DictReader(line for line in fh if not line.startswith(\"#\")))").unwrap();
    writeln!(s, "col = lambda name: [float(r[name]) for r in rows]\n").unwrap();
    writeln!(s, "fig, ax = plt.subplots(figsize=(5, 3.5))").unwrap();
    for c in &curves {
        writeln!(s, "ax.plot(col(\"{x}\"), col(\"{c}\"), label=\"{c}\")").unwrap();
        if is_dephase && table.columns.iter().any(|k| *k == format!("{c}_mc")) {
            writeln!(
                s,
                "ax.errorbar(col(\"{x}\")[::5], col(\"{c}_mc\")[::5], yerr=col(\"{c}_se\")[::5], fmt=\".\", ms=3)"
            )
            .unwrap();
        }
    }
    writeln!(s, "ax.set_xlabel(\"{x}\")").unwrap();
    writeln!(s, "ax.set_title(\"{title}\")").unwrap();
    writeln!(s, "ax.legend(frameon=False)").unwrap();
    writeln!(s, "fig.tight_layout()").unwrap();
    writeln!(s, "fig.savefig(here.parent / \"{}.png\", dpi=150)", table.name).unwrap();
    s
}
