//! Diagnostics CSV: `# key = value` provenance lines, the column header,
//! then one row per record in shortest round-trip exponent form.

use std::io::{self, Write};

use pnpcns_core::DiagnosticsRecord;

pub const COLUMNS: [&str; 15] = [
    "t",
    "mass",
    "ion_plus",
    "ion_minus",
    "net_charge",
    "E1",
    "D1",
    "R1",
    "E2",
    "D2",
    "R2",
    "E2_reg_extra",
    "min_rho",
    "max_rho",
    "u_w1q",
];

fn row(r: &DiagnosticsRecord) -> [f64; 15] {
    [
        r.t,
        r.mass,
        r.ion_plus,
        r.ion_minus,
        r.net_charge,
        r.e1,
        r.d1,
        r.r1,
        r.e2,
        r.d2,
        r.r2,
        r.e2_reg_extra,
        r.min_rho,
        r.max_rho,
        r.u_w1q,
    ]
}

pub fn write_csv<W: Write>(mut w: W, header: &[(String, String)], records: &[DiagnosticsRecord]) -> io::Result<()> {
    for (k, v) in header {
        writeln!(w, "# {k} = {v}")?;
    }
    writeln!(w, "{}", COLUMNS.join(","))?;
    for r in records {
        let cells: Vec<String> = row(r).iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}
