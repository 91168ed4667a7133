//! Link budget for both emitter presets behind a 2 nm filter.
//!
//!     cargo run -p siqkd --example power_budget

use siqkd::source::{build_budget, FilterSpec, SourcePreset, TxSpec};
use siqkd::table::{OutputFormat, OutputTable};

fn main() -> siqkd::Result<()> {
    let tx = TxSpec::default();
    let filter = FilterSpec::centered(2.0);

    for preset in SourcePreset::ALL {
        let budget = build_budget(&preset.spec(), &filter, &tx)?;
        let mut table = OutputTable::new(["section", "quantity", "value", "unit"]);
        for row in budget.rows() {
            table.push(vec![row.section.into(), row.label.into(), row.value.into(), row.unit.into()])?;
        }
        println!("== {} ==", preset.name());
        print!("{}", table.render(OutputFormat::Text));
        println!();
    }

    // How wide does the filter have to be before the waveguide emitter clears μ = 0.1?
    let source = SourcePreset::Waveguide.spec();
    let mut nm = 2.0;
    while build_budget(&source, &FilterSpec::centered(nm), &tx)?.filtered_margin_db < 0.0 {
        nm += 0.5;
    }
    println!("waveguide emitter reaches μ = 0.1 with a {nm} nm passband");
    Ok(())
}
