//! Symbolic instability tables: evaluate every catalog row of the linear and
//! dissipative verdict tables at a few (s, s') pairs.

use degenwave::harness::{dissipative_table_row, linear_table_row};
use degenwave::symbols::Symbol;

fn main() {
    let pairs = [(4.0, 4.0), (6.5, 6.5), (1.0, 4.7), (2.0, 2.0)];
    let linear = [
        Symbol::power(2.0),
        Symbol::power(1.0),
        Symbol::power(0.5),
        Symbol::log(1.0),
        Symbol::loglog(1.0),
    ];
    for (s, sp) in pairs {
        println!("s = {s}, s' = {sp}");
        for g in &linear {
            let row = linear_table_row(g, s, sp).unwrap();
            println!(
                "  {:12} {:62} {}",
                row.gamma,
                row.condition,
                if row.unstable { "UNSTABLE" } else { "stable" }
            );
        }
        for (g, u) in [
            (Symbol::power(1.5), Symbol::power(1.0)),
            (Symbol::power(1.0), Symbol::power(0.5)),
            (Symbol::power(0.5), Symbol::power(0.25)),
            (Symbol::log(1.0), Symbol::log(0.5)),
        ] {
            let row = dissipative_table_row(&g, &u, s, sp).unwrap();
            println!(
                "  {:12} + {:11} {:48} {}",
                row.gamma,
                row.upsilon.as_deref().unwrap(),
                row.condition,
                if row.unstable { "UNSTABLE" } else { "stable" }
            );
        }
        println!();
    }
}
