//! Associativity, identity and inverse on `Pair_k` and `Sto_k`.

use stokes_resum::groupoid::{check_groupoid, GroupoidChart};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let charts = (1..=5).map(GroupoidChart::pair).chain((1..=4).map(GroupoidChart::sto));
    for chart in charts {
        for r in check_groupoid(&chart, 10, 100, 1)? {
            let err = r.max_error.map(|e| format!(" (max error {e:.1e})")).unwrap_or_default();
            println!("{} {} {} {}{err}", r.chart, r.axiom, r.passed, r.method);
        }
    }
    Ok(())
}
