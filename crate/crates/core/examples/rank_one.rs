//! Rank-one models `ψ = e^{a/((k−1) z^{k−1})}` resum to `e^{−a S_k}`, with
//! `S_k` the additive function of the chart.

use stokes_resum::groupoid::{ChartKind, GroupoidChart};
use stokes_resum::resummation::{descends_to_pair, model_rep, resum, ExponentialModel, FormalGauge};
use stokes_resum::Scalar;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 12;
    for k in 1..=4u32 {
        for a in [Scalar::from_int(1), Scalar::from_int(2), Scalar::ratio(1, 2), Scalar::i()] {
            for kind in [ChartKind::Sto, ChartKind::Pair] {
                if kind == ChartKind::Pair && !descends_to_pair(k, &a) {
                    continue;
                }
                let chart = GroupoidChart::new(kind, k)?;
                let rep = model_rep(&ExponentialModel::rank_one(k, a.clone())?, &chart, n)?;
                let sigma = resum(&FormalGauge::identity(1, 1), &rep, None, n)?;
                let s = chart.additive_fn(n + 1)?;
                let closed = if kind == ChartKind::Pair && k == 1 {
                    s.add(&s.unit_like())?.binom_power(&-a.clone())?
                } else {
                    s.scale(&-a.clone()).exp_series()?
                };
                let ok = sigma.psi.get(0, 0).sub(&closed)?.truncate_total(n)?.is_zero();
                println!("{chart} a = {a}: matches closed form: {ok}");
            }
        }
    }
    Ok(())
}
