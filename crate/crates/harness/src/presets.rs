//! Compiled-in experiment catalog.

use pcapp::estimators::Method;
use pcapp::factor_model::FactorDistribution;

use crate::config::{ExperimentConfig, MethodEntry, ModelTemplate, Overlay, SweepAxis, Truncation};
use crate::error::HarnessError;

/// `d/n` grid shared by the aspect-ratio sweeps.
pub const RATIO_GRID: [f64; 10] = [0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.8];

/// Name and one-line description of every preset.
pub const CATALOG: [(&str, &str); 17] = [
    (
        "fig1-left",
        "one signal, one background spike; background strength swept at n=2000, d=800",
    ),
    (
        "fig1-right",
        "one signal (10), one background (500) spike; d/n swept at n=500",
    ),
    (
        "fig2-left",
        "truncated (s=2) vs untruncated PCA++; d/n swept at n=1000",
    ),
    (
        "fig2-right",
        "PCA++ with s in {2, 0.1d, 0.2d, 0.4d}; d/n swept at n=1000",
    ),
    (
        "fig3-left",
        "five signal and five background spikes; d/n swept at n=500, s=10",
    ),
    (
        "fig3-right",
        "as fig3-left with d and every spike scaled by 10",
    ),
    (
        "table1",
        "d/n=0.4, large background [500,500,200,100,100]; n=5000 by default",
    ),
    (
        "table2",
        "d/n=0.4, mild background [100,100,50,25,25]; n=5000 by default",
    ),
    (
        "appendix-overlap-moderate-fixed",
        "two background spikes [25,12.5] share the weakest signal axes",
    ),
    (
        "appendix-overlap-moderate-growing",
        "moderate overlap, d and spikes scaled by 10",
    ),
    (
        "appendix-overlap-large-fixed",
        "two background spikes [100,50] share the weakest signal axes",
    ),
    (
        "appendix-overlap-large-growing",
        "large overlap, d and spikes scaled by 10",
    ),
    (
        "appendix-beta-fixed",
        "fig3-left with standardized Beta(2,2) factors and noise",
    ),
    (
        "appendix-beta-growing",
        "fig3-right with standardized Beta(2,2) factors and noise",
    ),
    (
        "appendix-degenerate",
        "repeated spikes: signal [50,50,20,15,10], background [500,500,300,50,50]",
    ),
    (
        "appendix-g-moderate",
        "cPCA, cPCA++, CCA and PCA++ under background [100,50,40,30,20]",
    ),
    (
        "appendix-g-large",
        "cPCA, cPCA++, CCA and PCA++ under background [500,400,300,200,100]",
    ),
];

const FIVE_SIGNAL: [f64; 5] = [50.0, 25.0, 20.0, 15.0, 10.0];
const FIVE_BACKGROUND: [f64; 5] = [500.0, 400.0, 300.0, 200.0, 100.0];

fn pp(s: Truncation) -> MethodEntry {
    MethodEntry::new(Method::PcaPlusPlus).with_s(s)
}

fn build(
    name: &str,
    signal: &[f64],
    background: &[f64],
    n: usize,
    ratios: Vec<f64>,
    methods: Vec<MethodEntry>,
    overlay: Overlay,
) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(
        name,
        ModelTemplate::new(signal.to_vec(), background.to_vec()),
        n,
        ratios,
    );
    c.methods = methods;
    c.overlay = overlay;
    c.citation = CATALOG
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| d.to_string())
        .unwrap_or_default();
    c
}

/// The five-spike sweep behind fig3 and its appendix variants.
fn five_spike(name: &str, background: &[f64], growing: bool) -> ExperimentConfig {
    let methods = vec![MethodEntry::new(Method::PcaPlus), pp(Truncation::Rank(10))];
    let overlay = if growing {
        Overlay::Growing
    } else {
        Overlay::Fixed
    };
    let mut c = build(
        name,
        &FIVE_SIGNAL,
        background,
        500,
        RATIO_GRID.to_vec(),
        methods,
        overlay,
    );
    if growing {
        c.scale_factor = 10.0;
    }
    c
}

fn overlap(name: &str, shared: [f64; 2], growing: bool) -> ExperimentConfig {
    let background = [500.0, 400.0, 300.0, shared[0], shared[1]];
    let mut c = five_spike(name, &background, growing);
    c.methods = vec![pp(Truncation::Rank(10))];
    c.model.overlap_pairs = vec![(3, 3), (4, 4)];
    c
}

fn baselines(name: &str, background: &[f64]) -> ExperimentConfig {
    let methods = vec![
        MethodEntry::new(Method::Cpca),
        MethodEntry::new(Method::CpcaPlusPlus).with_s(Truncation::Rank(10)),
        MethodEntry::new(Method::Cca),
        pp(Truncation::Rank(10)),
    ];
    build(
        name,
        &FIVE_SIGNAL,
        background,
        500,
        RATIO_GRID.to_vec(),
        methods,
        Overlay::Fixed,
    )
}

fn table(name: &str, background: &[f64]) -> ExperimentConfig {
    let methods = vec![
        MethodEntry::new(Method::Pca),
        MethodEntry::new(Method::PcaPlus),
        pp(Truncation::Rank(10)),
    ];
    build(
        name,
        &[20.0, 20.0, 15.0, 10.0, 10.0],
        background,
        5000,
        vec![0.4],
        methods,
        Overlay::Fixed,
    )
}

/// Eight evenly spaced values across `[0.3125, 0.666]`.
pub fn background_strength_grid() -> Vec<f64> {
    let (lo, hi) = (0.3125, 0.666);
    (0..8).map(|i| lo + (hi - lo) * i as f64 / 7.0).collect()
}

pub fn preset(name: &str) -> Result<ExperimentConfig, HarnessError> {
    let one_by_one = |n: usize, methods: Vec<MethodEntry>| {
        build(
            name,
            &[10.0],
            &[500.0],
            n,
            RATIO_GRID.to_vec(),
            methods,
            Overlay::Fixed,
        )
    };
    let three = || {
        vec![
            MethodEntry::new(Method::Pca),
            MethodEntry::new(Method::PcaPlus),
            pp(Truncation::Rank(2)),
        ]
    };
    let config = match name {
        "fig1-left" => {
            let mut c = one_by_one(2000, three());
            c.sweep = SweepAxis::BackgroundStrength { aspect_ratio: 0.4 };
            c.aspect_ratios = background_strength_grid();
            c
        }
        "fig1-right" => one_by_one(500, three()),
        "fig2-left" => one_by_one(1000, vec![pp(Truncation::Rank(2)), pp(Truncation::Full)]),
        "fig2-right" => one_by_one(
            1000,
            vec![
                pp(Truncation::Rank(2)),
                pp(Truncation::Fraction(0.1)),
                pp(Truncation::Fraction(0.2)),
                pp(Truncation::Fraction(0.4)),
            ],
        ),
        "fig3-left" => five_spike(name, &FIVE_BACKGROUND, false),
        "fig3-right" => five_spike(name, &FIVE_BACKGROUND, true),
        "table1" => table(name, &[500.0, 500.0, 200.0, 100.0, 100.0]),
        "table2" => table(name, &[100.0, 100.0, 50.0, 25.0, 25.0]),
        "appendix-overlap-moderate-fixed" => overlap(name, [25.0, 12.5], false),
        "appendix-overlap-moderate-growing" => overlap(name, [25.0, 12.5], true),
        "appendix-overlap-large-fixed" => overlap(name, [100.0, 50.0], false),
        "appendix-overlap-large-growing" => overlap(name, [100.0, 50.0], true),
        "appendix-beta-fixed" | "appendix-beta-growing" => {
            let mut c = five_spike(name, &FIVE_BACKGROUND, name.ends_with("growing"));
            c.methods = vec![pp(Truncation::Rank(10))];
            c.model.factor_distribution = FactorDistribution::Beta22;
            c
        }
        "appendix-degenerate" => {
            let mut c = five_spike(name, &[500.0, 500.0, 300.0, 50.0, 50.0], false);
            c.model.signal_variances = vec![50.0, 50.0, 20.0, 15.0, 10.0];
            c.methods = vec![pp(Truncation::Rank(10))];
            c
        }
        "appendix-g-moderate" => baselines(name, &[100.0, 50.0, 40.0, 30.0, 20.0]),
        "appendix-g-large" => baselines(name, &FIVE_BACKGROUND),
        other => return Err(HarnessError::UnknownPreset(other.to_string())),
    };
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_entry_builds_and_validates() {
        for (name, _) in CATALOG {
            let c = preset(name).unwrap();
            assert_eq!(c.name, name);
            assert!(!c.citation.is_empty());
            c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(
            preset("fig9"),
            Err(HarnessError::UnknownPreset(_))
        ));
    }

    #[test]
    fn strength_grid_spans_the_interval() {
        let g = background_strength_grid();
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 0.3125);
        assert!((g[7] - 0.666).abs() < 1e-12);
    }
}
