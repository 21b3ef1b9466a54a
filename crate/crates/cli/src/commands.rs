use crate::config::ConfigFile;
use crate::output::{csv_table, json_bytes, num, opt_num, resolve_out_dir, Artifacts, RunManifest};
use anyhow::Context;
use radswap_core::estimators::{
    compare_modes, nu_ratio, ratio_consistency, ModeComparison, RatioConsistency, RatioEstimate,
};
use radswap_core::kmc_sim::{
    derived_seed, run_ensemble, EncounterClass, EnsembleOutput, SimConfig, SpinOutcome,
};
use radswap_core::pde_solver::{nu_ratio_from_xi, run_coupled_with, Checkpoint};
use radswap_core::SwapMode;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Tolerances of the hierarchy-vs-scalar agreement report.
pub const XI_AGREEMENT_TOL: f64 = 1e-4;
pub const DENSITY_AGREEMENT_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    /// 0 = all available cores.
    pub workers: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PdeFinal {
    pub t: f64,
    pub density_hierarchy: f64,
    pub density_analytic: f64,
    pub xi0_hierarchy: f64,
    pub xi0_scalar: f64,
    pub nu_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PdeSummary {
    pub steps: usize,
    pub checkpoints: usize,
    pub max_xi_relative_linf: f64,
    pub xi_tolerance: f64,
    pub max_density_relative_error: f64,
    pub density_tolerance: f64,
    pub agreement_pass: bool,
    #[serde(rename = "final")]
    pub last: PdeFinal,
}

pub struct Outcome<S> {
    pub summary: S,
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
}

fn load(path: &Path) -> anyhow::Result<ConfigFile> {
    Ok(ConfigFile::load(path)?)
}

fn checkpoint_row(c: &Checkpoint) -> Vec<String> {
    vec![
        num(c.t),
        num(c.density_hierarchy),
        num(c.density_scalar),
        num(c.density_analytic),
        num(c.xi0_hierarchy),
        num(c.xi0_scalar),
        num(c.xi_relative_linf),
        num(c.truncation_bound),
        num(c.far_mass),
    ]
}

pub fn pde(opts: &RunOptions) -> anyhow::Result<Outcome<PdeSummary>> {
    let file = load(&opts.config)?;
    let cfg = file.pde(&opts.config)?.clone();
    let mut rows = Vec::new();
    let mut last = None;
    let report = run_coupled_with(&cfg, |c| {
        rows.push(checkpoint_row(c));
        last = Some(c.clone());
    })?;
    let last = last.context("solver produced no checkpoints")?;

    let out_dir = resolve_out_dir(opts.out.as_deref());
    let mut art = Artifacts::create(&out_dir)?;
    art.write(
        "pde_timeseries.csv",
        &csv_table(
            &[
                "t [time]",
                "g_hierarchy [1/length^3]",
                "g_scalar [1/length^3]",
                "g_analytic [1/length^3]",
                "xi0_hierarchy [1]",
                "xi0_scalar [1]",
                "xi_relative_linf [1]",
                "truncation_bound [1]",
                "far_mass [1/length^3]",
            ],
            rows,
        )?,
    )?;
    let profile = report
        .radii
        .iter()
        .zip(&last.xi_hierarchy)
        .zip(&last.xi_scalar)
        .map(|((r, h), s)| vec![num(*r), num(*h), num(*s)]);
    art.write(
        "pde_xi_profile.csv",
        &csv_table(&["r [length]", "xi_hierarchy [1]", "xi_scalar [1]"], profile)?,
    )?;
    let summary = PdeSummary {
        steps: report.steps,
        checkpoints: report.checkpoints.len(),
        max_xi_relative_linf: report.max_xi_relative_linf,
        xi_tolerance: XI_AGREEMENT_TOL,
        max_density_relative_error: report.max_density_relative_error,
        density_tolerance: DENSITY_AGREEMENT_TOL,
        agreement_pass: report.max_xi_relative_linf <= XI_AGREEMENT_TOL
            && report.max_density_relative_error <= DENSITY_AGREEMENT_TOL,
        last: PdeFinal {
            t: last.t,
            density_hierarchy: last.density_hierarchy,
            density_analytic: last.density_analytic,
            xi0_hierarchy: last.xi0_hierarchy,
            xi0_scalar: last.xi0_scalar,
            nu_ratio: nu_ratio_from_xi(last.xi0_hierarchy).ok(),
        },
    };
    art.write("pde_summary.json", &json_bytes(&summary)?)?;
    let snapshot = serde_json::json!({ "units": file.units, "pde": cfg });
    let manifest = art.finish("pde", None, None, (0.0, last.t), snapshot)?;
    Ok(Outcome {
        summary,
        manifest,
        out_dir,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    pub class: EncounterClass,
    pub singlets: u64,
    pub triplets: u64,
    pub singlet_fraction: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub swap_mode: SwapMode,
    pub seed: u64,
    pub replicas: u64,
    pub events: u64,
    pub singlets: u64,
    pub triplets: u64,
    pub classes: Vec<ClassSummary>,
    pub cross_fraction: Option<f64>,
    pub generated_pairs: u64,
    pub t_final: f64,
    pub ratio: Option<RatioEstimate>,
    pub ratio_error: Option<String>,
    pub xi0_hat: Option<f64>,
    pub consistency: Option<RatioConsistency>,
}

pub fn summarize(cfg: &SimConfig, replicas: u64, ens: &EnsembleOutput) -> EnsembleSummary {
    let t = &ens.merged;
    let classes = EncounterClass::ALL
        .iter()
        .map(|&c| {
            let s = t.count(c, SpinOutcome::Singlet);
            let n = t.class_total(c);
            ClassSummary {
                class: c,
                singlets: s,
                triplets: n - s,
                singlet_fraction: (n > 0).then(|| s as f64 / n as f64),
            }
        })
        .collect();
    let total = t.total();
    let (ratio, ratio_error) = match nu_ratio(t) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    EnsembleSummary {
        swap_mode: cfg.swap_mode,
        seed: cfg.seed,
        replicas,
        events: total,
        singlets: t.singlets(),
        triplets: t.triplets(),
        classes,
        cross_fraction: (total > 0)
            .then(|| t.class_total(EncounterClass::Cross) as f64 / total as f64),
        generated_pairs: ens.replicas.iter().map(|r| r.generated_pairs).sum(),
        t_final: ens.replicas.iter().map(|r| r.t_final).fold(0.0, f64::max),
        ratio,
        ratio_error,
        xi0_hat: t.xi_mean(),
        consistency: ratio_consistency(t).ok(),
    }
}

fn tally_rows(label: Option<&str>, ens: &EnsembleOutput) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for c in EncounterClass::ALL {
        for o in [SpinOutcome::Singlet, SpinOutcome::Triplet] {
            let mut row: Vec<String> = label.map(|l| vec![l.to_string()]).unwrap_or_default();
            row.extend([
                c.label().to_string(),
                o.label().to_string(),
                ens.merged.count(c, o).to_string(),
            ]);
            rows.push(row);
        }
    }
    rows
}

fn sim_config(file: &ConfigFile, opts: &RunOptions) -> anyhow::Result<(SimConfig, u64)> {
    let mut cfg = file.kmc(&opts.config)?.clone();
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let replicas = opts.replicas.unwrap_or_else(|| file.replicas());
    cfg.validate()?;
    Ok((cfg, replicas))
}

pub fn kmc(opts: &RunOptions) -> anyhow::Result<Outcome<EnsembleSummary>> {
    let file = load(&opts.config)?;
    let (cfg, replicas) = sim_config(&file, opts)?;
    let ens = run_ensemble(&cfg, replicas, opts.workers)?;
    let summary = summarize(&cfg, replicas, &ens);

    let out_dir = resolve_out_dir(opts.out.as_deref());
    let mut art = Artifacts::create(&out_dir)?;
    if cfg.record_events {
        let rows = ens.replicas.iter().flat_map(|r| {
            r.tally.events().iter().map(move |e| {
                vec![
                    r.replica.to_string(),
                    num(e.t),
                    e.plus.to_string(),
                    e.minus.to_string(),
                    e.class.label().to_string(),
                    e.outcome.label().to_string(),
                    e.index.map(|n| n.to_string()).unwrap_or_default(),
                    e.new_index.map(|n| n.to_string()).unwrap_or_default(),
                    num(e.xi_meeting),
                ]
            })
        });
        art.write(
            "kmc_events.csv",
            &csv_table(
                &[
                    "replica [id]",
                    "t [time]",
                    "plus_id [id]",
                    "minus_id [id]",
                    "class",
                    "outcome",
                    "index [1]",
                    "new_index [1]",
                    "xi_meeting [1]",
                ],
                rows,
            )?,
        )?;
    }
    let series = ens.replicas.iter().flat_map(|r| {
        r.series.iter().map(move |s| {
            vec![
                r.replica.to_string(),
                num(s.t),
                num(s.density),
                s.pairs.to_string(),
                s.partnerless.to_string(),
                s.singlets.to_string(),
                s.triplets.to_string(),
                opt_num(s.xi_hat),
            ]
        })
    });
    art.write(
        "kmc_timeseries.csv",
        &csv_table(
            &[
                "replica [id]",
                "t [time]",
                "density [1/length^3]",
                "pairs [count]",
                "partnerless [count]",
                "singlets [count]",
                "triplets [count]",
                "xi_hat [1]",
            ],
            series,
        )?,
    )?;
    art.write(
        "kmc_tally.csv",
        &csv_table(&["class", "outcome", "count [events]"], tally_rows(None, &ens))?,
    )?;
    let by_index = ens
        .merged
        .index_counts()
        .map(|(n, s, t)| vec![n.to_string(), s.to_string(), t.to_string()]);
    art.write(
        "kmc_index_tally.csv",
        &csv_table(&["index [1]", "singlets [events]", "triplets [events]"], by_index)?,
    )?;
    art.write("kmc_summary.json", &json_bytes(&summary)?)?;
    let snapshot = serde_json::json!({ "units": file.units, "kmc": cfg });
    let manifest = art.finish(
        "kmc",
        Some(cfg.seed),
        Some(replicas),
        (0.0, summary.t_final),
        snapshot,
    )?;
    Ok(Outcome {
        summary,
        manifest,
        out_dir,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareSummary {
    pub exact: EnsembleSummary,
    pub reset: EnsembleSummary,
    pub comparison: ModeComparison,
    pub verdict: &'static str,
}

/// Runs exact and classical-reset ensembles. The reset ensemble draws from
/// a seed derived from the exact one so the two samples are independent.
pub fn compare(opts: &RunOptions) -> anyhow::Result<Outcome<CompareSummary>> {
    let file = load(&opts.config)?;
    let (base, replicas) = sim_config(&file, opts)?;
    let exact_cfg = SimConfig {
        swap_mode: SwapMode::Exact,
        record_events: false,
        ..base.clone()
    };
    let reset_cfg = SimConfig {
        swap_mode: SwapMode::ClassicalReset,
        seed: derived_seed(base.seed, 1),
        ..exact_cfg.clone()
    };
    let exact = run_ensemble(&exact_cfg, replicas, opts.workers)?;
    let reset = run_ensemble(&reset_cfg, replicas, opts.workers)?;
    let comparison = compare_modes(&exact.merged, &reset.merged)?;
    let summary = CompareSummary {
        exact: summarize(&exact_cfg, replicas, &exact),
        reset: summarize(&reset_cfg, replicas, &reset),
        verdict: if comparison.pass { "pass" } else { "fail" },
        comparison,
    };

    let out_dir = resolve_out_dir(opts.out.as_deref());
    let mut art = Artifacts::create(&out_dir)?;
    let mut rows = tally_rows(Some("exact"), &exact);
    rows.extend(tally_rows(Some("classical-reset"), &reset));
    art.write(
        "compare_tally.csv",
        &csv_table(&["swap_mode", "class", "outcome", "count [events]"], rows)?,
    )?;
    art.write("compare_summary.json", &json_bytes(&summary)?)?;
    let snapshot = serde_json::json!({ "units": file.units, "kmc": base });
    let t_end = summary.exact.t_final.max(summary.reset.t_final);
    let manifest = art.finish("compare", Some(base.seed), Some(replicas), (0.0, t_end), snapshot)?;
    Ok(Outcome {
        summary,
        manifest,
        out_dir,
    })
}
