use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use torusops::field::{coherent_smoothing, pearson, top_decile_overlap, Correlation};
use torusops::{
    classical_attractor, default_max_iter, invariant_state, sdc_channel, sdc_eta_analytic,
    sdc_eta_exact, subleading_modulus, unitary_channel, ChannelSpec, ConvergenceReport,
    KrausChannel, TorusSpace,
};

use crate::config::{CommandKind, Config};
use crate::output::{counts_csv, panel, read_field_csv, Artifacts};

/// Husimi values of Γ below this are treated as exact zeros, so that a unital
/// channel renders as a flat field instead of rounding noise.
const GAMMA_ZERO: f64 = 1e-12;
/// Allowed disagreement between the exact η sum and the channel's η.
const ETA_AGREEMENT: f64 = 1e-10;

/// Files read by `compare` instead of recomputing.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub quantum: Option<PathBuf>,
    pub classical: Option<PathBuf>,
}

pub fn run(cmd: CommandKind, config: Config, inputs: &Inputs, out: &Path) -> anyhow::Result<Value> {
    let config = config.resolve(cmd)?;
    let mut art = Artifacts::create(out, cmd, &config)?;
    let summary = match cmd {
        CommandKind::EtaSweep => eta_sweep(&config, &mut art)?,
        CommandKind::GammaMap => gamma_map(&config, &mut art)?,
        CommandKind::Invariant => invariant(&config, &mut art)?,
        CommandKind::Classical => classical(&config, &mut art)?,
        CommandKind::Compare => compare(&config, inputs, &mut art)?,
        CommandKind::Report => report(&config, &mut art)?,
    };
    art.finish(&config, summary)
}

fn eta_sweep(config: &Config, art: &mut Artifacts) -> anyhow::Result<Value> {
    let space = TorusSpace::periodic(config.dim())?;
    let points: Vec<(f64, f64)> = config
        .eps
        .iter()
        .flat_map(|&e| config.alpha.iter().map(move |&a| (e, a)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(eps, alpha)| -> anyhow::Result<[f64; 5]> {
            let exact = sdc_eta_exact(&space, eps, alpha)?;
            let channel = sdc_channel(&space, eps, alpha)?.eta();
            if (exact - channel).abs() >= ETA_AGREEMENT {
                bail!("eta mismatch at eps={eps} alpha={alpha}: exact {exact}, channel {channel}");
            }
            let analytic = if alpha > 0.0 {
                sdc_eta_analytic(eps, alpha)?
            } else {
                f64::INFINITY
            };
            Ok([eps, alpha, exact, channel, analytic])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut csv = String::from("eps,alpha,eta_exact,eta_channel,eta_analytic\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{},{}\n", r[0], r[1], r[2], r[3], r[4]));
    }
    art.text("eta_sweep.csv", &csv)?;
    let max_gap = rows.iter().map(|r| (r[2] - r[3]).abs()).fold(0.0, f64::max);
    Ok(json!({ "rows": rows.len(), "max_exact_channel_gap": max_gap }))
}

fn gamma_map(config: &Config, art: &mut Artifacts) -> anyhow::Result<Value> {
    let spec = config.channel.as_ref().expect("resolved");
    let space = TorusSpace::periodic(config.dim())?;
    let ch = spec.build(&space)?;
    let [nq, np] = config.grid();
    let mut h = space.husimi(&ch.gamma(), nq, np)?;
    h.values.apply(|v| {
        if v.abs() < GAMMA_ZERO {
            *v = 0.0
        }
    });
    let constant = art.pgm("gamma_husimi.pgm", &h.values)?;
    art.text("gamma_husimi.csv", &torusops::field::to_csv(&h.values))?;
    let cells = h.values.len() as f64;
    let summary = json!({
        "eta": ch.eta(),
        "negative_fraction": h.fraction_below(0.0),
        "positive_fraction": h.values.iter().filter(|&&v| v > 0.0).count() as f64 / cells,
        "min": h.values.min(),
        "max": h.values.max(),
        "constant_field": constant,
    });
    art.json(
        "gamma_summary.json",
        &json!({ "config": config, "summary": summary }),
    )?;
    Ok(summary)
}

#[derive(Serialize)]
struct InvariantOutcome {
    eta_composite: f64,
    eta_noise: f64,
    noise_unital: bool,
    purity: f64,
    convergence: ConvergenceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn solve_invariant(
    config: &Config,
    spec: &ChannelSpec,
) -> anyhow::Result<(TorusSpace, DMatrix<f64>, InvariantOutcome)> {
    let map = config.map.expect("resolved");
    let space = map.space(config.dim())?;
    let noise = spec.build(&space)?;
    let u = unitary_channel(&space, map.unitary(&space)?)?;
    let ch = KrausChannel::compose(&noise, &u)?;
    let max_iter = config
        .max_iter
        .unwrap_or_else(|| default_max_iter(space.dim(), spec.strength()));
    let (rho, convergence) = invariant_state(&ch, config.tol, max_iter, None)?;
    let [nq, np] = config.grid();
    let h = space.husimi(rho.op(), nq, np)?;
    let noise_unital = noise.is_unital(1e-12);
    let note = noise_unital.then_some(
        "unital noise: every state reachable from the start may be invariant; the fixed point is not unique in general",
    );
    Ok((
        space,
        h.values,
        InvariantOutcome {
            eta_composite: ch.eta(),
            eta_noise: noise.eta(),
            noise_unital,
            purity: rho.purity(),
            convergence,
            note,
        },
    ))
}

fn invariant(config: &Config, art: &mut Artifacts) -> anyhow::Result<Value> {
    if let Some(spec) = &config.channel {
        let (_, field, outcome) = solve_invariant(config, spec)?;
        art.pgm("invariant_husimi.pgm", &field)?;
        art.text("invariant_husimi.csv", &torusops::field::to_csv(&field))?;
        art.json(
            "invariant_report.json",
            &json!({ "config": config, "report": outcome }),
        )?;
        if !outcome.convergence.converged {
            eprintln!(
                "warning: invariant state did not converge after {} iterations (residual {:e})",
                outcome.convergence.iterations, outcome.convergence.final_residual
            );
        }
        return Ok(json!({
            "converged": outcome.convergence.converged,
            "iterations": outcome.convergence.iterations,
            "eta_composite": outcome.eta_composite,
        }));
    }
    // eps × alpha sweep: one panel row per eps, one column per alpha
    let n = config.dim();
    let points: Vec<(usize, usize)> = (0..config.eps.len())
        .flat_map(|i| (0..config.alpha.len()).map(move |j| (i, j)))
        .collect();
    let results = points
        .par_iter()
        .map(|&(i, j)| {
            let spec = ChannelSpec::Sdc {
                n: Some(n),
                eps: config.eps[i],
                alpha: config.alpha[j],
            };
            solve_invariant(config, &spec).map(|(_, f, o)| (i, j, f, o))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut tiles = vec![Vec::new(); config.eps.len()];
    let mut entries = Vec::new();
    for (i, j, field, outcome) in results {
        let stem = format!("invariant_e{i}_a{j}");
        art.pgm(&format!("{stem}.pgm"), &field)?;
        art.text(&format!("{stem}.csv"), &torusops::field::to_csv(&field))?;
        entries.push(json!({
            "eps": config.eps[i],
            "alpha": config.alpha[j],
            "file": stem,
            "report": outcome,
        }));
        tiles[i].push(field);
    }
    let comments = vec![
        art.provenance().to_string(),
        "rows: eps, columns: alpha".to_string(),
    ];
    art.text(
        "invariant_panel.pgm",
        &torusops::field::levels_to_pgm(&panel(&tiles, 4), &comments),
    )?;
    art.json(
        "invariant_sweep.json",
        &json!({ "config": config, "points": entries }),
    )?;
    let converged = entries
        .iter()
        .all(|e| e["report"]["convergence"]["converged"] == json!(true));
    Ok(json!({ "points": entries.len(), "all_converged": converged }))
}

fn classical(config: &Config, art: &mut Artifacts) -> anyhow::Result<Value> {
    let hist = classical_attractor(&config.attractor_params())?;
    let field = hist.unit_field()?;
    let constant = art.pgm("classical_hist.pgm", &field)?;
    art.text("classical_hist.csv", &counts_csv(&field))?;
    let summary = json!({
        "total": hist.total,
        "occupied_fraction": hist.occupied_fraction(),
        "thin": hist.occupied_fraction() < config.thresholds.occupied,
        "constant_field": constant,
    });
    art.json(
        "classical_summary.json",
        &json!({ "config": config, "summary": summary }),
    )?;
    Ok(summary)
}

#[derive(Serialize)]
struct Comparison {
    pearson: Correlation,
    top_decile_overlap: f64,
    /// Classical field convolved with the coherent-state kernel first.
    smoothed_pearson: Correlation,
    smoothed_overlap: f64,
    occupied_fraction: f64,
    pass_correlation: bool,
    pass_overlap: bool,
    pass_occupied: bool,
}

pub fn compare_fields(
    quantum: &DMatrix<f64>,
    classical: &DMatrix<f64>,
    n: usize,
    config: &Config,
) -> anyhow::Result<Value> {
    let r = pearson(quantum, classical)?;
    let overlap = top_decile_overlap(quantum, classical)?;
    let smooth = coherent_smoothing(classical, n);
    let occupied =
        classical.iter().filter(|&&v| v > 0.0).count() as f64 / classical.len().max(1) as f64;
    let t = config.thresholds;
    Ok(serde_json::to_value(Comparison {
        pearson: r,
        top_decile_overlap: overlap,
        smoothed_pearson: pearson(quantum, &smooth)?,
        smoothed_overlap: top_decile_overlap(quantum, &smooth)?,
        occupied_fraction: occupied,
        pass_correlation: r.value > t.correlation,
        pass_overlap: overlap > t.overlap,
        pass_occupied: occupied < t.occupied,
    })?)
}

fn compare(config: &Config, inputs: &Inputs, art: &mut Artifacts) -> anyhow::Result<Value> {
    let quantum = match &inputs.quantum {
        Some(path) => read_field_csv(path)?,
        None => {
            let spec = config.channel.as_ref().expect("resolved");
            solve_invariant(config, spec)?.1
        }
    };
    let classical = match &inputs.classical {
        Some(path) => read_field_csv(path)?,
        None => classical_attractor(&config.attractor_params())?.unit_field()?,
    };
    if quantum.shape() != classical.shape() {
        bail!(
            "grid mismatch: quantum {}x{}, classical {}x{}",
            quantum.nrows(),
            quantum.ncols(),
            classical.nrows(),
            classical.ncols()
        );
    }
    let result = compare_fields(&quantum, &classical, config.dim(), config)?;
    art.json(
        "compare.json",
        &json!({ "config": config, "comparison": result }),
    )?;
    Ok(result)
}

fn report(config: &Config, art: &mut Artifacts) -> anyhow::Result<Value> {
    let spec = config.channel.as_ref().expect("resolved");
    let space = TorusSpace::periodic(config.dim())?;
    let ch = spec.build(&space).context("building channel")?;
    let eta_from_affine = ch.affine_representation().ok().map(|a| a.eta());
    let mut summary = json!({
        "tp_residual": ch.tp_residual(),
        "unital": ch.is_unital(1e-12),
        "eta": ch.eta(),
        "eta_from_purity": ch.eta_from_purity(),
        "eta_from_affine": eta_from_affine,
        "v1_norm_sq": ch.affine_v1().norm_squared(),
        "kraus_count": ch.kraus_count(),
    });
    if let Some(probes) = config.probes {
        summary["subleading_modulus"] = json!(subleading_modulus(&ch, probes));
    }
    art.json(
        "report.json",
        &json!({ "config": config, "report": summary }),
    )?;
    Ok(summary)
}
