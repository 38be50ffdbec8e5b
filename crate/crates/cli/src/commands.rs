//! Subcommand implementations: thin orchestration over the library modules,
//! emitting plot-ready CSV/JSON with reproducibility sidecars.

use std::f64::consts::PI;

use serde_json::json;

use beamspace::network::{return_loss_db, state_pair};
use beamspace::optimizer::{
    self, export_contour, frequency_seed, subband_quantize, SweepOptions,
};
use beamspace::pattern::{basis_from_states, power, VectorPattern};
use beamspace::rng::derive_seed;
use beamspace::touchstone;
use beamspace::waveform::{
    multiplex_timeseries, oob_power_ratio, psd_estimate, random_bpsk, MultiplexConfig,
    SpectrumEstimate, StateGains, TransitionProfile,
};
use beamspace::{capacity, pattern_io};

use crate::config::RunConfig;
use crate::output::{csv_body, fmt, OutputDir};
use crate::CliError;

const S1_SALT: u64 = 0x5331;
const S2_SALT: u64 = 0x5332;

fn opt_fmt(v: Option<f64>) -> String {
    match v {
        Some(x) => fmt(x),
        None => "nan".into(),
    }
}

/// `model`: build (or ingest) the antenna and export its network files.
pub fn cmd_model(config: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let net = config.build_network()?;
    let points = net
        .entries()
        .iter()
        .map(|e| Ok((e.frequency, beamspace::network::z_to_s(&e.z, net.z_ref())?)))
        .collect::<beamspace::Result<Vec<_>>>()?;
    let ts = touchstone::TouchstoneData {
        z_ref: net.z_ref(),
        format: touchstone::TsFormat::Ri,
        n_ports: net.n_ports(),
        points,
    };
    out.write_str(&format!("antenna.s{}p", net.n_ports()), &touchstone::render(&ts))?;
    for port in 0..net.n_ports() {
        let pats: Vec<VectorPattern> = net
            .entries()
            .iter()
            .map(|e| e.port_patterns[port].clone())
            .collect();
        out.write_str(&format!("pattern_port{port}.csv"), &pattern_io::render(&pats))?;
    }
    Ok(())
}

/// `analyze`: fixed-load summary (reflection, imbalance, basis powers) and
/// the plane-of-platform pattern cuts.
pub fn cmd_analyze(config: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let net = config.build_network()?;
    let freqs = config.frequency_list(&net)?;
    let loads = config.loads()?;
    let state_b = loads.swapped();

    let mut summary_rows = Vec::new();
    let mut cut_rows = Vec::new();
    for &f in &freqs {
        let (sol_a, sol_b) = state_pair(&net, f, &loads, &state_b, config.active_port)?;
        let basis = basis_from_states(&sol_a.pattern, &sol_b.pattern)?;
        let p_g1 = power(&sol_a.pattern);
        summary_rows.push(vec![
            fmt(f),
            fmt(return_loss_db(&sol_a)),
            opt_fmt(basis.imbalance_db().ok()),
            fmt(p_g1),
            fmt(basis.p_b1),
            fmt(basis.p_b2),
        ]);

        let grid = sol_a.pattern.grid().clone();
        let (it, _) = grid.nearest_node(PI / 2.0, 0.0);
        for ip in 0..grid.n_phi() {
            let idx = grid.node_index(it, ip);
            let mag = |p: &VectorPattern| {
                let (et, ep) = p.sample(idx);
                (et.norm(), ep.norm())
            };
            let (g1c, g1x) = mag(&sol_a.pattern);
            let (g2c, g2x) = mag(&sol_b.pattern);
            let (b1c, b1x) = mag(&basis.b1);
            let (b2c, b2x) = mag(&basis.b2);
            cut_rows.push(vec![
                fmt(f),
                fmt(grid.phi(ip).to_degrees()),
                fmt(g1c),
                fmt(g1x),
                fmt(g2c),
                fmt(g2x),
                fmt(b1c),
                fmt(b1x),
                fmt(b2c),
                fmt(b2x),
            ]);
        }
    }
    out.write_str(
        "summary.csv",
        &csv_body("f_hz,rl_db,imbalance_db,p_g1,p_b1,p_b2", &summary_rows),
    )?;
    out.write_str(
        "cuts.csv",
        &csv_body(
            "f_hz,phi_deg,g1_co,g1_cross,g2_co,g2_cross,b1_co,b1_cross,b2_co,b2_cross",
            &cut_rows,
        ),
    )?;
    Ok(())
}

/// `capacity`: ergodic BPSK capacity of the loaded antenna (or the ideal
/// reference when the flag is set) per frequency and SNR.
pub fn cmd_capacity(config: &RunConfig, out: &OutputDir, seed: u64) -> Result<(), CliError> {
    let net = config.build_network()?;
    let freqs = config.frequency_list(&net)?;
    let mut rows = Vec::new();
    for &f in &freqs {
        let r_tx = if config.channel.ideal {
            capacity::TxCorrelation::identity()
        } else {
            let loads = config.loads()?;
            let state_b = loads.swapped();
            let (sol_a, sol_b) = state_pair(&net, f, &loads, &state_b, config.active_port)?;
            let basis = basis_from_states(&sol_a.pattern, &sol_b.pattern)?;
            capacity::tx_correlation(&basis)
        };
        for &snr in &config.channel.snr_db {
            let cfg = config
                .channel
                .to_channel_config(snr, frequency_seed(seed, f));
            let est = capacity::ergodic_capacity(&r_tx, &cfg)?;
            let ideal = capacity::ideal_reference(&cfg);
            rows.push(vec![
                fmt(f),
                fmt(snr),
                fmt(est.bits_per_symbol),
                fmt(est.std_error),
                fmt(ideal.bits_per_symbol),
                fmt(ideal.std_error),
            ]);
        }
    }
    out.write_str(
        "capacity.csv",
        &csv_body(
            "f_hz,snr_db,capacity_bps_hz,std_error,ideal_bps_hz,ideal_std_error",
            &rows,
        ),
    )?;
    Ok(())
}

/// `optimize`: reactance sweep per frequency, optimum curves, contour maps,
/// and sub-band plans.
pub fn cmd_optimize(config: &RunConfig, out: &OutputDir, seed: u64) -> Result<(), CliError> {
    let net = config.build_network()?;
    let freqs = config.frequency_list(&net)?;
    let grid = config.sweep.to_grid()?;
    let opts = SweepOptions {
        active_port: config.active_port,
        series_resistance: config.sweep.series_resistance,
    };
    // one SNR drives the optimization objective; the first entry is it
    let snr = *config
        .channel
        .snr_db
        .first()
        .ok_or_else(|| CliError::Config("channel.snr_db must not be empty".into()))?;
    let cfg = config.channel.to_channel_config(snr, seed);
    let results = optimizer::optimize_band(&net, &freqs, &grid, &cfg, &opts)?;

    let mut rows = Vec::new();
    let mut plateau_rows = Vec::new();
    for (idx, r) in results.iter().enumerate() {
        rows.push(vec![
            fmt(r.frequency),
            fmt(r.best.x1),
            fmt(r.best.x2),
            fmt(r.best.eval.capacity),
            fmt(r.best.eval.rl_db),
            opt_fmt(r.best.eval.imbalance_db),
        ]);
        let contour = export_contour(r);
        let contour_rows: Vec<Vec<String>> = contour
            .rows
            .iter()
            .map(|(x1, x2, c)| vec![fmt(*x1), fmt(*x2), fmt(*c)])
            .collect();
        out.write_str(
            &format!("contour_{idx:03}.csv"),
            &csv_body("x1_ohm,x2_ohm,capacity", &contour_rows),
        )?;
        plateau_rows.push(vec![fmt(r.frequency), fmt(contour.plateau_fraction)]);
    }
    out.write_str(
        "optimum.csv",
        &csv_body("f_hz,x1_ohm,x2_ohm,capacity,rl_db,imbalance_db", &rows),
    )?;
    out.write_str(
        "plateau.csv",
        &csv_body("f_hz,plateau_fraction", &plateau_rows),
    )?;

    for &k in &config.sweep.subband_counts {
        let plan = subband_quantize(&results, k)?;
        let body = serde_json::to_string_pretty(&json!({
            "k": k,
            "worst_case_capacity": plan.worst_case_capacity(),
            "segments": plan.segments,
        }))
        .map_err(|e| CliError::Internal(e.to_string()))?;
        out.write_str(&format!("subband_k{k}.json"), &format!("{body}\n"))?;
    }
    Ok(())
}

/// `spectrum`: switched-waveform PSDs at the first analysis frequency, with
/// the single-state reference and the ramp-duration sweep.
pub fn cmd_spectrum(config: &RunConfig, out: &OutputDir, seed: u64) -> Result<(), CliError> {
    let net = config.build_network()?;
    let freqs = config.frequency_list(&net)?;
    let f = freqs[0];
    let loads = config.loads()?;
    let state_b = loads.swapped();
    let (sol_a, sol_b) = state_pair(&net, f, &loads, &state_b, config.active_port)?;
    let w = &config.waveform;
    let gains = StateGains::from_patterns(
        &sol_a.pattern,
        &sol_b.pattern,
        w.direction_deg[0].to_radians(),
        w.direction_deg[1].to_radians(),
        w.polarization.into(),
    )?;

    let s1 = random_bpsk(w.n_symbols, derive_seed(seed, &[S1_SALT]));
    let s2 = random_bpsk(w.n_symbols, derive_seed(seed, &[S2_SALT]));
    let t_symbol = 1.0 / w.symbol_rate_hz;
    let fs = w.symbol_rate_hz * w.sps as f64;

    let run = |profile: TransitionProfile, second: &[i8]| -> Result<SpectrumEstimate, CliError> {
        let cfg = MultiplexConfig {
            shape: w.pulse_shape(),
            profile,
            symbol_rate: w.symbol_rate_hz,
        };
        let y = multiplex_timeseries(&s1, second, &gains, &cfg)?;
        Ok(psd_estimate(&y, fs, w.segment_len, w.overlap_samples())?)
    };
    let write_psd = |out: &OutputDir, name: &str, spec: &SpectrumEstimate| -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = spec
            .freqs
            .iter()
            .zip(&spec.psd_db)
            .map(|(f, db)| vec![fmt(*f), fmt(*db)])
            .collect();
        out.write_str(name, &csv_body("freq_hz,psd_db", &rows))?;
        Ok(())
    };

    let mut oob_rows = Vec::new();
    let single = run(TransitionProfile::Rectangular, &s1)?;
    write_psd(out, "psd_single.csv", &single)?;
    oob_rows.push(vec![
        "single_state".to_string(),
        fmt(w.band_edge_hz),
        fmt(oob_power_ratio(&single, w.band_edge_hz)?),
    ]);

    for &frac in &w.ramp_fractions {
        let (profile, name) = if frac == 0.0 {
            (TransitionProfile::Rectangular, "psd_rect.csv".to_string())
        } else {
            (
                TransitionProfile::LinearRamp {
                    duration: frac * t_symbol,
                },
                format!("psd_ramp_{:03}.csv", (frac * 100.0).round() as i64),
            )
        };
        let spec = run(profile, &s2)?;
        write_psd(out, &name, &spec)?;
        let variant = name.trim_end_matches(".csv").trim_start_matches("psd_");
        oob_rows.push(vec![
            variant.to_string(),
            fmt(w.band_edge_hz),
            fmt(oob_power_ratio(&spec, w.band_edge_hz)?),
        ]);
    }
    out.write_str(
        "oob_summary.csv",
        &csv_body("variant,band_edge_hz,oob_db", &oob_rows),
    )?;

    if w.dump_envelope {
        let cfg = MultiplexConfig {
            shape: w.pulse_shape(),
            profile: TransitionProfile::Rectangular,
            symbol_rate: w.symbol_rate_hz,
        };
        let y = multiplex_timeseries(&s1, &s2, &gains, &cfg)?;
        let mut bytes = Vec::with_capacity(y.len() * 16);
        for v in &y {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
        out.write("envelope.bin", &bytes)?;
        let meta = serde_json::to_string_pretty(&json!({
            "sample_rate_hz": fs,
            "n_samples": y.len(),
            "layout": "interleaved little-endian f64 I/Q",
        }))
        .map_err(|e| CliError::Internal(e.to_string()))?;
        out.write_str("envelope.json", &format!("{meta}\n"))?;
    }
    Ok(())
}
