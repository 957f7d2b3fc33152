//! Scenario execution: parse a flat config, run the requested computation,
//! write outputs and a provenance sidecar next to each one.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fbs_core::beamsplitter::{split_ratio, BsCoefficients, InputPort};
use fbs_core::config::Config;
use fbs_core::counting::{output_input_ratio, simulate_counts, DetectionChannel};
use fbs_core::error::Error as CoreError;
use fbs_core::fit::Weighting;
use fbs_core::hom::{g2_closed, hom_delay_scan};
use fbs_core::metrics::{
    fidelity_closed, fidelity_trace, linspace, scan, success_probability, GateOperator, ScanAxis,
    ScanMode,
};
use fbs_core::params::{mhz_to_rad, MediumParams};
use fbs_core::pulse::{gaussian_pulse, PulseEnvelope, TimeGrid};
use fbs_core::solver::{
    energy_transmission, extract_bs_coefficients, group_delay, propagate_pulse, transfer_matrix,
    Port,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    ScanDelta,
    ScanDeltaOne,
    Propagate,
    Fidelity,
    HomScan,
    CountSim,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::ScanDelta => "scan-delta",
            ScenarioKind::ScanDeltaOne => "scan-Delta",
            ScenarioKind::Propagate => "propagate",
            ScenarioKind::Fidelity => "fidelity",
            ScenarioKind::HomScan => "hom-scan",
            ScenarioKind::CountSim => "count-sim",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Config reader that records every key it resolved, defaults included, so
/// the sidecar can reproduce the run exactly.
struct Resolver {
    cfg: Config,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    fn new(cfg: Config) -> Self {
        Self {
            cfg,
            resolved: BTreeMap::new(),
        }
    }

    fn f64(&mut self, key: &str) -> Result<f64, CoreError> {
        let v = self.cfg.f64(key)?;
        self.resolved.insert(key.to_string(), format!("{v}"));
        Ok(v)
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, CoreError> {
        let v = self.cfg.f64_or(key, default)?;
        self.resolved.insert(key.to_string(), format!("{v}"));
        Ok(v)
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64, CoreError> {
        let v = self.cfg.u64_or(key, default)?;
        self.resolved.insert(key.to_string(), format!("{v}"));
        Ok(v)
    }

    fn str_or(&mut self, key: &str, default: &str) -> String {
        let v = self.cfg.str_or(key, default).to_string();
        self.resolved.insert(key.to_string(), v.clone());
        v
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool, CoreError> {
        let v = self.cfg.bool_or(key, default)?;
        self.resolved.insert(key.to_string(), format!("{v}"));
        Ok(v)
    }

    /// Standard medium block shared by the solver-backed scenarios.
    fn medium(&mut self) -> Result<MediumParams, CoreError> {
        let params = MediumParams {
            alpha: self.f64("alpha")?,
            gamma: self.f64("gamma_over_Gamma")?,
            gamma_sp: mhz_to_rad(self.f64_or("Gamma_MHz", 6.0)?),
            omega_c: self.f64("omega_c_over_Gamma")?,
            omega_d: self.f64("omega_d_over_Gamma")?,
            delta_one: mhz_to_rad(self.f64_or("Delta_MHz", 0.0)?),
            delta_k_l: self.f64_or("delta_k_L", 0.0)?,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool_version: &'a str,
    scenario: &'a str,
    seed: u64,
    config: &'a BTreeMap<String, String>,
    outputs: Vec<String>,
}

/// Run one scenario. Returns the list of files written (sidecars included).
pub fn run_scenario(
    kind: ScenarioKind,
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<Vec<PathBuf>> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", config_path.display()))?;
    let mut resolver = Resolver::new(Config::parse(&text)?);
    let seed = match seed_override {
        Some(s) => s,
        None => resolver.u64_or("seed", 0)?,
    };
    resolver.resolved.insert("seed".into(), format!("{seed}"));
    fs::create_dir_all(out_dir)
        .map_err(|e| anyhow::anyhow!("cannot create output dir {}: {e}", out_dir.display()))?;

    // Each arm produces (file name, contents).
    let files: Vec<(String, String)> = match kind {
        ScenarioKind::ScanDelta => run_scan(&mut resolver, ScanAxis::TwoPhoton)?,
        ScenarioKind::ScanDeltaOne => run_scan(&mut resolver, ScanAxis::OnePhoton)?,
        ScenarioKind::Propagate => run_propagate(&mut resolver)?,
        ScenarioKind::Fidelity => run_fidelity(&mut resolver)?,
        ScenarioKind::HomScan => run_hom_scan(&mut resolver)?,
        ScenarioKind::CountSim => run_count_sim(&mut resolver, seed)?,
    };

    let output_names: Vec<String> = files.iter().map(|(name, _)| name.clone()).collect();
    let sidecar = serde_json::to_string_pretty(&Provenance {
        tool_version: TOOL_VERSION,
        scenario: kind.name(),
        seed,
        config: &resolver.resolved,
        outputs: output_names,
    })?;

    let mut written = Vec::new();
    for (name, contents) in &files {
        let path = out_dir.join(name);
        fs::write(&path, contents)?;
        let prov_path = out_dir.join(format!("{name}.prov.json"));
        fs::write(&prov_path, &sidecar)?;
        written.push(path);
        written.push(prov_path);
    }
    Ok(written)
}

fn scan_mode(r: &mut Resolver) -> Result<ScanMode, CoreError> {
    if r.bool_or("pulsed", false)? {
        let width = r.f64_or("pulse_width_us", 3.0)? * 1e-6;
        Ok(ScanMode::Pulsed {
            e2_full_width: width,
        })
    } else {
        Ok(ScanMode::Cw)
    }
}

fn run_scan(r: &mut Resolver, axis: ScanAxis) -> anyhow::Result<Vec<(String, String)>> {
    let params = r.medium()?;
    let start = r.f64("scan_start_MHz")?;
    let stop = r.f64("scan_stop_MHz")?;
    let points = r.u64_or("scan_points", 201)? as usize;
    let delta0 = mhz_to_rad(r.f64_or("delta_MHz", 0.0)?);
    let mode = scan_mode(r)?;
    let values = linspace(mhz_to_rad(start), mhz_to_rad(stop), points);
    let result = scan(&params, axis, &values, delta0, mode)?;
    let name = match axis {
        ScanAxis::TwoPhoton => "scan_delta.csv",
        ScanAxis::OnePhoton => "scan_Delta.csv",
    };
    Ok(vec![(name.to_string(), result.to_csv())])
}

#[derive(Serialize)]
struct PropagateSummary {
    t_probe: f64,
    t_signal: f64,
    total: f64,
    split: f64,
    delay_probe_us: f64,
    delay_signal_us: f64,
}

fn input_pulse(r: &mut Resolver) -> anyhow::Result<PulseEnvelope> {
    let width = r.f64_or("pulse_width_us", 3.0)? * 1e-6;
    let center = r.f64_or("pulse_center_us", 0.0)? * 1e-6;
    let span = r.f64_or("grid_span_us", 8.0 * width * 1e6)? * 1e-6;
    let n = r.u64_or("grid_points", 4096)? as usize;
    let photons = r.f64_or("photon_number", 1.0)?;
    let grid = TimeGrid::centered(center, span, n)?;
    Ok(gaussian_pulse(center, width, photons, grid)?)
}

fn run_propagate(r: &mut Resolver) -> anyhow::Result<Vec<(String, String)>> {
    let params = r.medium()?;
    let delta0 = mhz_to_rad(r.f64_or("delta_MHz", 0.0)?);
    let port = match r.str_or("input_port", "probe").as_str() {
        "probe" => Port::Probe,
        "signal" => Port::Signal,
        other => {
            return Err(CoreError::BadValue {
                key: "input_port".into(),
                value: other.into(),
                expected: "probe or signal",
            }
            .into())
        }
    };
    let input = input_pulse(r)?;
    let (probe, signal) = propagate_pulse(&params, delta0, &input, port)?;

    let mut csv = String::from("t_us,input_intensity,probe_out_intensity,signal_out_intensity\n");
    for i in 0..input.grid.n {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            input.grid.t(i) * 1e6,
            input.amplitude[i].norm_sqr(),
            probe.amplitude[i].norm_sqr(),
            signal.amplitude[i].norm_sqr()
        ));
    }

    let t_probe = energy_transmission(&input, &probe);
    let t_signal = energy_transmission(&input, &signal);
    let summary = PropagateSummary {
        t_probe,
        t_signal,
        total: t_probe + t_signal,
        split: t_signal / (t_probe + t_signal),
        delay_probe_us: group_delay(&input, &probe) * 1e6,
        delay_signal_us: group_delay(&input, &signal) * 1e6,
    };
    Ok(vec![
        ("propagate.csv".into(), csv),
        (
            "propagate_summary.json".into(),
            serde_json::to_string_pretty(&summary)?,
        ),
    ])
}

#[derive(Serialize)]
struct FidelitySummary {
    fidelity_closed: f64,
    fidelity_trace: f64,
    g2_closed: f64,
    cos_phi: f64,
    phi: f64,
    success_probability: f64,
}

/// Coefficients from explicit intensity keys plus either `cos_phi` (gate
/// phase on the [0, pi] branch, split evenly) or explicit `phi1`/`phi2`.
fn coefficients_from_config(r: &mut Resolver) -> anyhow::Result<BsCoefficients> {
    let t1_sq = r.f64("t1_sq")?;
    let r1_sq = r.f64("r1_sq")?;
    let t2_sq = r.f64("t2_sq")?;
    let r2_sq = r.f64("r2_sq")?;
    let (phi1, phi2) = if r.cfg.contains("phi1") || r.cfg.contains("phi2") {
        (r.f64("phi1")?, r.f64("phi2")?)
    } else {
        let cos_phi = r.f64("cos_phi")?;
        if !(-1.0..=1.0).contains(&cos_phi) {
            return Err(CoreError::InvalidParam {
                name: "cos_phi",
                reason: format!("must lie in [-1, 1], got {cos_phi}"),
            }
            .into());
        }
        let phi = cos_phi.acos();
        (phi / 2.0, phi / 2.0)
    };
    Ok(BsCoefficients::from_intensities(
        t1_sq, r1_sq, t2_sq, r2_sq, phi1, phi2,
    )?)
}

fn run_fidelity(r: &mut Resolver) -> anyhow::Result<Vec<(String, String)>> {
    let c = coefficients_from_config(r)?;
    let gate = GateOperator::from_coefficients(&c);
    let summary = FidelitySummary {
        fidelity_closed: fidelity_closed(&c)?,
        fidelity_trace: fidelity_trace(&gate.v, &gate.u, success_probability(&c))?,
        g2_closed: g2_closed(&c)?,
        cos_phi: c.gate_phase().cos(),
        phi: c.gate_phase(),
        success_probability: success_probability(&c),
    };
    Ok(vec![(
        "fidelity.json".into(),
        serde_json::to_string_pretty(&summary)?,
    )])
}

#[derive(Serialize)]
struct HomSetupSummary {
    t1_sq: f64,
    r1_sq: f64,
    t2_sq: f64,
    r2_sq: f64,
    split_input1: f64,
    split_input2: f64,
    g2_closed: f64,
    delay_compensation_us: f64,
}

fn run_hom_scan(r: &mut Resolver) -> anyhow::Result<Vec<(String, String)>> {
    let params = r.medium()?;
    let delta0 = mhz_to_rad(r.f64_or("delta_MHz", 0.0)?);
    let width = r.f64_or("pulse_width_us", 1.7)? * 1e-6;
    let tau_start = r.f64_or("tau_start_us", -6.0)? * 1e-6;
    let tau_stop = r.f64_or("tau_stop_us", 6.0)? * 1e-6;
    let tau_points = r.u64_or("tau_points", 121)? as usize;
    let compensate = r.bool_or("auto_delay_compensation", true)?;
    let n = r.u64_or("grid_points", 4096)? as usize;
    let span = r.f64_or("grid_span_us", 16.0 * width * 1e6)? * 1e-6;

    let tm = transfer_matrix(&params, delta0)?;
    let c = extract_bs_coefficients(&tm);

    // Internal group delays shift the optimum input delay: input 1's paths
    // are slower than input 2's, so envelope 1 is marked late by the mean
    // path-delay difference before scanning.
    let grid = TimeGrid::centered(0.0, span, n)?;
    let base = gaussian_pulse(0.0, width, 1.0, grid)?;
    let compensation = if compensate {
        let (p_out, s_out) = propagate_pulse(&params, delta0, &base, Port::Probe)?;
        let d_pp = group_delay(&base, &p_out);
        let d_ps = group_delay(&base, &s_out);
        let (p2_out, s2_out) = propagate_pulse(&params, delta0, &base, Port::Signal)?;
        let d_sp = group_delay(&base, &p2_out);
        let d_ss = group_delay(&base, &s2_out);
        0.5 * ((d_pp - d_sp) + (d_ps - d_ss))
    } else {
        0.0
    };
    let env1 = gaussian_pulse(compensation, width, 1.0, grid)?;

    let tau = linspace(tau_start, tau_stop, tau_points);
    let result = hom_delay_scan(&c, &env1, &base, &tau)?;

    let setup = HomSetupSummary {
        t1_sq: c.t1 * c.t1,
        r1_sq: c.r1 * c.r1,
        t2_sq: c.t2 * c.t2,
        r2_sq: c.r2 * c.r2,
        split_input1: split_ratio(&c, InputPort::One)?,
        split_input2: split_ratio(&c, InputPort::Two)?,
        g2_closed: g2_closed(&c)?,
        delay_compensation_us: compensation * 1e6,
    };

    Ok(vec![
        ("hom_scan.csv".into(), result.to_csv()),
        ("hom_summary.json".into(), result.summary_json()),
        (
            "hom_setup.json".into(),
            serde_json::to_string_pretty(&setup)?,
        ),
    ])
}

fn run_count_sim(r: &mut Resolver, seed: u64) -> anyhow::Result<Vec<(String, String)>> {
    let photons = r.f64_or("photons_per_pulse", 1.0)?;
    let width = r.f64_or("pulse_width_us", 3.0)? * 1e-6;
    let bin_width = r.f64_or("bin_width_ns", 450.0)? * 1e-9;
    let n_trials = r.u64_or("n_trials", 24_000)?;
    let eff_in = r.f64_or("eff_input", 0.13)?;
    let eff_probe = r.f64_or("eff_probe_out", 0.13)?;
    let eff_signal = r.f64_or("eff_signal_out", 0.12)?;
    let baseline = r.f64_or("baseline_rate", 20_000.0)?;
    let total = r.f64_or("total_transmission", 0.84)?;
    let split = r.f64_or("split_to_signal", 1.0)?;
    let outputs = r.str_or("outputs", "signal");
    let weighting = match r.str_or("fit_weighting", "uniform").as_str() {
        "uniform" => Weighting::Uniform,
        "poisson" => Weighting::PoissonCounts,
        other => {
            return Err(CoreError::BadValue {
                key: "fit_weighting".into(),
                value: other.into(),
                expected: "uniform or poisson",
            }
            .into())
        }
    };
    if !(0.0..=1.0).contains(&split) {
        return Err(CoreError::InvalidParam {
            name: "split_to_signal",
            reason: format!("must lie in [0, 1], got {split}"),
        }
        .into());
    }

    let grid = TimeGrid::centered(0.0, 16.0 * width, 2048)?;
    let env = gaussian_pulse(0.0, width, 1.0, grid)?;
    let ch_in = DetectionChannel::new(eff_in, baseline)?;
    let ch_probe = DetectionChannel::new(eff_probe, baseline)?;
    let ch_signal = DetectionChannel::new(eff_signal, baseline)?;

    let h_in = simulate_counts(&env, photons, &ch_in, bin_width, n_trials, seed)?;
    let mut files = vec![("counts_input.csv".to_string(), h_in.to_csv())];

    let (hists, effs): (Vec<_>, Vec<f64>) = match outputs.as_str() {
        "signal" => {
            let h = simulate_counts(
                &env,
                photons * total * split,
                &ch_signal,
                bin_width,
                n_trials,
                seed + 1,
            )?;
            files.push(("counts_signal.csv".into(), h.to_csv()));
            (vec![h], vec![eff_signal])
        }
        "both" => {
            let h_probe = simulate_counts(
                &env,
                photons * total * (1.0 - split),
                &ch_probe,
                bin_width,
                n_trials,
                seed + 1,
            )?;
            let h_signal = simulate_counts(
                &env,
                photons * total * split,
                &ch_signal,
                bin_width,
                n_trials,
                seed + 2,
            )?;
            files.push(("counts_probe.csv".into(), h_probe.to_csv()));
            files.push(("counts_signal.csv".into(), h_signal.to_csv()));
            (vec![h_probe, h_signal], vec![eff_probe, eff_signal])
        }
        other => {
            return Err(CoreError::BadValue {
                key: "outputs".into(),
                value: other.into(),
                expected: "signal or both",
            }
            .into())
        }
    };

    let hist_refs: Vec<&_> = hists.iter().collect();
    let estimate = output_input_ratio(&h_in, &hist_refs, eff_in, &effs, weighting)?;
    files.push(("ratio.json".into(), estimate.summary_json()));
    Ok(files)
}
