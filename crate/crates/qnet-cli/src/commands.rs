//! Implementations of the six subcommands.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};

use qnet::asymptotics::{
    asymptotic_system_state, decoherence_factor, decoherence_factor_correlated,
    decoherence_factor_product, project_asymptotic, Parity, Provenance,
};
use qnet::attractors::{analytic_basis, analytic_count, dualize, oracle_space, verify_basis};
use qnet::channel::{trajectory_csv, Channel, ConvergenceStatus};
use qnet::entanglement::{classify_with_diagnostic, concurrence, n_sep};
use qnet::network::{realize_pure, realize_state, NetworkConfig, NetworkSpec, StatePreset};
use qnet::qmat::{partial_trace, trace_distance, DensityMatrix};
use qnet::report::{matrix_dump, sig12};
use qnet::tol::Tolerances;

use crate::config::{literalize_delta, load_json, Axis, RunConfig, SweepConfig};
use crate::CliError;

/// Command-line overrides shared by every subcommand.
pub struct Ctx {
    pub config: PathBuf,
    pub out: Option<String>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub oracle_cap: Option<usize>,
    pub seed: u64,
    pub delta_literal: bool,
}

impl Ctx {
    fn tolerances(&self, cfg: &RunConfig) -> Tolerances {
        let mut t = cfg.tolerances.apply(Tolerances::DEFAULT);
        if let Some(x) = self.tol {
            t.converge = x;
        }
        if let Some(x) = self.oracle_cap {
            t.oracle_cap = x;
        }
        t
    }

    fn env_preset(&self, cfg: &RunConfig) -> StatePreset {
        if self.delta_literal {
            literalize_delta(&cfg.env_state)
        } else {
            cfg.env_state.clone()
        }
    }

    /// Write `content` to `{out}.{suffix}`, or to stdout without a prefix.
    fn emit(&self, suffix: &str, content: &str) -> Result<(), CliError> {
        match &self.out {
            Some(prefix) => {
                let path = format!("{prefix}.{suffix}");
                fs::write(&path, content)
                    .map_err(|e| CliError::runtime(format!("cannot write {path}: {e}")))
            }
            None => {
                if content.ends_with('\n') {
                    print!("{content}");
                } else {
                    println!("{content}");
                }
                Ok(())
            }
        }
    }
}

/// Round to the printed 12-significant-digit precision so JSON numbers match
/// the textual interfaces.
fn num(x: f64) -> Value {
    let rounded: f64 = sig12(x).parse().expect("sig12 output is a valid float");
    json!(rounded)
}

fn provenance_str(p: Provenance) -> &'static str {
    match p {
        Provenance::General => "general",
        Provenance::ProductPower => "product_power",
        Provenance::Correlated => "correlated",
    }
}

fn status_str(s: ConvergenceStatus) -> &'static str {
    match s {
        ConvergenceStatus::Stationary => "stationary",
        ConvergenceStatus::Period2 => "period2",
        ConvergenceStatus::MaxIterReached => "max_iter_reached",
    }
}

fn checked_spec(network: &NetworkConfig) -> Result<NetworkSpec, CliError> {
    let spec = network.to_spec();
    let report = spec.validate();
    if !report.is_valid() {
        return Err(CliError::validation(format!(
            "invalid network: {}",
            report.errors.join("; ")
        )));
    }
    Ok(spec)
}

fn realize_inputs(
    cfg: &RunConfig,
    ctx: &Ctx,
) -> Result<(NetworkSpec, DensityMatrix, DensityMatrix, DensityMatrix), CliError> {
    let spec = checked_spec(&cfg.network)?;
    let sys = realize_state(&cfg.system_state, spec.k, spec.phi)
        .map_err(|e| CliError::validation(format!("system_state: {e}")))?;
    let env = realize_state(&ctx.env_preset(cfg), spec.n, spec.phi)
        .map_err(|e| CliError::validation(format!("env_state: {e}")))?;
    let joint = sys.tensor(&env)?;
    Ok((spec, sys, env, joint))
}

fn pair_reduction(rho: &DensityMatrix, observe: (usize, usize)) -> Result<DensityMatrix, CliError> {
    let pair = [observe.0.min(observe.1), observe.0.max(observe.1)];
    Ok(partial_trace(rho, &pair)?)
}

fn observables(rho_full: &DensityMatrix, k: usize, observe: (usize, usize)) -> Result<Value, CliError> {
    let system: Vec<usize> = (0..k).collect();
    let reduced = partial_trace(rho_full, &system)?;
    let pair = pair_reduction(rho_full, observe)?;
    Ok(json!({
        "concurrence": num(concurrence(&pair)?),
        "coherence_norm": num(reduced.coherence_norm()),
    }))
}

pub fn cmd_validate(ctx: &Ctx) -> Result<(), CliError> {
    // Accept either a full run config or a bare network description.
    let network = match load_json::<RunConfig>(&ctx.config) {
        Ok(cfg) => cfg.network,
        Err(run_err) => match load_json::<NetworkConfig>(&ctx.config) {
            Ok(network) => network,
            Err(_) => return Err(run_err),
        },
    };
    let spec = network.to_spec();
    let report = spec.validate();
    let body = serde_json::to_string_pretty(&json!({
        "valid": report.is_valid(),
        "errors": report.errors,
        "warnings": report.warnings,
    }))
    .expect("report serializes");
    ctx.emit("validation.json", &body)?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::validation("network validation failed".into()))
    }
}

pub fn cmd_simulate(ctx: &Ctx) -> Result<(), CliError> {
    let cfg: RunConfig = load_json(&ctx.config)?;
    let tols = ctx.tolerances(&cfg);
    let (spec, sys, env, joint) = realize_inputs(&cfg, ctx)?;
    let channel = Channel::new(spec.clone())?;
    let steps = ctx.steps.unwrap_or(cfg.steps);

    // Closed-form prediction of the system asymptote; undefined for n = 1
    // where the limit oscillates.
    let prediction = if spec.n >= 2 {
        let r = decoherence_factor(&env, spec.phi)?;
        Some((r, asymptotic_system_state(&sys, r.value)?))
    } else {
        None
    };

    let records = channel.iterate(&joint, steps, cfg.observe, prediction.as_ref().map(|p| &p.1))?;
    ctx.emit("trajectory.csv", &trajectory_csv(&records))?;

    let result = channel.converge(&joint, tols.converge, tols.max_iter)?;
    let final_value = match result.status {
        ConvergenceStatus::Period2 => json!({
            "even": observables(&result.states[0], spec.k, cfg.observe)?,
            "odd": observables(&result.states[1], spec.k, cfg.observe)?,
        }),
        _ => observables(&result.states[0], spec.k, cfg.observe)?,
    };
    let mut summary = json!({
        "status": status_str(result.status),
        "steps_used": result.steps_used,
        "final": final_value,
    });
    if let Some((r, _)) = &prediction {
        summary["r"] = num(r.value);
        summary["r_provenance"] = json!(provenance_str(r.provenance));
    }
    if let Some(shots) = cfg.shots {
        let sys_pure = realize_pure(&cfg.system_state, spec.k, spec.phi)
            .map_err(|e| CliError::validation(format!("monte-carlo mode needs a pure system_state: {e}")))?;
        let env_pure = realize_pure(&ctx.env_preset(&cfg), spec.n, spec.phi)
            .map_err(|e| CliError::validation(format!("monte-carlo mode needs a pure env_state: {e}")))?;
        let psi0 = sys_pure.tensor(&env_pure)?;
        let sampled = channel.sample_trajectories(&psi0, steps, shots, ctx.seed)?;
        let mut exact = joint.clone();
        for _ in 0..steps {
            exact = channel.apply(&exact)?;
        }
        summary["monte_carlo"] = json!({
            "shots": shots,
            "seed": ctx.seed,
            "trace_distance_to_exact": num(trace_distance(&sampled, &exact)?),
        });
    }
    ctx.emit("summary.json", &serde_json::to_string_pretty(&summary).expect("summary serializes"))
}

pub fn cmd_asymptotic(ctx: &Ctx) -> Result<(), CliError> {
    let cfg: RunConfig = load_json(&ctx.config)?;
    let tols = ctx.tolerances(&cfg);
    let (spec, sys, env, joint) = realize_inputs(&cfg, ctx)?;
    let channel = Channel::new(spec.clone())?;

    let r = match ctx.env_preset(&cfg) {
        StatePreset::Correlated { alpha } => decoherence_factor_correlated(alpha, spec.n, spec.phi)?,
        preset @ (StatePreset::Bloch { .. }
        | StatePreset::PhiEigenstate
        | StatePreset::Zero
        | StatePreset::One) => {
            let xi = realize_state(&preset, 1, spec.phi)?;
            decoherence_factor_product(&xi, spec.n as u32, spec.phi)?
        }
        _ => decoherence_factor(&env, spec.phi)?,
    };

    // Projection path: the analytic basis covers topology presets with n ≥ 2;
    // everything else goes through the superoperator oracle when it fits.
    let basis = if matches!(cfg.network, NetworkConfig::Preset { .. }) && spec.n >= 2 {
        Some(analytic_basis(spec.k, spec.n, spec.phi))
    } else if spec.total_qubits() <= tols.oracle_cap {
        Some(oracle_space(&spec, tols.oracle_cap, tols.nullspace)?)
    } else {
        None
    };

    let result = channel.converge(&joint, tols.converge, tols.max_iter)?;
    let system: Vec<usize> = (0..spec.k).collect();

    let mut report = json!({
        "r": num(r.value),
        "provenance": provenance_str(r.provenance),
        "status": status_str(result.status),
    });

    if result.status == ConvergenceStatus::Period2 {
        let even = partial_trace(&result.states[0], &system)?;
        let odd = partial_trace(&result.states[1], &system)?;
        report["period2_states"] = json!({
            "even": matrix_dump(even.matrix()),
            "odd": matrix_dump(odd.matrix()),
        });
        if let Some(mut basis) = basis {
            dualize(&mut basis)?;
            let proj_even =
                partial_trace(&project_asymptotic(&joint, &basis, Parity::Even)?, &system)?;
            let proj_odd =
                partial_trace(&project_asymptotic(&joint, &basis, Parity::Odd)?, &system)?;
            report["projection_period2_states"] = json!({
                "even": matrix_dump(proj_even.matrix()),
                "odd": matrix_dump(proj_odd.matrix()),
            });
            report["agreement"] = json!({
                "projection_vs_iteration_even": num(trace_distance(&proj_even, &even)?),
                "projection_vs_iteration_odd": num(trace_distance(&proj_odd, &odd)?),
            });
        }
    } else {
        let closed = asymptotic_system_state(&sys, r.value)?;
        let iterated = partial_trace(&result.states[0], &system)?;
        report["system_state"] = json!(matrix_dump(closed.matrix()));
        report["iteration_state"] = json!(matrix_dump(iterated.matrix()));
        let mut agreement = json!({
            "iteration_vs_closed_form": num(trace_distance(&iterated, &closed)?),
        });
        if let Some(mut basis) = basis {
            dualize(&mut basis)?;
            let projected =
                partial_trace(&project_asymptotic(&joint, &basis, Parity::Limit)?, &system)?;
            report["projection_state"] = json!(matrix_dump(projected.matrix()));
            agreement["projection_vs_closed_form"] = num(trace_distance(&projected, &closed)?);
            agreement["projection_vs_iteration"] = num(trace_distance(&projected, &iterated)?);
        }
        report["agreement"] = agreement;
        report["asymptotic_concurrence"] =
            num(concurrence(&pair_reduction(&result.states[0], cfg.observe)?)?);
    }
    ctx.emit("asymptotic.json", &serde_json::to_string_pretty(&report).expect("report serializes"))
}

pub fn cmd_attractors(ctx: &Ctx) -> Result<(), CliError> {
    // Accept either a full run config or a bare network description.
    let network = match load_json::<RunConfig>(&ctx.config) {
        Ok(cfg) => {
            if let Some(x) = cfg.tolerances.oracle_cap {
                if ctx.oracle_cap.is_none() {
                    // config-level override, no flag given
                    return cmd_attractors_with(ctx, cfg.network, x);
                }
            }
            cfg.network
        }
        Err(run_err) => match load_json::<NetworkConfig>(&ctx.config) {
            Ok(network) => network,
            Err(_) => return Err(run_err),
        },
    };
    let cap = ctx.oracle_cap.unwrap_or(Tolerances::DEFAULT.oracle_cap);
    cmd_attractors_with(ctx, network, cap)
}

fn cmd_attractors_with(
    ctx: &Ctx,
    network: NetworkConfig,
    oracle_cap: usize,
) -> Result<(), CliError> {
    let spec = checked_spec(&network)?;
    let tols = Tolerances::DEFAULT;

    let mut basis = analytic_basis(spec.k, spec.n, spec.phi);
    let residuals = verify_basis(&basis, &spec)?;
    dualize(&mut basis)?;
    let gram_condition = basis.blocks[0].gram_condition.unwrap_or(f64::NAN);

    let oracle = if spec.total_qubits() <= oracle_cap {
        let oracle_basis = oracle_space(&spec, oracle_cap, tols.nullspace)?;
        let dims: Vec<Value> = oracle_basis
            .blocks
            .iter()
            .map(|b| {
                json!({
                    "eigenvalue": [num(b.eigenvalue.re), num(b.eigenvalue.im)],
                    "dimension": b.len(),
                })
            })
            .collect();
        json!(dims)
    } else {
        json!(null)
    };

    let mut report = json!({
        "k": spec.k,
        "n": spec.n,
        "analytic_count": analytic_count(spec.k),
        "max_residual": num(residuals.max_residual),
        "argmax_label": residuals.argmax_label,
        "gram_condition": num(gram_condition),
        "oracle": oracle,
    });
    if spec.total_qubits() > oracle_cap {
        report["oracle_note"] = json!(format!(
            "register size {} exceeds the oracle cap {oracle_cap}; oracle section skipped",
            spec.total_qubits()
        ));
    }
    ctx.emit("attractors.json", &serde_json::to_string_pretty(&report).expect("report serializes"))
}

pub fn cmd_classify(ctx: &Ctx) -> Result<(), CliError> {
    let cfg: RunConfig = load_json(&ctx.config)?;
    let spec = checked_spec(&cfg.network)?;
    let rho = realize_state(&cfg.system_state, spec.k, spec.phi)
        .map_err(|e| CliError::validation(format!("system_state: {e}")))?;
    let report = classify_with_diagnostic(&rho)?;
    let body = json!({
        "class": format!("{:?}", report.class),
        "diagonal_product": num(report.diagonal_product),
        "initial_concurrence": num(report.initial_concurrence),
        "r_star": report.r_star.map(num),
    });
    ctx.emit("classification.json", &serde_json::to_string_pretty(&body).expect("serializes"))
}

struct SweepRow {
    axis_value: String,
    final_concurrence: Option<f64>,
    r: Option<f64>,
    n_sep_predicted: Option<u32>,
    status: String,
}

impl SweepRow {
    fn error(axis_value: String, message: String) -> Self {
        SweepRow {
            axis_value,
            final_concurrence: None,
            r: None,
            n_sep_predicted: None,
            status: format!("error: {}", message.replace(',', ";")),
        }
    }

    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}\n",
            self.axis_value,
            self.final_concurrence.map(sig12).unwrap_or_default(),
            self.r.map(sig12).unwrap_or_default(),
            self.n_sep_predicted.map(|n| n.to_string()).unwrap_or_default(),
            self.status
        )
    }
}

/// Single-qubit environment factor, when the env preset is a product of one
/// repeated factor; drives the n_sep prediction column.
fn product_factor(preset: &StatePreset, phi: f64) -> Option<DensityMatrix> {
    match preset {
        StatePreset::Bloch { .. } | StatePreset::PhiEigenstate | StatePreset::Zero | StatePreset::One => {
            realize_state(preset, 1, phi).ok()
        }
        StatePreset::Product { factors } if factors.len() == 1 => {
            product_factor(&factors[0], phi)
        }
        _ => None,
    }
}

fn sweep_axis_value(axis: Axis, v: f64) -> String {
    match axis {
        Axis::EnvSize | Axis::WeightReseeds => format!("{}", v as u64),
        Axis::Alpha | Axis::Phi => sig12(v),
    }
}

fn sweep_one(base: &RunConfig, axis: Axis, v: f64, ctx: &Ctx) -> Vec<SweepRow> {
    let axis_value = sweep_axis_value(axis, v);
    let mut cfg = base.clone();
    match axis {
        Axis::EnvSize => {
            if v < 1.0 || v.fract() != 0.0 {
                return vec![SweepRow::error(axis_value, format!("invalid environment size {v}"))];
            }
            match &cfg.network {
                NetworkConfig::Preset { topology, k, phi, .. } => {
                    cfg.network = NetworkConfig::Preset {
                        topology: *topology,
                        k: *k,
                        n: v as usize,
                        phi: *phi,
                    };
                }
                NetworkConfig::Explicit(_) => {
                    return vec![SweepRow::error(
                        axis_value,
                        "env_size sweep requires a topology preset".into(),
                    )];
                }
            }
        }
        Axis::Alpha => {
            cfg.env_state = StatePreset::Correlated { alpha: v };
        }
        Axis::Phi => match cfg.network {
            NetworkConfig::Preset { topology, k, n, .. } => {
                cfg.network = NetworkConfig::Preset { topology, k, n, phi: v };
            }
            NetworkConfig::Explicit(ref mut spec) => {
                spec.phi = v;
            }
        },
        Axis::WeightReseeds => {
            let spec = cfg.network.to_spec().with_random_weights(v as u64);
            cfg.network = NetworkConfig::Explicit(spec);
        }
    }
    match sweep_run(&cfg, axis, &axis_value, ctx) {
        Ok(rows) => rows,
        Err(e) => vec![SweepRow::error(axis_value, e.msg)],
    }
}

fn sweep_run(
    cfg: &RunConfig,
    _axis: Axis,
    axis_value: &str,
    ctx: &Ctx,
) -> Result<Vec<SweepRow>, CliError> {
    let tols = ctx.tolerances(cfg);
    let (spec, _sys, env, joint) = realize_inputs(cfg, ctx)?;
    let channel = Channel::new(spec.clone())?;
    let r = decoherence_factor(&env, spec.phi)?.value;
    let n_sep_predicted = product_factor(&ctx.env_preset(cfg), spec.phi)
        .and_then(|xi| decoherence_factor(&xi, spec.phi).ok())
        .and_then(|q| n_sep(q.value).ok());
    let result = channel.converge(&joint, tols.converge, tols.max_iter)?;
    let concurrence_of = |rho: &DensityMatrix| -> Result<f64, CliError> {
        Ok(concurrence(&pair_reduction(rho, cfg.observe)?)?)
    };
    let rows = match result.status {
        ConvergenceStatus::Period2 => vec![
            SweepRow {
                axis_value: axis_value.to_string(),
                final_concurrence: Some(concurrence_of(&result.states[0])?),
                r: Some(r),
                n_sep_predicted,
                status: "period2_even".into(),
            },
            SweepRow {
                axis_value: axis_value.to_string(),
                final_concurrence: Some(concurrence_of(&result.states[1])?),
                r: Some(r),
                n_sep_predicted,
                status: "period2_odd".into(),
            },
        ],
        status => vec![SweepRow {
            axis_value: axis_value.to_string(),
            final_concurrence: Some(concurrence_of(&result.states[0])?),
            r: Some(r),
            n_sep_predicted,
            status: status_str(status).into(),
        }],
    };
    Ok(rows)
}

pub fn cmd_sweep(ctx: &Ctx) -> Result<(), CliError> {
    let cfg: SweepConfig = load_json(&ctx.config)?;
    let groups: Vec<Vec<SweepRow>> = qnet::par::map_indexed(cfg.values.len(), &|i| {
        sweep_one(&cfg.base, cfg.axis, cfg.values[i], ctx)
    });
    let mut csv = String::from("axis_value,final_concurrence,r,n_sep_predicted,status\n");
    for group in &groups {
        for row in group {
            csv.push_str(&row.csv());
        }
    }
    ctx.emit("sweep.csv", &csv)
}
