use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use kinkspec::config::RunConfig;
use kinkspec::diagnostics::{s_matrix_report, spectral_suite, TAIL_START};
use kinkspec::fock::{
    duhamel_experiment, quadratic_evolution, unitarity_sweep, wick_bound_trials, zero_mode_growth_ratio, DuhamelSetup,
    FockBasis, LinearizedSystem, ModeSet, ProductState, TruncatedFockState,
};
use kinkspec::io::{self, FockSnapshot};
use kinkspec::kernels::{build_s_matrix, gamma_kappa, k0_half_diagonal, PlaneWaveBox};
use kinkspec::mass_shift::{breakdown_sweep, extrapolate_mass_shift, naive_mass_shift, MassShiftGrid};
use kinkspec::spectral::{discrete_eigenpairs, scattering_phase};
use kinkspec::transform::{forward, inverse, SpectralCoefficients};
use kinkspec::wavepacket::{moment, q_grid, schrodinger_residual, Superposition, WavePacket};
use kinkspec::{Error, MomentumGrid, Result, C64};
use serde::Serialize;

use crate::output::{Check, Sink};

fn momentum(cfg: &RunConfig) -> Result<MomentumGrid> {
    MomentumGrid::new(cfg.momentum)
}

#[derive(Serialize)]
struct EigenpairRow {
    x: f64,
    psi0: f64,
    psi1: f64,
    x_max: f64,
    points: usize,
}

#[derive(Serialize)]
struct PhaseRow {
    k: f64,
    delta: f64,
    omega: f64,
    k_max: f64,
}

#[derive(Serialize)]
struct MetricRow<'a> {
    metric: &'a str,
    value: f64,
    x_max: f64,
    points: usize,
    k_max: f64,
}

pub fn spectrum(cfg: &RunConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let p = cfg.model;
    let grid = cfg.grid()?;
    let kg = momentum(cfg)?;
    let (x_max, points, k_max) = (grid.x_max, grid.n, kg.k_max);

    let [z, s] = discrete_eigenpairs(&grid, &p);
    let rows: Vec<EigenpairRow> = grid
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| EigenpairRow { x, psi0: z.samples[i], psi1: s.samples[i], x_max, points })
        .collect();
    sink.table("eigenpairs", &rows)?;

    let mut ks = vec![0.0];
    ks.extend(kg.nodes.iter().copied().filter(|&k| k > 0.0));
    ks.push(1e3 * p.m);
    let phases: Vec<PhaseRow> =
        ks.iter().map(|&k| PhaseRow { k, delta: scattering_phase(k, &p) + 0.0, omega: p.omega(k), k_max }).collect();
    sink.table("phases", &phases)?;

    let sample_ks: Vec<f64> = [-3.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0].iter().map(|k| k * p.m).collect();
    let table = io::spectral_table(&sample_ks, &grid, &p)?;
    sink.bytes("eigenfunctions.bin", &io::encode_spectral(&table))?;

    let r = spectral_suite(&grid, &kg, &sample_ks, &p)?;
    let metrics = [
        ("psi0_norm", r.psi_norms[0]),
        ("psi1_norm", r.psi_norms[1]),
        ("orthonormality", r.orthonormality),
        ("bound_continuum_overlap", r.bound_continuum_overlap),
        ("eigen_residual", r.eigen_residual),
        ("completeness", r.completeness),
        ("parseval", r.parseval),
        ("phase_at_zero", r.phase_at_zero),
        ("phase_at_large_k", r.phase_at_large_k),
        ("resolvent_identity", r.resolvent_identity),
    ];
    let rows: Vec<MetricRow> =
        metrics.iter().map(|&(metric, value)| MetricRow { metric, value, x_max, points, k_max }).collect();
    sink.table("spectrum_report", &rows)?;

    let c = "spectrum";
    Ok(vec![
        Check::at_most(c, "psi0_norm", (r.psi_norms[0] - 1.0).abs(), 1e-8),
        Check::at_most(c, "psi1_norm", (r.psi_norms[1] - 1.0).abs(), 1e-8),
        Check::at_most(c, "orthonormality", r.orthonormality, 1e-8),
        Check::at_most(c, "eigen_residual", r.eigen_residual, 1e-8),
        Check::at_most(c, "completeness", r.completeness, 1e-5),
        Check::at_most(c, "parseval", r.parseval, 1e-5),
        Check::at_most(c, "phase_at_zero", r.phase_at_zero.abs(), 0.0),
        Check::at_most(c, "phase_at_large_k", (r.phase_at_large_k.abs() - PI).abs(), 5e-3),
        Check::at_most(c, "resolvent_identity", r.resolvent_identity, 1e-5),
    ])
}

#[derive(Serialize)]
struct CoefficientOut {
    k: f64,
    re: f64,
    im: f64,
    x_max: f64,
    points: usize,
    k_max: f64,
}

#[derive(Serialize)]
struct SampleRow {
    x: f64,
    re: f64,
    im: f64,
    x_max: f64,
    points: usize,
    k_max: f64,
}

/// Forward transform of a Gaussian test profile, or the inverse of imported coefficients.
pub fn transform(cfg: &RunConfig, coefficients: Option<&Path>, sink: &mut Sink) -> Result<Vec<Check>> {
    let p = cfg.model;
    let grid = cfg.grid()?;
    let kg = momentum(cfg)?;
    let (x_max, points, k_max) = (grid.x_max, grid.n, kg.k_max);
    let c = "transform";
    if let Some(path) = coefficients {
        let (ks, us) = io::read_coefficients(fs::File::open(path)?)?;
        let matches = ks.len() == kg.len() && ks.iter().zip(&kg.nodes).all(|(a, b)| (a - b).abs() <= 1e-12 * k_max);
        if !matches {
            return Err(Error::InvalidParam(format!(
                "imported momenta do not match the configured grid ({} nodes, k_max {k_max})",
                kg.len()
            )));
        }
        let s = SpectralCoefficients::continuum(kg.clone(), us);
        let u = inverse(&s, &grid, &p);
        let rows: Vec<SampleRow> = grid
            .nodes
            .iter()
            .zip(&u)
            .map(|(&x, v)| SampleRow { x, re: v.re, im: v.im, x_max, points, k_max })
            .collect();
        sink.table("reconstruction", &rows)?;
        let lhs = grid.norm_c(&u).powi(2);
        let rhs = s.norm_sqr();
        return Ok(vec![Check::at_most(c, "parseval", (lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE), 1e-5)]);
    }
    let u: Vec<C64> = grid.nodes.iter().map(|&x| C64::new((-0.5 * (p.m * x - 0.3).powi(2)).exp(), 0.0)).collect();
    let s = forward(&u, &grid, &kg, &p);
    let rows: Vec<CoefficientOut> = io::coefficient_rows(&s)
        .into_iter()
        .map(|r| CoefficientOut { k: r.k, re: r.re, im: r.im, x_max, points, k_max })
        .collect();
    sink.table("coefficients", &rows)?;
    let norm2 = grid.norm_c(&u).powi(2);
    let back = inverse(&s, &grid, &p);
    let diff: Vec<C64> = back.iter().zip(&u).map(|(a, b)| a - b).collect();
    Ok(vec![
        Check::at_most(c, "parseval", (s.norm_sqr() - norm2).abs() / norm2, 1e-5),
        Check::at_most(c, "round_trip", grid.norm_c(&diff) / norm2.sqrt(), 1e-5),
        Check::flag(c, "no_warnings", s.warnings.is_empty()),
    ])
}

#[derive(Serialize)]
struct EigenOut {
    n: usize,
    value: f64,
    theta: f64,
    modes: usize,
    half_length: f64,
}

#[derive(Serialize)]
struct GammaRow {
    kappa: f64,
    gamma: f64,
    k0_half_diagonal: f64,
    xi_nodes: usize,
}

#[derive(Serialize)]
struct SReportRow {
    theta: f64,
    modes: usize,
    half_length: f64,
    eigenvalue: f64,
    overlap: f64,
    trace_norm: f64,
    tail_fraction: f64,
    refined_trace_norm: f64,
    refined_tail_fraction: f64,
}

pub fn kernels(cfg: &RunConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let p = cfg.model;
    let bx = PlaneWaveBox::for_model(&p);
    let theta = cfg.deformation.theta;
    let r = s_matrix_report(theta, &bx, &p)?;
    let s = build_s_matrix(theta, &bx, &p)?;
    let eig: Vec<EigenOut> = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(n, &value)| EigenOut { n, value, theta, modes: bx.modes, half_length: bx.half_length })
        .collect();
    sink.table("s_eigenvalues", &eig)?;
    sink.bytes("s_matrix.bin", &io::encode_matrix(&s.matrix.map(|v| C64::new(v, 0.0))))?;
    sink.table(
        "s_report",
        &[SReportRow {
            theta,
            modes: r.modes,
            half_length: bx.half_length,
            eigenvalue: r.eigenvalue,
            overlap: r.overlap,
            trace_norm: r.trace_norm,
            tail_fraction: r.tail_fraction,
            refined_trace_norm: r.refined_trace_norm,
            refined_tail_fraction: r.refined_tail_fraction,
        }],
    )?;
    let gammas: Vec<GammaRow> = cfg
        .mollifiers()?
        .iter()
        .map(|mol| GammaRow {
            kappa: mol.kappa,
            gamma: gamma_kappa(mol, &p),
            k0_half_diagonal: k0_half_diagonal(mol, &p),
            xi_nodes: mol.xi_nodes().len(),
        })
        .collect();
    sink.table("counterterms", &gammas)?;

    let c = "kernels";
    let mut checks = vec![
        Check::at_most(c, &format!("tail_fraction_beyond_{TAIL_START}"), r.tail_fraction, 1e-3),
        Check::at_most(c, &format!("refined_tail_fraction_beyond_{TAIL_START}"), r.refined_tail_fraction, 1e-3),
    ];
    if theta == 0.0 {
        checks.push(Check::at_most(c, "eigenvalue_near_minus_one", (r.eigenvalue + 1.0).abs(), 1e-3));
        checks.push(Check::at_least(c, "zero_mode_overlap", r.overlap, 0.999));
    }
    Ok(checks)
}

#[derive(Serialize)]
struct BreakdownRow {
    kappa: f64,
    discrete: f64,
    j0: f64,
    c0: f64,
    j1: f64,
    j2: f64,
    j3: f64,
    total_half: f64,
    extrapolated: f64,
    direct: f64,
    closure_defect: f64,
    x_max: f64,
    h: f64,
    q_max: f64,
    order: usize,
}

#[derive(Serialize)]
struct MassShiftSummary {
    naive: f64,
    extrapolated: f64,
    closed_form: f64,
    slope: f64,
    fit_residual: f64,
    j1_limit: f64,
    j2_limit: f64,
    j3_limit: f64,
    warnings: Vec<String>,
}

pub fn mass_shift(cfg: &RunConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let p = cfg.model;
    let ms = cfg.mass_shift;
    let grid = MassShiftGrid { x_max: ms.x_max, h: ms.h, q_max: ms.q_max, order: ms.order };
    let mols = cfg.mollifiers()?;
    let rows = breakdown_sweep(&mols[0], &cfg.kappa_values(), &grid, &p)?;
    let fit = |f: &dyn Fn(&kinkspec::mass_shift::MassShiftBreakdown) -> f64| {
        extrapolate_mass_shift(&rows.iter().map(|b| (b.kappa / p.m, f(b))).collect::<Vec<_>>())
    };
    let total = fit(&|b| b.total_half)?;
    let (j1, j2, j3) = (fit(&|b| b.j1)?, fit(&|b| b.j2)?, fit(&|b| b.j3)?);
    let table: Vec<BreakdownRow> = rows
        .iter()
        .map(|b| BreakdownRow {
            kappa: b.kappa,
            discrete: b.discrete_term,
            j0: b.j0,
            c0: b.c0_term,
            j1: b.j1,
            j2: b.j2,
            j3: b.j3,
            total_half: b.total_half,
            extrapolated: total.estimate,
            direct: b.direct,
            closure_defect: b.closure_defect(),
            x_max: grid.x_max,
            h: grid.h,
            q_max: grid.q_max,
            order: grid.order,
        })
        .collect();
    sink.table("breakdown", &table)?;
    let naive = naive_mass_shift(&p);
    let closed = p.dhn_mass_shift();
    sink.json(
        "mass_shift_summary",
        &MassShiftSummary {
            naive,
            extrapolated: total.estimate,
            closed_form: closed,
            slope: total.slope,
            fit_residual: total.residual,
            j1_limit: j1.estimate,
            j2_limit: j2.estimate,
            j3_limit: j3.estimate,
            warnings: total.warnings.clone(),
        },
    )?;
    let c = "mass-shift";
    let closure = rows.iter().map(|b| b.closure_defect()).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most(c, "extrapolated_vs_closed_form", (total.estimate - closed).abs(), 1e-2 * p.m),
        Check::at_most(c, "naive_relative", (naive * 3f64.sqrt() / p.m - 1.0).abs(), 1e-6),
        Check::at_most(c, "closure_relative", closure, 1e-6),
        Check::at_most(c, "j1_limit", j1.estimate.abs(), 1e-2 * p.m),
        Check::at_most(c, "j2_limit", j2.estimate.abs(), 1e-2 * p.m),
        Check::at_most(c, "j3_limit", (j3.estimate + 6.0 * p.m / PI).abs(), 2e-2 * p.m),
    ])
}

#[derive(Serialize)]
struct PacketOut {
    n: usize,
    t: f64,
    #[serde(rename = "Q")]
    q: f64,
    re: f64,
    im: f64,
    abs2: f64,
    sigma: f64,
    tau: f64,
}

#[derive(Serialize)]
struct PacketReport {
    n: usize,
    t: f64,
    norm: f64,
    variance_ratio: f64,
    variance_law: f64,
    schrodinger_residual: f64,
    sigma: f64,
    tau: f64,
}

pub fn wavepacket(cfg: &RunConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let p = cfg.model;
    let wc = &cfg.wavepacket;
    let base = WavePacket::new(0, cfg.deformation.sigma, &p)?;
    let mut series = Vec::new();
    let mut report = Vec::new();
    let (mut worst_norm, mut worst_res, mut worst_var): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in 0..=wc.n_max {
        let wp = base.with_index(n);
        let q2_0 = moment(&wp, 0.0, 1);
        for &t in &wc.times {
            let (qs, _) = q_grid(&wp, n, t, wc.q_points);
            series.extend(io::packet_series(&wp, &[t], &qs).into_iter().map(|r| PacketOut {
                n,
                t: r.t,
                q: r.q,
                re: r.re,
                im: r.im,
                abs2: r.abs2,
                sigma: wp.sigma,
                tau: wp.tau,
            }));
            let norm = moment(&wp, t, 0);
            let ratio = moment(&wp, t, 1) / q2_0;
            let law = 1.0 + (t / wp.tau).powi(2);
            let (fine, _) = q_grid(&wp, n, t, 401);
            let res = schrodinger_residual(&wp, t, &fine);
            worst_norm = worst_norm.max((norm - 1.0).abs());
            worst_res = worst_res.max(res);
            worst_var = worst_var.max((ratio / law - 1.0).abs());
            report.push(PacketReport {
                n,
                t,
                norm,
                variance_ratio: ratio,
                variance_law: law,
                schrodinger_residual: res,
                sigma: wp.sigma,
                tau: wp.tau,
            });
        }
    }
    sink.table("packets", &series)?;
    sink.table("packet_report", &report)?;
    let c = "wavepacket";
    Ok(vec![
        Check::at_most(c, "norm", worst_norm, 1e-8),
        Check::at_most(c, "schrodinger_residual", worst_res, 1e-8),
        Check::at_most(c, "variance_law_relative", worst_var, 1e-6),
    ])
}

#[derive(Serialize)]
struct TrialRow {
    trial: usize,
    m_out: usize,
    n_in: usize,
    n_modes: usize,
    n_max: usize,
    weighted: f64,
    kernel_norm: f64,
    ratio: f64,
    seed: u64,
}

#[derive(Serialize)]
struct GrowthRow {
    t: f64,
    ratio: f64,
    limit: f64,
    grid_points: usize,
}

#[derive(Serialize)]
struct DuhamelRow {
    g: f64,
    t1: f64,
    sup_distance: f64,
    duhamel_bound: f64,
    envelope: f64,
    fitted_c: f64,
    kappa: f64,
    packet_states: usize,
    modes: usize,
    n_max: usize,
}

pub fn fock(cfg: &RunConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let p = cfg.model;
    let fc = &cfg.fock;
    let trials = wick_bound_trials(cfg.seed, fc.trials, fc.modes, fc.n_max)?;
    let rows: Vec<TrialRow> = trials
        .iter()
        .enumerate()
        .map(|(i, t)| TrialRow {
            trial: i,
            m_out: t.m_out,
            n_in: t.n_in,
            n_modes: t.n_modes,
            n_max: t.n_max,
            weighted: t.weighted,
            kernel_norm: t.kernel_norm,
            ratio: t.ratio(),
            seed: cfg.seed,
        })
        .collect();
    sink.table("bound_trials", &rows)?;
    let violations = trials.iter().filter(|t| t.violates()).count();

    let modes = ModeSet::new(&p, fc.modes.saturating_sub(1).max(1), fc.k_max, true)?;
    let basis = Arc::new(FockBasis::new(modes.len(), fc.n_max.min(4))?);
    let mut state = TruncatedFockState::zero(basis);
    for (i, a) in state.amps.iter_mut().enumerate() {
        *a = C64::new((0.37 * i as f64 + cfg.seed as f64).sin(), (0.11 * i as f64).cos());
    }
    let norm = state.norm();
    state = state.scaled(C64::new(1.0 / norm, 0.0));
    let packet = Superposition { base: WavePacket::new(0, cfg.deformation.sigma, &p)?, coeffs: vec![C64::new(1.0, 0.0)] };
    let product = ProductState { packet, t: 0.0, fock: state };
    let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.37 / p.m).collect();
    let unitarity = unitarity_sweep(&product, &modes.frequencies(), &times);
    let evolved = quadratic_evolution(&product, &modes.frequencies(), *times.last().unwrap());
    sink.json("state", &FockSnapshot::from_state(&evolved.fock))?;

    let sys = LinearizedSystem::for_model(&p);
    let growth: Vec<GrowthRow> = [0.5, 1.0, 10.0, 100.0, 1000.0]
        .iter()
        .map(|&tm| {
            let g = zero_mode_growth_ratio(tm / p.m, &sys, &p)?;
            Ok(GrowthRow { t: g.t, ratio: g.ratio, limit: g.limit, grid_points: sys.len() })
        })
        .collect::<Result<_>>()?;
    sink.table("growth_ratio", &growth)?;
    let last = growth.last().unwrap();

    let setup = DuhamelSetup::for_model(&p);
    let d = duhamel_experiment(&setup, &fc.couplings, &p)?;
    let drows: Vec<DuhamelRow> = d
        .points
        .iter()
        .map(|pt| DuhamelRow {
            g: pt.g,
            t1: pt.t1,
            sup_distance: pt.sup_distance,
            duhamel_bound: pt.duhamel_bound,
            envelope: pt.envelope,
            fitted_c: d.fitted_c,
            kappa: setup.kappa,
            packet_states: setup.packet_states,
            modes: setup.continuum_modes + 1,
            n_max: setup.n_max,
        })
        .collect();
    sink.table("duhamel", &drows)?;

    let c = "fock";
    Ok(vec![
        Check::at_most(c, "wick_bound_violations", violations as f64, 0.0),
        Check::at_least(c, "wick_bound_trials", trials.len() as f64, 50.0),
        Check::at_most(c, "unitarity_defect", unitarity.max_defect, 1e-12),
        Check::at_most(c, "growth_ratio_limit", (last.ratio - last.limit).abs(), 1e-4),
        Check::flag(c, "duhamel_decreasing", d.decreasing),
        Check::flag(c, "duhamel_within_envelope", d.within_envelope),
    ])
}
