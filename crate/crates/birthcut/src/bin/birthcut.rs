use std::path::PathBuf;
use std::process::ExitCode;

use birthcut::ansatz::build_params;
use birthcut::equilibrium::{effective_potential, solve_one_cut, synthesize_birth_potential, Potential};
use birthcut::lab::{
    ansatz_stability, emit_outputs, numeric_csv, run_identity_suite, run_subcritical_sweep, run_universality_sweep,
    spread, write_text, ExperimentConfig, IdentityOptions, IdentityRow, PotentialSource, Prefactor, ScalingRegime,
    Tables,
};
use birthcut::numerics::PrecisionContext;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "birthcut", version, about = "Birth-of-a-cut laboratory: equilibrium measures, kernels and identities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// INI file with [potential], [regime], [sweep] and [output] sections
    #[arg(long)]
    config: Option<PathBuf>,
    /// Potential file (one coefficient per line, constant term first)
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long)]
    xstar: Option<f64>,
    #[arg(long)]
    nu: Option<u32>,
    /// Comma-separated list of n
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    bits: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Points per axis of the z grid
    #[arg(long)]
    grid: Option<usize>,
    /// Permit n above the desk-scale cap
    #[arg(long)]
    allow_large: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the one-cut equilibrium problem for V/t
    Equilibrium {
        #[command(flatten)]
        common: Common,
        /// Comma-separated list of t
        #[arg(long, default_value = "1")]
        t: String,
    },
    /// Build a potential with a critical point of order 2ν at x*
    Synthesize {
        #[command(flatten)]
        common: Common,
    },
    /// Normalized ansatz residuals over a decade of δt
    AnsatzCheck {
        #[command(flatten)]
        common: Common,
        /// Real test point beyond x*
        #[arg(long)]
        x: Option<f64>,
    },
    /// Run every identity suite
    Identities {
        #[command(flatten)]
        common: Common,
        /// Append a deliberately corrupted recurrence row
        #[arg(long)]
        inject_fault: bool,
    },
    /// Supercritical kernel against the finite-ensemble limit
    Universality {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        uplus: Option<f64>,
        /// Target filling u; sets U+ = u/(2νφ(x*))
        #[arg(long, conflicts_with = "uplus")]
        u: Option<f64>,
    },
    /// Subcritical kernel with the e^c and e^{2c} prefactors
    Subcritical {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        uminus: Option<f64>,
    },
}

fn config(common: &Common) -> birthcut::Result<(ExperimentConfig, Option<f64>)> {
    let (mut cfg, u) = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => (ExperimentConfig::default(), None),
    };
    if let Some(p) = &common.potential {
        cfg.potential = PotentialSource::File(p.clone());
    } else if common.xstar.is_some() || common.nu.is_some() {
        let (x0, nu0) = match cfg.potential {
            PotentialSource::Synthesize { x_star, nu } => (x_star, nu),
            PotentialSource::File(_) => (3.0, 1),
        };
        cfg.potential = PotentialSource::Synthesize { x_star: common.xstar.unwrap_or(x0), nu: common.nu.unwrap_or(nu0) };
    }
    if let Some(n) = &common.n {
        cfg.n_list = n
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| birthcut::Error::Config(format!("bad n {p:?}"))))
            .collect::<birthcut::Result<_>>()?;
    }
    if let Some(b) = common.bits {
        cfg.bits = Some(b);
    }
    if let Some(o) = &common.out {
        cfg.out_dir = o.clone();
    }
    if let Some(g) = common.grid {
        cfg.grid.points = g;
    }
    cfg.allow_large |= common.allow_large;
    Ok((cfg, u))
}

fn potential_only(cfg: &ExperimentConfig) -> birthcut::Result<Potential> {
    match &cfg.potential {
        PotentialSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| birthcut::Error::Io { path: path.clone(), source })?;
            Potential::from_text(&text)
        }
        PotentialSource::Synthesize { x_star, nu } => Ok(synthesize_birth_potential(*x_star, *nu, &PrecisionContext::default())?.0),
    }
}

fn parse_list(s: &str) -> birthcut::Result<Vec<f64>> {
    s.split(',').map(|p| p.trim().parse().map_err(|_| birthcut::Error::Config(format!("bad number {p:?}")))).collect()
}

fn finish(tables: &Tables, cfg: &ExperimentConfig) -> birthcut::Result<()> {
    let files = emit_outputs(tables, &cfg.out_dir)?;
    for line in &tables.summary {
        println!("{line}");
    }
    for p in &files.paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn equilibrium(common: &Common, t: &str) -> birthcut::Result<()> {
    let (cfg, _) = config(common)?;
    let v = potential_only(&cfg)?;
    let ctx = PrecisionContext::default();
    let header = vec![format!("potential: {}", v.provenance()), format!("t: {t}")];
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for t in parse_list(t)? {
        let m = solve_one_cut(&v, t, &ctx)?;
        summary.push(format!("t = {t}: support [{:.12}, {:.12}], mass {:.12}, l_t {:.12}", m.a(), m.b(), m.mass(), m.l_t()));
        let (lo, hi) = (m.a() - 1.0, m.b() + 2.0);
        let pts = 241;
        for i in 0..pts {
            let x = lo + (hi - lo) * i as f64 / (pts - 1) as f64;
            rows.push(vec![t, x, m.density(x), effective_potential(&m, &v, x)]);
        }
    }
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| birthcut::Error::Io { path: cfg.out_dir.clone(), source })?;
    let path = cfg.out_dir.join("equilibrium.csv");
    write_text(&path, &numeric_csv(&header, &["t", "x", "density", "effective_potential"], &rows))?;
    summary.iter().for_each(|l| println!("{l}"));
    println!("wrote {}", path.display());
    Ok(())
}

fn synthesize(common: &Common) -> birthcut::Result<()> {
    let (cfg, _) = config(common)?;
    let (x_star, nu) = match cfg.potential {
        PotentialSource::Synthesize { x_star, nu } => (x_star, nu),
        PotentialSource::File(_) => return Err(birthcut::Error::Config("synthesize takes --xstar/--nu, not a file".into())),
    };
    let (v, r) = synthesize_birth_potential(x_star, nu, &PrecisionContext::default())?;
    let summary = vec![
        format!("x* = {}  nu = {}", r.x_star, r.nu),
        format!("Q(x*) = {:.12e}", r.q_at_xstar),
        format!("phi(x*) = {:.12}", r.phi_at_xstar),
        format!("varphi(x*) = {:.12}", r.varphi_at_xstar),
        format!("off-support margin = {:.6e}", r.margin),
        format!("V = {}", v.poly()),
    ];
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| birthcut::Error::Io { path: cfg.out_dir.clone(), source })?;
    let pot = cfg.out_dir.join("potential.txt");
    write_text(&pot, &v.to_text())?;
    let tables = Tables { summary, ..Tables::default() };
    finish(&tables, &cfg)?;
    println!("wrote {}", pot.display());
    Ok(())
}

fn ansatz_check(common: &Common, x: Option<f64>) -> birthcut::Result<()> {
    let (cfg, _) = config(common)?;
    let ctx = PrecisionContext::default();
    let (v, report) = cfg.potential.resolve(&ctx)?;
    let m1 = solve_one_cut(&v, 1.0, &ctx)?;
    let x = x.unwrap_or(report.x_star + 2.0);
    let mut rows = Vec::new();
    let mut summary = vec![format!("test point x = {x}")];
    for (name, vals) in ansatz_stability(&report, &v, &m1, x, &ctx)? {
        summary.push(format!("{name}: normalized {:.4e} {:.4e} {:.4e}", vals[0], vals[1], vals[2]));
        rows.push(IdentityRow::upper("ansatz", format!("{name} spread"), spread(&vals), 3.0));
    }
    let p = build_params(&report, 1e-3, 1000, &ctx)?;
    summary.push(format!("dt = 1e-3: sigma = {:.6e}, alpha = {:.12}, beta = {:.12}", p.sigma_t, p.alpha_t, p.beta_t));
    let tables = Tables { header: vec![cfg.header()], identities: Some(rows), summary, ..Tables::default() };
    finish(&tables, &cfg)
}

fn identities(common: &Common, inject_fault: bool) -> birthcut::Result<bool> {
    let (cfg, _) = config(common)?;
    let rows = run_identity_suite(IdentityOptions { inject_fault })?;
    let failed: Vec<&IdentityRow> = rows.iter().filter(|r| !r.pass).collect();
    let mut summary = vec![format!("{} identities, {} failed", rows.len(), failed.len())];
    summary.extend(failed.iter().map(|r| format!("FAIL {} / {}: {:e} (tol {:e})", r.suite, r.case, r.residual, r.tolerance)));
    let ok = failed.is_empty();
    let tables = Tables { header: vec![format!("inject_fault: {inject_fault}")], identities: Some(rows), summary, ..Tables::default() };
    finish(&tables, &cfg)?;
    Ok(ok)
}

fn universality(common: &Common, uplus: Option<f64>, u: Option<f64>) -> birthcut::Result<()> {
    let (mut cfg, u_cfg) = config(common)?;
    let (v, report) = cfg.potential.resolve(&PrecisionContext::default())?;
    let target = u.or(if uplus.is_none() { u_cfg } else { None });
    if let Some(up) = uplus {
        cfg.regime = ScalingRegime::new_supercritical(up)?;
    } else if let Some(u) = target {
        cfg.regime = ScalingRegime::new_supercritical(u / (2.0 * report.nu as f64 * report.phi_at_xstar))?;
    } else if !matches!(cfg.regime, ScalingRegime::Supercritical { .. }) {
        return Err(birthcut::Error::Config("universality needs --uplus, --u or a supercritical [regime]".into()));
    }
    let (rows, s) = run_universality_sweep(&cfg, &v, &report)?;
    let mut summary = vec![cfg.header(), format!("u = {:.6}, u_bar = {}", s.u, s.ubar)];
    summary.extend(s.sup_err.iter().map(|(n, e)| format!("n = {n}: sup |K_scaled - K_model| = {e:.6e}")));
    summary.push(format!("decreasing: {}", s.decreasing));
    let tables = Tables { header: vec![cfg.header()], sweeps: vec![("universality".into(), rows)], summary, ..Tables::default() };
    finish(&tables, &cfg)
}

fn subcritical(common: &Common, k: Option<f64>, uminus: Option<f64>) -> birthcut::Result<()> {
    let (mut cfg, _) = config(common)?;
    if k.is_some() || uminus.is_some() || !matches!(cfg.regime, ScalingRegime::Subcritical { .. }) {
        let (k0, u0) = match cfg.regime {
            ScalingRegime::Subcritical { k, u_minus } => (k, u_minus),
            _ => (0.5, -1.0),
        };
        cfg.regime = ScalingRegime::new_subcritical(k.unwrap_or(k0), uminus.unwrap_or(u0))?;
    }
    let (v, report) = cfg.potential.resolve(&PrecisionContext::default())?;
    let ([single, double], s) = run_subcritical_sweep(&cfg, &v, &report)?;
    let mut summary = vec![cfg.header(), format!("limit constant (t = 1) = {:.6e}", s.limit)];
    for p in [Prefactor::Single, Prefactor::Double] {
        for f in s.fits_for(p) {
            summary.push(format!(
                "{} n = {}: t = {:.6}, c* = {:.6}, C = {:.6e}, C/limit_t = {:.4}, var = {:.4e}, local var = {}",
                p.label(),
                f.n,
                f.t,
                f.c_star,
                f.constant,
                f.constant / f.limit_t,
                f.variance,
                f.local_variance.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"))
            ));
        }
    }
    summary.push(format!("stable prefactor: {}", s.stable.label()));
    let tables = Tables {
        header: vec![cfg.header()],
        sweeps: vec![("subcritical_exp_c".into(), single), ("subcritical_exp_2c".into(), double)],
        summary,
        ..Tables::default()
    };
    finish(&tables, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Equilibrium { common, t } => equilibrium(common, t).map(|_| true),
        Cmd::Synthesize { common } => synthesize(common).map(|_| true),
        Cmd::AnsatzCheck { common, x } => ansatz_check(common, *x).map(|_| true),
        Cmd::Identities { common, inject_fault } => identities(common, *inject_fault),
        Cmd::Universality { common, uplus, u } => universality(common, *uplus, *u).map(|_| true),
        Cmd::Subcritical { common, k, uminus } => subcritical(common, *k, *uminus).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
