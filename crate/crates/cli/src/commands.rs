use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use qwalk::{
    bloch_map, classify_with, coin_marginal, edge_overlap, edge_vectors, fidelity, kl_divergence,
    kl_divergence_smoothed, position_distribution, shannon_entropy, support_count, sweep_with, ClassifierConfig,
    CoinMode, CoinSpec64, DecoherenceParams, DecoherentWalk, Distribution64, Divergence, InitialSpec64, Outcomes, Walk,
    WalkError, WalkerState64, DEFAULT_DENSITY_STEP_CAP, DEFAULT_STEP_CAP, TABLE_ONE,
};
use rayon::prelude::*;

use crate::args::*;
use crate::error::{CliError, Result};
use crate::output::{emit, format_real, read_distribution, Cell, Table};

pub const MAX_STEPS_VAR: &str = "QWALK_MAX_STEPS";
pub const MAX_DENSITY_STEPS_VAR: &str = "QWALK_MAX_DENSITY_STEPS";

/// Step caps, from the environment when set.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub steps: usize,
    pub density_steps: usize,
}

impl Caps {
    pub fn from_env() -> Result<Self> {
        let read = |var: &str, default: usize| match std::env::var(var) {
            Ok(v) => {
                v.trim().parse().map_err(|_| CliError::args(format!("{var} must be a non-negative integer, got `{v}`")))
            }
            Err(_) => Ok(default),
        };
        Ok(Self {
            steps: read(MAX_STEPS_VAR, DEFAULT_STEP_CAP)?,
            density_steps: read(MAX_DENSITY_STEPS_VAR, DEFAULT_DENSITY_STEP_CAP)?,
        })
    }

    fn check(&self, steps: usize) -> Result<()> {
        if steps > self.steps {
            return Err(WalkError::StepCap { requested: steps, cap: self.steps }.into());
        }
        Ok(())
    }

    fn check_density(&self, steps: usize) -> Result<()> {
        if steps > self.density_steps {
            return Err(WalkError::StepCap { requested: steps, cap: self.density_steps }.into());
        }
        Ok(())
    }
}

pub fn run(cmd: Command, caps: Caps) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a, caps),
        Command::Chessboard(a) => chessboard(a, caps),
        Command::Entropy(a) => entropy(a, caps),
        Command::Kl(a) => kl(a, caps),
        Command::Fidelity(a) => fidelity_cmd(a, caps),
        Command::Decohere(a) => decohere(a, caps),
        Command::Classify(a) => classify_cmd(a, caps),
        Command::Bloch(a) => bloch(a, caps),
        Command::Sweep(a) => sweep_cmd(a, caps),
    }
}

fn spec_of(w: &WalkArgs) -> CoinSpec64 {
    CoinSpec64::new(w.theta, w.mode.into())
}

fn init_text(init: &InitialSpec64) -> String {
    format!("({}{:+}i;{}{:+}i)", init.a.re, init.a.im, init.b.re, init.b.im)
}

fn walk_table(command: &str, w: &WalkArgs, columns: &[&str]) -> Table {
    Table::new(command, columns.iter().copied())
        .context("theta", w.theta)
        .context("mode", CoinMode::from(w.mode).as_str())
        .context("init", init_text(&w.init.init))
}

fn walk(w: &WalkArgs) -> Result<Walk<f64>> {
    Ok(Walk::new(&w.init.init, &spec_of(w))?)
}

fn push_distribution(table: &mut Table, step: usize, dist: &Distribution64, prefix: &[Cell]) {
    for (n, p) in dist.iter() {
        let mut row = prefix.to_vec();
        row.extend([Cell::from(step), Cell::from(n), Cell::from(p)]);
        table.push(row);
    }
}

fn simulate(a: SimulateArgs, caps: Caps) -> Result<()> {
    caps.check(a.steps)?;
    let from = a.from.unwrap_or(6.min(a.steps));
    if from > a.steps {
        return Err(CliError::args(format!("--from {from} exceeds --steps {}", a.steps)));
    }
    let mut table = walk_table("simulate", &a.walk, &["step", "position", "probability"]).context("steps", a.steps);
    for state in walk(&a.walk)?.take(a.steps + 1).skip(from) {
        push_distribution(&mut table, state.step(), &position_distribution(&state), &[]);
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn chessboard(a: ChessboardArgs, caps: Caps) -> Result<()> {
    caps.check(a.steps)?;
    let t = a.steps as i64;
    let mut columns = vec!["step".to_string()];
    columns.extend((-t..=t).map(|n| n.to_string()));
    let mut table = Table::new("chessboard", columns)
        .context("theta", a.walk.theta)
        .context("mode", CoinMode::from(a.walk.mode).as_str())
        .context("init", init_text(&a.walk.init.init))
        .context("steps", a.steps);
    for state in walk(&a.walk)?.take(a.steps + 1) {
        let d = position_distribution(&state);
        let mut row = vec![Cell::from(state.step())];
        row.extend((-t..=t).map(|n| Cell::from(d.get(n))));
        table.push(row);
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn entropy(a: EntropyArgs, caps: Caps) -> Result<()> {
    caps.check(a.steps)?;
    let mut table = walk_table("entropy", &a.walk, &["step", "position_entropy", "coin_entropy"]);
    for s in walk(&a.walk)?.take(a.steps + 1) {
        let sp = shannon_entropy(&position_distribution(&s));
        let sc = shannon_entropy(&coin_marginal(&s));
        table.push(vec![s.step().into(), sp.into(), sc.into()]);
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn divergence<P: Outcomes<f64>>(p: &P, q: &P, epsilon: Option<f64>) -> Result<f64> {
    Ok(match epsilon {
        Some(eps) => kl_divergence_smoothed(p, q, eps)?,
        None => match kl_divergence(p, q) {
            Divergence::Finite(v) => v,
            Divergence::Infinite => f64::INFINITY,
        },
    })
}

fn kl(a: KlArgs, caps: Caps) -> Result<()> {
    if let (Some(pf), Some(qf)) = (&a.p_file, &a.q_file) {
        let (step, p) = load(pf, a.step)?;
        let (_, q) = load(qf, Some(step))?;
        let mut table = Table::new("kl", ["step", "position_kl"])
            .context("p", pf.display().to_string())
            .context("q", qf.display().to_string());
        table.push(vec![step.into(), divergence(&p, &q, a.kl_epsilon)?.into()]);
        return emit(&table, a.out.format, a.out.output.as_deref());
    }
    let theta = a.theta.ok_or_else(|| CliError::args("--theta is required without --p-file/--q-file"))?;
    caps.check(a.steps)?;
    let init = &a.init.init;
    let mut table = Table::new("kl", ["step", "position_kl", "coin_kl"])
        .context("theta", theta)
        .context("mode", "sdc||sic")
        .context("init", init_text(init));
    if let Some(eps) = a.kl_epsilon {
        table = table.context("kl_epsilon", eps);
    }
    let sdc = Walk::new(init, &CoinSpec64::step_dependent(theta))?;
    let sic = Walk::new(init, &CoinSpec64::step_independent(theta))?;
    for (p, q) in sdc.zip(sic).take(a.steps + 1) {
        let dp = divergence(&position_distribution(&p), &position_distribution(&q), a.kl_epsilon)?;
        let dc = divergence(&coin_marginal(&p), &coin_marginal(&q), a.kl_epsilon)?;
        table.push(vec![p.step().into(), dp.into(), dc.into()]);
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn load(path: &Path, step: Option<usize>) -> Result<(usize, Distribution64)> {
    let (t, probs) = read_distribution(path, step)?;
    let dist = Distribution64::with_tolerance(probs, 1e-9)
        .map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
    Ok((t, dist))
}

fn fidelity_cmd(a: FidelityArgs, caps: Caps) -> Result<()> {
    let init = &a.init.init;
    let mode = CoinMode::from(a.mode);
    let (step, p, theta) = match (&a.p_file, a.theta) {
        (Some(pf), _) => {
            let (t, d) = load(pf, a.step)?;
            (t, d, a.theta)
        }
        (None, Some(theta)) => {
            caps.check(a.steps)?;
            let s = Walk::new(init, &CoinSpec64::new(theta, mode))?.nth(a.steps).expect("unbounded");
            (a.steps, position_distribution(&s), Some(theta))
        }
        (None, None) => return Err(CliError::args("--theta or --p-file is required")),
    };
    let q = match a.against {
        Against::Decoherent => {
            caps.check_density(step)?;
            let params = DecoherenceParams::new(a.q, a.s)?;
            let spec = CoinSpec64::step_independent(a.against_theta);
            DecoherentWalk::with_cap(init, &spec, &params, step, caps.density_steps)?
                .last()
                .expect("initial state")
                .position_distribution()
        }
        Against::Sic => {
            let theta = theta.ok_or_else(|| CliError::args("--against sic needs --theta"))?;
            caps.check(step)?;
            position_distribution(&Walk::new(init, &CoinSpec64::step_independent(theta))?.nth(step).expect("unbounded"))
        }
        Against::File => {
            let qf = a.q_file.as_ref().ok_or_else(|| CliError::args("--against file needs --q-file"))?;
            load(qf, Some(step))?.1
        }
    };
    let against = match a.against {
        Against::Decoherent => "decoherent",
        Against::Sic => "sic",
        Against::File => "file",
    };
    let mut table = Table::new("fidelity", ["step", "theta", "mode", "init", "against", "q", "s", "fidelity"]);
    table.push(vec![
        step.into(),
        theta.map_or(Cell::from("file"), Cell::from),
        mode.as_str().into(),
        init_text(init).into(),
        against.into(),
        a.q.into(),
        a.s.into(),
        fidelity(&p, &q).into(),
    ]);
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn decohere(a: DecohereArgs, caps: Caps) -> Result<()> {
    caps.check_density(a.steps)?;
    let params = DecoherenceParams::new(a.q, a.s)?;
    let walk = DecoherentWalk::with_cap(&a.walk.init.init, &spec_of(&a.walk), &params, a.steps, caps.density_steps)?;
    let columns: &[&str] =
        if a.purity { &["step", "purity", "trace", "coin_coherence"] } else { &["step", "position", "probability"] };
    let mut table = walk_table("decohere", &a.walk, columns).context("q", a.q).context("s", a.s);
    for (t, rho) in walk.enumerate() {
        if a.purity {
            table.push(vec![t.into(), rho.purity().into(), rho.trace().re.into(), rho.coin_coherence().into()]);
        } else {
            push_distribution(&mut table, t, &rho.position_distribution(), &[]);
        }
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn load_config(path: Option<&Path>) -> Result<ClassifierConfig> {
    let Some(path) = path else { return Ok(ClassifierConfig::default()) };
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let cfg: ClassifierConfig =
        toml::from_str(&text).map_err(|e| CliError::args(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

const CLASSIFY_COLUMNS: [&str; 9] =
    ["angle", "theta", "class", "max_support", "peaks", "argmax", "fit_mu", "fit_sigma", "fit_residual"];

fn classify_cmd(a: ClassifyArgs, caps: Caps) -> Result<()> {
    caps.check(a.horizon)?;
    let cfg = load_config(a.config.as_deref())?;
    let angles: Vec<(String, f64)> = match a.theta {
        Some(theta) => vec![(format_real(theta), theta)],
        None => TABLE_ONE.iter().map(|&(name, k, _)| (name.to_string(), k * PI)).collect(),
    };
    let mut columns = CLASSIFY_COLUMNS.to_vec();
    if a.table1 {
        columns.extend(["expected", "match"]);
    }
    let mut table = Table::new("classify", columns).context("horizon", a.horizon);
    for (i, (name, theta)) in angles.iter().enumerate() {
        let c = classify_with(*theta, a.horizon, &cfg)?;
        let f = &c.features;
        let fit =
            |g: fn(&qwalk::GaussianFit64) -> f64| f.fit.as_ref().map_or(Cell::Real(f64::NAN), |x| Cell::from(g(x)));
        let peaks: Vec<String> = f.peak_positions.iter().map(i64::to_string).collect();
        let mut row = vec![
            name.as_str().into(),
            (*theta).into(),
            c.class.label().into(),
            (*f.support.iter().max().expect("nonempty")).into(),
            peaks.join(" ").into(),
            f.argmax.into(),
            fit(|x| x.mu),
            fit(|x| x.sigma),
            fit(|x| x.residual),
        ];
        if a.table1 {
            let expected = TABLE_ONE[i].2;
            row.push(expected.label().into());
            row.push(if expected == c.class { "yes" } else { "no" }.into());
        }
        table.push(row);
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn bloch(a: BlochArgs, caps: Caps) -> Result<()> {
    caps.check(a.steps)?;
    if a.edges {
        let mut table = walk_table(
            "bloch",
            &a.walk,
            &["step", "left", "right", "left_x", "left_y", "left_z", "right_x", "right_y", "right_z", "dot", "overlap"],
        );
        for s in walk(&a.walk)?.take(a.steps + 1) {
            let (Some((l, r)), Some(overlap)) = (edge_vectors(&s), edge_overlap(&s)) else { continue };
            let (lo, hi) = occupied_span(&s);
            table.push(vec![
                s.step().into(),
                lo.into(),
                hi.into(),
                l.x.into(),
                l.y.into(),
                l.z.into(),
                r.x.into(),
                r.y.into(),
                r.z.into(),
                l.dot(&r).into(),
                overlap.into(),
            ]);
        }
        return emit(&table, a.out.format, a.out.output.as_deref());
    }
    let s = walk(&a.walk)?.nth(a.steps).expect("unbounded");
    let d = position_distribution(&s);
    let mut table = walk_table("bloch", &a.walk, &["step", "position", "probability", "x", "y", "z"]);
    for (n, b) in bloch_map(&s) {
        table.push(vec![s.step().into(), n.into(), d.get(n).into(), b.x.into(), b.y.into(), b.z.into()]);
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

fn occupied_span(s: &WalkerState64) -> (i64, i64) {
    let sites: Vec<i64> =
        s.iter().filter(|(_, sp)| sp.norm_sqr() >= qwalk::SUPPORT_THRESHOLD).map(|(n, _)| n).collect();
    (sites[0], sites[sites.len() - 1])
}

fn sweep_cmd(a: SweepArgs, caps: Caps) -> Result<()> {
    caps.check(a.steps.max(qwalk::DEFAULT_HORIZON))?;
    if a.from > a.steps {
        return Err(CliError::args(format!("--from {} exceeds --steps {}", a.from, a.steps)));
    }
    let cfg = ClassifierConfig::default();
    let jobs: Vec<(u32, usize)> = (0..=10).flat_map(|j| (a.from..=a.steps).map(move |t| (j, t))).collect();
    let points = jobs
        .par_iter()
        .map(|&(j, t)| sweep_with(a.theta, j, t, &cfg).map(|p| (t, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let columns: &[&str] = if a.summary {
        &["j", "theta_j", "step", "support", "class"]
    } else {
        &["j", "theta_j", "step", "position", "probability"]
    };
    let mut table = Table::new("sweep", columns.iter().copied()).context("theta", a.theta).context("mode", "sdc");
    let by_key: BTreeMap<(u32, usize), _> = points.into_iter().map(|(t, p)| ((p.j, t), p)).collect();
    for ((j, t), p) in by_key {
        if a.summary {
            let support = support_count(&p.distribution, qwalk::SUPPORT_THRESHOLD)?;
            table.push(vec![(j as usize).into(), p.theta.into(), t.into(), support.into(), p.class.label().into()]);
        } else {
            push_distribution(&mut table, t, &p.distribution, &[(j as usize).into(), p.theta.into()]);
        }
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}
