//! One function per command. Each returns its checks, a JSON result block and
//! the fields to sample.

use jdisc_core::acceptance::{run_all, AcceptanceConfig, Oracle};
use jdisc_core::discsolve::{
    deform_family, immersion_margin, solve_disc, spanning_family_at, transversality_perturb, transversality_report,
    whitney_perturb, DiscProblem, DiscSolution, JetSubmanifold, Perturbation, PerturbOptions, SolverOptions,
};
use jdisc_core::structure::{nijenhuis_tensor, StructureJson};
use jdisc_core::vekua::{jet_eval, kernel_basis, solve_with_jet, DiscretizedOperator, JetVector, LinearSolver};
use jdisc_core::{HolomorphicDatum, SpectralField, StructureChart};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::report::Check;
use crate::scenario::{self, complex, datum, Scenario, Tolerances};
use crate::{digest, Cli, CliError, Command, FieldSample};

/// Points at which solved discs are sampled inside the report.
const SAMPLE_POINTS: [[f64; 2]; 5] = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [-0.5, 0.0], [0.6, -0.6]];

/// Number of smallest singular values listed by `kernel`.
const LISTED_SINGULAR_VALUES: usize = 8;

/// Everything a command needs, resolved from the scenario and the flags.
#[derive(Debug, Clone)]
pub struct Context {
    pub scenario: Scenario,
    pub structure: Option<StructureJson>,
    pub chart: Option<StructureChart>,
    pub options: SolverOptions,
    pub seed: u64,
    pub digest: String,
    pub write_csv: bool,
}

#[derive(Debug, Clone)]
pub struct Done {
    pub checks: Vec<Check>,
    pub results: Value,
    pub fields: Vec<FieldSample>,
}

pub fn prepare(cli: &Cli) -> Result<Context, (CliError, u64)> {
    let fallback_seed = cli.seed.unwrap_or(0);
    let loaded = match (&cli.scenario, cli.command) {
        (Some(path), _) => scenario::load(path).map_err(|e| (e, fallback_seed))?,
        (None, Command::Selftest) => scenario::Loaded {
            scenario: Scenario::default(),
            structure: None,
            chart: None,
        },
        (None, cmd) => {
            return Err((
                CliError::Parse(format!("{} needs --scenario", cmd.name())),
                fallback_seed,
            ))
        }
    };
    let sc = loaded.scenario;
    let seed = match cli.command {
        Command::Selftest => sc.explicit_seed(cli.seed).unwrap_or(AcceptanceConfig::default().seed),
        _ => sc.explicit_seed(cli.seed).unwrap_or(0),
    };
    if let Some(c) = &sc.command {
        if c != cli.command.name() {
            return Err((
                CliError::Schema(format!("scenario is for '{c}', not '{}'", cli.command.name())),
                seed,
            ));
        }
    }
    let options = sc.solver_options(cli.degree, cli.tol).map_err(|e| (e, seed))?;
    let digest = digest(&json!({
        "command": cli.command.name(),
        "scenario": sc,
        "structure": loaded.structure,
        "options": options,
        "seed": seed,
    }));
    Ok(Context {
        write_csv: sc.output.csv,
        scenario: sc,
        structure: loaded.structure,
        chart: loaded.chart,
        options,
        seed,
        digest,
    })
}

pub fn dispatch(cmd: Command, ctx: &Context) -> Result<Done, CliError> {
    match cmd {
        Command::Solve => solve(ctx),
        Command::Deform => deform(ctx),
        Command::JetSolve => jet_solve(ctx),
        Command::Kernel => kernel(ctx),
        Command::Integrability => integrability(ctx),
        Command::Immerse => immerse(ctx),
        Command::Transversal => transversal(ctx),
        Command::Selftest => selftest(ctx),
    }
}

impl Context {
    fn chart(&self) -> Result<&StructureChart, CliError> {
        self.chart
            .as_ref()
            .ok_or_else(|| CliError::Schema("scenario has no structure".into()))
    }

    fn tol(&self) -> &Tolerances {
        &self.scenario.tolerances
    }

    fn problem(&self) -> Result<DiscProblem, CliError> {
        Ok(DiscProblem::new(self.chart()?.clone(), self.options)?)
    }

    fn phi(&self, n: usize) -> Result<HolomorphicDatum, CliError> {
        let phi = self
            .scenario
            .phi
            .as_ref()
            .ok_or_else(|| CliError::Schema("scenario has no phi".into()))?;
        datum(phi, n, "phi")
    }

    fn base_disc(&self, problem: &DiscProblem) -> Result<DiscSolution, CliError> {
        let phi = self.phi(problem.n())?;
        Ok(solve_disc(problem, &phi)?)
    }

    fn perturb_options(&self) -> Result<PerturbOptions, CliError> {
        let p = &self.scenario.perturb;
        if !(p.eps_max > 0.0 && p.eps_max.is_finite()) {
            return Err(CliError::Schema(format!("perturb.eps_max {} must be positive", p.eps_max)));
        }
        if !(p.delta >= 0.0 && p.delta.is_finite()) {
            return Err(CliError::Schema(format!("perturb.delta {} must be nonnegative", p.delta)));
        }
        if p.max_draws == 0 || p.homotopy_steps == 0 {
            return Err(CliError::Schema("perturb.max_draws and perturb.homotopy_steps must be positive".into()));
        }
        Ok(PerturbOptions {
            eps_max: p.eps_max,
            seed: self.seed,
            max_draws: p.max_draws,
            homotopy_steps: p.homotopy_steps,
        })
    }
}

fn c_json(v: C64) -> [f64; 2] {
    [v.re, v.im]
}

fn samples(g: &SpectralField) -> Value {
    SAMPLE_POINTS
        .iter()
        .map(|p| {
            let z = complex(p);
            json!({ "zeta": p, "value": g.eval(z).into_iter().map(c_json).collect::<Vec<_>>() })
        })
        .collect()
}

fn sample(name: &str, g: &SpectralField, problem: &DiscProblem) -> FieldSample {
    FieldSample {
        name: name.to_string(),
        field: g.clone(),
        grid: problem.grid().clone(),
    }
}

fn solve_checks(problem: &DiscProblem, sol: &DiscSolution, tol: &Tolerances, prefix: &str) -> Vec<Check> {
    let tnorm = problem.basis().to_real(&sol.target, false).norm();
    vec![
        Check::at_most(
            &format!("{prefix}map_residual"),
            sol.map_residual,
            problem.options().tol * tnorm.max(1.0),
            Oracle::Trivial,
        ),
        Check::below(&format!("{prefix}cr_residual"), sol.cr_residual, tol.cr, Oracle::Derived),
    ]
}

fn solution_json(sol: &DiscSolution) -> Value {
    json!({ "summary": sol.summary(), "samples": samples(&sol.g) })
}

fn solve(ctx: &Context) -> Result<Done, CliError> {
    let problem = ctx.problem()?;
    let sol = ctx.base_disc(&problem)?;
    Ok(Done {
        checks: solve_checks(&problem, &sol, ctx.tol(), ""),
        results: json!({ "options": problem.options(), "solution": solution_json(&sol) }),
        fields: vec![sample("g", &sol.g, &problem)],
    })
}

fn deform(ctx: &Context) -> Result<Done, CliError> {
    let problem = ctx.problem()?;
    let block = ctx
        .scenario
        .deform
        .as_ref()
        .ok_or_else(|| CliError::Schema("scenario has no deform block".into()))?;
    if block.params.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Schema("deform.params has a non-finite entry".into()));
    }
    let psi = datum(&block.psi, problem.n(), "deform.psi")?;
    let base = ctx.base_disc(&problem)?;
    let family = deform_family(&problem, &base, &psi, &block.params)?;
    let worst_cr = family.members.iter().map(|m| m.cr_residual).fold(0.0, f64::max);
    let mut checks = solve_checks(&problem, &base, ctx.tol(), "base_");
    checks.push(Check::equals(
        "failed_parameters",
        (block.params.len() - family.members.len()) as f64,
        0.0,
        Oracle::Trivial,
    ));
    checks.push(Check::below("member_cr_residual", worst_cr, ctx.tol().cr, Oracle::Derived));
    let members: Vec<Value> = family
        .params
        .iter()
        .zip(&family.members)
        .map(|(t, m)| json!({ "t": t, "summary": m.summary() }))
        .collect();
    let failure = family
        .failure
        .as_ref()
        .map(|(t, e)| json!({ "t": t, "message": e.to_string() }));
    let mut fields = vec![sample("base", &base.g, &problem)];
    if let Some(last) = family.members.last() {
        fields.push(sample("last", &last.g, &problem));
    }
    Ok(Done {
        checks,
        results: json!({ "base": solution_json(&base), "members": members, "failure": failure }),
        fields,
    })
}

/// The disc the linearization is taken at: the solution for `phi` if given,
/// the zero disc otherwise.
fn linearization_base(ctx: &Context, problem: &DiscProblem) -> Result<(SpectralField, Option<DiscSolution>), CliError> {
    if ctx.scenario.phi.is_some() {
        let sol = ctx.base_disc(problem)?;
        Ok((sol.g.clone(), Some(sol)))
    } else {
        Ok((SpectralField::zeros(problem.n(), 0), None))
    }
}

fn jet_solve(ctx: &Context) -> Result<Done, CliError> {
    let problem = ctx.problem()?;
    let n = problem.n();
    let block = ctx
        .scenario
        .jet
        .as_ref()
        .ok_or_else(|| CliError::Schema("scenario has no jet block".into()))?;
    let k_max = problem.config().k_max;
    if block.values.is_empty() || block.values.len() > k_max + 1 {
        return Err(CliError::Schema(format!(
            "jet.values needs 1 to {} entries, got {}",
            k_max + 1,
            block.values.len()
        )));
    }
    let values = block
        .values
        .iter()
        .enumerate()
        .map(|(j, row)| {
            if row.len() != n || row.iter().flatten().any(|x| !x.is_finite()) {
                return Err(CliError::Schema(format!("jet.values[{j}] must hold {n} finite entries")));
            }
            Ok(row.iter().map(complex).collect())
        })
        .collect::<Result<Vec<Vec<C64>>, _>>()?;
    let target = JetVector::new(C64::new(0.0, 0.0), values);
    let (g, base) = linearization_base(ctx, &problem)?;
    let lin = problem.linearize(&g)?;
    let u = solve_with_jet(&lin, None, &target, problem.config())?;
    let got = jet_eval(&u, C64::new(0.0, 0.0), target.order());
    let residual = lin.residual(&u, None).l2_norm();
    let recovered: Vec<Vec<[f64; 2]>> = (0..=target.order())
        .map(|j| got.value(j).into_iter().map(c_json).collect())
        .collect();
    let mut checks = Vec::new();
    if let Some(b) = &base {
        checks.extend(solve_checks(&problem, b, ctx.tol(), "base_"));
    }
    checks.push(Check::below(
        "jet_error",
        got.distance(&target),
        ctx.tol().jet * (1.0 + target.norm()),
        Oracle::Derived,
    ));
    // orders above zero go through grid-approximated twisted coefficients
    let polynomial = target.order() == 0 || lin.b2().iter().all(|f| f.max_abs_coeff() == 0.0);
    if polynomial {
        checks.push(Check::below("linear_residual", residual, ctx.tol().cr, Oracle::Derived));
    }
    Ok(Done {
        checks,
        results: json!({
            "order": target.order(),
            "linear_residual": { "value": residual, "asserted": polynomial },
            "recovered_jet": recovered,
            "base": base.as_ref().map(solution_json),
            "samples": samples(&u),
        }),
        fields: vec![sample("u", &u, &problem)],
    })
}

fn kernel(ctx: &Context) -> Result<Done, CliError> {
    let problem = ctx.problem()?;
    let config = problem.config();
    let (g, base) = linearization_base(ctx, &problem)?;
    let lin = problem.linearize(&g)?;
    let op = DiscretizedOperator::assemble(&lin, config.degree)?;
    let (kernel, sv) = kernel_basis(&op, config.svd_tol);
    let mut smallest: Vec<f64> = sv.iter().copied().collect();
    smallest.sort_by(f64::total_cmp);
    smallest.truncate(LISTED_SINGULAR_VALUES);
    let solver = LinearSolver::new(&lin, config)?;
    let modified = solver.singular_values();
    let rel = modified.min() / modified.max();
    let mut checks = Vec::new();
    if let Some(b) = &base {
        checks.extend(solve_checks(&problem, b, ctx.tol(), "base_"));
    }
    checks.push(Check::above("modified_sigma_min_relative", rel, config.svd_tol, Oracle::Trivial));
    Ok(Done {
        checks,
        results: json!({
            "d": kernel.len(),
            "sigma_max": sv.max(),
            "smallest_singular_values": smallest,
            "modification": solver.modification().report(&smallest),
            "modified_sigma_min": modified.min(),
            "condition_number": solver.condition_number(),
            "base": base.as_ref().map(solution_json),
        }),
        fields: kernel
            .iter()
            .enumerate()
            .map(|(i, w)| sample(&format!("kernel_{i}"), w, &problem))
            .collect(),
    })
}

fn integrability(ctx: &Context) -> Result<Done, CliError> {
    let chart = ctx.chart()?;
    let n = chart.n();
    let tol = ctx.tol().integrability;
    let block = ctx.scenario.integrability.clone().unwrap_or_default();
    let points = if block.points.is_empty() {
        vec![scenario::PointJson {
            zeta: [0.0, 0.0],
            z: vec![[0.0, 0.0]; n],
        }]
    } else {
        block.points.clone()
    };
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let z: Vec<C64> = if p.z.is_empty() {
            vec![C64::new(0.0, 0.0); n]
        } else {
            p.z.iter().map(complex).collect()
        };
        if z.len() != n || z.iter().any(|v| !v.is_finite()) || !complex(&p.zeta).is_finite() {
            return Err(CliError::Schema(format!("integrability.points[{i}] needs {n} finite coordinates")));
        }
        chart
            .check_point(&z)
            .map_err(|e| CliError::Schema(format!("integrability.points[{i}]: {e}")))?;
        let r = nijenhuis_tensor(chart, complex(&p.zeta), &z, tol);
        worst = worst.max(r.max_asymmetry);
        let tensor: Vec<Vec<Vec<[f64; 2]>>> = (0..n)
            .map(|j| (0..n).map(|k| (0..n).map(|l| c_json(r.get(j, k, l))).collect()).collect())
            .collect();
        rows.push(json!({
            "zeta": p.zeta,
            "z": z.iter().map(|v| c_json(*v)).collect::<Vec<_>>(),
            "max_asymmetry": r.max_asymmetry,
            "tolerance": tol,
            "integrable": r.integrable,
            "tensor": tensor,
        }));
    }
    let verdict = if worst < tol { "integrable" } else { "non_integrable" };
    let checks = match block.expect.as_deref() {
        None => Vec::new(),
        Some("integrable") => vec![Check::below("max_asymmetry", worst, tol, Oracle::Derived)],
        Some("non_integrable") => vec![Check::at_least("max_asymmetry", worst, tol, Oracle::Derived)],
        Some(other) => {
            return Err(CliError::Schema(format!(
                "integrability.expect must be \"integrable\" or \"non_integrable\", got \"{other}\""
            )))
        }
    };
    Ok(Done {
        checks,
        results: json!({ "verdict": verdict, "max_asymmetry": worst, "tolerance": tol, "points": rows }),
        fields: Vec::new(),
    })
}

fn homotopy_checks(p: &Perturbation, ctx: &Context) -> Vec<Check> {
    let worst = p.homotopy.iter().map(|h| h.cr_residual).fold(0.0, f64::max);
    vec![
        Check::below("homotopy_cr_residual", worst, ctx.tol().cr, Oracle::Derived),
        Check::at_most("distance_sup", p.distance_sup, 10.0 * p.kappa * p.s_norm, Oracle::Derived),
    ]
}

fn immerse(ctx: &Context) -> Result<Done, CliError> {
    let problem = ctx.problem()?;
    let opts = ctx.perturb_options()?;
    let delta = ctx.scenario.perturb.delta;
    let base = ctx.base_disc(&problem)?;
    let before = immersion_margin(&base.g, problem.grid());
    let family = spanning_family_at(&problem, &base.g, ctx.scenario.perturb.k)?;
    let p = whitney_perturb(&problem, &base, &family, delta, &opts)?;
    let after = immersion_margin(&p.disc.g, problem.grid());
    let steps = p.homotopy.len() - 1;
    let mut checks = solve_checks(&problem, &base, ctx.tol(), "base_");
    checks.push(Check::above("immersion_margin", after.margin, delta, Oracle::Derived));
    if p.attempts > 0 {
        checks.push(Check::at_least(
            "homotopy_steps",
            steps as f64,
            opts.homotopy_steps as f64,
            Oracle::Trivial,
        ));
    }
    checks.extend(homotopy_checks(&p, ctx));
    Ok(Done {
        checks,
        results: json!({
            "base": solution_json(&base),
            "margin_before": before,
            "margin_after": after,
            "family_size": family.members.len(),
            "perturbation": p.summary(),
            "disc": solution_json(&p.disc),
        }),
        fields: vec![sample("base", &base.g, &problem), sample("perturbed", &p.disc.g, &problem)],
    })
}

fn transversal(ctx: &Context) -> Result<Done, CliError> {
    let problem = ctx.problem()?;
    let sub_json = ctx
        .scenario
        .submanifold
        .as_ref()
        .ok_or_else(|| CliError::Schema("scenario has no S block".into()))?;
    let sub = JetSubmanifold::from_json(sub_json)?;
    if sub.n() != problem.n() {
        return Err(CliError::Schema(format!(
            "S is for n = {}, the structure has n = {}",
            sub.n(),
            problem.n()
        )));
    }
    let base = ctx.base_disc(&problem)?;
    let initial = transversality_report(&base.g, &sub)?;
    let mut checks = solve_checks(&problem, &base, ctx.tol(), "base_");
    let mut fields = vec![sample("base", &base.g, &problem)];
    let (final_report, perturbation) = if initial.transverse {
        (initial.clone(), None)
    } else {
        let opts = ctx.perturb_options()?;
        let family = spanning_family_at(&problem, &base.g, sub.order())?;
        let (p, report) = transversality_perturb(&problem, &base, &family, &sub, &opts)?;
        checks.extend(homotopy_checks(&p, ctx));
        fields.push(sample("perturbed", &p.disc.g, &problem));
        (report, Some(p))
    };
    checks.push(Check::equals(
        "transverse",
        if final_report.transverse { 1.0 } else { 0.0 },
        1.0,
        Oracle::Trivial,
    ));
    Ok(Done {
        checks,
        results: json!({
            "codim": sub.codim(),
            "base": solution_json(&base),
            "initial": initial,
            "final": final_report,
            "perturbation": perturbation.as_ref().map(Perturbation::summary),
        }),
        fields,
    })
}

fn selftest(ctx: &Context) -> Result<Done, CliError> {
    let cfg = AcceptanceConfig {
        seed: ctx.seed,
        ..AcceptanceConfig::for_degree(ctx.options.degree)
    };
    let results = run_all(&cfg);
    let checks = results
        .iter()
        .map(|r| {
            Check::with_outcome(
                &format!("{:02} {}", r.id, r.name),
                r.value,
                r.tolerance,
                &r.relation,
                r.oracle,
                r.passed,
            )
        })
        .collect();
    Ok(Done {
        checks,
        results: json!({ "config": cfg, "criteria": results }),
        fields: Vec::new(),
    })
}
