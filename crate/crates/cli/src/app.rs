//! Argument parsing and command dispatch for the `dirac` binary.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dirac_core::dirac_calculus::{backward_image, compose, forward_image, is_strong, parity, DiracMorphism, DiracStructure};
use dirac_core::fock_clifford::{car_check, so2_model, tau_check};
use dirac_core::group_moment::{
    fusion, reduce_at, reduction_normal_form, verify_qham, GroupContext, GroupTag, PointedQHam, SyntheticReduction,
    QHAM_TOL,
};
use dirac_core::json::{cmat_from_value, rmat_from_value};
use dirac_core::linear_core::DEFAULT_TOL;
use dirac_core::orthogonal_bridge::{
    cayley_morphism, exp_lift, exp_witness_residual, lag_from_orth, multiplicative_morphism, orth_from_lag,
    product_structure, OrthogonalPoint, SkewPoint,
};
use dirac_core::random;
use dirac_core::spectral_boundary::{analytic_spectrum, discretize, hs_divergence_diagnostic, BoundaryOperator};
use dirac_core::{CMat, RMat};

use crate::generate::{generate_instance, GenParams, Group, Kind};
use crate::report::{Record, RunReport};
use crate::suites::{run_suite, Suite, SuiteSize};

#[derive(Parser, Debug)]
#[command(name = "dirac", version, about = "Linear Dirac structures, boundary spectra, Fock modules and q-Hamiltonian checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Override the residual tolerance of every check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output path; `-` is standard output.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,
    /// Emit the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Images and composition of Dirac morphisms.
    #[command(subcommand)]
    Dirac(DiracCmd),
    /// The orthogonal-group dictionary and its lifts.
    #[command(subcommand)]
    Orth(OrthCmd),
    /// Boundary operators d/dt with f(1) = -A f(0).
    #[command(subcommand)]
    Spectral(SpectralCmd),
    /// Truncated wedge and SO(2) weight ladders.
    #[command(subcommand)]
    Fock(FockCmd),
    /// Pointwise q-Hamiltonian verification, fusion and reduction.
    #[command(subcommand)]
    Qham(QhamCmd),
    /// Run a seeded property suite.
    Suite(SuiteArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
}

#[derive(Subcommand, Debug)]
pub enum DiracCmd {
    /// Forward (or backward) image of a Dirac structure.
    Image {
        #[arg(long)]
        morphism: PathBuf,
        /// `{n, E}` or an orthogonal matrix A standing for E_A.
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        backward: bool,
    },
    /// `second ∘ first`.
    Compose {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum OrthCmd {
    /// E_A, its parity and the certified round trip.
    Lag {
        #[arg(long = "A")]
        a: PathBuf,
    },
    /// The multiplicative morphism E_{A1} × E_{A2} → E_{A1 A2}.
    Multiply {
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
    },
    /// Cayley lift of a skew matrix.
    Cayley {
        #[arg(long)]
        a: PathBuf,
    },
    /// Exponential lift of a skew matrix.
    Exp {
        #[arg(long)]
        a: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpectralCmd {
    /// Eigenvalues 2π(λ + k − ½) for k in [kmin, kmax].
    Analytic {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long, default_value_t = -5, allow_negative_numbers = true)]
        kmin: i64,
        #[arg(long, default_value_t = 5, allow_negative_numbers = true)]
        kmax: i64,
    },
    /// Midpoint discretization and its eigenvalues.
    Discretize {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "N", default_value_t = 2000)]
        grid: usize,
        /// Also write every discrete eigenvalue here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Modes entering the convergence check.
        #[arg(long, default_value_t = 10)]
        modes: usize,
    },
    /// Partial sums of the Hilbert-Schmidt series between two boundary conditions.
    HsTest {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "Aprime")]
        a_prime: PathBuf,
        #[arg(long = "M", default_value_t = 100_000)]
        m: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum FockCmd {
    /// Exhaustive CAR and τ checks on the window [−N+1, N].
    CarCheck {
        #[arg(long, default_value_t = 6)]
        window: usize,
    },
    /// Levels and weights of the SO(2) family at parameter s.
    Weights {
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, default_value_t = 6)]
        window: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum QhamCmd {
    Verify {
        #[arg(long)]
        instance: PathBuf,
    },
    Fuse {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Reduced form at the identity, shifting to it when g ≠ e.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    pub name: Suite,
    /// Largest random dimension.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Grid size for the spectral suite.
    #[arg(long = "N", default_value_t = 2000)]
    pub grid: usize,
    /// Random instances per property.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 6)]
    pub window: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    pub kind: Kind,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, value_enum, default_value_t = Group::Su2)]
    pub group: Group,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

/// Errors in what the user supplied; these exit with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("{}: malformed JSON: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    serde_json::from_value(read_json(path)?).map_err(|e| input_err(format!("{}: not a {what}: {e}", path.display())))
}

fn real_matrix(path: &Path) -> Result<RMat> {
    rmat_from_value(&read_json(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn orthogonal(path: &Path) -> Result<OrthogonalPoint> {
    OrthogonalPoint::new(real_matrix(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn skew(path: &Path) -> Result<SkewPoint> {
    SkewPoint::new(real_matrix(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn structure(path: &Path) -> Result<DiracStructure> {
    let v = read_json(path)?;
    let d = if v.is_array() {
        let a = rmat_from_value(&v).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        lag_from_orth(&OrthogonalPoint::new(a).map_err(|e| input_err(format!("{}: {e}", path.display())))?)
    } else {
        let d: DiracStructure =
            serde_json::from_value(v).map_err(|e| input_err(format!("{}: not a Dirac structure: {e}", path.display())))?;
        d.validated().map_err(|e| input_err(format!("{}: {e}", path.display())))?
    };
    Ok(d)
}

fn morphism(path: &Path) -> Result<DiracMorphism> {
    let m: DiracMorphism = parse(path, "Dirac morphism")?;
    m.validated().map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// A matrix, or an object with the matrix under `"A"`.
fn boundary(path: &Path) -> Result<BoundaryOperator> {
    let v = read_json(path)?;
    let v = if v.is_object() { v["A"].clone() } else { v };
    let a: CMat = cmat_from_value(&v).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let b = if a.iter().all(|z| z.im == 0.0) {
        BoundaryOperator::real(&a.map(|z| z.re))
    } else {
        BoundaryOperator::new(a)
    };
    b.map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// A bare instance, or `{instance, truth}` as written by `gen qham-reduction`.
fn qham_instance(path: &Path) -> Result<(PointedQHam, Option<Value>)> {
    let mut v = read_json(path)?;
    let (inst, truth) = if v.get("instance").is_some() {
        (v["instance"].take(), v.get_mut("truth").map(Value::take))
    } else {
        (v, None)
    };
    let p: PointedQHam =
        serde_json::from_value(inst).map_err(|e| input_err(format!("{}: not a q-Hamiltonian instance: {e}", path.display())))?;
    p.check_shapes().map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    Ok((p, truth))
}

/// Generic instances carry no basis; they are read as the torus `U(1)^n`.
fn context_for(p: &PointedQHam) -> GroupContext {
    match p.group {
        GroupTag::So3 => GroupContext::so3(),
        GroupTag::Su2 => GroupContext::su2(),
        GroupTag::Generic => GroupContext::torus(p.lie_dim()),
    }
}

fn check_context(ctx: &GroupContext, p: &PointedQHam, path: &Path) -> Result<()> {
    let d = ctx.matrix_dim();
    if p.lie_dim() != ctx.lie_dim() || p.g.shape() != (d, d) {
        return Err(input_err(format!(
            "{}: shapes do not fit the {:?} context (dim g = {}, g is {}×{})",
            path.display(),
            p.group,
            p.lie_dim(),
            p.g.nrows(),
            p.g.ncols()
        )));
    }
    Ok(())
}

fn qham_records(r: &dirac_core::group_moment::QHamReport, tol: f64, prefix: &str) -> Vec<Record> {
    vec![
        Record::new(format!("{prefix}Dirac morphism residual"), r.dirac_residual, tol),
        Record::new(format!("{prefix}moment condition"), r.moment_residual, tol),
        Record::new(format!("{prefix}action condition"), r.action_residual, tol),
        Record::flag(format!("{prefix}strong"), r.is_strong),
        Record::flag(format!("{prefix}(-1)^dim T = det Ad_g"), r.parity_ok),
    ]
}

/// Runs a parsed command. `Ok(None)` means the output is not a report.
pub fn execute(cli: &Cli, report: &mut RunReport) -> Result<Option<Value>> {
    let g = &cli.global;
    let cert = g.tol.unwrap_or(1e-8);
    let exact = g.tol.unwrap_or(DEFAULT_TOL);
    match &cli.command {
        Command::Dirac(DiracCmd::Image {
            morphism: mp,
            structure: sp,
            backward,
        }) => {
            let m = morphism(mp)?;
            let d = structure(sp)?;
            let img = if *backward { backward_image(&m, &d)? } else { forward_image(&m, &d)? };
            report.push(Record::new("image is Lagrangian", img.isotropy_residual(), cert));
            let strong = if *backward { None } else { Some(is_strong(&m, &d)?) };
            report.data = json!({
                "image": img,
                "strong": strong,
                "parity_in": parity(&d),
                "parity_out": parity(&img),
            });
        }
        Command::Dirac(DiracCmd::Compose { first, second }) => {
            let f = morphism(first)?;
            let s = morphism(second)?;
            let c = compose(&s, &f)?;
            report.data = json!({ "morphism": c });
        }
        Command::Orth(OrthCmd::Lag { a }) => {
            let a = orthogonal(a)?;
            let e = lag_from_orth(&a);
            let back = orth_from_lag(&e)?;
            report.push(Record::new("E_A is Lagrangian", e.isotropy_residual(), exact));
            report.push(Record::new("round trip E_A -> A", (back.matrix() - a.matrix()).norm(), exact));
            report.data = json!({ "A": back, "parity": parity(&e), "E": e });
        }
        Command::Orth(OrthCmd::Multiply { a1, a2 }) => {
            let a1 = orthogonal(a1)?;
            let a2 = orthogonal(a2)?;
            let mm = multiplicative_morphism(&a1, &a2)?;
            let src = product_structure(&a1, &a2);
            let prod = OrthogonalPoint::new(a1.matrix() * a2.matrix())?;
            let img = forward_image(&mm, &src)?;
            report.push(Record::flag("strong", is_strong(&mm, &src)?));
            report.push(Record::new("image equals E_{A1 A2}", img.distance(&lag_from_orth(&prod))?, cert));
            report.data = json!({ "morphism": mm, "A": prod, "parity": parity(&img) });
        }
        Command::Orth(OrthCmd::Cayley { a }) => {
            let a = skew(a)?;
            let lift = cayley_morphism(&a);
            let back = orth_from_lag(&lift.graph)?;
            report.push(Record::new("graph matches Cayley transform", (back.matrix() - lift.point.matrix()).norm(), exact));
            report.data = json!({
                "A": lift.point,
                "parity": parity(&lift.graph),
                "strong": lift.is_strong,
                "gap": lift.gap,
            });
        }
        Command::Orth(OrthCmd::Exp { a }) => {
            let a = skew(a)?;
            let lift = exp_lift(&a);
            let mut rng = random::rng(g.seed);
            let xi = random::gaussian(&mut rng, a.n(), 1).column(0).into_owned();
            report.push(Record::new("witness e_0(ξ) ~ e(ξ)", exp_witness_residual(&a, &xi), g.tol.unwrap_or(1e-10)));
            report.data = json!({
                "A": lift.point,
                "parity": parity(&lag_from_orth(&lift.point)),
                "strong": lift.is_strong,
                "min_singular_value": lift.min_singular_value,
            });
        }
        Command::Spectral(SpectralCmd::Analytic { a, kmin, kmax }) => {
            if kmin > kmax {
                return Err(input_err(format!("kmin {kmin} exceeds kmax {kmax}")));
            }
            let b = boundary(a)?;
            let spec = b.spectrum();
            report.push(Record::new("eigenbasis residual", spec.residual(b.matrix()), exact));
            report.data = json!({
                "lambdas": spec.lambdas,
                "kernel_dim": b.kernel_dim(),
                "modes": analytic_spectrum(&b, *kmin, *kmax),
            });
        }
        Command::Spectral(SpectralCmd::Discretize { a, grid, report: path, modes }) => {
            let b = boundary(a)?;
            let d = discretize(&b, *grid)?;
            let row = d.convergence_error(*modes);
            report.push(Record::new("discretization is skew-adjoint", d.skewness_residual(), exact));
            report.push(Record::new("relative error of the smallest modes", row.max_rel_error, g.tol.unwrap_or(1e-3)));
            if let Some(p) = path {
                let evals = json!({ "grid": grid, "h": d.h(), "eigenvalues": d.eigenvalues() });
                write_output(&p.to_string_lossy(), &serde_json::to_string_pretty(&evals)?)?;
            }
            report.data = json!({ "convergence": row, "kernel_dim": d.kernel_dim(), "analytic_kernel_dim": b.kernel_dim() });
        }
        Command::Spectral(SpectralCmd::HsTest { a, a_prime, m }) => {
            let b1 = boundary(a)?;
            let b2 = boundary(a_prime)?;
            let diag = hs_divergence_diagnostic(&b1, &b2, *m)?;
            let monotone = diag.partial_sums.windows(2).all(|w| w[1] >= w[0]);
            report.push(Record::flag("partial sums are nondecreasing", monotone));
            report.data = serde_json::to_value(&diag)?;
        }
        Command::Fock(FockCmd::CarCheck { window }) => {
            let car = car_check(*window)?;
            let tau = tau_check(*window)?;
            report.push(Record::count(format!("CAR relations ({} checks)", car.checks), car.violations as usize));
            report.push(Record::count("squares vanish", car.square_violations as usize));
            report.push(Record::count("operators are odd", car.grading_violations as usize));
            report.push(Record::count("τ conjugation", tau.violations as usize));
            report.push(Record::count("τ raises weight", tau.weight_violations as usize));
            report.data = json!({ "car": car, "tau": tau });
        }
        Command::Fock(FockCmd::Weights { s, window }) => {
            let model = so2_model(*s, *window)?;
            report.data = serde_json::to_value(&model)?;
        }
        Command::Qham(QhamCmd::Verify { instance }) => {
            let (p, _) = qham_instance(instance)?;
            let ctx = context_for(&p);
            check_context(&ctx, &p, instance)?;
            let tol = g.tol.unwrap_or(QHAM_TOL);
            let r = verify_qham(&ctx, &p, tol)?;
            report.extend(qham_records(&r, tol, ""));
            report.data = serde_json::to_value(&r)?;
        }
        Command::Qham(QhamCmd::Fuse { a, b }) => {
            let (p1, _) = qham_instance(a)?;
            let (p2, _) = qham_instance(b)?;
            if p1.group != p2.group {
                return Err(input_err(format!("cannot fuse {:?} with {:?}", p1.group, p2.group)));
            }
            let ctx = context_for(&p1);
            check_context(&ctx, &p1, a)?;
            check_context(&ctx, &p2, b)?;
            let tol = g.tol.unwrap_or(QHAM_TOL);
            let f = fusion(&ctx, &p1, &p2)?;
            let r = verify_qham(&ctx, &f, tol)?;
            report.extend(qham_records(&r, tol, "fused: "));
            report.data = json!({ "instance": f, "verification": r });
        }
        Command::Qham(QhamCmd::Reduce { instance }) => {
            let (p, truth) = qham_instance(instance)?;
            let ctx = context_for(&p);
            check_context(&ctx, &p, instance)?;
            let tol = g.tol.unwrap_or(QHAM_TOL);
            let d = p.g.nrows();
            let at_identity = (&p.g - CMat::identity(d, d)).norm() <= tol;
            let res = if at_identity { reduction_normal_form(&p)? } else { reduce_at(&ctx, &p)? };
            report.push(Record::flag("reduced form is nondegenerate on an isotropic complement", res.isotropic));
            report.push(Record::new("block form residual", res.block_residual, tol));
            if let Some(t) = truth {
                let s = SyntheticReduction {
                    instance: p.clone(),
                    omega_red: rmat_from_value(&t["omega_red"]).map_err(|e| input_err(format!("truth.omega_red: {e}")))?,
                    scramble: rmat_from_value(&t["scramble"]).map_err(|e| input_err(format!("truth.scramble: {e}")))?,
                };
                report.push(Record::new("recovers the known ω_red", s.recovery_residual(&res), tol));
            }
            report.data = serde_json::to_value(&res)?;
        }
        Command::Suite(args) => {
            let size = SuiteSize {
                n: args.n.max(1),
                grid: args.grid,
                count: args.count,
                window: args.window,
            };
            run_suite(args.name, g.seed, &size, g.tol, report)?;
        }
        Command::Gen(args) => {
            let p = GenParams {
                n: args.n,
                m: args.m,
                scale: args.scale,
                group: args.group,
                theta: args.theta,
            };
            return Ok(Some(generate_instance(args.kind, g.seed, &p)?));
        }
    }
    Ok(None)
}

fn write_output(dest: &str, text: &str) -> Result<()> {
    if dest == "-" {
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        let nl = if text.ends_with('\n') { "" } else { "\n" };
        match write!(out, "{text}{nl}").and_then(|()| out.flush()) {
            // A closed reader (`| head`) is not a failure of the run.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing to standard output"),
        }
    } else {
        std::fs::write(dest, format!("{text}\n")).with_context(|| format!("writing {dest}"))
    }
}

/// Entry point: parses `args` (without the program name), runs, writes the
/// output and maps the outcome to an exit status: 0 when every check passes,
/// 1 when some check fails or a computation errors, 2 on bad input.
pub fn run<I, S>(args: I) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("dirac".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let start = Instant::now();
    let mut report = RunReport::new(args, cli.global.seed);
    let outcome = execute(&cli, &mut report);
    report.wall_time_s = start.elapsed().as_secs_f64();
    let result = outcome.and_then(|instance| {
        let text = match instance {
            Some(v) => serde_json::to_string_pretty(&v)?,
            None if cli.global.json => serde_json::to_string_pretty(&report)?,
            None => report.to_text(),
        };
        write_output(&cli.global.out, &text)
    });
    match result {
        Ok(()) if report.passed() => ExitCode::SUCCESS,
        Ok(()) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
