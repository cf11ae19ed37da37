use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::input::{matrix_to_pairs, InputDocument, Pair};
use super::table::{read_trajectory, write_trajectory};
use super::{write_atomic, write_json, Job, EXIT_BLOW_UP, EXIT_DRIFT, EXIT_OK};
use crate::algebra::{Complex, Matrix, MatrixPoly};
use crate::dynamics::{from_phi, integrate, to_phi, FlowForm, NahmState, Trajectory};
use crate::error::{Error, Result};
use crate::fixed_points::{
    c_action, classify_image, collision_fibre, commutation_defect, orbit_parameter, phi_pm,
    rank2_family, sample_points, solve_psi, support_check, support_points, ImageClass, LiftedPoint,
    COMMUTE_TOL,
};
use crate::moduli::{
    moduli_coords, moduli_flow_check, vector_field_zero, ModuliFlowReport, TAU_ZERO, TIME_FACTOR,
};
use crate::ribbon::{
    case_split, degree_consistency, divisor_conservation, divisor_d, divisor_degree,
    extract_square_root, kernel_line_degree, multiplicity_conservation, DegreeCheck,
    DivisorConservation, DivisorPoint, MultiplicityProfile, SheafCase, DEFAULT_SCAN_STRIDE,
};
use crate::spectral::{
    conservation_drift, is_nilpotent_field, rank2_q, singular_at_infinity, singular_points_rank2,
    spectral_data, DriftReport,
};

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    input: Option<String>,
    seed: u64,
    dt: f64,
    t_end: Option<f64>,
    form: Option<FlowForm>,
    tol: f64,
    law_tol: f64,
    tau_rank: f64,
    tau_fix: f64,
    grid: usize,
    d: Option<i64>,
    family: Option<&'a str>,
    blow_up: bool,
    blow_up_t: Option<f64>,
    samples: Option<usize>,
    error_estimate: Option<f64>,
    outputs: Vec<&'a str>,
    exit_code: u8,
}

impl<'a> Manifest<'a> {
    fn new(job: &'a Job<'a>) -> Self {
        let a = job.args;
        Manifest {
            command: job.verb,
            version: env!("CARGO_PKG_VERSION"),
            input: job.input.map(|p| p.display().to_string()),
            seed: a.seed,
            dt: a.dt,
            t_end: a.t_end,
            form: a.form,
            tol: a.tol,
            law_tol: a.law_tol,
            tau_rank: a.tau_rank,
            tau_fix: a.tau_fix,
            grid: a.grid,
            d: a.d,
            family: a.family.as_deref(),
            blow_up: false,
            blow_up_t: None,
            samples: None,
            error_estimate: None,
            outputs: vec!["report.json"],
            exit_code: EXIT_OK,
        }
    }
}

fn finish<T: Serialize>(
    job: &Job,
    mut manifest: Manifest,
    report: Option<&T>,
    code: u8,
) -> Result<u8> {
    if let Some(r) = report {
        write_json(&job.out.join("report.json"), r)?;
    } else {
        manifest.outputs.retain(|o| *o != "report.json");
    }
    manifest.exit_code = code;
    manifest.outputs.push("manifest.json");
    write_json(&job.out.join("manifest.json"), &manifest)?;
    Ok(code)
}

pub(super) fn dispatch(job: &Job) -> Result<u8> {
    match job.verb {
        "integrate" => cmd_integrate(job),
        "invariants" => cmd_invariants(job),
        "fixed-point" => cmd_fixed_point(job),
        "rank2" => cmd_rank2(job),
        "ribbon" => cmd_ribbon(job),
        "classify" => cmd_classify(job),
        other => Err(Error::Input(format!("unknown command {other}"))),
    }
}

fn required<'a>(job: &'a Job) -> Result<&'a Path> {
    job.input
        .ok_or_else(|| Error::Input("--input is required".into()))
}

fn is_csv(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reinterprets a state under another flow form where the data allows it.
pub(crate) fn retag(s: NahmState, form: Option<FlowForm>) -> Result<NahmState> {
    use FlowForm::*;
    let Some(target) = form else { return Ok(s) };
    let c = s.coeffs();
    let coeffs = match (s.form(), target) {
        (a, b) if a == b => return Ok(s),
        (Symmetric, Asymmetric) | (Asymmetric, Symmetric) => c.to_vec(),
        (Symmetric | Asymmetric, TForm) => {
            let (t1, t2, t3) = from_phi(&c[0], &c[1], &c[2])?;
            vec![t1, t2, t3]
        }
        (TForm, Symmetric | Asymmetric) => {
            let (p0, p1, p2) = to_phi(&c[0], &c[1], &c[2])?;
            vec![p0, p1, p2]
        }
        (from, to) => {
            return Err(Error::Input(format!(
                "--form: cannot reinterpret {from} data as {to}"
            )))
        }
    };
    NahmState::new(s.t(), target, coeffs, None)
}

fn load_state(job: &Job) -> Result<(InputDocument, NahmState)> {
    let doc = InputDocument::read(required(job)?)?;
    let s = retag(doc.state()?, job.args.form)?;
    Ok((doc, s))
}

fn t_end(job: &Job) -> Result<f64> {
    job.args
        .t_end
        .ok_or_else(|| Error::Input("--t-end is required".into()))
}

fn write_table(job: &Job, traj: &Trajectory) -> Result<()> {
    let mut buf = Vec::new();
    write_trajectory(&mut buf, traj)?;
    write_atomic(&job.out.join("traj.csv"), &buf)
}

/// Integrates, turning a blow-up into the truncated trajectory `[s0, last]`.
fn run_flow(s0: &NahmState, t_end: f64, dt: f64) -> Result<(Trajectory, Option<f64>)> {
    match integrate(s0, t_end, dt) {
        Ok(traj) => Ok((traj, None)),
        Err(Error::BlowUp { t, last }) => {
            let mut samples = vec![s0.clone()];
            if last.t() > s0.t() {
                samples.push(*last);
            }
            Ok((Trajectory::from_samples(samples, dt)?, Some(t)))
        }
        Err(e) => Err(e),
    }
}

fn cmd_integrate(job: &Job) -> Result<u8> {
    let (_, s0) = load_state(job)?;
    let (traj, blow_up) = run_flow(&s0, t_end(job)?, job.args.dt)?;
    write_table(job, &traj)?;
    let mut m = Manifest::new(job);
    m.form = Some(s0.form());
    m.outputs = vec!["traj.csv"];
    m.samples = Some(traj.len());
    m.error_estimate = Some(traj.error_estimate());
    m.blow_up = blow_up.is_some();
    m.blow_up_t = blow_up;
    let code = if blow_up.is_some() {
        EXIT_BLOW_UP
    } else {
        EXIT_OK
    };
    finish::<()>(job, m, None, code)
}

#[derive(Debug, Serialize)]
struct EulerDrift {
    /// `max_t |(x1² - x2²)(t) - (x1² - x2²)(0)|`
    x1_x2: f64,
    /// `max_t |(x2² - x3²)(t) - (x2² - x3²)(0)|`
    x2_x3: f64,
}

#[derive(Debug, Serialize)]
struct InvariantsReport {
    drift: DriftReport,
    max_drift: f64,
    tol: f64,
    within: bool,
    euler: Option<EulerDrift>,
}

/// `x` when the T-form state is `T_i = x_i E_i` in the `so(3)` basis.
fn euler_coordinates(s: &NahmState) -> Option<[Complex; 3]> {
    if s.form() != FlowForm::TForm || s.n() != 3 {
        return None;
    }
    let spots = [(2, 1), (0, 2), (1, 0)];
    let mut x = [Complex::new(0.0, 0.0); 3];
    for (k, &(i, j)) in spots.iter().enumerate() {
        let m = &s.coeffs()[k];
        x[k] = m[(i, j)];
        let mut e = Matrix::zeros(3);
        e[(i, j)] = x[k];
        e[(j, i)] = -x[k];
        if (m - &e).max_norm() > 1e-12 * (1.0 + x[k].norm()) {
            return None;
        }
    }
    Some(x)
}

fn euler_drift(traj: &Trajectory) -> Option<EulerDrift> {
    let xs: Vec<[Complex; 3]> = traj
        .samples()
        .iter()
        .map(euler_coordinates)
        .collect::<Option<_>>()?;
    let diff = |x: &[Complex; 3], a: usize, b: usize| x[a] * x[a] - x[b] * x[b];
    let drift = |a: usize, b: usize| {
        let d0 = diff(&xs[0], a, b);
        xs.iter()
            .map(|x| (diff(x, a, b) - d0).norm())
            .fold(0.0, f64::max)
    };
    Some(EulerDrift {
        x1_x2: drift(0, 1),
        x2_x3: drift(1, 2),
    })
}

fn load_trajectory(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)?;
    read_trajectory(&text, &path.display().to_string())
}

fn cmd_invariants(job: &Job) -> Result<u8> {
    let path = required(job)?;
    if !is_csv(path) {
        return Err(Error::Input(format!(
            "{}: invariants reads a traj.csv table",
            path.display()
        )));
    }
    let traj = load_trajectory(path)?;
    let drift = conservation_drift(&traj)?;
    let euler = euler_drift(&traj);
    let tol = job.args.tol;
    let within = drift.within(tol)
        && euler
            .as_ref()
            .map_or(true, |e| e.x1_x2 < tol && e.x2_x3 < tol);
    let report = InvariantsReport {
        max_drift: drift.max(),
        drift,
        tol,
        within,
        euler,
    };
    let mut m = Manifest::new(job);
    m.samples = Some(traj.len());
    m.form = Some(traj.form());
    finish(
        job,
        m,
        Some(&report),
        if within { EXIT_OK } else { EXIT_DRIFT },
    )
}

/// Parses `1`, `-0.5`, `2i`, `-i`, `1+2i`, `0.5-1.5e-3i`.
pub(crate) fn parse_complex(s: &str) -> Result<Complex> {
    let bad = || Error::Input(format!("cannot read '{s}' as a complex number"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|x| Complex::new(x, 0.0))
            .map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex::new(re, im))
}

pub(crate) fn branch_matrix(name: &str) -> Result<Matrix> {
    match name {
        "node" => Ok(Matrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])),
        "cusp" => Ok(Matrix::from_real(2, &[0.0, 2.0, 1.0, 0.0])),
        "two-lines" | "two_lines" => Ok(Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])),
        other => Err(Error::Input(format!(
            "--family: unknown branch '{other}' (node, cusp, two-lines)"
        ))),
    }
}

/// `(a, φ1)` from `--family`, falling back to the input's metadata.
fn family_params(job: &Job, doc: Option<&InputDocument>) -> Result<Option<(Complex, Matrix)>> {
    if let Some(spec) = &job.args.family {
        let (a, branch) = match spec.rsplit_once(',') {
            Some((a, b))
                if b.chars()
                    .any(|c| c.is_ascii_alphabetic() && c != 'i' && c != 'e') =>
            {
                (a, Some(b))
            }
            _ => (spec.as_str(), None),
        };
        let a = parse_complex(a)?;
        let phi1 = match (branch, doc.and_then(|d| d.metadata.family.as_ref())) {
            (Some(b), _) => branch_matrix(b.trim())?,
            (None, Some(_)) => doc.expect("checked above").family()?.expect("present").1,
            (None, None) => {
                return Err(Error::Input(
                    "--family needs a branch (A,node|cusp|two-lines) or metadata.family.phi1"
                        .into(),
                ))
            }
        };
        return Ok(Some((a, phi1)));
    }
    match doc {
        Some(d) => d.family(),
        None => Ok(None),
    }
}

#[derive(Debug, Serialize)]
struct SupportSample {
    z: Complex,
    x: Complex,
    y: Complex,
    w: Complex,
    mult: usize,
    generalized: bool,
    /// Largest normalized `|det(u(x - φ_+) + v(y - φ_-))|` over the seeded `(u, v)`.
    determinant_check: f64,
}

#[derive(Debug, Serialize)]
struct FixedPointReport {
    psi: Vec<Pair>,
    residual: f64,
    exact: bool,
    commutation_defect: f64,
    family: Option<FamilySummary>,
    support: Vec<SupportSample>,
}

#[derive(Debug, Serialize)]
struct FamilySummary {
    a: Complex,
    phi1: Vec<Pair>,
    classification: ImageClass,
    collision_fibre: Option<Complex>,
}

fn random_pairs(seed: u64, count: usize) -> Vec<(Complex, Complex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    (0..count).map(|_| (draw(), draw())).collect()
}

fn cmd_fixed_point(job: &Job) -> Result<u8> {
    let doc = job.input.map(InputDocument::read).transpose()?;
    let fam = family_params(job, doc.as_ref())?;
    let phi: MatrixPoly = match (&doc, &fam) {
        (Some(d), _) => retag(d.state()?, job.args.form)?.higgs_field(),
        (None, Some((a, phi1))) => rank2_family(*a, phi1)?.phi,
        (None, None) => return Err(Error::Input("--input or --family is required".into())),
    };
    let witness = solve_psi(&phi, job.args.tau_fix)?;
    let (plus, minus) = phi_pm(&phi, &witness.psi)?;
    let defect = commutation_defect(&plus, &minus)?;
    let uv = random_pairs(job.args.seed, 5);
    let mut support = Vec::new();
    if defect < COMMUTE_TOL {
        for z in sample_points() {
            for sp in support_points(&plus, &minus, z)? {
                let p = sp.point;
                support.push(SupportSample {
                    z: p.z,
                    x: p.x,
                    y: p.y,
                    w: p.w,
                    mult: sp.mult,
                    generalized: sp.generalized,
                    determinant_check: support_check(&plus, &minus, &p, &uv),
                });
            }
        }
    }
    let family = match fam {
        Some((a, phi1)) => Some(FamilySummary {
            a,
            phi1: matrix_to_pairs(&phi1),
            classification: classify_image(a, &phi1, job.args.tol)?,
            collision_fibre: collision_fibre(a),
        }),
        None => None,
    };
    let report = FixedPointReport {
        psi: matrix_to_pairs(&witness.psi),
        residual: witness.residual,
        exact: witness.exact,
        commutation_defect: defect,
        family,
        support,
    };
    finish(job, Manifest::new(job), Some(&report), EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Rank2Report {
    q: Vec<Complex>,
    nilpotent: bool,
    singular_points: Vec<Complex>,
    /// Absent when `q` vanishes identically.
    singular_at_infinity: Option<bool>,
    marked_point: Option<MarkedPoint>,
    flow: Option<FlowSummary>,
}

#[derive(Debug, Serialize)]
struct MarkedPoint {
    z0: Complex,
    w0: Complex,
    curve_defect: f64,
    vector_field_zero: bool,
}

#[derive(Debug, Serialize)]
struct FlowSummary {
    #[serde(flatten)]
    check: ModuliFlowReport,
    predicted_time_factor: f64,
    tol: f64,
    within: bool,
    blow_up_t: Option<f64>,
}

fn cmd_rank2(job: &Job) -> Result<u8> {
    let (_, s0) = load_state(job)?;
    if s0.n() != 2 {
        return Err(Error::Input(format!("rank2 needs n = 2, found {}", s0.n())));
    }
    let phi = s0.higgs_field();
    let q = rank2_q(&phi)?;
    let (nilpotent, singular_points) = match singular_points_rank2(&q) {
        Ok(p) => (false, p),
        Err(Error::NilpotentCase) => (true, Vec::new()),
        Err(e) => return Err(e),
    };
    let marked_point = if s0.form() == FlowForm::Parabolic {
        let p = moduli_coords(&phi)?;
        Some(MarkedPoint {
            z0: p.z0,
            w0: p.w0,
            curve_defect: p.curve_defect(),
            vector_field_zero: vector_field_zero(&p, TAU_ZERO),
        })
    } else {
        None
    };
    let mut m = Manifest::new(job);
    let mut code = EXIT_OK;
    let flow = match job.args.t_end {
        Some(t_end) if s0.form() == FlowForm::Parabolic => {
            let (traj, blow_up) = run_flow(&s0, t_end, job.args.dt)?;
            write_table(job, &traj)?;
            m.outputs.push("traj.csv");
            m.samples = Some(traj.len());
            m.blow_up = blow_up.is_some();
            m.blow_up_t = blow_up;
            if blow_up.is_some() {
                code = EXIT_BLOW_UP;
                None
            } else {
                let check = moduli_flow_check(&traj)?;
                let within = check.within(job.args.law_tol);
                if !within {
                    code = EXIT_DRIFT;
                }
                Some(FlowSummary {
                    check,
                    predicted_time_factor: TIME_FACTOR,
                    tol: job.args.law_tol,
                    within,
                    blow_up_t: None,
                })
            }
        }
        Some(_) => {
            return Err(Error::Input(
                "--t-end with rank2 needs a parabolic input".into(),
            ))
        }
        None => None,
    };
    let report = Rank2Report {
        q: q.coeffs().to_vec(),
        nilpotent,
        singular_points,
        singular_at_infinity: if nilpotent {
            None
        } else {
            Some(singular_at_infinity(&q)?)
        },
        marked_point,
        flow,
    };
    finish(job, m, Some(&report), code)
}

#[derive(Debug, Serialize)]
struct RibbonReport {
    m: usize,
    /// `p_1 … p_m`, each lowest degree first.
    p: Vec<Vec<Complex>>,
    square_residual: f64,
    case: SheafCase,
    divisor: Vec<DivisorPoint>,
    divisor_degree: usize,
    degree_check: Option<DegreeCheck>,
    kernel_line_degree: Option<usize>,
    conservation: Option<DivisorConservation>,
    multiplicity: Option<MultiplicityProfile>,
}

fn cmd_ribbon(job: &Job) -> Result<u8> {
    let path = required(job)?;
    let (traj, d_meta) = if is_csv(path) {
        (Some(load_trajectory(path)?), None)
    } else {
        let (doc, s0) = load_state(job)?;
        let traj = match job.args.t_end {
            Some(t_end) => {
                let (traj, blow_up) = run_flow(&s0, t_end, job.args.dt)?;
                if let Some(t) = blow_up {
                    return Err(Error::BlowUp {
                        t,
                        last: Box::new(traj.last().clone()),
                    });
                }
                traj
            }
            None => Trajectory::from_samples(vec![s0], job.args.dt)?,
        };
        (Some(traj), doc.metadata.d)
    };
    let traj = traj.expect("set on both paths");
    let phi = traj.first().higgs_field();
    if phi.n() % 2 != 0 {
        return Err(Error::OddRank(phi.n()));
    }
    let p = extract_square_root(&spectral_data(&phi)?)?;
    let case = case_split(&phi, &p)?;
    let divisor = match case {
        SheafCase::GeneralizedLineBundle => divisor_d(&phi, &p, job.args.grid, job.args.tau_rank)?,
        SheafCase::BundleOnS => Vec::new(),
    };
    let d = job.args.d.or(d_meta);
    let degree_check = d.map(|d| degree_consistency(&divisor, p.m(), d));
    let kernel = if phi.n() == 2 && is_nilpotent_field(&phi)? {
        kernel_line_degree(&phi).ok()
    } else {
        None
    };
    let mut code = EXIT_OK;
    let (conservation, multiplicity) = if traj.len() > 1 {
        let cons = match case {
            SheafCase::GeneralizedLineBundle => Some(divisor_conservation(
                &traj,
                job.args.grid,
                job.args.tau_rank,
                DEFAULT_SCAN_STRIDE,
            )?),
            SheafCase::BundleOnS => None,
        };
        let prof = multiplicity_conservation(&traj, 32, job.args.tau_rank)?;
        if !prof.constant() || cons.as_ref().is_some_and(|c| !c.within(job.args.tol)) {
            code = EXIT_DRIFT;
        }
        (cons, Some(prof))
    } else {
        (None, None)
    };
    let report = RibbonReport {
        m: p.m(),
        p: p.coefficients()
            .iter()
            .map(|c| c.coeffs().to_vec())
            .collect(),
        square_residual: p.residual(),
        case,
        divisor_degree: divisor_degree(&divisor),
        divisor,
        degree_check,
        kernel_line_degree: kernel,
        conservation,
        multiplicity,
    };
    let mut m = Manifest::new(job);
    m.samples = Some(traj.len());
    finish(job, m, Some(&report), code)
}

#[derive(Debug, Serialize)]
struct ClassifyReport {
    a: Complex,
    phi1: Vec<Pair>,
    tr_phi0_phi1: Complex,
    tr_phi1_sq: Complex,
    classification: ImageClass,
    q: Vec<Complex>,
    collision_fibre: Option<Complex>,
    /// Support points over the collision fibre.
    fibre_points: Vec<LiftedPoint>,
    /// `t` with `c_action(first, t) = second`, when the two points share `w`.
    orbit_parameter: Option<Complex>,
}

fn cmd_classify(job: &Job) -> Result<u8> {
    let doc = job.input.map(InputDocument::read).transpose()?;
    let (a, phi1) = family_params(job, doc.as_ref())?.ok_or_else(|| {
        Error::Input("classify needs --family or metadata.family in the input".into())
    })?;
    let fam = rank2_family(a, &phi1)?;
    let classification = classify_image(a, &phi1, job.args.tol)?;
    let fibre = collision_fibre(a);
    let mut fibre_points = Vec::new();
    let mut orbit = None;
    if let Some(z) = fibre {
        let (plus, minus) = phi_pm(&fam.phi, &fam.psi)?;
        fibre_points = support_points(&plus, &minus, z)?
            .into_iter()
            .map(|s| s.point)
            .collect();
        if let [p, q] = fibre_points.as_slice() {
            orbit = orbit_parameter(p, q, 1e-9);
            if let Some(t) = orbit {
                debug_assert!((c_action(p, t).w - q.w).norm() < 1e-9 * (1.0 + q.w.norm()));
            }
        }
    }
    let report = ClassifyReport {
        a,
        phi1: matrix_to_pairs(&phi1),
        tr_phi0_phi1: fam.tau01(),
        tr_phi1_sq: fam.tau11(),
        classification,
        q: rank2_q(&fam.phi)?.coeffs().to_vec(),
        collision_fibre: fibre,
        fibre_points,
        orbit_parameter: orbit,
    };
    finish(job, Manifest::new(job), Some(&report), EXIT_OK)
}
