//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are never captured.

use std::path::Path;
use std::process::ExitCode;

use nahm_core::algebra::char_poly;
use nahm_core::cli::InputDocument;
use nahm_core::dynamics::{from_phi, integrate, rhs_symmetric, rhs_t_form, to_phi};
use nahm_core::fixed_points::{
    c_action, classify_image, collision_fibre, commutation_defect, fixed_residual_phi,
    orbit_parameter, phi_pm, rank2_family, sample_points, support_check, support_points,
    ImageClass,
};
use nahm_core::moduli::{moduli_coords, moduli_flow_check, vector_field_zero, TAU_ZERO};
use nahm_core::ribbon::{
    block_extension, degree_consistency, divisor_conservation, divisor_d, extract_square_root,
    multiplicity_conservation, tensor_extension, BLOCK_EXTENSION_D, DEFAULT_GRID,
    DEFAULT_SCAN_STRIDE, TENSOR_EXTENSION_D,
};
use nahm_core::spectral::{conservation_drift, spectral_data};
use nahm_core::{Complex, FlowForm, Matrix, MatrixPoly, NahmState, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances, pinned.
const ISO_DRIFT: f64 = 1e-8;
const ISO_HALVING: f64 = 8.0;
/// Below this the coarse drift is roundoff and halving `dt` says nothing.
const ISO_TRUNCATION_FLOOR: f64 = 1e-11;
const ISO_SEED: u64 = 24;
const FORM_TOL: f64 = 1e-12;
const EULER_DRIFT: f64 = 1e-10;
const FAMILY_RESIDUAL: f64 = 1e-12;
const FAMILY_PM: f64 = 1e-12;
const FAMILY_COMMUTE: f64 = 1e-10;
const FAMILY_TRACE: f64 = 1e-10;
const CLASSIFY_TOL: f64 = 1e-9;
const COLLISION_TOL: f64 = 1e-10;
const LAW_TOL: f64 = 1e-5;
const CURVE_DRIFT: f64 = 1e-8;
const TAU_RANK: f64 = 1e-8;
const DIVISOR_DRIFT: f64 = 1e-6;
const SUPPORT_DET: f64 = 1e-8;

type Outcome = Result<(bool, String), String>;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn rng_complex(rng: &mut ChaCha8Rng) -> Complex {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn example(name: &str) -> Result<InputDocument, String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name);
    InputDocument::read(&path).map_err(|e| format!("{name}: {e}"))
}

fn state(name: &str) -> Result<NahmState, String> {
    example(name)?.state().map_err(|e| e.to_string())
}

fn symmetric(phi: &MatrixPoly) -> Result<NahmState, String> {
    let coeffs: [Matrix; 3] = std::array::from_fn(|k| phi.coeffs()[k].clone());
    NahmState::symmetric(coeffs).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn isospectrality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ISO_SEED);
    let mut coeffs: Vec<Matrix> = (0..3)
        .map(|_| Matrix::from_fn(3, |_, _| rng_complex(&mut rng)))
        .collect();
    let s = coeffs.iter().map(Matrix::max_norm).fold(0.0, f64::max);
    coeffs.iter_mut().for_each(|m| *m = m.scale_re(1.0 / s));
    let s0 = NahmState::new(0.0, FlowForm::Symmetric, coeffs, None).map_err(err)?;
    let coarse = integrate(&s0, 1.0, 1e-3).map_err(err)?;
    let fine = integrate(&s0, 1.0, 5e-4).map_err(err)?;
    let d1 = conservation_drift(&coarse).map_err(err)?.max();
    let d2 = conservation_drift(&fine).map_err(err)?.max();
    // Independent of the spectral module: det(w - φ(z)) at a few z, first
    // against last sample.
    let phi_first = coarse.first().higgs_field();
    let phi_last = coarse.last().higgs_field();
    let direct = sample_points()
        .into_iter()
        .map(|z| (&char_poly(&phi_first.eval(z)) - &char_poly(&phi_last.eval(z))).max_norm())
        .fold(0.0, f64::max);
    let ratio = d1 / d2;
    let ok =
        d1 < ISO_DRIFT && direct < ISO_DRIFT && d1 > ISO_TRUNCATION_FLOOR && ratio >= ISO_HALVING;
    Ok((
        ok,
        format!("seed {ISO_SEED}: drift {d1:.2e} (det check {direct:.2e}), dt/2 drift {d2:.2e}, ratio {ratio:.1}"),
    ))
}

fn form_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let t: [Matrix; 3] =
            std::array::from_fn(|_| Matrix::from_fn(n, |_, _| rng_complex(&mut rng)));
        let (p0, p1, p2) = to_phi(&t[0], &t[1], &t[2]).map_err(err)?;
        let [d0, d1, d2] =
            rhs_symmetric(&NahmState::symmetric([p0, p1, p2]).map_err(err)?).map_err(err)?;
        let (e1, e2, e3) = from_phi(&d0, &d1, &d2).map_err(err)?;
        let direct = rhs_t_form(&NahmState::t_form(t).map_err(err)?).map_err(err)?;
        for (a, b) in [e1, e2, e3].iter().zip(direct.iter()) {
            worst = worst.max((a - b).max_norm());
        }
    }
    Ok((
        worst < FORM_TOL,
        format!("100 T-triples, max entry difference {worst:.2e}"),
    ))
}

fn euler() -> Outcome {
    let s0 = state("euler.json")?;
    let traj = integrate(&s0, 0.2, 1e-3).map_err(err)?;
    // T1 = x1 E1 sits at (2, 1), T2 = x2 E2 at (0, 2), T3 = x3 E3 at (1, 0).
    let x = |s: &NahmState| {
        let t = s.coeffs();
        [t[0][(2, 1)].re, t[1][(0, 2)].re, t[2][(1, 0)].re]
    };
    let x0 = x(traj.first());
    let (i12, i23) = (x0[0] * x0[0] - x0[1] * x0[1], x0[1] * x0[1] - x0[2] * x0[2]);
    let mut worst: f64 = 0.0;
    for s in traj.samples() {
        let xs = x(s);
        worst = worst
            .max((xs[0] * xs[0] - xs[1] * xs[1] - i12).abs())
            .max((xs[1] * xs[1] - xs[2] * xs[2] - i23).abs());
    }
    Ok((
        worst < EULER_DRIFT,
        format!("x = {x0:?}, max drift {worst:.2e}"),
    ))
}

fn family() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut res, mut pm, mut comm, mut tr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let a = rng_complex(&mut rng);
        let phi1 = Matrix::from_fn(2, |_, _| rng_complex(&mut rng));
        let fam = rank2_family(a, &phi1).map_err(err)?;
        res = res.max(fixed_residual_phi(&fam.psi, &fam.phi).map_err(err)?);
        let (plus, minus) = phi_pm(&fam.phi, &fam.psi).map_err(err)?;
        for k in 0..2 {
            pm = pm.max((&plus.coeffs()[k] - &minus.coeffs()[k].scale(a)).max_norm());
        }
        comm = comm.max(commutation_defect(&plus, &minus).map_err(err)?);
        let phi0 = &fam.phi.coeffs()[0];
        let t01 = (phi0 * &phi1).trace();
        let t11 = (&phi1 * &phi1).trace();
        for z in sample_points() {
            let m = minus.eval(z);
            let formula = z * (c(1.0, 0.0) - a * z) * t01 * 2.0 + z * z * t11;
            tr = tr.max(((&m * &m).trace() - formula).norm());
        }
    }
    let ok = res < FAMILY_RESIDUAL && pm < FAMILY_PM && comm < FAMILY_COMMUTE && tr < FAMILY_TRACE;
    Ok((
        ok,
        format!("100 draws: residual {res:.1e}, φ+ - aφ- {pm:.1e}, commutator {comm:.1e}, tr φ-² {tr:.1e}"),
    ))
}

fn classification() -> Outcome {
    let mut seen = Vec::new();
    for (name, want) in [
        ("family_node.json", ImageClass::Node),
        ("family_cusp.json", ImageClass::Cusp),
        ("family_two_lines.json", ImageClass::TwoLines),
    ] {
        let (a, phi1) = example(name)?
            .family()
            .map_err(err)?
            .ok_or(format!("{name}: no family"))?;
        let got = classify_image(a, &phi1, CLASSIFY_TOL).map_err(err)?;
        if got != want {
            return Ok((false, format!("{name}: {got:?}, expected {want:?}")));
        }
        seen.push(format!("{got:?}"));
    }
    let (a, phi1) = example("family_node.json")?
        .family()
        .map_err(err)?
        .ok_or("no family")?;
    let z = collision_fibre(a).ok_or("a = 0")?;
    // For the shipped a = 1 the fibres z = -1/a and z = -a coincide.
    if (z + a).norm() > COLLISION_TOL {
        return Ok((false, format!("collision fibre {z} differs from -a")));
    }
    let fam = rank2_family(a, &phi1).map_err(err)?;
    let (plus, minus) = phi_pm(&fam.phi, &fam.psi).map_err(err)?;
    let pts = support_points(&plus, &minus, z).map_err(err)?;
    if pts.len() != 2 {
        return Ok((false, format!("{} support points over z = {z}", pts.len())));
    }
    let (p, q) = (pts[0].point, pts[1].point);
    let w = p.w.norm().max(q.w.norm());
    let t = orbit_parameter(&p, &q, COLLISION_TOL).ok_or("points are not on one orbit")?;
    let moved = c_action(&p, t);
    let gap = (moved.x - q.x).norm().max((moved.y - q.y).norm());
    let ok = w < COLLISION_TOL && gap < COLLISION_TOL && (p.x - q.x).norm() > 1e-3;
    Ok((
        ok,
        format!(
            "{} hit; node: 2 points over z = {z}, |w| {w:.1e}, orbit t = {t}, gap {gap:.1e}",
            seen.join("/")
        ),
    ))
}

fn moduli() -> Outcome {
    let s0 = state("parabolic.json")?;
    if s0.coeffs()[3] != Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]) {
        return Ok((false, "φ3 is not e".into()));
    }
    let traj = integrate(&s0, 0.5, 1e-3).map_err(err)?;
    let r = moduli_flow_check(&traj).map_err(err)?;
    let laws = r.z0_law.max(r.w0_law).max(r.c0_law).max(r.c1_law);
    let ok = laws < LAW_TOL && r.curve_defect < CURVE_DRIFT;
    Ok((
        ok,
        format!(
            "ż0 {:.1e}, ẇ0 {:.1e}, ċ0 {:.1e}, ċ1 {:.1e}, w0² - q(z0) drift {:.1e}",
            r.z0_law, r.w0_law, r.c0_law, r.c1_law, r.curve_defect
        ),
    ))
}

fn vector_field_zeros() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, want) in [
        ("stationary.json", true),
        ("parabolic_nilpotent.json", true),
        ("smooth_quartic.json", false),
    ] {
        let phi = state(name)?.higgs_field();
        let p = moduli_coords(&phi).map_err(err)?;
        // Oracle for q: a² + bc read straight off the entries.
        let entry =
            |i: usize, j: usize| Poly::new(phi.coeffs().iter().map(|m| m[(i, j)]).collect());
        let (a, b, cc) = (entry(0, 0), entry(0, 1), entry(1, 0));
        let q = &(&a * &a) + &(&b * &cc);
        let shape = match name {
            "stationary.json" => {
                q.eval(p.z0).norm() < 1e-12
                    && q.derivative().eval(p.z0).norm() < 1e-12
                    && p.w0.norm() < 1e-12
            }
            "parabolic_nilpotent.json" => q.max_norm() < 1e-12,
            _ => (&q - &Poly::from_real(&[-1.0, 0.0, 0.0, 0.0, 1.0])).max_norm() < 1e-12,
        };
        let got = vector_field_zero(&p, TAU_ZERO);
        ok &= shape && got == want;
        parts.push(format!("{name} {got}"));
    }
    Ok((ok, parts.join(", ")))
}

fn ribbon_divisor() -> Outcome {
    let divisor = |phi: &MatrixPoly| -> Result<_, String> {
        let p = extract_square_root(&spectral_data(phi).map_err(err)?).map_err(err)?;
        let d = divisor_d(phi, &p, DEFAULT_GRID, TAU_RANK).map_err(err)?;
        Ok((p.m(), d))
    };
    let nil = state("nilpotent.json")?.higgs_field();
    let (m, d) = divisor(&nil)?;
    let nil_ok = d.len() == 2
        && (d[0].z - c(-2.0, 0.0)).norm() < 1e-8
        && (d[1].z - c(1.0, 0.0)).norm() < 1e-8
        && d.iter().all(|p| p.lambda.norm() < 1e-8)
        && degree_consistency(&d, m, 0).consistent
        && degree_consistency(&d, m, 0).total == 2;
    let one = state("rank_one.json")?.higgs_field();
    let (m1, d1) = divisor(&one)?;
    let one_ok = d1.is_empty() && degree_consistency(&d1, m1, 1).consistent;
    let (mb, db) = divisor(&block_extension(11))?;
    let block = degree_consistency(&db, mb, BLOCK_EXTENSION_D);
    let (mt, dt) = divisor(&tensor_extension(11))?;
    let tensor = degree_consistency(&dt, mt, TENSOR_EXTENSION_D);
    let zs: Vec<String> = d
        .iter()
        .map(|p| format!("({:.3}, {:.1e})", p.z.re, p.lambda.norm()))
        .collect();
    Ok((
        nil_ok && one_ok && block.consistent && tensor.consistent,
        format!(
            "nilpotent D = {{{}}}; rank one |D| = {}; 4x4 block {} = {} (d = {BLOCK_EXTENSION_D}); 4x4 tensor {} = {} (d = {TENSOR_EXTENSION_D})",
            zs.join(", "),
            d1.len(),
            block.total,
            block.expected,
            tensor.total,
            tensor.expected
        ),
    ))
}

fn divisor_conserved() -> Outcome {
    let traj = integrate(&symmetric(&block_extension(11))?, 0.5, 1e-3).map_err(err)?;
    let rep =
        divisor_conservation(&traj, DEFAULT_GRID, TAU_RANK, DEFAULT_SCAN_STRIDE).map_err(err)?;
    let prof = multiplicity_conservation(&traj, 32, TAU_RANK).map_err(err)?;
    let ok = rep.count_constant()
        && rep.max_drift < DIVISOR_DRIFT
        && prof.constant()
        && prof.nodes == 32;
    Ok((
        ok,
        format!(
            "{} points, count changes {}, drift {:.1e}; {} multiplicity checks on radius {}, {} changes",
            rep.initial.len(),
            rep.count_changes.len(),
            rep.max_drift,
            prof.checks,
            prof.radius,
            prof.changes.len()
        ),
    ))
}

fn c_action_and_support() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // Dyadic inputs: x z + y is exact before and after the translation.
    let mut bitwise = true;
    for _ in 0..1000 {
        let mut d = || {
            c(
                rng.gen_range(-256..256) as f64 / 16.0,
                rng.gen_range(-256..256) as f64 / 16.0,
            )
        };
        let p = nahm_core::fixed_points::LiftedPoint::new(d(), d(), d());
        let q = c_action(&p, d());
        bitwise &= q.w.re.to_bits() == p.w.re.to_bits() && q.w.im.to_bits() == p.w.im.to_bits();
    }
    let (a, phi1) = example("family_node.json")?
        .family()
        .map_err(err)?
        .ok_or("no family")?;
    let fam = rank2_family(a, &phi1).map_err(err)?;
    let (plus, minus) = phi_pm(&fam.phi, &fam.psi).map_err(err)?;
    let uv: Vec<(Complex, Complex)> = (0..5)
        .map(|_| (rng_complex(&mut rng), rng_complex(&mut rng)))
        .collect();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for z in sample_points() {
        for sp in support_points(&plus, &minus, z).map_err(err)? {
            worst = worst.max(support_check(&plus, &minus, &sp.point, &uv));
            count += 1;
        }
    }
    Ok((
        bitwise && worst < SUPPORT_DET,
        format!("w bitwise invariant: {bitwise}; {count} support points, max |det| {worst:.1e}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("isospectrality", isospectrality),
        ("form equivalence", form_equivalence),
        ("Euler conservation", euler),
        ("fixed-point family", family),
        ("singularity classification", classification),
        ("rank-2 moduli", moduli),
        ("vector-field zeros", vector_field_zeros),
        ("ribbon divisor", ribbon_divisor),
        ("divisor conservation", divisor_conserved),
        ("C-action", c_action_and_support),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!(
            "{} {:>2} {name}: {detail}",
            if ok { "PASS" } else { "FAIL" },
            k + 1
        );
        failed += usize::from(!ok);
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
