//! Regenerates the JSON inputs next to this file:
//!
//! ```text
//! cargo run --example make_inputs
//! ```

use std::path::Path;

use nahm_core::cli::{FamilyMeta, InputDocument};
use nahm_core::fixed_points::rank2_family;
use nahm_core::moduli::rank2_parabolic;
use nahm_core::ribbon::{block_extension, tensor_extension, BLOCK_EXTENSION_D, TENSOR_EXTENSION_D};
use nahm_core::{Complex, Matrix, MatrixPoly, NahmState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn real(v: &[f64]) -> Vec<Complex> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

fn symmetric(phi: &MatrixPoly) -> NahmState {
    let coeffs: [Matrix; 3] = std::array::from_fn(|k| {
        phi.coeffs()
            .get(k)
            .cloned()
            .unwrap_or(Matrix::zeros(phi.n()))
    });
    NahmState::symmetric(coeffs).unwrap()
}

fn save(dir: &Path, name: &str, s: &NahmState, describe: &str, d: Option<i64>) -> InputDocument {
    let mut doc = InputDocument::from_state(s);
    doc.metadata.description = Some(describe.to_string());
    doc.metadata.d = d;
    write(dir, name, &doc);
    doc
}

fn write(dir: &Path, name: &str, doc: &InputDocument) {
    let text = serde_json::to_string_pretty(doc).unwrap() + "\n";
    std::fs::write(dir.join(name), text).unwrap();
    println!("wrote {name}");
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let e = Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
    let h = Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]);
    let f = Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]);

    // Euler top: T_i = x_i E_i with x = (0.5, 0.8, 1.0).
    let so3 = |x: f64, (i, j): (usize, usize)| {
        let mut m = Matrix::zeros(3);
        m[(i, j)] = c(x, 0.0);
        m[(j, i)] = c(-x, 0.0);
        m
    };
    let euler = NahmState::t_form([so3(0.5, (2, 1)), so3(0.8, (0, 2)), so3(1.0, (1, 0))]).unwrap();
    save(
        &dir,
        "euler.json",
        &euler,
        "Euler top x = (0.5, 0.8, 1.0) in the so(3) basis",
        None,
    );

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut draw = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut coeffs: Vec<Matrix> = (0..3).map(|_| Matrix::from_fn(3, |_, _| draw())).collect();
    let s = coeffs.iter().map(Matrix::max_norm).fold(0.0, f64::max);
    coeffs.iter_mut().for_each(|m| *m = m.scale_re(1.0 / s));
    let sym3 = NahmState::new(0.0, nahm_core::FlowForm::Symmetric, coeffs, None).unwrap();
    save(
        &dir,
        "symmetric3.json",
        &sym3,
        "seeded 3x3 symmetric data, unit max-norm",
        None,
    );

    let zero =
        NahmState::symmetric([Matrix::zeros(2), Matrix::zeros(2), Matrix::zeros(2)]).unwrap();
    save(
        &dir,
        "zero.json",
        &zero,
        "zero data: a constant trajectory",
        None,
    );

    // a(z) e with a = (z - 1)(z + 2) = z² + z - 2.
    let nil = NahmState::symmetric([e.scale_re(-2.0), e.clone(), e.clone()]).unwrap();
    save(
        &dir,
        "nilpotent.json",
        &nil,
        "a(z) e with a = (z - 1)(z + 2)",
        Some(0),
    );

    // N(z) = [[-z, 1], [-z², z]]
    let n = NahmState::symmetric([e.clone(), h.scale_re(-1.0), f.scale_re(-1.0)]).unwrap();
    save(
        &dir,
        "rank_one.json",
        &n,
        "N(z) = [[-z, 1], [-z^2, z]], kernel line O(-1)",
        Some(1),
    );

    // s(z) I with s = 0.5 - z + 2z².
    let id = Matrix::identity(2);
    let scalar =
        NahmState::symmetric([id.scale_re(0.5), id.scale_re(-1.0), id.scale_re(2.0)]).unwrap();
    save(
        &dir,
        "scalar.json",
        &scalar,
        "s(z) I with s = 0.5 - z + 2 z^2",
        None,
    );

    let reduced = NahmState::symmetric([Matrix::zeros(2), h.clone(), Matrix::zeros(2)]).unwrap();
    save(
        &dir,
        "reduced.json",
        &reduced,
        "diag(z, -z): reduced curve w^2 = z^2",
        None,
    );

    save(
        &dir,
        "block_extension.json",
        &symmetric(&block_extension(11)),
        "[[A, Psi], [0, g A g^-1]] with A^2 = q, seed 11",
        Some(BLOCK_EXTENSION_D),
    );
    save(
        &dir,
        "tensor_extension.json",
        &symmetric(&tensor_extension(11)),
        "A (x) I + I (x) X + A (x) h with x12 x21 = -q, seed 11",
        Some(TENSOR_EXTENSION_D),
    );

    let commuting = NahmState::symmetric([
        Matrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]),
        Matrix::diag(&[c(0.5, 0.0), c(2.0, 0.0)]),
        Matrix::diag(&[c(0.0, 1.0), c(3.0, 0.0)]),
    ])
    .unwrap();
    save(
        &dir,
        "commuting.json",
        &commuting,
        "commuting diagonal data: psi = 0",
        None,
    );

    for (name, a, phi1, what) in [
        (
            "family_node.json",
            c(1.0, 0.0),
            Matrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]),
            "node",
        ),
        (
            "family_cusp.json",
            c(1.0, 0.0),
            Matrix::from_real(2, &[0.0, 2.0, 1.0, 0.0]),
            "cusp",
        ),
        ("family_two_lines.json", c(1.0, 0.0), h.clone(), "two lines"),
    ] {
        let fam = rank2_family(a, &phi1).unwrap();
        let mut doc = InputDocument::from_state(&symmetric(&fam.phi));
        doc.metadata.description = Some(format!("rank-2 fixed-point family, a = 1, {what} branch"));
        doc.metadata.family = Some(FamilyMeta {
            a: [a.re, a.im],
            phi1: phi1.entries().iter().map(|z| [z.re, z.im]).collect(),
        });
        write(&dir, name, &doc);
    }

    let parabolic = rank2_parabolic(
        &[c(0.3, 0.1), c(-0.2, 0.4), c(0.1, -0.3)],
        &[c(0.5, 0.0), c(0.2, -0.1), c(-0.3, 0.2), c(1.0, 0.0)],
        &[c(0.4, -0.2), c(0.9, 0.3)],
    )
    .unwrap();
    save(
        &dir,
        "parabolic.json",
        &parabolic,
        "rank-2 parabolic data with phi3 = e",
        None,
    );

    let stationary = rank2_parabolic(
        &real(&[-1.0, 1.0]),
        &real(&[0.0, 0.0, -1.0, 1.0]),
        &real(&[-1.0, 1.0]),
    )
    .unwrap();
    save(
        &dir,
        "stationary.json",
        &stationary,
        "a = z - 1, b = z^3 - z^2, c = z - 1: marked point at the double root of q",
        None,
    );

    // a = 0, b = 0, c = z - 1: q vanishes identically.
    let nil_par = rank2_parabolic(&[], &[], &real(&[-1.0, 1.0])).unwrap();
    save(
        &dir,
        "parabolic_nilpotent.json",
        &nil_par,
        "a = 0, b = 0, c = z - 1: q = 0",
        None,
    );

    // a = i, b = z^3, c = z: q = a^2 + bc = z^4 - 1, marked point (0, i).
    let quartic = rank2_parabolic(
        &[c(0.0, 1.0)],
        &real(&[0.0, 0.0, 0.0, 1.0]),
        &real(&[0.0, 1.0]),
    )
    .unwrap();
    save(
        &dir,
        "smooth_quartic.json",
        &quartic,
        "a = i, b = z^3, c = z: smooth q = z^4 - 1",
        None,
    );
}
