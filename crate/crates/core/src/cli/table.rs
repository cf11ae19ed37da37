//! Trajectory tables: one row per sample, `t` followed by the real and
//! imaginary part of every coefficient entry. A leading `#` line records
//! the form, size and block split so a table can be read back on its own.

use std::io::Write;

use crate::algebra::{Complex, Matrix};
use crate::dynamics::{FlowForm, NahmState, Trajectory};
use crate::error::{Error, Result};

fn header(form: FlowForm, n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for k in 0..form.coefficient_count() {
        for i in 0..n {
            for j in 0..n {
                cols.push(format!("m{k}_{i}_{j}_re"));
                cols.push(format!("m{k}_{i}_{j}_im"));
            }
        }
    }
    cols
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let first = traj.first();
    let mut out = out;
    let split = first
        .block_split()
        .map_or("none".to_string(), |k| k.to_string());
    writeln!(
        out,
        "# form={} n={} block_split={} step={}",
        first.form().tag(),
        first.n(),
        split,
        num(traj.step())
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(first.form(), first.n()))
        .map_err(csv_err)?;
    for s in traj.samples() {
        let mut row = Vec::with_capacity(1 + 2 * s.coeffs().len() * s.n() * s.n());
        row.push(num(s.t()));
        for m in s.coeffs() {
            for z in m.entries() {
                row.push(num(z.re));
                row.push(num(z.im));
            }
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(format!("csv: {e}"))
}

struct Preamble {
    form: FlowForm,
    n: usize,
    block_split: Option<usize>,
    step: f64,
}

fn preamble(line: &str, origin: &str) -> Result<Preamble> {
    let bad = |what: &str| Error::Input(format!("{origin}:1: {what}"));
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| bad("missing '# form=… n=…' line"))?;
    let (mut form, mut n, mut split, mut step) = (None, None, None, f64::NAN);
    for kv in body.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| bad(&format!("malformed field '{kv}'")))?;
        match k {
            "form" => form = Some(v.parse::<FlowForm>()?),
            "n" => n = Some(v.parse::<usize>().map_err(|_| bad("n is not an integer"))?),
            "block_split" => {
                split = match v {
                    "none" => None,
                    s => Some(
                        s.parse::<usize>()
                            .map_err(|_| bad("block_split is not an integer"))?,
                    ),
                }
            }
            "step" => step = v.parse::<f64>().map_err(|_| bad("step is not a number"))?,
            _ => return Err(bad(&format!("unknown field '{k}'"))),
        }
    }
    Ok(Preamble {
        form: form.ok_or_else(|| bad("form missing"))?,
        n: n.ok_or_else(|| bad("n missing"))?,
        block_split: split,
        step,
    })
}

pub fn read_trajectory(text: &str, origin: &str) -> Result<Trajectory> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let pre = preamble(first.trim_end(), origin)?;
    let expected = header(pre.form, pre.n);
    let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let found: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if found != expected {
        return Err(Error::Input(format!(
            "{origin}:2: header does not match form {} with n = {}",
            pre.form, pre.n
        )));
    }
    let mut samples = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 3;
        let rec = rec.map_err(|e| Error::Input(format!("{origin}:{line}: {e}")))?;
        let vals = rec
            .iter()
            .enumerate()
            .map(|(c, s)| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::Input(format!(
                        "{origin}:{line}: column {} ('{s}') is not a number",
                        expected[c]
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let nn = pre.n * pre.n;
        let coeffs = (0..pre.form.coefficient_count())
            .map(|k| {
                let base = 1 + 2 * k * nn;
                let entries = (0..nn)
                    .map(|e| Complex::new(vals[base + 2 * e], vals[base + 2 * e + 1]))
                    .collect();
                Matrix::from_entries(pre.n, entries)
            })
            .collect::<Result<Vec<_>>>()?;
        let s = NahmState::new(vals[0], pre.form, coeffs, pre.block_split)
            .map_err(|e| Error::Input(format!("{origin}:{line}: {e}")))?;
        samples.push(s);
    }
    if samples.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Trajectory::from_samples(samples, pre.step).map_err(|e| Error::Input(format!("{origin}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate;

    #[test]
    fn round_trip_is_bitwise() {
        let m = |v: [f64; 9]| Matrix::from_real(3, &v);
        let s = NahmState::t_form([
            m([0.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.5, 0.0]),
            m([0.0, 0.0, 0.8, 0.0, 0.0, 0.0, -0.8, 0.0, 0.0]),
            m([0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ])
        .unwrap();
        let traj = integrate(&s, 0.05, 1e-2).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj).unwrap();
        let back = read_trajectory(std::str::from_utf8(&buf).unwrap(), "mem").unwrap();
        assert_eq!(back.samples(), traj.samples());
        assert_eq!(back.step().to_bits(), traj.step().to_bits());
    }

    #[test]
    fn corrupt_cell_names_line_and_column() {
        let text = "# form=symmetric n=1 block_split=none step=1e-3\nt,m0_0_0_re,m0_0_0_im,m1_0_0_re,m1_0_0_im,m2_0_0_re,m2_0_0_im\n0,1,0,0,0,0,0\n0.1,1,zz,0,0,0,0\n";
        let err = read_trajectory(text, "traj.csv").unwrap_err();
        let msg = format!("{err}");
        assert!(
            msg.contains("traj.csv:4") && msg.contains("m0_0_0_im"),
            "{msg}"
        );
    }
}
