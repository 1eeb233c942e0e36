use std::fs;
use std::path::Path;

use super::{ResultSet, ScenarioError};

/// Shortest decimal that parses back to the same f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>, ScenarioError> {
    Ok(csv::Writer::from_writer(fs::File::create(dir.join(name))?))
}

fn csv_err(e: csv::Error) -> ScenarioError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => ScenarioError::Io(io),
        other => ScenarioError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn row(w: &mut csv::Writer<fs::File>, fields: impl IntoIterator<Item = String>) -> Result<(), ScenarioError> {
    w.write_record(fields.into_iter().collect::<Vec<_>>()).map_err(csv_err)
}

/// Writes the result files into `dir`, creating it if needed. Only the files
/// that apply to the solver are written; `scenario.json` and
/// `provenance.json` always are.
pub fn write_csv(r: &ResultSet, dir: &Path) -> Result<Vec<String>, ScenarioError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    if let Some(series) = &r.series {
        let mut w = writer(dir, "frames.csv")?;
        row(&mut w, std::iter::once("t".to_string()).chain(series.meta.columns.iter().cloned()))?;
        for (t, frame) in series.times.iter().zip(&series.frames) {
            row(&mut w, std::iter::once(fmt_f64(*t)).chain(frame.iter().map(|v| fmt_f64(*v))))?;
        }
        w.flush()?;
        written.push("frames.csv".to_string());

        if !r.probes.is_empty() {
            let mut w = writer(dir, "probes.csv")?;
            row(&mut w, std::iter::once("t".to_string()).chain(r.probes.iter().map(|p| p.0.clone())))?;
            for (i, t) in series.times.iter().enumerate() {
                row(
                    &mut w,
                    std::iter::once(fmt_f64(*t)).chain(r.probes.iter().map(|(_, c)| fmt_f64(series.probes[c][i]))),
                )?;
            }
            w.flush()?;
            written.push("probes.csv".to_string());
        }
    }

    if let Some(st) = &r.statics {
        let mut w = writer(dir, "static.csv")?;
        row(&mut w, ["x", "w_fd", "w_closed_form"].map(String::from))?;
        for (i, x) in st.x.iter().enumerate() {
            let cf = st.closed_form.as_ref().map(|c| fmt_f64(c[i])).unwrap_or_default();
            row(&mut w, [fmt_f64(*x), fmt_f64(st.fd[i]), cf])?;
        }
        w.flush()?;
        written.push("static.csv".to_string());
    }

    if !r.modes.is_empty() {
        let mut w = writer(dir, "modes.csv")?;
        row(&mut w, ["mode_index", "beta", "omega_rad_s", "f_hz"].map(String::from))?;
        for (i, m) in r.modes.iter().enumerate() {
            row(&mut w, [(i + 1).to_string(), fmt_f64(m.beta), fmt_f64(m.omega), fmt_f64(m.f_hz)])?;
        }
        w.flush()?;

        let mut w = writer(dir, "shapes.csv")?;
        row(
            &mut w,
            std::iter::once("x".to_string()).chain((1..=r.modes.len()).map(|i| format!("mode_{i}"))),
        )?;
        let grid = r.modes[0].shape.grid;
        for j in 0..grid.nodes() {
            row(
                &mut w,
                std::iter::once(fmt_f64(grid.x(j))).chain(r.modes.iter().map(|m| fmt_f64(m.shape.deflection[j]))),
            )?;
        }
        w.flush()?;
        written.extend(["modes.csv".to_string(), "shapes.csv".to_string()]);
    }

    if !r.sweep.is_empty() {
        let mut w = writer(dir, "sweep.csv")?;
        row(&mut w, ["f_hz", "amplitude_m"].map(String::from))?;
        for p in &r.sweep {
            row(&mut w, [fmt_f64(p.f_hz), fmt_f64(p.amplitude)])?;
        }
        w.flush()?;
        written.push("sweep.csv".to_string());
    }

    if !r.nonlinear.is_empty() {
        let mut w = writer(dir, "nonlinear.csv")?;
        row(&mut w, ["p_n", "w_lin_m", "w_nl_m"].map(String::from))?;
        for c in &r.nonlinear {
            row(&mut w, [fmt_f64(c.p), fmt_f64(c.w_lin), fmt_f64(c.w_nl)])?;
        }
        w.flush()?;
        written.push("nonlinear.csv".to_string());
    }

    fs::write(dir.join("scenario.json"), r.scenario.to_json() + "\n")?;
    let prov = serde_json::to_string_pretty(&r.provenance).expect("provenance serializes");
    fs::write(dir.join("provenance.json"), prov + "\n")?;
    written.extend(["scenario.json".to_string(), "provenance.json".to_string()]);
    Ok(written)
}
