use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::identities::IdentityRow;
use super::sweep::SweepRow;
use crate::{Error, Result};

/// Everything one subcommand emits.
#[derive(Debug, Clone, Default)]
pub struct Tables {
    /// `#` lines written at the top of every CSV.
    pub header: Vec<String>,
    /// Named sweep tables, one CSV each.
    pub sweeps: Vec<(String, Vec<SweepRow>)>,
    pub identities: Option<Vec<IdentityRow>>,
    /// Free-form summary written to `summary.txt`.
    pub summary: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputFiles {
    pub paths: Vec<PathBuf>,
}

fn csv_with_header<F>(header: &[String], columns: &[&str], mut body: F) -> String
where
    F: FnMut(&mut csv::Writer<&mut Vec<u8>>) -> std::result::Result<(), csv::Error>,
{
    let mut buf: Vec<u8> = Vec::new();
    for h in header {
        buf.extend_from_slice(format!("# {h}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        // writing into a Vec cannot fail
        w.write_record(columns).expect("in-memory csv");
        body(&mut w).expect("in-memory csv");
        w.flush().expect("in-memory csv");
    }
    String::from_utf8(buf).expect("csv output is utf-8")
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Plain numeric table with the given column names.
pub fn numeric_csv(header: &[String], columns: &[&str], rows: &[Vec<f64>]) -> String {
    csv_with_header(header, columns, |w| {
        for r in rows {
            w.write_record(r.iter().map(|&x| num(x)))?;
        }
        Ok(())
    })
}

/// `n,t,z,zprime,K_scaled,K_model,abs_err`.
pub fn sweep_to_csv(header: &[String], rows: &[SweepRow]) -> String {
    csv_with_header(header, &["n", "t", "z", "zprime", "K_scaled", "K_model", "abs_err"], |w| {
        for r in rows {
            w.write_record([
                r.n.to_string(),
                num(r.t),
                num(r.z),
                num(r.zprime),
                num(r.k_scaled),
                num(r.k_model),
                num(r.abs_err),
            ])?;
        }
        Ok(())
    })
}

/// `suite,case,residual,tolerance,pass`.
pub fn identities_to_csv(header: &[String], rows: &[IdentityRow]) -> String {
    csv_with_header(header, &["suite", "case", "residual", "tolerance", "pass"], |w| {
        for r in rows {
            w.write_record([r.suite.clone(), r.case.clone(), num(r.residual), num(r.tolerance), r.pass.to_string()])?;
        }
        Ok(())
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const M: f64 = 60.0;

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn axes(s: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        "<path d=\"M{M} {top} L{M} {bot} L{right} {bot}\" stroke=\"black\" fill=\"none\"/>",
        top = M,
        bot = H - M,
        right = W - M
    );
    for (v, anchor_x, anchor_y, align) in
        [(x.0, M, H - M + 16.0, "start"), (x.1, W - M, H - M + 16.0, "end")]
    {
        let _ = writeln!(s, "<text x=\"{anchor_x}\" y=\"{anchor_y}\" text-anchor=\"{align}\">{v:.3e}</text>");
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3e}</text>", M - 4.0, H - M, y.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3e}</text>", M - 4.0, M + 10.0, y.1);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", W / 2.0, H - 18.0, escape(xlabel));
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn map(v: f64, r: (f64, f64), lo: f64, hi: f64) -> f64 {
    lo + (v - r.0) / (r.1 - r.0) * (hi - lo)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Line plot of several series over a shared `x`.
pub fn svg_profiles(title: &str, x: &[f64], series: &[(String, Vec<f64>)], ylabel: &str) -> String {
    let mut s = svg_open(title);
    let xr = range(x.iter().copied());
    let yr = range(series.iter().flat_map(|(_, v)| v.iter().copied()));
    axes(&mut s, xr, yr, "z", ylabel);
    for (k, (label, ys)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(ys)
            .map(|(&a, &b)| format!("{:.2},{:.2}", map(a, xr, M, W - M), map(b, yr, H - M, M)))
            .collect();
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", pts.join(" "));
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>",
            W - M - 150.0,
            M + 16.0 * k as f64,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Error against `n` on a log scale, one marker per point.
pub fn svg_error_curve(title: &str, points: &[(u64, f64)]) -> String {
    let mut s = svg_open(title);
    let xr = range(points.iter().map(|p| p.0 as f64));
    let yr = range(points.iter().map(|p| p.1.max(1e-300).log10()));
    axes(&mut s, xr, yr, "n", "log10 sup error");
    let coords: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, e)| (map(n as f64, xr, M, W - M), map(e.max(1e-300).log10(), yr, H - M, M)))
        .collect();
    let line: Vec<String> = coords.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
    let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>", line.join(" "), PALETTE[0]);
    for (a, b) in coords {
        let _ = writeln!(s, "<circle cx=\"{a:.2}\" cy=\"{b:.2}\" r=\"4\" fill=\"{}\"/>", PALETTE[1]);
    }
    s.push_str("</svg>\n");
    s
}

/// Heatmap of `values[i·|z′|+j]` over `z × z′`.
pub fn svg_heatmap(title: &str, z: &[f64], zp: &[f64], values: &[f64]) -> String {
    let mut s = svg_open(title);
    let vr = range(values.iter().copied());
    let (cw, ch) = ((W - 2.0 * M) / zp.len().max(1) as f64, (H - 2.0 * M) / z.len().max(1) as f64);
    for i in 0..z.len() {
        for j in 0..zp.len() {
            let f = map(values[i * zp.len() + j], vr, 0.0, 1.0).clamp(0.0, 1.0);
            let (r, g, b) = ((255.0 * f) as u8, (80.0 + 100.0 * (1.0 - (2.0 * f - 1.0).abs())) as u8, (255.0 * (1.0 - f)) as u8);
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>",
                M + cw * j as f64,
                H - M - ch * (i + 1) as f64,
                cw + 0.3,
                ch + 0.3
            );
        }
    }
    axes(&mut s, range(zp.iter().copied()), range(z.iter().copied()), "z'", "z");
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">min {:.3e}, max {:.3e}</text>", M, M - 8.0, vr.0, vr.1);
    s.push_str("</svg>\n");
    s
}

fn unique_sorted(vals: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = vals.collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

fn sweep_plots(name: &str, rows: &[SweepRow]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let ns: Vec<u64> = {
        let mut v: Vec<u64> = rows.iter().map(|r| r.n).collect();
        v.dedup();
        v
    };
    let Some(&last) = ns.last() else {
        return out;
    };
    let z = unique_sorted(rows.iter().map(|r| r.z));
    let zp = unique_sorted(rows.iter().map(|r| r.zprime));
    let at_last: Vec<&SweepRow> = rows.iter().filter(|r| r.n == last).collect();
    if at_last.len() == z.len() * zp.len() {
        let ks: Vec<f64> = at_last.iter().map(|r| r.k_scaled).collect();
        let km: Vec<f64> = at_last.iter().map(|r| r.k_model).collect();
        out.push((format!("{name}_kernel_n{last}.svg"), svg_heatmap(&format!("{name}: kernel at n = {last}"), &z, &zp, &ks)));
        out.push((format!("{name}_model.svg"), svg_heatmap(&format!("{name}: limit"), &z, &zp, &km)));
    }
    let mut series: Vec<(String, Vec<f64>)> = ns
        .iter()
        .map(|&n| (format!("n = {n}"), rows.iter().filter(|r| r.n == n && r.z == r.zprime).map(|r| r.k_scaled).collect()))
        .collect();
    series.push(("limit".into(), rows.iter().filter(|r| r.n == last && r.z == r.zprime).map(|r| r.k_model).collect()));
    if series.iter().all(|s| s.1.len() == z.len()) {
        out.push((format!("{name}_diagonal.svg"), svg_profiles(&format!("{name}: K(z, z)"), &z, &series, "K(z,z)")));
    }
    let errs: Vec<(u64, f64)> = ns
        .iter()
        .map(|&n| (n, rows.iter().filter(|r| r.n == n).map(|r| r.abs_err).fold(0.0, f64::max)))
        .collect();
    out.push((format!("{name}_error.svg"), svg_error_curve(&format!("{name}: sup error against n"), &errs)));
    out
}

/// Writes every table as CSV plus its plots; returns the paths in write order.
pub fn emit_outputs(tables: &Tables, dir: &Path) -> Result<OutputFiles> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut files = OutputFiles::default();
    let mut put = |name: &str, text: &str| -> Result<()> {
        let path = dir.join(name);
        write_text(&path, text)?;
        files.paths.push(path);
        Ok(())
    };
    for (name, rows) in &tables.sweeps {
        put(&format!("{name}.csv"), &sweep_to_csv(&tables.header, rows))?;
        for (file, svg) in sweep_plots(name, rows) {
            put(&file, &svg)?;
        }
    }
    if let Some(rows) = &tables.identities {
        put("identities.csv", &identities_to_csv(&tables.header, rows))?;
    }
    if !tables.summary.is_empty() {
        put("summary.txt", &(tables.summary.join("\n") + "\n"))?;
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: u64, z: f64, zp: f64) -> SweepRow {
        SweepRow { n, n_big: n - 2, t: n as f64 / (n - 2) as f64, z, zprime: zp, k_scaled: z * zp, k_model: 0.5, abs_err: 0.1 / n as f64 }
    }

    #[test]
    fn empty_table_is_header_only() {
        let text = sweep_to_csv(&["x".into()], &[]);
        assert_eq!(text, "# x\nn,t,z,zprime,K_scaled,K_model,abs_err\n");
        assert_eq!(identities_to_csv(&[], &[]), "suite,case,residual,tolerance,pass\n");
    }

    #[test]
    fn three_n_sweep_gives_three_markers() {
        let mut rows = Vec::new();
        for n in [16, 32, 48] {
            for z in [-1.0, 1.0] {
                for zp in [-1.0, 1.0] {
                    rows.push(row(n, z, zp));
                }
            }
        }
        let plots = sweep_plots("u", &rows);
        let err = plots.iter().find(|p| p.0 == "u_error.svg").unwrap();
        assert_eq!(err.1.matches("<circle").count(), 3);
        assert!(plots.iter().all(|p| !p.1.contains("href")));
    }

    #[test]
    fn emission_is_deterministic() {
        let dir = std::env::temp_dir().join(format!("birthcut-out-{}", std::process::id()));
        let tables = Tables {
            header: vec!["cfg".into()],
            sweeps: vec![("s".into(), vec![row(16, 0.0, 0.0), row(32, 0.0, 0.0)])],
            identities: Some(vec![IdentityRow::upper("a", "b", 1e-3, 1e-2)]),
            summary: vec!["ok".into()],
        };
        let a = emit_outputs(&tables, &dir).unwrap();
        let first: Vec<Vec<u8>> = a.paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let b = emit_outputs(&tables, &dir).unwrap();
        let second: Vec<Vec<u8>> = b.paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(first, second);
        assert!(String::from_utf8(first[0].clone()).unwrap().starts_with("# cfg\nn,t,"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn io_errors_carry_the_path() {
        let file = std::env::temp_dir().join(format!("birthcut-file-{}", std::process::id()));
        std::fs::write(&file, "x").unwrap();
        let err = emit_outputs(&Tables::default(), &file.join("sub")).unwrap_err();
        assert!(err.to_string().contains("birthcut-file"));
        std::fs::remove_file(&file).unwrap();
    }
}
