//! Artifact writers and readers: solution tables, convergence tables,
//! certificate JSON files, identity tables, and the run-wide summary index.
//!
//! Every table has a header row.  Floats are written with the shortest
//! round-trip representation, and nothing here records timestamps or
//! machine state, so reruns with the same config and seed produce
//! byte-identical files.

use std::path::Path;

use crate::certificate::Certificate;
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::solver::ConvergeStudy;

/// `t, u0, u1, ...` node table of a sampled curve.
pub fn write_solution_csv(path: &Path, u: &SampledCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let dim = u.space().dim();
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|c| format!("u{c}")));
    w.write_record(&header)?;
    let grid = u.grid();
    for i in 0..grid.len() {
        let mut row = vec![grid.node(i).to_string()];
        row.extend(u.node(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-run ladder table of a convergence study: regularization parameter,
/// successive gap, reference error, iteration quality, and size measures of
/// the valid window.
pub fn write_convergence_csv(path: &Path, study: &ConvergeStudy) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "lambda",
        "cauchy_diff",
        "ref_err",
        "residual",
        "iterations",
        "sup_norm",
        "max_difference_quotient",
    ])?;
    for (row, res) in study.rows.iter().zip(&study.results) {
        let valid = res.valid()?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            row.lambda.to_string(),
            opt(row.cauchy_diff),
            opt(row.ref_err),
            row.residual.to_string(),
            row.iterations.to_string(),
            valid.sup_norm().to_string(),
            valid.max_difference_quotient().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Turn a certificate name into a safe file stem.
pub fn sanitize_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Write each certificate as `<dir>/<sanitized-name>.json`.
pub fn write_certificates(dir: &Path, certs: &[Certificate]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for cert in certs {
        cert.write_json(dir.join(format!("{}.json", sanitize_name(&cert.name))))?;
    }
    Ok(())
}

/// Read every certificate JSON in a directory, in sorted filename order.
pub fn load_certificates(dir: &Path) -> Result<Vec<Certificate>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut certs = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path)?;
        let cert: Certificate = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?;
        certs.push(cert);
    }
    Ok(certs)
}

/// Run-wide index: `scenario, certificate, samples, worst_margin, budget,
/// pass` with one row per certificate.
pub fn write_summary_csv(path: &Path, rows: &[(&str, &Certificate)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["scenario", "certificate", "samples", "worst_margin", "budget", "pass"])?;
    for (scenario, cert) in rows {
        let r = cert.summary_row();
        w.write_record([*scenario, &r[0], &r[1], &r[2], &r[3], &r[4]].map(String::from))?;
    }
    w.flush()?;
    Ok(())
}

/// Identity table for kernel-integral certificates: `item, params, value,
/// reference, margin, pass` with one row per certified sample.
pub fn write_identity_table_csv(path: &Path, items: &[(usize, Certificate)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["item", "params", "value", "reference", "margin", "pass"])?;
    for (item, cert) in items {
        let tol = cert.budget.total();
        for s in &cert.samples {
            w.write_record([
                item.to_string(),
                s.label.clone(),
                s.lhs.to_string(),
                s.rhs.to_string(),
                s.margin.to_string(),
                (s.margin >= -tol).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{BudgetBreakdown, CertSample};

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("yosida-report-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn certificates_round_trip_through_files_and_the_summary_lists_them() {
        let cert = Certificate::from_samples(
            "demo check",
            vec![CertSample::inequality("a", 1.0, 2.0), CertSample::inequality("b", 0.5, 0.6)],
            BudgetBreakdown { dt_term: 0.0, lambda_term: 0.0, quadrature_term: 0.0, arithmetic_term: 1e-10 },
        );
        let dir = tmp("certs");
        let _ = std::fs::remove_dir_all(&dir);
        write_certificates(&dir, std::slice::from_ref(&cert)).unwrap();
        assert!(dir.join("demo_check.json").is_file());
        let back = load_certificates(&dir).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].name, "demo check");
        assert_eq!(back[0].worst_margin, cert.worst_margin);
        assert_eq!(back[0].pass, cert.pass);

        let summary = tmp("summary.csv");
        write_summary_csv(&summary, &[("scene", &cert)]).unwrap();
        let text = std::fs::read_to_string(&summary).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "scenario,certificate,samples,worst_margin,budget,pass");
        let row = lines.next().unwrap();
        assert!(row.starts_with("scene,demo check,2,"));
        assert!(row.ends_with(",pass"));
    }

    #[test]
    fn identity_tables_carry_one_row_per_sample_with_per_row_verdicts() {
        let cert = Certificate::from_samples(
            "identity",
            vec![
                CertSample::equality("p=1", 0.3333, 1.0 / 3.0),
                CertSample::equality("p=2", 0.5, 0.75),
            ],
            BudgetBreakdown { dt_term: 0.0, lambda_term: 0.0, quadrature_term: 1e-3, arithmetic_term: 0.0 },
        );
        let path = tmp("identity.csv");
        write_identity_table_csv(&path, &[(2, cert)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "item,params,value,reference,margin,pass");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("2,p=1,0.3333,"));
        assert!(lines[1].ends_with(",true"));
        assert!(lines[2].ends_with(",false"));
    }
}
