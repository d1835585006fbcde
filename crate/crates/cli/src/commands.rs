use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use superfid::eigendensities::{
    c_g_exact, c_g_jensen_bound, c_g_monte_carlo, c_g_quadrature, c_g_series, density_grid_qutrit,
    MomentSource, SeriesTail,
};
use superfid::qstate::{purity, spectrum};
use superfid::samplers::sample_batch;
use superfid::{MeasureKind, RejectionReport, RngStream};

use crate::{CliError, EstimateArgs, Format, GridArgs, GridMeasure, Method, Moments, SampleArgs, Tail};

pub const SCHEMA_VERSION: u32 = 1;

pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Record {
    eigenvalues: Vec<f64>,
    purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<f64>>,
}

fn report_line(r: &RejectionReport) -> String {
    format!(
        "# rejection: proposed={},accepted={},bound_constant={},envelope_sup={},empirical_rate={}\n",
        r.proposed, r.accepted, r.bound_constant, r.envelope_sup, r.empirical_rate
    )
}

pub fn sample(a: &SampleArgs) -> Result<(), CliError> {
    let measure = MeasureKind::from(a.measure);
    let dim = a.dim as usize;
    let batch = sample_batch(measure, dim, a.count as usize, a.seed, a.workers as usize, a.max_proposals)?;
    let mut records = Vec::with_capacity(batch.states.len());
    for rho in &batch.states {
        records.push(Record {
            eigenvalues: spectrum(rho)?.into_vec(),
            purity: purity(rho),
            matrix: a.full_matrix.then(|| rho.flattened()),
        });
    }
    let text = match a.format {
        Format::Csv => {
            let mut s = String::new();
            writeln!(s, "# schema_version={SCHEMA_VERSION}").unwrap();
            writeln!(s, "# measure={measure}").unwrap();
            writeln!(s, "# dim={dim}").unwrap();
            writeln!(s, "# count={}", a.count).unwrap();
            writeln!(s, "# seed={}", a.seed).unwrap();
            writeln!(s, "# workers={}", a.workers).unwrap();
            if let Some(r) = &batch.report {
                s.push_str(&report_line(r));
            }
            let mut header: Vec<String> = (1..=dim).map(|k| format!("lambda_{k}")).collect();
            header.push("purity".into());
            if a.full_matrix {
                for i in 1..=dim {
                    for j in 1..=dim {
                        header.push(format!("re_{i}_{j}"));
                        header.push(format!("im_{i}_{j}"));
                    }
                }
            }
            s.push_str(&header.join(","));
            s.push('\n');
            for r in &records {
                let mut fields: Vec<String> = r.eigenvalues.iter().map(|v| v.to_string()).collect();
                fields.push(r.purity.to_string());
                if let Some(m) = &r.matrix {
                    fields.extend(m.iter().map(|v| v.to_string()));
                }
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "measure": measure,
                "dim": dim,
                "count": a.count,
                "seed": a.seed,
                "workers": a.workers,
                "rejection": batch.report,
                "records": records,
            });
            serde_json::to_string_pretty(&v).map_err(|e| CliError::Runtime(e.to_string()))? + "\n"
        }
    };
    emit(a.out.as_deref(), &text)
}

pub fn estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let dim = a.dim as usize;
    let rng = RngStream::new(a.seed, 0);
    let mut extra = serde_json::Map::new();
    let est = match a.method {
        Method::Exact => c_g_exact(dim)?,
        Method::Jensen => c_g_jensen_bound(dim)?,
        Method::Quadrature => c_g_quadrature(dim)?,
        Method::Mc => {
            extra.insert("seed".into(), json!(a.seed));
            c_g_monte_carlo(dim, a.samples, &rng)?
        }
        Method::Series => {
            let source = match a.moments {
                Moments::Closed => MomentSource::ClosedForm,
                Moments::Mc => {
                    extra.insert("seed".into(), json!(a.seed));
                    extra.insert("moment_samples".into(), json!(a.samples));
                    MomentSource::MonteCarlo { samples: a.samples, rng: &rng }
                }
            };
            let tail = match a.tail {
                Tail::PowerLaw => SeriesTail::PowerLaw,
                Tail::None => SeriesTail::None,
            };
            let s = c_g_series(dim, a.k_max, source, tail)?;
            extra.insert("tail_model".into(), json!(tail));
            extra.insert("tail".into(), json!(s.tail));
            extra.insert("last_term".into(), json!(s.last_term));
            extra.insert("partial_sums".into(), json!(s.partial_sums));
            s.estimate
        }
    };
    let mut v = serde_json::to_value(&est).map_err(|e| CliError::Runtime(e.to_string()))?;
    let obj = v.as_object_mut().expect("estimate serializes to an object");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("kind".into(), json!(est.kind()));
    obj.extend(extra);
    let text = serde_json::to_string_pretty(&Value::Object(obj.clone()))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    emit(a.out.as_deref(), &(text + "\n"))
}

pub fn grid(a: &GridArgs) -> Result<(), CliError> {
    if a.dim != 3 {
        return Err(CliError::Usage(format!("grid is only defined for --dim 3 (got {})", a.dim)));
    }
    let measure = match a.measure {
        GridMeasure::G => MeasureKind::SuperfidelityG,
        GridMeasure::Bures => MeasureKind::Bures,
    };
    let g = density_grid_qutrit(a.resolution as usize, measure)?;
    let mut s = String::new();
    writeln!(s, "# schema_version={SCHEMA_VERSION}").unwrap();
    writeln!(s, "# measure={measure}").unwrap();
    writeln!(s, "# resolution={}", g.resolution).unwrap();
    writeln!(s, "# normalization={}", g.normalization).unwrap();
    writeln!(s, "# integral={}", g.integrate()?).unwrap();
    s.push_str("lambda1,lambda2,density,singular\n");
    for p in &g.points {
        match p.density {
            Some(d) => writeln!(s, "{},{},{},0", p.lambda1, p.lambda2, d).unwrap(),
            None => writeln!(s, "{},{},,1", p.lambda1, p.lambda2).unwrap(),
        }
    }
    emit(a.out.as_deref(), &s)
}
