use std::fmt::Write as _;

use serde::Serialize;

use endonet::stochastic::{foster_lyapunov_scan, generator_drift, h_sum, scaled_drift_sign, DriftScanReport};

use crate::config::Config;
use crate::{check_dim, emit, load, parse_list, DriftArgs, Failure};

#[derive(Clone, Debug, Serialize)]
pub struct PointDrift {
    pub x: Vec<u64>,
    pub drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaledReport {
    pub x: Vec<f64>,
    pub volume: f64,
    pub sign: i8,
    pub ln_magnitude: f64,
    pub asymptotic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HSumReport {
    pub x: Vec<f64>,
    pub volume: f64,
    pub c1: f64,
    pub c2: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub command: &'static str,
    pub file: String,
    pub mode: &'static str,
    pub scan: Option<DriftScanReport>,
    pub point: Option<PointDrift>,
    pub scaled: Option<ScaledReport>,
    pub hsum: Option<HSumReport>,
}

fn number(text: &str, name: &str) -> Result<f64, Failure> {
    let body = text.strip_prefix(&format!("{name}=")).unwrap_or(text);
    body.trim()
        .parse()
        .map_err(|_| Failure::usage(format!("invalid {name}: {text}")))
}

/// `2 ceil(e^|x|_1)`.
pub fn auto_volume(x: &[f64]) -> f64 {
    2.0 * x.iter().sum::<f64>().exp().ceil()
}

pub fn run(args: &DriftArgs, cfg: &Config) -> Result<(), Failure> {
    let doc = load(&args.file)?;
    let net = &doc.network;
    let d = net.dim();
    let mut report = DriftReport {
        command: "drift",
        file: args.file.display().to_string(),
        mode: "",
        scan: None,
        point: None,
        scaled: None,
        hsum: None,
    };
    if args.anchor.is_some() && args.scan.is_none() {
        return Err(Failure::usage("--anchor applies to --scan only"));
    }
    if let Some(s) = &args.scan {
        let anchor: Option<Vec<u64>> = args.anchor.as_deref().map(|a| parse_list(a, "anchor")).transpose()?;
        if let Some(a) = &anchor {
            check_dim(a, d, "--anchor")?;
        }
        report.mode = "scan";
        report.scan = Some(foster_lyapunov_scan(
            net,
            &doc.rates,
            s[0],
            s[1],
            anchor.as_deref(),
            args.budget.unwrap_or(cfg.scan_budget),
        )?);
    } else if let Some(p) = &args.point {
        let x: Vec<u64> = parse_list(p, "x")?;
        check_dim(&x, d, "x")?;
        report.mode = "point";
        report.point = Some(PointDrift {
            drift: generator_drift(net, &doc.rates, &x)?,
            x,
        });
    } else if let Some(s) = &args.scaled {
        let x: Vec<f64> = parse_list(&s[1], "x")?;
        check_dim(&x, d, "x")?;
        let v_text = s[0].strip_prefix("V=").unwrap_or(&s[0]);
        let volume = if v_text == "auto" {
            auto_volume(&x)
        } else {
            number(v_text, "V")?
        };
        let r = scaled_drift_sign(net, &doc.rates, volume, &x)?;
        report.mode = "scaled";
        report.scaled = Some(ScaledReport {
            x,
            volume,
            sign: r.sign,
            ln_magnitude: r.ln_magnitude,
            asymptotic: r.asymptotic,
        });
    } else if let Some(h) = &args.hsum {
        let x: Vec<f64> = parse_list(&h[0], "x")?;
        check_dim(&x, d, "x")?;
        let volume = number(&h[1], "V")?;
        if !(volume > 0.0) {
            return Err(Failure::usage("V must be positive"));
        }
        let (c1, c2) = (number(&h[2], "c1")?, number(&h[3], "c2")?);
        report.mode = "hsum";
        report.hsum = Some(HSumReport {
            value: h_sum(net, &doc.rates, &x, c1, c2)?,
            x,
            volume,
            c1,
            c2,
        });
    }
    emit(args.json, &report, || text(&report));
    Ok(())
}

fn sign_char(s: i8) -> char {
    match s {
        1 => '+',
        -1 => '-',
        _ => '0',
    }
}

fn text(r: &DriftReport) -> String {
    let mut out = String::new();
    if let Some(s) = &r.scan {
        let _ = writeln!(out, "shell [{}, {}]: {} states", s.n1, s.n2, s.states_scanned);
        match (&s.max_drift, &s.argmax) {
            (Some(m), Some(x)) => {
                let _ = writeln!(out, "  max drift {m:.6} at {x:?}");
            }
            _ => {
                let _ = writeln!(out, "  no states");
            }
        }
        let _ = writeln!(out, "  violators (drift > -1): {}", s.violators);
    }
    if let Some(p) = &r.point {
        let _ = writeln!(out, "(LU)({:?}) = {:.6}", p.x, p.drift);
    }
    if let Some(s) = &r.scaled {
        let _ = writeln!(
            out,
            "sign (L_V U^V)({:?}) at V = {}: {}{}",
            s.x,
            s.volume,
            sign_char(s.sign),
            if s.asymptotic { " (asymptotic)" } else { "" }
        );
        let _ = writeln!(out, "  ln|L_V U^V| - V ln U = {:.6}", s.ln_magnitude);
    }
    if let Some(h) = &r.hsum {
        let _ = writeln!(out, "H({:?}) = {:.6} (c1 = {}, c2 = {})", h.x, h.value, h.c1, h.c2);
    }
    out
}
