//! Deterministic CSV writers for the fixed export schemas.
//!
//! All floats are rendered as `%.12e`-style lower-case scientific notation
//! so identical inputs produce byte-identical files.

use crate::correlations::CorrelationRecord;
use crate::kernel::{rates, DecoherenceFunction};
use crate::walk::PositionDistribution;
use std::io::{self, Write};

/// Fixed float format shared by every export: C's `%.12e`.
pub fn fmt(value: f64) -> String {
    let value = if value == 0.0 { 0.0 } else { value }; // normalize -0.0
    let s = format!("{value:.12e}");
    // Rust renders the exponent without sign or zero padding; normalize to
    // the printf form (e+00) so files are stable and diff-friendly.
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let e: i32 = exp.parse().unwrap_or(0);
            format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
        }
        None => s,
    }
}

/// `t, re_kappa, im_kappa, gamma, epsilon, singular` over the sample grid.
pub fn write_kappa<W: Write>(out: &mut W, df: &DecoherenceFunction) -> io::Result<()> {
    writeln!(out, "t,re_kappa,im_kappa,gamma,epsilon,singular")?;
    for &(t, kappa) in df.samples() {
        let rate = rates(df, t).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt(t),
            fmt(kappa.re),
            fmt(kappa.im),
            fmt(rate.gamma),
            fmt(rate.epsilon),
            u8::from(rate.singular)
        )?;
    }
    Ok(())
}

/// Summary series `t, mean, var`, with optional classical-RW and ideal-QW
/// baseline variance columns.
pub fn write_summary<W: Write>(
    out: &mut W,
    rows: &[(usize, f64, f64)],
    baselines: Option<&[(f64, f64)]>,
) -> io::Result<()> {
    match baselines {
        None => {
            writeln!(out, "t,mean,var")?;
            for &(t, mean, var) in rows {
                writeln!(out, "{t},{},{}", fmt(mean), fmt(var))?;
            }
        }
        Some(base) => {
            writeln!(out, "t,mean,var,var_rw,var_ideal")?;
            for (&(t, mean, var), &(var_rw, var_ideal)) in rows.iter().zip(base) {
                writeln!(out, "{t},{},{},{},{}", fmt(mean), fmt(var), fmt(var_rw), fmt(var_ideal))?;
            }
        }
    }
    Ok(())
}

/// Distribution blocks `t, x, p`, restricted to the light cone of each step.
pub fn write_distributions<W: Write>(
    out: &mut W,
    dists: &[PositionDistribution],
) -> io::Result<()> {
    writeln!(out, "t,x,p")?;
    for dist in dists {
        for (x, p) in dist.points() {
            writeln!(out, "{},{x},{}", dist.t(), fmt(p))?;
        }
    }
    Ok(())
}

/// Correlation trajectory `t, mutual_info, mid, qd, qd_theta, qd_phi,
/// degenerate_flag`.
pub fn write_correlations<W: Write>(
    out: &mut W,
    records: &[CorrelationRecord],
) -> io::Result<()> {
    writeln!(out, "t,mutual_info,mid,qd,qd_theta,qd_phi,degenerate_flag")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.t,
            fmt(r.mutual_info),
            fmt(r.mid),
            fmt(r.qd),
            fmt(r.qd_argmax.0),
            fmt(r.qd_argmax.1),
            u8::from(r.degenerate)
        )?;
    }
    Ok(())
}

/// Analytic-vs-simulated variance series
/// `t, var_sim, var_exact, var_longtime, rel_err_exact, rel_err_longtime`.
/// `var_sim` may be NaN (rendered empty) for analytic-only runs.
pub fn write_compare<W: Write>(
    out: &mut W,
    rows: &[(usize, f64, f64, f64)],
) -> io::Result<()> {
    writeln!(out, "t,var_sim,var_exact,var_longtime,rel_err_exact,rel_err_longtime")?;
    for &(t, var_sim, var_exact, var_longtime) in rows {
        let rel = |reference: f64| {
            if var_sim.is_nan() || reference.abs() < 1e-300 {
                String::new()
            } else {
                fmt((var_sim - reference).abs() / reference.abs())
            }
        };
        let sim = if var_sim.is_nan() { String::new() } else { fmt(var_sim) };
        writeln!(
            out,
            "{t},{sim},{},{},{},{}",
            fmt(var_exact),
            fmt(var_longtime),
            rel(var_exact),
            rel(var_longtime)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{kappa_volterra, KernelParams};

    #[test]
    fn float_format_is_fixed_width_scientific() {
        assert_eq!(fmt(1.0), "1.000000000000e+00");
        assert_eq!(fmt(-0.5), "-5.000000000000e-01");
        assert_eq!(fmt(0.0), "0.000000000000e+00");
        assert_eq!(fmt(1.5e-123), "1.500000000000e-123");
    }

    #[test]
    fn kappa_csv_shape() {
        let p = KernelParams::new(1.0, 10.0).unwrap();
        let df = kappa_volterra(&p, 0.5, 2.0).unwrap();
        let mut buf = Vec::new();
        write_kappa(&mut buf, &df).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,re_kappa,im_kappa,gamma,epsilon,singular");
        assert_eq!(lines.len(), 1 + df.samples().len());
        assert!(lines[1].starts_with("0.000000000000e+00,1.000000000000e+00,"));
    }

    #[test]
    fn identical_inputs_identical_bytes() {
        let p = KernelParams::new(1.0, 0.05).unwrap();
        let df = kappa_volterra(&p, 0.25, 5.0).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_kappa(&mut a, &df).unwrap();
        write_kappa(&mut b, &df).unwrap();
        assert_eq!(a, b);
    }
}
