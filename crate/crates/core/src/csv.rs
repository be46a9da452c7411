//! Plain CSV writers with fixed 17-significant-digit formatting.
//!
//! Masked values (no projection near an exceptional point) are written as
//! empty fields.

use std::io::{self, Write};

use crate::dynamics::{ThetaScanRow, Trajectory};
use crate::spectra::SpectrumPoint;

/// `x` with 17 significant digits, e.g. `-2.0000000000000000e-1`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_meta(w: &mut dyn Write, meta: Option<&str>) -> io::Result<()> {
    if let Some(m) = meta {
        for line in m.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

fn write_row(w: &mut dyn Write, fields: &[String]) -> io::Result<()> {
    writeln!(w, "{}", fields.join(","))
}

pub const TRAJECTORY_COLUMNS: [&str; 13] = [
    "t", "eta", "re_psi1", "im_psi1", "re_psi2", "im_psi2", "re_e1", "im_e1", "re_e2", "im_e2",
    "abs_c1_sq", "abs_c2_sq", "ep_flag",
];

pub fn write_trajectory(w: &mut dyn Write, traj: &Trajectory, meta: Option<&str>) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "{}", TRAJECTORY_COLUMNS.join(","))?;
    for s in &traj.samples {
        let st = &s.state;
        write_row(
            w,
            &[
                fmt_f64(st.t),
                fmt_f64(s.eta),
                fmt_f64(st.psi1.re),
                fmt_f64(st.psi1.im),
                fmt_f64(st.psi2.re),
                fmt_f64(st.psi2.im),
                fmt_f64(s.e1.re),
                fmt_f64(s.e1.im),
                fmt_f64(s.e2.re),
                fmt_f64(s.e2.im),
                fmt_opt(s.c1.map(|c| c.norm_sqr())),
                fmt_opt(s.c2.map(|c| c.norm_sqr())),
                u8::from(s.ep_flag()).to_string(),
            ],
        )?;
    }
    Ok(())
}

pub fn write_spectrum(w: &mut dyn Write, points: &[SpectrumPoint], meta: Option<&str>) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "eta,re_e1,im_e1,re_e2,im_e2")?;
    for p in points {
        write_row(
            w,
            &[p.eta, p.e1.re, p.e1.im, p.e2.re, p.e2.im].map(fmt_f64),
        )?;
    }
    Ok(())
}

pub fn write_bubble_scan(w: &mut dyn Write, rows: &[(f64, f64)], meta: Option<&str>) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "gamma,diameter")?;
    for &(g, d) in rows {
        write_row(w, &[fmt_f64(g), fmt_f64(d)])?;
    }
    Ok(())
}

pub fn write_theta_scan(w: &mut dyn Write, rows: &[ThetaScanRow], meta: Option<&str>) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "theta,delta_c,abs_c1_end,abs_c2_end,abs_c1_tf,abs_c2_tf,ratio_tf")?;
    for r in rows {
        write_row(
            w,
            &[
                fmt_f64(r.theta),
                fmt_opt(r.delta_c),
                fmt_opt(r.abs_c1_end),
                fmt_opt(r.abs_c2_end),
                fmt_opt(r.abs_c1_tf),
                fmt_opt(r.abs_c2_tf),
                fmt_opt(r.ratio_tf),
            ],
        )?;
    }
    Ok(())
}
