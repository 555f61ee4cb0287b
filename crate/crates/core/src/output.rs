//! CSV writers. Numbers are printed with 17 significant digits; infinities
//! as `inf`.

use std::io::{self, Write};

use crate::full::Trajectory;
use crate::portrait::PortraitGrid;
use crate::real::Real;
use crate::reduced::ReducedTrajectory;

fn num<T: Real>(x: T) -> String {
    let x = x.as_f64();
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn row<W: Write>(w: &mut W, cols: &[String]) -> io::Result<()> {
    writeln!(w, "{}", cols.join(","))
}

/// Header `t,x1,y1,x2,y2,x3,y3,h,theta0,z0x,z0y`.
pub fn write_trajectory_csv<T: Real, W: Write>(w: &mut W, tr: &Trajectory<T>) -> io::Result<()> {
    writeln!(w, "t,x1,y1,x2,y2,x3,y3,h,theta0,z0x,z0y")?;
    for ((t, cfg), q) in tr.times.iter().zip(&tr.states).zip(&tr.diagnostics) {
        let mut cols = vec![num(*t)];
        cols.extend(cfg.to_xy().iter().map(|v| num(*v)));
        cols.extend([q.h, q.theta0, q.z0.re, q.z0.im].map(num));
        row(w, &cols)?;
    }
    Ok(())
}

/// Header `t,a0,a1,a2,a3,h,casimir_drift`.
pub fn write_reduced_csv<T: Real, W: Write>(w: &mut W, tr: &ReducedTrajectory<T>) -> io::Result<()> {
    writeln!(w, "t,a0,a1,a2,a3,h,casimir_drift")?;
    for (k, t) in tr.times.iter().enumerate() {
        let mut cols = vec![num(*t)];
        cols.extend(tr.states[k].a.a.map(num));
        cols.push(num(tr.h[k]));
        cols.push(num(tr.casimir_drift[k]));
        row(w, &cols)?;
    }
    Ok(())
}

/// Header `u,v,h`, row-major in `u`.
pub fn write_grid_csv<T: Real, W: Write>(w: &mut W, g: &PortraitGrid<T>) -> io::Result<()> {
    writeln!(w, "u,v,h")?;
    for i in 0..g.nu {
        for k in 0..g.nv {
            row(w, &[num(g.u[i]), num(g.v[k]), num(g.value(i, k))])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::full::{integrate_full, IntegratorOptions};
    use crate::portrait::{sample_portrait, ChartKind};
    use crate::reduced::{integrate_reduced, ReducedState};
    use crate::shape_algebra::{make_pauli, PauliCoords};
    use crate::vortex::{VortexConfig, VortexStrengths};

    #[test]
    fn trajectory_csv_layout() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        let cfg = VortexConfig::from_xy([1.0, 0.0, -0.5, 0.8, -0.5, -0.8]).unwrap();
        let mut o = IntegratorOptions::default();
        o.sample_interval = Some(0.5);
        let tr = integrate_full(&cfg, &s, 1.0, &o).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,x1,y1,x2,y2,x3,y3,h,theta0,z0x,z0y");
        assert_eq!(lines.len(), 4);
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first.len(), 11);
        assert_eq!(first[1], 1.0);
        assert!(lines[1].contains("1.0000000000000000e0"));
    }

    #[test]
    fn reduced_csv_layout() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let st = ReducedState::new(PauliCoords::new([1.0, 0.0, 0.0, 1.0])).unwrap();
        let tr = integrate_reduced(&st, &pb, 1.0, &IntegratorOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_reduced_csv(&mut buf, &tr).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,a0,a1,a2,a3,h,casimir_drift\n"));
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 7);
    }

    #[test]
    fn grid_csv_writes_inf() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let g = sample_portrait(1.0, &pb, ChartKind::Phi, 8, 8).unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &g).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(text.lines().any(|l| l.ends_with(",inf")));
    }
}
