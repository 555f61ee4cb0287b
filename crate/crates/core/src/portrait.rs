//! Phase portraits of the reduced flow in the two cylindrical charts of the
//! shape sphere, and contour extraction by marching squares.
//!
//! * `Phi`: `u = a1 = I1`, `v = 2 phi1`, so `(a2, a3) = rho (cos v, sin v)`.
//! * `Alpha`: `u = a3`, `v = alpha`, so `(a1, a2) = rho (cos v, sin v)`.
//!
//! In both, `rho = sqrt(mu^2 - u^2)` and `v` lives in `[0, 2 pi)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{wrap_period, Real};
use crate::reduced::reduced_hamiltonian;
use crate::shape_algebra::{PauliBasis, PauliCoords};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    Phi,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartPoint<T> {
    pub chart: ChartKind,
    pub u: T,
    pub v: T,
}

fn check_mu<T: Real>(mu: T) -> Result<()> {
    if mu.is_zero() {
        return Err(Error::TripleCollision);
    }
    if !(mu > T::zero()) || !mu.is_finite() {
        return Err(Error::DomainError(format!("mu = {mu} must be positive")));
    }
    Ok(())
}

pub fn chart_to_pauli<T: Real>(cp: &ChartPoint<T>, mu: T) -> Result<PauliCoords<T>> {
    check_mu(mu)?;
    let slack = T::lit(64.0) * T::epsilon() * mu;
    if !(cp.u.abs() <= mu + slack) || !cp.v.is_finite() {
        return Err(Error::DomainError(format!("|u| = {} exceeds mu = {mu}", cp.u.abs())));
    }
    let rho = (mu * mu - cp.u * cp.u).max(T::zero()).sqrt();
    let (sn, cs) = cp.v.sin_cos();
    Ok(match cp.chart {
        ChartKind::Phi => PauliCoords::new([mu, cp.u, rho * cs, rho * sn]),
        ChartKind::Alpha => {
            if cp.u.abs() >= mu {
                return Err(Error::PoleSingularity);
            }
            PauliCoords::new([mu, rho * cs, rho * sn, cp.u])
        }
    })
}

/// Chart coordinates of a point of the sphere. On the chart's singular line
/// (`a1 = +-mu` for `Phi`, the poles for `Alpha`) `v` is reported as 0.
pub fn pauli_to_chart<T: Real>(a: &PauliCoords<T>, chart: ChartKind) -> ChartPoint<T> {
    let [_, a1, a2, a3] = a.a;
    let (u, x, y) = match chart {
        ChartKind::Phi => (a1, a2, a3),
        ChartKind::Alpha => (a3, a1, a2),
    };
    let v = if x.is_zero() && y.is_zero() {
        T::zero()
    } else {
        wrap_period(y.atan2(x), T::TAU())
    };
    ChartPoint { chart, u, v }
}

/// Samples of the reduced energy on a uniform chart grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitGrid<T> {
    pub mu: T,
    pub chart: ChartKind,
    pub nu: usize,
    pub nv: usize,
    /// Cell-centered in `(-mu, mu)`.
    pub u: Vec<T>,
    /// `2 pi k / nv`.
    pub v: Vec<T>,
    /// Row-major in `u`; `+inf` at and next to collisions.
    pub values: Vec<T>,
    /// `B12`, `B23`, `B31`, where they exist on this leaf.
    pub collision_points: Vec<ChartPoint<T>>,
}

impl<T: Real> PortraitGrid<T> {
    pub fn value(&self, i: usize, k: usize) -> T {
        self.values[i * self.nv + k]
    }

    pub fn du(&self) -> T {
        T::two() * self.mu / T::lit(self.nu as f64)
    }

    pub fn dv(&self) -> T {
        T::TAU() / T::lit(self.nv as f64)
    }

    /// Smallest and largest finite samples.
    pub fn finite_range(&self) -> Option<(T, T)> {
        let mut it = self.values.iter().filter(|x| x.is_finite());
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), &x| (lo.min(x), hi.max(x))))
    }
}

/// Periodic distance on the circle of length `2 pi`.
fn circle_gap<T: Real>(a: T, b: T) -> T {
    let d = wrap_period(a - b, T::TAU());
    d.min(T::TAU() - d)
}

pub fn sample_portrait<T: Real>(
    mu: T,
    pb: &PauliBasis<T>,
    chart: ChartKind,
    nu: usize,
    nv: usize,
) -> Result<PortraitGrid<T>> {
    check_mu(mu)?;
    if nu < 8 || nv < 8 {
        return Err(Error::InvalidGrid(format!("need nu, nv >= 8, got {nu} x {nv}")));
    }
    let du = T::two() * mu / T::lit(nu as f64);
    let dv = T::TAU() / T::lit(nv as f64);
    let u: Vec<T> = (0..nu)
        .map(|i| -mu + du * (T::lit(i as f64) + T::half()))
        .collect();
    let v: Vec<T> = (0..nv).map(|k| dv * T::lit(k as f64)).collect();

    let collision_points: Vec<ChartPoint<T>> = [2, 0, 1]
        .iter()
        .filter_map(|&i| pb.collision_point(i, mu))
        .map(|a| pauli_to_chart(&a, chart))
        .collect();

    let near = |uu: T, vv: T| {
        let grow = T::one() + T::lit(1e-6);
        collision_points.iter().any(|c| {
            let du_ok = (uu - c.u).abs() <= du * grow;
            // on the singular line of the chart every v is adjacent
            let on_line = (c.u.abs() - mu).abs() <= T::lit(1e-9) * mu;
            du_ok && (on_line || circle_gap(vv, c.v) <= dv * grow)
        })
    };
    let eval_row = |i: usize| -> Vec<T> {
        v.iter()
            .map(|&vv| {
                if near(u[i], vv) {
                    return T::infinity();
                }
                let cp = ChartPoint { chart, u: u[i], v: vv };
                chart_to_pauli(&cp, mu)
                    .and_then(|a| reduced_hamiltonian(&a, pb))
                    .unwrap_or(T::infinity())
            })
            .collect()
    };

    // rows are independent; results are stitched back in order
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(nu);
    let chunk = nu.div_ceil(workers);
    let rows: Vec<Vec<T>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let eval_row = &eval_row;
                scope.spawn(move || {
                    (w * chunk..((w + 1) * chunk).min(nu))
                        .map(eval_row)
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("portrait worker panicked"))
            .collect()
    });

    Ok(PortraitGrid {
        mu,
        chart,
        nu,
        nv,
        u,
        v,
        values: rows.into_iter().flatten().collect(),
        collision_points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline<T> {
    /// `(u, v)` pairs, `v` in `[0, 2 pi)`.
    pub points: Vec<(T, T)>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet<T> {
    pub level: T,
    pub polylines: Vec<Polyline<T>>,
}

/// An edge of the sampling grid: `(along_u, i, k)`. Along-`u` edges join
/// `(i, k)` and `(i + 1, k)`; the others join `(i, k)` and `(i, k + 1 mod nv)`.
type EdgeId = (bool, usize, usize);

/// Marching-squares contours of `grid` at each level. Cells with a
/// non-finite corner are skipped; `v` is treated as periodic. A level
/// outside the finite range of the grid yields no polylines.
pub fn extract_contours<T: Real>(grid: &PortraitGrid<T>, levels: &[T]) -> Vec<ContourSet<T>> {
    levels
        .iter()
        .map(|&level| ContourSet {
            level,
            polylines: contour_level(grid, level),
        })
        .collect()
}

fn contour_level<T: Real>(grid: &PortraitGrid<T>, level: T) -> Vec<Polyline<T>> {
    let (nu, nv) = (grid.nu, grid.nv);
    let dv = grid.dv();
    let crossing = |e: EdgeId| -> (T, T) {
        let (along_u, i, k) = e;
        let (i2, k2) = if along_u { (i + 1, k) } else { (i, (k + 1) % nv) };
        let (f0, f1) = (grid.value(i, k), grid.value(i2, k2));
        let t = ((level - f0) / (f1 - f0)).max(T::zero()).min(T::one());
        if along_u {
            (grid.u[i] + t * (grid.u[i2] - grid.u[i]), grid.v[k])
        } else {
            (grid.u[i], wrap_period(grid.v[k] + t * dv, T::TAU()))
        }
    };

    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..nu.saturating_sub(1) {
        for k in 0..nv {
            let k1 = (k + 1) % nv;
            // corners counter-clockwise: (i,k), (i+1,k), (i+1,k1), (i,k1)
            let c = [
                grid.value(i, k),
                grid.value(i + 1, k),
                grid.value(i + 1, k1),
                grid.value(i, k1),
            ];
            if c.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let above = c.map(|x| x >= level);
            // edges between consecutive corners
            let edges: [EdgeId; 4] = [(true, i, k), (false, i + 1, k), (true, i, k1), (false, i, k)];
            let cut: Vec<usize> = (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let center = (c[0] + c[1] + c[2] + c[3]) / T::lit(4.0);
                    // pair each edge with a neighbour so that the corners
                    // sharing the center's side stay connected
                    if (center >= level) == above[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut at_edge: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (n, (a, b)) in segments.iter().enumerate() {
        at_edge.entry(*a).or_default().push(n);
        at_edge.entry(*b).or_default().push(n);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start: usize, from: EdgeId, used: &mut Vec<bool>| -> Polyline<T> {
        let mut edges = vec![from];
        let mut seg = start;
        let mut here = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == here { b } else { a };
            edges.push(next);
            here = next;
            let further = at_edge[&here].iter().copied().find(|&m| !used[m]);
            match further {
                Some(m) => seg = m,
                None => break,
            }
        }
        let closed = edges.len() > 2 && edges.first() == edges.last();
        if closed {
            edges.pop();
        }
        Polyline {
            points: edges.into_iter().map(crossing).collect(),
            closed,
        }
    };

    // open chains first, starting at their free ends
    for n in 0..segments.len() {
        if used[n] {
            continue;
        }
        let (a, b) = segments[n];
        for end in [a, b] {
            if at_edge[&end].len() == 1 && !used[n] {
                out.push(walk(n, end, &mut used));
            }
        }
    }
    for n in 0..segments.len() {
        if !used[n] {
            let start = segments[n].0;
            out.push(walk(n, start, &mut used));
        }
    }
    out
}

/// Renders contours and collision dots as a standalone SVG document
/// (viewbox 800 x 500, `v` horizontal, `u` vertical).
pub fn render_svg<T: Real>(grid: &PortraitGrid<T>, contours: &[ContourSet<T>]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const M: f64 = 30.0;
    let mu = grid.mu.as_f64();
    let px = |v: T| M + v.as_f64() / std::f64::consts::TAU * (W - 2.0 * M);
    let py = |u: T| H - M - (u.as_f64() + mu) / (2.0 * mu) * (H - 2.0 * M);
    let (u_name, v_name) = match grid.chart {
        ChartKind::Phi => ("I1", "2 phi1"),
        ChartKind::Alpha => ("a3", "alpha"),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{v_name}</text>"#,
        W / 2.0,
        H - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="10" y="{}" font-size="12" transform="rotate(-90 10 {})" text-anchor="middle">{u_name}</text>"#,
        H / 2.0,
        H / 2.0
    );
    let half_width = (W - 2.0 * M) / 2.0;
    for set in contours {
        let mut d = String::new();
        for line in &set.polylines {
            let pts: Vec<(f64, f64)> = line.points.iter().map(|&(u, v)| (px(v), py(u))).collect();
            let mut prev: Option<(f64, f64)> = None;
            let ring = if line.closed { pts.first().copied() } else { None };
            for p in pts.iter().copied().chain(ring) {
                // a jump across the periodic seam starts a new subpath
                let cmd = match prev {
                    Some(q) if (p.0 - q.0).abs() < half_width => 'L',
                    _ => 'M',
                };
                let _ = write!(d, "{cmd}{:.2},{:.2} ", p.0, p.1);
                prev = Some(p);
            }
        }
        if !d.is_empty() {
            let _ = writeln!(
                s,
                r#"<path data-level="{}" d="{}" fill="none" stroke="steelblue" stroke-width="1"/>"#,
                set.level.as_f64(),
                d.trim_end()
            );
        }
    }
    for c in &grid.collision_points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#,
            px(c.v),
            py(c.u)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::find_relative_equilibria;
    use crate::shape_algebra::make_pauli;
    use crate::vortex::VortexStrengths;
    use std::f64::consts::PI;

    fn basis(g: [f64; 3]) -> PauliBasis<f64> {
        make_pauli(&VortexStrengths::from_array(g).unwrap(), None).unwrap()
    }

    #[test]
    fn chart_examples() {
        let a = chart_to_pauli(&ChartPoint { chart: ChartKind::Alpha, u: 0.0, v: 0.0 }, 1.0).unwrap();
        assert_eq!(a.a, [1.0, 1.0, 0.0, 0.0]);
        let a = chart_to_pauli(&ChartPoint { chart: ChartKind::Phi, u: 0.0, v: PI / 2.0 }, 1.5).unwrap();
        assert!(a.distance_max(&PauliCoords::new([1.5, 0.0, 0.0, 1.5])) < 1e-15);
        assert_eq!(
            chart_to_pauli(&ChartPoint { chart: ChartKind::Alpha, u: 1.0, v: 0.3 }, 1.0),
            Err(Error::PoleSingularity)
        );
        assert!(chart_to_pauli(&ChartPoint { chart: ChartKind::Phi, u: 1.2, v: 0.3 }, 1.0).is_err());
    }

    #[test]
    fn chart_round_trip() {
        let p = ChartPoint { chart: ChartKind::Phi, u: 0.37f64, v: 4.1 };
        let a = chart_to_pauli(&p, 1.3).unwrap();
        let q = pauli_to_chart(&a, ChartKind::Alpha);
        let b = chart_to_pauli(&q, 1.3).unwrap();
        assert!(a.distance_max(&b) < 1e-12);
        let back = pauli_to_chart(&b, ChartKind::Phi);
        assert!((back.u - p.u).abs() < 1e-12 && (back.v - p.v).abs() < 1e-12);
    }

    #[test]
    fn grid_shape_and_errors() {
        let pb = basis([1.0, 1.0, 1.0]);
        let g = sample_portrait(1.0, &pb, ChartKind::Alpha, 10, 12).unwrap();
        assert_eq!(g.values.len(), 120);
        assert!(g.u.iter().all(|u| u.abs() < 1.0));
        assert!(matches!(
            sample_portrait(1.0, &pb, ChartKind::Alpha, 4, 12),
            Err(Error::InvalidGrid(_))
        ));
        assert_eq!(
            sample_portrait(0.0, &pb, ChartKind::Alpha, 10, 12),
            Err(Error::TripleCollision)
        );
    }

    #[test]
    fn equal_strengths_are_three_fold_symmetric() {
        let pb = basis([1.0, 1.0, 1.0]);
        let g = sample_portrait(1.0, &pb, ChartKind::Alpha, 24, 48).unwrap();
        let mut worst = 0.0f64;
        for i in 0..g.nu {
            for k in 0..g.nv {
                let (x, y) = (g.value(i, k), g.value(i, (k + 16) % 48));
                assert_eq!(x.is_finite(), y.is_finite());
                if x.is_finite() {
                    worst = worst.max((x - y).abs());
                }
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn collision_dots_on_the_equator() {
        let pb = basis([0.08904, 0.28196, 0.629]);
        let g = sample_portrait(1.0, &pb, ChartKind::Alpha, 16, 32).unwrap();
        assert_eq!(g.collision_points.len(), 3);
        assert!(g.collision_points.iter().all(|c| c.u.abs() < 1e-12));
        assert!(g.collision_points[0].v.abs() < 1e-12);
        let gp = sample_portrait(1.0, &pb, ChartKind::Phi, 16, 32).unwrap();
        assert!((gp.collision_points[0].u - 1.0).abs() < 1e-12);
        // the whole top row of the phi chart touches B12
        assert!((0..32).all(|k| gp.value(15, k).is_infinite()));
    }

    #[test]
    fn samples_lie_above_the_minimum() {
        let pb = basis([0.08904, 0.28196, 0.629]);
        let eq = find_relative_equilibria(1.0, &pb, 40).unwrap();
        let hmin = eq
            .iter()
            .map(|st| reduced_hamiltonian(&st.a, &pb).unwrap())
            .fold(f64::INFINITY, f64::min);
        let g = sample_portrait(1.0, &pb, ChartKind::Alpha, 32, 64).unwrap();
        let (lo, _) = g.finite_range().unwrap();
        assert!(lo >= hmin - 1e-12, "{lo} < {hmin}");
    }

    #[test]
    fn contour_loops_around_the_pole() {
        let pb = basis([1.0, 1.0, 1.0]);
        let pole = reduced_hamiltonian(&PauliCoords::new([1.0, 0.0, 0.0, 1.0]), &pb).unwrap();
        let g = sample_portrait(1.0, &pb, ChartKind::Phi, 60, 120).unwrap();
        let sets = extract_contours(&g, &[pole + 0.01]);
        let loops: Vec<_> = sets[0].polylines.iter().filter(|p| p.closed).collect();
        assert!(!loops.is_empty());
        // a loop around (u, v) = (0, pi/2)
        let l = loops
            .iter()
            .find(|p| p.points.iter().all(|&(u, v)| u.abs() < 0.9 && v > 0.0 && v < PI))
            .expect("loop around the upper pole");
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(_, v) in &l.points {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(lo < PI / 2.0 && hi > PI / 2.0);

        assert!(extract_contours(&g, &[pole - 1.0])[0].polylines.is_empty());
    }

    #[test]
    fn contour_points_sit_on_the_level() {
        let pb = basis([0.3, 0.9, 1.4]);
        let g = sample_portrait(1.0, &pb, ChartKind::Alpha, 40, 80).unwrap();
        let (lo, hi) = g.finite_range().unwrap();
        let level = lo + 0.3 * (hi - lo).min(1.0);
        // first-order bound: largest jump between finite neighbours
        let mut bound = 0.0f64;
        for i in 0..g.nu {
            for k in 0..g.nv {
                let x = g.value(i, k);
                for (a, b) in [(i + 1, k), (i, (k + 1) % g.nv)] {
                    if a < g.nu && x.is_finite() && g.value(a, b).is_finite() {
                        bound = bound.max((x - g.value(a, b)).abs());
                    }
                }
            }
        }
        let sets = extract_contours(&g, &[level]);
        let mut n = 0;
        for line in &sets[0].polylines {
            for &(u, v) in &line.points {
                let a = chart_to_pauli(&ChartPoint { chart: ChartKind::Alpha, u, v }, 1.0).unwrap();
                let h = reduced_hamiltonian(&a, &pb).unwrap();
                assert!((h - level).abs() < bound);
                n += 1;
            }
        }
        assert!(n > 0);
    }

    #[test]
    fn svg_has_paths_and_dots() {
        let pb = basis([0.08904, 0.28196, 0.629]);
        let g = sample_portrait(1.0, &pb, ChartKind::Alpha, 20, 40).unwrap();
        let (lo, hi) = g.finite_range().unwrap();
        let svg = render_svg(&g, &extract_contours(&g, &[lo + 0.1 * (hi - lo), lo + 0.01 * (hi - lo)]));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("viewBox=\"0 0 800 500\""));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.matches("<path").count() >= 1);
    }
}
