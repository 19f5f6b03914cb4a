//! Self-contained scalar and simplex minimizers used by the risk scans.

/// Golden-section search on `[lo, hi]`, shrinking the bracket until its
/// width drops below `tol`.  Every evaluation is reported through
/// `on_eval`; the best evaluated point is returned, so the result is
/// always a probed value rather than an interpolation.
pub fn golden_section_min<F, E>(mut f: F, lo: f64, hi: f64, tol: f64, mut on_eval: E) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
    E: FnMut(f64, f64),
{
    assert!(hi > lo, "golden_section_min: empty bracket");
    let invphi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c);
    on_eval(c, fc);
    let mut fd = f(d);
    on_eval(d, fd);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };

    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
            on_eval(c, fc);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
            on_eval(d, fd);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// Nelder-Mead over a convex domain given by a projection map.
#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Convergence once the spread of simplex values drops below this.
    pub tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iter: 200,
            tol: 1e-8,
        }
    }
}

impl NelderMead {
    /// Minimizes `f` starting from `x0`, with an initial simplex of edge
    /// `scale`.  Candidate points are pushed through `project` before
    /// evaluation, which keeps the search inside the domain.
    pub fn minimize<F, P>(&self, mut f: F, project: P, x0: &[f64], scale: f64) -> (Vec<f64>, f64)
    where
        F: FnMut(&[f64]) -> f64,
        P: Fn(&mut Vec<f64>),
    {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let mut base = x0.to_vec();
        project(&mut base);
        let fx = f(&base);
        simplex.push((base.clone(), fx));
        for i in 0..n {
            let mut v = base.clone();
            v[i] += scale;
            project(&mut v);
            if v == base {
                // Projection collapsed the vertex; step the other way.
                v = base.clone();
                v[i] -= scale;
                project(&mut v);
            }
            let fv = f(&v);
            simplex.push((v, fv));
        }

        const ALPHA: f64 = 1.0; // reflection
        const GAMMA: f64 = 2.0; // expansion
        const RHO: f64 = 0.5; // contraction
        const SIGMA: f64 = 0.5; // shrink

        for _ in 0..self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[n].1 - simplex[0].1 < self.tol {
                break;
            }
            // Centroid of all but the worst vertex.
            let mut centroid = vec![0.0; n];
            for (v, _) in &simplex[..n] {
                for i in 0..n {
                    centroid[i] += v[i] / n as f64;
                }
            }
            let worst = simplex[n].clone();

            let mut reflected: Vec<f64> = (0..n)
                .map(|i| centroid[i] + ALPHA * (centroid[i] - worst.0[i]))
                .collect();
            project(&mut reflected);
            let fr = f(&reflected);

            if fr < simplex[0].1 {
                let mut expanded: Vec<f64> = (0..n)
                    .map(|i| centroid[i] + GAMMA * (centroid[i] - worst.0[i]))
                    .collect();
                project(&mut expanded);
                let fe = f(&expanded);
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
            } else {
                let mut contracted: Vec<f64> = (0..n)
                    .map(|i| centroid[i] + RHO * (worst.0[i] - centroid[i]))
                    .collect();
                project(&mut contracted);
                let fc = f(&contracted);
                if fc < worst.1 {
                    simplex[n] = (contracted, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        for i in 0..n {
                            entry.0[i] = best[i] + SIGMA * (entry.0[i] - best[i]);
                        }
                        project(&mut entry.0);
                        entry.1 = f(&entry.0);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        simplex.swap_remove(0)
    }
}
