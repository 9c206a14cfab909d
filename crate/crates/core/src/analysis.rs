//! Measured diagnostics: flatness against translated cones, dichotomy of the
//! scale-normalized Dirichlet average, Hölder seminorms, nondegeneracy,
//! distance bounds, free-boundary geometry, tangency and subsolution checks.

use crate::energy::rescaled_dirichlet_avg;
use crate::error::{Error, Result};
use crate::exact::{eval_profile, eval_u, ProfileParams};
use crate::grid::{
    distance_to_sets, nearest_interface, Interface, Point, Region, ScalarField, SlitGrid, SlitMask,
};
use crate::scalar::Real;
use crate::solve::blowup_rescale;
use crate::sum::ls_slope;
use serde::Serialize;
use std::sync::Arc;

/// Unit direction in the slit hyperplane `R^n`; the second component is
/// unused for `n = 1`.
pub type Direction<F> = [F; 2];

/// One scale of a flatness experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlatnessRecord<F> {
    pub r: F,
    pub nu: Direction<F>,
    pub eps: F,
}

/// Per-scale flatness records with the fitted decay exponent.
///
/// `eps` is the absolute trapping width at scale `r`; geometric decay of
/// `eps/r` shows up as `alpha_hat > 0`, where `alpha_hat` is the slope of
/// `log eps` against `log r` minus one.
#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport<F> {
    pub records: Vec<FlatnessRecord<F>>,
    pub alpha_hat: Option<F>,
    pub truncated: bool,
}

/// Smallest `eps >= 0` with `U(x·ν - eps, x_{n+1}) ≤ u ≤ U(x·ν + eps, x_{n+1})`
/// on the region, bisected to resolution `h/4`; infinity if even `eps = 1`
/// fails.
pub fn flatness_eps<F: Real>(u: &ScalarField<F>, region: &[usize], nu: Direction<F>) -> F {
    let g = u.grid();
    let n = g.n();
    let feasible = |eps: F| -> bool {
        for &i in region {
            let p = g.coord(i);
            let t = if n == 1 { nu[0] * p[0] } else { nu[0] * p[0] + nu[1] * p[1] };
            let s = p[n];
            let v = u.value(i);
            if v < eval_u(t - eps, s) || v > eval_u(t + eps, s) {
                return false;
            }
        }
        true
    };
    if !feasible(F::one()) {
        return F::infinity();
    }
    if feasible(F::zero()) {
        return F::zero();
    }
    let mut lo = F::zero();
    let mut hi = F::one();
    let res = g.spacing() * F::of(0.25);
    while hi - lo > res {
        let mid = (lo + hi) * F::of(0.5);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Minimizes [`flatness_eps`] over directions of the slit hyperplane.
///
/// For `n = 1` the slit leaves only `±e_1`. For `n = 2` the circle is
/// scanned coarsely and then refined around the incumbent until the angular
/// step drops below a quarter of the incumbent flatness.
pub fn best_direction_flatness<F: Real>(
    u: &ScalarField<F>,
    region: &[usize],
) -> (Direction<F>, F) {
    let g = u.grid();
    if g.n() == 1 {
        let plus = flatness_eps(u, region, [F::one(), F::zero()]);
        let minus = flatness_eps(u, region, [-F::one(), F::zero()]);
        return if plus <= minus {
            ([F::one(), F::zero()], plus)
        } else {
            ([-F::one(), F::zero()], minus)
        };
    }
    let dir = |phi: F| -> Direction<F> {
        let (s, c) = phi.sin_cos();
        [s, c]
    };
    let eval = |phi: F| flatness_eps(u, region, dir(phi));
    // coarse full-circle scan
    let mut best_phi = F::zero();
    let mut best = eval(best_phi);
    let coarse = 32usize;
    for k in 0..coarse {
        let phi = F::of(-1.0 + 2.0 * k as f64 / coarse as f64) * F::PI();
        let e = eval(phi);
        if e < best {
            best = e;
            best_phi = phi;
        }
    }
    let mut step = F::of(2.0) * F::PI() / F::of(coarse as f64);
    let floor = F::of(1e-4);
    while step > (best * F::of(0.25)).max(floor) {
        step = step * F::of(0.2);
        // the objective is quantized at the bisection resolution, so flat
        // plateaus are common: recentre on the plateau midpoint instead of
        // demanding strict improvement
        let mut plateau_lo = best_phi;
        let mut plateau_hi = best_phi;
        for k in -5i32..=5 {
            let phi = best_phi + step * F::of(k as f64);
            let e = eval(phi);
            if e < best {
                best = e;
                plateau_lo = phi;
                plateau_hi = phi;
            } else if e == best {
                plateau_lo = plateau_lo.min(phi);
                plateau_hi = plateau_hi.max(phi);
            }
        }
        best_phi = (plateau_lo + plateau_hi) * F::of(0.5);
    }
    (dir(best_phi), best)
}

/// Improvement-of-flatness experiment at a free-boundary point at the origin.
///
/// At each scale `r_k = eta^k` the blow-up rescaling is measured on the unit
/// ball with [`best_direction_flatness`]; the absolute flatness is
/// `eps_k = r_k * eps(rescaled)`. The run truncates (with a flag) once
/// `eps_k > 0.2 r_k`, the trapping regime's edge.
pub fn improvement_of_flatness_run<F: Real>(
    u: &ScalarField<F>,
    eta: F,
    depth: usize,
) -> Result<FlatnessReport<F>> {
    let g = u.grid();
    let h = g.spacing();
    if !(eta > F::zero() && eta < F::one()) {
        return Err(Error::Config(format!("eta must lie in (0,1), got {}", eta.as_f64())));
    }
    if eta.powi(depth as i32) < F::of(16.0) * h {
        return Err(Error::UnderResolved(format!(
            "eta^depth = {} under 16h = {}",
            eta.powi(depth as i32).as_f64(),
            (F::of(16.0) * h).as_f64()
        )));
    }
    let mask = SlitMask::from_field(u);
    let (_, d) = nearest_interface(&mask, [F::zero(); 3])?;
    if d > F::of(2.0) * h {
        return Err(Error::Config(format!(
            "no free-boundary interface within 2h of the origin (nearest at {})",
            d.as_f64()
        )));
    }
    let region: Vec<usize> = g.ball_nodes([F::zero(); 3], F::one());
    let mut records = Vec::with_capacity(depth + 1);
    let mut truncated = false;
    for k in 0..=depth {
        let r = eta.powi(k as i32);
        let w = blowup_rescale(u, r)?;
        let (nu, eps_rel) = best_direction_flatness(&w, &region);
        let eps = r * eps_rel;
        records.push(FlatnessRecord { r, nu, eps });
        if eps > F::of(0.2) * r {
            truncated = true;
            break;
        }
    }
    let fit: Vec<(F, F)> = records
        .iter()
        .filter(|rec| rec.eps > F::zero() && rec.eps.is_finite())
        .map(|rec| (rec.r.ln(), rec.eps.ln()))
        .collect();
    let alpha_hat = if fit.len() >= 2 {
        let xs: Vec<F> = fit.iter().map(|p| p.0).collect();
        let ys: Vec<F> = fit.iter().map(|p| p.1).collect();
        Some(ls_slope(&xs, &ys) - F::one())
    } else {
        None
    };
    Ok(FlatnessReport { records, alpha_hat, truncated })
}

/// Frozen constants of the dichotomy recursion check, calibrated once on the
/// trivial cone (`a ≡ sqrt(1/2)`, first alternative throughout for `M̂ = 1`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DichotomyConfig<F> {
    pub m_hat: F,
    pub c_eta: F,
}

impl<F: Real> Default for DichotomyConfig<F> {
    fn default() -> Self {
        Self { m_hat: F::one(), c_eta: F::of(2.0) }
    }
}

/// The sequence `a(eta^k)` with per-step alternative flags.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyTrace<F> {
    pub eta: F,
    pub values: Vec<F>,
    /// `a(eta^k) <= m_hat`
    pub first_alternative: Vec<bool>,
    /// `a(eta^{k+1}) <= a(eta^k)/2`
    pub second_alternative: Vec<bool>,
    pub config: DichotomyConfig<F>,
    /// Every step satisfies `a_{k+1} <= max(C M̂, a_k/2 + C M̂)`.
    pub recursion_ok: bool,
}

pub fn dichotomy_sequence<F: Real>(
    u: &ScalarField<F>,
    eta: F,
    depth: usize,
) -> Result<DichotomyTrace<F>> {
    dichotomy_sequence_with(u, eta, depth, DichotomyConfig::default())
}

pub fn dichotomy_sequence_with<F: Real>(
    u: &ScalarField<F>,
    eta: F,
    depth: usize,
    config: DichotomyConfig<F>,
) -> Result<DichotomyTrace<F>> {
    let h = u.grid().spacing();
    if !(eta > F::zero() && eta < F::one()) {
        return Err(Error::Config(format!("eta must lie in (0,1), got {}", eta.as_f64())));
    }
    if eta.powi(depth as i32) < F::of(16.0) * h {
        return Err(Error::UnderResolved(format!(
            "eta^depth = {} under 16h",
            eta.powi(depth as i32).as_f64()
        )));
    }
    let values: Result<Vec<F>> =
        (0..=depth).map(|k| rescaled_dirichlet_avg(u, eta.powi(k as i32))).collect();
    let values = values?;
    let slack = F::of(1e-12);
    let half = F::of(0.5);
    let first: Vec<bool> = values[..depth].iter().map(|a| *a <= config.m_hat).collect();
    let second: Vec<bool> =
        (0..depth).map(|k| values[k + 1] <= half * values[k] + slack).collect();
    let recursion_ok = (0..depth).all(|k| {
        let bound =
            (config.c_eta * config.m_hat).max(half * values[k] + config.c_eta * config.m_hat);
        values[k + 1] <= bound + slack
    });
    Ok(DichotomyTrace {
        eta,
        values,
        first_alternative: first,
        second_alternative: second,
        config,
        recursion_ok,
    })
}

/// Hölder seminorm `max |u(X) - u(Y)| / |X - Y|^exponent` over node pairs.
///
/// Regions larger than `33^(n+1)` nodes are subsampled deterministically;
/// the node nearest the region's centroid and the extreme-value nodes are
/// always kept, since the sup for root-type fields is anchored there.
pub fn holder_seminorm<F: Real>(u: &ScalarField<F>, exponent: F, region: &[usize]) -> F {
    assert!(exponent > F::zero() && exponent <= F::one(), "exponent must lie in (0, 1]");
    let g = u.grid();
    let cap = 33usize.pow(g.dim() as u32);
    let sample: Vec<usize> = if region.len() <= cap {
        region.to_vec()
    } else {
        let stride = region.len().div_ceil(cap);
        let mut s: Vec<usize> = region.iter().copied().step_by(stride).collect();
        let centroid = {
            let mut c = [F::zero(); 3];
            for &i in region {
                let p = g.coord(i);
                for a in 0..3 {
                    c[a] += p[a];
                }
            }
            let k = F::of(region.len() as f64);
            [c[0] / k, c[1] / k, c[2] / k]
        };
        let center = region
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let da = crate::grid::dist(g.coord(a), centroid);
                let db = crate::grid::dist(g.coord(b), centroid);
                da.partial_cmp(&db).expect("finite distances")
            })
            .expect("nonempty region");
        let hi = region
            .iter()
            .copied()
            .max_by(|&a, &b| u.value(a).partial_cmp(&u.value(b)).expect("finite values"));
        let lo = region
            .iter()
            .copied()
            .min_by(|&a, &b| u.value(a).partial_cmp(&u.value(b)).expect("finite values"));
        s.push(center);
        s.extend(hi);
        s.extend(lo);
        s.sort_unstable();
        s.dedup();
        s
    };
    let mut worst = F::zero();
    for (idx, &i) in sample.iter().enumerate() {
        let pi = g.coord(i);
        let vi = u.value(i);
        for &j in &sample[idx + 1..] {
            let d = crate::grid::dist(pi, g.coord(j));
            if d > F::zero() {
                let q = (vi - u.value(j)).abs() / d.powf(exponent);
                if q > worst {
                    worst = q;
                }
            }
        }
    }
    worst
}

/// Worst nondegeneracy ratio `max_{B_r(X0)} u / sqrt(r)` over free-boundary
/// interface points `X0` and the given radii.
pub fn nondegeneracy_scan<F: Real>(
    u: &ScalarField<F>,
    mask: &SlitMask<F>,
    radii: &[F],
) -> Result<F> {
    let g = u.grid();
    let h = g.spacing();
    let interfaces = mask.interfaces();
    if interfaces.is_empty() {
        return Err(Error::EmptySet("free boundary has no interfaces".into()));
    }
    for &r in radii {
        if r < F::of(8.0) * h {
            return Err(Error::UnderResolved(format!("radius {} below 8h", r.as_f64())));
        }
    }
    let mut worst = F::infinity();
    for itf in &interfaces {
        for &r in radii {
            let mut peak = F::zero();
            for i in g.ball_nodes(itf.midpoint, r) {
                peak = peak.max(u.value(i));
            }
            let ratio = peak / r.sqrt();
            if ratio < worst {
                worst = ratio;
            }
        }
    }
    Ok(worst)
}

/// Floor of `u(X) sqrt(d_F(X)) / d_Z(X)` over a region, skipping nodes too
/// close to the zero set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistanceBoundReport<F> {
    pub floor: F,
    pub skipped: usize,
    pub sampled: usize,
}

pub fn distance_bound_check<F: Real>(
    u: &ScalarField<F>,
    mask: &SlitMask<F>,
    region: &[usize],
) -> Result<DistanceBoundReport<F>> {
    let g = u.grid();
    let d = distance_to_sets(g, mask);
    if d.z_empty {
        return Err(Error::EmptySet("zero set is empty".into()));
    }
    if d.f_empty {
        return Err(Error::EmptySet("free boundary is empty".into()));
    }
    let cut = F::of(2.0) * g.spacing();
    let mut floor = F::infinity();
    let mut skipped = 0usize;
    let mut sampled = 0usize;
    for &i in region {
        let dz = d.d_z.value(i);
        if dz < cut {
            skipped += 1;
            continue;
        }
        sampled += 1;
        let ratio = u.value(i) * d.d_f.value(i).sqrt() / dz;
        if ratio < floor {
            floor = ratio;
        }
    }
    if sampled == 0 {
        return Err(Error::EmptySet("every region node sits within 2h of the zero set".into()));
    }
    Ok(DistanceBoundReport { floor, skipped, sampled })
}

/// `(n-1)`-measure of the free boundary inside a region: interface count for
/// `n = 1` (counting measure), count times `h` for `n = 2`.
pub fn free_boundary_measure<F: Real>(mask: &SlitMask<F>, region: &Region<F>) -> F {
    let g = mask.grid();
    let count = mask.interfaces().iter().filter(|itf| region.contains(itf.midpoint)).count();
    F::of(count as f64) * g.spacing().powi(g.n() as i32 - 1)
}

/// Symmetric Hausdorff distance between two interface sets (midpoints).
pub fn hausdorff_distance<F: Real>(a: &[Interface<F>], b: &[Interface<F>]) -> Result<F> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("hausdorff distance needs nonempty sets".into()));
    }
    let directed = |from: &[Interface<F>], to: &[Interface<F>]| -> F {
        let mut worst = F::zero();
        for p in from {
            let mut best = F::infinity();
            for q in to {
                let d = crate::grid::dist(p.midpoint, q.midpoint);
                if d < best {
                    best = d;
                }
            }
            if best > worst {
                worst = best;
            }
        }
        worst
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Outcome of a tangency test against a comparison profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TouchClass {
    StrictlyAbove,
    Tangent,
    Crossing,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TangencyWitness<F> {
    pub classification: TouchClass,
    /// Largest translation `t >= 0` with `u >= V(· + t e_n)` on the inner
    /// quarter ball (capped at 1).
    pub t_star: F,
    /// `min (u - V)` over the full region; negative exactly for `Crossing`.
    pub gap_min: F,
    /// Location of the minimal gap (touching point).
    pub witness: Point<F>,
}

/// Tests where `u` sits relative to the translates of a comparison profile
/// on the ball `B_r(center)`: verifies `u >= V` there, then pushes `V` up by
/// `t e_n` as far as possible on the inner quarter ball.
pub fn comparison_touch_test<F: Real>(
    u: &ScalarField<F>,
    p: &ProfileParams<F>,
    center: Point<F>,
    r: F,
) -> Result<TangencyWitness<F>> {
    let g = u.grid();
    let h = g.spacing();
    let outer = g.ball_nodes(center, r);
    if outer.is_empty() {
        return Err(Error::EmptySet("region contains no nodes".into()));
    }
    let mut gap_min = F::infinity();
    let mut witness = [F::zero(); 3];
    for &i in &outer {
        let x = g.coord(i);
        let gap = u.value(i) - eval_profile(x, p)?;
        if gap < gap_min {
            gap_min = gap;
            witness = x;
        }
    }
    if gap_min < F::zero() {
        return Ok(TangencyWitness {
            classification: TouchClass::Crossing,
            t_star: F::zero(),
            gap_min,
            witness,
        });
    }
    let inner = g.ball_nodes(center, r * F::of(0.25));
    let feasible = |t: F| -> Result<bool> {
        let shifted = p.translated(t);
        for &i in &inner {
            if u.value(i) < eval_profile(g.coord(i), &shifted)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let t_star;
    if feasible(F::one())? {
        t_star = F::one();
    } else {
        let mut lo = F::zero();
        let mut hi = F::one();
        let res = h * F::of(0.25);
        while hi - lo > res {
            let mid = (lo + hi) * F::of(0.5);
            if feasible(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t_star = lo;
    }
    // witness of the near-touch: minimal gap against the best translate
    let shifted = p.translated(t_star);
    let mut near_gap = F::infinity();
    for &i in &inner {
        let x = g.coord(i);
        let gap = u.value(i) - eval_profile(x, &shifted)?;
        if gap < near_gap {
            near_gap = gap;
            witness = x;
        }
    }
    let classification =
        if t_star <= h * F::of(0.5) { TouchClass::Tangent } else { TouchClass::StrictlyAbove };
    Ok(TangencyWitness { classification, t_star, gap_min, witness })
}

/// Finite-difference certificate that a profile is a comparison subsolution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SubsolutionReport<F> {
    /// `min (Δ_h V - μ² |x_{n+1}|)` over the sampled positivity set.
    pub interior_margin: F,
    /// `min Δ_h V` alone (sign-symmetry diagnostics).
    pub laplacian_min: F,
    /// Sup of `|V(x0 + rν, s) - U(r, s)| / |(r, s)|` over free-boundary
    /// sample points: bounded iff `V` matches the cone to order `1/2` at its
    /// free boundary.
    pub expansion_sup: F,
    pub sampled: usize,
    pub skipped: usize,
}

/// Evaluates the subsolution inequality `Δ_h V ≥ μ² |x_{n+1}|` on the given
/// sample nodes (those inside the positivity set, at profile radius
/// `ρ ≥ 10h`; others are skipped and counted).
pub fn subsolution_certificate<F: Real>(
    grid: &Arc<SlitGrid<F>>,
    p: &ProfileParams<F>,
    sample: &[usize],
) -> Result<SubsolutionReport<F>> {
    let h = grid.spacing();
    let n = grid.n();
    let mu2 = p.mu * p.mu;
    let mut margin = F::infinity();
    let mut lap_min = F::infinity();
    let mut sampled = 0usize;
    let mut skipped = 0usize;
    for &i in sample {
        let x = grid.coord(i);
        let (t, s) = p.profile_coords(x)?;
        let rho = t.hypot(s);
        if rho < F::of(10.0) * h || eval_profile(x, p)? <= F::zero() {
            skipped += 1;
            continue;
        }
        // interior stencil only
        let mi = grid.multi(i);
        if (0..grid.dim()).any(|a| mi[a] == 0 || mi[a] + 1 == grid.per_axis()) {
            skipped += 1;
            continue;
        }
        sampled += 1;
        let mut lap = F::zero();
        let center = eval_profile(x, p)?;
        for a in 0..grid.dim() {
            let mut xp = x;
            xp[a] += h;
            let mut xm = x;
            xm[a] -= h;
            lap += eval_profile(xp, p)? + eval_profile(xm, p)? - F::of(2.0) * center;
        }
        lap = lap / (h * h);
        lap_min = lap_min.min(lap);
        margin = margin.min(lap - mu2 * x[n].abs());
    }
    if sampled == 0 {
        return Err(Error::EmptySet("no sample nodes survive the guards".into()));
    }

    // expansion at the free boundary of V: compare against the cone in the
    // normal-section coordinates
    let mut expansion = F::zero();
    let probes: Vec<F> = (1..=8).map(|k| F::of(k as f64) * h * F::of(4.0)).collect();
    let fb_xs: Vec<F> = if n == 1 {
        vec![F::zero()]
    } else {
        (-4..=4).map(|k| F::of(k as f64) * F::of(0.05)).collect()
    };
    for &xp in &fb_xs {
        // free-boundary point and inward normal in slit coordinates
        let (x0, normal) = if n == 1 {
            ([-p.t0, F::zero()], [F::one(), F::zero()])
        } else {
            let fp = p.xi() + p.m() * xp;
            let len = (F::one() + fp * fp).sqrt();
            let surf = p.xi() * xp + F::of(0.5) * p.m() * xp * xp;
            ([xp, surf - p.t0], [-fp / len, F::one() / len])
        };
        for &r in &probes {
            for &s in &probes {
                let mut x = [F::zero(); 3];
                if n == 1 {
                    x[0] = x0[0] + r;
                } else {
                    x[0] = x0[0] + r * normal[0];
                    x[1] = x0[1] + r * normal[1];
                }
                x[n] = s;
                if x[..=n].iter().any(|c| c.abs() > grid.halfwidth()) {
                    continue;
                }
                let v = eval_profile(x, p)?;
                let dev = (v - eval_u(r, s)).abs() / r.hypot(s);
                expansion = expansion.max(dev);
            }
        }
    }
    Ok(SubsolutionReport {
        interior_margin: margin,
        laplacian_min: lap_min,
        expansion_sup: expansion,
        sampled,
        skipped,
    })
}
