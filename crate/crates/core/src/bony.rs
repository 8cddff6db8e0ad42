//! Paraproduct and remainder operators plus empirical verifiers for the
//! functional inequalities consumed by the solver's a priori estimates.
//!
//! Each verifier runs a seeded corpus of random band-limited fields, records
//! the smallest constant making the inequality hold across all trials, and
//! compares it against a calibrated bound frozen ahead of time. Certificates
//! are reproducible: the same seed reproduces measured constants bitwise.

use crate::data;
use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_total, BesovIndex, DyadicPartition};
use crate::spectral::{Exponent, SpectralField};

/// Outcome of one inequality verification run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct InequalityCertificate {
    pub lemma_id: String,
    pub trial_count: usize,
    /// Smallest constant making the inequality hold across all trials.
    pub measured_constant: f64,
    /// Constant frozen at calibration time.
    pub calibrated_bound: f64,
    pub pass: bool,
    pub seed: u64,
}

impl InequalityCertificate {
    fn new(lemma_id: &str, trials: usize, measured: f64, bound: f64, seed: u64) -> Self {
        InequalityCertificate {
            lemma_id: lemma_id.to_string(),
            trial_count: trials,
            measured_constant: measured,
            calibrated_bound: bound,
            pass: measured <= bound,
            seed,
        }
    }
}

/// Paraproduct `T_u v = sum_j S_(j-1) u * Delta_j v`.
pub fn paraproduct(
    u: &SpectralField,
    v: &SpectralField,
    partition: &DyadicPartition,
) -> Result<SpectralField> {
    u.same_grid(v)?;
    let mut acc = SpectralField::zeros(v.grid(), v.components().max(u.components()));
    for j in partition.block_range() {
        let low = partition.low_cutoff(u, j - 1);
        if low.l2_norm() == 0.0 {
            continue;
        }
        let term = low.pointwise_product(&partition.block(v, j))?;
        acc.axpy(1.0, &term);
    }
    Ok(acc)
}

/// Remainder `R(u, v) = sum_(|k-j|<=1) Delta_k u * Delta_j v`.
pub fn remainder(
    u: &SpectralField,
    v: &SpectralField,
    partition: &DyadicPartition,
) -> Result<SpectralField> {
    u.same_grid(v)?;
    let mut acc = SpectralField::zeros(v.grid(), v.components().max(u.components()));
    let u_blocks: Vec<SpectralField> = partition.block_range().map(|j| partition.block(u, j)).collect();
    let v_blocks: Vec<SpectralField> = partition.block_range().map(|j| partition.block(v, j)).collect();
    // group the diagonal and each symmetric off-diagonal pair so the result
    // is bitwise symmetric in (u, v)
    let n_blocks = u_blocks.len();
    for b in 0..n_blocks {
        acc.axpy(1.0, &u_blocks[b].pointwise_product(&v_blocks[b])?);
        if b + 1 < n_blocks {
            let lo_hi = u_blocks[b].pointwise_product(&v_blocks[b + 1])?;
            let hi_lo = u_blocks[b + 1].pointwise_product(&v_blocks[b])?;
            acc.axpy(1.0, &(&lo_hi + &hi_lo));
        }
    }
    Ok(acc)
}

/// Pointwise `ln(1 + h)` of a scalar field, transformed back and dealiased.
///
/// Requires `||h||_inf <= 1/2`; a violation signals loss of the smallness
/// regime rather than an internal bug.
pub fn compose_log1p(h: &SpectralField) -> Result<SpectralField> {
    if h.components() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            got: h.components(),
        });
    }
    let linf = h.linf_norm();
    if linf > 0.5 {
        return Err(Error::SmallnessLost(format!(
            "||h||_inf = {linf:.6} exceeds 1/2; composition ln(1+h) leaves the validated regime"
        )));
    }
    let phys = h.to_physical();
    let mapped: Vec<f64> = phys[0].iter().map(|&x| x.ln_1p()).collect();
    Ok(SpectralField::from_physical(h.grid(), &[mapped])?.dealiased())
}

fn safe_ratio(num: f64, den: f64) -> Option<f64> {
    if den > 1e-300 {
        Some(num / den)
    } else {
        None
    }
}

/// Frequency band for Bernstein trials.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub enum Band {
    /// Spectrum inside the ball of radius lambda.
    Ball(f64),
    /// Spectrum inside the annulus lambda * [3/4, 8/3].
    Annulus(f64),
}

fn deriv_sup_norm(u: &SpectralField, k: u32, p: Exponent) -> f64 {
    // sup over multi-indices of total order k of the L^p norm
    let mut sup = 0.0f64;
    for a in 0..=k {
        let b = k - a;
        let mut d = u.clone();
        for _ in 0..a {
            d = d.partial(0);
        }
        for _ in 0..b {
            d = d.partial(1);
        }
        sup = sup.max(d.lp_norm(p));
    }
    sup
}

/// Derivative/norm comparison for band-limited fields (order-k derivatives,
/// L^p -> L^q). Records the largest constant observed across trials; annulus
/// bands additionally exercise the reverse lower bound.
pub fn verify_bernstein(
    partition: &DyadicPartition,
    trials: usize,
    band: Band,
    k: u32,
    p: Exponent,
    q: Exponent,
    seed: u64,
    calibrated_bound: f64,
) -> Result<InequalityCertificate> {
    let grid = partition.grid();
    let d = 2.0;
    let (lambda, is_annulus) = match band {
        Band::Ball(l) => (l, false),
        Band::Annulus(l) => (l, true),
    };
    let max_band = match band {
        Band::Ball(l) => l,
        Band::Annulus(l) => l * 8.0 / 3.0,
    };
    if max_band > grid.corner_radius() {
        return Err(Error::Resolution(format!(
            "frequency band reaching {max_band:.2} exceeds the resolved radius {:.2}",
            grid.corner_radius()
        )));
    }
    let exponent = k as f64 + d * (p.reciprocal() - q.reciprocal());
    let mut measured = 0.0f64;
    let mut counted = 0;
    for t in 0..trials {
        let u = match band {
            Band::Ball(l) => data::ball_scalar(grid, seed.wrapping_add(t as u64), l),
            Band::Annulus(l) => data::annulus_scalar(grid, seed.wrapping_add(t as u64), l),
        };
        let base = u.lp_norm(p);
        if base < 1e-300 {
            continue;
        }
        counted += 1;
        let sup_q = deriv_sup_norm(&u, k, q);
        if let Some(r) = safe_ratio(sup_q, lambda.powf(exponent) * base) {
            measured = measured.max(r.powf(1.0 / (k as f64 + 1.0)));
        }
        if is_annulus {
            let sup_p = deriv_sup_norm(&u, k, p);
            if let Some(r) = safe_ratio(lambda.powi(k as i32) * base, sup_p) {
                measured = measured.max(r.powf(1.0 / (k as f64 + 1.0)));
            }
        }
    }
    let id = format!(
        "bernstein-k{}-{}-{}",
        k,
        if is_annulus { "annulus" } else { "ball" },
        match (p, q) {
            (Exponent::Finite(a), Exponent::Finite(b)) => format!("p{a}-q{b}"),
            (Exponent::Finite(a), Exponent::Infinity) => format!("p{a}-qinf"),
            (Exponent::Infinity, Exponent::Finite(b)) => format!("pinf-q{b}"),
            (Exponent::Infinity, Exponent::Infinity) => "pinf-qinf".to_string(),
        }
    );
    Ok(InequalityCertificate::new(&id, counted, measured, calibrated_bound, seed))
}

/// Paraproduct continuity, remainder continuity (including the zero-sum
/// endpoint at p = 2), and the algebra bounds, all at the solver-relevant
/// indices.
pub fn verify_product_laws(
    partition: &DyadicPartition,
    trials: usize,
    s: f64,
    seed: u64,
    calibrated_bound: f64,
) -> Result<Vec<InequalityCertificate>> {
    let grid = partition.grid();
    let two = Exponent::Finite(2.0);
    let inf = Exponent::Infinity;
    let t_neg = -0.5;

    let mut para_linf = 0.0f64; // ||T_u v||_(B^s) <= C^(|s|+1) ||u||_inf ||v||_(B^s)
    let mut para_neg = 0.0f64; // ||T_u v||_(B^(s+t)) <= C^(|s+t|+1)/(-t) ||u||_(B^t_(inf,inf)) ||v||_(B^s)
    let mut rem_pos = 0.0f64; // ||R(u,v)||_(B^(s1+s2)_2) <= C^(..)/(s1+s2) ||u||_(B^s1_2) ||v||_(B^s2_(inf))
    let mut rem_zero = 0.0f64; // endpoint s1+s2 = 0, target B^0_(2,inf)
    let mut alg_mixed = 0.0f64; // ||uv|| <= C^(s+1)/s (||u||_inf ||v||_(B^s) + sym)
    let mut alg_besov = 0.0f64; // ||uv|| <= C^(s+1)/s ||u||_(B^s) ||v||_(B^s), s > d/p

    let idx_s = BesovIndex::sobolev(s);
    for t in 0..trials {
        let u = data::corpus_scalar(grid, seed, 2 * t as u64, s).dealiased();
        let v = data::corpus_scalar(grid, seed, 2 * t as u64 + 1, s).dealiased();
        let u_bs = besov_total(&u, idx_s, partition);
        let v_bs = besov_total(&v, idx_s, partition);
        let u_inf = u.linf_norm();
        let v_inf = v.linf_norm();
        if u_bs < 1e-300 || v_bs < 1e-300 {
            continue;
        }

        let tuv = paraproduct(&u, &v, partition)?;
        if let Some(r) = safe_ratio(besov_total(&tuv, idx_s, partition), u_inf * v_bs) {
            para_linf = para_linf.max(r.powf(1.0 / (s.abs() + 1.0)));
        }
        let idx_st = BesovIndex::new(s + t_neg, two, two)?;
        let u_bt = besov_total(&u, BesovIndex::new(t_neg, inf, inf)?, partition);
        if let Some(r) = safe_ratio(besov_total(&tuv, idx_st, partition), u_bt * v_bs) {
            para_neg = para_neg.max(((-t_neg) * r).powf(1.0 / ((s + t_neg).abs() + 1.0)));
        }

        let ruv = remainder(&u, &v, partition)?;
        // s1 = s (p1 = 2), s2 = 1/2 (p2 = inf) -> target B^(s + 1/2)_(2, 2)
        let s2 = 0.5;
        let v_bs2 = besov_total(&v, BesovIndex::new(s2, inf, two)?, partition);
        let sum = s + s2;
        if let Some(r) = safe_ratio(
            besov_total(&ruv, BesovIndex::new(sum, two, two)?, partition),
            u_bs * v_bs2,
        ) {
            rem_pos = rem_pos.max((sum * r).powf(1.0 / (sum.abs() + 1.0)));
        }
        // endpoint: s1 = 1/2 (r1 = 1), s2 = -1/2 (r2 = inf), target B^0_(2, inf)
        let u_half = besov_total(&u, BesovIndex::new(0.5, two, Exponent::Finite(1.0))?, partition);
        let v_mhalf = besov_total(&v, BesovIndex::new(-0.5, inf, inf)?, partition);
        if let Some(r) = safe_ratio(
            besov_total(&ruv, BesovIndex::new(0.0, two, inf)?, partition),
            u_half * v_mhalf,
        ) {
            rem_zero = rem_zero.max(r);
        }

        let uv = u.pointwise_product(&v)?;
        let uv_bs = besov_total(&uv, idx_s, partition);
        if let Some(r) = safe_ratio(uv_bs, u_inf * v_bs + v_inf * u_bs) {
            alg_mixed = alg_mixed.max((s * r).powf(1.0 / (s + 1.0)));
        }
        // s = 1.5 > d/p = 1 for p = 2
        if let Some(r) = safe_ratio(uv_bs, u_bs * v_bs) {
            alg_besov = alg_besov.max((s * r).powf(1.0 / (s + 1.0)));
        }
    }
    Ok(vec![
        InequalityCertificate::new("paraproduct-linf", trials, para_linf, calibrated_bound, seed),
        InequalityCertificate::new("paraproduct-negative", trials, para_neg, calibrated_bound, seed),
        InequalityCertificate::new("remainder-positive-sum", trials, rem_pos, calibrated_bound, seed),
        InequalityCertificate::new("remainder-zero-sum", trials, rem_zero, calibrated_bound, seed),
        InequalityCertificate::new("algebra-mixed", trials, alg_mixed, calibrated_bound, seed),
        InequalityCertificate::new("algebra-besov", trials, alg_besov, calibrated_bound, seed),
    ])
}

/// Embedding, interpolation, derivative-shift, and L^inf-embedding checks.
/// The interpolation inequality must hold with constant 1 (log-convexity of
/// the block norms), so its certificate carries its own tight bound.
pub fn verify_embedding_interpolation(
    partition: &DyadicPartition,
    trials: usize,
    s: f64,
    seed: u64,
    calibrated_bound: f64,
) -> Result<Vec<InequalityCertificate>> {
    let grid = partition.grid();
    let two = Exponent::Finite(2.0);
    let inf = Exponent::Infinity;
    let mut embed_pq = 0.0f64; // B^s_(2,2) -> B^(s-1)_(inf,2) (d(1/2 - 0) = 1)
    let mut embed_rr = 0.0f64; // B^s_(2,inf) -> B^(s')_(2,1), s' < s
    let mut interp = 0.0f64; // ||u||_(B^(mid)) <= ||u||^theta ||u||^(1-theta)
    let mut grad_shift = 0.0f64; // ||grad u||_(B^(s-1)) <= C ||u||_(B^s)
    let mut linf_embed = 0.0f64; // ||u||_inf <= C ||u||_(H^s), s > 1 = d/p

    let (s1, s2, theta) = (s - 0.5, s + 0.5, 0.5);
    for t in 0..trials {
        let u = data::corpus_scalar(grid, seed, t as u64, s).dealiased();
        let u_bs = besov_total(&u, BesovIndex::sobolev(s), partition);
        if u_bs < 1e-300 {
            continue;
        }
        let lower = besov_total(&u, BesovIndex::new(s - 1.0, inf, two).unwrap(), partition);
        if let Some(r) = safe_ratio(lower, u_bs) {
            embed_pq = embed_pq.max(r);
        }
        let from = besov_total(&u, BesovIndex::new(s, two, inf).unwrap(), partition);
        let to = besov_total(&u, BesovIndex::new(s - 0.25, two, Exponent::Finite(1.0)).unwrap(), partition);
        if let Some(r) = safe_ratio(to, from) {
            embed_rr = embed_rr.max(r);
        }
        let mid = besov_total(
            &u,
            BesovIndex::sobolev(theta * s1 + (1.0 - theta) * s2),
            partition,
        );
        let a = besov_total(&u, BesovIndex::sobolev(s1), partition);
        let b = besov_total(&u, BesovIndex::sobolev(s2), partition);
        if let Some(r) = safe_ratio(mid, a.powf(theta) * b.powf(1.0 - theta)) {
            interp = interp.max(r);
        }
        let grad = u.gradient()?;
        if let Some(r) = safe_ratio(
            besov_total(&grad, BesovIndex::sobolev(s - 1.0), partition),
            u_bs,
        ) {
            grad_shift = grad_shift.max(r);
        }
        if let Some(r) = safe_ratio(u.linf_norm(), u_bs) {
            linf_embed = linf_embed.max(r);
        }
    }
    Ok(vec![
        InequalityCertificate::new("embedding-p-increase", trials, embed_pq, calibrated_bound, seed),
        InequalityCertificate::new("embedding-r-tighten", trials, embed_rr, calibrated_bound, seed),
        InequalityCertificate::new("interpolation-convexity", trials, interp, 1.0 + 1e-10, seed),
        InequalityCertificate::new("gradient-shift", trials, grad_shift, calibrated_bound, seed),
        InequalityCertificate::new("linf-embedding", trials, linf_embed, calibrated_bound, seed),
    ])
}

/// Composition bound for ln(1 + h) over the `||h||_inf <= 1/2` corpus.
pub fn verify_composition(
    partition: &DyadicPartition,
    trials: usize,
    s: f64,
    seed: u64,
    calibrated_bound: f64,
) -> Result<InequalityCertificate> {
    let grid = partition.grid();
    let idx = BesovIndex::sobolev(s);
    let mut measured = 0.0f64;
    for t in 0..trials {
        let raw = data::corpus_scalar(grid, seed, t as u64, s);
        let linf = raw.linf_norm();
        if linf < 1e-300 {
            continue;
        }
        // deterministic target amplitude in (0, 0.45]
        let amp = 0.45 * (0.1 + 0.9 * ((t as f64 * 0.6180339887498949) % 1.0));
        let h = raw.scale(amp / linf).dealiased();
        let comp = compose_log1p(&h)?;
        let h_bs = besov_total(&h, idx, partition);
        if let Some(r) = safe_ratio(besov_total(&comp, idx, partition), h_bs) {
            measured = measured.max(r);
        }
    }
    Ok(InequalityCertificate::new(
        "composition-log1p",
        trials,
        measured,
        calibrated_bound,
        seed,
    ))
}

/// Both Minkowski directions between tilde and plain space-time Besov norms
/// on random trajectories; these hold with constant exactly 1.
pub fn verify_minkowski(
    partition: &DyadicPartition,
    trials: usize,
    s: f64,
    seed: u64,
) -> Result<Vec<InequalityCertificate>> {
    use crate::littlewood_paley::{chemin_lerner_norm, lebesgue_besov_norm};
    let grid = partition.grid();
    let idx = BesovIndex::sobolev(s); // r = 2
    let samples = 6;
    let times: Vec<f64> = (0..samples).map(|i| 0.13 * i as f64).collect();
    let mut tilde_over_plain = 0.0f64; // r = 2 <= rho = inf: tilde dominates plain
    let mut plain_over_tilde = 0.0f64; // r = 2 >= rho = 1: plain dominates tilde
    for t in 0..trials {
        let fields: Vec<SpectralField> = (0..samples)
            .map(|i| data::corpus_scalar(grid, seed, (t * samples + i) as u64, s).dealiased())
            .collect();
        let tilde_inf = chemin_lerner_norm(&times, &fields, Exponent::Infinity, idx, partition)?.total;
        let plain_inf = lebesgue_besov_norm(&times, &fields, Exponent::Infinity, idx, partition)?;
        if let Some(r) = safe_ratio(plain_inf, tilde_inf) {
            tilde_over_plain = tilde_over_plain.max(r);
        }
        let rho1 = Exponent::Finite(1.0);
        let tilde_one = chemin_lerner_norm(&times, &fields, rho1, idx, partition)?.total;
        let plain_one = lebesgue_besov_norm(&times, &fields, rho1, idx, partition)?;
        if let Some(r) = safe_ratio(tilde_one, plain_one) {
            plain_over_tilde = plain_over_tilde.max(r);
        }
    }
    let bound = 1.0 + 1e-10;
    Ok(vec![
        InequalityCertificate::new("minkowski-r-above-rho", trials, tilde_over_plain, bound, seed),
        InequalityCertificate::new("minkowski-r-below-rho", trials, plain_over_tilde, bound, seed),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::sync::Arc;

    fn setup() -> (Arc<crate::spectral::Grid>, DyadicPartition) {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let p = DyadicPartition::build_default(&g).unwrap();
        (g, p)
    }

    #[test]
    fn paraproduct_of_zero() {
        let (g, p) = setup();
        let u = data::random_scalar(&g, 1, 10, 1.5).dealiased();
        let z = SpectralField::zeros(&g, 1);
        assert_eq!(paraproduct(&u, &z, &p).unwrap().l2_norm(), 0.0);
        assert_eq!(remainder(&u, &z, &p).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn paraproduct_by_constant() {
        // constant u: S_(j-1) u = 0 for j <= 0, = u for j >= 1, so
        // T_c v = c (v - Delta_(-1) v - Delta_0 v)
        let (g, p) = setup();
        let c = 2.5;
        let samples = vec![vec![c; g.num_points()]];
        let u = SpectralField::from_physical(&g, &samples).unwrap();
        let v = data::random_scalar(&g, 7, 10, 1.5).dealiased();
        let tuv = paraproduct(&u, &v, &p).unwrap();
        let mut expected = v.clone();
        expected.axpy(-1.0, &p.block(&v, -1));
        expected.axpy(-1.0, &p.block(&v, 0));
        let expected = expected.scale(c);
        assert!((&tuv - &expected).l2_norm() < 1e-10 * expected.l2_norm().max(1.0));
    }

    #[test]
    fn bony_identity_exact() {
        let (g, p) = setup();
        for seed in 0..5 {
            let u = data::random_scalar(&g, 100 + seed, 15, 1.5).dealiased();
            let v = data::random_scalar(&g, 200 + seed, 15, 1.5).dealiased();
            let uv = u.pointwise_product(&v).unwrap();
            let mut sum = paraproduct(&u, &v, &p).unwrap();
            sum.axpy(1.0, &paraproduct(&v, &u, &p).unwrap());
            sum.axpy(1.0, &remainder(&u, &v, &p).unwrap());
            let rel = (&sum - &uv).l2_norm() / uv.l2_norm();
            assert!(rel < 1e-10, "seed {seed}: relative error {rel}");
        }
    }

    #[test]
    fn remainder_symmetric_bitwise() {
        let (g, p) = setup();
        let u = data::random_scalar(&g, 11, 12, 1.5).dealiased();
        let v = data::random_scalar(&g, 12, 12, 1.5).dealiased();
        let a = remainder(&u, &v, &p).unwrap();
        let b = remainder(&v, &u, &p).unwrap();
        for (x, y) in a.coeffs(0).iter().zip(b.coeffs(0)) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn remainder_of_distant_blocks_vanishes() {
        let (g, p) = setup();
        // |k| ~ 1.5 * 2^0 vs 1.5 * 2^3: blocks at dyadic distance 3
        let u = data::pure_mode(&g, 2, 0, 0.0);
        let v = data::pure_mode(&g, 12, 0, 0.3);
        let r = remainder(&u, &v, &p).unwrap();
        assert!(r.l2_norm() < 1e-13);
    }

    #[test]
    fn bilinearity() {
        let (g, p) = setup();
        let u1 = data::random_scalar(&g, 31, 10, 1.5).dealiased();
        let u2 = data::random_scalar(&g, 32, 10, 1.5).dealiased();
        let v = data::random_scalar(&g, 33, 10, 1.5).dealiased();
        let (a, b) = (1.7, -0.4);
        let mut combo = u1.scale(a);
        combo.axpy(b, &u2);
        let lhs = paraproduct(&combo, &v, &p).unwrap();
        let mut rhs = paraproduct(&u1, &v, &p).unwrap().scale(a);
        rhs.axpy(b, &paraproduct(&u2, &v, &p).unwrap());
        assert!((&lhs - &rhs).l2_norm() < 1e-10 * rhs.l2_norm().max(1.0));
        let lhs_r = remainder(&combo, &v, &p).unwrap();
        let mut rhs_r = remainder(&u1, &v, &p).unwrap().scale(a);
        rhs_r.axpy(b, &remainder(&u2, &v, &p).unwrap());
        assert!((&lhs_r - &rhs_r).l2_norm() < 1e-10 * rhs_r.l2_norm().max(1.0));
    }

    #[test]
    fn log1p_of_zero_and_constant() {
        let (g, _) = setup();
        let z = SpectralField::zeros(&g, 1);
        assert_eq!(compose_log1p(&z).unwrap().l2_norm(), 0.0);
        let c = 0.3;
        let samples = vec![vec![c; g.num_points()]];
        let h = SpectralField::from_physical(&g, &samples).unwrap();
        let out = compose_log1p(&h).unwrap();
        assert!((out.mean(0) - c.ln_1p()).abs() < 1e-12);
        assert!((out.l2_norm() - c.ln_1p().abs() * g.box_length()).abs() < 1e-10);
    }

    #[test]
    fn log1p_rejects_large_h() {
        let (g, _) = setup();
        let samples = vec![vec![0.7; g.num_points()]];
        let h = SpectralField::from_physical(&g, &samples).unwrap();
        assert!(matches!(compose_log1p(&h), Err(Error::SmallnessLost(_))));
    }

    #[test]
    fn log1p_taylor_remainder() {
        let (g, _) = setup();
        let raw = data::random_scalar(&g, 41, 8, 2.5);
        let h = raw.scale(0.05 / raw.linf_norm());
        let out = compose_log1p(&h).unwrap();
        // ln(1+h) - (h - h^2/2) = O(h^3)
        let h2 = h.pointwise_product(&h).unwrap();
        let mut approx = h.clone();
        approx.axpy(-0.5, &h2);
        let err = (&out - &approx).l2_norm();
        let vol = g.box_length() * g.box_length();
        assert!(err <= h.linf_norm().powi(3) * vol.sqrt());
    }

    #[test]
    fn bernstein_single_mode_exact() {
        let (g, p) = setup();
        let u = data::pure_mode(&g, 4, 0, 0.0);
        let lambda = 4.0 * g.wavenumber_unit();
        let grad = deriv_sup_norm(&u, 1, Exponent::Finite(2.0));
        assert!((grad / u.l2_norm() - lambda).abs() < 1e-10);
        let _ = p;
    }

    #[test]
    fn bernstein_certificate_reproducible() {
        let (_, p) = setup();
        let run = || {
            verify_bernstein(
                &p,
                20,
                Band::Annulus(4.0),
                1,
                Exponent::Finite(2.0),
                Exponent::Infinity,
                77,
                f64::INFINITY,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.measured_constant.to_bits(), b.measured_constant.to_bits());
        assert!(a.measured_constant.is_finite() && a.measured_constant > 0.0);
    }

    #[test]
    fn interpolation_constant_is_one() {
        let (_, p) = setup();
        let certs = verify_embedding_interpolation(&p, 30, 1.5, 5, f64::INFINITY).unwrap();
        let interp = certs
            .iter()
            .find(|c| c.lemma_id == "interpolation-convexity")
            .unwrap();
        assert!(interp.pass, "measured {}", interp.measured_constant);
    }

    #[test]
    fn minkowski_both_directions_pass() {
        let (_, p) = setup();
        for cert in verify_minkowski(&p, 10, 1.5, 9).unwrap() {
            assert!(cert.pass, "{}: {}", cert.lemma_id, cert.measured_constant);
        }
    }

    #[test]
    fn product_law_certificates_finite() {
        let (_, p) = setup();
        for cert in verify_product_laws(&p, 20, 1.5, 13, f64::INFINITY).unwrap() {
            assert!(
                cert.measured_constant.is_finite() && cert.measured_constant > 0.0,
                "{}: {}",
                cert.lemma_id,
                cert.measured_constant
            );
        }
    }
}
