//! Independent brute-force verifiers.
//!
//! Everything in this module recomputes its answers from first principles —
//! the recursive definition of the piecewise-linear bound, raw integer
//! formulas, exhaustive scans — and deliberately shares no code path with
//! [`crate::bncore`]. The test suites compare the two sides on every
//! overlapping query at zero tolerance.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::lattice::{Character, Surface};
use crate::stability::{circle_weakly_inside, enumerate_walls, first_wall_data, Region};
use crate::{Error, Result};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(big(n), big(d))
}

/// Outcome of a verification sweep: number of individual checks performed
/// and the list of violations (expected to stay empty).
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: u64,
    pub violations: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(mut self, other: Report) -> Report {
        self.checks += other.checks;
        self.violations.extend(other.violations);
        self
    }
}

/// The bound computed by its recursive definition alone: `t` on `[0, 1]`,
/// `delta(t - 1) + t` above. Memoized on exact rationals; never uses the
/// closed form.
#[derive(Debug, Default)]
pub struct RecursiveDelta {
    memo: HashMap<BigRational, BigRational>,
}

impl RecursiveDelta {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eval(&mut self, t: &BigRational) -> Result<BigRational> {
        if t.is_negative() {
            return Err(Error::NegativeArgument(t.clone()));
        }
        if t <= &BigRational::one() {
            return Ok(t.clone());
        }
        if let Some(v) = self.memo.get(t) {
            return Ok(v.clone());
        }
        // Unrolled so that deep chains do not recurse on the call stack.
        let one = BigRational::one();
        let mut stack = Vec::new();
        let mut s = t.clone();
        while s > one && !self.memo.contains_key(&s) {
            stack.push(s.clone());
            s -= &one;
        }
        let mut value = self.memo.get(&s).cloned().unwrap_or(s);
        while let Some(arg) = stack.pop() {
            value += &arg;
            self.memo.insert(arg, value.clone());
        }
        Ok(value)
    }
}

/// A Jordan-Hölder shape for class `w_k` on the first wall: `k - k_prime`
/// copies of `(1, 0, 0)` plus one factor of class `w_{k_prime}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JHPartition {
    pub k: i64,
    pub k_prime: i64,
    pub structure_copies: i64,
}

/// All `k + 1` Jordan-Hölder shapes for `w_k`, each verified to sum to `w_k`
/// in the lattice.
pub fn jh_partitions(k: i64, chi: i64, surface: &Surface) -> Result<Vec<JHPartition>> {
    if chi >= 0 {
        return Err(Error::NonNegativeChi(big(chi)));
    }
    if k < 0 {
        return Err(Error::InvalidInput(format!("k must be >= 0, got {k}")));
    }
    let fw = first_wall_data(chi, surface)?;
    let w = |j: i64| Character::new(big(j) - &fw.r_max, 1, chi);
    let structure = Character::new(1, 0, 0);
    let w_k = w(k);
    let mut out = Vec::with_capacity(k as usize + 1);
    for k_prime in 0..=k {
        let copies = k - k_prime;
        let sum = &(&big(copies) * &structure) + &w(k_prime);
        assert_eq!(sum, w_k, "JH factors must sum to w_k");
        out.push(JHPartition {
            k,
            k_prime,
            structure_copies: copies,
        });
    }
    Ok(out)
}

/// Largest `h` with `k/(-chi) >= delta(h/(-chi))`, computed with the
/// recursive bound.
pub fn brute_max_h(k: i64, chi: i64) -> Result<i64> {
    if chi >= 0 {
        return Err(Error::NonNegativeChi(big(chi)));
    }
    if k < 0 {
        return Err(Error::InvalidInput(format!("k must be >= 0, got {k}")));
    }
    let mut delta = RecursiveDelta::new();
    let budget = rat(k, -chi);
    let mut h = 0;
    while delta.eval(&rat(h + 1, -chi))? <= budget {
        h += 1;
    }
    Ok(h)
}

/// Expected dimension recomputed from raw integers: `w0^2 = H^2 + 2 R chi`
/// with `R = floor(H^2 / (-2 chi))`.
fn raw_expected_dim(k: i64, h: i64, chi: i64, h_squared: &BigInt) -> BigInt {
    let r_cap = h_squared.div_floor(&(big(chi) * -2));
    let w0_sq = h_squared + big(2) * r_cap * big(chi);
    w0_sq - big(k) * 2 * big(chi) + big(2) + big(h) * big(chi) - big(h) * big(h)
}

/// Exhaustive check of the dimension recursion behind the stratification,
/// for all `k <= k_max`, `h <= max_h(k)` and `l >= max(0, h + chi)`:
///
/// - `d(k - h, l) + h(l - chi - h) <= d(k, h)`, with equality exactly at
///   `l = 0 >= h + chi` or `l = h + chi > 0` (their difference is
///   `l(l - chi - h)`);
/// - the reduction step preserves the dimension: `d(k - h, h + chi) = d(k, h)`
///   whenever `h + chi >= 0`;
/// - for every non-empty `(k, h)`, exactly one `k_red` in `[0, k]` attains
///   equality in the stratum bound.
pub fn brute_stratum_recursion(k_max: i64, chi: i64, surface: &Surface) -> Result<Report> {
    if chi >= 0 {
        return Err(Error::NonNegativeChi(big(chi)));
    }
    let h_squared = surface.h_squared().clone();
    let mut report = Report::default();
    let mut delta = RecursiveDelta::new();
    for k in 0..=k_max {
        let h_top = brute_max_h(k, chi)?;
        for h in 0..=h_top {
            let d_kh = raw_expected_dim(k, h, chi, &h_squared);
            let l_lo = 0.max(h + chi);
            let l_hi = brute_max_h(k - h, chi)?.max(h - chi) + 2;
            for l in l_lo..=l_hi {
                report.checks += 1;
                let bound = raw_expected_dim(k - h, l, chi, &h_squared)
                    + big(h) * (big(l) - big(chi) - big(h));
                let equality_expected = (l == 0 && h + chi <= 0) || (l == h + chi && l > 0);
                if bound > d_kh {
                    report.violations.push(format!(
                        "d(k-h,l) + h(l-chi-h) exceeds d(k,h) at k={k}, h={h}, l={l}, chi={chi}"
                    ));
                } else if (bound == d_kh) != equality_expected {
                    report.violations.push(format!(
                        "equality pattern wrong at k={k}, h={h}, l={l}, chi={chi}"
                    ));
                }
            }

            // Reduction chain preserves the expected dimension.
            if h + chi >= 0 {
                report.checks += 1;
                if raw_expected_dim(k - h, h + chi, chi, &h_squared) != d_kh {
                    report
                        .violations
                        .push(format!("d(k-h, h+chi) != d(k,h) at k={k}, h={h}, chi={chi}"));
                }
            }

            // Unique equality stratum.
            report.checks += 1;
            let need = delta.eval(&rat(h, -chi))?;
            let hits = (0..=k)
                .filter(|k_red| rat(k - k_red, -chi) == need)
                .count();
            if hits != 1 {
                report.violations.push(format!(
                    "expected a unique equality k_red at k={k}, h={h}, chi={chi}, found {hits}"
                ));
            }
        }
    }
    Ok(report)
}

/// Exhaustive agreement between the two non-emptiness bounds over the box
/// `g in [2, g_max]`, `r in [1, r_max]`, `chi in [chi_min, -1]`:
/// the remainder inequality `rho + g - 2 >= D(-chi) - D^2` and the classical
/// bound `rho + r(r+2) >= -floor(r/(-chi)) chi (r+1+chi(floor(r/(-chi))+1)/2)`.
/// Both sides are evaluated from raw integers here.
pub fn brute_klm_equivalence(g_max: i64, r_max: i64, chi_min: i64) -> Result<Report> {
    if chi_min >= 0 {
        return Err(Error::NonNegativeChi(big(chi_min)));
    }
    let report = (2..=g_max)
        .into_par_iter()
        .map(|g| {
            let mut local = Report::default();
            for r in 1..=r_max {
                for chi in chi_min..=-1 {
                    local.checks += 1;
                    let rho = big(g) - big(r + 1) * big(r + 1 - chi);
                    let d_rem = (r + 1).rem_euclid(-chi);
                    let remainder_form =
                        &rho + big(g - 2) >= big(d_rem) * big(-chi) - big(d_rem) * big(d_rem);

                    // Classical bound, doubled to stay in integers:
                    // 2(rho + r(r+2)) >= -f*chi*(2(r+1) + chi*(f+1))
                    let f = r.div_euclid(-chi);
                    let lhs2 = big(2) * (&rho + big(r) * (big(r) + 2));
                    let rhs2 = -big(f) * big(chi) * ((big(r) + 1) * 2 + big(chi) * (big(f) + 1));
                    let klm_form = lhs2 >= rhs2;

                    if remainder_form != klm_form {
                        local.violations.push(format!(
                            "bounds disagree at g={g}, r={r}, chi={chi}: \
                             remainder={remainder_form}, klm={klm_form}"
                        ));
                    }
                }
            }
            local
        })
        .reduce(Report::default, Report::merge);
    Ok(report)
}

/// Runs the wall enumeration for `(0, 1, chi)` over a region and checks the
/// chamber picture: no wall touches the ray `beta = 0, alpha > 0`, every
/// wall lies weakly inside the first-wall circle, and the first wall itself
/// shows up whenever it meets the region. The check restricts to the
/// `beta <= 0` side (the dual side carries its own mirror walls).
pub fn verify_first_wall(chi: i64, surface: &Surface, region: &Region) -> Result<Report> {
    let fw = first_wall_data(chi, surface)?;
    let zero = BigRational::from(BigInt::from(0));
    let clamped;
    let region = if region.beta_hi() > &zero {
        if region.beta_lo() >= &zero {
            return Err(Error::InvalidInput(
                "the first-wall check needs a region reaching into beta < 0".into(),
            ));
        }
        clamped = Region::new(
            region.beta_lo().clone(),
            zero,
            region.alpha_lo().clone(),
            region.alpha_hi().clone(),
        )?;
        &clamped
    } else {
        region
    };
    let v = Character::new(0, 1, chi);
    let walls = enumerate_walls(&v, region, surface)?;
    let mut report = Report::default();
    for (u, wall) in &walls {
        report.checks += 2;
        // A circle a(alpha^2+beta^2) + b beta + c = 0 with a > 0 meets
        // beta = 0 at alpha^2 = -c/a, so positive alpha needs c < 0.
        let (_, _, c) = wall.coefficients();
        if wall.is_circle() && c.is_negative() {
            report
                .violations
                .push(format!("wall {wall} (from {u}) meets the ray beta = 0"));
        }
        if wall.is_line() {
            report
                .violations
                .push(format!("unexpected vertical wall {wall} (from {u})"));
        } else if !circle_weakly_inside(wall, &fw.wall) {
            report
                .violations
                .push(format!("wall {wall} (from {u}) escapes the first wall"));
        }
    }
    // The first wall is an actual wall; it must be listed whenever its
    // circle meets the region.
    let structure_class = Character::new(1, 0, 0);
    if crate::stability::wall_carries_destabilizer(&v, &structure_class, &fw.wall, region) {
        report.checks += 1;
        if !walls.iter().any(|(_, w)| w == &fw.wall) {
            report
                .violations
                .push(format!("first wall {} missing from the enumeration", fw.wall));
        }
    }
    Ok(report)
}

/// Brute evaluation of both non-emptiness forms for a single cell, used to
/// audit single table entries independently of `bncore`.
pub fn brute_cell_nonempty(g: i64, d: i64, r: i64) -> Result<(bool, bool)> {
    let chi = d + 1 - g;
    if chi == 0 {
        return Err(Error::ChiZero);
    }
    // Reduce positive chi by duality; rho and the remainder are unchanged.
    let (r_eff, chi_eff) = if chi > 0 { (r - chi, -chi) } else { (r, chi) };
    let rho = big(g) - big(r_eff + 1) * big(r_eff + 1 - chi_eff);
    let d_rem = (r_eff + 1).rem_euclid(-chi_eff);
    let remainder_form = &rho + big(g - 2) >= big(d_rem) * big(-chi_eff) - big(d_rem) * big(d_rem);
    let f = r_eff.div_euclid(-chi_eff);
    let lhs2 = big(2) * (&rho + big(r_eff) * big(r_eff + 2));
    let rhs2 = -big(f) * big(chi_eff) * (big(2 * (r_eff + 1)) + big(chi_eff) * big(f + 1));
    Ok((remainder_form, lhs2 >= rhs2))
}
