//! Acceptance suite: one test per criterion, each printing a pass line and
//! enforcing its runtime budget. All comparisons are exact; the only
//! tolerances are the wall-clock limits.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};

use bnwalls::bncore::{
    self, bn_verdict, delta_klm, klm_bound_holds, moduli_verdict, BNStructure, CellLabel,
};
use bnwalls::cli::{classification_grid, compare_with_published, reference};
use bnwalls::oracle::{self, RecursiveDelta};
use bnwalls::stability::{first_wall_data, slope_nu, wall_between, Region};
use bnwalls::{rational, Character, Surface};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn finish(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("[acceptance] {name}: PASS in {elapsed:?} (budget {budget:?})");
    assert!(
        elapsed < budget,
        "{name} exceeded its runtime budget: {elapsed:?} >= {budget:?}"
    );
}

/// Criterion 1: the g = 28 classification grid matches the published table
/// on every cell except (d, r) = (20, 3), which must evaluate to EMPTY by
/// both independent bounds and be flagged as the expected discrepancy.
#[test]
fn criterion_1_published_table_reproduction() {
    let started = Instant::now();
    let grid = classification_grid(28, (20, 26), (1, 7)).expect("grid");
    let diffs = compare_with_published(28, (20, 26), (1, 7), &grid);
    assert_eq!(diffs.len(), 1, "exactly one diff expected: {diffs:?}");
    let diff = &diffs[0];
    assert_eq!((diff.d, diff.r), (20, 3));
    assert!(diff.expected, "the (20, 3) diff must be annotated as expected");
    assert_eq!(diff.computed, CellLabel::Empty);
    assert_eq!(diff.published, "KLM");
    assert_eq!(reference::EXPECTED_DISCREPANCIES, &[(20, 3)]);

    // 48 of 49 cells agree.
    let agreeing = (20..=26)
        .flat_map(|d| (1..=7).map(move |r| (d, r)))
        .filter(|&(d, r)| {
            let computed = grid[(d - 20) as usize][(r - 1) as usize].expect("chi < 0 grid");
            let published =
                reference::published_as_cell_label(reference::published_label(d, r).unwrap());
            computed == published
        })
        .count();
    assert_eq!(agreeing, 48);

    // Independent brute evaluation of both non-emptiness forms on the
    // disputed cell.
    let (remainder_form, klm_form) = oracle::brute_cell_nonempty(28, 20, 3).expect("cell");
    assert!(!remainder_form, "the remainder bound must report (20,3) empty");
    assert!(!klm_form, "the classical bound must report (20,3) empty");

    finish("criterion 1 (published table)", started, Duration::from_secs(1));
}

/// Criterion 2: the remainder bound and the classical bound agree on the
/// whole box g in [2, 60], r in [1, 40], chi in [-40, -1], with zero
/// disagreements; bncore's evaluation agrees with the oracle's raw-integer
/// evaluation everywhere.
#[test]
fn criterion_2_klm_bound_equivalence() {
    let started = Instant::now();
    let report = oracle::brute_klm_equivalence(60, 40, -40).expect("sweep");
    assert!(report.passed(), "violations: {:?}", report.violations);
    assert_eq!(report.checks, 59 * 40 * 40);

    for g in 2..=60i64 {
        for r in 1..=40i64 {
            for chi in -40..=-1i64 {
                let rho = big(g) - big(r + 1) * big(r + 1 - chi);
                let d_rem = (r + 1).rem_euclid(-chi);
                let remainder_form =
                    &rho + big(g - 2) >= big(d_rem) * big(-chi) - big(d_rem) * big(d_rem);
                assert_eq!(
                    klm_bound_holds(g, r, chi).expect("bound"),
                    remainder_form,
                    "bncore vs oracle at g={g}, r={r}, chi={chi}"
                );
            }
        }
    }
    finish("criterion 2 (bound equivalence)", started, Duration::from_secs(10));
}

/// Criterion 3: the closed form of the piecewise-linear bound takes the
/// values n(n+1)/2 at integers up to 100, satisfies the functional equation
/// on 2000 rational samples, and matches the independent recursive oracle on
/// every sample.
#[test]
fn criterion_3_delta_closed_form() {
    let started = Instant::now();
    for n in 0..=100i64 {
        assert_eq!(
            delta_klm(&rational(n, 1)).expect("delta"),
            rational(n * (n + 1) / 2, 1),
            "closed form at n = {n}"
        );
    }
    let mut recursive = RecursiveDelta::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xACCE97);
    for _ in 0..2000 {
        let den = rng.gen_range(1i64..=97);
        let num = rng.gen_range(den..=50 * den);
        let t = rational(num, den);
        let closed = delta_klm(&t).expect("delta");
        let shifted = delta_klm(&(&t - rational(1, 1))).expect("delta");
        assert_eq!(closed, shifted + &t, "functional equation at t = {t}");
        assert_eq!(
            closed,
            recursive.eval(&t).expect("recursive"),
            "recursion disagrees at t = {t}"
        );
    }
    finish("criterion 3 (delta bound)", started, Duration::from_secs(1));
}

/// Criterion 4: integrality suites. `chi * delta(h/(-chi))` is an integer
/// for chi in [-40, -1], h in [0, 200]; `(r+1+D)(s+1)/2` is an integer for
/// the same chi range and r in [0, 200]; and every equality case of the
/// criterion-2 sweep forces `|chi|` to divide `g - 1`, with the component
/// count a perfect square.
#[test]
fn criterion_4_integrality() {
    let started = Instant::now();
    for chi in -40..=-1i64 {
        for h in 0..=200i64 {
            let value = BigRational::from(big(chi))
                * delta_klm(&BigRational::new(big(h), big(-chi))).expect("delta");
            assert!(
                value.denom().is_one(),
                "chi*delta(h/-chi) not integral at chi={chi}, h={h}"
            );
        }
        for r in 0..=200i64 {
            let d_rem = (r + 1).rem_euclid(-chi);
            let s = (r + 1 - d_rem) / (-chi);
            let product = big(r + 1 + d_rem) * big(s + 1);
            assert!(
                (&product % big(2)).is_zero(),
                "(r+1+D)(s+1) odd at chi={chi}, r={r}"
            );
        }
    }

    let mut equality_cases = 0u64;
    for g in 2..=60i64 {
        for r in 1..=40i64 {
            for chi in -40..=-1i64 {
                let rho = big(g) - big(r + 1) * big(r + 1 - chi);
                let d_rem = (r + 1).rem_euclid(-chi);
                let lhs = &rho + big(g - 2);
                let rhs = big(d_rem) * big(-chi) - big(d_rem) * big(d_rem);
                if lhs != rhs {
                    continue;
                }
                equality_cases += 1;
                assert_eq!((g - 1) % (-chi), 0, "divisibility at g={g}, r={r}, chi={chi}");
                let root = big((g - 1) / (-chi));
                let count = &root * &root;
                // Perfect square of an integer by construction; also check
                // the implementation reports exactly this count when d >= 1.
                let d = g - 1 + chi;
                if d >= 1 {
                    let verdict = bn_verdict(g, d, r).expect("verdict");
                    match verdict.structure {
                        BNStructure::GrassmannianUnion { count: got, .. } => {
                            assert_eq!(got, count)
                        }
                        other => panic!("expected equality structure, got {other:?}"),
                    }
                }
            }
        }
    }
    assert!(equality_cases > 0, "the sweep must contain equality cases");
    finish("criterion 4 (integrality)", started, Duration::from_secs(10));
}

/// Criterion 5: the stratification recursion has zero violations for
/// (chi, H^2) in {(-1, 6), (-3, 54), (-7, 54)} up to k = 20, the equality
/// k_red is unique, and the reduction step preserves d(k, h); bncore and the
/// oracle agree on max_h and the equality k_red throughout.
#[test]
fn criterion_5_stratification() {
    let started = Instant::now();
    for (chi, h2) in [(-1i64, 6i64), (-3, 54), (-7, 54)] {
        let surface = Surface::new(h2).expect("surface");
        let report = oracle::brute_stratum_recursion(20, chi, &surface).expect("sweep");
        assert!(
            report.passed(),
            "violations at chi={chi}, H^2={h2}: {:?}",
            report.violations
        );

        for k in 0..=20i64 {
            let top = bncore::max_h(k, chi).expect("max_h");
            assert_eq!(
                top,
                oracle::brute_max_h(k, chi).expect("brute"),
                "max_h mismatch at k={k}, chi={chi}"
            );
            for h in 0..=top {
                assert!(bncore::mhk_nonempty(k, h, chi).expect("nonempty"));
                let k_red = bncore::k_red_for(k, h, chi).expect("k_red");
                // The reduction chain d(k - h, h + chi) = d(k, h).
                if h + chi >= 0 && k >= h {
                    assert_eq!(
                        bncore::expected_dim(k, h, chi, &surface).expect("dim"),
                        bncore::expected_dim(k - h, h + chi, chi, &surface).expect("dim"),
                        "reduction chain at k={k}, h={h}, chi={chi}"
                    );
                }
                // The equality stratum is the unique top-dimensional one.
                let descriptor =
                    bncore::stratum_status(k, k_red, h, chi, &surface).expect("stratum");
                assert_eq!(
                    descriptor.dim,
                    Some(bncore::expected_dim(k, h, chi, &surface).expect("dim"))
                );
            }
            assert!(!bncore::mhk_nonempty(k, top + 1, chi).expect("nonempty"));
        }
    }
    finish("criterion 5 (stratification)", started, Duration::from_secs(10));
}

/// Criterion 6: the worked equality case. (g, d, r) = (28, 24, 5) is
/// non-empty of dimension 0 with 81 Grassmannian components of fiber
/// Gr(0, 3), and the section locus of v = (0, 1, -3) with r = 5 has
/// dimension 2 = 0 + 2.
#[test]
fn criterion_6_worked_equality_case() {
    let started = Instant::now();
    let verdict = bn_verdict(28, 24, 5).expect("verdict");
    assert!(verdict.nonempty);
    assert_eq!(verdict.dim, Some(big(0)));
    match &verdict.structure {
        BNStructure::GrassmannianUnion { count, fiber } => {
            assert_eq!(count, &big(81));
            assert_eq!((fiber.subspace_dim, fiber.ambient_dim), (0, 3));
        }
        other => panic!("expected a Grassmannian union, got {other:?}"),
    }

    let surface = Surface::new(54).expect("surface");
    let moduli = moduli_verdict(0, -3, 5, &surface).expect("moduli");
    assert!(moduli.nonempty);
    assert_eq!(moduli.dim, Some(big(2)));
    assert_eq!(
        moduli.dim.unwrap(),
        verdict.dim.unwrap() + big(2),
        "dim V = dim M - 2"
    );
    finish("criterion 6 (worked equality case)", started, Duration::from_secs(1));
}

/// Criterion 7: wall geometry. The first wall of (0, 1, -3) on H^2 = 54 is
/// exactly 9(alpha^2+beta^2) + beta = 0; the slopes of the defining pair
/// agree at 20 exact rational points of that circle; and the first-wall
/// chamber checks pass for (chi, H^2) in {(-1, 6), (-3, 54)} over
/// [-2, 0] x [1/100, 2].
#[test]
fn criterion_7_wall_geometry() {
    let started = Instant::now();
    let h54 = Surface::new(54).expect("surface");
    let v = Character::new(0, 1, -3);
    let u = Character::new(1, 0, 0);
    let wall = wall_between(&v, &u, &h54).expect("wall").expect("circle");
    let (a, b, c) = wall.coefficients();
    assert_eq!(
        (a.clone(), b.clone(), c.clone()),
        (big(9), big(1), big(0)),
        "the first wall must be 9(alpha^2+beta^2) + beta = 0"
    );

    let points = wall.rational_points(20);
    assert_eq!(points.len(), 20);
    for p in &points {
        assert!(wall.contains(p), "sampled point must lie on the wall");
        assert!(p.alpha().is_positive());
        let sv = slope_nu(&v, p, &h54).expect("slope of v");
        let su = slope_nu(&u, p, &h54).expect("slope of u");
        assert_eq!(sv, su, "slopes must agree on the wall");
    }

    let region = Region::new(
        rational(-2, 1),
        rational(0, 1),
        rational(1, 100),
        rational(2, 1),
    )
    .expect("region");
    for (chi, h2) in [(-1i64, 6i64), (-3, 54)] {
        let surface = Surface::new(h2).expect("surface");
        let report = oracle::verify_first_wall(chi, &surface, &region).expect("verify");
        assert!(
            report.passed(),
            "first-wall violations at chi={chi}, H^2={h2}: {:?}",
            report.violations
        );
    }
    finish("criterion 7 (wall geometry)", started, Duration::from_secs(30));
}

/// Criterion 8: dual-path verdicts. Over the criterion-2 box, for every
/// instance with chi < 0 and d = g - 1 + chi >= 1, the Brill-Noether verdict
/// equals the stratum criterion `mhk_nonempty(R, r + 1, chi)`; and the
/// Serre-duality reduction is an involution on chi > 0 inputs.
#[test]
fn criterion_8_dual_path_verdicts() {
    let started = Instant::now();
    let mut compared = 0u64;
    for g in 2..=60i64 {
        for chi in -40..=-1i64 {
            let d = g - 1 + chi;
            if d < 1 {
                continue;
            }
            let surface = Surface::with_genus(g).expect("surface");
            let fw = first_wall_data(chi, &surface).expect("first wall");
            let r_cap = i64::try_from(&fw.r_max).expect("R fits i64");
            for r in 1..=40i64 {
                let bn = bn_verdict(g, d, r).expect("verdict");
                let stratum = bncore::mhk_nonempty(r_cap, r + 1, chi).expect("stratum");
                assert_eq!(
                    bn.nonempty, stratum,
                    "verdict paths disagree at g={g}, chi={chi}, r={r}"
                );
                compared += 1;
            }
        }
    }
    assert!(compared > 50_000, "sweep too small: {compared}");

    for g in 2..=60i64 {
        for d in g..=(2 * g + 12) {
            for r in 1..=12i64 {
                let chi = d + 1 - g;
                assert!(chi > 0);
                let (d1, r1) = bncore::serre_dual(g, d, r);
                let (d2, r2) = bncore::serre_dual(g, d1, r1);
                assert_eq!((d2, r2), (d, r), "involution fails at g={g}, d={d}, r={r}");
            }
        }
    }
    finish("criterion 8 (dual-path verdicts)", started, Duration::from_secs(30));
}

/// The classification grid itself (criterion 1's object) computed through
/// the public JSON path stays stable under re-serialization.
#[test]
fn json_outputs_are_stable() {
    let verdict = bn_verdict(28, 24, 5).expect("verdict").to_json();
    let text = verdict.to_string();
    let reparsed: serde_json::Value = serde_json::from_str(&text).expect("parse");
    assert_eq!(reparsed.to_string(), text);
}
