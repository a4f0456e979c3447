//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion with
//! its time limit and exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use porlab::certificates::{cross_check_gap, first_good_n, foran_step, gap_certificate, trial_depth, PairCase};
use porlab::config::RunConfig;
use porlab::expansion::{MultiExpansion, DEFAULT_TERM_BUDGET};
use porlab::metrics::{p_plus, recheck_bracket, right_bracket_porous, Side};
use porlab::pipeline::cmd_verify;
use porlab::sets::{ASetSpec, Strategy, Verdict};
use porlab::{ControlFunction, ExactDecimal, Family, FunctionClass, Interval, IntervalUnion, LemmaScaffold, PorositySequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

fn linear(n: i64, d: i64) -> ControlFunction {
    ControlFunction::linear(q(n, d))
}

fn half_sequence(count: usize) -> PorositySequence {
    let scaffold = LemmaScaffold::build(linear(1, 2)).unwrap();
    PorositySequence::construct(scaffold, "0.4".parse().unwrap(), count).unwrap()
}

/// Block `k` of `x` for constant block size `size`, read off the digits.
fn block(x: &ExactDecimal, size: usize, k: usize) -> BigUint {
    (1..=size).fold(BigUint::zero(), |acc, j| acc * 10u32 + x.frac_digit((k - 1) * size + j))
}

/// Maximal blocks of range `n` by direct scan.
fn count_max(x: &ExactDecimal, size: usize, n: usize) -> usize {
    let top = BigUint::from(10u32).pow(size as u32) - 1u32;
    (n * n + 1..=(n + 1) * (n + 1)).filter(|&k| block(x, size, k) == top).count()
}

// 1 -------------------------------------------------------------------------

fn decimal_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draw = |rng: &mut ChaCha8Rng| {
        let s = rng.random_range(0u32..=12);
        (rng.random_range(0u128..10u128.pow(15)), s)
    };
    let dec = |(m, s): (u128, u32)| ExactDecimal::from_parts(&BigUint::from(m), s as usize);
    for _ in 0..1000 {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let (x, y) = (dec(a), dec(b));
        let text = x.to_string();
        ensure!(ExactDecimal::parse(&text).unwrap() == x, "round trip failed for {text}");
        let (ia, ib) = (a.0 * 10u128.pow(12 - a.1), b.0 * 10u128.pow(12 - b.1));
        ensure!(x.add(&y) == dec((ia + ib, 12)), "{x} + {y}");
        ensure!(x.mul(&y) == dec((a.0 * b.0, a.1 + b.1)), "{x} · {y}");
        ensure!(x.cmp(&y) == ia.cmp(&ib), "cmp {x} {y}");
        ensure!(x.sub(&y).ok() == ia.checked_sub(ib).map(|d| dec((d, 12))), "{x} − {y}");
        if x.in_unit_interval() {
            let l = x.length().unwrap();
            ensure!(x.digit(l).unwrap() != 0 && x.digit(l + 1).unwrap() == 0, "length of {x}");
            let sum = (1..=l).fold(0u128, |acc, i| acc * 10 + x.digit(i).unwrap() as u128);
            ensure!(dec((sum, l as u32)) == x, "digit sum of {x}");
        }
    }
    Ok("1000 pairs agree with scaled-integer arithmetic".into())
}

// 2 -------------------------------------------------------------------------

fn sequence_invariants() -> Check {
    let seq = half_sequence(200);
    let t = seq.terms();
    ensure!(t.len() == 200, "{} terms", t.len());
    ensure!(t[..3].iter().map(|x| x.to_string()).collect::<Vec<_>>() == ["0.4", "0.37", "0.336"], "first terms {:?}", &t[..3]);
    let inv = seq.verify_invariants();
    ensure!(inv.passed && inv.unresolved == 0, "invariant failures {:?}", inv.failures);
    for (i, w) in t.windows(2).enumerate() {
        ensure!(!w[1].is_zero() && w[1] < w[0], "not decreasing at {}", i + 1);
        ensure!(w[1].length().unwrap() > w[0].length().unwrap(), "length not increasing at {}", i + 1);
    }
    // f(x_n) = x_n / 2 < x_{n+2}, exactly
    for n in 0..198 {
        ensure!(t[n].to_rational() / BigInt::from(2) < t[n + 2].to_rational(), "f(x_{}) ≥ x_{}", n + 1, n + 3);
    }
    Ok(format!("200 terms, {} invariant checks", inv.checked))
}

// 3 -------------------------------------------------------------------------

fn gap_chain() -> Check {
    let seq = half_sequence(200);
    let r = seq.verify_gap_chain();
    ensure!(r.passed, "first failure {:?}", r.first_failure);
    ensure!(r.entries.len() >= 198, "only {} entries", r.entries.len());
    Ok(format!("{} chain entries certified", r.entries.len()))
}

// 4 -------------------------------------------------------------------------

fn coupled_expansion() -> Check {
    let g = linear(1, 10);
    let mut seq = half_sequence(1);
    let (me, stop) = MultiExpansion::construct_coupled_partial(&g, &mut seq, 3, DEFAULT_TERM_BUDGET);
    ensure!(me.sizes().len() == 2, "blocks {:?}", me.sizes());
    let (d1, d2) = (me.d(1), me.d(2));
    ensure!(d1 == 1, "d₁ = {d1}");
    let stop = stop.ok_or("no budget stop after block 2")?;
    ensure!(stop.is_resource_limit(), "stop is not a budget event: {stop}");

    // independent re-check of block 2
    let (big1, big2) = (d1, d1 + d2);
    ensure!(d2 > d1, "growth");
    let g_at = q(1, 10) * BigRational::new(BigInt::one(), BigInt::from(10u32).pow(big1 as u32));
    ensure!(g_at > BigRational::new(BigInt::one(), BigInt::from(10u32).pow(big2 as u32)), "g(10^-D₁) ≤ 10^-D₂");
    let terms = seq.terms();
    let k0 = terms.iter().rposition(|x| x.frac_digit(1) != 0).map(|i| i + 1).ok_or("no term with b₁ ≠ 0")?;
    let max_len = terms[..k0].iter().filter(|x| x.frac_digit(1) != 0).map(|x| x.length().unwrap()).max().unwrap();
    let next_len = terms[k0].length().unwrap();
    ensure!(big2 > max_len.max(next_len), "D₂ = {big2} vs lengths {max_len}, {next_len}");
    let reach = me.provenance()[1].reach.as_ref().ok_or("no reach record")?;
    ensure!(reach.k0 == Some(k0), "k₀ {:?} vs recomputed {k0}", reach.k0);
    // smallest such size: one less fails some condition
    ensure!(big2 - 1 <= max_len.max(next_len) || d2 - 1 <= d1, "d₂ = {d2} is not minimal");
    Ok(format!("d = ({d1}, {d2}), k₀ = {k0}; then {stop}").chars().take(160).collect())
}

// 5 -------------------------------------------------------------------------

fn set_validity() -> Check {
    let spec = ASetSpec::zero_prefix(MultiExpansion::constant(2, 441).unwrap(), 3, q(1, 1), q(3, 4)).unwrap();
    let v = spec.validate();
    // N > (1+ε)^(1/α) ⇔ N^3 > (1+ε)^4: 27 > 16; N > ε^(1/(α−1)) = 1
    ensure!(27 > 16 && v.passed, "validate: {:?}", v.constraints);
    for n in 3..=100usize {
        let bi = spec.block_interval(n).map_err(|e| e.to_string())?;
        // largest e with e^4 n^3 ≤ (2n+1)^4, i.e. 2n+1−e ≥ (1 − n^(−3/4))(2n+1)
        let w = big(2 * n + 1);
        let e_max = (0..=2 * n + 1).rev().find(|&e| big(e).pow(4) * big(n).pow(3) <= w.pow(4)).unwrap();
        let floor = 2 * n + 1 - e_max;
        ensure!(spec.floor_count(n) == floor, "floor count at n = {n}");
        ensure!(floor <= 2 * n && bi.admissible == (floor..=2 * n).collect::<Vec<_>>(), "I_{n} has no integer");
    }
    let w = spec.generate_witness(20, Strategy::MaxC, 0).map_err(|e| e.to_string())?;
    ensure!(matches!(w.verdict, Verdict::In { depth: 20 }), "witness verdict {:?}", w.verdict);
    ensure!(matches!(spec.membership(&w.x, 20), Verdict::In { depth: 20 }), "membership");
    for n in 3..=20 {
        let (c, e) = spec.expansion().block_stats(&w.x, n).map_err(|e| e.to_string())?;
        let scan = count_max(&w.x, 2, n);
        ensure!(c == scan && c + e == 2 * n + 1 && c >= spec.floor_count(n) && c < 2 * n + 1, "block stats at n = {n}");
    }
    Ok("27 > 16; I_n nonempty for n ≤ 100; In(20) with matching block stats".into())
}

// 6 -------------------------------------------------------------------------

fn gap_certificates() -> Check {
    let spec = ASetSpec::zero_prefix(MultiExpansion::constant(2, 441).unwrap(), 3, q(1, 1), q(3, 4)).unwrap();
    let g = linear(1, 10);
    let x = spec.generate_witness(20, Strategy::MaxC, 0).map_err(|e| e.to_string())?.x;
    let fg = first_good_n(&spec, &g, &x, 3, 15).map_err(|e| e.to_string())?;
    let n_star = fg.n.ok_or("no passing n in 3..=15")?;
    ensure!(n_star <= 500, "n* = {n_star}");
    for n in n_star..n_star + 5 {
        let c = gap_certificate(&spec, &g, &x, n).map_err(|e| e.to_string())?;
        ensure!(c.passed && c.digit_criterion.passed && c.g_inequality.passed, "certificate n = {n} fails");
        // (m−1)·n^(3/4) > 2n+1 ⇔ (m−1)^4 n^3 > (2n+1)^4
        ensure!(c.m >= 2 && big(c.m - 1).pow(4) * big(n).pow(3) > big(2 * n + 1).pow(4), "digit criterion recheck n = {n}");
        let (xr, yr, zr) = (x.to_rational(), c.y.to_rational(), c.z.to_rational());
        ensure!((&zr - &xr) / BigInt::from(10) > &yr - &xr, "g(z−x) ≤ y−x at n = {n}");
        ensure!(cross_check_gap(&spec, &x, &c, 1_000_000).map_err(|e| e.to_string())?, "gap n = {n} meets the cover");
    }
    Ok(format!("n* = {n_star} (asymptotic bound {:?}); n = {n_star}..{} certified", fg.asymptotic, n_star + 4))
}

// 7 -------------------------------------------------------------------------

fn foran_dichotomy() -> Check {
    let f = ASetSpec::zero_prefix(MultiExpansion::constant(2, 196).unwrap(), 5, q(2, 1), q(3, 4)).unwrap();
    let y = f.generate_witness(8, Strategy::MaxC, 0).map_err(|e| e.to_string())?.x;
    let window = (ExactDecimal::zero(), ExactDecimal::one());
    let r = foran_step(&f, &y, &window, 100, 7, Strategy::SeededRandom).map_err(|e| e.to_string())?;
    // (ε/2)^(1/(α−1)) = 1, so M = N + 1
    ensure!(r.m == 6, "M = {}", r.m);
    ensure!(r.refinement.passed, "refinement {:?}", r.refinement);
    ensure!(r.trials.len() == 100, "{} trials", r.trials.len());
    let z = r.z.as_ref().ok_or("no z")?.x.clone();
    let (mut shifted, mut same) = (0, 0);
    for t in &r.trials {
        match t.pair.case {
            PairCase::ShiftedTop => shifted += 1,
            PairCase::SameTop => same += 1,
        }
        ensure!(t.passed && t.dichotomy_holds, "trial seed {} failed", t.pair.seed);
        let depth = trial_depth(&t.pair);
        ensure!(r.fstar.membership(&z, depth).is_in(), "z not in F* through range {depth}");
        let mut any_in = false;
        for (ev, s) in t.translates.iter().zip([&t.pair.s_p, &t.pair.s_next]) {
            ensure!(z.sub(s).ok().as_ref() == Some(&ev.x), "translate {} is not z − s", ev.label);
            any_in |= matches!(f.membership(&ev.x, depth), Verdict::In { .. });
            for n in r.m..=depth {
                ensure!(count_max(&ev.x, 2, n) + 2 >= count_max(&z, 2, n), "C drops by more than 2 at n = {n}, seed {}", t.pair.seed);
            }
        }
        ensure!(any_in, "no translate In at depth {depth}, seed {}", t.pair.seed);
    }
    ensure!(shifted > 0 && same > 0, "cases {shifted}/{same}");
    Ok(format!("M = 6; 100 trials ({shifted} shifted-top, {same} same-top) pass"))
}

// 8 -------------------------------------------------------------------------

fn brute_lambda(raw: &[(u32, u32, bool, bool)], a: u32, b: u32) -> u32 {
    let hit = |t2: u32| raw.iter().any(|&(lo, hi, lc, hc)| (t2 > 2 * lo || (t2 == 2 * lo && lc)) && (t2 < 2 * hi || (t2 == 2 * hi && hc)));
    let mut cuts: Vec<u32> = raw.iter().flat_map(|r| [r.0, r.1]).filter(|&t| t > a && t < b).chain([a, b]).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let (mut best, mut run) = (0, 0);
    for w in cuts.windows(2) {
        if hit(w[0] + w[1]) {
            run = 0;
        } else {
            run = if run > 0 && !hit(2 * w[0]) { run + w[1] - w[0] } else { w[1] - w[0] };
            best = best.max(run);
        }
    }
    best
}

fn metrics_oracles() -> Check {
    let grid = |k: u32| ExactDecimal::from_parts(&BigUint::from(k), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..1000 {
        let raw: Vec<(u32, u32, bool, bool)> = (0..rng.random_range(0..10))
            .map(|_| {
                let lo = rng.random_range(0..900);
                (lo, lo + rng.random_range(0..60), rng.random_bool(0.5), rng.random_bool(0.5))
            })
            .collect();
        let m = IntervalUnion::from_parts(raw.iter().map(|&(lo, hi, lc, hc)| Interval { lo: grid(lo), hi: grid(hi), lo_closed: lc, hi_closed: hc }));
        let a = rng.random_range(0..900);
        let b = a + rng.random_range(1..200);
        ensure!(m.lambda(&grid(a), &grid(b)) == grid(brute_lambda(&raw, a, b)), "λ mismatch on union {i}");
    }

    // M = {0} ∪ {2^-n}, g = identity
    let dyadic = |n: u32| ExactDecimal::from_parts(&BigUint::from(5u32).pow(n), n as usize);
    let m = IntervalUnion::points(std::iter::once(ExactDecimal::zero()).chain((0..=40).map(dyadic)));
    let identity = ControlFunction::new(Family::linear(q(1, 1)), ExactDecimal::one(), FunctionClass::G1).unwrap();
    let schedule: Vec<ExactDecimal> = (1..=20).map(dyadic).collect();
    let scan = p_plus(&m, &ExactDecimal::zero(), &identity, &schedule, Side::Right).map_err(|e| e.to_string())?;
    let (lo, hi): (ExactDecimal, ExactDecimal) = ("0.45".parse().unwrap(), "0.55".parse().unwrap());
    ensure!(scan.estimate >= lo && scan.estimate <= hi, "p⁺ estimate {}", scan.estimate);

    // every certified gap gives a bracket witness at α_n = z_n − x
    let spec = ASetSpec::zero_prefix(MultiExpansion::constant(2, 441).unwrap(), 3, q(1, 1), q(3, 4)).unwrap();
    let g = linear(1, 10);
    let x = spec.generate_witness(20, Strategy::MaxC, 0).map_err(|e| e.to_string())?.x;
    let mut n_ok = 0;
    for n in 3..=12 {
        let c = gap_certificate(&spec, &g, &x, n).map_err(|e| e.to_string())?;
        ensure!(c.passed, "certificate n = {n}");
        let cover = porlab::certificates::gap_neighbourhood(&spec, &x, &c, 1_000_000).map_err(|e| e.to_string())?;
        let alpha = c.z.sub(&x).map_err(|e| e.to_string())?;
        let v = right_bracket_porous(&cover, &x, &g, std::slice::from_ref(&alpha)).map_err(|e| e.to_string())?;
        ensure!(v.is_in() && recheck_bracket(&cover, &x, &g, &v).map_err(|e| e.to_string())?, "bracket at n = {n}: {v:?}");
        n_ok += 1;
    }
    Ok(format!("λ matches on 1000 unions; p⁺ estimate {}; {n_ok} gap witnesses In", scan.estimate))
}

// 9 -------------------------------------------------------------------------

fn determinism() -> Check {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml");
    let mut cfg = RunConfig::load(&path).map_err(|e| e.to_string())?;
    cfg.set.seed = 7;
    cfg.foran.seed = Some(7);
    let a = cmd_verify(&cfg).map_err(|e| e.to_string())?;
    let b = cmd_verify(&cfg).map_err(|e| e.to_string())?;
    let (ja, jb) = (a.json().map_err(|e| e.to_string())?, b.json().map_err(|e| e.to_string())?);
    ensure!(ja == jb, "reports differ");
    ensure!(a.csv == b.csv, "CSV exports differ");
    ensure!(a.status.exit_code() == 0, "status {:?}: {:?}", a.status, a.report.failures);
    Ok(format!("two runs, {} identical bytes", ja.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 9] = [
        ("exact-decimal oracle suite", Duration::from_secs(1), decimal_oracle),
        ("sequence invariants (f = x/2, 200 terms)", Duration::from_secs(30), sequence_invariants),
        ("gap chain on the same sequence", Duration::from_secs(30), gap_chain),
        ("coupled expansion (f = x/2, g = x/10)", Duration::from_secs(120), coupled_expansion),
        ("set validity and nonemptiness", Duration::from_secs(60), set_validity),
        ("gap certificates", Duration::from_secs(300), gap_certificates),
        ("dichotomy trials (ε = 2, N = 5, M = 6)", Duration::from_secs(180), foran_dichotomy),
        ("metrics oracles", Duration::from_secs(60), metrics_oracles),
        ("verify determinism", Duration::from_secs(60), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took <= *limit => Ok(detail),
            Ok(detail) => Err(format!("over time limit; {detail}")),
            Err(e) => Err(e),
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        println!("[{tag}] {}. {name} ({:.2}s, limit {}s): {detail}", i + 1, took.as_secs_f64(), limit.as_secs());
        failed += outcome.is_err() as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
