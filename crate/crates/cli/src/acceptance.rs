//! The acceptance suite behind `satrans selftest` and the `acceptance` test
//! target. Each criterion returns a one-line detail on success and a reason
//! on failure.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satrans_core::counting::{
    egf_series, marked_partition_check_with, pde_check, s_closed, s_recurrence, StirlingTable, DIRECT_MARKED_LIMIT,
};
use satrans_core::cover::{saturated_covers, CodePairs};
use satrans_core::json::{Document, SystemDoc};
use satrans_core::modular::{
    find_index_set_bruteforce, find_index_set_unreduced, index_set_from_orbits, modular_divisor_system,
    modular_transfer_system, orbit_count, realize,
};
use satrans_core::transfer::{enumerate_saturated_bruteforce, generate, DEFAULT_SEARCH_BUDGET};
use satrans_core::{BigCount, ClassLabel, GridPoint, GridShape, GroupSpec, Relation, SaturatedCover};

use crate::args::{CoverFormat, EnumerateArgs, Level};
use crate::commands::{self, Ctx};

pub type CountFn = fn(usize, usize) -> BigCount;

/// The counting routes under test; replaceable so that a broken formula can
/// be shown to fail the suite.
#[derive(Clone, Copy)]
pub struct Counters {
    pub recurrence: CountFn,
    pub closed: CountFn,
}

impl Default for Counters {
    fn default() -> Self {
        Self { recurrence: s_recurrence, closed: s_closed }
    }
}

pub struct Suite {
    pub level: Level,
    pub counters: Counters,
    /// The `satrans` binary, used by criterion 12 for process-level runs.
    pub binary: Option<PathBuf>,
}

pub struct Report {
    pub id: u8,
    pub title: &'static str,
    pub result: Result<String, String>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "base rows s(m,0) = s(0,m) = 2^m"),
    (2, "s(1,1) = 7 by all five methods"),
    (3, "recurrence = closed = EGF, symmetry"),
    (4, "code and brute-force oracles"),
    (5, "marked-partition identity"),
    (6, "EGF satisfies the PDE"),
    (7, "fibers of the classification map"),
    (8, "code and system bijections"),
    (9, "modular systems are saturated"),
    (10, "realization on C_{pq^n}"),
    (11, "chickenfoot is not modular"),
    (12, "deterministic output"),
];

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Quick => "quick",
        Level::Full => "full",
    }
}

impl Suite {
    pub fn new(level: Level) -> Self {
        Self { level, counters: Counters::default(), binary: None }
    }

    fn full(&self) -> bool {
        self.level == Level::Full
    }

    pub fn run(&self, id: u8) -> Report {
        let title = CRITERIA
            .iter()
            .find(|(i, _)| *i == id)
            .map_or("unknown criterion", |(_, t)| *t);
        let start = Instant::now();
        let result = match id {
            1 => self.base_rows(),
            2 => self.seven(),
            3 => self.triple_agreement(),
            4 => self.oracles(),
            5 => self.marked_partitions(),
            6 => self.pde(),
            7 => self.fibers(),
            8 => self.bijections(),
            9 => self.modular_saturation(),
            10 => self.realization(),
            11 => self.chickenfoot(),
            12 => self.determinism(),
            _ => Err(format!("no criterion {id}")),
        };
        Report { id, title, result, elapsed: start.elapsed() }
    }

    /// Runs the selected criteria, printing one line each. Returns whether
    /// all passed.
    pub fn run_all(&self, only: Option<u8>, out: &mut dyn Write) -> io::Result<bool> {
        let ids: Vec<u8> = match only {
            Some(id) => vec![id],
            None => CRITERIA.iter().map(|(i, _)| *i).collect(),
        };
        let mut failed = Vec::new();
        for id in ids {
            let r = self.run(id);
            let secs = r.elapsed.as_secs_f64();
            match &r.result {
                Ok(detail) => writeln!(out, "PASS {:>2} {}: {detail} [{secs:.2}s]", r.id, r.title)?,
                Err(why) => {
                    writeln!(out, "FAIL {:>2} {}: {why} [{secs:.2}s]", r.id, r.title)?;
                    writeln!(out, "        repro: satrans selftest {} --only {}", level_name(self.level), r.id)?;
                    failed.push(r.id);
                }
            }
            out.flush()?;
        }
        if failed.is_empty() {
            writeln!(out, "all criteria passed ({})", level_name(self.level))?;
        } else {
            writeln!(out, "{} failed: {:?}", failed.len(), failed)?;
        }
        Ok(failed.is_empty())
    }

    fn base_rows(&self) -> Check {
        let Counters { recurrence, closed } = self.counters;
        for k in 0..=20 {
            let want = BigCount::from(1u32) << k;
            for (name, f) in [("closed", closed), ("recurrence", recurrence)] {
                ensure(f(k, 0) == want && f(0, k) == want, || format!("{name}: s({k},0) or s(0,{k}) != 2^{k}"))?;
            }
        }
        Ok("m <= 20, closed formula and recurrence".into())
    }

    fn seven(&self) -> Check {
        let shape = GridShape::new(1, 1);
        let values = [
            ("recurrence", (self.counters.recurrence)(1, 1)),
            ("closed", (self.counters.closed)(1, 1)),
            ("egf", egf_series(2).egf_count(1, 1).map_err(|e| e.to_string())?.magnitude().clone()),
            ("codes", BigCount::from(CodePairs::new(shape).map_err(|e| e.to_string())?.count())),
            (
                "bruteforce",
                BigCount::from(
                    enumerate_saturated_bruteforce(shape, DEFAULT_SEARCH_BUDGET)
                        .map_err(|e| e.to_string())?
                        .len(),
                ),
            ),
        ];
        for (name, v) in &values {
            ensure(*v == BigCount::from(7u32), || format!("{name} gives {v}"))?;
        }
        Ok("recurrence, closed, egf, codes, bruteforce all give 7".into())
    }

    fn triple_agreement(&self) -> Check {
        let series = egf_series(12);
        for m in 0..=6 {
            for n in 0..=6 {
                let r = (self.counters.recurrence)(m, n);
                let c = (self.counters.closed)(m, n);
                let e = series.egf_count(m, n).map_err(|e| e.to_string())?;
                ensure(r == c && e == c.clone().into(), || format!("s({m},{n}): recurrence {r}, closed {c}, egf {e}"))?;
                ensure(c == (self.counters.closed)(n, m), || format!("s({m},{n}) != s({n},{m})"))?;
            }
        }
        Ok("0 <= m, n <= 6".into())
    }

    fn oracles(&self) -> Check {
        let side = if self.full() { 5 } else { 4 };
        for m in 0..=side {
            for n in 0..=side {
                let codes = CodePairs::new(GridShape::new(m, n)).map_err(|e| e.to_string())?.count();
                let want = (self.counters.closed)(m, n);
                ensure(BigCount::from(codes) == want, || format!("({m},{n}): {codes} code pairs, closed {want}"))?;
            }
        }
        let shapes: &[(usize, usize)] = if self.full() {
            &[(1, 1), (2, 1), (1, 2), (1, 3)]
        } else {
            &[(1, 1), (2, 1), (1, 2)]
        };
        for &(m, n) in shapes {
            let shape = GridShape::new(m, n);
            let brute = enumerate_saturated_bruteforce(shape, DEFAULT_SEARCH_BUDGET).map_err(|e| e.to_string())?;
            let want = (self.counters.closed)(m, n);
            ensure(BigCount::from(brute.len()) == want, || {
                format!("({m},{n}): brute force finds {}, closed {want}", brute.len())
            })?;
            let from_brute: BTreeSet<_> = brute
                .iter()
                .map(|t| SaturatedCover::from_system(t).map(|s| s.codes().to_string()))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let from_codes: BTreeSet<_> = CodePairs::new(shape).map_err(|e| e.to_string())?.map(|c| c.to_string()).collect();
            ensure(from_brute == from_codes, || format!("({m},{n}): brute-force systems differ from code pairs"))?;
        }
        Ok(format!("codes for m, n <= {side}; brute force on {shapes:?}"))
    }

    fn marked_partitions(&self) -> Check {
        let mut stirling = StirlingTable::new();
        for l in 0..=12 {
            for r in 0..=l {
                let rep = marked_partition_check_with(&mut stirling, l, r);
                ensure(rep.lhs == rep.rhs, || format!("l={l}, r={r}: {} != {}", rep.lhs, rep.rhs))?;
                if l <= 8 {
                    ensure(rep.direct.is_some() && rep.holds(), || {
                        format!("l={l}, r={r}: direct count {:?} vs {}", rep.direct, rep.lhs)
                    })?;
                }
            }
        }
        Ok(format!("0 <= r <= l <= 12, direct counts for l <= {}", DIRECT_MARKED_LIMIT.min(8)))
    }

    fn pde(&self) -> Check {
        // Truncation at order 11 makes both sides exact through total degree 10.
        ensure(pde_check(11), || "coefficient mismatch below total degree 11".into())?;
        Ok("coefficientwise through total degree 10".into())
    }

    fn fibers(&self) -> Check {
        let mut checked = 0usize;
        for m in 0..=3 {
            for n in 1..=3 {
                let shape = GridShape::new(m, n);
                let covers: Vec<SaturatedCover> = saturated_covers(shape).map_err(|e| e.to_string())?.collect();
                for label in ClassLabel::all(m) {
                    let fiber: Vec<&SaturatedCover> = covers
                        .iter()
                        .filter(|s| s.classify().map(|c| c == label).unwrap_or(false))
                        .collect();
                    let base = if label.is_full() { m } else { label.len() };
                    let want = (self.counters.closed)(base, n - 1);
                    ensure(BigCount::from(fiber.len()) == want, || {
                        format!("{shape}, label {label}: fiber of size {}, expected {want}", fiber.len())
                    })?;
                    for s in &fiber {
                        let t = s.collapse().map_err(|e| e.to_string())?;
                        let back = SaturatedCover::expand(&t, &label, shape).map_err(|e| e.to_string())?;
                        ensure(back == **s, || format!("{shape}, label {label}: expand(collapse(S)) != S"))?;
                    }
                    let base_shape = GridShape::new(base, n - 1);
                    for t in saturated_covers(base_shape).map_err(|e| e.to_string())? {
                        let s = SaturatedCover::expand(&t, &label, shape).map_err(|e| e.to_string())?;
                        ensure(s.classify().ok() == Some(label), || format!("{shape}: expand leaves the fiber of {label}"))?;
                        ensure(s.collapse().ok() == Some(t), || format!("{shape}, label {label}: collapse(expand(T)) != T"))?;
                    }
                    checked += 1;
                }
            }
        }
        Ok(format!("{checked} fibers, m <= 3, 1 <= n <= 3"))
    }

    fn bijections(&self) -> Check {
        let mut total = 0usize;
        for m in 0..=4 {
            for n in 0..=4 {
                let shape = GridShape::new(m, n);
                let mut systems = BTreeSet::new();
                for codes in CodePairs::new(shape).map_err(|e| e.to_string())? {
                    let s = SaturatedCover::from_codes(&codes).map_err(|e| e.to_string())?;
                    ensure(s.codes() == codes, || format!("codes {codes} do not round-trip"))?;
                    let t = s.to_system();
                    ensure(t.is_saturated(), || format!("system of {codes} is not saturated"))?;
                    let back = SaturatedCover::from_system(&t).map_err(|e| e.to_string())?;
                    ensure(back == s, || format!("cover {codes} does not round-trip through its system"))?;
                    ensure(back.to_system() == t, || format!("system of {codes} does not round-trip"))?;
                    systems.insert(serde_json::to_string(&SystemDoc::from_system(&t)).expect("serializable"));
                }
                let want = (self.counters.closed)(m, n);
                ensure(BigCount::from(systems.len()) == want, || {
                    format!("{shape}: {} distinct systems, expected {want}", systems.len())
                })?;
                total += systems.len();
            }
        }
        Ok(format!("{total} covers, m, n <= 4"))
    }

    fn modular_saturation(&self) -> Check {
        let (exhaustive_max_orbits, samples) = if self.full() { (16, 1000) } else { (12, 100) };
        let check = |k: u64, bits: &[bool]| -> Result<(), String> {
            let set = index_set_from_orbits(k, bits).map_err(|e| e.to_string())?;
            let t = modular_divisor_system(&set).map_err(|e| e.to_string())?;
            ensure(t.relation().check_axioms().all(), || format!("{set}: not a transfer system"))?;
            ensure(t.is_saturated(), || format!("{set}: not saturated"))
        };
        let mut exhaustive = 0u64;
        let mut k_max = 0;
        for k in 1..=60u64 {
            let orbits = orbit_count(k);
            if orbits > exhaustive_max_orbits {
                continue;
            }
            k_max = k;
            for mask in 0u64..(1 << orbits) {
                let bits: Vec<bool> = (0..orbits).map(|i| mask >> i & 1 == 1).collect();
                check(k, &bits)?;
                exhaustive += 1;
            }
        }
        let mut random = 0u64;
        for k in (k_max + 1)..=200 {
            let mut rng = ChaCha8Rng::seed_from_u64(k);
            for _ in 0..samples {
                let bits: Vec<bool> = (0..orbit_count(k)).map(|_| rng.random_bool(0.5)).collect();
                check(k, &bits)?;
                random += 1;
            }
        }
        Ok(format!(
            "{exhaustive} index sets exhaustively (k <= {k_max}), {random} seeded random ({samples} per k <= 200)"
        ))
    }

    fn realization(&self) -> Check {
        let mut certified = 0usize;
        for (p, q) in [(5, 7), (7, 5), (5, 11)] {
            for (n, want) in [(0usize, 2usize), (1, 7), (2, 23)] {
                let spec = GroupSpec::new(p, q, n).map_err(|e| e.to_string())?;
                let covers: Vec<SaturatedCover> = saturated_covers(spec.shape()).map_err(|e| e.to_string())?.collect();
                ensure(covers.len() == want, || format!("{spec}: {} saturated systems, expected {want}", covers.len()))?;
                for s in &covers {
                    let t = s.to_system();
                    let cert = realize(&t, spec).map_err(|e| format!("{spec}, codes {}: {e}", s.codes()))?;
                    // Independent re-check from the raw index set.
                    let induced = modular_transfer_system(&cert.index_set, p, q).map_err(|e| e.to_string())?;
                    let w = cert.witness_multiple;
                    ensure(induced == t, || format!("{spec}, codes {}: certificate induces another system", s.codes()))?;
                    ensure(w != 0 && w % spec.q_power() == 0 && cert.index_set.contains(w), || {
                        format!("{spec}, codes {}: bad witness {w}", s.codes())
                    })?;
                    certified += 1;
                }
            }
        }
        let groups: &[(u64, u64)] = &[(5, 7), (5, 11)];
        let mut confirmed = Vec::new();
        for &(p, q) in groups {
            let spec = GroupSpec::new(p, q, 1).map_err(|e| e.to_string())?;
            let k = spec.modulus();
            let budget = orbit_count(k) as u32;
            let mut count = 0;
            for s in saturated_covers(spec.shape()).map_err(|e| e.to_string())? {
                let t = s.to_system();
                let target = t.to_divisor_system(p, q).map_err(|e| e.to_string())?;
                let cert = realize(&t, spec).map_err(|e| e.to_string())?;
                let found = find_index_set_bruteforce(&target, budget)
                    .map_err(|e| e.to_string())?
                    .ok_or_else(|| format!("C_{k}, codes {}: exhaustive search finds no index set", s.codes()))?;
                let via_search = modular_transfer_system(&found, p, q).map_err(|e| e.to_string())?;
                let via_cert = modular_transfer_system(&cert.index_set, p, q).map_err(|e| e.to_string())?;
                ensure(via_search == t && via_cert == via_search, || {
                    format!("C_{k}, codes {}: search and certificate disagree", s.codes())
                })?;
                count += 1;
            }
            ensure(count >= 3, || format!("C_{k}: only {count} confirmations"))?;
            confirmed.push(format!("C_{k}: {count}"));
        }
        Ok(format!("{certified} verified certificates; search confirmations {}", confirmed.join(", ")))
    }

    fn chickenfoot(&self) -> Check {
        let mut r = Relation::new(GridShape::new(1, 1));
        r.insert(GridPoint::new(0, 0), GridPoint::new(1, 1)).map_err(|e| e.to_string())?;
        let foot = generate(&r);
        ensure(!foot.is_saturated(), || "chickenfoot reported saturated".into())?;
        let target = foot.to_divisor_system(5, 7).map_err(|e| e.to_string())?;
        let bits = orbit_count(35) as u32;
        let reduced = find_index_set_bruteforce(&target, bits).map_err(|e| e.to_string())?;
        ensure(reduced.is_none(), || format!("reduced search found {}", reduced.as_ref().unwrap()))?;
        let plain = find_index_set_unreduced(&target, bits).map_err(|e| e.to_string())?;
        ensure(plain.is_none(), || format!("unreduced search found {}", plain.as_ref().unwrap()))?;
        Ok(format!("no index set on C_35 (2^{bits} sets searched, with and without coset reduction)"))
    }

    fn determinism(&self) -> Check {
        let enumerate = || {
            capture(|ctx| {
                commands::enumerate(ctx, &EnumerateArgs { m: 3, n: 2, format: CoverFormat::Json })
            })
        };
        let first = enumerate()?;
        ensure(first == enumerate()?, || "enumerate 3 2 differs between runs".into())?;
        let lines = first.lines().count();
        ensure(BigCount::from(lines) == (self.counters.closed)(3, 2), || {
            format!("enumerate 3 2 emits {lines} covers, expected s(3,2)")
        })?;

        let input = realize_input(2)?;
        let docs = commands::parse_documents(&input).map_err(|e| e.to_string())?;
        let realize_run = || capture(|ctx| commands::realize_documents(ctx, &docs, 5, 7));
        let certs = realize_run()?;
        ensure(certs == realize_run()?, || "realize differs between runs".into())?;

        let Some(bin) = &self.binary else {
            return Ok("in-process enumerate and realize".into());
        };
        let path = std::env::temp_dir().join(format!("satrans-determinism-{}.jsonl", std::process::id()));
        std::fs::write(&path, &input).map_err(|e| e.to_string())?;
        let outcome = (|| {
            let path_arg = path.to_str().ok_or("temp path is not UTF-8")?;
            let enumerate_args = ["enumerate", "3", "2", "--format", "json"];
            let realize_args = ["realize", path_arg, "--p", "5", "--q", "7"];
            for (args, expected) in [(&enumerate_args[..], &first), (&realize_args[..], &certs)] {
                let a = run_binary(bin, args)?;
                let b = run_binary(bin, args)?;
                ensure(a == b, || format!("satrans {} differs between runs", args.join(" ")))?;
                ensure(a == *expected, || format!("satrans {} differs from the library output", args.join(" ")))?;
            }
            Ok::<_, String>(())
        })();
        let _ = std::fs::remove_file(&path);
        outcome?;
        Ok("enumerate and realize, in-process and as two processes".into())
    }
}

/// JSON Lines with every saturated system on `[1] x [n]`.
fn realize_input(n: usize) -> Result<String, String> {
    let mut s = String::new();
    for cover in saturated_covers(GridShape::new(1, n)).map_err(|e| e.to_string())? {
        let doc = Document::System(SystemDoc::from_system(&cover.to_system()));
        s.push_str(&serde_json::to_string(&doc).map_err(|e| e.to_string())?);
        s.push('\n');
    }
    Ok(s)
}

fn capture(f: impl FnOnce(&mut Ctx<'_>) -> commands::Outcome) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut ctx = Ctx { out: &mut out, err: &mut err, budget: None };
    f(&mut ctx).map_err(|e| e.to_string())?;
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn run_binary(bin: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(bin).args(args).output().map_err(|e| format!("cannot run {}: {e}", bin.display()))?;
    ensure(out.status.success(), || {
        format!("satrans {} exited with {}", args.join(" "), out.status)
    })?;
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}
