use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use satrans_core::counting::{self, egf_count, s_closed, RecurrenceTable};
use satrans_core::cover::{count_code_pairs, cover_conditions, CodePairs};
use satrans_core::json::{certificate_to_json, parse_document, CoverDoc, Document, SystemDoc};
use satrans_core::modular::realize;
use satrans_core::transfer::{enumerate_saturated_bruteforce, DEFAULT_SEARCH_BUDGET};
use satrans_core::{BigCount, Error, GridShape, GroupSpec, SaturatedCover, TransferSystem};

use crate::args::{CountArgs, CoverFormat, EnumerateArgs, Method, RealizeArgs, TableFormat, VerifyArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NOT_SATURATED: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

pub const ANALYTIC_SIDE_LIMIT: usize = 64;
pub const CODES_SIDE_LIMIT: usize = 8;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, invalid input documents, or a failed check.
    Invalid(String),
    Limit(String),
    Parse(String),
    NotSaturated(String),
    /// Message plus the dump of both systems.
    Verification(String),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) | Failure::Io(_) => EXIT_FAILURE,
            Failure::Limit(_) => EXIT_LIMIT,
            Failure::Parse(_) => EXIT_PARSE,
            Failure::NotSaturated(_) => EXIT_NOT_SATURATED,
            Failure::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "{m}"),
            Failure::Limit(m) => write!(f, "limit exceeded: {m}"),
            Failure::Parse(m) => write!(f, "parse error: {m}"),
            Failure::NotSaturated(m) => write!(f, "not saturated: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => Failure::Parse(m),
            Error::Json(e) => Failure::Parse(e.to_string()),
            Error::NotSaturated => Failure::NotSaturated("transfer system is not saturated".into()),
            Error::ShapeTooLarge { .. } | Error::BudgetExceeded { .. } => Failure::Limit(e.to_string()),
            Error::VerificationFailed { shape, target, produced } => Failure::Verification(format!(
                "realization on {shape} does not reproduce the target\ntarget:   {}\nproduced: {}",
                serde_json::to_string(&SystemDoc::from_system(&target)).unwrap_or_default(),
                serde_json::to_string(&SystemDoc::from_system(&produced)).unwrap_or_default(),
            )),
            Error::Io(e) => Failure::Io(e),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

pub type Outcome = Result<(), Failure>;

/// Output sinks and the global `--budget` value.
pub struct Ctx<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    pub budget: Option<u64>,
}

impl Ctx<'_> {
    fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "warning: {msg}");
    }
}

// ---------------------------------------------------------------- count

/// Default size limit of a method.
pub fn within_default_limit(method: Method, m: usize, n: usize) -> bool {
    match method {
        Method::Bruteforce => (m <= 2 && n <= 2) || (m <= 1 && n <= 3) || (m <= 3 && n <= 1),
        Method::Codes => m <= CODES_SIDE_LIMIT && n <= CODES_SIDE_LIMIT,
        _ => m <= ANALYTIC_SIDE_LIMIT && n <= ANALYTIC_SIDE_LIMIT,
    }
}

fn limit_text(method: Method) -> String {
    match method {
        Method::Bruteforce => "(m,n) <= (2,2), (1,3) or (3,1)".into(),
        Method::Codes => format!("m, n <= {CODES_SIDE_LIMIT}"),
        _ => format!("m, n <= {ANALYTIC_SIDE_LIMIT}"),
    }
}

/// Checks the limit for one method, honouring `--budget`. Returns the
/// brute-force node budget.
fn admit(ctx: &mut Ctx<'_>, method: Method, m: usize, n: usize) -> Result<u64, Failure> {
    let mut nodes = DEFAULT_SEARCH_BUDGET;
    match (method, ctx.budget) {
        (Method::Bruteforce, Some(b)) => {
            nodes = b;
            ctx.warn(&format!("--budget {b}: brute-force node budget set, shape limit lifted"));
        }
        (_, Some(b)) => {
            if b < m.max(n) as u64 {
                return Err(Failure::Limit(format!("{m} x {n} exceeds --budget {b} for {}", method.name())));
            }
            if !within_default_limit(method, m, n) {
                ctx.warn(&format!("--budget {b}: side limit raised for {}", method.name()));
            }
        }
        (_, None) => {
            if !within_default_limit(method, m, n) {
                return Err(Failure::Limit(format!(
                    "{} supports {}, got ({m},{n}); pass --budget to override",
                    method.name(),
                    limit_text(method)
                )));
            }
        }
    }
    Ok(nodes)
}

/// s(m, n) by one method; limits are the caller's concern.
pub fn count_with(method: Method, m: usize, n: usize, nodes: u64) -> Result<BigCount, Failure> {
    Ok(match method {
        Method::Recurrence => counting::s_recurrence(m, n),
        Method::Closed => s_closed(m, n),
        Method::Egf => egf_count(m, n),
        Method::Codes => BigCount::from(count_code_pairs(GridShape::new(m, n))?),
        Method::Bruteforce => BigCount::from(enumerate_saturated_bruteforce(GridShape::new(m, n), nodes)?.len()),
    })
}

pub fn count(ctx: &mut Ctx<'_>, args: &CountArgs) -> Outcome {
    let (m, n) = (args.m, args.n);
    if args.all_methods {
        return count_all(ctx, m, n);
    }
    let method = args.method.unwrap_or(Method::Closed);
    let nodes = admit(ctx, method, m, n)?;
    if !args.table {
        let v = count_with(method, m, n, nodes)?;
        writeln!(ctx.out, "{v}")?;
        return Ok(());
    }
    let rows = if method == Method::Recurrence {
        RecurrenceTable::new().table(m, n)
    } else {
        let mut rows = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut row = Vec::with_capacity(n + 1);
            for j in 0..=n {
                row.push(count_with(method, i, j, nodes)?);
            }
            rows.push(row);
        }
        rows
    };
    match args.format {
        TableFormat::Csv => write!(ctx.out, "{}", counting::table_csv(&rows))?,
        TableFormat::Text => write_text_table(ctx.out, &rows)?,
    }
    Ok(())
}

fn write_text_table(out: &mut dyn Write, rows: &[Vec<BigCount>]) -> io::Result<()> {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
    let cols = cells.first().map_or(0, Vec::len);
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1).max(cols.to_string().len());
    let label = rows.len().to_string().len().max(3);
    write!(out, "{:>label$}", "m\\n")?;
    for j in 0..cols {
        write!(out, " {j:>width$}")?;
    }
    writeln!(out)?;
    for (i, row) in cells.iter().enumerate() {
        write!(out, "{i:>label$}")?;
        for c in row {
            write!(out, " {c:>width$}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn count_all(ctx: &mut Ctx<'_>, m: usize, n: usize) -> Outcome {
    let mut values: Vec<(Method, BigCount)> = Vec::new();
    for method in Method::ALL {
        let applicable = ctx.budget.is_some() || within_default_limit(method, m, n);
        if !applicable {
            writeln!(ctx.out, "{:<10} skipped (outside {})", method.name(), limit_text(method))?;
            continue;
        }
        let nodes = admit(ctx, method, m, n)?;
        let v = count_with(method, m, n, nodes)?;
        writeln!(ctx.out, "{:<10} {v}", method.name())?;
        values.push((method, v));
    }
    let first = &values[0].1;
    if values.iter().all(|(_, v)| v == first) {
        writeln!(ctx.out, "s({m},{n}) = {first}, {} methods agree", values.len())?;
        Ok(())
    } else {
        Err(Failure::Invalid(format!("methods disagree on s({m},{n})")))
    }
}

// ------------------------------------------------------------ enumerate

pub fn enumerate(ctx: &mut Ctx<'_>, args: &EnumerateArgs) -> Outcome {
    let (m, n) = (args.m, args.n);
    match ctx.budget {
        Some(b) => {
            if b < m.max(n) as u64 {
                return Err(Failure::Limit(format!("{m} x {n} exceeds --budget {b}")));
            }
            if !within_default_limit(Method::Codes, m, n) {
                ctx.warn(&format!("--budget {b}: enumeration side limit raised"));
            }
        }
        None if !within_default_limit(Method::Codes, m, n) => {
            return Err(Failure::Limit(format!(
                "enumerate supports m, n <= {CODES_SIDE_LIMIT}, got ({m},{n}); pass --budget to override"
            )));
        }
        None => {}
    }
    let mut out = io::BufWriter::new(&mut *ctx.out);
    for codes in CodePairs::new(GridShape::new(m, n))? {
        match args.format {
            CoverFormat::Codes => writeln!(out, "{codes}")?,
            CoverFormat::Json => {
                let s = SaturatedCover::from_codes(&codes)?;
                serde_json::to_writer(&mut out, &CoverDoc::from_cover(&s)).map_err(io::Error::from)?;
                writeln!(out)?;
            }
            CoverFormat::Dot => {
                let s = SaturatedCover::from_codes(&codes)?;
                write!(out, "{}", s.to_dot())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

// --------------------------------------------------------------- verify

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

/// One JSON document, or JSON Lines.
pub fn parse_documents(text: &str) -> Result<Vec<Document>, Failure> {
    let whole = match parse_document(text) {
        Ok(doc) => return Ok(vec![doc]),
        Err(e) => e,
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    if lines.len() <= 1 {
        return Err(whole.into());
    }
    lines
        .into_iter()
        .map(|(i, l)| parse_document(l).map_err(|e| Failure::Parse(format!("line {}: {e}", i + 1))))
        .collect()
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Verdict for one document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub saturated: bool,
}

pub fn verify_system(out: &mut dyn Write, doc: &SystemDoc) -> io::Result<Verdict> {
    writeln!(out, "transfer system on {} ({} relations)", doc.shape(), doc.relations.len())?;
    let rel = match doc.to_relation() {
        Ok(r) => r,
        Err(e) => {
            writeln!(out, "  refines order:            FAIL ({e})")?;
            writeln!(out, "  remaining axioms:         not checked")?;
            return Ok(Verdict { valid: false, saturated: false });
        }
    };
    let report = rel.check_axioms();
    writeln!(out, "  refines order:            {}", mark(report.refines_order))?;
    writeln!(out, "  reflexive:                {}", mark(report.reflexive))?;
    writeln!(out, "  transitive:               {}", mark(report.transitive))?;
    writeln!(out, "  closed under restriction: {}", mark(report.restriction_closed))?;
    if !report.all() {
        writeln!(out, "  verdict: not a transfer system")?;
        return Ok(Verdict { valid: false, saturated: false });
    }
    let t = TransferSystem::try_from_relation(rel).expect("axioms checked");
    let saturated = t.is_saturated();
    writeln!(out, "  saturated:                {}", if saturated { "yes" } else { "NO" })?;
    if saturated {
        let codes = SaturatedCover::from_system(&t).expect("saturated").codes();
        writeln!(out, "  cover codes:              {codes}")?;
    }
    writeln!(
        out,
        "  verdict: valid transfer system, {}",
        if saturated { "saturated" } else { "NOT saturated" }
    )?;
    Ok(Verdict { valid: true, saturated })
}

pub fn verify_cover(out: &mut dyn Write, doc: &CoverDoc) -> io::Result<Verdict> {
    writeln!(
        out,
        "cover on {} ({} horizontal, {} vertical edges)",
        doc.shape(),
        doc.horizontal.len(),
        doc.vertical.len()
    )?;
    let conditions = doc.edges().and_then(|e| cover_conditions(doc.shape(), &e));
    let c = match conditions {
        Ok(c) => c,
        Err(e) => {
            writeln!(out, "  edges:                    FAIL ({e})")?;
            return Ok(Verdict { valid: false, saturated: false });
        }
    };
    writeln!(out, "  (1) horizontal prefixes:  {}", mark(c.horizontal_prefix))?;
    writeln!(out, "  (2) vertical prefixes:    {}", mark(c.vertical_prefix))?;
    writeln!(out, "  (3) no 3-of-4 square:     {}", mark(c.three_of_four))?;
    if !c.all() {
        writeln!(out, "  verdict: not a saturated cover")?;
        return Ok(Verdict { valid: false, saturated: false });
    }
    let s = doc.to_cover().expect("conditions checked");
    writeln!(out, "  codes:                    {}", s.codes())?;
    writeln!(out, "  verdict: valid saturated cover")?;
    Ok(Verdict { valid: true, saturated: true })
}

pub fn verify(ctx: &mut Ctx<'_>, args: &VerifyArgs) -> Outcome {
    let docs = parse_documents(&read_input(&args.file)?)?;
    let (mut valid, mut saturated) = (0, 0);
    for (i, doc) in docs.iter().enumerate() {
        write!(ctx.out, "[{}] ", i + 1)?;
        let v = match doc {
            Document::System(d) => verify_system(ctx.out, d)?,
            Document::Cover(d) => verify_cover(ctx.out, d)?,
        };
        valid += usize::from(v.valid);
        saturated += usize::from(v.valid && v.saturated);
    }
    writeln!(ctx.out, "{} documents, {valid} valid, {saturated} saturated", docs.len())?;
    if valid < docs.len() {
        return Err(Failure::Invalid(format!("{} of {} documents invalid", docs.len() - valid, docs.len())));
    }
    if args.require_saturated && saturated < docs.len() {
        return Err(Failure::NotSaturated(format!(
            "{} of {} documents not saturated",
            docs.len() - saturated,
            docs.len()
        )));
    }
    Ok(())
}

// -------------------------------------------------------------- realize

fn target_system(doc: &Document) -> Result<TransferSystem, Failure> {
    match doc {
        Document::System(d) => Ok(d.to_system()?),
        Document::Cover(d) => {
            let edges = d.edges()?;
            let c = cover_conditions(d.shape(), &edges)?;
            if !c.all() {
                return Err(Failure::NotSaturated("input is not a saturated cover".into()));
            }
            Ok(d.to_cover()?.to_system())
        }
    }
}

pub fn realize_documents(ctx: &mut Ctx<'_>, docs: &[Document], p: u64, q: u64) -> Outcome {
    for doc in docs {
        let t = target_system(doc)?;
        let shape = t.shape();
        if shape.m != 1 {
            return Err(Failure::Invalid(format!("realize needs shape (1,n), got {shape}")));
        }
        if !t.is_saturated() {
            return Err(Failure::NotSaturated(format!("the input system on {shape} is not saturated")));
        }
        let spec = GroupSpec::new(p, q, shape.n)?;
        let cert = realize(&t, spec)?;
        cert.verify()?;
        writeln!(ctx.out, "{}", certificate_to_json(&cert))?;
    }
    Ok(())
}

pub fn realize_cmd(ctx: &mut Ctx<'_>, args: &RealizeArgs) -> Outcome {
    // Reject bad primes before reading the input.
    GroupSpec::new(args.p, args.q, 0)?;
    let docs = parse_documents(&read_input(&args.file)?)?;
    realize_documents(ctx, &docs, args.p, args.q)
}
