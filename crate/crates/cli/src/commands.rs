use std::collections::BTreeMap;
use std::path::PathBuf;

use anosov_zeta_core::group::{format_word, validate_automaton, CodingAutomaton, GroupPresentation, Word};
use anosov_zeta_core::orbit::{
    brute_force_classes, enumerate_primitive_classes, enumerate_with_sink, non_lattice_check, Cutoff,
    EnumerationOptions, OrbitDatabase, BRUTE_FORCE_MAX_LENGTH,
};
use anosov_zeta_core::rep::{projective_fixed_point, Representation, UnitaryCharacter};
use anosov_zeta_core::zeta::{
    counting_report, entropy, euler_selberg, euler_zeta, fredholm_det, fredholm_det_exp, l_euler_selberg,
    l_euler_zeta, linspace, selberg_truncation_bound, zeta_via_determinants, EntropyEstimate, ScanFlag, ScanGrid,
    Scanner, TraceTable,
};
use anosov_zeta_core::{Complex64, Error};
use serde::Serialize;

use crate::args::Command;
use crate::config::{CharacterKind, RepKind, RunConfig};
use crate::error::{CliError, Result};
use crate::formats::{
    automaton_to_json, create, load_automaton, load_character, load_database, load_representation, rep_digest,
    write_csv, write_json, DatabaseHeader, DatabaseWriter, Meta,
};
use crate::formats::ValidationSummary;

/// Resolved inputs shared by every subcommand.
pub struct Context {
    pub config: RunConfig,
    pub meta: Meta,
    pub presentation: GroupPresentation,
    pub rep: Representation,
    pub rep_digest: String,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self> {
        let presentation = GroupPresentation::surface(config.genus)?;
        let mut rep = match config.representation.source {
            RepKind::Octagon => Representation::fuchsian_octagon(config.genus)?,
            RepKind::File => load_representation(config.representation.path.as_deref().expect("validated"))?,
        };
        if rep.genus() != config.genus {
            return Err(CliError::Config(format!(
                "representation has genus {} but the config asks for {}",
                rep.genus(),
                config.genus
            )));
        }
        if let Some(d) = config.representation.lift {
            if rep.dim() != 2 {
                return Err(CliError::Config("only 2-dimensional representations can be lifted".into()));
            }
            rep = rep.symmetric_power_lift(d)?;
        }
        let rep_digest = rep_digest(&rep);
        let meta = Meta::new(config.digest());
        Ok(Context { config, meta, presentation, rep, rep_digest })
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.config.output_dir.join(name)
    }

    pub fn automaton(&self) -> Result<CodingAutomaton> {
        let a = match &self.config.automaton.path {
            Some(p) => load_automaton(p)?,
            None => CodingAutomaton::build(&self.presentation, self.config.automaton.radius)?,
        };
        if a.genus() != self.config.genus {
            return Err(CliError::Config("automaton genus differs from the config".into()));
        }
        Ok(a)
    }

    pub fn enumeration_options(&self) -> Result<EnumerationOptions> {
        Ok(EnumerationOptions {
            seed: self.config.seed,
            weight_mode: self.config.weight_mode()?,
            rep_digest: self.rep_digest.clone(),
            max_records: self.config.max_records,
            ..Default::default()
        })
    }

    /// Loads the configured database or enumerates one, then applies the
    /// trace-length truncation.
    pub fn database(&self) -> Result<OrbitDatabase> {
        let mode = self.config.weight_mode()?;
        let mut db = match &self.config.database {
            Some(p) => {
                let (_, mut db) = load_database(p, Some(&self.rep_digest))?;
                if db.weight_mode() != mode {
                    if let Cutoff::Weight(_) = db.cutoff() {
                        return Err(CliError::Config(
                            "a weight-cut database cannot be reread under another weight mode".into(),
                        ));
                    }
                    db.set_weight_mode(mode);
                    db.infer_complete_weight();
                }
                db
            }
            None => enumerate_primitive_classes(
                &self.automaton()?,
                &self.rep,
                self.config.cutoff.to_cutoff()?,
                &self.enumeration_options()?,
            )?,
        };
        if let (Some(n), Some(len)) = (self.config.truncation.n_max, db.complete_length()) {
            if n < len {
                db = db.truncate_length(n);
            } else if n > len {
                return Err(Error::Completeness { requested: n as f64, limit: len as f64 }.into());
            }
        }
        Ok(db)
    }

    pub fn character(&self) -> Result<UnitaryCharacter> {
        let c = &self.config.character;
        match c.source {
            CharacterKind::None => Ok(UnitaryCharacter::trivial(self.config.genus)),
            CharacterKind::Theta => Ok(UnitaryCharacter::abelian(&self.presentation, c.theta.clone())?),
            CharacterKind::File => load_character(&self.presentation, c.path.as_deref().expect("validated")),
        }
    }

    /// Configured evaluation points, or `h + 1` and `h + 1 + 0.7i`.
    fn points(&self, h: f64) -> Vec<Complex64> {
        if self.config.s.is_empty() {
            vec![Complex64::new(h + 1.0, 0.0), Complex64::new(h + 1.0, 0.7)]
        } else {
            self.config.s.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
        }
    }
}

fn trace_length(db: &OrbitDatabase) -> Result<usize> {
    db.complete_length()
        .ok_or_else(|| CliError::Config("determinant methods need a length-cut database".into()))
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

pub fn run(cmd: Command, ctx: &Context) -> Result<()> {
    match cmd {
        Command::Automaton => automaton(ctx),
        Command::Orbits => orbits(ctx),
        Command::Entropy => entropy_cmd(ctx),
        Command::Zeta => zeta(ctx),
        Command::Lfun => lfun(ctx),
        Command::Count => count(ctx),
        Command::Scan => scan_cmd(ctx),
        Command::Limitset => limitset(ctx),
        Command::Verify => verify(ctx),
    }
}

fn automaton(ctx: &Context) -> Result<()> {
    let a = ctx.automaton()?;
    let mut file = automaton_to_json(&a);
    file.meta = Some(ctx.meta.clone());
    let n = ctx.config.validate_n;
    let result = validate_automaton(&a, &ctx.presentation, n, ctx.config.seed);
    file.validation = Some(match &result {
        Ok(r) => ValidationSummary::from_report(r),
        Err(e) => ValidationSummary::failed(n, e.to_string()),
    });
    let path = ctx.out("automaton.json");
    write_json(&path, &file)?;
    result?;
    println!("{}: {} vertices, validated to length {n}", path.display(), a.num_vertices());
    Ok(())
}

#[derive(Serialize)]
struct OrbitsSummary {
    meta: Meta,
    database: String,
    cutoff: crate::formats::CutoffField,
    records: u64,
    complete_weight: f64,
    cycles: Vec<u64>,
    labels: Vec<u64>,
    merged: Vec<u64>,
    classes: Vec<u64>,
}

fn orbits(ctx: &Context) -> Result<()> {
    let a = ctx.automaton()?;
    let cutoff = ctx.config.cutoff.to_cutoff()?;
    let opts = ctx.enumeration_options()?;
    let path = ctx.out("orbits.jsonl");
    let header =
        DatabaseHeader::new(ctx.meta.clone(), cutoff, &ctx.rep_digest, opts.weight_mode, ctx.config.genus, ctx.rep.dim());
    let mut w = DatabaseWriter::new(create(&path)?, &header).map_err(|e| CliError::io(&path, e))?;
    let mut io_err = None;
    let result = enumerate_with_sink(&a, &ctx.rep, cutoff, &opts, &mut |_, recs| {
        for r in &recs {
            if let Err(e) = w.write(r.as_ref()) {
                io_err = Some(e);
                return Err(Error::Input("write failed".into()));
            }
        }
        Ok(())
    });
    if let Some(e) = io_err {
        return Err(CliError::io(&path, e));
    }
    let (stats, complete) = result?;
    let records = w.records();
    w.finish().map_err(|e| CliError::io(&path, e))?;
    let summary = OrbitsSummary {
        meta: ctx.meta.clone(),
        database: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        cutoff: cutoff.into(),
        records,
        complete_weight: complete,
        cycles: stats.cycles,
        labels: stats.labels,
        merged: stats.merged,
        classes: stats.classes,
    };
    write_json(&ctx.out("orbits.json"), &summary)?;
    println!("{}: {records} primitive classes", path.display());
    Ok(())
}

#[derive(Serialize)]
struct EntropyReport {
    value: f64,
    bracket: [f64; 2],
    n_used: usize,
    estimator: &'static str,
    residual: f64,
    per_length: BTreeMap<usize, f64>,
}

impl From<&EntropyEstimate> for EntropyReport {
    fn from(e: &EntropyEstimate) -> Self {
        EntropyReport {
            value: e.value,
            bracket: [e.bracket.0, e.bracket.1],
            n_used: e.n_used,
            estimator: "pressure-difference",
            residual: e.residual,
            per_length: e.per_length.iter().copied().collect(),
        }
    }
}

#[derive(Serialize)]
struct EntropyFile {
    meta: Meta,
    records: usize,
    complete_weight: f64,
    entropy: EntropyReport,
}

fn entropy_cmd(ctx: &Context) -> Result<()> {
    let db = ctx.database()?;
    let h = entropy(&db)?;
    let path = ctx.out("entropy.json");
    write_json(
        &path,
        &EntropyFile {
            meta: ctx.meta.clone(),
            records: db.len(),
            complete_weight: db.complete_weight(),
            entropy: (&h).into(),
        },
    )?;
    println!("{}: h = {:.10} from lengths up to {}", path.display(), h.value, h.n_used);
    Ok(())
}

#[derive(Serialize)]
struct EvalRow {
    s_re: f64,
    s_im: f64,
    value_re: f64,
    value_im: f64,
    method: &'static str,
    truncation: String,
}

impl EvalRow {
    fn new(s: Complex64, v: Complex64, method: &'static str, truncation: String) -> Self {
        EvalRow { s_re: s.re, s_im: s.im, value_re: v.re, value_im: v.im, method, truncation }
    }
}

#[derive(Serialize)]
struct PointDiagnostics {
    s: [f64; 2],
    /// Relative difference between the two methods.
    method_difference: f64,
    /// Relative residual of `ζ(s) = Z(s+1)/Z(s)` with matched truncation.
    selberg_ratio_residual: f64,
    selberg_truncation_bound: f64,
    trace_alternating_residual: f64,
    /// `|c_N|` per determinant, the last Fredholm coefficient used.
    last_coefficient: Vec<f64>,
}

#[derive(Serialize)]
struct ZetaDiagnostics {
    meta: Meta,
    entropy: EntropyReport,
    records: usize,
    trace_length: usize,
    terms: usize,
    selberg_shifts: usize,
    points: Vec<PointDiagnostics>,
}

fn zeta(ctx: &Context) -> Result<()> {
    let db = ctx.database()?;
    let h = entropy(&db)?;
    let n_max = trace_length(&db)?;
    let terms = ctx.config.truncation.terms;
    let shifts = ctx.config.truncation.selberg_shifts;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for s in ctx.points(h.value) {
        let e = euler_zeta(&db, s, None)?;
        let d = zeta_via_determinants(&db, s, terms)?;
        rows.push(EvalRow::new(s, e, "euler", format!("p<={n_max}")));
        rows.push(EvalRow::new(s, d, "determinant", format!("N={terms};n<={n_max}")));
        let ratio = euler_selberg(&db, s + 1.0, None, shifts)? / euler_selberg(&db, s, None, shifts)?;
        let table = TraceTable::compute(&db, s, n_max)?;
        let last_coefficient = (0..db.dim())
            .map(|j| fredholm_det(&table, j, terms).map(|f| f.coeffs.last().map_or(0.0, |c| c.norm())))
            .collect::<std::result::Result<_, _>>()?;
        points.push(PointDiagnostics {
            s: pair(s),
            method_difference: rel_diff(e, d),
            selberg_ratio_residual: rel_diff(e, ratio),
            selberg_truncation_bound: selberg_truncation_bound(&db, s, shifts, None)?,
            trace_alternating_residual: table.alternating_residual(),
            last_coefficient,
        });
    }
    let path = ctx.out("zeta.csv");
    write_csv(&path, &ctx.meta, &rows)?;
    write_json(
        &ctx.out("diagnostics.json"),
        &ZetaDiagnostics {
            meta: ctx.meta.clone(),
            entropy: (&h).into(),
            records: db.len(),
            trace_length: n_max,
            terms,
            selberg_shifts: shifts,
            points,
        },
    )?;
    println!("{}: {} rows", path.display(), rows.len());
    Ok(())
}

#[derive(Serialize)]
struct LfunPoint {
    s: [f64; 2],
    selberg_ratio_residual: f64,
    selberg_truncation_bound: f64,
}

#[derive(Serialize)]
struct LfunDiagnostics {
    meta: Meta,
    entropy: EntropyReport,
    character_dim: usize,
    trivial: bool,
    points: Vec<LfunPoint>,
}

fn lfun(ctx: &Context) -> Result<()> {
    let db = ctx.database()?;
    let h = entropy(&db)?;
    let chi = ctx.character()?;
    let shifts = ctx.config.truncation.selberg_shifts;
    let max_len = db.max_length();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for s in ctx.points(h.value) {
        let l = l_euler_zeta(&db, &chi, s, None)?;
        let ratio = l_euler_selberg(&db, &chi, s + 1.0, None, shifts)? / l_euler_selberg(&db, &chi, s, None, shifts)?;
        rows.push(EvalRow::new(s, l, "euler", format!("p<={max_len}")));
        rows.push(EvalRow::new(s, ratio, "selberg_ratio", format!("p<={max_len};shifts={shifts}")));
        points.push(LfunPoint {
            s: pair(s),
            selberg_ratio_residual: rel_diff(l, ratio),
            selberg_truncation_bound: chi.dim() as f64 * selberg_truncation_bound(&db, s, shifts, None)?,
        });
    }
    let path = ctx.out("lfun.csv");
    write_csv(&path, &ctx.meta, &rows)?;
    write_json(
        &ctx.out("lfun.json"),
        &LfunDiagnostics {
            meta: ctx.meta.clone(),
            entropy: (&h).into(),
            character_dim: chi.dim(),
            trivial: chi.is_trivial(),
            points,
        },
    )?;
    println!("{}: {} rows", path.display(), rows.len());
    Ok(())
}

#[derive(Serialize)]
struct CountRow {
    #[serde(rename = "T")]
    t: f64,
    pi: u64,
    li: f64,
    ratio: f64,
}

/// Distinct completeness weights of the three longest nested length cuts,
/// or fractions of the weight cutoff.
fn default_thresholds(db: &OrbitDatabase) -> Vec<f64> {
    let Some(n) = db.complete_length() else {
        return [0.6, 0.8, 1.0].iter().map(|f| f * db.complete_weight()).collect();
    };
    let mut min_w = vec![f64::INFINITY; n + 1];
    for i in 0..db.len() {
        let p = db.p(i);
        if p <= n {
            min_w[p] = min_w[p].min(db.weight(i));
        }
    }
    let mut ts: Vec<f64> = Vec::new();
    for k in (1..=n).rev() {
        let t = min_w[k].min(min_w[k - 1]);
        if t.is_finite() && ts.last().is_none_or(|&l| t < l) {
            ts.push(t);
        }
        if ts.len() == 3 {
            break;
        }
    }
    ts.reverse();
    ts
}

fn count(ctx: &Context) -> Result<()> {
    let db = ctx.database()?;
    let h = entropy(&db)?;
    let ts = if ctx.config.t_values.is_empty() { default_thresholds(&db) } else { ctx.config.t_values.clone() };
    let rows: Vec<CountRow> = counting_report(&db, &ts, h.value)?
        .into_iter()
        .map(|r| CountRow { t: r.t, pi: r.pi, li: r.li, ratio: r.ratio })
        .collect();
    let path = ctx.out("count.csv");
    write_csv(&path, &ctx.meta, &rows)?;
    println!("{}: {} thresholds, h = {:.10}", path.display(), rows.len(), h.value);
    Ok(())
}

#[derive(Serialize)]
struct ScanRow {
    s_re: f64,
    s_im: f64,
    log_abs: f64,
    flag: &'static str,
}

#[derive(Serialize)]
struct ScanSummary {
    meta: Meta,
    target: String,
    entropy: EntropyReport,
    terms: usize,
    shifts: usize,
    re: [f64; 2],
    im: [f64; 2],
    nx: usize,
    ny: usize,
    minimum: Option<[f64; 3]>,
    local_minima: Vec<[f64; 3]>,
    flagged_nonfinite: usize,
}

/// Evaluates the grid row by row, spreading rows over `threads` workers.
fn evaluate_grid(sc: &Scanner, xs: &[f64], ys: &[f64], threads: usize) -> Result<Vec<(Complex64, f64)>> {
    let eval_row = |y: f64| -> anosov_zeta_core::Result<Vec<(Complex64, f64)>> {
        xs.iter()
            .map(|&x| match sc.eval(Complex64::new(x, y)) {
                Err(Error::PoleProximity(_)) | Err(Error::DegenerateMultiplier(_)) => Ok((Complex64::new(f64::NAN, f64::NAN), f64::NAN)),
                r => r,
            })
            .collect()
    };
    let rows: Vec<anosov_zeta_core::Result<Vec<_>>> = if threads <= 1 {
        ys.iter().map(|&y| eval_row(y)).collect()
    } else {
        let chunk = ys.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = ys
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|&y| eval_row(y)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
        })
    };
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

fn scan_cmd(ctx: &Context) -> Result<()> {
    let db = ctx.database()?;
    let h = entropy(&db)?;
    let g = &ctx.config.grid;
    let target = ctx.config.scan_target()?;
    let terms = match g.terms {
        Some(n) => n,
        None => trace_length(&db)?,
    };
    let re = g.re.unwrap_or([h.value - 0.3, h.value + 0.3]);
    let im = g.im.unwrap_or([-0.3, 0.3]);
    let sc = Scanner::new(&db, target, terms, g.shifts)?;
    let (xs, ys) = (linspace(re[0], re[1], g.nx), linspace(im[0], im[1], g.ny));
    let values = evaluate_grid(&sc, &xs, &ys, ctx.config.threads)?;
    let grid = ScanGrid::from_values(target, xs, ys, values)?;
    let mut rows = Vec::with_capacity(grid.values.len());
    let mut local_minima = Vec::new();
    for iy in 0..grid.im.len() {
        for ix in 0..grid.re.len() {
            let (_, l, f) = grid.at(ix, iy);
            let (x, y) = (grid.re[ix], grid.im[iy]);
            if f == ScanFlag::LocalMin {
                local_minima.push([x, y, l]);
            }
            rows.push(ScanRow { s_re: x, s_im: y, log_abs: l, flag: f.name() });
        }
    }
    let path = ctx.out("scan.csv");
    write_csv(&path, &ctx.meta, &rows)?;
    let minimum = grid.minimum().map(|(s, l)| [s.re, s.im, l]);
    write_json(
        &ctx.out("scan.json"),
        &ScanSummary {
            meta: ctx.meta.clone(),
            target: target.name(),
            entropy: (&h).into(),
            terms,
            shifts: g.shifts,
            re,
            im,
            nx: g.nx,
            ny: g.ny,
            minimum,
            local_minima,
            flagged_nonfinite: grid.flags.iter().filter(|&&f| f == ScanFlag::NonFinite).count(),
        },
    )?;
    match minimum {
        Some([x, y, l]) => println!("{}: minimum log|F| = {l:.4} at {x:.5}{y:+.5}i", path.display()),
        None => println!("{}: no finite values", path.display()),
    }
    Ok(())
}

fn limitset(ctx: &Context) -> Result<()> {
    let n = ctx.config.limitset_length;
    let db = match &ctx.config.database {
        Some(_) => ctx.database()?,
        None => enumerate_primitive_classes(&ctx.automaton()?, &ctx.rep, Cutoff::Length(n), &ctx.enumeration_options()?)?,
    };
    let d = ctx.rep.dim();
    let path = ctx.out("limitset.csv");
    let mut w = create(&path)?;
    std::io::Write::write_all(&mut w, format!("{}\n", ctx.meta.csv_comment()).as_bytes())
        .map_err(|e| CliError::io(&path, e))?;
    let mut c = csv::Writer::from_writer(w);
    let mut header = vec!["word".to_string()];
    header.extend((0..d).map(|i| format!("x{i}")));
    c.write_record(&header)?;
    let mut count = 0usize;
    for r in db.iter().filter(|r| r.p() <= n) {
        for k in 0..r.p() {
            let mut w = r.word[k..].to_vec();
            w.extend_from_slice(&r.word[..k]);
            let xi = projective_fixed_point(&ctx.rep.evaluate(&w).mat)?;
            let mut rec = vec![format_word(&Word::new(w))];
            rec.extend(xi.iter().map(|x| x.to_string()));
            c.write_record(&rec)?;
            count += 1;
        }
    }
    c.flush().map_err(|e| CliError::io(&path, e))?;
    println!("{}: {count} fixed points", path.display());
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    /// Warnings are reported but do not fail the run.
    warning_only: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    detail: String,
}

impl Check {
    fn residual(name: &'static str, residual: f64, tolerance: f64, detail: String) -> Self {
        Check { name, passed: residual <= tolerance, warning_only: false, residual: Some(residual), tolerance: Some(tolerance), detail }
    }

    fn outcome(name: &'static str, r: std::result::Result<String, String>) -> Self {
        let (passed, detail) = match r {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Check { name, passed, warning_only: false, residual: None, tolerance: None, detail }
    }

    fn from_error(name: &'static str, e: &CliError) -> Self {
        Check::outcome(name, Err(e.to_string()))
    }
}

#[derive(Serialize)]
struct VerifyReport {
    meta: Meta,
    passed: bool,
    records: usize,
    checks: Vec<Check>,
}

/// Multiset of `(p, d_top)` with weights rounded to `1e-6`.
fn length_weight_multiset(db: &OrbitDatabase, n: usize) -> Vec<(usize, i64)> {
    let mut v: Vec<(usize, i64)> =
        db.iter().filter(|r| r.p() <= n).map(|r| (r.p(), (r.d_top * 1e6).round() as i64)).collect();
    v.sort_unstable();
    v
}

fn verify(ctx: &Context) -> Result<()> {
    let mut checks = Vec::new();
    let seed = ctx.config.seed;
    let a = ctx.automaton()?;
    checks.push(Check::outcome(
        "automaton",
        validate_automaton(&a, &ctx.presentation, ctx.config.validate_n, seed)
            .map(|r| format!("path counts match sphere sizes and class counts match brute force to length {}", r.n_max))
            .map_err(|e| e.to_string()),
    ));
    let db = ctx.database()?;
    checks.push(Check::outcome(
        "database_invariants",
        db.verify().map(|_| format!("{} records", db.len())).map_err(|e| e.to_string()),
    ));
    let n_bf = ctx.config.validate_n.min(db.complete_length().unwrap_or(0)).min(BRUTE_FORCE_MAX_LENGTH);
    if n_bf > 0 {
        let check = brute_force_classes(&ctx.presentation, &ctx.rep, n_bf, seed).map(|bf| {
            let (x, y) = (length_weight_multiset(&db, n_bf), length_weight_multiset(&bf, n_bf));
            if x == y {
                Ok(format!("{} classes up to length {n_bf}", x.len()))
            } else {
                Err(format!("{} enumerated vs {} brute force classes up to length {n_bf}", x.len(), y.len()))
            }
        });
        checks.push(match check {
            Ok(r) => Check::outcome("completeness", r),
            Err(e) => Check::from_error("completeness", &e.into()),
        });
    }
    let worst_mu = db.iter().flat_map(|r| r.mu.iter().map(|z| z.norm())).fold(0.0, f64::max);
    checks.push(Check::outcome(
        "proximality",
        if worst_mu < 1.0 {
            Ok(format!("largest |mu| = {worst_mu:.6}"))
        } else {
            Err(format!("multiplier of modulus {worst_mu}"))
        },
    ));
    let nl = non_lattice_check(&db, 10, seed);
    checks.push(Check {
        name: "non_lattice",
        passed: nl.passed,
        warning_only: true,
        residual: None,
        tolerance: None,
        detail: format!("{} weight pairs with non-rational-looking ratios", nl.pairs.iter().filter(|p| p.2 > 10_000).count()),
    });
    match entropy(&db) {
        Ok(h) => {
            checks.push(Check::residual(
                "entropy_root",
                h.residual.abs(),
                1e-6,
                format!("h = {:.10}, bracket [{:.6}, {:.6}]", h.value, h.bracket.0, h.bracket.1),
            ));
            numeric_checks(ctx, &db, h.value, &mut checks);
        }
        Err(e) => checks.push(Check::from_error("entropy_root", &e.into())),
    }
    let passed = checks.iter().all(|c| c.passed || c.warning_only);
    let path = ctx.out("verify.json");
    write_json(&path, &VerifyReport { meta: ctx.meta.clone(), passed, records: db.len(), checks })?;
    if passed {
        println!("{}: all checks passed", path.display());
        Ok(())
    } else {
        Err(CliError::Verify(format!("see {}", path.display())))
    }
}

fn numeric_checks(ctx: &Context, db: &OrbitDatabase, h: f64, checks: &mut Vec<Check>) {
    let terms = ctx.config.truncation.terms;
    let shifts = ctx.config.truncation.selberg_shifts;
    let s1 = Complex64::new(h + 1.0, 0.0);
    let mut run = |name: &'static str, tol: f64, f: &dyn Fn() -> Result<(f64, String)>| {
        checks.push(match f() {
            Ok((r, d)) => Check::residual(name, r, tol, d),
            Err(e) => Check::from_error(name, &e),
        })
    };
    run("trace_identity", 1e-10, &|| {
        let n = trace_length(db)?;
        let pts = [(1.0, 0.0), (1.0, 0.7), (2.0, 0.0), (0.5, 2.0), (3.0, -1.0)];
        let mut worst: f64 = 0.0;
        for (dx, y) in pts {
            worst = worst.max(TraceTable::compute(db, Complex64::new(h + dx, y), n)?.alternating_residual());
        }
        Ok((worst, format!("5 points, lengths up to {n}")))
    });
    run("euler_vs_determinants", 1e-4, &|| {
        let mut worst: f64 = 0.0;
        for s in [s1, Complex64::new(h + 1.0, 0.7)] {
            worst = worst.max(rel_diff(euler_zeta(db, s, None)?, zeta_via_determinants(db, s, terms)?));
        }
        Ok((worst, format!("Re s = h + 1, N = {terms}")))
    });
    let bound = selberg_truncation_bound(db, s1, shifts, None).unwrap_or(f64::NAN);
    run("selberg_ratio", 1e-8 + bound, &|| {
        let ratio = euler_selberg(db, s1 + 1.0, None, shifts)? / euler_selberg(db, s1, None, shifts)?;
        Ok((rel_diff(euler_zeta(db, s1, None)?, ratio), format!("s = h + 1, {shifts} shifts, bound {bound:.3e}")))
    });
    run("fredholm_forms", 1e-8, &|| {
        let s = Complex64::new(h + 2.0, 0.0);
        let table = TraceTable::compute(db, s, trace_length(db)?)?;
        let mut worst: f64 = 0.0;
        for j in 0..db.dim() {
            worst = worst.max(rel_diff(fredholm_det(&table, j, terms)?.value, fredholm_det_exp(&table, j, terms)?));
        }
        Ok((worst, format!("s = h + 2, N = {terms}")))
    });
    run("trivial_character", 1e-12, &|| {
        let chi = UnitaryCharacter::trivial(db.genus());
        let r = rel_diff(l_euler_zeta(db, &chi, s1, None)?, euler_zeta(db, s1, None)?);
        Ok((r, "s = h + 1".into()))
    });
    if ctx.config.character.source != CharacterKind::None {
        run("character_selberg_ratio", 1e-8 + bound, &|| {
            let chi = ctx.character()?;
            let ratio = l_euler_selberg(db, &chi, s1 + 1.0, None, shifts)? / l_euler_selberg(db, &chi, s1, None, shifts)?;
            Ok((rel_diff(l_euler_zeta(db, &chi, s1, None)?, ratio), "s = h + 1".into()))
        });
    }
    run("counting_ratios", 0.0, &|| {
        let rows = counting_report(db, &default_thresholds(db), h)?;
        let bad = rows.iter().filter(|r| !(r.ratio.is_finite() && r.ratio > 0.0)).count();
        Ok((bad as f64, format!("{} thresholds", rows.len())))
    });
}
