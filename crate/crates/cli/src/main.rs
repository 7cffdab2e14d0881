//! `strongdense` command-line driver.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use strongdense::bridge::{minkowski_check_numeric, reduce_at_isqrt2, tau, Sl2};
use strongdense::certifier::{
    certify_pair, enumerate_words, scan, trace_reality_scan, DensityCertificate, ScanReport, Verdict,
};
use strongdense::charpoly::{char_poly, eigen_report_from_poly, shape_decompose, EigenReport, Poly4};
use strongdense::config::Config;
use strongdense::forms::{
    invariant_forms, invariant_hermitian, invariant_hermitian_exact, signature, signature_numeric, Symmetry,
};
use strongdense::matrix::Mat4;
use strongdense::rep::{verify_relations, ContextSpec, ExactContext, NumericContext, RelationVerdict, Word};
use strongdense::scalars::numeric::format_decimal;
use strongdense::scalars::{BaseField, NumericValue, RatFunc, Tower, TowerElem};
use strongdense::Error;

/// Digits printed for double-double quantities.
const DIGITS: usize = 30;

const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "strongdense", version, about = "Exact density certificates for the SL(4) family rho_v")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Working precision in bits (at most 106).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Relative gap tolerance for eigenvalue moduli and |λ₂λ₃| − 1.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Maximum word length for witness searches and trace scans.
    #[arg(long, global = true)]
    max_word_len: Option<usize>,
    /// Expected verdict; the exit code is 0 exactly when it matches.
    #[arg(long, global = true, value_enum)]
    expect: Option<Expect>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Certified,
    Failed,
    Inconclusive,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check u⁴ = 1 and both relators exactly.
    Relations {
        #[arg(long, default_value = "symbolic")]
        ctx: String,
    },
    /// Characteristic polynomials, shapes and eigenvalue reports.
    Charpoly {
        #[arg(long, default_value = "symbolic")]
        ctx: String,
        /// Comma-separated words.
        #[arg(long, value_delimiter = ',', required = true)]
        words: Vec<String>,
    },
    /// Invariant symmetric, antisymmetric and Hermitian forms.
    Forms {
        #[arg(long, default_value = "symbolic")]
        ctx: String,
        /// Comma-separated generating words.
        #[arg(long, value_delimiter = ',', default_value = "u,c")]
        words: Vec<String>,
    },
    /// Density certificate for one pair at one v.
    Certify {
        #[arg(long)]
        v: String,
        /// Pair as `w1,w2`.
        #[arg(long, default_value = "a,b")]
        pair: String,
    },
    /// Certificates for every pair and v.
    Scan {
        /// Comma-separated values of v.
        #[arg(long, value_delimiter = ',', required = true)]
        v: Vec<String>,
        /// Pair as `w1,w2`; repeatable.
        #[arg(long, required = true)]
        pair: Vec<String>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Block reduction of ρ at v = i√2.
    ReduceIsqrt2,
    /// Numeric and exact checks of the PSL(2,ℂ) → SO⁺(3,1) map.
    BridgeSelftest {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Traces and their reality at a specialization.
    TraceScan {
        #[arg(long)]
        v: String,
        /// Explicit comma-separated words; otherwise words in the pair up to --max-word-len.
        #[arg(long, value_delimiter = ',')]
        words: Vec<String>,
        #[arg(long, default_value = "a,b")]
        pair: String,
    },
}

/// Failure of a command: usage problems exit 64, the rest 2.
enum Failure {
    Usage(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CmdResult = Result<(Value, String, u8), Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn config(opts: &GlobalOpts) -> Result<Config, Failure> {
    let mut cfg = Config::default();
    if let Some(p) = opts.precision {
        cfg.precision_bits = p;
    }
    if let Some(t) = opts.tol {
        cfg.gap_tol = t;
        cfg.unit_band = cfg.unit_band.min(t);
    }
    if let Some(n) = opts.max_word_len {
        cfg.witness_max_len = n;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn parse_ctx(s: &str) -> Result<ContextSpec, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

/// `--v` takes a bare value or a full context name.
fn parse_v(s: &str) -> Result<ContextSpec, Failure> {
    let t = s.trim();
    if t.contains('=') || t == "symbolic" {
        parse_ctx(t)
    } else {
        ContextSpec::from_value(t).map_err(|e| Failure::Usage(e.to_string()))
    }
}

fn parse_word(s: &str) -> Result<Word, Failure> {
    Word::parse(s.trim()).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_pair(s: &str) -> Result<(Word, Word), Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return usage(format!("--pair expects two comma-separated words, got {s:?}"));
    }
    Ok((parse_word(parts[0])?, parse_word(parts[1])?))
}

fn verdict_code(v: Verdict, expect: Option<Expect>) -> u8 {
    match expect {
        Some(e) => {
            let want = match e {
                Expect::Certified => Verdict::Certified,
                Expect::Failed => Verdict::Failed,
                Expect::Inconclusive => Verdict::Inconclusive,
            };
            if v == want {
                0
            } else {
                1
            }
        }
        None => match v {
            Verdict::Certified => 0,
            Verdict::Failed => 1,
            Verdict::Inconclusive => 2,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.opts.format;
    match run(&cli) {
        Ok((doc, text, code)) => {
            let out = match format {
                Format::Json => serde_json::to_string_pretty(&doc).expect("serializable report") + "\n",
                Format::Text => text,
            };
            // A closed pipe (e.g. `| head`) is not an error of the command.
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Error(e)) => {
            match format {
                Format::Json => println!("{}", json!({ "error": e.to_string() })),
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    let cfg = config(&cli.opts)?;
    match &cli.command {
        Command::Relations { ctx } => relations(&parse_ctx(ctx)?, &cfg),
        Command::Charpoly { ctx, words } => charpoly(&parse_ctx(ctx)?, words, &cfg),
        Command::Forms { ctx, words } => forms(&parse_ctx(ctx)?, words, &cfg),
        Command::Certify { v, pair } => {
            let (g1, g2) = parse_pair(pair)?;
            let cert = certify_pair(&g1, &g2, &parse_v(v)?, &cfg);
            let code = verdict_code(cert.verdict, cli.opts.expect);
            let text = certificate_text(&cert);
            Ok((to_value(&cert), text, code))
        }
        Command::Scan { v, pair, workers } => {
            let vs = v.iter().map(|x| parse_v(x)).collect::<Result<Vec<_>, _>>()?;
            let pairs = pair.iter().map(|p| parse_pair(p)).collect::<Result<Vec<_>, _>>()?;
            let report = scan(&vs, &pairs, &cfg, *workers)?;
            Ok(scan_output(&report, &cfg, cli.opts.expect))
        }
        Command::ReduceIsqrt2 => reduce(&cfg),
        Command::BridgeSelftest { samples, seed } => bridge_selftest(*samples, *seed, &cfg),
        Command::TraceScan { v, words, pair } => {
            let spec = parse_v(v)?;
            let list = if words.is_empty() {
                let (g1, g2) = parse_pair(pair)?;
                pair_words(&g1, &g2, &spec, cfg.witness_max_len)?
            } else {
                words.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>, _>>()?
            };
            let entries = trace_reality_scan(&list, &spec, &cfg)?;
            let mut text = format!("context {spec}\n");
            for e in &entries {
                text.push_str(&format!(
                    "{:<12} trace {}  {}\n",
                    e.word,
                    e.trace,
                    if e.is_real { "real" } else { "non-real" }
                ));
            }
            let doc = json!({ "context": spec.to_string(), "traces": entries, "config": cfg });
            Ok((doc, text, 0))
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

/// Words of the pair up to `max_len`, with the empty word first.
fn pair_words(g1: &Word, g2: &Word, spec: &ContextSpec, max_len: usize) -> Result<Vec<Word>, Failure> {
    let mut out = Vec::new();
    let mut push = |_: usize, w: &Word| {
        out.push(w.clone());
        Ok(std::ops::ControlFlow::Continue(()))
    };
    if spec.is_exact() {
        let ev = ExactContext::from_spec(spec)?.evaluator()?;
        enumerate_words(&ev, g1, g2, max_len, true, |len, w, _| push(len, w))?;
    } else {
        let ev = NumericContext::from_spec(spec)?.evaluator()?;
        enumerate_words(&ev, g1, g2, max_len, true, |len, w, _| push(len, w))?;
    }
    Ok(out)
}

fn relations(spec: &ContextSpec, cfg: &Config) -> CmdResult {
    let ctx = ExactContext::from_spec(spec)?;
    let report = verify_relations(&ctx)?;
    let mut text = format!("context {}\n", report.context);
    for r in &report.relations {
        let v = match &r.verdict {
            RelationVerdict::Identity => "identity".to_string(),
            RelationVerdict::ScalarMatrix { lambda } => format!("scalar {lambda}"),
            RelationVerdict::Failed { nonzero_entries } => format!("FAILED ({nonzero_entries} entries differ)"),
        };
        text.push_str(&format!("{:<12} {v}\n", r.relation));
    }
    let code = if report.any_failed() { 1 } else { 0 };
    let mut doc = to_value(&report);
    doc["config"] = to_value(cfg);
    Ok((doc, text, code))
}

fn eigen_json(r: &EigenReport) -> Value {
    json!({
        "eigenvalues": r.eigenvalues.iter().map(|z| z.format(DIGITS)).collect::<Vec<_>>(),
        "moduli": r.moduli_strings(DIGITS),
        "top_gap": format_decimal(r.top_gap, DIGITS),
        "bottom_gap": format_decimal(r.bottom_gap, DIGITS),
        "biproximal": r.biproximal,
        "l2l3": format_decimal(r.l2l3, DIGITS),
        "l1l4": r.l1l4.format(DIGITS),
        "obstruction": r.obstruction,
        "residual": r.residual,
    })
}

fn eigen_text(r: &EigenReport) -> String {
    format!(
        "  moduli {}\n  biproximal {:?}, |l2 l3| = {}, obstruction {:?}\n",
        r.moduli_strings(DIGITS).join(", "),
        r.biproximal,
        format_decimal(r.l2l3, DIGITS),
        r.obstruction
    )
}

fn charpoly(spec: &ContextSpec, words: &[String], cfg: &Config) -> CmdResult {
    let words = words.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>, _>>()?;
    let mut entries = Vec::new();
    let mut text = format!("context {spec}\n");
    if spec.is_exact() {
        let ctx = ExactContext::from_spec(spec)?;
        let ev = ctx.evaluator()?;
        for w in &words {
            let chi = char_poly(&ev.evaluate(w));
            let coeffs: Vec<String> = chi.c.iter().map(|x| x.to_string()).collect();
            let mut entry = json!({
                "word": w.to_string(),
                "coefficients": coeffs,
                "palindromic": chi.is_palindromic(),
            });
            text.push_str(&format!("{w}: chi = {chi}\n  palindromic {}\n", chi.is_palindromic()));
            if ctx.is_symbolic() {
                let s = shape_decompose(&chi)?;
                entry["shape"] = json!({ "p": s.p.to_string(), "q": s.q.to_string(), "r": s.r.to_string() });
                text.push_str(&format!("  p = {}\n  q = {}\n  r = {}\n", s.p, s.q, s.r));
            } else {
                let r = eigen_report_from_poly(&chi.to_numeric()?, cfg)?;
                entry["eigen"] = eigen_json(&r);
                text.push_str(&eigen_text(&r));
            }
            entries.push(entry);
        }
    } else {
        let ev = NumericContext::from_spec(spec)?.evaluator()?;
        for w in &words {
            let chi: Poly4<NumericValue> = char_poly(&ev.evaluate(w));
            let r = eigen_report_from_poly(&chi, cfg)?;
            let coeffs: Vec<String> = chi.c.iter().map(|x| x.format(DIGITS)).collect();
            text.push_str(&format!("{w}: coefficients {}\n", coeffs.join(", ")));
            text.push_str(&eigen_text(&r));
            entries.push(json!({ "word": w.to_string(), "coefficients": coeffs, "eigen": eigen_json(&r) }));
        }
    }
    Ok((json!({ "context": spec.to_string(), "words": entries, "config": cfg }), text, 0))
}

fn exact_matrix_json(m: &Mat4<TowerElem>) -> Value {
    json!((0..4).map(|i| (0..4).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn numeric_matrix_json(m: &Mat4<NumericValue>) -> Value {
    json!((0..4).map(|i| (0..4).map(|j| m.get(i, j).format(DIGITS)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn forms(spec: &ContextSpec, words: &[String], cfg: &Config) -> CmdResult {
    let words = words.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>, _>>()?;
    let mut text = format!("context {spec}\n");
    let mut doc = json!({ "context": spec.to_string(), "generators": words.iter().map(|w| w.to_string()).collect::<Vec<_>>() });
    if spec.is_exact() {
        let ctx = ExactContext::from_spec(spec)?;
        let ev = ctx.evaluator()?;
        let gens: Vec<Mat4<TowerElem>> = words.iter().map(|w| ev.evaluate(w)).collect();
        for (name, sym) in [("symmetric", Symmetry::Symmetric), ("antisymmetric", Symmetry::Antisymmetric)] {
            let fs = invariant_forms(&gens, sym)?;
            let sigs: Vec<Value> = if sym == Symmetry::Symmetric && ctx.tower().is_real() && !ctx.is_symbolic() {
                fs.basis.iter().map(|j| signature(j).map(|s| to_value(&s)).unwrap_or(Value::Null)).collect()
            } else {
                Vec::new()
            };
            text.push_str(&format!("{name}: dimension {}\n", fs.dimension()));
            for s in &sigs {
                text.push_str(&format!("  signature {s}\n"));
            }
            if !fs.exceptional_locus.is_empty() {
                text.push_str(&format!("  exceptional locus {}\n", fs.exceptional_locus.join("; ")));
            }
            doc[name] = json!({
                "dimension": fs.dimension(),
                "basis": fs.basis.iter().map(exact_matrix_json).collect::<Vec<_>>(),
                "signatures": sigs,
                "exceptional_locus": fs.exceptional_locus,
            });
        }
        if !ctx.is_symbolic() {
            let fs = invariant_hermitian_exact(&gens)?;
            let sigs: Vec<Value> =
                fs.basis.iter().map(|j| signature(j).map(|s| to_value(&s)).unwrap_or(Value::Null)).collect();
            text.push_str(&format!("hermitian: dimension {}\n", fs.dimension()));
            for s in &sigs {
                text.push_str(&format!("  signature {s}\n"));
            }
            doc["hermitian"] = json!({
                "dimension": fs.dimension(),
                "basis": fs.basis.iter().map(exact_matrix_json).collect::<Vec<_>>(),
                "signatures": sigs,
            });
        }
    } else {
        let ev = NumericContext::from_spec(spec)?.evaluator()?;
        let gens: Vec<Mat4<NumericValue>> = words.iter().map(|w| ev.evaluate(w)).collect();
        let fs = invariant_hermitian(&gens, cfg)?;
        let sigs: Vec<Value> = fs.basis.iter().map(|j| to_value(&signature_numeric(j, cfg.rank_zero))).collect();
        text.push_str(&format!("hermitian: dimension {}\n", fs.dimension()));
        for s in &sigs {
            text.push_str(&format!("  signature {s}\n"));
        }
        doc["hermitian"] = json!({
            "dimension": fs.dimension(),
            "basis": fs.basis.iter().map(numeric_matrix_json).collect::<Vec<_>>(),
            "signatures": sigs,
        });
    }
    doc["config"] = to_value(cfg);
    Ok((doc, text, 0))
}

fn certificate_text(c: &DensityCertificate) -> String {
    let mut t = format!("pair ({}, {}) at v = {}: {:?}\n", c.pair[0], c.pair[1], c.v, c.verdict);
    if let Some(r) = &c.reason {
        t.push_str(&format!("  reason: {r}\n"));
    }
    if let Some(i) = &c.irreducibility {
        t.push_str(&format!("  irreducibility: rank {}, delta nonzero {}\n", i.rank, i.delta_nonzero));
    }
    if let Some(w) = &c.witness {
        t.push_str(&format!("  witness {}: p = {}, q = {}, r = {}\n", w.word, w.p, w.q, w.r));
    }
    if let Some(d) = &c.form_dims {
        t.push_str(&format!("  forms: symmetric {}, antisymmetric {}, hermitian {}\n", d.sym, d.antisym, d.herm));
    }
    if let Some(e) = &c.eigen {
        t.push_str(&format!("  moduli {}\n  |l2 l3| = {}, obstruction {}\n", e.moduli.join(", "), e.l2l3, e.obstruction));
    }
    if let Some(tw) = &c.trace_witness {
        t.push_str(&format!("  non-real trace: {} = {}\n", tw.word, tw.trace));
    }
    t
}

fn scan_output(report: &ScanReport, cfg: &Config, expect: Option<Expect>) -> (Value, String, u8) {
    let mut text = String::new();
    for c in &report.certificates {
        text.push_str(&format!(
            "({}, {}) v={}: {:?}{}\n",
            c.pair[0],
            c.pair[1],
            c.v,
            c.verdict,
            c.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default()
        ));
    }
    let n = &report.counts;
    text.push_str(&format!("certified {}, failed {}, inconclusive {}\n", n.certified, n.failed, n.inconclusive));
    let code = report.certificates.iter().map(|c| verdict_code(c.verdict, expect)).max().unwrap_or(0);
    let mut doc = to_value(report);
    doc["config"] = to_value(cfg);
    (doc, text, code)
}

fn reduce(cfg: &Config) -> CmdResult {
    match reduce_at_isqrt2() {
        Ok(r) => {
            let text = format!(
                "M^-1 rho(u) M and M^-1 rho(c) M match the displayed matrices entry by entry\n\
                 upper-right blocks are zero\n\
                 block determinants: u {} / {}, c {} / {}\n\
                 surface-group words with det-1 blocks: {}\n\
                 sign character: eps(a) = {}, eps(b) = {}\n",
                r.generator_block_dets[0].0,
                r.generator_block_dets[0].1,
                r.generator_block_dets[1].0,
                r.generator_block_dets[1].1,
                r.checked_words.join(", "),
                r.sign_character.0,
                r.sign_character.1
            );
            let doc = json!({
                "matches_displayed": true,
                "upper_right_zero": true,
                "u": exact_matrix_json(&r.u),
                "c": exact_matrix_json(&r.c),
                "generator_block_dets": r.generator_block_dets,
                "checked_words": r.checked_words,
                "sign_character": [r.sign_character.0, r.sign_character.1],
                "config": cfg,
            });
            Ok((doc, text, 0))
        }
        Err(Error::StructureViolation(msg)) => {
            let doc = json!({ "matches_displayed": false, "violations": msg, "config": cfg });
            Ok((doc, format!("structure violation: {msg}\n"), 1))
        }
        Err(e) => Err(e.into()),
    }
}

fn bridge_selftest(samples: usize, seed: u64, cfg: &Config) -> CmdResult {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut hom, mut mink, mut kernel) = (0.0f64, 0.0f64, 0.0f64);
    let diff = |a: &Mat4<NumericValue>, b: &Mat4<NumericValue>| {
        (a.to_c64() - b.to_c64()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    };
    for _ in 0..samples {
        let a = Sl2::random(&mut rng);
        let b = Sl2::random(&mut rng);
        let (ta, tb) = (tau(&a)?, tau(&b)?);
        hom = hom.max(diff(&tau(&a.mul(&b))?, &ta.mul(&tb)));
        mink = mink.max(minkowski_check_numeric(&ta));
        kernel = kernel.max(diff(&tau(&a.neg())?, &ta));
    }
    // Exact check over Q(i).
    let t = Tower::new(BaseField::Rationals, vec![RatFunc::from_int(-1)])?;
    let gi = |re: i64, im: i64| t.from_int(re).add(&t.generator(0).scale(&RatFunc::from_int(im)));
    let a = Sl2::exact([[gi(1, 1), gi(2, 0)], [gi(0, 0), t.from_int(1).add(&t.generator(0).neg()).scale(&RatFunc::from_frac(1, 2))]])?;
    let b = Sl2::exact([[gi(1, 0), gi(0, 0)], [gi(3, -2), gi(1, 0)]])?;
    let exact_hom = tau(&a.mul(&b))? == tau(&a)?.mul(&tau(&b)?);
    let exact_kernel = tau(&a.neg())? == tau(&a)?;
    let tol = 1e-9;
    let ok = hom < tol && mink < tol && kernel < tol && exact_hom && exact_kernel;
    let text = format!(
        "samples {samples} (seed {seed})\nhomomorphism residual {hom:.3e}\nminkowski residual {mink:.3e}\n\
         kernel residual {kernel:.3e}\nexact homomorphism {exact_hom}\nexact kernel {exact_kernel}\n{}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let doc = json!({
        "samples": samples,
        "seed": seed,
        "homomorphism_residual": hom,
        "minkowski_residual": mink,
        "kernel_residual": kernel,
        "exact_homomorphism": exact_hom,
        "exact_kernel": exact_kernel,
        "pass": ok,
        "config": cfg,
    });
    Ok((doc, text, if ok { 0 } else { 1 }))
}
