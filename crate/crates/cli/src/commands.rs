use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use collapse_core::protocols::{
    lambda_scan, paper_audit, random_audits, run_protocol1, run_protocol2, signalling_gap, AuditCase,
    LambdaScanRow, PairFamily, Protocol1Params, Protocol2Params, TrialRecord,
};
use collapse_core::{Complex64, Execution, Operator};
use serde::Serialize;

use crate::args::{AuditArgs, Format, OutputArgs, PacketArgs, PairSelector, Protocol1Args, Protocol2Args, ScanArgs, ScanParam};

pub const EXIT_IO: u8 = 1;
pub const EXIT_VALIDATION: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<collapse_core::Error> for Failure {
    fn from(e: collapse_core::Error) -> Self {
        Failure::validation(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

pub type CmdResult = Result<(), Failure>;

/// Top-level JSON report layout shared by every subcommand.
#[derive(Debug, Serialize)]
pub struct Report<P, A, E, D> {
    pub params: P,
    pub analytic: A,
    pub empirical: E,
    pub diagnostics: D,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<Vec<TrialRecord>>,
}

#[derive(Debug, Serialize)]
struct Empty {}

#[derive(Debug, Serialize)]
struct TrialRow {
    trial_index: u64,
    intermediate_outcome: Option<bool>,
    lambda: Option<f64>,
    receiver_detected: bool,
    receiver_probability: f64,
}

impl From<&TrialRecord> for TrialRow {
    fn from(t: &TrialRecord) -> Self {
        TrialRow {
            trial_index: t.trial_index,
            intermediate_outcome: t.intermediate_outcome,
            lambda: t.lambda,
            receiver_detected: t.receiver_detected,
            receiver_probability: t.receiver_probability,
        }
    }
}

fn write_json<T: Serialize>(value: &T, sink: &mut dyn Write) -> CmdResult {
    serde_json::to_writer_pretty(&mut *sink, value)?;
    writeln!(sink)?;
    Ok(())
}

fn write_csv<T: Serialize>(rows: impl IntoIterator<Item = T>, sink: &mut dyn Write) -> CmdResult {
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Sends the report to a file, to stdout, or nowhere, and the summary to
/// stdout unless stdout already carries the report.
fn emit(
    out: &OutputArgs,
    summary: &str,
    json: &dyn Fn(&mut dyn Write) -> CmdResult,
    csv: &dyn Fn(&mut dyn Write) -> CmdResult,
) -> CmdResult {
    let write = |format: Format, sink: &mut dyn Write| match format {
        Format::Json => json(sink),
        Format::Csv => csv(sink),
    };
    match (&out.output, out.format) {
        (Some(path), _) => {
            let mut file = io::BufWriter::new(create(path)?);
            write(out.file_format(), &mut file)?;
            file.flush()?;
            print!("{summary}");
        }
        (None, Some(format)) => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(format, &mut lock)?;
        }
        (None, None) => print!("{summary}"),
    }
    Ok(())
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) })
}

pub fn protocol1(args: &Protocol1Args) -> CmdResult {
    let params = Protocol1Params {
        n_trials: args.trials,
        sender_acts: args.sender_acts,
        n_particles: args.particles,
        seed: args.seed,
    };
    let r = run_protocol1(&params)?;

    #[derive(Serialize)]
    struct Params {
        trials: u64,
        seed: u64,
        sender_acts: bool,
        particles: u32,
    }
    #[derive(Serialize)]
    struct Analytic {
        p_receiver: f64,
        ensemble_success: f64,
    }
    #[derive(Serialize)]
    struct Empirical {
        p_receiver: f64,
        detections: u64,
        confidence_halfwidth: f64,
        ensemble_success: f64,
    }
    #[derive(Serialize)]
    struct Diagnostics {
        commutator_frobenius_norm: f64,
    }

    let report = Report {
        params: Params { trials: params.n_trials, seed: params.seed, sender_acts: params.sender_acts, particles: params.n_particles },
        analytic: Analytic { p_receiver: r.analytic_p_receiver, ensemble_success: r.ensemble_success_analytic },
        empirical: Empirical {
            p_receiver: r.empirical_p_receiver,
            detections: r.detections,
            confidence_halfwidth: r.confidence_halfwidth,
            ensemble_success: r.ensemble_success_empirical,
        },
        diagnostics: Diagnostics { commutator_frobenius_norm: r.commutator_frobenius_norm },
        trials: args.out.emit_trials.then(|| r.trials.clone()),
    };

    let mut s = String::new();
    writeln!(s, "protocol 1: {} trials, seed {}, sender {}", params.n_trials, params.seed, if params.sender_acts { "acts" } else { "idle" }).unwrap();
    writeln!(s, "  analytic P(receiver finds B)   {}", r.analytic_p_receiver).unwrap();
    writeln!(s, "  empirical P(receiver finds B)  {} ({} detections)", r.empirical_p_receiver, r.detections).unwrap();
    writeln!(
        s,
        "  4-sigma band                   [{}, {}]",
        r.analytic_p_receiver - r.confidence_halfwidth,
        r.analytic_p_receiver + r.confidence_halfwidth
    )
    .unwrap();
    writeln!(s, "  {:<31}{}", format!("ensemble_success({})", params.n_particles), r.ensemble_success_analytic).unwrap();
    writeln!(s, "  ‖[P+, P_B]‖_F                  {}", r.commutator_frobenius_norm).unwrap();

    emit(
        &args.out,
        &s,
        &|w| write_json(&report, w),
        &|w| write_csv(r.trials.iter().map(TrialRow::from), w),
    )
}

fn protocol2_params(p: &PacketArgs, n_trials: u64, seed: u64, sender_acts: bool) -> Protocol2Params {
    Protocol2Params { sigma: p.sigma, sigma_bar: p.sigma_bar, d: p.d, k: p.k, n_trials, seed, sender_acts }
}

fn warn_weak_spreading(p: &Protocol2Params) {
    if p.sigma_bar < 10.0 * p.sigma {
        eprintln!(
            "warning: sigma-bar ({}) is less than 10 x sigma ({}); the post-measurement packet is not much wider",
            p.sigma_bar, p.sigma
        );
    }
}

pub fn protocol2(args: &Protocol2Args) -> CmdResult {
    let acts_params = protocol2_params(&args.packet, args.trials, args.seed, true);
    acts_params.validate()?;
    warn_weak_spreading(&acts_params);
    let acts = run_protocol2(&acts_params)?;
    let idle = run_protocol2(&Protocol2Params { sender_acts: false, ..acts_params.clone() })?;
    let gap = signalling_gap(&acts.clone().into(), &idle.clone().into())?;
    let scan = if args.lambda_scan { Some(lambda_scan(&acts_params)?) } else { None };

    #[derive(Serialize)]
    struct Params {
        sigma: f64,
        sigma_bar: f64,
        d: f64,
        k: f64,
        trials: u64,
        seed: u64,
    }
    #[derive(Serialize)]
    struct Analytic {
        p_before: f64,
        p_after: f64,
        gap: f64,
    }
    #[derive(Serialize)]
    struct Empirical {
        p_receiver_sender_acts: f64,
        detections_sender_acts: u64,
        p_receiver_sender_idle: f64,
        detections_sender_idle: u64,
        confidence_halfwidth: f64,
        gap: f64,
        gap_confidence_halfwidth: f64,
    }
    #[derive(Serialize)]
    struct Diagnostics {
        max_lambda_deviation: f64,
        commutator_frobenius_norm: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lambda_scan: Option<Vec<LambdaScanRow>>,
    }

    let report = Report {
        params: Params {
            sigma: acts_params.sigma,
            sigma_bar: acts_params.sigma_bar,
            d: acts_params.d,
            k: acts_params.k,
            trials: acts_params.n_trials,
            seed: acts_params.seed,
        },
        analytic: Analytic { p_before: acts.p_before, p_after: acts.p_after, gap: gap.gap },
        empirical: Empirical {
            p_receiver_sender_acts: acts.empirical_p_receiver,
            detections_sender_acts: acts.detections,
            p_receiver_sender_idle: idle.empirical_p_receiver,
            detections_sender_idle: idle.detections,
            confidence_halfwidth: acts.confidence_halfwidth,
            gap: gap.empirical_gap,
            gap_confidence_halfwidth: gap.gap_confidence_halfwidth,
        },
        diagnostics: Diagnostics {
            max_lambda_deviation: acts.max_lambda_deviation,
            commutator_frobenius_norm: gap.commutator_frobenius_norm,
            lambda_scan: scan.clone(),
        },
        trials: args.out.emit_trials.then(|| acts.trials.clone()),
    };

    let mut s = String::new();
    let p = &acts_params;
    writeln!(s, "protocol 2: sigma {} -> sigma-bar {}, window [{}, {}], {} trials, seed {}", p.sigma, p.sigma_bar, p.d - p.k, p.d + p.k, p.n_trials, p.seed).unwrap();
    writeln!(s, "  P_before (sender idle)         {:e}", acts.p_before).unwrap();
    writeln!(s, "  P_after  (sender measures p)   {}", acts.p_after).unwrap();
    writeln!(s, "  gap                            {}", gap.gap).unwrap();
    writeln!(
        s,
        "  empirical detection rate       {} ({} detections, 4-sigma ±{})",
        acts.empirical_p_receiver, acts.detections, acts.confidence_halfwidth
    )
    .unwrap();
    writeln!(s, "  empirical gap                  {} (±{})", gap.empirical_gap, gap.gap_confidence_halfwidth).unwrap();
    writeln!(s, "  max λ-deviation over trials    {:e}", acts.max_lambda_deviation).unwrap();
    if let Some(rows) = &scan {
        writeln!(s, "  λ scan:").unwrap();
        writeln!(s, "    {:>22}  {:>22}  {:>10}", "lambda", "P_after", "deviation").unwrap();
        for r in rows {
            writeln!(s, "    {:>22}  {:>22}  {:>10.3e}", r.lambda, r.p_after, r.deviation).unwrap();
        }
        let max = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
        writeln!(s, "    max deviation {max:e}").unwrap();
    }

    emit(
        &args.out,
        &s,
        &|w| write_json(&report, w),
        &|w| write_csv(acts.trials.iter().map(TrialRow::from), w),
    )
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScanRow {
    pub sigma: f64,
    pub sigma_bar: f64,
    pub d: f64,
    pub k: f64,
    pub p_before: f64,
    pub p_after: f64,
    pub gap: f64,
}

pub fn scan_rows(args: &ScanArgs) -> Result<Vec<ScanRow>, Failure> {
    if args.steps < 2 {
        return Err(Failure::validation(format!("scan needs at least 2 steps, got {}", args.steps)));
    }
    if !args.from.is_finite() || !args.to.is_finite() || !(args.from < args.to) {
        return Err(Failure::validation(format!("scan range needs finite from < to, got [{}, {}]", args.from, args.to)));
    }
    let last = (args.steps - 1) as f64;
    (0..args.steps)
        .map(|i| {
            let value = args.from + (args.to - args.from) * i as f64 / last;
            let mut packet = args.packet.clone();
            match args.param {
                ScanParam::Sigma => packet.sigma = value,
                ScanParam::SigmaBar => packet.sigma_bar = value,
                ScanParam::D => packet.d = value,
                ScanParam::K => packet.k = value,
            }
            let params = protocol2_params(&packet, 1, 0, true);
            params.validate()?;
            let p_before = params.p_before()?;
            let p_after = params.p_after(0.0)?;
            Ok(ScanRow {
                sigma: packet.sigma,
                sigma_bar: packet.sigma_bar,
                d: packet.d,
                k: packet.k,
                p_before,
                p_after,
                gap: p_after - p_before,
            })
        })
        .collect()
}

pub fn scan(args: &ScanArgs) -> CmdResult {
    let rows = scan_rows(args)?;
    let write = |sink: &mut dyn Write| match args.format {
        Format::Json => write_json(&rows, sink),
        Format::Csv => write_csv(rows.iter(), sink),
    };
    match &args.output {
        Some(path) => {
            let mut file = io::BufWriter::new(create(path)?);
            write(&mut file)?;
            file.flush()?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => write(&mut io::stdout().lock())?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct AuditRow {
    index: u64,
    dim: usize,
    shared_basis: bool,
    commutator_norm: f64,
    premise_holds: bool,
    p_receiver_sender_measures: f64,
    p_receiver_sender_idle: f64,
    marginal_difference: f64,
}

impl From<&AuditCase> for AuditRow {
    fn from(c: &AuditCase) -> Self {
        AuditRow {
            index: c.index,
            dim: c.dim,
            shared_basis: c.shared_basis,
            commutator_norm: c.audit.commutator_norm,
            premise_holds: c.audit.premise_holds,
            p_receiver_sender_measures: c.audit.p_receiver_sender_measures,
            p_receiver_sender_idle: c.audit.p_receiver_sender_idle,
            marginal_difference: c.audit.marginal_difference,
        }
    }
}

pub fn audit(args: &AuditArgs) -> CmdResult {
    if !(args.tol > 0.0) || !args.tol.is_finite() {
        return Err(Failure::validation(format!("tol must be positive, got {}", args.tol)));
    }

    #[derive(Serialize)]
    struct Params {
        pair: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        count: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        tol: f64,
    }

    match args.pair {
        PairSelector::Paper => {
            let p = paper_audit(args.tol)?;
            #[derive(Serialize)]
            struct Analytic {
                commutator: Vec<Vec<[f64; 2]>>,
                expected: Vec<Vec<[f64; 2]>>,
                frobenius_distance: f64,
                matches: bool,
                commutator_norm: f64,
                premise_holds: bool,
                p_receiver_sender_measures: f64,
                p_receiver_sender_idle: f64,
                marginal_difference: f64,
            }
            let as_pairs = |op: &Operator| {
                op.rows().into_iter().map(|r| r.into_iter().map(|c| [c.re, c.im]).collect()).collect()
            };
            let matches = p.distance < 1e-12;
            let report = Report {
                params: Params { pair: "paper", count: None, seed: None, tol: args.tol },
                analytic: Analytic {
                    commutator: as_pairs(&p.commutator),
                    expected: as_pairs(&p.expected),
                    frobenius_distance: p.distance,
                    matches,
                    commutator_norm: p.audit.commutator_norm,
                    premise_holds: p.audit.premise_holds,
                    p_receiver_sender_measures: p.audit.p_receiver_sender_measures,
                    p_receiver_sender_idle: p.audit.p_receiver_sender_idle,
                    marginal_difference: p.audit.marginal_difference,
                },
                empirical: Empirical {},
                diagnostics: Empty {},
                trials: None,
            };
            #[derive(Serialize)]
            struct Empirical {}

            let mut s = String::new();
            writeln!(s, "audit: paper pair (|+⟩⟨+|, |B⟩⟨B|), initial state |A⟩, basis (A, B)").unwrap();
            writeln!(s, "  [P+, P_B]                  = {}", rounded(&p.commutator)).unwrap();
            writeln!(s, "  ½(|A⟩⟨B| − |B⟩⟨A|)         = {}", p.expected).unwrap();
            writeln!(s, "  Frobenius distance           {:e} ({})", p.distance, if matches { "match within 1e-12" } else { "MISMATCH" }).unwrap();
            writeln!(s, "  ‖[P+, P_B]‖_F                {}", p.audit.commutator_norm).unwrap();
            writeln!(s, "  premise [A,B]=0 holds        {}", p.audit.premise_holds).unwrap();
            writeln!(s, "  P(B | sender measures)       {}", p.audit.p_receiver_sender_measures).unwrap();
            writeln!(s, "  P(B | sender idle)           {}", p.audit.p_receiver_sender_idle).unwrap();
            writeln!(s, "  marginal difference          {}", p.audit.marginal_difference).unwrap();
            let row = AuditRow {
                index: 0,
                dim: 2,
                shared_basis: false,
                commutator_norm: p.audit.commutator_norm,
                premise_holds: p.audit.premise_holds,
                p_receiver_sender_measures: p.audit.p_receiver_sender_measures,
                p_receiver_sender_idle: p.audit.p_receiver_sender_idle,
                marginal_difference: p.audit.marginal_difference,
            };
            emit(&args.out, &s, &|w| write_json(&report, w), &|w| write_csv([&row], w))
        }
        PairSelector::RandomCommuting | PairSelector::Random => {
            if args.count == 0 {
                return Err(Failure::validation("count must be at least 1"));
            }
            let (family, name) = match args.pair {
                PairSelector::RandomCommuting => (PairFamily::Commuting, "random-commuting"),
                _ => (PairFamily::Mixed, "random"),
            };
            let cases = random_audits(family, args.count, args.seed, args.tol, Execution::default())?;
            let rows: Vec<AuditRow> = cases.iter().map(AuditRow::from).collect();
            let commuting = cases.iter().filter(|c| c.audit.premise_holds).count();
            let passed = cases
                .iter()
                .filter(|c| c.audit.premise_holds)
                .filter(|c| c.audit.marginal_difference < args.tol)
                .count();
            let signalling = cases.iter().filter(|c| c.audit.marginal_difference >= args.tol).count();

            #[derive(Serialize)]
            struct Analytic<'a> {
                cases: &'a [AuditRow],
            }
            #[derive(Serialize)]
            struct Diagnostics {
                commuting_pairs: usize,
                commuting_pairs_without_signalling: usize,
                pairs_with_marginal_difference: usize,
                max_difference_when_commuting: f64,
            }
            let max_commuting = cases
                .iter()
                .filter(|c| c.audit.premise_holds)
                .map(|c| c.audit.marginal_difference)
                .fold(0.0, f64::max);
            let report = Report {
                params: Params { pair: name, count: Some(args.count), seed: Some(args.seed), tol: args.tol },
                analytic: Analytic { cases: &rows },
                empirical: Empty {},
                diagnostics: Diagnostics {
                    commuting_pairs: commuting,
                    commuting_pairs_without_signalling: passed,
                    pairs_with_marginal_difference: signalling,
                    max_difference_when_commuting: max_commuting,
                },
                trials: None,
            };

            let mut s = String::new();
            writeln!(s, "audit: {} pairs ({name}), seed {}, tol {:e}", args.count, args.seed, args.tol).unwrap();
            writeln!(s, "  {:>5} {:>3} {:>6} {:>12} {:>8} {:>12}", "pair", "dim", "shared", "‖[A,B]‖_F", "premise", "difference").unwrap();
            for r in &rows {
                writeln!(
                    s,
                    "  {:>5} {:>3} {:>6} {:>12.3e} {:>8} {:>12.3e}",
                    r.index, r.dim, r.shared_basis, r.commutator_norm, r.premise_holds, r.marginal_difference
                )
                .unwrap();
            }
            writeln!(
                s,
                "  {passed}/{commuting} commuting pairs with difference < {:e}; {signalling} pairs signal; max difference when commuting {max_commuting:e}",
                args.tol
            )
            .unwrap();
            emit(&args.out, &s, &|w| write_json(&report, w), &|w| write_csv(rows.iter(), w))
        }
    }
}

/// Entries rounded to 12 decimals so exact halves print cleanly.
fn rounded(op: &Operator) -> Operator {
    let r = |x: f64| (x * 1e12).round() / 1e12 + 0.0;
    let rows = op
        .rows()
        .into_iter()
        .map(|row| row.into_iter().map(|c| Complex64::new(r(c.re), r(c.im))).collect())
        .collect();
    Operator::from_rows(rows).expect("square input")
}
