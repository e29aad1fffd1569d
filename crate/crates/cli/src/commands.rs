use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use symflow::oracle::{empirical_entropy, empirical_roof_integral, sample_path};
use symflow::perron::sft_rows;
use symflow::suspension::required_block_len;
use symflow::{
    abramov_entropy, build_flatten, build_recode, parry_measure, perron_data, roof_integral, EntropyPath,
    MarkovChain, RoofFn, Sft, SynthesisOptions,
};

use crate::formats::*;

/// Writes pretty JSON to `out`, or to stdout.
pub fn emit<T: Serialize>(value: &T, out: Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
pub struct InfoReport {
    format_version: u32,
    k: usize,
    edges: usize,
    irreducible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aperiodic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_top: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parry: Option<ChainFile>,
}

pub fn info(matrix: &Path) -> Result<InfoReport> {
    let (_, s) = MatrixFile::load(matrix)?;
    let irreducible = s.is_irreducible();
    let mut report = InfoReport {
        format_version: FORMAT_VERSION,
        k: s.k(),
        edges: s.edge_count(),
        irreducible,
        period: None,
        aperiodic: None,
        lambda: None,
        h_top: None,
        parry: None,
    };
    if !irreducible {
        eprintln!("warning: matrix is not irreducible; Perron data and Parry measure omitted");
        return Ok(report);
    }
    let period = s.period()?;
    let pd = perron_data(&s)?;
    let parry = symflow::markov::parry_from_perron(&s, &pd)?;
    report.period = Some(period);
    report.aperiodic = Some(period == 1);
    report.lambda = Some(pd.lambda);
    report.h_top = Some(pd.lambda.ln());
    report.parry = Some((&parry).into());
    Ok(report)
}

pub fn parry(matrix: &Path) -> Result<ChainFile> {
    let (_, s) = MatrixFile::load(matrix)?;
    Ok((&parry_measure(&s)?).into())
}

#[derive(Serialize)]
pub struct PathPoint {
    t: f64,
    entropy: f64,
}

#[derive(Serialize)]
pub struct PathSolution {
    target: f64,
    tol: f64,
    t_star: f64,
    entropy: f64,
    chain: ChainFile,
}

#[derive(Serialize)]
pub struct PathReport {
    format_version: u32,
    h_top: f64,
    l: Vec<usize>,
    table: Vec<PathPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<PathSolution>,
}

pub fn path(matrix: &Path, points: usize, target: Option<f64>, tol: f64) -> Result<PathReport> {
    anyhow::ensure!(points >= 2, "need at least 2 grid points");
    let (_, s) = MatrixFile::load(matrix)?;
    let path = EntropyPath::from_parry(&s)?;
    let table = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            Ok(PathPoint {
                t,
                entropy: path.entropy(t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let solution = match target {
        Some(h) => {
            let t_star = path.solve(h, tol)?;
            let mc = path.measure(t_star)?;
            Some(PathSolution {
                target: h,
                tol,
                t_star,
                entropy: mc.entropy(),
                chain: (&mc).into(),
            })
        }
        None => None,
    };
    Ok(PathReport {
        format_version: FORMAT_VERSION,
        h_top: path.entropy(1.0)?,
        l: path.l().to_vec(),
        table,
        solution,
    })
}

#[derive(Serialize)]
pub struct RecodeReport {
    format_version: u32,
    n: usize,
    k_n: usize,
    anchor: usize,
    gamma: Vec<String>,
    target: MatrixFile,
    irreducible: bool,
    h_top_source: Option<f64>,
    h_top_target: Option<f64>,
    entropy_residual: Option<f64>,
}

pub fn recode(matrix: &Path, n: usize) -> Result<RecodeReport> {
    let (_, s) = MatrixFile::load(matrix)?;
    let r = build_recode(&s, n)?;
    let irreducible = s.is_irreducible();
    let (hs, ht) = if irreducible {
        (
            Some(perron_data(&s)?.lambda.ln()),
            Some(perron_data(r.target())?.lambda.ln()),
        )
    } else {
        eprintln!("warning: matrix is not irreducible; entropies omitted");
        (None, None)
    };
    Ok(RecodeReport {
        format_version: FORMAT_VERSION,
        n,
        k_n: r.target().k(),
        anchor: r.anchor(),
        gamma: r.gamma().iter().map(|w| word_to_string(w, s.k())).collect(),
        target: MatrixFile::from_sft(r.target()),
        irreducible,
        h_top_source: hs,
        h_top_target: ht,
        entropy_residual: hs.zip(ht).map(|(a, b)| (a - b).abs()),
    })
}

#[derive(Serialize)]
pub struct FlattenReport {
    format_version: u32,
    n_used: usize,
    eta: f64,
    delta_used: f64,
    tau: f64,
    l: Vec<usize>,
    #[serde(rename = "L")]
    num_states: usize,
    lambda_b: f64,
    flow_top_entropy_bounds: [f64; 2],
    exact: bool,
    perron_residual: f64,
}

/// The roof as a 0-window roof, recoding first when its window is wider.
fn zero_window(s: &Sft, roof: &RoofFn) -> Result<(usize, Sft, RoofFn)> {
    let (left, right) = roof.window();
    if left == 0 && right == 0 {
        return Ok((1, s.clone(), roof.clone()));
    }
    let n = required_block_len(left, right);
    let r = build_recode(s, n)?;
    let lifted = r.lift_roof(roof)?;
    Ok((n, r.target().clone(), lifted))
}

pub fn flatten(matrix: &Path, roof: &Path, eta: f64) -> Result<FlattenReport> {
    let (_, s) = MatrixFile::load(matrix)?;
    let (_, phi) = RoofFile::load(roof, &s)?;
    let (n_used, base, roof0) = zero_window(&s, &phi)?;
    let m = build_flatten(&base, &roof0, eta)?;
    let pd = m.perron_b()?;
    let lo = pd.lambda.ln() / m.tau();
    Ok(FlattenReport {
        format_version: FORMAT_VERSION,
        n_used,
        eta,
        delta_used: m.delta_used(),
        tau: m.tau(),
        l: m.l().to_vec(),
        num_states: m.num_states(),
        lambda_b: pd.lambda,
        flow_top_entropy_bounds: [lo, lo + eta],
        exact: m.is_exact(),
        perron_residual: pd.residual(&sft_rows(m.b())),
    })
}

pub fn inputs_hash(inputs: &SynthesisInputs) -> Result<String> {
    let bytes = serde_json::to_vec(inputs)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn synthesize(matrix: &Path, roof: &Path, h: f64, tol: f64, eta: Option<f64>) -> Result<ReportFile> {
    let (mfile, s) = MatrixFile::load(matrix)?;
    let (rfile, phi) = RoofFile::load(roof, &s)?;
    let rep = symflow::synthesize_with(&s, &phi, h, SynthesisOptions { tol, eta })?;
    let inputs = SynthesisInputs {
        matrix: mfile,
        roof: rfile,
        target: h,
        tol,
        eta,
    };
    let lifted = rep.lifted_roof.symbol_values().expect("lifted roofs have a 0 window");
    Ok(ReportFile {
        format_version: FORMAT_VERSION,
        library_version: symflow::VERSION.to_string(),
        inputs_hash: inputs_hash(&inputs)?,
        inputs,
        n_used: rep.n_used,
        gamma: rep.recode.gamma().iter().map(|w| word_to_string(w, s.k())).collect(),
        lifted_roof: lifted,
        tau: rep.model.tau(),
        l: rep.model.l().to_vec(),
        num_states: rep.model.num_states(),
        t_star: rep.t_star,
        chain: (&rep.chain).into(),
        achieved: rep.achieved,
        target: rep.target,
        eta_used: rep.eta_used,
        delta_used: rep.delta_used,
        bracket: [rep.bracket.0, rep.bracket.1],
        top_entropy_bounds: [rep.top_bounds.0, rep.top_bounds.1],
        ergodic: rep.ergodic,
    })
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    format_version: u32,
    inputs_hash: String,
    samples: u64,
    seed: u64,
    pub checks: Vec<Check>,
}

/// Agreement band for recomputed analytic values.
const ANALYTIC_TOL: f64 = 1e-12;
const SIGMAS: f64 = 3.0;

pub fn verify(report: &Path, samples: u64, seed: u64) -> Result<VerifyReport> {
    let rep: ReportFile = read_json(report)?;
    if rep.format_version != FORMAT_VERSION {
        return Err(ParseError::semantic(report, format!("unsupported format_version {}", rep.format_version)).into());
    }
    let mut checks = Vec::new();
    let mut check = |name: &str, pass: bool, detail: String| {
        checks.push(Check {
            name: name.into(),
            pass,
            detail,
        })
    };

    let hash = inputs_hash(&rep.inputs)?;
    check("inputs_hash", hash == rep.inputs_hash, format!("recomputed {hash}"));

    let s = rep.inputs.matrix.to_sft(report)?;
    let phi = rep.inputs.roof.to_roof(report, &s)?;
    let recode = build_recode(&s, rep.n_used)?;
    let gamma: Vec<String> = recode.gamma().iter().map(|w| word_to_string(w, s.k())).collect();
    check(
        "block_alphabet",
        gamma == rep.gamma,
        format!("{} blocks of length {}", gamma.len(), rep.n_used),
    );
    let lifted = recode.lift_roof(&phi)?;
    let lifted_ok = lifted.symbol_values().as_deref() == Some(&rep.lifted_roof[..]);
    check("lifted_roof", lifted_ok, "roof on the block shift matches the inputs".into());

    let chain = match rep.chain.to_chain() {
        Ok(c) => c,
        Err(e) => {
            check("chain_valid", false, e.to_string());
            return Ok(finish(rep, samples, seed, checks));
        }
    };
    let support = chain.check_support(recode.target());
    check(
        "chain_valid",
        support.is_ok(),
        match support {
            Ok(()) => format!("stationarity residual {:.1e}", chain.stationarity_residual()),
            Err(e) => e.to_string(),
        },
    );
    let ergodic = chain.is_ergodic();
    check("ergodic", ergodic && rep.ergodic, format!("recomputed {ergodic}, reported {}", rep.ergodic));

    let achieved = abramov_entropy(&chain, &lifted)?;
    check(
        "achieved_entropy",
        (achieved - rep.achieved).abs() <= ANALYTIC_TOL,
        format!("recomputed {achieved}, reported {}", rep.achieved),
    );
    check(
        "target_within_tol",
        (rep.achieved - rep.target).abs() <= rep.inputs.tol && rep.target == rep.inputs.target,
        format!("|achieved - target| = {:.1e}, tol {:.1e}", (rep.achieved - rep.target).abs(), rep.inputs.tol),
    );
    check(
        "bracket",
        rep.bracket[0] < rep.target && rep.target < rep.bracket[1],
        format!("F(low) = {}, F(1) = {}", rep.bracket[0], rep.bracket[1]),
    );
    check(
        "below_top_entropy",
        rep.target < rep.top_entropy_bounds[0],
        format!("top entropy in [{}, {}]", rep.top_entropy_bounds[0], rep.top_entropy_bounds[1]),
    );

    if samples > 0 {
        monte_carlo(&rep, &chain, &lifted, samples, seed, &mut check)?;
    }
    Ok(finish(rep, samples, seed, checks))
}

fn monte_carlo(
    rep: &ReportFile,
    chain: &MarkovChain,
    lifted: &RoofFn,
    samples: u64,
    seed: u64,
    check: &mut impl FnMut(&str, bool, String),
) -> Result<()> {
    let run = sample_path(chain, seed, samples as usize)?;
    let integral = roof_integral(lifted, chain)?;
    // block length 3 when the data allows it, shorter otherwise
    let block = (1..=3usize)
        .rev()
        .find(|&b| (run.len() as u128) >= 100 * (chain.k() as u128).pow(b as u32));
    match block {
        Some(b) => {
            let e = empirical_entropy(&run, b)?;
            let expected = rep.achieved * integral;
            check(
                "monte_carlo_entropy",
                e.agrees_with(expected, SIGMAS),
                format!("estimate {} ± {:.1e} (b = {b}), expected {expected}", e.value, e.stderr),
            );
        }
        None => check(
            "monte_carlo_entropy",
            false,
            format!("{samples} samples are too few for a block estimate on {} states", chain.k()),
        ),
    }
    let r = empirical_roof_integral(&run, lifted)?;
    check(
        "monte_carlo_roof_integral",
        r.agrees_with(integral, SIGMAS),
        format!("estimate {} ± {:.1e}, expected {integral}", r.value, r.stderr),
    );
    Ok(())
}

fn finish(rep: ReportFile, samples: u64, seed: u64, checks: Vec<Check>) -> VerifyReport {
    VerifyReport {
        format_version: FORMAT_VERSION,
        inputs_hash: rep.inputs_hash,
        samples,
        seed,
        checks,
    }
}

#[derive(Serialize)]
pub struct EntropyEstimate {
    analytic: f64,
    estimate: f64,
    stderr: f64,
    block: usize,
}

#[derive(Serialize)]
pub struct SampleReport {
    format_version: u32,
    source: &'static str,
    seed: u64,
    samples: u64,
    k: usize,
    head: String,
    entropy: Option<EntropyEstimate>,
}

pub fn sample(input: &Path, samples: u64, seed: u64, block: usize, show: usize) -> Result<SampleReport> {
    let text = std::fs::read_to_string(input).map_err(|e| ParseError::semantic(input, e))?;
    let value: serde_json::Value = parse_json(input, &text)?;
    let (source, chain, k) = if value.get("achieved").is_some() {
        let rep: ReportFile = parse_json(input, &text)?;
        let k = rep.chain.p.len();
        ("report", rep.chain.to_chain()?, k)
    } else {
        let m: MatrixFile = parse_json(input, &text)?;
        let s = m.to_sft(input)?;
        ("parry", parry_measure(&s)?, s.k())
    };
    let run = sample_path(&chain, seed, samples as usize)?;
    let head: Vec<usize> = run.trajectory.iter().take(show).copied().collect();
    let entropy = match empirical_entropy(&run, block) {
        Ok(e) => Some(EntropyEstimate {
            analytic: chain.entropy(),
            estimate: e.value,
            stderr: e.stderr,
            block,
        }),
        Err(symflow::Error::InsufficientData { needed, got }) => {
            eprintln!("warning: {got} samples are too few for block length {block} (need {needed}); estimate omitted");
            None
        }
        Err(e) => return Err(e.into()),
    };
    Ok(SampleReport {
        format_version: FORMAT_VERSION,
        source,
        seed,
        samples,
        k,
        head: word_to_string(&head, k),
        entropy,
    })
}
