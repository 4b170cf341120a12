use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use sbmz_core::codec::{
    encode_with_model, read_codeword, sbm_decode, verify_roundtrip, write_codeword, CodecError, QuantizedModel,
};
use sbmz_core::entropy::{
    binary_entropy, exact_structural_entropy, structural_entropy_leading, typicality_statistic, EntropyError,
    ORACLE_MAX_PAIRS,
};
use sbmz_core::graph::{gen_sbm, pair_count, read_graph, write_graph, GraphError, SbmParams};

/// Structural compression of stochastic block model graphs.
#[derive(Parser, Debug)]
#[command(name = "sbmz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Sample a graph and write it as a PGRF file.
    Gen {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compress a PGRF file into an SBMZ codeword.
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Use the empirical block-pair densities as the model.
        #[arg(long, conflicts_with_all = ["p", "q", "matrix"])]
        estimate: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decompress an SBMZ codeword into a PGRF file.
    Decompress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check that two PGRF files hold the same partitioned structure.
    Verify {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        roundtrip: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form entropies, plus the exact oracle for small n.
    Entropy {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        json: bool,
    },
    /// Codeword length, budget and timing over sampled graphs.
    Bench {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Typicality statistic over sampled graphs.
    Typicality {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Serialize, Clone)]
struct ModelArgs {
    /// Number of vertices.
    #[arg(long)]
    n: Option<usize>,
    /// Block sizes, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "fractions")]
    blocks: Option<Vec<usize>>,
    /// Block fractions x_i of n, comma separated.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Intra-block edge probability.
    #[arg(long, conflicts_with = "matrix")]
    p: Option<f64>,
    /// Inter-block edge probability.
    #[arg(long, conflicts_with = "matrix")]
    q: Option<f64>,
    /// JSON file holding the r x r probability matrix.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("verification failed")]
    Verify,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify => 2,
            CliError::Format(_) => 3,
            CliError::Config(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io(io) => CliError::Io(io),
            GraphError::Format(msg) => CliError::Format(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::Io(io) => CliError::Io(io),
            CodecError::Graph(g) => g.into(),
            other => CliError::Format(other.to_string()),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sbmz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    let config = serde_json::to_value(&cmd).expect("config serializes");
    match &cmd {
        Command::Gen { model, seed, output, json } => {
            let params = model.params()?;
            let pg = gen_sbm(&params, seed.unwrap_or(0));
            write_graph(&pg, output)?;
            let report = json!({
                "n": pg.n(),
                "sizes": pg.partition().sizes(),
                "edges": pg.graph().edge_count(),
                "output": output,
            });
            emit(*json, config, report)
        }
        Command::Compress { input, output, model, estimate, json } => {
            let pg = read_graph(input)?;
            let params = if *estimate {
                SbmParams::estimate(&pg)
            } else {
                let params = model.params_for(pg.partition().sizes())?;
                if params.partition() != pg.partition() {
                    return Err(CliError::Config(format!(
                        "model blocks {:?} do not match the graph's {:?}",
                        params.sizes(),
                        pg.partition().sizes()
                    )));
                }
                params
            };
            let quantized = QuantizedModel::from_params(&params);
            let start = Instant::now();
            let (cw, _) = encode_with_model(&pg, &quantized).map_err(|e| match e {
                CodecError::Arith(a) => CliError::Config(format!("graph impossible under the model: {a}")),
                other => other.into(),
            })?;
            let secs = start.elapsed().as_secs_f64();
            write_codeword(&cw, output)?;
            let stored: Vec<f64> = quantized.upper().iter().map(|p| p.to_f64()).collect();
            let report = json!({
                "n": pg.n(),
                "sizes": pg.partition().sizes(),
                "payload_bits": cw.payload_bits(),
                "block_bits": cw.blocks.iter().map(|b| b.bit_len()).collect::<Vec<_>>(),
                "cross_bits": cw.cross.bit_len(),
                "file_bytes": fs::metadata(output)?.len(),
                "model_upper": stored,
                "encode_seconds": secs,
            });
            emit(*json, config, report)
        }
        Command::Decompress { input, output, json } => {
            let cw = read_codeword(input)?;
            let start = Instant::now();
            let pg = sbm_decode(&cw)?;
            let secs = start.elapsed().as_secs_f64();
            write_graph(&pg, output)?;
            let report = json!({
                "n": pg.n(),
                "sizes": pg.partition().sizes(),
                "edges": pg.graph().edge_count(),
                "decode_seconds": secs,
            });
            emit(*json, config, report)
        }
        Command::Verify { original, roundtrip, json } => {
            let a = read_graph(original)?;
            let b = read_graph(roundtrip)?;
            let report = verify_roundtrip(&a, &b)?;
            let passed = report.passed;
            emit(*json, config, serde_json::to_value(&report).expect("report serializes"))?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Verify)
            }
        }
        Command::Entropy { model, json } => {
            let params = model.params()?;
            let leading = structural_entropy_leading(&params);
            let mut report = json!({ "leading": leading });
            if pair_count(params.n()) <= ORACLE_MAX_PAIRS {
                let exact = exact_structural_entropy(&params)?;
                report["exact"] = serde_json::to_value(&exact).expect("report serializes");
                report["identity_residual"] = json!(exact.residual());
            }
            emit(*json, config, report)
        }
        Command::Bench { model, seed, trials, eps, json } => {
            let params = model.params()?;
            let report = bench(&params, seed.unwrap_or(0), *trials, *eps)?;
            emit(*json, config, report)
        }
        Command::Typicality { model, seed, trials, eps, json } => {
            let params = model.params()?;
            let seed = seed.unwrap_or(0);
            let stats: Vec<_> = (0..*trials)
                .into_par_iter()
                .map(|t| typicality_statistic(&gen_sbm(&params, seed.wrapping_add(t)), &params))
                .collect();
            let pass = stats.iter().filter(|s| s.is_typical(*eps)).count();
            let values: Vec<f64> = stats.iter().map(|s| s.statistic).collect();
            let report = json!({
                "target": stats.first().map(|s| s.target),
                "trials": trials,
                "typical": pass,
                "pass_rate": if *trials == 0 { 0.0 } else { pass as f64 / *trials as f64 },
                "floor": 1.0 - 4.0 * eps,
                "asymmetry": stats.first().map(|s| s.asymmetry),
                "mean_statistic": mean(&values),
            });
            emit(*json, config, report)
        }
    }
}

/// Per-block length budget `C(n_i,2) h(P_ii) - n_i log2 n_i + 10 n_i` plus
/// `n_i n_j h(P_ij) + 64` per block pair.
fn length_budget(params: &SbmParams) -> f64 {
    let s = params.sizes();
    let mut budget = 0.0;
    for i in 0..s.len() {
        let ni = s[i] as f64;
        let log_term = if s[i] > 0 { ni * ni.log2() } else { 0.0 };
        budget += pair_count(s[i]) as f64 * binary_entropy(params.prob(i, i)) - log_term + 10.0 * ni;
        for j in i + 1..s.len() {
            budget += ni * s[j] as f64 * binary_entropy(params.prob(i, j)) + 64.0;
        }
    }
    budget
}

#[derive(Serialize)]
struct TrialRow {
    trial: u64,
    seed: u64,
    bits: u64,
    encode_seconds: f64,
    decode_seconds: f64,
    verified: bool,
    typical: bool,
}

fn bench(params: &SbmParams, seed: u64, trials: u64, eps: f64) -> Result<Value, CliError> {
    let quantized = QuantizedModel::from_params(params);
    let rows: Vec<TrialRow> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialRow, CliError> {
            let s = seed.wrapping_add(t);
            let pg = gen_sbm(params, s);
            let start = Instant::now();
            let (cw, _) = encode_with_model(&pg, &quantized)?;
            let encode_seconds = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let back = sbm_decode(&cw)?;
            let decode_seconds = start.elapsed().as_secs_f64();
            Ok(TrialRow {
                trial: t,
                seed: s,
                bits: cw.payload_bits(),
                encode_seconds,
                decode_seconds,
                verified: verify_roundtrip(&pg, &back)?.passed,
                typical: typicality_statistic(&pg, params).is_typical(eps),
            })
        })
        .collect::<Result<_, _>>()?;
    let bits: Vec<f64> = rows.iter().map(|r| r.bits as f64).collect();
    let leading = structural_entropy_leading(params);
    let passes = |f: fn(&TrialRow) -> bool| rows.iter().filter(|r| f(r)).count() as f64 / rows.len().max(1) as f64;
    Ok(json!({
        "trials": trials,
        "mean_bits": mean(&bits),
        "std_bits": std_dev(&bits),
        "budget_bits": length_budget(params),
        "h_graph": leading.h_graph,
        "h_struct_leading": leading.h_struct_leading,
        "verified_rate": passes(|r| r.verified),
        "typical_rate": passes(|r| r.typical),
        "mean_encode_seconds": mean(&rows.iter().map(|r| r.encode_seconds).collect::<Vec<_>>()),
        "mean_decode_seconds": mean(&rows.iter().map(|r| r.decode_seconds).collect::<Vec<_>>()),
        "rows": rows,
    }))
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn emit(as_json: bool, config: Value, report: Value) -> Result<(), CliError> {
    if as_json {
        let doc = json!({ "config": config, "report": report });
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    } else {
        print_human("", &report);
    }
    Ok(())
}

fn print_human(prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                print_human(&key, val);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, item) in items.iter().enumerate() {
                print_human(&format!("{prefix}[{i}]"), item);
            }
        }
        other => println!("{prefix}: {other}"),
    }
}

impl ModelArgs {
    fn sizes(&self) -> Result<Option<Vec<usize>>, CliError> {
        match (&self.blocks, &self.fractions, self.n) {
            (Some(b), _, Some(n)) if b.iter().sum::<usize>() != n => {
                Err(CliError::Config(format!("block sizes sum to {}, not n = {n}", b.iter().sum::<usize>())))
            }
            (Some(b), _, _) => Ok(Some(b.clone())),
            (None, Some(x), Some(n)) => fraction_sizes(x, n).map(Some),
            (None, Some(_), None) => Err(CliError::Config("--fractions needs --n".into())),
            (None, None, Some(n)) => Ok(Some(vec![n])),
            (None, None, None) => Ok(None),
        }
    }

    fn params(&self) -> Result<SbmParams, CliError> {
        let sizes = self.sizes()?.ok_or_else(|| CliError::Config("give --n, --blocks or --fractions".into()))?;
        self.build(sizes)
    }

    /// Model for a graph whose block sizes are already known.
    fn params_for(&self, sizes: &[usize]) -> Result<SbmParams, CliError> {
        let sizes = self.sizes()?.unwrap_or_else(|| sizes.to_vec());
        self.build(sizes)
    }

    fn build(&self, sizes: Vec<usize>) -> Result<SbmParams, CliError> {
        if let Some(path) = &self.matrix {
            let text = fs::read_to_string(path)?;
            let rows: Vec<Vec<f64>> =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("matrix file: {e}")))?;
            let r = sizes.len();
            if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                return Err(CliError::Config(format!("matrix must be {r} x {r}")));
            }
            return Ok(SbmParams::new(sizes, rows.concat())?);
        }
        let p = self.p.ok_or_else(|| CliError::Config("give --p (and --q) or --matrix".into()))?;
        let q = match self.q {
            Some(q) => q,
            None if sizes.len() == 1 => p,
            None => return Err(CliError::Config("--q is required with more than one block".into())),
        };
        Ok(SbmParams::planted(sizes, p, q)?)
    }
}

/// Sizes `x_i n` rounded by largest remainder so they sum to `n`.
fn fraction_sizes(x: &[f64], n: usize) -> Result<Vec<usize>, CliError> {
    let total: f64 = x.iter().sum();
    if x.iter().any(|&f| !(f > 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(CliError::Config(format!("fractions must be positive and sum to 1, got {x:?}")));
    }
    let exact: Vec<f64> = x.iter().map(|f| f * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    let missing = n - sizes.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        sizes[i] += 1;
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_round_to_n() {
        assert_eq!(fraction_sizes(&[0.5, 0.5], 10).unwrap(), vec![5, 5]);
        assert_eq!(fraction_sizes(&[1.0 / 3.0; 3], 10).unwrap().iter().sum::<usize>(), 10);
        assert_eq!(fraction_sizes(&[0.25, 0.75], 7).unwrap(), vec![2, 5]);
        assert!(fraction_sizes(&[0.5, 0.4], 10).is_err());
    }

    #[test]
    fn budget_single_block() {
        let params = SbmParams::erdos_renyi(8, 0.5).unwrap();
        assert!((length_budget(&params) - (28.0 - 24.0 + 80.0)).abs() < 1e-12);
    }
}
