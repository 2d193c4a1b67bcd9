use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anslab::dist::SymbolProbs;
use anslab::format::{
    byte_distribution, byte_symbol_name, parse_byte_symbol, parse_distribution, parse_spread,
    write_counts, write_spread, Container,
};
use anslab::keyed::{derive_keyed_spread, KeyedSession};
use anslab::optimize::{
    bench_point, exhaustive_spreads, quantized_search, BenchRow, ExhaustiveConfig, InitialSpread,
    Kappa, QuantizedSearchMode, SearchConfig, BENCH_CSV_HEADER,
};
use anslab::tuning::{rank_match_spread, spread_distance, tune_spread, PreferredPositions};
use anslab::{
    build_transition_system, decode, encode, quantize, solve_equilibrium, Arithmetic, CodingTables,
    Error, QuantizeMode, SymbolDistribution, SymbolFrame, SymbolSpread,
};
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::args::*;
use crate::manifest::{InputDigest, Recorder};

/// A failed command: message and process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_CAP: i32 = 4;

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularSystem | Error::AllCandidatesSingular => EXIT_SINGULAR,
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Outcome<T>;
}

impl<T> Context<T> for anslab::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Outcome<T> {
        self.map_err(|e| {
            let mut f = Failure::from(e);
            f.message = format!("{}: {}", what(), f.message);
            f
        })
    }
}

/// Text output of a command plus the file the manifest sits next to.
pub struct Done {
    pub stdout: String,
    pub primary: Option<PathBuf>,
}

fn read(rec: &mut Recorder, path: &Path) -> Outcome<Vec<u8>> {
    let data = fs::read(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })?;
    rec.inputs.push(InputDigest::of(path, &data));
    Ok(data)
}

fn read_text(rec: &mut Recorder, path: &Path) -> Outcome<String> {
    let data = read(rec, path)?;
    String::from_utf8(data).map_err(|_| Failure::input(format!("{}: not UTF-8", path.display())))
}

fn write(rec: &mut Recorder, path: &Path, data: &[u8]) -> Outcome<()> {
    fs::write(path, data).map_err(|e| Failure {
        code: EXIT_OTHER,
        message: format!("{}: {e}", path.display()),
    })?;
    rec.outputs.push(path.to_path_buf());
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_dist(rec: &mut Recorder, path: &Path, r: u32) -> Outcome<SymbolDistribution> {
    let text = read_text(rec, path)?;
    let probs = parse_distribution(&text).context(|| path.display().to_string())?;
    quantize(&probs, r, QuantizeMode::BestFit).context(|| path.display().to_string())
}

/// The coder sees only the counts, so a spread derived from it is reproducible from
/// the container header plus the symbol names.
fn counts_only(dist: &SymbolDistribution) -> Outcome<SymbolDistribution> {
    Ok(SymbolDistribution::from_counts(
        dist.names().to_vec(),
        dist.r(),
        dist.counts().to_vec(),
    )?)
}

fn load_spread(
    rec: &mut Recorder,
    path: &Path,
    dist: &SymbolDistribution,
) -> Outcome<SymbolSpread> {
    let text = read_text(rec, path)?;
    parse_spread(&text, dist).context(|| path.display().to_string())
}

fn arithmetic(flags: &ArithFlags, dist: &SymbolDistribution) -> Arithmetic {
    if flags.exact {
        Arithmetic::Exact
    } else if flags.float || dist.exact_probs().is_none() {
        Arithmetic::Floating
    } else {
        Arithmetic::default_for(dist.l())
    }
}

fn derived_spread(dist: &SymbolDistribution, method: TuneMethod) -> SymbolSpread {
    match method {
        TuneMethod::Tune => tune_spread(dist),
        TuneMethod::Rank => rank_match_spread(dist),
    }
}

fn coder_spread(
    rec: &mut Recorder,
    coder: &CoderArgs,
    dist: &SymbolDistribution,
) -> Outcome<SymbolSpread> {
    match &coder.spread {
        Some(path) => load_spread(rec, path, dist),
        None => Ok(derived_spread(dist, coder.method)),
    }
}

fn fraction(k: &Option<impl ToString>) -> serde_json::Value {
    k.as_ref()
        .map_or(serde_json::Value::Null, |v| json!(v.to_string()))
}

pub fn analyze(a: &AnalyzeArgs, rec: &mut Recorder) -> Outcome<Done> {
    let dist = load_dist(rec, &a.dist.dist, a.dist.r)?;
    let spread = load_spread(rec, &a.spread, &dist)?;
    let mode = arithmetic(&a.arith, &dist);
    rec.arithmetic = Some(mode.to_string());
    let spread_name = || format!("spread {}", a.spread.display());
    let report = anslab::markov::evaluate(&dist, &spread, mode).context(spread_name)?;

    let probs = if a.probs {
        let tables = CodingTables::build(&dist, &spread)?;
        match solve_equilibrium(&build_transition_system(&tables, &dist), mode) {
            Ok(eq) => Some(
                (0..eq.len())
                    .map(|i| {
                        let exact = eq.exact().map(|e| e[i].to_string());
                        (dist.l() + i as u32, eq.probs()[i], exact)
                    })
                    .collect::<Vec<_>>(),
            ),
            Err(Error::SingularSystem) => None,
            Err(e) => return Err(e).context(spread_name),
        }
    } else {
        None
    };

    let mut out = String::new();
    if a.json {
        let per_symbol: Vec<_> = dist
            .names()
            .iter()
            .enumerate()
            .map(|(s, name)| {
                json!({
                    "symbol": name,
                    "count": dist.count(s),
                    "kappa": report.per_symbol[s],
                    "kappa_exact": fraction(&report.per_symbol_exact.as_ref().map(|v| &v[s])),
                })
            })
            .collect();
        let mut doc = json!({
            "mode": report.mode.to_string(),
            "r": dist.r(),
            "l": dist.l(),
            "kappa": report.kappa,
            "kappa_exact": fraction(&report.kappa_exact),
            "entropy": report.entropy,
            "delta_h": report.delta_h,
            "per_symbol": per_symbol,
        });
        if a.probs {
            doc["state_probs"] = match &probs {
                Some(p) => p
                    .iter()
                    .map(|(x, v, e)| json!({"state": x, "p": v, "p_exact": fraction(e)}))
                    .collect(),
                None => serde_json::Value::Null,
            };
        }
        out = serde_json::to_string_pretty(&doc).expect("plain JSON values") + "\n";
    } else {
        let _ = writeln!(out, "mode\t{}", report.mode);
        let _ = writeln!(out, "L\t{}", dist.l());
        match &report.kappa_exact {
            Some(k) => {
                let _ = writeln!(out, "kappa\t{:.10}\t{k}", report.kappa);
            }
            None => {
                let _ = writeln!(out, "kappa\t{:.10}", report.kappa);
            }
        }
        let _ = writeln!(out, "entropy\t{:.10}", report.entropy);
        let _ = writeln!(out, "delta_h\t{:.10}", report.delta_h);
        if a.probs {
            match &probs {
                Some(p) => {
                    for (x, v, e) in p {
                        match e {
                            Some(e) => {
                                let _ = writeln!(out, "p\t{x}\t{e}");
                            }
                            None => {
                                let _ = writeln!(out, "p\t{x}\t{v:e}");
                            }
                        }
                    }
                }
                None => out.push_str("p\tstate probabilities are not unique for this spread\n"),
            }
        }
    }
    Ok(Done {
        stdout: out,
        primary: None,
    })
}

pub fn tune(a: &TuneArgs, rec: &mut Recorder) -> Outcome<Done> {
    let dist = load_dist(rec, &a.dist.dist, a.dist.r)?;
    let spread = derived_spread(&dist, a.method);
    write(rec, &a.out, write_spread(&spread, dist.names()).as_bytes())?;
    let d = spread_distance(&spread, &PreferredPositions::compute(&dist))?;
    let mode = Arithmetic::default_for(dist.l());
    let mode = if dist.exact_probs().is_some() {
        mode
    } else {
        Arithmetic::Floating
    };
    rec.arithmetic = Some(mode.to_string());
    let report = anslab::markov::evaluate(&dist, &spread, mode)
        .context(|| format!("spread {}", a.out.display()))?;
    let method = match a.method {
        TuneMethod::Tune => "tune",
        TuneMethod::Rank => "rank",
    };
    let stdout = if a.json {
        serde_json::to_string_pretty(&json!({
            "method": method,
            "mode": report.mode.to_string(),
            "counts": dist.counts(),
            "distance": d,
            "kappa": report.kappa,
            "kappa_exact": fraction(&report.kappa_exact),
            "delta_h": report.delta_h,
        }))
        .expect("plain JSON values")
            + "\n"
    } else {
        format!(
            "method\t{method}\nmode\t{}\ncounts\t{:?}\ndistance\t{d:.6}\nkappa\t{:.10}\ndelta_h\t{:.10}\n",
            report.mode,
            dist.counts(),
            report.kappa,
            report.delta_h
        )
    };
    Ok(Done {
        stdout,
        primary: Some(a.out.clone()),
    })
}

pub fn optimize(a: &OptimizeArgs, rec: &mut Recorder) -> Outcome<Done> {
    let text = read_text(rec, &a.dist.dist)?;
    let probs = parse_distribution(&text).context(|| a.dist.dist.display().to_string())?;
    let mut cfg = SearchConfig::new(a.iters, a.seed);
    cfg.threshold = a.threshold;
    cfg.objective = a.objective;
    cfg.arithmetic = if a.arith.exact {
        Arithmetic::Exact
    } else {
        Arithmetic::Floating
    };
    cfg.init = match a.init {
        InitArg::Random => InitialSpread::Random,
        InitArg::Tuned => InitialSpread::Tuned,
        InitArg::Rank => InitialSpread::Rank,
        InitArg::File => {
            let path = a
                .spread
                .as_ref()
                .ok_or_else(|| Failure::input("--init file needs --spread"))?;
            if a.counts != QuantizedSearchMode::BestFit {
                return Err(Failure::input(
                    "--init file fixes the counts; use --counts best-fit",
                ));
            }
            let dist = quantize(&probs, a.dist.r, QuantizeMode::BestFit)?;
            InitialSpread::Explicit(load_spread(rec, path, &dist)?)
        }
    };
    rec.seed = Some(a.seed);
    rec.arithmetic = Some(cfg.arithmetic.to_string());
    let (dist, trace) = quantized_search(&probs, a.dist.r, a.counts, &cfg)?;

    write(
        rec,
        &a.out,
        write_spread(&trace.final_spread, dist.names()).as_bytes(),
    )?;
    let trace_path = a
        .trace
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".trace.tsv"));
    let mut tsv = String::from("iteration\tx\ty\tdelta_h\tkappa\n");
    for s in &trace.accepted {
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{:e}\t{}",
            s.iteration, s.x, s.y, s.delta_h, s.kappa
        );
    }
    write(rec, &trace_path, tsv.as_bytes())?;

    let Some(report) = trace.report.clone() else {
        return Err(Failure {
            code: EXIT_SINGULAR,
            message: format!(
                "spread {}: no evaluated spread had a unique equilibrium",
                a.out.display()
            ),
        });
    };
    let stdout = if a.json {
        serde_json::to_string_pretty(&json!({
            "objective": a.objective.to_string(),
            "search_mode": cfg.arithmetic.to_string(),
            "mode": report.mode.to_string(),
            "counts": dist.counts(),
            "seed": a.seed,
            "iterations": trace.iterations,
            "swaps_attempted": trace.swaps_attempted,
            "singular": trace.singular,
            "good_swaps": trace.good_swaps(),
            "initial_delta_h": trace.initial_delta_h,
            "kappa": report.kappa,
            "kappa_exact": fraction(&report.kappa_exact),
            "delta_h": report.delta_h,
            "seconds": trace.wall_time.as_secs_f64(),
        }))
        .expect("plain JSON values")
            + "\n"
    } else {
        format!(
            "objective\t{}\nsearch_mode\t{}\nmode\t{}\ncounts\t{:?}\niterations\t{}\ngood_swaps\t{}\nsingular\t{}\ninitial_delta_h\t{:.10}\nkappa\t{:.10}\ndelta_h\t{:.10}\nseconds\t{:.3}\n",
            a.objective,
            cfg.arithmetic,
            report.mode,
            dist.counts(),
            trace.iterations,
            trace.good_swaps(),
            trace.singular,
            trace.initial_delta_h,
            report.kappa,
            report.delta_h,
            trace.wall_time.as_secs_f64()
        )
    };
    Ok(Done {
        stdout,
        primary: Some(a.out.clone()),
    })
}

fn kappa_csv(k: &Kappa) -> String {
    format!("{}", k.to_f64())
}

pub fn enumerate(a: &EnumerateArgs, rec: &mut Recorder, parallel: bool) -> Outcome<Done> {
    let dist = load_dist(rec, &a.dist.dist, a.dist.r)?;
    let mut cfg = ExhaustiveConfig {
        cap: a.cap,
        arithmetic: if a.arith.float || dist.exact_probs().is_none() {
            Arithmetic::Floating
        } else {
            Arithmetic::Exact
        },
        parallel,
        ..ExhaustiveConfig::default()
    };
    if let Some(edges) = &a.edges {
        cfg.edges = edges
            .iter()
            .map(|e| anslab::dist::parse_exact(e.trim()))
            .collect::<anslab::Result<_>>()
            .context(|| "--edges".to_string())?;
    }
    rec.arithmetic = Some(cfg.arithmetic.to_string());
    let report = exhaustive_spreads(&dist, &cfg)?;

    let min_path = a
        .min_spread
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".min.spread"));
    let max_path = a
        .max_spread
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".max.spread"));
    let (Some(min), Some(max)) = (&report.min, &report.max) else {
        return Err(Failure {
            code: EXIT_SINGULAR,
            message: format!("all {} spreads are singular", report.total),
        });
    };
    // The extremes are counted apart from the buckets and get rows of their own.
    let mut csv = String::from("bucket_low,bucket_high,count\n");
    let _ = writeln!(csv, "{0},{0},{1}", kappa_csv(&min.kappa), min.count);
    for b in &report.buckets {
        let _ = writeln!(
            csv,
            "{},{},{}",
            kappa_csv(&b.low),
            kappa_csv(&b.high),
            b.count
        );
    }
    if min.kappa.cmp_tol(&max.kappa) != std::cmp::Ordering::Equal {
        let _ = writeln!(csv, "{0},{0},{1}", kappa_csv(&max.kappa), max.count);
    }
    write(rec, &a.out, csv.as_bytes())?;
    write(
        rec,
        &min_path,
        write_spread(&min.spread, dist.names()).as_bytes(),
    )?;
    write(
        rec,
        &max_path,
        write_spread(&max.spread, dist.names()).as_bytes(),
    )?;

    let stdout = if a.json {
        serde_json::to_string_pretty(&json!({
            "mode": report.mode.to_string(),
            "total": report.total,
            "failures": report.failures,
            "min": {"kappa": min.kappa.to_f64(), "kappa_exact": fraction(&min.kappa.exact()), "count": min.count},
            "max": {"kappa": max.kappa.to_f64(), "kappa_exact": fraction(&max.kappa.exact()), "count": max.count},
            "buckets": report.buckets.iter().map(|b| json!({
                "low": b.low.to_f64(), "high": b.high.to_f64(), "count": b.count
            })).collect::<Vec<_>>(),
        }))
        .expect("plain JSON values")
            + "\n"
    } else {
        format!(
            "mode\t{}\ntotal\t{}\nfailures\t{}\nmin\t{:.10}\t{}\t{}\nmax\t{:.10}\t{}\t{}\n",
            report.mode,
            report.total,
            report.failures,
            min.kappa.to_f64(),
            min.kappa,
            min.count,
            max.kappa.to_f64(),
            max.kappa,
            max.count
        )
    };
    Ok(Done {
        stdout,
        primary: Some(a.out.clone()),
    })
}

/// Byte value of every symbol index.
fn byte_alphabet(dist: &SymbolDistribution) -> Outcome<Vec<u8>> {
    dist.names()
        .iter()
        .map(|n| {
            parse_byte_symbol(n)
                .ok_or_else(|| Failure::input(format!("symbol {n:?} is not a byte (use 0xHH)")))
        })
        .collect()
}

fn byte_frame(data: &[u8], alphabet: &[u8]) -> Outcome<SymbolFrame> {
    let mut index = [usize::MAX; 256];
    for (s, &b) in alphabet.iter().enumerate() {
        index[b as usize] = s;
    }
    let symbols = data
        .iter()
        .map(|&b| match index[b as usize] {
            usize::MAX => Err(Failure::input(format!(
                "byte 0x{b:02x} is outside the alphabet"
            ))),
            s => Ok(s),
        })
        .collect::<Outcome<Vec<_>>>()?;
    Ok(SymbolFrame::new(symbols))
}

fn frame_bytes(frame: &SymbolFrame, alphabet: &[u8]) -> Vec<u8> {
    frame.symbols.iter().map(|&s| alphabet[s]).collect()
}

/// Byte histogram of a non-empty input. A file made of one repeated byte gets a
/// phantom neighbour of weight one, since a coder needs two symbols.
fn histogram(data: &[u8]) -> Outcome<SymbolProbs> {
    let first = data[0];
    if data.iter().all(|&b| b == first) {
        let other = first ^ 1;
        let mut pairs = [(first, data.len() as u64), (other, 1)];
        pairs.sort_unstable();
        let names = pairs.iter().map(|&(b, _)| byte_symbol_name(b)).collect();
        let counts: Vec<u64> = pairs.iter().map(|&(_, c)| c).collect();
        return Ok(SymbolProbs::from_counts(names, &counts)?);
    }
    Ok(byte_distribution(data)?)
}

pub fn encode_file(a: &EncodeArgs, rec: &mut Recorder) -> Outcome<Done> {
    let data = read(rec, &a.input)?;
    let l = anslab::dist::state_count(a.r)?;
    let dist = match &a.coder.dist {
        Some(path) => counts_only(&load_dist(rec, path, a.r)?)?,
        None if data.is_empty() => {
            let container = Container {
                r: a.r,
                counts: Vec::new(),
                len: 0,
                frame: anslab::BinaryFrame {
                    payload: Vec::new(),
                    bit_len: 0,
                    final_state: l,
                },
                checksum: None,
            };
            write(rec, &a.output, &container.to_bytes()?)?;
            return Ok(Done {
                stdout: "symbols\t0\nbits\t0\n".into(),
                primary: Some(a.output.clone()),
            });
        }
        None => counts_only(&quantize(&histogram(&data)?, a.r, QuantizeMode::BestFit)?)?,
    };
    let alphabet = byte_alphabet(&dist)?;
    let frame = byte_frame(&data, &alphabet)?;
    let spread = coder_spread(rec, &a.coder, &dist)?;
    let tables = CodingTables::build(&dist, &spread)?;
    let out = encode(&frame, &tables, a.x_init.unwrap_or(l))?;
    let bits = out.bit_len;
    let container = Container {
        r: a.r,
        counts: dist.counts().to_vec(),
        len: frame.len() as u64,
        frame: out,
        checksum: None,
    };
    let bytes = container.to_bytes()?;
    write(rec, &a.output, &bytes)?;
    if a.coder.dist.is_none() || a.dist_out.is_some() {
        let path = a
            .dist_out
            .clone()
            .unwrap_or_else(|| with_suffix(&a.output, ".dist"));
        write(rec, &path, write_counts(&dist).as_bytes())?;
    }
    let per_symbol = if frame.is_empty() {
        0.0
    } else {
        bits as f64 / frame.len() as f64
    };
    Ok(Done {
        stdout: format!(
            "symbols\t{}\nbits\t{bits}\nbits_per_symbol\t{per_symbol:.6}\ncontainer_bytes\t{}\n",
            frame.len(),
            bytes.len()
        ),
        primary: Some(a.output.clone()),
    })
}

pub fn decode_file(a: &DecodeArgs, rec: &mut Recorder) -> Outcome<Done> {
    let bytes = read(rec, &a.input)?;
    let container = Container::from_bytes(&bytes).context(|| a.input.display().to_string())?;
    if container.checksum.is_some() {
        return Err(Failure::input("keyed container: use `anslab keyed decode`"));
    }
    let data = if container.counts.is_empty() && container.len == 0 {
        Vec::new()
    } else {
        let path = a.coder.dist.as_ref().ok_or_else(|| {
            Failure::input("decode needs --dist (the counts file written by encode)")
        })?;
        let dist = counts_only(&load_dist(rec, path, container.r)?)?;
        container.check_against(&dist)?;
        let alphabet = byte_alphabet(&dist)?;
        let spread = coder_spread(rec, &a.coder, &dist)?;
        let tables = CodingTables::build(&dist, &spread)?;
        let frame = decode(&container.frame, &tables, container.len)?;
        frame_bytes(&frame, &alphabet)
    };
    write(rec, &a.output, &data)?;
    Ok(Done {
        stdout: format!("symbols\t{}\n", data.len()),
        primary: Some(a.output.clone()),
    })
}

fn keyed_session(k: &KeyArgs, rec: &mut Recorder) -> Outcome<KeyedSession> {
    let key =
        hex::decode(k.key_hex.trim()).map_err(|e| Failure::input(format!("--key-hex: {e}")))?;
    let text = read_text(rec, &k.dist)?;
    let probs = parse_distribution(&text).context(|| k.dist.display().to_string())?;
    rec.arithmetic = Some(Arithmetic::Floating.to_string());
    Ok(derive_keyed_spread(&key, &probs, k.r, k.iters)?)
}

pub fn keyed(c: &KeyedCommand, rec: &mut Recorder) -> Outcome<Done> {
    match c {
        KeyedCommand::Derive { key, out, json } => {
            let session = keyed_session(key, rec)?;
            let text = write_spread(&session.spread, session.dist.names());
            let digest = hex::encode(Sha256::digest(text.as_bytes()));
            if let Some(out) = out {
                write(rec, out, text.as_bytes())?;
            }
            let (kappa, delta_h, mode) = match &session.report {
                Some(r) => (r.kappa, r.delta_h, r.mode.to_string()),
                None => {
                    return Err(Failure {
                        code: EXIT_SINGULAR,
                        message: "derived spread has no unique equilibrium".into(),
                    })
                }
            };
            let stdout = if *json {
                serde_json::to_string_pretty(&json!({
                    "spread_sha256": digest,
                    "counts": session.dist.counts(),
                    "iters": session.iters,
                    "mode": mode,
                    "kappa": kappa,
                    "delta_h": delta_h,
                }))
                .expect("plain JSON values")
                    + "\n"
            } else {
                format!(
                    "spread_sha256\t{digest}\ncounts\t{:?}\nmode\t{mode}\nkappa\t{kappa:.10}\ndelta_h\t{delta_h:.10}\n",
                    session.dist.counts()
                )
            };
            Ok(Done {
                stdout,
                primary: out.clone(),
            })
        }
        KeyedCommand::Encode { key, input, output } => {
            let session = keyed_session(key, rec)?;
            let data = read(rec, input)?;
            let alphabet = byte_alphabet(&session.dist)?;
            let frame = byte_frame(&data, &alphabet)?;
            let bytes = session.encode(&frame)?.to_bytes()?;
            write(rec, output, &bytes)?;
            Ok(Done {
                stdout: format!(
                    "symbols\t{}\ncontainer_bytes\t{}\n",
                    frame.len(),
                    bytes.len()
                ),
                primary: Some(output.clone()),
            })
        }
        KeyedCommand::Decode { key, input, output } => {
            let session = keyed_session(key, rec)?;
            let bytes = read(rec, input)?;
            let container =
                Container::from_bytes(&bytes).context(|| input.display().to_string())?;
            let alphabet = byte_alphabet(&session.dist)?;
            let frame = session.decode(&container)?;
            let data = frame_bytes(&frame, &alphabet);
            write(rec, output, &data)?;
            Ok(Done {
                stdout: format!("symbols\t{}\n", data.len()),
                primary: Some(output.clone()),
            })
        }
    }
}

pub fn bench(a: &BenchArgs, rec: &mut Recorder, parallel: bool) -> Outcome<Done> {
    let text = read_text(rec, &a.dist)?;
    let probs = parse_distribution(&text).context(|| a.dist.display().to_string())?;
    rec.seed = Some(a.first_seed);
    rec.arithmetic = Some(Arithmetic::Floating.to_string());
    let points: Vec<(u32, u64)> = a
        .r_list
        .iter()
        .flat_map(|&r| (0..a.seeds).map(move |i| (r, a.first_seed + i)))
        .collect();
    let run = |&(r, seed): &(u32, u64)| bench_point(&probs, r, a.iters, seed);
    let rows: Vec<BenchRow> = if parallel {
        points.par_iter().map(run).collect::<anslab::Result<_>>()?
    } else {
        points.iter().map(run).collect::<anslab::Result<_>>()?
    };
    let mut csv = format!("{BENCH_CSV_HEADER}\n");
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    write(rec, &a.out, csv.as_bytes())?;
    Ok(Done {
        stdout: csv,
        primary: Some(a.out.clone()),
    })
}
