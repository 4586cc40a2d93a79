//! Command-line front end: keys, encryption, signatures, the DH demo and
//! the attack experiments.
//!
//! Exit status: 0 on success, 1 on a domain error (bad key, rejected
//! signature, protocol failure), 2 on a usage error.

use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use circlelog::cryptanalysis::{
    accumulation_experiment, direct_attack_campaign, exhaustive_attack_campaign, precision_sweep,
    write_csv, PublicView, DEFAULT_SEED, DEFAULT_TRIALS,
};
use circlelog::formats::{read_file, write_file, CiphertextFile, KeyFile};
use circlelog::spectral::{dft_matrix, eigenvalues_of_shift, log_operator, shift_operator};
use circlelog::wire::{dh_connect, dh_serve, Session};
use circlelog::{
    decode_message, elgamal_decrypt, elgamal_encrypt, encode_message, keygen, sign, verify,
    GroupParams, Signature, Tolerance, DEFAULT_G, DEFAULT_N, DEFAULT_P,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Parser)]
#[command(
    name = "circlelog",
    version,
    about = "Roots-of-unity toy cryptosystem and attack harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct GroupArgs {
    /// Group order.
    #[arg(long, default_value_t = DEFAULT_N)]
    n: u64,
    /// Generator exponent, coprime to n.
    #[arg(long, default_value_t = DEFAULT_G)]
    g: u64,
    /// Angular precision in bits.
    #[arg(long, default_value_t = DEFAULT_P)]
    p: u32,
}

impl GroupArgs {
    fn params(&self) -> Result<GroupParams, Failure> {
        Ok(GroupParams::new(self.n, self.g, self.p)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair; the public half goes next to --out as `.pub`.
    Keygen {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// ElGamal-encrypt the bytes of a file (big-endian integer below n).
    Encrypt {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decrypt a ciphertext file.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        /// Ciphertext file.
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sign the bytes of a file with a private key.
    Sign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prints ACCEPT (exit 0) or REJECT (exit 1).
    Verify {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Accept one DH session and print the CONFIRM digest.
    DhServe {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        port: u16,
        #[arg(long)]
        seed: Option<u64>,
        /// Transcript file (default: standard error).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the client side of one DH session and print the CONFIRM digest.
    DhConnect {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        port: u16,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover random secret exponents and report the cost.
    Attack {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_enum, default_value_t = Method::Direct)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = Tolerance::DEFAULT)]
        delta: Tolerance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round-trip success rate per precision, as CSV.
    Sweep {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p_min: u32,
        #[arg(long)]
        p_max: u32,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = Tolerance::DEFAULT)]
        delta: Tolerance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recovery success on products of m numeric elements, m = 1..=m-max, as CSV.
    Accumulate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 64)]
        m_max: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the shift operator's spectrum and the log operator for dimension n.
    SpectralCheck {
        #[arg(long)]
        n: usize,
        /// Dump one matrix as text.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Matrix::Log)]
        matrix: Matrix,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Invert the fixed-point angle directly.
    Direct,
    /// Read the exponent from the exact representation.
    Exact,
    /// Scan every root.
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Matrix {
    Shift,
    Dft,
    Log,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    /// Already reported on standard output.
    Silent,
}

impl From<circlelog::Error> for Failure {
    fn from(e: circlelog::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Domain(format!("reading {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Failure::Domain(format!("writing {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn load_private(path: &Path) -> Result<circlelog::KeyPair, Failure> {
    match KeyFile::load(path)? {
        KeyFile::Private(kp) => Ok(kp),
        KeyFile::Public(_) => Err(Failure::Domain(format!(
            "{} is a public key; a private key is required",
            path.display()
        ))),
    }
}

fn report_session(session: &Session, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, &session.transcript_text())?,
        None => eprint!("{}", session.transcript_text()),
    }
    println!("CONFIRM {}", session.confirm);
    Ok(())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Keygen { group, seed, out } => {
            let kp = keygen(&group.params()?, &mut rng_for(seed))?;
            let public_path = out.with_extension("pub");
            if public_path == out {
                return Err(Failure::Usage(
                    "--out must not end in .pub; the public key is written there".to_string(),
                ));
            }
            KeyFile::Private(kp).save(&out)?;
            KeyFile::Public(kp.public()).save(&public_path)?;
            eprintln!("wrote {} and {}", out.display(), public_path.display());
        }
        Command::Encrypt {
            public,
            message,
            seed,
            out,
        } => {
            let pk = KeyFile::load(&public)?.public();
            let m = encode_message(&read_bytes(&message)?, pk.params())?;
            let ct = elgamal_encrypt(&pk, &m, &mut rng_for(seed))?;
            emit(&out, CiphertextFile(ct).to_string().as_bytes())?;
        }
        Command::Decrypt { key, message, out } => {
            let sk = load_private(&key)?;
            let ct: CiphertextFile = read_file(&message)?.parse()?;
            let m = elgamal_decrypt(&sk, &ct.0)?;
            emit(&out, &decode_message(&m))?;
        }
        Command::Sign {
            key,
            message,
            seed,
            out,
        } => {
            let sk = load_private(&key)?;
            let sig = sign(&sk, &read_bytes(&message)?, &mut rng_for(seed))?;
            emit(&out, sig.to_string().as_bytes())?;
        }
        Command::Verify {
            public,
            message,
            sig,
        } => {
            let pk = KeyFile::load(&public)?.public();
            let sig: Signature = read_file(&sig)?.parse()?;
            if verify(&pk, &read_bytes(&message)?, &sig)? {
                println!("ACCEPT");
            } else {
                println!("REJECT");
                return Err(Failure::Silent);
            }
        }
        Command::DhServe {
            group,
            host,
            port,
            seed,
            out,
        } => {
            let params = group.params()?;
            let listener = TcpListener::bind((host.as_str(), port))
                .map_err(|e| Failure::Domain(format!("binding {host}:{port}: {e}")))?;
            eprintln!("listening on {}", listener.local_addr()?);
            let session = dh_serve(&listener, &params, &mut rng_for(seed))?;
            report_session(&session, &out)?;
        }
        Command::DhConnect {
            group,
            host,
            port,
            seed,
            out,
        } => {
            let params = group.params()?;
            let session = dh_connect((host.as_str(), port), &params, &mut rng_for(seed))?;
            report_session(&session, &out)?;
        }
        Command::Attack {
            group,
            method,
            trials,
            seed,
            delta,
            out,
        } => {
            let params = group.params()?;
            let report = match method {
                Method::Direct => {
                    direct_attack_campaign(&params, PublicView::Numeric, trials, delta, seed)
                }
                Method::Exact => {
                    direct_attack_campaign(&params, PublicView::Exact, trials, delta, seed)
                }
                Method::Exhaustive => exhaustive_attack_campaign(&params, trials, seed)?,
            };
            emit(&out, format!("{report}\n").as_bytes())?;
        }
        Command::Sweep {
            n,
            p_min,
            p_max,
            trials,
            seed,
            delta,
            out,
        } => {
            if p_min > p_max {
                return Err(Failure::Usage(format!(
                    "--p-min {p_min} exceeds --p-max {p_max}"
                )));
            }
            let rows = precision_sweep(n, p_min..=p_max, trials, delta, seed)?;
            let mut csv = Vec::new();
            write_csv(&rows, &mut csv)?;
            emit(&out, &csv)?;
        }
        Command::Accumulate {
            n,
            p,
            m_max,
            trials,
            seed,
            out,
        } => {
            if m_max == 0 {
                return Err(Failure::Usage("--m-max must be at least 1".to_string()));
            }
            let lengths: Vec<u64> = (1..=m_max).collect();
            let rows = accumulation_experiment(n, p, &lengths, trials, seed)?;
            let mut csv = Vec::new();
            write_csv(&rows, &mut csv)?;
            emit(&out, &csv)?;
        }
        Command::SpectralCheck { n, out, matrix } => spectral_check(n, out, matrix)?,
    }
    Ok(())
}

fn spectral_check(n: usize, out: Option<PathBuf>, matrix: Matrix) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".to_string()));
    }
    let shift = shift_operator(n);
    let dft = dft_matrix(n);
    let log = log_operator(n);

    let roots_err = eigenvalues_of_shift(n)
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let root = num_root(k, n);
            ((z.re - root.0).powi(2) + (z.im - root.1).powi(2)).sqrt()
        })
        .fold(0.0, f64::max);
    let checks = [
        ("shift unitarity defect", shift.unitarity_defect(), 1e-10),
        ("dft unitarity defect", dft.unitarity_defect(), 1e-10),
        ("eigenvalue error", roots_err, 1e-9),
        ("exp(log) - shift", log.exp().max_abs_diff(&shift), 1e-8),
    ];
    let mut ok = true;
    for (name, value, tolerance) in checks {
        let pass = value < tolerance;
        ok &= pass;
        println!(
            "{} {name}: {value:e} (< {tolerance:e})",
            if pass { "ok  " } else { "FAIL" }
        );
    }
    if let Some(path) = out {
        let m = match matrix {
            Matrix::Shift => shift,
            Matrix::Dft => dft,
            Matrix::Log => log,
        };
        write_file(&path, &m.dump())?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Silent)
    }
}

/// `e^{2πik/n}` through the fixed-point circle at 64 bits.
fn num_root(k: usize, n: usize) -> (f64, f64) {
    let gp = GroupParams::with_unit_generator(n as u64, 64).expect("n >= 1");
    gp.element(k as i128).to_numeric().complex_value()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Silent) => ExitCode::from(1),
    }
}
