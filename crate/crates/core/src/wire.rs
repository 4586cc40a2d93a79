//! Two-party Diffie-Hellman over a line-based TCP protocol.
//!
//! ```text
//! C: HELLO circlelog/1
//! C: PARAMS n=<dec> g=<dec>
//! S: OK                      (or ERR PARAMS, then close)
//! C: A=<dec>
//! S: B=<dec>
//! C: CONFIRM <hex>
//! S: CONFIRM <hex>
//! ```
//!
//! `<hex>` is the lowercase SHA-256 of the ASCII decimal exponent of the
//! shared element. Both sides record the same transcript, one line per
//! message prefixed with its sender.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::time::Duration;

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{ExactElement, GroupParams};
use crate::protocols::{dh_public, dh_shared, keygen};

pub const HELLO: &str = "HELLO circlelog/1";
const IO_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub shared: ExactElement,
    pub confirm: String,
    pub transcript: Vec<String>,
}

impl Session {
    pub fn transcript_text(&self) -> String {
        let mut s = self.transcript.join("\n");
        s.push('\n');
        s
    }
}

pub fn confirmation_digest(shared: &ExactElement) -> String {
    hex::encode(Sha256::digest(shared.exponent().to_string().as_bytes()))
}

#[derive(Clone, Copy)]
enum Side {
    Client,
    Server,
}

impl Side {
    fn tag(self) -> &'static str {
        match self {
            Side::Client => "C",
            Side::Server => "S",
        }
    }

    fn peer(self) -> Side {
        match self {
            Side::Client => Side::Server,
            Side::Server => Side::Client,
        }
    }
}

struct Channel<R, W> {
    reader: BufReader<R>,
    writer: W,
    side: Side,
    transcript: Vec<String>,
}

impl<R: Read, W: Write> Channel<R, W> {
    fn send(&mut self, line: &str) -> Result<()> {
        self.writer
            .write_all(format!("{line}\n").as_bytes())
            .and_then(|_| self.writer.flush())
            .map_err(|e| Error::io(format!("sending `{line}`"), e))?;
        self.transcript.push(format!("{}: {line}", self.side.tag()));
        Ok(())
    }

    fn recv(&mut self, expecting: &str) -> Result<String> {
        let mut buf = String::new();
        let read = self
            .reader
            .read_line(&mut buf)
            .map_err(|e| Error::io(format!("receiving {expecting}"), e))?;
        if read == 0 || !buf.ends_with('\n') {
            return Err(Error::Protocol(format!(
                "stream ended while expecting {expecting}"
            )));
        }
        buf.pop();
        self.transcript
            .push(format!("{}: {buf}", self.side.peer().tag()));
        Ok(buf)
    }
}

fn parse_decimal(value: &str, what: &str) -> Result<u64> {
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Protocol(format!(
            "{what} is not a decimal integer: `{value}`"
        )));
    }
    value
        .parse()
        .map_err(|_| Error::Protocol(format!("{what} out of range: `{value}`")))
}

fn parse_params_line(line: &str) -> Result<(u64, u64)> {
    let malformed = || Error::Protocol(format!("expected `PARAMS n=<dec> g=<dec>`, got `{line}`"));
    let rest = line.strip_prefix("PARAMS ").ok_or_else(malformed)?;
    let (n, g) = rest.split_once(' ').ok_or_else(malformed)?;
    let n = n.strip_prefix("n=").ok_or_else(malformed)?;
    let g = g.strip_prefix("g=").ok_or_else(malformed)?;
    Ok((parse_decimal(n, "n")?, parse_decimal(g, "g")?))
}

fn parse_public(line: &str, tag: &str, params: &GroupParams) -> Result<ExactElement> {
    let value = line
        .strip_prefix(tag)
        .and_then(|l| l.strip_prefix('='))
        .ok_or_else(|| Error::Protocol(format!("expected `{tag}=<dec>`, got `{line}`")))?;
    let k = parse_decimal(value, tag)?;
    if k >= params.order() {
        return Err(Error::Protocol(format!(
            "{tag} = {k} outside [0, {})",
            params.order()
        )));
    }
    Ok(params.element(k as i128))
}

fn finish<R: Read, W: Write>(
    ch: &mut Channel<R, W>,
    shared: ExactElement,
    theirs: &str,
) -> Result<Session> {
    let ours = confirmation_digest(&shared);
    let theirs = theirs
        .strip_prefix("CONFIRM ")
        .ok_or_else(|| Error::Protocol(format!("expected `CONFIRM <hex>`, got `{theirs}`")))?;
    if theirs != ours {
        return Err(Error::Protocol(format!(
            "confirmation mismatch: peer {theirs}, local {ours}"
        )));
    }
    Ok(Session {
        shared,
        confirm: ours,
        transcript: std::mem::take(&mut ch.transcript),
    })
}

/// Server side of one session over an established stream.
pub fn serve_session<S, R>(stream: S, params: &GroupParams, rng: &mut R) -> Result<Session>
where
    S: Read + Write + TryClone,
    R: RngCore + ?Sized,
{
    let reader = stream
        .try_clone_stream()
        .map_err(|e| Error::io("cloning stream", e))?;
    let mut ch = Channel {
        reader: BufReader::new(reader),
        writer: stream,
        side: Side::Server,
        transcript: Vec::new(),
    };

    let hello = ch.recv("`HELLO circlelog/1`")?;
    if hello != HELLO {
        return Err(Error::Protocol(format!(
            "expected `{HELLO}`, got `{hello}`"
        )));
    }
    let (n, g) = parse_params_line(&ch.recv("`PARAMS n=<dec> g=<dec>`")?)?;
    if n != params.order() || g != params.generator_exponent() {
        ch.send("ERR PARAMS")?;
        return Err(Error::ParamsMismatch);
    }
    ch.send("OK")?;

    let a = parse_public(&ch.recv("`A=<dec>`")?, "A", params)?;
    let own = keygen(params, rng)?;
    ch.send(&format!("B={}", dh_public(&own).exponent()))?;
    let shared = dh_shared(&own, &a)?;

    let client_confirm = ch.recv("`CONFIRM <hex>`")?;
    let ours = confirmation_digest(&shared);
    ch.send(&format!("CONFIRM {ours}"))?;
    finish(&mut ch, shared, &client_confirm)
}

/// Client side of one session over an established stream.
pub fn client_session<S, R>(stream: S, params: &GroupParams, rng: &mut R) -> Result<Session>
where
    S: Read + Write + TryClone,
    R: RngCore + ?Sized,
{
    let reader = stream
        .try_clone_stream()
        .map_err(|e| Error::io("cloning stream", e))?;
    let mut ch = Channel {
        reader: BufReader::new(reader),
        writer: stream,
        side: Side::Client,
        transcript: Vec::new(),
    };

    ch.send(HELLO)?;
    ch.send(&format!(
        "PARAMS n={} g={}",
        params.order(),
        params.generator_exponent()
    ))?;
    match ch.recv("`OK`")?.as_str() {
        "OK" => {}
        "ERR PARAMS" => return Err(Error::ParamsMismatch),
        other => return Err(Error::Protocol(format!("expected `OK`, got `{other}`"))),
    }

    let own = keygen(params, rng)?;
    ch.send(&format!("A={}", dh_public(&own).exponent()))?;
    let b = parse_public(&ch.recv("`B=<dec>`")?, "B", params)?;
    let shared = dh_shared(&own, &b)?;

    ch.send(&format!("CONFIRM {}", confirmation_digest(&shared)))?;
    let server_confirm = ch.recv("`CONFIRM <hex>`")?;
    finish(&mut ch, shared, &server_confirm)
}

/// Streams that can hand out an independent read handle.
pub trait TryClone: Sized {
    type Reader: Read;
    fn try_clone_stream(&self) -> std::io::Result<Self::Reader>;
}

impl TryClone for TcpStream {
    type Reader = TcpStream;

    fn try_clone_stream(&self) -> std::io::Result<TcpStream> {
        self.try_clone()
    }
}

impl TryClone for &TcpStream {
    type Reader = TcpStream;

    fn try_clone_stream(&self) -> std::io::Result<TcpStream> {
        self.try_clone()
    }
}

/// Accepts one connection on `listener` and runs the server side.
pub fn dh_serve<R: RngCore + ?Sized>(
    listener: &TcpListener,
    params: &GroupParams,
    rng: &mut R,
) -> Result<Session> {
    let (stream, _) = listener
        .accept()
        .map_err(|e| Error::io("accepting connection", e))?;
    stream
        .set_read_timeout(Some(IO_TIMEOUT))
        .map_err(|e| Error::io("configuring socket", e))?;
    serve_session(stream, params, rng)
}

pub fn dh_connect<A: ToSocketAddrs, R: RngCore + ?Sized>(
    addr: A,
    params: &GroupParams,
    rng: &mut R,
) -> Result<Session> {
    let stream = TcpStream::connect(addr).map_err(|e| Error::io("connecting", e))?;
    stream
        .set_read_timeout(Some(IO_TIMEOUT))
        .map_err(|e| Error::io("configuring socket", e))?;
    client_session(stream, params, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_line_parsing() {
        assert_eq!(parse_params_line("PARAMS n=97 g=5"), Ok((97, 5)));
        assert!(parse_params_line("PARAMS n=97").is_err());
        assert!(parse_params_line("PARAMS g=5 n=97").is_err());
        assert!(parse_params_line("PARAMS n=-1 g=5").is_err());
    }

    #[test]
    fn confirmation_digest_is_sha256_of_decimal() {
        let g = GroupParams::new(97, 5, 16).unwrap();
        // SHA-256("42")
        assert_eq!(
            confirmation_digest(&g.element(42)),
            "73475cb40a568e8da8a045ced110137e159f890ac4da883b6b17dc651b3a8049"
        );
    }
}
