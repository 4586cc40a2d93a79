use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use circlelog::wire::{dh_connect, dh_serve, Session};
use circlelog::{Error, GroupParams, DEFAULT_G, DEFAULT_N, DEFAULT_P};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn loopback(
    server_params: GroupParams,
    client_params: GroupParams,
    server_seed: u64,
    client_seed: u64,
) -> (circlelog::Result<Session>, circlelog::Result<Session>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = thread::spawn(move || {
        dh_serve(
            &listener,
            &server_params,
            &mut ChaCha20Rng::seed_from_u64(server_seed),
        )
    });
    let client = dh_connect(
        addr,
        &client_params,
        &mut ChaCha20Rng::seed_from_u64(client_seed),
    );
    (server.join().unwrap(), client)
}

fn default_params() -> GroupParams {
    GroupParams::new(DEFAULT_N, DEFAULT_G, DEFAULT_P).unwrap()
}

#[test]
fn loopback_sessions_agree() {
    for (s, c) in [(1, 2), (5, 5), (100, 7)] {
        let (server, client) = loopback(default_params(), default_params(), s, c);
        let (server, client) = (server.unwrap(), client.unwrap());
        assert_eq!(server.confirm, client.confirm);
        assert_eq!(server.shared, client.shared);
        assert_eq!(server.transcript, client.transcript);
    }
}

#[test]
fn mismatched_params_are_refused() {
    let other = GroupParams::new(1_000_003, DEFAULT_G, DEFAULT_P).unwrap();
    let (server, client) = loopback(default_params(), other, 1, 2);
    assert_eq!(server.unwrap_err(), Error::ParamsMismatch);
    assert_eq!(client.unwrap_err(), Error::ParamsMismatch);
}

fn raw_exchange(lines: &[&str]) -> (circlelog::Result<Session>, Vec<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = thread::spawn(move || {
        dh_serve(
            &listener,
            &default_params(),
            &mut ChaCha20Rng::seed_from_u64(1),
        )
    });
    let mut stream = TcpStream::connect(addr).unwrap();
    for line in lines {
        stream.write_all(line.as_bytes()).unwrap();
    }
    stream.shutdown(std::net::Shutdown::Write).unwrap();
    let replies = BufReader::new(stream).lines().map(|l| l.unwrap()).collect();
    (server.join().unwrap(), replies)
}

#[test]
fn server_answers_err_params() {
    let (result, replies) = raw_exchange(&["HELLO circlelog/1\n", "PARAMS n=1000003 g=3\n"]);
    assert_eq!(result.unwrap_err(), Error::ParamsMismatch);
    assert_eq!(replies, ["ERR PARAMS"]);
}

#[test]
fn truncated_handshake_names_expected_message() {
    let (result, replies) = raw_exchange(&["HELLO circlelog/1\n"]);
    match result.unwrap_err() {
        Error::Protocol(msg) => assert!(msg.contains("PARAMS"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(replies.is_empty());

    let (result, _) = raw_exchange(&[
        "HELLO circlelog/1\n",
        "PARAMS n=2305843009213693951 g=3\n",
        "A=12",
    ]);
    match result.unwrap_err() {
        Error::Protocol(msg) => assert!(msg.contains("A=<dec>"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_lines_are_protocol_errors() {
    let (result, _) = raw_exchange(&["HELO\n"]);
    assert!(matches!(result, Err(Error::Protocol(_))));
    let (result, _) = raw_exchange(&["HELLO circlelog/1\n", "PARAMS n=x g=3\n"]);
    assert!(matches!(result, Err(Error::Protocol(_))));
    let (result, replies) = raw_exchange(&[
        "HELLO circlelog/1\n",
        "PARAMS n=2305843009213693951 g=3\n",
        "A=2305843009213693951\n",
    ]);
    assert!(matches!(result, Err(Error::Protocol(_))));
    assert_eq!(replies, ["OK"]);
}
