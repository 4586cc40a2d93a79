//! Line-oriented text formats for keys, ciphertexts and signatures.
//!
//! Every format is UTF-8 with LF endings: a header line, then `field: value`
//! lines with decimal integers in a fixed order. Serialization is canonical,
//! so `parse(s).to_string() == s` for anything this module wrote.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::{FromStr, Lines};

use crate::error::{Error, Result};
use crate::group::GroupParams;
use crate::protocols::{Ciphertext, KeyPair, PublicKey, Signature};

pub const KEY_HEADER: &str = "circlelog-key v1";
pub const CIPHERTEXT_HEADER: &str = "circlelog-ciphertext v1";
pub const SIGNATURE_HEADER: &str = "circlelog-signature v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyFile {
    Private(KeyPair),
    Public(PublicKey),
}

impl KeyFile {
    pub fn params(&self) -> &GroupParams {
        match self {
            KeyFile::Private(kp) => kp.params(),
            KeyFile::Public(pk) => pk.params(),
        }
    }

    pub fn public(&self) -> PublicKey {
        match self {
            KeyFile::Private(kp) => kp.public(),
            KeyFile::Public(pk) => *pk,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_file(path)?.parse()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_string())
    }
}

impl fmt::Display for KeyFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        writeln!(f, "{KEY_HEADER}")?;
        let role = match self {
            KeyFile::Private(_) => "private",
            KeyFile::Public(_) => "public",
        };
        writeln!(f, "role: {role}")?;
        writeln!(f, "n: {}", params.order())?;
        writeln!(f, "g: {}", params.generator_exponent())?;
        writeln!(f, "p: {}", params.precision())?;
        match self {
            KeyFile::Private(kp) => writeln!(f, "x: {}", kp.private_exponent()),
            KeyFile::Public(pk) => writeln!(f, "h: {}", pk.element().exponent()),
        }
    }
}

/// Walks the lines of a document, tracking 1-based line numbers.
struct Fields<'a> {
    lines: Lines<'a>,
    line: usize,
}

impl<'a> Fields<'a> {
    fn new(text: &'a str) -> Self {
        Fields {
            lines: text.lines(),
            line: 0,
        }
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn next_line(&mut self, expecting: &str) -> Result<&'a str> {
        self.line += 1;
        self.lines
            .next()
            .ok_or_else(|| self.error(format!("unexpected end of file, expected {expecting}")))
    }

    fn header(&mut self, header: &str) -> Result<()> {
        let line = self.next_line(header)?;
        if line != header {
            return Err(self.error(format!("expected header `{header}`, found `{line}`")));
        }
        Ok(())
    }

    fn field(&mut self, name: &str) -> Result<&'a str> {
        let line = self.next_line(&format!("`{name}: ...`"))?;
        line.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(": "))
            .ok_or_else(|| self.error(format!("expected field `{name}`, found `{line}`")))
    }

    fn number<T: FromStr>(&mut self, name: &str) -> Result<T> {
        let value = self.field(name)?;
        if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.error(format!(
                "field `{name}` is not a decimal integer: `{value}`"
            )));
        }
        value
            .parse()
            .map_err(|_| self.error(format!("field `{name}` out of range: `{value}`")))
    }

    /// The next line if there is one; `None` at end of input.
    fn peek_optional(&mut self) -> Option<&'a str> {
        let next = self.lines.next();
        if next.is_some() {
            self.line += 1;
        }
        next
    }

    fn end(&mut self) -> Result<()> {
        match self.peek_optional() {
            None => Ok(()),
            Some(extra) => Err(self.error(format!("unexpected trailing line `{extra}`"))),
        }
    }

    fn params(&mut self) -> Result<GroupParams> {
        let n = self.number("n")?;
        let g = self.number("g")?;
        let p = self.number("p")?;
        GroupParams::new(n, g, p).map_err(|e| self.error(e.to_string()))
    }
}

impl FromStr for KeyFile {
    type Err = Error;

    /// Parses a key file. A private key may carry an optional trailing
    /// `h:` line; if present it must equal `g^x`.
    fn from_str(text: &str) -> Result<Self> {
        let mut fields = Fields::new(text);
        fields.header(KEY_HEADER)?;
        let role = fields.field("role")?;
        if role != "private" && role != "public" {
            return Err(fields.error(format!(
                "role must be `private` or `public`, found `{role}`"
            )));
        }
        let params = fields.params()?;
        let n = params.order();
        if role == "private" {
            let x: u64 = fields.number("x")?;
            if x == 0 || x >= n {
                return Err(fields.error(format!("x = {x} outside [1, {n})")));
            }
            let kp = KeyPair::from_private(&params, x).map_err(|e| fields.error(e.to_string()))?;
            if let Some(line) = fields.peek_optional() {
                let stored = line
                    .strip_prefix("h: ")
                    .and_then(|v| v.parse::<u64>().ok())
                    .ok_or_else(|| fields.error(format!("unexpected trailing line `{line}`")))?;
                let expected = kp.public().element().exponent();
                if stored != expected {
                    return Err(Error::Consistency(format!(
                        "stored h = {stored} but g^x = {expected}"
                    )));
                }
                fields.end()?;
            }
            Ok(KeyFile::Private(kp))
        } else {
            let h: u64 = fields.number("h")?;
            if h >= n {
                return Err(fields.error(format!("h = {h} outside [0, {n})")));
            }
            fields.end()?;
            Ok(KeyFile::Public(PublicKey::new(params.element(h as i128))))
        }
    }
}

/// A ciphertext together with the group it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CiphertextFile(pub Ciphertext);

impl fmt::Display for CiphertextFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.0.c1.params();
        writeln!(f, "{CIPHERTEXT_HEADER}")?;
        writeln!(f, "n: {}", params.order())?;
        writeln!(f, "g: {}", params.generator_exponent())?;
        writeln!(f, "p: {}", params.precision())?;
        writeln!(f, "c1: {}", self.0.c1.exponent())?;
        writeln!(f, "c2: {}", self.0.c2.exponent())
    }
}

impl FromStr for CiphertextFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut fields = Fields::new(text);
        fields.header(CIPHERTEXT_HEADER)?;
        let params = fields.params()?;
        let mut component = |name: &str| -> Result<_> {
            let k: u64 = fields.number(name)?;
            if k >= params.order() {
                return Err(fields.error(format!("{name} = {k} outside [0, {})", params.order())));
            }
            Ok(params.element(k as i128))
        };
        let c1 = component("c1")?;
        let c2 = component("c2")?;
        fields.end()?;
        Ok(CiphertextFile(Ciphertext { c1, c2 }))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{SIGNATURE_HEADER}")?;
        writeln!(f, "R: {}", self.r)?;
        writeln!(f, "s: {}", self.s)
    }
}

impl FromStr for Signature {
    type Err = Error;

    /// Range checks against `n` happen in `verify`, not here.
    fn from_str(text: &str) -> Result<Self> {
        let mut fields = Fields::new(text);
        fields.header(SIGNATURE_HEADER)?;
        let r = fields.number("R")?;
        let s = fields.number("s")?;
        fields.end()?;
        Ok(Signature { r, s })
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRIVATE_97: &str = "circlelog-key v1\nrole: private\nn: 97\ng: 5\np: 16\nx: 13\n";

    #[test]
    fn private_key_round_trip_is_byte_exact() {
        let key: KeyFile = PRIVATE_97.parse().unwrap();
        let KeyFile::Private(kp) = key else {
            panic!("expected a private key")
        };
        assert_eq!(kp.private_exponent(), 13);
        assert_eq!(kp.public().element().exponent(), 65);
        assert_eq!(key.to_string(), PRIVATE_97);
    }

    #[test]
    fn public_key_round_trip() {
        let text = "circlelog-key v1\nrole: public\nn: 97\ng: 5\np: 16\nh: 65\n";
        let key: KeyFile = text.parse().unwrap();
        assert_eq!(key.to_string(), text);
    }

    #[test]
    fn non_primitive_generator_is_a_parse_error() {
        let text = "circlelog-key v1\nrole: public\nn: 12\ng: 4\np: 16\nh: 3\n";
        match text.parse::<KeyFile>() {
            Err(Error::Parse { line, reason }) => {
                assert_eq!(line, 5);
                assert!(reason.contains("not primitive"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn private_key_with_wrong_h_is_inconsistent() {
        let text = format!("{PRIVATE_97}h: 64\n");
        assert!(matches!(
            text.parse::<KeyFile>(),
            Err(Error::Consistency(_))
        ));
        let text = format!("{PRIVATE_97}h: 65\n");
        assert!(text.parse::<KeyFile>().is_ok());
    }

    #[test]
    fn malformed_key_files() {
        let cases = [
            ("", 1),
            ("circlelog-key v2\n", 1),
            ("circlelog-key v1\nrole: secret\n", 2),
            ("circlelog-key v1\nrole: public\nn: -4\n", 3),
            ("circlelog-key v1\nrole: public\nn: 97\ng: 5\n", 5),
            (
                "circlelog-key v1\nrole: public\nn: 97\ng: 5\np: 16\nh: 97\n",
                6,
            ),
            (
                "circlelog-key v1\nrole: private\nn: 97\ng: 5\np: 16\nx: 0\n",
                6,
            ),
            (
                "circlelog-key v1\nrole: public\nn: 97\ng: 5\np: 16\nh: 1\nextra\n",
                7,
            ),
            ("circlelog-key v1\nrole: public\nn:97\n", 3),
        ];
        for (text, want_line) in cases {
            match text.parse::<KeyFile>() {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want_line, "{text:?}"),
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn ciphertext_and_signature_round_trip() {
        let text = "circlelog-ciphertext v1\nn: 12\ng: 1\np: 8\nc1: 7\nc2: 2\n";
        let ct: CiphertextFile = text.parse().unwrap();
        assert_eq!(ct.0.c2.exponent(), 2);
        assert_eq!(ct.to_string(), text);

        let text = "circlelog-signature v1\nR: 12\ns: 34\n";
        let sig: Signature = text.parse().unwrap();
        assert_eq!(sig, Signature { r: 12, s: 34 });
        assert_eq!(sig.to_string(), text);
        assert!("circlelog-signature v1\nR: 1\n"
            .parse::<Signature>()
            .is_err());
    }
}
