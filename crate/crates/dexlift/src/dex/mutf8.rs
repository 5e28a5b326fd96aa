//! Modified UTF-8 as used by the dex string section: U+0000 is encoded as
//! `C0 80`, supplementary code points as two separately-encoded surrogate
//! halves, and four-byte sequences never appear. Undecodable input is an
//! error, never a replacement character.

/// Decodes `utf16_len` UTF-16 code units worth of modified UTF-8 starting at
/// `bytes`. Returns the string and the number of input bytes consumed
/// (excluding the trailing NUL, which is checked but not consumed here).
pub fn decode(bytes: &[u8], utf16_len: u32) -> Result<(String, usize), Mutf8Error> {
    let mut out = String::new();
    let mut pos = 0usize;
    let mut units = 0u32;
    let mut pending_high: Option<u16> = None;

    while units < utf16_len {
        let unit = read_unit(bytes, &mut pos)?;
        units += 1;
        match (pending_high.take(), unit) {
            (None, 0xD800..=0xDBFF) => pending_high = Some(unit),
            (None, 0xDC00..=0xDFFF) => return Err(Mutf8Error::LoneSurrogate(unit)),
            (None, u) => out.push(char::from_u32(u as u32).ok_or(Mutf8Error::LoneSurrogate(u))?),
            (Some(hi), 0xDC00..=0xDFFF) => {
                let cp = 0x10000 + (((hi as u32) - 0xD800) << 10) + (unit as u32 - 0xDC00);
                out.push(char::from_u32(cp).ok_or(Mutf8Error::LoneSurrogate(unit))?);
            }
            (Some(hi), _) => return Err(Mutf8Error::LoneSurrogate(hi)),
        }
    }
    if let Some(hi) = pending_high {
        return Err(Mutf8Error::LoneSurrogate(hi));
    }
    match bytes.get(pos) {
        Some(0) => Ok((out, pos)),
        Some(&b) => Err(Mutf8Error::MissingNul(b)),
        None => Err(Mutf8Error::Truncated),
    }
}

/// Encodes a string, appending the trailing NUL. Returns the UTF-16 length
/// that belongs in the `string_data_item` header.
pub fn encode(s: &str, out: &mut Vec<u8>) -> u32 {
    let mut units = 0u32;
    for u in s.encode_utf16() {
        units += 1;
        match u {
            0x0000 => out.extend_from_slice(&[0xC0, 0x80]),
            0x0001..=0x007F => out.push(u as u8),
            0x0080..=0x07FF => {
                out.push(0xC0 | (u >> 6) as u8);
                out.push(0x80 | (u & 0x3F) as u8);
            }
            _ => {
                out.push(0xE0 | (u >> 12) as u8);
                out.push(0x80 | ((u >> 6) & 0x3F) as u8);
                out.push(0x80 | (u & 0x3F) as u8);
            }
        }
    }
    out.push(0);
    units
}

fn read_unit(bytes: &[u8], pos: &mut usize) -> Result<u16, Mutf8Error> {
    let b0 = *bytes.get(*pos).ok_or(Mutf8Error::Truncated)?;
    *pos += 1;
    match b0 {
        0x00 => Err(Mutf8Error::BareNul),
        0x01..=0x7F => Ok(b0 as u16),
        0xC0..=0xDF => {
            let b1 = cont(bytes, pos)?;
            let u = (((b0 & 0x1F) as u16) << 6) | (b1 & 0x3F) as u16;
            // C0 80 is the sanctioned overlong encoding of U+0000; any other
            // value below 0x80 in two bytes is malformed.
            if u < 0x80 && !(b0 == 0xC0 && b1 == 0x80) {
                return Err(Mutf8Error::Overlong(b0, b1));
            }
            Ok(u)
        }
        0xE0..=0xEF => {
            let b1 = cont(bytes, pos)?;
            let b2 = cont(bytes, pos)?;
            let u = (((b0 & 0x0F) as u16) << 12) | (((b1 & 0x3F) as u16) << 6) | (b2 & 0x3F) as u16;
            if u < 0x800 {
                return Err(Mutf8Error::Overlong(b0, b1));
            }
            Ok(u)
        }
        _ => Err(Mutf8Error::BadByte(b0)),
    }
}

fn cont(bytes: &[u8], pos: &mut usize) -> Result<u8, Mutf8Error> {
    let b = *bytes.get(*pos).ok_or(Mutf8Error::Truncated)?;
    *pos += 1;
    if b & 0xC0 != 0x80 {
        return Err(Mutf8Error::BadByte(b));
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum Mutf8Error {
    #[error("string data ends inside a code unit")]
    Truncated,
    #[error("invalid byte 0x{0:02x} in string data")]
    BadByte(u8),
    #[error("bare NUL byte inside string data")]
    BareNul,
    #[error("overlong encoding starting 0x{0:02x} 0x{1:02x}")]
    Overlong(u8, u8),
    #[error("unpaired surrogate 0x{0:04x}")]
    LoneSurrogate(u16),
    #[error("expected NUL terminator, found 0x{0:02x}")]
    MissingNul(u8),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(s: &str) {
        let mut buf = Vec::new();
        let units = encode(s, &mut buf);
        let (back, consumed) = decode(&buf, units).unwrap();
        assert_eq!(back, s);
        assert_eq!(consumed + 1, buf.len());
    }

    #[test]
    fn ascii_and_bmp_roundtrip() {
        roundtrip("");
        roundtrip("LCoordinate;");
        roundtrip("héllo\u{20AC}");
        roundtrip("a\u{0000}b");
    }

    #[test]
    fn supplementary_uses_surrogate_pairs() {
        let mut buf = Vec::new();
        let units = encode("\u{1F600}", &mut buf);
        assert_eq!(units, 2);
        assert_eq!(buf.len(), 7); // two 3-byte halves + NUL
        assert_eq!(decode(&buf, units).unwrap().0, "\u{1F600}");
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(decode(&[0x00, 0x00], 1), Err(Mutf8Error::BareNul));
        assert_eq!(decode(&[0xF0, 0x90, 0x80, 0x80, 0x00], 2), Err(Mutf8Error::BadByte(0xF0)));
        assert_eq!(decode(&[0xC1, 0x81, 0x00], 1), Err(Mutf8Error::Overlong(0xC1, 0x81)));
        assert_eq!(decode(&[0x61], 1), Err(Mutf8Error::Truncated));
        assert_eq!(decode(&[0x61, 0x62], 1), Err(Mutf8Error::MissingNul(0x62)));
    }
}
