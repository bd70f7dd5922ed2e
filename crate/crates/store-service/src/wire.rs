//! Length-prefixed JSON frames over a byte stream: a u32 big-endian length
//! followed by that many bytes of JSON. One request frame gets one response
//! frame.

use std::io::{Read, Write};
use std::net::TcpStream;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::ServiceError;
use crate::service::{Request, Response};

pub const MAX_FRAME: usize = 16 * 1024 * 1024;

pub fn encode_frame<T: Serialize>(value: &T) -> Result<Vec<u8>, ServiceError> {
    let body = serde_json::to_vec(value)?;
    if body.len() > MAX_FRAME {
        return Err(ServiceError::FrameTooLarge(body.len()));
    }
    let mut out = Vec::with_capacity(4 + body.len());
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(&body);
    Ok(out)
}

/// Splits a frame off the front of a buffer. `Ok(None)` means the buffer does
/// not yet hold a complete frame.
pub fn decode_frame(buf: &[u8]) -> Result<Option<(&[u8], usize)>, ServiceError> {
    if buf.len() < 4 {
        return Ok(None);
    }
    let len = u32::from_be_bytes([buf[0], buf[1], buf[2], buf[3]]) as usize;
    if len > MAX_FRAME {
        return Err(ServiceError::FrameTooLarge(len));
    }
    if buf.len() < 4 + len {
        return Ok(None);
    }
    Ok(Some((&buf[4..4 + len], 4 + len)))
}

pub fn write_frame<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<(), ServiceError> {
    let frame = encode_frame(value)?;
    w.write_all(&frame)?;
    w.flush()?;
    Ok(())
}

/// Reads one frame; `Ok(None)` on clean end of stream at a frame boundary.
pub fn read_frame<R: Read, T: DeserializeOwned>(r: &mut R) -> Result<Option<T>, ServiceError> {
    let mut len_buf = [0u8; 4];
    match r.read_exact(&mut len_buf) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let len = u32::from_be_bytes(len_buf) as usize;
    if len > MAX_FRAME {
        return Err(ServiceError::FrameTooLarge(len));
    }
    let mut body = vec![0u8; len];
    r.read_exact(&mut body)?;
    Ok(Some(serde_json::from_slice(&body)?))
}

/// One round trip against a running service.
pub fn call(addr: &str, req: &Request) -> Result<Response, ServiceError> {
    let mut stream = TcpStream::connect(addr)?;
    write_frame(&mut stream, req)?;
    read_frame(&mut stream)?
        .ok_or_else(|| ServiceError::Other("connection closed before response".to_string()))
}
