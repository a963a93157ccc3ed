// Licensed under the Apache-2.0 license

//! Scripted JTAG sessions.
//!
//! One command per line, `#` starts a comment:
//!
//! ```text
//! load 0x10000000 @image        # the image given alongside the script
//! load 0x10000000 @path/to.bin  # a file, relative to the script
//! load 0x10000000 deadbeef      # inline hex
//! write_reg 0x41300000 1
//! set_pc 0x8000
//! ```

use std::path::PathBuf;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadSource {
    Image,
    File(PathBuf),
    Bytes(Vec<u8>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JtagCommand {
    Load { addr: u64, data: LoadSource },
    WriteReg { addr: u64, value: u32 },
    SetPc(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct JtagError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_number(s: &str) -> Option<u64> {
    let s = s.replace('_', "");
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16).ok(),
        None => s.parse().ok(),
    }
}

pub fn parse_script(text: &str) -> Result<Vec<JtagCommand>, JtagError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| JtagError { line: i + 1, msg };
        let words: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| parse_number(s).ok_or_else(|| err(format!("bad number `{s}`")));
        let cmd = match words.as_slice() {
            ["load", addr, src] => {
                let data = match src.strip_prefix('@') {
                    Some("image") => LoadSource::Image,
                    Some(p) => LoadSource::File(PathBuf::from(p)),
                    None => LoadSource::Bytes(hex::decode(src).map_err(|e| err(format!("bad hex: {e}")))?),
                };
                JtagCommand::Load { addr: num(addr)?, data }
            }
            ["write_reg", addr, value] => {
                let v = num(value)?;
                let value = u32::try_from(v).map_err(|_| err(format!("value {v:#x} wider than 32 bits")))?;
                JtagCommand::WriteReg {
                    addr: num(addr)?,
                    value,
                }
            }
            ["set_pc", pc] => JtagCommand::SetPc(num(pc)?),
            _ => return Err(err(format!("unrecognized command `{line}`"))),
        };
        out.push(cmd);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        let s = "# preload\nload 0x1000_0000 @image\nload 16 0a0b # inline\nload 0x0 @fw.bin\n\nwrite_reg 0x41300000 1\nset_pc 0x8000\n";
        assert_eq!(
            parse_script(s).unwrap(),
            vec![
                JtagCommand::Load {
                    addr: 0x1000_0000,
                    data: LoadSource::Image
                },
                JtagCommand::Load {
                    addr: 16,
                    data: LoadSource::Bytes(vec![10, 11])
                },
                JtagCommand::Load {
                    addr: 0,
                    data: LoadSource::File("fw.bin".into())
                },
                JtagCommand::WriteReg {
                    addr: 0x4130_0000,
                    value: 1
                },
                JtagCommand::SetPc(0x8000),
            ]
        );
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_script("set_pc 1\njump 4\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_script("load 0x0 zz").is_err());
        assert!(parse_script("write_reg 0 0x1_0000_0000").is_err());
    }
}
