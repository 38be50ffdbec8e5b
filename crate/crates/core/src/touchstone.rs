//! Touchstone v1 reader/writer for up to 4 ports.
//!
//! Option line `# <unit> S <format> R <z_ref>` with units Hz/kHz/MHz/GHz and
//! formats RI, MA, DB. Comments start with `!`. Values are printed with the
//! shortest representation that parses back to the identical f64, so an
//! RI-format write/read cycle is value-exact.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsFormat {
    Ri,
    Ma,
    Db,
}

#[derive(Debug, Clone)]
pub struct TouchstoneData {
    pub z_ref: f64,
    pub format: TsFormat,
    pub n_ports: usize,
    /// (frequency in Hz, S-matrix) pairs in file order.
    pub points: Vec<(f64, CMatrix)>,
}

fn unit_scale(unit: &str) -> Option<f64> {
    match unit.to_ascii_lowercase().as_str() {
        "hz" => Some(1.0),
        "khz" => Some(1e3),
        "mhz" => Some(1e6),
        "ghz" => Some(1e9),
        _ => None,
    }
}

fn parse_format(s: &str) -> Option<TsFormat> {
    match s.to_ascii_uppercase().as_str() {
        "RI" => Some(TsFormat::Ri),
        "MA" => Some(TsFormat::Ma),
        "DB" => Some(TsFormat::Db),
        _ => None,
    }
}

fn ports_from_extension(path: &Path) -> Result<usize> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "s1p" => Ok(1),
        "s2p" => Ok(2),
        "s3p" => Ok(3),
        "s4p" => Ok(4),
        other => Err(Error::Touchstone {
            line: 0,
            msg: format!("cannot infer port count from extension '.{other}' (need .s1p...s4p)"),
        }),
    }
}

fn decode(format: TsFormat, a: f64, b: f64) -> Complex64 {
    match format {
        TsFormat::Ri => Complex64::new(a, b),
        TsFormat::Ma => Complex64::from_polar(a, b.to_radians()),
        TsFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
    }
}

fn encode(format: TsFormat, z: Complex64) -> (f64, f64) {
    match format {
        TsFormat::Ri => (z.re, z.im),
        TsFormat::Ma => (z.norm(), z.arg().to_degrees()),
        TsFormat::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
    }
}

pub fn read(path: &Path) -> Result<TouchstoneData> {
    let n_ports = ports_from_extension(path)?;
    let text = std::fs::read_to_string(path)?;
    parse(&text, n_ports)
}

pub fn parse(text: &str, n_ports: usize) -> Result<TouchstoneData> {
    let mut z_ref = 50.0;
    let mut format = TsFormat::Ma; // touchstone default
    let mut scale = 1e9; // default unit GHz
    let mut saw_option = false;
    // (value, line number) tokens after the option line
    let mut tokens: Vec<(f64, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('!') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if saw_option {
                // v1 ignores repeated option lines
                continue;
            }
            saw_option = true;
            let mut parts = rest.split_whitespace().peekable();
            while let Some(tok) = parts.next() {
                if let Some(s) = unit_scale(tok) {
                    scale = s;
                } else if tok.eq_ignore_ascii_case("s") {
                    // parameter type: only S supported
                } else if let Some(f) = parse_format(tok) {
                    format = f;
                } else if tok.eq_ignore_ascii_case("r") {
                    let v = parts.next().ok_or(Error::Touchstone {
                        line: line_no,
                        msg: "option line: R without a value".into(),
                    })?;
                    z_ref = v.parse().map_err(|_| Error::Touchstone {
                        line: line_no,
                        msg: format!("bad reference impedance '{v}'"),
                    })?;
                } else if tok.eq_ignore_ascii_case("y") || tok.eq_ignore_ascii_case("z")
                    || tok.eq_ignore_ascii_case("g") || tok.eq_ignore_ascii_case("h")
                {
                    return Err(Error::Touchstone {
                        line: line_no,
                        msg: format!("unsupported parameter type '{tok}' (only S)"),
                    });
                } else {
                    return Err(Error::Touchstone {
                        line: line_no,
                        msg: format!("unrecognized option token '{tok}'"),
                    });
                }
            }
            continue;
        }
        if !saw_option {
            return Err(Error::Touchstone {
                line: line_no,
                msg: "data before option line".into(),
            });
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Touchstone {
                line: line_no,
                msg: format!("bad number '{tok}'"),
            })?;
            tokens.push((v, line_no));
        }
    }
    if !saw_option {
        return Err(Error::Touchstone {
            line: 0,
            msg: "missing option line".into(),
        });
    }

    let per_point = 1 + 2 * n_ports * n_ports;
    if tokens.is_empty() || tokens.len() % per_point != 0 {
        let line = tokens.last().map(|t| t.1).unwrap_or(0);
        return Err(Error::Touchstone {
            line,
            msg: format!(
                "expected a multiple of {per_point} values for a {n_ports}-port, got {}",
                tokens.len()
            ),
        });
    }

    let mut points = Vec::new();
    for chunk in tokens.chunks(per_point) {
        let f = chunk[0].0 * scale;
        let mut s = CMatrix::zeros(n_ports, n_ports);
        for idx in 0..(n_ports * n_ports) {
            let a = chunk[1 + 2 * idx].0;
            let b = chunk[2 + 2 * idx].0;
            // v1 quirk: 2-port data is ordered S11 S21 S12 S22.
            let (i, j) = if n_ports == 2 {
                (idx % 2, idx / 2)
            } else {
                (idx / n_ports, idx % n_ports)
            };
            s[(i, j)] = decode(format, a, b);
        }
        points.push((f, s));
    }
    Ok(TouchstoneData {
        z_ref,
        format,
        n_ports,
        points,
    })
}

pub fn write(path: &Path, data: &TouchstoneData) -> Result<()> {
    std::fs::write(path, render(data))?;
    Ok(())
}

pub fn render(data: &TouchstoneData) -> String {
    let mut out = String::new();
    let fmt = match data.format {
        TsFormat::Ri => "RI",
        TsFormat::Ma => "MA",
        TsFormat::Db => "DB",
    };
    let _ = writeln!(out, "# Hz S {fmt} R {}", data.z_ref);
    let n = data.n_ports;
    for (f, s) in &data.points {
        if n == 2 {
            let mut line = format!("{f}");
            for idx in 0..4 {
                let (i, j) = (idx % 2, idx / 2);
                let (a, b) = encode(data.format, s[(i, j)]);
                let _ = write!(line, " {a} {b}");
            }
            let _ = writeln!(out, "{line}");
        } else {
            for i in 0..n {
                let mut line = if i == 0 {
                    format!("{f}")
                } else {
                    String::new()
                };
                for j in 0..n {
                    let (a, b) = encode(data.format, s[(i, j)]);
                    if line.is_empty() {
                        let _ = write!(line, "{a} {b}");
                    } else {
                        let _ = write!(line, " {a} {b}");
                    }
                }
                let _ = writeln!(out, "{line}");
            }
        }
    }
    out
}
