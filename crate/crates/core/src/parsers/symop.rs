use crate::error::{Error, Result};
use crate::model::Vec3;

/// A crystallographic symmetry operation in fractional coordinates:
/// f' = R·f + t.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryOp {
    pub rotation: [[i32; 3]; 3],
    /// Components reduced into [0, 1).
    pub translation: [f64; 3],
}

impl SymmetryOp {
    pub fn identity() -> Self {
        Self {
            rotation: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            translation: [0.0; 3],
        }
    }

    /// Parses a Jones-faithful triple such as `"-x, y+1/2, -z+1/2"` or `"x-y, x, z+0.5"`.
    pub fn parse(expr: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadSymmetryExpr {
            expr: expr.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = expr.trim().trim_matches(['\'', '"']).split(',').collect();
        if parts.len() != 3 {
            return Err(bad("expected three comma-separated components"));
        }
        let mut rotation = [[0i32; 3]; 3];
        let mut translation = [0.0; 3];
        for (row, part) in parts.iter().enumerate() {
            let (r, t) = parse_component(part).map_err(|r| bad(&r))?;
            rotation[row] = r;
            translation[row] = reduce(t);
        }
        if rotation.iter().flatten().any(|v| v.abs() > 1) {
            return Err(bad("rotation entries must be -1, 0 or 1"));
        }
        if det(&rotation).abs() != 1 {
            return Err(bad("rotation part is not invertible"));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    /// R·f + t, without wrapping.
    pub fn apply(&self, f: &Vec3) -> Vec3 {
        let mut out = Vec3::zeros();
        for r in 0..3 {
            out[r] = (0..3).map(|c| self.rotation[r][c] as f64 * f[c]).sum::<f64>()
                + self.translation[r];
        }
        out
    }

    pub fn apply_wrapped(&self, f: &Vec3) -> Vec3 {
        self.apply(f).map(reduce)
    }

    pub fn determinant(&self) -> i32 {
        det(&self.rotation)
    }
}

fn det(m: &[[i32; 3]; 3]) -> i32 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Reduces into [0, 1); values within 1e-12 of 1 become 0.
pub(crate) fn reduce(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 - 1e-12 {
        0.0
    } else {
        r
    }
}

fn parse_component(part: &str) -> std::result::Result<([i32; 3], f64), String> {
    let s: Vec<char> = part
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    if s.is_empty() {
        return Err("empty component".into());
    }
    let mut row = [0i32; 3];
    let mut constant = 0.0;
    let mut i = 0;
    while i < s.len() {
        let mut sign = 1.0;
        let mut saw_sign = false;
        while i < s.len() && (s[i] == '+' || s[i] == '-') {
            if s[i] == '-' {
                sign = -sign;
            }
            saw_sign = true;
            i += 1;
        }
        if i >= s.len() {
            return Err("dangling sign".into());
        }
        if i > 0 && !saw_sign {
            return Err(format!("missing operator before '{}'", s[i]));
        }
        match s[i] {
            'x' | 'y' | 'z' => {
                row[(s[i] as u8 - b'x') as usize] += sign as i32;
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < s.len() && (s[i].is_ascii_digit() || s[i] == '.') {
                    i += 1;
                }
                let num: String = s[start..i].iter().collect();
                let mut value: f64 = num.parse().map_err(|_| format!("bad number '{num}'"))?;
                if i < s.len() && s[i] == '/' {
                    i += 1;
                    let start = i;
                    while i < s.len() && (s[i].is_ascii_digit() || s[i] == '.') {
                        i += 1;
                    }
                    let den: String = s[start..i].iter().collect();
                    let den: f64 = den.parse().map_err(|_| format!("bad denominator '{den}'"))?;
                    if den == 0.0 {
                        return Err("zero denominator".into());
                    }
                    value /= den;
                }
                if i < s.len() && matches!(s[i], 'x' | 'y' | 'z') {
                    return Err("coefficients on x, y, z are not supported".into());
                }
                constant += sign * value;
            }
            c => return Err(format!("unknown token '{c}'")),
        }
    }
    Ok((row, constant))
}
