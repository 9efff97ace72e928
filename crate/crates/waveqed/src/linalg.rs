//! Dense 3×3 complex linear algebra: eigenvalues and linear solves.

use crate::{Error, Result, C64};

pub type Mat3 = [[C64; 3]; 3];
pub type Vec3 = [C64; 3];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn matvec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [ZERO; 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn trace(m: &Mat3) -> C64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn max_entry(m: &Mat3) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Coefficients (c2, c1, c0) of det(λI − M) = λ³ + c2λ² + c1λ + c0.
pub fn char_poly(m: &Mat3) -> (C64, C64, C64) {
    let c2 = -trace(m);
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    (c2, minors, -det(m))
}

pub fn det(m: &Mat3) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn cubic(c2: C64, c1: C64, c0: C64, x: C64) -> (C64, C64) {
    let p = ((x + c2) * x + c1) * x + c0;
    let dp = (3.0 * x + 2.0 * c2) * x + c1;
    (p, dp)
}

/// Roots of λ³ + c2λ² + c1λ + c0 by Cardano's formula, each polished with a
/// Newton step when that lowers the residual.
pub fn cardano(c2: C64, c1: C64, c0: C64) -> [C64; 3] {
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let plus = -q / 2.0 + disc;
    let minus = -q / 2.0 - disc;
    let u3 = if plus.norm() >= minus.norm() { plus } else { minus };
    let omega = C64::new(-0.5, 3f64.sqrt() / 2.0);

    let mut roots = [ZERO; 3];
    if u3.norm() == 0.0 {
        roots = [-shift; 3];
    } else {
        let u = u3.cbrt();
        let mut w = C64::new(1.0, 0.0);
        for r in roots.iter_mut() {
            let uk = u * w;
            *r = uk - p / (3.0 * uk) - shift;
            w *= omega;
        }
    }
    for r in roots.iter_mut() {
        let (f, df) = cubic(c2, c1, c0, *r);
        if df.norm() > 0.0 {
            let cand = *r - f / df;
            if cubic(c2, c1, c0, cand).0.norm() < f.norm() {
                *r = cand;
            }
        }
    }
    roots
}

/// Unitary 2×2 rotation mapping (a, b) to (r, 0): rows (ā, b̄)/r and (−b, a)/r.
#[derive(Clone, Copy)]
struct Givens {
    a: C64,
    b: C64,
}

impl Givens {
    fn new(a: C64, b: C64) -> Self {
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r == 0.0 {
            Self { a: C64::new(1.0, 0.0), b: ZERO }
        } else {
            Self { a: a / r, b: b / r }
        }
    }

    fn rows(&self, m: &mut Mat3, i: usize, j: usize) {
        for k in 0..3 {
            let (x, y) = (m[i][k], m[j][k]);
            m[i][k] = self.a.conj() * x + self.b.conj() * y;
            m[j][k] = -self.b * x + self.a * y;
        }
    }

    fn cols_adjoint(&self, m: &mut Mat3, i: usize, j: usize) {
        for row in m.iter_mut() {
            let (x, y) = (row[i], row[j]);
            row[i] = x * self.a + y * self.b;
            row[j] = -x * self.b.conj() + y * self.a.conj();
        }
    }
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) / 2.0;
    let disc = (((a - d) / 2.0).powi(2) + b * c).sqrt();
    let big = if (half_tr + disc).norm() >= (half_tr - disc).norm() { half_tr + disc } else { half_tr - disc };
    let prod = a * d - b * c;
    let small = if big.norm() > 0.0 { prod / big } else { half_tr - disc };
    (big, small)
}

/// Eigenvalues by Hessenberg reduction and Wilkinson-shifted complex QR.
pub fn qr_eigenvalues(m: &Mat3) -> Result<[C64; 3]> {
    const MAX_SWEEPS: usize = 200;
    let mut h = *m;
    let g = Givens::new(h[1][0], h[2][0]);
    g.rows(&mut h, 1, 2);
    g.cols_adjoint(&mut h, 1, 2);
    h[2][0] = ZERO;

    let small = |h: &Mat3, i: usize| {
        h[i][i - 1].norm() <= f64::EPSILON * (h[i][i].norm() + h[i - 1][i - 1].norm()).max(f64::MIN_POSITIVE)
    };

    for sweep in 0..MAX_SWEEPS {
        if small(&h, 2) {
            let (x, y) = eig2(h[0][0], h[0][1], h[1][0], h[1][1]);
            return Ok([x, y, h[2][2]]);
        }
        if small(&h, 1) {
            let (x, y) = eig2(h[1][1], h[1][2], h[2][1], h[2][2]);
            return Ok([h[0][0], x, y]);
        }
        let (x, y) = eig2(h[1][1], h[1][2], h[2][1], h[2][2]);
        let mut mu = if (x - h[2][2]).norm() <= (y - h[2][2]).norm() { x } else { y };
        if sweep % 11 == 10 {
            mu += C64::new(h[2][1].norm(), h[1][0].norm());
        }
        for i in 0..3 {
            h[i][i] -= mu;
        }
        let g1 = Givens::new(h[0][0], h[1][0]);
        g1.rows(&mut h, 0, 1);
        let g2 = Givens::new(h[1][1], h[2][1]);
        g2.rows(&mut h, 1, 2);
        g1.cols_adjoint(&mut h, 0, 1);
        g2.cols_adjoint(&mut h, 1, 2);
        for i in 0..3 {
            h[i][i] += mu;
        }
        h[2][0] = ZERO;
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve3(a: &Mat3, b: &Vec3) -> Result<Vec3> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[piv][col].norm() == 0.0 {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let v = rhs[col];
            rhs[row] -= f * v;
        }
    }
    let mut x = [ZERO; 3];
    for i in (0..3).rev() {
        let mut s = rhs[i];
        for k in i + 1..3 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Ok(x)
}

fn norm1(m: &Mat3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| m[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number, computed from the explicit inverse.
pub fn cond1(a: &Mat3) -> f64 {
    let mut inv = [[ZERO; 3]; 3];
    for j in 0..3 {
        let mut e = [ZERO; 3];
        e[j] = C64::new(1.0, 0.0);
        match solve3(a, &e) {
            Ok(col) => {
                for i in 0..3 {
                    inv[i][j] = col[i];
                }
            }
            Err(_) => return f64::INFINITY,
        }
    }
    norm1(a) * norm1(&inv)
}
