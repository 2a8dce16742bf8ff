//! Riccati–Bessel functions `ψ_n(x) = x j_n(x)` and `χ_n(x) = −x y_n(x)`.

/// `ψ_0..=ψ_n` by Miller's downward recurrence, normalised against the closed forms.
pub fn riccati_psi(x: f64, n: usize) -> Vec<f64> {
    let start = n.max(x.ceil() as usize) + 30 + (10.0 * x.max(1.0)).sqrt().ceil() as usize * 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for m in (1..=start).rev() {
        vals[m - 1] = (2 * m + 1) as f64 / x * vals[m] - vals[m + 1];
        if vals[m - 1].abs() > 1e250 {
            for v in &mut vals[m - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let (s, c) = x.sin_cos();
    let psi0 = s;
    let psi1 = s / x - c;
    // normalise against whichever closed form is further from a zero
    let scale = if psi0.abs() >= psi1.abs() {
        psi0 / vals[0]
    } else {
        psi1 / vals[1]
    };
    vals.truncate(n + 1);
    for v in &mut vals {
        *v *= scale;
    }
    vals
}

/// `χ_0..=χ_n` by upward recurrence (stable for the growing solution).
pub fn riccati_chi(x: f64, n: usize) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut vals = Vec::with_capacity(n + 1);
    vals.push(c);
    if n >= 1 {
        vals.push(c / x + s);
    }
    for m in 1..n {
        let next = (2 * m + 1) as f64 / x * vals[m] - vals[m - 1];
        vals.push(next);
    }
    vals
}

/// `f'_m = f_{m−1} − m f_m / x` for `m ≥ 1`; entry 0 is unused and set to 0.
pub fn riccati_derivative(f: &[f64], x: f64) -> Vec<f64> {
    let mut d = vec![0.0; f.len()];
    for m in 1..f.len() {
        d[m] = f[m - 1] - m as f64 * f[m] / x;
    }
    d
}
