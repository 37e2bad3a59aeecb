use super::pmf::{FinitePmf, JointPmf, TriplePmf};
use crate::error::Result;

/// `x · ln(x / y)` with `0 · ln(0 / y) = 0`.
#[inline]
pub fn xlogy(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Shannon entropy in nats.
pub fn entropy(p: &FinitePmf) -> f64 {
    -p.probs().iter().filter(|&&q| q > 0.0).map(|&q| q * q.ln()).sum::<f64>()
}

/// `KL(p1 ‖ p2)`; `f64::INFINITY` when `p1` puts mass where `p2` has none.
pub fn kl_divergence(p1: &FinitePmf, p2: &FinitePmf) -> Result<f64> {
    p1.same_alphabet(p2)?;
    let mut total = 0.0;
    for (&a, &b) in p1.probs().iter().zip(p2.probs()) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += a * (a / b).ln();
        }
    }
    Ok(total.max(0.0))
}

/// `½ Σ |p1 − p2|`, which is also the largest probability gap over events.
pub fn total_variation(p1: &FinitePmf, p2: &FinitePmf) -> Result<f64> {
    p1.same_alphabet(p2)?;
    let l1: f64 = p1.probs().iter().zip(p2.probs()).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * l1).min(1.0))
}

/// `√(KL/2) − TV`. Pinsker's inequality says this is never negative.
pub fn pinsker_slack(p1: &FinitePmf, p2: &FinitePmf) -> Result<f64> {
    let kl = kl_divergence(p1, p2)?;
    if kl.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((0.5 * kl).sqrt() - total_variation(p1, p2)?)
}

/// `I(X;Y) = Σ P(x,y) ln(P(x,y) / (P(x) P(y)))`.
pub fn mutual_information(j: &JointPmf) -> f64 {
    let px = j.x_marginal_probs();
    let py = j.y_marginal_probs();
    let mut total = 0.0;
    for (i, &a) in px.iter().enumerate() {
        for (k, &b) in py.iter().enumerate() {
            let v = j.get(i, k);
            if v > 0.0 {
                total += v * (v / (a * b)).ln();
            }
        }
    }
    total.max(0.0)
}

/// `I(X;Y) = E_Y[KL(P_{X|Y} ‖ P_X)]`.
pub fn mutual_information_kl_form(j: &JointPmf) -> f64 {
    let px = j.x_marginal();
    let py = j.y_marginal_probs();
    py.iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(k, &w)| {
            let cond = j.x_given_y(k).expect("positive mass column");
            w * kl_divergence(&cond, &px).expect("shared alphabet")
        })
        .sum()
}

/// `I(X;Y|Z) = Σ P(x,y,z) ln(P(x,y,z) P(z) / (P(x,z) P(y,z)))`.
pub fn conditional_mutual_information(t: &TriplePmf) -> f64 {
    let (nx, ny, nz) = t.dims();
    let mut pz = vec![0.0; nz];
    let mut pxz = vec![0.0; nx * nz];
    let mut pyz = vec![0.0; ny * nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let v = t.get(x, y, z);
                pz[z] += v;
                pxz[x * nz + z] += v;
                pyz[y * nz + z] += v;
            }
        }
    }
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let v = t.get(x, y, z);
                if v > 0.0 {
                    total += v * (v * pz[z] / (pxz[x * nz + z] * pyz[y * nz + z])).ln();
                }
            }
        }
    }
    total.max(0.0)
}

/// `Σ_z P(z) · I(X;Y | Z = z)`.
pub fn conditional_mutual_information_by_slices(t: &TriplePmf) -> f64 {
    let pz = t.z_marginal();
    pz.probs()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(z, &w)| w * mutual_information(&t.xy_given_z(z).expect("positive mass slice")))
        .sum()
}
