//! Exact information measures over finite distributions, in nats.
//!
//! Order `alpha = 1` always goes through the dedicated Shannon/KL code path;
//! the order-generic formulas are only evaluated for `alpha > 1`.

mod channel;
mod prior;

pub use channel::ChannelMatrix;
pub use prior::{validate_probabilities, Prior, SUM_TOLERANCE};

use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, xlogx};

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha >= 1.0) || alpha.is_nan() {
        return Err(Error::invalid(format!("order must be >= 1, got {alpha}")));
    }
    Ok(())
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// Shannon entropy `H(X)` of the prior.
pub fn entropy(p: &Prior) -> f64 {
    if p.is_symbolic_uniform() {
        return (p.m() as f64).ln();
    }
    shannon_entropy(&p.probs())
}

/// Rényi entropy of order `alpha >= 1`; the Shannon entropy at `alpha = 1`.
pub fn renyi_entropy(p: &Prior, alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    if p.is_symbolic_uniform() {
        return Ok((p.m() as f64).ln());
    }
    if alpha == 1.0 {
        return Ok(entropy(p));
    }
    if alpha.is_infinite() {
        return Ok(-p.p_star().ln());
    }
    let probs = p.probs();
    let log_moment = log_sum_exp(
        probs
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| alpha * x.ln())
            .collect::<Vec<_>>(),
    );
    Ok(log_moment / (1.0 - alpha))
}

/// Kullback-Leibler divergence `D(p || q)`; `+inf` if `p` is not absolutely continuous w.r.t. `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi / qi).ln();
    }
    Ok(total)
}

/// Rényi divergence `D_alpha(p || q)` for `alpha >= 1` (KL at `alpha = 1`).
pub fn renyi_divergence(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    if alpha == 1.0 {
        return kl_divergence(p, q);
    }
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    if alpha.is_infinite() {
        let mut worst = f64::NEG_INFINITY;
        for (&pi, &qi) in p.iter().zip(q) {
            if pi == 0.0 {
                continue;
            }
            if qi == 0.0 {
                return Ok(f64::INFINITY);
            }
            worst = worst.max((pi / qi).ln());
        }
        return Ok(worst.max(0.0));
    }
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        terms.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
    }
    Ok((log_sum_exp(terms) / (alpha - 1.0)).max(0.0))
}

/// `D_alpha(Bernoulli(t) || Bernoulli(s))` with `t` the mass on the first outcome.
pub fn bernoulli_renyi_divergence(t: f64, s: f64, alpha: f64) -> Result<f64> {
    renyi_divergence(&[t, 1.0 - t], &[s, 1.0 - s], alpha)
}

fn check_channel(p: &Prior, ch: &ChannelMatrix) -> Result<()> {
    if ch.rows() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: p.m(),
            got: ch.rows(),
        });
    }
    Ok(())
}

/// Mutual information `I(X; Y)` for `X ~ p` observed through `ch`.
pub fn mutual_information(p: &Prior, ch: &ChannelMatrix) -> Result<f64> {
    check_channel(p, ch)?;
    let probs = p.probs();
    let marginal = ch.output_marginal(&probs);
    let mut total = 0.0;
    for (x, &px) in probs.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (&w, &py) in ch.row(x).iter().zip(&marginal) {
            if w > 0.0 {
                inner += w * (w / py).ln();
            }
        }
        total += px * inner;
    }
    Ok(total)
}

/// Arimoto information of order `alpha >= 1`; equals [`mutual_information`] at `alpha = 1`.
///
/// Uses the closed form over the `alpha`-tilted input `P(X_a = x) ∝ P(X = x)^alpha`.
pub fn arimoto_information(p: &Prior, ch: &ChannelMatrix, alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    check_channel(p, ch)?;
    if alpha == 1.0 {
        return mutual_information(p, ch);
    }
    if alpha.is_infinite() {
        return Err(Error::invalid("Arimoto information needs a finite order"));
    }
    let probs = p.probs();
    let support: Vec<usize> = (0..probs.len()).filter(|&x| probs[x] > 0.0).collect();
    let log_norm = log_sum_exp(
        support
            .iter()
            .map(|&x| alpha * probs[x].ln())
            .collect::<Vec<_>>(),
    );
    let log_tilted: Vec<f64> = support
        .iter()
        .map(|&x| alpha * probs[x].ln() - log_norm)
        .collect();

    let mut outer = Vec::with_capacity(ch.cols());
    for y in 0..ch.cols() {
        let inner: Vec<f64> = support
            .iter()
            .zip(&log_tilted)
            .filter_map(|(&x, &lw)| {
                let w = ch.get(x, y);
                (w > 0.0).then(|| lw + alpha * w.ln())
            })
            .collect();
        if inner.is_empty() {
            continue;
        }
        outer.push(log_sum_exp(inner) / alpha);
    }
    Ok(alpha / (alpha - 1.0) * log_sum_exp(outer))
}
