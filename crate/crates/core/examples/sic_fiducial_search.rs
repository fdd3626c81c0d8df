//! Searches for a Weyl–Heisenberg SIC fiducial by minimizing the frame
//! potential `sum_{p != 0} |<psi|X^a Z^b|psi>|^4` on the unit sphere.
//!
//! Usage: `cargo run --example sic_fiducial_search -- <d> [seed]`; prints a
//! vector file to stdout.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use starquant::catalog::{clock, shift, sic_gram_residual, wh_sic_scheme};
use starquant::cli::files::VectorFile;
use starquant::matrix::{Matrix, ToleranceConfig, C64};
use starquant::random::random_state;

fn displacements(d: usize) -> Vec<Matrix> {
    let (x, z) = (shift(d), clock(d));
    let mut out = Vec::new();
    let mut xa = Matrix::identity(d);
    for a in 0..d {
        let mut zb = Matrix::identity(d);
        for b in 0..d {
            if a + b > 0 {
                out.push(&xa * &zb);
            }
            zb = &zb * &z;
        }
        xa = &xa * &x;
    }
    out
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [C64]) {
    let n = inner(v, v).re.sqrt();
    v.iter_mut().for_each(|z| *z /= n);
}

/// Potential and its Wirtinger gradient with respect to `psi^*`.
fn potential(ops: &[(Matrix, Matrix)], psi: &[C64]) -> (f64, Vec<C64>) {
    let mut f = 0.0;
    let mut grad = vec![C64::new(0.0, 0.0); psi.len()];
    for (dp, dp_adj) in ops {
        let dpsi = dp.apply(psi).unwrap();
        let c = inner(psi, &dpsi);
        let m = c.norm_sqr();
        f += m * m;
        let dadj_psi = dp_adj.apply(psi).unwrap();
        for i in 0..psi.len() {
            grad[i] += (c.conj() * dpsi[i] + c * dadj_psi[i]) * (2.0 * m);
        }
    }
    (f, grad)
}

/// Armijo descent while the potential still resolves a decrease, then
/// fixed-step iterations driven by the tangent gradient alone.
fn descend(ops: &[(Matrix, Matrix)], mut psi: Vec<C64>) -> Vec<C64> {
    let mut step = 0.1;
    let mut fixed = false;
    let (mut f, mut g) = potential(ops, &psi);
    for _ in 0..50_000 {
        let radial = inner(&psi, &g);
        let t: Vec<C64> = g.iter().zip(&psi).map(|(gi, pi)| gi - pi * radial).collect();
        if inner(&t, &t).re.sqrt() < 1e-15 {
            break;
        }
        let advance = |step: f64| {
            let mut trial: Vec<C64> = psi.iter().zip(&t).map(|(p, ti)| p - ti * step).collect();
            normalize(&mut trial);
            trial
        };
        if fixed {
            psi = advance(0.05);
            g = potential(ops, &psi).1;
            continue;
        }
        loop {
            let trial = advance(step);
            let (ft, gt) = potential(ops, &trial);
            if ft < f {
                psi = trial;
                f = ft;
                g = gt;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                fixed = true;
                break;
            }
        }
    }
    psi
}

/// Damped Gauss–Newton on the overlap equations
/// `|<psi|D_p|psi>|^2 = 1/(d+1)` together with `<psi|psi> = 1`.
fn polish(ops: &[(Matrix, Matrix)], mut psi: Vec<C64>) -> Vec<C64> {
    let d = psi.len();
    let target = 1.0 / (d as f64 + 1.0);
    for _ in 0..100 {
        let m = ops.len() + 1;
        let mut jac = DMatrix::<f64>::zeros(m, 2 * d);
        let mut r = DVector::<f64>::zeros(m);
        for (row, (dp, dp_adj)) in ops.iter().enumerate() {
            let dpsi = dp.apply(&psi).unwrap();
            let adj = dp_adj.apply(&psi).unwrap();
            let c = inner(&psi, &dpsi);
            r[row] = c.norm_sqr() - target;
            for i in 0..d {
                let dc_re = dpsi[i] + adj[i].conj();
                let dc_im = (adj[i].conj() - dpsi[i]) * C64::i();
                jac[(row, i)] = 2.0 * (c.conj() * dc_re).re;
                jac[(row, d + i)] = 2.0 * (c.conj() * dc_im).re;
            }
        }
        r[m - 1] = inner(&psi, &psi).re - 1.0;
        for i in 0..d {
            jac[(m - 1, i)] = 2.0 * psi[i].re;
            jac[(m - 1, d + i)] = 2.0 * psi[i].im;
        }
        if r.amax() < 1e-15 {
            break;
        }
        let lhs = jac.transpose() * &jac + DMatrix::<f64>::identity(2 * d, 2 * d) * 1e-12;
        let Some(delta) = lhs.lu().solve(&(-(jac.transpose() * r))) else {
            break;
        };
        for i in 0..d {
            psi[i] += C64::new(delta[i], delta[d + i]);
        }
    }
    normalize(&mut psi);
    psi
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let d: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let ops: Vec<(Matrix, Matrix)> = displacements(d)
        .into_iter()
        .map(|m| {
            let adj = m.adjoint();
            (m, adj)
        })
        .collect();
    let target = (d as f64 - 1.0) / (d as f64 + 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = ToleranceConfig::default();
    for attempt in 0..200 {
        let mut psi = polish(&ops, descend(&ops, random_state(d, &mut rng)));
        let f = potential(&ops, &psi).0;
        if (f - target).abs() > 1e-12 {
            eprintln!("restart {attempt}: potential exceeds bound by {:.3e}", f - target);
            continue;
        }
        let lead = psi.iter().position(|z| z.norm() > 1e-8).unwrap();
        let phase = psi[lead].conj() / psi[lead].norm();
        psi.iter_mut().for_each(|z| *z *= phase);
        psi[lead] = C64::new(psi[lead].norm(), 0.0);
        let Ok(s) = wh_sic_scheme(d, &psi, &tol) else {
            eprintln!("restart {attempt}: orbit misses the SIC tolerance");
            continue;
        };
        eprintln!(
            "found after {} restarts, Gram residual {:.3e}",
            attempt,
            sic_gram_residual(s.dequantizers(), d)
        );
        let file = VectorFile::new(Some(format!("wh-sic-fiducial-d{d}")), &psi);
        println!("{}", serde_json::to_string(&file).unwrap());
        return;
    }
    eprintln!("no fiducial found");
    std::process::exit(1);
}
