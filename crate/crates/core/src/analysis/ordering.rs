use std::cmp::Ordering;

use crate::linalg::C64;
use crate::qep::{EigenPair, PencilKind};

/// Relative distance under which `a` and `conj(b)` count as a conjugate pair.
pub const PAIR_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SortMode {
    /// Real pencils: conjugate pairs stay adjacent, negative imaginary first.
    PairConjugates,
    /// Complex pencils: no pairing.
    Plain,
}

impl From<PencilKind> for SortMode {
    fn from(kind: PencilKind) -> Self {
        match kind {
            PencilKind::Modal => SortMode::PairConjugates,
            PencilKind::CriticalSpeed => SortMode::Plain,
        }
    }
}

fn key_cmp(a: C64, b: C64) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
}

/// Orders `0..n` by modulus, then real part, then imaginary part, where
/// moduli and real parts closer than `PAIR_TOL` times the modulus count as
/// equal. Near-equal keys are snapped to the first key of their run, so
/// rounding noise between mathematically equal keys cannot decide the order
/// and the comparison stays a total order.
fn tolerant_order(n: usize, key: impl Fn(usize) -> (f64, f64, f64)) -> Vec<usize> {
    let keys: Vec<(f64, f64, f64)> = (0..n).map(&key).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| keys[a].0.total_cmp(&keys[b].0).then(a.cmp(&b)));
    let mut tier = vec![0.0; n];
    let mut anchor = f64::NAN;
    for &i in &idx {
        let r = keys[i].0;
        if !(r - anchor <= PAIR_TOL * anchor) {
            anchor = r;
        }
        tier[i] = anchor;
    }
    idx.sort_by(|&a, &b| {
        tier[a]
            .total_cmp(&tier[b])
            .then(keys[a].1.total_cmp(&keys[b].1))
            .then(a.cmp(&b))
    });
    let mut re_tier = vec![0.0; n];
    let mut run: Option<(f64, f64)> = None;
    for &i in &idx {
        let re = keys[i].1;
        run = match run {
            Some((t, a)) if t == tier[i] && re - a <= PAIR_TOL * t => Some((t, a)),
            _ => Some((tier[i], re)),
        };
        re_tier[i] = run.map_or(re, |r| r.1);
    }
    idx.sort_by(|&a, &b| {
        tier[a]
            .total_cmp(&tier[b])
            .then(re_tier[a].total_cmp(&re_tier[b]))
            .then(keys[a].2.total_cmp(&keys[b].2))
            .then(a.cmp(&b))
    });
    idx
}

/// Permutation putting `values` in canonical order: ascending modulus, ties by
/// ascending real part, then imaginary part. Keys within `PAIR_TOL` of each
/// other count as ties. The result depends only on the multiset of values.
pub fn canonical_order(values: &[C64], mode: SortMode) -> Vec<usize> {
    let n = values.len();
    let key = |i: usize| (values[i].norm(), values[i].re, values[i].im);
    if mode == SortMode::Plain {
        return tolerant_order(n, key);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| key_cmp(values[i], values[j]).then(i.cmp(&j)));

    let mut used = vec![false; n];
    let mut groups: Vec<(C64, Vec<usize>)> = Vec::with_capacity(n);
    for pos in 0..n {
        let i = idx[pos];
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = values[i];
        let scale = z.norm();
        let mut members = vec![i];
        if z.im.abs() > PAIR_TOL * scale {
            let target = z.conj();
            let partner = idx[pos + 1..]
                .iter()
                .copied()
                .filter(|&j| !used[j])
                .map(|j| (j, (values[j] - target).norm()))
                .filter(|&(_, d)| d <= PAIR_TOL * scale)
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            if let Some((j, _)) = partner {
                used[j] = true;
                members.push(j);
            }
        }
        members.sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im).then(a.cmp(&b)));
        // group key: the smaller-modulus member, already first in sorted order
        groups.push((z, members));
    }
    let order = tolerant_order(groups.len(), |g| {
        let z = groups[g].0;
        (z.norm(), z.re, values[groups[g].1[0]].im)
    });
    let mut slots: Vec<Option<Vec<usize>>> = groups.into_iter().map(|(_, m)| Some(m)).collect();
    order
        .into_iter()
        .flat_map(|g| slots[g].take().expect("permutation"))
        .collect()
}

pub fn canonical_sort_values(values: &[C64], mode: SortMode) -> Vec<C64> {
    canonical_order(values, mode)
        .into_iter()
        .map(|i| values[i])
        .collect()
}

/// Sorts eigenpairs canonically for the given pencil kind.
pub fn canonical_sort(pairs: Vec<EigenPair>, kind: PencilKind) -> Vec<EigenPair> {
    let values: Vec<C64> = pairs.iter().map(|p| p.s).collect();
    let order = canonical_order(&values, kind.into());
    let mut slots: Vec<Option<EigenPair>> = pairs.into_iter().map(Some).collect();
    order
        .into_iter()
        .map(|i| slots[i].take().expect("permutation"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn conjugate_pairs_negative_first() {
        let v = [
            c(-4.17, 392.98),
            c(-3.03, 279.08),
            c(-4.17, -392.98),
            c(-3.03, -279.08),
        ];
        let s = canonical_sort_values(&v, SortMode::PairConjugates);
        assert_eq!(
            s,
            vec![
                c(-3.03, -279.08),
                c(-3.03, 279.08),
                c(-4.17, -392.98),
                c(-4.17, 392.98)
            ]
        );
    }

    #[test]
    fn real_values_sort_by_modulus() {
        let v = [c(-3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(-0.5, 0.0)];
        let s = canonical_sort_values(&v, SortMode::PairConjugates);
        assert_eq!(
            s,
            vec![c(-0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(-3.0, 0.0)]
        );
    }

    #[test]
    fn slightly_perturbed_conjugates_stay_paired() {
        // the positive member has the smaller modulus by one rounding step
        let v = [
            c(-1.0, 10.0 + 1e-12),
            c(-1.0, -10.0 - 2e-12),
            c(-1.0 + 1e-13, 10.0),
        ];
        let s = canonical_sort_values(&v, SortMode::PairConjugates);
        assert!(s[0].im < 0.0 && s[1].im > 0.0);
    }

    #[test]
    fn plain_mode_ties_break_on_real_part() {
        let v = [c(325.21, 3.13), c(-325.21, 3.13)];
        let s = canonical_sort_values(&v, SortMode::Plain);
        assert_eq!(s[0].re, -325.21);
    }

    #[test]
    fn near_ties_break_on_real_part() {
        let v = [c(325.21, 3.13), c(-325.21 * (1.0 + 1e-12), 3.13)];
        let s = canonical_sort_values(&v, SortMode::Plain);
        assert!(s[0].re < 0.0);
    }
}
