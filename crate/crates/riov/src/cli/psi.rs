//! ψ sampling and turning-coordinate discovery for plots.

use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;

use crate::numeric::{int, to_decimal, Rational};
use crate::subproblem::{big_delta, solve_dz, InverseInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiRow {
    pub z: Rational,
    /// `None` where the sub-problem is infeasible.
    pub psi: Option<Rational>,
    pub is_turning: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PsiTable {
    pub rows: Vec<PsiRow>,
}

impl PsiTable {
    pub fn turning(&self) -> impl Iterator<Item = &Rational> {
        self.rows.iter().filter(|r| r.is_turning).map(|r| &r.z)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("z,z_exact,psi,psi_exact,is_turning,status\n");
        for r in &self.rows {
            let (psi, psi_exact, status) = match &r.psi {
                Some(p) => (to_decimal(p), p.to_string(), "feasible"),
                None => (String::new(), String::new(), "infeasible"),
            };
            let _ = writeln!(
                out,
                "{},{},{psi},{psi_exact},{},{status}",
                to_decimal(&r.z),
                r.z,
                u8::from(r.is_turning)
            );
        }
        out
    }
}

fn psi(inst: &InverseInstance, z: &Rational) -> Rational {
    solve_dz(inst, z).psi().unwrap_or_else(|| panic!("ψ({z}) requested outside the feasible range")).clone()
}

/// Left and right derivative of ψ at a feasible `z`. A point whose
/// denominator exceeds the kink bound cannot be a kink, so the sub-problem
/// duals give the derivative directly. Otherwise the nearest other kink is
/// at least `Δ` away and chords of width `Δ/2` are exact.
fn one_sided(inst: &InverseInstance, z: &Rational, pz: &Rational, want_left: bool, want_right: bool) -> (Rational, Rational) {
    if z.denom() > &inst.denominator_bound() {
        let d = solve_dz(inst, z).duals(inst).expect("feasible point");
        return (d.slope.clone(), d.slope);
    }
    let h = big_delta(inst) / int(2);
    let left = if want_left { (pz - psi(inst, &(z - &h))) / &h } else { Rational::zero() };
    let right = if want_right { (psi(inst, &(z + &h)) - pz) / &h } else { Rational::zero() };
    (left, right)
}

/// Kinks of ψ strictly inside `(lo, hi)`, both ends feasible, in
/// increasing order.
///
/// Supporting lines at the two ends meet at some `z`. If ψ reaches that
/// meeting point the segment holds exactly one kink, otherwise `z` splits
/// it into two smaller searches.
pub fn turning_coordinates(inst: &InverseInstance, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    if lo >= hi {
        return Vec::new();
    }
    let plo = psi(inst, lo);
    let phi = psi(inst, hi);
    let (_, s_lo) = one_sided(inst, lo, &plo, false, true);
    let (s_hi, _) = one_sided(inst, hi, &phi, true, false);
    let mut out = Vec::new();
    split(inst, (lo, &plo, &s_lo), (hi, &phi, &s_hi), &mut out);
    out.sort();
    out
}

type End<'a> = (&'a Rational, &'a Rational, &'a Rational);

fn split(inst: &InverseInstance, (a, pa, sa): End, (b, pb, sb): End, out: &mut Vec<Rational>) {
    if sa == sb {
        return;
    }
    let z = (pb - pa + sa * a - sb * b) / (sa - sb);
    debug_assert!(a < &z && &z < b, "supporting lines meet outside the segment");
    let line = pa + sa * (&z - a);
    let pz = psi(inst, &z);
    if pz == line {
        out.push(z);
        return;
    }
    let (zl, zr) = one_sided(inst, &z, &pz, true, true);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    rayon::join(
        || split(inst, (a, pa, sa), (&z, &pz, &zl), &mut left),
        || split(inst, (&z, &pz, &zr), (b, pb, sb), &mut right),
    );
    out.extend(left);
    out.extend(right);
}

/// ψ on `samples` evenly spaced points of `[lo, hi]` plus every turning
/// coordinate inside the feasible part of that range.
pub fn sample(
    inst: &InverseInstance,
    lo: &Rational,
    hi: &Rational,
    feasible: Option<(Rational, Rational)>,
    samples: usize,
) -> PsiTable {
    assert!(samples >= 2 && lo <= hi);
    let steps = int(samples as i64 - 1);
    let mut zs: Vec<Rational> = (0..samples).map(|i| lo + (hi - lo) * int(i as i64) / &steps).collect();
    let kinks = match feasible {
        Some((a, b)) => turning_coordinates(inst, &a, &b),
        None => Vec::new(),
    };
    zs.extend(kinks.iter().cloned());
    zs.sort();
    zs.dedup();
    let rows = zs
        .into_par_iter()
        .map(|z| {
            let psi = solve_dz(inst, &z).psi().cloned();
            let is_turning = kinks.binary_search(&z).is_ok();
            PsiRow { z, psi, is_turning }
        })
        .collect();
    PsiTable { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn single_kink_on_a_diamond() {
        let arcs = vec![(0, 1, int(1)), (1, 3, int(1)), (0, 2, int(2)), (2, 3, int(2))];
        let inst = InverseInstance::shortest_path(4, arcs, 0, 3, vec![0, 1], ints(&[1, 1, 1, 1]), int(3)).unwrap();
        let b = crate::inverse::break_points(&inst);
        let kinks = turning_coordinates(&inst, b.z_left.finite().unwrap(), b.z_right.finite().unwrap());
        assert!(!kinks.is_empty());
        for k in &kinks {
            assert!(k.denom() <= &inst.denominator_bound());
        }
        for w in kinks.windows(2) {
            assert!(&w[1] - &w[0] >= big_delta(&inst));
        }
    }

    #[test]
    fn csv_layout() {
        let t = PsiTable {
            rows: vec![
                PsiRow { z: ratio(-1, 3), psi: Some(ratio(7, 2)), is_turning: true },
                PsiRow { z: int(2), psi: None, is_turning: false },
            ],
        };
        assert_eq!(
            t.to_csv(),
            "z,z_exact,psi,psi_exact,is_turning,status\n-0.333333333333,-1/3,3.5,7/2,1,feasible\n2,2,,,0,infeasible\n"
        );
    }
}
