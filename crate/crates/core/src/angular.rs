//! Angular-momentum coupling: Clebsch–Gordan coefficients (Condon–Shortley phase),
//! Wigner 3j symbols, and the spherical ↔ Cartesian bookkeeping used to turn
//! reduced matrix elements into sublevel couplings.

use num_complex::Complex64;

use crate::half::Half;

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (2..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// `(a)/2` as an integer when `a` is even and non-negative.
fn half_to_nat(twice: i32) -> Option<i32> {
    (twice >= 0 && twice % 2 == 0).then_some(twice / 2)
}

fn is_valid_projection(j: Half, m: Half) -> bool {
    j.twice() >= 0 && m.twice().abs() <= j.twice() && (j.twice() - m.twice()) % 2 == 0
}

pub fn triangle(j1: Half, j2: Half, j3: Half) -> bool {
    let (a, b, c) = (j1.twice(), j2.twice(), j3.twice());
    a >= 0
        && b >= 0
        && c >= 0
        && c <= a + b
        && c >= (a - b).abs()
        && (a + b + c) % 2 == 0
}

/// ⟨j1 m1; j2 m2 | J M⟩ by the Racah formula. Invalid quantum numbers give 0.
pub fn clebsch_gordan(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> f64 {
    if m1 + m2 != m
        || !triangle(j1, j2, j)
        || !is_valid_projection(j1, m1)
        || !is_valid_projection(j2, m2)
        || !is_valid_projection(j, m)
    {
        return 0.0;
    }
    let t = |x: Half| half_to_nat(x.twice()).expect("validated above");
    let (j1, m1, j2, m2, j, m) = (j1.twice(), m1.twice(), j2.twice(), m2.twice(), j.twice(), m.twice());
    let h = |x: i32| t(Half(x));

    let pre = (f64::from(j + 1)
        * factorial(h(j + j1 - j2))
        * factorial(h(j - j1 + j2))
        * factorial(h(j1 + j2 - j))
        / factorial(h(j1 + j2 + j) + 1))
        .sqrt();
    let norm = (factorial(h(j + m))
        * factorial(h(j - m))
        * factorial(h(j1 - m1))
        * factorial(h(j1 + m1))
        * factorial(h(j2 - m2))
        * factorial(h(j2 + m2)))
    .sqrt();

    let k_min = 0.max((j2 - j - m1) / 2).max((j1 + m2 - j) / 2);
    let k_max = h(j1 + j2 - j).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let d = [
            k,
            h(j1 + j2 - j) - k,
            h(j1 - m1) - k,
            h(j2 + m2) - k,
            (j - j2 + m1) / 2 + k,
            (j - j1 - m2) / 2 + k,
        ];
        if d.iter().any(|&x| x < 0) {
            continue;
        }
        let denom: f64 = d.iter().map(|&x| factorial(x)).product();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    pre * norm * sum
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner_3j(j1: Half, j2: Half, j3: Half, m1: Half, m2: Half, m3: Half) -> f64 {
    let phase_twice = j1.twice() - j2.twice() - m3.twice();
    if phase_twice % 2 != 0 {
        return 0.0;
    }
    let sign = if (phase_twice / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign / f64::from(j3.twice() + 1).sqrt() * clebsch_gordan(j1, m1, j2, m2, j3, -m3)
}

/// Wigner–Eckart angular factor ⟨j′ m′|T^k_q|j m⟩ / ⟨j′‖T^k‖j⟩ (Edmonds convention).
pub fn tensor_factor(jp: Half, mp: Half, k: Half, q: Half, j: Half, m: Half) -> f64 {
    let phase_twice = jp.twice() - mp.twice();
    let sign = if (phase_twice / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * wigner_3j(jp, k, j, -mp, q, m)
}

/// Spherical components (e₋₁, e₀, e₊₁) of a Cartesian complex vector.
pub fn spherical_components(v: [Complex64; 3]) -> [Complex64; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    [
        (v[0] - i * v[1]) * s,
        v[2],
        -(v[0] + i * v[1]) * s,
    ]
}

/// Angular factor for the Cartesian component `axis` (0=x, 1=y, 2=z) of a rank-1
/// operator between |j m⟩ and |j′ m′⟩.
pub fn vector_cartesian_factor(jp: Half, mp: Half, j: Half, m: Half, axis: usize) -> Complex64 {
    let t = |q: i32| tensor_factor(jp, mp, Half::from_int(1), Half::from_int(q), j, m);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match axis {
        0 => Complex64::new((t(-1) - t(1)) * s, 0.0),
        1 => Complex64::new(0.0, (t(-1) + t(1)) * s),
        2 => Complex64::new(t(0), 0.0),
        _ => panic!("axis out of range"),
    }
}

/// Angular factor for the Cartesian component `x_a x_b` of a rank-2 (traceless)
/// operator r²C⁽²⁾ between |j m⟩ and |j′ m′⟩.
pub fn rank2_cartesian_factor(
    jp: Half,
    mp: Half,
    j: Half,
    m: Half,
    a: usize,
    b: usize,
) -> Complex64 {
    let t = |q: i32| tensor_factor(jp, mp, Half::from_int(2), Half::from_int(q), j, m);
    let s6 = 6f64.sqrt();
    let s32 = 1.5f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    match (a.min(b), a.max(b)) {
        (0, 2) => re((t(-1) - t(1)) / s6),
        (1, 2) => i * (t(-1) + t(1)) / s6,
        (0, 1) => -i * (t(2) - t(-2)) / s6,
        (0, 0) => re((t(2) + t(-2)) / (2.0 * s32) - t(0) / 3.0),
        (1, 1) => re(-(t(2) + t(-2)) / (2.0 * s32) - t(0) / 3.0),
        (2, 2) => re(2.0 * t(0) / 3.0),
        _ => panic!("axis out of range"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn h(twice: i32) -> Half {
        Half(twice)
    }

    /// Independent construction of coupled states: start from the stretched state of each J
    /// (orthogonal to higher-J states, Condon–Shortley sign) and lower with J₋ = J₁₋ + J₂₋.
    fn ladder_oracle(j1: Half, j2: Half) -> BTreeMap<(i32, i32, i32, i32), f64> {
        type Vector = BTreeMap<(i32, i32), f64>;
        let lower = |j: i32, m: i32| (((j + m) * (j - m + 2)) as f64).sqrt() / 2.0;
        let apply_lowering = |v: &Vector| {
            let mut out = Vector::new();
            for (&(m1, m2), &c) in v {
                if m1 > -j1.twice() {
                    *out.entry((m1 - 2, m2)).or_insert(0.0) += c * lower(j1.twice(), m1);
                }
                if m2 > -j2.twice() {
                    *out.entry((m1, m2 - 2)).or_insert(0.0) += c * lower(j2.twice(), m2);
                }
            }
            out
        };
        let normalize = |v: &mut Vector| {
            let n = v.values().map(|x| x * x).sum::<f64>().sqrt();
            v.values_mut().for_each(|x| *x /= n);
        };

        let mut table = BTreeMap::new();
        let mut states: BTreeMap<(i32, i32), Vector> = BTreeMap::new();
        let jmax = j1.twice() + j2.twice();
        let jmin = (j1.twice() - j2.twice()).abs();
        for jj in (jmin..=jmax).rev().step_by(2) {
            // top state: M = J subspace, orthogonal to the M = J members of larger J
            let mut top = Vector::new();
            for m1 in (-j1.twice()..=j1.twice()).step_by(2) {
                let m2 = jj - m1;
                if m2.abs() <= j2.twice() {
                    top.insert((m1, m2), if m1 == j1.twice() { 1.0 } else { 0.37 + m1 as f64 * 0.11 });
                }
            }
            for ((big_j, big_m), other) in &states {
                if *big_m == jj && *big_j > jj {
                    let dot: f64 = top.iter().map(|(k, c)| c * other.get(k).unwrap_or(&0.0)).sum();
                    for (k, c) in other {
                        *top.entry(*k).or_insert(0.0) -= dot * c;
                    }
                }
            }
            normalize(&mut top);
            let lead = top.get(&(j1.twice(), jj - j1.twice())).copied().unwrap_or(0.0);
            if lead < 0.0 {
                top.values_mut().for_each(|x| *x = -*x);
            }
            let mut cur = top;
            let mut mm = jj;
            loop {
                states.insert((jj, mm), cur.clone());
                for (&(m1, m2), &c) in &cur {
                    table.insert((m1, m2, jj, mm), c);
                }
                if mm == -jj {
                    break;
                }
                cur = apply_lowering(&cur);
                normalize(&mut cur);
                mm -= 2;
            }
        }
        table
    }

    #[test]
    fn known_values() {
        let v = clebsch_gordan(h(1), h(1), h(1), h(-1), h(2), h(0));
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((clebsch_gordan(h(1), h(1), h(1), h(1), h(2), h(2)) - 1.0).abs() < 1e-15);
        assert_eq!(clebsch_gordan(h(1), h(1), h(1), h(1), h(2), h(0)), 0.0);
        // triangle violation
        assert_eq!(clebsch_gordan(h(1), h(1), h(1), h(-1), h(4), h(0)), 0.0);
        // singlet carries the Condon–Shortley sign
        let s = clebsch_gordan(h(1), h(-1), h(1), h(1), h(0), h(0));
        assert!((s + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn racah_matches_ladder_construction() {
        for j1 in 0..=4 {
            for j2 in 0..=4 {
                let table = ladder_oracle(h(j1), h(j2));
                for (&(m1, m2, jj, mm), &expected) in &table {
                    let got = clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(jj), h(mm));
                    assert!(
                        (got - expected).abs() < 1e-12,
                        "⟨{j1}/2 {m1}/2; {j2}/2 {m2}/2|{jj}/2 {mm}/2⟩: {got} vs {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn orthogonality_up_to_j3() {
        for j1 in 0i32..=6 {
            for j2 in 0..=6 {
                let jmin = (j1 - j2).abs();
                let jmax = j1 + j2;
                for ja in (jmin..=jmax).step_by(2) {
                    for jb in (jmin..=jmax).step_by(2) {
                        for ma in (-ja..=ja).step_by(2) {
                            for mb in (-jb..=jb).step_by(2) {
                                let mut sum = 0.0;
                                for m1 in (-j1..=j1).step_by(2) {
                                    for m2 in (-j2..=j2).step_by(2) {
                                        sum += clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(ja), h(ma))
                                            * clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(jb), h(mb));
                                    }
                                }
                                let expected = if ja == jb && ma == mb { 1.0 } else { 0.0 };
                                assert!((sum - expected).abs() < 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn three_j_symmetry() {
        // even permutation invariance
        let a = wigner_3j(h(3), h(2), h(1), h(1), h(-2), h(1));
        let b = wigner_3j(h(2), h(1), h(3), h(-2), h(1), h(1));
        assert!((a - b).abs() < 1e-15);
        // (1/2 1 3/2; -1/2 0 1/2)... known: (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
        let v = wigner_3j(h(1), h(1), h(2), h(1), h(-1), h(0));
        assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cartesian_factors_follow_selection_rules() {
        for mp in h(3).projections() {
            for m in h(1).projections() {
                let dm = (mp - m).twice() / 2;
                let z = vector_cartesian_factor(h(3), mp, h(1), m, 2);
                if dm != 0 {
                    assert_eq!(z.norm(), 0.0);
                }
                let x = vector_cartesian_factor(h(3), mp, h(1), m, 0);
                if dm.abs() != 1 {
                    assert_eq!(x.norm(), 0.0);
                }
                let xz = rank2_cartesian_factor(h(3), mp, h(1), m, 0, 2);
                if dm.abs() != 1 {
                    assert_eq!(xz.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn spherical_components_of_linear_x() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let e = spherical_components([one, zero, zero]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e[0] - s).norm() < 1e-15);
        assert!((e[2] + s).norm() < 1e-15);
        assert_eq!(e[1], zero);
    }
}
