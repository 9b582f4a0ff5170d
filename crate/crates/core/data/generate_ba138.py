#!/usr/bin/env python3
"""Expand literature reduced matrix elements for 138Ba+ into the per-sublevel
Cartesian components stored in ba138.json.

Reduced elements (Edmonds convention):
  <5D3/2||E1_PNC||6S1/2> = 2.17e-11 i e a0      B. K. Sahoo et al., PRL 97, 023002 (2006)
  <5D3/2||e r^2 C^(2)||6S1/2> = 12.63 e a0^2     same reference
  <6P1/2||d||6S1/2> = 3.3251, <6P3/2||d||6S1/2> = 4.7017 e a0
                                                 Woods et al., PRA 81, 042508 (2010)
  <6P1/2||d||5D3/2> = 3.0413, <6P3/2||d||5D3/2> = 1.3412 e a0
                                                 Safronova / Sahoo all-order values
  tau(6P1/2) = 7.92 ns, tau(6P3/2) = 6.31 ns
  5D3/2 natural decay rate 0.012 s^-1 (lifetime ~80 s)
Level energies from the NIST ASD (cm^-1).

Run:  python3 generate_ba138.py > ba138.json
"""
import json
import math
from sympy import Rational as R
from sympy.physics.wigner import wigner_3j

J_S = R(1, 2)
J_D = R(3, 2)
E1_PNC_REDUCED = 2.17e-11  # multiplied by i
E2_REDUCED = 12.63


def tensor_me(j1, m1, k, q, j2, m2):
    """<j1 m1|T^k_q|j2 m2> / <j1||T^k||j2>."""
    return float((-1) ** (j1 - m1) * wigner_3j(j1, k, j2, -m1, q, m2))


def vector_cartesian(mp, m):
    t = {q: tensor_me(J_D, mp, 1, q, J_S, m) for q in (-1, 0, 1)}
    s = 1 / math.sqrt(2)
    return {
        "x": complex((t[-1] - t[1]) * s, 0.0),
        "y": complex(0.0, (t[-1] + t[1]) * s),
        "z": complex(t[0], 0.0),
    }


def rank2_cartesian(mp, m):
    t = {q: tensor_me(J_D, mp, 2, q, J_S, m) for q in (-2, -1, 0, 1, 2)}
    s6 = math.sqrt(6)
    s32 = math.sqrt(1.5)
    xz = (t[-1] - t[1]) / s6
    yz = 1j * (t[-1] + t[1]) / s6
    xy = -1j * (t[2] - t[-2]) / s6
    xx = (t[2] + t[-2]) / (2 * s32) - t[0] / 3
    yy = -(t[2] + t[-2]) / (2 * s32) - t[0] / 3
    zz = 2 * t[0] / 3
    return {
        "xx": complex(xx), "yy": complex(yy), "zz": complex(zz),
        "xy": complex(xy), "yx": complex(xy),
        "xz": complex(xz), "zx": complex(xz),
        "yz": complex(yz), "zy": complex(yz),
    }


def halves(j):
    n = int(2 * j)
    return [R(k, 2) for k in range(-n, n + 1, 2)]


def main():
    eps_pnc = []
    eps_quad = []
    for mp in halves(J_D):
        for m in halves(J_S):
            for comp, v in vector_cartesian(mp, m).items():
                # reduced element is purely imaginary: i * E1_PNC_REDUCED
                val = 1j * E1_PNC_REDUCED * v
                if abs(val) > 0:
                    eps_pnc.append({"d_m": float(mp), "s_m": float(m), "component": comp,
                                    "value": [val.real + 0.0, val.imag + 0.0]})
            for comp, v in rank2_cartesian(mp, m).items():
                # quadrupole Hamiltonian -(1/2) e x_i x_j dE_i/dx_j
                val = 0.5 * E2_REDUCED * v
                if abs(val) > 1e-15:
                    eps_quad.append({"d_m": float(mp), "s_m": float(m), "component": comp,
                                     "value": [val.real + 0.0, val.imag + 0.0]})
    doc = {
        "isotope": {"tag": "138Ba+", "nuclear_spin": 0.0},
        "units": {
            "levels": "cm^-1",
            "eps_pnc": "e a0",
            "eps_quad": "e a0^2",
            "dipoles_6p": "e a0",
            "linewidths": "s^-1",
            "d32_decay_hz": "s^-1",
        },
        "levels": {
            "6S1/2": 0.0,
            "5D3/2": 4873.852,
            "5D5/2": 5674.807,
            "6P1/2": 20261.561,
            "6P3/2": 21952.404,
        },
        "eps_pnc": eps_pnc,
        "eps_quad": eps_quad,
        "dipoles_6p": [
            {"upper": "6P1/2", "lower": "6S1/2", "reduced": 3.3251},
            {"upper": "6P3/2", "lower": "6S1/2", "reduced": 4.7017},
            {"upper": "6P1/2", "lower": "5D3/2", "reduced": 3.0413},
            {"upper": "6P3/2", "lower": "5D3/2", "reduced": 1.3412},
        ],
        "linewidths": {"6P1/2": 1.0 / 7.92e-9, "6P3/2": 1.0 / 6.31e-9},
        "d32_decay_hz": 0.012,
        "provenance": "E1_PNC and E2: Sahoo et al. PRL 97, 023002 (2006); 6S-6P dipoles: Woods et al. "
                      "PRA 81, 042508 (2010); 5D-6P dipoles: all-order theory; 6P lifetimes and level "
                      "energies: NIST ASD. Generated by data/generate_ba138.py.",
    }
    print(json.dumps(doc, indent=2))


if __name__ == "__main__":
    main()
