"""Reference values sigma(xi) for the riesz(1), m=2 convergence check.

Independent of the package's closed-form symbol: the PV Fourier integral is
cut to the annulus eps < |x| < R, the radial part done with the sine
integral, and the angular part with adaptive quadrature.  The odd density
removes the cosine part, so

    sigma_{eps,R}(xi) = -i c int_0^{2 pi} cos(t) [Si(R s) - Si(eps s)] dt,   s = xi . (cos t, sin t)

Writes fixtures/lemma1_oracle.json.
"""
import json
import warnings
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma, sici

C2 = gamma(1.5) / np.pi ** 1.5
XIS = [(1.0, 1.0), (2.0, 0.5), (0.3, 1.7)]
R, EPS = 1e7, 1e-9
REL = 0.05


def oracle(xi):
    xi = np.asarray(xi, float)
    phi = np.arctan2(xi[1], xi[0])
    # kinks of sign(s) sit at phi +- pi/2
    brk = sorted(((phi + np.pi / 2) % (2 * np.pi), (phi - np.pi / 2) % (2 * np.pi)))

    def f(t):
        s = xi[0] * np.cos(t) + xi[1] * np.sin(t)
        return np.cos(t) * (sici(R * s)[0] - sici(EPS * s)[0])

    edges = [0.0, *brk, 2 * np.pi]
    with warnings.catch_warnings():
        # quad's roundoff notice on the oscillatory Si(R s); checked against the closed form
        warnings.simplefilter("ignore")
        total = sum(quad(f, lo, hi, limit=2000, epsabs=1e-10)[0] for lo, hi in zip(edges[:-1], edges[1:]))
    return -1j * C2 * total


def main():
    rows = []
    for xi in XIS:
        s = oracle(xi)
        rows.append({"xi": list(xi), "sigma": [s.real, s.imag], "abs_sigma": abs(s),
                     "threshold": REL * abs(s)})
        print(xi, s, abs(s))
    out = Path(__file__).resolve().parents[1] / "fixtures" / "lemma1_oracle.json"
    out.write_text(json.dumps({"kernel": "riesz:j=1,m=2", "relative_threshold": REL,
                               "cutoffs": {"eps": EPS, "R": R}, "points": rows}, indent=2) + "\n")


if __name__ == "__main__":
    main()
