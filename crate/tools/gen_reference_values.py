#!/usr/bin/env python3
"""Generate high-precision reference values for the Rust test suite.

Uses mpmath at elevated precision to compute the constants that the tests
freeze as oracle values:

  * samples of the modified Bessel functions I0 and I1,
  * box and quarter-plane integrals of the I0 convolution kernel
    I0(2*sqrt(x*y)) * exp(-x-y) with various weights,
  * truncation tails of the scaled kernel I0(2*sqrt(x*y)/L),
  * the power-series value of the doubled-variable resolvent at a
    parameter point where the series is elementary,
  * the harmonic-balance coefficient of the scalar point-delay benchmark.

Run from the repository root:

    python3 tools/gen_reference_values.py

Output is JSON on stdout.  Values are copied by hand into the tests that
cite this script; re-running must reproduce them to the printed digits.
"""

import json

import mpmath as mp

mp.mp.dps = 24

QUAD_KW = {"maxdegree": 8}


def kernel(x, y):
    """I0(2*sqrt(x*y)) * exp(-x-y), the basic convolution kernel."""
    return mp.besseli(0, 2 * mp.sqrt(x * y)) * mp.exp(-x - y)


def b1(z):
    """Entire series sum_k z^k / (k! (k+1)!) = I1(2*sqrt(z)) / sqrt(z)."""
    if z == 0:
        return mp.mpf(1)
    return mp.besseli(1, 2 * mp.sqrt(z)) / mp.sqrt(z)


def box_weighted(R):
    """(1/R^2) * int_[0,R]^2 I0(2 sqrt(xy)) e^(-x-y) |x-y| dy dx."""
    def inner(x):
        return mp.quad(lambda y: kernel(x, y) * abs(x - y), [0, x, R], **QUAD_KW)
    return mp.quad(inner, [0, R / 2, R], **QUAD_KW) / R**2


def box_plain(R):
    """int_[0,R]^2 I0(2 sqrt(xy)) e^(-x-y) dy dx."""
    def inner(x):
        return mp.quad(lambda y: kernel(x, y), [0, x, R], **QUAD_KW)
    return mp.quad(inner, [0, R / 2, R], **QUAD_KW)


def box_deriv_weighted(R):
    """(1/R^2) * int_[0,R]^2 d/dy[I0(2 sqrt(xy))] e^(-x-y) |x-y| dy dx.

    d/dy I0(2 sqrt(xy)) = x * b1(x*y).
    """
    def inner(x):
        return mp.quad(
            lambda y: x * b1(x * y) * mp.exp(-x - y) * abs(x - y),
            [0, x, R], **QUAD_KW)
    return mp.quad(inner, [0, R / 2, R], **QUAD_KW) / R**2


def quarter_plane_weighted(lam, mu):
    """lam*mu * int_[0,inf)^2 |x-y| I0(2 sqrt(xy)) e^(-(1+lam)x-(1+mu)y) dy dx."""
    lam, mu = mp.mpf(lam), mp.mpf(mu)

    def inner(x):
        return mp.quad(
            lambda y: abs(x - y) * mp.besseli(0, 2 * mp.sqrt(x * y))
            * mp.exp(-(1 + lam) * x - (1 + mu) * y),
            [0, x, mp.inf], **QUAD_KW)
    return lam * mu * mp.quad(inner, [0, mp.inf], **QUAD_KW)


def identity_check(lam, mu, om):
    """int_[0,inf)^2 I0(2 sqrt(xy)) e^(-(1+lam*om)x-(1+mu*om)y) dy dx.

    Closed form: 1 / (om * (lam + mu + lam*mu*om)); used to validate the
    quadrature scheme itself.
    """
    lam, mu, om = mp.mpf(lam), mp.mpf(mu), mp.mpf(om)

    def inner(x):
        return mp.quad(
            lambda y: mp.besseli(0, 2 * mp.sqrt(x * y))
            * mp.exp(-(1 + lam * om) * x - (1 + mu * om) * y),
            [0, x, mp.inf], **QUAD_KW)
    val = mp.quad(inner, [0, mp.inf], **QUAD_KW)
    exact = 1 / (om * (lam + mu + lam * mu * om))
    return val, exact


def scaled_box(t, lam, mu, om):
    """int_[0,t]^2 I0(2 sqrt(xy)/L) e^(-((1+lam*om)x+(1+mu*om)y)/L) dy dx,

    with L = lam + mu + lam*mu*om.  The quarter-plane value is L/om, so the
    truncation tail is (lam*mu/L^3) * (L/om - box).
    """
    lam, mu, om = mp.mpf(lam), mp.mpf(mu), mp.mpf(om)
    L = lam + mu + lam * mu * om

    def inner(x):
        return mp.quad(
            lambda y: mp.besseli(0, 2 * mp.sqrt(x * y) / L)
            * mp.exp(-((1 + lam * om) * x + (1 + mu * om) * y) / L),
            [0, x, t], **QUAD_KW)
    box = mp.quad(inner, [0, t / 2, t], **QUAD_KW)
    tail = lam * mu / L**3 * (L / om - box)
    return box, tail


def series_resolvent(t, s, gamma, delta, terms=80):
    """F(t,s) = sum_{m,n} C(m+n,m) delta^m gamma^n t^m s^n / (m! n!).

    Power-series solution of
        F(t,s) - delta*int_0^t F - gamma*int_0^s F = 1
    (exponential rates zero); an elementary independent check of the
    Bessel-kernel resolvent formula.
    """
    t, s, gamma, delta = (mp.mpf(v) for v in (t, s, gamma, delta))
    total = mp.mpf(0)
    for m in range(terms):
        for n in range(terms):
            total += (mp.binomial(m + n, m) * delta**m * gamma**n
                      * t**m * s**n / (mp.factorial(m) * mp.factorial(n)))
    return total


def delay_balance():
    """c = (1/4) / (1 + i - e^(-i)/2): harmonic-balance coefficient of
    u'(t) = -u(t) + u(t-1)/2 + cos(t)/4, with ansatz u = Re(c e^(it))."""
    c = mp.mpf(1) / 4 / (1 + mp.mpc(0, 1) - mp.exp(-mp.mpc(0, 1)) / 2)
    return c


def fmt(x, digits=19):
    return mp.nstr(mp.mpf(x), digits, strip_zeros=False)


def main():
    out = {}

    out["bessel_i0_i1"] = []
    for x in ["0.1", "0.5", "1", "2", "5", "10", "15", "19.5", "20.5",
              "25", "30", "50", "100", "200", "700"]:
        xv = mp.mpf(x)
        out["bessel_i0_i1"].append({
            "x": x,
            "i0": fmt(mp.besseli(0, xv)),
            "i1": fmt(mp.besseli(1, xv)),
        })

    val, exact = identity_check("1", "1", "1")
    out["quadrature_selfcheck"] = {
        "computed": fmt(val), "exact": fmt(exact),
        "abs_err": fmt(abs(val - exact), 3),
    }

    out["box_weighted"] = {R: fmt(box_weighted(mp.mpf(R)))
                           for R in ["5", "10", "20", "40"]}
    out["box_plain"] = {R: fmt(box_plain(mp.mpf(R)))
                        for R in ["1", "5", "10", "20", "40"]}
    out["box_deriv_weighted"] = {R: fmt(box_deriv_weighted(mp.mpf(R)))
                                 for R in ["5", "10", "20", "40"]}
    out["quarter_plane_weighted"] = {
        lm: fmt(quarter_plane_weighted(lm, lm))
        for lm in ["0.5", "0.25", "0.125", "0.0625"]}

    out["scaled_box_tails"] = []
    for (lam, mu, om) in [("1", "1", "1"), ("0.5", "0.25", "2")]:
        for t in ["2", "5", "10", "20"]:
            box, tail = scaled_box(mp.mpf(t), lam, mu, om)
            out["scaled_box_tails"].append({
                "lambda": lam, "mu": mu, "omega": om, "t": t,
                "box": fmt(box), "tail": fmt(tail),
            })

    out["series_resolvent"] = {
        "F(1,1;g=1,d=1)": fmt(series_resolvent(1, 1, 1, 1)),
        "F(0.7,0.4;g=1,d=1)": fmt(series_resolvent("0.7", "0.4", 1, 1)),
        "F(1,1;g=0.6,d=1.3)": fmt(series_resolvent(1, 1, "0.6", "1.3")),
    }

    c = delay_balance()
    out["delay_balance"] = {"re": fmt(c.real), "im": fmt(c.imag),
                            "abs": fmt(abs(c))}

    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
