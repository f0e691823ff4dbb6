"""Independent high-precision recomputation of the frozen expected values.

Run with `python3 tests/oracles/scalar_oracle.py`. Values printed here are
copied verbatim into the C++ tests; nothing in this file is shared with the
library code path.
"""
from mpmath import mp, mpf, sqrt

mp.dps = 50

ALPHA, B1, B2, EPS = mpf("1e-3"), mpf("0.9"), mpf("0.999"), mpf("1e-8")


def adabelief_steps(theta, grads, alpha=ALPHA, b1=B1, b2=B2, eps=EPS):
    m = [mpf(0)] * len(theta)
    s = [mpf(0)] * len(theta)
    theta = [mpf(x) for x in theta]
    out = []
    for t, gfun in enumerate(grads, start=1):
        g = gfun(theta)
        upd = []
        for i in range(len(theta)):
            m[i] = b1 * m[i] + (1 - b1) * g[i]
            s[i] = b2 * s[i] + (1 - b2) * (g[i] - m[i]) ** 2 + eps
            mh = m[i] / (1 - b1 ** t)
            sh = s[i] / (1 - b2 ** t)
            upd.append(-alpha * mh / (sqrt(sh) + eps))
        theta = [theta[i] + upd[i] for i in range(len(theta))]
        out.append((list(theta), list(m), list(s), upd))
    return out


def adam_step_one(g):
    m = (1 - B1) * g
    v = (1 - B2) * g * g
    return -ALPHA * (m / (1 - B1)) / (sqrt(v / (1 - B2)) + EPS)


def sgn(x):
    return (x > 0) - (x < 0)


if __name__ == "__main__":
    one = adabelief_steps([0], [lambda th: [mpf(1)]])[0]
    print("adabelief one-step update  ", mp.nstr(one[3][0], 20))
    print("adabelief one-step s       ", mp.nstr(one[2][0], 20))
    print("adam one-step update       ", mp.nstr(adam_step_one(mpf(1)), 20))

    l1 = lambda th: [sgn(th[0]), sgn(th[1])]
    two = adabelief_steps([-10, mpf("0.1")], [l1, l1])
    for t, row in enumerate(two, start=1):
        print("l1_separable theta_%d" % t, [mp.nstr(x, 20) for x in row[0]])

    # Rosenbrock gradient at (0.5, 0.5), exact rational arithmetic.
    x, y = mpf("0.5"), mpf("0.5")
    print("rosenbrock grad", -2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x))

    # Fixed point of the alternating drive for the belief term:
    # m alternates between +-(1-b1)/(1+b1); (g-m)^2 -> (2 b1/(1+b1))^2.
    print("alternating s_y fixed point", mp.nstr((2 * B1 / (1 + B1)) ** 2 + EPS / (1 - B2), 20))
    print("eps floor eps/(1-b2)       ", mp.nstr(EPS / (1 - B2), 20))
