"""Memory-kernel time discretization and closed-form envelope calculators.

The time-fractional derivative of order ``alpha`` in (0, 1) is discretized
with the classical L1 scheme on a uniform grid: with weights
b_j = (j+1)^(1-alpha) - j^(1-alpha),

    D_n u = dt^(-alpha) / Gamma(2-alpha) * sum_j b_j (u_{n-j} - u_{n-j-1}).

The companion memory integral of order ``alpha`` is approximated by
product integration with piecewise-linear reconstruction, which makes the
pair (derivative, integral) consistent to O(dt^(2-alpha)) on smooth data.

The bound calculators at the bottom evaluate a priori envelopes for
solutions of scalar fractional differential inequalities.  They evaluate
their source formulas verbatim, including exponent combinations that look
suspicious, and stamp each curve with a formula identifier so downstream
reports can say which envelope produced which number.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    BlowupSignal,
    DataError,
    NonlinearSolveError,
    ParameterError,
    StateError,
)
from .special_functions import gamma_real, mittag_leffler, ml_neg_array

__all__ = [
    "CaputoHistory",
    "BoundCurve",
    "l1_weights",
    "caputo_l1",
    "caputo_l1_series",
    "rl_integral",
    "rl_integral_series",
    "solve_relaxation",
    "step_scalar_implicit",
    "integrate_scalar",
    "bound_gronwall",
    "bound_sublinear_damped",
    "bound_two_power",
    "bound_moser_recursion",
]


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"time order alpha must lie in (0, 1), got {alpha}")


@dataclass
class CaputoHistory:
    """Uniform-step sample history carrying its own order and step.

    Single-writer: append via :meth:`push`, never mutate ``samples``
    concurrently.
    """

    alpha: float
    dt: float
    samples: list = field(default_factory=list)

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not (self.dt > 0.0):
            raise ParameterError(f"dt must be positive, got {self.dt}")
        self.samples = [float(v) for v in self.samples]

    def push(self, value):
        self.samples.append(float(value))

    def __len__(self):
        return len(self.samples)


def l1_weights(alpha, n):
    """First ``n`` memory weights b_j = (j+1)^(1-alpha) - j^(1-alpha)."""
    _check_alpha(alpha)
    if n < 1:
        raise ParameterError(f"need n >= 1 weights, got {n}")
    j = np.arange(n + 1, dtype=float)
    pw = j ** (1.0 - alpha)
    return pw[1:] - pw[:-1]


def caputo_l1(history):
    """Discrete fractional derivative of the history at its last sample."""
    samples = np.asarray(history.samples, dtype=float)
    if samples.size < 2:
        raise StateError("caputo_l1 needs at least 2 samples")
    n = samples.size - 1
    b = l1_weights(history.alpha, n)
    diffs = samples[1:] - samples[:-1]
    # b_j pairs with the increment ending j steps before t_n
    acc = float(np.dot(b, diffs[::-1]))
    return acc * history.dt ** (-history.alpha) / gamma_real(2.0 - history.alpha)


def caputo_l1_series(alpha, dt, samples):
    """Discrete fractional derivative at every interior time level.

    Returns an array d[0..n-1] where d[i] approximates the derivative at
    t_{i+1}.  Uses FFT convolution, identical arithmetic ordering for all
    levels.
    """
    _check_alpha(alpha)
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise StateError("need at least 2 samples")
    n = samples.size - 1
    b = l1_weights(alpha, n)
    diffs = samples[1:] - samples[:-1]
    conv = fftconvolve(diffs, b)[:n]
    return conv * dt ** (-alpha) / gamma_real(2.0 - alpha)


def _rl_level_weights(alpha, dt, n):
    """Product-integration weights for the memory integral at level n.

    Returns (A, B) of length n: the integral of u over [0, t_n] against the
    kernel (t_n - s)^(alpha-1)/Gamma(alpha) with piecewise-linear u is
      sum_{j<n} A[n-j-1] * u_j + B[n-j-1] * (u_{j+1} - u_j).
    """
    d = np.arange(1, n + 1, dtype=float)
    a_pow = ((d - 1.0) * dt) ** alpha
    b_pow = (d * dt) ** alpha
    a_pow1 = ((d - 1.0) * dt) ** (alpha + 1.0)
    b_pow1 = (d * dt) ** (alpha + 1.0)
    base = (b_pow - a_pow) / alpha
    lin = d * base - (b_pow1 - a_pow1) / ((alpha + 1.0) * dt)
    g = gamma_real(alpha)
    return base / g, lin / g


def rl_integral(alpha, samples, dt):
    """Memory integral of order alpha of the sampled function at t_n."""
    _check_alpha(alpha)
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise StateError("need at least 2 samples")
    n = samples.size - 1
    A, B = _rl_level_weights(alpha, dt, n)
    u = samples[:-1]
    du = samples[1:] - samples[:-1]
    # A/B indexed by n-j, so pair them with reversed sample order
    return float(np.dot(A[::-1], u) + np.dot(B[::-1], du))


def rl_integral_series(alpha, samples, dt):
    """Memory integral at every time level t_1..t_n (t_0 gives 0)."""
    _check_alpha(alpha)
    samples = np.asarray(samples, dtype=float)
    n = samples.size - 1
    if n < 1:
        raise StateError("need at least 2 samples")
    A, B = _rl_level_weights(alpha, dt, n)
    u = samples[:-1]
    du = samples[1:] - samples[:-1]
    out_u = fftconvolve(u, A)[:n]
    out_du = fftconvolve(du, B)[:n]
    return out_u + out_du


def solve_relaxation(alpha, w, u0, t_grid):
    """Exact mild solution of D^alpha u = -w u, u(0) = u0, on t_grid."""
    if not (0.0 < alpha <= 1.0):
        raise ParameterError(f"order alpha must lie in (0, 1], got {alpha}")
    if w <= 0:
        raise ParameterError(f"relaxation rate w must be positive, got {w}")
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0):
        raise ParameterError("t_grid must be nonnegative")
    vals = u0 * ml_neg_array(alpha, 1.0, -w * t**alpha)
    return BoundCurve(times=t, values=vals, formula_id="relaxation_ml")


def step_scalar_implicit(alpha, dt, history, rhs):
    """Advance a scalar fractional ODE one step with the implicit L1 rule.

    ``history`` may be a CaputoHistory or a plain sequence of past values
    (at least the initial value).  Solves

        x = c + Gamma(2-alpha) dt^alpha * rhs(x)

    where c collects the memory of past increments.  Damped fixed-point
    iteration (tol 1e-12, at most 200 iterations, damping 0.5 once
    divergence is detected), with a bisection fallback when the iteration
    stalls without diverging.  Iterates escaping to infinity raise
    :class:`BlowupSignal`; a stalled solve with no sign change raises
    :class:`NonlinearSolveError`.
    """
    _check_alpha(alpha)
    samples = np.asarray(
        history.samples if isinstance(history, CaputoHistory) else history,
        dtype=float,
    )
    if samples.size < 1:
        raise StateError("history must contain at least the initial value")
    n = samples.size - 1
    un = samples[-1]
    if n >= 1:
        b = l1_weights(alpha, n + 1)
        diffs = samples[1:] - samples[:-1]
        # memory uses weights b_1..b_n against increments newest-first
        mem = float(np.dot(b[1:], diffs[::-1]))
    else:
        mem = 0.0
    c = un - mem
    r = gamma_real(2.0 - alpha) * dt**alpha

    def g(x):
        return x - c - r * rhs(x)

    x = un
    damping = 1.0
    prev_res = math.inf
    for _ in range(200):
        fx = rhs(x)
        if not math.isfinite(fx):
            raise BlowupSignal("rhs non-finite during implicit solve", last_value=x)
        x_new = (1.0 - damping) * x + damping * (c + r * fx)
        if not math.isfinite(x_new) or abs(x_new) > 1e12:
            raise BlowupSignal(
                "implicit iterates escaped to infinity", last_value=x
            )
        res = abs(x_new - x)
        if res > prev_res:
            damping = 0.5
        prev_res = res
        x = x_new
        if res <= 1e-12 * max(1.0, abs(x)):
            return x
    # fixed point did not converge: bracket a root of g and bisect
    lo, hi = None, None
    width = max(1.0, abs(c))
    g0 = g(c)
    for _ in range(64):
        gl = g(c - width)
        gh = g(c + width)
        if math.isfinite(gl) and gl * g0 <= 0:
            lo, hi = c - width, c
            break
        if math.isfinite(gh) and gh * g0 <= 0:
            lo, hi = c, c + width
            break
        width *= 2.0
        if width > 1e14:
            break
    if lo is None:
        raise NonlinearSolveError(
            "no root bracketed for the implicit step",
            diagnostics={"c": c, "r": r, "last_iterate": x, "residual": prev_res},
        )
    glo = g(lo)
    for _ in range(200):
        midp = 0.5 * (lo + hi)
        gm = g(midp)
        if gm == 0 or (hi - lo) < 1e-14 * max(1.0, abs(midp)):
            return midp
        if glo * gm <= 0:
            hi = midp
        else:
            lo, glo = midp, gm
    return 0.5 * (lo + hi)


def integrate_scalar(alpha, dt, n_steps, u0, rhs):
    """Drive :func:`step_scalar_implicit` for n_steps from u0.

    Returns the full sample array (length n_steps + 1).  A blow-up signal
    propagates to the caller with the partial history attached.
    """
    samples = [float(u0)]
    for k in range(n_steps):
        try:
            nxt = step_scalar_implicit(alpha, dt, samples, rhs)
        except BlowupSignal as sig:
            sig.time = k * dt
            raise
        samples.append(nxt)
    return np.array(samples)


# ---------------------------------------------------------------------------
# envelope calculators

@dataclass
class BoundCurve:
    """An upper-bound envelope sampled on a time grid."""

    times: np.ndarray
    values: np.ndarray
    formula_id: str

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise DataError("times and values must have matching shapes")
        if self.times.size >= 2 and np.any(np.diff(self.times) <= 0):
            raise DataError("times must be strictly increasing")

    def to_csv(self, path):
        from ._io import write_text_atomic

        lines = ["t,value,formula_id"]
        for t, v in zip(self.times, self.values):
            lines.append(f"{t!r},{v!r},{self.formula_id}")
        write_text_atomic(path, "\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "t,value,formula_id":
                raise DataError(f"unexpected envelope CSV header: {header}")
            ts, vs, fid = [], [], None
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                t, v, f = line.split(",")
                ts.append(float(t))
                vs.append(float(v))
                fid = f
        return cls(times=np.array(ts), values=np.array(vs), formula_id=fid or "")


def _ml_kernel_antiderivative(alpha, lam, tau):
    """G(tau) = integral_0^tau r^(alpha-1) E(alpha,alpha; lam r^alpha) dr.

    Closed form (E(alpha; lam tau^alpha) - 1)/lam for lam != 0, and
    tau^alpha/Gamma(alpha+1) for lam = 0.
    """
    tau = np.asarray(tau, dtype=float)
    if lam == 0.0:
        return tau**alpha / gamma_real(alpha + 1.0)
    arg = lam * tau**alpha
    if lam < 0:
        e = ml_neg_array(alpha, 1.0, arg)
    else:
        e = np.array([mittag_leffler(alpha, float(a)) for a in arg])
    return (e - 1.0) / lam


def bound_gronwall(alpha, c1, u0, f, t_grid):
    """Memory-integral comparison envelope u0 + c1 * I^alpha f.

    ``f`` is a callable sampled on t_grid; all samples must be >= 0.
    """
    if not (0.0 < alpha <= 1.0):
        raise ParameterError(f"order alpha must lie in (0, 1], got {alpha}")
    if c1 < 0:
        raise ParameterError(f"envelope coefficient c1 must be >= 0, got {c1}")
    t = np.asarray(t_grid, dtype=float)
    fs = np.array([float(f(tt)) for tt in t])
    if np.any(fs < 0):
        raise ParameterError("f must be nonnegative on the grid")
    vals = np.empty_like(t)
    vals[0] = u0
    g = gamma_real(alpha)
    for i in range(1, t.size):
        # product integration of (t_i - s)^(alpha-1) f(s) with linear f
        ts = t[: i + 1]
        tau_hi = t[i] - ts[:-1]
        tau_lo = t[i] - ts[1:]
        base = (tau_hi**alpha - tau_lo**alpha) / alpha
        fmid = 0.5 * (fs[:i] + fs[1 : i + 1])
        vals[i] = u0 + c1 * float(np.dot(base, fmid)) / g
    return BoundCurve(times=t, values=vals, formula_id="memory_gronwall")


def bound_sublinear_damped(alpha, a_tilde, beta, eps, y0, b, t_grid):
    """Envelope for D^alpha y <= -a_tilde y + (1/beta) b(t) y^(1-beta).

    Three-term formula: the initial value, a decaying term driven by the
    initial value, and a forced term convolving b^(1/beta) against the
    order-alpha relaxation kernel with rate

        lam = -a_tilde + (1-beta) / (beta eps^(1/(1-beta))).

    Kernel integrals are done in closed form on each subinterval; b^(1/beta)
    is taken at midpoints.
    """
    _check_alpha(alpha)
    if not (0.0 < beta < 1.0):
        raise ParameterError(f"exponent beta must lie in (0, 1), got {beta}")
    if a_tilde <= 0 or eps <= 0:
        raise ParameterError("a_tilde and eps must be positive")
    if y0 < 0:
        raise ParameterError(f"y0 must be nonnegative, got {y0}")
    t = np.asarray(t_grid, dtype=float)
    lam = -a_tilde + (1.0 - beta) / (beta * eps ** (1.0 / (1.0 - beta)))
    bs = np.array([float(b(tt)) for tt in t])
    if np.any(bs < 0):
        raise ParameterError("b must be nonnegative on the grid")
    gpow = bs ** (1.0 / beta)
    vals = np.empty_like(t)
    vals[0] = y0
    for i in range(1, t.size):
        ts = t[: i + 1]
        G = _ml_kernel_antiderivative(alpha, lam, t[i] - ts)
        # weights for subinterval [t_j, t_{j+1}]: G(t_i - t_j) - G(t_i - t_{j+1})
        w = G[:-1] - G[1:]
        gmid = 0.5 * (gpow[:i] + gpow[1 : i + 1])
        forced = float(np.dot(w, gmid))
        vals[i] = y0 + lam * y0 * float(G[0]) + eps ** (1.0 / beta) * forced
    return BoundCurve(times=t, values=vals, formula_id="sublinear_damped")


def bound_two_power(alpha, k_exp, m_exp, a_coef, beta_coef, c4, eps, y0, b_fun, T):
    """Closed-form horizon bound for the two-power fractional inequality

        D^alpha y + a_coef y^k_exp + beta_coef y <= b(t) y^m_exp + c4

    with 0 < k_exp < m_exp < 1.  Evaluated verbatim from its source,
    exponent oddities included:

        y(T) <= y0
          + [ (lam y0^(1-k) + (c4 - a_coef)(1-k)) T^alpha / (alpha Gamma(alpha)) ]^(1/(1-k))
          + (1-m)^(1/(1-k)) eps^(1/(1-m))
            * T^(alpha/(1-k)) / (alpha Gamma(alpha))^(1/(1-k)) * b(T)^(1/(1-m))

    with lam = -(m-k)/eps^((1-k)/(m-k)) - beta_coef (1-k).
    """
    _check_alpha(alpha)
    if not (0.0 < k_exp < m_exp < 1.0):
        raise ParameterError(
            f"need 0 < k_exp < m_exp < 1, got k={k_exp}, m={m_exp}"
        )
    if min(a_coef, beta_coef, c4, eps) <= 0:
        raise ParameterError("coefficients a_coef, beta_coef, c4, eps must be > 0")
    if y0 < 0:
        raise ParameterError(f"y0 must be nonnegative, got {y0}")
    if T < 0:
        raise ParameterError(f"horizon T must be nonnegative, got {T}")
    if T == 0.0:
        return float(y0)
    k, m = k_exp, m_exp
    lam = -(m - k) / eps ** ((1.0 - k) / (m - k)) - beta_coef * (1.0 - k)
    g = gamma_real(alpha)
    bracket = (lam * y0 ** (1.0 - k) + (c4 - a_coef) * (1.0 - k)) * T**alpha / (alpha * g)
    if bracket < 0:
        raise ParameterError(
            "middle bracket negative: the envelope is undefined for these "
            f"parameters (bracket = {bracket:.3e})"
        )
    middle = bracket ** (1.0 / (1.0 - k))
    bT = float(b_fun(T))
    if bT < 0:
        raise ParameterError("b_fun must be nonnegative")
    third = (
        (1.0 - m) ** (1.0 / (1.0 - k))
        * eps ** (1.0 / (1.0 - m))
        * T ** (alpha / (1.0 - k))
        / (alpha * g) ** (1.0 / (1.0 - k))
        * bT ** (1.0 / (1.0 - m))
    )
    return float(y0 + middle + third)


def bound_moser_recursion(alpha, a_bar, r, K, y0_sup, T, k_index):
    """Iteration-level bound of the recursive norm estimate.

    Evaluates, in the log domain,

        (2 a_bar)^((3^k-1)/2) * 3^(r (3^(k+1)/4 - k/2 - 3/4))
            * max(y0_sup, K)^(3^k) * T^alpha / (alpha Gamma(alpha)).

    Returns inf when the value overflows float64.
    """
    _check_alpha(alpha)
    if a_bar <= 1.0:
        raise ParameterError(f"a_bar must exceed 1, got {a_bar}")
    if r <= 0:
        raise ParameterError(f"r must be positive, got {r}")
    if K < 1.0:
        raise ParameterError(f"K must be at least 1, got {K}")
    if y0_sup < 0:
        raise ParameterError(f"y0_sup must be nonnegative, got {y0_sup}")
    if T <= 0:
        raise ParameterError(f"horizon T must be positive, got {T}")
    if k_index < 0 or int(k_index) != k_index:
        raise ParameterError(f"k_index must be a nonnegative integer, got {k_index}")
    k = int(k_index)
    p3 = 3.0**k
    log_val = (
        0.5 * (p3 - 1.0) * math.log(2.0 * a_bar)
        + r * (3.0 ** (k + 1) / 4.0 - k / 2.0 - 0.75) * math.log(3.0)
        + p3 * math.log(max(y0_sup, K))
        + alpha * math.log(T)
        - math.log(alpha)
        - math.lgamma(alpha)
    )
    if log_val > 709.0:
        return math.inf
    return math.exp(log_val)
