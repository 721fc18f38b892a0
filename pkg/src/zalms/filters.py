"""LMS-family update rules with optional zero-point attraction.

All eight algorithms share one per-sample update::

    e    = d - w.x
    s_i  = sgn_w(w_i)          (component-wise partial sign over the window (a, b])
    g    = mu * e
    f    = rho * |e|  if dynamic else rho
    w_i += [g x_i - f s_i] / (eps + x.x)   (normalized variants)
    w_i +=  g x_i - f s_i                  (otherwise)

LMS/NLMS skip the attractor, ZA uses the full window (0, inf], the
windowed variants use (a, b], and the dynamic variants weight the
attractor by |e(n)|. The window test reads the pre-update coefficient.

The per-sample kernel is compiled with numba; ``step`` and ``run`` both
call it, so a run is bit-identical to the same samples fed through
``step`` one at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import NumericOverflowError

__all__ = [
    "AlgorithmParams",
    "Lms",
    "Nlms",
    "ZaLms",
    "ZaNlms",
    "WzaLms",
    "DzaLms",
    "DwzaLms",
    "DwzaNlms",
    "ALGORITHMS",
    "FilterState",
    "StepOutput",
    "RunTrace",
    "partial_sign",
    "init_state",
    "step",
    "run",
    "operation_count",
]

DEFAULT_EPS = 1e-6


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

def _check_mu(mu):
    if not (mu > 0 and math.isfinite(mu)):
        raise ValueError(f"step size must be positive, got {mu}")


def _check_rho(rho):
    if not (rho >= 0 and math.isfinite(rho)):
        raise ValueError(f"attraction strength must be >= 0, got {rho}")


def _check_window(a, b):
    if not (a >= 0 and math.isfinite(a) and a < b):
        raise ValueError(f"window needs 0 <= a < b, got a={a}, b={b}")


def _check_eps(eps):
    if not (eps > 0 and math.isfinite(eps)):
        raise ValueError(f"regularization must be positive, got {eps}")


class AlgorithmParams:
    """Base of the algorithm parameter records.

    Subclasses are frozen dataclasses; ``kernel_args`` lowers any of them to
    the shared update (normalized, attract, dynamic, mu, rho, a, b, eps).
    """

    kind: str = ""
    label: str = ""

    def kernel_args(self) -> tuple:
        raise NotImplementedError

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Lms(AlgorithmParams):
    mu: float
    kind = "lms"
    label = "LMS"

    def __post_init__(self):
        _check_mu(self.mu)

    def kernel_args(self):
        return (False, False, False, self.mu, 0.0, 0.0, math.inf, 0.0)


@dataclass(frozen=True)
class Nlms(AlgorithmParams):
    mu: float
    eps: float = DEFAULT_EPS
    kind = "nlms"
    label = "NLMS"

    def __post_init__(self):
        _check_mu(self.mu)
        _check_eps(self.eps)

    def kernel_args(self):
        return (True, False, False, self.mu, 0.0, 0.0, math.inf, self.eps)


@dataclass(frozen=True)
class ZaLms(AlgorithmParams):
    mu: float
    rho: float
    kind = "za_lms"
    label = "ZA-LMS"

    def __post_init__(self):
        _check_mu(self.mu)
        _check_rho(self.rho)

    def kernel_args(self):
        return (False, True, False, self.mu, self.rho, 0.0, math.inf, 0.0)


@dataclass(frozen=True)
class ZaNlms(AlgorithmParams):
    mu: float
    rho: float
    eps: float = DEFAULT_EPS
    kind = "za_nlms"
    label = "ZA-NLMS"

    def __post_init__(self):
        _check_mu(self.mu)
        _check_rho(self.rho)
        _check_eps(self.eps)

    def kernel_args(self):
        return (True, True, False, self.mu, self.rho, 0.0, math.inf, self.eps)


@dataclass(frozen=True)
class WzaLms(AlgorithmParams):
    mu: float
    rho: float
    a: float
    b: float
    kind = "wza_lms"
    label = "WZA-LMS"

    def __post_init__(self):
        _check_mu(self.mu)
        _check_rho(self.rho)
        _check_window(self.a, self.b)

    def kernel_args(self):
        return (False, True, False, self.mu, self.rho, self.a, self.b, 0.0)


@dataclass(frozen=True)
class DzaLms(AlgorithmParams):
    """Dynamic ZA-LMS; always the full window a=0, b=inf."""

    mu: float
    rho: float
    kind = "dza_lms"
    label = "DZA-LMS"

    def __post_init__(self):
        _check_mu(self.mu)
        _check_rho(self.rho)

    def kernel_args(self):
        return (False, True, True, self.mu, self.rho, 0.0, math.inf, 0.0)


@dataclass(frozen=True)
class DwzaLms(AlgorithmParams):
    mu: float
    rho: float
    a: float
    b: float
    kind = "dwza_lms"
    label = "DWZA-LMS"

    def __post_init__(self):
        _check_mu(self.mu)
        _check_rho(self.rho)
        _check_window(self.a, self.b)

    def kernel_args(self):
        return (False, True, True, self.mu, self.rho, self.a, self.b, 0.0)


@dataclass(frozen=True)
class DwzaNlms(AlgorithmParams):
    mu: float
    rho: float
    a: float
    b: float
    eps: float = DEFAULT_EPS
    kind = "dwza_nlms"
    label = "DWZA-NLMS"

    def __post_init__(self):
        _check_mu(self.mu)
        _check_rho(self.rho)
        _check_window(self.a, self.b)
        _check_eps(self.eps)

    def kernel_args(self):
        return (True, True, True, self.mu, self.rho, self.a, self.b, self.eps)


ALGORITHMS = {cls.kind: cls for cls in
              (Lms, Nlms, ZaLms, ZaNlms, WzaLms, DzaLms, DwzaLms, DwzaNlms)}


# ---------------------------------------------------------------------------
# Window sign
# ---------------------------------------------------------------------------

def partial_sign(t, a: float = 0.0, b: float = math.inf):
    """sgn(t) where a < |t| <= b, else 0. Works on scalars and arrays."""
    if not a < b:
        raise ValueError(f"partial sign needs a < b, got a={a}, b={b}")
    t = np.asarray(t, dtype=float)
    mag = np.abs(t)
    out = np.where((mag > a) & (mag <= b), np.sign(t), 0.0).astype(int)
    return int(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

@dataclass
class FilterState:
    """Coefficients plus the input history x(n), ..., x(n-L+1).

    The history lives in a length-2L mirrored ring so the current
    regressor is always the contiguous slice ``buf[pos:pos + L]``.
    """

    w: np.ndarray
    buf: np.ndarray
    pos: int = 0
    n: int = 0
    poisoned: bool = False

    @property
    def L(self) -> int:
        return self.w.size

    @property
    def x(self) -> np.ndarray:
        """Current regressor, most recent sample first."""
        return self.buf[self.pos:self.pos + self.L].copy()

    def copy(self) -> "FilterState":
        return FilterState(self.w.copy(), self.buf.copy(), self.pos, self.n, self.poisoned)


@dataclass(frozen=True)
class StepOutput:
    error: float
    y: float
    attracted_count: int


def init_state(L: int, w0=None, history=None) -> FilterState:
    """Fresh state with zero (or ``w0``) coefficients.

    ``history`` optionally pre-loads past inputs x(n-1), x(n-2), ...
    (most recent first); otherwise the prehistory is zero.
    """
    if L < 1:
        raise ValueError(f"filter length must be >= 1, got {L}")
    if w0 is None:
        w = np.zeros(L)
    else:
        w = np.array(w0, dtype=float)
        if w.shape != (L,):
            raise ValueError(f"initial coefficients have shape {w.shape}, expected ({L},)")
    buf = np.zeros(2 * L)
    pos = 0
    if history is not None:
        hist = np.asarray(history, dtype=float)[: L - 1]
        # The next sample lands at slot L-1, leaving x(n-1-k) at slot L+k.
        buf[: hist.size] = hist
        buf[L: L + hist.size] = hist
    return FilterState(w, buf, pos)


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------

_OK, _BAD_INPUT, _BAD_COEF = 0, 1, 2


@numba.njit(cache=True)
def _update(w, buf, pos, xn, dn, normalized, attract, dynamic, mu, rho, a, b, eps):
    L = w.size
    if not (np.isfinite(xn) and np.isfinite(dn)):
        return pos, 0.0, 0.0, 0, _BAD_INPUT
    pos = pos - 1
    if pos < 0:
        pos = L - 1
    buf[pos] = xn
    buf[pos + L] = xn

    y = 0.0
    for i in range(L):
        y += w[i] * buf[pos + i]
    e = dn - y

    g = mu * e
    f = 0.0
    if attract:
        f = rho * abs(e) if dynamic else rho
    if normalized:
        energy = eps
        for i in range(L):
            energy += buf[pos + i] * buf[pos + i]
        g = g / energy
        f = f / energy

    count = 0
    status = _OK
    for i in range(L):
        wi = w[i]
        upd = wi + g * buf[pos + i]
        if attract:
            mag = abs(wi)
            if mag > a and mag <= b:
                count += 1
                if wi > 0.0:
                    upd -= f
                else:
                    upd += f
        if not np.isfinite(upd):
            status = _BAD_COEF
        w[i] = upd
    return pos, y, e, count, status


@numba.njit(cache=True)
def _run(w, buf, pos, x, d, h, normalized, attract, dynamic, mu, rho, a, b, eps,
         record_every, msd_out, err2_out, att_out):
    L = w.size
    acc_e2 = 0.0
    acc_att = 0.0
    k = 0
    for j in range(x.size):
        pos, y, e, count, status = _update(w, buf, pos, x[j], d[j], normalized,
                                           attract, dynamic, mu, rho, a, b, eps)
        if status != _OK:
            return pos, j, status
        acc_e2 += e * e
        acc_att += count
        if (j + 1) % record_every == 0:
            s = 0.0
            for i in range(L):
                dev = w[i] - h[i]
                s += dev * dev
            msd_out[k] = s
            err2_out[k] = acc_e2 / record_every
            att_out[k] = acc_att / record_every
            acc_e2 = 0.0
            acc_att = 0.0
            k += 1
    return pos, x.size, _OK


def _raise_poisoned(state: FilterState, status: int, where: str):
    state.poisoned = True
    what = "non-finite input or desired sample" if status == _BAD_INPUT else "non-finite coefficient"
    raise NumericOverflowError(f"{what} at iteration {where}; filter state poisoned")


def step(state: FilterState, params: AlgorithmParams, x_new: float, d: float) -> StepOutput:
    """Shift ``x_new`` into the regressor and apply one update in place."""
    if state.poisoned:
        raise NumericOverflowError("filter state is poisoned by an earlier overflow")
    pos, y, e, count, status = _update(state.w, state.buf, state.pos, float(x_new), float(d),
                                       *params.kernel_args())
    if status != _OK:
        _raise_poisoned(state, status, str(state.n))
    state.pos = pos
    state.n += 1
    return StepOutput(error=e, y=y, attracted_count=count)


@dataclass
class RunTrace:
    """Per-record outputs of ``run``.

    ``msd[k]`` is ||w - h||^2 after update ``iters[k]``; ``err2`` and
    ``attracted`` are block means of e^2(n) and of the attracted-tap
    count over the ``record_every`` updates ending there.
    """

    msd: np.ndarray
    err2: np.ndarray
    attracted: np.ndarray
    iters: np.ndarray
    w: np.ndarray = field(repr=False, default=None)


def run(state: FilterState, params: AlgorithmParams, x, d, h, record_every: int = 1) -> RunTrace:
    """Feed a whole realization through ``step`` and record learning data.

    ``h`` is the reference system (``SystemModel`` or tap vector) the
    misalignment is measured against. Raises ``NumericOverflowError`` on
    divergence; the state is then poisoned.
    """
    x = np.ascontiguousarray(x, dtype=float)
    d = np.ascontiguousarray(d, dtype=float)
    taps = np.ascontiguousarray(getattr(h, "taps", h), dtype=float)
    if x.shape != d.shape or x.ndim != 1:
        raise ValueError(f"input and desired lengths differ: {x.shape} vs {d.shape}")
    if taps.shape != state.w.shape:
        raise ValueError(f"reference system has {taps.size} taps, filter has {state.L}")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    if state.poisoned:
        raise NumericOverflowError("filter state is poisoned by an earlier overflow")

    n_rec = x.size // record_every
    msd_out = np.empty(n_rec)
    err2_out = np.empty(n_rec)
    att_out = np.empty(n_rec)
    start = state.n
    pos, done, status = _run(state.w, state.buf, state.pos, x, d, taps, *params.kernel_args(),
                             int(record_every), msd_out, err2_out, att_out)
    state.pos = pos
    state.n = start + done
    if status != _OK:
        _raise_poisoned(state, status, str(start + done))
    iters = start + record_every * np.arange(1, n_rec + 1)
    return RunTrace(msd_out, err2_out, att_out, iters, state.w.copy())


def operation_count(params: AlgorithmParams, L: int, attracted: float = 0.0) -> dict:
    """Per-iteration multiply and comparison counts of the update.

    Counts follow the complexity accounting for the LMS family: ``L``
    multiplies for the convolution w.x, ``L`` for the gradient term, and
    for the windowed dynamic attractor one extra multiply-add for each of
    the ``attracted`` taps inside the window plus two comparisons per tap.
    The single |e(n)| is shared by all taps.
    """
    normalized, attract, dynamic, _, _, a, b, _ = params.kernel_args()
    windowed = a > 0 or math.isfinite(b)
    conv = L
    if not attract:
        update = L
    elif dynamic and windowed:
        update = L + attracted
    else:
        update = 2 * L
    return {
        "convolution": conv,
        "update": update,
        "multiplies": conv + update,
        "comparisons": 2 * L if windowed else 0,
        "abs_error": 1 if dynamic else 0,
        "normalized": normalized,
    }
