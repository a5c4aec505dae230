"""Band-limited functions on the plane with exact finite Fourier support.

Everything here is a trigonometric polynomial on a frequency lattice
``h * Z^2``, so sup norms admit certified (lower, upper) brackets via grid
sampling plus the Bernstein gradient bound, and dyadic decompositions are
exact coefficientwise operations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import quad

from .errors import DivergentTailError, GridTooCoarseError

_SQRT2_HALF = math.sqrt(2.0) / 2.0

DEFAULT_REFINEMENT = 256
MAX_REFINEMENT = 4096
BRACKET_REL_WIDTH = 1e-6


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly monotone between."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t >= 1.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    # theta(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}) = 1 / (1 + e^{1/t - 1/(1-t)})
    a = np.clip(1.0 / tm - 1.0 / (1.0 - tm), -745.0, 745.0)
    out[mid] = 1.0 / (1.0 + np.exp(a))
    return out


class CutoffWindow:
    """Dyadic cutoff pair (w, v).

    ``w`` is smooth, nonnegative, supported in [1/2, 2], and satisfies
    w(x) = 1 - w(x/2) on [1, 2], so that sum_n w(x / 2^n) = 1 for x > 0.
    ``v`` equals 1 on [-1, 1] and w(|x|) for |x| >= 1 (low-pass profile).
    """

    def __init__(self, w: Callable[[np.ndarray], np.ndarray] | None = None):
        self._w = w if w is not None else self._default_w

    @staticmethod
    def _default_w(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        rise = (x >= 0.5) & (x <= 1.0)
        fall = (x > 1.0) & (x <= 2.0)
        out[rise] = _smooth_step(2.0 * x[rise] - 1.0)
        out[fall] = 1.0 - _smooth_step(x[fall] - 1.0)
        return out

    def w(self, x):
        x = np.asarray(x, dtype=float)
        return self._w(x) if x.ndim else float(self._w(x[None])[0])

    def v(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        res = np.where(ax <= 1.0, 1.0, self._w(np.maximum(ax, 1.0)))
        return res if x.ndim else float(res)


DEFAULT_WINDOW = CutoffWindow()


@dataclass(frozen=True)
class ModulusOfContinuity:
    """Nondecreasing subadditive ``omega`` with omega(0) = 0.

    Kinds: ``power`` is omega(t) = t^alpha; ``capped_linear`` is
    omega(t) = min(t, d); ``custom`` wraps an arbitrary handle.
    """

    kind: str
    param: float = 0.0
    handle: Callable[[np.ndarray], np.ndarray] | None = None

    @classmethod
    def power(cls, alpha: float) -> "ModulusOfContinuity":
        if not 0.0 < alpha <= 1.0:
            raise ValueError("power modulus needs 0 < alpha <= 1")
        return cls("power", float(alpha))

    @classmethod
    def capped_linear(cls, d: float) -> "ModulusOfContinuity":
        if d <= 0.0:
            raise ValueError("cap must be positive")
        return cls("capped_linear", float(d))

    @classmethod
    def custom(cls, handle: Callable) -> "ModulusOfContinuity":
        return cls("custom", 0.0, handle)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            res = np.power(t, self.param)
        elif self.kind == "capped_linear":
            res = np.minimum(t, self.param)
        else:
            res = np.asarray(self.handle(t), dtype=float)
        return res if res.ndim else float(res)


def omega_star(omega: ModulusOfContinuity, x: float) -> float:
    """Transformed modulus x * integral_x^inf omega(t)/t^2 dt.

    Closed forms for the power and capped kinds; adaptive quadrature with a
    doubling cutoff for custom handles.  Raises ``DivergentTailError`` when
    the tail integral does not converge (e.g. omega(t) = t).
    """
    if x <= 0.0:
        raise ValueError("omega_star needs x > 0")
    if omega.kind == "power":
        alpha = omega.param
        if alpha >= 1.0:
            raise DivergentTailError("omega_star undefined: tail integral diverges")
        return x**alpha / (1.0 - alpha)
    if omega.kind == "capped_linear":
        d = omega.param
        if x >= d:
            return d
        return x * math.log(d / x) + x
    # custom: integrate to a doubling cutoff T, treat omega as constant
    # beyond T once omega(T)/T is negligible against the accumulated value
    core = 0.0
    lo = x
    hi = max(2.0 * x, 1.0)
    while hi < 1e150:
        part, _ = quad(lambda t: omega(t) / (t * t), lo, hi, epsabs=1e-10, limit=200)
        core += part
        tail = x * omega(hi) / hi
        value = x * core + tail
        if tail < 1e-12 * max(value, 1e-300):
            return value
        lo, hi = hi, 2.0 * hi
    raise DivergentTailError("omega_star undefined: cutoff criterion never met")


class TrigPolynomial:
    """f(x, y) = sum c_{jk} exp(i h (j x + k y)) with finitely many terms.

    Values are immutable after construction; zero amplitudes are dropped.
    The function is periodic with period 2*pi/h in each variable, and its
    Fourier support radius is ``support_radius`` = h * max |(j, k)|.
    """

    __slots__ = ("h", "coeffs", "support_radius")

    def __init__(self, h: float, coeffs: dict):
        if h <= 0.0:
            raise ValueError("lattice step h must be positive")
        clean: dict[tuple[int, int], complex] = {}
        for (j, k), c in coeffs.items():
            c = complex(c)
            if c != 0.0:
                clean[(int(j), int(k))] = c
        object.__setattr__(self, "h", float(h))
        object.__setattr__(self, "coeffs", clean)
        radius = max((math.hypot(j, k) for (j, k) in clean), default=0.0)
        object.__setattr__(self, "support_radius", float(h) * radius)

    def __setattr__(self, name, value):
        raise AttributeError("TrigPolynomial is immutable")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.h

    @classmethod
    def constant(cls, c: complex, h: float = 1.0) -> "TrigPolynomial":
        return cls(h, {(0, 0): c})

    def eval(self, x, y):
        """Evaluate on broadcastable real coordinate arrays."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for (j, k), c in self.coeffs.items():
            out += c * np.exp(1j * self.h * (j * x + k * y))
        return out if out.ndim else complex(out)

    def __call__(self, z):
        z = np.asarray(z)
        if np.iscomplexobj(z):
            return self.eval(z.real, z.imag)
        return self.eval(z[..., 0], z[..., 1]) if z.ndim else self.eval(z, 0.0)

    def grid_values(self, m: int) -> np.ndarray:
        """Values on the m x m uniform grid over one period (exact via FFT)."""
        c = np.zeros((m, m), dtype=complex)
        for (j, k), amp in self.coeffs.items():
            c[j % m, k % m] += amp
        return np.fft.ifft2(c) * (m * m)

    def _binary(self, other: "TrigPolynomial", sign: float) -> "TrigPolynomial":
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        if other.h != self.h:
            raise ValueError("frequency lattices differ")
        merged = dict(self.coeffs)
        for key, c in other.coeffs.items():
            merged[key] = merged.get(key, 0.0) + sign * c
        return TrigPolynomial(self.h, merged)

    def __add__(self, other):
        return self._binary(other, 1.0)

    def __sub__(self, other):
        return self._binary(other, -1.0)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return TrigPolynomial(self.h, {k: scalar * c for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def scaled_coeffs(self, factor_of_modulus: Callable[[np.ndarray], np.ndarray]) -> "TrigPolynomial":
        """Multiply each coefficient by a function of its frequency modulus."""
        if not self.coeffs:
            return TrigPolynomial(self.h, {})
        keys = list(self.coeffs)
        mods = np.array([self.h * math.hypot(j, k) for (j, k) in keys])
        factors = np.asarray(factor_of_modulus(mods), dtype=float)
        return TrigPolynomial(
            self.h,
            {key: self.coeffs[key] * float(fac) for key, fac in zip(keys, factors)},
        )

    def to_json(self) -> str:
        entries = [
            {"j": j, "k": k, "re": c.real, "im": c.imag}
            for (j, k), c in sorted(self.coeffs.items())
        ]
        return json.dumps({"h": self.h, "coeffs": entries})

    @classmethod
    def from_json(cls, text: str) -> "TrigPolynomial":
        data = json.loads(text)
        coeffs = {
            (e["j"], e["k"]): complex(e["re"], e["im"]) for e in data["coeffs"]
        }
        return cls(data["h"], coeffs)


class TrigSlice:
    """One-variable trig polynomial g(t) = sum c_m exp(i h m t).

    Used for the single-variable slices of a two-variable function; carries
    its own exponential-type bound and certified sup bracket.
    """

    __slots__ = ("h", "coeffs")

    def __init__(self, h: float, coeffs: dict):
        if h <= 0.0:
            raise ValueError("lattice step h must be positive")
        self.h = float(h)
        self.coeffs = {int(m): complex(c) for m, c in coeffs.items() if complex(c) != 0.0}

    @property
    def type_bound(self) -> float:
        return self.h * max((abs(m) for m in self.coeffs), default=0)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for m, c in self.coeffs.items():
            out += c * np.exp(1j * self.h * m * t)
        return out if out.ndim else complex(out)

    __call__ = eval

    def derivative(self) -> "TrigSlice":
        return TrigSlice(self.h, {m: 1j * self.h * m * c for m, c in self.coeffs.items()})

    def coeff_at(self, freq: float, tol: float = 1e-12) -> complex:
        """Amplitude at a given real frequency (0 if not on the support)."""
        total = 0.0 + 0.0j
        for m, c in self.coeffs.items():
            if abs(self.h * m - freq) <= tol * max(1.0, abs(freq)):
                total += c
        return total

    def sup_bracket(self, refinement: int = 4096) -> tuple[float, float]:
        """Certified (lower, upper) bracket of the sup norm over one period."""
        if not self.coeffs:
            return 0.0, 0.0
        m = int(refinement)
        sigma = self.type_bound
        delta = 2.0 * math.pi / self.h / m
        eps = sigma * delta / 2.0
        if eps >= 1.0:
            raise GridTooCoarseError(
                f"1-d grid spacing {delta:.3e} too coarse for type {sigma:.3e}"
            )
        c = np.zeros(m, dtype=complex)
        for mm, amp in self.coeffs.items():
            c[mm % m] += amp
        vals = np.abs(np.fft.ifft(c) * m)
        lower = float(vals.max())
        return lower, lower / (1.0 - eps)


def slice_x(f: TrigPolynomial, y0: float) -> TrigSlice:
    """The slice t -> f(t, y0)."""
    coeffs: dict[int, complex] = {}
    for (j, k), c in f.coeffs.items():
        coeffs[j] = coeffs.get(j, 0.0) + c * np.exp(1j * f.h * k * y0)
    return TrigSlice(f.h, coeffs)


def slice_y(f: TrigPolynomial, x0: float) -> TrigSlice:
    """The slice t -> f(x0, t)."""
    coeffs: dict[int, complex] = {}
    for (j, k), c in f.coeffs.items():
        coeffs[k] = coeffs.get(k, 0.0) + c * np.exp(1j * f.h * j * x0)
    return TrigSlice(f.h, coeffs)


def evaluate(f: TrigPolynomial, z) -> complex:
    """Pointwise evaluation; z is a complex number or an (x, y) pair."""
    return f(z)


def partial_derivative(f: TrigPolynomial, axis: str) -> TrigPolynomial:
    """Exact partial derivative along "x" or "y" (coefficientwise)."""
    if axis == "x":
        return TrigPolynomial(f.h, {(j, k): 1j * f.h * j * c for (j, k), c in f.coeffs.items()})
    if axis == "y":
        return TrigPolynomial(f.h, {(j, k): 1j * f.h * k * c for (j, k), c in f.coeffs.items()})
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


def lp_piece(f: TrigPolynomial, n: int, win: CutoffWindow = DEFAULT_WINDOW) -> TrigPolynomial:
    """Dyadic band piece: coefficients scaled by w(|xi| / 2^n)."""
    return f.scaled_coeffs(lambda mods: win.w(mods / 2.0**n))


def vp_smooth(f: TrigPolynomial, n: int, win: CutoffWindow = DEFAULT_WINDOW) -> TrigPolynomial:
    """Low-pass smoothing: coefficients scaled by v(|xi| / 2^n)."""
    return f.scaled_coeffs(lambda mods: win.v(mods / 2.0**n))


def piece_index_range(f: TrigPolynomial) -> range:
    """Dyadic indices n whose band can intersect the support of f."""
    mods = [f.h * math.hypot(j, k) for (j, k) in f.coeffs if (j, k) != (0, 0)]
    if not mods:
        return range(0)
    lo = math.floor(math.log2(min(mods))) - 1
    hi = math.ceil(math.log2(max(mods))) + 1
    return range(lo, hi + 1)


def lp_pieces(f: TrigPolynomial, win: CutoffWindow = DEFAULT_WINDOW) -> dict[int, TrigPolynomial]:
    """All nonzero dyadic pieces of f, keyed by the band index n."""
    pieces = {}
    for n in piece_index_range(f):
        piece = lp_piece(f, n, win)
        if piece.coeffs:
            pieces[n] = piece
    return pieces


def _bracket_at(f: TrigPolynomial, m: int) -> tuple[float, float, float]:
    sigma = f.support_radius
    delta = f.period / m
    eps = sigma * delta * _SQRT2_HALF
    if eps >= 1.0:
        raise GridTooCoarseError(
            f"grid spacing {delta:.3e} too coarse for support radius {sigma:.3e}"
        )
    lower = float(np.abs(f.grid_values(m)).max())
    return lower, lower / (1.0 - eps), eps


def sup_norm(f: TrigPolynomial, refinement: int | None = None) -> tuple[float, float]:
    """Certified bracket lower <= ||f||_inf <= upper.

    The lower bound is the grid maximum of |f| over one period; the upper
    bound divides by (1 - sigma * delta * sqrt(2)/2), valid by the Bernstein
    derivative bound for band-limited functions.  With ``refinement=None``
    the grid starts at 256 points per period and doubles until the bracket
    width drops below 1e-6 of the lower bound or the 4096-point cap.
    """
    if not f.coeffs:
        return 0.0, 0.0
    if refinement is not None:
        lower, upper, _ = _bracket_at(f, int(refinement))
        return lower, upper
    m = DEFAULT_REFINEMENT
    while True:
        try:
            lower, upper, _ = _bracket_at(f, m)
        except GridTooCoarseError:
            if m >= MAX_REFINEMENT:
                raise
            m *= 2
            continue
        if upper - lower < BRACKET_REL_WIDTH * lower or m >= MAX_REFINEMENT:
            return lower, upper
        m *= 2


def besov_b1inf1_norm(
    f: TrigPolynomial,
    win: CutoffWindow = DEFAULT_WINDOW,
    refinement: int | None = None,
) -> float:
    """Surrogate B^1_{inf,1} norm: sum_n 2^n * upper bracket of the n-th piece."""
    total = 0.0
    for n, piece in lp_pieces(f, win).items():
        total += 2.0**n * sup_norm(piece, refinement)[1]
    return total


def seminorm_estimate(
    f: TrigPolynomial,
    omega: ModulusOfContinuity,
    samples: int = 10000,
    seed: int = 0,
) -> float:
    """Lower estimate of sup |f(z1) - f(z2)| / omega(|z1 - z2|).

    Deterministic given the seed; the estimate is a running maximum over
    seeded random pairs plus all grid-adjacent pairs at refinement 64, so it
    is monotone in ``samples`` for a fixed seed.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    period = f.period
    best = 0.0
    # grid-adjacent pairs
    g = 64
    vals = f.eval(
        np.linspace(0.0, period, g, endpoint=False)[:, None],
        np.linspace(0.0, period, g, endpoint=False)[None, :],
    )
    step = period / g
    denom = omega(step)
    if denom > 0.0:
        dx = np.abs(np.diff(vals, axis=0)).max()
        dy = np.abs(np.diff(vals, axis=1)).max()
        best = max(best, float(max(dx, dy)) / denom)
    # seeded random pairs (prefix-stable draws)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, period, size=(samples, 4))
    v1 = f.eval(pts[:, 0], pts[:, 1])
    v2 = f.eval(pts[:, 2], pts[:, 3])
    dist = np.hypot(pts[:, 0] - pts[:, 2], pts[:, 1] - pts[:, 3])
    mask = dist > 0.0
    ratios = np.abs(v1[mask] - v2[mask]) / omega(dist[mask])
    if ratios.size:
        best = max(best, float(ratios.max()))
    return best


def jackson_check(
    f: TrigPolynomial,
    omega: ModulusOfContinuity,
    n_range: Iterable[int],
    win: CutoffWindow = DEFAULT_WINDOW,
    samples: int = 10000,
    seed: int = 0,
    refinement: int | None = None,
) -> list[tuple[int, float, float, float, float]]:
    """Empirical constants for the smoothing error ||f - f*V_n||_inf.

    Each row is (n, lhs, lhs_ratio, piece_norm, piece_ratio) where the
    ratios divide by omega(2^-n) times the seminorm estimate; they measure
    the constants in the Jackson-type bounds for V_n and W_n.
    """
    sem = seminorm_estimate(f, omega, samples, seed)
    rows = []
    for n in n_range:
        lhs = sup_norm(f - vp_smooth(f, n, win), refinement)[1]
        piece = sup_norm(lp_piece(f, n, win), refinement)[1]
        denom = omega(2.0**-n) * sem
        if denom <= 0.0:
            if max(lhs, piece) > 0.0:
                raise ValueError("seminorm estimate vanished; ratios undefined")
            rows.append((n, 0.0, 0.0, 0.0, 0.0))
        else:
            rows.append((n, lhs, lhs / denom, piece, piece / denom))
    return rows


def random_trig_polynomial(
    sigma: float,
    n_terms: int,
    seed: int,
    radius: int = 4,
    decay: float = 0.0,
    rng: np.random.Generator | None = None,
) -> TrigPolynomial:
    """Seeded random polynomial with support radius exactly <= sigma.

    Frequencies live on the lattice (sigma/radius) * Z^2 inside the disc of
    radius sigma; amplitudes are complex Gaussian, damped by
    (1 + |(j,k)|)^(-decay) to mimic smoother functions when decay > 0.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    h = sigma / radius
    lattice = [
        (j, k)
        for j in range(-radius, radius + 1)
        for k in range(-radius, radius + 1)
        if math.hypot(j, k) <= radius
    ]
    n_terms = min(n_terms, len(lattice))
    idx = rng.choice(len(lattice), size=n_terms, replace=False)
    coeffs = {}
    for i in idx:
        j, k = lattice[i]
        amp = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[(j, k)] = amp * (1.0 + math.hypot(j, k)) ** (-decay)
    return TrigPolynomial(h, coeffs)
