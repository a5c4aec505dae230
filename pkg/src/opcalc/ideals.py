"""Singular-value functionals for quasinormed operator ideals.

Covers the Schatten scale S_p, the weak classes S_{p,inf}, Ky-Fan head sums
S_p^l, head-truncated and power-scaled ideals, dilation of spectra, Boyd
index estimation, and the averaging inequality that holds when the index is
below one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolationError


@dataclass(frozen=True)
class SingularSpectrum:
    """Finite nonincreasing sequence of nonnegative reals (zeros implied beyond)."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("spectrum must be a nonempty 1-d sequence")
        if vals.min() < 0.0:
            raise ValueError("singular values must be nonnegative")
        if np.any(np.diff(vals) > 1e-12 * max(vals.max(), 1.0)):
            raise ValueError("sequence must be nonincreasing")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length)
        out[: min(length, len(self))] = self.values[:length]
        return out

    def to_csv(self) -> str:
        return "\n".join(repr(float(v)) for v in self.values) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SingularSpectrum":
        vals = [float(line) for line in text.strip().splitlines() if line.strip()]
        return cls(np.array(vals))


@dataclass(frozen=True)
class IdealSpec:
    """Descriptor of a quasinormed ideal via its singular-value functional Psi.

    Variants: ``Sp`` (ell^p sum), ``SpWeak`` (weak ell^p sup), ``TruncHead``
    (apply the base functional to the first l+1 values only), ``PowerScale``
    (Psi_base(s^p)^(1/p), the finite-dimensional reading of |T|^p membership).
    """

    variant: str
    p: float = 0.0
    l: int = 0
    base: "IdealSpec | None" = None

    @classmethod
    def schatten(cls, p: float) -> "IdealSpec":
        if p <= 0.0:
            raise ValueError("p must be positive")
        return cls("Sp", p=float(p))

    @classmethod
    def weak(cls, p: float) -> "IdealSpec":
        if p <= 0.0:
            raise ValueError("p must be positive")
        return cls("SpWeak", p=float(p))

    @classmethod
    def trunc_head(cls, l: int, base: "IdealSpec") -> "IdealSpec":
        if l < 0:
            raise ValueError("l must be >= 0")
        return cls("TruncHead", l=int(l), base=base)

    @classmethod
    def power_scale(cls, p: float, base: "IdealSpec") -> "IdealSpec":
        if p <= 0.0:
            raise ValueError("p must be positive")
        return cls("PowerScale", p=float(p), base=base)

    def psi(self, values: np.ndarray) -> float:
        s = np.asarray(values, dtype=float)
        if self.variant == "Sp":
            return float(np.sum(s**self.p) ** (1.0 / self.p))
        if self.variant == "SpWeak":
            j = np.arange(1, s.size + 1, dtype=float)
            return float(np.max(j * s**self.p) ** (1.0 / self.p))
        if self.variant == "TruncHead":
            return self.base.psi(s[: self.l + 1])
        if self.variant == "PowerScale":
            return self.base.psi(s**self.p) ** (1.0 / self.p)
        raise ValueError(f"unknown variant {self.variant!r}")

    def to_json(self) -> str:
        def enc(spec):
            out = {"variant": spec.variant}
            if spec.variant in ("Sp", "SpWeak", "PowerScale"):
                out["p"] = spec.p
            if spec.variant == "TruncHead":
                out["l"] = spec.l
            if spec.base is not None:
                out["base"] = enc(spec.base)
            return out

        return json.dumps(enc(self))

    @classmethod
    def from_json(cls, text: str) -> "IdealSpec":
        def dec(obj):
            base = dec(obj["base"]) if "base" in obj else None
            return cls(
                obj["variant"],
                p=float(obj.get("p", 0.0)),
                l=int(obj.get("l", 0)),
                base=base,
            )

        return dec(json.loads(text))


def singular_values(t: np.ndarray) -> SingularSpectrum:
    """Singular values of a matrix, sorted nonincreasing."""
    t = np.asarray(t, dtype=complex)
    return SingularSpectrum(np.linalg.svd(t, compute_uv=False))


def sigma_averages(s: SingularSpectrum) -> np.ndarray:
    """Cesaro averages sigma_n = (s_0 + ... + s_n) / (n + 1)."""
    vals = s.values
    return np.cumsum(vals) / np.arange(1, vals.size + 1)


def psi_norm(spec: IdealSpec, s: SingularSpectrum) -> float:
    """Evaluate the ideal functional on a spectrum."""
    return spec.psi(s.values)


def dilate_spectrum(s: SingularSpectrum, d: int) -> SingularSpectrum:
    """Each singular value repeated d times (spectrum of a d-fold direct sum)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return SingularSpectrum(np.repeat(s.values, d))


def schatten_norm(t: np.ndarray, p: float) -> float:
    """||T||_{S_p}; p = inf gives the operator norm."""
    s = singular_values(t).values
    if math.isinf(p):
        return float(s[0]) if s.size else 0.0
    return float(np.sum(s**p) ** (1.0 / p))


def kyfan_p_norm(t: np.ndarray, p: float, l: int) -> float:
    """Head sum norm (sum_{j<=l} s_j^p)^{1/p}."""
    s = singular_values(t).values
    return float(np.sum(s[: l + 1] ** p) ** (1.0 / p))


def default_test_family(length: int = 512) -> list[SingularSpectrum]:
    """Closed test family for dilation/Boyd estimates.

    Geometric tails, power-law tails, and finite-support indicators; the
    supremum of dilation ratios over this family is a certified lower bound
    on the dilation transformer quasinorm.
    """
    j = np.arange(length, dtype=float)
    family = []
    for r in (0.99, 0.9, 0.5):
        family.append(SingularSpectrum(r**j))
    for gamma in (0.25, 0.5, 0.75, 1.0, 1.5, 2.0):
        family.append(SingularSpectrum((1.0 + j) ** (-gamma)))
    for k in (1, 4, 16, 64, 256):
        vals = np.zeros(length)
        vals[:k] = 1.0
        family.append(SingularSpectrum(vals))
    return family


def _analytic_beta(spec: IdealSpec, d: int) -> float | None:
    if spec.variant in ("Sp", "SpWeak"):
        return d ** (1.0 / spec.p)
    if spec.variant == "PowerScale":
        base = _analytic_beta(spec.base, d)
        return None if base is None else base ** (1.0 / spec.p)
    return None


def beta_d_estimate(
    spec: IdealSpec,
    d: int,
    families: list[SingularSpectrum] | None = None,
) -> tuple[float, float | None]:
    """Lower bound on the d-fold dilation quasinorm, with analytic value if known.

    Returns (estimate, analytic); the estimate is the supremum of
    Psi(dilate(s, d)) / Psi(s) over the test family, hence a certified lower
    bound.  For Sp/SpWeak (and their power scalings) the exact value d^(1/p)
    is returned alongside.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if families is None:
        families = default_test_family()
    best = 0.0
    for s in families:
        denom = psi_norm(spec, s)
        if denom <= 0.0:
            continue
        best = max(best, psi_norm(spec, dilate_spectrum(s, d)) / denom)
    return best, _analytic_beta(spec, d)


def _analytic_boyd(spec: IdealSpec) -> float | None:
    if spec.variant in ("Sp", "SpWeak"):
        return 1.0 / spec.p
    if spec.variant == "PowerScale":
        base = _analytic_boyd(spec.base)
        return None if base is None else base / spec.p
    return None


def boyd_index_estimate(
    spec: IdealSpec,
    d_max: int,
    families: list[SingularSpectrum] | None = None,
) -> tuple[float, float | None]:
    """Upper Boyd index estimate: min over d in {2, 4, ...} of log beta_d / log d."""
    if d_max < 2:
        raise ValueError("d_max must be >= 2")
    if families is None:
        families = default_test_family()
    best = math.inf
    d = 2
    while d <= d_max:
        est, _ = beta_d_estimate(spec, d, families)
        best = min(best, math.log(est) / math.log(d))
        d *= 2
    return best, _analytic_boyd(spec)


def averaging_bound(spec: IdealSpec) -> float | None:
    """Certified constant for Psi({sigma_n}) <= C Psi({s_n}) where available.

    For S_p with p > 1 this is 3 (1 - 2^(1/p - 1))^(-1), assembled from the
    geometric sum of dyadic dilation quasinorms; head truncation inherits the
    base ideal's constant.
    """
    if spec.variant == "Sp" and spec.p > 1.0:
        return 3.0 / (1.0 - 2.0 ** (1.0 / spec.p - 1.0))
    if spec.variant == "TruncHead":
        return averaging_bound(spec.base)
    return None


def _random_spectra(trials: int, seed: int, length: int = 64):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        shape = rng.integers(0, 3)
        if shape == 0:
            vals = rng.uniform(0.0, 1.0, length)
        elif shape == 1:
            vals = rng.uniform(0.5, 1.5) ** (-np.arange(length, dtype=float) * rng.uniform(0.0, 1.0))
            vals = vals * rng.uniform(0.1, 10.0)
        else:
            gamma = rng.uniform(0.1, 3.0)
            vals = (1.0 + np.arange(length, dtype=float)) ** (-gamma)
        yield SingularSpectrum(np.sort(vals)[::-1])


def averaging_constant_check(
    spec: IdealSpec, trials: int = 1000, seed: int = 0
) -> tuple[float, float | None]:
    """Empirical vs certified constant in the Cesaro-averaging inequality.

    Returns (empirical_C, bound_C); ``bound_C`` is None when the ideal's Boyd
    index is not known to be below one.  Raises ``BoundViolationError`` if a
    sampled ratio exceeds an available certified bound.
    """
    bound = averaging_bound(spec)
    empirical = 0.0
    for s in _random_spectra(trials, seed):
        denom = psi_norm(spec, s)
        if denom <= 0.0:
            continue
        ratio = spec.psi(sigma_averages(s)) / denom
        empirical = max(empirical, ratio)
    if bound is not None and empirical > bound * (1.0 + 1e-9):
        raise BoundViolationError(
            f"averaging ratio {empirical:.6f} exceeds certified bound {bound:.6f}"
        )
    return empirical, bound


def majorization_le(s1: SingularSpectrum, s2: SingularSpectrum) -> bool:
    """True iff the Cesaro averages of s1 dominate those of s2 at every index."""
    length = max(len(s1), len(s2))
    a1 = np.cumsum(s1.padded(length)) / np.arange(1, length + 1)
    a2 = np.cumsum(s2.padded(length)) / np.arange(1, length + 1)
    return bool(np.all(a2 <= a1 + 1e-15 * max(a1[0], 1.0)))


def kyfan_holder_check(
    t1: np.ndarray, t2: np.ndarray, p: float, q: float, r: float, l: int
) -> float:
    """Residual of the head-sum Hoelder inequality for a product of matrices.

    Returns ||T1 T2||_{S_r^l} - ||T1||_{S_p^l} ||T2||_{S_q^l}; nonpositive up
    to rounding whenever 1/p + 1/q = 1/r.
    """
    if abs(1.0 / p + 1.0 / q - 1.0 / r) > 1e-12:
        raise ValueError("exponents must satisfy 1/p + 1/q = 1/r")
    t1 = np.asarray(t1, dtype=complex)
    t2 = np.asarray(t2, dtype=complex)
    return kyfan_p_norm(t1 @ t2, r, l) - kyfan_p_norm(t1, p, l) * kyfan_p_norm(t2, q, l)
