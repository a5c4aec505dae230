"""Certified perturbation bounds and experiment suites.

The certified constants here are assembled only from fully explicit chains:
the dyadic decomposition, the sqrt(3) * sigma * ||f||_inf multiplier bound
per band, and elementary norm inequalities.  Everything else (the universal
constants of the qualitative theorems) is measured and reported, never
asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bandlimited import (
    DEFAULT_WINDOW,
    CutoffWindow,
    ModulusOfContinuity,
    TrigPolynomial,
    lp_pieces,
    omega_star,
    random_trig_polynomial,
    seminorm_estimate,
    sup_norm,
)
from .doi import difference_via_doi, quasicommutator_via_doi
from .ideals import schatten_norm, sigma_averages, singular_values
from .spectral import SpectralDecomposition, functional_calculus, random_normal

_SQRT3 = math.sqrt(3.0)

DEFAULT_BOX = (-1.0, 1.0, -1.0, 1.0)


@dataclass
class ExperimentReport:
    """Tabulated trial results; deterministic given (config, seed)."""

    experiment: str
    seed: int
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return int(self.meta.get("violations", 0))

    def add(self, *row) -> None:
        if len(row) != len(self.columns):
            raise ValueError("row length does not match columns")
        self.rows.append(tuple(float(v) for v in row))


class ConvexBody:
    """Compact convex subset of the plane: a ccw polygon or a disc."""

    def __init__(self, kind: str, vertices=None, center=0.0j, radius=0.0):
        self.kind = kind
        self.vertices = None if vertices is None else np.asarray(vertices, dtype=complex)
        self.center = complex(center)
        self.radius = float(radius)
        if kind == "polygon":
            v = self.vertices
            if v is None or v.size < 3:
                raise ValueError("polygon needs at least 3 vertices")
            edges = np.roll(v, -1) - v
            cross = (edges.conjugate() * (np.roll(v, -2) - np.roll(v, -1))).imag
            if np.any(cross < -1e-12 * np.abs(edges).max() ** 2):
                raise ValueError("vertices must list a convex polygon counterclockwise")
            self.diameter = float(np.abs(v[:, None] - v[None, :]).max())
        elif kind == "disc":
            if radius <= 0.0:
                raise ValueError("radius must be positive")
            self.diameter = 2.0 * self.radius
        else:
            raise ValueError(f"unknown body kind {kind!r}")

    @classmethod
    def polygon(cls, vertices) -> "ConvexBody":
        return cls("polygon", vertices=vertices)

    @classmethod
    def disc(cls, center, radius) -> "ConvexBody":
        return cls("disc", center=center, radius=radius)

    def contains(self, z: complex, tol: float = 1e-12) -> bool:
        if self.kind == "disc":
            return abs(z - self.center) <= self.radius + tol
        v = self.vertices
        edges = np.roll(v, -1) - v
        cross = (edges.conjugate() * (z - v)).imag
        return bool(np.all(cross >= -tol * max(np.abs(edges).max(), 1.0)))


def project_convex(zeta: complex, body: ConvexBody) -> complex:
    """Nearest point of the body; identity inside, 1-Lipschitz everywhere."""
    z = complex(zeta)
    if body.kind == "disc":
        off = z - body.center
        d = abs(off)
        if d <= body.radius:
            return z
        return body.center + body.radius * off / d
    if body.contains(z):
        return z
    best, best_d = None, math.inf
    v = body.vertices
    for i in range(v.size):
        a, b = v[i], v[(i + 1) % v.size]
        e = b - a
        t = ((z - a) * e.conjugate()).real
        t = min(max(t / abs(e) ** 2, 0.0), 1.0)
        p = a + t * e
        d = abs(z - p)
        if d < best_d:
            best, best_d = p, d
    return complex(best)


def extend_by_projection(f, body: ConvexBody):
    """Extend f from the body to the plane via the nearest-point map.

    The extension has the same (sampled) Lipschitz quotient as f on the body
    because the projection is a contraction.
    """
    return lambda zeta: f(project_convex(zeta, body))


def certified_lipschitz_constant(
    f: TrigPolynomial,
    win: CutoffWindow = DEFAULT_WINDOW,
    refinement: int | None = None,
) -> float:
    """Certified operator Lipschitz constant of f.

    Sums 2 sqrt(3) 2^(n+1) ||f_n||_upper over the dyadic pieces: each band
    has multiplier norm at most sqrt(3) * 2^(n+1) * ||f_n||_inf per
    coordinate kernel, and both Hermitian parts of the difference are
    dominated by the difference itself.
    """
    total = 0.0
    for n, piece in lp_pieces(f, win).items():
        total += 2.0 ** (n + 1) * sup_norm(piece, refinement)[1]
    return 2.0 * _SQRT3 * total


def certified_modulus_bound(
    f: TrigPolynomial,
    delta: float,
    win: CutoffWindow = DEFAULT_WINDOW,
    refinement: int | None = None,
) -> float:
    """Certified upper bound for ||f(N1) - f(N2)|| whenever ||N1 - N2|| <= delta.

    Optimizes the split between the Lipschitz estimate on low bands and the
    crude 2 ||f_n||_inf estimate on high bands.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    pieces = lp_pieces(f, win)
    if not pieces:
        return 0.0
    ns = sorted(pieces)
    uppers = {n: sup_norm(pieces[n], refinement)[1] for n in ns}
    best = math.inf
    for split in range(len(ns) + 1):
        head = sum(2.0 ** (n + 1) * uppers[n] for n in ns[:split])
        tail = sum(uppers[n] for n in ns[split:])
        best = min(best, delta * 2.0 * _SQRT3 * head + 2.0 * tail)
    return best


def _unit_sup_direction(dim: int, rng: np.random.Generator, rank: int | None = None):
    nu = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    if rank is not None:
        keep = rng.choice(dim, size=min(rank, dim), replace=False)
        mask = np.zeros(dim, dtype=bool)
        mask[keep] = True
        nu = np.where(mask, nu, 0.0)
    return nu / np.abs(nu).max()


def coupled_normal_pair(
    dim: int,
    delta: float,
    rng: np.random.Generator,
    box=DEFAULT_BOX,
    rank: int | None = None,
) -> tuple[SpectralDecomposition, SpectralDecomposition]:
    """Normal pair sharing an eigenbasis with ||N1 - N2|| = delta exactly."""
    d1 = random_normal(dim, box, rng=rng)
    lam2 = d1.eigenvalues + delta * _unit_sup_direction(dim, rng, rank)
    n2 = (d1.unitary * lam2) @ d1.unitary.conj().T
    d2 = SpectralDecomposition(
        matrix=n2,
        unitary=d1.unitary,
        eigenvalues=lam2,
        normality_defect=0.0,
        reconstruction_residual=0.0,
    )
    return d1, d2


def independent_normal_pair(dim: int, rng: np.random.Generator, box=DEFAULT_BOX):
    return random_normal(dim, box, rng=rng), random_normal(dim, box, rng=rng)


def experiment_lipschitz(
    f: TrigPolynomial,
    dims: list[int],
    trials: int,
    seed: int,
    win: CutoffWindow = DEFAULT_WINDOW,
    refinement: int | None = 512,
) -> ExperimentReport:
    """Operator-norm and trace-norm Lipschitz quotients against the certified constant.

    Alternates independent and coupled normal pairs; every quotient must stay
    below the certified constant, in operator norm and in trace norm.
    """
    lip = certified_lipschitz_constant(f, win, refinement)
    rep = ExperimentReport(
        "lip-bound",
        seed,
        ["trial", "dim", "delta_op", "quotient_op", "quotient_s1", "certified"],
        meta={"lipschitz_constant": lip, "violations": 0},
    )
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        dim = dims[trial % len(dims)]
        if trial % 2 == 0:
            d1, d2 = independent_normal_pair(dim, rng)
        else:
            d1, d2 = coupled_normal_pair(dim, float(2.0 ** -(trial % 11)), rng)
        dn = d1.matrix - d2.matrix
        diff = functional_calculus(f, d1) - functional_calculus(f, d2)
        delta_op = float(np.linalg.norm(dn, 2))
        delta_s1 = schatten_norm(dn, 1.0)
        if delta_op < 1e-14:
            continue
        q_op = float(np.linalg.norm(diff, 2)) / delta_op
        q_s1 = schatten_norm(diff, 1.0) / delta_s1
        if max(q_op, q_s1) > lip * (1.0 + 1e-9):
            rep.meta["violations"] += 1
        rep.add(trial, dim, delta_op, q_op, q_s1, lip)
    return rep


def experiment_holder_sweep(
    f: TrigPolynomial,
    alpha: float,
    dims: list[int],
    delta_grid: list[float],
    trials: int,
    seed: int,
    win: CutoffWindow = DEFAULT_WINDOW,
    refinement: int | None = 512,
    box=DEFAULT_BOX,
) -> ExperimentReport:
    """Measured vs certified moduli across a grid of perturbation sizes.

    Columns: (delta, measured_max_norm, delta_alpha, omega_star,
    certified_bound, log_envelope); the measured column must never exceed
    the certified one, and the last two columns give the power-modulus and
    capped-modulus envelopes for log-log plots.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    om_pow = ModulusOfContinuity.power(alpha)
    diam = math.hypot(box[1] - box[0], box[3] - box[2])
    om_cap = ModulusOfContinuity.capped_linear(diam)
    rep = ExperimentReport(
        "holder-sweep",
        seed,
        ["delta", "measured_max_norm", "delta_alpha", "omega_star",
         "certified_bound", "log_envelope"],
        meta={"alpha": alpha, "violations": 0,
              "plot": {"x": "delta", "y": "measured_max_norm", "slope": alpha}},
    )
    for grid_idx, delta in enumerate(delta_grid):
        certified = certified_modulus_bound(f, delta, win, refinement)
        measured = 0.0
        for trial in range(trials):
            rng = np.random.default_rng((seed, grid_idx, trial))
            dim = dims[trial % len(dims)]
            d1, d2 = coupled_normal_pair(dim, delta, rng, box)
            diff = functional_calculus(f, d1) - functional_calculus(f, d2)
            measured = max(measured, float(np.linalg.norm(diff, 2)))
        if measured > certified * (1.0 + 1e-9):
            rep.meta["violations"] += 1
        rep.add(
            delta, measured, delta**alpha, omega_star(om_pow, delta),
            certified, omega_star(om_cap, min(delta, diam)),
        )
    return rep


def experiment_schatten_decay(
    f: TrigPolynomial,
    alpha: float,
    p: float,
    dims: list[int],
    trials: int,
    seed: int,
) -> ExperimentReport:
    """Singular-value decay of f(N1) - f(N2) against the head-sum envelopes.

    Per (trial, j) the rows carry s_j of the difference, the envelope
    (1+j)^(-alpha/p) ||dN||^alpha over the head of length j, the Cesaro
    average sigma_j(dN), and s_j^(1/alpha).  Empirical constants are
    reported in the metadata, normalized by the Hoelder seminorm estimate.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    sem = seminorm_estimate(f, ModulusOfContinuity.power(alpha), 20000, seed)
    rep = ExperimentReport(
        "schatten-decay",
        seed,
        ["trial", "dim", "j", "s_j", "envelope", "sigma_j", "s_j_invalpha"],
        meta={"alpha": alpha, "p": p, "seminorm_lower": sem, "violations": 0},
    )
    c_decay = 0.0
    c_major = 0.0
    c_head = 0.0
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        dim = dims[trial % len(dims)]
        kind = trial % 3
        if kind == 0:
            d1, d2 = coupled_normal_pair(dim, float(2.0 ** -(trial % 7)), rng, rank=1)
        elif kind == 1:
            d1, d2 = coupled_normal_pair(dim, float(2.0 ** -(trial % 7)), rng)
        else:
            d1, d2 = independent_normal_pair(dim, rng)
        dn = d1.matrix - d2.matrix
        diff = functional_calculus(f, d1) - functional_calculus(f, d2)
        s_diff = singular_values(diff).values
        s_dn = singular_values(dn).values
        sig = sigma_averages(singular_values(dn))
        heads = np.cumsum(s_dn**p)
        pow_head = 0.0
        pow_diff = 0.0
        for j in range(dim):
            env = (1.0 + j) ** (-alpha / p) * heads[j] ** (alpha / p)
            s_pow = s_diff[j] ** (1.0 / alpha)
            rep.add(trial, dim, j, s_diff[j], env, sig[j], s_pow)
            if env > 0.0:
                c_decay = max(c_decay, s_diff[j] / (sem * env))
            if sig[j] > 0.0:
                c_major = max(c_major, s_pow / (sem ** (1.0 / alpha) * sig[j]))
            pow_head += s_pow**p
            pow_diff += s_dn[j] ** p
            if pow_diff > 0.0:
                c_head = max(c_head, pow_head / (sem ** (p / alpha) * pow_diff))
    rep.meta["c_decay"] = c_decay
    rep.meta["c_majorization"] = c_major
    rep.meta["c_head_sum"] = c_head
    return rep


def experiment_quasicommutator(
    f: TrigPolynomial,
    dims: list[int],
    trials: int,
    seed: int,
    win: CutoffWindow = DEFAULT_WINDOW,
    refinement: int | None = 512,
) -> ExperimentReport:
    """Quasicommutator identity residuals and the certified domination.

    Rows: (trial, dim, measured, residual, max_quasicomm, certified) where
    certified = L(f) * max(||N1 R - R N2||, ||N1* R - R N2*||).
    """
    lip = certified_lipschitz_constant(f, win, refinement)
    rep = ExperimentReport(
        "qc-verify",
        seed,
        ["trial", "dim", "measured", "residual", "max_quasicomm", "certified"],
        meta={"lipschitz_constant": lip, "violations": 0},
    )
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        dim = dims[trial % len(dims)]
        d1, d2 = independent_normal_pair(dim, rng)
        r = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        lhs = functional_calculus(f, d1) @ r - r @ functional_calculus(f, d2)
        rhs = quasicommutator_via_doi(f, d1, d2, r)
        scale = 1.0 + float(np.linalg.norm(lhs))
        residual = float(np.linalg.norm(lhs - rhs))
        qc = max(
            float(np.linalg.norm(d1.matrix @ r - r @ d2.matrix, 2)),
            float(np.linalg.norm(d1.matrix.conj().T @ r - r @ d2.matrix.conj().T, 2)),
        )
        measured = float(np.linalg.norm(lhs, 2))
        certified = lip * qc
        if residual > 1e-9 * scale or measured > certified * (1.0 + 1e-9):
            rep.meta["violations"] += 1
        rep.add(trial, dim, measured, residual, qc, certified)
    return rep


def experiment_fuglede_ratio(
    dims: list[int],
    p_list: list[float],
    trials: int,
    seed: int,
) -> ExperimentReport:
    """Ratio of adjoint to plain quasicommutator Schatten norms.

    At p = 2 the ratio is exactly 1 (entrywise conjugation in eigenbases);
    for p in {1, inf} the ratio is a recorded observable that can exceed 1.
    Degenerate denominators are skipped and counted in the metadata.
    """
    rep = ExperimentReport(
        "fuglede-ratio",
        seed,
        ["p", "trial", "ratio"],
        meta={"violations": 0, "skipped": 0, "max_ratio": {}},
    )
    for p in p_list:
        worst = 0.0
        for trial in range(trials):
            rng = np.random.default_rng((seed, trial))
            dim = dims[trial % len(dims)]
            d1, d2 = independent_normal_pair(dim, rng)
            r = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            x = d1.matrix @ r - r @ d2.matrix
            y = d1.matrix.conj().T @ r - r @ d2.matrix.conj().T
            denom = schatten_norm(x, p)
            if denom < 1e-14:
                rep.meta["skipped"] += 1
                continue
            ratio = schatten_norm(y, p) / denom
            if p == 2.0 and abs(ratio - 1.0) > 1e-10:
                rep.meta["violations"] += 1
            worst = max(worst, ratio)
            rep.add(p, trial, ratio)
        rep.meta["max_ratio"][str(p)] = worst
    return rep


def experiment_doi_identity(
    sigma: float,
    dims: list[int],
    trials: int,
    seed: int,
    tol: float = 1e-9,
) -> ExperimentReport:
    """Residuals of the difference identity on random band-limited functions."""
    rep = ExperimentReport(
        "doi-verify",
        seed,
        ["trial", "dim", "residual", "scale"],
        meta={"sigma": sigma, "tol": tol, "violations": 0},
    )
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        dim = dims[trial % len(dims)]
        f = random_trig_polynomial(sigma, 12, seed=None, rng=rng)
        d1, d2 = independent_normal_pair(dim, rng)
        f1 = functional_calculus(f, d1)
        f2 = functional_calculus(f, d2)
        rhs = difference_via_doi(f, d1, d2)
        scale = 1.0 + float(np.linalg.norm(f1)) + float(np.linalg.norm(f2))
        residual = float(np.linalg.norm(f1 - f2 - rhs))
        if residual > tol * scale:
            rep.meta["violations"] += 1
        rep.add(trial, dim, residual, scale)
    return rep
