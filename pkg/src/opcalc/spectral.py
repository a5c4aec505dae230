"""Normal matrices, certified diagonalization, and functional calculus.

The decomposition here is the brute-force oracle the rest of the package is
checked against: N = U diag(lambda) U* with re-verified unitarity,
reconstruction, and commuting Hermitian parts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import IllSeparatedSpectrumError, NotNormalError

DEFAULT_NORMALITY_TOL = 1e-8

_UNITARY_TOL = 1e-10
_RECON_TOL = 1e-9
_COMMUTE_TOL = 1e-9


@dataclass(frozen=True)
class SpectralDecomposition:
    """N = U diag(lambda) U* for a normal matrix N, with certified defects."""

    matrix: np.ndarray
    unitary: np.ndarray
    eigenvalues: np.ndarray
    normality_defect: float
    reconstruction_residual: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def verify(self) -> None:
        """Re-check the defining invariants; raise on violation."""
        n = self.dim
        u = self.unitary
        ortho = np.linalg.norm(u.conj().T @ u - np.eye(n))
        if ortho > _UNITARY_TOL * np.sqrt(n):
            raise IllSeparatedSpectrumError(f"unitarity defect {ortho:.3e}")
        scale = 1.0 + np.linalg.norm(self.matrix)
        recon = np.linalg.norm(
            (u * self.eigenvalues) @ u.conj().T - self.matrix
        )
        if recon > _RECON_TOL * scale:
            raise IllSeparatedSpectrumError(f"reconstruction residual {recon:.3e}")
        a, b = parts(self)
        comm = np.linalg.norm(a @ b - b @ a)
        if comm > _COMMUTE_TOL * max(np.linalg.norm(self.matrix) ** 2, 1e-300):
            raise NotNormalError(comm, _COMMUTE_TOL)

    def to_json(self) -> str:
        def mat(m):
            return [[[z.real, z.imag] for z in row] for row in m]

        return json.dumps(
            {
                "matrix": mat(self.matrix),
                "unitary": mat(self.unitary),
                "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SpectralDecomposition":
        data = json.loads(text)

        def mat(rows):
            return np.array([[complex(re, im) for re, im in row] for row in rows])

        matrix = mat(data["matrix"])
        unitary = mat(data["unitary"])
        eigenvalues = np.array([complex(re, im) for re, im in data["eigenvalues"]])
        dec = cls(
            matrix=matrix,
            unitary=unitary,
            eigenvalues=eigenvalues,
            normality_defect=normality_defect(matrix),
            reconstruction_residual=float(
                np.linalg.norm((unitary * eigenvalues) @ unitary.conj().T - matrix)
            ),
        )
        dec.verify()
        return dec


def normality_defect(m: np.ndarray) -> float:
    """|| M M* - M* M ||_F normalized by max(||M||_F^2, tiny)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    comm = m @ m.conj().T - m.conj().T @ m
    denom = max(np.linalg.norm(m) ** 2, 1e-300)
    return float(np.linalg.norm(comm) / denom)


def parts(dec: SpectralDecomposition | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian real/imaginary parts (A, B) with N = A + iB."""
    n = dec.matrix if isinstance(dec, SpectralDecomposition) else np.asarray(dec, dtype=complex)
    a = (n + n.conj().T) / 2.0
    b = (n - n.conj().T) / 2.0j
    return a, b


def _clusters(values: np.ndarray, radius: float) -> list[np.ndarray]:
    """Group sorted-value indices into chains with gaps <= radius."""
    order = np.argsort(values)
    groups: list[list[int]] = [[order[0]]]
    for idx in order[1:]:
        if values[idx] - values[groups[-1][-1]] <= radius:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return [np.array(g) for g in groups]


def diagonalize(
    n: np.ndarray, tol: float = DEFAULT_NORMALITY_TOL
) -> SpectralDecomposition:
    """Simultaneously diagonalize the commuting Hermitian parts of N.

    Stage one diagonalizes A = Re N; within each eigenvalue cluster of A the
    compressed B = Im N is diagonalized, and residual near-ties in B are
    cleaned up by a third compression of A.  Eigenvalues of A within one
    cluster (radius 1e-8 * (1 + spread)) are treated as equal.
    """
    n = np.asarray(n, dtype=complex)
    defect = normality_defect(n)
    if defect > tol:
        raise NotNormalError(defect, tol)
    a, b = parts(n)
    avals, u = np.linalg.eigh(a)
    spread = float(avals[-1] - avals[0]) if len(avals) > 1 else 0.0
    radius = 1e-8 * (1.0 + spread)
    for grp in _clusters(avals, radius):
        if len(grp) == 1:
            continue
        sub = u[:, grp]
        bc = sub.conj().T @ b @ sub
        bc = (bc + bc.conj().T) / 2.0
        bvals, q = np.linalg.eigh(bc)
        u[:, grp] = sub @ q
        # refine within b-ties so the a-part stays diagonal there
        bspread = float(bvals[-1] - bvals[0]) if len(bvals) > 1 else 0.0
        bradius = 1e-8 * (1.0 + bspread)
        for sub_grp in _clusters(bvals, bradius):
            if len(sub_grp) == 1:
                continue
            cols = grp[sub_grp]
            sub2 = u[:, cols]
            ac = sub2.conj().T @ a @ sub2
            ac = (ac + ac.conj().T) / 2.0
            _, q2 = np.linalg.eigh(ac)
            u[:, cols] = sub2 @ q2
    lam = np.einsum("ji,jk,ki->i", u.conj(), n, u)
    recon = float(np.linalg.norm((u * lam) @ u.conj().T - n))
    dec = SpectralDecomposition(
        matrix=n,
        unitary=u,
        eigenvalues=lam,
        normality_defect=defect,
        reconstruction_residual=recon,
    )
    try:
        dec.verify()
    except (IllSeparatedSpectrumError, NotNormalError) as exc:
        raise IllSeparatedSpectrumError(
            f"ill-separated spectrum: {exc} (cluster radius {radius:.3e})"
        ) from exc
    return dec


def functional_calculus(f, dec: SpectralDecomposition) -> np.ndarray:
    """f(N) = U diag(f(lambda_j)) U* for a scalar function on the spectrum."""
    fvals = np.array([complex(f(z)) for z in dec.eigenvalues])
    return (dec.unitary * fvals) @ dec.unitary.conj().T


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a complex Gaussian matrix, phase-fixed to make R's diagonal positive."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_normal(
    dim: int,
    spectrum_box: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0),
    seed: int | None = 0,
    rng: np.random.Generator | None = None,
) -> SpectralDecomposition:
    """Seeded normal matrix with spectrum uniform in a rectangle of C.

    ``spectrum_box`` is (re_min, re_max, im_min, im_max).  Deterministic
    given the seed; the unitary comes from a phase-fixed QR factorization.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = spectrum_box
    lam = rng.uniform(x0, x1, dim) + 1j * rng.uniform(y0, y1, dim)
    u = haar_unitary(dim, rng)
    n = (u * lam) @ u.conj().T
    return SpectralDecomposition(
        matrix=n,
        unitary=u,
        eigenvalues=lam,
        normality_defect=normality_defect(n),
        reconstruction_residual=float(np.linalg.norm((u * lam) @ u.conj().T - n)),
    )
