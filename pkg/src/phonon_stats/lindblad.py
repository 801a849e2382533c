"""Truncated-Hilbert-space Lindblad steady states (the brute-force route).

Everything in :mod:`.exact` and :mod:`.hitemp` is closed-form; this module
solves the same physics numerically so the two routes can check each other
with no shared code path. Three generators are provided:

* the reduced single-mode master equation with two-phonon damping
  (C/2) D[b^2] + thermal contact, in units of the mechanical linewidth;
* the two-mode model it descends from, a cavity coupled via
  H = g (a^dag b^2 + b^dag^2 a) with cavity loss kappa — second-order
  elimination of the cavity maps it onto the reduced model with two-phonon
  rate 4 g^2/kappa, i.e. effective cooperativity 4 g^2/(gamma kappa), with
  corrections of order 1/kappa;
* the same two-mode system before the rotating-wave approximation, with
  counter-rotating terms and (optionally) the quadratic fluctuation term
  retained, to quantify what the RWA discards.

Dissipators carry the convention D[o] rho = 2 o rho o^dag - o^dag o rho
- rho o^dag o with rate prefactors of 1/2, so rates match decay constants.

Liouvillians are assembled sparse via column-stacking, vec(A rho B) =
(B^T kron A) vec(rho), with the cavity slot first in every Kronecker
product. The steady state is the null vector, pinned by replacing one row
with the trace constraint (scaled to the Liouvillian's own norm so the
system stays well conditioned); the solution is hermitized, positivity is
enforced up to a small eigenvalue floor, and the residual of the original
generator is checked before anything is reported.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from .errors import (
    BudgetExceeded,
    DomainError,
    SingularSystem,
    UnphysicalState,
)
from .params import ReducedParams
from .report import G2_UNDEFINED_BELOW, SteadyStateReport, regime_from_observables

__all__ = [
    "TruncationSpec",
    "Superoperator",
    "DensityMatrix",
    "build_reduced_liouvillian",
    "build_two_mode_rwa_liouvillian",
    "build_prerwa_liouvillian",
    "steady_state",
    "observables",
    "ReducedModel",
    "TwoModeRWAModel",
    "PreRWAModel",
    "converge_truncation",
    "write_triplets",
    "read_triplets",
    "spectral_gap",
]

_EIG_FLOOR = -1e-8
_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class TruncationSpec:
    """Hilbert-space cutoffs: ``dim_mech`` Fock levels, ``dim_cav`` for the
    cavity (1 = no cavity slot)."""

    dim_mech: int
    dim_cav: int = 1
    tol_population_tail: float = 1e-9

    def __post_init__(self) -> None:
        if self.dim_mech < 2:
            raise DomainError(f"dim_mech must be >= 2, got {self.dim_mech}")
        if self.dim_cav < 1:
            raise DomainError(f"dim_cav must be >= 1, got {self.dim_cav}")
        if not (0.0 < self.tol_population_tail < 1.0):
            raise DomainError(
                f"tol_population_tail must be in (0, 1), got {self.tol_population_tail}"
            )

    @property
    def dim(self) -> int:
        return self.dim_mech * self.dim_cav


@dataclass(eq=False)
class Superoperator:
    """Sparse Liouvillian acting on vec(rho), dims = (dim_cav, dim_mech)."""

    dim: int
    dims: tuple[int, int]
    matrix: sp.csr_matrix
    model_tag: str

    def trace_defect(self) -> float:
        """max_j |sum_i <i| L applied to basis unit |j>| traced — exactly 0
        for any Lindblad generator, so this measures assembly error."""
        d = self.dim
        trace_row = np.zeros(d * d)
        trace_row[:: d + 1] = 1.0
        defect = trace_row @ self.matrix
        return float(np.max(np.abs(defect)))


@dataclass(eq=False)
class DensityMatrix:
    """Solved steady state; ``residual`` is ||L vec(rho)||_2 / ||L||_inf."""

    matrix: np.ndarray
    dims: tuple[int, int]
    residual: float


def _destroy(dim: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr")


def _lift(op: sp.spmatrix, dims: tuple[int, int], slot: int) -> sp.csr_matrix:
    """Embed a single-mode operator at ``slot`` (0 = cavity, 1 = mechanics)."""
    eye_c = sp.identity(dims[0], format="csr")
    eye_m = sp.identity(dims[1], format="csr")
    if slot == 0:
        return sp.kron(op, eye_m, format="csr")
    return sp.kron(eye_c, op, format="csr")


def _dissipator(op: sp.spmatrix, rate: float) -> sp.csr_matrix:
    """(rate/2) * vec form of D[o] = 2 o . o^dag - {o^dag o, .}."""
    d = op.shape[0]
    eye = sp.identity(d, format="csr")
    opd_op = (op.conj().T @ op).tocsr()
    out = 2.0 * sp.kron(op.conj(), op) - sp.kron(eye, opd_op) - sp.kron(opd_op.T, eye)
    return (0.5 * rate) * out.tocsr()


def _hamiltonian_part(h: sp.spmatrix) -> sp.csr_matrix:
    d = h.shape[0]
    eye = sp.identity(d, format="csr")
    return (-1j) * (sp.kron(eye, h) - sp.kron(h.T, eye)).tocsr()


def build_reduced_liouvillian(
    C: float, n_th: float, trunc: TruncationSpec
) -> Superoperator:
    """Single-mode generator (C/2) D[b^2] + (n_th/2) D[b^dag]
    + ((n_th+1)/2) D[b], time in units of 1/gamma."""
    if trunc.dim_cav != 1:
        raise DomainError("reduced model is single-mode; dim_cav must be 1")
    C = float(C)
    n_th = float(n_th)
    if C < 0.0 or n_th < 0.0:
        raise DomainError("C and n_th must be nonnegative")
    b = _destroy(trunc.dim_mech)
    L = (
        _dissipator(b @ b, C)
        + _dissipator(b.conj().T, n_th)
        + _dissipator(b, n_th + 1.0)
    )
    return Superoperator(trunc.dim_mech, (1, trunc.dim_mech), L.tocsr(), "reduced")


def build_two_mode_rwa_liouvillian(
    g: float,
    kappa: float,
    gamma: float,
    n_th: float,
    trunc: TruncationSpec,
) -> Superoperator:
    """Cavity + mechanics with H = g (a^dag b^2 + b^dag^2 a) in the rotating
    frame, cavity loss kappa, mechanical contact gamma at occupation n_th."""
    if trunc.dim_cav < 2:
        raise DomainError("two-mode model needs dim_cav >= 2")
    if kappa <= 0.0 or gamma <= 0.0:
        raise DomainError("kappa and gamma must be positive")
    if n_th < 0.0:
        raise DomainError("n_th must be nonnegative")
    dims = (trunc.dim_cav, trunc.dim_mech)
    a = _lift(_destroy(dims[0]), dims, 0)
    b = _lift(_destroy(dims[1]), dims, 1)
    b2 = b @ b
    h = g * (a.conj().T @ b2 + b2.conj().T @ a)
    L = (
        _hamiltonian_part(h)
        + _dissipator(a, kappa)
        + _dissipator(b.conj().T, gamma * n_th)
        + _dissipator(b, gamma * (n_th + 1.0))
    )
    return Superoperator(dims[0] * dims[1], dims, L.tocsr(), "two_mode_rwa")


def build_prerwa_liouvillian(
    reduced: ReducedParams,
    kappa: float,
    gamma: float,
    n_th: float,
    trunc: TruncationSpec,
    *,
    include_quadratic_fluctuation: bool = False,
) -> Superoperator:
    """Laboratory-frame two-mode generator, before any rotating-wave step.

    H = -Delta_c a^dag a + omega' b^dag b + g0 n_c (b^dag^2 + b^2)
        + g (a + a^dag)(b + b^dag)^2
        [+ g0 a^dag a (b + b^dag)^2   when include_quadratic_fluctuation]

    with Delta_c = -2 omega' taken from ``reduced`` (enforced there), the
    displaced-frame coupling g = g0 sqrt(n_c), and the static squeezing term
    g0 n_c = g sqrt(n_c) carried by the condensate displacement. Frequencies
    are in the same units as kappa and gamma.
    """
    if trunc.dim_cav < 2:
        raise DomainError("pre-RWA model needs dim_cav >= 2")
    if kappa <= 0.0 or gamma <= 0.0:
        raise DomainError("kappa and gamma must be positive")
    if n_th < 0.0:
        raise DomainError("n_th must be nonnegative")
    if reduced.n_c == 0.0 and reduced.g > 0.0:
        raise DomainError(
            "pre-RWA model needs the cavity occupation n_c that produced g"
        )
    dims = (trunc.dim_cav, trunc.dim_mech)
    a = _lift(_destroy(dims[0]), dims, 0)
    b = _lift(_destroy(dims[1]), dims, 1)
    b2 = (b @ b).tocsr()
    x2 = (b + b.conj().T) @ (b + b.conj().T)
    num_a = (a.conj().T @ a).tocsr()
    g = reduced.g
    omega = reduced.omega_m_eff
    h = (
        (-reduced.Delta_c) * num_a
        + omega * (b.conj().T @ b)
        + (g * math.sqrt(reduced.n_c)) * (b2 + b2.conj().T)
        + g * ((a + a.conj().T) @ x2)
    )
    if include_quadratic_fluctuation:
        g0 = g / math.sqrt(reduced.n_c) if reduced.n_c > 0.0 else 0.0
        h = h + g0 * (num_a @ x2)
    L = (
        _hamiltonian_part(h)
        + _dissipator(a, kappa)
        + _dissipator(b.conj().T, gamma * n_th)
        + _dissipator(b, gamma * (n_th + 1.0))
    )
    return Superoperator(dims[0] * dims[1], dims, L.tocsr(), "pre_rwa")


def steady_state(sup: Superoperator) -> DensityMatrix:
    """Null vector of the generator, pinned by the trace constraint.

    Row 0 of L is replaced by the trace functional scaled to ||L||_inf, the
    right-hand side is that same scale, and the sparse LU solution is
    hermitized and floor-checked. Raises :class:`SingularSystem` when the
    factorization degenerates or the unpinned generator's residual exceeds
    ``1e-10 ||L||_inf`` (e.g. a generator with multiple steady states), and
    :class:`UnphysicalState` when an eigenvalue falls below -1e-8.
    """
    d = sup.dim
    L = sup.matrix.tocsr().astype(np.complex128)
    scale = float(np.max(np.abs(L).sum(axis=1))) or 1.0

    coo = L.tocoo()
    keep = coo.row != 0
    rows = np.concatenate([coo.row[keep], np.zeros(d, dtype=coo.row.dtype)])
    cols = np.concatenate([coo.col[keep], np.arange(d) * (d + 1)])
    vals = np.concatenate([coo.data[keep], np.full(d, scale, dtype=np.complex128)])
    pinned = sp.csc_matrix((vals, (rows, cols)), shape=(d * d, d * d))

    rhs = np.zeros(d * d, dtype=np.complex128)
    rhs[0] = scale
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            vec = spsolve(pinned, rhs)
        except (RuntimeError, MatrixRankWarning) as exc:
            raise SingularSystem(f"sparse solve failed: {exc}") from exc
    if not np.all(np.isfinite(vec)):
        raise SingularSystem("sparse solve returned non-finite entries")

    rho = vec.reshape(d, d, order="F")  # column stacking
    rho = 0.5 * (rho + rho.conj().T)
    tr = float(np.real(np.trace(rho)))
    if abs(tr) < 1e-300:
        raise SingularSystem("solved state has vanishing trace")
    rho /= tr

    evals = np.linalg.eigvalsh(rho)
    if evals[0] < _EIG_FLOOR:
        raise UnphysicalState(
            f"steady state has eigenvalue {evals[0]:.3e} below {_EIG_FLOOR:g}; "
            "truncation is too tight for this parameter set"
        )
    if evals[0] < 0.0:
        w, v = np.linalg.eigh(rho)
        w = np.clip(w, 0.0, None)
        rho = (v * w) @ v.conj().T
        rho /= np.real(np.trace(rho))

    residual = float(np.linalg.norm(L @ rho.reshape(-1, order="F")))
    if residual > _RESIDUAL_TOL * scale:
        raise SingularSystem(
            f"steady state residual {residual:.3e} exceeds "
            f"{_RESIDUAL_TOL:g} * ||L||_inf = {_RESIDUAL_TOL * scale:.3e}; "
            "the generator's kernel is likely degenerate"
        )
    return DensityMatrix(rho, sup.dims, residual / scale)


def _partial_trace_mech(rho: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    full = rho.reshape(dims[0], dims[1], dims[0], dims[1])
    return np.einsum("aiaj->ij", full)


def _partial_trace_cav(rho: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    full = rho.reshape(dims[0], dims[1], dims[0], dims[1])
    return np.einsum("aibi->ab", full)


def observables(state: DensityMatrix, mode: str = "mech") -> SteadyStateReport:
    """Occupation, g2(0), and Fock populations of one mode of the state."""
    if mode == "mech":
        red = _partial_trace_mech(state.matrix, state.dims)
    elif mode == "cav":
        red = _partial_trace_cav(state.matrix, state.dims)
    else:
        raise DomainError(f"mode must be 'mech' or 'cav', got {mode!r}")
    pops = np.clip(np.real(np.diag(red)), 0.0, None)
    n = np.arange(len(pops), dtype=np.float64)
    n_ss = float(n @ pops)
    m2 = float((n * (n - 1.0)) @ pops)
    g2 = m2 / n_ss**2 if n_ss >= G2_UNDEFINED_BELOW else None
    top_two = float(pops[-2:].sum()) if len(pops) >= 2 else float(pops.sum())
    return SteadyStateReport(
        n_ss=n_ss,
        g2=g2,
        populations=pops,
        regime=regime_from_observables(n_ss, g2),
        diagnostics={
            "model": "lindblad",
            "residual": state.residual,
            "top_two_population": top_two,
            "min_eigenvalue": float(np.linalg.eigvalsh(state.matrix)[0]),
        },
    )


@dataclass(frozen=True)
class ReducedModel:
    C: float
    n_th: float

    multimode = False

    def build(self, trunc: TruncationSpec) -> Superoperator:
        return build_reduced_liouvillian(self.C, self.n_th, trunc)


@dataclass(frozen=True)
class TwoModeRWAModel:
    g: float
    kappa: float
    gamma: float
    n_th: float

    multimode = True

    def build(self, trunc: TruncationSpec) -> Superoperator:
        return build_two_mode_rwa_liouvillian(
            self.g, self.kappa, self.gamma, self.n_th, trunc
        )


@dataclass(frozen=True)
class PreRWAModel:
    reduced: ReducedParams
    kappa: float
    gamma: float
    n_th: float
    include_quadratic_fluctuation: bool = False

    multimode = True

    def build(self, trunc: TruncationSpec) -> Superoperator:
        return build_prerwa_liouvillian(
            self.reduced,
            self.kappa,
            self.gamma,
            self.n_th,
            trunc,
            include_quadratic_fluctuation=self.include_quadratic_fluctuation,
        )


def _grow(trunc: TruncationSpec, multimode: bool) -> TruncationSpec:
    return TruncationSpec(
        dim_mech=trunc.dim_mech * 2,
        dim_cav=trunc.dim_cav + 1 if multimode else trunc.dim_cav,
        tol_population_tail=trunc.tol_population_tail,
    )


def converge_truncation(
    model,
    initial: TruncationSpec,
    *,
    rel_tol: float = 1e-6,
    dim_cap: int = 4096,
) -> tuple[TruncationSpec, SteadyStateReport]:
    """Grow the truncation until the mechanical observables stop moving.

    Doubles dim_mech each round (and bumps dim_cav for multimode models);
    accepts once n_ss and g2 change by less than ``rel_tol`` between rounds
    (with an absolute floor of 1e-12 so vacuum-level observables, which are
    pure solver noise, can still settle) AND the top two mechanical
    populations are below the tail tolerance. Raises :class:`BudgetExceeded`
    carrying the last attempted spec and report when the next step would
    pass ``dim_cap``.
    """
    trunc = initial
    prev: SteadyStateReport | None = None
    while True:
        report = observables(steady_state(model.build(trunc)), mode="mech")
        tail_ok = report.diagnostics["top_two_population"] < trunc.tol_population_tail
        if prev is not None and tail_ok:
            dn = math.isclose(report.n_ss, prev.n_ss, rel_tol=rel_tol, abs_tol=1e-12)
            if report.g2 is None or prev.g2 is None:
                dg = report.g2 is None and prev.g2 is None
            else:
                dg = math.isclose(report.g2, prev.g2, rel_tol=rel_tol, abs_tol=1e-12)
            if dn and dg:
                return trunc, report
        nxt = _grow(trunc, model.multimode)
        if nxt.dim > dim_cap:
            raise BudgetExceeded(
                f"next truncation {nxt.dim_cav}x{nxt.dim_mech} exceeds "
                f"dim_cap={dim_cap} before convergence",
                last_spec=trunc,
                last_report=report,
            )
        prev = report
        trunc = nxt


def write_triplets(sup: Superoperator, path) -> None:
    """Dump the generator as whitespace triplets: ``row col re im`` with a
    header comment recording the model tag, mode dimensions and nnz."""
    coo = sup.matrix.tocoo()
    with open(path, "w") as fh:
        fh.write(
            f"# model={sup.model_tag} dims={sup.dims[0]}x{sup.dims[1]} "
            f"shape={coo.shape[0]}x{coo.shape[1]} nnz={coo.nnz}\n"
        )
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")


def read_triplets(path) -> sp.csr_matrix:
    """Inverse of :func:`write_triplets` (matrix only; the header is skipped)."""
    rows, cols, vals = [], [], []
    shape = None
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                for tok in line.split():
                    if tok.startswith("shape="):
                        m, n = tok[len("shape=") :].split("x")
                        shape = (int(m), int(n))
                continue
            r, c, re, im = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(complex(float(re), float(im)))
    return sp.csr_matrix((vals, (rows, cols)), shape=shape)


def spectral_gap(sup: Superoperator) -> float:
    """Smallest nonzero singular value of the generator (dense; keep the
    system small). A diagnostic for how slow the slowest decay mode is —
    reported, never asserted on."""
    s = np.linalg.svd(sup.matrix.toarray(), compute_uv=False)
    nonzero = s[s > 1e-12 * s[0]]
    return float(nonzero[-1])
