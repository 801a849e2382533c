import math

import numpy as np
import pytest

from phonon_stats import exact, lindblad
from phonon_stats.errors import BudgetExceeded, DomainError, SingularSystem
from phonon_stats.lindblad import (
    PreRWAModel,
    ReducedModel,
    Superoperator,
    TruncationSpec,
    TwoModeRWAModel,
    build_prerwa_liouvillian,
    build_reduced_liouvillian,
    build_two_mode_rwa_liouvillian,
    converge_truncation,
    observables,
    read_triplets,
    spectral_gap,
    steady_state,
    write_triplets,
)
from phonon_stats.params import ReducedParams
from phonon_stats.report import Regime


def _d19_reduced() -> ReducedParams:
    # deep-sideband working point: C = 3, kappa = 2000, omega' = 1e5,
    # g = sqrt(1500), n_c = 20/3, so g0 = g/sqrt(n_c) = 15 and
    # g0 * n_c / omega' = 1e-3 exactly
    return ReducedParams(
        C=3.0,
        n_th=1.0,
        n_c=20.0 / 3.0,
        g=math.sqrt(1500.0),
        omega_m_eff=1e5,
        Gamma_opt=3.0,
        Delta_c=-2e5,
    )


def test_truncation_spec():
    t = TruncationSpec(dim_mech=16, dim_cav=3)
    assert t.dim == 48
    assert TruncationSpec(dim_mech=8).dim == 8
    with pytest.raises(DomainError):
        TruncationSpec(dim_mech=1)
    with pytest.raises(DomainError):
        TruncationSpec(dim_mech=8, dim_cav=0)
    with pytest.raises(DomainError):
        TruncationSpec(dim_mech=8, tol_population_tail=0.0)


def _inf_norm(sup):
    return float(np.max(np.abs(sup.matrix).sum(axis=1)))


def _all_generators():
    yield build_reduced_liouvillian(3.0, 1.0, TruncationSpec(dim_mech=16))
    yield build_two_mode_rwa_liouvillian(
        math.sqrt(7.5), 10.0, 1.0, 1.0, TruncationSpec(dim_mech=12, dim_cav=3)
    )
    red = _d19_reduced()
    for flag in (False, True):
        yield build_prerwa_liouvillian(
            red,
            2000.0,
            1.0,
            1.0,
            TruncationSpec(dim_mech=12, dim_cav=3),
            include_quadratic_fluctuation=flag,
        )


def test_trace_preservation_all_builders():
    # the trace functional must annihilate any Lindblad generator exactly;
    # the defect measures assembly error only
    for sup in _all_generators():
        assert sup.trace_defect() <= 1e-12 * _inf_norm(sup)


def test_generator_preserves_hermiticity():
    sup = build_reduced_liouvillian(2.0, 0.7, TruncationSpec(dim_mech=10))
    rng = np.random.default_rng(7)
    m = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    rho = m + m.conj().T
    y = sup.matrix @ rho.reshape(-1, order="F")
    out = y.reshape(10, 10, order="F")
    assert np.max(np.abs(out - out.conj().T)) <= 1e-12 * np.max(np.abs(out))


def test_thermal_fixed_point():
    # C = 0 leaves a pure thermal contact: n_ss = n_th, g2 = 2
    sup = build_reduced_liouvillian(0.0, 2.0, TruncationSpec(dim_mech=64))
    rep = observables(steady_state(sup))
    assert rep.n_ss == pytest.approx(2.0, abs=1e-8)
    assert rep.g2 == pytest.approx(2.0, abs=1e-8)
    assert rep.regime is Regime.BUNCHED


def test_vacuum_fixed_point():
    sup = build_reduced_liouvillian(1.0, 0.0, TruncationSpec(dim_mech=16))
    rep = observables(steady_state(sup))
    assert rep.populations[0] >= 1.0 - 1e-10
    assert rep.g2 is None
    assert rep.regime is Regime.VACUUM


def test_reduced_matches_analytic():
    sup = build_reduced_liouvillian(10.0, 1.0, TruncationSpec(dim_mech=40))
    rep = observables(steady_state(sup))
    assert rep.n_ss == pytest.approx(0.25322884922445058, rel=1e-9)
    assert rep.g2 == pytest.approx(0.58227906174382116, rel=1e-9)


def test_coherent_point_statistics():
    # C = 2 n_th + 1 = 41: Poissonian steady state, Fano factor 1
    sup = build_reduced_liouvillian(41.0, 20.0, TruncationSpec(dim_mech=80))
    rep = observables(steady_state(sup))
    assert rep.n_ss == pytest.approx(20.0 / 41.0, rel=1e-6)
    assert rep.g2 == pytest.approx(1.0, abs=1e-6)
    n = np.arange(rep.populations.size, dtype=float)
    var = (n - rep.n_ss) ** 2 @ rep.populations
    assert var / rep.n_ss == pytest.approx(1.0, abs=1e-3)


def test_two_mode_factorizes_at_zero_coupling():
    sup = build_two_mode_rwa_liouvillian(
        0.0, 10.0, 1.0, 0.5, TruncationSpec(dim_mech=24, dim_cav=3)
    )
    state = steady_state(sup)
    mech = observables(state, mode="mech")
    cav = observables(state, mode="cav")
    assert mech.n_ss == pytest.approx(0.5, abs=1e-9)
    assert cav.n_ss <= 1e-12


def test_cavity_empties_with_faster_decay():
    # at fixed target C the cavity is a spectator whose occupation shrinks
    # as its linewidth grows
    occ = []
    for kappa in (100.0, 400.0):
        g = math.sqrt(3.0 * 1.0 * kappa / 4.0)
        sup = build_two_mode_rwa_liouvillian(
            g, kappa, 1.0, 1.0, TruncationSpec(dim_mech=24, dim_cav=4)
        )
        occ.append(observables(steady_state(sup), mode="cav").n_ss)
    assert 0.0 < occ[1] < occ[0]


def test_degenerate_kernel_raises():
    # a bare two-phonon drain leaves span{|0>, |1>} dark: the stationary
    # state is not unique and the solver must refuse rather than pick one
    b = lindblad._destroy(6)
    mat = lindblad._dissipator((b @ b).tocsr(), 1.0)
    sup = Superoperator(6, (1, 6), mat.tocsr(), "degenerate")
    with pytest.raises(SingularSystem):
        steady_state(sup)


def test_converge_truncation_reduced():
    trunc, rep = converge_truncation(
        ReducedModel(10.0, 1.0), TruncationSpec(dim_mech=8), rel_tol=1e-8
    )
    assert trunc.dim_mech >= 16
    assert rep.n_ss == pytest.approx(0.25322884922445058, rel=1e-8)
    assert rep.g2 == pytest.approx(0.58227906174382116, rel=1e-8)


def test_converge_truncation_grows_cavity():
    model = TwoModeRWAModel(g=math.sqrt(7.5), kappa=10.0, gamma=1.0, n_th=1.0)
    trunc, rep = converge_truncation(
        model, TruncationSpec(dim_mech=16, dim_cav=3), rel_tol=1e-4, dim_cap=1024
    )
    assert trunc.dim_cav >= 4  # at least one growth round before acceptance
    assert rep.n_ss > 0.0
    assert rep.g2 is not None


def test_converge_truncation_budget():
    with pytest.raises(BudgetExceeded) as exc:
        converge_truncation(
            ReducedModel(0.1, 5.0), TruncationSpec(dim_mech=8), dim_cap=32
        )
    assert exc.value.last_spec.dim_mech == 32
    assert exc.value.last_report.n_ss > 0.0


def test_prerwa_validation():
    red = ReducedParams(
        C=3.0,
        n_th=1.0,
        n_c=0.0,
        g=1.0,
        omega_m_eff=1e5,
        Gamma_opt=3.0,
        Delta_c=-2e5,
    )
    with pytest.raises(DomainError):
        build_prerwa_liouvillian(
            red, 2000.0, 1.0, 1.0, TruncationSpec(dim_mech=8, dim_cav=2)
        )
    with pytest.raises(DomainError):
        build_prerwa_liouvillian(
            _d19_reduced(), 2000.0, 1.0, 1.0, TruncationSpec(dim_mech=8)
        )  # needs a cavity slot


def test_prerwa_quadratic_term_changes_generator():
    red = _d19_reduced()
    trunc = TruncationSpec(dim_mech=10, dim_cav=3)
    off = build_prerwa_liouvillian(red, 2000.0, 1.0, 1.0, trunc)
    on = build_prerwa_liouvillian(
        red, 2000.0, 1.0, 1.0, trunc, include_quadratic_fluctuation=True
    )
    assert (off.matrix - on.matrix).nnz > 0


def test_triplet_round_trip(tmp_path):
    sup = build_reduced_liouvillian(3.0, 1.0, TruncationSpec(dim_mech=8))
    path = tmp_path / "liouvillian.txt"
    write_triplets(sup, path)
    header = path.read_text().splitlines()[0]
    assert header.startswith("# model=reduced dims=1x8")
    back = read_triplets(path)
    assert back.shape == sup.matrix.shape
    diff = (back - sup.matrix).tocoo()
    assert diff.nnz == 0 or np.max(np.abs(diff.data)) <= 1e-15


def test_observables_modes_and_diagnostics():
    sup = build_two_mode_rwa_liouvillian(
        1.0, 10.0, 1.0, 0.5, TruncationSpec(dim_mech=16, dim_cav=3)
    )
    state = steady_state(sup)
    assert state.residual <= 1e-10
    for mode in ("mech", "cav"):
        rep = observables(state, mode=mode)
        assert abs(rep.populations.sum() - 1.0) <= 1e-9
        assert rep.diagnostics["model"] == "lindblad"
        assert rep.diagnostics["min_eigenvalue"] >= -1e-8
        assert 0.0 <= rep.diagnostics["top_two_population"] <= 1.0
    # the mechanical window is wide enough that its top levels are empty
    assert observables(state).diagnostics["top_two_population"] < 1e-3
    with pytest.raises(DomainError):
        observables(state, mode="both")


def test_spectral_gap_positive():
    sup = build_reduced_liouvillian(1.0, 0.5, TruncationSpec(dim_mech=8))
    assert spectral_gap(sup) > 0.0
