import numpy as np
import pytest

from dilation_lab import (DiagonalState, PreconditionError, SchurSymbol,
                          ShapeError, build_dilation,
                          convex_combination_dilation, star_swap_check,
                          verify_even_closure, verify_factorization,
                          verify_morphism_markov)
from dilation_lab.matcore import dagger, matrix_unit, max_abs

T2 = np.array([[1.0, 0.5], [0.5, 1.0]])
UNIFORM2 = DiagonalState([0.5, 0.5])

T3 = np.array([[1.0, 0.3, 0.1],
               [0.3, 1.0, 0.4],
               [0.1, 0.4, 1.0]])
STATE3 = DiagonalState([0.5, 0.3, 0.2])


def test_worked_off_diagonal_pairing():
    # phi~(pi(e01) rho(e10)) recovers w_0 t_01 = 0.5 * 0.5
    bundle = build_dilation(SchurSymbol(T2), UNIFORM2)
    value = bundle.ambient_phi(bundle.pi(matrix_unit(2, 0, 1))
                               @ bundle.rho(matrix_unit(2, 1, 0)))
    assert abs(value - 0.25) < 1e-12


def test_factorization_recovers_the_map():
    assert verify_factorization(build_dilation(SchurSymbol(T2), UNIFORM2),
                                SchurSymbol(T2), UNIFORM2, seed=1) < 1e-12
    assert verify_factorization(build_dilation(SchurSymbol(T3), STATE3),
                                SchurSymbol(T3), STATE3, seed=1) < 1e-12


def test_generator_is_a_symmetry_in_the_centralizer():
    bundle = build_dilation(SchurSymbol(T2), UNIFORM2)
    d = bundle.d
    assert max_abs(d - dagger(d)) < 1e-12
    assert max_abs(d @ d - np.eye(bundle.ambient_dim)) < 1e-12
    rho_amb = bundle.ambient_state.density()
    assert max_abs(d @ rho_amb - rho_amb @ d) < 1e-12


def test_morphism_reports_vanish():
    bundle = build_dilation(SchurSymbol(T3), STATE3)
    reports = verify_morphism_markov(bundle, samples=6, seed=3)
    assert set(reports) == {"pi", "rho"}
    for rep in reports.values():
        assert rep.max_residual() < 1e-10


def test_star_swap_between_the_two_legs():
    t = np.array([[1.0, 0.7], [0.7, 1.0]])
    state = DiagonalState([0.6, 0.4])
    bundle = build_dilation(SchurSymbol(t), state)
    assert star_swap_check(bundle, SchurSymbol(t), state, samples=6,
                           seed=4) < 1e-10


def test_even_closure_of_the_image():
    bundle = build_dilation(SchurSymbol(T2), UNIFORM2)
    assert verify_even_closure(bundle) < 1e-10


def test_rank_one_symbol_collapses_the_legs():
    # the all-ones symbol has a single Gram direction, so both morphisms agree
    bundle = build_dilation(SchurSymbol(np.ones((2, 2))), UNIFORM2)
    assert bundle.gram.rank == 1
    x = matrix_unit(2, 0, 1)
    assert max_abs(bundle.pi(x) - bundle.rho(x)) < 1e-12


def test_build_rejects_uncertified_and_mismatched_inputs():
    with pytest.raises(PreconditionError):
        build_dilation(SchurSymbol([[1.0, 2.0], [2.0, 1.0]]), UNIFORM2)
    with pytest.raises(PreconditionError):
        build_dilation(SchurSymbol([[1.0, 1j], [-1j, 1.0]]), UNIFORM2)
    with pytest.raises(ShapeError):
        build_dilation(SchurSymbol(T2), STATE3)


def test_convex_combination_dilates_the_mixture():
    s1 = np.array([[1.0, 0.5], [0.5, 1.0]])
    s2 = np.array([[1.0, -0.2], [-0.2, 1.0]])
    b1 = build_dilation(SchurSymbol(s1), UNIFORM2)
    b2 = build_dilation(SchurSymbol(s2), UNIFORM2)
    mixed = convex_combination_dilation([b1, b2], [0.25, 0.75])
    blended = SchurSymbol(0.25 * s1 + 0.75 * s2)
    assert verify_factorization(mixed, blended, UNIFORM2, seed=6) < 1e-12
    assert mixed.rep is None
    with pytest.raises(PreconditionError):
        verify_even_closure(mixed)


def test_convex_combination_guards():
    b1 = build_dilation(SchurSymbol(T2), UNIFORM2)
    b2 = build_dilation(SchurSymbol(np.array([[1.0, -0.2], [-0.2, 1.0]])),
                        UNIFORM2)
    with pytest.raises(ShapeError):
        convex_combination_dilation([b1, b2], [1.0])
    with pytest.raises(PreconditionError):
        convex_combination_dilation([b1, b2], [0.5, 0.6])
    with pytest.raises(PreconditionError):
        convex_combination_dilation([b1, b2], [-0.5, 1.5])
    b3 = build_dilation(SchurSymbol(T3), STATE3)
    with pytest.raises(PreconditionError):
        convex_combination_dilation([b1, b3], [0.5, 0.5])


def test_ambient_state_restricts_to_the_input_state():
    state = DiagonalState([0.7, 0.3])
    bundle = build_dilation(SchurSymbol(np.array([[1.0, 0.4], [0.4, 1.0]])),
                            state)
    for leg in (bundle.pi, bundle.rho):
        for i in range(2):
            for j in range(2):
                x = matrix_unit(2, i, j)
                assert abs(bundle.ambient_phi(leg(x)) - state(x)) < 1e-12
