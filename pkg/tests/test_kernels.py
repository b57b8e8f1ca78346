from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nashflow import kernels

from .conftest import gauss_solve

BACKENDS = kernels.backends()

rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@pytest.fixture(params=sorted(BACKENDS))
def impl(request):
    return BACKENDS[request.param]


def test_compiled_backend_is_built():
    # the editable install builds the extension; the fallback still exists
    assert "python" in BACKENDS
    assert "cython" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_earliest_event_ties(impl):
    delta, hits = impl.earliest_event([F(1), F(2), F(1, 2)], [F(-1), F(-2), F(-1, 2)])
    assert delta == 1 and hits == [0, 1, 2]


def test_earliest_event_none(impl):
    assert impl.earliest_event([F(1)], [F(0)]) == (None, [])
    assert impl.earliest_event([], []) == (None, [])


@given(st.lists(st.tuples(rats.filter(lambda x: x > 0), rats), max_size=12))
def test_earliest_event_matches_min(pairs):
    slacks = [p[0] for p in pairs]
    rates = [p[1] for p in pairs]
    hits_times = [s / -r for s, r in pairs if r < 0]
    for impl in BACKENDS.values():
        delta, hits = impl.earliest_event(slacks, rates)
        if not hits_times:
            assert delta is None
            continue
        assert delta == min(hits_times)
        assert hits == [i for i, (s, r) in enumerate(pairs) if r < 0 and s / -r == delta]


@given(st.lists(st.tuples(rats, rats), max_size=10), rats)
def test_axpy(pairs, delta):
    vals = [p[0] for p in pairs]
    slopes = [p[1] for p in pairs]
    for impl in BACKENDS.values():
        assert impl.axpy(vals, slopes, delta) == [v + s * delta for v, s in pairs]


def test_solve_exact_rectangular(impl):
    assert impl.solve_exact([[F(1, 2), F(1)], [F(1), F(-1)], [F(2), F(0)]],
                            [F(3, 2), F(0), F(2)]) == [1, 1]
    # inconsistent extra row
    assert impl.solve_exact([[F(1)], [F(1)]], [F(1), F(2)]) is None
    # rank deficient
    assert impl.solve_exact([[F(1), F(2)], [F(2), F(4)]], [F(1), F(2)]) is None


@settings(max_examples=60)
@given(st.integers(1, 5).flatmap(
    lambda n: st.tuples(st.lists(st.lists(rats, min_size=n, max_size=n), min_size=n, max_size=n),
                        st.lists(rats, min_size=n, max_size=n))))
def test_solve_exact_agrees_with_gauss(system):
    rows, rhs = system
    want = gauss_solve(rows, rhs)
    for impl in BACKENDS.values():
        assert impl.solve_exact(rows, rhs) == want
