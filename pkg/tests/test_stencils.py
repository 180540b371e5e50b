import itertools

import pytest

from isat.stencils import LINEAR, QUADRATIC, STENCILS, Stencil, StencilError, fit_stencil, self_test, verify_stencil


def clause_satisfied(abc, negated):
    # negated literals are stored last
    lits = [1 - v if p >= 3 - negated else v for p, v in enumerate(abc)]
    return any(lits)


def poly(st, a, b, c, w):
    env = dict(a=a, b=b, c=c, w=w)
    total = st.constant
    for coef, name in zip(st.linear, LINEAR):
        total += coef * env[name]
    for coef, (p, q) in zip(st.quadratic, QUADRATIC):
        total += coef * env[p] * env[q]
    return total


@pytest.mark.parametrize("negated", range(4))
def test_table_has_increment_property(negated):
    st = STENCILS[negated]
    assert st.negated == negated
    for abc in itertools.product((0, 1), repeat=3):
        inc = min(poly(st, *abc, w) for w in (0, 1))
        assert inc == (0 if clause_satisfied(abc, negated) else 1)


def test_self_test_passes():
    self_test()


def test_verify_rejects_broken_stencil():
    bad = Stencil(0, (0, 0, 0, 0), (0, 0, 0, 0, 0, 0), 0)
    with pytest.raises(StencilError):
        verify_stencil(bad)


def test_fitter_reproduces_a_valid_stencil():
    st = fit_stencil(3)
    verify_stencil(st)
    assert sum(1 for q in st.quadratic if q) <= 4
