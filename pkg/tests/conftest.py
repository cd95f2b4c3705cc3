import sympy
from hypothesis import HealthCheck, settings

from braidmf.algebra import Poly

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def to_sympy(p):
    """Independent conversion: build the rational function straight from the exponent dicts."""
    R = p.ring
    syms = sympy.symbols(R.names)

    def raw(d):
        return sum(sympy.Rational(c.numerator, c.denominator)
                   * sympy.Mul(*[s ** e for s, e in zip(syms, m)]) for m, c in d.items())

    den = sympy.Integer(1)
    for raw_inv, k in zip(R.inv_raw, p.den):
        den *= raw(raw_inv) ** k
    return raw(p.num) / den


def sympy_equal(p, expr):
    return sympy.simplify(sympy.together(to_sympy(p) - expr)) == 0


def poly_from(ring, terms):
    return Poly(ring, {tuple(m): c for m, c in terms})


# one "criterion N: PASS/FAIL" line per acceptance criterion, printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
