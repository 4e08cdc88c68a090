"""Circle-valued cocycles on a path category, kept in exact arithmetic.

Phases are stored as rational turns or rational radian multiples, so cocycle
laws can be checked with zero tolerance instead of floating-point wiggle.
"""

from fractions import Fraction

from kgt import Phase
from kgt.cocycle import (
    Coboundary,
    are_cohomologous,
    bicharacter_cocycle,
    check_cocycle,
    trivial_cocycle,
)
from kgt.kgraph import fixture_f1

g = fixture_f1()  # one vertex, one edge per color, k = 2

third = Phase.from_turns(Fraction(1, 3))
print("exact phase arithmetic:", third, "*", third, "*", third, "=", third**3)
print("as complex:", complex(third))

# a bicharacter in the degrees: c(la, mu) = theta^(d(la)_2 * d(mu)_1)
theta = Phase.from_turns(Fraction(1, 8))
c = bicharacter_cocycle(g, [[Phase.one(), Phase.one()], [theta, Phase.one()]])
rep = check_cocycle(c, cap=(3, 3), tol=0.0)
print("\nbicharacter passes the pair/triple laws:", rep.ok)

e = g.edge_path("e")
f = g.edge_path("f")
print("c(e, f) =", c(e, f), "   c(f, e) =", c(f, e))

# coboundaries: phases of the form b(la) b(mu) conj(b(la mu)) are cocycles
# that are equivalent to the trivial one
b = Coboundary(g, lambda la: Phase.from_turns(Fraction(sum(la.degree) ** 2, 8)))
db = b.delta()
print("\ndelta b is a cocycle:", check_cocycle(db, (3, 3), tol=0.0).ok)

found = are_cohomologous(db, trivial_cocycle(g), cap=(3, 3))
print("recognized as a coboundary:", isinstance(found, Coboundary))
# the witness is normalized to 1 on color-1 edges; it can differ from the
# original b by any character, and both have the same coboundary
print("recovered b on e:", found(e), "  original b on e:", b(e))
print("same coboundary anyway:", found.delta()(e, f) == db(e, f))

# the bicharacter with theta = 1/8 turn is NOT a coboundary
verdict = are_cohomologous(c, trivial_cocycle(g), cap=(3, 3))
print("\nbicharacter cohomologous to trivial:", isinstance(verdict, Coboundary))
print("obstruction:", verdict.reason if not isinstance(verdict, Coboundary) else "-")
