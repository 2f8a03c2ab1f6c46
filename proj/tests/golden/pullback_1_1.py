# generated-by: tautring 0.1.0 input-sha256:831253bdf78bc673682bc8468b0d83a7581bcc118e9e9a737bfda4014afdc6ea
# Decorated boundary strata on Mbar_{2,0}; intended comparisons live in the compact-type quotient.
from admcycles import StableGraph, psiclass, lambdaclass, kappaclass, fundclass
from fractions import Fraction

g, n = 2, 0

terms = []
terms.append(Fraction(1, 1) * StableGraph([1, 1], [[1], [2]], [(1, 2)]).boundary_pushforward([fundclass(1, 1), fundclass(1, 1)]))

total = sum(terms[1:], terms[0])
print(total)

# comparison against the closed-form projected product class
target = Fraction(10, 1) * lambdaclass(1, g, n)
diff = total - target
print('difference in the compact-type basis:')
print(diff.toTautbasis(g, n, 1, moduli='ct'))
