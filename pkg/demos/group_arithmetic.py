"""Arithmetic in Gamma_A for A = [[2, 3], [4, 5]] and in BS(1, 2)."""
from abcrigid.group import GroupElement, IntegerMatrix, conjugate_power, from_word, relators, to_word

A = IntegerMatrix(((2, 3), (4, 5)))
a, b1 = GroupElement.a(A), GroupElement.b(A, 1)

print("a * b1             =", a * b1)
print("a * a^-1           =", a * a.inverse())
for r in relators(A):
    print(f"relator {str(r):28s} -> {from_word(r, A)}")

# a^k b1 a^-k is a pure translation whose exponents are row 1 of A^k
for k in range(1, 5):
    print(f"a^{k} b1 a^-{k} = b^{conjugate_power(A, 1, k)}")

bs = IntegerMatrix(((2,),))
half = from_word("a^-1 b a", bs)
print("\nBS(1,2): a^-1 b a   =", half, " as a word:", to_word(half))
print("its square          =", half * half)
