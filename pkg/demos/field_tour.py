"""A short walk through GF(p^n): elements, tables, roots of unity."""

from permfam import Field

f = Field(3, 3)
print(f"{f!r}: q = {f.q}, modulus {f.modulus}, primitive root {f.primitive_root}")

x = f.element([0, 1, 0])
print("x^3 =", f.pow(x, 3), "digits", f.coords(f.pow(x, 3)))

ctx = f.roots_of_unity(13)
print("mu_13 =", ctx.elements)
zeta = ctx.power(5)
print("dlog of omega^5:", ctx.dlog(zeta))

big = Field(1000003)
mu = big.roots_of_unity(max(big.order_factors))
print(f"BSGS in a subgroup of order {mu.d}: dlog = {mu.dlog(mu.power(12345))}")
