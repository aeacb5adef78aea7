"""The cup product of cochains and its failure to be associative.

The product of two simplices sharing one vertex is their union, weighted by
j! k! / (j + k + 1)!. It coincides with integrating the wedge of the two
Whitney forms, is graded commutative and satisfies the Leibniz rule, but it
is not associative. The defect shrinks under refinement.
"""
from fractions import Fraction

import numpy as np

from cochaincalc import basis_cochain, cup, cup_cochains, interval, whitney_cup_cochains
from cochaincalc.convergence import associativity_defect, level_meshes
from cochaincalc.forms import torus_function, torus_function2, torus_one_form

print("products of single simplices:")
for s, t in [([0], [0]), ([0], [0, 1]), ([0, 1], [1, 2]), ([1, 2], [0, 1]), ([0, 1], [2, 3])]:
    res = cup(s, t)
    print(f"  {s} ∪ {t} = " + ("0" if res is None else f"{res[1]} * {list(res[0])}"))

cx = interval(1).complex
a = basis_cochain(cx, 0, (0,), dtype=object)
e = basis_cochain(cx, 1, (0, 1), dtype=object)
left = cup_cochains(cup_cochains(a, a, cx), e, cx).values[0]
right = cup_cochains(a, cup_cochains(a, e, cx), cx).values[0]
print(f"\non one edge with a = [v0]: (a ∪ a) ∪ e = {left}, a ∪ (a ∪ e) = {right}")
print("R(W a ^ W(a ∪ e)) gives the same right-hand side:",
      whitney_cup_cochains(a, cup_cochains(a, e, cx), cx).values[0] == Fraction(1, 4))

print("\nassociativity defect of R f ∪ R g ∪ R w on refined flat tori:")
forms = [torus_function(), torus_function2(), torus_one_form()]
rows = associativity_defect(forms, level_meshes("torus", [2, 3, 4, 5]))
for eta, d in rows:
    print(f"  mesh size {eta:.4f}: defect {d:.3e}")
etas, defects = np.array(rows).T
print(f"  observed order: {np.polyfit(np.log(etas[1:]), np.log(defects[1:]), 1)[0]:.2f}")
