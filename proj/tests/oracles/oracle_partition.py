#!/usr/bin/env python3
"""Independent oracle for Whitney-cover / partition-of-unity example values.

  - hand-made 2-ball cover of Omega={1..5} in the 7-point unit grid:
    tent bumps, normalized weights, value at the shared point
  - Whitney cover of Omega = grid8 \\ {7} (spacing 1/8), A = 16
Printed values are frozen into tests/test_decompose.cpp.
"""
import math

# ---- hand cover: centers {2,4}, radii 1.2, A0 = 1 ----
n = 7
d = [[float(abs(i - j)) for j in range(n)] for i in range(n)]
omega = [1, 2, 3, 4, 5]
centers, rad = [2, 4], 1.2
A0 = 1.0


def psi(cx, x):
    num = 2 * A0 * rad - d[cx][x]
    den = (2 * A0 - 1) * rad
    return min(1.0, max(0.0, num / den))


cov = [[y for y in range(n) if d[c][y] < rad] for c in centers]
print("balls =", cov, " union =", sorted(set(cov[0]) | set(cov[1])))
for x in omega:
    tot = sum(psi(c, x) for c in centers)
    print(f"phi at {x}:", [psi(c, x) / tot for c in centers])
L0 = max(sum(1 for c in centers if d[c][x] < rad) for x in omega)
print("L0 =", L0)

# ---- Whitney on grid8 spacing 1/8, Omega = all but point 7 ----
n = 8
sp = 1.0 / 8
d = [[abs(i - j) * sp for j in range(n)] for i in range(n)]
omega = list(range(7))
A, A0 = 16.0, 1.0
r = {x: min(d[x][y] for y in range(n) if y not in omega) / (2 * A * A0) for x in omega}
print("whitney radii r(x) = d(x,comp)/(2*16) :", [r[x] for x in omega])
order = sorted(omega, key=lambda x: (-r[x], x))
chosen = []
for x in order:
    shrunk = r[x] / (5 * A0**3)
    ok = True
    for y in chosen:
        # disjoint shrunken balls: strict-ball intersection test on a finite grid
        if any(d[x][z] < shrunk and d[y][z] < r[y] / 5 for z in range(n)):
            ok = False
            break
    if ok:
        chosen.append(x)
covered = sorted({z for x in chosen for z in range(n) if d[x][z] < r[x]})
print("whitney selected =", sorted(chosen), " covered =", covered, " omega =", omega)
