#!/usr/bin/env python3
"""Independent oracle for dyadic-module example values.

Replicates the contracted construction in pure Python:
  greedy maximal delta^k-separated nets, coarse-to-fine, seeded by the
  previous level, ascending-index candidate order (admit when the distance
  to every selected point is >= delta^k); top-down nearest-center cube
  assignment with lowest-index tie-break.
Printed values are frozen into tests/test_dyadic.cpp.
"""
import math


def greedy_net(d, seed, thresh):
    sel = list(seed)
    for c in range(len(d)):
        if c in sel:
            continue
        if all(d[c][s] >= thresh for s in sel):
            sel.append(c)
    return sorted(sel)


def build_nets(d, delta, k_cap=24):
    nets = []
    prev = []
    for k in range(k_cap + 1):
        cur = greedy_net(d, prev, delta**k)
        nets.append(cur)
        prev = cur
        if len(cur) == len(d):
            break
    return nets


def assign_cubes(d, nets):
    """Returns per level: list of cubes (sorted point lists) aligned with net order."""
    kmax = len(nets) - 1
    # parent center choice per level transition, then points attach at deepest level.
    center_parent = []  # level k+1 center index -> position in nets[k]
    for k in range(kmax):
        m = []
        for z in nets[k + 1]:
            best = min(range(len(nets[k])), key=lambda a: (d[z][nets[k][a]], a))
            m.append(best)
        center_parent.append(m)
    point_leaf = []
    for x in range(len(d)):
        best = min(range(len(nets[kmax])), key=lambda a: (d[x][nets[kmax][a]], a))
        point_leaf.append(best)
    cubes = [[[] for _ in nets[k]] for k in range(kmax + 1)]
    for x in range(len(d)):
        a = point_leaf[x]
        cubes[kmax][a].append(x)
    for k in range(kmax - 1, -1, -1):
        for child, par in enumerate(center_parent[k]):
            cubes[k][par].extend(cubes[k + 1][child])
    return [[sorted(c) for c in lvl] for lvl in cubes]


def sandwich(d, nets, cubes, delta):
    """(c_achieved, C_achieved) per level; c uses min distance to outside, C closed-ball max."""
    out = []
    n = len(d)
    for k, lvl in enumerate(cubes):
        c_lv, C_lv = math.inf, 0.0
        for a, cube in enumerate(lvl):
            z = nets[k][a]
            C_lv = max(C_lv, max(d[z][y] for y in cube) / delta**k)
            outside = [y for y in range(n) if y not in cube]
            if outside:
                c_lv = min(c_lv, min(d[z][y] for y in outside) / delta**k)
        out.append((c_lv, C_lv))
    return out


def report(name, d, delta):
    nets = build_nets(d, delta)
    cubes = assign_cubes(d, nets)
    print(f"{name}: delta={delta} net sizes={[len(x) for x in nets]} K_max={len(nets)-1}")
    print(f"  level-0 cubes = {cubes[0]}")
    if len(cubes) > 1:
        print(f"  level-1 cubes = {cubes[1]}")
    print(f"  sandwich (c_ach, C_ach) per level = {sandwich(d, nets, cubes, delta)}")
    return nets, cubes


def grid(n, spacing=1.0):
    return [[abs(i - j) * spacing for j in range(n)] for i in range(n)]


# two points at distance 1, delta = 1/12
report("twopoint", grid(2), 1.0 / 12)

# 8-point unit-spacing grid, delta = 1/16 -> X^0 = all 8, K_max = 0
report("grid8_unit", grid(8), 1.0 / 16)

# 8-point default-spacing grid (1/8), delta = 1/16
nets8, cubes8 = report("grid8_default", grid(8, 1.0 / 8), 1.0 / 16)
# j0: minimal j >= 1 with delta^j <= (2A0)^-4 * C_nat, A0=1, C_nat=2
j0 = 1
while (1.0 / 16) ** j0 > (1.0 / 16) * 2:
    j0 += 1
print("grid8_default j0 =", j0, " subcube count of level-0 cube =", len(cubes8[min(j0, len(cubes8) - 1)]))

# designed 4-point space: positions 0, 1/32, 1/2, 17/32
pos = [0.0, 1.0 / 32, 1.0 / 2, 17.0 / 32]
d4 = [[abs(a - b) for b in pos] for a in pos]
report("fourpoint", d4, 1.0 / 16)

# grid1d(256) at default spacing 1/256
nets256, cubes256 = report("grid256", grid(256, 1.0 / 256), 1.0 / 16)
print("grid256 level-1 net =", nets256[1][:8], "...", nets256[1][-1])
