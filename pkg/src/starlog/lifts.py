"""Continuation of multivalued scalar data over domain grids.

Lifted fields store one complex value per grid node, exact there by
construction: log lifts snap to Log(u) + 2 pi i k and mu lifts end on a
Newton-polished root, so verification at nodes sees no continuation drift.
Between nodes the fields interpolate bicubically and refuse to extrapolate.

Continuation runs breadth first over the grid graph.  Each edge advances the
lifted coordinate by a principal step; when the step exceeds the safety angle
pi/4 the edge is bisected adaptively (re-evaluating the target at midpoints)
up to a depth limit.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .domain import BasicDomainSpec
from .errors import BranchPointHit, LiftStep, OutsideDomain, Vanishing
from .branches import mu, nu

SAFETY = math.pi / 4
MAX_DEPTH = 10
TWO_PI = 2.0 * math.pi
_NODE_SNAP = 1e-7  # fraction of h


@dataclass
class LiftedScalarField:
    """A scalar field over a domain grid, exact at nodes."""

    domain: BasicDomainSpec
    values: np.ndarray
    kind: str  # "log" | "angle" | "mu" | "derived"
    base_node: int
    refinement_level: int
    max_step: float
    name: str = "field"

    def sample(self, zs) -> np.ndarray:
        """Values at arbitrary leaf points; node queries are exact."""
        flat = np.asarray(zs, dtype=complex).ravel()
        lower = flat.imag < 0
        pts = np.where(lower, np.conj(flat), flat)
        d = self.domain
        fx = (pts.real - d.xs[0]) / d.h
        fy = (pts.imag - d.ys[0]) / d.h
        ix = np.rint(fx).astype(int)
        iy = np.rint(fy).astype(int)
        on_node = (np.abs(fx - ix) < _NODE_SNAP) & (np.abs(fy - iy) < _NODE_SNAP)
        on_node &= (ix >= 0) & (ix < d.xs.size) & (iy >= 0) & (iy < d.ys.size)
        ixc = np.clip(ix, 0, d.xs.size - 1)
        iyc = np.clip(iy, 0, d.ys.size - 1)
        node_ids = np.where(on_node, d.node_index[iyc, ixc], -1)
        hit = node_ids >= 0
        out = np.empty(pts.shape, dtype=complex)
        out[hit] = self.values[node_ids[hit]]
        for i in np.nonzero(~hit)[0]:
            out[i] = self._interp(pts[i].real, pts[i].imag)
        out = np.where(lower, np.conj(out), out)
        return out.reshape(np.shape(zs))

    def _interp(self, x: float, y: float) -> complex:
        d = self.domain
        gx = (x - d.xs[0]) / d.h
        gy = (y - d.ys[0]) / d.h
        i0 = int(math.floor(gx))
        j0 = int(math.floor(gy))
        tx = gx - i0
        ty = gy - j0
        val = self._window(i0 - 1, j0 - 1, 4, _cubic_weights(tx), _cubic_weights(ty))
        if val is not None:
            return val
        val = self._window(i0, j0, 2, np.array([1 - tx, tx]), np.array([1 - ty, ty]))
        if val is not None:
            return val
        raise OutsideDomain(
            f"point {x + 1j * y} has no complete interpolation stencil in {self.name}"
        )

    def _window(self, i0: int, j0: int, size: int, wx, wy):
        d = self.domain
        if i0 < 0 or j0 < 0 or i0 + size > d.xs.size or j0 + size > d.ys.size:
            return None
        idx = d.node_index[j0 : j0 + size, i0 : i0 + size]
        if (idx < 0).any():
            return None
        return complex(wy @ self.values[idx] @ wx)

    def as_json(self) -> dict:
        return {
            "kind": self.kind,
            "name": self.name,
            "nodes": int(self.values.size),
            "base": [
                float(self.domain.node_x[self.base_node]),
                float(self.domain.node_y[self.base_node]),
            ],
            "refinement_level": int(self.refinement_level),
            "max_step": float(self.max_step),
        }


def _cubic_weights(t: float) -> np.ndarray:
    """Lagrange weights for uniform nodes at -1, 0, 1, 2."""
    return np.array(
        [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -t * (t + 1.0) * (t - 2.0) / 2.0,
            t * (t + 1.0) * (t - 1.0) / 6.0,
        ]
    )


def _adjacency(domain: BasicDomainSpec) -> list[list[int]]:
    idx = domain.node_index
    adj: list[list[int]] = [[] for _ in range(domain.n_nodes)]
    mask = domain.mask
    pairs = []
    right = mask[:, :-1] & mask[:, 1:]
    pairs.append((idx[:, :-1][right], idx[:, 1:][right]))
    up = mask[:-1, :] & mask[1:, :]
    pairs.append((idx[:-1, :][up], idx[1:, :][up]))
    for a, b in pairs:
        for m, n in zip(a, b):
            adj[m].append(n)
            adj[n].append(m)
    return adj


def _bfs(domain: BasicDomainSpec, base_node: int, base_value: complex, advance):
    """Continue values over the grid graph; advance(n1, v1, n2) -> (v2, depth, step)."""
    values = np.full(domain.n_nodes, np.nan, dtype=complex)
    values[base_node] = base_value
    adj = _adjacency(domain)
    max_depth = 0
    max_step = 0.0
    queue = deque([base_node])
    seen = np.zeros(domain.n_nodes, dtype=bool)
    seen[base_node] = True
    while queue:
        n1 = queue.popleft()
        for n2 in adj[n1]:
            if seen[n2]:
                continue
            v2, depth, step = advance(n1, values[n1], n2)
            values[n2] = v2
            max_depth = max(max_depth, depth)
            max_step = max(max_step, step)
            seen[n2] = True
            queue.append(n2)
    if not seen.all():
        raise LiftStep("grid graph is not connected; domain validation should have caught this")
    return values, max_depth, max_step


# ---------------------------------------------------------------------------
# logarithm lift


def lift_log(
    u,
    domain: BasicDomainSpec,
    base_node: int | None = None,
    base_value: complex | None = None,
    name: str = "log",
) -> LiftedScalarField:
    """Continuous logarithm of a nonvanishing scalar function over the grid.

    ``u`` maps complex arrays to complex arrays.  The base value defaults to
    the principal logarithm at a real-axis node (slice domains) or an interior
    node (product domains).
    """
    t_nodes = np.asarray(u(domain.node_z), dtype=complex)
    if not np.all(np.isfinite(t_nodes)) or np.min(np.abs(t_nodes)) < 1e-300:
        raise Vanishing(f"{name}: target vanishes or is not finite on the grid")

    if base_node is None:
        reals = domain.real_nodes
        base_node = int(reals[reals.size // 2]) if reals.size else domain.interior_node()
    if base_value is None:
        base_value = complex(np.log(t_nodes[base_node]))
    else:
        base_value = _snap_log(complex(base_value), complex(t_nodes[base_node]))

    def u_scalar(z: complex) -> complex:
        return complex(np.asarray(u(np.array([z], dtype=complex)))[0])

    zs = domain.node_z

    def advance(n1, v1, n2):
        t2 = complex(t_nodes[n2])
        v2, depth = _log_walk(
            u_scalar, zs[n1], complex(t_nodes[n1]), complex(v1), zs[n2], t2, 0, name
        )
        step = abs(v2.imag - complex(v1).imag)
        return _snap_log(v2, t2), depth, step

    values, max_depth, max_step = _bfs(domain, base_node, base_value, advance)
    return LiftedScalarField(domain, values, "log", base_node, max_depth, max_step, name)


def _log_walk(u_scalar, za, ta, va, zb, tb, depth, name):
    if ta == 0 or tb == 0 or not (np.isfinite(ta) and np.isfinite(tb)):
        raise Vanishing(f"{name}: target vanishes near {za}..{zb}")
    delta = np.log(tb / ta)
    if abs(delta.imag) < SAFETY:
        return va + delta, depth
    if depth >= MAX_DEPTH:
        raise LiftStep(f"{name}: step too large between {za} and {zb} at depth {depth}")
    zm = 0.5 * (za + zb)
    tm = u_scalar(zm)
    vm, d1 = _log_walk(u_scalar, za, ta, va, zm, tm, depth + 1, name)
    return _log_walk(u_scalar, zm, tm, vm, zb, tb, d1, name)


def _snap_log(v: complex, t: complex) -> complex:
    principal = complex(np.log(t))
    k = round((v.imag - principal.imag) / TWO_PI)
    return principal + 1j * TWO_PI * k


# ---------------------------------------------------------------------------
# angle lift through the circle u^2 + v^2 = 1


def lift_angle(
    uv,
    domain: BasicDomainSpec,
    base_node: int | None = None,
    base_value: complex | None = None,
    name: str = "angle",
) -> LiftedScalarField:
    """Continuous angle phi with (cos, sin)(phi) = (u, v) over the grid.

    The circle embeds in the punctured plane through w = u + iv, so the angle
    is -i times a continuous logarithm of w.
    """

    def w(zs):
        u_vals, v_vals = uv(zs)
        return np.asarray(u_vals, dtype=complex) + 1j * np.asarray(v_vals, dtype=complex)

    log_base = None if base_value is None else 1j * complex(base_value)
    fld = lift_log(w, domain, base_node=base_node, base_value=log_base, name=name)
    return LiftedScalarField(
        domain,
        -1j * fld.values,
        "angle",
        fld.base_node,
        fld.refinement_level,
        fld.max_step,
        name,
    )


# ---------------------------------------------------------------------------
# mu lift (branch-free inverse of mu along the grid)


PSI_CHART = 0.8
_BP_TOL = 1e-9


def lift_mu(
    t_fn,
    domain: BasicDomainSpec,
    seed: complex,
    name: str = "mu",
) -> LiftedScalarField:
    """Continuous G with mu(G) = t over the grid and G(seed) in the principal patch.

    The seed must be a point where t is close to 1 (G close to 0).  Branch
    points of the inverse are the fold values t = -1 (always) and t = +1 away
    from the seed sphere; hitting either aborts with BranchPointHit.
    """
    t_nodes = np.asarray(t_fn(domain.node_z), dtype=complex)
    near_minus = np.abs(t_nodes + 1.0) <= _BP_TOL
    if near_minus.any():
        z_bad = domain.node_z[near_minus][0]
        raise BranchPointHit(f"{name}: t attains -1 near {z_bad}")

    base_node = domain.nearest_node(seed)
    t0 = complex(t_nodes[base_node])
    g0 = complex(np.arccos(t0 + 0j) ** 2)
    g0 = _polish_G(g0, t0)
    if g0 is None:
        raise BranchPointHit(f"{name}: cannot seed the principal patch at {seed}")

    def t_scalar(z: complex) -> complex:
        return complex(np.asarray(t_fn(np.array([z], dtype=complex)))[0])

    zs = domain.node_z

    def advance(n1, v1, n2):
        t2 = complex(t_nodes[n2])
        g2, depth = _mu_walk(t_scalar, zs[n1], complex(t_nodes[n1]), complex(v1), zs[n2], t2, 0, name)
        step = abs(np.sqrt(complex(g2)) - np.sqrt(complex(v1)))
        return g2, depth, step

    values, max_depth, max_step = _bfs(domain, base_node, g0, advance)
    return LiftedScalarField(domain, values, "mu", base_node, max_depth, max_step, name)


def _mu_walk(t_scalar, za, ta, ga, zb, tb, depth, name):
    g2 = _mu_step(ga, tb)
    if g2 is not None:
        return g2, depth
    if depth >= MAX_DEPTH:
        if min(abs(tb - 1.0), abs(tb + 1.0)) < 1e-6:
            raise BranchPointHit(f"{name}: fold value t = {tb} reached near {zb}")
        raise LiftStep(f"{name}: continuation stalled between {za} and {zb}")
    zm = 0.5 * (za + zb)
    tm = t_scalar(zm)
    gm, d1 = _mu_walk(t_scalar, za, ta, ga, zm, tm, depth + 1, name)
    return _mu_walk(t_scalar, zm, tm, gm, zb, tb, d1, name)


def _mu_step(g1: complex, t2: complex):
    """One continuation step to the root of mu(G) = t2 nearest to g1, or None."""
    psi1 = complex(np.sqrt(g1 + 0j))
    if abs(psi1) < PSI_CHART:
        g2 = _polish_G(g1, t2)
        if g2 is not None and abs(g2 - g1) <= 1.0:
            return g2
        return None
    psi = psi1
    for _ in range(40):
        s = complex(np.sin(psi))
        if abs(s) < 1e-12:
            return None
        step = (complex(np.cos(psi)) - t2) / s
        psi = psi + step
        if abs(step) <= 1e-14 * (1.0 + abs(psi)):
            break
    else:
        return None
    if abs(psi - psi1) >= SAFETY:
        return None
    return psi * psi


def _polish_G(g: complex, t: complex):
    """Newton iterations for mu(G) = t in the G chart; None when singular."""
    for _ in range(40):
        d = complex(nu(g))
        if abs(d) < 1e-12:
            return None
        step = 2.0 * (complex(mu(g)) - t) / d
        g = g + step
        if abs(step) <= 1e-14 * (1.0 + abs(g)):
            return g
    return None


# ---------------------------------------------------------------------------
# derived fields


def derived_field(base: LiftedScalarField, values: np.ndarray, name: str) -> LiftedScalarField:
    """A field sharing the grid of ``base`` with transformed node values."""
    return LiftedScalarField(
        base.domain,
        np.asarray(values, dtype=complex),
        "derived",
        base.base_node,
        base.refinement_level,
        base.max_step,
        name,
    )
