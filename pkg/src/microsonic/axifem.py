"""Axisymmetric finite-element machinery for the Helmholtz equation.

The meridian half-plane (r >= 0) of a spherical domain of radius ``R_dom``
is meshed with linear triangles, graded from a fine obstacle skin to the
background size.  The weak form carries the cylindrical ``r`` weight; the
axis needs no explicit boundary condition.  Outgoing waves leave through a
curvature-corrected radiation condition ``dp/dn = (ik - 1/R) p`` on the
domain sphere (exact for the monopole component; plain Sommerfeld ``ik p``
is available for comparison).

Boundary tags: obstacle faces (named per geometry), ``radiation`` and
``axis``.
"""

from __future__ import annotations

import time
import weakref
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Dict, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.spatial import Delaunay, cKDTree

from .medium import Medium
from .directivity import DirectivityPattern

GEOM_TOL = 1e-9  # m, tolerance for boundary classification


# ---------------------------------------------------------------------------
# mesh data structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AxiMesh:
    """Triangulated meridian half-plane with tagged boundary edges."""

    points: np.ndarray                 # (N, 2): columns (r, z), metres
    triangles: np.ndarray              # (M, 3) vertex indices
    boundary: Dict[str, np.ndarray]    # tag -> (E, 2) vertex-index pairs
    R_dom: float
    h_boundary: float
    h_far: float
    obstacle: str                      # "ringset" | "sphere"
    obstacle_params: tuple

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    def edge_lengths(self) -> np.ndarray:
        t = self.triangles
        e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        d = self.points[e[:, 0]] - self.points[e[:, 1]]
        return np.hypot(d[:, 0], d[:, 1])

    def max_edge(self) -> float:
        return float(self.edge_lengths().max())

    def boundary_edge_lengths(self, tag: str) -> np.ndarray:
        e = self.boundary[tag]
        d = self.points[e[:, 0]] - self.points[e[:, 1]]
        return np.hypot(d[:, 0], d[:, 1])

    def obstacle_tags(self) -> tuple:
        return tuple(t for t in self.boundary if t not in ("radiation", "axis"))

    def n_obstacle_segments(self) -> int:
        return sum(len(self.boundary[t]) for t in self.obstacle_tags())

    def elements_per_wavelength(self, f: float, c: float = 1500.0) -> float:
        return (c / f) / self.max_edge()

    def validate_for_frequency(self, f: float, c: float = 1500.0,
                               n_required: float = 30.0) -> None:
        got = self.elements_per_wavelength(f, c)
        if got < n_required:
            raise ValueError(
                f"mesh too coarse for {f/1e6:g} MHz: {got:.1f} elements per "
                f"wavelength < {n_required:g}")


# ---------------------------------------------------------------------------
# point families
# ---------------------------------------------------------------------------

def _semicircle(radius: float, spacing: float, stagger: bool = False) -> np.ndarray:
    """Points on the half-circle r >= 0 of given radius, spacing along arc."""
    if radius <= 0:
        return np.array([[0.0, 0.0]])
    n = max(int(np.ceil(np.pi * radius / spacing)), 4)
    if stagger:
        th = (np.arange(n) + 0.5) * np.pi / n
    else:
        th = np.arange(n + 1) * np.pi / n
    return np.column_stack([radius * np.sin(th), radius * np.cos(th)])


def _background_lattice(R_dom: float, h_far: float) -> np.ndarray:
    """Near-equilateral lattice over the half-disk, clipped off the rim.

    Columns of constant r (the first lies exactly on the axis), staggered
    in z; the gap to the radiation circle is healed by the fill pass.
    """
    dx = np.sqrt(3) / 2 * h_far
    cols = []
    for j in range(int(R_dom / dx) + 1):
        r = j * dx
        zmax = np.sqrt(max(R_dom**2 - r**2, 0.0))
        z0 = (j % 2) * h_far / 2
        nz = int(2 * zmax / h_far) + 2
        z = z0 + np.arange(-nz, nz + 1) * h_far
        z = z[np.abs(z) <= zmax]
        if len(z):
            cols.append(np.column_stack([np.full(len(z), r), z]))
    lat = np.vstack(cols)
    rad = np.hypot(lat[:, 0], lat[:, 1])
    return lat[rad <= R_dom - 1.05 * h_far]


def _graded_layers(offset_curve: Callable[[float, float], np.ndarray],
                   h_boundary: float, h_far: float, growth: float):
    """Offset curves at geometrically growing distance/spacing.

    ``offset_curve(t, h)`` samples the curve at distance t with spacing h.
    Returns (points, band) where band is the outermost offset distance.
    """
    pts = []
    t, h = 0.0, h_boundary
    while h < h_far:
        t += h
        h = min(h * growth, h_far)
        pts.append(offset_curve(t, h))
    return (np.vstack(pts) if pts else np.zeros((0, 2))), t


# ---------------------------------------------------------------------------
# obstacle geometries
# ---------------------------------------------------------------------------

class _SphereObstacle:
    """Half-disk of radius a centred at the origin."""

    def __init__(self, a: float):
        self.a = a
        self.params = (a,)

    def boundary_points(self, h: float) -> np.ndarray:
        return _semicircle(self.a, h)

    def offset_curve(self, t: float, h: float) -> np.ndarray:
        return _semicircle(self.a + t, h)

    def contains(self, pts: np.ndarray, pad: float = 0.0) -> np.ndarray:
        return np.hypot(pts[:, 0], pts[:, 1]) < self.a + pad

    def extent(self) -> float:
        return self.a

    def tag_edges(self, mids: np.ndarray) -> np.ndarray:
        on = np.abs(np.hypot(mids[:, 0], mids[:, 1]) - self.a) < 0.5 * self.a
        return np.where(on, "surface", "")

    tags = ("surface",)


class _RingsetObstacle:
    """Rectangular annulus cross-section [R_inner, R_outer] x [-L/2, L/2]."""

    def __init__(self, R_inner: float, R_outer: float, length: float):
        self.ri, self.ro, self.L = R_inner, R_outer, length
        self.params = (R_inner, R_outer, length)

    def boundary_points(self, h: float) -> np.ndarray:
        corners = [(self.ro, -self.L / 2), (self.ro, self.L / 2),
                   (self.ri, self.L / 2), (self.ri, -self.L / 2)]
        pts = []
        for i in range(4):
            p0 = np.asarray(corners[i])
            p1 = np.asarray(corners[(i + 1) % 4])
            n = int(np.ceil(np.linalg.norm(p1 - p0) / h))
            s = np.arange(n)[:, None] / n
            pts.append(p0 + (p1 - p0) * s)
        return np.vstack(pts)

    def offset_curve(self, t: float, h: float) -> np.ndarray:
        ri, ro, L = self.ri, self.ro, self.L
        pts = []
        segs = [((ro + t, -L / 2), (ro + t, L / 2)),
                ((ri, L / 2 + t), (ro, L / 2 + t)),
                ((ri - t, L / 2), (ri - t, -L / 2)),
                ((ro, -L / 2 - t), (ri, -L / 2 - t))]
        arcs = [((ro, L / 2), 0.0), ((ri, L / 2), np.pi / 2),
                ((ri, -L / 2), np.pi), ((ro, -L / 2), 3 * np.pi / 2)]
        for p0, p1 in segs:
            p0, p1 = np.asarray(p0), np.asarray(p1)
            n = int(np.ceil(np.linalg.norm(p1 - p0) / h))
            s = np.arange(n)[:, None] / n
            pts.append(p0 + (p1 - p0) * s)
        for (cen, a0) in arcs:
            n = max(int(np.ceil(t * (np.pi / 2) / h)), 2)
            ang = a0 + (np.arange(n) / n) * np.pi / 2
            pts.append(np.column_stack([cen[0] + t * np.cos(ang),
                                        cen[1] + t * np.sin(ang)]))
        return np.vstack(pts)

    def contains(self, pts: np.ndarray, pad: float = 0.0) -> np.ndarray:
        return ((pts[:, 0] > self.ri - pad) & (pts[:, 0] < self.ro + pad)
                & (np.abs(pts[:, 1]) < self.L / 2 + pad))

    def extent(self) -> float:
        return float(np.hypot(self.ro, self.L / 2))

    def tag_edges(self, mids: np.ndarray) -> np.ndarray:
        tags = np.full(len(mids), "", dtype=object)
        tol = GEOM_TOL
        on_outer = np.abs(mids[:, 0] - self.ro) < tol
        on_inner = np.abs(mids[:, 0] - self.ri) < tol
        on_top = (np.abs(mids[:, 1] - self.L / 2) < tol)
        on_bot = (np.abs(mids[:, 1] + self.L / 2) < tol)
        tags[on_outer & (np.abs(mids[:, 1]) < self.L / 2)] = "outer"
        tags[on_inner & (np.abs(mids[:, 1]) < self.L / 2)] = "inner"
        tags[on_top & (mids[:, 0] > self.ri) & (mids[:, 0] < self.ro)] = "end_top"
        tags[on_bot & (mids[:, 0] > self.ri) & (mids[:, 0] < self.ro)] = "end_bottom"
        return tags

    tags = ("outer", "inner", "end_top", "end_bottom")


# ---------------------------------------------------------------------------
# mesh generation
# ---------------------------------------------------------------------------

def _boundary_edges_of(tris: np.ndarray) -> np.ndarray:
    edges = np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    se = np.sort(edges, axis=1)
    _, idx, cnt = np.unique(se, axis=0, return_index=True, return_counts=True)
    return edges[idx[cnt == 1]]


def _build_mesh(obstacle, R_dom: float, h_boundary: float, h_far: float,
                growth: float = 1.4, smooth_iters: int = 3,
                fill_rounds: int = 5, name: str = "") -> AxiMesh:
    skin = obstacle.boundary_points(h_boundary)
    layers, band = _graded_layers(obstacle.offset_curve, h_boundary, h_far, growth)
    circle = _semicircle(R_dom, h_far)
    lattice = _background_lattice(R_dom, h_far)

    fixed_pts = np.vstack([skin, layers, circle])
    n_fixed = len(fixed_pts)
    fixed_tree = cKDTree(np.vstack([skin, layers]))

    # drop background points that crowd the graded skin or fall inside it
    d, _ = fixed_tree.query(lattice)
    keep = (d >= 0.65 * h_far) & ~obstacle.contains(lattice, pad=band)
    free_pts = lattice[keep]

    pts = np.vstack([fixed_pts, free_pts])

    def retriangulate(p):
        tri = Delaunay(p)
        t = tri.simplices
        cen = p[t].mean(axis=1)
        inside = (np.hypot(cen[:, 0], cen[:, 1]) < R_dom) & (cen[:, 0] > -GEOM_TOL)
        keep = inside & ~obstacle.contains(cen)
        return t[keep]

    def smooth(p, t, rounds):
        # Laplacian relaxation of the free points at fixed topology
        free = np.arange(len(p)) >= n_fixed
        onaxis = np.abs(p[:, 0]) < GEOM_TOL
        for _ in range(rounds):
            acc = np.zeros_like(p)
            cnt = np.zeros(len(p))
            for e in ((0, 1), (1, 2), (2, 0)):
                i, j = t[:, e[0]], t[:, e[1]]
                np.add.at(acc, i, p[j])
                np.add.at(cnt, i, 1)
                np.add.at(acc, j, p[i])
                np.add.at(cnt, j, 1)
            upd = p.copy()
            mask = free & (cnt > 0)
            upd[mask] = acc[mask] / cnt[mask, None]
            upd[free & onaxis, 0] = 0.0
            # do not let smoothing push points into the obstacle skin
            bad = obstacle.contains(upd, pad=0.25 * h_boundary) & free
            upd[bad] = p[bad]
            p = upd
        return p

    def long_edges(p, t):
        e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e = np.unique(np.sort(e, axis=1), axis=0)
        lens = np.hypot(*(p[e[:, 0]] - p[e[:, 1]]).T)
        return e[lens > 1.1 * h_far]

    tris = retriangulate(pts)
    pts = smooth(pts, tris, smooth_iters)
    tris = retriangulate(pts)
    # smoothing equilibrates almost everywhere but leaves isolated seam
    # deficits; split those by midpoint insertion, with no further smoothing
    # so the splits cannot re-stretch
    for _ in range(fill_rounds):
        over = long_edges(pts, tris)
        if len(over) == 0:
            break
        mids = 0.5 * (pts[over[:, 0]] + pts[over[:, 1]])
        d, _ = fixed_tree.query(mids)
        rad = np.hypot(mids[:, 0], mids[:, 1])
        ok = (d > 0.35 * h_far) & (rad < R_dom - 0.3 * h_far) \
            & ~obstacle.contains(mids) & (mids[:, 0] > -GEOM_TOL)
        mids = mids[ok]
        mids[np.abs(mids[:, 0]) < 0.3 * h_far, 0] = 0.0
        if len(mids) == 0:
            break
        pts = np.vstack([pts, mids])
        tris = retriangulate(pts)

    # compact to referenced nodes
    used = np.unique(tris)
    remap = -np.ones(len(pts), dtype=int)
    remap[used] = np.arange(len(used))
    pts, tris = pts[used], remap[tris]

    # snap and classify boundary edges
    bedges = _boundary_edges_of(tris)
    mids = 0.5 * (pts[bedges[:, 0]] + pts[bedges[:, 1]])
    radm = np.hypot(mids[:, 0], mids[:, 1])
    boundary: Dict[str, np.ndarray] = {}
    on_rad = np.abs(radm - R_dom) < 0.45 * h_far
    on_axis = np.abs(mids[:, 0]) < GEOM_TOL
    boundary["radiation"] = bedges[on_rad]
    boundary["axis"] = bedges[on_axis & ~on_rad]
    rest = bedges[~on_rad & ~on_axis]
    tags = obstacle.tag_edges(0.5 * (pts[rest[:, 0]] + pts[rest[:, 1]]))
    for tag in obstacle.tags:
        boundary[tag] = rest[tags == tag]
    untagged = int(np.sum(tags == "")) if len(rest) else 0
    if untagged:
        raise RuntimeError(
            f"{untagged} boundary edges could not be classified; "
            "mesh does not conform to the obstacle")
    counted = sum(len(v) for v in boundary.values())
    if counted != len(bedges):
        raise RuntimeError("boundary tagging lost edges")

    return AxiMesh(points=pts, triangles=tris, boundary=boundary, R_dom=R_dom,
                   h_boundary=h_boundary, h_far=h_far, obstacle=name,
                   obstacle_params=obstacle.params)


def sphere_mesh(a: float, R_dom: float, h_boundary: float = 0.1e-6,
                h_far: float = 0.45e-6, growth: float = 1.4) -> AxiMesh:
    """Mesh around a pulsating sphere of radius a (oracle geometry)."""
    if R_dom <= 2 * a:
        raise ValueError("domain radius must exceed twice the sphere radius")
    return _build_mesh(_SphereObstacle(a), R_dom, h_boundary, h_far, growth,
                       name="sphere")


def ringset_mesh(R_inner: float, R_outer: float, length: float, R_dom: float,
                 h_boundary: float = 0.02e-6, h_far: float = 0.45e-6,
                 growth: float = 1.4) -> AxiMesh:
    """Mesh around the ringset annulus on the meridian half-plane."""
    if not 0 < R_inner < R_outer:
        raise ValueError("need 0 < R_inner < R_outer")
    if R_dom <= max(length, 2 * R_outer):
        raise ValueError("domain radius too small for the ringset")
    return _build_mesh(_RingsetObstacle(R_inner, R_outer, length), R_dom,
                       h_boundary, h_far, growth, name="ringset")


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

class Assembly:
    """Frequency-independent FEM matrices for one mesh."""

    def __init__(self, mesh: AxiMesh):
        self.mesh = mesh
        pts, tris = mesh.points, mesh.triangles
        r, z = pts[:, 0], pts[:, 1]
        i0, i1, i2 = tris[:, 0], tris[:, 1], tris[:, 2]
        x0, y0, x1, y1, x2, y2 = r[i0], z[i0], r[i1], z[i1], r[i2], z[i2]
        det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        area = 0.5 * np.abs(det)
        gb = np.stack([y1 - y2, y2 - y0, y0 - y1], axis=1) / det[:, None]
        gc = np.stack([x2 - x1, x0 - x2, x1 - x0], axis=1) / det[:, None]
        rbar = (x0 + x1 + x2) / 3.0
        rtri = np.stack([x0, x1, x2], axis=1)
        rows, cols, kv, mv = [], [], [], []
        for i in range(3):
            for j in range(3):
                rows.append(tris[:, i])
                cols.append(tris[:, j])
                kv.append((gb[:, i] * gb[:, j] + gc[:, i] * gc[:, j]) * rbar * area)
                # exact integral of phi_i phi_j r over the triangle
                w = np.full((len(area), 3), 1.0 / 60.0)
                if i == j:
                    w[:] = 1.0 / 30.0
                    w[:, i] = 1.0 / 10.0
                else:
                    w[:, i] = 1.0 / 30.0
                    w[:, j] = 1.0 / 30.0
                mv.append((rtri * w).sum(axis=1) * area)
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        n = mesh.n_points
        self.K = sp.coo_matrix((np.concatenate(kv), (rows, cols)),
                               shape=(n, n)).tocsr()
        self.M = sp.coo_matrix((np.concatenate(mv), (rows, cols)),
                               shape=(n, n)).tocsr()
        self.C_rad = self._line_mass(mesh.boundary["radiation"])
        self._centroid_tree = None

    def _line_mass(self, edges: np.ndarray) -> sp.csr_matrix:
        pts = self.mesh.points
        n = self.mesh.n_points
        if len(edges) == 0:
            return sp.csr_matrix((n, n))
        p1, p2 = pts[edges[:, 0]], pts[edges[:, 1]]
        L = np.hypot(*(p2 - p1).T)
        r1, r2 = p1[:, 0], p2[:, 0]
        c11 = L * (r1 / 4 + r2 / 12)
        c22 = L * (r1 / 12 + r2 / 4)
        c12 = L * (r1 + r2) / 12
        rows = np.concatenate([edges[:, 0], edges[:, 1], edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 0], edges[:, 1], edges[:, 1], edges[:, 0]])
        vals = np.concatenate([c11, c22, c12, c12])
        return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()

    def centroid_tree(self) -> cKDTree:
        if self._centroid_tree is None:
            cen = self.mesh.points[self.mesh.triangles].mean(axis=1)
            self._centroid_tree = cKDTree(cen)
        return self._centroid_tree


_ASSEMBLY_CACHE: "weakref.WeakKeyDictionary[AxiMesh, Assembly]" = \
    weakref.WeakKeyDictionary()


def assembly_for(mesh: AxiMesh) -> Assembly:
    asm = _ASSEMBLY_CACHE.get(mesh)
    if asm is None:
        asm = Assembly(mesh)
        _ASSEMBLY_CACHE[mesh] = asm
    return asm


def actuation_rhs(mesh: AxiMesh, tags, v_n: Callable, k: complex,
                  medium: Medium, omega: float) -> np.ndarray:
    """Load vector for a prescribed normal velocity on the tagged faces.

    ``v_n(r, z)`` is the fluid velocity along the face normal that points
    into the fluid; the Neumann datum is ``dp/dn = i c^2 k^2 rho / omega *
    v_n`` and enters the right-hand side with a minus sign because the
    fluid's outward normal is opposite to the face normal.
    """
    pts = mesh.points
    b = np.zeros(mesh.n_points, dtype=complex)
    coeff = -1j * medium.c**2 * k**2 * medium.rho / omega
    gauss = (0.5 - 0.5 / np.sqrt(3), 0.5 + 0.5 / np.sqrt(3))
    for tag in tags:
        edges = mesh.boundary[tag]
        if len(edges) == 0:
            continue
        p1, p2 = pts[edges[:, 0]], pts[edges[:, 1]]
        L = np.hypot(*(p2 - p1).T)
        for q in gauss:
            x = p1 + (p2 - p1) * q
            g = coeff * v_n(x[:, 0], x[:, 1])
            np.add.at(b, edges[:, 0], 0.5 * (1 - q) * g * x[:, 0] * L)
            np.add.at(b, edges[:, 1], 0.5 * q * g * x[:, 0] * L)
    return b


RESIDUAL_LIMIT = 1e-8


@dataclass(eq=False)
class FieldSolution:
    """Complex nodal pressure field with solve metadata."""

    mesh: AxiMesh
    pressure: np.ndarray         # complex nodal amplitudes, Pa
    f: float
    medium: Medium
    k: complex
    residual: float
    metadata: dict = dataclass_field(default_factory=dict)

    @property
    def omega(self) -> float:
        return 2 * np.pi * self.f

    def max_abs_pressure(self) -> float:
        return float(np.abs(self.pressure).max())

    # -- interpolation ------------------------------------------------------

    def _locate(self, points: np.ndarray):
        asm = assembly_for(self.mesh)
        tree = asm.centroid_tree()
        pts, tris = self.mesh.points, self.mesh.triangles
        _, cand = tree.query(points, k=min(32, len(tris)))
        vals = np.full(len(points), np.nan + 0j)
        for m, pt in enumerate(points):
            for ci in np.atleast_1d(cand[m]):
                tn = tris[ci]
                P = pts[tn]
                T = np.array([[P[0, 0] - P[2, 0], P[1, 0] - P[2, 0]],
                              [P[0, 1] - P[2, 1], P[1, 1] - P[2, 1]]])
                try:
                    lam = np.linalg.solve(T, pt - P[2])
                except np.linalg.LinAlgError:
                    continue
                l3 = 1.0 - lam.sum()
                if min(lam[0], lam[1], l3) >= -1e-9:
                    vals[m] = (self.pressure[tn[0]] * lam[0]
                               + self.pressure[tn[1]] * lam[1]
                               + self.pressure[tn[2]] * l3)
                    break
        return vals

    def pressure_at(self, points) -> np.ndarray:
        """Linear interpolation of the nodal field at (r, z) points."""
        return self._locate(np.atleast_2d(np.asarray(points, dtype=float)))

    # -- radiated power pattern ---------------------------------------------

    def flux_pattern(self, R_eval: float, n_theta: int = 721) -> DirectivityPattern:
        """Time-averaged radial flux versus polar angle on |x| = R_eval.

        The radial velocity comes from a centred difference of the
        interpolated pressure (the discrete gradient of the FE field).
        """
        mesh = self.mesh
        delta = 0.8 * mesh.h_far
        if mesh.obstacle == "sphere":
            extent = mesh.obstacle_params[0]
        else:
            extent = float(np.hypot(mesh.obstacle_params[1],
                                    mesh.obstacle_params[2] / 2))
        if not extent + delta < R_eval < mesh.R_dom - delta:
            raise ValueError("evaluation radius outside the computational domain")
        # avoid the exact poles where r = 0
        theta = np.linspace(0.0, np.pi, n_theta)
        th = np.clip(theta, 0.3 / n_theta, np.pi - 0.3 / n_theta)

        def ring(R):
            return np.column_stack([R * np.sin(th), R * np.cos(th)])

        pc = self.pressure_at(ring(R_eval))
        pp = self.pressure_at(ring(R_eval + delta))
        pm = self.pressure_at(ring(R_eval - delta))
        dpdr = (pp - pm) / (2 * delta)
        v_r = -1j * self.omega / (self.medium.c**2 * self.k**2 * self.medium.rho) * dpdr
        flux = 0.5 * np.real(pc * np.conj(v_r))
        return DirectivityPattern(radius=R_eval, theta=theta, flux=flux,
                                  provenance="FEM")


def solve_helmholtz(mesh: AxiMesh, f: float, medium: Medium,
                    actuated_tags, v_n: Callable,
                    bc: str = "curvature") -> FieldSolution:
    """Assemble and solve the axisymmetric Helmholtz problem.

    Rigid faces (any untagged obstacle boundary) carry the natural
    ``dp/dn = 0`` condition; the axis needs nothing thanks to the r-weight.
    """
    mesh.validate_for_frequency(f, medium.c)
    wv = medium.wave_vector(f)
    k, omega = wv.k, wv.omega
    asm = assembly_for(mesh)
    if bc == "curvature":
        gamma = 1j * k - 1.0 / mesh.R_dom
    elif bc == "sommerfeld":
        gamma = 1j * k
    else:
        raise ValueError(f"unknown radiation condition {bc!r}")
    A = (asm.K - k**2 * asm.M - gamma * asm.C_rad).tocsc()
    b = actuation_rhs(mesh, actuated_tags, v_n, k, medium, omega)
    t0 = time.time()
    lu = spla.splu(A)
    p = lu.solve(b)
    solve_s = time.time() - t0
    resid = float(np.linalg.norm(A @ p - b) / np.linalg.norm(b))
    if resid > RESIDUAL_LIMIT:
        raise RuntimeError(
            f"linear solve did not converge: relative residual {resid:.2e}")
    meta = {"bc": bc, "solve_seconds": solve_s, "n_points": mesh.n_points,
            "n_elements": mesh.n_elements}
    return FieldSolution(mesh=mesh, pressure=p, f=f, medium=medium, k=k,
                         residual=resid, metadata=meta)


# ---------------------------------------------------------------------------
# boundary traces: surface work with the viscous shear correction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceSpec:
    """Geometry of one actuated face for the surface-work integral.

    kind: "cylinder" (r = position, normal_sign gives +-r), "disk"
    (z = position, normal_sign gives +-z) or "sphere" (radius = position,
    outward radial normal).
    """

    tag: str
    kind: str
    position: float
    normal_sign: int = 1


def face_trace_power(sol: FieldSolution, face: FaceSpec,
                     v_n: Callable) -> tuple:
    """(total, pressure part, shear part) of the surface work on one face.

    Integrates ``Re(T_nn v_n*)/2`` over the face, where ``T_nn = p - 2 eta
    dv_n/dn - (xi - 2/3 eta) div v``.  The normal derivative of the normal
    velocity is reconstructed from the identity ``div v = i omega p /(c^2
    rho)``, the face curvature, and the tangential derivative of the
    tangential velocity taken from the boundary trace of the solution.
    """
    mesh, medium = sol.mesh, sol.medium
    omega, k = sol.omega, sol.k
    visc = medium.effective_viscosity(sol.f)
    eta = visc.shear
    second = visc.bulk - 2 * eta / 3

    edges = mesh.boundary[face.tag]
    nodes = np.unique(edges)
    pts = mesh.points[nodes]
    if face.kind == "cylinder":
        s = pts[:, 1]                      # coordinate along the face: z
    elif face.kind == "disk":
        s = pts[:, 0]                      # r
    elif face.kind == "sphere":
        s = np.arctan2(pts[:, 0], pts[:, 1])   # polar angle from +z
    else:
        raise ValueError(f"unknown face kind {face.kind!r}")
    order = np.argsort(s)
    nodes, s, pts = nodes[order], s[order], pts[order]
    p_tr = sol.pressure[nodes]
    r_tr = pts[:, 0]
    z_tr = pts[:, 1]
    vn_tr = v_n(r_tr, z_tr)

    vel_coeff = -1j * omega / (medium.c**2 * k**2 * medium.rho)
    divv = 1j * omega * p_tr / (medium.c**2 * medium.rho)

    if face.kind == "cylinder":
        v_t = vel_coeff * np.gradient(p_tr, s)
        tang = np.gradient(v_t, s)
        H = face.normal_sign / face.position
        measure = 2 * np.pi * face.position * np.ones_like(s)   # ds = dz
    elif face.kind == "disk":
        v_t = vel_coeff * np.gradient(p_tr, s)
        tang = np.gradient(s * v_t, s) / s
        H = 0.0
        measure = 2 * np.pi * s                                  # ds = dr, r = s
    else:  # sphere
        a = face.position
        v_t = vel_coeff * np.gradient(p_tr, s) / a
        sin = np.sin(s)
        tang = np.zeros_like(v_t)
        interior = slice(1, -1)
        tang[interior] = np.gradient(sin * v_t, s)[interior] / (a * sin[interior])
        if len(tang) > 2:
            tang[0], tang[-1] = tang[1], tang[-2]
        H = 2.0 / a
        measure = 2 * np.pi * a**2 * sin                         # ds = a dtheta

    dvn_dn = divv - H * vn_tr - tang
    t_nn = p_tr - 2 * eta * dvn_dn - second * divv
    total = float(np.trapezoid(0.5 * np.real(t_nn * np.conj(vn_tr)) * measure, s))
    press = float(np.trapezoid(0.5 * np.real(p_tr * np.conj(vn_tr)) * measure, s))
    return total, press, total - press


def interior_residual_check(sol: FieldSolution, n_samples: int = 200,
                            seed: int = 7) -> float:
    """Median |lap p + k^2 p| / |k^2 p| at interior points, by finite
    differences of the interpolated field. A solution-quality diagnostic."""
    rng = np.random.default_rng(seed)
    mesh = sol.mesh
    extent = mesh.R_dom
    pts = []
    while len(pts) < n_samples:
        cand = rng.uniform([0, -extent], [extent, extent], size=(4 * n_samples, 2))
        rad = np.hypot(cand[:, 0], cand[:, 1])
        ok = (rad < 0.8 * extent) & (rad > 0.15 * extent) & (cand[:, 0] > 0.05 * extent)
        pts.extend(cand[ok][:n_samples - len(pts)])
    pts = np.asarray(pts)
    h = 1.2 * mesh.h_far
    p0 = sol.pressure_at(pts)
    ratios = []
    for m, (r, z) in enumerate(pts):
        stencil = np.array([[r + h, z], [r - h, z], [r, z + h], [r, z - h]])
        pv = sol.pressure_at(stencil)
        if np.any(np.isnan(pv)) or np.isnan(p0[m]):
            continue
        lap = (pv[0] + pv[1] + pv[2] + pv[3] - 4 * p0[m]) / h**2 \
            + (pv[0] - pv[1]) / (2 * h * r)
        res = lap + sol.k**2 * p0[m]
        ratios.append(abs(res) / abs(sol.k**2 * p0[m]))
    return float(np.median(ratios))
