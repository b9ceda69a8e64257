"""Quadrilateral meshes: container, text exchange format and generators.

Text format::

    <n_nodes> <n_elements>
    id x y                      (n_nodes lines)
    id n1 n2 n3 n4              (n_elements lines)
    setname id id id ...        (boundary chains, any number of lines)

Ids are 1-based. A set line lists the nodes of one boundary polyline in
order; its facets are consecutive node pairs. A set name may appear on
several lines, one per disjoint chain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GAUSS_2 = np.array([-1.0, 1.0]) / math.sqrt(3.0)
# 2x2 Gauss points in (xi, eta), counter-clockwise
QUAD_GAUSS = np.array([[xi, eta] for eta in GAUSS_2 for xi in GAUSS_2])


class MeshError(ValueError):
    pass


@dataclass
class Mesh:
    nodes: np.ndarray                      # (n, 2) reference coordinates
    elements: np.ndarray                   # (m, 4) node indices, counter-clockwise
    sets: dict[str, list[np.ndarray]] = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.elements = np.asarray(self.elements, dtype=np.int64)
        self.sets = {k: [np.asarray(c, dtype=np.int64) for c in v] for k, v in self.sets.items()}

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def facets(self, name: str) -> np.ndarray:
        """Facets of a boundary set as an ``(k, 2)`` array of node indices."""
        chains = self.sets.get(name, [])
        parts = [np.column_stack([c[:-1], c[1:]]) for c in chains if len(c) > 1]
        if not parts:
            return np.zeros((0, 2), dtype=np.int64)
        return np.vstack(parts)

    def set_nodes(self, name: str) -> np.ndarray:
        chains = self.sets.get(name, [])
        if not chains:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(chains))

    def validate(self):
        jac = gauss_jacobians(self.nodes, self.elements)
        if np.any(jac <= 0):
            bad = np.unique(np.nonzero(jac <= 0)[0])
            raise MeshError(f"non-positive Jacobian in {len(bad)} elements, e.g. {bad[:5]}")
        seen = set()
        for name in self.sets:
            for a, b in self.facets(name):
                key = (min(a, b), max(a, b))
                if key in seen:
                    raise MeshError(f"facet {key} belongs to more than one boundary set")
                seen.add(key)

    def area(self) -> float:
        _, detw = shape_gradients(self.nodes, self.elements)
        return float(detw.sum())


def shape_functions(xi, eta):
    return 0.25 * np.array([(1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                            (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)])


def shape_derivatives(xi, eta):
    """``dN_a / d(xi, eta)`` as a ``(4, 2)`` array."""
    return 0.25 * np.array([[-(1 - eta), -(1 - xi)],
                            [(1 - eta), -(1 + xi)],
                            [(1 + eta), (1 + xi)],
                            [-(1 + eta), (1 - xi)]])


_DN_GAUSS = np.stack([shape_derivatives(*p) for p in QUAD_GAUSS])  # (4 gp, 4 nodes, 2)


def gauss_jacobians(nodes, elements):
    X = nodes[elements]                                    # (m, 4, 2)
    Jm = np.einsum("gaj,mai->mgij", _DN_GAUSS, X)          # dX_i/dxi_j
    return Jm[..., 0, 0] * Jm[..., 1, 1] - Jm[..., 0, 1] * Jm[..., 1, 0]


def shape_gradients(nodes, elements):
    """Reference gradients ``dN/dX`` ``(m, 4, 4, 2)`` and weights ``det J`` ``(m, 4)``."""
    X = nodes[elements]
    Jm = np.einsum("gaj,mai->mgij", _DN_GAUSS, X)
    det = Jm[..., 0, 0] * Jm[..., 1, 1] - Jm[..., 0, 1] * Jm[..., 1, 0]
    if np.any(det <= 0):
        raise MeshError("non-positive Jacobian")
    inv = np.empty_like(Jm)
    inv[..., 0, 0] = Jm[..., 1, 1] / det
    inv[..., 1, 1] = Jm[..., 0, 0] / det
    inv[..., 0, 1] = -Jm[..., 0, 1] / det
    inv[..., 1, 0] = -Jm[..., 1, 0] / det
    dN = np.einsum("gaj,mgji->mgai", _DN_GAUSS, inv)
    return dN, det  # Gauss weights are all one


# -- text format ------------------------------------------------------------

def write_mesh(mesh: Mesh, path) -> None:
    lines = [f"{mesh.n_nodes} {mesh.n_elements}"]
    lines += [f"{i + 1} {x!r} {y!r}" for i, (x, y) in enumerate(mesh.nodes.tolist())]
    lines += [f"{i + 1} " + " ".join(str(n + 1) for n in e) for i, e in enumerate(mesh.elements.tolist())]
    for name, chains in mesh.sets.items():
        for c in chains:
            lines.append(name + " " + " ".join(str(n + 1) for n in c.tolist()))
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows:
        raise MeshError("empty mesh file")
    try:
        n_nodes, n_elem = int(rows[0][0]), int(rows[0][1])
        node_rows = rows[1:1 + n_nodes]
        elem_rows = rows[1 + n_nodes:1 + n_nodes + n_elem]
        ids = [int(r[0]) for r in node_rows]
        index = {nid: i for i, nid in enumerate(ids)}
        nodes = np.array([[float(r[1]), float(r[2])] for r in node_rows])
        elements = np.array([[index[int(v)] for v in r[1:5]] for r in elem_rows], dtype=np.int64)
        sets: dict[str, list] = {}
        for r in rows[1 + n_nodes + n_elem:]:
            sets.setdefault(r[0], []).append([index[int(v)] for v in r[1:]])
    except (IndexError, KeyError, ValueError) as exc:
        raise MeshError(f"malformed mesh file: {exc}") from exc
    if len(nodes) != n_nodes or len(elements) != n_elem:
        raise MeshError("header counts do not match the file body")
    return Mesh(nodes, elements, sets)


# -- generators -------------------------------------------------------------

def rectangle_mesh(width: float, height: float, nx: int, ny: int, x0: float = 0.0,
                   y0: float = 0.0) -> Mesh:
    """Structured rectangle with sets ``bottom``, ``top``, ``left``, ``right``."""
    xs = np.linspace(x0, x0 + width, nx + 1)
    ys = np.linspace(y0, y0 + height, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    nid = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    elements = np.column_stack([nid[:-1, :-1].ravel(), nid[:-1, 1:].ravel(),
                                nid[1:, 1:].ravel(), nid[1:, :-1].ravel()])
    sets = {"bottom": [nid[0, :]], "top": [nid[-1, ::-1]],
            "right": [nid[:, -1]], "left": [nid[::-1, 0]]}
    return Mesh(nodes, elements, sets)


def segment_area(radius: float, height: float) -> float:
    """Area of a circular segment of given radius and sagitta."""
    R, H = radius, height
    return R * R * math.acos(1.0 - H / R) - (R - H) * math.sqrt(2.0 * R * H - H * H)


def _surface_stations(half_width, fine_half_width, spacing, growth):
    """Symmetric node abscissae: uniform spacing inside, geometric growth outside."""
    n_fine = max(1, int(round(fine_half_width / spacing)))
    xs = list(np.linspace(0.0, n_fine * spacing, n_fine + 1))
    h = spacing
    while xs[-1] < half_width:
        h *= growth
        xs.append(xs[-1] + h)
    # merge a short last interval and land exactly on the corner
    if len(xs) > 2 and xs[-1] - half_width > 0.5 * (xs[-1] - xs[-2]):
        xs.pop()
    xs[-1] = half_width
    xs = np.array(xs)
    return np.concatenate([-xs[:0:-1], xs])


def generate_cap_mesh(radius: float = 47.1, height: float = 10.0, density: float = 1.0,
                      spacing: float = 0.08, fine_half_width: float = 8.0,
                      growth: float = 1.3, layers: int = 13, layer_bias: float = 2.4,
                      contact_half_width: float | None = None) -> Mesh:
    """Mesh a circular cap (segment of a disc) with its apex at the origin.

    The flat chord lies at ``y = height`` and forms the ``base`` set; the
    arc below it forms the ``contact`` set (within ``contact_half_width``
    of the apex) and the ``free`` set elsewhere. Nodes follow a family of
    circular layers through both chord ends, graded toward the arc, and the
    columns fan out from a fine uniform spacing at the apex to a uniform
    spacing along the chord. The outermost column collapses into the
    chord corner, giving degenerate (triangular) quads there.

    ``density`` scales the resolution in both directions.
    """
    R, H = float(radius), float(height)
    if not (R > H > 0):
        raise MeshError("cap geometry requires radius > height > 0")
    if density <= 0:
        raise MeshError("density must be positive")
    c = math.sqrt(2.0 * R * H - H * H)
    xb = _surface_stations(c, min(fine_half_width, 0.9 * c), spacing / density,
                           growth ** (1.0 / density))
    ns = len(xb) - 1
    xt = np.linspace(-c, c, ns + 1)
    nt = max(2, int(round(layers * density)))
    t = np.expm1(layer_bias * np.arange(nt + 1) / nt) / math.expm1(layer_bias)

    # node grid (layer j, station i); the end stations are shared corners
    node_index = -np.ones((nt + 1, ns + 1), dtype=np.int64)
    coords = []
    corner = {}
    for j, tj in enumerate(t):
        sag = H * (1.0 - tj)
        for i in range(ns + 1):
            if i in (0, ns):
                key = i
                if key not in corner:
                    corner[key] = len(coords)
                    coords.append((xb[i], H))
                node_index[j, i] = corner[key]
                continue
            x = (1.0 - tj) * xb[i] + tj * xt[i]
            # circle through (+-c, H) with sagitta ``sag``, written stably for sag -> 0
            denom = (c * c + sag * sag) + math.sqrt((c * c + sag * sag) ** 2 - 4.0 * sag * sag * x * x)
            y = H - sag + 2.0 * sag * x * x / denom
            node_index[j, i] = len(coords)
            coords.append((x, y))
    nodes = np.array(coords)

    elements = []
    for j in range(nt):
        for i in range(ns):
            a, b = node_index[j, i], node_index[j, i + 1]
            d, e = node_index[j + 1, i], node_index[j + 1, i + 1]
            # counter-clockwise with the arc (j = 0) at the bottom; a == d or b == e at the corners
            elements.append([a, b, e, d])
    elements = np.array(elements, dtype=np.int64)

    arc = node_index[0, :]
    chalf = 0.75 * c if contact_half_width is None else contact_half_width
    inside = np.abs(xb) <= chalf + 1e-12
    first, last = np.argmax(inside), len(inside) - 1 - np.argmax(inside[::-1])
    sets = {
        "contact": [arc[first:last + 1]],
        "free": [arc[:first + 1], arc[last:]],
        "base": [node_index[nt, ::-1]],
    }
    mesh = Mesh(nodes, elements, sets)
    mesh.validate()
    return mesh
