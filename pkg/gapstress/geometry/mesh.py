"""
Triangular meshes for the 2D oracle.

The narrow gap |x_1| <= R is covered by a structured block whose columns are
spaced like delta(x_1)/n_layers and whose rows split delta(x_1) into n_layers
equal layers. The rest of the domain is filled with graded lattice points that
are relaxed by a spring smoother and triangulated by Delaunay. Only the
fundamental region (x_1 >= 0, and x_2 >= 0 for equal inclusions) is meshed;
the result is reflected, so symmetric domains get exactly symmetric meshes.
"""

import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import structlog
from scipy.spatial import Delaunay, cKDTree

from ..config import settings
from ..errors import GeometryError
from ..models import BoundaryTag, InclusionPairGeometry, RegionTag
from .shapes import PairDomain, geometry_domain

logger = structlog.get_logger()


class NodeRole(IntEnum):
    """Boundary a node lies on."""
    INTERIOR = 0
    INCLUSION_1 = 1
    INCLUSION_2 = 2
    OUTER = 3
    SIDE = 4


REGION_TAGS = {0: RegionTag.MATRIX, 1: RegionTag.INCLUSION_1, 2: RegionTag.INCLUSION_2}
REGION_CODES = {tag: code for code, tag in REGION_TAGS.items()}

# merge priority when two generated nodes coincide
_ROLE_PRIORITY = {
    NodeRole.INCLUSION_1: 4,
    NodeRole.INCLUSION_2: 4,
    NodeRole.OUTER: 3,
    NodeRole.SIDE: 2,
    NodeRole.INTERIOR: 0,
}


@dataclass
class OracleMesh:
    """Conforming triangulation of the whole domain, inclusions included."""
    nodes: np.ndarray
    triangles: np.ndarray
    regions: np.ndarray
    edges: np.ndarray
    edge_tags: List[BoundaryTag]
    roles: np.ndarray
    n_layers: int
    h_target: float
    eps: float = 0.0
    gap_triangles: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    domain: Optional[PairDomain] = None

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def matrix_triangles(self) -> np.ndarray:
        return self.triangles[self.regions == 0]

    def signed_areas(self, triangles: Optional[np.ndarray] = None) -> np.ndarray:
        tris = self.triangles if triangles is None else triangles
        a, b, c = (self.nodes[tris[:, k]] for k in range(3))
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    def region_tags(self) -> List[RegionTag]:
        return [REGION_TAGS[int(r)] for r in self.regions]

    def summary(self) -> Dict[str, float]:
        return {
            "nodes": self.n_nodes,
            "triangles": int(len(self.triangles)),
            "matrix_triangles": int(np.sum(self.regions == 0)),
            "boundary_edges": int(len(self.edges)),
            "min_area": float(np.min(self.signed_areas())),
        }


@dataclass
class _Chain:
    """Boundary or symmetry line sampled at sorted parameters."""
    curve: Callable[[np.ndarray], np.ndarray]
    params: np.ndarray
    role: NodeRole

    def points(self) -> np.ndarray:
        return self.curve(self.params)


def _segment(a: Tuple[float, float], b: Tuple[float, float]) -> Callable[[np.ndarray], np.ndarray]:
    a_, b_ = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return lambda s: a_ + np.asarray(s, dtype=float)[..., None] * (b_ - a_)


def _hex_lattice(lo: np.ndarray, hi: np.ndarray, s: float) -> np.ndarray:
    dy = s * math.sqrt(3) / 2
    xs = np.arange(lo[0], hi[0] + s, s)
    ys = np.arange(lo[1], hi[1] + dy, dy)
    X, Y = np.meshgrid(xs, ys)
    X[1::2] += s / 2
    return np.column_stack([X.ravel(), Y.ravel()])


def triangle_angles(nodes: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Interior angles in degrees, shape (T, 3)."""
    p = nodes[triangles]
    angles = np.empty(triangles.shape)
    for k in range(3):
        u = p[:, (k + 1) % 3] - p[:, k]
        v = p[:, (k + 2) % 3] - p[:, k]
        cos = np.einsum("ij,ij->i", u, v) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
        angles[:, k] = np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))
    return angles


class MeshBuilder:
    """
    Builds an OracleMesh for a PairDomain.

    Args:
        domain: Domain to mesh
        h_target: Far-field element size
        n_layers: Element layers across the gap inside the block
        grading: Growth rate of the size field away from the block
        smoothing_iterations: Spring-smoothing passes for free nodes
    """

    def __init__(
        self,
        domain: PairDomain,
        h_target: float,
        n_layers: int,
        grading: float = 0.3,
        smoothing_iterations: Optional[int] = None,
    ):
        if n_layers < 4:
            raise GeometryError("at least 4 gap layers are required")
        if domain.eps < 1e-6 * domain.diameter:
            raise GeometryError(
                f"eps={domain.eps} is below 1e-6 times the domain diameter; gap too degenerate"
            )
        self.domain = domain
        self.h_target = float(h_target)
        self.n_layers = int(n_layers)
        self.grading = grading
        self.iterations = (
            settings.smoothing_iterations if smoothing_iterations is None else smoothing_iterations
        )
        self.symmetric_y = domain.symmetric_y
        self.rows = 2 * math.ceil(n_layers / 2) if self.symmetric_y else n_layers
        self.R = domain.R
        self.h_edge = float(domain.gap_width(np.array(self.R))) / self.rows
        self.box_half_height = float(max(domain.y_up(np.array(self.R)), -domain.y_low(np.array(self.R))))
        self.tol = 1e-10 * domain.diameter
        self.r_min = min(domain.upper.radius, domain.lower.radius)

    # -- size field ---------------------------------------------------------

    def size(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        x, y = pts[:, 0], pts[:, 1]
        dx = np.maximum(np.abs(x) - self.R, 0.0)
        dy = np.maximum(np.abs(y) - self.box_half_height, 0.0)
        h = self.h_edge + self.grading * np.hypot(dx, dy)
        between = (np.abs(x) < 0.95 * self.r_min) & (y < self.domain.y_up(x)) & (y > self.domain.y_low(x))
        cap = np.maximum(self.h_edge, self.domain.gap_width(x) / 3.0)
        h = np.where(between, np.minimum(h, cap), h)
        return np.minimum(h, self.h_target)

    def in_block(self, pts: np.ndarray, margin: float = 0.0) -> np.ndarray:
        x, y = pts[:, 0], pts[:, 1]
        return (np.abs(x) <= self.R + margin) & (y <= self.domain.y_up(x)) & (y >= self.domain.y_low(x))

    # -- structured gap block -------------------------------------------------

    def _columns(self) -> np.ndarray:
        xs = [0.0]
        while xs[-1] < self.R:
            xs.append(xs[-1] + float(self.domain.gap_width(np.array(xs[-1]))) / self.rows)
        cols = np.asarray(xs)
        return cols * (self.R / cols[-1])

    def _block(self) -> Tuple[np.ndarray, np.ndarray, List[_Chain]]:
        cols = self._columns()
        dom = self.domain
        if self.symmetric_y:
            t = np.linspace(0.0, 1.0, self.rows // 2 + 1)
            low = np.zeros_like(cols)
        else:
            t = np.linspace(0.0, 1.0, self.rows + 1)
            low = dom.y_low(cols)
        up = dom.y_up(cols)
        X = np.repeat(cols[None, :], len(t), axis=0)
        Y = low[None, :] + t[:, None] * (up - low)[None, :]
        pts = np.column_stack([X.ravel(), Y.ravel()])
        roles = np.full(len(pts), NodeRole.INTERIOR, dtype=int)
        row_index = np.repeat(np.arange(len(t)), len(cols))
        roles[row_index == len(t) - 1] = NodeRole.INCLUSION_1
        if not self.symmetric_y:
            roles[row_index == 0] = NodeRole.INCLUSION_2

        chains = [_Chain(lambda s: np.stack([s, dom.y_up(s)], axis=-1), cols.copy(), NodeRole.INCLUSION_1)]
        if self.symmetric_y:
            chains.append(_Chain(lambda s: np.stack([s, np.zeros_like(s)], axis=-1), cols.copy(), NodeRole.INTERIOR))
        else:
            chains.append(_Chain(lambda s: np.stack([s, dom.y_low(s)], axis=-1), cols.copy(), NodeRole.INCLUSION_2))
        # the x_1 = 0 column is a symmetry line
        y0 = Y[:, 0]
        chains.append(_Chain(lambda s: np.stack([np.zeros_like(s), s], axis=-1), y0.copy(), NodeRole.INTERIOR))
        return pts, roles, chains

    # -- boundary chains ------------------------------------------------------

    def _sample(self, curve: Callable[[np.ndarray], np.ndarray], a: float, b: float, n_dense: int = 4001) -> Tuple[np.ndarray, np.ndarray]:
        u = np.linspace(a, b, n_dense)
        pts = curve(u)
        ds = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        mid = 0.5 * (pts[1:] + pts[:-1])
        phi = np.concatenate([[0.0], np.cumsum(ds / self.size(mid))])
        n = max(1, int(math.ceil(phi[-1])))
        params = np.interp(np.linspace(0.0, phi[-1], n + 1), phi, u)
        return params, pts

    def _chains(self) -> Tuple[List[_Chain], np.ndarray]:
        dom = self.domain
        specs: List[Tuple[Callable[[np.ndarray], np.ndarray], float, float, NodeRole]] = []
        up, lo = dom.upper, dom.lower
        t0 = up.facing_parameter(self.R, lower_side=True)

        if dom.cell:
            L1, L2 = dom.outer.L1, dom.outer.L2
            r = up.radius
            specs.append((up.point, t0, 0.0, NodeRole.INCLUSION_1))
            specs.append((_segment((r, L2), (L1, L2)), 0.0, 1.0, NodeRole.INCLUSION_1))
            specs.append((_segment((L1, 0.0), (L1, L2)), 0.0, 1.0, NodeRole.SIDE))
            specs.append((_segment((self.R, 0.0), (L1, 0.0)), 0.0, 1.0, NodeRole.INTERIOR))
        else:
            rho = dom.outer.radius
            top = float(up.center[1] + up.radius)
            specs.append((up.point, t0, math.pi / 2, NodeRole.INCLUSION_1))
            specs.append((_segment((0.0, top), (0.0, rho)), 0.0, 1.0, NodeRole.INTERIOR))
            circle = lambda t: rho * np.stack([np.cos(t), np.sin(t)], axis=-1)
            if self.symmetric_y:
                specs.append((circle, 0.0, math.pi / 2, NodeRole.OUTER))
                specs.append((_segment((self.R, 0.0), (rho, 0.0)), 0.0, 1.0, NodeRole.INTERIOR))
            else:
                t1 = lo.facing_parameter(self.R, lower_side=False)
                bottom = float(lo.center[1] - lo.radius)
                specs.append((lo.point, -math.pi / 2, t1, NodeRole.INCLUSION_2))
                specs.append((_segment((0.0, -rho), (0.0, bottom)), 0.0, 1.0, NodeRole.INTERIOR))
                specs.append((circle, -math.pi / 2, math.pi / 2, NodeRole.OUTER))

        chains, dense = [], []
        for curve, a, b, role in specs:
            params, pts = self._sample(curve, a, b)
            chains.append(_Chain(curve, params, role))
            dense.append(pts)
        return chains, np.vstack(dense)

    # -- free nodes -----------------------------------------------------------

    def _fundamental_box(self) -> Tuple[np.ndarray, np.ndarray]:
        dom = self.domain
        if dom.cell:
            return np.array([0.0, 0.0]), np.array([dom.outer.L1, dom.outer.L2])
        rho = dom.outer.radius
        ylo = 0.0 if self.symmetric_y else -rho
        return np.array([0.0, ylo]), np.array([rho, rho])

    def _in_fundamental(self, pts: np.ndarray, margin: np.ndarray) -> np.ndarray:
        ok = pts[:, 0] > margin
        if self.symmetric_y:
            ok &= pts[:, 1] > margin
        return ok

    def _admissible(self, pts: np.ndarray, h: np.ndarray, boundary_tree: cKDTree, fixed_tree: cKDTree, factor: float) -> np.ndarray:
        ok = self._in_fundamental(pts, factor * h)
        ok &= self.domain.contains(pts)
        ok &= ~self.in_block(pts, margin=0.0)
        if not np.any(ok):
            return ok
        db, _ = boundary_tree.query(pts)
        df, _ = fixed_tree.query(pts)
        return ok & (db > factor * h) & (df > factor * h)

    def _candidates(self, boundary_tree: cKDTree, fixed_tree: cKDTree) -> np.ndarray:
        lo, hi = self._fundamental_box()
        levels = [self.h_edge]
        while levels[-1] * 2 < self.h_target:
            levels.append(levels[-1] * 2)
        levels.append(self.h_target)

        picked = []
        for k, s in enumerate(levels):
            lattice = _hex_lattice(lo, hi, s)
            h = self.size(lattice)
            upper = levels[k + 1] if k + 1 < len(levels) else np.inf
            band = (h >= s * (1 - 1e-12)) & (h < upper) if k else h < upper
            lattice = lattice[band]
            if len(lattice):
                keep = self._admissible(lattice, self.size(lattice), boundary_tree, fixed_tree, 0.6)
                picked.append(lattice[keep])
        if not picked:
            return np.zeros((0, 2))
        cand = np.vstack(picked)
        return self._thin(cand)

    def _thin(self, cand: np.ndarray) -> np.ndarray:
        if len(cand) == 0:
            return cand
        h = self.size(cand)
        order = np.lexsort((cand[:, 1], cand[:, 0], h))
        cand, h = cand[order], h[order]
        tree = cKDTree(cand)
        removed = np.zeros(len(cand), dtype=bool)
        for i in range(len(cand)):
            if removed[i]:
                continue
            for j in tree.query_ball_point(cand[i], 0.7 * h[i]):
                if j > i:
                    removed[j] = True
        return cand[~removed]

    def _smooth(self, fixed: np.ndarray, free: np.ndarray, boundary_tree: cKDTree) -> np.ndarray:
        """Spring relaxation of the free nodes; moves leaving the admissible set are undone."""
        if len(free) == 0 or self.iterations <= 0:
            return free
        nf = len(fixed)
        fixed_tree = cKDTree(fixed)
        for _ in range(self.iterations):
            pts = np.vstack([fixed, free])
            tris = Delaunay(pts).simplices
            cent = pts[tris].mean(axis=1)
            tris = tris[self.domain.contains(cent)]
            bars = np.unique(np.sort(np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]]), axis=1), axis=0)
            vec = pts[bars[:, 0]] - pts[bars[:, 1]]
            length = np.linalg.norm(vec, axis=1)
            hbar = self.size(0.5 * (pts[bars[:, 0]] + pts[bars[:, 1]]))
            target = 1.2 * hbar * math.sqrt(np.sum(length ** 2) / np.sum(hbar ** 2))
            force = np.maximum(target - length, 0.0)
            fvec = (force / length)[:, None] * vec
            total = np.zeros_like(pts)
            np.add.at(total, bars[:, 0], fvec)
            np.add.at(total, bars[:, 1], -fvec)
            moved = free + 0.2 * total[nf:]
            h = self.size(moved)
            ok = self._in_fundamental(moved, 0.3 * h) & self.domain.contains(moved) & ~self.in_block(moved)
            if np.any(ok):
                db, _ = boundary_tree.query(moved)
                df, _ = fixed_tree.query(moved)
                ok &= (db > 0.3 * h) & (df > 0.3 * h)
            free = np.where(ok[:, None], moved, free)
        return free

    # -- assembly of the fundamental triangulation -----------------------------

    def _merge(self, pts: np.ndarray, roles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Merge coincident nodes; returns unique points, roles and the old-to-new index map."""
        tree = cKDTree(pts)
        rep = np.arange(len(pts))
        for i, j in sorted(tree.query_pairs(self.tol)):
            ri, rj = rep[i], rep[j]
            while rep[ri] != ri:
                ri = rep[ri]
            while rep[rj] != rj:
                rj = rep[rj]
            if ri == rj:
                continue
            keep, drop = (ri, rj) if ri < rj else (rj, ri)
            if _ROLE_PRIORITY[NodeRole(roles[drop])] > _ROLE_PRIORITY[NodeRole(roles[keep])]:
                roles[keep] = roles[drop]
            rep[drop] = keep
        for i in range(len(rep)):
            r = rep[i]
            while rep[r] != r:
                r = rep[r]
            rep[i] = r
        uniq, inverse = np.unique(rep, return_inverse=True)
        return pts[uniq], roles[uniq], inverse

    def _assemble(self, block_pts, block_roles, chains, free):
        parts = [block_pts] + [c.points() for c in chains] + [free]
        roles = [block_roles] + [np.full(len(c.params), int(c.role)) for c in chains] + [
            np.zeros(len(free), dtype=int)
        ]
        offsets = np.cumsum([0] + [len(p) for p in parts])
        pts, roles_m, inverse = self._merge(np.vstack(parts), np.concatenate(roles).astype(int))
        chain_idx = [inverse[offsets[k + 1]: offsets[k + 2]] for k in range(len(chains))]
        return pts, roles_m, chain_idx

    def _triangulate(self, block_pts, block_roles, chains, free):
        for attempt in range(10):
            pts, roles, chain_idx = self._assemble(block_pts, block_roles, chains, free)
            tris = Delaunay(pts).simplices
            present = set(map(tuple, np.sort(np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]]), axis=1)))
            inserted = 0
            for chain, idx in zip(chains, chain_idx):
                missing = [
                    k for k in range(len(idx) - 1)
                    if idx[k] != idx[k + 1] and tuple(sorted((idx[k], idx[k + 1]))) not in present
                ]
                if missing:
                    mids = 0.5 * (chain.params[missing] + chain.params[np.asarray(missing) + 1])
                    chain.params = np.sort(np.concatenate([chain.params, mids]))
                    inserted += len(missing)
            if not inserted:
                return pts, roles, tris
            logger.debug("Recovering boundary edges", inserted=inserted, attempt=attempt)
        raise GeometryError("boundary recovery did not converge")

    # -- reflection -----------------------------------------------------------

    def _reflect(self, pts, roles, tris, axis: int):
        on_axis = np.abs(pts[:, axis]) <= self.tol
        mirror_of = np.empty(len(pts), dtype=int)
        off = np.where(~on_axis)[0]
        mirror_of[on_axis] = np.where(on_axis)[0]
        mirror_of[off] = len(pts) + np.arange(len(off))
        new_pts = pts[off].copy()
        new_pts[:, axis] *= -1
        new_roles = roles[off].copy()
        if axis == 1:
            swap = {NodeRole.INCLUSION_1: NodeRole.INCLUSION_2, NodeRole.INCLUSION_2: NodeRole.INCLUSION_1}
            new_roles = np.array([swap.get(NodeRole(r), r) for r in new_roles], dtype=int)
        mirrored = mirror_of[tris][:, [0, 2, 1]]
        return (
            np.vstack([pts, new_pts]),
            np.concatenate([roles, new_roles]),
            np.vstack([tris, mirrored]),
        )

    # -- driver -----------------------------------------------------------------

    def build(self) -> OracleMesh:
        block_pts, block_roles, block_chains = self._block()
        chains, dense = self._chains()
        chains = block_chains + chains
        fixed_preview = np.vstack([block_pts] + [c.points() for c in chains])
        boundary_tree = cKDTree(np.vstack([dense] + [c.points() for c in block_chains]))
        fixed_tree = cKDTree(fixed_preview)

        free = self._candidates(boundary_tree, fixed_tree)
        free = self._smooth(fixed_preview, free, boundary_tree)

        pts, roles, tris = self._triangulate(block_pts, block_roles, chains, free)
        tris = _orient(pts, tris)

        pts, roles, tris = self._reflect(pts, roles, tris, axis=0)
        if self.symmetric_y:
            pts, roles, tris = self._reflect(pts, roles, tris, axis=1)

        cent = pts[tris].mean(axis=1)
        regions = self.domain.inclusion_index(cent)
        gap_mask = (regions == 0) & self.in_block(cent)

        edges, tags = _boundary_edges(tris[regions == 0], roles)
        mesh = OracleMesh(
            nodes=pts,
            triangles=tris,
            regions=regions,
            edges=edges,
            edge_tags=tags,
            roles=roles,
            n_layers=self.rows,
            h_target=self.h_target,
            eps=self.domain.eps,
            gap_triangles=gap_mask,
            domain=self.domain,
        )
        min_area = float(np.min(mesh.signed_areas()))
        if not min_area > 0:
            raise GeometryError(f"mesh contains a non-positive triangle (area {min_area:.3e})")
        logger.info("Mesh built", eps=self.domain.eps, h=self.h_target, **mesh.summary())
        return mesh


def _orient(pts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    tris = tris.copy()
    neg = area < 0
    tris[neg] = tris[neg][:, [0, 2, 1]]
    return tris


def _boundary_edges(matrix_tris: np.ndarray, roles: np.ndarray) -> Tuple[np.ndarray, List[BoundaryTag]]:
    all_edges = np.sort(
        np.vstack([matrix_tris[:, [0, 1]], matrix_tris[:, [1, 2]], matrix_tris[:, [2, 0]]]), axis=1
    )
    uniq, counts = np.unique(all_edges, axis=0, return_counts=True)
    edges = uniq[counts == 1]
    tags: List[BoundaryTag] = []
    for a, b in edges:
        ra, rb = NodeRole(roles[a]), NodeRole(roles[b])
        if NodeRole.SIDE in (ra, rb):
            tags.append(BoundaryTag.CELL_SIDE)
        elif ra == rb == NodeRole.INCLUSION_1:
            tags.append(BoundaryTag.INCLUSION_1)
        elif ra == rb == NodeRole.INCLUSION_2:
            tags.append(BoundaryTag.INCLUSION_2)
        elif ra == rb == NodeRole.OUTER:
            tags.append(BoundaryTag.OUTER)
        else:
            raise GeometryError(f"boundary edge ({a}, {b}) joins roles {ra.name} and {rb.name}")
    return edges, tags


def build_domain_mesh(
    domain: PairDomain,
    h_target: Optional[float] = None,
    n_layers: Optional[int] = None,
    **kwargs,
) -> OracleMesh:
    """Mesh a concrete domain (pair or period cell)."""
    return MeshBuilder(
        domain,
        h_target=settings.h_target if h_target is None else h_target,
        n_layers=settings.gap_layers if n_layers is None else n_layers,
        **kwargs,
    ).build()


def build_mesh(
    g: InclusionPairGeometry,
    h_target: Optional[float] = None,
    n_layers: Optional[int] = None,
    **kwargs,
) -> OracleMesh:
    """
    Mesh the 2D domain of a model geometry.

    Args:
        g: 2D inclusion pair geometry
        h_target: Far-field element size
        n_layers: Element layers across the gap (>= 4)

    Returns:
        OracleMesh with region and boundary tags
    """
    return build_domain_mesh(geometry_domain(g), h_target=h_target, n_layers=n_layers, **kwargs)


def mesh_quality(mesh: OracleMesh) -> Dict[str, float]:
    """Minimum angles inside and outside the gap block and the minimum signed area."""
    tris = mesh.matrix_triangles
    gap = mesh.gap_triangles[mesh.regions == 0]
    angles = triangle_angles(mesh.nodes, tris).min(axis=1)
    areas = mesh.signed_areas(tris)
    return {
        "min_angle_outside_gap": float(angles[~gap].min()) if np.any(~gap) else 180.0,
        "min_angle_gap": float(angles[gap].min()) if np.any(gap) else 180.0,
        "min_area": float(areas.min()),
    }


def write_mesh(mesh: OracleMesh, path: Path) -> None:
    """Write the plain-text mesh format with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"NODES {mesh.n_nodes}"]
    lines += [f"{i} {x:.17g} {y:.17g}" for i, (x, y) in enumerate(mesh.nodes)]
    lines.append(f"TRIS {len(mesh.triangles)} REGION")
    lines += [
        f"{i} {a} {b} {c} {REGION_TAGS[int(r)].value}"
        for i, ((a, b, c), r) in enumerate(zip(mesh.triangles, mesh.regions))
    ]
    lines.append(f"EDGES {len(mesh.edges)} BOUNDARY")
    lines += [f"{i} {a} {b} {t.value}" for i, ((a, b), t) in enumerate(zip(mesh.edges, mesh.edge_tags))]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("Mesh written", path=str(path))


def read_mesh(path: Path, n_layers: int = 0, h_target: float = 0.0) -> OracleMesh:
    """Read the plain-text mesh format; node roles are rebuilt from edge tags."""
    tokens = Path(path).read_text(encoding="utf-8").split("\n")
    pos = 0

    def header(expected: str) -> int:
        nonlocal pos
        parts = tokens[pos].split()
        if not parts or parts[0] != expected:
            raise GeometryError(f"expected {expected} header at line {pos + 1}")
        pos += 1
        return int(parts[1])

    n = header("NODES")
    nodes = np.array([[float(v) for v in tokens[pos + k].split()[1:3]] for k in range(n)])
    pos += n
    k = header("TRIS")
    rows = [tokens[pos + i].split() for i in range(k)]
    pos += k
    triangles = np.array([[int(v) for v in r[1:4]] for r in rows], dtype=int)
    regions = np.array([REGION_CODES[RegionTag(r[4])] for r in rows], dtype=int)
    e = header("EDGES")
    erows = [tokens[pos + i].split() for i in range(e)]
    edges = np.array([[int(v) for v in r[1:3]] for r in erows], dtype=int).reshape(-1, 2)
    tags = [BoundaryTag(r[3]) for r in erows]

    role_of = {
        BoundaryTag.INCLUSION_1: NodeRole.INCLUSION_1,
        BoundaryTag.INCLUSION_2: NodeRole.INCLUSION_2,
        BoundaryTag.OUTER: NodeRole.OUTER,
        BoundaryTag.CELL_SIDE: NodeRole.SIDE,
    }
    roles = np.zeros(n, dtype=int)
    for (a, b), t in zip(edges, tags):
        for v in (a, b):
            if _ROLE_PRIORITY[role_of[t]] > _ROLE_PRIORITY[NodeRole(roles[v])]:
                roles[v] = role_of[t]
    return OracleMesh(
        nodes=nodes,
        triangles=triangles,
        regions=regions,
        edges=edges,
        edge_tags=tags,
        roles=roles,
        n_layers=n_layers,
        h_target=h_target,
        gap_triangles=np.zeros(len(triangles), dtype=bool),
    )
