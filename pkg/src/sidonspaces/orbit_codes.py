"""One-orbit cyclic subspace codes ``Orb(V) = {alpha V}`` and their parameters."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _batch
from .errors import BudgetExceeded, InputError
from .fq_linear import Ambient, FqSubspace, intersect, residue_ranks, scale, span, stabilizer_field_degree
from .sidon_core import ORBIT_CAP, check_sidon_orbit

EXPORT_CAP = 200_000


@dataclass(frozen=True)
class OrbitCode:
    representative: FqSubspace
    orbit_size: int
    min_distance: int | None  # None when the orbit has a single codeword
    stabilizer_degree: int
    sidon: bool

    @property
    def q(self) -> int:
        return self.representative.q

    @property
    def n(self) -> int:
        return self.representative.ambient.field_degree

    @property
    def k(self) -> int:
        return self.representative.dim

    def manifest(self) -> dict:
        return {"q": self.q, "n": self.n, "k": self.k, "orbit_size": self.orbit_size,
                "min_distance": self.min_distance, "sidon": self.sidon}


def subspace_distance(U: FqSubspace, V: FqSubspace) -> int:
    return U.dim + V.dim - 2 * intersect(U, V).dim


def build_orbit(V: FqSubspace, cap: int = ORBIT_CAP) -> OrbitCode:
    """Orbit size from the stabilizer field, distance from one alpha scan.

    ``d(alpha V, beta V) = d(V, (beta/alpha) V)``, so scanning a transversal
    of ``F^*/F_q^*`` suffices.
    """
    if V.ambient.pair or V.dim == 0:
        raise InputError("expected a nonzero subspace of a field")
    amb = V.ambient
    q, n, m = V.q, amb.field_degree, V.dim
    t = stabilizer_field_degree(V)
    size = (q**n - 1) // (q**t - 1)
    T = _batch.projective_transversal(q, n)
    T = T[T != 1]
    if len(T) > cap:
        raise BudgetExceeded("orbit distance scan", len(T), cap)
    ranks = residue_ranks(V, V, T)  # m - dim(V & alpha V)
    moved = ranks[ranks > 0]
    dist = 2 * int(moved.min()) if len(moved) else None
    sidon = check_sidon_orbit(V, cap).is_sidon
    if m >= 2:
        assert sidon == (size == (q**n - 1) // (q - 1) and dist == 2 * m - 2), "orbit parameters disagree"
    return OrbitCode(V, size, dist, t, sidon)


def codewords(code: OrbitCode, cap: int = EXPORT_CAP):
    """Distinct codewords in transversal order."""
    if code.orbit_size > cap:
        raise BudgetExceeded("codebook export", code.orbit_size, cap)
    V = code.representative
    seen = set()
    for a in _batch.projective_transversal(V.q, code.n):
        W = scale(V, int(a))
        if W.basis in seen:
            continue
        seen.add(W.basis)
        yield W
    assert len(seen) == code.orbit_size


def _format_matrix(W: FqSubspace) -> str:
    return ";".join(",".join(str(c) for c in row) for row in W.coord_matrix())


def export_codebook(code: OrbitCode, path, cap: int = EXPORT_CAP) -> Path:
    """Manifest JSON on the first line, then one canonical basis matrix per
    line (rows split by ``;``, entries by ``,``)."""
    as_dir = str(path).endswith("/")
    path = Path(path)
    if as_dir or path.is_dir():
        path.mkdir(parents=True, exist_ok=True)
        path = path / "codebook.txt"
    lines = [json.dumps(code.manifest(), sort_keys=True)]
    lines.extend(_format_matrix(W) for W in codewords(code, cap))
    path.write_text("\n".join(lines) + "\n")
    return path


def import_codebook(path, ambient: Ambient | None = None):
    """``(manifest, matrices)``; matrices become subspaces when ``ambient`` is given."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise InputError("empty codebook")
    manifest = json.loads(text[0])
    mats = [[[int(c) for c in row.split(",")] for row in line.split(";")] for line in text[1:] if line]
    if len(mats) != manifest["orbit_size"]:
        raise InputError("codebook length does not match its manifest")
    if ambient is None:
        return manifest, mats
    subs = []
    for M in mats:
        W = span(ambient, [ambient.from_coords(r) for r in M])
        if W.coord_matrix() != M:
            raise InputError("codebook row is not in canonical form")
        subs.append(W)
    return manifest, subs


def distance_distribution(code: OrbitCode) -> dict[int, int]:
    """Counts of ``d(V, alpha V)`` over the nontrivial transversal."""
    V = code.representative
    T = _batch.projective_transversal(V.q, code.n)
    ranks = residue_ranks(V, V, T[T != 1])
    vals, counts = np.unique(2 * ranks, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}
