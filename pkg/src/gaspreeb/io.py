"""Writers and readers for Reeb graphs, embedded arcs and reports."""

import hashlib
import json
import os

import numpy as np

from .arcs import EmbeddedArc


def dumps(data):
    """Canonical JSON text: sorted keys, fixed indent, shortest float repr."""
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, data):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(data))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_reeb(path, reeb):
    write_json(path, reeb.to_dict())


def write_arcs(path, embedded):
    write_json(path, embedded.to_dict())


def read_arcs(path):
    """Arcs from an ``arcs.json`` file as ``(method, params, [EmbeddedArc])``."""
    data = read_json(path)
    if data.get("schema") != 1:
        raise ValueError(f"{path}: unsupported arcs schema {data.get('schema')!r}")
    return data["method"], data["params"], [EmbeddedArc.from_dict(a) for a in data["arcs"]]


def write_vtk(path, embedded, title="reeb graph arcs"):
    """Legacy ASCII VTK polydata with one POLYLINE per arc."""
    arcs = embedded.arcs
    n_pts = sum(len(a.points) for a in arcs)
    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET POLYDATA",
             f"POINTS {n_pts} double"]
    for a in arcs:
        lines.extend(" ".join(repr(float(x)) for x in p) for p in a.points)
    lines.append(f"LINES {len(arcs)} {n_pts + len(arcs)}")
    start = 0
    for a in arcs:
        k = len(a.points)
        lines.append(" ".join(str(i) for i in [k, *range(start, start + k)]))
        start += k
    lines.extend([f"CELL_DATA {len(arcs)}", "SCALARS edge int 1", "LOOKUP_TABLE default"])
    lines.extend(str(a.edge) for a in arcs)
    lines.extend([f"POINT_DATA {n_pts}", "SCALARS isovalue double 1", "LOOKUP_TABLE default"])
    for a in arcs:
        lines.extend(repr(float(v)) for v in a.isovalues)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_obj_lines(path, embedded):
    """Arcs as OBJ polylines (``l`` records), viewable next to the mesh."""
    out, base = [], 1
    for a in embedded.arcs:
        out.extend("v " + " ".join(repr(float(x)) for x in p) for p in a.points)
    for a in embedded.arcs:
        out.append("l " + " ".join(str(base + i) for i in range(len(a.points))))
        base += len(a.points)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def mesh_digest(mesh):
    """Content hash of a mesh, used to check that two runs share an input."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(mesh.vertices).tobytes())
    h.update(np.ascontiguousarray(mesh.triangles).astype(np.int64).tobytes())
    return h.hexdigest()[:16]


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
