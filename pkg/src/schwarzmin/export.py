"""Serialization helpers: deterministic CSV, JSON, and OBJ meshes.

Floats are written with repr(), which is the shortest decimal that
round-trips, so identical inputs always produce byte-identical files.
"""

import csv
import io
import json
import math

import numpy as np


def format_value(v):
    """One CSV cell. None becomes the empty cell."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(
                f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([format_value(v) for v in row])
    text = buf.getvalue()
    with open(path, "w") as fh:
        fh.write(text)
    return text


def _clean(obj):
    """Replace non-finite floats with None so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dump_json(obj):
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    text = dump_json(obj)
    with open(path, "w") as fh:
        fh.write(text)
    return text


def revolution_mesh(samples, angles):
    """Triangulated surface of revolution from profile samples.

    samples is an (N, 2) array of (t, x) with x > 0; the surface point for
    sample i and angle j is (x_i cos phi_j, x_i sin phi_j, t_i).  Returns
    (vertices, faces) with faces as 0-based index triples.  The strip
    between consecutive rings closes modulo `angles`, so the seam is shared
    vertices, not duplicates, and the mesh is watertight on the sides.
    Triangles wind counterclockwise seen from outside (away from the axis).
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("samples must be an (N, 2) array of (t, x)")
    n = len(pts)
    if n < 2:
        raise ValueError(f"need at least 2 profile samples, got {n}")
    if angles < 8:
        raise ValueError(f"angular resolution must be >= 8, got {angles}")
    if np.any(pts[:, 1] <= 0.0):
        raise ValueError("profile radii must be positive")

    phi = 2.0 * np.pi * np.arange(angles) / angles
    cs, sn = np.cos(phi), np.sin(phi)
    t = np.repeat(pts[:, 0], angles)
    x = np.repeat(pts[:, 1], angles)
    vertices = np.column_stack([x * np.tile(cs, n), x * np.tile(sn, n), t])

    j = np.arange(angles)
    jn = (j + 1) % angles
    faces = np.empty((2 * (n - 1) * angles, 3), dtype=np.int64)
    for i in range(n - 1):
        a = i * angles + j
        b = i * angles + jn
        c = (i + 1) * angles + jn
        d = (i + 1) * angles + j
        # two triangles per quad, both oriented (ring, next-angle, next-ring)
        faces[2 * i * angles:(2 * i + 1) * angles] = \
            np.column_stack([a, b, c])
        faces[(2 * i + 1) * angles:(2 * i + 2) * angles] = \
            np.column_stack([a, c, d])
    return vertices, faces


def write_obj(path, vertices, faces):
    """Wavefront OBJ with 1-based face indices."""
    lines = []
    for v in vertices:
        lines.append(f"v {repr(float(v[0]))} {repr(float(v[1]))} "
                     f"{repr(float(v[2]))}")
    for f in faces:
        lines.append(f"f {int(f[0]) + 1} {int(f[1]) + 1} {int(f[2]) + 1}")
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return text
