"""Plain-text serialisation of data sets, spectra, indicator grids and scans.

Numbers are written with ``%.17g`` so that reading a file and writing it again
reproduces it byte for byte.  Header lines start with ``#``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .frequency import FrequencyGrid
from .imaging import IndicatorGrid, ScanCurve, SearchBox
from .spectral import OperatorSpectrum
from .synthesis import FarField, FieldDataset, NearField

FMT = "%.17g"


class FormatError(ValueError):
    """Malformed file; the message starts with ``<path>:<line>``."""


def num(x) -> str:
    return FMT % x


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class _Reader:
    def __init__(self, text: str, name: str = "<text>"):
        self.lines = text.splitlines()
        self.name = name
        self.pos = 0

    def fail(self, msg: str, line: int | None = None):
        raise FormatError(f"{self.name}:{line if line is not None else self.pos}: {msg}")

    def header(self, key: str) -> str:
        """Consume ``# key rest`` and return ``rest``."""
        if self.pos >= len(self.lines):
            self.pos += 1
            self.fail(f"unexpected end of file, expected '# {key}'")
        line = self.lines[self.pos]
        self.pos += 1
        prefix = f"# {key}"
        if not (line == prefix or line.startswith(prefix + " ")):
            self.fail(f"expected '# {key}', found {line[:40]!r}")
        return line[len(prefix):].strip()

    def floats(self, text: str, count: int | None = None) -> list[float]:
        try:
            vals = [float(v) for v in text.split()]
        except ValueError:
            self.fail(f"non-numeric entry in {text[:40]!r}")
        if count is not None and len(vals) != count:
            self.fail(f"expected {count} numbers, found {len(vals)}")
        return vals

    def row(self, count: int) -> list[float]:
        if self.pos >= len(self.lines):
            self.pos += 1
            self.fail("unexpected end of file in data rows")
        line = self.lines[self.pos]
        self.pos += 1
        if line.startswith("#"):
            self.fail("header line inside data block")
        return self.floats(line, count)

    def json(self, text: str):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            self.fail(f"bad manifest json: {exc.msg}")

    def finish(self):
        rest = [i for i in range(self.pos, len(self.lines)) if self.lines[i].strip()]
        if rest:
            self.fail("trailing content after data block", rest[0] + 1)


def _read_text(path) -> tuple[str, str]:
    p = Path(path)
    return p.read_text(encoding="utf-8"), str(p)


# -- field data sets ----------------------------------------------------------------

def dataset_to_text(ds: FieldDataset) -> str:
    g = ds.grid
    vec = " ".join(num(v) for v in ds.mode.vector)
    label = "direction" if isinstance(ds.mode, FarField) else "receiver"
    lines = [
        f"# mode {ds.mode.kind}",
        f"# {label} {vec}",
        f"# band {num(g.k_min)} {num(g.k_max)} {g.n}",
        f"# kc {num(g.k_c)} K {num(g.K)} N {g.n}",
        f"# model-hash {ds.model_hash or 'none'}",
        f"# manifest {canonical_json(ds.manifest)}",
        "# k re im",
    ]
    lines += [f"{num(k)} {num(v.real)} {num(v.imag)}" for k, v in zip(ds.wavenumbers, ds.values)]
    return "\n".join(lines) + "\n"


def dataset_from_text(text: str, name: str = "<dataset>") -> FieldDataset:
    r = _Reader(text, name)
    kind = r.header("mode")
    if kind not in ("far", "near"):
        r.fail(f"unknown mode {kind!r}")
    label = "direction" if kind == "far" else "receiver"
    vec = r.floats(r.header(label))
    try:
        mode = FarField(tuple(vec)) if kind == "far" else NearField(tuple(vec))
    except ValueError as exc:
        r.fail(str(exc))
    band = r.header("band").split()
    if len(band) != 3:
        r.fail("band needs k_min k_max N")
    try:
        grid = FrequencyGrid(float(band[0]), float(band[1]), int(band[2]))
    except ValueError as exc:
        r.fail(str(exc))
    r.header("kc")
    model_hash = r.header("model-hash")
    hash_line = r.pos
    manifest = r.json(r.header("manifest"))
    if manifest.get("model_hash", "none") != model_hash:
        r.fail("model-hash header disagrees with the manifest", hash_line)
    if r.header("k") != "re im":
        r.fail("expected column header '# k re im'")
    n_rows = 2 * grid.n - 1
    rows = [r.row(3) for _ in range(n_rows)]
    r.finish()
    arr = np.array(rows)
    return FieldDataset(mode, grid, arr[:, 0], arr[:, 1] + 1j * arr[:, 2], manifest)


def write_dataset(ds: FieldDataset, path):
    Path(path).write_text(dataset_to_text(ds), encoding="utf-8")


def read_dataset(path) -> FieldDataset:
    return dataset_from_text(*_read_text(path))


# -- spectra ---------------------------------------------------------------------------

def spectrum_to_text(spec: OperatorSpectrum) -> str:
    n = spec.n
    lines = [f"# spectrum {n} {spec.method} {num(spec.floor)}", "# matrix"]
    for row in spec.matrix:
        lines.append(" ".join(f"{num(v.real)} {num(v.imag)}" for v in row))
    lines.append("# eigenvalues n re im sharp")
    for i, (lam, s) in enumerate(zip(spec.raw, spec.sharp), start=1):
        lines.append(f"{i} {num(lam.real)} {num(lam.imag)} {num(s)}")
    lines.append("# eigenvectors columns")
    for row in spec.vectors:
        lines.append(" ".join(f"{num(v.real)} {num(v.imag)}" for v in row))
    return "\n".join(lines) + "\n"


def spectrum_from_text(text: str, name: str = "<spectrum>") -> OperatorSpectrum:
    r = _Reader(text, name)
    head = r.header("spectrum").split()
    if len(head) != 3:
        r.fail("spectrum header needs N method floor")
    n, method, floor = int(head[0]), head[1], float(head[2])

    def cmat():
        rows = np.array([r.row(2 * n) for _ in range(n)])
        return rows[:, 0::2] + 1j * rows[:, 1::2]

    r.header("matrix")
    matrix = cmat()
    r.header("eigenvalues")
    ev = np.array([r.row(4) for _ in range(n)])[:, 1:]
    r.header("eigenvectors")
    vecs = cmat()
    r.finish()
    return OperatorSpectrum(matrix, ev[:, 0] + 1j * ev[:, 1], vecs, ev[:, 2], floor, method)


def write_spectrum(spec: OperatorSpectrum, path):
    Path(path).write_text(spectrum_to_text(spec), encoding="utf-8")


def read_spectrum(path) -> OperatorSpectrum:
    return spectrum_from_text(*_read_text(path))


# -- indicator grids ---------------------------------------------------------------

def grid_to_text(grid: IndicatorGrid) -> str:
    box = grid.manifest.get("box")
    if box is None:
        raise FormatError("indicator grid manifest lacks the search box")
    axes = " ".join(f"{num(lo)} {num(hi)} {int(c)}" for lo, hi, c in zip(box["lo"], box["hi"], box["counts"]))
    lines = [f"# axes {len(box['counts'])} {axes}", f"# manifest {canonical_json(grid.manifest)}"]
    cols = " ".join(f"y{i + 1}" for i in range(len(grid.axes)))
    lines.append(f"# {cols} raw normalized")
    pts = grid.points()
    for p, raw, nv in zip(pts, grid.raw.ravel(), grid.normalized.ravel()):
        lines.append(" ".join(num(v) for v in p) + f" {num(raw)} {num(nv)}")
    return "\n".join(lines) + "\n"


def grid_from_text(text: str, name: str = "<grid>") -> IndicatorGrid:
    r = _Reader(text, name)
    head = r.header("axes").split()
    if not head:
        r.fail("axes header is empty")
    dim = int(head[0])
    if len(head) != 1 + 3 * dim:
        r.fail(f"axes header needs {dim} triples 'lo hi count'")
    lo = tuple(float(head[1 + 3 * i]) for i in range(dim))
    hi = tuple(float(head[2 + 3 * i]) for i in range(dim))
    counts = tuple(int(head[3 + 3 * i]) for i in range(dim))
    box = SearchBox(lo, hi, counts)
    manifest = r.json(r.header("manifest"))
    r.header("y1")
    pts = box.points()
    data = np.empty((len(pts), dim + 2))
    for i in range(len(pts)):
        data[i] = r.row(dim + 2)
        if not np.array_equal(data[i, :dim], pts[i]):
            r.fail("sampling point does not match the lattice")
    r.finish()
    grid = IndicatorGrid(box.axes(), data[:, dim].reshape(counts), data[:, dim + 1].reshape(counts), manifest)
    if "delta" in manifest:
        grid.mask = grid.normalized >= manifest["delta"]
    return grid


def write_grid(grid: IndicatorGrid, path):
    Path(path).write_text(grid_to_text(grid), encoding="utf-8")


def read_grid(path) -> IndicatorGrid:
    return grid_from_text(*_read_text(path))


def write_pgm(grid: IndicatorGrid, path, slice_axis: int = 1):
    """8-bit greyscale raster of the normalised grid.

    2D grids are written with ``y2`` increasing upwards; 3D grids are cut at
    the middle index of ``slice_axis``.
    """
    img = np.asarray(grid.normalized)
    if img.ndim == 3:
        img = np.take(img, img.shape[slice_axis] // 2, axis=slice_axis)
    elif img.ndim == 1:
        img = img[:, None]
    raster = np.flipud(np.clip(img, 0, 1).T)
    pixels = np.round(255 * raster).astype(np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(pixels.tobytes())


# -- scan curves ---------------------------------------------------------------------

def scan_to_text(curve: ScanCurve) -> str:
    est = "none" if curve.estimate is None else num(curve.estimate)
    lines = [
        f"# z {' '.join(num(v) for v in curve.z)}",
        f"# eps {num(curve.eps)}",
        f"# resolution {num(curve.resolution)}",
        f"# estimate {est}",
        f"# manifest {canonical_json(curve.manifest)}",
        "# eta value",
    ]
    lines += [f"{num(e)} {num(v)}" for e, v in zip(curve.etas, curve.values)]
    return "\n".join(lines) + "\n"


def scan_from_text(text: str, name: str = "<scan>") -> ScanCurve:
    r = _Reader(text, name)
    z = tuple(r.floats(r.header("z")))
    eps = r.floats(r.header("eps"), 1)[0]
    res = r.floats(r.header("resolution"), 1)[0]
    est_text = r.header("estimate")
    est = None if est_text == "none" else r.floats(est_text, 1)[0]
    manifest = r.json(r.header("manifest"))
    r.header("eta")
    rows = []
    while r.pos < len(r.lines) and r.lines[r.pos].strip():
        rows.append(r.row(2))
    r.finish()
    arr = np.array(rows).reshape(-1, 2)
    return ScanCurve(arr[:, 0], arr[:, 1], z, eps, est, res, manifest)


def write_scan(curve: ScanCurve, path):
    Path(path).write_text(scan_to_text(curve), encoding="utf-8")


def read_scan(path) -> ScanCurve:
    return scan_from_text(*_read_text(path))


def write_manifest(manifest: dict, path):
    Path(path).write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n", encoding="utf-8")
