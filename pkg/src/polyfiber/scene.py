"""Scene assembly and serialization: curves, roots, slices in one document.

A scene is a self-describing JSON document (version string ``polyfiber-scene/1``)
whose numbers are written as shortest round-trip decimals, so parsing it back
reproduces every float bit-for-bit. Mirror twins are materialized as separate
curves at assembly time; consumers never need symmetry logic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .locus import (
    BranchKind,
    CubicClassification,
    SlopeCategory,
    SpaceCurve,
    classify_cubic,
    lift_branches,
    sweep_locus,
    LOCUS_TOL,
)
from .polynomial import RealPolynomial, eval_complex, expand_real_imag
from .rootfind import ROOT_TOL, CLUSTER_TOL, RootInfo, SliceResult, find_roots, slice_at

SCENE_FORMAT = "polyfiber-scene/1"
Z_CLIP_DEFAULT = 1e6
_CHECK_TOL = 1e-9   # height-contract spot checks
_PROV_TOL = 1e-6    # residual bound when re-checking roots against f


class SceneFormatError(ValueError):
    """Scene document malformed, wrong version, or violating invariants."""


class ProvenanceError(ValueError):
    """Scene parts disagree with the polynomial they claim to come from."""


@dataclass(frozen=True)
class Scene:
    polynomial: RealPolynomial
    branches: tuple[SpaceCurve, ...]
    roots: tuple[RootInfo, ...]
    slice_result: SliceResult | None
    classification: CubicClassification | None
    clipped: tuple[tuple[int, ...], ...]
    meta: dict


def _curve_sort_key(curve: SpaceCurve):
    order = {BranchKind.REAL_AXIS: 0, BranchKind.OFF_AXIS: 1, BranchKind.VERTICAL_LINE: 2}
    xs = [p[0] for p in curve.points]
    ys = [p[1] for p in curve.points]
    return (order[curve.source_kind], min(xs), int(curve.mirrored), min(ys))


def _height_violation(p, curve: SpaceCurve, skip: tuple[int, ...] = ()) -> int | None:
    """Index of the first point whose z is not P(x, y), or None."""
    pts = np.asarray(curve.points, dtype=float)
    if pts.size == 0:
        return None
    xs, ys, zs = pts[:, 0], pts[:, 1], pts[:, 2]
    expect = np.atleast_1d(p(xs, ys))
    bound = _CHECK_TOL * (1.0 + np.abs(expect) + np.atleast_1d(p.magnitude_at(xs, ys)))
    bad = np.abs(zs - expect) > bound
    if skip:
        bad[list(skip)] = False
    if bad.any():
        return int(np.argmax(bad))
    return None


def _check_curves(f: RealPolynomial, curves: list[SpaceCurve]) -> None:
    p, _ = expand_real_imag(f)
    for curve in curves:
        i = _height_violation(p, curve)
        if i is not None:
            x, y, z = curve.points[i]
            raise ProvenanceError(
                f"curve height {z!r} at (x={x!r}, y={y!r}) does not match the polynomial"
            )


def _check_roots(f: RealPolynomial, roots, level: float = 0.0, what: str = "root") -> None:
    arr = np.abs(f.as_array())
    for r in roots:
        val = abs(eval_complex(f, r.location) - level)
        scale = float(np.polynomial.polynomial.polyval(abs(r.location), arr)) + float(arr.max())
        if val > _PROV_TOL * scale:
            raise ProvenanceError(f"{what} {r.location!r} does not belong to this polynomial")


def build_scene(
    f: RealPolynomial,
    curves: list[SpaceCurve] | tuple[SpaceCurve, ...],
    roots: list[RootInfo] | tuple[RootInfo, ...],
    slice_result: SliceResult | None = None,
    classification: CubicClassification | None = None,
    *,
    x_range: tuple[float, float] | None = None,
    samples: int | None = None,
    tolerances: dict | None = None,
    z_clip: float = Z_CLIP_DEFAULT,
) -> Scene:
    """Assemble parts derived from the same polynomial into one scene.

    Curves come first real-axis, then off-axis by minimum x, then vertical
    lines by abscissa. Heights beyond ``z_clip`` are clamped and the point
    indices recorded. Parts are spot-checked against f; mixed provenance
    raises ProvenanceError.
    """
    curves = list(curves)
    _check_curves(f, curves)
    _check_roots(f, roots)
    if slice_result is not None:
        _check_roots(f, slice_result.intersections, slice_result.level, "slice intersection")
    if classification is not None:
        expect = classify_cubic(f)
        ok = (
            abs(expect.inflection_x - classification.inflection_x)
            <= 1e-9 * (1.0 + abs(expect.inflection_x))
            and abs(expect.inflection_slope - classification.inflection_slope)
            <= 1e-9 * (1.0 + abs(expect.inflection_slope))
        )
        if not ok:
            raise ProvenanceError("classification does not match the polynomial")
    ordered = sorted(curves, key=_curve_sort_key)
    clipped_branches: list[SpaceCurve] = []
    clipped_idx: list[tuple[int, ...]] = []
    for curve in ordered:
        flags: list[int] = []
        pts: list[tuple[float, float, float]] = []
        for i, (x, y, z) in enumerate(curve.points):
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
                raise ValueError("non-finite curve point")
            if abs(z) > z_clip:
                flags.append(i)
                z = math.copysign(z_clip, z)
            pts.append((x, y, z))
        clipped_branches.append(SpaceCurve(tuple(pts), curve.source_kind, curve.mirrored))
        clipped_idx.append(tuple(flags))
    meta = {
        "format": SCENE_FORMAT,
        "coefficient_order": "ascending",
        "degree": f.degree,
        "x_range": list(x_range) if x_range is not None else None,
        "samples": samples,
        "tolerances": dict(tolerances) if tolerances else {
            "locus": LOCUS_TOL,
            "root": ROOT_TOL,
            "cluster": CLUSTER_TOL,
        },
        "z_clip": z_clip,
    }
    return Scene(
        polynomial=f,
        branches=tuple(clipped_branches),
        roots=tuple(roots),
        slice_result=slice_result,
        classification=classification,
        clipped=tuple(clipped_idx),
        meta=meta,
    )


def compute_scene(
    f: RealPolynomial,
    x_min: float = -3.0,
    x_max: float = 3.0,
    samples: int = 257,
    slice_level: float | None = None,
    locus_tol: float = LOCUS_TOL,
    root_tol: float = ROOT_TOL,
) -> Scene:
    """Full pipeline: sweep the locus, lift it, find roots, slice, classify."""
    p, _ = expand_real_imag(f)
    branches = sweep_locus(f, x_min, x_max, samples, tol=locus_tol)
    curves = lift_branches(branches, p)
    roots = find_roots(f, tol=root_tol)
    sliced = slice_at(f, slice_level, tol=root_tol) if slice_level is not None else None
    classification = classify_cubic(f) if f.degree == 3 else None
    return build_scene(
        f,
        curves,
        roots,
        sliced,
        classification,
        x_range=(x_min, x_max),
        samples=samples,
        tolerances={"locus": locus_tol, "root": root_tol, "cluster": CLUSTER_TOL},
    )


def _root_to_doc(r: RootInfo) -> dict:
    return {
        "re": r.location.real,
        "im": r.location.imag,
        "multiplicity": r.multiplicity,
        "residual": r.residual,
        "locus_residual": r.locus_residual,
    }


def _root_from_doc(doc: dict) -> RootInfo:
    try:
        return RootInfo(
            complex(float(doc["re"]), float(doc["im"])),
            int(doc["multiplicity"]),
            float(doc["residual"]),
            float(doc["locus_residual"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneFormatError(f"malformed root record: {doc!r}") from exc


def to_scene_file(scene: Scene) -> str:
    """Serialize to the versioned JSON scene document."""
    doc = {
        "format": SCENE_FORMAT,
        "polynomial": {
            "coefficients": list(scene.polynomial.coeffs),
            "order": "ascending",
        },
        "meta": scene.meta,
        "curves": [
            {
                "kind": c.source_kind.value,
                "mirrored": c.mirrored,
                "clipped": list(scene.clipped[i]),
                "points": [[x, y, z] for x, y, z in c.points],
            }
            for i, c in enumerate(scene.branches)
        ],
        "roots": [_root_to_doc(r) for r in scene.roots],
        "slice": None
        if scene.slice_result is None
        else {
            "level": scene.slice_result.level,
            "total_multiplicity": scene.slice_result.total_multiplicity,
            "intersections": [_root_to_doc(r) for r in scene.slice_result.intersections],
        },
        "classification": None
        if scene.classification is None
        else {
            "category": scene.classification.category.value,
            "inflection_x": scene.classification.inflection_x,
            "inflection_slope": scene.classification.inflection_slope,
        },
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def from_scene_file(text: str) -> Scene:
    """Parse and validate a scene document; spot-checks the height contract."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"not a scene document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SceneFormatError("not a scene document: top level must be an object")
    if doc.get("format") != SCENE_FORMAT:
        raise SceneFormatError(
            f"unsupported scene format {doc.get('format')!r}, expected {SCENE_FORMAT!r}"
        )
    try:
        f = RealPolynomial(tuple(float(c) for c in doc["polynomial"]["coefficients"]))
        meta = dict(doc["meta"])
        curves = []
        clipped = []
        for cdoc in doc["curves"]:
            pts = tuple((float(x), float(y), float(z)) for x, y, z in cdoc["points"])
            curves.append(
                SpaceCurve(pts, BranchKind(cdoc["kind"]), bool(cdoc["mirrored"]))
            )
            clipped.append(tuple(int(i) for i in cdoc["clipped"]))
        roots = tuple(_root_from_doc(r) for r in doc["roots"])
        slice_doc = doc.get("slice")
        slice_result = None
        if slice_doc is not None:
            slice_result = SliceResult(
                float(slice_doc["level"]),
                tuple(_root_from_doc(r) for r in slice_doc["intersections"]),
                int(slice_doc["total_multiplicity"]),
            )
        class_doc = doc.get("classification")
        classification = None
        if class_doc is not None:
            classification = CubicClassification(
                SlopeCategory(class_doc["category"]),
                float(class_doc["inflection_x"]),
                float(class_doc["inflection_slope"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SceneFormatError):
            raise
        raise SceneFormatError(f"malformed scene document: {exc}") from exc
    scene = Scene(f, tuple(curves), roots, slice_result, classification, tuple(clipped), meta)
    _validate_loaded(scene)
    return scene


def _validate_loaded(scene: Scene) -> None:
    p, _ = expand_real_imag(scene.polynomial)
    for ci, curve in enumerate(scene.branches):
        i = _height_violation(p, curve, skip=scene.clipped[ci])
        if i is not None:
            raise SceneFormatError(
                f"invariant violation: curve {ci} point {i} height "
                f"{curve.points[i][2]!r} does not equal the polynomial value"
            )


def to_csv(scene: Scene) -> str:
    """One row per curve point: ``branch,kind,x,y,z`` with 12 significant digits."""
    lines = ["branch,kind,x,y,z"]
    for i, curve in enumerate(scene.branches):
        kind = curve.source_kind.value
        for x, y, z in curve.points:
            lines.append(f"{i},{kind},{x:.12g},{y:.12g},{z:.12g}")
    return "\n".join(lines) + "\n"
