"""Local HTTP service backing the viewer.

Stateless: every request recomputes from the query parameters, and identical
queries produce byte-identical responses. Endpoints:

    GET /api/scene?coeffs=4,0,1&xmin=-3&xmax=3&samples=257&slice=0
    GET /api/roots?coeffs=4,0,1

Everything else is served from the static assets directory (the built
viewer), with a plain fallback page when no assets are available.
"""

from __future__ import annotations

import json
import mimetypes
import os
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .polynomial import DegreeError, parse_coeffs
from .rootfind import ConvergenceError, find_roots
from .scene import compute_scene, to_scene_file

DEFAULT_PORT = 8765
PORT_ENV_VAR = "POLYFIBER_PORT"
MIN_SAMPLES, MAX_SAMPLES = 16, 100_000

_FALLBACK_PAGE = b"""<!doctype html>
<html><head><title>polyfiber</title></head>
<body><h1>polyfiber service</h1>
<p>No viewer assets found. The API is live:</p>
<ul><li><code>/api/scene?coeffs=4,0,1&amp;xmin=-3&amp;xmax=3&amp;samples=257&amp;slice=0</code></li>
<li><code>/api/roots?coeffs=4,0,1</code></li></ul>
</body></html>
"""


class ParamError(ValueError):
    def __init__(self, parameter: str, message: str) -> None:
        super().__init__(message)
        self.parameter = parameter


def _get_one(query: dict, name: str, default: str | None = None) -> str | None:
    values = query.get(name)
    if not values:
        return default
    return values[0]


def _float_param(query: dict, name: str, default: float) -> float:
    raw = _get_one(query, name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ParamError(name, f"{name} must be a number, got {raw!r}") from exc


def scene_params(query: dict) -> dict:
    """Validated keyword arguments for compute_scene from a parsed query string."""
    raw_coeffs = _get_one(query, "coeffs")
    if raw_coeffs is None:
        raise ParamError("coeffs", "coeffs is required")
    descending = _get_one(query, "desc", "0") in ("1", "true", "yes")
    try:
        poly = parse_coeffs(raw_coeffs, descending=descending)
    except (ValueError, DegreeError) as exc:
        raise ParamError("coeffs", str(exc)) from exc
    x_min = _float_param(query, "xmin", -3.0)
    x_max = _float_param(query, "xmax", 3.0)
    if not x_min < x_max:
        raise ParamError("xmin", "need xmin < xmax")
    raw_samples = _get_one(query, "samples", "257")
    try:
        samples = int(raw_samples)
    except ValueError as exc:
        raise ParamError("samples", f"samples must be an integer, got {raw_samples!r}") from exc
    if not MIN_SAMPLES <= samples <= MAX_SAMPLES:
        raise ParamError("samples", f"samples must be in [{MIN_SAMPLES}, {MAX_SAMPLES}]")
    params = {"f": poly, "x_min": x_min, "x_max": x_max, "samples": samples}
    raw_slice = _get_one(query, "slice")
    if raw_slice is not None:
        try:
            params["slice_level"] = float(raw_slice)
        except ValueError as exc:
            raise ParamError("slice", f"slice must be a number, got {raw_slice!r}") from exc
    return params


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, fmt: str, *args) -> None:
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    def _send(self, status: int, content_type: str, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, doc: dict) -> None:
        self._send(status, "application/json", json.dumps(doc).encode())

    def do_GET(self) -> None:  # noqa: N802  (http.server API)
        url = urlparse(self.path)
        query = parse_qs(url.query)
        try:
            if url.path == "/api/scene":
                self._api_scene(query)
            elif url.path == "/api/roots":
                self._api_roots(query)
            else:
                self._static(url.path)
        except ParamError as exc:
            self._send_json(400, {"error": str(exc), "parameter": exc.parameter})
        except ConvergenceError as exc:
            self._send_json(500, {"error": f"computation failed: {exc}"})
        except Exception as exc:  # keep the server alive on surprises
            self._send_json(500, {"error": f"internal error: {exc}"})

    def _api_scene(self, query: dict) -> None:
        params = scene_params(query)
        scene = compute_scene(**params)
        self._send(200, "application/json", to_scene_file(scene).encode())

    def _api_roots(self, query: dict) -> None:
        raw = _get_one(query, "coeffs")
        if raw is None:
            raise ParamError("coeffs", "coeffs is required")
        descending = _get_one(query, "desc", "0") in ("1", "true", "yes")
        try:
            poly = parse_coeffs(raw, descending=descending)
        except (ValueError, DegreeError) as exc:
            raise ParamError("coeffs", str(exc)) from exc
        roots = find_roots(poly)
        doc = {
            "coefficients": list(poly.coeffs),
            "degree": poly.degree,
            "roots": [
                {
                    "re": r.location.real,
                    "im": r.location.imag,
                    "multiplicity": r.multiplicity,
                    "residual": r.residual,
                    "locus_residual": r.locus_residual,
                }
                for r in roots
            ],
        }
        self._send(200, "application/json", json.dumps(doc).encode())

    def _static(self, path: str) -> None:
        assets = getattr(self.server, "assets_dir", None)
        if assets is None:
            self._send(200, "text/html", _FALLBACK_PAGE)
            return
        rel = path.lstrip("/") or "index.html"
        target = (assets / rel).resolve()
        if not target.is_relative_to(assets.resolve()) or not target.is_file():
            self._send_json(404, {"error": f"not found: {path}"})
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self._send(200, ctype, target.read_bytes())


class SceneServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, host: str, port: int, assets_dir: str | Path | None = None,
                 verbose: bool = False) -> None:
        super().__init__((host, port), _Handler)
        self.assets_dir = Path(assets_dir) if assets_dir else None
        self.verbose = verbose


def default_port() -> int:
    raw = os.environ.get(PORT_ENV_VAR)
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_PORT


def serve_forever(
    host: str = "127.0.0.1",
    port: int | None = None,
    assets_dir: str | Path | None = None,
) -> None:
    """Run the service until interrupted."""
    server = SceneServer(host, port if port is not None else default_port(),
                         assets_dir, verbose=True)
    addr = f"http://{server.server_address[0]}:{server.server_address[1]}/"
    print(f"serving on {addr}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
