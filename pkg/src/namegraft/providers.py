"""Record ingestion and the HTTP face-identification client.

Captions, face identifications, and attention maps all enter as data:
one JSON object per line for batch runs, or face lists fetched from an
external service. Everything is validated eagerly so the pipeline only
ever sees well-formed records.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Any

import requests

from namegraft.alignment import Identity
from namegraft.errors import (
    GeometryError,
    ProviderError,
    RecordParseError,
    RecordSchemaError,
    RecordValidationError,
)
from namegraft.geometry import AttentionMap, BoundingBox

__all__ = [
    "ImageRecord",
    "parse_record",
    "serialize_record",
    "fetch_faces_http",
    "DEFAULT_TIMEOUT",
]

DEFAULT_TIMEOUT = 10.0


@dataclass(frozen=True)
class ImageRecord:
    """One pipeline input: a generic caption plus face and attention data."""

    image_id: str
    image_width: int
    image_height: int
    caption: str
    faces: tuple[Identity, ...]
    attention: AttentionMap | None = None


def _where(line_number: int | None) -> str:
    return f" at line {line_number}" if line_number is not None else ""


def _require(obj: dict, field: str, line_number: int | None,
             image_id: str | None) -> Any:
    if field not in obj:
        raise RecordSchemaError(f"schema error: {field}", line_number, image_id)
    return obj[field]


def _positive_int(obj: dict, field: str, line_number: int | None,
                  image_id: str | None) -> int:
    value = _require(obj, field, line_number, image_id)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise RecordSchemaError(
            f"schema error: {field} must be a positive integer",
            line_number, image_id)
    return value


def _string(obj: dict, field: str, line_number: int | None,
            image_id: str | None) -> str:
    value = _require(obj, field, line_number, image_id)
    if not isinstance(value, str):
        raise RecordSchemaError(
            f"schema error: {field} must be a string", line_number, image_id)
    return value


def _parse_face(raw: Any, where: str, image_width: int, image_height: int,
                line_number: int | None, image_id: str | None) -> Identity:
    if not isinstance(raw, dict):
        raise RecordSchemaError(
            f"schema error: {where} must be an object", line_number, image_id)
    for field in ("name", "box", "confidence"):
        if field not in raw:
            raise RecordSchemaError(
                f"schema error: {where}.{field}", line_number, image_id)
    name = raw["name"]
    box = raw["box"]
    confidence = raw["confidence"]
    if not isinstance(name, str):
        raise RecordSchemaError(
            f"schema error: {where}.name must be a string", line_number, image_id)
    if (not isinstance(box, list) or len(box) != 4
            or any(isinstance(v, bool) or not isinstance(v, int) for v in box)):
        raise RecordSchemaError(
            f"schema error: {where}.box must be [x, y, w, h] integers",
            line_number, image_id)
    if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
        raise RecordSchemaError(
            f"schema error: {where}.confidence must be a number",
            line_number, image_id)
    try:
        bounding = BoundingBox(*box)
        identity = Identity(name=name, box=bounding, confidence=float(confidence))
    except (GeometryError, ValueError) as exc:
        raise RecordValidationError(
            f"validation error: {where}: {exc}", line_number, image_id) from exc
    if not bounding.fits_within(image_width, image_height):
        raise RecordValidationError(
            f"validation error: {where}.box {box} exceeds image bounds "
            f"{image_width}x{image_height}", line_number, image_id)
    return identity


def _parse_attention(obj: dict, line_number: int | None,
                     image_id: str | None) -> AttentionMap | None:
    attention = obj.get("attention")
    grid_size = obj.get("grid_size")
    if attention is None:
        if grid_size is not None:
            raise RecordSchemaError(
                "schema error: grid_size without attention", line_number, image_id)
        return None
    if grid_size is None:
        raise RecordSchemaError("schema error: grid_size", line_number, image_id)
    if isinstance(grid_size, bool) or not isinstance(grid_size, int) or grid_size < 1:
        raise RecordSchemaError(
            "schema error: grid_size must be a positive integer",
            line_number, image_id)
    if not isinstance(attention, list) or not all(
            isinstance(row, list) for row in attention):
        raise RecordSchemaError(
            "schema error: attention must be an array of arrays",
            line_number, image_id)
    for t, row in enumerate(attention):
        for value in row:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise RecordSchemaError(
                    f"schema error: attention row {t} must contain numbers",
                    line_number, image_id)
    try:
        return AttentionMap.from_rows(attention, grid_size)
    except GeometryError as exc:
        raise RecordValidationError(
            f"validation error: {exc}", line_number, image_id) from exc


def parse_record(json_line: str, line_number: int | None = None) -> ImageRecord:
    """Parse and fully validate one JSONL record line.

    Raises RecordParseError for bad JSON, RecordSchemaError for missing or
    ill-shaped fields, RecordValidationError for invariant violations; all
    three carry the line number and, once known, the image id.
    """
    try:
        obj = json.loads(json_line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(
            f"parse error{_where(line_number)}: {exc.msg}", line_number) from exc
    if not isinstance(obj, dict):
        raise RecordSchemaError(
            "schema error: record must be a JSON object", line_number)

    raw_id = obj.get("image_id")
    image_id = raw_id if isinstance(raw_id, str) else None
    image_id_value = _string(obj, "image_id", line_number, image_id)
    width = _positive_int(obj, "image_width", line_number, image_id_value)
    height = _positive_int(obj, "image_height", line_number, image_id_value)
    caption = _string(obj, "caption", line_number, image_id_value)
    faces_raw = _require(obj, "faces", line_number, image_id_value)
    if not isinstance(faces_raw, list):
        raise RecordSchemaError(
            "schema error: faces must be an array", line_number, image_id_value)
    faces = tuple(
        _parse_face(raw, f"faces[{i}]", width, height, line_number, image_id_value)
        for i, raw in enumerate(faces_raw)
    )
    attention = _parse_attention(obj, line_number, image_id_value)
    return ImageRecord(
        image_id=image_id_value,
        image_width=width,
        image_height=height,
        caption=caption,
        faces=faces,
        attention=attention,
    )


def serialize_record(record: ImageRecord) -> str:
    """One-line JSON form of a record; parse_record round-trips it."""
    obj: dict[str, Any] = {
        "image_id": record.image_id,
        "image_width": record.image_width,
        "image_height": record.image_height,
        "caption": record.caption,
        "faces": [
            {"name": f.name, "box": [f.box.x, f.box.y, f.box.w, f.box.h],
             "confidence": f.confidence}
            for f in record.faces
        ],
    }
    if record.attention is not None:
        obj["attention"] = [list(row) for row in record.attention.rows]
        obj["grid_size"] = record.attention.grid_size
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def fetch_faces_http(endpoint: str, image_id: str,
                     timeout: float = DEFAULT_TIMEOUT, *,
                     image_width: int | None = None,
                     image_height: int | None = None,
                     max_retries: int = 2,
                     backoff: float = 0.5) -> list[Identity]:
    """POST to `<endpoint>/identify` and validate the returned face list.

    Transport failures and non-2xx responses are retried up to
    `max_retries` times with exponential backoff; a 2xx response with an
    invalid body fails immediately since retrying cannot fix it. Box
    bounds are checked when image dims are given.
    """
    url = endpoint.rstrip("/") + "/identify"
    failure = "no attempt made"
    for attempt in range(max_retries + 1):
        try:
            response = requests.post(url, json={"image_id": image_id}, timeout=timeout)
        except requests.RequestException as exc:
            failure = f"request failed: {exc}"
        else:
            if 200 <= response.status_code < 300:
                return _faces_from_response(response, url, image_id,
                                            image_width, image_height)
            failure = f"HTTP {response.status_code}"
        if attempt < max_retries:
            time.sleep(backoff * (2 ** attempt))
    raise ProviderError(
        f"face service {url} failed for image '{image_id}': {failure}",
        endpoint=endpoint, image_id=image_id)


def _faces_from_response(response: requests.Response, url: str, image_id: str,
                         image_width: int | None,
                         image_height: int | None) -> list[Identity]:
    def invalid(detail: str) -> ProviderError:
        return ProviderError(
            f"face service {url} returned invalid body for image "
            f"'{image_id}': {detail}", endpoint=url, image_id=image_id)

    try:
        body = response.json()
    except ValueError as exc:
        raise invalid("not JSON") from exc
    if not isinstance(body, dict) or "faces" not in body:
        raise invalid("missing 'faces'")
    if not isinstance(body["faces"], list):
        raise invalid("'faces' must be an array")

    # No bounds check possible without dims; use maxsize as "unbounded".
    width = image_width if image_width is not None else (1 << 62)
    height = image_height if image_height is not None else (1 << 62)
    faces = []
    for i, raw in enumerate(body["faces"]):
        try:
            faces.append(_parse_face(raw, f"faces[{i}]", width, height,
                                     None, image_id))
        except (RecordSchemaError, RecordValidationError) as exc:
            raise invalid(str(exc)) from exc
    return faces
