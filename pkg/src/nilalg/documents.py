"""JSON table documents and atomic file output."""
from __future__ import annotations

import json
import os
import tempfile

from .algebra import AlgebraTable
from .errors import MalformedDocument
from .field import FieldSpec

SCHEMA_VERSION = 1
_TOP_KEYS = {"schema_version", "field", "dim", "labels", "products"}
_PRODUCT_KEYS = {"i", "j", "out"}


def table_to_document(t: AlgebraTable) -> dict:
    F = t.field
    labels = list(t.labels) if t.labels else [f"e{i}" for i in range(1, t.n + 1)]
    products = []
    for (i, j), v in t.products.items():
        out = [[k + 1, F.format_scalar(c)] for k, c in enumerate(v) if c]
        products.append({"i": i, "j": j, "out": out})
    return {"schema_version": SCHEMA_VERSION, "field": F.name, "dim": t.n,
            "labels": labels, "products": products}


def _fail(msg):
    raise MalformedDocument(msg)


def document_to_table(doc) -> AlgebraTable:
    if not isinstance(doc, dict):
        _fail("document must be a JSON object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        _fail(f"unknown fields: {sorted(extra)}")
    missing = _TOP_KEYS - set(doc) - {"labels"}
    if missing:
        _fail(f"missing fields: {sorted(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        _fail(f"unsupported schema_version {doc['schema_version']!r}")
    try:
        F = FieldSpec.parse(doc["field"])
    except (ValueError, AttributeError) as exc:
        raise MalformedDocument(f"bad field: {exc}") from None
    n = doc["dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        _fail("dim must be a non-negative integer")
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n
                               or not all(isinstance(s, str) for s in labels)):
        _fail("labels must be a list of dim strings")
    prods = doc["products"]
    if not isinstance(prods, list):
        _fail("products must be a list")
    entries = []
    seen = set()
    for item in prods:
        if not isinstance(item, dict):
            _fail("each product must be an object")
        extra = set(item) - _PRODUCT_KEYS
        if extra or set(item) != _PRODUCT_KEYS:
            _fail(f"product entries need exactly i, j, out (got {sorted(item)})")
        i, j = item["i"], item["j"]
        for idx in (i, j):
            if not isinstance(idx, int) or isinstance(idx, bool) or not 1 <= idx <= n:
                _fail(f"product index {idx!r} outside 1..{n}")
        if (i, j) in seen:
            _fail(f"duplicate product e{i}e{j}")
        seen.add((i, j))
        if not isinstance(item["out"], list):
            _fail("out must be a list")
        for term in item["out"]:
            if not (isinstance(term, list) and len(term) == 2):
                _fail("each out term is [index, scalar-string]")
            k, s = term
            if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= n:
                _fail(f"output index {k!r} outside 1..{n}")
            if not isinstance(s, str):
                _fail("scalars must be strings")
            try:
                c = F.parse_scalar(s)
            except (ValueError, ZeroDivisionError):
                raise MalformedDocument(f"bad scalar {s!r}") from None
            entries.append((i, j, k, c))
    return AlgebraTable.from_sparse(n, F, entries, labels)


def load_table(path: str) -> AlgebraTable:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: invalid JSON ({exc.msg})") from None
    return document_to_table(doc)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_table(path: str, t: AlgebraTable) -> None:
    write_atomic(path, dumps(table_to_document(t)))
