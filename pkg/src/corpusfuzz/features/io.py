"""CSV import/export of feature vectors.

Layout: a header ``program_id,<feature>,<feature>,...`` followed by one
row of integer counts per program.  Feature columns follow catalog order.
"""

from __future__ import annotations

import csv
import io
import os

from ..exceptions import ValidationError
from .catalog import FeatureCatalog
from .extract import FeatureVector
from .normalize import FeatureMatrix

ID_COLUMN = "program_id"


def write_vectors_csv(matrix: FeatureMatrix, catalog: FeatureCatalog, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(dumps_vectors_csv(matrix, catalog))


def dumps_vectors_csv(matrix: FeatureMatrix, catalog: FeatureCatalog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([ID_COLUMN, *catalog.names])
    for row in matrix.rows:
        if len(row) != len(catalog):
            raise ValidationError(f"{row.program_id}: {len(row)} counts for {len(catalog)} features")
        w.writerow([row.program_id, *row.counts])
    return buf.getvalue()


def read_vectors_csv(path, catalog: FeatureCatalog) -> FeatureMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        return loads_vectors_csv(fh.read(), catalog, os.fspath(path))


def loads_vectors_csv(text: str, catalog: FeatureCatalog, source="<csv>") -> FeatureMatrix:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError(f"{source}: empty file, expected a header row") from None
    if not header or header[0] != ID_COLUMN:
        raise ValidationError(f"{source}: first column must be {ID_COLUMN!r}")
    names = header[1:]
    if names != catalog.names:
        for i, (got, want) in enumerate(zip(names, catalog.names)):
            if got != want:
                raise ValidationError(
                    f"{source}: column {i + 2} header {got!r} does not match catalog feature {want!r}"
                )
        if len(names) > len(catalog):
            raise ValidationError(f"{source}: unexpected extra column {names[len(catalog)]!r}")
        raise ValidationError(
            f"{source}: {len(names)} feature columns, catalog has {len(catalog)} "
            f"(missing {catalog.names[len(names)]!r})"
        )
    rows = []
    seen = set()
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(header):
            raise ValidationError(f"{source}:{lineno}: expected {len(header)} fields, got {len(rec)}")
        pid = rec[0]
        if pid in seen:
            raise ValidationError(f"{source}:{lineno}: duplicate program_id {pid!r}")
        seen.add(pid)
        counts = []
        for name, cell in zip(names, rec[1:]):
            try:
                value = int(cell)
            except ValueError:
                raise ValidationError(f"{source}:{lineno}: {name}={cell!r} is not an integer") from None
            if value < 0:
                raise ValidationError(f"{source}:{lineno}: {name}={value} is negative; counts must be >= 0")
            counts.append(value)
        rows.append(FeatureVector(pid, tuple(counts)))
    return FeatureMatrix(catalog.version, rows)
