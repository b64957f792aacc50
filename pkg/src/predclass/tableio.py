"""CSV ingestion and writing for categorical data tables.

Format: comma-separated, first row is a header, every feature cell a
positive integer code.  An optional final column named "label" carries
class assignments for labeled tables.
"""

from __future__ import annotations

from pathlib import Path

from .data import FeatureTable, Labeling

LABEL_COLUMN = "label"


class TableFormatError(ValueError):
    """Base for everything wrong with an input table."""


class TableParseError(TableFormatError):
    """A cell failed to parse; carries 1-based row/column coordinates."""

    def __init__(self, message: str, row: int, column: int):
        self.row = row
        self.column = column
        super().__init__(f"{message} (row {row}, column {column})")


class TableShapeError(TableFormatError):
    """Ragged rows or header/body width mismatch."""


class EmptyInputError(TableFormatError):
    """The file has no content at all, not even a header."""


def ingest_table(
    path, has_label_column: bool = False, class_count: int | None = None
) -> tuple[FeatureTable, Labeling | None]:
    """Read a CSV table; returns (features, labels-or-None), row order kept.

    With has_label_column the final column must be named "label" and the
    number of classes defaults to the largest label seen unless class_count
    overrides it.
    """
    text = Path(path).read_text()
    lines = [line for line in text.splitlines() if line.strip() != ""]
    if not lines:
        raise EmptyInputError(f"{path}: file is empty")
    header = [h.strip() for h in lines[0].split(",")]
    width = len(header)
    if has_label_column:
        if header[-1].lower() != LABEL_COLUMN:
            raise TableShapeError(
                f"{path}: expected final column named {LABEL_COLUMN!r}, got "
                f"{header[-1]!r}"
            )
        n_features = width - 1
    else:
        n_features = width
    if n_features < 1 and len(lines) > 1:
        raise TableShapeError(f"{path}: no feature columns")

    rows: list[tuple[int, ...]] = []
    labels: list[int] = []
    for rownum, line in enumerate(lines[1:], start=2):
        cells = [cell.strip() for cell in line.split(",")]
        if len(cells) != width:
            raise TableShapeError(
                f"{path}: row {rownum} has {len(cells)} cells, header has {width}"
            )
        parsed = []
        for colnum, cell in enumerate(cells, start=1):
            try:
                value = int(cell)
            except ValueError:
                raise TableParseError(
                    f"{path}: cell {cell!r} is not an integer", rownum, colnum
                ) from None
            if value < 1:
                raise TableParseError(
                    f"{path}: cell {cell!r} must be a positive integer", rownum, colnum
                )
            parsed.append(value)
        if has_label_column:
            rows.append(tuple(parsed[:-1]))
            labels.append(parsed[-1])
        else:
            rows.append(tuple(parsed))

    table = FeatureTable.from_rows(rows)
    if not has_label_column:
        return table, None
    k = class_count if class_count is not None else max(labels, default=1)
    return table, Labeling.from_sequence(labels, k)


def write_table(path, table: FeatureTable, labels: Labeling | None = None) -> None:
    """Write a table in the same CSV format ingest_table reads."""
    n_features = table.n_features
    header = [f"f{j}" for j in range(1, n_features + 1)]
    if labels is not None:
        if labels.n_items != table.n_items:
            raise ValueError(f"{table.n_items} rows but {labels.n_items} labels")
        header.append(LABEL_COLUMN)
    lines = [",".join(header)]
    for i, row in enumerate(table.rows):
        cells = [str(v) for v in row]
        if labels is not None:
            cells.append(str(labels.assignments[i]))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")
