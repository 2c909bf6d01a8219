"""
Copyright © 2024 trajforge developers.
"""
import json
import os
from typing import BinaryIO, Iterable, List, Type, TypeVar

from ..exceptions import RecordError

T = TypeVar("T")


def _dumps(d) -> str:
    return json.dumps(d, ensure_ascii=False)


def write_jsonl(records: Iterable, destination: BinaryIO) -> int:
    """
    Writes records as one JSON object per line (UTF-8).

    Parameters
    ----------
    records : iterable of core types (anything with ``to_dict``)
    destination : binary file-like object

    Returns
    -------
    n : int
        number of lines written
    """
    n = 0
    for index, record in enumerate(records):
        if not hasattr(record, "to_dict") or not hasattr(type(record), "from_dict"):
            raise RecordError(f"cannot serialize {type(record).__name__}", index=index)
        try:
            # frozen types validate on construction; rebuild to catch bypassed invariants
            d = record.to_dict()
            type(record).from_dict(d)
            line = _dumps(d)
        except RecordError as e:
            raise RecordError(str(e), field=e.field, index=index) from e
        except (TypeError, ValueError) as e:
            raise RecordError(str(e), index=index) from e
        destination.write(line.encode("utf-8") + b"\n")
        n += 1
    return n


def read_jsonl(source: BinaryIO, record_type: Type[T]) -> List[T]:
    """
    Reads and validates records written by ``write_jsonl``.

    Blank lines are skipped; line numbers (1-based) are kept in error messages.
    """
    records = []
    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise RecordError(f"invalid UTF-8: {e}", line=line_no) from e
        if not raw.strip():
            continue
        try:
            d = json.loads(raw)
        except json.JSONDecodeError as e:
            raise RecordError(f"parse error: {e.msg}", line=line_no) from e
        try:
            records.append(record_type.from_dict(d))
        except RecordError as e:
            raise RecordError(str(e), field=e.field, line=line_no) from e
        except TypeError as e:
            raise RecordError(str(e), line=line_no) from e
    return records


def save_jsonl(filename, records: Iterable) -> int:
    """Writes records to ``filename``, creating parent folders."""
    dirname = os.path.dirname(os.fspath(filename))
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(filename, "wb") as f:
        return write_jsonl(records, f)


def load_jsonl(filename, record_type: Type[T]) -> List[T]:
    with open(filename, "rb") as f:
        return read_jsonl(f, record_type)
