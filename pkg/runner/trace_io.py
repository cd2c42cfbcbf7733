"""
轨迹文件读写 - 固定列顺序的 CSV
"""

import csv
import os
from pathlib import Path
from typing import Union

from metrics.trace import TRACE_COLUMNS, TraceRecord


class TraceWriter:
    """逐行写入 TraceRecord，表头固定为 TRACE_COLUMNS"""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._file = None
        self._writer = None
        self.rows = 0

    def __enter__(self) -> "TraceWriter":
        self.open()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()

    def open(self):
        if os.path.dirname(self.path):
            os.makedirs(os.path.dirname(self.path), exist_ok=True)
        self._file = open(self.path, "w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(TRACE_COLUMNS)

    def write(self, record: TraceRecord):
        if self._writer is None:
            raise RuntimeError("TraceWriter is not open")
        self._writer.writerow(record.to_row())
        self.rows += 1

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None
            self._writer = None


def read_trace(path: Union[str, Path]) -> list[TraceRecord]:
    """
    读取轨迹 CSV
    Args:
        path: 文件路径
    Returns:
        TraceRecord 列表；表头与 TRACE_COLUMNS 不一致时抛 ValueError
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
            raise ValueError(f"{path}: unexpected trace header {reader.fieldnames}")
        return [TraceRecord.from_row(row) for row in reader]
