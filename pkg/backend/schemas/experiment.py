import csv
import io
import re
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

Value = Union[int, float, str]

_INT = re.compile(r"^-?\d+$")


class ColumnSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    std: float


class ExperimentResult(BaseModel):
    """
    실험 결과 표. 모든 행은 자신을 만든 seed 를 가집니다.
    CSV 로 내보낼 때 이름과 메모는 `#` 주석 줄로 함께 기록됩니다.
    """
    name: str
    rows: List[Dict[str, Value]]
    seeds_used: List[int] = []
    summary: Dict[str, ColumnSummary] = {}
    notes: Dict[str, str] = {}

    @model_validator(mode="after")
    def check_provenance(self) -> "ExperimentResult":
        for i, row in enumerate(self.rows):
            if "seed" not in row:
                raise ValueError(f"row {i} of {self.name} has no seed")
        return self

    @classmethod
    def build(cls, name: str, rows: Iterable[Dict[str, Value]], notes: Dict[str, str] = None) -> "ExperimentResult":
        rows = [dict(row) for row in rows]
        seeds = sorted({int(row["seed"]) for row in rows if "seed" in row})
        return cls(name=name, rows=rows, seeds_used=seeds, summary=_summarize(rows), notes=notes or {})

    @property
    def columns(self) -> List[str]:
        ordered: Dict[str, None] = {}
        for row in self.rows:
            for key in row:
                ordered.setdefault(key, None)
        return list(ordered)

    def column(self, name: str) -> List[Value]:
        return [row[name] for row in self.rows]

    def mean_by(self, keys: Union[str, Sequence[str]], column: str) -> Dict[Union[Value, Tuple[Value, ...]], float]:
        """keys 값이 같은 행끼리 묶은 column 평균 (첫 등장 순서 유지)"""
        single = isinstance(keys, str)
        key_list = [keys] if single else list(keys)
        groups: Dict[tuple, List[float]] = defaultdict(list)
        for row in self.rows:
            groups[tuple(row[k] for k in key_list)].append(float(row[column]))
        return {
            (key[0] if single else key): float(np.mean(values))
            for key, values in groups.items()
        }

    def to_csv(self, target: Union[str, Path, io.TextIOBase, None] = None) -> str:
        buffer = io.StringIO()
        buffer.write(f"# experiment: {self.name}\n")
        for key, value in self.notes.items():
            buffer.write(f"# note {key}: {value}\n")
        if self.rows:
            writer = csv.DictWriter(buffer, fieldnames=self.columns, lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _format(v) for k, v in row.items()})
        text = buffer.getvalue()

        if isinstance(target, (str, Path)):
            path = Path(target)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        elif target is not None:
            target.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str, name: str = None) -> "ExperimentResult":
        notes: Dict[str, str] = {}
        body = []
        for line in text.splitlines():
            if line.startswith("# experiment: "):
                name = name or line[len("# experiment: "):]
            elif line.startswith("# note "):
                key, _, value = line[len("# note "):].partition(": ")
                notes[key] = value
            elif line.strip():
                body.append(line)

        rows = [
            {key: _parse(value) for key, value in record.items() if value != ""}
            for record in csv.DictReader(body)
        ]
        return cls.build(name or "experiment", rows, notes)


def _format(value: Value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(text: str) -> Value:
    if _INT.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def _summarize(rows: List[Dict[str, Value]]) -> Dict[str, ColumnSummary]:
    columns: Dict[str, List[float]] = {}
    for row in rows:
        for key, value in row.items():
            if key == "seed" or isinstance(value, str):
                continue
            columns.setdefault(key, []).append(float(value))
    summary = {}
    for key, values in columns.items():
        data = np.asarray(values, dtype=float)
        std = float(np.std(data, ddof=1)) if len(data) > 1 else 0.0
        summary[key] = ColumnSummary(mean=float(np.mean(data)), std=std)
    return summary
