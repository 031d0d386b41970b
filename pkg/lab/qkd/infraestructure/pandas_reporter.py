import json
import logging
from pathlib import Path
from typing import Any, List, Mapping, Sequence

import pandas as pd

from lab.qkd.domain.ports.report_writer import ReportWriter
from lab.qkd.domain.utils.decorators import logged


FLOAT_FORMAT = "%.12g"
MANIFEST_NAME = "manifest.json"


def _metadata_line(metadata: Mapping[str, Any]) -> str:
    return "# " + " ".join(f"{key}={metadata[key]}" for key in sorted(metadata)) + "\n"


class PandasReportWriter(ReportWriter):
    """
    Writes UTF-8, comma-separated CSV files through pandas.

    Output is byte-stable: fixed column order, fixed float format,
    '\\n' line endings and no timestamps anywhere.
    """

    def __init__(self, out_dir: Path) -> None:
        self._out_dir = Path(out_dir)
        self._written: List[Path] = []

    @property
    def out_dir(self) -> Path:
        return self._out_dir

    @property
    def written(self) -> List[Path]:
        return list(self._written)

    @logged(logger_name="qkd.infrastructure.pandas_reporter", level=logging.INFO)
    def write_table(
        self,
        name: str,
        rows: Sequence[Mapping[str, Any]],
        columns: Sequence[str],
        metadata: Mapping[str, Any],
    ) -> Path:
        self._out_dir.mkdir(parents=True, exist_ok=True)
        path = self._out_dir / f"{name}.csv"
        df = pd.DataFrame(list(rows), columns=list(columns))
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(_metadata_line(metadata))
            df.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self._written.append(path)
        return path

    @logged(logger_name="qkd.infrastructure.pandas_reporter", level=logging.INFO)
    def write_manifest(self, manifest: Mapping[str, Any]) -> Path:
        self._out_dir.mkdir(parents=True, exist_ok=True)
        path = self._out_dir / MANIFEST_NAME
        body = dict(manifest)
        body["files"] = sorted(p.name for p in self._written)
        path.write_text(json.dumps(body, sort_keys=True, indent=2, default=str) + "\n", encoding="utf-8")
        return path

    def render_table(self, rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
        df = pd.DataFrame(list(rows), columns=list(columns))
        return df.to_string(index=False)


def read_table(path: Path) -> pd.DataFrame:
    """Load a CSV written by PandasReportWriter, skipping the metadata line."""
    return pd.read_csv(path, comment="#")
