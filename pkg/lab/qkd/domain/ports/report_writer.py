"""
Port for persisting experiment artifacts.

Every tabular artifact is written with a header row and a leading
metadata comment line carrying the seed and the config hash.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Mapping, Sequence


class ReportWriter(ABC):

    @abstractmethod
    def write_table(
        self,
        name: str,
        rows: Sequence[Mapping[str, Any]],
        columns: Sequence[str],
        metadata: Mapping[str, Any],
    ) -> Path:
        """
        Write `rows` under `name` with the given column order.
        """
        pass

    @abstractmethod
    def write_manifest(self, manifest: Mapping[str, Any]) -> Path:
        """
        Write the run manifest for this invocation.
        """
        pass

    @abstractmethod
    def render_table(self, rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
        """
        Human-readable rendering of a comparison table.
        """
        pass
