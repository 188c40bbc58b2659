"""
Output Service - Deterministic CSV and JSON emission for figure datasets and reports
"""
import csv
import json
import math
from io import StringIO
from pathlib import Path
from typing import Iterable, Sequence

from config import settings
from logging_config import get_logger, log_output_file

logger = get_logger(__name__)


class OutputService:
    """Writes data files byte-identically for identical inputs"""

    @staticmethod
    def format_value(value) -> str:
        """Fixed scientific notation for floats, plain text for everything else."""
        if isinstance(value, bool):
            return "true" if value else "false"
        if value is None:
            return ""
        if isinstance(value, int):
            return str(value)
        if isinstance(value, str):
            return value
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        digits = settings.csv_significant_digits - 1
        text = f"{value:.{digits}e}"
        # no negative zero in outputs
        return text[1:] if text.startswith("-") and float(text) == 0.0 else text

    @staticmethod
    def round_significant(value):
        """Float rounded to the CSV precision so JSON and CSV agree."""
        if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
            return value
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(OutputService.format_value(value))

    @staticmethod
    def _clean(obj):
        if isinstance(obj, dict):
            return {str(k): OutputService._clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [OutputService._clean(v) for v in obj]
        return OutputService.round_significant(obj)

    @staticmethod
    def ensure_dir(path) -> Path:
        path = Path(path)
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            logger.error(f"Cannot create output directory {path}: {e}", exc_info=True)
            raise
        return path

    @staticmethod
    def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        """
        Write a CSV with '\\n' line endings and fixed float formatting.

        Args:
            path: Target file
            header: Column names
            rows: Iterable of row sequences, same length as header

        Returns:
            The written path
        """
        path = Path(path)
        output = StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"Row {count} of {path.name} has {len(row)} columns, expected {len(header)}")
            writer.writerow([OutputService.format_value(v) for v in row])
            count += 1
        try:
            path.write_text(output.getvalue(), encoding="utf-8", newline="")
        except OSError as e:
            log_output_file(logger, path, count, success=False, error=e)
            raise
        log_output_file(logger, path, count)
        return path

    @staticmethod
    def write_json(path, data) -> Path:
        """Write JSON with sorted keys, 2-space indent and rounded floats."""
        path = Path(path)
        text = json.dumps(OutputService._clean(data), indent=2, sort_keys=True, allow_nan=False) + "\n"
        try:
            path.write_text(text, encoding="utf-8", newline="")
        except OSError as e:
            log_output_file(logger, path, success=False, error=e)
            raise
        log_output_file(logger, path)
        return path
