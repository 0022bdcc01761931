"""Writing reports, evaluation results, PR tables and drawings to disk."""

import csv
import io
import logging
from pathlib import Path

from pydantic import BaseModel

from .models.annotations import EvalResult
from .storage import dump_document


class ReportPublisher:
    """Writes every output document of the engine."""

    def __init__(self):
        """Initialize the publisher."""
        self.logger = logging.getLogger(__name__)

    def _write(self, text: str, path: str) -> Path:
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps the bytes identical across platforms
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        return output_path

    def save_document(self, document: BaseModel, path: str) -> Path:
        """Save a versioned JSON document (report, evaluation, scene).

        Args:
            document: Model to serialize
            path: Output file path

        Returns:
            Path written
        """
        output_path = self._write(dump_document(document), path)
        self.logger.info(f"{type(document).__name__} saved to: {output_path}")
        return output_path

    def pr_table(self, result: EvalResult) -> str:
        """Render the precision-recall trace as CSV text."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["threshold", "precision", "recall", "f1", "accuracy"])
        for point in result.pr_trace:
            writer.writerow(
                [
                    repr(point.threshold),
                    repr(point.precision),
                    repr(point.recall),
                    repr(point.f1),
                    repr(point.accuracy),
                ]
            )
        return buffer.getvalue()

    def save_pr_table(self, result: EvalResult, path: str) -> Path:
        """Save the precision-recall trace as a CSV table for plotting."""
        output_path = self._write(self.pr_table(result), path)
        self.logger.info(f"PR table saved to: {output_path}")
        return output_path

    def save_svg(self, svg: str, path: str) -> Path:
        """Save a rendered drawing."""
        output_path = self._write(svg, path)
        self.logger.info(f"Drawing saved to: {output_path}")
        return output_path
