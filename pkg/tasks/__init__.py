import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime

import pandas as pd
from dotenv import load_dotenv

from triangles.errors import DomainError
from triangles.montecarlo import DEFAULT_CHUNK_SIZE

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
REPORT_DIR = "reports"
REPORT_SCHEMA = 1

SUBCOMMANDS = ("sample", "density", "moments", "verify")
OUTPUT_FORMATS = ("csv", "json")


def load_settings():
    load_dotenv()
    settings = {
        "threads": os.getenv("TRI_THREADS"),
        "chunk_size": os.getenv("TRI_CHUNK_SIZE"),
        "log_level": os.getenv("TRI_LOG_LEVEL", "INFO"),
    }
    for name in ("threads", "chunk_size"):
        if settings[name] is not None:
            try:
                settings[name] = int(settings[name])
            except ValueError:
                raise DomainError(f"TRI_{name.upper()} must be an integer, got {settings[name]!r}") from None
    return settings


def setup_logging(level="INFO"):
    # stdout carries data only
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO),
                        format=LOG_FORMAT, stream=sys.stderr, force=True)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model: object = None
    n: int = 10_000
    seed: int = 0
    grid_points: int = 128
    tolerance: float = 1e-10
    output_format: str = "csv"
    threads: int = None
    chunk_size: int = DEFAULT_CHUNK_SIZE
    out: str = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise DomainError(f"unknown subcommand {self.subcommand!r}")
        if self.n < 1 or self.grid_points < 1:
            raise DomainError("--n and --grid must be at least 1")
        if not self.tolerance > 0:
            raise DomainError(f"--tol must be positive, got {self.tolerance}")
        if self.threads is not None and self.threads < 1:
            raise DomainError(f"--threads must be at least 1, got {self.threads}")
        if self.chunk_size < 1:
            raise DomainError(f"--chunk-size must be at least 1, got {self.chunk_size}")
        if self.output_format not in OUTPUT_FORMATS:
            raise DomainError(f"--format must be one of {OUTPUT_FORMATS}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"--seed must be a 64-bit unsigned integer, got {self.seed}")


def json_default(value):
    if hasattr(value, "item"):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def render_table(frame, output_format):
    """CSV with 17 significant digits and LF endings, or a JSON list of records."""
    if output_format == "csv":
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
        return buffer.getvalue()
    records = frame.to_dict(orient="records")
    return json.dumps(records, indent=2, default=json_default) + "\n"


def emit(text, out=None):
    if out:
        with open(out, "w", newline="") as f:
            f.write(text)
        logging.info(f"Output written to {out}")
    else:
        sys.stdout.write(text)


def write_table(frame, config):
    emit(render_table(frame, config.output_format), config.out)


def generate_report(report, output_dir=REPORT_DIR, suite="all"):
    """Save a verification report as timestamped JSON and CSV files; returns both paths."""
    logging.info(f"Saving {suite} verification report to {output_dir}")
    try:
        os.makedirs(output_dir, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        stem = os.path.join(output_dir, f"verification_{suite}_{timestamp}")

        json_file = f"{stem}.json"
        with open(json_file, 'w') as f:
            json.dump(report, f, indent=2, default=json_default)
        logging.info(f"JSON report saved successfully to {json_file}")

        csv_file = f"{stem}.csv"
        pd.DataFrame(report["checks"], columns=["key", "expected", "computed", "tolerance", "pass"]).to_csv(
            csv_file, index=False, float_format="%.17g", lineterminator="\n")
        logging.info(f"CSV report saved successfully to {csv_file}")
        return json_file, csv_file
    except Exception as e:
        logging.error(f"Error generating report: {str(e)}")
        raise
