""" JSON reports, CSV tables and seeded shards
"""

from concurrent.futures import ProcessPoolExecutor
import csv
import hashlib
import json
import logging
import os
import time

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"{type(value).__name__} is not serializable")


def make_report(config, results, timing=None):
    """Report dictionary with a schema version, the config echo and the results"""
    return {
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "seed": config.seed,
        "config": config.echo(),
        "results": results,
        "timing": dict(timing or {}),
    }


def to_json(report):
    return json.dumps(report, sort_keys=True, indent=2, default=_plain)


def report_digest(report):
    """sha256 of the canonical JSON of the report without its timing"""
    stripped = {k: v for k, v in report.items() if k != "timing"}
    canonical = json.dumps(stripped, sort_keys=True, separators=(",", ":"), default=_plain)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_report(report, directory, stem):
    """Write ``<stem>.json`` in ``directory`` and return its path"""
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{stem}.json")
    with open(path, "w") as jsonfile:
        jsonfile.write(to_json(report) + "\n")
    logger.info(f"report written to <{path}>")
    return path


def write_csv(header, rows, path):
    """Write a table with the stdlib csv writer"""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as csvfile:
        writer = csv.writer(csvfile)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_plain(v) if isinstance(v, (np.generic, np.ndarray)) else v for v in row])
    logger.info(f"table written to <{path}>")
    return path


class Timer:
    """Wall clock of a block, kept out of the reproducible part of reports"""

    def __enter__(self):
        self.start = time.perf_counter()
        self.seconds = None
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start
        return False


def shard_sizes(total, jobs):
    return [total // jobs + (1 if i < total % jobs else 0) for i in range(jobs)]


def shard_seeds(seed, jobs):
    """Independent seed sequences, one per shard"""
    return np.random.SeedSequence(seed).spawn(jobs)


def run_shards(function, arguments, jobs):
    """Apply ``function`` to every argument tuple, results in shard order

    With more than one job the shards run in a process pool; ``function`` must be
    importable at module level.
    """
    if jobs <= 1 or len(arguments) <= 1:
        return [function(*args) for args in arguments]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(function, *zip(*arguments)))
