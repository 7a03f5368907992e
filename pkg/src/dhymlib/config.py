""" Experiment configuration shared by every command
"""

import copy
from dataclasses import dataclass, field
from importlib import resources
import logging
import os

import yaml

from .datafiles import read_yaml, strip_lines
from .errors import ConfigError

logger = logging.getLogger(__name__)

SECTIONS = ("output", "angles", "stability", "solve", "mollify", "kernel", "calibrate")
OUT_ENV = "DHYMLIB_OUT"
# keys checked as positive counts, every key ending with "tol" must be a positive float
COUNT_KEYS = ("samples", "frames", "max_iter", "max_halvings", "t_points", "levels", "splits", "eps_steps", "sigma_samples")


def deep_merge(base, update):
    """Copy of ``base`` updated recursively by ``update``"""
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def default_config_dict():
    source = resources.files("dhymlib").joinpath("data/default_config.yml")
    with source.open("r") as ymlfile:
        return yaml.safe_load(ymlfile)


def _validate_section(name, section):
    for key, value in section.items():
        where = f"{name}.{key}"
        if key.endswith("tol") or key.endswith("_rtol"):
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
                raise ConfigError(where, f"tolerance must be > 0, got {value!r}")
        elif key in COUNT_KEYS:
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(where, f"count must be an integer >= 1, got {value!r}")
    if name == "solve":
        if not 0.0 < section.get("damping", 0.5) < 1.0:
            raise ConfigError("solve.damping", "must lie in (0, 1)")
        if not isinstance(section.get("path_steps", 0), int) or section.get("path_steps", 0) < 0:
            raise ConfigError("solve.path_steps", "must be an integer >= 0")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated settings of one command run

    Parameters
    ----------

    command : str
    seed : int
    jobs : int
    sections : dict
        One mapping per section of the configuration file.
    sources : tuple
        Files merged over the packaged defaults.
    """

    command: str
    seed: int
    jobs: int
    sections: dict = field(repr=False)
    sources: tuple = ()

    def __post_init__(self):
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("seed", f"must be an integer >= 0, got {self.seed!r}")
        if not isinstance(self.jobs, int) or isinstance(self.jobs, bool) or self.jobs < 1:
            raise ConfigError("jobs", f"must be an integer >= 1, got {self.jobs!r}")
        for name in SECTIONS:
            if not isinstance(self.sections.get(name), dict):
                raise ConfigError(name, "section missing or not a mapping")
            _validate_section(name, self.sections[name])

    def section(self, name):
        return self.sections[name]

    @property
    def out_dir(self):
        return self.sections["output"]["directory"]

    def echo(self):
        """Plain dict echoed in reports"""
        return {"command": self.command, "seed": self.seed, "jobs": self.jobs, **copy.deepcopy(self.sections)}


def load_config(command, path=None, seed=None, out=None, jobs=None, overrides=None):
    """Merge defaults, environment, user file and command line flags

    Parameters
    ----------

    command : str
        Name of the command run with this configuration.
    path : str, optional
        YAML file merged over the packaged defaults.
    seed, out, jobs : optional
        Command line values, applied last.
    overrides : dict, optional
        Section updates applied after the user file.

    Raises
    ------

    ConfigError
        Unknown section or invalid value, naming the field.
    ParseError
        Invalid YAML in the user file.
    """
    data = default_config_dict()
    sources = []
    if os.environ.get(OUT_ENV):
        data["output"]["directory"] = os.environ[OUT_ENV]
    if path is not None:
        user = strip_lines(read_yaml(str(path))) or {}
        if not isinstance(user, dict):
            raise ConfigError("<root>", f"{path} must contain a mapping")
        unknown = sorted(set(user) - set(SECTIONS) - {"seed", "jobs"})
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration entry")
        data = deep_merge(data, user)
        sources.append(str(path))
        logger.info(f"configuration <{path}> merged over defaults")
    if overrides:
        data = deep_merge(data, overrides)
    if seed is not None:
        data["seed"] = seed
    if jobs is not None:
        data["jobs"] = jobs
    if out is not None:
        data["output"]["directory"] = str(out)
    sections = {name: data[name] for name in SECTIONS}
    return ExperimentConfig(command, data["seed"], data["jobs"], sections, tuple(sources))
