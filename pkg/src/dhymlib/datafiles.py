""" Lookup of data files shipped with dhymlib or found locally
"""

import errno
from importlib import resources
import logging
import os

import yaml

from .errors import ParseError

logger = logging.getLogger(__name__)


def yml_name(filename):
    filename = str(filename)
    return filename if filename.endswith(".yml") else filename + ".yml"


def locate(directory, filename, kind):
    """Path of a data file, a local file shadows the packaged one

    Parameters
    ----------

    directory : str
        Directory of the package data, e.g. ``"data/rings"``.
    filename : str
        Name or path of the file, ``.yml`` is appended when missing.
    kind : str
        Kind of file used in log messages.

    Returns
    -------

    str or importlib.resources.abc.Traversable
        Local path or packaged resource.
    """
    fname = yml_name(filename)
    defaultpath = resources.files("dhymlib").joinpath(f"{directory}/{os.path.basename(fname)}")
    defaultexists = defaultpath.is_file()
    localexists = os.path.exists(fname)
    if defaultexists:
        if localexists:
            logger.info(f"dhymlib {kind} and local {kind} found with same name <{fname}>, local {kind} loaded")
            return fname
        logger.info(f"dhymlib {kind} <{fname}> loaded")
        return defaultpath
    if localexists:
        logger.info(f"local {kind} <{fname}> loaded")
        return fname
    logger.error(f"{kind} <{fname}> not found in dhymlib {directory} directory nor local directory")
    raise FileNotFoundError(errno.ENOENT, os.strerror(errno.ENOENT), fname)


def open_located(path):
    return open(path, "r") if isinstance(path, str) else path.open("r")


def packaged(directory):
    """Names of the packaged ``.yml`` files of a data directory"""
    return sorted(
        entry.name[:-4] for entry in resources.files("dhymlib").joinpath(directory).iterdir() if entry.name.endswith(".yml")
    )


class LineLoader(yaml.SafeLoader):
    """Safe loader recording the line of every mapping under ``__line__``"""

    def construct_mapping(self, node, deep=False):
        mapping = super().construct_mapping(node, deep=deep)
        mapping["__line__"] = node.start_mark.line + 1
        return mapping


def strip_lines(data):
    """Copy of loaded data without the ``__line__`` keys"""
    if isinstance(data, dict):
        return {k: strip_lines(v) for k, v in data.items() if k != "__line__"}
    if isinstance(data, list):
        return [strip_lines(v) for v in data]
    return data


def read_yaml(path):
    """Parse a located YAML file with line tracking

    Raises
    ------

    ParseError
        On invalid YAML, with the line of the problem when known.
    """
    with open_located(path) as ymlfile:
        try:
            return yaml.load(ymlfile, Loader=LineLoader)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise ParseError(f"invalid YAML ({e})", str(path), None if mark is None else mark.line + 1) from e
