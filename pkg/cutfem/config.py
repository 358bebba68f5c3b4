"""
Experiment configuration read from an INI file.

The [common] section applies to every subcommand; a section named after
the subcommand ([solve], [convergence], [tau-sweep], [condition] or
[verify]) overrides it. Every key has a default, so no file is needed.
"""
import configparser
import numpy as np
from cutfem.classification import TARGETS
from cutfem.errors import ConfigurationError, fail
from cutfem.levelset import LevelSet
from cutfem.problems import PROBLEMS, build_problem
from cutfem.stabilization import EXTENSION_DOMAINS, FAMILIES, StabilizationSpec
from cutfem.utils import print_info_msg

COMMANDS = ("solve", "convergence", "tau-sweep", "condition", "verify")

# Circle case u = cos(pi r) with the nodal stabilization.
DEFAULTS = {
    "geometry": "circle",
    "center": "0.0, 0.0",
    "radius": "0.5",
    "normal": "1.0, 0.0",
    "offset": "0.25",
    "bbox": "-1.0, -1.0, 1.0, 1.0",
    "levels": "8, 16, 32, 64, 128",
    "gamma": "0.5",
    "beta": "10.0",
    "tau": "0.1",
    "family": "nodal",
    "m": "1",
    "order": "4",
    "target": "large",
    "extension_domain": "small",
    "l_max": "6",
    "problem": "cosine",
    "solver_tol": "1e-10",
    "condition_tol": "1e-6",
    "samples": "200",
    "seed": "42",
}

COMMAND_DEFAULTS = {
    "solve": {"levels": "32"},
    "convergence": {},
    "tau-sweep": {"levels": "32", "tau": "1e3, 1e6, 1e9"},
    "condition": {"levels": "8, 16, 32, 64", "tau": "0.1, 10, 1000"},
    "verify": {"levels": "8, 16, 32"},
}

def _floats(key, text, count=None):
    try:
        values = [float(item) for item in text.replace(";", ",").split(",") if item.strip()]
    except ValueError:
        fail(ConfigurationError, "Key '%s' expects a comma separated list of numbers. Got: '%s'."%(key, text))
    if count is not None and len(values) != count:
        fail(ConfigurationError, "Key '%s' expects %d numbers. Got: '%s'."%(key, count, text))
    return values

def _int(key, text):
    try:
        return int(text)
    except ValueError:
        fail(ConfigurationError, "Key '%s' expects an integer. Got: '%s'."%(key, text))

def _float(key, text):
    return _floats(key, text, 1)[0]

class ExperimentConfig:
    """
    Validated parameters of one subcommand run.

    Parameters
    ----------
    * values                                : (dict) Key -> string value, as read from the INI file.
    * command                               : (str) Subcommand the values belong to.
    * out_dir                               : (str) Output directory.
    * dump_matrices                         : (bool) Write the assembled matrices as triplets.
    * verbose                               : (bool) Verbose console output.

    Raises
    ------
    * ConfigurationError
                                            * If a value is malformed or out of range.
    """

    def __init__(self, values, command="solve", out_dir=".", dump_matrices=False, verbose=False):
        if command not in COMMANDS:
            fail(ConfigurationError, "Unknown command '%s'. Expected one of %s."%(command, COMMANDS))
        unknown = sorted(set(values) - set(DEFAULTS))
        if unknown:
            fail(ConfigurationError, "Unknown configuration keys: %s."%(", ".join(unknown)))
        merged = dict(DEFAULTS)
        merged.update(COMMAND_DEFAULTS[command])
        merged.update(values)
        self.__values = merged
        self.command = command
        self.out_dir = out_dir
        self.dump_matrices = bool(dump_matrices)
        self.verbose = bool(verbose)

        self.geometry = merged["geometry"].strip()
        self.center = tuple(_floats("center", merged["center"], 2))
        self.radius = _float("radius", merged["radius"])
        self.normal = tuple(_floats("normal", merged["normal"], 2))
        self.offset = _float("offset", merged["offset"])
        self.bbox = tuple(_floats("bbox", merged["bbox"], 4))
        self.levels = [_int("levels", item.strip()) for item in merged["levels"].split(",") if item.strip()]
        self.gamma = _float("gamma", merged["gamma"])
        self.beta = _float("beta", merged["beta"])
        self.taus = _floats("tau", merged["tau"])
        self.family = merged["family"].strip()
        self.m = _int("m", merged["m"])
        self.order = _int("order", merged["order"])
        self.target = merged["target"].strip()
        self.extension_domain = merged["extension_domain"].strip()
        self.l_max = _int("l_max", merged["l_max"])
        self.problem = merged["problem"].strip()
        self.solver_tol = _float("solver_tol", merged["solver_tol"])
        self.condition_tol = _float("condition_tol", merged["condition_tol"])
        self.samples = _int("samples", merged["samples"])
        self.seed = _int("seed", merged["seed"])
        self.__validate()

    def __validate(self):
        if self.geometry not in LevelSet.KINDS:
            fail(ConfigurationError, "Unknown geometry '%s'. Expected one of %s."%(self.geometry, LevelSet.KINDS))
        if not self.levels:
            fail(ConfigurationError, "Expected at least one mesh level.")
        if any(n <= 0 for n in self.levels) or any(a >= b for a, b in zip(self.levels, self.levels[1:])):
            fail(ConfigurationError, "Mesh levels must be positive and strictly increasing. Got: %s."%(self.levels))
        if not self.taus:
            fail(ConfigurationError, "Expected a non-empty tau list.")
        if any(not tau > 0.0 for tau in self.taus):
            fail(ConfigurationError, "Expected positive tau values. Got: %s."%(self.taus))
        for key in ("radius", "beta", "solver_tol", "condition_tol"):
            if not getattr(self, key) > 0.0:
                fail(ConfigurationError, "Expected a positive value for '%s'. Got: %s."%(key, getattr(self, key)))
        if not (0.0 < self.gamma <= 1.0):
            fail(ConfigurationError, "Expected gamma in (0, 1]. Got: %s."%(self.gamma))
        if self.family not in FAMILIES:
            fail(ConfigurationError, "Unknown stabilization family '%s'. Expected one of %s."%(self.family, FAMILIES))
        if self.target not in TARGETS:
            fail(ConfigurationError, "Unknown agglomeration target '%s'. Expected one of %s."%(self.target, TARGETS))
        if self.extension_domain not in EXTENSION_DOMAINS:
            fail(ConfigurationError, "Unknown extension domain '%s'. Expected one of %s."%(self.extension_domain, EXTENSION_DOMAINS))
        if self.problem not in PROBLEMS:
            fail(ConfigurationError, "Unknown problem '%s'. Expected one of %s."%(self.problem, PROBLEMS))
        if not 0 <= self.order <= 4:
            fail(ConfigurationError, "Expected a quadrature order in [0, 4]. Got: %s."%(self.order))
        if self.l_max < 0:
            fail(ConfigurationError, "Expected a non-negative path bound l_max. Got: %s."%(self.l_max))
        if self.samples <= 0 or self.seed < 0:
            fail(ConfigurationError, "Expected positive samples and a non-negative seed.")
        if self.bbox[2] <= self.bbox[0] or self.bbox[3] <= self.bbox[1]:
            fail(ConfigurationError, "Degenerate bounding box %s."%(self.bbox,))
        if self.geometry == "halfplane" and not np.linalg.norm(self.normal) > 0.0:
            fail(ConfigurationError, "Expected a nonzero halfplane normal. Got: %s."%(self.normal,))
        # Checked here so that a bad m is a configuration error before any assembly.
        self.stabilization(self.taus[0])

    def level_set(self):
        if self.geometry == "circle":
            return LevelSet.circle(self.center, self.radius)
        return LevelSet.halfplane(self.normal, self.offset)

    def problem_data(self):
        return build_problem(self.problem, self.center)

    def stabilization(self, tau):
        return StabilizationSpec(self.family, self.m, tau)

    def with_values(self, **values):
        """Copy with some keys replaced (values given as Python objects)."""
        merged = {key: self.__values[key] for key in DEFAULTS}
        for key, value in values.items():
            if isinstance(value, (list, tuple)):
                value = ", ".join(repr(item) if isinstance(item, float) else str(item) for item in value)
            merged[key] = str(value)
        return ExperimentConfig(merged, self.command, self.out_dir, self.dump_matrices, self.verbose)

    def as_dict(self):
        return {key: self.__values[key] for key in DEFAULTS}

    def write(self, path):
        """
        Writes the effective configuration (all keys) to path.
        """
        parser = configparser.ConfigParser()
        parser[self.command] = self.as_dict()
        with open(path, "w", newline="\n") as f:
            parser.write(f)
        print_info_msg("Wrote %s."%(path))

    def __repr__(self):
        return "ExperimentConfig(%s, %s)"%(self.command, self.as_dict())

def load_config(path=None, command="solve", overrides=None, out_dir=".", dump_matrices=False, verbose=False):
    """
    Reads the configuration of one subcommand.

    Parameters
    ----------
    * path                          : (str) INI file, or None for the defaults.
    * command                       : (str) Subcommand name (section).
    * overrides                     : (dict) Values applied after the file (e.g. --seed).

    Returns
    -------
    * config                        : (ExperimentConfig) Validated configuration.

    Raises
    ------
    * ConfigurationError
                                    * If the file cannot be read or a value is invalid.
    """
    values = {}
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path) as f:
                parser.read_file(f)
        except (OSError, configparser.Error) as error:
            fail(ConfigurationError, "Cannot read configuration file %s: %s"%(path, error))
        for section in ("common", command):
            if parser.has_section(section):
                values.update(dict(parser.items(section)))
    if overrides:
        values.update({key: str(value) for key, value in overrides.items()})
    return ExperimentConfig(values, command, out_dir, dump_matrices, verbose)
