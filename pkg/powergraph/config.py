from pathlib import Path

import ruamel.yaml

from powergraph.errors import ConfigError
from powergraph.logger import get_logger

log = get_logger(__name__)

CONFIG_NAMES = ("powergraph.yaml", "cfg.yaml")
DEFAULTS = Path(__file__).parent / "cfg.yaml"


class RunConfig:
    """
    Meta-parameters of the powergraph solvers and the benchmark harness.

    Every section of the YAML file becomes an attribute holding a mapping,
    e.g. ``cfg.beam["k"]`` or ``cfg.optimal["time_limit"]``. Sections and
    keys missing from a user file fall back to the packaged defaults.
    """

    def __init__(self, folder: str | Path | None = None, file=None) -> None:
        """
        Parameters
        ----------
        folder : str or Path, optional
            Where to look for a configuration file first.
        file : str or Path, optional
            Configuration file to load; skips the search.
        """
        self.yaml = ruamel.yaml.YAML()
        if file is not None:
            self.file = Path(file)
        else:
            self.file = find_config(folder if folder is not None else ".")
        log.info(f"Config file from: {self.file.resolve()}")

        with DEFAULTS.open() as f:
            defaults = self.yaml.load(f)
        self.cfg = self._load_user_file()
        for section, values in defaults.items():
            if section not in self.cfg:
                self.cfg[section] = values
                continue
            for key, value in values.items():
                self.cfg[section].setdefault(key, value)
        self.sections = list(self.cfg.keys())
        for section in self.sections:
            setattr(self, section, self.cfg[section])

    def __repr__(self) -> str:
        lines = []
        for section in self.sections:
            lines.append(f"{section}:")
            lines.extend(
                f"  {k: <26}:  {v}" for k, v in getattr(self, section).items()
            )
        return "\n".join(lines)

    def _load_user_file(self) -> dict:
        """User settings, with empty sections read as empty mappings.

        Raises
        ------
        ConfigError
            If the file is not YAML or not a mapping of sections.
        """
        try:
            with self.file.open() as f:
                loaded = self.yaml.load(f)
        except ruamel.yaml.YAMLError as e:
            raise ConfigError(f"not valid YAML: {e}", self.file) from e
        if loaded is None:
            return {}
        if not isinstance(loaded, dict):
            msg = "expected a mapping of sections at the top level"
            raise ConfigError(msg, self.file)
        for section, values in list(loaded.items()):
            if values is None:
                loaded[section] = {}
            elif not isinstance(values, dict):
                msg = f"section {section!r} must map keys to values"
                raise ConfigError(msg, self.file)
        return loaded

    def save(self) -> None:
        """Write the current attribute values back to the loaded file."""
        for section in self.sections:
            self.cfg[section] = getattr(self, section)
        with self.file.open("w") as f:
            self.yaml.dump(self.cfg, f)


def find_config(folder: str | Path) -> Path:
    """
    Locate a configuration file.

    The folder itself is searched first, then its parent, then the package
    directory, which always holds the defaults.
    """
    folder = Path(folder).resolve()
    for search_folder in (folder, folder.parent, DEFAULTS.parent):
        for name in CONFIG_NAMES:
            candidate = search_folder / name
            if candidate.is_file():
                return candidate
    return create_standard_cfg_file(folder)


def create_standard_cfg_file(folder: str | Path = ".") -> Path:
    """Copy the packaged defaults to ``folder/powergraph.yaml``."""
    yaml = ruamel.yaml.YAML()
    with DEFAULTS.open() as f:
        code = yaml.load(f)
    file = Path(folder) / CONFIG_NAMES[0]
    with file.open("w") as f:
        yaml.dump(code, f)
    return file
