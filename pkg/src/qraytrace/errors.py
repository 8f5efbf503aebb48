class ConfigError(ValueError):
    """Invalid configuration: size caps, inconsistent register sizes, bad parameters."""


class SceneError(ValueError):
    """Scene file could not be parsed or failed validation."""

    def __init__(self, message: str, source: str = "<string>", line: int | None = None):
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
