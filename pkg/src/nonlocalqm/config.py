"""YAML experiment configs with line-anchored validation errors."""
from __future__ import annotations

import copy
import re
from pathlib import Path

import yaml

_REQUIRED = object()


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponent floats without a sign or dot (``1e-10``, ``6.0e24``)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                   |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                   |[-+]?\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                   |[-+]?\.(?:inf|Inf|INF)
                   |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


class ConfigError(Exception):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None, path: str = ""):
        self.message, self.source, self.line, self.path = message, source, line, path
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {path + ': ' if path else ''}{message}")


def _marks(node, path=(), out=None):
    """Map key paths to 1-based line numbers."""
    out = {} if out is None else out
    out.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            out[path + (k.value,)] = k.start_mark.line + 1
            _marks(v, path + (k.value,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _marks(v, path + (i,), out)
    return out


class Config:
    """Parsed config plus a record of where every key was written."""

    def __init__(self, data: dict, marks: dict, source: str = "<config>"):
        self.data, self.marks, self.source = data, marks, source

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "Config":
        try:
            node = yaml.compose(text, Loader=_Loader)
            data = yaml.load(text, Loader=_Loader)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError(f"not valid YAML ({getattr(exc, 'problem', exc)})", source,
                              mark.line + 1 if mark else None) from None
        if node is None or data is None:
            raise ConfigError("config is empty; missing block 'experiment'", source, 1)
        if not isinstance(data, dict):
            raise ConfigError("top level must be a mapping of blocks", source, 1)
        return cls(data, _marks(node), source)

    @classmethod
    def load(cls, path) -> "Config":
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config ({exc.strerror})", str(p)) from None
        return cls.from_text(text, str(p))

    def line(self, path: tuple) -> int | None:
        while path and path not in self.marks:
            path = path[:-1]
        return self.marks.get(path)

    def error(self, path: tuple, message: str) -> ConfigError:
        return ConfigError(message, self.source, self.line(path), ".".join(map(str, path)))

    def block(self, name: str, required: bool = True) -> "Block":
        val = self.data.get(name)
        if val is None:
            if required:
                raise ConfigError(f"missing block '{name}'", self.source, None, "")
            return Block(self, (name,), {})
        if not isinstance(val, dict):
            raise self.error((name,), "expected a mapping")
        return Block(self, (name,), val)

    def value(self, name: str, kind=str, default=_REQUIRED):
        return Block(self, (), self.data).get(name, kind, default)

    def with_value(self, dotted: str, value) -> "Config":
        """A copy with one dotted key replaced (line marks are kept)."""
        data = copy.deepcopy(self.data)
        keys = dotted.split(".")
        cur = data
        for k in keys[:-1]:
            nxt = cur.get(k)
            if not isinstance(nxt, dict):
                nxt = cur[k] = {}
            cur = nxt
        cur[keys[-1]] = value
        return Config(data, self.marks, self.source)


class Block:
    def __init__(self, cfg: Config, path: tuple, data: dict):
        self.cfg, self.path, self.data = cfg, path, data

    def __contains__(self, key):
        return key in self.data

    def sub(self, key: str, required: bool = False) -> "Block":
        val = self.data.get(key)
        if val is None:
            if required:
                raise self.cfg.error(self.path, f"missing block '{key}'")
            return Block(self.cfg, self.path + (key,), {})
        if not isinstance(val, dict):
            raise self.cfg.error(self.path + (key,), "expected a mapping")
        return Block(self.cfg, self.path + (key,), val)

    def get(self, key: str, kind=float, default=_REQUIRED, choices=None):
        path = self.path + (key,)
        if key not in self.data or self.data[key] is None:
            if default is _REQUIRED:
                raise self.cfg.error(self.path, f"missing key '{key}'")
            return default
        val = self.data[key]
        try:
            if kind is float:
                if isinstance(val, bool):
                    raise TypeError
                val = float(val)
            elif kind is int:
                if isinstance(val, bool) or float(val) != int(float(val)):
                    raise TypeError
                val = int(float(val))
            elif kind is bool:
                if not isinstance(val, bool):
                    raise TypeError
            elif kind is str:
                if not isinstance(val, str):
                    raise TypeError
            elif kind is list:
                if not isinstance(val, list):
                    raise TypeError
            elif kind == "floats":
                if not isinstance(val, list) or any(isinstance(v, bool) for v in val):
                    raise TypeError
                val = [float(v) for v in val]
        except (TypeError, ValueError):
            name = kind if isinstance(kind, str) else kind.__name__
            raise self.cfg.error(path, f"expected {name}, got {val!r}") from None
        if choices is not None and val not in choices:
            raise self.cfg.error(path, f"must be one of {list(choices)}, got {val!r}")
        return val

    def error(self, message: str, key: str | None = None) -> ConfigError:
        return self.cfg.error(self.path + ((key,) if key else ()), message)
