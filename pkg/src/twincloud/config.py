"""Configuration file loading for the command-line client.

The format is a flat key = value text file with one section per provider and
one [placement] section:

    staging_dir = /home/me/.cache/twincloud/stage
    token_cache = /home/me/.cache/twincloud/tokens.tsv
    default_dest = /home/me/Downloads

    [keycloud]
    url = https://keycloud.example
    file_sharing = false
    root = /var/lib/twincloud/keycloud

    [datacloud]
    url = https://datacloud.example
    root = /var/lib/twincloud/datacloud

    [placement]
    key_providers = keycloud
    data_provider = datacloud

A section header names the provider id; `root = memory` (the default) keeps
that provider's state in process memory, which only makes sense inside a
single test process.  `#` starts a comment.  The file is found via --config,
then $TWINCLOUD_CONFIG, then ~/.twincloud.ini.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .gateway import PlacementPolicy
from .provider import ProviderConfig

ENV_CONFIG = "TWINCLOUD_CONFIG"
DEFAULT_CONFIG_PATH = Path("~/.twincloud.ini")

_TOP_LEVEL_KEYS = {"staging_dir", "token_cache", "default_dest"}
_PROVIDER_KEYS = {"id", "url", "file_sharing", "root"}
_PLACEMENT_KEYS = {"key_providers", "data_provider"}


@dataclass(frozen=True)
class CliConfig:
    providers: tuple[ProviderConfig, ...]
    placement: PlacementPolicy
    staging_dir: Path
    token_cache: Path
    default_dest: Path


def _parse_sections(text: str) -> tuple[dict[str, str], dict[str, dict[str, str]]]:
    top: dict[str, str] = {}
    sections: dict[str, dict[str, str]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            if name in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{name}]")
            sections[name] = {}
            current = name
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key = key.strip()
        target = top if current is None else sections[current]
        if key in target:
            where = "top level" if current is None else f"[{current}]"
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in {where}")
        target[key] = value.strip()
    return top, sections


def _parse_bool(value: str, field: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    raise ConfigError(f"{field}: expected true or false, got {value!r}")


def _require(mapping: dict[str, str], key: str, where: str) -> str:
    if key not in mapping or not mapping[key]:
        raise ConfigError(f"missing required setting {key!r} in {where}")
    return mapping[key]


def parse_config(text: str) -> CliConfig:
    top, sections = _parse_sections(text)

    for key in top:
        if key not in _TOP_LEVEL_KEYS:
            raise ConfigError(f"unknown top-level setting {key!r}")
    staging_dir = Path(_require(top, "staging_dir", "the top level")).expanduser()
    token_cache = Path(_require(top, "token_cache", "the top level")).expanduser()
    default_dest = Path(top.get("default_dest", ".")).expanduser()
    if staging_dir.resolve() == default_dest.resolve():
        raise ConfigError("staging_dir and default_dest must name different directories")

    placement_fields = sections.pop("placement", None)
    if placement_fields is None:
        raise ConfigError("missing [placement] section")
    for key in placement_fields:
        if key not in _PLACEMENT_KEYS:
            raise ConfigError(f"unknown setting {key!r} in [placement]")
    key_providers = tuple(
        part.strip()
        for part in _require(placement_fields, "key_providers", "[placement]").split(",")
        if part.strip()
    )
    data_provider = _require(placement_fields, "data_provider", "[placement]")

    providers = []
    for name, fields in sections.items():
        for key in fields:
            if key not in _PROVIDER_KEYS:
                raise ConfigError(f"unknown setting {key!r} in provider [{name}]")
        if fields.get("id", name) != name:
            raise ConfigError(
                f"provider [{name}]: id field {fields['id']!r} contradicts the section name"
            )
        url = _require(fields, "url", f"provider [{name}]")
        file_sharing = _parse_bool(
            fields.get("file_sharing", "true"), f"provider [{name}] file_sharing"
        )
        root_value = fields.get("root", "memory")
        root = None if root_value == "memory" else Path(root_value).expanduser()
        providers.append(
            ProviderConfig(
                id=name,
                url=url,
                supports_file_sharing=file_sharing,
                persistence_root=root,
            )
        )
    if not providers:
        raise ConfigError("no provider sections configured")

    configured = {p.id for p in providers}
    for pid in (*key_providers, data_provider):
        if pid not in configured:
            raise ConfigError(f"placement references unknown provider id {pid!r}")
    try:
        placement = PlacementPolicy(
            key_providers=key_providers, data_provider=data_provider
        )
    except ValueError as exc:
        raise ConfigError(f"placement: {exc}") from exc

    return CliConfig(
        providers=tuple(providers),
        placement=placement,
        staging_dir=staging_dir,
        token_cache=token_cache,
        default_dest=default_dest,
    )


def load_config(explicit_path: Optional[Path] = None) -> CliConfig:
    """Locate and parse the config: --config, then $TWINCLOUD_CONFIG, then
    the default ~/.twincloud.ini."""
    if explicit_path is not None:
        path = Path(explicit_path)
    elif os.environ.get(ENV_CONFIG):
        path = Path(os.environ[ENV_CONFIG])
    else:
        path = DEFAULT_CONFIG_PATH.expanduser()
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)
