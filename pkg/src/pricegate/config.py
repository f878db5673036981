"""Service configuration: YAML file plus environment overrides.

The signing key is never written into the config file; the file (or an
environment variable) names where to find it, and the key material is
resolved once at startup so a missing or weak key fails fast instead of
surfacing on the first token issue.

Config file keys (all optional except pricingFile):

    listen: "127.0.0.1:8080"
    pricingFile: ./petclinic.yaml
    store:
      kind: memory | file
      path: ./state          # required for kind: file
      fsync: always | never
    tokenKey:
      env: PRICEGATE_TOKEN_KEY   # variable holding the key text
      # or: file: ./token.key    # file holding the key bytes
    tokenTtlSeconds: 300
    adminToken:
      env: PRICEGATE_ADMIN_TOKEN
      # or a literal string (fine for demos, not for production)
    demoMode: false
    uiDist: ./frontend/dist      # optional static UI mount

Environment overrides (take precedence over the file): PRICEGATE_LISTEN,
PRICEGATE_PRICING_FILE, PRICEGATE_STORE_KIND, PRICEGATE_STORE_PATH,
PRICEGATE_FSYNC, PRICEGATE_TOKEN_KEY_ENV, PRICEGATE_TOKEN_KEY_FILE,
PRICEGATE_TOKEN_TTL, PRICEGATE_ADMIN_TOKEN, PRICEGATE_DEMO_MODE,
PRICEGATE_UI_DIST.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import yaml

from pricegate.errors import PricegateError, WeakKey
from pricegate.token import MIN_KEY_BYTES


class ConfigError(PricegateError):
    pass


DEFAULT_TOKEN_KEY_ENV = "PRICEGATE_TOKEN_KEY"

_KNOWN_KEYS = {
    "listen",
    "pricingFile",
    "store",
    "tokenKey",
    "tokenTtlSeconds",
    "adminToken",
    "demoMode",
    "uiDist",
}


@dataclass
class ServiceConfig:
    pricing_file: str
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    store_kind: str = "memory"
    store_path: str | None = None
    fsync: str = "always"
    token_key_env: str | None = None
    token_key_file: str | None = None
    token_ttl_seconds: int = 300
    admin_token: str | None = None
    demo_mode: bool = False
    ui_dist: str | None = None

    @classmethod
    def load(cls, path: str | None = None, env: dict | None = None) -> "ServiceConfig":
        env = dict(os.environ if env is None else env)
        data: dict = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    loaded = yaml.safe_load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from exc
            except yaml.YAMLError as exc:
                raise ConfigError(f"config file is not valid YAML: {exc}") from exc
            if loaded is None:
                loaded = {}
            if not isinstance(loaded, dict):
                raise ConfigError("config file must hold a mapping")
            unknown = set(loaded) - _KNOWN_KEYS
            if unknown:
                raise ConfigError(
                    f"unknown config keys: {', '.join(sorted(unknown))}"
                )
            data = loaded

        store = data.get("store") or {}
        if not isinstance(store, dict):
            raise ConfigError("store must be a mapping")
        token_key = data.get("tokenKey") or {}
        if not isinstance(token_key, dict):
            raise ConfigError("tokenKey must be a mapping with 'env' or 'file'")
        admin = data.get("adminToken")
        admin_token: str | None
        if isinstance(admin, dict):
            admin_var = admin.get("env")
            admin_token = env.get(admin_var) if admin_var else None
        else:
            admin_token = admin
        if "PRICEGATE_ADMIN_TOKEN" in env:
            admin_token = env["PRICEGATE_ADMIN_TOKEN"]

        listen = env.get("PRICEGATE_LISTEN", data.get("listen", "127.0.0.1:8080"))
        host, _, port_text = str(listen).rpartition(":")
        if not host or not port_text.isdigit():
            raise ConfigError(f"listen must look like host:port, got {listen!r}")

        pricing_file = env.get("PRICEGATE_PRICING_FILE", data.get("pricingFile"))
        if not pricing_file:
            raise ConfigError("pricingFile is required")

        ttl = env.get("PRICEGATE_TOKEN_TTL", data.get("tokenTtlSeconds", 300))
        try:
            ttl = int(ttl)
        except (TypeError, ValueError):
            raise ConfigError(f"tokenTtlSeconds must be an integer, got {ttl!r}") from None
        if ttl <= 0:
            raise ConfigError("tokenTtlSeconds must be positive")

        demo = env.get("PRICEGATE_DEMO_MODE", data.get("demoMode", False))
        if isinstance(demo, str):
            demo = demo.strip().lower() in ("1", "true", "yes", "on")

        config = cls(
            pricing_file=str(pricing_file),
            listen_host=host,
            listen_port=int(port_text),
            store_kind=str(env.get("PRICEGATE_STORE_KIND", store.get("kind", "memory"))),
            store_path=env.get("PRICEGATE_STORE_PATH", store.get("path")),
            fsync=str(env.get("PRICEGATE_FSYNC", store.get("fsync", "always"))),
            token_key_env=env.get("PRICEGATE_TOKEN_KEY_ENV", token_key.get("env")),
            token_key_file=env.get("PRICEGATE_TOKEN_KEY_FILE", token_key.get("file")),
            token_ttl_seconds=ttl,
            admin_token=admin_token,
            demo_mode=bool(demo),
            ui_dist=env.get("PRICEGATE_UI_DIST", data.get("uiDist")),
        )
        if config.store_kind not in ("memory", "file"):
            raise ConfigError(f"store.kind must be memory or file, got {config.store_kind!r}")
        if config.store_kind == "file" and not config.store_path:
            raise ConfigError("store.path is required when store.kind is file")
        if config.fsync not in ("always", "never"):
            raise ConfigError(f"store.fsync must be always or never, got {config.fsync!r}")
        return config

    def resolve_token_key(self, env: dict | None = None) -> bytes:
        """Load and vet the signing key; at least 32 bytes or startup fails."""
        env = dict(os.environ if env is None else env)
        if self.token_key_file:
            try:
                with open(self.token_key_file, "rb") as fh:
                    key = fh.read().strip()
            except OSError as exc:
                raise ConfigError(f"cannot read token key file: {exc}") from exc
        else:
            var = self.token_key_env or DEFAULT_TOKEN_KEY_ENV
            text = env.get(var)
            if text is None:
                raise ConfigError(
                    f"token key environment variable {var} is not set"
                )
            key = text.encode("utf-8")
        if len(key) < MIN_KEY_BYTES:
            raise WeakKey(len(key))
        return key
