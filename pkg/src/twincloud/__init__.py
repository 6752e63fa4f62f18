"""Split-trust encrypted storage: ciphertext on one cloud, keys on another.

Files are encrypted client-side and scattered so that no single provider
holds enough to read anything: the data cloud stores ciphertext blobs and
MAC keys, the key cloud(s) store key shares and MAC tags, and sharing is
done entirely through the providers' own ACLs.
"""

from .config import CliConfig, load_config, parse_config
from .crypto import (
    CipherBlob,
    KeyShare,
    NameKeyPair,
    combine_key,
    compute_mac,
    decrypt_blob,
    decrypt_name,
    derive_provider_password,
    encrypt_blob,
    encrypt_name,
    generate_key,
    generate_mac_key,
    generate_name_key_pair,
    split_key,
    verify_mac,
)
from .errors import (
    AccessDeniedError,
    AuthError,
    CapabilityError,
    ConfigError,
    ConflictError,
    FormatError,
    IntegrityError,
    NotFoundError,
    PolicyError,
    TwinCloudError,
)
from .gateway import (
    Gateway,
    KeyFileRecord,
    LogicalEntry,
    PlacementPolicy,
    Session,
)
from .provider import (
    AccessToken,
    Account,
    AuthCode,
    CloudProvider,
    DiskProvider,
    EntryMeta,
    MemoryProvider,
    Permission,
    ProviderConfig,
    ProviderStore,
    RemotePath,
    build_provider,
)

__version__ = "0.1.0"

__all__ = [
    "AccessDeniedError",
    "AccessToken",
    "Account",
    "AuthCode",
    "AuthError",
    "CapabilityError",
    "CipherBlob",
    "CliConfig",
    "CloudProvider",
    "ConfigError",
    "ConflictError",
    "DiskProvider",
    "EntryMeta",
    "FormatError",
    "Gateway",
    "IntegrityError",
    "KeyFileRecord",
    "KeyShare",
    "LogicalEntry",
    "MemoryProvider",
    "NameKeyPair",
    "NotFoundError",
    "Permission",
    "PlacementPolicy",
    "PolicyError",
    "ProviderConfig",
    "ProviderStore",
    "RemotePath",
    "Session",
    "TwinCloudError",
    "combine_key",
    "compute_mac",
    "decrypt_blob",
    "decrypt_name",
    "derive_provider_password",
    "encrypt_blob",
    "encrypt_name",
    "generate_key",
    "generate_mac_key",
    "generate_name_key_pair",
    "load_config",
    "parse_config",
    "split_key",
    "verify_mac",
]
