"""Exception hierarchy shared by the crypto, provider, gateway and CLI layers."""


class TwinCloudError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(TwinCloudError):
    """Malformed or corrupted artifact bytes (bad padding, bad header, bad token)."""


class IntegrityError(TwinCloudError):
    """MAC verification failed; the content does not match its recorded tag."""


class AuthError(TwinCloudError):
    """Bad credentials, unknown/forged/expired auth code, or invalid token."""


class NotFoundError(TwinCloudError):
    """The addressed entry, account, or grant does not exist."""


class AccessDeniedError(TwinCloudError):
    """The caller holds no grant covering the requested path or operation."""


class ConflictError(TwinCloudError):
    """The target already exists (account, path, or logical name)."""


class PolicyError(TwinCloudError):
    """A provider account policy was violated (e.g. password too short)."""


class CapabilityError(TwinCloudError):
    """The provider does not support the requested operation (file sharing)."""


class ConfigError(TwinCloudError):
    """Missing, malformed, or internally inconsistent configuration."""
