"""Cryptographic core: content envelopes, integrity tags, deterministic
filename encryption, provider-password derivation, and XOR key splitting.

Content is sealed with AES-256 in CBC mode with PKCS7 padding under a fresh
random IV.  The logical filename travels inside the envelope so that a share
recipient, who holds the file key but not the owner's name keys, can still
recover the original name.

Bit-exact formats (all multi-byte integers big-endian):
  * serialized envelope:  IV (16) || ciphertext
  * envelope plaintext:   name length (2) || name (UTF-8) || content, PKCS7
  * name token:           base64url without padding of IV (16) || ciphertext,
                          where IV = first 16 bytes of HMAC-SHA-256(mac part, name)
  * name key pair file:   enc part (32) || MAC part (32)
  * MAC tag / MAC key:    32 raw bytes each

Scalar key material (file keys, MAC keys, tags) is passed around as plain
``bytes``; functions validate lengths at the boundary.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import secrets
from dataclasses import dataclass

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import FormatError

KEY_BYTES = 32
MAC_KEY_BYTES = 32
MAC_TAG_BYTES = 32
BLOCK_BYTES = 16
NAME_MAX_BYTES = 255
DERIVED_PASSWORD_CHARS = 24

# Shortest well-formed name token: 16-byte IV plus one cipher block.
NAME_TOKEN_MIN_CHARS = 43

_HEADER_MAX_NAME = 0xFFFF


def _require_key(key: bytes, size: int, what: str) -> None:
    if not isinstance(key, (bytes, bytearray)) or len(key) != size:
        raise ValueError(f"{what} must be exactly {size} bytes")


# ---------------------------------------------------------------------------
# Raw CBC block cipher, no padding: the testable cipher core.
# ---------------------------------------------------------------------------

def cbc_encrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    """AES-256-CBC over already block-aligned data. No padding is applied."""
    _require_key(key, KEY_BYTES, "key")
    _require_key(iv, BLOCK_BYTES, "iv")
    if len(data) % BLOCK_BYTES:
        raise ValueError("data length must be a multiple of the block size")
    enc = Cipher(algorithms.AES(key), modes.CBC(iv)).encryptor()
    return enc.update(data) + enc.finalize()


def cbc_decrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    """Inverse of :func:`cbc_encrypt`; input must be block aligned."""
    _require_key(key, KEY_BYTES, "key")
    _require_key(iv, BLOCK_BYTES, "iv")
    if len(data) % BLOCK_BYTES:
        raise ValueError("data length must be a multiple of the block size")
    dec = Cipher(algorithms.AES(key), modes.CBC(iv)).decryptor()
    return dec.update(data) + dec.finalize()


def _pkcs7_pad(data: bytes) -> bytes:
    # Always pads: aligned input gains a full extra block.
    n = BLOCK_BYTES - (len(data) % BLOCK_BYTES)
    return data + bytes([n]) * n


def _pkcs7_unpad(data: bytes) -> bytes:
    if not data or len(data) % BLOCK_BYTES:
        raise FormatError("ciphertext is not block aligned")
    n = data[-1]
    if not 1 <= n <= BLOCK_BYTES or data[-n:] != bytes([n]) * n:
        raise FormatError("invalid padding")
    return data[:-n]


# ---------------------------------------------------------------------------
# Content envelopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CipherBlob:
    """IV-prefixed CBC ciphertext carrying an embedded logical-name header."""

    iv: bytes
    ciphertext: bytes

    def __post_init__(self) -> None:
        if len(self.iv) != BLOCK_BYTES:
            raise FormatError("IV must be 16 bytes")
        if not self.ciphertext or len(self.ciphertext) % BLOCK_BYTES:
            raise FormatError("ciphertext length must be a positive multiple of 16")

    def to_bytes(self) -> bytes:
        return self.iv + self.ciphertext

    @classmethod
    def from_bytes(cls, raw: bytes) -> "CipherBlob":
        if len(raw) < 2 * BLOCK_BYTES or (len(raw) - BLOCK_BYTES) % BLOCK_BYTES:
            raise FormatError("serialized envelope has invalid length")
        return cls(iv=bytes(raw[:BLOCK_BYTES]), ciphertext=bytes(raw[BLOCK_BYTES:]))


def generate_key() -> bytes:
    """Fresh random 256-bit content-encryption key."""
    return secrets.token_bytes(KEY_BYTES)


def generate_mac_key() -> bytes:
    """Fresh random 256-bit MAC key."""
    return secrets.token_bytes(MAC_KEY_BYTES)


def encrypt_blob(key: bytes, logical_name: str, content: bytes) -> CipherBlob:
    """Seal ``content`` plus its logical name under ``key`` with a fresh IV."""
    _require_key(key, KEY_BYTES, "key")
    name = logical_name.encode("utf-8")
    if len(name) > _HEADER_MAX_NAME:
        raise ValueError("logical name exceeds 65535 bytes")
    plaintext = len(name).to_bytes(2, "big") + name + content
    iv = secrets.token_bytes(BLOCK_BYTES)
    return CipherBlob(iv=iv, ciphertext=cbc_encrypt(key, iv, _pkcs7_pad(plaintext)))


def decrypt_blob(key: bytes, blob: CipherBlob) -> tuple[str, bytes]:
    """Open an envelope, returning ``(logical_name, content)``.

    Raises FormatError on bad padding, an inconsistent name-length field,
    or a name that is not valid UTF-8.
    """
    _require_key(key, KEY_BYTES, "key")
    plaintext = _pkcs7_unpad(cbc_decrypt(key, blob.iv, blob.ciphertext))
    if len(plaintext) < 2:
        raise FormatError("envelope too short for name header")
    name_len = int.from_bytes(plaintext[:2], "big")
    if 2 + name_len > len(plaintext):
        raise FormatError("name length field exceeds payload")
    try:
        name = plaintext[2:2 + name_len].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("embedded name is not valid UTF-8") from exc
    return name, plaintext[2 + name_len:]


def decrypt_blob_name(key: bytes, blob: CipherBlob) -> str:
    """Recover only the embedded logical name, decrypting just the header blocks.

    Used by listings, where fetching a key record and the first envelope
    blocks is enough to label an entry without decrypting the whole payload.
    """
    _require_key(key, KEY_BYTES, "key")
    first = cbc_decrypt(key, blob.iv, blob.ciphertext[:BLOCK_BYTES])
    name_len = int.from_bytes(first[:2], "big")
    if 2 + name_len > len(blob.ciphertext):
        raise FormatError("name length field exceeds payload")
    need = 2 + name_len
    have = first
    blocks = 1
    while len(have) < need:
        blocks += 1
        prev = blob.ciphertext[(blocks - 2) * BLOCK_BYTES:(blocks - 1) * BLOCK_BYTES]
        cur = blob.ciphertext[(blocks - 1) * BLOCK_BYTES:blocks * BLOCK_BYTES]
        have += cbc_decrypt(key, prev, cur)
    try:
        return have[2:need].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("embedded name is not valid UTF-8") from exc


# ---------------------------------------------------------------------------
# Integrity tags
# ---------------------------------------------------------------------------

def compute_mac(mac_key: bytes, content: bytes) -> bytes:
    """HMAC-SHA-256 over the plaintext content."""
    _require_key(mac_key, MAC_KEY_BYTES, "MAC key")
    return hmac.new(mac_key, content, hashlib.sha256).digest()


def verify_mac(mac_key: bytes, content: bytes, tag: bytes) -> bool:
    """Constant-time check that ``tag`` matches the content's HMAC."""
    _require_key(mac_key, MAC_KEY_BYTES, "MAC key")
    if len(tag) != MAC_TAG_BYTES:
        return False
    return hmac.compare_digest(compute_mac(mac_key, content), tag)


# ---------------------------------------------------------------------------
# Provider password derivation
# ---------------------------------------------------------------------------

def derive_provider_password(username: str, password: str, provider_url: str) -> str:
    """Per-provider password: SHA-256(password || username || url), base64url.

    Returns the first 24 characters of the unpadded base64url encoding, so a
    breach of one provider's credential reveals nothing about the master
    password or any other provider's credential.
    """
    if not username or not password or not provider_url:
        raise ValueError("username, password and provider URL must be non-empty")
    digest = hashlib.sha256(
        password.encode("utf-8") + username.encode("utf-8") + provider_url.encode("utf-8")
    ).digest()
    return base64.urlsafe_b64encode(digest).rstrip(b"=").decode("ascii")[:DERIVED_PASSWORD_CHARS]


# ---------------------------------------------------------------------------
# Deterministic filename encryption
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NameKeyPair:
    """Key pair for filename encryption: cipher key plus IV-derivation MAC key."""

    enc_part: bytes
    mac_part: bytes

    def __post_init__(self) -> None:
        if len(self.enc_part) != KEY_BYTES or len(self.mac_part) != KEY_BYTES:
            raise FormatError("name key parts must be 32 bytes each")

    def to_bytes(self) -> bytes:
        return self.enc_part + self.mac_part

    @classmethod
    def from_bytes(cls, raw: bytes) -> "NameKeyPair":
        if len(raw) != 2 * KEY_BYTES:
            raise FormatError("serialized name key pair must be 64 bytes")
        return cls(enc_part=bytes(raw[:KEY_BYTES]), mac_part=bytes(raw[KEY_BYTES:]))


def generate_name_key_pair() -> NameKeyPair:
    return NameKeyPair(secrets.token_bytes(KEY_BYTES), secrets.token_bytes(KEY_BYTES))


def _b64u_encode(raw: bytes) -> str:
    return base64.urlsafe_b64encode(raw).rstrip(b"=").decode("ascii")


def _b64u_decode_strict(token: str) -> bytes:
    # Round-trips the decode so tokens whose spare trailing bits were
    # tampered with do not alias onto the same byte string.
    try:
        raw = base64.urlsafe_b64decode(token + "=" * (-len(token) % 4))
    except (ValueError, TypeError) as exc:
        raise FormatError("token is not valid base64url") from exc
    if _b64u_encode(raw) != token:
        raise FormatError("token is not canonical base64url")
    return raw


def encrypt_name(nk: NameKeyPair, logical_name: str) -> str:
    """Deterministic name token: synthetic-IV CBC under the name keys.

    The IV is the truncated HMAC of the name, so equal names always map to
    equal tokens and remote paths can be recomputed without a local index.
    """
    name = logical_name.encode("utf-8")
    if not name:
        raise ValueError("logical name must be non-empty")
    if len(name) > NAME_MAX_BYTES:
        raise ValueError("logical name exceeds 255 bytes")
    iv = hmac.new(nk.mac_part, name, hashlib.sha256).digest()[:BLOCK_BYTES]
    return _b64u_encode(iv + cbc_encrypt(nk.enc_part, iv, _pkcs7_pad(name)))


def decrypt_name(nk: NameKeyPair, token: str) -> str:
    """Inverse of :func:`encrypt_name`, re-deriving the IV as an authenticity check."""
    if len(token) < NAME_TOKEN_MIN_CHARS:
        raise FormatError("name token too short")
    raw = _b64u_decode_strict(token)
    if len(raw) < 2 * BLOCK_BYTES or (len(raw) - BLOCK_BYTES) % BLOCK_BYTES:
        raise FormatError("name token has invalid length")
    iv, ciphertext = raw[:BLOCK_BYTES], raw[BLOCK_BYTES:]
    name = _pkcs7_unpad(cbc_decrypt(nk.enc_part, iv, ciphertext))
    if hmac.new(nk.mac_part, name, hashlib.sha256).digest()[:BLOCK_BYTES] != iv:
        raise FormatError("name token failed authenticity check")
    try:
        decoded = name.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("decrypted name is not valid UTF-8") from exc
    if not decoded:
        raise FormatError("decrypted name is empty")
    return decoded


# ---------------------------------------------------------------------------
# XOR key splitting (all shares required)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KeyShare:
    """One additive share of a file key; all shares XOR back to the key."""

    index: int
    data: bytes

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("share index must be non-negative")
        if len(self.data) != KEY_BYTES:
            raise ValueError("share must be 32 bytes")


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def split_key(key: bytes, n: int) -> list[KeyShare]:
    """Split ``key`` into ``n`` XOR shares; every share is needed to rebuild it."""
    _require_key(key, KEY_BYTES, "key")
    if n < 1:
        raise ValueError("share count must be at least 1")
    shares = [secrets.token_bytes(KEY_BYTES) for _ in range(n - 1)]
    last = key
    for s in shares:
        last = _xor(last, s)
    shares.append(last)
    return [KeyShare(index=i, data=s) for i, s in enumerate(shares)]


def combine_key(shares: list[KeyShare]) -> bytes:
    """XOR all shares back into the key; indices must be exactly 0..n-1."""
    if not shares:
        raise ValueError("no shares given")
    indices = sorted(s.index for s in shares)
    if indices != list(range(len(shares))):
        raise ValueError("share indices must be 0..n-1 without gaps or duplicates")
    key = bytes(KEY_BYTES)
    for s in shares:
        key = _xor(key, s.data)
    return key
