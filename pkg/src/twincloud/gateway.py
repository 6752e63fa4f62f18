"""Protocol engine: splits every file into ciphertext on the data cloud and
key material on the key cloud(s), so no single provider can read anything.

Remote layout, with N = K + 1 providers in placement order (K key providers
followed by the data provider):

  key provider i:   /<tokK_i>_keyFolder/<tokK_i>.key    key record (share i)
                    /<tokK_0>_keyFolder/<tokK_0>.mac    32-byte tag, i = 0 only
                    /.twincloud/namekey                 name keys of provider i-1
  data provider:    /<tokD>                             encrypted blob
                    /<tokD>.mackey                      32-byte MAC key
                    /.twincloud/namekey                 name keys of provider N-2

where tokD / tokK_i are the logical name encrypted under the name keys of the
provider the artifact lands on.  Name keys ride the ring: the pair that
encrypts names on provider i is stored on provider (i+1) mod N, so no
provider can decrypt the names it hosts.  The MAC tag lives beside the key
shares while the MAC key lives beside the data, which keeps either side from
tampering undetected.

Sharing never moves key material: the key folder is shared on each key cloud
(folder sharing, since some providers cannot share single files privately)
and the blob plus MAC key are shared on the data cloud.  The recipient pairs
the two halves via the data_name pointer inside the key record and recovers
the original filename from the encrypted header inside the blob.

All transfers pass through a per-operation staging directory that is zeroed
and removed before the operation returns, success or failure.
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

from .crypto import (
    CipherBlob,
    KeyShare,
    NameKeyPair,
    combine_key,
    compute_mac,
    decrypt_blob,
    decrypt_blob_name,
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
    ConfigError,
    ConflictError,
    FormatError,
    IntegrityError,
    NotFoundError,
    TwinCloudError,
)
from .provider import (
    AccessToken,
    CloudProvider,
    Permission,
    RemotePath,
)

KEY_FOLDER_SUFFIX = "_keyFolder"
KEY_SUFFIX = ".key"
MAC_SUFFIX = ".mac"
MACKEY_SUFFIX = ".mackey"
INTERNAL_FOLDER = ".twincloud"
NAMEKEY_OBJECT = "namekey"

RECORD_MAGIC = b"TWC1"
RECORD_VERSION = 1

_UNREADABLE_PREFIX = "<unreadable:"


@dataclass(frozen=True)
class PlacementPolicy:
    """Role assignment: which providers hold key shares, which holds data."""

    key_providers: tuple[str, ...]
    data_provider: str

    def __post_init__(self) -> None:
        if not self.key_providers:
            raise ValueError("placement needs at least one key provider")
        ids = list(self.key_providers) + [self.data_provider]
        if len(set(ids)) != len(ids):
            raise ValueError("placement provider ids must be distinct")

    @property
    def order(self) -> tuple[str, ...]:
        """All providers, key providers first, data provider last."""
        return self.key_providers + (self.data_provider,)


@dataclass(frozen=True)
class KeyFileRecord:
    """Binary key record stored per file on each key provider.

    Layout: magic "TWC1" (4) | version (1) | key share (32) |
    data-name length (2, big-endian) | data-name (ASCII token).
    """

    key_share: bytes
    data_name: str

    def __post_init__(self) -> None:
        if len(self.key_share) != 32:
            raise FormatError("key share must be 32 bytes")
        if not self.data_name or not self.data_name.isascii():
            raise FormatError("data name must be non-empty ASCII")

    def to_bytes(self) -> bytes:
        name = self.data_name.encode("ascii")
        return (
            RECORD_MAGIC
            + bytes([RECORD_VERSION])
            + self.key_share
            + len(name).to_bytes(2, "big")
            + name
        )

    @classmethod
    def from_bytes(cls, raw: bytes) -> "KeyFileRecord":
        if len(raw) < 39:
            raise FormatError("key record too short")
        if raw[:4] != RECORD_MAGIC:
            raise FormatError("key record has wrong magic")
        if raw[4] != RECORD_VERSION:
            raise FormatError(f"unsupported key record version {raw[4]}")
        share = bytes(raw[5:37])
        name_len = int.from_bytes(raw[37:39], "big")
        if len(raw) != 39 + name_len:
            raise FormatError("key record length does not match header")
        try:
            data_name = raw[39:].decode("ascii")
        except UnicodeDecodeError as exc:
            raise FormatError("data name is not ASCII") from exc
        return cls(key_share=share, data_name=data_name)


@dataclass(frozen=True)
class LogicalEntry:
    """One file as the user sees it: decrypted name, ownership, blob size."""

    logical_name: str
    size: int
    owned: bool
    shared_from: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.logical_name:
            raise ValueError("logical name must be non-empty")
        if self.owned == (self.shared_from is not None):
            raise ValueError("entry is either owned or shared, never both")


@dataclass
class Session:
    """Logged-in state: one token and one name-key pair per placed provider."""

    username: str
    tokens: dict[str, AccessToken]
    name_keys: dict[str, NameKeyPair] = field(default_factory=dict)
    placement: Optional[PlacementPolicy] = None
    staging_dir: Optional[Path] = None


class Gateway:
    """Drives the placed providers through the user-level file operations."""

    def __init__(
        self,
        providers: Iterable[CloudProvider],
        placement: PlacementPolicy,
        staging_dir: Path,
        token_cache: Path,
    ) -> None:
        self._providers: dict[str, CloudProvider] = {}
        for p in providers:
            if p.config.id in self._providers:
                raise ConfigError(f"duplicate provider id {p.config.id!r}")
            self._providers[p.config.id] = p
        for pid in placement.order:
            if pid not in self._providers:
                raise ConfigError(f"placement references unknown provider {pid!r}")
        self._placement = placement
        self._staging_dir = Path(staging_dir)
        self._staging_dir.mkdir(parents=True, exist_ok=True)
        self._token_cache = Path(token_cache)

    # ------------------------------------------------------------------
    # Small helpers
    # ------------------------------------------------------------------

    @property
    def placement(self) -> PlacementPolicy:
        return self._placement

    def _provider(self, pid: str) -> CloudProvider:
        return self._providers[pid]

    def _data_id(self) -> str:
        return self._placement.data_provider

    def _namekey_path(self) -> RemotePath:
        return RemotePath((INTERNAL_FOLDER, NAMEKEY_OBJECT), "file")

    @staticmethod
    def _key_folder(tok: str) -> RemotePath:
        return RemotePath.folder(tok + KEY_FOLDER_SUFFIX)

    @staticmethod
    def _key_record_path(tok: str) -> RemotePath:
        return RemotePath((tok + KEY_FOLDER_SUFFIX, tok + KEY_SUFFIX), "file")

    @staticmethod
    def _mac_path(tok: str) -> RemotePath:
        return RemotePath((tok + KEY_FOLDER_SUFFIX, tok + MAC_SUFFIX), "file")

    def _validate_logical_name(self, name: str) -> None:
        if not name:
            raise ValueError("logical name must be non-empty")
        if len(name.encode("utf-8")) > 255:
            raise ValueError("logical name exceeds 255 bytes")
        if "/" in name or "\\" in name or "\x00" in name or name in (".", ".."):
            raise ValueError(f"unusable logical name: {name!r}")

    # ------------------------------------------------------------------
    # Staging
    # ------------------------------------------------------------------

    @contextmanager
    def _stage(self):
        """Per-operation scratch space, zeroed and removed on the way out."""
        op_dir = Path(tempfile.mkdtemp(prefix="op-", dir=self._staging_dir))
        try:
            yield op_dir
        finally:
            self._shred_tree(op_dir)

    @staticmethod
    def _shred_tree(op_dir: Path) -> None:
        # Single-pass zero overwrite before unlink; best effort on the
        # flush, unconditional on the removal.
        for item in sorted(op_dir.rglob("*"), key=lambda p: len(p.parts), reverse=True):
            if item.is_file():
                try:
                    size = item.stat().st_size
                    with open(item, "r+b") as fh:
                        remaining = size
                        while remaining > 0:
                            chunk = min(remaining, 1 << 20)
                            fh.write(b"\x00" * chunk)
                            remaining -= chunk
                        fh.flush()
                        os.fsync(fh.fileno())
                except OSError:
                    pass
                item.unlink(missing_ok=True)
            else:
                item.rmdir()
        op_dir.rmdir()

    # ------------------------------------------------------------------
    # Token cache
    # ------------------------------------------------------------------

    def _read_token_cache(self) -> dict[str, tuple[str, str]]:
        if not self._token_cache.exists():
            return {}
        cached: dict[str, tuple[str, str]] = {}
        for line in self._token_cache.read_text("utf-8").splitlines():
            if not line:
                continue
            try:
                pid, username, opaque = line.split("\t")
            except ValueError:
                continue  # ignore damaged lines, a cold login rewrites them
            cached[pid] = (username, opaque)
        return cached

    def _write_token_cache(self, session: Session) -> None:
        lines = "".join(
            f"{pid}\t{session.username}\t{session.tokens[pid].opaque}\n"
            for pid in self._placement.order
        )
        self._token_cache.parent.mkdir(parents=True, exist_ok=True)
        self._token_cache.write_text(lines, "utf-8")
        os.chmod(self._token_cache, 0o600)

    # ------------------------------------------------------------------
    # Account lifecycle
    # ------------------------------------------------------------------

    def signup(self, username: str, password: str) -> Session:
        """Create accounts on every placed provider and initialize name keys.

        Account creation is all-or-nothing: a conflict or policy rejection on
        any provider removes the accounts already created on the others.
        """
        if not username or not password:
            raise ValueError("username and password must be non-empty")
        order = self._placement.order
        created: list[str] = []

        def undo_accounts() -> None:
            for pid in reversed(created):
                purge = getattr(self._provider(pid), "purge_account", None)
                if purge is None:
                    continue
                try:
                    purge(username)
                except TwinCloudError:
                    pass

        try:
            for pid in order:
                derived = derive_provider_password(
                    username, password, self._provider(pid).config.url
                )
                self._provider(pid).create_account(username, derived)
                created.append(pid)
        except Exception:
            undo_accounts()
            raise

        try:
            # tokens only; the name keys are only about to be created
            session = self._login_tokens(username, password)
            with self._stage() as stage:
                for i, pid in enumerate(order):
                    nk = generate_name_key_pair()
                    host = order[(i + 1) % len(order)]
                    staged = stage / f"namekey-{pid}"
                    staged.write_bytes(nk.to_bytes())
                    host_provider = self._provider(host)
                    host_provider.create_folder(
                        session.tokens[host], RemotePath.folder(INTERNAL_FOLDER)
                    )
                    host_provider.upload_object(
                        session.tokens[host], self._namekey_path(), staged.read_bytes()
                    )
                    session.name_keys[pid] = nk
        except Exception:
            undo_accounts()
            raise
        return session

    def login(self, username: str, password: Optional[str] = None) -> Session:
        """Obtain a token per provider, preferring cached tokens over the
        authenticate/exchange flow, and load the name-key ring."""
        session = self._login_tokens(username, password)
        self._load_name_keys(session)
        return session

    def _login_tokens(self, username: str, password: Optional[str]) -> Session:
        if not username:
            raise ValueError("username must be non-empty")
        order = self._placement.order
        cached = self._read_token_cache()
        tokens: dict[str, AccessToken] = {}
        cold: list[str] = []
        for pid in order:
            entry = cached.get(pid)
            if entry is None or entry[0] != username:
                cold.append(pid)
                continue
            token = AccessToken(opaque=entry[1], username=username)
            try:
                self._provider(pid).list_entries(token)
            except AuthError:
                cold.append(pid)  # stale cache, fall back to the full flow
            else:
                tokens[pid] = token
        for pid in cold:
            if password is None:
                raise AuthError(
                    f"no valid cached token for {pid!r}; run login with the password"
                )
            provider = self._provider(pid)
            derived = derive_provider_password(username, password, provider.config.url)
            code = provider.authenticate(username, derived)
            tokens[pid] = provider.exchange_code(code)

        session = Session(
            username=username,
            tokens=tokens,
            placement=self._placement,
            staging_dir=self._staging_dir,
        )
        if cold:
            self._write_token_cache(session)
        return session

    def resume_session(self) -> Session:
        """Rebuild a session purely from the token cache (no password)."""
        cached = self._read_token_cache()
        usernames = {cached[pid][0] for pid in self._placement.order if pid in cached}
        if len(usernames) != 1:
            raise AuthError("token cache is empty or inconsistent; run login")
        return self.login(usernames.pop(), password=None)

    def _load_name_keys(self, session: Session) -> None:
        order = self._placement.order
        for i, pid in enumerate(order):
            host = order[(i + 1) % len(order)]
            raw = self._provider(host).download_object(
                session.tokens[host], self._namekey_path()
            )
            session.name_keys[pid] = NameKeyPair.from_bytes(raw)

    # ------------------------------------------------------------------
    # File operations
    # ------------------------------------------------------------------

    def _owned_data_tokens(self, session: Session) -> set[str]:
        data = self._provider(self._data_id())
        tokens = set()
        for entry in data.list_entries(session.tokens[self._data_id()]):
            if entry.shared_from is not None or entry.path.kind != "file":
                continue
            path_str = str(entry.path)
            if path_str.startswith(INTERNAL_FOLDER + "/") or path_str.endswith(
                MACKEY_SUFFIX
            ):
                continue
            tokens.add(path_str)
        return tokens

    def upload_file(
        self, session: Session, local_path: Path, *, overwrite: bool = False
    ) -> LogicalEntry:
        """Encrypt and place one local file across the providers."""
        local_path = Path(local_path)
        name = local_path.name
        self._validate_logical_name(name)
        content = local_path.read_bytes()

        data_id = self._data_id()
        tok_data = encrypt_name(session.name_keys[data_id], name)
        if tok_data in self._owned_data_tokens(session):
            if not overwrite:
                raise ConflictError(f"{name!r} already exists; pass overwrite")
            self._delete_artifacts(session, name)

        key_ids = self._placement.key_providers
        k = generate_key()
        mac_key = generate_mac_key()
        blob_bytes = encrypt_blob(k, name, content).to_bytes()
        tag = compute_mac(mac_key, content)
        shares = split_key(k, len(key_ids))

        created: list[tuple[str, RemotePath]] = []
        with self._stage() as stage:
            staged_blob = stage / "blob"
            staged_blob.write_bytes(blob_bytes)
            staged_records = []
            for i, pid in enumerate(key_ids):
                record = KeyFileRecord(key_share=shares[i].data, data_name=tok_data)
                staged = stage / f"record-{i}"
                staged.write_bytes(record.to_bytes())
                staged_records.append(staged)
            staged_tag = stage / "tag"
            staged_tag.write_bytes(tag)
            try:
                for i, pid in enumerate(key_ids):
                    provider = self._provider(pid)
                    token = session.tokens[pid]
                    tok_key = encrypt_name(session.name_keys[pid], name)
                    folder = self._key_folder(tok_key)
                    provider.create_folder(token, folder)
                    created.append((pid, folder))
                    provider.upload_object(
                        token, self._key_record_path(tok_key), staged_records[i].read_bytes()
                    )
                    if i == 0:
                        provider.upload_object(
                            token, self._mac_path(tok_key), staged_tag.read_bytes()
                        )
                data = self._provider(data_id)
                token = session.tokens[data_id]
                blob_path = RemotePath.file(tok_data)
                data.upload_object(token, blob_path, staged_blob.read_bytes())
                created.append((data_id, blob_path))
                mackey_path = RemotePath.file(tok_data + MACKEY_SUFFIX)
                data.upload_object(token, mackey_path, mac_key)
                created.append((data_id, mackey_path))
            except Exception:
                self._rollback_created(session, created)
                raise
        return LogicalEntry(
            logical_name=name, size=len(blob_bytes), owned=True, shared_from=None
        )

    def _rollback_created(
        self, session: Session, created: list[tuple[str, RemotePath]]
    ) -> None:
        for pid, path in reversed(created):
            try:
                self._provider(pid).delete_path(session.tokens[pid], path)
            except TwinCloudError:
                pass

    def _fetch_owned(self, session: Session, name: str):
        """Artifacts for a file the caller owns; raises if any piece is absent."""
        key_ids = self._placement.key_providers
        data_id = self._data_id()
        tok_data = encrypt_name(session.name_keys[data_id], name)
        data = self._provider(data_id)
        data_token = session.tokens[data_id]
        blob_bytes = data.download_object(data_token, RemotePath.file(tok_data))
        mac_key = data.download_object(
            data_token, RemotePath.file(tok_data + MACKEY_SUFFIX)
        )
        records = []
        tag = b""
        for i, pid in enumerate(key_ids):
            tok_key = encrypt_name(session.name_keys[pid], name)
            raw = self._provider(pid).download_object(
                session.tokens[pid], self._key_record_path(tok_key)
            )
            records.append(raw)
            if i == 0:
                tag = self._provider(pid).download_object(
                    session.tokens[pid], self._mac_path(tok_key)
                )
        return blob_bytes, mac_key, records, tag

    def _shared_key_folders(
        self, session: Session, pid: str
    ) -> list[tuple[str, str]]:
        """(token, owner) pairs for key folders shared with the caller on pid."""
        found = []
        for entry in self._provider(pid).list_entries(session.tokens[pid]):
            if entry.shared_from is None or entry.path.kind != "folder":
                continue
            folder_name = entry.path.segments[-1]
            if len(entry.path.segments) == 1 and folder_name.endswith(KEY_FOLDER_SUFFIX):
                found.append(
                    (folder_name[: -len(KEY_FOLDER_SUFFIX)], entry.shared_from)
                )
        return found

    @dataclass
    class _SharedGroup:
        owner: str
        records: dict[int, bytes] = field(default_factory=dict)
        folder_tokens: dict[int, str] = field(default_factory=dict)

        def complete(self, key_count: int) -> bool:
            return set(self.records) == set(range(key_count))

        def parsed(self) -> list[KeyFileRecord]:
            return [KeyFileRecord.from_bytes(self.records[i]) for i in sorted(self.records)]

    def _shared_record_groups(self, session: Session) -> dict[str, "_SharedGroup"]:
        """Shared key records grouped by the data name they point at."""
        groups: dict[str, Gateway._SharedGroup] = {}
        for i, pid in enumerate(self._placement.key_providers):
            for tok, owner in self._shared_key_folders(session, pid):
                try:
                    raw = self._provider(pid).download_object(
                        session.tokens[pid], self._key_record_path(tok)
                    )
                    record = KeyFileRecord.from_bytes(raw)
                except TwinCloudError:
                    continue  # damaged or half-shared; listing shows a placeholder
                group = groups.setdefault(record.data_name, Gateway._SharedGroup(owner))
                group.records[i] = raw
                group.folder_tokens[i] = tok
        return groups

    def _fetch_shared(self, session: Session, name: str):
        """Artifacts for a file shared with the caller, located by its
        embedded header name."""
        key_count = len(self._placement.key_providers)
        data_id = self._data_id()
        data = self._provider(data_id)
        data_token = session.tokens[data_id]
        for data_name, group in self._shared_record_groups(session).items():
            if not group.complete(key_count):
                continue
            try:
                blob_bytes = data.download_object(data_token, RemotePath.file(data_name))
                parsed = group.parsed()
                k = combine_key(
                    [KeyShare(i, rec.key_share) for i, rec in enumerate(parsed)]
                )
                header_name = decrypt_blob_name(k, CipherBlob.from_bytes(blob_bytes))
            except TwinCloudError:
                continue
            if header_name != name:
                continue
            mac_key = data.download_object(
                data_token, RemotePath.file(data_name + MACKEY_SUFFIX)
            )
            first_pid = self._placement.key_providers[0]
            tag = self._provider(first_pid).download_object(
                session.tokens[first_pid], self._mac_path(group.folder_tokens[0])
            )
            records = [group.records[i] for i in sorted(group.records)]
            return blob_bytes, mac_key, records, tag
        raise AccessDeniedError(f"no accessible file named {name!r}")

    def download_file(self, session: Session, logical_name: str, dest_path: Path) -> None:
        """Reassemble, verify, and decrypt one file to dest_path.

        The destination is written only after the MAC and the embedded name
        both check out; fetched artifacts are staged and shredded either way.
        """
        self._validate_logical_name(logical_name)
        dest_path = Path(dest_path)
        with self._stage() as stage:
            try:
                blob_bytes, mac_key, records, tag = self._fetch_owned(
                    session, logical_name
                )
            except (NotFoundError, AccessDeniedError):
                blob_bytes, mac_key, records, tag = self._fetch_shared(
                    session, logical_name
                )
            (stage / "blob").write_bytes(blob_bytes)
            for i, raw in enumerate(records):
                (stage / f"record-{i}").write_bytes(raw)
            (stage / "tag").write_bytes(tag)

            parsed = [KeyFileRecord.from_bytes(raw) for raw in records]
            k = combine_key(
                [KeyShare(i, rec.key_share) for i, rec in enumerate(parsed)]
            )
            blob = CipherBlob.from_bytes((stage / "blob").read_bytes())
            embedded_name, content = decrypt_blob(k, blob)
            if embedded_name != logical_name:
                raise FormatError(
                    "decrypted header names a different file; artifact mismatch"
                )
            if not verify_mac(mac_key, content, tag):
                raise IntegrityError(f"MAC verification failed for {logical_name!r}")
            dest_path.write_bytes(content)

    def delete_file(self, session: Session, logical_name: str) -> None:
        """Remove every artifact of an owned file from every provider."""
        self._validate_logical_name(logical_name)
        data_id = self._data_id()
        tok_data = encrypt_name(session.name_keys[data_id], logical_name)
        if tok_data not in self._owned_data_tokens(session):
            shared_names = {
                e.logical_name for e in self.list_files(session) if not e.owned
            }
            if logical_name in shared_names:
                raise AccessDeniedError(
                    f"{logical_name!r} is shared with you; only the owner deletes it"
                )
            raise NotFoundError(f"no file named {logical_name!r}")
        self._delete_artifacts(session, logical_name)

    def _delete_artifacts(self, session: Session, name: str) -> None:
        # Tolerates half-written state so a failed upload can be cleaned up.
        for pid in self._placement.key_providers:
            tok_key = encrypt_name(session.name_keys[pid], name)
            try:
                self._provider(pid).delete_path(
                    session.tokens[pid], self._key_folder(tok_key)
                )
            except NotFoundError:
                pass
        data_id = self._data_id()
        tok_data = encrypt_name(session.name_keys[data_id], name)
        for path in (
            RemotePath.file(tok_data),
            RemotePath.file(tok_data + MACKEY_SUFFIX),
        ):
            try:
                self._provider(data_id).delete_path(session.tokens[data_id], path)
            except NotFoundError:
                pass

    def share_file(
        self,
        session: Session,
        logical_name: str,
        grantee: str,
        perm: Permission = Permission.READ,
    ) -> None:
        """Grant another account access to both halves of one file.

        The grant lands on every provider or on none: a failure part-way
        through revokes the grants already made.
        """
        self._validate_logical_name(logical_name)
        data_id = self._data_id()
        tok_data = encrypt_name(session.name_keys[data_id], logical_name)
        if tok_data not in self._owned_data_tokens(session):
            shared_names = {
                e.logical_name for e in self.list_files(session) if not e.owned
            }
            if logical_name in shared_names:
                raise AccessDeniedError(
                    f"{logical_name!r} is shared with you; only the owner shares it"
                )
            raise NotFoundError(f"no file named {logical_name!r}")

        granted: list[tuple[str, RemotePath]] = []
        try:
            for pid in self._placement.key_providers:
                tok_key = encrypt_name(session.name_keys[pid], logical_name)
                folder = self._key_folder(tok_key)
                self._provider(pid).share_path(
                    session.tokens[pid], folder, grantee, perm
                )
                granted.append((pid, folder))
            data = self._provider(data_id)
            for path in (
                RemotePath.file(tok_data),
                RemotePath.file(tok_data + MACKEY_SUFFIX),
            ):
                data.share_path(session.tokens[data_id], path, grantee, perm)
                granted.append((data_id, path))
        except Exception:
            for pid, path in reversed(granted):
                try:
                    self._provider(pid).unshare_path(
                        session.tokens[pid], path, grantee
                    )
                except TwinCloudError:
                    pass
            raise

    def unshare_file(self, session: Session, logical_name: str, grantee: str) -> None:
        """Revoke one grantee's access on every provider."""
        self._validate_logical_name(logical_name)
        data_id = self._data_id()
        tok_data = encrypt_name(session.name_keys[data_id], logical_name)
        if tok_data not in self._owned_data_tokens(session):
            raise NotFoundError(f"no file named {logical_name!r}")
        for pid in self._placement.key_providers:
            tok_key = encrypt_name(session.name_keys[pid], logical_name)
            self._provider(pid).unshare_path(
                session.tokens[pid], self._key_folder(tok_key), grantee
            )
        data = self._provider(data_id)
        for path in (
            RemotePath.file(tok_data),
            RemotePath.file(tok_data + MACKEY_SUFFIX),
        ):
            data.unshare_path(session.tokens[data_id], path, grantee)

    def list_files(self, session: Session) -> list[LogicalEntry]:
        """Owned entries from the data cloud plus shared entries discovered
        through shared key folders; unreadable items become placeholders."""
        data_id = self._data_id()
        entries: list[LogicalEntry] = []
        nk_data = session.name_keys[data_id]
        data = self._provider(data_id)
        for entry in data.list_entries(session.tokens[data_id]):
            if entry.shared_from is not None or entry.path.kind != "file":
                continue
            path_str = str(entry.path)
            if path_str.startswith(INTERNAL_FOLDER + "/") or path_str.endswith(
                MACKEY_SUFFIX
            ):
                continue
            try:
                name = decrypt_name(nk_data, path_str)
            except FormatError:
                name = f"{_UNREADABLE_PREFIX}{path_str[:12]}>"
            entries.append(
                LogicalEntry(logical_name=name, size=entry.size, owned=True)
            )

        key_count = len(self._placement.key_providers)
        data_token = session.tokens[data_id]
        for data_name, group in self._shared_record_groups(session).items():
            try:
                if not group.complete(key_count):
                    raise FormatError("incomplete share across key providers")
                blob_bytes = data.download_object(
                    data_token, RemotePath.file(data_name)
                )
                parsed = group.parsed()
                k = combine_key(
                    [KeyShare(i, rec.key_share) for i, rec in enumerate(parsed)]
                )
                name = decrypt_blob_name(k, CipherBlob.from_bytes(blob_bytes))
                size = len(blob_bytes)
            except TwinCloudError:
                name = f"{_UNREADABLE_PREFIX}{data_name[:12]}>"
                size = 0
            entries.append(
                LogicalEntry(
                    logical_name=name, size=size, owned=False, shared_from=group.owner
                )
            )
        entries.sort(key=lambda e: e.logical_name)
        return entries

    def sync_all(
        self,
        session: Session,
        dest_dir: Path,
        on_error: Optional[Callable[[str, Exception], None]] = None,
    ) -> int:
        """Download every listed file into dest_dir; returns how many landed.

        Per-file failures (integrity, damaged records, unusable names) are
        reported through on_error and do not stop the batch.
        """
        dest_dir = Path(dest_dir)
        dest_dir.mkdir(parents=True, exist_ok=True)
        written = 0
        for entry in self.list_files(session):
            name = entry.logical_name
            try:
                if name.startswith(_UNREADABLE_PREFIX):
                    raise FormatError(f"undecryptable entry {name}")
                self._validate_logical_name(name)
                self.download_file(session, name, dest_dir / name)
            except (TwinCloudError, ValueError) as exc:
                if on_error is not None:
                    on_error(name, exc)
                continue
            written += 1
        return written
