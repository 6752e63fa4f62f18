"""Mock cloud providers: accounts, code/token auth, object storage, sharing.

Two interchangeable implementations stand in for real storage services at
desk scale.  ``MemoryProvider`` keeps everything in dicts; ``DiskProvider``
is the same state machine with a write-through on-disk mirror so separate
processes observe the same provider.

On-disk layout under ``persistence_root``:
  accounts.tsv   one line per account: username TAB derived-password
  data/<owner>/<path segments...>      object bytes; folders are directories
  acl.tsv        one line per grant: path TAB owner TAB grantee TAB R|E
  trash/<owner>/...                    deleted entries awaiting purge
  tokens.tsv     one line per live token: opaque TAB username

Text files are UTF-8 with LF line endings.  The token table is not part of
the storage model proper, but without it a token issued by one process would
be worthless to the next, and the command-line client runs one process per
command.

Every operation is atomic: validation happens first and the store only
mutates once the operation is sure to succeed.  Mock-admin hooks
(``dump_store``, ``patch_object_bytes``, ``purge_account``, fault injection,
operation counters) exist for tests and rollback and are not part of the
provider interface the gateway is written against.
"""

from __future__ import annotations

import enum
import secrets
import shutil
import threading
import time
from abc import ABC, abstractmethod
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Literal, Optional, Union

from .errors import (
    AccessDeniedError,
    AuthError,
    CapabilityError,
    ConflictError,
    NotFoundError,
    PolicyError,
)

AUTH_CODE_TTL_SECONDS = 60.0
MIN_PASSWORD_CHARS = 8

_BAD_SEGMENT_CHARS = set("/\\\t\n\r\x00")


@dataclass(frozen=True)
class ProviderConfig:
    """Static description of one provider endpoint."""

    id: str
    url: str
    supports_file_sharing: bool = True
    persistence_root: Optional[Path] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("provider id must be non-empty")
        if not self.url:
            raise ValueError("provider url must be non-empty")


@dataclass(frozen=True)
class Account:
    username: str
    password: str


@dataclass(frozen=True)
class AuthCode:
    """Single-use authorization code from the password login step."""

    opaque: str
    username: str
    expiry: float


@dataclass(frozen=True)
class AccessToken:
    """Bearer credential for exactly the issuing user's privileges."""

    opaque: str
    username: str


class Permission(enum.Enum):
    READ = "R"
    EDIT = "E"

    def covers(self, needed: "Permission") -> bool:
        return self is needed or (self is Permission.EDIT and needed is Permission.READ)


PathKind = Literal["file", "folder"]


@dataclass(frozen=True)
class RemotePath:
    """Provider-side path: validated segments plus whether it names a file."""

    segments: tuple[str, ...]
    kind: PathKind

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("path needs at least one segment")
        if self.kind not in ("file", "folder"):
            raise ValueError("kind must be 'file' or 'folder'")
        for seg in self.segments:
            if not seg or seg in (".", ".."):
                raise ValueError(f"invalid path segment: {seg!r}")
            if set(seg) & _BAD_SEGMENT_CHARS:
                raise ValueError(f"invalid character in path segment: {seg!r}")
            if len(seg.encode("utf-8")) > 255:
                raise ValueError("path segment exceeds 255 bytes")

    def __str__(self) -> str:
        return "/".join(self.segments)

    @property
    def parent_str(self) -> Optional[str]:
        if len(self.segments) == 1:
            return None
        return "/".join(self.segments[:-1])

    @classmethod
    def file(cls, text: str) -> "RemotePath":
        return cls(tuple(text.split("/")), "file")

    @classmethod
    def folder(cls, text: str) -> "RemotePath":
        return cls(tuple(text.split("/")), "folder")


@dataclass(frozen=True)
class EntryMeta:
    """One listing row; shared_from is set when the entry arrives via a grant."""

    path: RemotePath
    owner: str
    size: int
    shared_from: Optional[str] = None


@dataclass
class ProviderStore:
    """Deep snapshot of everything a provider holds, for audits in tests."""

    accounts: dict[str, str]
    objects: dict[str, dict[str, bytes]]
    folders: dict[str, set[str]]
    acl: dict[tuple[str, str], dict[str, Permission]]
    trash: dict[str, dict[str, bytes]]

    def all_recorded_bytes(self) -> Iterator[tuple[str, bytes]]:
        """Every byte string the provider persists, labeled by location."""
        for user, pw in self.accounts.items():
            yield f"account:{user}", user.encode("utf-8")
            yield f"account-password:{user}", pw.encode("utf-8")
        for owner, objs in self.objects.items():
            for path, data in objs.items():
                yield f"object-path:{owner}:{path}", path.encode("utf-8")
                yield f"object:{owner}:{path}", data
        for owner, paths in self.folders.items():
            for path in paths:
                yield f"folder:{owner}:{path}", path.encode("utf-8")
        for (owner, path), grants in self.acl.items():
            for grantee, perm in grants.items():
                row = f"{path}\t{owner}\t{grantee}\t{perm.value}"
                yield f"acl:{owner}:{path}:{grantee}", row.encode("utf-8")
        for owner, objs in self.trash.items():
            for path, data in objs.items():
                yield f"trash-path:{owner}:{path}", path.encode("utf-8")
                yield f"trash:{owner}:{path}", data


TokenLike = Union[AccessToken, str]
CodeLike = Union[AuthCode, str]


class CloudProvider(ABC):
    """Operations the gateway relies on; both mocks implement them identically."""

    def __init__(self, config: ProviderConfig) -> None:
        self._config = config

    @property
    def config(self) -> ProviderConfig:
        return self._config

    @abstractmethod
    def create_account(self, username: str, password: str) -> Account: ...

    @abstractmethod
    def authenticate(self, username: str, password: str) -> AuthCode: ...

    @abstractmethod
    def exchange_code(self, code: CodeLike) -> AccessToken: ...

    @abstractmethod
    def upload_object(
        self, token: TokenLike, path: RemotePath, data: bytes, *, overwrite: bool = False
    ) -> EntryMeta: ...

    @abstractmethod
    def download_object(self, token: TokenLike, path: RemotePath) -> bytes: ...

    @abstractmethod
    def create_folder(self, token: TokenLike, path: RemotePath) -> EntryMeta: ...

    @abstractmethod
    def delete_path(self, token: TokenLike, path: RemotePath) -> None: ...

    @abstractmethod
    def share_path(
        self, token: TokenLike, path: RemotePath, grantee: str, perm: Permission
    ) -> None: ...

    @abstractmethod
    def unshare_path(self, token: TokenLike, path: RemotePath, grantee: str) -> None: ...

    @abstractmethod
    def list_entries(self, token: TokenLike) -> list[EntryMeta]: ...


class MemoryProvider(CloudProvider):
    """Reference in-memory provider; also the state machine DiskProvider reuses."""

    def __init__(
        self,
        config: ProviderConfig,
        *,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        super().__init__(config)
        self._clock = clock
        self._lock = threading.RLock()
        self._accounts: dict[str, str] = {}
        self._objects: dict[str, dict[str, bytes]] = {}
        self._folders: dict[str, set[str]] = {}
        self._acl: dict[tuple[str, str], dict[str, Permission]] = {}
        self._trash: dict[str, dict[str, bytes]] = {}
        self._codes: dict[str, tuple[str, float]] = {}
        self._tokens: dict[str, str] = {}
        self.op_counts: Counter[str] = Counter()
        self.fault_hook: Optional[Callable[[str], None]] = None

    # -- bookkeeping ---------------------------------------------------

    @contextmanager
    def _op(self, name: str):
        with self._lock:
            self.op_counts[name] += 1
            if self.fault_hook is not None:
                self.fault_hook(name)
            yield

    def _require_token(self, token: TokenLike) -> str:
        if isinstance(token, AccessToken):
            owner = self._tokens.get(token.opaque)
            if owner is None or owner != token.username:
                raise AuthError(f"{self._config.id}: invalid access token")
            return owner
        owner = self._tokens.get(token)
        if owner is None:
            raise AuthError(f"{self._config.id}: invalid access token")
        return owner

    def _exists(self, owner: str, path_str: str, kind: PathKind) -> bool:
        if kind == "file":
            return path_str in self._objects.get(owner, {})
        return path_str in self._folders.get(owner, set())

    def _exists_any_kind(self, owner: str, path_str: str) -> bool:
        return path_str in self._objects.get(owner, {}) or path_str in self._folders.get(
            owner, set()
        )

    @staticmethod
    def _ancestors(path_str: str) -> Iterator[str]:
        parts = path_str.split("/")
        for i in range(len(parts), 0, -1):
            yield "/".join(parts[:i])

    def _grant_level(self, owner: str, path_str: str, grantee: str) -> Optional[Permission]:
        # A grant on the path itself or on any ancestor folder counts.
        best: Optional[Permission] = None
        for anc in self._ancestors(path_str):
            perm = self._acl.get((owner, anc), {}).get(grantee)
            if perm is Permission.EDIT:
                return perm
            if perm is Permission.READ:
                best = perm
        return best

    def _resolve_readable(self, caller: str, path: RemotePath) -> str:
        """Owner whose copy of ``path`` the caller may read."""
        path_str = str(path)
        if self._exists(caller, path_str, path.kind):
            return caller
        seen_elsewhere = False
        for owner in sorted(self._accounts):
            if owner == caller or not self._exists(owner, path_str, path.kind):
                continue
            seen_elsewhere = True
            perm = self._grant_level(owner, path_str, caller)
            if perm is not None:
                return owner
        if seen_elsewhere:
            raise AccessDeniedError(f"{self._config.id}: no grant covers {path_str}")
        raise NotFoundError(f"{self._config.id}: no such path {path_str}")

    def _resolve_parent_writable(self, caller: str, path: RemotePath) -> str:
        """Owner of the folder the caller may write ``path`` into."""
        parent = path.parent_str
        if parent is None:
            return caller  # own root is always writable
        if parent in self._folders.get(caller, set()):
            return caller
        seen_elsewhere = False
        read_only = False
        for owner in sorted(self._accounts):
            if owner == caller or parent not in self._folders.get(owner, set()):
                continue
            seen_elsewhere = True
            perm = self._grant_level(owner, parent, caller)
            if perm is Permission.EDIT:
                return owner
            if perm is Permission.READ:
                read_only = True
        if read_only:
            raise AccessDeniedError(f"{self._config.id}: read-only grant on {parent}")
        if seen_elsewhere:
            raise AccessDeniedError(f"{self._config.id}: no grant covers {parent}")
        raise NotFoundError(f"{self._config.id}: no such folder {parent}")

    # -- account & auth -------------------------------------------------

    def create_account(self, username: str, password: str) -> Account:
        with self._op("create_account"):
            if (
                not username
                or username in (".", "..")
                or set(username) & _BAD_SEGMENT_CHARS
                or len(username) > 128
            ):
                raise PolicyError(f"{self._config.id}: unacceptable username")
            if len(password) < MIN_PASSWORD_CHARS:
                raise PolicyError(
                    f"{self._config.id}: password must be at least {MIN_PASSWORD_CHARS} characters"
                )
            if username in self._accounts:
                raise ConflictError(f"{self._config.id}: username {username!r} taken")
            self._accounts[username] = password
            self._objects.setdefault(username, {})
            self._folders.setdefault(username, set())
            self._trash.setdefault(username, {})
            self._persist_accounts()
            self._persist_account_created(username)
            return Account(username=username, password=password)

    def authenticate(self, username: str, password: str) -> AuthCode:
        with self._op("authenticate"):
            stored = self._accounts.get(username)
            if stored is None or not secrets.compare_digest(
                stored.encode("utf-8"), password.encode("utf-8")
            ):
                raise AuthError(f"{self._config.id}: bad credentials")
            opaque = secrets.token_urlsafe(16)
            expiry = self._clock() + AUTH_CODE_TTL_SECONDS
            self._codes[opaque] = (username, expiry)
            return AuthCode(opaque=opaque, username=username, expiry=expiry)

    def exchange_code(self, code: CodeLike) -> AccessToken:
        with self._op("exchange_code"):
            opaque = code.opaque if isinstance(code, AuthCode) else code
            entry = self._codes.pop(opaque, None)  # consumed even on failure
            if entry is None:
                raise AuthError(f"{self._config.id}: unknown or already-used code")
            username, expiry = entry
            if isinstance(code, AuthCode) and code.username != username:
                raise AuthError(f"{self._config.id}: code does not match user")
            if self._clock() > expiry:
                raise AuthError(f"{self._config.id}: authorization code expired")
            opaque_token = secrets.token_urlsafe(24)
            self._tokens[opaque_token] = username
            self._persist_tokens()
            return AccessToken(opaque=opaque_token, username=username)

    # -- storage ---------------------------------------------------------

    def upload_object(
        self, token: TokenLike, path: RemotePath, data: bytes, *, overwrite: bool = False
    ) -> EntryMeta:
        with self._op("upload_object"):
            caller = self._require_token(token)
            if path.kind != "file":
                raise ValueError("upload_object takes a file path")
            if not isinstance(data, (bytes, bytearray)):
                raise TypeError("object data must be bytes")
            owner = self._resolve_parent_writable(caller, path)
            path_str = str(path)
            if path_str in self._folders.get(owner, set()):
                raise ConflictError(f"{self._config.id}: {path_str} is a folder")
            if path_str in self._objects.get(owner, {}) and not overwrite:
                raise ConflictError(f"{self._config.id}: {path_str} already exists")
            self._objects.setdefault(owner, {})[path_str] = bytes(data)
            self._persist_object_write(owner, path_str)
            return EntryMeta(path=path, owner=owner, size=len(data))

    def download_object(self, token: TokenLike, path: RemotePath) -> bytes:
        with self._op("download_object"):
            caller = self._require_token(token)
            if path.kind != "file":
                raise ValueError("download_object takes a file path")
            owner = self._resolve_readable(caller, path)
            return self._objects[owner][str(path)]

    def create_folder(self, token: TokenLike, path: RemotePath) -> EntryMeta:
        with self._op("create_folder"):
            caller = self._require_token(token)
            if path.kind != "folder":
                raise ValueError("create_folder takes a folder path")
            owner = self._resolve_parent_writable(caller, path)
            path_str = str(path)
            if self._exists_any_kind(owner, path_str):
                raise ConflictError(f"{self._config.id}: {path_str} already exists")
            self._folders.setdefault(owner, set()).add(path_str)
            self._persist_folder_create(owner, path_str)
            return EntryMeta(path=path, owner=owner, size=0)

    def delete_path(self, token: TokenLike, path: RemotePath) -> None:
        with self._op("delete_path"):
            caller = self._require_token(token)
            path_str = str(path)
            if not self._exists(caller, path_str, path.kind):
                for owner in sorted(self._accounts):
                    if owner != caller and self._exists(owner, path_str, path.kind):
                        raise AccessDeniedError(
                            f"{self._config.id}: only the owner may delete {path_str}"
                        )
                raise NotFoundError(f"{self._config.id}: no such path {path_str}")
            doomed_objects = []
            doomed_folders = []
            if path.kind == "file":
                doomed_objects.append(path_str)
            else:
                prefix = path_str + "/"
                doomed_folders = [
                    f for f in self._folders[caller] if f == path_str or f.startswith(prefix)
                ]
                doomed_objects = [
                    o for o in self._objects[caller] if o.startswith(prefix)
                ]
            # Move to trash, then purge: nothing survives, not even in trash.
            for obj in doomed_objects:
                self._trash[caller][obj] = self._objects[caller].pop(obj)
            for obj in doomed_objects:
                del self._trash[caller][obj]
            for fol in doomed_folders:
                self._folders[caller].discard(fol)
            for target in doomed_objects + doomed_folders:
                self._acl.pop((caller, target), None)
            self._persist_delete(caller, path_str, doomed_objects, doomed_folders)
            self._persist_acl()

    def share_path(
        self, token: TokenLike, path: RemotePath, grantee: str, perm: Permission
    ) -> None:
        with self._op("share_path"):
            caller = self._require_token(token)
            path_str = str(path)
            if not self._exists(caller, path_str, path.kind):
                for owner in sorted(self._accounts):
                    if owner != caller and self._exists(owner, path_str, path.kind):
                        raise AccessDeniedError(
                            f"{self._config.id}: only the owner may share {path_str}"
                        )
                raise NotFoundError(f"{self._config.id}: no such path {path_str}")
            if path.kind == "file" and not self._config.supports_file_sharing:
                raise CapabilityError(
                    f"{self._config.id}: provider cannot share individual files"
                )
            if grantee not in self._accounts:
                raise NotFoundError(f"{self._config.id}: no account {grantee!r}")
            if grantee == caller:
                raise ConflictError(f"{self._config.id}: cannot share with the owner")
            self._acl.setdefault((caller, path_str), {})[grantee] = perm
            self._persist_acl()

    def unshare_path(self, token: TokenLike, path: RemotePath, grantee: str) -> None:
        with self._op("unshare_path"):
            caller = self._require_token(token)
            path_str = str(path)
            grants = self._acl.get((caller, path_str))
            if grants is None or grantee not in grants:
                raise NotFoundError(
                    f"{self._config.id}: no grant on {path_str} for {grantee!r}"
                )
            del grants[grantee]
            if not grants:
                del self._acl[(caller, path_str)]
            self._persist_acl()

    def list_entries(self, token: TokenLike) -> list[EntryMeta]:
        with self._op("list_entries"):
            caller = self._require_token(token)
            owned: list[EntryMeta] = []
            for path_str in self._folders.get(caller, set()):
                owned.append(
                    EntryMeta(path=RemotePath.folder(path_str), owner=caller, size=0)
                )
            for path_str, data in self._objects.get(caller, {}).items():
                owned.append(
                    EntryMeta(path=RemotePath.file(path_str), owner=caller, size=len(data))
                )
            shared: list[EntryMeta] = []
            for (owner, path_str), grants in self._acl.items():
                if caller not in grants:
                    continue
                if path_str in self._folders.get(owner, set()):
                    shared.append(
                        EntryMeta(
                            path=RemotePath.folder(path_str),
                            owner=owner,
                            size=0,
                            shared_from=owner,
                        )
                    )
                elif path_str in self._objects.get(owner, {}):
                    shared.append(
                        EntryMeta(
                            path=RemotePath.file(path_str),
                            owner=owner,
                            size=len(self._objects[owner][path_str]),
                            shared_from=owner,
                        )
                    )
            owned.sort(key=lambda e: str(e.path))
            shared.sort(key=lambda e: (str(e.path), e.owner))
            return owned + shared

    # -- mock-admin hooks (not part of the provider interface) -----------

    def dump_store(self) -> ProviderStore:
        with self._lock:
            return ProviderStore(
                accounts=dict(self._accounts),
                objects={o: dict(objs) for o, objs in self._objects.items()},
                folders={o: set(fs) for o, fs in self._folders.items()},
                acl={k: dict(v) for k, v in self._acl.items()},
                trash={o: dict(objs) for o, objs in self._trash.items()},
            )

    def patch_object_bytes(self, owner: str, path_str: str, data: bytes) -> None:
        """Admin backdoor: silently replace stored bytes (corruption tests)."""
        with self._lock:
            if path_str not in self._objects.get(owner, {}):
                raise NotFoundError(f"{self._config.id}: no such object {path_str}")
            self._objects[owner][path_str] = bytes(data)
            self._persist_object_write(owner, path_str)

    def purge_account(self, username: str) -> None:
        """Admin removal of an account and every byte tied to it."""
        with self._lock:
            if username not in self._accounts:
                raise NotFoundError(f"{self._config.id}: no account {username!r}")
            del self._accounts[username]
            self._objects.pop(username, None)
            self._folders.pop(username, None)
            self._trash.pop(username, None)
            self._acl = {
                k: {g: p for g, p in grants.items() if g != username}
                for k, grants in self._acl.items()
                if k[0] != username
            }
            self._acl = {k: v for k, v in self._acl.items() if v}
            self._codes = {c: e for c, e in self._codes.items() if e[0] != username}
            self._tokens = {t: u for t, u in self._tokens.items() if u != username}
            self._persist_accounts()
            self._persist_acl()
            self._persist_tokens()
            self._persist_account_purged(username)

    def external_move_to_trash(self, owner: str, path_str: str) -> None:
        """Model an out-of-band delete that leaves the bytes in trash."""
        with self._lock:
            data = self._objects.get(owner, {}).pop(path_str, None)
            if data is None:
                raise NotFoundError(f"{self._config.id}: no such object {path_str}")
            self._trash[owner][path_str] = data
            self._persist_external_trash(owner, path_str)

    # -- persistence hooks; in-memory does nothing -----------------------

    def _persist_accounts(self) -> None: ...
    def _persist_account_created(self, username: str) -> None: ...
    def _persist_account_purged(self, username: str) -> None: ...
    def _persist_tokens(self) -> None: ...
    def _persist_acl(self) -> None: ...
    def _persist_object_write(self, owner: str, path_str: str) -> None: ...
    def _persist_folder_create(self, owner: str, path_str: str) -> None: ...
    def _persist_external_trash(self, owner: str, path_str: str) -> None: ...

    def _persist_delete(
        self, owner: str, path_str: str, objects: list[str], folders: list[str]
    ) -> None: ...


class DiskProvider(MemoryProvider):
    """Write-through provider whose whole state lives under persistence_root."""

    def __init__(
        self,
        config: ProviderConfig,
        *,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        if config.persistence_root is None:
            raise ValueError("DiskProvider requires persistence_root")
        super().__init__(config, clock=clock)
        self._root = Path(config.persistence_root)
        self._data_dir = self._root / "data"
        self._trash_dir = self._root / "trash"
        self._data_dir.mkdir(parents=True, exist_ok=True)
        self._trash_dir.mkdir(parents=True, exist_ok=True)
        self._load()

    # -- loading ---------------------------------------------------------

    def _load(self) -> None:
        accounts_file = self._root / "accounts.tsv"
        if accounts_file.exists():
            for line in accounts_file.read_text("utf-8").splitlines():
                if not line:
                    continue
                username, password = line.split("\t")
                self._accounts[username] = password
                self._objects.setdefault(username, {})
                self._folders.setdefault(username, set())
                self._trash.setdefault(username, {})
        for base, table in ((self._data_dir, self._objects), (self._trash_dir, self._trash)):
            for owner_dir in sorted(p for p in base.iterdir() if p.is_dir()):
                owner = owner_dir.name
                table.setdefault(owner, {})
                for item in sorted(owner_dir.rglob("*")):
                    rel = "/".join(item.relative_to(owner_dir).parts)
                    if item.is_dir():
                        if base is self._data_dir:
                            self._folders.setdefault(owner, set()).add(rel)
                    else:
                        table[owner][rel] = item.read_bytes()
        acl_file = self._root / "acl.tsv"
        if acl_file.exists():
            for line in acl_file.read_text("utf-8").splitlines():
                if not line:
                    continue
                path_str, owner, grantee, perm = line.split("\t")
                self._acl.setdefault((owner, path_str), {})[grantee] = Permission(perm)
        tokens_file = self._root / "tokens.tsv"
        if tokens_file.exists():
            for line in tokens_file.read_text("utf-8").splitlines():
                if not line:
                    continue
                opaque, username = line.split("\t")
                self._tokens[opaque] = username

    # -- write-through ----------------------------------------------------

    @staticmethod
    def _write_text(path: Path, lines: list[str]) -> None:
        path.write_text("".join(f"{line}\n" for line in lines), "utf-8")

    def _persist_accounts(self) -> None:
        self._write_text(
            self._root / "accounts.tsv",
            [f"{u}\t{p}" for u, p in sorted(self._accounts.items())],
        )

    def _persist_account_created(self, username: str) -> None:
        (self._data_dir / username).mkdir(exist_ok=True)
        (self._trash_dir / username).mkdir(exist_ok=True)

    def _persist_account_purged(self, username: str) -> None:
        shutil.rmtree(self._data_dir / username, ignore_errors=True)
        shutil.rmtree(self._trash_dir / username, ignore_errors=True)

    def _persist_tokens(self) -> None:
        self._write_text(
            self._root / "tokens.tsv",
            [f"{t}\t{u}" for t, u in sorted(self._tokens.items())],
        )

    def _persist_acl(self) -> None:
        rows = [
            (path_str, owner, grantee, perm.value)
            for (owner, path_str), grants in self._acl.items()
            for grantee, perm in grants.items()
        ]
        self._write_text(
            self._root / "acl.tsv", ["\t".join(r) for r in sorted(rows)]
        )

    def _object_file(self, owner: str, path_str: str) -> Path:
        return self._data_dir.joinpath(owner, *path_str.split("/"))

    def _persist_object_write(self, owner: str, path_str: str) -> None:
        target = self._object_file(owner, path_str)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(self._objects[owner][path_str])

    def _persist_folder_create(self, owner: str, path_str: str) -> None:
        self._object_file(owner, path_str).mkdir(parents=True, exist_ok=True)

    def _persist_delete(
        self, owner: str, path_str: str, objects: list[str], folders: list[str]
    ) -> None:
        for obj in objects:
            self._object_file(owner, obj).unlink(missing_ok=True)
            trash_copy = self._trash_dir.joinpath(owner, *obj.split("/"))
            trash_copy.unlink(missing_ok=True)
        target = self._object_file(owner, path_str)
        if target.is_dir():
            shutil.rmtree(target, ignore_errors=True)

    def _persist_external_trash(self, owner: str, path_str: str) -> None:
        src = self._object_file(owner, path_str)
        dst = self._trash_dir.joinpath(owner, *path_str.split("/"))
        dst.parent.mkdir(parents=True, exist_ok=True)
        dst.write_bytes(self._trash[owner][path_str])
        src.unlink(missing_ok=True)


def build_provider(
    config: ProviderConfig, *, clock: Callable[[], float] = time.monotonic
) -> MemoryProvider:
    """Factory: disk-backed when the config names a persistence root."""
    if config.persistence_root is not None:
        return DiskProvider(config, clock=clock)
    return MemoryProvider(config, clock=clock)
