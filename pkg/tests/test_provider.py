"""Behavioral tests for the mock providers.

The same laws are checked against the in-memory and on-disk implementations;
a scripted operation sequence then pins observational equivalence between
the two, and the on-disk layout is verified byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from twincloud.errors import (
    AccessDeniedError,
    AuthError,
    CapabilityError,
    ConflictError,
    NotFoundError,
    PolicyError,
)
from twincloud.provider import (
    AccessToken,
    DiskProvider,
    MemoryProvider,
    Permission,
    ProviderConfig,
    RemotePath,
    build_provider,
)

USERS = ("alice", "bob", "carol")


def password_for(user: str) -> str:
    return f"pw-for-{user}"


def make_world(tmp_path=None, *, file_sharing=True, clock=None):
    cfg = ProviderConfig(
        id="p1",
        url="https://p1.example",
        supports_file_sharing=file_sharing,
        persistence_root=tmp_path,
    )
    kwargs = {"clock": clock} if clock else {}
    provider = build_provider(cfg, **kwargs)
    tokens = {}
    for user in USERS:
        provider.create_account(user, password_for(user))
        tokens[user] = provider.exchange_code(provider.authenticate(user, password_for(user)))
    return provider, tokens


@pytest.fixture(params=["memory", "disk"])
def world(request, tmp_path):
    root = tmp_path / "store" if request.param == "disk" else None
    return make_world(root)


# ---------------------------------------------------------------------------
# Accounts and auth
# ---------------------------------------------------------------------------

def test_account_create_and_login_roundtrip(world):
    provider, _ = world
    provider.create_account("dave", "longenough")
    code = provider.authenticate("dave", "longenough")
    token = provider.exchange_code(code)
    assert token.username == "dave"
    assert provider.list_entries(token) == []


def test_account_conflicts_and_policy(world):
    provider, _ = world
    with pytest.raises(ConflictError):
        provider.create_account("alice", "whatever-pw")
    with pytest.raises(PolicyError):
        provider.create_account("eve", "short7!")
    for bad in ("", ".", "..", "a/b", "a\tb", "x" * 129):
        with pytest.raises(PolicyError):
            provider.create_account(bad, "longenough")


def test_authenticate_failures(world):
    provider, _ = world
    with pytest.raises(AuthError):
        provider.authenticate("alice", "wrong-password")
    with pytest.raises(AuthError):
        provider.authenticate("nobody", password_for("alice"))


def test_auth_codes_are_fresh_and_single_use(world):
    provider, _ = world
    c1 = provider.authenticate("alice", password_for("alice"))
    c2 = provider.authenticate("alice", password_for("alice"))
    assert c1.opaque != c2.opaque
    token = provider.exchange_code(c1)
    assert token.username == "alice"
    with pytest.raises(AuthError):
        provider.exchange_code(c1)
    with pytest.raises(AuthError):
        provider.exchange_code("forged-code-string")


def test_auth_code_expiry_uses_monotonic_clock():
    now = [100.0]
    provider, _ = make_world(clock=lambda: now[0])
    code = provider.authenticate("alice", password_for("alice"))
    now[0] = 159.9  # still inside the 60 second window
    provider.exchange_code(code)
    code2 = provider.authenticate("alice", password_for("alice"))
    now[0] = 159.9 + 60.1  # past the window for the second code
    with pytest.raises(AuthError):
        provider.exchange_code(code2)


def test_token_law_invalid_tokens_change_nothing(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("a.bin"), b"payload")
    before = provider.dump_store()
    forged = [
        "no-such-token",
        AccessToken(opaque="made-up", username="alice"),
        AccessToken(opaque=tokens["alice"].opaque, username="bob"),
    ]
    ops = [
        lambda t: provider.upload_object(t, RemotePath.file("b.bin"), b"x"),
        lambda t: provider.download_object(t, RemotePath.file("a.bin")),
        lambda t: provider.create_folder(t, RemotePath.folder("F")),
        lambda t: provider.delete_path(t, RemotePath.file("a.bin")),
        lambda t: provider.share_path(t, RemotePath.file("a.bin"), "bob", Permission.READ),
        lambda t: provider.unshare_path(t, RemotePath.file("a.bin"), "bob"),
        lambda t: provider.list_entries(t),
    ]
    for token in forged:
        for op in ops:
            with pytest.raises(AuthError):
                op(token)
    assert provider.dump_store() == before


# ---------------------------------------------------------------------------
# Objects and folders
# ---------------------------------------------------------------------------

def test_upload_download_roundtrip_and_listing(world):
    provider, tokens = world
    data = b"\x00\x01\x02" * 100
    meta = provider.upload_object(tokens["alice"], RemotePath.file("doc.bin"), data)
    assert meta.owner == "alice"
    assert meta.size == 300
    assert provider.download_object(tokens["alice"], RemotePath.file("doc.bin")) == data
    entries = provider.list_entries(tokens["alice"])
    assert len(entries) == 1
    assert str(entries[0].path) == "doc.bin"
    assert entries[0].shared_from is None


def test_upload_conflict_and_overwrite(world):
    provider, tokens = world
    path = RemotePath.file("doc.bin")
    provider.upload_object(tokens["alice"], path, b"one")
    with pytest.raises(ConflictError):
        provider.upload_object(tokens["alice"], path, b"two")
    provider.upload_object(tokens["alice"], path, b"two", overwrite=True)
    assert provider.download_object(tokens["alice"], path) == b"two"


def test_upload_requires_parent_folder(world):
    provider, tokens = world
    with pytest.raises(NotFoundError):
        provider.upload_object(tokens["alice"], RemotePath.file("F/doc.bin"), b"x")
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/doc.bin"), b"x")
    assert provider.download_object(tokens["alice"], RemotePath.file("F/doc.bin")) == b"x"


def test_folder_conflicts(world):
    provider, tokens = world
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    with pytest.raises(ConflictError):
        provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    with pytest.raises(ConflictError):
        provider.upload_object(tokens["alice"], RemotePath.file("F"), b"x")


def test_download_absent_vs_foreign(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("private.bin"), b"secret")
    with pytest.raises(NotFoundError):
        provider.download_object(tokens["bob"], RemotePath.file("missing.bin"))
    with pytest.raises(AccessDeniedError):
        provider.download_object(tokens["bob"], RemotePath.file("private.bin"))


def test_own_copy_wins_over_grant(world):
    provider, tokens = world
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/x"), b"alice-bytes")
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.READ)
    provider.create_folder(tokens["bob"], RemotePath.folder("F"))
    provider.upload_object(tokens["bob"], RemotePath.file("F/x"), b"bob-bytes")
    assert provider.download_object(tokens["bob"], RemotePath.file("F/x")) == b"bob-bytes"


# ---------------------------------------------------------------------------
# Delete and purge
# ---------------------------------------------------------------------------

def test_delete_then_download_not_found(world):
    provider, tokens = world
    path = RemotePath.file("gone.bin")
    provider.upload_object(tokens["alice"], path, b"data")
    provider.delete_path(tokens["alice"], path)
    with pytest.raises(NotFoundError):
        provider.download_object(tokens["alice"], path)


def test_delete_purges_every_byte(world):
    provider, tokens = world
    marker = b"UNMISTAKABLE-MARKER-BYTES-0xDEADBEEF"
    path = RemotePath.file("purge-me.bin")
    provider.upload_object(tokens["alice"], path, marker)
    provider.delete_path(tokens["alice"], path)
    dump = provider.dump_store()
    for label, blob in dump.all_recorded_bytes():
        assert marker not in blob, label
        assert b"purge-me.bin" not in blob, label
    assert dump.trash == {u: {} for u in dump.trash}


def test_external_trash_keeps_bytes_until_purged(world):
    provider, tokens = world
    marker = b"LINGERS-IN-TRASH"
    provider.upload_object(tokens["alice"], RemotePath.file("t.bin"), marker)
    provider.external_move_to_trash("alice", "t.bin")
    dump = provider.dump_store()
    assert dump.trash["alice"]["t.bin"] == marker
    assert "t.bin" not in dump.objects["alice"]


def test_folder_delete_removes_children_and_grants(world):
    provider, tokens = world
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/x"), b"child")
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.READ)
    provider.delete_path(tokens["alice"], RemotePath.folder("F"))
    with pytest.raises(NotFoundError):
        provider.download_object(tokens["alice"], RemotePath.file("F/x"))
    assert provider.list_entries(tokens["bob"]) == []
    dump = provider.dump_store()
    assert dump.acl == {}
    for label, blob in dump.all_recorded_bytes():
        assert b"child" not in blob, label


def test_grantee_cannot_delete(world):
    provider, tokens = world
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/x"), b"x")
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.EDIT)
    with pytest.raises(AccessDeniedError):
        provider.delete_path(tokens["bob"], RemotePath.file("F/x"))
    with pytest.raises(AccessDeniedError):
        provider.delete_path(tokens["bob"], RemotePath.folder("F"))


# ---------------------------------------------------------------------------
# Sharing
# ---------------------------------------------------------------------------

def test_share_folder_and_inheritance(world):
    provider, tokens = world
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/old.bin"), b"old")
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.READ)
    assert provider.download_object(tokens["bob"], RemotePath.file("F/old.bin")) == b"old"
    # future children inherit the grant
    provider.upload_object(tokens["alice"], RemotePath.file("F/new.bin"), b"new")
    assert provider.download_object(tokens["bob"], RemotePath.file("F/new.bin")) == b"new"


def test_share_file_capability_flag(tmp_path):
    sharing, tokens = make_world()
    sharing.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"x")
    sharing.share_path(tokens["alice"], RemotePath.file("f.bin"), "bob", Permission.READ)
    assert sharing.download_object(tokens["bob"], RemotePath.file("f.bin")) == b"x"

    folders_only, tokens2 = make_world(file_sharing=False)
    folders_only.upload_object(tokens2["alice"], RemotePath.file("f.bin"), b"x")
    with pytest.raises(CapabilityError):
        folders_only.share_path(
            tokens2["alice"], RemotePath.file("f.bin"), "bob", Permission.READ
        )
    folders_only.create_folder(tokens2["alice"], RemotePath.folder("F"))
    folders_only.share_path(
        tokens2["alice"], RemotePath.folder("F"), "bob", Permission.READ
    )


def test_share_error_cases(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"x")
    with pytest.raises(NotFoundError):
        provider.share_path(tokens["alice"], RemotePath.file("nope"), "bob", Permission.READ)
    with pytest.raises(NotFoundError):
        provider.share_path(tokens["alice"], RemotePath.file("f.bin"), "nobody", Permission.READ)
    with pytest.raises(ConflictError):
        provider.share_path(tokens["alice"], RemotePath.file("f.bin"), "alice", Permission.READ)
    with pytest.raises(AccessDeniedError):
        provider.share_path(tokens["bob"], RemotePath.file("f.bin"), "carol", Permission.READ)


def test_share_to_two_grantees(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"x")
    provider.share_path(tokens["alice"], RemotePath.file("f.bin"), "bob", Permission.READ)
    provider.share_path(tokens["alice"], RemotePath.file("f.bin"), "carol", Permission.READ)
    assert provider.download_object(tokens["bob"], RemotePath.file("f.bin")) == b"x"
    assert provider.download_object(tokens["carol"], RemotePath.file("f.bin")) == b"x"
    listing = provider.list_entries(tokens["bob"])
    assert [e.shared_from for e in listing] == ["alice"]


def test_unshare_revokes_and_leaves_others(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"x")
    provider.share_path(tokens["alice"], RemotePath.file("f.bin"), "bob", Permission.READ)
    provider.share_path(tokens["alice"], RemotePath.file("f.bin"), "carol", Permission.EDIT)
    provider.unshare_path(tokens["alice"], RemotePath.file("f.bin"), "bob")
    with pytest.raises(AccessDeniedError):
        provider.download_object(tokens["bob"], RemotePath.file("f.bin"))
    assert provider.list_entries(tokens["bob"]) == []
    assert provider.download_object(tokens["carol"], RemotePath.file("f.bin")) == b"x"
    with pytest.raises(NotFoundError):
        provider.unshare_path(tokens["alice"], RemotePath.file("f.bin"), "bob")


def test_two_grantee_share_state_machine(world):
    # Exhaustive check of grant/revoke interleavings for two grantees
    # against a dict model of the ACL.
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"x")
    path = RemotePath.file("f.bin")
    model: dict[str, Permission] = {}
    script = [
        ("share", "bob", Permission.READ),
        ("share", "carol", Permission.READ),
        ("unshare", "bob", None),
        ("share", "bob", Permission.EDIT),
        ("unshare", "carol", None),
        ("unshare", "carol", None),
        ("share", "carol", Permission.EDIT),
        ("share", "bob", Permission.READ),
        ("unshare", "bob", None),
        ("unshare", "carol", None),
    ]
    for action, grantee, perm in script:
        if action == "share":
            provider.share_path(tokens["alice"], path, grantee, perm)
            model[grantee] = perm
        else:
            if grantee in model:
                provider.unshare_path(tokens["alice"], path, grantee)
                del model[grantee]
            else:
                with pytest.raises(NotFoundError):
                    provider.unshare_path(tokens["alice"], path, grantee)
        for user in ("bob", "carol"):
            if user in model:
                assert provider.download_object(tokens[user], path) == b"x"
            else:
                with pytest.raises(AccessDeniedError):
                    provider.download_object(tokens[user], path)


def test_read_grant_cannot_write_edit_can(world):
    provider, tokens = world
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/x"), b"v1")
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.READ)
    with pytest.raises(AccessDeniedError):
        provider.upload_object(tokens["bob"], RemotePath.file("F/y"), b"new")
    with pytest.raises(AccessDeniedError):
        provider.upload_object(tokens["bob"], RemotePath.file("F/x"), b"v2", overwrite=True)
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.EDIT)
    provider.upload_object(tokens["bob"], RemotePath.file("F/x"), b"v2", overwrite=True)
    assert provider.download_object(tokens["alice"], RemotePath.file("F/x")) == b"v2"
    meta = provider.upload_object(tokens["bob"], RemotePath.file("F/y"), b"new")
    assert meta.owner == "alice"  # lands in the folder owner's space


def test_listing_order_owned_before_shared(world):
    provider, tokens = world
    provider.upload_object(tokens["bob"], RemotePath.file("zzz.bin"), b"z")
    provider.upload_object(tokens["alice"], RemotePath.file("aaa.bin"), b"a")
    provider.share_path(tokens["alice"], RemotePath.file("aaa.bin"), "bob", Permission.READ)
    listing = provider.list_entries(tokens["bob"])
    assert [(str(e.path), e.shared_from) for e in listing] == [
        ("zzz.bin", None),
        ("aaa.bin", "alice"),
    ]


# ---------------------------------------------------------------------------
# Access law, exhaustively on a small world
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "grant,expect_read,expect_write",
    [
        (None, AccessDeniedError, AccessDeniedError),
        (Permission.READ, None, AccessDeniedError),
        (Permission.EDIT, None, None),
    ],
)
def test_access_law_matrix(world, grant, expect_read, expect_write):
    provider, tokens = world
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/x"), b"data")
    if grant is not None:
        provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", grant)

    if expect_read is None:
        assert provider.download_object(tokens["bob"], RemotePath.file("F/x")) == b"data"
    else:
        with pytest.raises(expect_read):
            provider.download_object(tokens["bob"], RemotePath.file("F/x"))

    if expect_write is None:
        provider.upload_object(tokens["bob"], RemotePath.file("F/new"), b"n")
    else:
        with pytest.raises(expect_write):
            provider.upload_object(tokens["bob"], RemotePath.file("F/new"), b"n")

    # carol has no grant in any scenario
    with pytest.raises(AccessDeniedError):
        provider.download_object(tokens["carol"], RemotePath.file("F/x"))
    # owner always reads own data
    assert provider.download_object(tokens["alice"], RemotePath.file("F/x")) == b"data"


# ---------------------------------------------------------------------------
# Mock-admin hooks
# ---------------------------------------------------------------------------

def test_dump_store_is_a_deep_snapshot(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"original")
    dump = provider.dump_store()
    dump.objects["alice"]["f.bin"] = b"tampered"
    dump.accounts["mallory"] = "pw"
    assert provider.download_object(tokens["alice"], RemotePath.file("f.bin")) == b"original"
    assert "mallory" not in provider.dump_store().accounts


def test_patch_object_bytes_backdoor(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"AAAA")
    provider.patch_object_bytes("alice", "f.bin", b"BBBB")
    assert provider.download_object(tokens["alice"], RemotePath.file("f.bin")) == b"BBBB"
    with pytest.raises(NotFoundError):
        provider.patch_object_bytes("alice", "nope.bin", b"x")


def test_purge_account_removes_all_traces(world):
    provider, tokens = world
    provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"mine")
    provider.share_path(tokens["alice"], RemotePath.file("f.bin"), "bob", Permission.READ)
    provider.purge_account("alice")
    dump = provider.dump_store()
    assert "alice" not in dump.accounts
    assert "alice" not in dump.objects
    assert dump.acl == {}
    with pytest.raises(AuthError):
        provider.list_entries(tokens["alice"])
    with pytest.raises(AuthError):
        provider.authenticate("alice", password_for("alice"))


def test_fault_hook_aborts_before_mutation(world):
    provider, tokens = world

    def explode(op):
        if op == "upload_object":
            raise RuntimeError("injected")

    before = provider.dump_store()
    provider.fault_hook = explode
    with pytest.raises(RuntimeError):
        provider.upload_object(tokens["alice"], RemotePath.file("f.bin"), b"x")
    provider.fault_hook = None
    assert provider.dump_store() == before
    assert provider.op_counts["upload_object"] == 1


# ---------------------------------------------------------------------------
# Disk persistence
# ---------------------------------------------------------------------------

def test_disk_layout_is_bit_exact(tmp_path):
    root = tmp_path / "store"
    provider, tokens = make_world(root)
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/x.bin"), b"\x01\x02\x03")
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.READ)
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "carol", Permission.EDIT)

    accounts = (root / "accounts.tsv").read_bytes()
    expected = "".join(
        f"{u}\t{password_for(u)}\n" for u in sorted(USERS)
    ).encode("utf-8")
    assert accounts == expected

    acl = (root / "acl.tsv").read_bytes()
    assert acl == b"F\talice\tbob\tR\nF\talice\tcarol\tE\n"

    assert (root / "data" / "alice" / "F" / "x.bin").read_bytes() == b"\x01\x02\x03"
    assert (root / "data" / "alice" / "F").is_dir()
    assert (root / "trash").is_dir()

    provider.delete_path(tokens["alice"], RemotePath.folder("F"))
    assert not (root / "data" / "alice" / "F").exists()
    assert (root / "acl.tsv").read_bytes() == b""


def test_disk_state_survives_reload(tmp_path):
    root = tmp_path / "store"
    provider, tokens = make_world(root)
    provider.create_folder(tokens["alice"], RemotePath.folder("F"))
    provider.upload_object(tokens["alice"], RemotePath.file("F/x.bin"), b"persist-me")
    provider.share_path(tokens["alice"], RemotePath.folder("F"), "bob", Permission.READ)
    dump_before = provider.dump_store()

    cfg = ProviderConfig(
        id="p1", url="https://p1.example", persistence_root=root
    )
    reloaded = DiskProvider(cfg)
    assert reloaded.dump_store() == dump_before
    # tokens issued by the first process still work in the second
    assert reloaded.download_object(tokens["alice"], RemotePath.file("F/x.bin")) == b"persist-me"
    assert reloaded.download_object(tokens["bob"], RemotePath.file("F/x.bin")) == b"persist-me"


# ---------------------------------------------------------------------------
# Observational equivalence of the two mocks
# ---------------------------------------------------------------------------

SCRIPT = [
    ("create_folder", "alice", "F"),
    ("upload", "alice", "F/x.bin", b"v1", False),
    ("upload", "alice", "F/x.bin", b"v1", False),  # conflict
    ("upload", "alice", "F/x.bin", b"v2", True),
    ("share_folder", "alice", "F", "bob", Permission.READ),
    ("download", "bob", "F/x.bin"),
    ("upload", "bob", "F/y.bin", b"denied", False),  # read-only grant
    ("share_folder", "alice", "F", "bob", Permission.EDIT),
    ("upload", "bob", "F/y.bin", b"allowed", False),
    ("download", "alice", "F/y.bin"),
    ("list", "bob"),
    ("unshare_folder", "alice", "F", "bob"),
    ("download", "bob", "F/x.bin"),  # revoked
    ("upload", "carol", "solo.bin", b"carol-data", False),
    ("delete", "carol", "solo.bin", "file"),
    ("download", "carol", "solo.bin"),  # gone
    ("list", "alice"),
    ("delete", "alice", "F", "folder"),
    ("list", "alice"),
]


def run_script(provider, tokens):
    def normalize(value):
        if isinstance(value, bytes):
            return value
        if isinstance(value, list):
            return [
                (str(e.path), e.path.kind, e.owner, e.size, e.shared_from) for e in value
            ]
        if value is None:
            return None
        return (str(value.path), value.owner, value.size)

    outcomes = []
    for step in SCRIPT:
        op, user, *args = step
        try:
            if op == "create_folder":
                result = provider.create_folder(tokens[user], RemotePath.folder(args[0]))
            elif op == "upload":
                path, data, overwrite = args
                result = provider.upload_object(
                    tokens[user], RemotePath.file(path), data, overwrite=overwrite
                )
            elif op == "download":
                result = provider.download_object(tokens[user], RemotePath.file(args[0]))
            elif op == "share_folder":
                path, grantee, perm = args
                result = provider.share_path(
                    tokens[user], RemotePath.folder(path), grantee, perm
                )
            elif op == "unshare_folder":
                path, grantee = args
                result = provider.unshare_path(tokens[user], RemotePath.folder(path), grantee)
            elif op == "delete":
                path, kind = args
                result = provider.delete_path(
                    tokens[user], RemotePath(tuple(path.split("/")), kind)
                )
            elif op == "list":
                result = provider.list_entries(tokens[user])
            else:
                raise AssertionError(op)
            outcomes.append(("ok", normalize(result)))
        except Exception as exc:  # noqa: BLE001 - equivalence check records the class
            outcomes.append(("err", type(exc).__name__))
    return outcomes


def test_memory_and_disk_mocks_are_observationally_equivalent(tmp_path):
    mem_provider, mem_tokens = make_world()
    disk_provider, disk_tokens = make_world(tmp_path / "store")
    mem_outcomes = run_script(mem_provider, mem_tokens)
    disk_outcomes = run_script(disk_provider, disk_tokens)
    assert mem_outcomes == disk_outcomes
    assert mem_provider.dump_store() == disk_provider.dump_store()
