"""Command-line client.

One subcommand per user-level operation:

    twincloud signup <username>        create accounts on all placed providers
    twincloud login <username>         obtain (or refresh) access tokens
    twincloud up <local-path> [--force]
    twincloud down <name> [--dest <dir>]
    twincloud ls
    twincloud rm <name>
    twincloud share <name> <user> [--edit]
    twincloud unshare <name> <user>
    twincloud sync [--dest <dir>]

Results go to standard output, one record per line; anything meant for a
human goes to standard error.  The password is read from $TWINCLOUD_PASSWORD
when set, otherwise from a no-echo prompt.  Exit codes: 0 success, 1 user
error, 2 authentication, 3 integrity, 4 configuration.
"""

from __future__ import annotations

import argparse
import getpass
import os
import sys
from pathlib import Path
from typing import Optional

from .config import CliConfig, load_config
from .errors import (
    AuthError,
    ConfigError,
    FormatError,
    IntegrityError,
    TwinCloudError,
)
from .gateway import Gateway
from .provider import Permission, build_provider

ENV_PASSWORD = "TWINCLOUD_PASSWORD"

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_AUTH = 2
EXIT_INTEGRITY = 3
EXIT_CONFIG = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twincloud",
        description="Encrypted storage across non-colluding cloud providers.",
    )
    parser.add_argument(
        "--config", type=Path, default=None, help="path to the configuration file"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("signup", help="create accounts on all placed providers")
    p.add_argument("username")
    p = sub.add_parser("login", help="log in and cache access tokens")
    p.add_argument("username")

    p = sub.add_parser("up", help="encrypt and upload a local file")
    p.add_argument("local_path", type=Path)
    p.add_argument("--force", action="store_true", help="overwrite an existing entry")

    p = sub.add_parser("down", help="download and decrypt one file")
    p.add_argument("name")
    p.add_argument("--dest", type=Path, default=None, help="destination directory")

    sub.add_parser("ls", help="list files, owned and shared")

    p = sub.add_parser("rm", help="delete a file from every provider")
    p.add_argument("name")

    p = sub.add_parser("share", help="grant another user access to a file")
    p.add_argument("name")
    p.add_argument("user")
    p.add_argument("--edit", action="store_true", help="grant edit instead of read")

    p = sub.add_parser("unshare", help="revoke a user's access to a file")
    p.add_argument("name")
    p.add_argument("user")

    p = sub.add_parser("sync", help="download every listed file")
    p.add_argument("--dest", type=Path, default=None, help="destination directory")
    return parser


def _read_password() -> str:
    password = os.environ.get(ENV_PASSWORD)
    if password:
        return password
    return getpass.getpass("password: ")


def _make_gateway(config: CliConfig) -> Gateway:
    providers = [build_provider(pc) for pc in config.providers]
    return Gateway(
        providers,
        config.placement,
        staging_dir=config.staging_dir,
        token_cache=config.token_cache,
    )


def _dispatch(args: argparse.Namespace, config: CliConfig) -> int:
    gateway = _make_gateway(config)

    if args.command == "signup":
        gateway.signup(args.username, _read_password())
        print(f"signed up {args.username}", file=sys.stderr)
        return EXIT_OK
    if args.command == "login":
        try:
            gateway.login(args.username, None)  # warm cache needs no password
        except AuthError:
            gateway.login(args.username, _read_password())
        print(f"logged in as {args.username}", file=sys.stderr)
        return EXIT_OK

    session = gateway.resume_session()

    if args.command == "up":
        entry = gateway.upload_file(session, args.local_path, overwrite=args.force)
        print(entry.logical_name)
    elif args.command == "down":
        dest_dir = args.dest if args.dest is not None else config.default_dest
        dest_dir.mkdir(parents=True, exist_ok=True)
        dest = dest_dir / args.name
        gateway.download_file(session, args.name, dest)
        print(dest)
    elif args.command == "ls":
        for entry in gateway.list_files(session):
            origin = "owned" if entry.owned else f"from:{entry.shared_from}"
            print(f"{entry.logical_name}\t{origin}")
    elif args.command == "rm":
        gateway.delete_file(session, args.name)
    elif args.command == "share":
        perm = Permission.EDIT if args.edit else Permission.READ
        gateway.share_file(session, args.name, args.user, perm)
    elif args.command == "unshare":
        gateway.unshare_file(session, args.name, args.user)
    elif args.command == "sync":
        dest_dir = args.dest if args.dest is not None else config.default_dest

        def report(name: str, exc: Exception) -> None:
            print(f"skipped {name}: {exc}", file=sys.stderr)

        written = gateway.sync_all(session, dest_dir, on_error=report)
        print(written)
    else:  # pragma: no cover - argparse enforces the command set
        raise AssertionError(args.command)
    return EXIT_OK


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, AuthError):
        return EXIT_AUTH
    if isinstance(exc, (IntegrityError, FormatError)):
        return EXIT_INTEGRITY
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    return EXIT_USER_ERROR


def run_command(argv: Optional[list[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would read as an auth
        # failure here; keep 0 for --help and fold the rest into user error
        return EXIT_OK if exc.code in (0, None) else EXIT_USER_ERROR
    try:
        config = load_config(args.config)
        return _dispatch(args, config)
    except (TwinCloudError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
