"""Download and cache the small public datasets in the three-file format."""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
import urllib.request
import zipfile
from pathlib import Path

SUPPORTED = ("email-Enron", "email-Eu", "contact-high-school", "contact-primary-school",
             "NDC-classes")
DEFAULT_MIRROR = "https://www.cs.cornell.edu/~arb/data"
_KINDS = ("nverts", "simplices", "times")

# SHA-256 of each archive; empty entries are pinned on first download
KNOWN_HASHES: dict[str, str] = {name: "" for name in SUPPORTED}


class FetchError(RuntimeError):
    pass


class UnknownDatasetError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown dataset {name!r}; supported: {', '.join(SUPPORTED)}")


def cache_dir() -> Path:
    root = os.environ.get("HOSIM_CACHE") or os.path.join(Path.home(), ".cache", "hosim")
    return Path(root)


def dataset_prefix(name: str, root: Path | None = None) -> Path:
    """Prefix such that ``<prefix>-nverts.txt`` etc. are the dataset files."""
    return (root or cache_dir()) / name / name


def is_cached(name: str, root: Path | None = None) -> bool:
    prefix = dataset_prefix(name, root)
    return all(Path(f"{prefix}-{k}.txt").exists() for k in _KINDS)


def _hash_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _recorded(root: Path) -> dict[str, str]:
    path = root / "hashes.json"
    if path.exists():
        return json.loads(path.read_text())
    return {}


def _record(root: Path, name: str, digest: str) -> None:
    hashes = _recorded(root)
    hashes[name] = digest
    tmp = root / "hashes.json.tmp"
    tmp.write_text(json.dumps(hashes, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, root / "hashes.json")


def _download(url: str, dest: Path, timeout: float) -> None:
    with urllib.request.urlopen(url, timeout=timeout) as resp, open(dest, "wb") as fh:
        shutil.copyfileobj(resp, fh)


def _extract(archive: Path, name: str, target: Path) -> None:
    with zipfile.ZipFile(archive) as zf:
        members = {Path(m).name: m for m in zf.namelist()}
        for kind in _KINDS:
            fname = f"{name}-{kind}.txt"
            if fname not in members:
                raise FetchError(f"archive for {name} lacks {fname}")
            with zf.open(members[fname]) as src, open(target / fname, "wb") as dst:
                shutil.copyfileobj(src, dst)


def fetch_dataset(name: str, root: Path | None = None, mirror: str | None = None,
                  expected_sha256: str | None = None, timeout: float = 60.0) -> Path:
    """Return the cached prefix for ``name``, downloading it if needed.

    The archive hash is checked against ``expected_sha256``, then the
    built-in table, then the hash recorded at first download.  Files are
    staged in a temporary directory and moved into place only after
    verification, so a mismatch leaves nothing behind.
    """
    if name not in SUPPORTED:
        raise UnknownDatasetError(name)
    root = Path(root) if root is not None else cache_dir()
    if is_cached(name, root):
        return dataset_prefix(name, root)
    root.mkdir(parents=True, exist_ok=True)
    base = (mirror or os.environ.get("HOSIM_MIRROR") or DEFAULT_MIRROR).rstrip("/")
    url = f"{base}/{name}/{name}.zip"
    expected = expected_sha256 or KNOWN_HASHES.get(name) or _recorded(root).get(name)

    with tempfile.TemporaryDirectory(dir=root, prefix=f".{name}-") as tmp:
        tmp = Path(tmp)
        archive = tmp / f"{name}.zip"
        try:
            _download(url, archive, timeout)
        except OSError as exc:
            raise FetchError(f"download of {url} failed: {exc}") from exc
        digest = _hash_file(archive)
        if expected and digest != expected:
            raise FetchError(f"hash mismatch for {name}: got {digest}, expected {expected}")
        staged = tmp / name
        staged.mkdir()
        try:
            _extract(archive, name, staged)
        except zipfile.BadZipFile as exc:
            raise FetchError(f"{url} is not a zip archive") from exc
        final = root / name
        if final.exists():
            shutil.rmtree(final)
        os.replace(staged, final)
    if not expected:
        _record(root, name, digest)
    return dataset_prefix(name, root)
