"""Content hashing for run manifests."""
import hashlib
from pathlib import Path


def git_blob_hash(path: Path) -> str:
    """
    Hash file content the way git hashes a blob object.

    Examples:
        An empty file hashes to e69de29bb2d1d6434b8b29ae775ad8c2e48c5391.
    """
    data = Path(path).read_bytes()
    digest = hashlib.sha1()
    digest.update(f"blob {len(data)}\0".encode("ascii"))
    digest.update(data)
    return digest.hexdigest()
