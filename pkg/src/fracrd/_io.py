"""Atomic file writing helpers.

All outputs in this package are written to a temporary file in the target
directory and then renamed into place, so a crashed or interrupted run
never leaves a half-written artifact behind.
"""

import os
import tempfile

__all__ = ["write_text_atomic", "write_bytes_atomic"]


def _atomic(path, data, mode):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_text_atomic(path, text):
    _atomic(path, text, "w")


def write_bytes_atomic(path, blob):
    _atomic(path, blob, "wb")
