"""Line reading helpers shared by the TSV loaders."""

from __future__ import annotations

import os
from contextlib import contextmanager
from typing import BinaryIO, Iterator, Union

Source = Union[str, "os.PathLike[str]", BinaryIO]


@contextmanager
def open_binary(source: Source) -> Iterator[BinaryIO]:
    """Yield a binary stream; paths are opened and closed here, streams are not."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            yield fh
    else:
        yield source


def strip_eol(line: bytes) -> bytes:
    if line.endswith(b"\n"):
        line = line[:-1]
    if line.endswith(b"\r"):
        line = line[:-1]
    return line


def iter_text_lines(source: Source) -> Iterator[tuple[int, str | None]]:
    """Yield ``(lineno, text)`` for each line; ``text`` is None if not valid UTF-8.

    Line endings (LF or CRLF) are removed, a leading BOM on the first line
    is dropped.
    """
    with open_binary(source) as fh:
        for lineno, line in enumerate(fh, 1):
            line = strip_eol(line)
            if lineno == 1 and line.startswith(b"\xef\xbb\xbf"):
                line = line[3:]
            try:
                yield lineno, line.decode("utf-8")
            except UnicodeDecodeError:
                yield lineno, None
