"""Append-only bulletin board: the protocol's only broadcast channel.

Posts are never mutated or deleted; corrections are fresh posts that readers
merge by sequence order.  Payloads are plain dicts of ints, strings and
lists; a deterministic byte encoding of the payload is what authentication
tags cover and what the JSON export emits (hex), so two runs with the same
seeds produce byte-identical transcripts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator


def canonical_bytes(obj) -> bytes:
    """Deterministic, self-delimiting encoding for payload trees.

    ints are minimal big-endian with a length prefix, strings are UTF-8,
    lists and dicts are length-prefixed sequences (dict keys sorted).
    """
    if obj is None:
        return b"n"
    if isinstance(obj, bool):
        return b"b1" if obj else b"b0"
    if isinstance(obj, int):
        if obj < 0:
            raise ValueError("payload ints must be non-negative")
        enc = obj.to_bytes((obj.bit_length() + 7) // 8 or 1, "big")
        return b"i" + len(enc).to_bytes(4, "big") + enc
    if isinstance(obj, str):
        enc = obj.encode("utf-8")
        return b"s" + len(enc).to_bytes(4, "big") + enc
    if isinstance(obj, (list, tuple)):
        parts = [b"l", len(obj).to_bytes(4, "big")]
        parts.extend(canonical_bytes(item) for item in obj)
        return b"".join(parts)
    if isinstance(obj, dict):
        parts = [b"d", len(obj).to_bytes(4, "big")]
        for key in sorted(obj):
            if not isinstance(key, str):
                raise ValueError("payload dict keys must be strings")
            parts.append(canonical_bytes(key))
            parts.append(canonical_bytes(obj[key]))
        return b"".join(parts)
    raise ValueError(f"unsupported payload type: {type(obj).__name__}")


@dataclass(frozen=True)
class Post:
    seq: int
    round: str
    author: str
    kind: str
    payload: dict
    auth: str | None = None

    def payload_bytes(self) -> bytes:
        return canonical_bytes(self.payload)


@dataclass
class BulletinBoard:
    posts: list[Post] = field(default_factory=list)

    def append(self, round: str, author: str, kind: str, payload: dict,
               auth: str | None = None) -> Post:
        post = Post(seq=len(self.posts), round=round, author=author,
                    kind=kind, payload=payload, auth=auth)
        self.posts.append(post)
        return post

    def select(self, round: str | None = None, kind: str | None = None,
               author: str | None = None) -> Iterator[Post]:
        for post in self.posts:
            if round is not None and post.round != round:
                continue
            if kind is not None and post.kind != kind:
                continue
            if author is not None and post.author != author:
                continue
            yield post

    def latest_by_author(self, round: str, kind: str) -> dict[str, Post]:
        """Last post per author for the given round and kind."""
        out: dict[str, Post] = {}
        for post in self.select(round=round, kind=kind):
            out[post.author] = post
        return out

    def to_json(self) -> list[dict]:
        return [
            {
                "seq": post.seq,
                "round": post.round,
                "author": post.author,
                "kind": post.kind,
                "payload": post.payload_bytes().hex(),
                "auth": post.auth,
            }
            for post in self.posts
        ]
