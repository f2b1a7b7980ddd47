"""Work chunking for parallel enumeration.

Checkers enumerate words in shortlex order. This module splits that space
(or any ordered list of work items) into contiguous chunks so a worker pool
can process them while results merge back in a fixed order.
"""
import logging
from typing import List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


def chunk_items(items: Sequence[T], n_chunks: int) -> List[List[T]]:
    """Split items into at most n_chunks contiguous, nearly equal chunks.

    Args:
        items: Work items in their canonical order
        n_chunks: Desired number of chunks (usually the worker count)

    Returns:
        Chunks whose concatenation is the original list
    """
    items = list(items)
    if n_chunks <= 1 or len(items) <= 1:
        return [items] if items else []

    n_chunks = min(n_chunks, len(items))
    size, extra = divmod(len(items), n_chunks)
    chunks = []
    start = 0
    for i in range(n_chunks):
        end = start + size + (1 if i < extra else 0)
        chunks.append(items[start:end])
        start = end
    return chunks


def chunk_prefixes(letters: Sequence[str], workers: int) -> List[List[str]]:
    """Group first letters of an enumeration into per-worker chunks.

    Every word of length >= 1 starts with exactly one of the letters, so the
    chunks partition the enumeration. More chunks than workers keeps threads
    busy when some prefixes are much heavier than others.
    """
    target = max(1, workers) * 2
    chunks = chunk_items(list(letters), target)
    logger.debug(f"Split {len(letters)} prefixes into {len(chunks)} chunks for {workers} workers")
    return chunks
