"""Python bindings for the learnstory core library."""

from ._core import (
    LearnstoryError,
    Reflection,
    Resource,
    Store,
    Story,
    StoryEntry,
    Tag,
    ThreadPost,
    extract_keywords,
    normalize_url,
    split_into_thread,
)

__all__ = [
    "LearnstoryError",
    "Reflection",
    "Resource",
    "Store",
    "Story",
    "StoryEntry",
    "Tag",
    "ThreadPost",
    "extract_keywords",
    "normalize_url",
    "split_into_thread",
]
