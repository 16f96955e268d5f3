"""Data records passed between extraction, normalization and storage."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum

from .alignment import WordSequence


class EntityClass(str, Enum):
    COUNTRY = "country"
    EMAIL = "email"
    URL = "url"
    ADDRESS = "address"
    CITY = "city"
    STATE = "state"
    ORGANIZATION = "organization"


class MentionKind(str, Enum):
    DESCRIBED = "described"
    DESCRIPTOR = "descriptor"


@dataclass(frozen=True)
class GPE:
    """Geo-political entity: country, state and city, each optional."""

    country: str | None = None
    state: str | None = None
    city: str | None = None

    def key(self) -> tuple[str | None, str | None, str | None]:
        return (self.country, self.state, self.city)

    def shape(self) -> tuple[bool, bool, bool]:
        return (self.country is not None, self.state is not None, self.city is not None)

    def matches(self, other: GPE) -> bool:
        """``other`` agrees with every subtype this GPE defines."""
        return all(mine is None or mine == theirs for mine, theirs in zip(self.key(), other.key()))

    def union(self, other: GPE) -> GPE:
        """Fill missing subtypes from ``other``; defined values are kept."""
        return GPE(
            country=self.country if self.country is not None else other.country,
            state=self.state if self.state is not None else other.state,
            city=self.city if self.city is not None else other.city,
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Phrase:
    text: str
    index: int
    consumed_as: EntityClass | None = None
    original: str | None = None

    def consume(self, kind: EntityClass) -> None:
        if self.consumed_as is not None and self.consumed_as != kind:
            raise ValueError(f"phrase {self.text!r} already tagged {self.consumed_as.value}")
        self.consumed_as = kind


@dataclass
class OrgMention:
    raw: str
    canonical_text: str
    words: WordSequence
    kind: MentionKind
    gpe: GPE = field(default_factory=GPE)
    pmid: str | None = None

    @property
    def described(self) -> bool:
        return self.kind is MentionKind.DESCRIBED


@dataclass
class ExtractedRecord:
    pmid: str | None = None
    organizations: list[OrgMention] = field(default_factory=list)
    gpe: GPE = field(default_factory=GPE)
    emails: list[str] = field(default_factory=list)
    urls: list[str] = field(default_factory=list)
    addresses: list[str] = field(default_factory=list)
    leftovers: list[str] = field(default_factory=list)
    used_translation: bool = False
    warnings: list[str] = field(default_factory=list)
