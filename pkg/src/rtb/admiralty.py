"""Admiralty Code ratings: source reliability A-F crossed with information
credibility 1-6, mapped onto a three-way decision landscape.

The landscape rule: F reliability or credibility 6 cannot be judged at all;
good source and good information (A-C crossed with 1-3) is usable for
decision-making; everything else is risky.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DuplicateStateIdError, MalformedRatingError

RELIABILITY_GRADES = ("A", "B", "C", "D", "E", "F")
CREDIBILITY_GRADES = (1, 2, 3, 4, 5, 6)


class DecisionCategory(str, Enum):
    USABLE = "Usable"
    RISKY = "Risky"
    UNJUDGED = "Unjudged"


@dataclass(frozen=True)
class AdmiraltyRating:
    reliability: str
    credibility: int

    def __post_init__(self):
        if self.reliability not in RELIABILITY_GRADES:
            raise MalformedRatingError(f"reliability {self.reliability!r} not in A-F")
        if self.credibility not in CREDIBILITY_GRADES:
            raise MalformedRatingError(f"credibility {self.credibility!r} not in 1-6")

    def __str__(self) -> str:
        return f"{self.reliability}{self.credibility}"


@dataclass(frozen=True)
class RatedState:
    state_id: str
    rating: AdmiraltyRating
    category: DecisionCategory


def parse_rating(text: str) -> AdmiraltyRating:
    """Parse a letter+digit rating like "C5"; case-insensitive."""
    cleaned = text.strip().upper()
    if len(cleaned) != 2 or not cleaned[1].isdigit():
        raise MalformedRatingError(f"cannot parse rating {text!r}")
    return AdmiraltyRating(reliability=cleaned[0], credibility=int(cleaned[1]))


def decision_category(r: AdmiraltyRating) -> DecisionCategory:
    if r.reliability == "F" or r.credibility == 6:
        return DecisionCategory.UNJUDGED
    if r.reliability in ("A", "B", "C") and r.credibility <= 3:
        return DecisionCategory.USABLE
    return DecisionCategory.RISKY


def rate_state_set(
    states: list[tuple[str, AdmiraltyRating]],
) -> dict[DecisionCategory, list[RatedState]]:
    """Annotate and group system states, keeping input order within groups."""
    groups: dict[DecisionCategory, list[RatedState]] = {
        DecisionCategory.USABLE: [],
        DecisionCategory.RISKY: [],
        DecisionCategory.UNJUDGED: [],
    }
    seen: set[str] = set()
    for state_id, rating in states:
        if state_id in seen:
            raise DuplicateStateIdError(f"state id {state_id!r} repeated")
        seen.add(state_id)
        category = decision_category(rating)
        groups[category].append(RatedState(state_id=state_id, rating=rating, category=category))
    return groups
