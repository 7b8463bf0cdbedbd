"""The five embedded KJV prompts and the reduction used when a generator
caps prompt length: stopwords and punctuation dropped, then a word-boundary
cut if still too long.

The stopword list is a frozen 127-word English snapshot shipped as data
(data/stopwords.txt) so reduction output is reproducible without pulling
in an NLP dependency.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from importlib import resources

from .model import PromptSpec, SchemaViolation, VddEvalError, _require


class EmptyResult(VddEvalError):
    """Reduction left nothing: every token was a stopword or punctuation,
    or the first surviving word does not fit the limit."""


# ASCII punctuation plus the curly quotes/dashes that occur in the passages.
_PUNCT = set(string.punctuation) | set("‘’“”–—…«»")


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]

    def __post_init__(self):
        _require(len(self.words) > 0, "words", "must be non-empty")
        for w in self.words:
            _require(
                w == w.lower() and not any(c.isspace() for c in w),
                "words",
                f"entries must be lowercase with no whitespace, got {w!r}",
            )

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.words


def shipped_stopwords() -> StopwordList:
    """Load the frozen stopword list shipped with the package."""
    text = resources.files("vdd_eval").joinpath("data/stopwords.txt").read_text("utf-8")
    return StopwordList(frozenset(line.strip() for line in text.splitlines() if line.strip()))


_PROMPTS = (
    PromptSpec(
        id="p1",
        title="Adam and Eve's Expulsion of Paradise (Genesis 4:23-24)",
        full_text=(
            "'therefore the Lord God sent [Adam and Eve] forth from the garden of "
            "Eden, to till the ground from which he was taken. He drove out the man; "
            "and at the east of the garden of Eden he placed the cherubim, and a "
            "flaming sword which turned every way, to guard the way to the Tree of life."
        ),
    ),
    PromptSpec(
        id="p2",
        title="The Tower of Babel (Genesis 11:1-9)",
        full_text=(
            "Now the whole earth had one language and few words. And as men migrated "
            "from the east, they found a plain in the land of Shinar and settled "
            'there. And they said to one another, "Come, let us make bricks, and burn '
            'them thoroughly." And they had brick for stone, and bitumen for mortar. '
            'Then they said, "Come, let us build ourselves a city, and a tower with '
            "its top in the heavens, and let us make a name for ourselves, lest we be "
            'scattered abroad upon the face of the whole earth." And the Lord came '
            "down to see the city and the tower, which the sons of men had built. And "
            'the Lord said, "Behold, they are one people, and they have all one '
            "language; and this is only the beginning of what they will do; and "
            "nothing that they propose to do will now be impossible for them. Come, "
            "let us go down, and there confuse their language, that they may not "
            "understand one another’s speech.\" So the Lord scattered them abroad from "
            "there over the face of all the earth, and they left off building the "
            "city. Therefore its name was called Babel, because there the Lord "
            "confused[a] the language of all the earth; and from there the Lord "
            "scattered them abroad over the face of all the earth."
        ),
    ),
    PromptSpec(
        id="p3",
        title="Binding of Isaac (Genesis 22:9-14)",
        full_text=(
            "When they came to the place of which God had told him, Abraham built an "
            "altar there, and laid the wood in order, and bound Isaac his son, and "
            "laid him on the altar, upon the wood. Then Abraham put forth his hand "
            "and took the knife to slay his son. But the angel of the Lord called to "
            'him from heaven, and said, "Abraham, Abraham!" And he said, "Here am I." '
            'He said, "Do not lay your hand on the lad or do anything to him; for now '
            "I know that you fear God, seeing you have not withheld your son, your "
            'only son, from me." And Abraham lifted up his eyes and looked, and '
            "behold, behind him was a ram, caught in a thicket by his horns; and "
            "Abraham went and took the ram, and offered it up as a burnt offering "
            "instead of his son. So Abraham called the name of that place The Lord "
            'will provide;[a] as it is said to this day, "On the mount of the Lord it '
            'shall be provided."'
        ),
    ),
    PromptSpec(
        id="p4",
        title="The Last Supper (Mark 14:12-25)",
        full_text=(
            "And when it was evening he came with the twelve. And as they were at the "
            'table eating, Jesus said, Jesus said, "Truly, I say to you, one of you '
            'will betray me, one who is eating with me." They began to be sorrowful, '
            'and to say to him one after another, "Is it I?" He said to them, "It is '
            "one of the twelve, one who is dipping bread into the dish with me. For "
            "the Son of man goes as it is written of him, but woe to that man by whom "
            "the Son of man is betrayed! It would have been better for that man if he "
            'had not been born." And as they were eating, he took bread, and blessed, '
            'and broke it, and gave it to them, and said, "Take; this is my body." '
            "And he took a cup, and when he had given thanks he got gave it to them, "
            'and they all drank of it. And he said to them, "This is my blood of '
            "the[b] covenant, which is poured out for many. Truly, I say to you, I "
            "shall not drink again of the fruit of the vine until that day when I "
            'drink it new in the kingdom of God."'
        ),
    ),
    PromptSpec(
        id="p5",
        title="Moses Found (Exodus 2:5-9)",
        full_text=(
            "Now the daughter of Pharaoh came down to bathe at the river, and her "
            "maidens walked beside the river; she saw the basket among the reeds and "
            "sent her maid to fetch it. When she opened it she saw the child; and lo, "
            'the babe was crying. She took pity on him and said, "This is one of the '
            "Hebrews’ children.\" Then his sister said to Pharaoh’s daughter, \"Shall I "
            "go and call you a nurse from the Hebrew women to nurse the child for "
            'you?" And Pharaoh’s daughter said to her, "Go." So the girl went and '
            "called the child's mother. And Pharaoh’s daughter said to her, \"Take "
            'this child away, and nurse him for me, and I will give you your wages." '
            "So the woman took the child and nursed him."
        ),
    ),
)


def list_prompts() -> list[PromptSpec]:
    """The five prompts, p1..p5, passage text verbatim."""
    return list(_PROMPTS)


def get_prompt(prompt_id: str) -> PromptSpec:
    for p in _PROMPTS:
        if p.id == prompt_id:
            return p
    raise SchemaViolation("prompt_id", f"unknown prompt {prompt_id!r}")


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and token[start] in _PUNCT:
        start += 1
    while end > start and token[end - 1] in _PUNCT:
        end -= 1
    return token[start:end]


def truncate_prompt(text: str, char_limit: int, stopwords: StopwordList) -> str:
    """Reduce text to fit char_limit.

    Under the limit the text is returned unchanged. Over it: split on
    whitespace, strip leading/trailing punctuation per token, drop
    stopwords (case-insensitive) and emptied tokens, rejoin with single
    spaces; if still too long, cut at the last word boundary within the
    limit. Idempotent for a fixed limit and list.
    """
    _require(char_limit > 0, "char_limit", "must be > 0")
    if len(text) <= char_limit:
        return text

    kept = []
    for token in text.split():
        stripped = _strip_punct(token)
        if not stripped or stripped in stopwords:
            continue
        kept.append(stripped)
    if not kept:
        raise EmptyResult(f"no tokens survive reduction to {char_limit} chars")

    out = " ".join(kept)
    if len(out) > char_limit:
        cut = out.rfind(" ", 0, char_limit + 1)
        out = out[:cut] if cut != -1 else ""
    if not out:
        raise EmptyResult(f"no tokens survive reduction to {char_limit} chars")
    return out
