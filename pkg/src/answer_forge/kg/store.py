"""Triple store for the knowledge graph."""

from dataclasses import dataclass
from pathlib import Path

from ..errors import ContractError, ParseError
from ..text import normalize_answer


@dataclass(frozen=True)
class Triple:
    entity: str
    relation: str
    answer: str

    def __post_init__(self):
        for name in ("entity", "relation", "answer"):
            value = normalize_answer(getattr(self, name))
            if not value:
                raise ContractError(f"triple field {name} is empty")
            object.__setattr__(self, name, value)


class TripleStore:
    """Deduplicated triples with entity and relation adjacency.

    ``entities``, ``relations`` and ``answers`` keep first-seen order so
    every downstream iteration is deterministic.
    """

    def __init__(self, triples):
        seen = set()
        self.triples = []
        self.by_entity = {}
        self.by_relation = {}
        for t in triples:
            if not isinstance(t, Triple):
                t = Triple(*t)
            if t in seen:
                continue
            seen.add(t)
            self.triples.append(t)
            self.by_entity.setdefault(t.entity, []).append(t)
            self.by_relation.setdefault(t.relation, []).append(t)
        self.triples = tuple(self.triples)
        self.entities = tuple(self.by_entity)
        self.relations = tuple(self.by_relation)
        self.answers = tuple(dict.fromkeys(t.answer for t in self.triples))

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def facts_for_answer(self, answer):
        answer = normalize_answer(answer)
        return [t for t in self.triples if t.answer == answer]


def load_triples(path):
    """Read ``entity<TAB>relation<TAB>answer`` lines; ``#`` lines are comments."""
    path = Path(path)
    triples = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", line=lineno, path=path)
            try:
                triples.append(Triple(*fields))
            except ContractError as exc:
                raise ParseError(str(exc), line=lineno, path=path) from None
    return TripleStore(triples)
