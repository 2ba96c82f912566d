"""Answer retrieval from the triple store."""

import numpy as np

from ..errors import ContractError, EmptyResultError
from .heads import project, project_many


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def kg_similarity(question_vec, item, head, table):
    """Cosine between the projected item and the question vector.

    Items without an embedding score 0.
    """
    vec = table.embed_text(item)
    if vec is None:
        return 0.0
    return float(np.clip(project(head, vec) @ _unit(np.asarray(question_vec, float)), -1.0, 1.0))


def kg_candidates(question_vec, store, heads, table, delta_kg):
    """Answers of every triple whose entity + relation similarity beats ``delta_kg``.

    Returns an insertion-ordered ``{answer: (sim_e, sim_r)}`` keeping, per
    answer, the pair with the largest sum (first one on ties).
    """
    if len(store) == 0:
        raise ContractError("triple store is empty")
    q = _unit(np.asarray(question_vec, float))
    ent = {e: kg_similarity(q, e, heads.entity, table) for e in store.entities}
    rel = {r: kg_similarity(q, r, heads.relation, table) for r in store.relations}
    found = {}
    for t in store:
        se, sr = ent[t.entity], rel[t.relation]
        if se + sr > delta_kg:
            prev = found.get(t.answer)
            if prev is None or se + sr > prev[0] + prev[1]:
                found[t.answer] = (se, sr)
    return found


def answer_score(answer, fused, heads, table):
    """Dot product of the projected answer with the fused feature (0 if unknown)."""
    vec = table.embed_text(answer)
    if vec is None:
        return 0.0
    return float(project(heads.answer, vec) @ fused)


def initial_answer_scores(fused, answers, heads, table):
    """Known answers ranked by projected dot product, ties by answer."""
    if not answers:
        raise ContractError("no answers to score")
    scored = []
    for a in answers:
        vec = table.embed_text(a)
        if vec is None:
            continue
        scored.append((-float(project(heads.answer, vec) @ fused), a))
    if not scored:
        raise EmptyResultError("every answer is out of vocabulary")
    scored.sort()
    return [(a, -s) for s, a in scored]


class EmbeddedStore:
    """Raw entity and relation vectors of a store, looked up once.

    Items without an embedding get a zero row and a ``False`` mask entry.
    """

    def __init__(self, store, table):
        self.store = store
        self.entity_index = {e: i for i, e in enumerate(store.entities)}
        self.relation_index = {r: i for i, r in enumerate(store.relations)}
        self.entity_vecs, self.entity_known = self._lookup(store.entities, table)
        self.relation_vecs, self.relation_known = self._lookup(store.relations, table)
        self.triple_entity = np.array([self.entity_index[t.entity] for t in store], dtype=int)
        self.triple_relation = np.array([self.relation_index[t.relation] for t in store], dtype=int)

    @staticmethod
    def _lookup(items, table):
        vecs = np.zeros((len(items), table.dim))
        known = np.zeros(len(items), dtype=bool)
        for i, item in enumerate(items):
            v = table.embed_text(item)
            if v is not None:
                vecs[i] = v
                known[i] = True
        return vecs, known


def kg_candidates_batch(question_vecs, embedded, heads, delta_kg):
    """:func:`kg_candidates` for many questions with one projection per head."""
    store = embedded.store
    if len(store) == 0:
        raise ContractError("triple store is empty")
    Pe, _ = project_many(heads.entity, embedded.entity_vecs)
    Pr, _ = project_many(heads.relation, embedded.relation_vecs)
    out = []
    for q in question_vecs:
        q = _unit(np.asarray(q, float))
        se = np.where(embedded.entity_known, np.clip(Pe @ q, -1.0, 1.0), 0.0)
        sr = np.where(embedded.relation_known, np.clip(Pr @ q, -1.0, 1.0), 0.0)
        found = {}
        tse = se[embedded.triple_entity]
        tsr = sr[embedded.triple_relation]
        for i in np.nonzero(tse + tsr > delta_kg)[0]:
            a = store.triples[i].answer
            pair = (float(tse[i]), float(tsr[i]))
            prev = found.get(a)
            if prev is None or pair[0] + pair[1] > prev[0] + prev[1]:
                found[a] = pair
        out.append(found)
    return out
