"""JSON instance files: slot spaces, pairs, conditions, witnesses, splits.

Local creatures serialize as {"slot": m, "pos": [...]}; wider creatures as
{"slot": m, "pos_by_slot": [[...], ...]}.  Fractions are carried as
"num/den" strings.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .collapse import BadnessWitness
from .core import (
    BlockPair,
    Condition,
    CreatingPair,
    Creature,
    SizeNormPair,
    SlotSpace,
)
from .halving import SplitMaps
from .transforms import SummarizedPair


class InstanceError(ValueError):
    """Malformed instance file."""


def fraction_to_json(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fraction_from_json(s) -> Fraction:
    try:
        if isinstance(s, str) and "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"bad rational {s!r}") from exc


def creature_to_json(t: Creature) -> dict:
    doc = {"slot": t.m_dn}
    if t.width == 1:
        doc["pos"] = sorted(t.sets[0])
    else:
        doc["pos_by_slot"] = [sorted(s) for s in t.sets]
    return doc


def creature_from_json(doc: dict, pair: CreatingPair) -> Creature:
    try:
        slot = doc["slot"]
        if "pos" in doc:
            sets = [doc["pos"]]
        else:
            sets = doc["pos_by_slot"]
    except KeyError as exc:
        raise InstanceError(f"creature needs 'slot' and 'pos': {doc}") from exc
    try:
        return pair.make(slot, sets)
    except (ValueError, IndexError) as exc:
        raise InstanceError(f"bad creature at slot {slot}: {exc}") from exc


def pair_to_json(pair: CreatingPair) -> dict:
    if isinstance(pair, SummarizedPair):
        doc = pair_to_json(pair.base)
        doc["blocks"] = list(pair.boundaries)
        doc["kind"] = "summarized"
        return doc
    if isinstance(pair, BlockPair):
        return {
            "kind": "block",
            "sizes": list(pair.space.sizes),
            "blocks": list(pair.boundaries),
        }
    if isinstance(pair, SizeNormPair):
        return {
            "kind": "size-norm",
            "sizes": list(pair.space.sizes),
            "norm_rule": pair.norm_rule,
        }
    raise InstanceError(f"unserializable pair {type(pair).__name__}")


def pair_from_json(doc: dict) -> CreatingPair:
    try:
        kind = doc["kind"]
        space = SlotSpace(tuple(doc["sizes"]))
        if kind == "size-norm":
            return SizeNormPair(space, doc.get("norm_rule", "size"))
        if kind == "block":
            return BlockPair(space, tuple(doc["blocks"]))
        if kind == "summarized":
            base = SizeNormPair(space, doc.get("norm_rule", "size"))
            return SummarizedPair(base, tuple(doc["blocks"]))
    except (KeyError, ValueError) as exc:
        raise InstanceError(f"bad pair document: {exc}") from exc
    raise InstanceError(f"unknown pair kind {kind!r}")


def condition_to_json(p: Condition) -> dict:
    return {
        "stem": list(p.w),
        "creatures": [creature_to_json(t) for t in p.creatures],
    }


def condition_from_json(doc: dict, pair: CreatingPair) -> Condition:
    try:
        stem = tuple(doc["stem"])
        creatures = tuple(creature_from_json(c, pair) for c in doc["creatures"])
    except KeyError as exc:
        raise InstanceError(f"condition needs 'stem' and 'creatures': missing {exc}") from exc
    return Condition(stem, creatures)


def instance_to_json(pair: CreatingPair, p: Condition) -> dict:
    return {"pair": pair_to_json(pair), "condition": condition_to_json(p)}


def instance_from_json(doc: dict):
    pair = pair_from_json(doc.get("pair", {}))
    p = condition_from_json(doc.get("condition", {}), pair)
    return pair, p


def witness_to_json(w: BadnessWitness) -> dict:
    return {
        "boundaries": list(w.boundaries),
        "label_bits": list(w.m_bits),
        "growth_base": w.growth_base,
    }


def witness_from_json(doc: dict) -> BadnessWitness:
    try:
        return BadnessWitness(
            tuple(doc["boundaries"]),
            tuple(doc["label_bits"]),
            doc.get("growth_base", 2),
        )
    except (KeyError, ValueError) as exc:
        raise InstanceError(f"bad witness document: {exc}") from exc


def splitmaps_to_json(maps: SplitMaps) -> dict:
    return {
        "bounds": list(maps.bounds),
        "horizon": maps.horizon,
        "sizes": list(maps.sizes),
        "k_values": list(maps.k_values),
    }


def splitmaps_from_json(doc: dict) -> SplitMaps:
    try:
        return SplitMaps(
            tuple(doc["bounds"]),
            doc["horizon"],
            tuple(doc["sizes"]),
            tuple(doc["k_values"]),
        )
    except (KeyError, ValueError) as exc:
        raise InstanceError(f"bad split-maps document: {exc}") from exc


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"{path}: {exc}") from exc


def dump_json(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
