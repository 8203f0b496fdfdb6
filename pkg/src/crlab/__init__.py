"""Desk-scale verification toolkit for creature-forcing combinatorics."""

from .core import (
    AlignmentError,
    BlockPair,
    BudgetError,
    Condition,
    CreatingPair,
    Creature,
    SizeNormPair,
    SlotSpace,
    check_good_pair,
    leq,
    pos_contains,
    pos_product,
)
from .norms import LogLogCard, slot_norm_divisor, tower_norm, verify_norm_identities
from .coloring import CellFamily, ColoringParams, color_of, find_witness, verify_otimes
from .collapse import (
    BadnessWitness,
    NameSeed,
    build_badness,
    decode_names,
    encode_real,
    verify_delta,
)
from .transforms import (
    SummarizedPair,
    flatten_condition,
    reduce_to_bad_form,
    sum_creatures,
    summarize_condition,
    summarize_pair,
)
from .halving import (
    SplitMaps,
    SymbolicCreature,
    build_split,
    check_halving_property,
    check_product_bound,
    half,
    merge_conditions,
    split_condition,
    unhalve,
)

__version__ = "0.1.0"
