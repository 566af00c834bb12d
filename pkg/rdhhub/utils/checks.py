#! /usr/bin/env python3

from typing import Sequence, Tuple

from .config import _VARIANT, _FAMILY, _PREDICTOR


def parse_list(text: str) -> Tuple[str, ...]:

    """
    Splits a comma separated option value, e.g.
    "med,mean" -> ("med", "mean"). Blank items
    are dropped, names are lower-cased.
    """

    return tuple(
        item.strip().lower()
        for item in str(text).split(",")
        if item.strip()
    )


def parse_fractions(text: str) -> Tuple[float, ...]:
    fractions = tuple(float(item) for item in parse_list(text))

    if not fractions:
        msg = "At least one payload fraction is required"
        raise ValueError(msg)

    for fraction in fractions:
        if not 0 < fraction <= 1:
            msg = f"Payload fraction {fraction} not in (0, 1]"
            raise ValueError(msg)

    return fractions


def check_variant(variant: str) -> str:
    variant = str(variant).lower()
    if variant not in _VARIANT.values():
        msg = f"Unknown variant `{variant}`"
        raise ValueError(msg)
    return variant


def check_family(family: str) -> str:
    family = str(family).lower()
    if family not in _FAMILY.values():
        msg = f"Unknown family `{family}`"
        raise ValueError(msg)
    return family


def check_predictors(kinds: Sequence[str]) -> Tuple[str, ...]:

    """
    A predictor set is an ordered list of 2-4 distinct
    kinds; predictor 1 is the first element. The single
    MED set of the baseline family is checked elsewhere.
    """

    kinds = tuple(str(kind).lower() for kind in kinds)

    for kind in kinds:
        if kind not in _PREDICTOR.values():
            msg = f"Unknown predictor `{kind}`"
            raise ValueError(msg)

    if len(set(kinds)) != len(kinds):
        msg = "Predictors must be distinct"
        raise ValueError(msg)

    return kinds
