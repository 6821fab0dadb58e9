"""Per-row status bits shared by the table generators and the sweep writer."""
from __future__ import annotations

import enum


class RowFlag(enum.IntFlag):
    MF_UNSTABLE = 1
    FLUCT_UNSTABLE = 2
    STEADY_FAILED = 4
    NOISE_FAILED = 8
    UNPHYSICAL = 16
    SENS_FAILED = 32
    SENS_STEP_DISAGREE = 64
    SNR_INFINITE = 128
    ORACLE_FAILED = 256
    MULTISTABLE = 512


#: Flags that are informational and do not make a row count as failed.
INFORMATIONAL = RowFlag.MULTISTABLE


def flags_text(flags: int) -> str:
    if not flags:
        return "ok"
    return "|".join(f.name.lower() for f in RowFlag if flags & f)
