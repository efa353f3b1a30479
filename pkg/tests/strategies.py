"""Hypothesis strategies shared across test modules."""

from __future__ import annotations

from hypothesis import strategies as st

from adavu.laban_map import ArmLaban, LabanFrame, LabanLimb, LabanScore, LegLaban

levels = st.integers(1, 3)


@st.composite
def limbs(draw, allow_none=True):
    d = draw(st.integers(0 if allow_none else 1, 11))
    return LabanLimb(d, draw(levels) if d else 0)


@st.composite
def legs(draw):
    return LegLaban(
        limb=draw(limbs()),
        crossing=draw(st.sampled_from([0, 0, 1, 2])),
        hip_support=draw(st.booleans()),
        knee_folding=draw(st.integers(0, 6)),
        touch=draw(st.integers(0, 10)),
    )


@st.composite
def arms(draw):
    return ArmLaban(
        limb=draw(limbs()),
        crossing=draw(st.sampled_from([0, 0, 1])),
        elbow_folding=draw(st.integers(0, 6)),
        body_inclusion=draw(st.booleans()),
    )


@st.composite
def frames(draw, measure=0, mirrored=None):
    ls = draw(limbs(allow_none=False))
    ll, la = draw(legs()), draw(arms())
    if mirrored if mirrored is not None else draw(st.booleans()):
        rs, rl, ra = ls.lateral(), ll.lateral(), la.lateral()
    else:
        rs, rl, ra = draw(limbs()), draw(legs()), draw(arms())
    return LabanFrame.assemble(measure, ls, rs, ll, rl, la, ra, draw(limbs()))


titles = st.text(alphabet="abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789_-&<>'\"", max_size=20).map(str.strip)


@st.composite
def scores(draw, max_frames=6):
    n = draw(st.integers(0, max_frames))
    return LabanScore(draw(titles), tuple(draw(frames(measure=i)) for i in range(n)))
