"""Decoder and encoder for taut isomorphism signatures.

A taut signature has the form ``<iso>_<angles>``.  The ``iso`` part is an
isomorphism signature of a (connected, closed) ideal triangulation in the
usual base-64 printable encoding; ``angles`` holds one digit per
tetrahedron selecting which pair of opposite edges carries the angle pi.
See ``docs/signature_grammar.md`` for the grammar.

Vertex permutations are tuples ``p`` with ``p[i]`` the image of ``i``.  A
gluing ``(t, f) -> (u, g, p)`` identifies face ``f`` of tetrahedron ``t``
with face ``g = p[f]`` of ``u``, sending vertex ``v`` of ``t`` to vertex
``p[v]`` of ``u``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import AngleLengthMismatch, MalformedSignature, NonInvolutiveGluing

ALPHABET = ("abcdefghijklmnopqrstuvwxyz"
            "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
            "0123456789+-")
_VALUE = {c: i for i, c in enumerate(ALPHABET)}

#: All 24 permutations of (0, 1, 2, 3) in lexicographic order; a gluing
#: permutation is stored as its index in this list.
PERMS = tuple(itertools.permutations(range(4)))
_PERM_INDEX = {p: i for i, p in enumerate(PERMS)}
IDENTITY = (0, 1, 2, 3)

#: Opposite edge pairs selected by angle digits 0, 1, 2.
PI_PAIRS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))

_SIG_RE = re.compile(r"^([A-Za-z0-9+\-]+)_([0-9]*)$")


def perm_inverse(p):
    inv = [0] * 4
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_compose(p, q):
    """Return ``p o q`` (apply ``q`` first)."""
    return tuple(p[q[i]] for i in range(4))


def perm_sign(p):
    sign = 1
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                sign = -sign
    return sign


def angle_digit(u, v):
    """Digit of the opposite-edge pair containing the edge ``{u, v}``."""
    other = v if u == 0 else u if v == 0 else None
    if other is None:
        # edge avoids vertex 0; its partner contains 0
        other = ({1, 2, 3} - {u, v}).pop()
    return other - 1


@dataclass(frozen=True)
class GluingTable:
    """Face pairings of a closed ideal triangulation.

    ``dest[t][f]`` is ``(u, g)`` and ``perm[t][f]`` the vertex map.
    """

    tet_count: int
    dest: tuple
    perm: tuple

    def __post_init__(self):
        check_involution(self)

    def glue(self, tet, face):
        u, g = self.dest[tet][face]
        return u, g, self.perm[tet][face]

    def relabel(self, image, vperm):
        """Relabel: tetrahedron ``t`` becomes ``image[t]`` with its vertex
        ``v`` renamed ``vperm[t][v]``."""
        n = self.tet_count
        dest = [[None] * 4 for _ in range(n)]
        perm = [[None] * 4 for _ in range(n)]
        for t in range(n):
            for f in range(4):
                u, g, p = self.glue(t, f)
                new_p = perm_compose(vperm[u], perm_compose(p, perm_inverse(vperm[t])))
                nt, nf = image[t], vperm[t][f]
                dest[nt][nf] = (image[u], vperm[u][g])
                perm[nt][nf] = new_p
        return GluingTable(n, tuple(map(tuple, dest)), tuple(map(tuple, perm)))


def check_involution(table):
    n = table.tet_count
    if n <= 0:
        raise NonInvolutiveGluing("a triangulation needs at least one tetrahedron")
    if len(table.dest) != n or len(table.perm) != n:
        raise NonInvolutiveGluing("gluing arrays do not match tet_count")
    for t in range(n):
        for f in range(4):
            u, g = table.dest[t][f]
            p = table.perm[t][f]
            if not 0 <= u < n or p[f] != g:
                raise NonInvolutiveGluing(f"bad gluing at face {f} of tetrahedron {t}")
            if (u, g) == (t, f):
                raise NonInvolutiveGluing(f"face {f} of tetrahedron {t} glued to itself")
            back = table.dest[u][g]
            if back != (t, f) or table.perm[u][g] != perm_inverse(p):
                raise NonInvolutiveGluing(
                    f"gluing of face {f} of tetrahedron {t} is not an involution")


@dataclass(frozen=True)
class TautSignature:
    iso_part: str
    angle_part: tuple
    tet_count: int

    def __str__(self):
        return f"{self.iso_part}_{''.join(map(str, self.angle_part))}"


# -- decoding --------------------------------------------------------------

class _Reader:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def value(self, nchars=1):
        if self.pos + nchars > len(self.text):
            raise MalformedSignature("signature is truncated")
        out = 0
        for k in range(nchars):
            out |= _VALUE[self.text[self.pos + k]] << (6 * k)
        self.pos += nchars
        return out


def decode_iso(iso):
    """Decode the isomorphism-signature body into a :class:`GluingTable`."""
    for c in iso:
        if c not in _VALUE:
            raise MalformedSignature(f"character {c!r} is not in the signature alphabet")
    if not iso:
        raise MalformedSignature("empty signature")
    r = _Reader(iso)
    n = r.value()
    nchars = 1
    if n == 63:
        nchars = r.value()
        if nchars == 0:
            raise MalformedSignature("invalid size field")
        n = r.value(nchars)
    if n == 0:
        raise MalformedSignature("empty triangulation")

    total = 4 * n
    actions = []
    covered = 0
    joins = 0
    while covered < total:
        packed = r.value()
        for k in range(3):
            a = (packed >> (2 * k)) & 3
            if covered >= total:
                if a:
                    raise MalformedSignature("nonzero padding in facet actions")
                continue
            if a == 3:
                raise MalformedSignature("invalid facet action")
            actions.append(a)
            covered += 1 if a == 0 else 2
            joins += a == 2
        if covered > total:
            raise MalformedSignature("facet actions overrun the facet count")
    dests = [r.value(nchars) for _ in range(joins)]
    perm_ids = [r.value() for _ in range(joins)]
    if r.pos != len(iso):
        raise MalformedSignature("trailing characters (multiple components are not supported)")
    if 0 in actions:
        raise MalformedSignature("boundary faces: the triangulation is not closed")

    dest = [[None] * 4 for _ in range(n)]
    perm = [[None] * 4 for _ in range(n)]
    next_new = 1
    act = iter(actions)
    jn = 0
    for t in range(n):
        for f in range(4):
            if dest[t][f] is not None:
                continue
            a = next(act)
            if a == 1:
                if next_new >= n:
                    raise MalformedSignature("gluing to a tetrahedron beyond the count")
                u, p = next_new, IDENTITY
                next_new += 1
            else:
                u = dests[jn]
                if perm_ids[jn] >= 24:
                    raise MalformedSignature("invalid permutation index")
                p = PERMS[perm_ids[jn]]
                jn += 1
                if u >= next_new:
                    raise MalformedSignature("gluing to an unseen tetrahedron")
            g = p[f]
            if dest[u][g] is not None or (u, g) == (t, f):
                raise NonInvolutiveGluing(
                    f"face {g} of tetrahedron {u} is glued twice")
            dest[t][f] = (u, g)
            perm[t][f] = p
            dest[u][g] = (t, f)
            perm[u][g] = perm_inverse(p)
    if next_new != n:
        raise MalformedSignature("triangulation is disconnected")
    return GluingTable(n, tuple(map(tuple, dest)), tuple(map(tuple, perm)))


def decode(signature):
    """Split and decode a taut signature.

    Returns ``(TautSignature, GluingTable)``.
    """
    if not isinstance(signature, str):
        raise MalformedSignature("signature must be a string")
    m = _SIG_RE.match(signature.strip())
    if not m:
        raise MalformedSignature(f"not of the form <iso>_<digits>: {signature!r}")
    iso, digits = m.groups()
    if any(d not in "012" for d in digits):
        raise MalformedSignature("angle digits must be 0, 1 or 2")
    table = decode_iso(iso)
    if len(digits) != table.tet_count:
        raise AngleLengthMismatch(len(digits), table.tet_count)
    sig = TautSignature(iso, tuple(int(d) for d in digits), table.tet_count)
    return sig, table


# -- encoding --------------------------------------------------------------

def _chars(value, nchars):
    return "".join(ALPHABET[(value >> (6 * k)) & 63] for k in range(nchars))


def _size_header(n):
    if n < 63:
        return ALPHABET[n], 1
    nchars = 1
    while n >= 1 << (6 * nchars):
        nchars += 1
    return ALPHABET[63] + ALPHABET[nchars] + _chars(n, nchars), nchars


def encode_labelled(table):
    """Encode ``table`` exactly as labelled.

    The labelling must be the breadth-first one a signature produces
    (new tetrahedra appear in order and are glued by the identity);
    :func:`canonical_relabelling` returns such labellings.
    """
    n = table.tet_count
    header, nchars = _size_header(n)
    actions, dests, perms = [], [], []
    seen = 1
    for t in range(n):
        for f in range(4):
            u, g, p = table.glue(t, f)
            if (u, g) < (t, f):
                continue
            if u == seen and p == IDENTITY:
                actions.append(1)
                seen += 1
            elif u < seen:
                actions.append(2)
                dests.append(u)
                perms.append(_PERM_INDEX[p])
            else:
                raise ValueError("table is not in breadth-first signature order")
    out = [header]
    for k in range(0, len(actions), 3):
        chunk = actions[k:k + 3]
        out.append(ALPHABET[sum(a << (2 * i) for i, a in enumerate(chunk))])
    out.extend(_chars(d, nchars) for d in dests)
    out.extend(ALPHABET[p] for p in perms)
    return "".join(out)


_COMPOSE = tuple(tuple(_PERM_INDEX[perm_compose(p, q)] for q in PERMS) for p in PERMS)
_INVERSE = tuple(_PERM_INDEX[perm_inverse(p)] for p in PERMS)
# ASCII rank of each alphabet value; signatures compare as plain strings
_RANK = tuple(ord(c) for c in ALPHABET)


def _flatten(table):
    """Per-facet ``(partner, partner face, perm index)`` lookups."""
    return [(u, g, _PERM_INDEX[p])
            for row_d, row_p in zip(table.dest, table.perm)
            for (u, g), p in zip(row_d, row_p)]


def _candidate(flat, n, start, sp, best):
    """Signature body (as a list of values) for one breadth-first start.

    ``flat`` comes from :func:`_flatten`.  Returns ``None`` as soon as the
    candidate is known to compare greater than ``best`` (a list of values,
    or ``None``).
    """
    rank, compose, inverse, perms = _RANK, _COMPOSE, _INVERSE, PERMS
    image = [-1] * n
    vperm = [0] * n
    image[start] = 0
    vperm[start] = sp
    order = [start]
    dests, gperms, out = [], [], []
    packed = shift = 0
    deciding = best is not None
    pos = 0
    for k in range(n):
        t = order[k]
        vt = vperm[t]
        ivt = inverse[vt]
        inv = perms[ivt]
        base = 4 * t
        for nf in range(4):
            u, g, pi = flat[base + inv[nf]]
            iu = image[u]
            if iu >= 0:
                vu = vperm[u]
                if iu < k or (iu == k and perms[vu][g] < nf):
                    continue
                packed |= 2 << shift
                dests.append(iu)
                gperms.append(compose[vu][compose[pi][ivt]])
            else:
                image[u] = len(order)
                vperm[u] = compose[vt][inverse[pi]]
                order.append(u)
                packed |= 1 << shift
            shift += 2
            if shift == 6:
                out.append(packed)
                if deciding:
                    r, rb = rank[packed], rank[best[pos]]
                    if r > rb:
                        return None, None, None
                    if r < rb:
                        deciding = False
                    pos += 1
                packed = shift = 0
    if shift:
        out.append(packed)
    out.extend(dests)
    out.extend(gperms)
    if deciding:
        for v, vb in zip(out[pos:], best[pos:]):
            r, rb = rank[v], rank[vb]
            if r != rb:
                if r > rb:
                    return None, None, None
                break
        else:
            if len(out) > len(best):
                return None, None, None
    return out, image, vperm


def relabel_angles(angles, image, vperm):
    out = [None] * len(angles)
    for t, d in enumerate(angles):
        (a, b), _ = PI_PAIRS[d]
        p = vperm[t]
        if isinstance(p, int):
            p = PERMS[p]
        out[image[t]] = angle_digit(p[a], p[b])
    return tuple(out)


# Facets of the start tetrahedron visited first, for each start permutation.
_FIRST_FACES = [PERMS[_INVERSE[sp]][:3] for sp in range(24)]


def _plausible_starts(table):
    """Start choices that can still produce the minimal first character.

    When the start tetrahedron is not glued to itself its first three
    facet actions only depend on which of its faces share a neighbour, so
    most starts can be discarded without running the full search.
    """
    keep, forced = [], []
    best_rank = None
    for t in range(table.tet_count):
        nbr = [u for u, _ in table.dest[t]]
        if t in nbr:
            forced.extend((t, sp) for sp in range(24))
            continue
        for sp, (f0, f1, f2) in enumerate(_FIRST_FACES):
            a1 = 2 if nbr[f1] == nbr[f0] else 1
            a2 = 2 if nbr[f2] in (nbr[f0], nbr[f1]) else 1
            r = _RANK[1 | a1 << 2 | a2 << 4]
            if best_rank is None or r < best_rank:
                best_rank = r
                keep = []
            if r == best_rank:
                keep.append((t, sp))
    return forced + keep


def canonical_relabelling(table, angles=None):
    """Return ``(iso, angles, image, vperm)`` for the canonical labelling.

    Candidates are all breadth-first labellings from every start
    tetrahedron and starting vertex permutation; the winner minimises the
    signature string, ties broken by the angle string.  ``vperm[t]`` maps
    old vertex labels of ``t`` to new ones.
    """
    n = table.tet_count
    if n >= 63:
        return _canonical_slow(table, angles)
    best = None
    winners = []
    flat = _flatten(table)
    for start, sp in _plausible_starts(table):
        out, image, vperm = _candidate(flat, n, start, sp, best)
        if out is None:
            continue
        if best is None or out != best:
            best = out
            winners = []
        winners.append((image, vperm))
    iso = ALPHABET[n] + "".join(ALPHABET[v] for v in best)
    ranked = []
    for image, vperm in winners:
        ang = relabel_angles(angles, image, vperm) if angles is not None else ()
        ranked.append((ang, image, [PERMS[p] for p in vperm]))
    ang, image, vperm = min(ranked, key=lambda r: r[0])
    return iso, ang, image, vperm


def _bfs_labelling(table, start, start_perm):
    n = table.tet_count
    image = [-1] * n
    vperm = [None] * n
    order = [start]
    image[start] = 0
    vperm[start] = start_perm
    k = 0
    while k < len(order):
        t = order[k]
        inv = perm_inverse(vperm[t])
        for nf in range(4):
            f = inv[nf]
            u, g, p = table.glue(t, f)
            if image[u] < 0:
                image[u] = len(order)
                vperm[u] = perm_compose(vperm[t], perm_inverse(p))
                order.append(u)
        k += 1
    return image, vperm


def _canonical_slow(table, angles):
    best = None
    for start in range(table.tet_count):
        for sp in PERMS:
            image, vperm = _bfs_labelling(table, start, sp)
            iso = encode_labelled(table.relabel(image, vperm))
            ang = relabel_angles(angles, image, vperm) if angles is not None else ()
            if best is None or (iso, ang) < best[0]:
                best = ((iso, ang), image, vperm)
    (iso, ang), image, vperm = best
    return iso, ang, image, vperm


def encode(table, angles):
    """Canonical taut signature of ``(table, angles)``."""
    angles = tuple(angles)
    if len(angles) != table.tet_count:
        raise AngleLengthMismatch(len(angles), table.tet_count)
    iso, ang, _, _ = canonical_relabelling(table, angles)
    return f"{iso}_{''.join(map(str, ang))}"


def read_census(lines):
    """Yield signatures from census text, skipping blanks and ``#`` comments.

    Only the first whitespace-separated token of each line is used, so
    files with trailing data columns are accepted.
    """
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line.split()[0]
