"""Pure-Python rewriting kernels.

Words are tuples of generator indices.  A rule table maps a left-hand word
to a tuple of ``(word, coefficient)`` pairs.  ``lengths`` lists the distinct
left-hand lengths in decreasing order so the longest match at a position is
tried first.
"""

BACKEND = "python"


class ReductionLimit(RuntimeError):
    """Raised when a reduction exceeds its step budget."""


def find_redex(word, rules, lengths):
    n = len(word)
    for i in range(n):
        for L in lengths:
            if i + L <= n and word[i:i + L] in rules:
                return i, L
    return None


def is_irreducible(word, rules, lengths):
    return find_redex(word, rules, lengths) is None


def suffix_reducible(word, rules, lengths):
    """True if some left-hand side is a suffix of ``word``."""
    n = len(word)
    for L in lengths:
        if L <= n and word[n - L:] in rules:
            return True
    return False


def reduce_terms(terms, rules, lengths, max_passes):
    """Normalize a ``{word: coeff}`` dict by leftmost-longest rewriting.

    Each pass rewrites the leftmost redex of every reducible term and merges
    equal words so cancellations happen early.
    """
    result = {}
    current = terms
    passes = 0
    while current:
        passes += 1
        if passes > max_passes:
            raise ReductionLimit(f"reduction did not terminate within {max_passes} passes")
        nxt = {}
        for w, c in current.items():
            n = len(w)
            hit = None
            for i in range(n):
                for L in lengths:
                    if i + L <= n:
                        rhs = rules.get(w[i:i + L])
                        if rhs is not None:
                            hit = (i, L, rhs)
                            break
                if hit is not None:
                    break
            if hit is None:
                if w in result:
                    v = result[w] + c
                    if v:
                        result[w] = v
                    else:
                        del result[w]
                else:
                    result[w] = c
                continue
            i, L, rhs = hit
            pre = w[:i]
            post = w[i + L:]
            for v, cv in rhs:
                nw = pre + v + post
                val = c * cv
                old = nxt.get(nw)
                if old is not None:
                    val = old + val
                    if val:
                        nxt[nw] = val
                    else:
                        del nxt[nw]
                elif val:
                    nxt[nw] = val
        current = nxt
    return result


def multiply_terms(a, b):
    """Concatenation product of two ``{word: coeff}`` dicts (unreduced)."""
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            v = ca * cb
            old = out.get(w)
            if old is not None:
                v = old + v
                if v:
                    out[w] = v
                else:
                    del out[w]
            elif v:
                out[w] = v
    return out


def irreducible_words(alphabet, rules, lengths, max_len):
    """All irreducible words up to ``max_len``, grouped by length.

    Uses that every subword of an irreducible word is irreducible, so a word
    is irreducible iff its prefix is and no left-hand side is a suffix.
    """
    layers = [[()]]
    for _ in range(max_len):
        nxt = []
        for w in layers[-1]:
            for a in alphabet:
                nw = w + (a,)
                if not suffix_reducible(nw, rules, lengths):
                    nxt.append(nw)
        layers.append(nxt)
    return layers
