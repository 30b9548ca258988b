"""Exact algebra of position/momentum operator words.

Words are tuples of letters (kind, particle, axis) with kind "x" or "p";
the only nontrivial relation is [x_{ai}, p_{bj}] = i hbar delta_ab
delta_ij.  Polynomials are kept in a canonical normal order (every
position letter left of every momentum letter, each block sorted), with
exact sympy coefficients: rationals times powers of I and hbar.  Floating
point enters only when a polynomial is evaluated on a grid or ensemble,
never here.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import sympy

HBAR = sympy.Symbol("hbar", positive=True)


def x_letter(axis, particle=0):
    return ("x", particle, axis)


def p_letter(axis, particle=0):
    return ("p", particle, axis)


def _sort_key(letter):
    kind, particle, axis = letter
    return (0 if kind == "x" else 1, particle, axis)


def _out_of_order(a, b):
    return _sort_key(a) > _sort_key(b)


def swap_adjacent(word, i):
    """Rewrite word by swapping letters i, i+1.

    Returns ((word, coeff), ...): the swapped word always, plus the
    commutator remainder when a momentum letter moves right past its own
    conjugate position letter.
    """
    a, b = word[i], word[i + 1]
    swapped = word[:i] + (b, a) + word[i + 2 :]
    if a[0] == "p" and b[0] == "x" and a[1:] == b[1:]:
        # p x = x p - i hbar
        return ((swapped, sympy.Integer(1)),
                (word[:i] + word[i + 2 :], -sympy.I * HBAR))
    if a[0] == "x" and b[0] == "p" and a[1:] == b[1:]:
        # x p = p x + i hbar
        return ((swapped, sympy.Integer(1)),
                (word[:i] + word[i + 2 :], sympy.I * HBAR))
    return ((swapped, sympy.Integer(1)),)


@lru_cache(maxsize=None)
def normal_ordered(word):
    """Canonical form of a word as a tuple of (word, coeff) pairs."""
    for i in range(len(word) - 1):
        if _out_of_order(word[i], word[i + 1]):
            acc = {}
            for rewritten, coeff in swap_adjacent(word, i):
                for w, c in normal_ordered(rewritten):
                    acc[w] = acc.get(w, sympy.Integer(0)) + coeff * c
            return tuple((w, sympy.expand(c)) for w, c in acc.items()
                         if not c.is_zero)
    return ((word, sympy.Integer(1)),)


class OperatorPolynomial:
    """Linear combination of canonical words with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {} if terms is None else terms

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def identity(cls, coeff=1):
        return cls({(): sympy.sympify(coeff)})

    @classmethod
    def from_word(cls, word, coeff=1):
        coeff = sympy.sympify(coeff)
        terms = {}
        for w, c in normal_ordered(tuple(word)):
            terms[w] = sympy.expand(coeff * c)
        return cls({w: c for w, c in terms.items() if not c.is_zero})

    def __add__(self, other):
        terms = dict(self.terms)
        for w, c in other.terms.items():
            s = sympy.expand(terms.get(w, sympy.Integer(0)) + c)
            if s.is_zero:
                terms.pop(w, None)
            else:
                terms[w] = s
        return OperatorPolynomial(terms)

    def __neg__(self):
        return OperatorPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, scalar):
        scalar = sympy.sympify(scalar)
        if scalar.is_zero:
            return OperatorPolynomial()
        return OperatorPolynomial(
            {w: sympy.expand(scalar * c) for w, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return self.scaled(other)
        out = OperatorPolynomial()
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out = out + OperatorPolynomial.from_word(w1 + w2, c1 * c2)
        return out

    def __rmul__(self, scalar):
        return self.scaled(scalar)

    def __eq__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all((self.terms[w] - other.terms[w]).is_zero for w in self.terms)

    def __hash__(self):
        raise TypeError("OperatorPolynomial is mutable-adjacent; not hashable")

    def __repr__(self):
        if not self.terms:
            return "OperatorPolynomial(0)"
        return "OperatorPolynomial(" + "; ".join(
            f"{c} * {w}" for w, c in sorted(self.terms.items())) + ")"

    def constant_term(self):
        return self.terms.get((), sympy.Integer(0))

    def adjoint(self):
        out = OperatorPolynomial()
        for w, c in self.terms.items():
            out = out + OperatorPolynomial.from_word(tuple(reversed(w)),
                                                     sympy.conjugate(c))
        return out

    def is_hermitian(self):
        return self == self.adjoint()

    def max_letter_counts(self):
        """Largest particle and axis indices used (for validation)."""
        particles = [l[1] for w in self.terms for l in w]
        axes = [l[2] for w in self.terms for l in w]
        return (max(particles, default=-1), max(axes, default=-1))

    # -- canonical text form ------------------------------------------

    def to_text(self):
        lines = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            letters = " ".join(f"{k}({part},{ax})" for k, part, ax in w)
            lines.append(f"{self.terms[w]} :: {letters}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        terms = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coeff_str, _, letters_str = line.partition("::")
            coeff = sympy.sympify(coeff_str.strip(), locals={"hbar": HBAR})
            word = []
            for token in letters_str.split():
                kind, rest = token[0], token[2:-1]
                particle, axis = (int(v) for v in rest.split(","))
                word.append((kind, particle, axis))
            terms[tuple(word)] = sympy.expand(coeff)
        return cls({w: c for w, c in terms.items() if not c.is_zero})


def symmetrize_word(word):
    """Uniform average over all orderings of the word's letters, reduced
    to canonical form; linear and idempotent on symmetric polynomials."""
    word = tuple(word)
    n = len(word)
    weight = sympy.Rational(1, math.factorial(n))
    out = OperatorPolynomial()
    for perm in itertools.permutations(range(n)):
        out = out + OperatorPolynomial.from_word(
            tuple(word[i] for i in perm), weight)
    return out


def symmetrize_polynomial(poly):
    """Extend symmetrize_word linearly over a polynomial's words."""
    out = OperatorPolynomial()
    for w, c in poly.terms.items():
        out = out + symmetrize_word(w).scaled(c)
    return out


def angular_momentum(j, k, particle=0):
    """Plane rotation generator x_j p_k - x_k p_j."""
    return (OperatorPolynomial.from_word((x_letter(j, particle), p_letter(k, particle)))
            - OperatorPolynomial.from_word((x_letter(k, particle), p_letter(j, particle))))


def angular_momentum_squared(dim=3, particle=0):
    """Quantum squared angular momentum, sum over plane generators."""
    total = OperatorPolynomial()
    for j in range(dim):
        for k in range(j + 1, dim):
            l_jk = angular_momentum(j, k, particle)
            total = total + l_jk * l_jk
    return total


def total_angular_momentum_squared(n_particles, dim):
    """(sum_a L_a)^2 summed over plane generators, N-particle."""
    total = OperatorPolynomial()
    for j in range(dim):
        for k in range(j + 1, dim):
            l_jk = OperatorPolynomial()
            for a in range(n_particles):
                l_jk = l_jk + angular_momentum(j, k, a)
            total = total + l_jk * l_jk
    return total


def symmetric_l2_operator(n_particles=1, dim=3):
    """Symmetric-ordered squared total angular momentum.

    Built by symmetrizing the classical monomials
    sum_{ab,ij} (x_{ai} x_{bi} p_{aj} p_{bj} - x_{ai} x_{bj} p_{aj} p_{bi});
    the constant term of the result is the zero-point contribution
    N (hbar^2/2) D(D-1)/2.
    """
    total = OperatorPolynomial()
    for a in range(n_particles):
        for b in range(n_particles):
            for i in range(dim):
                for j in range(dim):
                    w1 = (x_letter(i, a), x_letter(i, b),
                          p_letter(j, a), p_letter(j, b))
                    w2 = (x_letter(i, a), x_letter(j, b),
                          p_letter(j, a), p_letter(i, b))
                    total = total + symmetrize_word(w1) - symmetrize_word(w2)
    return total


def chi4_symmetric(i, j, k, l, alpha=0, beta=0, gamma=0, delta=0):
    """Symmetric ordering of the fourth-order correlation monomial
    x_{alpha i} x_{beta j} p_{gamma l} p_{delta k}.

    This is the brute-force oracle: 24 permutations averaged and reduced.
    """
    word = (x_letter(i, alpha), x_letter(j, beta),
            p_letter(l, gamma), p_letter(k, delta))
    return symmetrize_word(word)
