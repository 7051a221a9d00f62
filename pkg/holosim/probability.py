"""
Probability that a network of N peers does not settle into a holonic
structure, and a Monte Carlo oracle for it.

Three agents form a non-holonic triangle when each one is the favorite of
another in every one of the C interactions of all K favorite slots. The
closed forms are evaluated exactly with fractions.Fraction: the values
quickly fall below what a float can compare meaningfully.

References:

    * fractions.Fraction https://docs.python.org/3/library/fractions.html
    * numpy SeedSequence spawning
      https://numpy.org/doc/stable/reference/random/parallel.html

"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.random import SFC64, Generator, SeedSequence

from holosim.base import _element, _rational_element, _subelement
from holosim.utils import DomainError

__all__ = ['ProbParams', 'Bound', 'p_favorite', 'p_triple', 'p_any_triple',
           'p_bound', 'arrangements', 'mc_estimate', 'within_three_sigma',
           'asymptotic_check', 'format_power', 'probability_report',
           'MC_EVENTS']

LOGGER = logging.getLogger(__name__)

MC_EVENTS = ['triple', 'favorite']

DEFAULT_CHUNK = 65536


@dataclass(frozen=True)
class ProbParams:
    """Peer count N, interactions C before a favorite is chosen and
    number of favorites K."""
    N: int
    C: int = 1
    K: int = 1

    def __post_init__(self):
        for name, minimum in (('N', 2), ('C', 1), ('K', 1)):
            if getattr(self, name) < minimum:
                raise DomainError(name, getattr(self, name), minimum)

    @property
    def slots(self):
        """Number of independent favorite choices, C * K."""
        return self.C * self.K


@dataclass(frozen=True)
class Bound:
    """Upper bound of p_any_triple and its power-of-N approximation."""
    middle: Fraction
    exponent: int
    approximation: Fraction


def _require_triples(params):
    """Triangles need at least four peers."""
    if params.N < 4:
        raise DomainError('N', params.N, 4)


def p_favorite(n, c):
    """Probability 1 / (N - 1)^C that a given peer is chosen as favorite."""
    ProbParams(n, c)
    return Fraction(1, (n - 1) ** c)


def arrangements(n):
    """Ordered triples of distinct peers, N (N - 1) (N - 2)."""
    return n * (n - 1) * (n - 2)


def p_triple(params):
    """Probability that three given peers form a triangle.

    :params: ProbParams with N >= 4
    :returns: Fraction

    """
    _require_triples(params)
    n = params.N
    return Fraction(1, (n - 3) * (n - 2) * (n - 1)) ** params.slots


def p_any_triple(params):
    """Union bound over all ordered triples. Not clamped, the value
    exceeds 1 for small networks."""
    return arrangements(params.N) * p_triple(params)


def p_bound(params):
    """Return the Bound of p_any_triple.

    middle is N (N - 1) (N - 2) / (N - 3)^(3CK), approximation is
    1 / N^(3CK - 3).
    """
    _require_triples(params)
    exponent = 3 * params.slots - 3
    return Bound(
        middle=Fraction(arrangements(params.N),
                        (params.N - 3) ** (3 * params.slots)),
        exponent=exponent,
        approximation=Fraction(1, params.N ** exponent))


def _chunks(trials, chunk):
    """Sizes of the chunks of a Monte Carlo run."""
    sizes = [chunk] * (trials // chunk)
    if trials % chunk:
        sizes.append(trials % chunk)
    return sizes


def _count_hits(params, event, seed, index, size):
    """Run one chunk; its stream depends on (seed, index) only."""
    rng = Generator(SFC64(SeedSequence(seed, spawn_key=(index,))))
    if event == 'favorite':
        draws = rng.integers(0, params.N - 1, size=(size, params.C))
        return int(np.all(draws == 0, axis=1).sum())
    highs = np.array([params.N - 1, params.N - 2, params.N - 3])
    draws = rng.integers(0, highs, size=(size, params.slots, 3))
    return int(np.all(draws == 0, axis=(1, 2)).sum())


# pylint: disable=too-many-arguments
def mc_estimate(params, trials, seed=0, event='triple', workers=1,
                chunk=DEFAULT_CHUNK):
    """Estimate p_triple or p_favorite by simulation.

    Each favorite choice is drawn uniformly among the eligible peers:
    N - 1, N - 2 and N - 3 of them for the three agents of a triangle.
    Trials run in chunks seeded from (seed, chunk index), so the result
    does not depend on workers.

    :params: ProbParams
    :trials: Number of trials
    :seed: Master seed
    :event: "triple" or "favorite"
    :workers: Threads running chunks
    :returns: (estimate, binomial standard error)

    """
    if trials < 1:
        raise DomainError('trials', trials, 1)
    if event not in MC_EVENTS:
        raise ValueError('Invalid event "%s".' % event)
    if event == 'triple':
        _require_triples(params)
    sizes = _chunks(trials, chunk)
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        hits = sum(pool.map(
            lambda item: _count_hits(params, event, seed, *item),
            enumerate(sizes)))
    estimate = hits / trials
    stderr = math.sqrt(estimate * (1 - estimate) / trials)
    LOGGER.info('%s: %d hits in %d trials', event, hits, trials)
    return estimate, stderr


def within_three_sigma(estimate, expected, trials):
    """True if estimate is within three binomial standard errors of the
    expected probability."""
    expected = float(expected)
    sigma = math.sqrt(expected * (1 - expected) / trials)
    return abs(estimate - expected) <= 3 * sigma


def asymptotic_check(c, k, n_values, epsilon=1e-6):
    """Check that p_any_triple vanishes as the network grows.

    Values from the first N where p_any_triple drops below 1 must strictly
    decrease, and the last must be below epsilon. False when the bound
    never drops below 1.

    :c: Interactions before a favorite is chosen
    :k: Number of favorites
    :n_values: Increasing peer counts, each at least 4
    :returns: bool

    """
    values = [p_any_triple(ProbParams(n, c, k)) for n in n_values]
    below = [index for index, value in enumerate(values) if value < 1]
    if not below:
        return False
    tail = values[below[0]:]
    decreasing = all(later < earlier for earlier, later
                     in zip(tail, tail[1:]))
    return decreasing and tail[-1] < epsilon


def format_power(base, exponent):
    """Render base^-exponent, e.g. "20^-42"."""
    return '%s^-%s' % (base, exponent)


def probability_report(params, trials=None, seed=0, event='triple'):
    """Closed forms of params, and optionally a Monte Carlo check, as an
    element tree.

    Returns the following ElementTree structure::

        <hs:probability N="5" C="1" K="1">
          <hs:pTriple decimal="...">
            <hs:numerator>1</hs:numerator>
            <hs:denominator>24</hs:denominator>
          </hs:pTriple>
          <hs:pAnyTriple>...</hs:pAnyTriple>
          <hs:middleBound>...</hs:middleBound>
          <hs:approximation power="5^-0">...</hs:approximation>
          <hs:monteCarlo trials="1000" seed="0" event="triple"
                         estimate="..." stderr="..." verdict="PASS"/>
        </hs:probability>

    :params: ProbParams
    :trials: Monte Carlo trials, no simulation if None
    :returns: ElementTree element object

    """
    root = _element('probability')
    for name in ('N', 'C', 'K'):
        root.set(name, str(getattr(params, name)))
    expected = p_triple(params)
    bound = p_bound(params)
    _rational_element('pTriple', expected, parent=root)
    _rational_element('pAnyTriple', p_any_triple(params), parent=root)
    _rational_element('middleBound', bound.middle, parent=root)
    approximation = _rational_element('approximation', bound.approximation,
                                      parent=root)
    approximation.set('power', format_power(params.N, bound.exponent))

    if trials is not None:
        if event == 'favorite':
            expected = p_favorite(params.N, params.C)
        estimate, stderr = mc_estimate(params, trials, seed, event)
        check = _subelement(root, 'monteCarlo')
        check.set('trials', str(trials))
        check.set('seed', str(seed))
        check.set('event', event)
        check.set('estimate', repr(estimate))
        check.set('stderr', repr(stderr))
        check.set('verdict', 'PASS' if within_three_sigma(
            estimate, expected, trials) else 'FAIL')
    return root
