"""genlab: a simulation laboratory for generation games on noisy example streams.

The package provides:

* :mod:`genlab.setalg` -- a decidable algebra of countable sets,
* :mod:`genlab.classes` -- hypothesis classes, built-ins, and the
  class-spec file format,
* :mod:`genlab.closure` -- consistent families, closure operators and
  the (noisy) closure dimensions,
* :mod:`genlab.generators` -- stepwise generator strategies,
* :mod:`genlab.adversaries` -- valid noisy streams and constructive
  lower-bound adversaries,
* :mod:`genlab.game` -- the adversary-vs-generator game runner and
  transcript format,
* :mod:`genlab.cli` -- the ``genlab`` command-line harness.
"""

from .setalg import CountableSet, Universe, make_set, pair, unpair

__all__ = ["CountableSet", "Universe", "make_set", "pair", "unpair"]

__version__ = "0.1.0"
