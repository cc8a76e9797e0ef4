"""Rule-based validity checking for space-time kernels on networks.

``check_validity`` decides, from encoded sufficient conditions, whether a
kernel is certified positive definite on a network of the given topology
class.  The verdict is three-valued:

- ``valid``: a sufficient rule applies; the verdict names it.
- ``invalid``: a documented necessary condition is violated (for example a
  Matern spatial family with nu > 1/2 under the distance-rescaling
  composition, or the geodesic metric on a topology where no certificate
  exists).
- ``unknown``: no encoded rule either certifies or refutes the kernel.

Rule catalog (ids appear in verdicts):

- ``R1.1`` composition kernel, alpha >= 1, beta in (0, 1], Stieltjes-listed
  phi, Bernstein-listed psi, resistance metric, linear time.
- ``R1.2`` same with circular time (psi is only ever evaluated on [0, pi]).
- ``R1.3`` same with the geodesic metric; needs a tree or a 1-sum of
  cycles and trees (every biconnected block an edge or a simple cycle).
- ``R2``   Askey spatial family on a Euclidean tree with enough smoothness
  for its leaf count (nu >= 4*leaves - 1, the conservative reading),
  beta in [0, 1], alpha >= 1, Bernstein-listed psi.
- ``R3``   multiplicative regime beta = -1 on a Euclidean tree with at
  least 3 leaves: completely-monotone-listed phi, Bernstein-listed psi,
  alpha >= 2*leaves + 1 (the conservative reading).  Other beta < 0,
  other topologies, and smaller alpha are uncertified; empirical audits
  refute a blanket certificate on graphs with cycles.
- ``HS.<family>`` circular-time cosine-series families with a
  completely-monotone-listed inner correlation.

The checker is a pure function; it never raises on a well-formed kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .kernels import (
    Askey,
    CircularKernel,
    GneitingKernel,
    Matern,
    SpaceTimeKernel,
    is_bernstein_listed,
    is_completely_monotone_listed,
    is_stieltjes_listed,
)
from .network import TopologyClass

VALID = "valid"
INVALID = "invalid"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class ValidityVerdict:
    """Outcome of a validity check: status, governing rule id (for valid
    verdicts), a reason sentence, and optional caveat notes."""

    status: str
    rule: Optional[str]
    reason: str
    notes: Tuple[str, ...] = ()

    @property
    def is_valid(self) -> bool:
        return self.status == VALID

    @property
    def is_invalid(self) -> bool:
        return self.status == INVALID


def _valid(rule, reason, notes=()):
    return ValidityVerdict(VALID, rule, reason, tuple(notes))


def _invalid(reason, notes=()):
    return ValidityVerdict(INVALID, None, reason, tuple(notes))


def _unknown(reason, notes=()):
    return ValidityVerdict(UNKNOWN, None, reason, tuple(notes))


def askey_nu_bound(leaf_count: int) -> float:
    """Smallest certified Askey exponent on a tree with ``leaf_count``
    leaves (conservative reading of the embedding argument)."""
    return 4.0 * leaf_count - 1.0


_EUCLIDEAN_REASON = (
    "ambient Euclidean distance between network points carries no "
    "positive-definiteness certificate here; this is the deliberately "
    "misspecified configuration")


def check_validity(spec: SpaceTimeKernel,
                   topo: Optional[TopologyClass] = None) -> ValidityVerdict:
    """Check a kernel against the encoded rule catalog for a network of
    topology class ``topo``.

    ``topo=None`` means the topology is unknown: rules whose certificate
    depends on the network's block structure then answer ``unknown``
    instead of valid/invalid, while topology-independent refusals (the
    ambient-Euclidean metric, Matern smoothness above 1/2) still apply.
    """
    if isinstance(spec, CircularKernel):
        return _check_circular(spec, topo)
    if isinstance(spec, GneitingKernel):
        if spec.beta < 0:
            return _rule_r3(spec, topo)
        if isinstance(spec.phi, Askey):
            return _rule_r2(spec, topo)
        return _rule_r1(spec, topo)
    return _unknown(f"no rules encoded for {type(spec).__name__}")


def _rule_r1(spec: GneitingKernel, topo: TopologyClass) -> ValidityVerdict:
    if isinstance(spec.phi, Matern):
        if spec.phi.nu > 0.5 and spec.beta > 0:
            return _invalid(
                f"Matern smoothness nu={spec.phi.nu} exceeds 1/2; under "
                f"network metrics the family is positive definite only for "
                f"nu in (0, 1/2], so the rescaling composition is refused")
        return _unknown(
            "Matern is not in the Stieltjes catalog; the rescaling "
            "composition with it is uncertified even for nu <= 1/2")

    if spec.metric == "euclidean":
        return _invalid(_EUCLIDEAN_REASON)

    conditions = []
    if not is_stieltjes_listed(spec.phi):
        conditions.append(
            f"spatial family {spec.phi.family_name} with these parameters "
            f"is not in the Stieltjes catalog")
    if not is_bernstein_listed(spec.psi):
        conditions.append(
            f"temporal family {spec.psi.family_name} with these parameters "
            f"is not in the Bernstein catalog")
    if spec.beta == 0:
        conditions.append(
            "beta = 0 (separable product) is outside the encoded "
            "distance-rescaling rule, which needs beta in (0, 1]")
    elif spec.beta > 1:
        conditions.append(f"beta = {spec.beta} exceeds 1")
    if conditions:
        return _unknown("; ".join(conditions))
    if spec.alpha < 1:
        return _unknown(
            f"alpha = {spec.alpha} lies in (0, 1); the certified range is "
            f"alpha >= 1 and the status of smaller exponents is open")

    if spec.metric == "resistance":
        if spec.time == "linear":
            return _valid(
                "R1.1", "resistance metric, linear time: alpha >= 1, beta "
                "in (0, 1], Stieltjes-listed spatial family, "
                "Bernstein-listed temporal family")
        return _valid(
            "R1.2", "resistance metric, circular time: alpha >= 1, beta in "
            "(0, 1], Stieltjes-listed spatial family, Bernstein-listed "
            "temporal family restricted to [0, pi]")
    # geodesic metric
    if topo is None:
        return _unknown(
            "geodesic-metric certificate depends on the network's block "
            "structure and no topology was supplied")
    if topo.is_cycles_and_trees:
        return _valid(
            "R1.3", "geodesic metric on a tree or 1-sum of cycles and "
            "trees: alpha >= 1, beta in (0, 1], Stieltjes-listed spatial "
            "family, Bernstein-listed temporal family")
    return _invalid(
        "geodesic metric certificate only covers trees and 1-sums of "
        "cycles and trees; this network has a biconnected block that is "
        "neither an edge nor a simple cycle")


def _rule_r2(spec: GneitingKernel, topo: TopologyClass) -> ValidityVerdict:
    if spec.metric == "euclidean":
        return _invalid(_EUCLIDEAN_REASON)
    if topo is None:
        return _unknown(
            "compactly supported Askey kernels are certified only on "
            "Euclidean trees and the bound needs the leaf count; no "
            "topology was supplied")
    if not topo.is_tree:
        return _unknown(
            "compactly supported Askey kernels are certified only on "
            "Euclidean trees; this network is not a tree")
    bound = askey_nu_bound(topo.leaf_count)
    if spec.phi.nu < bound:
        return _invalid(
            f"Askey exponent nu={spec.phi.nu} is below the certified bound "
            f"{bound} for a tree with {topo.leaf_count} leaves")
    conditions = []
    if not (0 <= spec.beta <= 1):
        conditions.append(f"beta = {spec.beta} outside [0, 1]")
    if spec.alpha < 1:
        conditions.append(f"alpha = {spec.alpha} below 1")
    if not is_bernstein_listed(spec.psi):
        conditions.append(
            f"temporal family {spec.psi.family_name} with these parameters "
            f"is not in the Bernstein catalog")
    if conditions:
        return _unknown("; ".join(conditions))
    return _valid(
        "R2", f"Askey family with nu >= {bound} on a tree with "
        f"{topo.leaf_count} leaves, beta in [0, 1], alpha >= 1, "
        f"Bernstein-listed temporal family",
        notes=("leaf bound uses the conservative reading nu >= 4*leaves - 1",
               "alpha >= 1 accepted; the certified construction ties the "
               "time-decay exponent to the tree size"))


def _rule_r3(spec: GneitingKernel, topo: TopologyClass) -> ValidityVerdict:
    if spec.metric == "euclidean":
        return _invalid(_EUCLIDEAN_REASON)
    conditions = []
    if not is_completely_monotone_listed(spec.phi):
        conditions.append(
            f"spatial family {spec.phi.family_name} with these parameters "
            f"is not in the completely-monotone catalog")
    if not is_bernstein_listed(spec.psi):
        conditions.append(
            f"temporal family {spec.psi.family_name} with these parameters "
            f"is not in the Bernstein catalog")
    if spec.beta != -1:
        conditions.append(
            f"beta = {spec.beta}: only the beta = -1 special case of the "
            f"multiplicative regime carries a certificate")
    if conditions:
        return _unknown("; ".join(conditions))
    if topo is None:
        return _unknown(
            "the multiplicative regime is certified only on Euclidean "
            "trees and its exponent bound needs the leaf count; no "
            "topology was supplied")
    if not topo.is_tree:
        return _unknown(
            "the multiplicative regime is certified only on Euclidean "
            "trees; eigenspectrum audits refute a blanket certificate on "
            "graphs with cycles")
    if topo.leaf_count < 3:
        return _unknown(
            "the embedding behind the multiplicative certificate needs a "
            "tree with at least 3 leaves")
    bound = 2 * topo.leaf_count + 1
    if spec.alpha < bound:
        return _unknown(
            f"alpha = {spec.alpha} is below the certified bound {bound} "
            f"for a tree with {topo.leaf_count} leaves")
    return _valid(
        "R3", f"multiplicative regime beta = -1 on a tree with "
        f"{topo.leaf_count} leaves: completely-monotone-listed spatial "
        f"family, Bernstein-listed temporal family, alpha >= {bound}",
        notes=("exponent bound uses the conservative reading "
               "alpha >= 2*leaves + 1",))


def _check_circular(spec: CircularKernel, topo: TopologyClass) -> ValidityVerdict:
    # construction already enforced parameter ranges and the
    # completely-monotone inner correlation
    if spec.metric == "euclidean":
        return _invalid(_EUCLIDEAN_REASON)
    rule = f"HS.{spec.family.family_name}"
    if spec.metric == "resistance":
        return _valid(
            rule, f"cosine-series family {spec.family.family_name} with a "
            f"completely-monotone-listed inner correlation under the "
            f"resistance metric")
    if topo is not None and topo.is_cycles_and_trees:
        return _valid(
            rule, f"cosine-series family {spec.family.family_name} with a "
            f"completely-monotone-listed inner correlation; geodesic metric "
            f"on a tree or 1-sum of cycles and trees")
    return _unknown(
        "cosine-series families with the geodesic metric are uncertified "
        "on topologies beyond 1-sums of cycles and trees")
