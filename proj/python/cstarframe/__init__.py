"""Frame checks and constructions over finite-dimensional C*-algebras."""

import json

from ._core import (
    AdjointableOp,
    AlgebraElement,
    AlgebraSpec,
    Error,
    ModuleSpace,
    ModuleVector,
    OperatorFamily,
    VectorFamily,
    __version__,
    absolute_value,
    adjoint,
    apply,
    closed_range_bounds,
    compose,
    frame_operator,
    inner_product,
    involution,
    is_positive,
    is_psd_order,
    is_strictly_positive,
    norm,
    op_norm,
    operator_sqrt,
    positive_sqrt,
    realize,
    scale,
    vector_norm,
)
from . import _core

DEFAULTS = {"tol": 1e-9, "eps_strict": 1e-8, "samples": 200, "seed": 0}


def _opts(kw):
    o = dict(DEFAULTS)
    o.update(kw)
    return o["tol"], o["eps_strict"], o["samples"], o["seed"]


def check_g_frame(family, tol=1e-9):
    return json.loads(_core._check_g_frame(family, tol))


def check_vector_frame(family, tol=1e-9):
    return json.loads(_core._check_vector_frame(family, tol))


def check_k_g_frame(family, k, tol=1e-9):
    return json.loads(_core._check_k_g_frame(family, k, tol))


def check_star_g_frame(family, **kw):
    return json.loads(_core._check_star_g_frame(family, *_opts(kw)))


def check_end_frame(family, **kw):
    return json.loads(_core._check_end_frame(family, *_opts(kw)))


def check_k_end_frame(family, k, **kw):
    return json.loads(_core._check_k_end_frame(family, k, *_opts(kw)))


def parseval_k_from_family(family, **kw):
    k, cert = _core._parseval_k(family, *_opts(kw))
    return k, json.loads(cert)


def k_frame_from_frame(family, k, **kw):
    fam, cert = _core._k_frame_from_frame(family, k, *_opts(kw))
    return fam, json.loads(cert)


def example_frame_injective(ops, tol=1e-9):
    fam, cert = _core._example_frame_injective(list(ops), tol)
    return fam, json.loads(cert)


def generate_instance(seed, profile):
    """Random instance for a named profile, as a dict."""
    return json.loads(_core._gen(seed, profile))


def check_instance(instance, parallel=1):
    """Run every request of an instance dict; returns (status, report)."""
    status, report = _core._check_instance(json.dumps(instance), parallel)
    return status, json.loads(report)
