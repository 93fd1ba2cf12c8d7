"""Compact torus representations over elliptic normal bases."""

from .cycpoly import DigitExponent, bezout_polys, cyclotomic, cyclotomic_resultant
from .enb import EnbSetup, enb_multiply, find_curve_setup, gamma, load_setup
from .errors import TorusError
from .ffield import Element, FieldCtx, OpRecorder, build_field
from .keyex import KeyStream, Session, session_decode, session_encode, simulate_exchange
from .torus import (TorusParams, check_params, membership, root_n, theta_tilde,
                    theta_tilde_prime)

__all__ = [
    "DigitExponent", "bezout_polys", "cyclotomic", "cyclotomic_resultant",
    "EnbSetup", "enb_multiply", "find_curve_setup", "gamma", "load_setup",
    "TorusError", "Element", "FieldCtx", "OpRecorder", "build_field",
    "KeyStream", "Session", "session_decode", "session_encode", "simulate_exchange",
    "TorusParams", "check_params", "membership", "root_n", "theta_tilde", "theta_tilde_prime",
]
