"""Mismatched decoding for the cognitive multiple-access channel: rate regions, error exponents and ensemble simulation."""
__version__ = "0.1.0"
