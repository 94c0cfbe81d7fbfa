"""Type definitions, matrix coercion, and exceptions. This module is hidden from documentation."""
