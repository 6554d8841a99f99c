"""Shipped link-algebra presets."""
