"""src package."""
