"""__init__.py: tordeg package."""
