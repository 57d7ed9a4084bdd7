"""Golden variety and pipeline fixtures shipped with the package."""
